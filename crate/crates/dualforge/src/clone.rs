use crate::hom::Hom;
use crate::structure::FiniteStructure;
use crate::term::Term;
use std::collections::HashMap;

/// A total unary term function together with one witnessing term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryTermFn {
    pub map: Vec<usize>,
    pub term: Term,
}

/// The unary clone: all total unary term functions, computed as a fixpoint
/// from the identity and the nullary constants, closing under every
/// operation. Witness terms come from the first (breadth-first) round that
/// produces a map, so they have minimal operation depth. Canonical order:
/// lexicographic on the maps.
pub fn clo1(m: &FiniteStructure) -> Vec<UnaryTermFn> {
    let n = m.size();
    let mut known: HashMap<Vec<usize>, Term> = HashMap::new();
    let mut order: Vec<Vec<usize>> = Vec::new();
    let add = |map: Vec<usize>, term: Term, known: &mut HashMap<Vec<usize>, Term>, order: &mut Vec<Vec<usize>>| {
        if !known.contains_key(&map) {
            known.insert(map.clone(), term);
            order.push(map);
            true
        } else {
            false
        }
    };
    add((0..n).collect(), Term::Var(0), &mut known, &mut order);
    for (op, (_, arity)) in m.sig().ops().iter().enumerate() {
        if *arity == 0 {
            let c = m.op_table(op)[0];
            add(vec![c; n], Term::App(op, vec![]), &mut known, &mut order);
        }
    }
    loop {
        let snapshot = order.clone();
        let mut fresh: Vec<(Vec<usize>, Term)> = Vec::new();
        for (op, (_, arity)) in m.sig().ops().iter().enumerate() {
            let k = *arity;
            if k == 0 {
                continue;
            }
            let mut idxs = vec![0usize; k];
            'outer: loop {
                let map: Vec<usize> = (0..n)
                    .map(|a| {
                        let args: Vec<usize> =
                            idxs.iter().map(|&i| snapshot[i][a]).collect();
                        m.op_value(op, &args)
                    })
                    .collect();
                if !known.contains_key(&map) && !fresh.iter().any(|(f, _)| f == &map) {
                    let term = Term::App(
                        op,
                        idxs.iter().map(|&i| known[&snapshot[i]].clone()).collect(),
                    );
                    fresh.push((map, term));
                }
                let mut j = k;
                loop {
                    if j == 0 {
                        break 'outer;
                    }
                    j -= 1;
                    idxs[j] += 1;
                    if idxs[j] < snapshot.len() {
                        break;
                    }
                    idxs[j] = 0;
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        for (map, term) in fresh {
            add(map, term, &mut known, &mut order);
        }
    }
    let mut out: Vec<UnaryTermFn> = known
        .into_iter()
        .map(|(map, term)| UnaryTermFn { map, term })
        .collect();
    out.sort_by(|a, b| a.map.cmp(&b.map));
    out
}

/// All compositions `omega . u`, deduplicated, in canonical order.
pub fn compose_family(omegas: &[Hom], fns: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for omega in omegas {
        for u in fns {
            let composed: Vec<usize> = u.iter().map(|&e| omega.map[e]).collect();
            out.push(composed);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Outcome of the named-constants test.
#[derive(Debug, Clone)]
pub struct NamedConstantsReport {
    /// Values of nullary term functions (the subuniverse generated by the
    /// nullary operations).
    pub nullary_values: Vec<usize>,
    /// Constant unary term functions whose value is not a nullary-term
    /// value, with a witnessing term (rendered).
    pub unnamed: Vec<(usize, String)>,
}

impl NamedConstantsReport {
    pub fn ok(&self) -> bool {
        self.unnamed.is_empty()
    }
}

/// Does every constant unary term function take a value that is also the
/// value of a nullary term? Nullary-term values are the closure of the
/// nullary-operation values under all operations, which covers constants
/// produced by composite terms.
pub fn named_constants(mt: &FiniteStructure) -> NamedConstantsReport {
    let nullary_values = if mt.sig().has_nullary_ops() {
        mt.generate_substructure(&[])
    } else {
        Vec::new()
    };
    let mut unnamed = Vec::new();
    for f in clo1(mt) {
        if let Some(&v) = f.map.first() {
            if f.map.iter().all(|&x| x == v) && nullary_values.binary_search(&v).is_err() {
                unnamed.push((v, f.term.render(mt.sig())));
            }
        }
    }
    NamedConstantsReport { nullary_values, unnamed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::error::Result;
    use crate::relation::Relation;
    use crate::signature::Signature;
    use crate::structure::FiniteStructure;

    #[test]
    fn clo1_of_bounded_lattice() {
        let d = catalog::get("D").unwrap();
        let maps: Vec<Vec<usize>> = clo1(&d).into_iter().map(|f| f.map).collect();
        assert_eq!(maps, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn clo1_of_pure_order_is_identity() {
        let p = catalog::get("TWOPOS").unwrap();
        let maps: Vec<Vec<usize>> = clo1(&p).into_iter().map(|f| f.map).collect();
        assert_eq!(maps, vec![vec![0, 1]]);
    }

    #[test]
    fn clo1_of_n5_contains_shift_iterates() {
        let n5 = catalog::get("N5").unwrap();
        let fns = clo1(&n5);
        let maps: Vec<&Vec<usize>> = fns.iter().map(|f| &f.map).collect();
        assert!(maps.contains(&&vec![0, 2, 1, 0, 4])); // u
        assert!(maps.contains(&&vec![0, 1, 2, 0, 4])); // u^2: fixes 0,a,b,1, sends c to 0
        // every witness re-evaluates to its stored map
        for f in &fns {
            for a in 0..n5.size() {
                assert_eq!(f.term.eval(&n5, &[a]), f.map[a]);
            }
        }
    }

    #[test]
    fn compose_family_examples() {
        let n5 = catalog::get("N5").unwrap();
        let flat = catalog::apply_named_reduct("N5", "n5_semilattice").unwrap();
        let splain = catalog::get("SPLAIN").unwrap();
        let pi0 = Hom::new(&flat, &splain, catalog::carrier("N5").unwrap()).unwrap();
        let fns: Vec<Vec<usize>> = clo1(&n5).into_iter().map(|f| f.map).collect();
        let family = compose_family(&[pi0], &fns);
        assert!(family.contains(&vec![0, 0, 1, 1, 1]));
        assert!(family.contains(&vec![0, 1, 0, 0, 1]));
        assert!(compose_family(&[], &fns).is_empty());
        let id: Vec<Vec<usize>> = vec![(0..5).collect()];
        let flat2 = catalog::apply_named_reduct("N5", "n5_semilattice").unwrap();
        let pi0b = Hom::new(&flat2, &splain, catalog::carrier("N5").unwrap()).unwrap();
        assert_eq!(compose_family(&[pi0b.clone()], &id), vec![pi0b.map]);
    }

    #[test]
    fn named_constants_examples() -> Result<()> {
        // semilattice alter ego <{0,1}; meet, 1>: constant-1 named
        let s = catalog::get("S").unwrap();
        assert!(named_constants(&s).ok());
        // a structure with a constant unary op but no nullaries
        let sig = Signature::new(vec![("z", 1)], vec![("r", 1)])?;
        let bad = FiniteStructure::new(
            "bad",
            sig,
            2,
            vec![vec![0, 0]],
            vec![Relation::new(1, vec![vec![0], vec![1]])?],
            None,
        )?;
        let report = named_constants(&bad);
        assert!(!report.ok());
        assert_eq!(report.unnamed[0].0, 0);
        // the entropic ego with 0,1 nullaries names everything
        let e_ego = catalog::get("E_ego").unwrap();
        assert!(named_constants(&e_ego).ok());
        Ok(())
    }
}
