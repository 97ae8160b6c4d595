use crate::error::{Error, Result};
use crate::iter_util::for_each_index_tuple;
use crate::limits::{SearchCfg, SearchOrder};
use crate::relation::Relation;
use crate::structure::FiniteStructure;
use serde::{Deserialize, Serialize};

/// A verified structure-preserving map between two structures of the same
/// signature, stored as a total map on universe indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hom {
    pub dom_size: usize,
    pub cod_size: usize,
    pub map: Vec<usize>,
}

impl Hom {
    /// Verify that `map` preserves every operation and relation.
    pub fn new(a: &FiniteStructure, b: &FiniteStructure, map: Vec<usize>) -> Result<Hom> {
        if a.sig() != b.sig() {
            return Err(Error::SignatureMismatch(format!(
                "'{}' and '{}' have different signatures",
                a.name(),
                b.name()
            )));
        }
        if map.len() != a.size() {
            return Err(Error::InvalidStructure(format!(
                "map length {} does not match domain size {}",
                map.len(),
                a.size()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= b.size()) {
            return Err(Error::InvalidStructure(format!(
                "map value {bad} outside codomain 0..{}",
                b.size()
            )));
        }
        if let Some(reason) = hom_violation(a, b, &map) {
            return Err(Error::InvalidStructure(format!("not a homomorphism: {reason}")));
        }
        Ok(Hom { dom_size: a.size(), cod_size: b.size(), map })
    }

    pub fn identity(a: &FiniteStructure) -> Hom {
        Hom { dom_size: a.size(), cod_size: a.size(), map: (0..a.size()).collect() }
    }

    pub fn apply(&self, e: usize) -> usize {
        self.map[e]
    }

    /// `other` after `self` (self: A -> B, other: B -> C).
    pub fn then(&self, other: &Hom) -> Hom {
        debug_assert_eq!(self.cod_size, other.dom_size);
        Hom {
            dom_size: self.dom_size,
            cod_size: other.cod_size,
            map: self.map.iter().map(|&v| other.map[v]).collect(),
        }
    }
}

/// First violated constraint, if any.
fn hom_violation(a: &FiniteStructure, b: &FiniteStructure, map: &[usize]) -> Option<String> {
    for (op, (opname, arity)) in a.sig().ops().iter().enumerate() {
        let mut bad = None;
        for_each_index_tuple(a.size(), *arity, |args| {
            let img: Vec<usize> = args.iter().map(|&e| map[e]).collect();
            if map[a.op_value(op, args)] != b.op_value(op, &img) {
                bad = Some(format!("operation '{opname}' at {args:?}"));
                return false;
            }
            true
        });
        if bad.is_some() {
            return bad;
        }
    }
    for (ri, (rname, _)) in a.sig().rels().iter().enumerate() {
        for t in a.rel(ri).tuples() {
            let img: Vec<usize> = t.iter().map(|&e| map[e]).collect();
            if !b.rel(ri).contains(&img) {
                return Some(format!("relation '{rname}' at {t:?}"));
            }
        }
    }
    None
}

pub fn is_hom(a: &FiniteStructure, b: &FiniteStructure, map: &[usize]) -> bool {
    map.len() == a.size()
        && map.iter().all(|&v| v < b.size())
        && hom_violation(a, b, map).is_none()
}

/// Variable order for the backtracking search: elements in generated-
/// substructure order, generators first, so operation propagation can force
/// values as early as possible.
fn variable_order(a: &FiniteStructure, order: SearchOrder) -> Vec<usize> {
    let n = a.size();
    let mut placed = vec![false; n];
    let mut seq: Vec<usize> = Vec::new();
    let extend = |closure: &[usize], placed: &mut Vec<bool>, seq: &mut Vec<usize>| {
        for &e in closure {
            if !placed[e] {
                placed[e] = true;
                seq.push(e);
            }
        }
    };
    let base = a.generate_substructure(&[]);
    extend(&base, &mut placed, &mut seq);
    while seq.len() < n {
        let pick = match order {
            SearchOrder::Forward => (0..n).find(|&e| !placed[e]).unwrap(),
            SearchOrder::Reverse => (0..n).rev().find(|&e| !placed[e]).unwrap(),
        };
        placed[pick] = true;
        seq.push(pick);
        let closure = a.generate_substructure(&seq);
        extend(&closure, &mut placed, &mut seq);
    }
    seq
}

struct HomSearch<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    assignment: Vec<usize>, // usize::MAX = unassigned
    assigned: Vec<usize>,   // trail, in assignment order
    // relation tuples of A indexed by participating element
    rel_buckets: Vec<Vec<(usize, usize)>>, // element -> (rel index, tuple index)
    nodes: u64,
    max_nodes: u64,
    results: Vec<Vec<usize>>,
}

const UNSET: usize = usize::MAX;

impl<'a> HomSearch<'a> {
    fn new(a: &'a FiniteStructure, b: &'a FiniteStructure, cfg: &SearchCfg) -> Self {
        let mut rel_buckets = vec![Vec::new(); a.size()];
        for ri in 0..a.sig().rels().len() {
            for (ti, t) in a.rel(ri).tuples().iter().enumerate() {
                let mut seen = t.clone();
                seen.sort_unstable();
                seen.dedup();
                for e in seen {
                    rel_buckets[e].push((ri, ti));
                }
            }
        }
        HomSearch {
            a,
            b,
            assignment: vec![UNSET; a.size()],
            assigned: Vec::new(),
            rel_buckets,
            nodes: 0,
            max_nodes: cfg.limits.max_search_nodes,
            results: Vec::new(),
        }
    }

    /// Assign `e -> v` and propagate operation constraints; returns false on
    /// conflict. New assignments are appended to the trail for undo.
    fn assign(&mut self, e: usize, v: usize) -> bool {
        if self.assignment[e] != UNSET {
            return self.assignment[e] == v;
        }
        self.assignment[e] = v;
        self.assigned.push(e);
        let ops: Vec<(usize, usize)> =
            self.a.sig().ops().iter().enumerate().map(|(i, (_, a))| (i, *a)).collect();
        let mut queue = vec![e];
        while let Some(cur) = queue.pop() {
            if !self.check_relations_at(cur) {
                return false;
            }
            for &(op, k) in &ops {
                if k == 0 {
                    continue;
                }
                // tuples over assigned elements with `cur` at some position
                let snapshot: Vec<usize> = self.assigned.clone();
                for fixed in 0..k {
                    let mut args = vec![0usize; k];
                    let mut conflict = false;
                    for_each_index_tuple(snapshot.len(), k - 1, |rest| {
                        let mut r = 0usize;
                        for (j, slot) in args.iter_mut().enumerate() {
                            if j == fixed {
                                *slot = cur;
                            } else {
                                *slot = snapshot[rest[r]];
                                r += 1;
                            }
                        }
                        let target = self.a.op_value(op, &args);
                        let img: Vec<usize> =
                            args.iter().map(|&x| self.assignment[x]).collect();
                        let forced = self.b.op_value(op, &img);
                        match self.assignment[target] {
                            UNSET => {
                                self.assignment[target] = forced;
                                self.assigned.push(target);
                                queue.push(target);
                                true
                            }
                            existing => {
                                conflict = existing != forced;
                                !conflict
                            }
                        }
                    });
                    if conflict {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Check every fully assigned relation tuple involving `e`.
    fn check_relations_at(&self, e: usize) -> bool {
        for &(ri, ti) in &self.rel_buckets[e] {
            let t = &self.a.rel(ri).tuples()[ti];
            let mut img = Vec::with_capacity(t.len());
            let mut complete = true;
            for &x in t {
                match self.assignment[x] {
                    UNSET => {
                        complete = false;
                        break;
                    }
                    v => img.push(v),
                }
            }
            if complete && !self.b.rel(ri).contains(&img) {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.assigned.len() > mark {
            let e = self.assigned.pop().unwrap();
            self.assignment[e] = UNSET;
        }
    }

    fn run(&mut self, vars: &[usize], values: &[usize]) -> Result<()> {
        // nullary operations pin their values up front
        let mark = self.assigned.len();
        let nullaries: Vec<(usize, usize)> = self
            .a
            .sig()
            .ops()
            .iter()
            .enumerate()
            .filter(|(_, (_, a))| *a == 0)
            .map(|(op, _)| (self.a.op_table(op)[0], self.b.op_table(op)[0]))
            .collect();
        let mut ok = true;
        for (e, v) in nullaries {
            if !self.assign(e, v) {
                ok = false;
                break;
            }
        }
        if ok {
            self.descend(vars, values, 0)?;
        }
        self.undo_to(mark);
        Ok(())
    }

    fn descend(&mut self, vars: &[usize], values: &[usize], pos: usize) -> Result<()> {
        let mut pos = pos;
        while pos < vars.len() && self.assignment[vars[pos]] != UNSET {
            pos += 1;
        }
        if pos == vars.len() {
            self.results.push(self.assignment.clone());
            return Ok(());
        }
        let e = vars[pos];
        for &v in values {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::ResourceLimit(format!(
                    "homomorphism search exceeded {} nodes",
                    self.max_nodes
                )));
            }
            let mark = self.assigned.len();
            if self.assign(e, v) {
                self.descend(vars, values, pos + 1)?;
            }
            self.undo_to(mark);
        }
        Ok(())
    }
}

/// All homomorphisms `A -> B`, canonically ordered (lexicographically on the
/// map arrays). Backtracking with forward propagation over operation
/// constraints and fail-fast checking of relation constraints.
pub fn enumerate_homs(
    a: &FiniteStructure,
    b: &FiniteStructure,
    cfg: &SearchCfg,
) -> Result<Vec<Hom>> {
    if a.sig() != b.sig() {
        return Err(Error::SignatureMismatch(format!(
            "'{}' and '{}' have different signatures",
            a.name(),
            b.name()
        )));
    }
    if a.size() == 0 {
        return Ok(vec![Hom { dom_size: 0, cod_size: b.size(), map: vec![] }]);
    }
    let vars = variable_order(a, cfg.order);
    let mut values: Vec<usize> = (0..b.size()).collect();
    if cfg.order == SearchOrder::Reverse {
        values.reverse();
    }
    let mut search = HomSearch::new(a, b, cfg);
    search.run(&vars, &values)?;
    let mut maps = std::mem::take(&mut search.results);
    maps.sort_unstable();
    debug_assert!(maps.windows(2).all(|w| w[0] != w[1]));
    Ok(maps
        .into_iter()
        .map(|map| Hom { dom_size: a.size(), cod_size: b.size(), map })
        .collect())
}

/// Why a family of maps fails to separate a structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SeparationFailure {
    Points { a: usize, b: usize },
    Relation { rel: String, tuple: Vec<usize> },
}

/// Does `x` separate the structure `a` (maps into `m`)? Separation demands
/// (i) point separation and (ii) for every relation of the signature and
/// every tuple outside it, some member of `x` maps the tuple outside the
/// corresponding relation of `m`. Returns the first witness on failure.
pub fn separates_structure(
    x: &[Hom],
    a: &FiniteStructure,
    m: &FiniteStructure,
) -> Option<SeparationFailure> {
    if let Some((p, q)) = separation_gap(&x.iter().map(|h| h.map.clone()).collect::<Vec<_>>(), a.size()) {
        return Some(SeparationFailure::Points { a: p, b: q });
    }
    for (ri, (rname, arity)) in a.sig().rels().iter().enumerate() {
        let ra = a.rel(ri);
        let rm = m.rel(ri);
        let mut witness = None;
        for_each_index_tuple(a.size(), *arity, |tuple| {
            if ra.contains(tuple) {
                return true;
            }
            let escaped = x.iter().any(|h| {
                let img: Vec<usize> = tuple.iter().map(|&e| h.map[e]).collect();
                !rm.contains(&img)
            });
            if !escaped {
                witness =
                    Some(SeparationFailure::Relation { rel: rname.clone(), tuple: tuple.to_vec() });
                return false;
            }
            true
        });
        if witness.is_some() {
            return witness;
        }
    }
    None
}

/// First pair of points not separated by any of the maps, if any.
pub fn separation_gap(maps: &[Vec<usize>], size: usize) -> Option<(usize, usize)> {
    for p in 0..size {
        for q in (p + 1)..size {
            if !maps.iter().any(|m| m[p] != m[q]) {
                return Some((p, q));
            }
        }
    }
    None
}

/// `A` belongs to the prevariety generated by `N` iff the full hom-set
/// separates the structure `A`.
pub fn in_prevariety(a: &FiniteStructure, n: &FiniteStructure, cfg: &SearchCfg) -> Result<bool> {
    let homs = enumerate_homs(a, n, cfg)?;
    Ok(separates_structure(&homs, a, n).is_none())
}

/// Bijective and the inverse map is again a homomorphism (so relations are
/// reflected, not just preserved).
pub fn is_isomorphism(h: &Hom, a: &FiniteStructure, b: &FiniteStructure) -> bool {
    if a.size() != b.size() || h.map.len() != a.size() {
        return false;
    }
    let mut inv = vec![UNSET; b.size()];
    for (e, &v) in h.map.iter().enumerate() {
        if inv[v] != UNSET {
            return false;
        }
        inv[v] = e;
    }
    is_hom(a, b, &h.map) && is_hom(b, a, &inv)
}

/// `{(a_1..a_k) : (omega_1(a_1), ..., omega_k(a_k)) in r}`, in canonical
/// order. All maps must share a domain; the tuple length must match the
/// arity of `r`.
pub fn preimage(omegas: &[&Hom], r: &Relation) -> Result<Relation> {
    if omegas.len() != r.arity() {
        return Err(Error::ArityMismatch(format!(
            "{} map(s) against a relation of arity {}",
            omegas.len(),
            r.arity()
        )));
    }
    let dom = omegas[0].dom_size;
    if omegas.iter().any(|o| o.dom_size != dom) {
        return Err(Error::ArityMismatch("maps do not share a domain".into()));
    }
    let mut tuples = Vec::new();
    for_each_index_tuple(dom, r.arity(), |t| {
        let img: Vec<usize> = t.iter().enumerate().map(|(i, &e)| omegas[i].map[e]).collect();
        if r.contains(&img) {
            tuples.push(t.to_vec());
        }
        true
    });
    Relation::new(r.arity(), tuples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn cfg() -> SearchCfg {
        SearchCfg::default()
    }

    #[test]
    fn two_chain_poset_monotone_maps() {
        let p = catalog::get("TWOPOS").unwrap();
        let homs = enumerate_homs(&p, &p, &cfg()).unwrap();
        let maps: Vec<&[usize]> = homs.iter().map(|h| h.map.as_slice()).collect();
        assert_eq!(maps, vec![&[0, 0][..], &[0, 1][..], &[1, 1][..]]);
        // oracle: check all four maps directly
        let mut expect = Vec::new();
        for m0 in 0..2 {
            for m1 in 0..2 {
                if is_hom(&p, &p, &[m0, m1]) {
                    expect.push(vec![m0, m1]);
                }
            }
        }
        assert_eq!(expect.len(), 3);
    }

    #[test]
    fn bounded_lattice_endos_pinned_by_constants() {
        let d = catalog::get("D").unwrap();
        let homs = enumerate_homs(&d, &d, &cfg()).unwrap();
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].map, vec![0, 1]);
    }

    #[test]
    fn dm4_has_identity_and_swap() {
        let m = catalog::get("DM4").unwrap();
        let homs = enumerate_homs(&m, &m, &cfg()).unwrap();
        let maps: Vec<Vec<usize>> = homs.iter().map(|h| h.map.clone()).collect();
        assert_eq!(maps, vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
        // oracle: brute force over all 256 maps
        let mut count = 0;
        for_each_index_tuple(4, 4, |map| {
            if is_hom(&m, &m, map) {
                count += 1;
            }
            true
        });
        assert_eq!(count, 2);
    }

    #[test]
    fn seed_order_does_not_change_output() {
        let m = catalog::get("DM4").unwrap();
        let fwd = enumerate_homs(&m, &m, &SearchCfg::with_order(SearchOrder::Forward)).unwrap();
        let rev = enumerate_homs(&m, &m, &SearchCfg::with_order(SearchOrder::Reverse)).unwrap();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn node_budget_is_enforced() {
        let m = catalog::get("DM4").unwrap();
        let tight = SearchCfg {
            limits: crate::limits::Limits { max_search_nodes: 1, ..Default::default() },
            order: SearchOrder::Forward,
        };
        assert!(matches!(
            enumerate_homs(&m, &m, &tight),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn separation_witnesses() {
        let d = catalog::get("D").unwrap();
        let dm4_flat = catalog::apply_named_reduct("DM4", "dm4_lattice").unwrap();
        let homs = enumerate_homs(&dm4_flat, &d, &cfg()).unwrap();
        assert_eq!(homs.len(), 2);
        assert!(separates_structure(&homs, &dm4_flat, &d).is_none());
        // a single constant map cannot separate two points
        let p = catalog::get("TWOPOS").unwrap();
        let c = Hom::new(&p, &p, vec![0, 0]).unwrap();
        assert_eq!(
            separates_structure(&[c], &p, &p),
            Some(SeparationFailure::Points { a: 0, b: 1 })
        );
    }

    #[test]
    fn n5_two_map_family_misses_one_pair() {
        // pi0 and pi0@u agree on b and c; u^2 tells them apart
        let n5 = catalog::get("N5").unwrap();
        let pi0 = catalog::carrier("N5").unwrap();
        assert_eq!(pi0, vec![0, 0, 1, 1, 1]);
        let u = n5.op_table(n5.sig().op_index("u").unwrap()).to_vec();
        assert_eq!(u, vec![0, 2, 1, 0, 4]);
        let pi0_u: Vec<usize> = u.iter().map(|&e| pi0[e]).collect();
        assert_eq!(pi0_u, vec![0, 1, 0, 0, 1]);
        assert_eq!(separation_gap(&[pi0.clone(), pi0_u.clone()], 5), Some((2, 3)));
        let u2: Vec<usize> = u.iter().map(|&e| u[e]).collect();
        let pi0_u2: Vec<usize> = u2.iter().map(|&e| pi0[e]).collect();
        assert_eq!(separation_gap(&[pi0, pi0_u, pi0_u2], 5), None);
    }

    #[test]
    fn prevariety_membership() {
        let d = catalog::get("D").unwrap();
        let sq = d.power(2, &cfg()).unwrap();
        assert!(in_prevariety(&sq, &d, &cfg()).unwrap());
        assert!(in_prevariety(&d, &d, &cfg()).unwrap());
        let chain3 = catalog::apply_named_reduct("Kleene3", "kleene3_lattice").unwrap();
        assert!(in_prevariety(&chain3, &d, &cfg()).unwrap());
    }

    #[test]
    fn isomorphism_checks() {
        let m = catalog::get("DM4").unwrap();
        assert!(is_isomorphism(&Hom::identity(&m), &m, &m));
        let swap = Hom::new(&m, &m, vec![0, 2, 1, 3]).unwrap();
        assert!(is_isomorphism(&swap, &m, &m));
        // an inclusion is not an isomorphism
        let p = catalog::get("TWOPOS").unwrap();
        let p3 = FiniteStructure::new(
            "chain3",
            p.sig().clone(),
            3,
            vec![],
            vec![Relation::new(
                2,
                vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]],
            )
            .unwrap()],
            None,
        )
        .unwrap();
        let incl = Hom::new(&p, &p3, vec![0, 2]).unwrap();
        assert!(!is_isomorphism(&incl, &p, &p3));
    }

    #[test]
    fn preimage_examples() {
        let m = catalog::get("DM4").unwrap();
        let flat = catalog::apply_named_reduct("DM4", "dm4_lattice").unwrap();
        let d = catalog::get("D").unwrap();
        let pi0 = Hom::new(&flat, &d, vec![0, 0, 1, 1]).unwrap();
        let leq = catalog::get("TWOPOS").unwrap().rel_by_name("leq").unwrap().clone();
        let pre = preimage(&[&pi0, &pi0], &leq).unwrap();
        assert_eq!(pre.len(), 12);
        // identity preimage of leq is leq itself
        let p = catalog::get("TWOPOS").unwrap();
        let id = Hom::identity(&p);
        assert_eq!(preimage(&[&id, &id], &leq).unwrap(), leq);
        // preimage of the full relation is full
        let full = Relation::full_binary(2);
        assert_eq!(preimage(&[&pi0, &pi0], &full).unwrap(), Relation::full_binary(4));
        assert_eq!(m.size(), 4);
    }
}
