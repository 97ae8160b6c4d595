use crate::error::{Error, Result};
use crate::iter_util::for_each_index_tuple;
use crate::relation::Relation;
use crate::signature::Signature;
use crate::structure::FiniteStructure;
use crate::term::Term;

/// One conjunct of a conjunct-atomic relation definition: either a source
/// relation applied to terms, or an equation between terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Rel(usize, Vec<Term>),
    Eq(Term, Term),
}

/// Syntactic definition of a structural reduct: every target operation is a
/// term over the source signature, every target relation a non-empty
/// conjunction of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductSpec {
    source: Signature,
    target: Signature,
    op_defs: Vec<Term>,      // parallel to target.ops()
    rel_defs: Vec<Vec<Atom>>, // parallel to target.rels()
}

impl ReductSpec {
    pub fn new(
        source: &Signature,
        target: Signature,
        op_defs: Vec<(String, Term)>,
        rel_defs: Vec<(String, Vec<Atom>)>,
    ) -> Result<ReductSpec> {
        let mut ops = Vec::with_capacity(target.ops().len());
        for (name, arity) in target.ops() {
            let term = op_defs
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| {
                    Error::InvalidReduct(format!("no definition for target operation '{name}'"))
                })?;
            term.validate(source, *arity)?;
            ops.push(term);
        }
        if op_defs.len() != target.ops().len() {
            return Err(Error::InvalidReduct("extra operation definition".into()));
        }
        let mut rels = Vec::with_capacity(target.rels().len());
        for (name, arity) in target.rels() {
            let atoms = rel_defs
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, a)| a.clone())
                .ok_or_else(|| {
                    Error::InvalidReduct(format!("no definition for target relation '{name}'"))
                })?;
            if atoms.is_empty() {
                return Err(Error::InvalidReduct(format!(
                    "relation '{name}' needs at least one atom"
                )));
            }
            for atom in &atoms {
                match atom {
                    Atom::Rel(ri, args) => {
                        if *ri >= source.rels().len() {
                            return Err(Error::InvalidReduct(format!(
                                "relation index {ri} out of range in definition of '{name}'"
                            )));
                        }
                        if args.len() != source.rel_arity(*ri) {
                            return Err(Error::ArityMismatch(format!(
                                "atom over '{}' expects {} argument(s), got {}",
                                source.rels()[*ri].0,
                                source.rel_arity(*ri),
                                args.len()
                            )));
                        }
                        for t in args {
                            t.validate(source, *arity)?;
                        }
                    }
                    Atom::Eq(l, r) => {
                        l.validate(source, *arity)?;
                        r.validate(source, *arity)?;
                    }
                }
            }
            rels.push(atoms);
        }
        if rel_defs.len() != target.rels().len() {
            return Err(Error::InvalidReduct("extra relation definition".into()));
        }
        Ok(ReductSpec { source: source.clone(), target, op_defs: ops, rel_defs: rels })
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn op_defs(&self) -> &[Term] {
        &self.op_defs
    }

    pub fn rel_defs(&self) -> &[Vec<Atom>] {
        &self.rel_defs
    }
}

fn atom_holds(a: &FiniteStructure, atom: &Atom, vars: &[usize]) -> bool {
    match atom {
        Atom::Rel(ri, args) => {
            let tuple: Vec<usize> = args.iter().map(|t| t.eval(a, vars)).collect();
            a.rel(*ri).contains(&tuple)
        }
        Atom::Eq(l, r) => l.eval(a, vars) == r.eval(a, vars),
    }
}

/// Evaluate a reduct spec on a structure: same universe, operations given by
/// term evaluation, relations by the tuples satisfying every atom. A
/// relation that comes out empty on a non-empty universe is an error.
pub fn apply_reduct(a: &FiniteStructure, spec: &ReductSpec) -> Result<FiniteStructure> {
    if a.sig() != spec.source() {
        return Err(Error::SignatureMismatch(format!(
            "reduct spec was written over a different signature than '{}'",
            a.name()
        )));
    }
    let mut op_tables = Vec::with_capacity(spec.target.ops().len());
    for (oi, (_, arity)) in spec.target.ops().iter().enumerate() {
        let term = &spec.op_defs[oi];
        let mut table = Vec::new();
        for_each_index_tuple(a.size(), *arity, |vars| {
            table.push(term.eval(a, vars));
            true
        });
        op_tables.push(table);
    }
    let mut rel_sets = Vec::with_capacity(spec.target.rels().len());
    for (ri, (rname, arity)) in spec.target.rels().iter().enumerate() {
        let atoms = &spec.rel_defs[ri];
        let mut tuples = Vec::new();
        for_each_index_tuple(a.size(), *arity, |vars| {
            if atoms.iter().all(|atom| atom_holds(a, atom, vars)) {
                tuples.push(vars.to_vec());
            }
            true
        });
        if tuples.is_empty() && a.size() > 0 {
            return Err(Error::EmptyRelation(rname.clone()));
        }
        rel_sets.push(Relation::new(*arity, tuples)?);
    }
    FiniteStructure::new_derived(
        format!("{}_flat", a.name()),
        spec.target.clone(),
        a.size(),
        op_tables,
        rel_sets,
        a.labels().map(|l| l.to_vec()),
    )
}
