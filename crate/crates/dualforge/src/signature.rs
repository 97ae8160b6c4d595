use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// A finite relational-algebraic signature: named total operation symbols and
/// named relation symbols, each with an arity. Symbols are kept sorted by
/// name so signatures compare independently of declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    ops: Vec<(String, usize)>,
    rels: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(ops: Vec<(S, usize)>, rels: Vec<(S, usize)>) -> Result<Signature> {
        let mut ops: Vec<(String, usize)> = ops.into_iter().map(|(n, a)| (n.into(), a)).collect();
        let mut rels: Vec<(String, usize)> = rels.into_iter().map(|(n, a)| (n.into(), a)).collect();
        ops.sort();
        rels.sort();
        let mut seen = BTreeSet::new();
        for (name, _) in ops.iter().chain(rels.iter()) {
            if name.is_empty() {
                return Err(Error::InvalidSignature("empty symbol name".into()));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidSignature(format!("duplicate symbol '{name}'")));
            }
        }
        for (name, arity) in &rels {
            if *arity == 0 {
                return Err(Error::InvalidSignature(format!(
                    "relation '{name}' must have arity >= 1"
                )));
            }
        }
        Ok(Signature { ops, rels })
    }

    pub fn empty() -> Signature {
        Signature { ops: vec![], rels: vec![] }
    }

    pub fn ops(&self) -> &[(String, usize)] {
        &self.ops
    }

    pub fn rels(&self) -> &[(String, usize)] {
        &self.rels
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|(n, _)| n == name)
    }

    pub fn rel_index(&self, name: &str) -> Option<usize> {
        self.rels.iter().position(|(n, _)| n == name)
    }

    pub fn op_arity(&self, idx: usize) -> usize {
        self.ops[idx].1
    }

    pub fn rel_arity(&self, idx: usize) -> usize {
        self.rels[idx].1
    }

    /// No relation symbols.
    pub fn is_total_algebra(&self) -> bool {
        self.rels.is_empty()
    }

    /// No operation symbols.
    pub fn is_purely_relational(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn has_nullary_ops(&self) -> bool {
        self.ops.iter().any(|(_, a)| *a == 0)
    }

    /// Every operation unary or nullary.
    pub fn ops_at_most_unary(&self) -> bool {
        self.ops.iter().all(|(_, a)| *a <= 1)
    }
}
