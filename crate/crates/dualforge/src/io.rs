//! JSON wire formats: structure files, reduct files, hom lists, relations.
//! Keys are emitted in sorted order so identical inputs produce byte-
//! identical files.

use crate::error::{Error, Result};
use crate::reduct::{Atom, ReductSpec};
use crate::relation::Relation;
use crate::signature::Signature;
use crate::structure::FiniteStructure;
use crate::term::Term;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpEntry {
    pub arity: usize,
    /// `null` entries mark partial operations, which are rejected: the
    /// engine handles total structures only.
    pub table: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelEntry {
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureFile {
    pub name: String,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(default)]
    pub operations: BTreeMap<String, OpEntry>,
    #[serde(default)]
    pub relations: BTreeMap<String, RelEntry>,
}

impl StructureFile {
    pub fn from_structure(s: &FiniteStructure) -> StructureFile {
        let mut operations = BTreeMap::new();
        for (i, (name, arity)) in s.sig().ops().iter().enumerate() {
            operations.insert(
                name.clone(),
                OpEntry { arity: *arity, table: s.op_table(i).iter().map(|&v| Some(v)).collect() },
            );
        }
        let mut relations = BTreeMap::new();
        for (i, (name, arity)) in s.sig().rels().iter().enumerate() {
            relations.insert(
                name.clone(),
                RelEntry { arity: *arity, tuples: s.rel(i).tuples().to_vec() },
            );
        }
        StructureFile {
            name: s.name().to_string(),
            size: s.size(),
            elements: s.labels().map(|l| l.to_vec()),
            operations,
            relations,
        }
    }

    pub fn into_structure(self) -> Result<FiniteStructure> {
        let ops: Vec<(String, usize)> =
            self.operations.iter().map(|(n, e)| (n.clone(), e.arity)).collect();
        let rels: Vec<(String, usize)> =
            self.relations.iter().map(|(n, e)| (n.clone(), e.arity)).collect();
        let sig = Signature::new(ops, rels)?;
        let mut tables = Vec::new();
        for (name, _) in sig.ops() {
            let entry = &self.operations[name];
            let mut table = Vec::with_capacity(entry.table.len());
            for (i, v) in entry.table.iter().enumerate() {
                match v {
                    Some(v) => table.push(*v),
                    None => {
                        return Err(Error::PartialOperation(
                            name.clone(),
                            format!("null entry at index {i}"),
                        ))
                    }
                }
            }
            tables.push(table);
        }
        let mut rel_sets = Vec::new();
        for (name, _) in sig.rels() {
            let entry = &self.relations[name];
            rel_sets.push(Relation::new(entry.arity, entry.tuples.clone())?);
        }
        FiniteStructure::new(self.name, sig, self.size, tables, rel_sets, self.elements)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignatureFile {
    #[serde(default)]
    pub ops: BTreeMap<String, usize>,
    #[serde(default)]
    pub rels: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductFile {
    pub target: SignatureFile,
    #[serde(default)]
    pub ops: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub rels: BTreeMap<String, Vec<serde_json::Value>>,
}

fn term_from_json(v: &serde_json::Value, source: &Signature) -> Result<Term> {
    match v {
        serde_json::Value::String(s) => {
            if let Some(rest) = s.strip_prefix('x') {
                if let Ok(i) = rest.parse::<usize>() {
                    return Ok(Term::Var(i));
                }
            }
            match source.op_index(s) {
                Some(op) if source.op_arity(op) == 0 => Ok(Term::App(op, vec![])),
                Some(_) => Err(Error::InvalidReduct(format!(
                    "operation '{s}' takes arguments; write it as an array"
                ))),
                None => Err(Error::InvalidReduct(format!("unknown symbol '{s}' in term"))),
            }
        }
        serde_json::Value::Array(items) => {
            let Some(serde_json::Value::String(head)) = items.first() else {
                return Err(Error::InvalidReduct("term array must start with an operation name".into()));
            };
            let op = source
                .op_index(head)
                .ok_or_else(|| Error::InvalidReduct(format!("unknown operation '{head}'")))?;
            let args: Vec<Term> =
                items[1..].iter().map(|a| term_from_json(a, source)).collect::<Result<_>>()?;
            Ok(Term::App(op, args))
        }
        other => Err(Error::InvalidReduct(format!("invalid term: {other}"))),
    }
}

fn term_to_json(t: &Term, source: &Signature) -> serde_json::Value {
    match t {
        Term::Var(i) => serde_json::Value::String(format!("x{i}")),
        Term::App(op, args) => {
            let mut items = vec![serde_json::Value::String(source.ops()[*op].0.clone())];
            items.extend(args.iter().map(|a| term_to_json(a, source)));
            serde_json::Value::Array(items)
        }
    }
}

fn atom_from_json(v: &serde_json::Value, source: &Signature) -> Result<Atom> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidReduct(format!("invalid atom: {v}")))?;
    if let Some(eq) = obj.get("eq") {
        let pair = eq
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::InvalidReduct("'eq' atom needs exactly two terms".into()))?;
        return Ok(Atom::Eq(term_from_json(&pair[0], source)?, term_from_json(&pair[1], source)?));
    }
    let (Some(rel), Some(args)) = (obj.get("rel"), obj.get("args")) else {
        return Err(Error::InvalidReduct(format!("invalid atom: {v}")));
    };
    let name = rel
        .as_str()
        .ok_or_else(|| Error::InvalidReduct("'rel' must be a relation name".into()))?;
    let ri = source
        .rel_index(name)
        .ok_or_else(|| Error::InvalidReduct(format!("unknown relation '{name}'")))?;
    let args = args
        .as_array()
        .ok_or_else(|| Error::InvalidReduct("'args' must be an array of terms".into()))?
        .iter()
        .map(|a| term_from_json(a, source))
        .collect::<Result<_>>()?;
    Ok(Atom::Rel(ri, args))
}

fn atom_to_json(a: &Atom, source: &Signature) -> serde_json::Value {
    match a {
        Atom::Eq(l, r) => {
            serde_json::json!({ "eq": [term_to_json(l, source), term_to_json(r, source)] })
        }
        Atom::Rel(ri, args) => serde_json::json!({
            "rel": source.rels()[*ri].0,
            "args": args.iter().map(|t| term_to_json(t, source)).collect::<Vec<_>>(),
        }),
    }
}

impl ReductFile {
    pub fn from_spec(spec: &ReductSpec, source: &Signature) -> ReductFile {
        let target = SignatureFile {
            ops: spec.target().ops().iter().cloned().collect(),
            rels: spec.target().rels().iter().cloned().collect(),
        };
        let ops = spec
            .target()
            .ops()
            .iter()
            .zip(spec.op_defs())
            .map(|((n, _), t)| (n.clone(), term_to_json(t, source)))
            .collect();
        let rels = spec
            .target()
            .rels()
            .iter()
            .zip(spec.rel_defs())
            .map(|((n, _), atoms)| {
                (n.clone(), atoms.iter().map(|a| atom_to_json(a, source)).collect())
            })
            .collect();
        ReductFile { target, ops, rels }
    }

    pub fn into_spec(self, source: &Signature) -> Result<ReductSpec> {
        let target = Signature::new(
            self.target.ops.iter().map(|(n, a)| (n.clone(), *a)).collect(),
            self.target.rels.iter().map(|(n, a)| (n.clone(), *a)).collect(),
        )?;
        let op_defs = self
            .ops
            .iter()
            .map(|(n, v)| Ok((n.clone(), term_from_json(v, source)?)))
            .collect::<Result<Vec<_>>>()?;
        let rel_defs = self
            .rels
            .iter()
            .map(|(n, atoms)| {
                Ok((
                    n.clone(),
                    atoms.iter().map(|a| atom_from_json(a, source)).collect::<Result<Vec<_>>>()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        ReductSpec::new(source, target, op_defs, rel_defs)
    }
}

/// Canonical JSON rendering: pretty-printed, sorted keys, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_structure_file(path: &std::path::Path) -> Result<FiniteStructure> {
    let text = std::fs::read_to_string(path)?;
    let file: StructureFile = serde_json::from_str(&text)?;
    file.into_structure()
}

pub fn read_reduct_file(path: &std::path::Path, source: &Signature) -> Result<ReductSpec> {
    let text = std::fs::read_to_string(path)?;
    let file: ReductFile = serde_json::from_str(&text)?;
    file.into_spec(source)
}

pub fn read_relation_file(path: &std::path::Path) -> Result<Relation> {
    let text = std::fs::read_to_string(path)?;
    let entry: RelEntry = serde_json::from_str(&text)?;
    Relation::new(entry.arity, entry.tuples)
}

pub fn read_hom_list_file(path: &std::path::Path) -> Result<Vec<Vec<usize>>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn structure_round_trip() {
        for name in ["D", "TWOPOS", "DM4", "N5_ego", "Kleene3_ego"] {
            let s = catalog::get(name).unwrap();
            let file = StructureFile::from_structure(&s);
            let json = to_canonical_json(&file).unwrap();
            let back: StructureFile = serde_json::from_str(&json).unwrap();
            let s2 = back.into_structure().unwrap();
            assert_eq!(s, s2, "{name}");
        }
    }

    #[test]
    fn partial_operation_rejected() {
        let json = r#"{
            "name": "p", "size": 2,
            "operations": {"f": {"arity": 1, "table": [0, null]}},
            "relations": {}
        }"#;
        let file: StructureFile = serde_json::from_str(json).unwrap();
        assert!(matches!(file.into_structure(), Err(Error::PartialOperation(_, _))));
    }

    #[test]
    fn reduct_round_trip() {
        let m = catalog::get("DM4").unwrap();
        let spec = catalog::reduct("dm4_lattice").unwrap();
        let file = ReductFile::from_spec(&spec, m.sig());
        let json = to_canonical_json(&file).unwrap();
        let back: ReductFile = serde_json::from_str(&json).unwrap();
        let spec2 = back.into_spec(m.sig()).unwrap();
        assert_eq!(spec, spec2);
    }

    #[test]
    fn terms_accept_nested_arrays_and_bare_nullaries() {
        let d = catalog::get("D").unwrap();
        let t = term_from_json(&serde_json::json!(["meet", "x0", ["join", "x0", "one"]]), d.sig())
            .unwrap();
        assert_eq!(t.eval(&d, &[0]), 0);
        assert_eq!(t.eval(&d, &[1]), 1);
        let c = term_from_json(&serde_json::json!("zero"), d.sig()).unwrap();
        assert_eq!(c.eval(&d, &[1]), 0);
    }
}
