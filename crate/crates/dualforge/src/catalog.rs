//! Built-in structures, reduct specs and carrier maps.
//!
//! Shift-algebra elements are encoded big-endian from their defining bit
//! sequences, so coordinate `j` of element `i` in a period-`p` algebra is
//! bit `(i >> (p-1-j)) & 1`. The sequence origin of the semilattice
//! structures is documented next to each table so the principal carrier
//! values can be audited coordinate by coordinate.

use crate::error::{Error, Result};
use crate::reduct::{Atom, ReductSpec};
use crate::relation::Relation;
use crate::signature::Signature;
use crate::structure::FiniteStructure;
use crate::term::Term;

fn rel(arity: usize, tuples: &[&[usize]]) -> Relation {
    Relation::new(arity, tuples.iter().map(|t| t.to_vec()).collect()).expect("catalog relation")
}

fn table_from<F: Fn(&[usize]) -> usize>(size: usize, arity: usize, f: F) -> Vec<usize> {
    let mut out = Vec::with_capacity(size.pow(arity as u32));
    crate::iter_util::for_each_index_tuple(size, arity, |args| {
        out.push(f(args));
        true
    });
    out
}

fn bounded_lattice_sig() -> Signature {
    Signature::new(vec![("join", 2), ("meet", 2), ("zero", 0), ("one", 0)], vec![]).unwrap()
}

fn ockham_sig() -> Signature {
    Signature::new(
        vec![("join", 2), ("meet", 2), ("neg", 1), ("zero", 0), ("one", 0)],
        vec![],
    )
    .unwrap()
}

fn shift_semilattice_sig() -> Signature {
    Signature::new(vec![("meet", 2), ("u", 1)], vec![]).unwrap()
}

fn shift_semilattice_ego_sig() -> Signature {
    Signature::new(vec![("meet", 2), ("u", 1), ("zero", 0), ("one", 0)], vec![]).unwrap()
}

// bit j (0 = leftmost) of the period-p code of element i
fn bit(i: usize, j: usize, p: usize) -> usize {
    (i >> (p - 1 - j)) & 1
}

fn code(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b)
}

/// Ockham algebra on `{0,1}^(Z_p)`: pointwise bounded lattice with negation
/// `shift left, then complement`.
fn ock(p: usize) -> FiniteStructure {
    let n = 1usize << p;
    let join = table_from(n, 2, |a| a[0] | a[1]);
    let meet = table_from(n, 2, |a| a[0] & a[1]);
    let neg = table_from(n, 1, |a| {
        let bits: Vec<usize> = (0..p).map(|j| 1 - bit(a[0], (j + 1) % p, p)).collect();
        code(&bits)
    });
    let labels = (0..n).map(|i| format!("{i:0p$b}")).collect();
    FiniteStructure::from_named_parts(
        format!("OCK{p}"),
        n,
        vec![
            ("join", 2, join),
            ("meet", 2, meet),
            ("neg", 1, neg),
            ("zero", 0, vec![0]),
            ("one", 0, vec![n - 1]),
        ],
        vec![],
        Some(labels),
    )
    .unwrap()
}

/// Alternating order on period-p shift codes: coordinates compare `<=` at
/// even positions and `>=` at odd positions, for all positions of the
/// underlying sequence (2p positions cover every residue/parity pair).
fn alternating_order(p: usize) -> Relation {
    let n = 1usize << p;
    let mut tuples = Vec::new();
    for a in 0..n {
        'next: for b in 0..n {
            for pos in 0..(2 * p) {
                let (x, y) = (bit(a, pos % p, p), bit(b, pos % p, p));
                let ok = if pos % 2 == 0 { x <= y } else { x >= y };
                if !ok {
                    continue 'next;
                }
            }
            tuples.push(vec![a, b]);
        }
    }
    Relation::new(2, tuples).unwrap()
}

/// Alter ego of `OCK p`: the left shift and the alternating order.
fn ock_ego(p: usize) -> FiniteStructure {
    let n = 1usize << p;
    let u = table_from(n, 1, |a| {
        let bits: Vec<usize> = (0..p).map(|j| bit(a[0], (j + 1) % p, p)).collect();
        code(&bits)
    });
    let sig = Signature::new(vec![("u", 1)], vec![("alt", 2)]).unwrap();
    let labels = (0..n).map(|i| format!("{i:0p$b}")).collect();
    FiniteStructure::new(
        format!("OCK{p}_ego"),
        sig,
        n,
        vec![u],
        vec![alternating_order(p)],
        Some(labels),
    )
    .unwrap()
}

fn min_meet_table(n: usize) -> Vec<usize> {
    table_from(n, 2, |a| a[0].min(a[1]))
}

fn shift_semilattice(
    name: &str,
    meet: Vec<usize>,
    u: Vec<usize>,
    labels: Vec<&str>,
) -> FiniteStructure {
    let n = u.len();
    FiniteStructure::new(
        name,
        shift_semilattice_sig(),
        n,
        vec![meet, u],
        vec![],
        Some(labels.into_iter().map(String::from).collect()),
    )
    .unwrap()
}

fn shift_semilattice_ego(base: &FiniteStructure) -> FiniteStructure {
    let n = base.size();
    let meet = base.op_table(base.sig().op_index("meet").unwrap()).to_vec();
    let u = base.op_table(base.sig().op_index("u").unwrap()).to_vec();
    FiniteStructure::from_named_parts(
        format!("{}_ego", base.name()),
        n,
        vec![("meet", 2, meet), ("u", 1, u), ("zero", 0, vec![0]), ("one", 0, vec![n - 1])],
        vec![],
        base.labels().map(|l| l.to_vec()),
    )
    .unwrap()
}

fn build(name: &str) -> Result<FiniteStructure> {
    let s = match name {
        "D" => FiniteStructure::from_named_parts(
            "D",
            2,
            vec![
                ("join", 2, vec![0, 1, 1, 1]),
                ("meet", 2, vec![0, 0, 0, 1]),
                ("zero", 0, vec![0]),
                ("one", 0, vec![1]),
            ],
            vec![],
            Some(vec!["0".into(), "1".into()]),
        )?,
        "TWOPOS" => FiniteStructure::new(
            "TWOPOS",
            Signature::new(vec![], vec![("leq", 2)])?,
            2,
            vec![],
            vec![rel(2, &[&[0, 0], &[0, 1], &[1, 1]])],
            Some(vec!["0".into(), "1".into()]),
        )?,
        "S" => FiniteStructure::from_named_parts(
            "S",
            2,
            vec![("meet", 2, vec![0, 0, 0, 1]), ("one", 0, vec![1])],
            vec![],
            Some(vec!["0".into(), "1".into()]),
        )?,
        "SPLAIN" => FiniteStructure::new(
            "SPLAIN",
            Signature::new(vec![("meet", 2)], vec![])?,
            2,
            vec![vec![0, 0, 0, 1]],
            vec![],
            Some(vec!["0".into(), "1".into()]),
        )?,
        "S01" => FiniteStructure::from_named_parts(
            "S01",
            2,
            vec![("meet", 2, vec![0, 0, 0, 1]), ("zero", 0, vec![0]), ("one", 0, vec![1])],
            vec![],
            Some(vec!["0".into(), "1".into()]),
        )?,
        "DM4" => ock(2).renamed("DM4"),
        "DM4_ego" => ock_ego(2).renamed("DM4_ego"),
        "OCK1" => ock(1),
        "OCK2" => ock(2),
        "OCK3" => ock(3),
        "OCK1_ego" => ock_ego(1),
        "OCK2_ego" => ock_ego(2),
        "OCK3_ego" => ock_ego(3),
        // 3-chain 0 < e < 1 with pseudocomplement: *0 = 1, *e = *1 = 0
        "Stone3" => FiniteStructure::from_named_parts(
            "Stone3",
            3,
            vec![
                ("join", 2, table_from(3, 2, |a| a[0].max(a[1]))),
                ("meet", 2, min_meet_table(3)),
                ("star", 1, vec![2, 0, 0]),
                ("zero", 0, vec![0]),
                ("one", 0, vec![2]),
            ],
            vec![],
            Some(vec!["0".into(), "e".into(), "1".into()]),
        )?,
        // ss is star-star, the closure onto the Boolean skeleton {0,1};
        // alt is the unique maximal subuniverse of Stone3^2 inside the
        // preimage of leq under the principal carrier (oracle-frozen)
        "Stone3_ego" => FiniteStructure::new(
            "Stone3_ego",
            Signature::new(vec![("ss", 1)], vec![("alt", 2)])?,
            3,
            vec![vec![0, 2, 2]],
            vec![rel(2, &[&[0, 0], &[1, 1], &[1, 2], &[2, 2]])],
            Some(vec!["0".into(), "e".into(), "1".into()]),
        )?,
        // 3-chain with the involution 0 <-> 1, e fixed
        "Kleene3" => FiniteStructure::from_named_parts(
            "Kleene3",
            3,
            vec![
                ("join", 2, table_from(3, 2, |a| a[0].max(a[1]))),
                ("meet", 2, min_meet_table(3)),
                ("neg", 1, vec![2, 1, 0]),
                ("zero", 0, vec![0]),
                ("one", 0, vec![2]),
            ],
            vec![],
            Some(vec!["0".into(), "e".into(), "1".into()]),
        )?,
        // the four maximal relations from the two-carrier search over leq
        // (oracle-frozen), one per ordered carrier pair: the mixed pair
        // (e->1, e->0) contributes the Boolean diagonal part r10
        "Kleene3_ego" => FiniteStructure::from_named_parts(
            "Kleene3_ego",
            3,
            vec![],
            vec![
                ("r00", rel(2, &[&[0, 0], &[1, 0], &[1, 1], &[1, 2], &[2, 2]])),
                (
                    "r01",
                    rel(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1], &[1, 2], &[2, 1], &[2, 2]]),
                ),
                ("r10", rel(2, &[&[0, 0], &[2, 2]])),
                ("r11", rel(2, &[&[0, 0], &[0, 1], &[1, 1], &[2, 1], &[2, 2]])),
            ],
            Some(vec!["0".into(), "e".into(), "1".into()]),
        )?,
        // E on (0, a1, 1) where a1 = 0111...: meet is min on the chain and
        // u shifts a1 to 1; the entropic example
        "E" => shift_semilattice("E", min_meet_table(3), vec![0, 2, 2], vec!["0", "a1", "1"]),
        "E_ego" => shift_semilattice_ego(&build("E")?),
        // chain 0 < a_(n-2) < ... < a1 < 1 with a_k = 0^k 1^inf; u steps up
        "C4" => shift_semilattice("C4", min_meet_table(4), vec![0, 2, 3, 3], vec!["0", "a2", "a1", "1"]),
        "C4_ego" => shift_semilattice_ego(&build("C4")?),
        "C5" => shift_semilattice(
            "C5",
            min_meet_table(5),
            vec![0, 2, 3, 4, 4],
            vec!["0", "a3", "a2", "a1", "1"],
        ),
        "C5_ego" => shift_semilattice_ego(&build("C5")?),
        // atoms b_k = u^k(b) with b = (1 iff pos = 0 mod n); distinct atoms
        // meet to 0 and u cycles them
        "M3" => shift_semilattice(
            "M3",
            table_from(5, 2, |a| {
                let (x, y) = (a[0], a[1]);
                if x == 0 || y == 0 {
                    0
                } else if x == 4 {
                    y
                } else if y == 4 {
                    x
                } else if x == y {
                    x
                } else {
                    0
                }
            }),
            vec![0, 2, 3, 1, 4],
            vec!["0", "b0", "b1", "b2", "1"],
        ),
        "M3_ego" => shift_semilattice_ego(&build("M3")?),
        "M4" => shift_semilattice(
            "M4",
            table_from(6, 2, |a| {
                let (x, y) = (a[0], a[1]);
                if x == 0 || y == 0 {
                    0
                } else if x == 5 {
                    y
                } else if y == 5 {
                    x
                } else if x == y {
                    x
                } else {
                    0
                }
            }),
            vec![0, 2, 3, 4, 1, 5],
            vec!["0", "b0", "b1", "b2", "b3", "1"],
        ),
        "M4_ego" => shift_semilattice_ego(&build("M4")?),
        // N5 on (0, a, b, c, 1) from a = 0101..., b = 1010..., c = 1000...:
        // a^b = a^c = 0, b^c = c; u swaps a,b and kills c
        "N5" => shift_semilattice(
            "N5",
            vec![
                0, 0, 0, 0, 0, //
                0, 1, 0, 0, 1, //
                0, 0, 2, 3, 2, //
                0, 0, 3, 3, 3, //
                0, 1, 2, 3, 4,
            ],
            vec![0, 2, 1, 0, 4],
            vec!["0", "a", "b", "c", "1"],
        ),
        "N5_ego" => shift_semilattice_ego(&build("N5")?),
        _ => return Err(Error::UnknownName(name.into())),
    };
    Ok(s)
}

/// Fetch a catalog structure by name.
pub fn get(name: &str) -> Result<FiniteStructure> {
    build(name)
}

pub fn names() -> Vec<&'static str> {
    vec![
        "D", "TWOPOS", "S", "SPLAIN", "S01", "DM4", "DM4_ego", "OCK1", "OCK1_ego", "OCK2",
        "OCK2_ego", "OCK3", "OCK3_ego", "Stone3", "Stone3_ego", "Kleene3", "Kleene3_ego", "E",
        "E_ego", "C4", "C4_ego", "C5", "C5_ego", "M3", "M3_ego", "M4", "M4_ego", "N5", "N5_ego",
    ]
}

/// Principal carrier map for a catalog algebra: evaluation of the defining
/// sequences at position 0 (for Stone3, the lattice map sending e to 0).
pub fn carrier(name: &str) -> Result<Vec<usize>> {
    Ok(match name {
        "DM4" | "OCK2" => vec![0, 0, 1, 1],
        "OCK1" => vec![0, 1],
        "OCK3" => (0..8).map(|i| i >> 2).collect(),
        "Stone3" | "Kleene3" => vec![0, 0, 1],
        "E" => vec![0, 0, 1],
        "C4" => vec![0, 0, 0, 1],
        "C5" => vec![0, 0, 0, 0, 1],
        // b0 = 100..., all other atoms start with 0
        "M3" => vec![0, 1, 0, 0, 1],
        "M4" => vec![0, 1, 0, 0, 0, 1],
        "N5" => vec![0, 0, 1, 1, 1],
        _ => return Err(Error::UnknownName(name.into())),
    })
}

fn lattice_reduct(source: &Signature) -> Result<ReductSpec> {
    let need = |n: &str| {
        source
            .op_index(n)
            .ok_or_else(|| Error::InvalidReduct(format!("source has no operation '{n}'")))
    };
    let (j, m, z, o) = (need("join")?, need("meet")?, need("zero")?, need("one")?);
    ReductSpec::new(
        source,
        bounded_lattice_sig(),
        vec![
            ("join".into(), Term::App(j, vec![Term::Var(0), Term::Var(1)])),
            ("meet".into(), Term::App(m, vec![Term::Var(0), Term::Var(1)])),
            ("zero".into(), Term::App(z, vec![])),
            ("one".into(), Term::App(o, vec![])),
        ],
        vec![],
    )
}

fn order_reduct(source: &Signature) -> Result<ReductSpec> {
    let alt = source
        .rel_index("alt")
        .ok_or_else(|| Error::InvalidReduct("source has no relation 'alt'".into()))?;
    ReductSpec::new(
        source,
        Signature::new(vec![], vec![("leq", 2)])?,
        vec![],
        vec![("leq".into(), vec![Atom::Rel(alt, vec![Term::Var(0), Term::Var(1)])])],
    )
}

fn semilattice_reduct(source: &Signature) -> Result<ReductSpec> {
    let m = source
        .op_index("meet")
        .ok_or_else(|| Error::InvalidReduct("source has no operation 'meet'".into()))?;
    ReductSpec::new(
        source,
        Signature::new(vec![("meet", 2)], vec![])?,
        vec![("meet".into(), Term::App(m, vec![Term::Var(0), Term::Var(1)]))],
        vec![],
    )
}

fn bounded_semilattice_reduct(source: &Signature) -> Result<ReductSpec> {
    let need = |n: &str| {
        source
            .op_index(n)
            .ok_or_else(|| Error::InvalidReduct(format!("source has no operation '{n}'")))
    };
    let (m, z, o) = (need("meet")?, need("zero")?, need("one")?);
    ReductSpec::new(
        source,
        Signature::new(vec![("meet", 2), ("zero", 0), ("one", 0)], vec![])?,
        vec![
            ("meet".into(), Term::App(m, vec![Term::Var(0), Term::Var(1)])),
            ("zero".into(), Term::App(z, vec![])),
            ("one".into(), Term::App(o, vec![])),
        ],
        vec![],
    )
}

/// Fetch a catalog reduct spec by name.
pub fn reduct(name: &str) -> Result<ReductSpec> {
    match name {
        "dm4_lattice" => lattice_reduct(get("DM4")?.sig()),
        "ock1_lattice" => lattice_reduct(get("OCK1")?.sig()),
        "ock2_lattice" => lattice_reduct(get("OCK2")?.sig()),
        "ock3_lattice" => lattice_reduct(get("OCK3")?.sig()),
        "stone3_lattice" => lattice_reduct(get("Stone3")?.sig()),
        "kleene3_lattice" => lattice_reduct(get("Kleene3")?.sig()),
        "dm4_order" => order_reduct(get("DM4_ego")?.sig()),
        "ock1_order" => order_reduct(get("OCK1_ego")?.sig()),
        "ock2_order" => order_reduct(get("OCK2_ego")?.sig()),
        "ock3_order" => order_reduct(get("OCK3_ego")?.sig()),
        "stone3_order" => {
            let ego = get("Stone3_ego")?;
            order_reduct(ego.sig())
        }
        "e_semilattice" => semilattice_reduct(get("E")?.sig()),
        "c4_semilattice" => semilattice_reduct(get("C4")?.sig()),
        "c5_semilattice" => semilattice_reduct(get("C5")?.sig()),
        "m3_semilattice" => semilattice_reduct(get("M3")?.sig()),
        "m4_semilattice" => semilattice_reduct(get("M4")?.sig()),
        "n5_semilattice" => semilattice_reduct(get("N5")?.sig()),
        "e_ego_bounded" => bounded_semilattice_reduct(get("E_ego")?.sig()),
        "c4_ego_bounded" => bounded_semilattice_reduct(get("C4_ego")?.sig()),
        "c5_ego_bounded" => bounded_semilattice_reduct(get("C5_ego")?.sig()),
        "m3_ego_bounded" => bounded_semilattice_reduct(get("M3_ego")?.sig()),
        "m4_ego_bounded" => bounded_semilattice_reduct(get("M4_ego")?.sig()),
        "n5_ego_bounded" => bounded_semilattice_reduct(get("N5_ego")?.sig()),
        _ => Err(Error::UnknownName(name.into())),
    }
}

pub fn reduct_names() -> Vec<&'static str> {
    vec![
        "dm4_lattice", "ock1_lattice", "ock2_lattice", "ock3_lattice", "stone3_lattice",
        "kleene3_lattice", "dm4_order", "ock1_order", "ock2_order", "ock3_order", "stone3_order",
        "e_semilattice", "c4_semilattice", "c5_semilattice", "m3_semilattice", "m4_semilattice",
        "n5_semilattice", "e_ego_bounded", "c4_ego_bounded", "c5_ego_bounded", "m3_ego_bounded",
        "m4_ego_bounded", "n5_ego_bounded",
    ]
}

/// Convenience: fetch a structure and apply a named reduct to it.
pub fn apply_named_reduct(structure: &str, reduct_name: &str) -> Result<FiniteStructure> {
    let s = get(structure)?;
    let spec = reduct(reduct_name)?;
    crate::reduct::apply_reduct(&s, &spec)
}

/// Which base duality a catalog pair piggybacks on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    /// Bounded distributive lattices against the topologised two-chain.
    D,
    /// Meet semilattices with 1 against themselves.
    S,
    /// Plain meet semilattices against bounded topological semilattices.
    S01,
}

impl BaseKind {
    /// The base pair (N, N-with-swapped-role) for this kind.
    pub fn base_structures(self) -> (FiniteStructure, FiniteStructure) {
        match self {
            BaseKind::D => (get("D").unwrap(), get("TWOPOS").unwrap()),
            BaseKind::S => (get("S").unwrap(), get("S").unwrap()),
            BaseKind::S01 => (get("SPLAIN").unwrap(), get("S01").unwrap()),
        }
    }
}

/// A compatible (algebra, alter ego) pair from the catalog, with the reduct
/// specs and principal carrier used by the verification suites.
#[derive(Debug, Clone, Copy)]
pub struct CatalogPair {
    pub m: &'static str,
    pub ego: &'static str,
    pub base: BaseKind,
    pub reduct_a: Option<&'static str>,
    pub reduct_x: Option<&'static str>,
}

pub fn pairs() -> Vec<CatalogPair> {
    use BaseKind::*;
    vec![
        CatalogPair { m: "D", ego: "TWOPOS", base: D, reduct_a: None, reduct_x: None },
        CatalogPair { m: "S", ego: "S", base: S, reduct_a: None, reduct_x: None },
        CatalogPair { m: "SPLAIN", ego: "S01", base: S01, reduct_a: None, reduct_x: None },
        CatalogPair {
            m: "DM4",
            ego: "DM4_ego",
            base: D,
            reduct_a: Some("dm4_lattice"),
            reduct_x: Some("dm4_order"),
        },
        CatalogPair {
            m: "OCK1",
            ego: "OCK1_ego",
            base: D,
            reduct_a: Some("ock1_lattice"),
            reduct_x: Some("ock1_order"),
        },
        CatalogPair {
            m: "OCK2",
            ego: "OCK2_ego",
            base: D,
            reduct_a: Some("ock2_lattice"),
            reduct_x: Some("ock2_order"),
        },
        CatalogPair {
            m: "OCK3",
            ego: "OCK3_ego",
            base: D,
            reduct_a: Some("ock3_lattice"),
            reduct_x: Some("ock3_order"),
        },
        CatalogPair {
            m: "Stone3",
            ego: "Stone3_ego",
            base: D,
            reduct_a: Some("stone3_lattice"),
            reduct_x: Some("stone3_order"),
        },
        CatalogPair {
            m: "Kleene3",
            ego: "Kleene3_ego",
            base: D,
            reduct_a: Some("kleene3_lattice"),
            reduct_x: None,
        },
        CatalogPair {
            m: "E",
            ego: "E_ego",
            base: S01,
            reduct_a: Some("e_semilattice"),
            reduct_x: Some("e_ego_bounded"),
        },
        CatalogPair {
            m: "C4",
            ego: "C4_ego",
            base: S01,
            reduct_a: Some("c4_semilattice"),
            reduct_x: Some("c4_ego_bounded"),
        },
        CatalogPair {
            m: "C5",
            ego: "C5_ego",
            base: S01,
            reduct_a: Some("c5_semilattice"),
            reduct_x: Some("c5_ego_bounded"),
        },
        CatalogPair {
            m: "M3",
            ego: "M3_ego",
            base: S01,
            reduct_a: Some("m3_semilattice"),
            reduct_x: Some("m3_ego_bounded"),
        },
        CatalogPair {
            m: "M4",
            ego: "M4_ego",
            base: S01,
            reduct_a: Some("m4_semilattice"),
            reduct_x: Some("m4_ego_bounded"),
        },
        CatalogPair {
            m: "N5",
            ego: "N5_ego",
            base: S01,
            reduct_a: Some("n5_semilattice"),
            reduct_x: Some("n5_ego_bounded"),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::check_compatible;

    #[test]
    fn every_entry_builds() {
        for name in names() {
            let s = get(name).unwrap();
            assert!(s.size() >= 1, "{name}");
        }
        for name in reduct_names() {
            reduct(name).unwrap();
        }
    }

    #[test]
    fn spec_pinned_tables() {
        let dm4 = get("DM4").unwrap();
        let neg = dm4.sig().op_index("neg").unwrap();
        assert_eq!(dm4.op_table(neg), &[3, 1, 2, 0]);
        let n5 = get("N5").unwrap();
        assert_eq!(n5.op_table(n5.sig().op_index("u").unwrap()), &[0, 2, 1, 0, 4]);
        let e = get("E").unwrap();
        assert_eq!(e.op_table(e.sig().op_index("u").unwrap()), &[0, 2, 2]);
    }

    #[test]
    fn dm4_equals_ock2() {
        let dm4 = get("DM4").unwrap();
        let ock2 = get("OCK2").unwrap();
        assert_eq!(dm4.sig(), ock2.sig());
        for op in 0..dm4.sig().ops().len() {
            assert_eq!(dm4.op_table(op), ock2.op_table(op));
        }
    }

    #[test]
    fn dm4_alternating_order_matches_spec_tuples() {
        let ego = get("DM4_ego").unwrap();
        let alt = ego.rel_by_name("alt").unwrap();
        let expect: Vec<Vec<usize>> = vec![
            vec![0, 0],
            vec![0, 2],
            vec![1, 0],
            vec![1, 1],
            vec![1, 2],
            vec![1, 3],
            vec![2, 2],
            vec![3, 2],
            vec![3, 3],
        ];
        assert_eq!(alt.tuples(), expect.as_slice());
        assert_eq!(ego.op_table(ego.sig().op_index("u").unwrap()), &[0, 2, 1, 3]);
    }

    #[test]
    fn odd_period_alternating_orders_degenerate_to_the_diagonal() {
        assert_eq!(alternating_order(1), Relation::diagonal(2));
        assert_eq!(alternating_order(3), Relation::diagonal(8));
    }

    #[test]
    fn all_pairs_are_compatible() {
        for pair in pairs() {
            let m = get(pair.m).unwrap();
            let ego = get(pair.ego).unwrap();
            check_compatible(&m, &ego)
                .unwrap_or_else(|e| panic!("{} / {}: {e}", pair.m, pair.ego));
            // compatibility is symmetric
            check_compatible(&ego, &m)
                .unwrap_or_else(|e| panic!("{} / {} (swapped): {e}", pair.m, pair.ego));
        }
    }

    #[test]
    fn carriers_are_base_homomorphisms() {
        use crate::hom::Hom;
        for pair in pairs() {
            let Some(ra) = pair.reduct_a else { continue };
            let flat = apply_named_reduct(pair.m, ra).unwrap();
            let (n, _) = pair.base.base_structures();
            let omega = carrier(pair.m).unwrap();
            Hom::new(&flat, &n, omega)
                .unwrap_or_else(|e| panic!("carrier for {}: {e}", pair.m));
        }
    }

    #[test]
    fn mn_atoms_meet_to_zero_and_u_is_an_endomorphism() {
        for name in ["M3", "M4"] {
            let m = get(name).unwrap();
            let meet = m.sig().op_index("meet").unwrap();
            let u = m.sig().op_index("u").unwrap();
            let atoms: Vec<usize> = (1..m.size() - 1).collect();
            for &i in &atoms {
                for &j in &atoms {
                    let v = m.op_value(meet, &[i, j]);
                    assert_eq!(v, if i == j { i } else { 0 });
                }
            }
            // u is an endomorphism of the semilattice reduct
            let ut = m.op_table(u);
            for a in 0..m.size() {
                for b in 0..m.size() {
                    assert_eq!(
                        ut[m.op_value(meet, &[a, b])],
                        m.op_value(meet, &[ut[a], ut[b]])
                    );
                }
            }
        }
    }

    #[test]
    fn sequence_origin_of_the_n5_tables() {
        // windows of the defining sequences (first 8 positions)
        let win: [(usize, [usize; 8]); 5] = [
            (0, [0, 0, 0, 0, 0, 0, 0, 0]),
            (1, [0, 1, 0, 1, 0, 1, 0, 1]), // a
            (2, [1, 0, 1, 0, 1, 0, 1, 0]), // b
            (3, [1, 0, 0, 0, 0, 0, 0, 0]), // c
            (4, [1, 1, 1, 1, 1, 1, 1, 1]),
        ];
        let n5 = get("N5").unwrap();
        let meet = n5.sig().op_index("meet").unwrap();
        let u = n5.sig().op_index("u").unwrap();
        let find = |w: &[usize; 8]| win.iter().find(|(_, v)| v == w).map(|(i, _)| *i);
        for (i, wi) in &win {
            // u = left shift (c shifts into the all-zero tail)
            let mut shifted = [0usize; 8];
            shifted[..7].copy_from_slice(&wi[1..]);
            shifted[7] = if *i == 3 || *i == 0 { 0 } else { wi[7 - 1] };
            if let Some(j) = find(&shifted) {
                assert_eq!(n5.op_table(u)[*i], j, "u at element {i}");
            }
            for (k, wk) in &win {
                let mut m = [0usize; 8];
                for p in 0..8 {
                    m[p] = wi[p].min(wk[p]);
                }
                let expect = find(&m).expect("meet window must be an element window");
                assert_eq!(n5.op_value(meet, &[*i, *k]), expect, "meet of {i},{k}");
            }
        }
        // carrier = evaluation at position 0
        let pi0 = carrier("N5").unwrap();
        for (i, w) in &win {
            assert_eq!(pi0[*i], w[0]);
        }
    }
}
