use crate::clone::named_constants;
use crate::error::{Error, Result};
use crate::hom::{enumerate_homs, is_hom, separates_structure, Hom};
use crate::iter_util::for_each_index_tuple;
use crate::limits::SearchCfg;
use crate::par;
use crate::reduct::{apply_reduct, ReductSpec};
use crate::relation::Relation;
use crate::structure::{check_compatible, FiniteStructure};
use serde::Serialize;
use std::str::FromStr;

/// A hom-set equipped with the pointwise structure of `over`: the carrier is
/// the canonical hom list and the structure's universe indexes it.
#[derive(Debug, Clone)]
pub struct DualObject {
    pub carrier: Vec<Hom>,
    pub structure: FiniteStructure,
}

/// Lift the operations and relations of `over` pointwise to a (sorted)
/// hom-set carrier. Fails if the carrier is not closed under some lifted
/// operation, which would mean the two sides are not compatible.
pub fn lift_hom_set(carrier: &[Hom], over: &FiniteStructure) -> Result<FiniteStructure> {
    let size = carrier.len();
    let dom = carrier.first().map(|h| h.dom_size).unwrap_or(0);
    if size == 0 && over.sig().has_nullary_ops() {
        return Err(Error::Incompatible(
            "an empty hom-set cannot carry a nullary operation".into(),
        ));
    }
    let find = |map: &[usize]| -> Option<usize> {
        carrier.binary_search_by(|h| h.map.as_slice().cmp(map)).ok()
    };
    let mut op_tables = Vec::with_capacity(over.sig().ops().len());
    for (op, (opname, arity)) in over.sig().ops().iter().enumerate() {
        let mut table = Vec::new();
        let mut missing = false;
        for_each_index_tuple(size, *arity, |idxs| {
            let composite: Vec<usize> = (0..dom)
                .map(|a| {
                    let args: Vec<usize> = idxs.iter().map(|&i| carrier[i].map[a]).collect();
                    over.op_value(op, &args)
                })
                .collect();
            match find(&composite) {
                Some(pos) => {
                    table.push(pos);
                    true
                }
                None => {
                    missing = true;
                    false
                }
            }
        });
        if missing {
            return Err(Error::Incompatible(format!(
                "hom-set is not closed under the lifted operation '{opname}'"
            )));
        }
        op_tables.push(table);
    }
    let mut rel_sets = Vec::with_capacity(over.sig().rels().len());
    for (ri, (_, arity)) in over.sig().rels().iter().enumerate() {
        let rel = over.rel(ri);
        let mut tuples = Vec::new();
        for_each_index_tuple(size, *arity, |idxs| {
            let inside = (0..dom).all(|a| {
                let img: Vec<usize> = idxs.iter().map(|&i| carrier[i].map[a]).collect();
                rel.contains(&img)
            });
            if inside {
                tuples.push(idxs.to_vec());
            }
            true
        });
        rel_sets.push(Relation::new(*arity, tuples)?);
    }
    FiniteStructure::new_derived(
        format!("lift[{}]", over.name()),
        over.sig().clone(),
        size,
        op_tables,
        rel_sets,
        None,
    )
}

/// The dual of `a`: its hom-set into `m` carrying the pointwise ego
/// structure. Requires `a` to belong to the prevariety of `m` and the ego to
/// be compatible.
pub fn dual(
    a: &FiniteStructure,
    m: &FiniteStructure,
    mt: &FiniteStructure,
    cfg: &SearchCfg,
) -> Result<DualObject> {
    check_compatible(m, mt)?;
    let carrier = enumerate_homs(a, m, cfg)?;
    if a.size() > 0 {
        if let Some(fail) = separates_structure(&carrier, a, m) {
            return Err(Error::InvalidStructure(format!(
                "'{}' is not in the prevariety of '{}' ({fail:?})",
                a.name(),
                m.name()
            )));
        }
    }
    let structure = lift_hom_set(&carrier, mt)?.renamed(format!("D({})", a.name()));
    Ok(DualObject { carrier, structure })
}

/// Outcome of one evaluation-map check.
#[derive(Debug, Clone, Serialize)]
pub struct EvalOutcome {
    pub base_size: usize,
    pub dual_size: usize,
    pub double_dual_size: usize,
    pub embedding: bool,
    pub injective: bool,
    pub surjective: bool,
    pub is_iso: bool,
    /// A morphism of the double dual missed by every evaluation, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unmatched: Option<Vec<usize>>,
}

/// Check the evaluation map of `a` into its double dual. For the co-duality
/// direction call with the roles of structure and ego swapped; the
/// construction is the same at finite scale.
pub fn evaluation_check(
    a: &FiniteStructure,
    alg: &FiniteStructure,
    ego: &FiniteStructure,
    cfg: &SearchCfg,
) -> Result<EvalOutcome> {
    let d = dual(a, alg, ego, cfg)?;
    let ed_carrier = enumerate_homs(&d.structure, ego, cfg)?;
    let ed_structure = lift_hom_set(&ed_carrier, alg)?;
    let mut image = vec![false; ed_carrier.len()];
    let mut e_map = Vec::with_capacity(a.size());
    let mut embedded = true;
    for elt in 0..a.size() {
        let eval: Vec<usize> = d.carrier.iter().map(|h| h.map[elt]).collect();
        match ed_carrier.binary_search_by(|h| h.map.as_slice().cmp(eval.as_slice())) {
            Ok(pos) => {
                image[pos] = true;
                e_map.push(pos);
            }
            Err(_) => {
                // evaluation failed to be a morphism: not an embedding
                embedded = false;
                break;
            }
        }
    }
    if !embedded {
        return Ok(EvalOutcome {
            base_size: a.size(),
            dual_size: d.carrier.len(),
            double_dual_size: ed_carrier.len(),
            embedding: false,
            injective: false,
            surjective: false,
            is_iso: false,
            unmatched: None,
        });
    }
    let mut seen = vec![false; ed_carrier.len()];
    let mut injective = true;
    for &p in &e_map {
        if seen[p] {
            injective = false;
        }
        seen[p] = true;
    }
    // embedding: a homomorphism that also reflects every relation
    let mut embedding = injective && is_hom(a, &ed_structure, &e_map);
    if embedding {
        'rels: for (ri, (_, arity)) in a.sig().rels().iter().enumerate() {
            let ra = a.rel(ri);
            let red = ed_structure.rel(ri);
            let mut ok = true;
            for_each_index_tuple(a.size(), *arity, |t| {
                let img: Vec<usize> = t.iter().map(|&e| e_map[e]).collect();
                if red.contains(&img) && !ra.contains(t) {
                    ok = false;
                    return false;
                }
                true
            });
            if !ok {
                embedding = false;
                break 'rels;
            }
        }
    }
    let surjective = image.iter().all(|&b| b);
    let unmatched = image.iter().position(|&b| !b).map(|p| ed_carrier[p].map.clone());
    Ok(EvalOutcome {
        base_size: a.size(),
        dual_size: d.carrier.len(),
        double_dual_size: ed_carrier.len(),
        embedding,
        injective,
        surjective,
        is_iso: embedding && surjective,
        unmatched,
    })
}

/// The piggyback transport for one object: its dual carrier, the base-side
/// hom-set of its reduct, and the images of the carrier-composition maps.
#[derive(Debug, Clone)]
pub struct PhiMap {
    pub d_carrier: Vec<Hom>,
    pub h_carrier: Vec<Hom>,
    /// Index into `h_carrier` for each element of `d_carrier`.
    pub image: Vec<usize>,
}

/// The map `x -> omega . x` from the dual of `a` into the base hom-set of
/// its reduct, with codomain membership verified.
pub fn phi(
    omega: &Hom,
    a: &FiniteStructure,
    m: &FiniteStructure,
    n: &FiniteStructure,
    reduct_a: &ReductSpec,
    cfg: &SearchCfg,
) -> Result<PhiMap> {
    let d_carrier = enumerate_homs(a, m, cfg)?;
    let a_flat = apply_reduct(a, reduct_a)?;
    let h_carrier = enumerate_homs(&a_flat, n, cfg)?;
    let mut image = Vec::with_capacity(d_carrier.len());
    for x in &d_carrier {
        let composed: Vec<usize> = x.map.iter().map(|&v| omega.map[v]).collect();
        let pos = h_carrier
            .binary_search_by(|h| h.map.as_slice().cmp(composed.as_slice()))
            .map_err(|_| {
                Error::InvalidStructure(
                    "carrier composition escapes the base hom-set; omega is not a carrier".into(),
                )
            })?;
        image.push(pos);
    }
    Ok(PhiMap { d_carrier, h_carrier, image })
}

#[derive(Debug, Clone, Serialize)]
pub struct JointSurjectivityOutcome {
    pub surjective: bool,
    pub dual_size: usize,
    pub base_hom_count: usize,
    pub covered: usize,
    /// A base morphism hit by no carrier composition, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing: Option<Vec<usize>>,
}

/// Is the union of the images of the carrier-composition maps the whole
/// base hom-set of the reduct?
pub fn joint_surjectivity(
    omegas: &[Hom],
    a: &FiniteStructure,
    m: &FiniteStructure,
    n: &FiniteStructure,
    reduct_a: &ReductSpec,
    cfg: &SearchCfg,
) -> Result<JointSurjectivityOutcome> {
    let a_flat = apply_reduct(a, reduct_a)?;
    let h_carrier = enumerate_homs(&a_flat, n, cfg)?;
    let d_carrier = enumerate_homs(a, m, cfg)?;
    let mut covered = vec![false; h_carrier.len()];
    for omega in omegas {
        for x in &d_carrier {
            let composed: Vec<usize> = x.map.iter().map(|&v| omega.map[v]).collect();
            if let Ok(pos) =
                h_carrier.binary_search_by(|h| h.map.as_slice().cmp(composed.as_slice()))
            {
                covered[pos] = true;
            }
        }
    }
    let hit = covered.iter().filter(|&&b| b).count();
    let missing = covered.iter().position(|&b| !b).map(|p| h_carrier[p].map.clone());
    Ok(JointSurjectivityOutcome {
        surjective: hit == h_carrier.len(),
        dual_size: d_carrier.len(),
        base_hom_count: h_carrier.len(),
        covered: hit,
        missing,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleOutcome {
    pub applicable: bool,
    pub well_defined: bool,
    pub morphism: bool,
    pub injective: bool,
    pub commutes: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl TriangleOutcome {
    pub fn passed(&self) -> bool {
        self.applicable && self.well_defined && self.morphism && self.injective && self.commutes
    }
}

/// For every morphism of the double dual, attempt the piggyback descent
/// `d(omega . x) = omega(alpha(x))` and check: well-definedness across all
/// representations, that the descent is a base-side morphism, that distinct
/// morphisms descend to distinct maps, and that evaluations descend to the
/// base evaluations.
pub fn commuting_triangle_check(
    omegas: &[Hom],
    a: &FiniteStructure,
    m: &FiniteStructure,
    mt: &FiniteStructure,
    n: &FiniteStructure,
    nt: &FiniteStructure,
    reduct_a: &ReductSpec,
    cfg: &SearchCfg,
) -> Result<TriangleOutcome> {
    let joint = joint_surjectivity(omegas, a, m, n, reduct_a, cfg)?;
    if !joint.surjective {
        return Ok(TriangleOutcome {
            applicable: false,
            well_defined: false,
            morphism: false,
            injective: false,
            commutes: false,
            witness: Some(serde_json::json!({ "missing-base-morphism": joint.missing })),
        });
    }
    let a_flat = apply_reduct(a, reduct_a)?;
    let h_carrier = enumerate_homs(&a_flat, n, cfg)?;
    let d = dual(a, m, mt, cfg)?;
    let h_structure = lift_hom_set(&h_carrier, nt)?;
    // representations of each base morphism as omega . x
    let mut reps: Vec<Vec<(usize, usize)>> = vec![Vec::new(); h_carrier.len()];
    for (oi, omega) in omegas.iter().enumerate() {
        for (xi, x) in d.carrier.iter().enumerate() {
            let composed: Vec<usize> = x.map.iter().map(|&v| omega.map[v]).collect();
            if let Ok(pos) =
                h_carrier.binary_search_by(|h| h.map.as_slice().cmp(composed.as_slice()))
            {
                reps[pos].push((oi, xi));
            }
        }
    }
    let alphas = enumerate_homs(&d.structure, mt, cfg)?;
    let mut descended: Vec<Vec<usize>> = Vec::with_capacity(alphas.len());
    for alpha in &alphas {
        let mut dvec = Vec::with_capacity(h_carrier.len());
        for rep in &reps {
            let values: Vec<usize> =
                rep.iter().map(|&(oi, xi)| omegas[oi].map[alpha.map[xi]]).collect();
            let first = values[0];
            if values.iter().any(|&v| v != first) {
                return Ok(TriangleOutcome {
                    applicable: true,
                    well_defined: false,
                    morphism: false,
                    injective: false,
                    commutes: false,
                    witness: Some(serde_json::json!({
                        "alpha": alpha.map,
                        "representations": rep,
                        "values": values,
                    })),
                });
            }
            dvec.push(first);
        }
        if !is_hom(&h_structure, nt, &dvec) {
            return Ok(TriangleOutcome {
                applicable: true,
                well_defined: true,
                morphism: false,
                injective: false,
                commutes: false,
                witness: Some(serde_json::json!({ "alpha": alpha.map, "descent": dvec })),
            });
        }
        descended.push(dvec);
    }
    let mut sorted = descended.clone();
    sorted.sort();
    sorted.dedup();
    let injective = sorted.len() == descended.len();
    // evaluations descend to base evaluations
    let mut commutes = true;
    let mut witness = None;
    'outer: for elt in 0..a.size() {
        let eval: Vec<usize> = d.carrier.iter().map(|h| h.map[elt]).collect();
        let Some(ai) = alphas.iter().position(|al| al.map == eval) else {
            commutes = false;
            witness = Some(serde_json::json!({ "element": elt, "missing-evaluation": eval }));
            break 'outer;
        };
        for (z, h) in h_carrier.iter().enumerate() {
            if descended[ai][z] != h.map[elt] {
                commutes = false;
                witness = Some(serde_json::json!({ "element": elt, "base-morphism": h.map }));
                break 'outer;
            }
        }
    }
    Ok(TriangleOutcome {
        applicable: true,
        well_defined: true,
        morphism: true,
        injective,
        commutes,
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Duality,
    Coduality,
    Full,
    Strong,
}

impl FromStr for VerifyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "duality" => VerifyMode::Duality,
            "coduality" => VerifyMode::Coduality,
            "full" => VerifyMode::Full,
            "strong" => VerifyMode::Strong,
            other => return Err(Error::UnknownName(format!("verify mode '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub side: String,
    pub n: usize,
    pub carrier: Vec<usize>,
    pub check: String,
    pub base_size: usize,
    pub dual_size: usize,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub mode: VerifyMode,
    pub depth: usize,
    /// Depth-bounded success is evidence for the duality, not a proof.
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub named_constants_gate: Option<serde_json::Value>,
    pub instances: Vec<InstanceReport>,
    pub verdict: bool,
}

fn test_family(
    alg: &FiniteStructure,
    depth: usize,
    include_empty: bool,
    cfg: &SearchCfg,
) -> Result<Vec<(usize, FiniteStructure, Vec<Vec<usize>>)>> {
    let mut out = Vec::new();
    for n in 1..=depth {
        let p = alg.power(n, cfg)?;
        let all: Vec<usize> = (0..p.size()).collect();
        let mut subs = p.all_subuniverses_within(&all, cfg)?;
        subs.retain(|s| include_empty || !s.is_empty());
        subs.sort();
        out.push((n, p, subs));
    }
    Ok(out)
}

/// Brute-force verification of the dual adjunction on the depth-bounded
/// test family: every substructure of every power up to the depth, on the
/// algebra side and (for co-duality) the ego side, with the empty structure
/// included on the ego side exactly when its type has no nullary
/// operations. Strong mode adds the bounded injectivity checks: every
/// morphism from a member of the family extends to the ambient power.
pub fn verify_bruteforce(
    m: &FiniteStructure,
    mt: &FiniteStructure,
    depth: usize,
    mode: VerifyMode,
    cfg: &SearchCfg,
) -> Result<VerificationReport> {
    check_compatible(m, mt)?;
    let do_duality = matches!(mode, VerifyMode::Duality | VerifyMode::Full | VerifyMode::Strong);
    let do_coduality =
        matches!(mode, VerifyMode::Coduality | VerifyMode::Full | VerifyMode::Strong);
    let mut named_gate = None;
    let mut gate_ok = true;
    if do_coduality {
        let nc = named_constants(mt);
        if !nc.ok() {
            gate_ok = false;
            named_gate = Some(serde_json::json!({
                "verdict": "fail",
                "unnamed-constants": nc.unnamed,
                "note": "an ego with an unnamed constant cannot co-dualise; the empty or one-element instance below refutes it concretely",
            }));
        } else {
            named_gate = Some(serde_json::json!({ "verdict": "pass" }));
        }
    }
    // (side, check, n, sub, alg, ego) work items evaluated in parallel
    struct Item<'a> {
        side: &'static str,
        check: &'static str,
        n: usize,
        power: &'a FiniteStructure,
        sub: Vec<usize>,
        alg: &'a FiniteStructure,
        ego: &'a FiniteStructure,
        full_homs: Option<&'a [Hom]>,
    }
    let a_family = if do_duality || matches!(mode, VerifyMode::Strong) {
        test_family(m, depth, false, cfg)?
    } else {
        Vec::new()
    };
    let x_family = if do_coduality {
        test_family(mt, depth, !mt.sig().has_nullary_ops(), cfg)?
    } else {
        Vec::new()
    };
    let a_full_homs: Vec<(usize, Vec<Hom>)> = if mode == VerifyMode::Strong {
        a_family
            .iter()
            .map(|(n, p, _)| Ok((*n, enumerate_homs(p, m, cfg)?)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let x_full_homs: Vec<(usize, Vec<Hom>)> = if mode == VerifyMode::Strong {
        x_family
            .iter()
            .map(|(n, p, _)| Ok((*n, enumerate_homs(p, mt, cfg)?)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut items: Vec<Item> = Vec::new();
    if do_duality {
        for (n, p, subs) in &a_family {
            for sub in subs {
                items.push(Item {
                    side: "A",
                    check: "evaluation",
                    n: *n,
                    power: p,
                    sub: sub.clone(),
                    alg: m,
                    ego: mt,
                    full_homs: None,
                });
            }
        }
    }
    if do_coduality {
        for (n, p, subs) in &x_family {
            for sub in subs {
                items.push(Item {
                    side: "X",
                    check: "evaluation",
                    n: *n,
                    power: p,
                    sub: sub.clone(),
                    alg: mt,
                    ego: m,
                    full_homs: None,
                });
            }
        }
    }
    if mode == VerifyMode::Strong {
        for (n, p, subs) in &a_family {
            let homs = &a_full_homs.iter().find(|(k, _)| k == n).unwrap().1;
            for sub in subs {
                items.push(Item {
                    side: "A",
                    check: "extension",
                    n: *n,
                    power: p,
                    sub: sub.clone(),
                    alg: m,
                    ego: mt,
                    full_homs: Some(homs),
                });
            }
        }
        for (n, p, subs) in &x_family {
            let homs = &x_full_homs.iter().find(|(k, _)| k == n).unwrap().1;
            for sub in subs {
                items.push(Item {
                    side: "X",
                    check: "extension",
                    n: *n,
                    power: p,
                    sub: sub.clone(),
                    alg: mt,
                    ego: m,
                    full_homs: Some(homs),
                });
            }
        }
    }
    let reports: Vec<Result<InstanceReport>> = par::map_collect(items, |item| {
        let a = item.power.induced_substructure(&item.sub)?;
        match item.check {
            "evaluation" => {
                let out = evaluation_check(&a, item.alg, item.ego, cfg)?;
                Ok(InstanceReport {
                    side: item.side.into(),
                    n: item.n,
                    carrier: item.sub,
                    check: "evaluation".into(),
                    base_size: out.base_size,
                    dual_size: out.dual_size,
                    verdict: out.is_iso && out.embedding,
                    witness: if out.is_iso {
                        None
                    } else {
                        Some(serde_json::to_value(&out).unwrap())
                    },
                })
            }
            _ => {
                let expected = enumerate_homs(&a, item.alg, cfg)?;
                let full = item.full_homs.unwrap();
                let mut witness = None;
                for h in &expected {
                    let extends = full.iter().any(|big| {
                        item.sub.iter().enumerate().all(|(i, &e)| big.map[e] == h.map[i])
                    });
                    if !extends {
                        witness = Some(serde_json::json!({ "unextendable": h.map }));
                        break;
                    }
                }
                Ok(InstanceReport {
                    side: item.side.into(),
                    n: item.n,
                    carrier: item.sub,
                    check: "extension".into(),
                    base_size: a.size(),
                    dual_size: expected.len(),
                    verdict: witness.is_none(),
                    witness,
                })
            }
        }
    });
    let mut instances = Vec::with_capacity(reports.len());
    let mut all_ok = gate_ok;
    for r in reports {
        let r = r?;
        all_ok &= r.verdict;
        instances.push(r);
    }
    Ok(VerificationReport {
        mode,
        depth,
        note: format!(
            "checked all substructures of powers up to exponent {depth}; passing is evidence, not a proof"
        ),
        named_constants_gate: named_gate,
        instances,
        verdict: all_ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoincidenceInstance {
    pub side: String,
    pub n: usize,
    pub carrier: Vec<usize>,
    pub dual_size: usize,
    pub base_dual_size: usize,
    pub iso: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoincidenceReport {
    pub instances: Vec<CoincidenceInstance>,
    pub verdict: bool,
}

/// Verify that the carrier-composition maps are isomorphisms between the
/// reducts of the natural duals and the base-duality duals, on the
/// depth-bounded family on both sides.
#[allow(clippy::too_many_arguments)]
pub fn coincidence_check(
    omega: &[usize],
    m: &FiniteStructure,
    mt: &FiniteStructure,
    n: &FiniteStructure,
    nt: &FiniteStructure,
    reduct_a: &ReductSpec,
    reduct_x: &ReductSpec,
    depth: usize,
    cfg: &SearchCfg,
) -> Result<CoincidenceReport> {
    let mut instances = Vec::new();
    let a_family = test_family(m, depth, false, cfg)?;
    for (nn, p, subs) in &a_family {
        for sub in subs {
            let a = p.induced_substructure(sub)?;
            let a_flat = apply_reduct(&a, reduct_a)?;
            let d = dual(&a, m, mt, cfg)?;
            let d_flat = apply_reduct(&d.structure, reduct_x)?;
            let h_carrier = enumerate_homs(&a_flat, n, cfg)?;
            let h_structure = lift_hom_set(&h_carrier, nt)?;
            let (iso, witness) =
                transport_iso(&d.carrier, omega, &h_carrier, &d_flat, &h_structure);
            instances.push(CoincidenceInstance {
                side: "A".into(),
                n: *nn,
                carrier: sub.clone(),
                dual_size: d.carrier.len(),
                base_dual_size: h_carrier.len(),
                iso,
                witness,
            });
        }
    }
    let x_family = test_family(mt, depth, !mt.sig().has_nullary_ops(), cfg)?;
    for (nn, p, subs) in &x_family {
        for sub in subs {
            let x = p.induced_substructure(sub)?;
            let x_flat = apply_reduct(&x, reduct_x)?;
            let e_carrier = enumerate_homs(&x, mt, cfg)?;
            let e_structure = lift_hom_set(&e_carrier, m)?;
            let e_flat = apply_reduct(&e_structure, reduct_a)?;
            let k_carrier = enumerate_homs(&x_flat, nt, cfg)?;
            let k_structure = lift_hom_set(&k_carrier, n)?;
            let (iso, witness) =
                transport_iso(&e_carrier, omega, &k_carrier, &e_flat, &k_structure);
            instances.push(CoincidenceInstance {
                side: "X".into(),
                n: *nn,
                carrier: sub.clone(),
                dual_size: e_carrier.len(),
                base_dual_size: k_carrier.len(),
                iso,
                witness,
            });
        }
    }
    let verdict = instances.iter().all(|i| i.iso);
    Ok(CoincidenceReport { instances, verdict })
}

/// Check that composing with `omega` gives an isomorphism from `src`
/// (structure on the first carrier) onto `dst` (structure on the second).
fn transport_iso(
    src_carrier: &[Hom],
    omega: &[usize],
    dst_carrier: &[Hom],
    src_structure: &FiniteStructure,
    dst_structure: &FiniteStructure,
) -> (bool, Option<serde_json::Value>) {
    if src_structure.sig() != dst_structure.sig() {
        return (false, Some(serde_json::json!("signature mismatch between the two reducts")));
    }
    let mut map = Vec::with_capacity(src_carrier.len());
    for x in src_carrier {
        let composed: Vec<usize> = x.map.iter().map(|&v| omega[v]).collect();
        match dst_carrier.binary_search_by(|h| h.map.as_slice().cmp(composed.as_slice())) {
            Ok(pos) => map.push(pos),
            Err(_) => {
                return (
                    false,
                    Some(serde_json::json!({ "composition-escapes": composed })),
                )
            }
        }
    }
    if src_carrier.len() != dst_carrier.len() {
        return (
            false,
            Some(serde_json::json!({
                "src": src_carrier.len(),
                "dst": dst_carrier.len(),
            })),
        );
    }
    let mut seen = vec![false; dst_carrier.len()];
    for &p in &map {
        if seen[p] {
            return (false, Some(serde_json::json!("not injective")));
        }
        seen[p] = true;
    }
    let mut inv = vec![0usize; map.len()];
    for (i, &p) in map.iter().enumerate() {
        inv[p] = i;
    }
    if !is_hom(src_structure, dst_structure, &map) {
        return (false, Some(serde_json::json!("transport does not preserve structure")));
    }
    if !is_hom(dst_structure, src_structure, &inv) {
        return (false, Some(serde_json::json!("transport inverse does not preserve structure")));
    }
    (true, None)
}

#[derive(Debug, Clone, Serialize)]
pub struct SemanticEntailsOutcome {
    pub entailed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

/// The brute-force semantic entailment check: quantify over every member of
/// the depth-bounded family and every morphism of its dual, and test
/// preservation of the pointwise extension of `r`. This is the independent
/// oracle against which the test-algebra decision is validated.
pub fn semantic_entails_bruteforce(
    m: &FiniteStructure,
    mt: &FiniteStructure,
    r: &Relation,
    depth: usize,
    cfg: &SearchCfg,
) -> Result<SemanticEntailsOutcome> {
    let k = r.arity();
    for (nn, p, subs) in &test_family(m, depth, false, cfg)? {
        for sub in subs {
            let a = p.induced_substructure(sub)?;
            let d_carrier = enumerate_homs(&a, m, cfg)?;
            let lifted = lift_hom_set(&d_carrier, mt)?;
            let alphas = enumerate_homs(&lifted, mt, cfg)?;
            // tuples of the pointwise extension of r to the dual carrier
            let mut r_tuples: Vec<Vec<usize>> = Vec::new();
            for_each_index_tuple(d_carrier.len(), k, |idxs| {
                let inside = (0..a.size()).all(|e| {
                    let img: Vec<usize> = idxs.iter().map(|&i| d_carrier[i].map[e]).collect();
                    r.contains(&img)
                });
                if inside {
                    r_tuples.push(idxs.to_vec());
                }
                true
            });
            for alpha in &alphas {
                for t in &r_tuples {
                    let img: Vec<usize> = t.iter().map(|&i| alpha.map[i]).collect();
                    if !r.contains(&img) {
                        return Ok(SemanticEntailsOutcome {
                            entailed: false,
                            witness: Some(serde_json::json!({
                                "power": nn,
                                "carrier": sub,
                                "alpha": alpha.map,
                                "tuple": t,
                                "image": img,
                            })),
                        });
                    }
                }
            }
        }
    }
    Ok(SemanticEntailsOutcome { entailed: true, witness: None })
}
