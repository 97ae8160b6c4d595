use crate::error::{Error, Result};
use crate::iter_util::for_each_index_tuple;
use crate::limits::{SearchCfg, SearchOrder};
use crate::relation::Relation;
use crate::signature::Signature;
use std::collections::HashSet;

/// A finite total structure: universe `0..size-1`, one flat operation table
/// per operation symbol and one relation value per relation symbol.
///
/// Operation tables are indexed in mixed-radix big-endian order: the table
/// entry for arguments `(a_1, ..., a_k)` sits at `sum a_i * size^(k-1-i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    name: String,
    sig: Signature,
    size: usize,
    op_tables: Vec<Vec<usize>>,
    rel_sets: Vec<Relation>,
    labels: Option<Vec<String>>,
}

impl FiniteStructure {
    /// Strict constructor for input structures: universe non-empty and every
    /// relation non-empty.
    pub fn new(
        name: impl Into<String>,
        sig: Signature,
        size: usize,
        op_tables: Vec<Vec<usize>>,
        rel_sets: Vec<Relation>,
        labels: Option<Vec<String>>,
    ) -> Result<FiniteStructure> {
        if size == 0 {
            return Err(Error::InvalidStructure("universe must be non-empty".into()));
        }
        let s = Self::new_derived(name, sig, size, op_tables, rel_sets, labels)?;
        for (i, r) in s.rel_sets.iter().enumerate() {
            if r.is_empty() {
                return Err(Error::InvalidStructure(format!(
                    "relation '{}' is empty; relations must be non-empty",
                    s.sig.rels()[i].0
                )));
            }
        }
        Ok(s)
    }

    /// Relaxed constructor for structures derived inside the engine
    /// (substructures, pointwise lifts): permits an empty universe and empty
    /// induced relations. Tables and tuples are still fully validated.
    pub(crate) fn new_derived(
        name: impl Into<String>,
        sig: Signature,
        size: usize,
        op_tables: Vec<Vec<usize>>,
        rel_sets: Vec<Relation>,
        labels: Option<Vec<String>>,
    ) -> Result<FiniteStructure> {
        let name = name.into();
        if op_tables.len() != sig.ops().len() {
            return Err(Error::InvalidStructure(format!(
                "expected {} operation table(s), got {}",
                sig.ops().len(),
                op_tables.len()
            )));
        }
        if rel_sets.len() != sig.rels().len() {
            return Err(Error::InvalidStructure(format!(
                "expected {} relation value(s), got {}",
                sig.rels().len(),
                rel_sets.len()
            )));
        }
        for (i, table) in op_tables.iter().enumerate() {
            let (opname, arity) = &sig.ops()[i];
            let expect = size.checked_pow(*arity as u32).ok_or_else(|| {
                Error::ResourceLimit(format!("operation table for '{opname}' overflows"))
            })?;
            if table.len() != expect {
                return Err(Error::InvalidStructure(format!(
                    "operation '{opname}' table has {} entries, expected {expect}",
                    table.len()
                )));
            }
            if let Some(&bad) = table.iter().find(|&&v| v >= size) {
                return Err(Error::InvalidStructure(format!(
                    "operation '{opname}' table entry {bad} outside universe 0..{size}"
                )));
            }
        }
        for (i, rel) in rel_sets.iter().enumerate() {
            let (rname, arity) = &sig.rels()[i];
            if rel.arity() != *arity {
                return Err(Error::ArityMismatch(format!(
                    "relation '{rname}' declared arity {arity}, value has arity {}",
                    rel.arity()
                )));
            }
            if let Some(m) = rel.max_entry() {
                if m >= size {
                    return Err(Error::InvalidStructure(format!(
                        "relation '{rname}' tuple entry {m} outside universe 0..{size}"
                    )));
                }
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != size {
                return Err(Error::InvalidStructure(format!(
                    "{} label(s) for universe of size {size}",
                    ls.len()
                )));
            }
        }
        Ok(FiniteStructure { name, sig, size, op_tables, rel_sets, labels })
    }

    /// Strict constructor taking named parts in any order; symbols are
    /// aligned with the signature's canonical (sorted) order.
    pub fn from_named_parts(
        name: impl Into<String>,
        size: usize,
        ops: Vec<(&str, usize, Vec<usize>)>,
        rels: Vec<(&str, Relation)>,
        labels: Option<Vec<String>>,
    ) -> Result<FiniteStructure> {
        let sig = Signature::new(
            ops.iter().map(|(n, a, _)| (n.to_string(), *a)).collect(),
            rels.iter().map(|(n, r)| (n.to_string(), r.arity())).collect(),
        )?;
        let mut tables = Vec::with_capacity(ops.len());
        for (n, _) in sig.ops() {
            tables.push(ops.iter().find(|(on, _, _)| on == n).expect("op present").2.clone());
        }
        let mut rel_sets = Vec::with_capacity(rels.len());
        for (n, _) in sig.rels() {
            rel_sets.push(rels.iter().find(|(rn, _)| rn == n).expect("rel present").1.clone());
        }
        FiniteStructure::new(name, sig, size, tables, rel_sets, labels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> FiniteStructure {
        self.name = name.into();
        self
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn op_table(&self, op: usize) -> &[usize] {
        &self.op_tables[op]
    }

    pub fn rel(&self, rel: usize) -> &Relation {
        &self.rel_sets[rel]
    }

    pub fn rel_by_name(&self, name: &str) -> Option<&Relation> {
        self.sig.rel_index(name).map(|i| &self.rel_sets[i])
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Append one more relation to the type (strict: non-empty, fresh name).
    pub fn add_relation(&self, name: &str, rel: Relation) -> Result<FiniteStructure> {
        let ops: Vec<(String, usize)> = self.sig.ops().to_vec();
        let mut rels: Vec<(String, usize)> = self.sig.rels().to_vec();
        rels.push((name.to_string(), rel.arity()));
        let sig = Signature::new(ops, rels)?;
        let mut tables = Vec::new();
        for (opname, _) in sig.ops() {
            let old = self.sig.op_index(opname).expect("op kept");
            tables.push(self.op_tables[old].clone());
        }
        let mut rel_sets = Vec::new();
        for (rname, _) in sig.rels() {
            if rname == name {
                rel_sets.push(rel.clone());
            } else {
                let old = self.sig.rel_index(rname).expect("rel kept");
                rel_sets.push(self.rel_sets[old].clone());
            }
        }
        FiniteStructure::new(self.name.clone(), sig, self.size, tables, rel_sets, self.labels.clone())
    }

    /// Value of operation `op` on the given argument tuple.
    pub fn op_value(&self, op: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.sig.op_arity(op));
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.size + a;
        }
        self.op_tables[op][idx]
    }

    /// Encode an n-tuple over this universe as an element of the n-th power
    /// (mixed-radix big-endian).
    pub fn encode_tuple(&self, tuple: &[usize]) -> usize {
        let mut idx = 0usize;
        for &a in tuple {
            idx = idx * self.size + a;
        }
        idx
    }

    /// Inverse of `encode_tuple`.
    pub fn decode_tuple(&self, mut idx: usize, n: usize) -> Vec<usize> {
        let mut out = vec![0usize; n];
        for j in (0..n).rev() {
            out[j] = idx % self.size;
            idx /= self.size;
        }
        out
    }

    /// The n-th direct power, with operations and relations lifted pointwise.
    /// Element `i` of the power encodes an n-tuple of base elements in
    /// mixed-radix big-endian order.
    pub fn power(&self, n: usize, cfg: &SearchCfg) -> Result<FiniteStructure> {
        if n == 0 {
            return Err(Error::InvalidStructure("power exponent must be >= 1".into()));
        }
        let bound = cfg.limits.max_power_elems;
        let mut psize = 1usize;
        for _ in 0..n {
            psize = psize.checked_mul(self.size).filter(|&s| s <= bound).ok_or_else(|| {
                Error::ResourceLimit(format!(
                    "power {}^{n} exceeds the configured bound of {bound} elements",
                    self.size
                ))
            })?;
        }
        let mut op_tables = Vec::with_capacity(self.sig.ops().len());
        for (op, (opname, arity)) in self.sig.ops().iter().enumerate() {
            let k = *arity;
            let mut cells = 1usize;
            for _ in 0..k {
                cells = cells.checked_mul(psize).filter(|&c| c <= bound).ok_or_else(|| {
                    Error::ResourceLimit(format!(
                        "lifted table for '{opname}' exceeds the configured bound of {bound} cells"
                    ))
                })?;
            }
            let mut table = Vec::with_capacity(cells);
            let mut decoded: Vec<Vec<usize>> = vec![vec![0; n]; k];
            for_each_index_tuple(psize, k, |args| {
                for (j, &a) in args.iter().enumerate() {
                    decoded[j] = self.decode_tuple(a, n);
                }
                let mut result = 0usize;
                let mut pointwise = vec![0usize; k];
                for coord in 0..n {
                    for (j, d) in decoded.iter().enumerate() {
                        pointwise[j] = d[coord];
                    }
                    result = result * self.size + self.op_value(op, &pointwise);
                }
                table.push(result);
                true
            });
            op_tables.push(table);
        }
        let mut rel_sets = Vec::with_capacity(self.sig.rels().len());
        for (ri, (rname, arity)) in self.sig.rels().iter().enumerate() {
            let base = &self.rel_sets[ri];
            let mut count = 1usize;
            for _ in 0..n {
                count = count.checked_mul(base.len()).filter(|&c| c <= bound).ok_or_else(|| {
                    Error::ResourceLimit(format!(
                        "lifted relation '{rname}' exceeds the configured bound of {bound} tuples"
                    ))
                })?;
            }
            // choose one base tuple per coordinate; columns give the lifted tuple
            let mut tuples = Vec::with_capacity(count);
            for_each_index_tuple(base.len(), n, |choice| {
                let mut lifted = vec![0usize; *arity];
                for (pos, slot) in lifted.iter_mut().enumerate() {
                    let mut e = 0usize;
                    for &c in choice {
                        e = e * self.size + base.tuples()[c][pos];
                    }
                    *slot = e;
                }
                tuples.push(lifted);
                true
            });
            rel_sets.push(Relation::new(*arity, tuples)?);
        }
        let labels = self.labels.as_ref().map(|ls| {
            let compact = ls.iter().all(|l| l.chars().count() == 1);
            (0..psize)
                .map(|i| {
                    let t = self.decode_tuple(i, n);
                    let parts: Vec<&str> = t.iter().map(|&a| ls[a].as_str()).collect();
                    parts.join(if compact { "" } else { "," })
                })
                .collect()
        });
        FiniteStructure::new_derived(
            format!("{}^{}", self.name, n),
            self.sig.clone(),
            psize,
            op_tables,
            rel_sets,
            labels,
        )
    }

    /// Least superset of `seed` (plus all nullary-operation values) closed
    /// under every operation, returned sorted. A closure operator: extensive,
    /// monotone, idempotent.
    pub fn generate_substructure(&self, seed: &[usize]) -> Vec<usize> {
        let full = vec![true; self.size];
        self.closure_within(seed, &full).expect("closure cannot escape the full universe")
    }

    /// Closure of `seed` plus nullary values, constrained to stay inside
    /// `allowed`; `None` when the closure escapes.
    fn closure_within(&self, seed: &[usize], allowed: &[bool]) -> Option<Vec<usize>> {
        let mut member = vec![false; self.size];
        let mut elems: Vec<usize> = Vec::new();
        let mut queue: Vec<usize> = Vec::new();
        fn push(
            e: usize,
            allowed: &[bool],
            member: &mut [bool],
            elems: &mut Vec<usize>,
            queue: &mut Vec<usize>,
        ) -> bool {
            if !allowed[e] {
                return false;
            }
            if !member[e] {
                member[e] = true;
                elems.push(e);
                queue.push(e);
            }
            true
        }
        for (op, (_, arity)) in self.sig.ops().iter().enumerate() {
            if *arity == 0
                && !push(self.op_tables[op][0], allowed, &mut member, &mut elems, &mut queue)
            {
                return None;
            }
        }
        for &s in seed {
            if !push(s, allowed, &mut member, &mut elems, &mut queue) {
                return None;
            }
        }
        while let Some(e) = queue.pop() {
            for (op, (_, arity)) in self.sig.ops().iter().enumerate() {
                let k = *arity;
                if k == 0 {
                    continue;
                }
                // every k-tuple over the current members that uses e at least
                // once; combining with the snapshot suffices because later
                // additions re-enter via their own queue entries
                let snapshot: Vec<usize> = elems.clone();
                let mut args = vec![0usize; k];
                for fixed in 0..k {
                    let ok = for_each_index_tuple(snapshot.len(), k - 1, |rest| {
                        let mut r = 0usize;
                        for (j, slot) in args.iter_mut().enumerate() {
                            if j == fixed {
                                *slot = e;
                            } else {
                                *slot = snapshot[rest[r]];
                                r += 1;
                            }
                        }
                        let v = self.op_value(op, &args);
                        push(v, allowed, &mut member, &mut elems, &mut queue)
                    });
                    if !ok {
                        return None;
                    }
                }
            }
        }
        elems.sort_unstable();
        Some(elems)
    }

    /// Is `set` closed under every operation (nullary values included)?
    pub fn is_subuniverse(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.size];
        for &e in set {
            member[e] = true;
        }
        for (op, (_, arity)) in self.sig.ops().iter().enumerate() {
            let k = *arity;
            if k == 0 {
                if !member[self.op_tables[op][0]] {
                    return false;
                }
                continue;
            }
            let closed = for_each_index_tuple(set.len(), k, |idxs| {
                let args: Vec<usize> = idxs.iter().map(|&i| set[i]).collect();
                member[self.op_value(op, &args)]
            });
            if !closed {
                return false;
            }
        }
        true
    }

    /// All subuniverses contained in `bound`, canonically ordered by size
    /// then lexicographically. Includes the empty set exactly when the
    /// signature has no nullary operations.
    pub fn all_subuniverses_within(
        &self,
        bound: &[usize],
        cfg: &SearchCfg,
    ) -> Result<Vec<Vec<usize>>> {
        self.closed_sets_within(bound, cfg, false)
    }

    /// All inclusion-maximal subuniverses contained in `bound`.
    pub fn maximal_subuniverses_in(
        &self,
        bound: &[usize],
        cfg: &SearchCfg,
    ) -> Result<Vec<Vec<usize>>> {
        self.closed_sets_within(bound, cfg, true)
    }

    /// DFS over closure extensions: from a closed set, branch on each element
    /// of the bound whose added closure stays inside the bound. States are
    /// memoized by canonical form, so output is independent of branch order.
    fn closed_sets_within(
        &self,
        bound: &[usize],
        cfg: &SearchCfg,
        maximal_only: bool,
    ) -> Result<Vec<Vec<usize>>> {
        let mut allowed = vec![false; self.size];
        for &e in bound {
            if e >= self.size {
                return Err(Error::InvalidStructure(format!(
                    "bound element {e} outside universe 0..{}",
                    self.size
                )));
            }
            allowed[e] = true;
        }
        let base = match self.closure_within(&[], &allowed) {
            Some(b) => b,
            // nullary values escape the bound: no subuniverse fits
            None => return Ok(Vec::new()),
        };
        let mut visited: HashSet<Vec<usize>> = HashSet::new();
        let mut results: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = vec![base];
        while let Some(s) = stack.pop() {
            if visited.contains(&s) {
                continue;
            }
            if visited.len() >= cfg.limits.max_closed_sets {
                return Err(Error::ResourceLimit(format!(
                    "more than {} closed sets while enumerating subuniverses",
                    cfg.limits.max_closed_sets
                )));
            }
            let mut in_s = vec![false; self.size];
            for &e in &s {
                in_s[e] = true;
            }
            let mut candidates: Vec<usize> = bound.iter().copied().filter(|&t| !in_s[t]).collect();
            candidates.sort_unstable();
            if cfg.order == SearchOrder::Reverse {
                candidates.reverse();
            }
            let mut extensions: Vec<Vec<usize>> = Vec::new();
            for t in candidates {
                let mut seed = s.clone();
                seed.push(t);
                if let Some(ext) = self.closure_within(&seed, &allowed) {
                    extensions.push(ext);
                }
            }
            if !maximal_only || extensions.is_empty() {
                results.push(s.clone());
            }
            visited.insert(s);
            stack.extend(extensions);
        }
        results.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        results.dedup();
        Ok(results)
    }

    /// The substructure induced on `members` (a sorted subuniverse).
    /// Relations are restricted; they may come out empty.
    pub fn induced_substructure(&self, members: &[usize]) -> Result<FiniteStructure> {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        if !self.is_subuniverse(members) {
            return Err(Error::NotSubuniverse(format!(
                "{members:?} is not closed under the operations of {}",
                self.name
            )));
        }
        let index_of =
            |e: usize| -> usize { members.binary_search(&e).expect("member of subuniverse") };
        let m = members.len();
        let mut op_tables = Vec::with_capacity(self.sig.ops().len());
        for (op, (_, arity)) in self.sig.ops().iter().enumerate() {
            let mut table = Vec::new();
            for_each_index_tuple(m, *arity, |idxs| {
                let args: Vec<usize> = idxs.iter().map(|&i| members[i]).collect();
                table.push(index_of(self.op_value(op, &args)));
                true
            });
            op_tables.push(table);
        }
        let mut member_mask = vec![false; self.size];
        for &e in members {
            member_mask[e] = true;
        }
        let mut rel_sets = Vec::with_capacity(self.sig.rels().len());
        for (ri, (_, arity)) in self.sig.rels().iter().enumerate() {
            let tuples: Vec<Vec<usize>> = self.rel_sets[ri]
                .tuples()
                .iter()
                .filter(|t| t.iter().all(|&e| member_mask[e]))
                .map(|t| t.iter().map(|&e| index_of(e)).collect())
                .collect();
            rel_sets.push(Relation::new(*arity, tuples)?);
        }
        let labels =
            self.labels.as_ref().map(|ls| members.iter().map(|&e| ls[e].clone()).collect());
        FiniteStructure::new_derived(
            format!("{}|{}", self.name, members.len()),
            self.sig.clone(),
            m,
            op_tables,
            rel_sets,
            labels,
        )
    }

    /// Apply a permutation of the universe: element `e` becomes `perm[e]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteStructure> {
        if perm.len() != self.size {
            return Err(Error::InvalidStructure("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.size];
        for &p in perm {
            if p >= self.size || seen[p] {
                return Err(Error::InvalidStructure("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut inv = vec![0usize; self.size];
        for (e, &p) in perm.iter().enumerate() {
            inv[p] = e;
        }
        let mut op_tables = Vec::with_capacity(self.sig.ops().len());
        for (op, (_, arity)) in self.sig.ops().iter().enumerate() {
            let mut table = Vec::new();
            for_each_index_tuple(self.size, *arity, |idxs| {
                let args: Vec<usize> = idxs.iter().map(|&i| inv[i]).collect();
                table.push(perm[self.op_value(op, &args)]);
                true
            });
            op_tables.push(table);
        }
        let mut rel_sets = Vec::with_capacity(self.sig.rels().len());
        for (ri, (_, arity)) in self.sig.rels().iter().enumerate() {
            let tuples = self.rel_sets[ri]
                .tuples()
                .iter()
                .map(|t| t.iter().map(|&e| perm[e]).collect())
                .collect();
            rel_sets.push(Relation::new(*arity, tuples)?);
        }
        let labels = self.labels.as_ref().map(|ls| {
            let mut out = vec![String::new(); self.size];
            for (e, l) in ls.iter().enumerate() {
                out[perm[e]] = l.clone();
            }
            out
        });
        FiniteStructure::new_derived(
            format!("{}~relabelled", self.name),
            self.sig.clone(),
            self.size,
            op_tables,
            rel_sets,
            labels,
        )
    }
}

/// Mutual compatibility of a structure and a candidate alter ego on the same
/// universe: every ego operation is a homomorphism from the corresponding
/// power of `m` to `m`, and every ego relation forms a subuniverse of the
/// corresponding power. One direction suffices; compatibility is symmetric.
pub fn check_compatible(m: &FiniteStructure, ego: &FiniteStructure) -> Result<()> {
    if m.size() != ego.size() {
        return Err(Error::Incompatible(format!(
            "universe sizes differ: {} vs {}",
            m.size(),
            ego.size()
        )));
    }
    let n = m.size();
    for (g, (gname, gk)) in ego.sig().ops().iter().enumerate() {
        let k = *gk;
        // commute with each operation of m
        for (h, (hname, ha)) in m.sig().ops().iter().enumerate() {
            let hm = *ha;
            // iterate all hm-tuples of k-tuples, flattened row-major
            let mut ok = true;
            for_each_index_tuple(n, k * hm, |flat| {
                let mut lhs_args = vec![0usize; k];
                for (coord, slot) in lhs_args.iter_mut().enumerate() {
                    let col: Vec<usize> = (0..hm).map(|r| flat[r * k + coord]).collect();
                    *slot = m.op_value(h, &col);
                }
                let lhs = ego.op_value(g, &lhs_args);
                let rhs_args: Vec<usize> =
                    (0..hm).map(|r| ego.op_value(g, &flat[r * k..(r + 1) * k])).collect();
                let rhs = m.op_value(h, &rhs_args);
                ok = lhs == rhs;
                ok
            });
            if !ok {
                return Err(Error::Incompatible(format!(
                    "ego operation '{gname}' does not commute with '{hname}'"
                )));
            }
        }
        // preserve each relation of m: pick k columns from r, apply g rowwise
        for (ri, (rname, p)) in m.sig().rels().iter().enumerate() {
            let r = m.rel(ri);
            let mut ok = true;
            for_each_index_tuple(r.len(), k, |choice| {
                let mut img = vec![0usize; *p];
                for (row, slot) in img.iter_mut().enumerate() {
                    let args: Vec<usize> = choice.iter().map(|&c| r.tuples()[c][row]).collect();
                    *slot = ego.op_value(g, &args);
                }
                ok = r.contains(&img);
                ok
            });
            if !ok {
                return Err(Error::Incompatible(format!(
                    "ego operation '{gname}' does not preserve relation '{rname}'"
                )));
            }
        }
    }
    // every ego relation forms a subuniverse of m^arity
    for (ri, (rname, rk)) in ego.sig().rels().iter().enumerate() {
        let r = ego.rel(ri);
        let k = *rk;
        for (h, (hname, ha)) in m.sig().ops().iter().enumerate() {
            let hm = *ha;
            if hm == 0 {
                let c = m.op_table(h)[0];
                if !r.contains(&vec![c; k]) {
                    return Err(Error::Incompatible(format!(
                        "ego relation '{rname}' misses the constant tuple of '{hname}'"
                    )));
                }
                continue;
            }
            let mut ok = true;
            for_each_index_tuple(r.len(), hm, |choice| {
                let mut img = vec![0usize; k];
                for (coord, slot) in img.iter_mut().enumerate() {
                    let args: Vec<usize> = choice.iter().map(|&c| r.tuples()[c][coord]).collect();
                    *slot = m.op_value(h, &args);
                }
                ok = r.contains(&img);
                ok
            });
            if !ok {
                return Err(Error::Incompatible(format!(
                    "ego relation '{rname}' is not closed under '{hname}'"
                )));
            }
        }
    }
    Ok(())
}
