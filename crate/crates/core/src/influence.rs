//! Influence matrices, maximum and biased influences, and their recursions.
//!
//! The influence matrix `M` is indexed by the vertex-color pair set `U`:
//! the entry at `((v,i),(w,k))` is `P(sigma_w = k | sigma_v = i) - P(sigma_w = k)`
//! for `v != w` and `0` on the diagonal blocks. Entries indexed by colors
//! outside the lists are `0` (the zero-extension convention).
//!
//! The maximum influence of `v` on `(w,k)` is the largest gap between the
//! conditional marginals of `(w,k)` over pairs of colors pinned at `v`; the
//! biased variant restricts the pinned colors to differ from `k`. Totals
//! divide the aggregated influence by `deg(v)`.
//!
//! Everything is computed from exact enumeration counts: one conditioned
//! enumeration per pair `(v,i)` yields the full row of conditional
//! marginals, and a row is only computed when some verifier needs it.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Color, Error, Result};
use crate::instance::{InstanceCollection, ListColoringInstance, PairIndex, PartialColoring};
use crate::oracle::{count_colorings, ColoringCount};
use crate::region::RegionParams;
use crate::report::CheckReport;

/// Absolute tolerance for identities backed by exact counts.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Slack for inequality checks, absorbing float rounding only.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Conditional counts for one pinned pair `(v, i)`: `counts[t]` is the
/// number of proper colorings with `sigma_v = i` and the `t`-th pair of the
/// base index realized.
#[derive(Debug, Clone)]
pub struct CondRow {
    pub total: u128,
    pub counts: Vec<u128>,
}

/// Exact marginal tables for one instance: unconditional counts plus
/// on-demand conditioned rows.
#[derive(Debug, Clone)]
pub struct Analysis {
    inst: ListColoringInstance,
    index: PairIndex,
    total: u128,
    pair_counts: Vec<u128>,
    rows: Vec<Option<CondRow>>,
}

impl Analysis {
    /// Unconditional counts only; conditioned rows are filled on demand.
    pub fn new(inst: &ListColoringInstance) -> Result<Self> {
        let counts = count_colorings(inst)?;
        Self::from_counts(inst, &counts)
    }

    fn from_counts(inst: &ListColoringInstance, counts: &ColoringCount) -> Result<Self> {
        let index = PairIndex::new(inst);
        let pair_counts: Vec<u128> = index
            .pairs()
            .iter()
            .map(|&(v, c)| counts.pair_count(v, c))
            .collect();
        let len = index.len();
        Ok(Analysis {
            inst: inst.clone(),
            index,
            total: counts.total(),
            pair_counts,
            rows: vec![None; len],
        })
    }

    /// Computes every conditioned row up front (parallel over rows).
    pub fn with_all_rows(inst: &ListColoringInstance) -> Result<Self> {
        let mut a = Self::new(inst)?;
        let rows: Vec<Result<CondRow>> = (0..a.index.len())
            .into_par_iter()
            .map(|idx| a.compute_row(idx))
            .collect();
        for (idx, row) in rows.into_iter().enumerate() {
            a.rows[idx] = Some(row?);
        }
        Ok(a)
    }

    pub fn instance(&self) -> &ListColoringInstance {
        &self.inst
    }

    pub fn index(&self) -> &PairIndex {
        &self.index
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn pair_count(&self, idx: usize) -> u128 {
        self.pair_counts[idx]
    }

    /// Unconditional marginal of the pair at `idx`.
    pub fn uncond(&self, idx: usize) -> f64 {
        self.pair_counts[idx] as f64 / self.total as f64
    }

    /// Unconditional marginal of `(w, k)`, zero when `k` is not listed.
    pub fn uncond_of(&self, w: usize, k: Color) -> f64 {
        match self.index.index_of(w, k) {
            Some(idx) => self.uncond(idx),
            None => 0.0,
        }
    }

    fn compute_row(&self, idx: usize) -> Result<CondRow> {
        let (v, i) = self.index.pair(idx);
        if self.pair_counts[idx] == 0 {
            return Err(Error::ZeroMarginal { vertex: v, color: i });
        }
        let tau = PartialColoring::from_pairs(&[(v, i)]);
        let (cond, map) = self.inst.condition(&tau)?;
        let counts = count_colorings(&cond)?;
        debug_assert_eq!(counts.total(), self.pair_counts[idx]);
        let mut out = vec![0u128; self.index.len()];
        for (col, &(w, k)) in self.index.pairs().iter().enumerate() {
            out[col] = if w == v {
                if k == i {
                    counts.total()
                } else {
                    0
                }
            } else {
                let w_new = map.new_of_old(w).expect("w != v survives");
                counts.pair_count(w_new, k)
            };
        }
        Ok(CondRow {
            total: counts.total(),
            counts: out,
        })
    }

    /// Fills the conditioned rows for every color of `v`.
    pub fn ensure_rows_at(&mut self, v: usize) -> Result<()> {
        for idx in self.index.vertex_range(v) {
            if self.rows[idx].is_none() {
                self.rows[idx] = Some(self.compute_row(idx)?);
            }
        }
        Ok(())
    }

    pub fn row(&self, idx: usize) -> &CondRow {
        self.rows[idx]
            .as_ref()
            .expect("conditioned row requested before ensure_rows_at")
    }

    /// `P(sigma_w = k | sigma_v = i)` where `row` indexes `(v,i)` and `col`
    /// indexes `(w,k)`.
    pub fn cond(&self, row: usize, col: usize) -> f64 {
        let r = self.row(row);
        r.counts[col] as f64 / r.total as f64
    }

    /// Influence-matrix entry with the zero-extension convention.
    pub fn m_entry(&self, v: usize, i: Color, w: usize, k: Color) -> f64 {
        if v == w {
            return 0.0;
        }
        let (Some(row), Some(col)) = (self.index.index_of(v, i), self.index.index_of(w, k))
        else {
            return 0.0;
        };
        self.cond(row, col) - self.uncond(col)
    }

    /// Maximum influence of `v` on `(w, k)`.
    ///
    /// For `w == v` the conditional marginals collapse to indicators, so the
    /// value is `1` when `k` is listed at `v` (and `v` has at least two
    /// colors to pin), `0` otherwise.
    pub fn max_influence(&self, v: usize, w: usize, k: Color) -> f64 {
        let lv = self.inst.list(v).len();
        if lv < 2 {
            return 0.0;
        }
        if w == v {
            return if self.inst.has_color(v, k) { 1.0 } else { 0.0 };
        }
        let Some(col) = self.index.index_of(w, k) else {
            return 0.0;
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for row in self.index.vertex_range(v) {
            let p = self.cond(row, col);
            lo = lo.min(p);
            hi = hi.max(p);
        }
        hi - lo
    }

    /// Maximum biased influence: pinned colors restricted to `L(v) \ {k}`.
    pub fn biased_influence(&self, v: usize, w: usize, k: Color) -> f64 {
        if w == v {
            // indicators of distinct non-k colors agree (both zero on k)
            return 0.0;
        }
        let Some(col) = self.index.index_of(w, k) else {
            return 0.0;
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut seen = 0usize;
        for row in self.index.vertex_range(v) {
            let (_, i) = self.index.pair(row);
            if i == k {
                continue;
            }
            let p = self.cond(row, col);
            lo = lo.min(p);
            hi = hi.max(p);
            seen += 1;
        }
        if seen < 2 {
            0.0
        } else {
            hi - lo
        }
    }

    /// `max_{i in L(v) \ {k}} |P(sigma_w = k | sigma_v = i) - P(sigma_w = k)|`.
    pub fn jhat_influence(&self, v: usize, w: usize, k: Color) -> f64 {
        if w == v {
            // |indicator - marginal| with indicator 0 for pinned i != k
            let has_other = self.inst.list(v).iter().any(|&c| c != k);
            return if has_other { self.uncond_of(v, k) } else { 0.0 };
        }
        let Some(col) = self.index.index_of(w, k) else {
            return 0.0;
        };
        let base = self.uncond(col);
        let mut best = 0.0f64;
        let mut seen = 0usize;
        for row in self.index.vertex_range(v) {
            let (_, i) = self.index.pair(row);
            if i == k {
                continue;
            }
            best = best.max((self.cond(row, col) - base).abs());
            seen += 1;
        }
        if seen == 0 {
            0.0
        } else {
            best
        }
    }

    /// Largest marginal at `v`.
    pub fn p_max(&self, v: usize) -> f64 {
        self.index
            .vertex_range(v)
            .map(|idx| self.uncond(idx))
            .fold(0.0, f64::max)
    }

    /// `max_c P(sigma_v = c) / P(sigma_v != c)` from the unconditional counts.
    pub fn ratio(&self, v: usize) -> Result<f64> {
        let mut best = 0.0f64;
        for idx in self.index.vertex_range(v) {
            let cnt = self.pair_counts[idx];
            if cnt == self.total {
                let (_, c) = self.index.pair(idx);
                return Err(Error::DegenerateMarginal { vertex: v, color: c });
            }
            best = best.max(cnt as f64 / (self.total - cnt) as f64);
        }
        Ok(best)
    }

    /// Row sum `sum_{w != v} sum_k |M((v,i),(w,k))|` for the row at `idx`.
    pub fn row_abs_sum(&self, idx: usize) -> f64 {
        let (v, _) = self.index.pair(idx);
        let mut acc = 0.0;
        for col in 0..self.index.len() {
            let (w, _) = self.index.pair(col);
            if w == v {
                continue;
            }
            acc += (self.cond(idx, col) - self.uncond(col)).abs();
        }
        acc
    }
}

/// Dense influence matrix over the ordered pair set.
#[derive(Debug, Clone)]
pub struct InfluenceMatrix {
    pub index: PairIndex,
    pub entries: DMatrix<f64>,
}

impl InfluenceMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, v: usize, i: Color, w: usize, k: Color) -> f64 {
        match (self.index.index_of(v, i), self.index.index_of(w, k)) {
            (Some(r), Some(c)) => self.entries[(r, c)],
            _ => 0.0,
        }
    }

    pub fn row_l1(&self, row: usize) -> f64 {
        self.entries.row(row).iter().map(|x| x.abs()).sum()
    }

    pub fn max_row_l1(&self) -> f64 {
        (0..self.dim()).map(|r| self.row_l1(r)).fold(0.0, f64::max)
    }
}

/// Builds the influence matrix from exact counts; one conditioned
/// enumeration per row.
pub fn influence_matrix(inst: &ListColoringInstance) -> Result<InfluenceMatrix> {
    let a = Analysis::with_all_rows(inst)?;
    Ok(influence_matrix_from(&a))
}

pub fn influence_matrix_from(a: &Analysis) -> InfluenceMatrix {
    let m = a.index().len();
    let mut entries = DMatrix::zeros(m, m);
    for row in 0..m {
        let (v, _) = a.index().pair(row);
        for col in 0..m {
            let (w, _) = a.index().pair(col);
            if w != v {
                entries[(row, col)] = a.cond(row, col) - a.uncond(col);
            }
        }
    }
    InfluenceMatrix {
        index: a.index().clone(),
        entries,
    }
}

/// Marginal tables for every member of a collection over one shared graph.
#[derive(Debug)]
pub struct CollectionAnalysis {
    q: u32,
    degrees: Vec<usize>,
    members: Vec<Analysis>,
}

impl CollectionAnalysis {
    pub fn new(coll: &InstanceCollection) -> Result<Self> {
        let members: Vec<Result<Analysis>> = coll
            .members()
            .collect::<Vec<_>>()
            .par_iter()
            .map(Analysis::new)
            .collect();
        let members = members.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(CollectionAnalysis {
            q: coll.q(),
            degrees: (0..coll.graph().n())
                .map(|v| coll.graph().degree(v))
                .collect(),
            members,
        })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn members(&self) -> &[Analysis] {
        &self.members
    }

    pub fn ensure_rows_at(&mut self, v: usize) -> Result<()> {
        let results: Vec<Result<()>> = self
            .members
            .par_iter_mut()
            .map(|m| m.ensure_rows_at(v))
            .collect();
        results.into_iter().collect()
    }

    /// `max_{L in the collection} I_{G,L}[v -> (w,k)]`.
    pub fn max_influence(&self, v: usize, w: usize, k: Color) -> f64 {
        self.members
            .iter()
            .map(|m| m.max_influence(v, w, k))
            .fold(0.0, f64::max)
    }

    pub fn biased_influence(&self, v: usize, w: usize, k: Color) -> f64 {
        self.members
            .iter()
            .map(|m| m.biased_influence(v, w, k))
            .fold(0.0, f64::max)
    }

    /// Total maximum influence `I*(v)`: zero for isolated `v`, else the
    /// aggregated influence over all `(w, k)` divided by `deg(v)`.
    pub fn total_influence(&self, v: usize) -> f64 {
        let deg = self.degrees[v];
        if deg == 0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for w in 0..self.n() {
            if w == v {
                continue;
            }
            for k in 1..=self.q {
                acc += self.max_influence(v, w, k);
            }
        }
        acc / deg as f64
    }

    /// Total maximum biased influence `Ihat*(v)`.
    pub fn total_biased_influence(&self, v: usize) -> f64 {
        let deg = self.degrees[v];
        if deg == 0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for w in 0..self.n() {
            if w == v {
                continue;
            }
            for k in 1..=self.q {
                acc += self.biased_influence(v, w, k);
            }
        }
        acc / deg as f64
    }

    /// `R(u)`: the worst marginal ratio at `u` over all members.
    pub fn ratio(&self, u: usize) -> Result<f64> {
        let mut best = 0.0f64;
        for m in &self.members {
            best = best.max(m.ratio(u)?);
        }
        Ok(best)
    }
}

/// Maximum influence of `v` on `(w, k)` for a single instance.
pub fn max_influence(inst: &ListColoringInstance, v: usize, w: usize, k: Color) -> Result<f64> {
    let mut a = Analysis::new(inst)?;
    if w != v {
        a.ensure_rows_at(v)?;
    }
    Ok(a.max_influence(v, w, k))
}

pub fn biased_influence(
    inst: &ListColoringInstance,
    v: usize,
    w: usize,
    k: Color,
) -> Result<f64> {
    let mut a = Analysis::new(inst)?;
    if w != v {
        a.ensure_rows_at(v)?;
    }
    Ok(a.biased_influence(v, w, k))
}

pub fn jhat_influence(inst: &ListColoringInstance, v: usize, w: usize, k: Color) -> Result<f64> {
    let mut a = Analysis::new(inst)?;
    if w != v {
        a.ensure_rows_at(v)?;
    }
    Ok(a.jhat_influence(v, w, k))
}

/// Total maximum influence of `v` with respect to a collection.
pub fn total_influence(coll: &InstanceCollection, v: usize) -> Result<f64> {
    let mut a = CollectionAnalysis::new(coll)?;
    a.ensure_rows_at(v)?;
    Ok(a.total_influence(v))
}

pub fn total_biased_influence(coll: &InstanceCollection, v: usize) -> Result<f64> {
    let mut a = CollectionAnalysis::new(coll)?;
    a.ensure_rows_at(v)?;
    Ok(a.total_biased_influence(v))
}

/// The marginal-ratio lower-bound function
/// `Phi(delta, q) = (q-2)/(delta-1) * [(1 - 1/(q-delta+1))^(q-delta+1)]^((delta-1)/(q-2))`,
/// evaluated through exp/log to avoid nested-power error.
pub fn phi(delta: u32, q: u32) -> Result<f64> {
    if delta < 3 || q < 3 || q < delta + 1 {
        return Err(Error::BadParams(format!(
            "phi needs delta >= 3, q >= 3, q >= delta + 1; got ({delta}, {q})"
        )));
    }
    let m = (q - delta + 1) as f64;
    let log_inner = m * (1.0 - 1.0 / m).ln();
    let expo = (delta - 1) as f64 / (q - 2) as f64;
    Ok((q - 2) as f64 / (delta - 1) as f64 * (expo * log_inner).exp())
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

/// Both sides of the influence recursion for one tuple `(v, i, j, w, k)`.
///
/// The left side is `P(sigma_w = k | sigma_v = i) - P(sigma_w = k | sigma_v = j)`.
/// The right side sums, over the neighbors `u` of `v`, ratio-weighted
/// deviations of the conditional marginal of `(w, k)` in the derived
/// instance `(G \ v, L_u^{ij})`, pinned at `(u, j)` minus pinned at `(u, i)`.
/// Since the statement and its derivation orient the difference oppositely,
/// the check accepts either global sign and records which one matched.
pub fn verify_recursion_identity(
    inst: &ListColoringInstance,
    v: usize,
    i: Color,
    j: Color,
    w: usize,
    k: Color,
    tol: f64,
) -> Result<CheckReport> {
    let mut base = Analysis::new(inst)?;
    base.ensure_rows_at(v)?;
    let mut derived = DerivedCache::new(inst);
    recursion_identity_with(&base, &mut derived, v, i, j, w, k, tol)
}

/// Cache of derived-instance analyses keyed by `(v, u, i, j)`, so that a
/// sweep over `(w, k)` pays for each derivation once.
pub struct DerivedCache<'a> {
    inst: &'a ListColoringInstance,
    map: HashMap<(usize, usize, Color, Color), (Analysis, Vec<Option<usize>>)>,
}

impl<'a> DerivedCache<'a> {
    pub fn new(inst: &'a ListColoringInstance) -> Self {
        DerivedCache {
            inst,
            map: HashMap::new(),
        }
    }

    fn get(
        &mut self,
        v: usize,
        u: usize,
        i: Color,
        j: Color,
    ) -> Result<&(Analysis, Vec<Option<usize>>)> {
        if !self.map.contains_key(&(v, u, i, j)) {
            let (dinst, vmap) = self.inst.derive(v, u, i, j)?;
            let mut a = Analysis::new(&dinst)?;
            let u_new = vmap.new_of_old(u).expect("u survives removal of v");
            a.ensure_rows_at(u_new)?;
            let fwd: Vec<Option<usize>> =
                (0..self.inst.n()).map(|x| vmap.new_of_old(x)).collect();
            self.map.insert((v, u, i, j), (a, fwd));
        }
        Ok(&self.map[&(v, u, i, j)])
    }
}

fn recursion_identity_with(
    base: &Analysis,
    derived: &mut DerivedCache,
    v: usize,
    i: Color,
    j: Color,
    w: usize,
    k: Color,
    tol: f64,
) -> Result<CheckReport> {
    let inst = base.instance();
    if w == v {
        return Err(Error::BadParams("recursion identity needs w != v".into()));
    }
    let (row_i, row_j) = match (base.index().index_of(v, i), base.index().index_of(v, j)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::ColorNotInList {
                vertex: v,
                color: if inst.has_color(v, i) { j } else { i },
            })
        }
    };
    let lhs = match base.index().index_of(w, k) {
        Some(c) => base.cond(row_i, c) - base.cond(row_j, c),
        None => 0.0,
    };

    let mut rhs = 0.0;
    for &u in inst.graph().neighbors(v) {
        let (a, fwd) = derived.get(v, u, i, j)?;
        let u_new = fwd[u].expect("u survives");
        for (c, sign) in [(j, 1.0), (i, -1.0)] {
            let Some(row) = a.index().index_of(u_new, c) else {
                continue; // c fell out of the derived list: term is zero
            };
            let pc = a.pair_count(row);
            let rest = a.total() - pc;
            if rest == 0 {
                return Err(Error::DegenerateMarginal { vertex: u, color: c });
            }
            let ratio = pc as f64 / rest as f64;
            // Deviation of the conditional marginal of (w,k) from the
            // unconditional one in the derived instance. For w == u the
            // conditional collapses to an indicator.
            let dev = if w == u {
                let ind = if c == k { 1.0 } else { 0.0 };
                ind - a.uncond_of(u_new, k)
            } else {
                let w_new = fwd[w].expect("w != v survives");
                match a.index().index_of(w_new, k) {
                    Some(colw) => a.cond(row, colw) - a.uncond(colw),
                    None => 0.0,
                }
            };
            rhs += sign * ratio * dev;
        }
    }

    let res_direct = (lhs - rhs).abs();
    let res_flipped = (lhs + rhs).abs();
    let (residual, sign) = if res_direct <= tol && res_flipped <= tol {
        (res_direct.min(res_flipped), "both")
    } else if res_direct <= res_flipped {
        (res_direct, "i_minus_j")
    } else {
        (res_flipped, "j_minus_i")
    };
    let mut report = CheckReport::identity("recursion_identity", lhs, rhs, tol);
    report.residual = residual;
    report.pass = residual <= tol;
    Ok(report
        .with("v", v as u64)
        .with("i", i)
        .with("j", j)
        .with("w", w as u64)
        .with("k", k)
        .with("sign", sign))
}

/// Outcome of sweeping the recursion identity over many tuples.
#[derive(Debug, Clone)]
pub struct RecursionSweep {
    pub reports: Vec<CheckReport>,
    pub tuples_checked: usize,
    pub tuples_skipped_degenerate: usize,
}

/// Checks the recursion identity over all tuples `(v, i, j, w, k)`, or a
/// seeded sample bounded by `budget` when the full set is larger. One
/// report per `(v, i, j)` triple carries the worst `(w, k)` residual.
pub fn verify_recursion_identity_all(
    inst: &ListColoringInstance,
    tol: f64,
    budget: usize,
    seed: u64,
) -> Result<RecursionSweep> {
    use rand::SeedableRng;
    let n = inst.n();
    let q = inst.q();
    let mut triples = Vec::new();
    for v in 0..n {
        for &i in inst.list(v) {
            for &j in inst.list(v) {
                if i != j {
                    triples.push((v, i, j));
                }
            }
        }
    }
    let tuples_per_triple = (n - 1) * q as usize;
    let total_tuples = triples.len() * tuples_per_triple;
    let sample_per_triple = if total_tuples <= budget || triples.is_empty() {
        usize::MAX
    } else {
        (budget / triples.len()).max(1)
    };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut base = Analysis::new(inst)?;
    for v in 0..n {
        base.ensure_rows_at(v)?;
    }
    let mut cache = DerivedCache::new(inst);
    for (v, i, j) in triples {
        let mut targets: Vec<(usize, Color)> = (0..n)
            .filter(|&w| w != v)
            .flat_map(|w| (1..=q).map(move |k| (w, k)))
            .collect();
        if sample_per_triple < targets.len() {
            let picked = rand::seq::index::sample(&mut rng, targets.len(), sample_per_triple);
            targets = picked.into_iter().map(|t| targets[t]).collect();
        }
        let mut worst: Option<CheckReport> = None;
        for (w, k) in targets {
            match recursion_identity_with(&base, &mut cache, v, i, j, w, k, tol) {
                Ok(rep) => {
                    checked += 1;
                    worst = Some(match worst {
                        None => rep,
                        Some(prev) => prev.worse(rep),
                    });
                }
                Err(Error::DegenerateMarginal { .. }) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        if let Some(rep) = worst {
            reports.push(rep);
        }
    }
    Ok(RecursionSweep {
        reports,
        tuples_checked: checked,
        tuples_skipped_degenerate: skipped,
    })
}

/// The aggregate influence recursion at `v`:
/// `I*(v) <= max_u R(u) (deg_{G\v}(u) I*_{G\v}(u) + q)` over the derived
/// collection.
pub fn verify_aggregate_recursion(
    coll: &InstanceCollection,
    v: usize,
    tol: f64,
) -> Result<CheckReport> {
    if coll.graph().degree(v) == 0 {
        return Err(Error::IsolatedVertex(v));
    }
    let mut base = CollectionAnalysis::new(coll)?;
    base.ensure_rows_at(v)?;
    let lhs = base.total_influence(v);

    let (dcoll, map) = coll.derive(v)?;
    let mut da = CollectionAnalysis::new(&dcoll)?;
    let mut rhs = f64::NEG_INFINITY;
    let mut arg_u = 0usize;
    for &u in coll.graph().neighbors(v) {
        let u_new = map.new_of_old(u).expect("u survives");
        da.ensure_rows_at(u_new)?;
        let r = da.ratio(u_new)?;
        let deg = dcoll.graph().degree(u_new);
        let istar = da.total_influence(u_new);
        let term = r * (deg as f64 * istar + coll.q() as f64);
        if term > rhs {
            rhs = term;
            arg_u = u;
        }
    }
    Ok(
        CheckReport::upper_bound("aggregate_recursion", lhs, rhs, tol)
            .with("v", v as u64)
            .with("argmax_u", arg_u as u64)
            .with("members_derived", dcoll.len() as u64),
    )
}

/// The biased influence recursion at `v`: the total bound
/// `Ihat*(v) <= max_u R(u) [deg(u) Ihat*_{G\v}(u) + R(u)(deg(u) I*_{G\v}(u) + q)]`
/// plus the per-target bound
/// `Ihat[v->(w,k)] <= sum_u R(u)(Ihat_{G\v}[u->(w,k)] + R(u) I_{G\v}[u->(w,k)])`,
/// reported as the worst target.
pub fn verify_biased_recursion(
    coll: &InstanceCollection,
    v: usize,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    if coll.graph().degree(v) == 0 {
        return Err(Error::IsolatedVertex(v));
    }
    let mut base = CollectionAnalysis::new(coll)?;
    base.ensure_rows_at(v)?;
    let lhs_total = base.total_biased_influence(v);

    let (dcoll, map) = coll.derive(v)?;
    let mut da = CollectionAnalysis::new(&dcoll)?;
    let neighbors: Vec<(usize, usize)> = coll
        .graph()
        .neighbors(v)
        .iter()
        .map(|&u| (u, map.new_of_old(u).expect("u survives")))
        .collect();
    let mut ratios = Vec::new();
    for &(_, u_new) in &neighbors {
        da.ensure_rows_at(u_new)?;
        ratios.push(da.ratio(u_new)?);
    }

    let mut rhs_total = f64::NEG_INFINITY;
    for (t, &(_, u_new)) in neighbors.iter().enumerate() {
        let r = ratios[t];
        let deg = dcoll.graph().degree(u_new);
        let term = r
            * (deg as f64 * da.total_biased_influence(u_new)
                + r * (deg as f64 * da.total_influence(u_new) + coll.q() as f64));
        rhs_total = rhs_total.max(term);
    }
    let total_report =
        CheckReport::upper_bound("biased_recursion_total", lhs_total, rhs_total, tol)
            .with("v", v as u64)
            .with("members_derived", dcoll.len() as u64);

    let mut worst: Option<CheckReport> = None;
    for w in 0..coll.graph().n() {
        if w == v {
            continue;
        }
        let w_new = map.new_of_old(w).expect("w != v survives");
        for k in 1..=coll.q() {
            let lhs = base.biased_influence(v, w, k);
            let mut rhs = 0.0;
            for (t, &(_, u_new)) in neighbors.iter().enumerate() {
                let r = ratios[t];
                rhs += r
                    * (da.biased_influence(u_new, w_new, k)
                        + r * da.max_influence(u_new, w_new, k));
            }
            let rep = CheckReport::upper_bound("biased_recursion_pointwise", lhs, rhs, tol)
                .with("v", v as u64)
                .with("w", w as u64)
                .with("k", k);
            worst = Some(match worst {
                None => rep,
                Some(prev) => prev.worse(rep),
            });
        }
    }
    Ok(vec![
        total_report,
        worst.expect("n >= 2 when v has a neighbor"),
    ])
}

/// Declared max-degree parameter: the bounds require `delta >= 3`, so
/// low-degree graphs are treated as `(3, q)`-instances.
pub fn declared_delta(inst: &ListColoringInstance) -> u32 {
    (inst.graph().max_degree() as u32).max(3)
}

fn hypothesis_context(
    inst: &ListColoringInstance,
    eps: &RegionParams,
) -> (bool, Vec<(String, serde_json::Value)>) {
    let delta = declared_delta(inst);
    let q = inst.q();
    let tri = inst.graph().is_triangle_free();
    let dq = crate::instance::is_delta_q_instance(inst, delta, q).unwrap_or(false);
    let in_reg = eps.contains(delta, q);
    let all = tri && dq && in_reg;
    (
        all,
        vec![
            ("delta".into(), json!(delta)),
            ("q".into(), json!(q)),
            ("triangle_free".into(), json!(tri)),
            ("delta_q_instance".into(), json!(dq)),
            ("in_region".into(), json!(in_reg)),
        ],
    )
}

fn attach_context(rep: &mut CheckReport, ctx: &[(String, serde_json::Value)], hyp_ok: bool) {
    for (key, val) in ctx {
        rep.context.insert(key.clone(), val.clone());
    }
    rep.context.insert("hypotheses_hold".into(), json!(hyp_ok));
}

/// Row sums of the influence matrix against both bounds: the influence
/// bound `2 deg(v) (Ihat*(v) + P(v) I*(v))` per row, and the region bound
/// `64 (1/eps + 1)^2 delta / q` (reported with a hypothesis flag when the
/// instance is outside the region or not triangle-free).
pub fn verify_row_sum_bound(
    inst: &ListColoringInstance,
    epsilon: f64,
) -> Result<Vec<CheckReport>> {
    let params = RegionParams::new(epsilon)?;
    let a = Analysis::with_all_rows(inst)?;
    let q = inst.q();
    let delta = declared_delta(inst);
    let (hyp_ok, ctx) = hypothesis_context(inst, &params);
    let (istar, ihat) = singleton_totals(&a, inst);

    let mut worst_vs_influence: Option<CheckReport> = None;
    let mut worst_vs_region: Option<CheckReport> = None;
    let region_bound = 64.0 * (1.0 / epsilon + 1.0).powi(2) * delta as f64 / q as f64;
    for row in 0..a.index().len() {
        let (v, i) = a.index().pair(row);
        let rowsum = a.row_abs_sum(row);
        let deg = inst.graph().degree(v) as f64;
        let bound1 = 2.0 * deg * (ihat[v] + a.p_max(v) * istar[v]);
        let rep1 =
            CheckReport::upper_bound("row_sum_vs_influences", rowsum, bound1, INEQUALITY_SLACK)
                .with("v", v as u64)
                .with("i", i);
        worst_vs_influence = Some(match worst_vs_influence {
            None => rep1,
            Some(prev) => prev.worse(rep1),
        });
        let rep2 = CheckReport::upper_bound(
            "row_sum_vs_region_bound",
            rowsum,
            region_bound,
            INEQUALITY_SLACK,
        )
        .with("v", v as u64)
        .with("i", i);
        worst_vs_region = Some(match worst_vs_region {
            None => rep2,
            Some(prev) => prev.worse(rep2),
        });
    }
    let mut out = vec![
        worst_vs_influence.ok_or(Error::SingleVertex)?,
        worst_vs_region.ok_or(Error::SingleVertex)?,
    ];
    for rep in &mut out {
        attach_context(rep, &ctx, hyp_ok);
    }
    Ok(out)
}

/// Marginal-ratio bounds at every vertex of degree at most `delta - 1`:
/// the two-branch bound `min(1/((1+eps) deg(u)), 4/q)`, the `Phi` bound
/// `1/(Phi(delta,q) deg(u))`, and the crude chain
/// `P(sigma_u = c) <= 1/(|L(u)| - deg(u)) <= 1/(q - delta)`.
pub fn verify_marginal_ratio_bounds(
    inst: &ListColoringInstance,
    epsilon: f64,
) -> Result<Vec<CheckReport>> {
    let params = RegionParams::new(epsilon)?;
    let a = Analysis::new(inst)?;
    let delta = declared_delta(inst);
    let q = inst.q();
    let phi_dq = phi(delta, q)?;
    let (hyp_ok, ctx) = hypothesis_context(inst, &params);

    let mut worst18: Option<CheckReport> = None;
    let mut worst25: Option<CheckReport> = None;
    let mut worst_crude: Option<CheckReport> = None;
    for u in 0..inst.n() {
        let deg = inst.graph().degree(u) as u32;
        if deg > delta - 1 {
            continue;
        }
        let ratio = a.ratio(u)?;
        let branch1 = if deg == 0 {
            f64::INFINITY
        } else {
            1.0 / ((1.0 + epsilon) * deg as f64)
        };
        let rep18 = CheckReport::upper_bound(
            "marginal_ratio_two_branch",
            ratio,
            branch1.min(4.0 / q as f64),
            INEQUALITY_SLACK,
        )
        .with("u", u as u64)
        .with("deg", deg);
        worst18 = Some(match worst18 {
            None => rep18,
            Some(prev) => prev.worse(rep18),
        });

        let bound25 = if deg == 0 {
            f64::INFINITY
        } else {
            1.0 / (phi_dq * deg as f64)
        };
        let rep25 =
            CheckReport::upper_bound("marginal_ratio_vs_phi", ratio, bound25, INEQUALITY_SLACK)
                .with("u", u as u64)
                .with("deg", deg)
                .with("phi", phi_dq);
        worst25 = Some(match worst25 {
            None => rep25,
            Some(prev) => prev.worse(rep25),
        });

        // P(sigma_u = c) <= 1/(|L(u)| - deg(u)) <= 1/(q - delta)
        let pmax = a.p_max(u);
        let list_bound = 1.0 / (inst.list(u).len() as f64 - deg as f64);
        let chain_holds = list_bound <= 1.0 / (q as f64 - delta as f64) + INEQUALITY_SLACK;
        let rep_crude =
            CheckReport::upper_bound("marginal_vs_crude_chain", pmax, list_bound, INEQUALITY_SLACK)
                .with("u", u as u64)
                .with("q_minus_delta_bound", 1.0 / (q as f64 - delta as f64))
                .with("chain_step_holds", chain_holds);
        worst_crude = Some(match worst_crude {
            None => rep_crude,
            Some(prev) => prev.worse(rep_crude),
        });
    }
    let mut out: Vec<CheckReport> = [worst18, worst25, worst_crude]
        .into_iter()
        .flatten()
        .collect();
    if out.is_empty() {
        return Err(Error::BadParams(
            "no vertex of degree <= delta - 1 to check".into(),
        ));
    }
    for rep in &mut out {
        attach_context(rep, &ctx, hyp_ok);
    }
    Ok(out)
}

/// `|M((v,i),(w,k))| <= I[v -> (w,k)]` over every index pair.
pub fn verify_obs11(inst: &ListColoringInstance) -> Result<CheckReport> {
    let a = Analysis::with_all_rows(inst)?;
    let mut worst: Option<CheckReport> = None;
    for row in 0..a.index().len() {
        let (v, i) = a.index().pair(row);
        for col in 0..a.index().len() {
            let (w, k) = a.index().pair(col);
            if w == v {
                continue;
            }
            let m = (a.cond(row, col) - a.uncond(col)).abs();
            let inf = a.max_influence(v, w, k);
            let rep = CheckReport::upper_bound("entry_vs_max_influence", m, inf, IDENTITY_TOL)
                .with("v", v as u64)
                .with("i", i)
                .with("w", w as u64)
                .with("k", k);
            worst = Some(match worst {
                None => rep,
                Some(prev) => prev.worse(rep),
            });
        }
    }
    worst.ok_or(Error::SingleVertex)
}

/// `Jhat[v->(w,k)] <= (1 - P(v)) Ihat[v->(w,k)] + P(v) I[v->(w,k)]`.
pub fn verify_jk_bound(inst: &ListColoringInstance) -> Result<CheckReport> {
    let a = Analysis::with_all_rows(inst)?;
    let mut worst: Option<CheckReport> = None;
    for v in 0..inst.n() {
        let pv = a.p_max(v);
        for w in 0..inst.n() {
            if w == v {
                continue;
            }
            for k in 1..=inst.q() {
                let jhat = a.jhat_influence(v, w, k);
                let bound =
                    (1.0 - pv) * a.biased_influence(v, w, k) + pv * a.max_influence(v, w, k);
                let rep = CheckReport::upper_bound("jhat_vs_mixture", jhat, bound, INEQUALITY_SLACK)
                    .with("v", v as u64)
                    .with("w", w as u64)
                    .with("k", k);
                worst = Some(match worst {
                    None => rep,
                    Some(prev) => prev.worse(rep),
                });
            }
        }
    }
    worst.ok_or(Error::SingleVertex)
}

/// Total influence bound `I*(v) <= 4 (1/eps + 1)` for every vertex, treating
/// the instance as a singleton collection.
pub fn verify_total_influence_bound(
    inst: &ListColoringInstance,
    epsilon: f64,
) -> Result<CheckReport> {
    let params = RegionParams::new(epsilon)?;
    let a = Analysis::with_all_rows(inst)?;
    let totals = singleton_totals(&a, inst);
    let bound = 4.0 * (1.0 / epsilon + 1.0);
    let (hyp_ok, ctx) = hypothesis_context(inst, &params);
    let mut worst: Option<CheckReport> = None;
    for (v, &istar) in totals.0.iter().enumerate() {
        let rep = CheckReport::upper_bound("total_influence", istar, bound, INEQUALITY_SLACK)
            .with("v", v as u64);
        worst = Some(match worst {
            None => rep,
            Some(prev) => prev.worse(rep),
        });
    }
    let mut rep = worst.ok_or(Error::SingleVertex)?;
    attach_context(&mut rep, &ctx, hyp_ok);
    Ok(rep)
}

/// Total biased influence bound `Ihat*(v) <= (16/q)(1/eps + 1)^2`.
pub fn verify_total_biased_bound(
    inst: &ListColoringInstance,
    epsilon: f64,
) -> Result<CheckReport> {
    let params = RegionParams::new(epsilon)?;
    let a = Analysis::with_all_rows(inst)?;
    let totals = singleton_totals(&a, inst);
    let bound = 16.0 / inst.q() as f64 * (1.0 / epsilon + 1.0).powi(2);
    let (hyp_ok, ctx) = hypothesis_context(inst, &params);
    let mut worst: Option<CheckReport> = None;
    for (v, &ihat) in totals.1.iter().enumerate() {
        let rep = CheckReport::upper_bound("total_biased_influence", ihat, bound, INEQUALITY_SLACK)
            .with("v", v as u64);
        worst = Some(match worst {
            None => rep,
            Some(prev) => prev.worse(rep),
        });
    }
    let mut rep = worst.ok_or(Error::SingleVertex)?;
    attach_context(&mut rep, &ctx, hyp_ok);
    Ok(rep)
}

/// Per-vertex totals `I*` and `Ihat*` for the singleton collection `{L}`.
fn singleton_totals(a: &Analysis, inst: &ListColoringInstance) -> (Vec<f64>, Vec<f64>) {
    let n = inst.n();
    let q = inst.q();
    let mut istar = vec![0.0; n];
    let mut ihat = vec![0.0; n];
    for v in 0..n {
        let deg = inst.graph().degree(v);
        if deg == 0 {
            continue;
        }
        let (mut s, mut sb) = (0.0, 0.0);
        for w in 0..n {
            if w == v {
                continue;
            }
            for k in 1..=q {
                s += a.max_influence(v, w, k);
                sb += a.biased_influence(v, w, k);
            }
        }
        istar[v] = s / deg as f64;
        ihat[v] = sb / deg as f64;
    }
    (istar, ihat)
}

/// `Phi(delta, q) >= 1 + (1 + 1/alpha_star) eps` over the integer grid
/// `delta in [3, delta_max]`, `q in [ceil(alpha delta + beta), 3 delta]`.
pub fn verify_phi_lower_bound(epsilon: f64, delta_max: u32) -> Result<CheckReport> {
    let params = RegionParams::new(epsilon)?;
    let target = 1.0 + (1.0 + 1.0 / params.alpha_star) * epsilon;
    let mut worst: Option<CheckReport> = None;
    let mut grid_points = 0usize;
    for delta in 3..=delta_max {
        let q_lo = params.q_threshold(delta).ceil() as u32;
        for q in q_lo..=(3 * delta) {
            grid_points += 1;
            let val = phi(delta, q)?;
            let rep =
                CheckReport::lower_bound("phi_region_lower_bound", val, target, INEQUALITY_SLACK)
                    .with("delta", delta)
                    .with("q", q);
            worst = Some(match worst {
                None => rep,
                Some(prev) => prev.worse(rep),
            });
        }
    }
    // For alpha > 3 the lower end ceil(alpha*delta + beta) exceeds 3*delta
    // everywhere, so the prescribed grid is empty and the check is vacuous.
    let mut rep = worst.unwrap_or_else(|| {
        CheckReport::lower_bound("phi_region_lower_bound", f64::INFINITY, target, 0.0)
            .with("vacuous_empty_grid", true)
    });
    rep.context.insert("grid_points".into(), json!(grid_points));
    rep.context.insert("epsilon".into(), json!(epsilon));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn star(delta: usize, q: u32) -> ListColoringInstance {
        let edges: Vec<(usize, usize)> = (1..=delta).map(|i| (0, i)).collect();
        let g = Graph::from_edges(delta + 1, &edges).unwrap();
        ListColoringInstance::full_palette(g, q).unwrap()
    }

    #[test]
    fn star_influence_matrix_entries() {
        let q = 5u32;
        let inst = star(3, q);
        let m = influence_matrix(&inst).unwrap();
        let off = 1.0 / (q as f64 * (q - 1) as f64);
        let diag = -1.0 / q as f64;
        for w in 1..=3usize {
            for i in 1..=q {
                for k in 1..=q {
                    let got = m.entry(0, i, w, k);
                    let want = if k == i { diag } else { off };
                    assert!((got - want).abs() <= 1e-12, "i={i} w={w} k={k}: {got}");
                }
            }
        }
        // center rows have L1 norm 2*delta/q
        let idx = m.index.index_of(0, 2).unwrap();
        assert!((m.row_l1(idx) - 2.0 * 3.0 / q as f64).abs() <= 1e-12);
    }

    #[test]
    fn independent_vertices_have_zero_matrix() {
        let inst =
            ListColoringInstance::build(2, &[], vec![vec![1, 2], vec![1, 2, 3]], 3).unwrap();
        let m = influence_matrix(&inst).unwrap();
        assert!(m.entries.iter().all(|&x| x.abs() <= 1e-15));
    }

    #[test]
    fn star_max_influence_closed_form() {
        let q = 7u32;
        let inst = star(3, q);
        for k in 1..=q {
            let v = max_influence(&inst, 0, 1, k).unwrap();
            assert!((v - 1.0 / (q - 1) as f64).abs() <= 1e-12);
        }
        // color outside any list has zero influence
        let small =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1, 2, 3], vec![1, 2, 3]], 4)
                .unwrap();
        assert_eq!(max_influence(&small, 0, 1, 4).unwrap(), 0.0);
    }

    #[test]
    fn star_biased_and_jhat() {
        let q = 6u32;
        let inst = star(3, q);
        for k in 1..=q {
            // pinning any two non-k colors at the center gives identical leaf
            // conditionals, so the biased influence vanishes
            assert!(biased_influence(&inst, 0, 1, k).unwrap().abs() <= 1e-12);
            let expect = 1.0 / (q as f64 * (q - 1) as f64);
            let jh = jhat_influence(&inst, 0, 1, k).unwrap();
            assert!((jh - expect).abs() <= 1e-12, "k={k}: {jh}");
        }
    }

    #[test]
    fn biased_at_most_max_influence() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 5).unwrap();
        let a = Analysis::with_all_rows(&inst).unwrap();
        for v in 0..4 {
            for w in 0..4 {
                for k in 1..=5 {
                    assert!(a.biased_influence(v, w, k) <= a.max_influence(v, w, k) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn self_biased_influence_is_zero() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        let a = Analysis::with_all_rows(&inst).unwrap();
        for v in 0..3 {
            for k in 1..=4 {
                assert_eq!(a.biased_influence(v, v, k), 0.0);
            }
        }
    }

    #[test]
    fn star_total_influence() {
        let q = 6u32;
        let inst = star(4, q);
        let coll = InstanceCollection::singleton(&inst);
        let istar = total_influence(&coll, 0).unwrap();
        // (1/delta) * delta * q * (1/(q-1)) = q/(q-1)
        assert!((istar - q as f64 / (q - 1) as f64).abs() <= 1e-12);
    }

    #[test]
    fn isolated_vertex_total_influence_zero() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        let coll = InstanceCollection::singleton(&inst);
        assert_eq!(total_influence(&coll, 2).unwrap(), 0.0);
    }

    #[test]
    fn phi_values() {
        // delta = 3, q = 7: (5/2) * ((4/5)^5)^(2/5), two evaluation routes
        let direct = (5.0 / 2.0) * (0.8f64.powi(5)).powf(0.4);
        assert!((phi(3, 7).unwrap() - direct).abs() <= 1e-14);
        assert!(phi(2, 7).is_err());
        assert!(phi(3, 3).is_err());
        // monotone increasing in q at fixed delta
        let mut prev = phi(4, 5).unwrap();
        for q in 6..40 {
            let cur = phi(4, q).unwrap();
            assert!(cur > prev);
            prev = cur;
        }
    }

    #[test]
    fn phi_lower_bound_grid() {
        for &eps in &[0.1, 0.5, 1.0] {
            let rep = verify_phi_lower_bound(eps, 50).unwrap();
            assert!(rep.pass, "eps={eps}: {rep:?}");
        }
        // the q <= 3*delta cap leaves grid points only while alpha < 3
        assert!(verify_phi_lower_bound(0.5, 50).unwrap().context["grid_points"] != 0);
        assert_eq!(verify_phi_lower_bound(1.0, 50).unwrap().context["grid_points"], 0);
        // beyond the cap, spot-check the bound directly on in-region points
        let p = RegionParams::new(1.0).unwrap();
        let target = 1.0 + (1.0 + 1.0 / p.alpha_star) * 1.0;
        for delta in 3..=20u32 {
            let q_lo = p.q_threshold(delta).ceil() as u32;
            for q in q_lo..q_lo + 10 {
                assert!(phi(delta, q).unwrap() >= target - 1e-9, "({delta},{q})");
            }
        }
    }

    #[test]
    fn recursion_identity_examples() {
        // path on 3 vertices, endpoints as v and w
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        let rep = verify_recursion_identity(&inst, 0, 1, 2, 2, 3, IDENTITY_TOL).unwrap();
        assert!(rep.pass, "{rep:?}");

        // star center to a leaf
        let inst = star(3, 5);
        for k in 1..=5 {
            let rep = verify_recursion_identity(&inst, 0, 1, 2, 3, k, IDENTITY_TOL).unwrap();
            assert!(rep.pass, "k={k}: {rep:?}");
        }

        // neighbor as target (w in N(v)), where the indicator case matters
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        for k in 1..=4 {
            let rep = verify_recursion_identity(&inst, 1, 2, 3, 0, k, IDENTITY_TOL).unwrap();
            assert!(rep.pass, "k={k}: {rep:?}");
        }
    }

    #[test]
    fn recursion_identity_all_small() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        let sweep = verify_recursion_identity_all(&inst, IDENTITY_TOL, usize::MAX, 1).unwrap();
        assert!(sweep.reports.iter().all(|r| r.pass));
        assert_eq!(sweep.tuples_skipped_degenerate, 0);
        assert!(sweep.tuples_checked > 100);
    }

    #[test]
    fn aggregate_recursion_star_is_near_tight() {
        let q = 6u32;
        let inst = star(3, q);
        let coll = InstanceCollection::singleton(&inst);
        let rep = verify_aggregate_recursion(&coll, 0, 1e-9).unwrap();
        assert!(rep.pass);
        // LHS is the exact q/(q-1). The derived collection contains members
        // where another neighbor's derivation removed one color from u's
        // list, so R(u) = 1/(q-2) and the right side is q/(q-2).
        assert!((rep.value - q as f64 / (q - 1) as f64).abs() <= 1e-12, "{rep:?}");
        assert!((rep.bound - q as f64 / (q - 2) as f64).abs() <= 1e-12, "{rep:?}");
    }

    #[test]
    fn aggregate_recursion_path_and_leaf() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 5).unwrap();
        let coll = InstanceCollection::singleton(&inst);
        for v in 0..4 {
            let rep = verify_aggregate_recursion(&coll, v, 1e-9).unwrap();
            assert!(rep.pass, "v={v}: {rep:?}");
        }
    }

    #[test]
    fn biased_recursion_star_and_path() {
        let inst = star(3, 6);
        let coll = InstanceCollection::singleton(&inst);
        let reps = verify_biased_recursion(&coll, 0, 1e-9).unwrap();
        assert!(reps.iter().all(|r| r.pass), "{reps:?}");

        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 5).unwrap();
        let coll = InstanceCollection::singleton(&inst);
        for v in 1..=2 {
            let reps = verify_biased_recursion(&coll, v, 1e-9).unwrap();
            assert!(reps.iter().all(|r| r.pass), "v={v}: {reps:?}");
        }
    }

    #[test]
    fn obs11_and_jk_on_cycle() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        assert!(verify_obs11(&inst).unwrap().pass);
        assert!(verify_jk_bound(&inst).unwrap().pass);
    }

    #[test]
    fn row_sums_on_star_in_region() {
        let inst = star(3, 7);
        let reps = verify_row_sum_bound(&inst, 0.1).unwrap();
        assert!(reps.iter().all(|r| r.pass), "{reps:?}");
        // the worst row of the star has L1 mass exactly 2*delta/q
        let vs_region = &reps[1];
        assert!((vs_region.value - 2.0 * 3.0 / 7.0).abs() <= 1e-12);
    }

    #[test]
    fn marginal_ratio_bounds_on_small_instances() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let edge = ListColoringInstance::full_palette(g, 7).unwrap();
        let reps = verify_marginal_ratio_bounds(&edge, 0.1).unwrap();
        assert!(reps.iter().all(|r| r.pass), "{reps:?}");

        let g =
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let c6 = ListColoringInstance::full_palette(g, 7).unwrap();
        let reps = verify_marginal_ratio_bounds(&c6, 0.1).unwrap();
        assert!(reps.iter().all(|r| r.pass), "{reps:?}");
    }

    #[test]
    fn total_influence_bounds_in_region() {
        let inst = star(3, 7);
        let rep = verify_total_influence_bound(&inst, 0.1).unwrap();
        assert!(rep.pass, "{rep:?}");
        let rep = verify_total_biased_bound(&inst, 0.1).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn dedup_does_not_change_influence_maxima() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 5).unwrap();
        let coll = InstanceCollection::singleton(&inst);
        let (with_dedup, map) = coll.derive(0).unwrap();
        let (without, _) = coll.derive_with_dedup(0, false).unwrap();
        assert!(with_dedup.len() < without.len());
        let mut a1 = CollectionAnalysis::new(&with_dedup).unwrap();
        let mut a2 = CollectionAnalysis::new(&without).unwrap();
        let u = map.new_of_old(1).unwrap();
        a1.ensure_rows_at(u).unwrap();
        a2.ensure_rows_at(u).unwrap();
        assert!((a1.total_influence(u) - a2.total_influence(u)).abs() <= 1e-15);
        assert!((a1.total_biased_influence(u) - a2.total_biased_influence(u)).abs() <= 1e-15);
    }

    #[test]
    fn influence_is_order_invariant() {
        // relabeling the vertices must not change influence values
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        let perm = vec![2usize, 0, 3, 1];
        let relabeled = inst.relabel(&perm).unwrap();
        let mut a = Analysis::new(&inst).unwrap();
        let mut b = Analysis::new(&relabeled).unwrap();
        for v in 0..4 {
            a.ensure_rows_at(v).unwrap();
            b.ensure_rows_at(v).unwrap();
        }
        for v in 0..4 {
            for w in 0..4 {
                for k in 1..=4 {
                    let x = a.max_influence(v, w, k);
                    let y = b.max_influence(perm[v], perm[w], k);
                    assert!((x - y).abs() <= 1e-15);
                }
            }
        }
    }
}
