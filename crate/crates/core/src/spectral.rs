//! The pairwise random walk, the exact Glauber chain, and the spectral
//! machinery connecting them.
//!
//! The pairwise walk lives on the vertex-color pair set `U`: the weighted
//! graph has edge weight `P(sigma_v = i, sigma_w = k)` between pairs at
//! distinct vertices, and the non-lazy walk on it has transition
//! `(1/(n-1)) P(sigma_w = k | sigma_v = i)`. Its second eigenvalue equals
//! `lambda_1(M)/(n-1)` for the influence matrix `M`; both sides are computed
//! by independent eigen-solvers (a symmetrized dense solve for the walk, a
//! Schur solve for `M`) so the identity check is non-circular.
//!
//! The local-expansion sweep conditions the instance on partial colorings of
//! every size, records the worst walk eigenvalue per size, and converts the
//! observed expansion profile into a spectral-gap and mixing-time bound for
//! the Glauber dynamics, which can be compared against the gap of the
//! exactly enumerated Glauber transition matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Color, Error, Result};
use crate::influence::{influence_matrix_from, Analysis, InfluenceMatrix};
use crate::instance::{ListColoringInstance, PairIndex, PartialColoring};
use crate::oracle::{self, enumerate_colorings};
use crate::region::RegionParams;

/// Default cap on the number of enumerated Glauber states.
pub const DEFAULT_OMEGA_CAP: usize = 200_000;
/// Matrices up to this size take the dense symmetric eigen-solve path.
const DENSE_EIGEN_LIMIT: usize = 3_000;

/// The weighted pair graph and its non-lazy random walk.
#[derive(Debug, Clone)]
pub struct PairwiseWalk {
    pub index: PairIndex,
    /// Joint probabilities `P(sigma_v = i, sigma_w = k)`; zero on the
    /// diagonal vertex blocks.
    pub joint: DMatrix<f64>,
    /// Transition matrix `(1/(n-1)) P(sigma_w = k | sigma_v = i)`.
    pub transition: DMatrix<f64>,
    /// Stationary vector `P(sigma_v = i) / n`.
    pub stationary: DVector<f64>,
    n: usize,
    total: u128,
    joint_counts: Vec<u128>,
    pair_counts: Vec<u128>,
}

impl PairwiseWalk {
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// Exact joint count behind `joint[(row, col)]`.
    pub fn joint_count(&self, row: usize, col: usize) -> u128 {
        self.joint_counts[row * self.dim() + col]
    }

    pub fn pair_count(&self, idx: usize) -> u128 {
        self.pair_counts[idx]
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    /// Detailed balance holds exactly at the integer-count level; returns
    /// the first violating index pair if any.
    pub fn reversibility_violation(&self) -> Option<(usize, usize)> {
        let m = self.dim();
        for a in 0..m {
            for b in (a + 1)..m {
                if self.joint_count(a, b) != self.joint_count(b, a) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

/// Builds the pairwise walk from exact counts: one conditioned enumeration
/// per pair (the row normalizer is `(n-1) P(sigma_v = i)`).
pub fn build_pairwise_walk(inst: &ListColoringInstance) -> Result<PairwiseWalk> {
    let a = Analysis::with_all_rows(inst)?;
    build_pairwise_walk_from(&a)
}

pub fn build_pairwise_walk_from(a: &Analysis) -> Result<PairwiseWalk> {
    let inst = a.instance();
    let n = inst.n();
    if n < 2 {
        return Err(Error::SingleVertex);
    }
    let index = a.index().clone();
    let m = index.len();
    let total = a.total();
    let mut joint_counts = vec![0u128; m * m];
    let mut joint = DMatrix::zeros(m, m);
    let mut transition = DMatrix::zeros(m, m);
    let mut stationary = DVector::zeros(m);
    let pair_counts: Vec<u128> = (0..m).map(|idx| a.pair_count(idx)).collect();
    for row in 0..m {
        let (v, _) = index.pair(row);
        if pair_counts[row] == 0 {
            let (v, c) = index.pair(row);
            return Err(Error::ZeroMarginal { vertex: v, color: c });
        }
        stationary[row] = pair_counts[row] as f64 / (n as f64 * total as f64);
        let cond = a.row(row);
        for col in 0..m {
            let (w, _) = index.pair(col);
            if w == v {
                continue;
            }
            let jc = cond.counts[col];
            joint_counts[row * m + col] = jc;
            joint[(row, col)] = jc as f64 / total as f64;
            transition[(row, col)] = jc as f64 / ((n - 1) as f64 * pair_counts[row] as f64);
        }
    }
    Ok(PairwiseWalk {
        index,
        joint,
        transition,
        stationary,
        n,
        total,
        joint_counts,
        pair_counts,
    })
}

/// Iteration cap for the bounded eigen-solvers; running unbounded can stall
/// on the heavily rank-deficient matrices this crate produces.
const EIGEN_MAX_ITER: usize = 100_000;
const EIGEN_EPS: f64 = 1e-13;

fn symmetric_eigenvalues_sorted(m: DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(m, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNoConvergence(EIGEN_MAX_ITER))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).expect("symmetric eigenvalues are finite"));
    Ok(vals)
}

/// All eigenvalues of the walk, descending. Uses the similarity transform
/// `A = D^{1/2} P D^{-1/2}` with `D = diag(P(sigma_v = i))`, which is
/// symmetric because the joint weights are.
pub fn walk_eigenvalues(walk: &PairwiseWalk) -> Result<Vec<f64>> {
    let m = walk.dim();
    let total = walk.total() as f64;
    let mut sym = DMatrix::zeros(m, m);
    let scale = (walk.n_vertices() - 1) as f64;
    for row in 0..m {
        for col in 0..m {
            let jc = walk.joint_count(row, col);
            if jc != 0 {
                let d_r = walk.pair_count(row) as f64 / total;
                let d_c = walk.pair_count(col) as f64 / total;
                sym[(row, col)] = jc as f64 / total / (scale * (d_r * d_c).sqrt());
            }
        }
    }
    symmetric_eigenvalues_sorted(sym)
}

/// Second-largest eigenvalue of the pairwise walk.
pub fn second_eigenvalue_walk(walk: &PairwiseWalk) -> Result<f64> {
    let vals = walk_eigenvalues(walk)?;
    if vals.len() < 2 {
        return Err(Error::SingleVertex);
    }
    debug_assert!((vals[0] - 1.0).abs() < 1e-8, "top eigenvalue should be 1");
    Ok(vals[1])
}

/// Largest eigenvalue of the influence matrix via a general dense
/// (Schur-based) eigen-solve. The matrix is similar to a symmetric one, so
/// genuinely complex output signals a bug or a broken input; imaginary
/// parts above `imag_tol` are an error. Returns `(lambda_1, max |imag|)`.
pub fn top_eigenvalue_influence(m: &InfluenceMatrix, imag_tol: f64) -> Result<(f64, f64)> {
    influence_eigenvalues(m, imag_tol).map(|(vals, max_imag)| {
        let lambda1 = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lambda1, max_imag)
    })
}

/// Real parts of all eigenvalues of `M` (descending) plus the largest
/// imaginary magnitude seen, from a bounded Schur decomposition.
pub fn influence_eigenvalues(m: &InfluenceMatrix, imag_tol: f64) -> Result<(Vec<f64>, f64)> {
    if m.dim() == 0 {
        return Err(Error::SingleVertex);
    }
    let schur = nalgebra::linalg::Schur::try_new(m.entries.clone(), 1e-12, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNoConvergence(EIGEN_MAX_ITER))?;
    let eigs = schur.complex_eigenvalues();
    let max_imag = eigs.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > imag_tol {
        return Err(Error::ComplexEigenvalue(max_imag));
    }
    let mut vals: Vec<f64> = eigs.iter().map(|z| z.re).collect();
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok((vals, max_imag))
}

/// Independent cross-check for `lambda_1(M)`: power iteration on the shifted
/// matrix `M + sI` with `s` exceeding any eigenvalue magnitude, so the top
/// eigenvalue of the shift is `lambda_1(M) + s`.
pub fn top_eigenvalue_power(m: &InfluenceMatrix, iters: usize, tol: f64) -> Result<f64> {
    let dim = m.dim();
    if dim == 0 {
        return Err(Error::SingleVertex);
    }
    let shift = m.max_row_l1() + 1.0;
    let a = &m.entries;
    // Pseudo-random start: a structured start can sit in an invariant
    // subspace of a symmetric instance and converge to the wrong eigenvalue.
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut x = DVector::from_fn(dim, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / 9007199254740992.0 - 0.5
    });
    x /= x.norm();
    let mut prev = f64::NAN;
    let mut stable = 0usize;
    for _ in 0..iters {
        let mut y = a * &x;
        y += &x * shift;
        let norm = y.norm();
        if norm == 0.0 {
            return Ok(-shift);
        }
        x = y / norm;
        let rayleigh = (a * &x).dot(&x);
        if (rayleigh - prev).abs() <= tol {
            stable += 1;
            if stable >= 30 {
                return Ok(rayleigh);
            }
        } else {
            stable = 0;
        }
        prev = rayleigh;
    }
    Err(Error::EigenNoConvergence(iters))
}

/// One row of the local-expansion table.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionRow {
    pub s: usize,
    pub worst_lambda2: f64,
    /// Theoretical ceiling `min(C/(n-1-s), 1 - 2 q^{-4(n-s)})`, present when
    /// the instance satisfies the bound's hypotheses.
    pub bound: Option<f64>,
    pub partials_checked: usize,
    pub exhaustive: bool,
}

/// Output of the spectral verifiers.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub lambda2_walk: f64,
    #[serde(rename = "lambda1_M")]
    pub lambda1_m: f64,
    pub identity_residual: f64,
    pub eigen_method: String,
    pub max_imag_part: f64,
    pub null_residual_ones: f64,
    pub null_residual_indicators: f64,
    pub local_expansion_table: Vec<ExpansionRow>,
    /// Product `(1 - l_s)^{-1}` over the observed (clamped) expansion values.
    pub observed_product: Option<f64>,
    /// `L * n^2 * ln(4q)` with `L` the observed product.
    pub mixing_bound: Option<f64>,
    pub sampled_not_certified: bool,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl SpectralReport {
    fn empty() -> Self {
        SpectralReport {
            lambda2_walk: f64::NAN,
            lambda1_m: f64::NAN,
            identity_residual: f64::NAN,
            eigen_method: String::new(),
            max_imag_part: 0.0,
            null_residual_ones: 0.0,
            null_residual_indicators: 0.0,
            local_expansion_table: Vec::new(),
            observed_product: None,
            mixing_bound: None,
            sampled_not_certified: false,
            pass: false,
            notes: Vec::new(),
        }
    }
}

/// Checks the eigenvalue identity `lambda_2(walk) = lambda_1(M)/(n-1)` with
/// both sides computed independently, plus the null-space facts
/// `M 1 = 0` and `M (1/n * 1 - 1_v) = 0`.
pub fn verify_theorem8(inst: &ListColoringInstance, tol: f64) -> Result<SpectralReport> {
    if let Some(v) = inst.ergodicity_violation() {
        return Err(Error::NotErgodic(v));
    }
    if inst.n() < 2 {
        return Err(Error::SingleVertex);
    }
    let analysis = Analysis::with_all_rows(inst)?;
    let walk = build_pairwise_walk_from(&analysis)?;
    let lambda2 = second_eigenvalue_walk(&walk)?;
    let m = influence_matrix_from(&analysis);
    let (lambda1, max_imag) = top_eigenvalue_influence(&m, 1e-8)?;
    let residual = (lambda2 - lambda1 / (inst.n() - 1) as f64).abs();

    // null-space residuals
    let dim = m.dim();
    let ones = DVector::from_element(dim, 1.0);
    let null_ones = (&m.entries * &ones).amax();
    let mut null_ind = 0.0f64;
    for v in 0..inst.n() {
        let mut vec = DVector::from_element(dim, 1.0 / inst.n() as f64);
        for idx in m.index.vertex_range(v) {
            vec[idx] -= 1.0;
        }
        null_ind = null_ind.max((&m.entries * vec).amax());
    }

    let mut report = SpectralReport::empty();
    report.lambda2_walk = lambda2;
    report.lambda1_m = lambda1;
    report.identity_residual = residual;
    report.eigen_method = "symmetric-tridiagonal + schur".into();
    report.max_imag_part = max_imag;
    report.null_residual_ones = null_ones;
    report.null_residual_indicators = null_ind;
    report.pass = residual <= tol && null_ones <= 1e-12 && null_ind <= 1e-12;
    if !report.pass {
        report.notes.push(format!(
            "identity residual {residual:.3e}, null residuals {null_ones:.3e}/{null_ind:.3e}"
        ));
    }
    Ok(report)
}

/// `lambda_1(M) <= 64 (1/eps + 1)^2 delta / q`, with `lambda_1` from the
/// general eigen-solve (imaginary parts checked along the way).
pub fn verify_lambda1_bound(
    inst: &ListColoringInstance,
    epsilon: f64,
) -> Result<crate::report::CheckReport> {
    let _ = RegionParams::new(epsilon)?;
    let analysis = Analysis::with_all_rows(inst)?;
    let m = influence_matrix_from(&analysis);
    let (lambda1, max_imag) = top_eigenvalue_influence(&m, 1e-8)?;
    let delta = crate::influence::declared_delta(inst);
    let bound = 64.0 * (1.0 / epsilon + 1.0).powi(2) * delta as f64 / inst.q() as f64;
    Ok(
        crate::report::CheckReport::upper_bound("lambda1_influence", lambda1, bound, 1e-9)
            .with("delta", delta)
            .with("q", inst.q())
            .with("max_imag_part", max_imag),
    )
}

fn subsets_of_size(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(s);
    fn rec(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < s - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, s, cur, out);
            cur.pop();
        }
    }
    rec(0, n, s, &mut cur, &mut out);
    out
}

/// Enumerates every proper-and-extendable partial coloring on `subset`,
/// in lexicographic color order.
fn extendable_partials(
    inst: &ListColoringInstance,
    subset: &[usize],
) -> Result<Vec<PartialColoring>> {
    let mut out = Vec::new();
    let mut assignment: Vec<Color> = Vec::with_capacity(subset.len());
    fn rec(
        inst: &ListColoringInstance,
        subset: &[usize],
        assignment: &mut Vec<Color>,
        out: &mut Vec<PartialColoring>,
    ) -> Result<()> {
        if assignment.len() == subset.len() {
            let tau = PartialColoring::from_pairs(
                &subset
                    .iter()
                    .copied()
                    .zip(assignment.iter().copied())
                    .collect::<Vec<_>>(),
            );
            if oracle::is_extendable(inst, &tau)? {
                out.push(tau);
            }
            return Ok(());
        }
        let v = subset[assignment.len()];
        'colors: for &c in inst.list(v) {
            for (t, &w) in subset[..assignment.len()].iter().enumerate() {
                if assignment[t] == c && inst.graph().has_edge(v, w) {
                    continue 'colors;
                }
            }
            assignment.push(c);
            rec(inst, subset, assignment, out)?;
            assignment.pop();
        }
        Ok(())
    }
    rec(inst, subset, &mut assignment, &mut out)?;
    Ok(out)
}

/// `lambda_2` of the walk of the instance conditioned on `tau`.
fn conditioned_lambda2(inst: &ListColoringInstance, tau: &PartialColoring) -> Result<f64> {
    let (cond, _) = inst.condition(tau)?;
    let analysis = Analysis::with_all_rows(&cond)?;
    let walk = build_pairwise_walk_from(&analysis)?;
    second_eigenvalue_walk(&walk)
}

/// Sweeps partial colorings of every size `s = 0..n-2`, recording the worst
/// conditioned walk eigenvalue per size. Exhaustive when the per-size count
/// of proper partial assignments stays within `budget`; otherwise a seeded
/// sample of `budget` extendable partials per size is used and the report is
/// labeled sampled-not-certified. The observed profile is folded into the
/// spectral-gap product and the `L n^2 ln(4q)` mixing bound.
pub fn local_expansion_sweep(
    inst: &ListColoringInstance,
    epsilon: f64,
    budget: usize,
    seed: u64,
) -> Result<SpectralReport> {
    let params = RegionParams::new(epsilon)?;
    let n = inst.n();
    if n < 2 {
        return Err(Error::SingleVertex);
    }
    let q = inst.q();
    let delta = crate::influence::declared_delta(inst);
    // a (delta, q) pair outside the definition's range simply means the
    // expansion ceilings do not apply
    let is_dq = matches!(
        crate::instance::is_delta_q_instance(inst, delta, q),
        Ok(true)
    );
    let tri = inst.graph().is_triangle_free();
    let bound_applicable = is_dq && tri && params.contains(delta, q);
    let big_c = 64.0 * (1.0 / epsilon + 1.0).powi(2) * delta as f64 / q as f64;

    let mut report = SpectralReport::empty();
    if !bound_applicable {
        report.notes.push(format!(
            "expansion bounds not applicable: delta_q={is_dq}, triangle_free={tri}, in_region={}",
            params.contains(delta, q)
        ));
    }

    let mut sampled_anywhere = false;
    for s in 0..=(n - 2) {
        let subsets = subsets_of_size(n, s);
        // upper bound on the number of proper partial assignments at this size
        let mut est: f64 = 0.0;
        for sub in &subsets {
            est += sub
                .iter()
                .map(|&v| inst.list(v).len() as f64)
                .product::<f64>();
        }
        let exhaustive = est <= budget as f64;
        let taus: Vec<PartialColoring> = if exhaustive {
            let mut taus = Vec::new();
            for sub in &subsets {
                taus.extend(extendable_partials(inst, sub)?);
            }
            taus
        } else {
            sampled_anywhere = true;
            sample_partials(inst, &subsets, s, budget, seed ^ (s as u64).wrapping_mul(0x9e37))?
        };
        if taus.is_empty() {
            return Err(Error::Unsatisfiable);
        }
        let lambdas: Vec<Result<f64>> = taus
            .par_iter()
            .map(|tau| conditioned_lambda2(inst, tau))
            .collect();
        let mut worst = f64::NEG_INFINITY;
        for l in lambdas {
            worst = worst.max(l?);
        }
        let bound = if bound_applicable {
            let spectral_part = big_c / (n - 1 - s) as f64;
            let conductance_part = 1.0 - 2.0 * (q as f64).powi(-4 * (n - s) as i32);
            Some(spectral_part.min(conductance_part))
        } else {
            None
        };
        report.local_expansion_table.push(ExpansionRow {
            s,
            worst_lambda2: worst,
            bound,
            partials_checked: taus.len(),
            exhaustive,
        });
    }

    // fold the observed profile into Theorem-6 form
    let mut product = 1.0f64;
    let mut degenerate = false;
    for row in &report.local_expansion_table {
        let ls = row.worst_lambda2.max(0.0);
        if ls >= 1.0 - 1e-12 {
            degenerate = true;
            break;
        }
        product *= 1.0 / (1.0 - ls);
    }
    if degenerate {
        report
            .notes
            .push("observed local expansion reaches 1; product bound degenerate".into());
    } else {
        report.observed_product = Some(product);
        report.mixing_bound = Some(product * (n as f64).powi(2) * (4.0 * q as f64).ln());
    }
    report.sampled_not_certified = sampled_anywhere;
    if sampled_anywhere {
        report
            .notes
            .push("sampled, not certified: per-size partials exceeded the budget".into());
    }
    report.pass = !degenerate
        && report.local_expansion_table.iter().all(|row| match row.bound {
            Some(b) => row.worst_lambda2 <= b + 1e-9,
            None => true,
        });
    Ok(report)
}

/// Seeded sampling of extendable partials: uniform subset, then per-vertex
/// uniform list colors filtered by extendability; falls back to restricting
/// an exactly-uniform full coloring, which is always extendable.
fn sample_partials(
    inst: &ListColoringInstance,
    subsets: &[Vec<usize>],
    s: usize,
    budget: usize,
    seed: u64,
) -> Result<Vec<PartialColoring>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(budget);
    let mut tries_left = 200usize * budget;
    while out.len() < budget {
        let sub = &subsets[(rng.next_u64() % subsets.len() as u64) as usize];
        let mut pairs = Vec::with_capacity(s);
        for &v in sub {
            let list = inst.list(v);
            let c = list[(rng.next_u64() % list.len() as u64) as usize];
            pairs.push((v, c));
        }
        let tau = PartialColoring::from_pairs(&pairs);
        if oracle::is_extendable(inst, &tau)? {
            out.push(tau);
        } else if tries_left == 0 {
            let full = oracle::sample_uniform(inst, &mut rng)?;
            let pairs: Vec<(usize, Color)> = sub.iter().map(|&v| (v, full[v])).collect();
            out.push(PartialColoring::from_pairs(&pairs));
        } else {
            tries_left -= 1;
        }
    }
    Ok(out)
}

/// Exact Glauber transition matrix over the enumerated state space.
///
/// States are proper colorings listed lexicographically; the chain picks a
/// vertex uniformly and resamples its color uniformly from the currently
/// available set (which includes the current color, so the chain is not
/// made lazy on top).
#[derive(Debug, Clone)]
pub struct GlauberMatrix {
    pub states: Vec<Vec<Color>>,
    rows: Vec<Vec<(usize, f64)>>,
    n: usize,
    max_list: usize,
}

impl GlauberMatrix {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn row(&self, idx: usize) -> &[(usize, f64)] {
        &self.rows[idx]
    }

    /// Dense copy of the transition matrix.
    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.num_states();
        let mut out = DMatrix::zeros(m, m);
        for (a, row) in self.rows.iter().enumerate() {
            for &(b, p) in row {
                out[(a, b)] += p;
            }
        }
        out
    }

    /// Sparse row application `y = x P`.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (a, row) in self.rows.iter().enumerate() {
            let xa = x[a];
            if xa != 0.0 {
                for &(b, p) in row {
                    y[b] += xa * p;
                }
            }
        }
    }

    /// Distribution after `t` steps from a point mass at `start`.
    pub fn distribution_after(&self, start: usize, t: usize) -> Vec<f64> {
        let m = self.num_states();
        let mut x = vec![0.0; m];
        x[start] = 1.0;
        let mut y = vec![0.0; m];
        for _ in 0..t {
            self.apply(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
        }
        x
    }

    /// Total variation distance from uniform after `t` steps from `start`.
    pub fn tv_from_start(&self, start: usize, t: usize) -> f64 {
        let m = self.num_states() as f64;
        self.distribution_after(start, t)
            .iter()
            .map(|p| (p - 1.0 / m).abs())
            .sum::<f64>()
            / 2.0
    }

    /// Worst-start total variation distance after `t` steps.
    pub fn worst_tv(&self, t: usize) -> f64 {
        (0..self.num_states())
            .map(|s| self.tv_from_start(s, t))
            .fold(0.0, f64::max)
    }

    /// True iff the chain graph is connected (it is whenever every list has
    /// at least deg + 2 colors).
    pub fn is_irreducible(&self) -> bool {
        let m = self.num_states();
        if m == 0 {
            return false;
        }
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(a) = stack.pop() {
            for &(b, p) in &self.rows[a] {
                if p > 0.0 && !seen[b] {
                    seen[b] = true;
                    count += 1;
                    stack.push(b);
                }
            }
        }
        count == m
    }
}

/// Builds the exact Glauber matrix with the default state cap.
pub fn glauber_matrix(inst: &ListColoringInstance) -> Result<GlauberMatrix> {
    glauber_matrix_capped(inst, DEFAULT_OMEGA_CAP)
}

pub fn glauber_matrix_capped(inst: &ListColoringInstance, cap: usize) -> Result<GlauberMatrix> {
    if let Some(v) = inst.ergodicity_violation() {
        return Err(Error::NotErgodic(v));
    }
    let states = enumerate_colorings(inst, cap)?;
    let n = inst.n();
    let mut lookup = std::collections::HashMap::with_capacity(states.len());
    for (idx, s) in states.iter().enumerate() {
        lookup.insert(s.clone(), idx);
    }
    let rows: Vec<Vec<(usize, f64)>> = states
        .par_iter()
        .map(|state| {
            let mut row: Vec<(usize, f64)> = Vec::new();
            let mut diag = 0.0;
            for v in 0..n {
                let mut avail: Vec<Color> = Vec::new();
                'colors: for &c in inst.list(v) {
                    for &w in inst.graph().neighbors(v) {
                        if state[w] == c {
                            continue 'colors;
                        }
                    }
                    avail.push(c);
                }
                let p = 1.0 / (n as f64 * avail.len() as f64);
                for c in avail {
                    if c == state[v] {
                        diag += p;
                    } else {
                        let mut next = state.clone();
                        next[v] = c;
                        let b = lookup[&next];
                        row.push((b, p));
                    }
                }
            }
            row.push((lookup[state], diag));
            row.sort_by_key(|&(b, _)| b);
            row
        })
        .collect();
    Ok(GlauberMatrix {
        states,
        rows,
        n,
        max_list: inst.max_list_len(),
    })
}

/// Spectral gap of the exact Glauber chain plus the single-site mixing
/// bound `n ln(4Q) / (1 - lambda_2)`.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub lambda2: f64,
    pub gap: f64,
    pub mixing_bound: f64,
    pub num_states: usize,
    pub eigen_method: String,
}

pub fn spectral_gap(glauber: &GlauberMatrix) -> Result<GapReport> {
    let m = glauber.num_states();
    if m == 0 {
        return Err(Error::Unsatisfiable);
    }
    let (lambda2, method) = if m == 1 {
        (0.0, "trivial".to_string())
    } else if m <= DENSE_EIGEN_LIMIT {
        let dense = glauber.dense();
        debug_assert!({
            let mut sym = true;
            'outer: for a in 0..m {
                for b in (a + 1)..m {
                    if (dense[(a, b)] - dense[(b, a)]).abs() > 1e-13 {
                        sym = false;
                        break 'outer;
                    }
                }
            }
            sym
        });
        let vals = symmetric_eigenvalues_sorted(dense)?;
        (vals[1], "dense-symmetric".to_string())
    } else {
        (power_iteration_lambda2(glauber)?, "power-iteration".to_string())
    };
    let gap = 1.0 - lambda2;
    let n = glauber.n as f64;
    let q_max = glauber.max_list as f64;
    Ok(GapReport {
        lambda2,
        gap,
        mixing_bound: n * (4.0 * q_max).ln() / gap,
        num_states: m,
        eigen_method: method,
    })
}

/// Deflated power iteration for `lambda_2` of the doubly stochastic Glauber
/// matrix: iterate `(I + P)/2` on the complement of the constant vector.
fn power_iteration_lambda2(glauber: &GlauberMatrix) -> Result<f64> {
    let m = glauber.num_states();
    let mut x: Vec<f64> = (0..m)
        .map(|i| ((i as f64 * 0.7548776662466927).fract()) - 0.5)
        .collect();
    project_out_constant(&mut x);
    normalize(&mut x);
    let mut y = vec![0.0; m];
    let mut prev = f64::NAN;
    let max_iters = 200_000;
    for it in 0..max_iters {
        glauber.apply(&x, &mut y);
        for i in 0..m {
            y[i] = 0.5 * (y[i] + x[i]);
        }
        project_out_constant(&mut y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(-1.0);
        }
        for i in 0..m {
            x[i] = y[i] / norm;
        }
        // Rayleigh quotient of (I+P)/2 maps back to lambda = 2 mu - 1
        glauber.apply(&x, &mut y);
        let mut mu = 0.0;
        for i in 0..m {
            mu += x[i] * 0.5 * (y[i] + x[i]);
        }
        let lambda = 2.0 * mu - 1.0;
        if it > 50 && (lambda - prev).abs() <= 1e-13 {
            return Ok(lambda);
        }
        prev = lambda;
    }
    Err(Error::EigenNoConvergence(max_iters))
}

fn project_out_constant(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// The headline mixing-time bound reconstructed from its proof constants.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Bound {
    pub epsilon: f64,
    pub alpha: f64,
    /// `C = 64 (1/eps + 1)^2 delta / q`.
    pub c_delta_q: f64,
    /// `C_alpha = (64/alpha)(1/eps + 1)^2`.
    pub c_alpha: f64,
    /// `k_0 = ceil(2C)`.
    pub k0: u64,
    /// Exponent of the intermediate product bound `L <= n^{74 C_alpha^2}`.
    pub l_exponent: f64,
    /// Mixing exponent `c = 80 C_alpha^2`.
    pub exponent: f64,
    /// `n^c` (infinite when it overflows f64).
    pub mixing_bound: f64,
    pub log10_mixing_bound: f64,
    /// The proof assumes `alpha < 2`; larger alpha defers to older results.
    pub assumes_alpha_lt_2: bool,
    pub satisfies_q_lower: bool,
    pub satisfies_q_le_2delta: bool,
    pub notes: Vec<String>,
}

/// Computes `c = 80 C_alpha^2` and friends for `q`-colorings of an
/// `n`-vertex graph of max degree `delta`, flagging every proof assumption
/// that the supplied parameters violate.
pub fn mixing_bound_theorem1(
    n: usize,
    delta: u32,
    q: u32,
    epsilon: f64,
) -> Result<Theorem1Bound> {
    if n == 0 || delta == 0 || q == 0 {
        return Err(Error::BadParams("n, delta, q must be positive".into()));
    }
    let params = RegionParams::new(epsilon)?;
    let alpha = params.alpha;
    let inv = 1.0 / epsilon + 1.0;
    let c_delta_q = 64.0 * inv * inv * delta as f64 / q as f64;
    let c_alpha = 64.0 / alpha * inv * inv;
    let k0 = (2.0 * c_delta_q).ceil() as u64;
    let exponent = 80.0 * c_alpha * c_alpha;
    let l_exponent = 74.0 * c_alpha * c_alpha;
    let log10 = exponent * (n as f64).log10();
    let mut notes = Vec::new();
    let assumes_alpha_lt_2 = alpha < 2.0;
    if !assumes_alpha_lt_2 {
        notes.push(format!(
            "alpha = {alpha:.6} >= 2: the stated exponent defers to earlier coupling results"
        ));
    }
    let satisfies_q_lower = q as f64 >= alpha * delta as f64 + 1.0;
    if !satisfies_q_lower {
        notes.push(format!(
            "q = {q} below the hypothesis alpha*delta + 1 = {:.3}",
            alpha * delta as f64 + 1.0
        ));
    }
    let satisfies_q_le_2delta = q as f64 <= 2.0 * delta as f64;
    if !satisfies_q_le_2delta {
        notes.push("q > 2*delta: the proof handles this range by older results".into());
    }
    Ok(Theorem1Bound {
        epsilon,
        alpha,
        c_delta_q,
        c_alpha,
        k0,
        l_exponent,
        exponent,
        mixing_bound: (n as f64).powf(exponent),
        log10_mixing_bound: log10,
        assumes_alpha_lt_2,
        satisfies_q_lower,
        satisfies_q_le_2delta,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::influence::influence_matrix;

    fn star(delta: usize, q: u32) -> ListColoringInstance {
        let edges: Vec<(usize, usize)> = (1..=delta).map(|i| (0, i)).collect();
        let g = Graph::from_edges(delta + 1, &edges).unwrap();
        ListColoringInstance::full_palette(g, q).unwrap()
    }

    fn cycle(n: usize, q: u32) -> ListColoringInstance {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        ListColoringInstance::full_palette(g, q).unwrap()
    }

    #[test]
    fn walk_rows_are_stochastic_and_reversible() {
        let inst = star(3, 7);
        let walk = build_pairwise_walk(&inst).unwrap();
        for row in 0..walk.dim() {
            let sum: f64 = walk.transition.row(row).iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "row {row}: {sum}");
        }
        assert_eq!(walk.reversibility_violation(), None);
        let st: f64 = walk.stationary.iter().sum();
        assert!((st - 1.0).abs() <= 1e-12);
        assert!(walk.stationary.iter().all(|&p| p > 0.0));
    }

    #[test]
    fn two_isolated_vertices_walk() {
        let inst =
            ListColoringInstance::build(2, &[], vec![vec![1, 2], vec![1, 2]], 2).unwrap();
        let walk = build_pairwise_walk(&inst).unwrap();
        // n - 1 = 1, so the transition to the other vertex is its marginal 1/2
        let r = walk.index.index_of(0, 1).unwrap();
        for k in 1..=2 {
            let c = walk.index.index_of(1, k).unwrap();
            assert!((walk.transition[(r, c)] - 0.5).abs() <= 1e-15);
        }
    }

    #[test]
    fn forced_transition_on_tight_edge() {
        let inst =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1, 2], vec![1, 2]], 2).unwrap();
        let walk = build_pairwise_walk(&inst).unwrap();
        let r = walk.index.index_of(0, 1).unwrap();
        let c = walk.index.index_of(1, 2).unwrap();
        assert!((walk.transition[(r, c)] - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn single_vertex_walk_is_rejected() {
        let inst = ListColoringInstance::build(1, &[], vec![vec![1, 2]], 2).unwrap();
        assert!(matches!(
            build_pairwise_walk(&inst),
            Err(Error::SingleVertex)
        ));
    }

    #[test]
    fn walk_has_negative_eigenvalue_with_multiplicity() {
        let inst = cycle(4, 5);
        let walk = build_pairwise_walk(&inst).unwrap();
        let vals = walk_eigenvalues(&walk).unwrap();
        let n = inst.n();
        let target = -1.0 / (n as f64 - 1.0);
        let mult = vals.iter().filter(|&&l| (l - target).abs() <= 1e-8).count();
        assert!(mult >= n - 1, "multiplicity {mult} of {target}");
    }

    #[test]
    fn theorem8_identity_on_small_instances() {
        for inst in [
            cycle(4, 5),
            star(4, 7),
            ListColoringInstance::build(2, &[], vec![vec![1, 2], vec![1, 2, 3]], 3).unwrap(),
        ] {
            let rep = verify_theorem8(&inst, 1e-8).unwrap();
            assert!(rep.pass, "{rep:?}");
            assert!(rep.identity_residual <= 1e-8);
            assert!(rep.max_imag_part <= 1e-8);
        }
    }

    #[test]
    fn edgeless_graph_identity_is_trivial() {
        let inst = ListColoringInstance::full_palette(Graph::edgeless(3), 3).unwrap();
        let rep = verify_theorem8(&inst, 1e-8).unwrap();
        assert!(rep.pass);
        assert!(rep.lambda1_m.abs() <= 1e-10);
        assert!(rep.lambda2_walk.abs() <= 1e-10);
    }

    #[test]
    fn power_iteration_agrees_with_schur() {
        for inst in [cycle(5, 4), star(3, 6)] {
            let m = influence_matrix(&inst).unwrap();
            let (l1, _) = top_eigenvalue_influence(&m, 1e-8).unwrap();
            let l1_power = top_eigenvalue_power(&m, 100_000, 1e-13).unwrap();
            assert!((l1 - l1_power).abs() <= 1e-6, "{l1} vs {l1_power}");
        }
    }

    #[test]
    fn theorem8_requires_ergodic_lists() {
        // K2 with 2 colors has |L| = deg + 1
        let inst =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1, 2], vec![1, 2]], 2).unwrap();
        assert!(matches!(
            verify_theorem8(&inst, 1e-8),
            Err(Error::NotErgodic(_))
        ));
    }

    #[test]
    fn glauber_matrix_single_vertex() {
        let inst = ListColoringInstance::build(1, &[], vec![vec![1, 2, 3]], 3).unwrap();
        let g = glauber_matrix(&inst).unwrap();
        assert_eq!(g.num_states(), 3);
        let rep = spectral_gap(&g).unwrap();
        assert!((rep.lambda2 - 0.0).abs() <= 1e-12);
        assert!((rep.gap - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn glauber_matrix_edge_three_colors() {
        let inst =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1, 2, 3], vec![1, 2, 3]], 3)
                .unwrap();
        let g = glauber_matrix(&inst).unwrap();
        assert_eq!(g.num_states(), 6);
        assert!(g.is_irreducible());
        let dense = g.dense();
        // symmetric and doubly stochastic
        for a in 0..6 {
            let row: f64 = dense.row(a).iter().sum();
            let col: f64 = dense.column(a).iter().sum();
            assert!((row - 1.0).abs() <= 1e-12 && (col - 1.0).abs() <= 1e-12);
            for b in 0..6 {
                assert!((dense[(a, b)] - dense[(b, a)]).abs() <= 1e-13);
            }
        }
        let rep = spectral_gap(&g).unwrap();
        assert!(rep.gap > 0.0 && rep.gap <= 1.0);
    }

    #[test]
    fn power_iteration_matches_dense_gap() {
        let inst = cycle(4, 4);
        let g = glauber_matrix(&inst).unwrap();
        let dense_rep = spectral_gap(&g).unwrap();
        let power = power_iteration_lambda2(&g).unwrap();
        assert!(
            (dense_rep.lambda2 - power).abs() <= 1e-9,
            "{} vs {power}",
            dense_rep.lambda2
        );
    }

    #[test]
    fn sweep_on_small_cycle() {
        let inst = cycle(4, 5);
        let rep = local_expansion_sweep(&inst, 0.1, 1_000_000, 7).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(!rep.sampled_not_certified);
        assert_eq!(rep.local_expansion_table.len(), 3); // s = 0, 1, 2
        assert_eq!(rep.local_expansion_table[0].partials_checked, 1);

        // Theorem-6 form: exact Glauber gap >= (1/n) * prod(1 - l_s)
        let glauber = glauber_matrix(&inst).unwrap();
        let gap = spectral_gap(&glauber).unwrap().gap;
        let product: f64 = rep
            .local_expansion_table
            .iter()
            .map(|row| 1.0 - row.worst_lambda2.max(0.0))
            .product();
        assert!(
            gap >= product / inst.n() as f64 - 1e-9,
            "gap {gap} vs bound {}",
            product / inst.n() as f64
        );
    }

    #[test]
    fn sweep_sampling_path() {
        // budget of 2 partials per size forces sampling on a 5-cycle
        let inst = cycle(5, 4);
        let rep = local_expansion_sweep(&inst, 0.1, 2, 3).unwrap();
        assert!(rep.sampled_not_certified);
        assert!(rep
            .notes
            .iter()
            .any(|n| n.contains("sampled, not certified")));
    }

    #[test]
    fn conditioned_two_free_vertices_identity() {
        // s = n - 2 leaves two free vertices; lambda2 of the conditioned walk
        // equals lambda1 of its influence matrix (n - s - 1 = 1)
        let inst = cycle(4, 5);
        let tau = PartialColoring::from_pairs(&[(0, 1), (1, 2)]);
        let (cond, _) = inst.condition(&tau).unwrap();
        let l2 = conditioned_lambda2(&inst, &tau).unwrap();
        let m = influence_matrix(&cond).unwrap();
        let (l1, _) = top_eigenvalue_influence(&m, 1e-8).unwrap();
        assert!((l2 - l1).abs() <= 1e-8);
    }

    #[test]
    fn theorem1_constants() {
        let b = mixing_bound_theorem1(100, 3, 100, 0.05).unwrap();
        let inv = 1.0 / 0.05 + 1.0;
        assert!((b.c_alpha - 64.0 / b.alpha * inv * inv).abs() < 1e-9);
        assert!((b.exponent - 80.0 * b.c_alpha * b.c_alpha).abs() < 1e-6);
        assert_eq!(b.k0, (2.0 * b.c_delta_q).ceil() as u64);
        assert!(b.assumes_alpha_lt_2);

        // epsilon = 1 pushes alpha to 2 alpha* > 2: flagged, not an error
        let b = mixing_bound_theorem1(100, 3, 100, 1.0).unwrap();
        assert!(!b.assumes_alpha_lt_2);
        assert!(!b.notes.is_empty());

        // larger epsilon within the alpha < 2 branch shrinks the exponent
        let c1 = mixing_bound_theorem1(50, 3, 50, 0.02).unwrap().exponent;
        let c2 = mixing_bound_theorem1(50, 3, 50, 0.08).unwrap().exponent;
        assert!(c2 < c1);
    }

    #[test]
    fn glauber_gate_rejects_thin_lists() {
        let inst = cycle(3, 3);
        assert!(matches!(glauber_matrix(&inst), Err(Error::NotErgodic(_))));
    }

    #[test]
    fn omega_cap_enforced() {
        let inst = cycle(5, 5);
        assert!(matches!(
            glauber_matrix_capped(&inst, 10),
            Err(Error::TooLarge(_))
        ));
    }
}
