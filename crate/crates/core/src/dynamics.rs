//! Simulated single-site Glauber dynamics.
//!
//! One step picks a vertex uniformly at random and resamples its color
//! uniformly from the colors of its list not present in the neighborhood
//! (the current color is always among them, so the walk never leaves the
//! proper colorings and needs no added laziness).
//!
//! Randomness contract: all chains run on `ChaCha8Rng` seeded through
//! [`master_rng`]; independent streams for chain `c` come from
//! `set_stream(c)` on the same seed. Uniform choices among `m` items map a
//! 53-bit uniform `u` in `[0, 1)` to `floor(u * m)`. Identical
//! `(instance, seed, steps)` therefore reproduce traces bit for bit.
//!
//! For palettes up to 128 colors the available set is a `u128` mask and a
//! step costs O(deg); larger palettes fall back to a counting array.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Color, Error, Result};
use crate::instance::ListColoringInstance;
use crate::oracle;

/// Master generator for a run.
pub fn master_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from the same master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `floor(u * m)` with `u` a 53-bit uniform in `[0, 1)`.
#[inline]
fn uniform_index<R: RngCore>(rng: &mut R, m: usize) -> usize {
    let u = (rng.next_u64() >> 11) as f64 / 9007199254740992.0;
    ((u * m as f64) as usize).min(m - 1)
}

/// A proper coloring being evolved by the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainState {
    pub colors: Vec<Color>,
}

/// Greedy proper coloring in vertex order, taking the smallest available
/// color. Succeeds whenever `|L(v)| >= deg(v) + 1`.
pub fn greedy_state(inst: &ListColoringInstance) -> Result<ChainState> {
    greedy_by(inst, false)
}

/// Greedy proper coloring taking the largest available color; the second
/// endpoint for coupling experiments.
pub fn greedy_state_largest(inst: &ListColoringInstance) -> Result<ChainState> {
    greedy_by(inst, true)
}

fn greedy_by(inst: &ListColoringInstance, largest: bool) -> Result<ChainState> {
    let n = inst.n();
    let mut colors = vec![0 as Color; n];
    for v in 0..n {
        let taken: Vec<Color> = inst
            .graph()
            .neighbors(v)
            .iter()
            .filter(|&&w| w < v)
            .map(|&w| colors[w])
            .collect();
        let pick = if largest {
            inst.list(v).iter().rev().find(|c| !taken.contains(c))
        } else {
            inst.list(v).iter().find(|c| !taken.contains(c))
        };
        match pick {
            Some(&c) => colors[v] = c,
            None => return Err(Error::GreedyStuck(v)),
        }
    }
    Ok(ChainState { colors })
}

/// Initial state: deterministic greedy, or a seeded random available-color
/// greedy when `seed` is given. If greedy gets stuck (possible only when
/// some list is smaller than deg + 1) and the instance is small enough to
/// enumerate, falls back to an exact uniform sample.
pub fn initial_state(inst: &ListColoringInstance, seed: Option<u64>) -> Result<ChainState> {
    let attempt = match seed {
        None => greedy_state(inst),
        Some(s) => {
            let mut rng = master_rng(s);
            random_greedy(inst, &mut rng)
        }
    };
    match attempt {
        Ok(state) => Ok(state),
        Err(Error::GreedyStuck(v)) => {
            let mut rng = master_rng(seed.unwrap_or(0));
            match oracle::sample_uniform(inst, &mut rng) {
                Ok(colors) => Ok(ChainState { colors }),
                Err(_) => Err(Error::GreedyStuck(v)),
            }
        }
        Err(e) => Err(e),
    }
}

fn random_greedy<R: RngCore>(inst: &ListColoringInstance, rng: &mut R) -> Result<ChainState> {
    let n = inst.n();
    let mut colors = vec![0 as Color; n];
    for v in 0..n {
        let taken: Vec<Color> = inst
            .graph()
            .neighbors(v)
            .iter()
            .filter(|&&w| w < v)
            .map(|&w| colors[w])
            .collect();
        let avail: Vec<Color> = inst
            .list(v)
            .iter()
            .copied()
            .filter(|c| !taken.contains(c))
            .collect();
        if avail.is_empty() {
            return Err(Error::GreedyStuck(v));
        }
        colors[v] = avail[uniform_index(rng, avail.len())];
    }
    Ok(ChainState { colors })
}

/// One Glauber update on a bare state. Convenience wrapper around the
/// sampler machinery for callers that hold only a `ChainState`.
pub fn glauber_step<R: RngCore>(
    state: &mut ChainState,
    inst: &ListColoringInstance,
    rng: &mut R,
) {
    let v = uniform_index(rng, inst.n());
    let mut avail: Vec<Color> = Vec::with_capacity(inst.list(v).len());
    'colors: for &c in inst.list(v) {
        for &w in inst.graph().neighbors(v) {
            if state.colors[w] == c {
                continue 'colors;
            }
        }
        avail.push(c);
    }
    let c = avail[uniform_index(rng, avail.len())];
    state.colors[v] = c;
    debug_assert!(inst.is_proper(&state.colors));
}

/// Flat adjacency plus color masks for the hot loop.
pub struct Sampler<'a> {
    inst: &'a ListColoringInstance,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    colors: Vec<Color>,
    repr: Repr,
}

enum Repr {
    /// `q <= 128`: per-vertex list masks.
    Mask { list_masks: Vec<u128> },
    /// wide palettes: timestamped occupancy scratch
    Array { stamp: Vec<u64>, tick: u64 },
}

impl<'a> Sampler<'a> {
    pub fn new(inst: &'a ListColoringInstance, start: ChainState) -> Result<Self> {
        if !inst.is_proper(&start.colors) {
            return Err(Error::BadParams(
                "sampler start state is not a proper coloring".into(),
            ));
        }
        let n = inst.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        for v in 0..n {
            offsets.push(neighbors.len() as u32);
            neighbors.extend(inst.graph().neighbors(v).iter().map(|&w| w as u32));
        }
        offsets.push(neighbors.len() as u32);
        let repr = if inst.q() <= 128 {
            Repr::Mask {
                list_masks: (0..n)
                    .map(|v| {
                        inst.list(v)
                            .iter()
                            .map(|&c| 1u128 << (c - 1))
                            .fold(0u128, |a, b| a | b)
                    })
                    .collect(),
            }
        } else {
            Repr::Array {
                stamp: vec![0; inst.q() as usize + 1],
                tick: 0,
            }
        };
        Ok(Sampler {
            inst,
            offsets,
            neighbors,
            colors: start.colors,
            repr,
        })
    }

    pub fn from_greedy(inst: &'a ListColoringInstance) -> Result<Self> {
        let start = greedy_state(inst)?;
        Self::new(inst, start)
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn state(&self) -> ChainState {
        ChainState {
            colors: self.colors.clone(),
        }
    }

    /// One update; see the module docs for the randomness contract.
    #[inline]
    pub fn step<R: RngCore>(&mut self, rng: &mut R) {
        let n = self.colors.len();
        let v = uniform_index(rng, n);
        self.resample(v, rng);
        debug_assert!(self.inst.is_proper(&self.colors));
    }

    /// `steps` updates without per-step assertions; the chain stays proper
    /// by construction since resampled colors come from the available set.
    pub fn step_many<R: RngCore>(&mut self, rng: &mut R, steps: u64) {
        let n = self.colors.len();
        for _ in 0..steps {
            let v = uniform_index(rng, n);
            self.resample(v, rng);
        }
    }

    #[inline]
    fn resample<R: RngCore>(&mut self, v: usize, rng: &mut R) {
        match &mut self.repr {
            Repr::Mask { list_masks } => {
                let mut occ = 0u128;
                let lo = self.offsets[v] as usize;
                let hi = self.offsets[v + 1] as usize;
                for &w in &self.neighbors[lo..hi] {
                    occ |= 1u128 << (self.colors[w as usize] - 1);
                }
                let avail = list_masks[v] & !occ;
                let m = avail.count_ones() as usize;
                let j = uniform_index(rng, m);
                self.colors[v] = select_bit(avail, j) + 1;
            }
            Repr::Array { stamp, tick } => {
                *tick += 1;
                let lo = self.offsets[v] as usize;
                let hi = self.offsets[v + 1] as usize;
                for &w in &self.neighbors[lo..hi] {
                    stamp[self.colors[w as usize] as usize] = *tick;
                }
                let list = self.inst.list(v);
                let mut m = 0usize;
                for &c in list {
                    if stamp[c as usize] != *tick {
                        m += 1;
                    }
                }
                let j = uniform_index(rng, m);
                let mut seen = 0usize;
                for &c in list {
                    if stamp[c as usize] != *tick {
                        if seen == j {
                            self.colors[v] = c;
                            break;
                        }
                        seen += 1;
                    }
                }
            }
        }
    }
}

/// Index of the `j`-th set bit (ascending), `j < popcount`.
#[inline]
fn select_bit(mask: u128, j: usize) -> u32 {
    let mut m = mask;
    for _ in 0..j {
        m &= m - 1;
    }
    m.trailing_zeros()
}

/// Snapshot statistics along a single trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStat {
    pub t: u64,
    /// Hamming distance to the initial state.
    pub hamming: usize,
    /// Occurrences of each color `1..=q` in the current coloring.
    pub color_counts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainTrace {
    pub seed: u64,
    pub stride: u64,
    pub steps: u64,
    pub stats: Vec<TraceStat>,
}

/// Runs one chain for `steps` updates from the deterministic greedy start,
/// recording statistics every `stride` steps (including t = 0).
pub fn trace(
    inst: &ListColoringInstance,
    seed: u64,
    steps: u64,
    stride: u64,
) -> Result<ChainTrace> {
    if stride == 0 {
        return Err(Error::BadParams("stride must be positive".into()));
    }
    let start = greedy_state(inst)?;
    let reference = start.colors.clone();
    let mut sampler = Sampler::new(inst, start)?;
    let mut rng = stream_rng(seed, 0);
    let mut stats = Vec::new();
    let mut t = 0u64;
    let snap = |t: u64, colors: &[Color]| TraceStat {
        t,
        hamming: colors
            .iter()
            .zip(&reference)
            .filter(|(a, b)| a != b)
            .count(),
        color_counts: {
            let mut counts = vec![0usize; inst.q() as usize];
            for &c in colors {
                counts[(c - 1) as usize] += 1;
            }
            counts
        },
    };
    stats.push(snap(0, sampler.colors()));
    while t < steps {
        let chunk = stride.min(steps - t);
        sampler.step_many(&mut rng, chunk);
        t += chunk;
        stats.push(snap(t, sampler.colors()));
    }
    Ok(ChainTrace {
        seed,
        stride,
        steps,
        stats,
    })
}

/// Total-variation estimate against the exact uniform distribution.
#[derive(Debug, Clone, Serialize)]
pub struct TvEstimate {
    pub tv: f64,
    /// Plug-in bias ceiling `|Omega| / (2 * samples)`.
    pub bias_bound: f64,
    pub num_states: usize,
    pub samples: usize,
    pub chains: usize,
    pub steps: u64,
}

/// Runs `chains` independent chains for `steps` updates from the greedy
/// start and compares the histogram of final states to uniform. The
/// reported distance is the plug-in estimate; its sampling bias is bounded
/// by `|Omega| / (2 * chains)` and reported alongside.
pub fn estimate_tv(
    inst: &ListColoringInstance,
    steps: u64,
    chains: usize,
    seed: u64,
    omega_cap: usize,
) -> Result<TvEstimate> {
    let states = oracle::enumerate_colorings(inst, omega_cap)?;
    if states.is_empty() {
        return Err(Error::Unsatisfiable);
    }
    let lookup: std::collections::HashMap<&[Color], usize> = states
        .iter()
        .enumerate()
        .map(|(idx, s)| (s.as_slice(), idx))
        .collect();
    let start = greedy_state(inst)?;
    let num_threads = rayon::current_num_threads().max(1);
    let chunk = chains.div_ceil(num_threads);
    let histograms: Vec<Vec<u64>> = (0..num_threads)
        .into_par_iter()
        .map(|t| {
            let lo = t * chunk;
            let hi = ((t + 1) * chunk).min(chains);
            let mut hist = vec![0u64; states.len()];
            for c in lo..hi {
                let mut sampler =
                    Sampler::new(inst, start.clone()).expect("start state is proper");
                let mut rng = stream_rng(seed, c as u64);
                sampler.step_many(&mut rng, steps);
                hist[lookup[sampler.colors()]] += 1;
            }
            hist
        })
        .collect();
    let mut hist = vec![0u64; states.len()];
    for h in histograms {
        for (a, b) in hist.iter_mut().zip(h) {
            *a += b;
        }
    }
    Ok(tv_of_histogram(hist, chains, steps, states.len()))
}

/// Single-chain variant: snapshots every `stride` steps after `burnin`.
pub fn estimate_tv_snapshots(
    inst: &ListColoringInstance,
    snapshots: usize,
    stride: u64,
    burnin: u64,
    seed: u64,
    omega_cap: usize,
) -> Result<TvEstimate> {
    let states = oracle::enumerate_colorings(inst, omega_cap)?;
    let lookup: std::collections::HashMap<&[Color], usize> = states
        .iter()
        .enumerate()
        .map(|(idx, s)| (s.as_slice(), idx))
        .collect();
    let mut sampler = Sampler::from_greedy(inst)?;
    let mut rng = stream_rng(seed, 0);
    sampler.step_many(&mut rng, burnin);
    let mut hist = vec![0u64; states.len()];
    for _ in 0..snapshots {
        sampler.step_many(&mut rng, stride);
        hist[lookup[sampler.colors()]] += 1;
    }
    let mut est = tv_of_histogram(hist, snapshots, stride, states.len());
    est.chains = 1;
    Ok(est)
}

fn tv_of_histogram(hist: Vec<u64>, samples: usize, steps: u64, num_states: usize) -> TvEstimate {
    let uniform = 1.0 / num_states as f64;
    let tv = hist
        .iter()
        .map(|&h| (h as f64 / samples as f64 - uniform).abs())
        .sum::<f64>()
        / 2.0;
    TvEstimate {
        tv,
        bias_bound: num_states as f64 / (2.0 * samples as f64),
        num_states,
        samples,
        chains: samples,
        steps,
    }
}

/// Outcome of the identity-coupling diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingOutcome {
    /// First step at which the two chains coincide, or `None` on timeout.
    pub coalesced_at: Option<u64>,
    pub max_steps: u64,
    /// Set when some list has fewer than deg + 2 colors, in which case the
    /// chain is not guaranteed irreducible and the diagnostic is heuristic.
    pub ergodicity_warning: bool,
}

/// Runs two chains from the smallest-color and largest-color greedy starts
/// under the identity coupling: same vertex, same uniform variate, each
/// mapped into the chain's own sorted available set. A diagnostic only; no
/// mixing bound is claimed from it.
pub fn coupling_time(
    inst: &ListColoringInstance,
    seed: u64,
    max_steps: u64,
) -> Result<CouplingOutcome> {
    let ergodicity_warning = inst.ergodicity_violation().is_some();
    let a = greedy_state(inst)?;
    let b = greedy_state_largest(inst)?;
    let mut x = Sampler::new(inst, a)?;
    let mut y = Sampler::new(inst, b)?;
    let mut rng = master_rng(seed);
    if x.colors() == y.colors() {
        return Ok(CouplingOutcome {
            coalesced_at: Some(0),
            max_steps,
            ergodicity_warning,
        });
    }
    let n = inst.n();
    for t in 1..=max_steps {
        let v = uniform_index(&mut rng, n);
        let u = rng.next_u64();
        let mut shared = CountingRng { value: u, vertex: v };
        x.resample_with(&mut shared);
        let mut shared = CountingRng { value: u, vertex: v };
        y.resample_with(&mut shared);
        if x.colors() == y.colors() {
            return Ok(CouplingOutcome {
                coalesced_at: Some(t),
                max_steps,
                ergodicity_warning,
            });
        }
    }
    Ok(CouplingOutcome {
        coalesced_at: None,
        max_steps,
        ergodicity_warning,
    })
}

/// Fixed vertex + fixed uniform word, for coupled updates.
struct CountingRng {
    value: u64,
    vertex: usize,
}

impl<'a> Sampler<'a> {
    fn resample_with(&mut self, shared: &mut CountingRng) {
        struct OneShot(u64);
        impl RngCore for OneShot {
            fn next_u32(&mut self) -> u32 {
                self.0 as u32
            }
            fn next_u64(&mut self) -> u64 {
                self.0
            }
            fn fill_bytes(&mut self, _dest: &mut [u8]) {
                unimplemented!("coupling uses single words")
            }
        }
        let mut rng = OneShot(shared.value);
        let v = shared.vertex;
        self.resample(v, &mut rng);
        debug_assert!(self.inst.is_proper(&self.colors));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::spectral::{glauber_matrix, spectral_gap};

    fn path(n: usize, q: u32) -> ListColoringInstance {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        ListColoringInstance::full_palette(g, q).unwrap()
    }

    fn cycle(n: usize, q: u32) -> ListColoringInstance {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        ListColoringInstance::full_palette(g, q).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let inst = path(3, 3);
        assert_eq!(greedy_state(&inst).unwrap().colors, vec![1, 2, 1]);
        let edges: Vec<(usize, usize)> = (1..=3).map(|i| (0, i)).collect();
        let g = Graph::from_edges(4, &edges).unwrap();
        let star = ListColoringInstance::full_palette(g, 5).unwrap();
        assert_eq!(greedy_state(&star).unwrap().colors, vec![1, 2, 2, 2]);
        assert_eq!(
            greedy_state_largest(&star).unwrap().colors,
            vec![5, 4, 4, 4]
        );
    }

    #[test]
    fn greedy_never_stuck_with_enough_colors() {
        // |L(v)| >= deg(v) + 1 guarantees greedy succeeds
        for q in 3..=6 {
            let inst = cycle(6, q);
            let state = greedy_state(&inst).unwrap();
            assert!(inst.is_proper(&state.colors));
        }
    }

    #[test]
    fn chain_stays_proper() {
        let inst = cycle(6, 4);
        let mut sampler = Sampler::from_greedy(&inst).unwrap();
        let mut rng = master_rng(42);
        for _ in 0..20_000 {
            sampler.step(&mut rng);
        }
        assert!(inst.is_proper(sampler.colors()));
    }

    #[test]
    fn wide_palette_path_matches_masks() {
        // same seed, q = 200 forces the counting-array representation;
        // cross-check properness and determinism
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 200).unwrap();
        let mut s1 = Sampler::from_greedy(&inst).unwrap();
        let mut rng = master_rng(7);
        s1.step_many(&mut rng, 5_000);
        assert!(inst.is_proper(s1.colors()));
        let mut s2 = Sampler::from_greedy(&inst).unwrap();
        let mut rng = master_rng(7);
        s2.step_many(&mut rng, 5_000);
        assert_eq!(s1.colors(), s2.colors());
    }

    #[test]
    fn single_vertex_mixes_in_one_step() {
        let inst = ListColoringInstance::build(1, &[], vec![vec![1, 2, 3, 4]], 4).unwrap();
        let est = estimate_tv(&inst, 1, 40_000, 9, 1000).unwrap();
        assert!(est.tv < 0.02, "tv = {}", est.tv);
    }

    #[test]
    fn edge_two_colors_is_frozen() {
        // with |L| = deg + 1 the available set is always the current color:
        // the two proper colorings are not connected and the chain is the
        // identity, the textbook non-ergodic case
        let inst =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1, 2], vec![1, 2]], 2).unwrap();
        let est = estimate_tv(&inst, 1000, 500, 3, 100).unwrap();
        assert!((est.tv - 0.5).abs() <= 1e-12, "tv = {}", est.tv);
    }

    #[test]
    fn edge_three_colors_frequencies() {
        let inst =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1, 2, 3], vec![1, 2, 3]], 3)
                .unwrap();
        let est = estimate_tv(&inst, 20, 20_000, 3, 100).unwrap();
        assert!(est.tv < 0.02, "tv = {}", est.tv);
    }

    #[test]
    fn tv_at_zero_steps_is_point_mass() {
        let inst = path(3, 3);
        let states = oracle::enumerate_colorings(&inst, 100).unwrap();
        let est = estimate_tv(&inst, 0, 500, 1, 100).unwrap();
        let expect = 1.0 - 1.0 / states.len() as f64;
        assert!((est.tv - expect).abs() <= 1e-12);
    }

    #[test]
    fn estimate_matches_exact_matrix_power() {
        // fixed-start TV from the transition matrix vs the sampler estimate
        let inst = path(3, 4);
        let glauber = glauber_matrix(&inst).unwrap();
        let start = greedy_state(&inst).unwrap();
        let start_idx = glauber
            .states
            .iter()
            .position(|s| *s == start.colors)
            .unwrap();
        for steps in [2u64, 5, 12] {
            let exact = glauber.tv_from_start(start_idx, steps as usize);
            let est = estimate_tv(&inst, steps, 60_000, 11, 1000).unwrap();
            assert!(
                (est.tv - exact).abs() < 0.02,
                "steps {steps}: est {} vs exact {exact}",
                est.tv
            );
        }
    }

    #[test]
    fn single_step_frequencies_match_matrix_row() {
        let inst = cycle(4, 4);
        let glauber = glauber_matrix(&inst).unwrap();
        let start = greedy_state(&inst).unwrap();
        let start_idx = glauber
            .states
            .iter()
            .position(|s| *s == start.colors)
            .unwrap();
        let trials = 200_000usize;
        let mut counts = std::collections::HashMap::new();
        for c in 0..trials {
            let mut sampler = Sampler::new(&inst, start.clone()).unwrap();
            let mut rng = stream_rng(5, c as u64);
            sampler.step(&mut rng);
            *counts.entry(sampler.colors().to_vec()).or_insert(0usize) += 1;
        }
        // chi-squared against the exact row
        let mut chi2 = 0.0;
        let mut dof = 0usize;
        for &(b, p) in glauber.row(start_idx) {
            let expect = p * trials as f64;
            if expect < 5.0 {
                continue;
            }
            let observed = counts
                .get(&glauber.states[b])
                .copied()
                .unwrap_or(0) as f64;
            chi2 += (observed - expect).powi(2) / expect;
            dof += 1;
        }
        // dof ~ 13; chi2 beyond 60 would be a catastrophic mismatch
        assert!(dof >= 5 && chi2 < 60.0, "chi2 = {chi2}, dof = {dof}");
    }

    #[test]
    fn traces_are_reproducible() {
        let inst = cycle(5, 4);
        let t1 = trace(&inst, 123, 2_000, 100).unwrap();
        let t2 = trace(&inst, 123, 2_000, 100).unwrap();
        assert_eq!(
            serde_json::to_string(&t1).unwrap(),
            serde_json::to_string(&t2).unwrap()
        );
        let t3 = trace(&inst, 124, 2_000, 100).unwrap();
        assert_ne!(
            serde_json::to_string(&t1).unwrap(),
            serde_json::to_string(&t3).unwrap()
        );
    }

    #[test]
    fn coupling_identical_starts() {
        // one color list forces both greedy starts to coincide
        let inst = ListColoringInstance::build(
            2,
            &[(0, 1)],
            vec![vec![1], vec![2]],
            2,
        )
        .unwrap();
        let out = coupling_time(&inst, 1, 100).unwrap();
        assert_eq!(out.coalesced_at, Some(0));
    }

    #[test]
    fn coupling_single_vertex_first_update() {
        let inst = ListColoringInstance::build(1, &[], vec![vec![1, 2, 3]], 3).unwrap();
        // greedy smallest = 1, largest = 3: first resample coalesces because
        // the uniform variate indexes the same available set
        let out = coupling_time(&inst, 2, 100).unwrap();
        assert_eq!(out.coalesced_at, Some(1));
    }

    #[test]
    fn coupling_coalesces_faster_with_more_colors() {
        let few = cycle(8, 4);
        let many = cycle(8, 8);
        let t_few = coupling_time(&few, 7, 2_000_000).unwrap();
        let t_many = coupling_time(&many, 7, 2_000_000).unwrap();
        let a = t_few.coalesced_at.unwrap_or(u64::MAX);
        let b = t_many.coalesced_at.unwrap_or(u64::MAX);
        assert!(b < a, "q=8 took {b}, q=4 took {a}");
    }

    #[test]
    fn gap_and_tv_consistency() {
        // a chain with a healthy exact gap should be near uniform well after
        // the mixing-bound horizon
        let inst = path(4, 4);
        let glauber = glauber_matrix(&inst).unwrap();
        let rep = spectral_gap(&glauber).unwrap();
        assert!(rep.gap > 0.05);
        let est = estimate_tv(&inst, 200, 40_000, 21, 1000).unwrap();
        assert!(est.tv < 0.03, "tv = {}", est.tv);
    }
}
