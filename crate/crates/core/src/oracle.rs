//! Exact enumeration of proper list-colorings.
//!
//! All probabilities elsewhere in the crate are derived from the exact
//! integer counts produced here, so verification residuals are limited only
//! by the final floating-point division. The search is a backtracking DFS
//! in vertex-index order with forward pruning: assigning a color removes it
//! from the lists of later neighbors and a branch is abandoned as soon as
//! some list empties. Counts per vertex-color pair are accumulated from
//! subtree totals, so one enumeration yields every marginal at once.
//!
//! Colors are kept as bits of a `u128`, which caps the palette at 128
//! colors; the enumeration size guard `q^n <= cap` makes larger palettes
//! useless here anyway.

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Color, Error, Result};
use crate::instance::{ListColoringInstance, PartialColoring};

/// Default bound on `q^n` before a search is attempted.
pub const DEFAULT_ENUM_CAP: f64 = 1e8;

/// Exact counts from one full enumeration.
#[derive(Debug, Clone)]
pub struct ColoringCount {
    total: u128,
    lists: Vec<Vec<Color>>,
    /// `per_pair[v][t]` = number of proper colorings with `sigma_v` equal to
    /// the `t`-th color of `L(v)`.
    per_pair: Vec<Vec<u128>>,
}

impl ColoringCount {
    pub fn total(&self) -> u128 {
        self.total
    }

    /// Exact count of colorings with `sigma_v = c`; zero when `c` is not in
    /// the list of `v`.
    pub fn pair_count(&self, v: usize, c: Color) -> u128 {
        match self.lists[v].binary_search(&c) {
            Ok(t) => self.per_pair[v][t],
            Err(_) => 0,
        }
    }

    /// Marginal probability `P(sigma_v = c)` as a double.
    pub fn marginal(&self, v: usize, c: Color) -> f64 {
        self.pair_count(v, c) as f64 / self.total as f64
    }

    /// Exact rational marginal `(numerator, denominator)`.
    pub fn marginal_exact(&self, v: usize, c: Color) -> (u128, u128) {
        (self.pair_count(v, c), self.total)
    }

    /// Largest marginal at `v`.
    pub fn p_max(&self, v: usize) -> f64 {
        let best = self.per_pair[v].iter().copied().max().unwrap_or(0);
        best as f64 / self.total as f64
    }

    /// `max_c P(sigma_v = c) / P(sigma_v != c)`.
    ///
    /// Fails with `DegenerateMarginal` when some color is forced at `v`.
    pub fn ratio(&self, v: usize) -> Result<f64> {
        let mut best = 0.0_f64;
        for (t, &cnt) in self.per_pair[v].iter().enumerate() {
            if cnt == self.total {
                return Err(Error::DegenerateMarginal {
                    vertex: v,
                    color: self.lists[v][t],
                });
            }
            let r = cnt as f64 / (self.total - cnt) as f64;
            best = best.max(r);
        }
        Ok(best)
    }
}

fn color_bit(c: Color) -> u128 {
    1u128 << (c - 1)
}

fn list_mask(list: &[Color]) -> u128 {
    list.iter().map(|&c| color_bit(c)).fold(0, |a, b| a | b)
}

/// Guard: refuse instances whose brute-force space `q^n` exceeds `cap`.
fn check_enum_cap(inst: &ListColoringInstance, cap: f64) -> Result<()> {
    if inst.q() > 128 {
        return Err(Error::TooManyColors(inst.q()));
    }
    let size = (inst.q() as f64).powi(inst.n() as i32);
    if size > cap {
        return Err(Error::TooLarge(format!(
            "q^n = {size:.3e} exceeds cap {cap:.3e}"
        )));
    }
    Ok(())
}

/// DFS worker over a fixed instance. `avail` is mutated in place with an
/// undo log per recursion level.
struct Searcher<'a> {
    fwd: &'a [Vec<usize>],
    avail: Vec<u128>,
    /// counts indexed `[v][color - 1]`, compressed at the end
    per_color: Vec<Vec<u128>>,
    undo: Vec<Vec<usize>>,
    record_counts: bool,
}

impl<'a> Searcher<'a> {
    fn new(fwd: &'a [Vec<usize>], avail: Vec<u128>, q: u32, record_counts: bool) -> Self {
        let n = avail.len();
        Searcher {
            fwd,
            avail,
            per_color: if record_counts {
                vec![vec![0u128; q as usize]; n]
            } else {
                Vec::new()
            },
            undo: vec![Vec::new(); n + 1],
            record_counts,
        }
    }

    fn dfs(&mut self, v: usize) -> u128 {
        if v == self.avail.len() {
            return 1;
        }
        let mut remaining = self.avail[v];
        let mut subtotal = 0u128;
        while remaining != 0 {
            let bit_idx = remaining.trailing_zeros();
            let bit = 1u128 << bit_idx;
            remaining &= remaining - 1;

            let mut feasible = true;
            debug_assert!(self.undo[v].is_empty());
            for t in 0..self.fwd[v].len() {
                let w = self.fwd[v][t];
                if self.avail[w] & bit != 0 {
                    self.avail[w] &= !bit;
                    self.undo[v].push(w);
                    if self.avail[w] == 0 {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                let below = self.dfs(v + 1);
                if below > 0 {
                    subtotal += below;
                    if self.record_counts {
                        self.per_color[v][bit_idx as usize] += below;
                    }
                }
            }
            while let Some(w) = self.undo[v].pop() {
                self.avail[w] |= bit;
            }
        }
        subtotal
    }
}

fn forward_neighbors(inst: &ListColoringInstance) -> Vec<Vec<usize>> {
    (0..inst.n())
        .map(|v| {
            inst.graph()
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| w > v)
                .collect()
        })
        .collect()
}

fn initial_masks(inst: &ListColoringInstance) -> Vec<u128> {
    (0..inst.n()).map(|v| list_mask(inst.list(v))).collect()
}

/// Exact enumeration with the default size cap.
pub fn count_colorings(inst: &ListColoringInstance) -> Result<ColoringCount> {
    count_colorings_capped(inst, DEFAULT_ENUM_CAP)
}

/// Exact enumeration; fails with `TooLarge` when `q^n > cap` and with
/// `Unsatisfiable` when no proper coloring exists.
pub fn count_colorings_capped(inst: &ListColoringInstance, cap: f64) -> Result<ColoringCount> {
    check_enum_cap(inst, cap)?;
    let fwd = forward_neighbors(inst);
    let masks = initial_masks(inst);
    let n = inst.n();
    let q = inst.q();

    // Split on the first vertex's colors when the space is large enough for
    // the parallelism to pay off. Counts merge by exact integer addition, so
    // the result is identical to the serial run.
    let est = (q as f64).powi(n as i32);
    let (total, per_color) = if n >= 2 && est > 1e6 {
        let root_colors: Vec<Color> = inst.list(0).to_vec();
        let branches: Vec<(u128, Vec<Vec<u128>>)> = root_colors
            .par_iter()
            .map(|&c| {
                let mut s = Searcher::new(&fwd, masks.clone(), q, true);
                let bit = color_bit(c);
                let mut feasible = true;
                for &w in &fwd[0] {
                    if s.avail[w] & bit != 0 {
                        s.avail[w] &= !bit;
                        if s.avail[w] == 0 {
                            feasible = false;
                        }
                    }
                }
                let below = if feasible { s.dfs(1) } else { 0 };
                if below > 0 {
                    s.per_color[0][(c - 1) as usize] += below;
                }
                (below, s.per_color)
            })
            .collect();
        let mut total = 0u128;
        let mut per_color = vec![vec![0u128; q as usize]; n];
        for (sub, pc) in branches {
            total += sub;
            for v in 0..n {
                for t in 0..q as usize {
                    per_color[v][t] += pc[v][t];
                }
            }
        }
        (total, per_color)
    } else {
        let mut s = Searcher::new(&fwd, masks, q, true);
        let total = s.dfs(0);
        (total, s.per_color)
    };

    if total == 0 {
        return Err(Error::Unsatisfiable);
    }
    let lists: Vec<Vec<Color>> = inst.lists().to_vec();
    let per_pair = lists
        .iter()
        .enumerate()
        .map(|(v, list)| {
            list.iter()
                .map(|&c| per_color[v][(c - 1) as usize])
                .collect()
        })
        .collect();
    Ok(ColoringCount {
        total,
        lists,
        per_pair,
    })
}

/// Plain count without per-pair bookkeeping (used by samplers).
fn count_only(fwd: &[Vec<usize>], masks: Vec<u128>, q: u32, from: usize) -> u128 {
    let mut s = Searcher::new(fwd, masks, q, false);
    s.dfs(from)
}

/// Lists every proper coloring in lexicographic order (vertex-index major,
/// color minor). Fails with `TooLarge` if more than `cap` exist.
pub fn enumerate_colorings(inst: &ListColoringInstance, cap: usize) -> Result<Vec<Vec<Color>>> {
    if inst.q() > 128 {
        return Err(Error::TooManyColors(inst.q()));
    }
    let fwd = forward_neighbors(inst);
    let mut avail = initial_masks(inst);
    let mut states = Vec::new();
    let mut stack_color = vec![0u32; inst.n()];
    enumerate_rec(inst, &fwd, &mut avail, 0, &mut stack_color, &mut states, cap)?;
    Ok(states)
}

fn enumerate_rec(
    inst: &ListColoringInstance,
    fwd: &[Vec<usize>],
    avail: &mut [u128],
    v: usize,
    current: &mut [Color],
    out: &mut Vec<Vec<Color>>,
    cap: usize,
) -> Result<()> {
    if v == inst.n() {
        if out.len() >= cap {
            return Err(Error::TooLarge(format!(
                "more than {cap} proper colorings"
            )));
        }
        out.push(current.to_vec());
        return Ok(());
    }
    let mut remaining = avail[v];
    while remaining != 0 {
        let bit_idx = remaining.trailing_zeros();
        let bit = 1u128 << bit_idx;
        remaining &= remaining - 1;
        let mut touched = Vec::new();
        let mut feasible = true;
        for &w in &fwd[v] {
            if avail[w] & bit != 0 {
                avail[w] &= !bit;
                touched.push(w);
                if avail[w] == 0 {
                    feasible = false;
                    break;
                }
            }
        }
        if feasible {
            current[v] = bit_idx + 1;
            enumerate_rec(inst, fwd, avail, v + 1, current, out, cap)?;
        }
        for w in touched {
            avail[w] |= bit;
        }
    }
    Ok(())
}

/// Marginal probability `P(sigma_v = c)`. Convenience wrapper that runs a
/// fresh enumeration; hold a [`ColoringCount`] for repeated queries.
pub fn marginal(inst: &ListColoringInstance, v: usize, c: Color) -> Result<f64> {
    if !inst.has_color(v, c) {
        return Err(Error::ColorNotInList { vertex: v, color: c });
    }
    Ok(count_colorings(inst)?.marginal(v, c))
}

/// Conditional marginal `P(sigma_w = k | sigma_v = i)`, computed as the
/// marginal of `(w, k)` in the instance conditioned on `v -> i`.
pub fn conditional_marginal(
    inst: &ListColoringInstance,
    v: usize,
    i: Color,
    w: usize,
    k: Color,
) -> Result<f64> {
    let (num, den) = conditional_marginal_exact(inst, v, i, w, k)?;
    Ok(num as f64 / den as f64)
}

/// Exact rational version of [`conditional_marginal`].
pub fn conditional_marginal_exact(
    inst: &ListColoringInstance,
    v: usize,
    i: Color,
    w: usize,
    k: Color,
) -> Result<(u128, u128)> {
    if w == v {
        return Err(Error::BadParams("conditional marginal needs w != v".into()));
    }
    if !inst.has_color(v, i) {
        return Err(Error::ColorNotInList { vertex: v, color: i });
    }
    let tau = PartialColoring::from_pairs(&[(v, i)]);
    let (cond, map) = match inst.condition(&tau) {
        Ok(x) => x,
        Err(Error::NonExtendable(_)) => {
            return Err(Error::ZeroMarginal { vertex: v, color: i })
        }
        Err(e) => return Err(e),
    };
    let counts = match count_colorings(&cond) {
        Ok(c) => c,
        Err(Error::Unsatisfiable) => {
            return Err(Error::ZeroMarginal { vertex: v, color: i })
        }
        Err(e) => return Err(e),
    };
    let w_new = map.new_of_old(w).expect("w survives conditioning on v");
    Ok((counts.pair_count(w_new, k), counts.total()))
}

/// `max_c P(sigma_u = c) / P(sigma_u != c)` for a single instance.
pub fn ratio_r(inst: &ListColoringInstance, u: usize) -> Result<f64> {
    count_colorings(inst)?.ratio(u)
}

/// Largest marginal at `v`.
pub fn p_max(inst: &ListColoringInstance, v: usize) -> Result<f64> {
    Ok(count_colorings(inst)?.p_max(v))
}

/// True iff some full proper coloring agrees with the partial coloring.
pub fn is_extendable(inst: &ListColoringInstance, partial: &PartialColoring) -> Result<bool> {
    let (cond, _) = match inst.condition(partial) {
        Ok(x) => x,
        Err(Error::NonExtendable(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    if cond.n() == 0 {
        return Ok(true);
    }
    match count_colorings(&cond) {
        Ok(_) => Ok(true),
        Err(Error::Unsatisfiable) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Draws one proper coloring exactly uniformly from the set of all proper
/// colorings, by sequentially sampling each vertex's color proportionally to
/// the number of completions.
pub fn sample_uniform<R: RngCore>(
    inst: &ListColoringInstance,
    rng: &mut R,
) -> Result<Vec<Color>> {
    check_enum_cap(inst, DEFAULT_ENUM_CAP)?;
    let fwd = forward_neighbors(inst);
    let mut avail = initial_masks(inst);
    let n = inst.n();
    let mut coloring = vec![0 as Color; n];
    let mut remaining_total = count_only(&fwd, avail.clone(), inst.q(), 0);
    if remaining_total == 0 {
        return Err(Error::Unsatisfiable);
    }
    for v in 0..n {
        // target in [0, remaining_total): 53-bit uniform scaled up exactly
        let u = (rng.next_u64() >> 11) as f64 / 9007199254740992.0;
        let mut target = (u * remaining_total as f64) as u128;
        if target >= remaining_total {
            target = remaining_total - 1;
        }
        let mut remaining = avail[v];
        let mut chosen = None;
        while remaining != 0 {
            let bit_idx = remaining.trailing_zeros();
            let bit = 1u128 << bit_idx;
            remaining &= remaining - 1;
            let mut masks = avail.to_vec();
            masks[v] = bit;
            let mut feasible = true;
            for &w in &fwd[v] {
                if masks[w] & bit != 0 {
                    masks[w] &= !bit;
                    if masks[w] == 0 {
                        feasible = false;
                        break;
                    }
                }
            }
            let cnt = if feasible {
                count_only(&fwd, masks, inst.q(), v + 1)
            } else {
                0
            };
            if target < cnt {
                chosen = Some((bit_idx + 1, bit, cnt));
                break;
            }
            target -= cnt;
        }
        let (color, bit, cnt) =
            chosen.expect("sequential sampling always finds a color when total > 0");
        coloring[v] = color;
        for &w in &fwd[v] {
            avail[w] &= !bit;
        }
        avail[v] = bit;
        remaining_total = cnt;
    }
    debug_assert!(inst.is_proper(&coloring));
    Ok(coloring)
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
    fn single_vertex_three_colors() {
        let inst =
            ListColoringInstance::build(1, &[], vec![vec![1, 2, 3]], 3).unwrap();
        let c = count_colorings(&inst).unwrap();
        assert_eq!(c.total(), 3);
        assert_eq!(c.pair_count(0, 2), 1);
    }

    #[test]
    fn two_colorings_of_k2() {
        let inst =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1, 2], vec![1, 2]], 2).unwrap();
        let c = count_colorings(&inst).unwrap();
        assert_eq!(c.total(), 2);
    }

    #[test]
    fn star_closed_form() {
        // q * (q-1)^delta colorings of a star
        for delta in 1..=6usize {
            for q in 3..=7u32 {
                let c = count_colorings(&star(delta, q)).unwrap();
                let expected = q as u128 * (q as u128 - 1).pow(delta as u32);
                assert_eq!(c.total(), expected, "delta={delta} q={q}");
            }
        }
        // one larger spot check at the boundary of the stated range; q^n for
        // the 9-vertex star slightly exceeds the default cap
        let c = count_colorings_capped(&star(8, 8), 2e8).unwrap();
        assert_eq!(c.total(), 8u128 * 7u128.pow(8));
    }

    #[test]
    fn star_marginals() {
        let inst = star(3, 4);
        let c = count_colorings(&inst).unwrap();
        assert_eq!(c.total(), 108);
        // center marginal 1/q by symmetry
        assert_eq!(c.pair_count(0, 1) * 4, c.total());
        // leaf marginal of any color is 27/108 = 1/4
        assert_eq!(c.pair_count(1, 1), 27);
        // per-pair counts sum to the total at every vertex
        for v in 0..4 {
            let s: u128 = (1..=4).map(|k| c.pair_count(v, k)).sum();
            assert_eq!(s, c.total());
        }
    }

    #[test]
    fn positive_marginals_when_lists_large_enough() {
        // |L(v)| >= deg(v)+1 forces every (v, i) marginal to be positive
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 3).unwrap();
        let c = count_colorings(&inst).unwrap();
        for v in 0..4 {
            for k in 1..=3 {
                assert!(c.pair_count(v, k) > 0);
            }
        }
    }

    #[test]
    fn conditional_star_center() {
        let inst = star(3, 5);
        // given center color i, a leaf is uniform over the other q-1 colors
        for k in 2..=5 {
            let p = conditional_marginal(&inst, 0, 1, 2, k).unwrap();
            assert!((p - 0.25).abs() < 1e-15);
        }
        assert_eq!(conditional_marginal(&inst, 0, 1, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn conditional_independent_vertices() {
        let inst = ListColoringInstance::build(
            2,
            &[],
            vec![vec![1, 2], vec![1, 2, 3]],
            3,
        )
        .unwrap();
        let p = conditional_marginal(&inst, 0, 1, 1, 2).unwrap();
        let m = marginal(&inst, 1, 2).unwrap();
        assert_eq!(p, m);
    }

    #[test]
    fn conditional_matches_condition_exactly() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        for i in 1..=4 {
            for k in 1..=4 {
                let (num, den) = conditional_marginal_exact(&inst, 1, i, 3, k).unwrap();
                let tau = PartialColoring::from_pairs(&[(1, i)]);
                let (cond, map) = inst.condition(&tau).unwrap();
                let counts = count_colorings(&cond).unwrap();
                let w = map.new_of_old(3).unwrap();
                assert_eq!(num, counts.pair_count(w, k));
                assert_eq!(den, counts.total());
            }
        }
    }

    #[test]
    fn law_of_total_probability() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        let c = count_colorings(&inst).unwrap();
        for v in 0..5 {
            for i in 1..=4 {
                if c.pair_count(v, i) == 0 {
                    continue;
                }
                for w in 0..5 {
                    if w == v {
                        continue;
                    }
                    let mut num_sum = 0u128;
                    let mut den = 0u128;
                    for k in 1..=4 {
                        let (num, d) = conditional_marginal_exact(&inst, v, i, w, k).unwrap();
                        num_sum += num;
                        den = d;
                    }
                    assert_eq!(num_sum, den, "v={v} i={i} w={w}");
                }
            }
        }
    }

    #[test]
    fn zero_influence_baseline() {
        // sum_c P(sigma_u = c) (P(sigma_w = k | sigma_u = c) - P(sigma_w = k)) = 0
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        let c = count_colorings(&inst).unwrap();
        let (u, w, k) = (1, 3, 2);
        let mut acc = 0.0;
        for i in 1..=4 {
            let p_i = c.marginal(u, i);
            let cond = conditional_marginal(&inst, u, i, w, k).unwrap();
            acc += p_i * (cond - c.marginal(w, k));
        }
        assert!(acc.abs() <= 1e-12);
    }

    #[test]
    fn ratio_of_isolated_vertex() {
        let inst = ListColoringInstance::build(1, &[], vec![vec![1, 2, 3, 4]], 4).unwrap();
        let r = ratio_r(&inst, 0).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_star_leaf() {
        let inst = star(3, 6);
        let r = ratio_r(&inst, 1).unwrap();
        assert!((r - 1.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_ratio_reported() {
        let inst = ListColoringInstance::build(1, &[], vec![vec![2]], 3).unwrap();
        assert!(matches!(
            ratio_r(&inst, 0),
            Err(Error::DegenerateMarginal { vertex: 0, color: 2 })
        ));
    }

    #[test]
    fn p_max_examples() {
        let inst = ListColoringInstance::build(1, &[], vec![vec![1, 2, 3]], 3).unwrap();
        assert!((p_max(&inst, 0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let star5 = star(4, 5);
        assert!((p_max(&star5, 0).unwrap() - 0.2).abs() < 1e-15);
        // p_max >= 1/|L(v)| always (pigeonhole)
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 4).unwrap();
        let c = count_colorings(&inst).unwrap();
        for v in 0..3 {
            assert!(c.p_max(v) >= 1.0 / inst.list(v).len() as f64 - 1e-15);
        }
    }

    #[test]
    fn unsatisfiable_reported() {
        let inst =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1], vec![1]], 2).unwrap();
        assert!(matches!(count_colorings(&inst), Err(Error::Unsatisfiable)));
    }

    #[test]
    fn cap_rejects_large_instances() {
        let g = Graph::edgeless(40);
        let inst = ListColoringInstance::full_palette(g, 10).unwrap();
        assert!(matches!(count_colorings(&inst), Err(Error::TooLarge(_))));
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let inst =
            ListColoringInstance::build(2, &[(0, 1)], vec![vec![1, 2], vec![1, 2]], 2).unwrap();
        let states = enumerate_colorings(&inst, 100).unwrap();
        assert_eq!(states, vec![vec![1, 2], vec![2, 1]]);
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 3).unwrap();
        let states = enumerate_colorings(&inst, 100).unwrap();
        assert_eq!(states.len() as u128, count_colorings(&inst).unwrap().total());
        let mut sorted = states.clone();
        sorted.sort();
        assert_eq!(states, sorted);
    }

    #[test]
    fn extendability() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 3).unwrap();
        assert!(is_extendable(&inst, &PartialColoring::from_pairs(&[(0, 1), (2, 2)])).unwrap());
        // K3 with 3 colors: fixing two vertices forces the third
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let k3i = ListColoringInstance::full_palette(k3, 3).unwrap();
        assert!(is_extendable(&k3i, &PartialColoring::from_pairs(&[(0, 1), (1, 2)])).unwrap());
        assert!(!is_extendable(&k3i, &PartialColoring::from_pairs(&[(0, 1), (1, 1)])).unwrap());
    }

    #[test]
    fn uniform_sampler_matches_enumeration() {
        use rand::SeedableRng;
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = ListColoringInstance::full_palette(g, 3).unwrap();
        let states = enumerate_colorings(&inst, 100).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut hits = vec![0u32; states.len()];
        let trials = 12_000;
        for _ in 0..trials {
            let s = sample_uniform(&inst, &mut rng).unwrap();
            let idx = states.iter().position(|t| *t == s).unwrap();
            hits[idx] += 1;
        }
        let expected = trials as f64 / states.len() as f64;
        for (idx, &h) in hits.iter().enumerate() {
            assert!(
                (h as f64 - expected).abs() < 6.0 * expected.sqrt(),
                "state {idx} hit {h} vs expected {expected}"
            );
        }
    }
}
