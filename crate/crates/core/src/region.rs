//! The parameter region in which the verified bounds apply.
//!
//! The region is parametrized by `epsilon > 0`: with `alpha_star` the root
//! of `exp(1/x) = x` (about 1.763), set `alpha = (1 + epsilon) * alpha_star`
//! and `beta = 2 - alpha + alpha / (2 (alpha^2 - 1))`. A degree/palette pair
//! `(delta, q)` is in the region iff `delta >= 3` and `q >= alpha*delta + beta`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Root of `exp(1/x) = x`, computed once by 60 bisection steps on [1.5, 2.0].
pub fn alpha_star() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let f = |x: f64| (1.0 / x).exp() - x;
        let (mut lo, mut hi) = (1.5_f64, 2.0_f64);
        debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegionParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_star: f64,
}

impl RegionParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::BadParams(format!(
                "epsilon must be a positive finite real, got {epsilon}"
            )));
        }
        let a_star = alpha_star();
        let alpha = (1.0 + epsilon) * a_star;
        let beta = 2.0 - alpha + alpha / (2.0 * (alpha * alpha - 1.0));
        Ok(RegionParams {
            epsilon,
            alpha,
            beta,
            alpha_star: a_star,
        })
    }

    /// The palette threshold `alpha*delta + beta` for a given max degree.
    pub fn q_threshold(&self, delta: u32) -> f64 {
        self.alpha * delta as f64 + self.beta
    }

    pub fn contains(&self, delta: u32, q: u32) -> bool {
        delta >= 3 && q as f64 >= self.q_threshold(delta)
    }
}

/// True iff `(delta, q)` lies in the region for this `epsilon`.
pub fn in_region(delta: u32, q: u32, epsilon: f64) -> Result<bool> {
    Ok(RegionParams::new(epsilon)?.contains(delta, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_star_solves_equation() {
        let x = alpha_star();
        assert!((1.763..1.7633).contains(&x));
        assert!(((1.0 / x).exp() - x).abs() <= 1e-12);
        // equivalent normalization used by the Phi lower bound
        assert!((x * (-1.0 / x).exp() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn beta_below_0655() {
        for &eps in &[1e-6, 0.01, 0.1, 0.5, 1.0, 3.0] {
            let p = RegionParams::new(eps).unwrap();
            assert!(p.beta < 0.655, "beta = {} at eps = {}", p.beta, eps);
        }
    }

    #[test]
    fn region_membership() {
        assert!(in_region(3, 100, 1.0).unwrap());
        assert!(in_region(3, 7, 0.1).unwrap());
        assert!(!in_region(3, 6, 0.1).unwrap());
        assert!(!in_region(2, 100, 0.1).unwrap());
        assert!(in_region(3, 1, -1.0).is_err());

        // threshold at delta = 3, small epsilon: compute both sides
        let p = RegionParams::new(1e-9).unwrap();
        let thr = p.q_threshold(3);
        assert!((thr - (3.0 * p.alpha + p.beta)).abs() < 1e-12);
        assert!(thr > 5.9 && thr < 6.0);
    }
}
