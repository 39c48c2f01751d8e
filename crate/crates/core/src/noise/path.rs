use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};

/// Substream of the seeded generator feeding positive times.
const FORWARD_STREAM: u64 = 0;
/// Independent substream feeding the time-reversed branch `W(t) = W~(-t)`.
const BACKWARD_STREAM: u64 = 1;

/// A sampled trajectory on the uniform grid `t_i = (i - n_neg) * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    dt: f64,
    n_neg: usize,
    values: Vec<f64>,
    seed: Option<u64>,
}

/// Samples a two-sided Brownian path with `W(0) = 0`.
///
/// The grid is extended outward so that it covers `[t_min, t_max]`.
pub fn sample_brownian(seed: u64, t_min: f64, t_max: f64, dt: f64) -> Result<BrownianPath> {
    let (n_neg, n_pos) = grid_counts(t_min, t_max, dt)?;
    let sd = dt.sqrt();
    let mut values = vec![0.0; n_neg + n_pos + 1];

    let mut fwd = ChaCha8Rng::seed_from_u64(seed);
    fwd.set_stream(FORWARD_STREAM);
    let mut w = 0.0;
    for v in values[n_neg + 1..].iter_mut() {
        let z: f64 = StandardNormal.sample(&mut fwd);
        w += sd * z;
        *v = w;
    }

    let mut bwd = ChaCha8Rng::seed_from_u64(seed);
    bwd.set_stream(BACKWARD_STREAM);
    let mut w = 0.0;
    for v in values[..n_neg].iter_mut().rev() {
        let z: f64 = StandardNormal.sample(&mut bwd);
        w += sd * z;
        *v = w;
    }

    Ok(BrownianPath { dt, n_neg, values, seed: Some(seed) })
}

fn grid_counts(t_min: f64, t_max: f64, dt: f64) -> Result<(usize, usize)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(t_min < 0.0) {
        return Err(invalid("t_min", format!("must be negative, got {t_min}")));
    }
    if !(t_max > 0.0) {
        return Err(invalid("t_max", format!("must be positive, got {t_max}")));
    }
    let n_neg = (-t_min / dt - 1e-9).ceil().max(1.0) as usize;
    let n_pos = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((n_neg, n_pos))
}

impl BrownianPath {
    /// Deterministic path `t -> f(t)` on the same kind of grid.
    ///
    /// Used for synthetic inputs (constants, polynomials) and driving
    /// functions that are not Brownian; `W(0) = 0` is not enforced.
    pub fn from_fn(t_min: f64, t_max: f64, dt: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (n_neg, n_pos) = grid_counts(t_min, t_max, dt)?;
        let values = (0..n_neg + n_pos + 1)
            .map(|i| f((i as f64 - n_neg as f64) * dt))
            .collect();
        Ok(BrownianPath { dt, n_neg, values, seed: None })
    }

    /// Pointwise combination with another path on an identical grid.
    pub fn zip_with(&self, other: &BrownianPath, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.dt != other.dt || self.n_neg != other.n_neg || self.values.len() != other.values.len() {
            return Err(invalid("path", "grids differ"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(BrownianPath { dt: self.dt, n_neg: self.n_neg, values, seed: None })
    }

    /// Pointwise map of the values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        BrownianPath {
            dt: self.dt,
            n_neg: self.n_neg,
            values: self.values.iter().map(|v| f(*v)).collect(),
            seed: None,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_min(&self) -> f64 {
        -(self.n_neg as f64) * self.dt
    }

    pub fn t_max(&self) -> f64 {
        (self.values.len() - 1 - self.n_neg) as f64 * self.dt
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of grid node `i`.
    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        (i as f64 - self.n_neg as f64) * self.dt
    }

    /// Index of the node at `t = 0`.
    pub fn zero_index(&self) -> usize {
        self.n_neg
    }

    /// Piecewise-linear evaluation; clamps outside the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        let x = t / self.dt + self.n_neg as f64;
        if x <= 0.0 {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if x >= last as f64 {
            return self.values[last];
        }
        let i = x.floor() as usize;
        let w = x - i as f64;
        if w == 0.0 {
            return self.values[i];
        }
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_at_zero() {
        for seed in [0, 1, 42, 9999] {
            let p = sample_brownian(seed, -0.3, 1.0, 1e-3).unwrap();
            assert_eq!(p.values()[p.zero_index()], 0.0);
            assert_eq!(p.value_at(0.0), 0.0);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = sample_brownian(42, -0.5, 2.0, 1e-3).unwrap();
        let b = sample_brownian(42, -0.5, 2.0, 1e-3).unwrap();
        assert_eq!(a, b);
        let c = sample_brownian(43, -0.5, 2.0, 1e-3).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn forward_branch_independent_of_backward_extent() {
        // the positive branch comes from its own substream
        let a = sample_brownian(5, -0.1, 1.0, 1e-2).unwrap();
        let b = sample_brownian(5, -0.7, 1.0, 1e-2).unwrap();
        let ta = &a.values()[a.zero_index()..];
        let tb = &b.values()[b.zero_index()..];
        assert_eq!(ta, tb);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(sample_brownian(1, -1.0, 1.0, 0.0).is_err());
        assert!(sample_brownian(1, -1.0, 1.0, -0.1).is_err());
        assert!(sample_brownian(1, 0.0, 1.0, 0.1).is_err());
        assert!(sample_brownian(1, 0.5, 1.0, 0.1).is_err());
    }

    #[test]
    fn covers_requested_interval() {
        let p = sample_brownian(3, -0.123, 0.777, 0.01).unwrap();
        assert!(p.t_min() <= -0.123 && p.t_max() >= 0.777);
        assert!((p.time(p.zero_index())).abs() == 0.0);
    }

    #[test]
    fn variance_of_w1() {
        let n = 2000;
        let xs: Vec<f64> = (0..n)
            .map(|s| sample_brownian(s as u64, -0.01, 1.0, 0.01).unwrap().value_at(1.0))
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((0.94..=1.06).contains(&var), "var = {var}");
    }
}
