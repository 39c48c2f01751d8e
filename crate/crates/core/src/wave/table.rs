use std::sync::OnceLock;

use rayon::prelude::*;

use super::{solve_wave, SolveOptions, WaveProfile, DELTA0};
use crate::error::{invalid, Error, Result};

/// Wave speeds and profiles on a uniform `delta` grid with cubic interpolation.
///
/// Only the nonnegative half is solved; the other half is filled by the odd
/// symmetry `c(-delta) = -c(delta)`, `m(x, -delta) = -m(-x, delta)`.
#[derive(Debug, Clone)]
pub struct WaveTable {
    delta0: f64,
    step: f64,
    speeds: Vec<f64>,
    profiles: Vec<WaveProfile>,
}

static STANDARD: OnceLock<WaveTable> = OnceLock::new();

/// Lagrange weights for four equally spaced nodes at offsets 0..3, evaluated at `t`.
fn lagrange4(t: f64) -> [f64; 4] {
    [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ]
}

impl WaveTable {
    /// Number of `delta` nodes in the standard table.
    pub const NODES: usize = 41;

    /// The 41-node table on `[-DELTA0, DELTA0]` with default solver options,
    /// built on first use.
    pub fn standard() -> &'static WaveTable {
        STANDARD.get_or_init(|| {
            WaveTable::build(DELTA0, Self::NODES, &SolveOptions::default())
                .expect("standard wave table must build")
        })
    }

    pub fn build(delta0: f64, nodes: usize, opts: &SolveOptions) -> Result<WaveTable> {
        if nodes < 5 || nodes % 2 == 0 {
            return Err(invalid("nodes", format!("need an odd count >= 5, got {nodes}")));
        }
        if !(delta0 > 0.0 && delta0 <= DELTA0) {
            return Err(Error::DeltaOutOfRange { delta: delta0, delta0: DELTA0 });
        }
        let mid = nodes / 2;
        let step = delta0 / mid as f64;
        let upper: Vec<WaveProfile> = (0..=mid)
            .into_par_iter()
            .map(|j| solve_wave(j as f64 * step, opts))
            .collect::<Result<_>>()?;
        let mut profiles: Vec<WaveProfile> = upper[1..].iter().rev().map(|p| p.reflected()).collect();
        profiles.extend(upper);
        let mut speeds: Vec<f64> = profiles.iter().map(|p| p.speed()).collect();
        speeds[mid] = 0.0;
        for j in 1..=mid {
            speeds[mid - j] = -speeds[mid + j];
        }
        Ok(WaveTable { delta0, step, speeds, profiles })
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.speeds.len()).map(|j| -self.delta0 + j as f64 * self.step)
    }

    pub fn node_speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn profile(&self, j: usize) -> &WaveProfile {
        &self.profiles[j]
    }

    fn stencil(&self, delta: f64) -> Result<(usize, [f64; 4])> {
        if !(delta.abs() <= self.delta0) {
            return Err(Error::DeltaOutOfRange { delta, delta0: self.delta0 });
        }
        let n = self.speeds.len();
        let s = (delta + self.delta0) / self.step;
        let i = (s.floor() as usize).min(n - 2);
        let j = i.clamp(1, n - 3) - 1;
        Ok((j, lagrange4(s - j as f64)))
    }

    /// Interpolated wave speed `c(delta)`.
    pub fn speed(&self, delta: f64) -> Result<f64> {
        let (j, w) = self.stencil(delta)?;
        Ok((0..4).map(|k| w[k] * self.speeds[j + k]).sum())
    }

    /// Interpolated profile value `m(z, delta)`.
    pub fn profile_value(&self, z: f64, delta: f64) -> Result<f64> {
        let (j, w) = self.stencil(delta)?;
        Ok((0..4).map(|k| w[k] * self.profiles[j + k].eval(z)).sum())
    }

    /// Interpolated stable roots `(m_-(delta), m_+(delta))`.
    pub fn roots(&self, delta: f64) -> Result<(f64, f64)> {
        let (j, w) = self.stencil(delta)?;
        let lo = (0..4).map(|k| w[k] * self.profiles[j + k].m_minus()).sum();
        let hi = (0..4).map(|k| w[k] * self.profiles[j + k].m_plus()).sum();
        Ok((lo, hi))
    }

    /// Largest second difference quotient of the tabulated speeds.
    pub fn speed_second_derivative_bound(&self) -> f64 {
        self.speeds
            .windows(3)
            .map(|w| ((w[2] - 2.0 * w[1] + w[0]) / (self.step * self.step)).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> WaveTable {
        let opts = SolveOptions { half_length: 16.0, nodes: 1601, ..SolveOptions::default() };
        WaveTable::build(DELTA0, 11, &opts).unwrap()
    }

    #[test]
    fn odd_symmetry_is_exact() {
        let t = small();
        assert_eq!(t.speed(0.0).unwrap(), 0.0);
        for d in [0.013, 0.07, 0.19] {
            assert_eq!(t.speed(-d).unwrap(), -t.speed(d).unwrap());
        }
    }

    #[test]
    fn interpolation_reproduces_direct_solve() {
        let t = small();
        let opts = SolveOptions { half_length: 16.0, nodes: 1601, ..SolveOptions::default() };
        let direct = solve_wave(0.05, &opts).unwrap();
        assert!((t.speed(0.05).unwrap() - direct.speed()).abs() < 1e-4);
        assert!((t.profile_value(0.4, 0.05).unwrap() - direct.eval(0.4)).abs() < 1e-4);
    }

    #[test]
    fn slope_near_zero_is_minus_c0() {
        let t = small();
        let slope = t.speed(0.01).unwrap() / 0.01;
        assert!((slope + super::super::c0()).abs() < 0.01 * super::super::c0());
    }

    #[test]
    fn out_of_range_delta_is_an_error() {
        assert!(matches!(small().speed(0.21), Err(Error::DeltaOutOfRange { .. })));
    }

    #[test]
    fn unperturbed_profile_midpoint_is_zero() {
        assert!(small().profile_value(0.0, 0.0).unwrap().abs() < 1e-15);
    }
}
