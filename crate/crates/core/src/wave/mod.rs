//! Perturbed traveling waves `m'' + c m' + f(m) + delta = 0`, `m(+-inf) = m_+-(delta)`.
//!
//! The profile is computed by collocation on `[-L, L]` with Dirichlet values
//! at the ends and the phase condition `m(0) = (m_+ + m_-)/2`.

mod profile;
mod table;

pub use profile::{decay_fit, solve_wave, DecayFit, SolveOptions, WaveProfile};
pub use table::WaveTable;

use crate::error::{Error, Result};
use crate::potential::{reaction, reaction_deriv, sqrt_double_well};
use crate::quad::adaptive_simpson;

/// Admissible perturbation range `|delta| <= DELTA0`.
///
/// The cubic `u - u^3 + delta` keeps three real roots for
/// `|delta| < 2/(3 sqrt 3) ~ 0.385`.
pub const DELTA0: f64 = 0.2;

/// Stable roots `(m_-, m_+)` of `u - u^3 + delta = 0`, by Newton from `-1` and `+1`.
pub fn stable_roots(delta: f64) -> Result<(f64, f64)> {
    if !(delta.abs() <= DELTA0) {
        return Err(Error::DeltaOutOfRange { delta, delta0: DELTA0 });
    }
    let newton = |start: f64| -> Result<f64> {
        let mut u = start;
        for it in 0..60 {
            let g = reaction(u) + delta;
            let step = g / reaction_deriv(u);
            u -= step;
            if step.abs() <= 1e-15 * u.abs().max(1.0) {
                return Ok(u);
            }
            if !u.is_finite() || it == 59 {
                break;
            }
        }
        Err(Error::NewtonDivergence { iterations: 60, residual: (reaction(u) + delta).abs() })
    };
    let (lo, hi) = (newton(-1.0)?, newton(1.0)?);
    if !(lo < 0.0 && hi > 0.0) {
        return Err(Error::NewtonDivergence { iterations: 60, residual: f64::NAN });
    }
    Ok((lo, hi))
}

/// The unperturbed kink `m(., 0)` on the default grid, solved on first use.
pub fn kink() -> &'static WaveProfile {
    static KINK: std::sync::OnceLock<WaveProfile> = std::sync::OnceLock::new();
    KINK.get_or_init(|| solve_wave(0.0, &SolveOptions::default()).expect("unperturbed kink must solve"))
}

/// `c0 = sqrt(2) / int_{-1}^{1} sqrt(F(u)) du`, by adaptive quadrature.
pub fn c0() -> f64 {
    std::f64::consts::SQRT_2 / adaptive_simpson(&sqrt_double_well, -1.0, 1.0, 1e-14)
}

/// Central difference `(c(h) - c(-h)) / (2h)` of the wave speed at `delta = 0`.
pub fn wave_speed_derivative(h_delta: f64) -> Result<f64> {
    let opts = SolveOptions::default();
    let plus = solve_wave(h_delta, &opts)?;
    let minus = solve_wave(-h_delta, &opts)?;
    Ok((plus.speed() - minus.speed()) / (2.0 * h_delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Real roots of `u^3 - u - delta = 0` by the trigonometric method.
    fn cubic_roots_oracle(delta: f64) -> [f64; 3] {
        // t^3 + p t + q = 0 with p = -1, q = -delta
        let (p, q) = (-1.0f64, -delta);
        let r = 2.0 * (-p / 3.0).sqrt();
        let phi = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).acos() / 3.0;
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    #[test]
    fn unperturbed_wells() {
        assert_eq!(stable_roots(0.0).unwrap(), (-1.0, 1.0));
    }

    #[test]
    fn roots_match_trigonometric_oracle() {
        for delta in [0.1, -0.1, 0.05, 0.2] {
            let (lo, hi) = stable_roots(delta).unwrap();
            let r = cubic_roots_oracle(delta);
            assert!((lo - r[0]).abs() < 1e-13, "delta={delta}");
            assert!((hi - r[2]).abs() < 1e-13, "delta={delta}");
        }
    }

    #[test]
    fn roots_are_odd_in_delta() {
        for delta in [0.01, 0.1, 0.17] {
            let (lo, hi) = stable_roots(delta).unwrap();
            let (nlo, nhi) = stable_roots(-delta).unwrap();
            assert!((nhi + lo).abs() < 1e-14 && (nlo + hi).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_out_of_range_delta() {
        assert!(matches!(stable_roots(0.3), Err(Error::DeltaOutOfRange { .. })));
        assert!(stable_roots(f64::NAN).is_err());
    }

    #[test]
    fn speed_derivative_is_minus_c0() {
        let d = wave_speed_derivative(1e-3).unwrap();
        assert!((d / -c0() - 1.0).abs() < 0.01, "{d}");
    }

    #[test]
    fn speed_derivative_converges_at_second_order() {
        let d: Vec<f64> = [1e-2, 5e-3, 2.5e-3].iter().map(|&h| wave_speed_derivative(h).unwrap()).collect();
        let ratio = (d[0] - d[1]) / (d[1] - d[2]);
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn c0_against_closed_form() {
        // int sqrt(F) = [(u - u^3/3)/2]_{-1}^{1} = 2/3
        let closed = std::f64::consts::SQRT_2 / (2.0 / 3.0);
        assert!((c0() - closed).abs() < 1e-9);
        assert!((c0() - 2.121_320_3).abs() < 1e-7);
        assert!(c0() > 0.0);
    }
}
