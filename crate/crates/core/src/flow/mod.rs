//! Limit interface dynamics: the resolvent `g(A, q) = tr(A (I - qA)^-1)`,
//! the radial signed-distance system and the radius law
//! `dR = -(n-1)/R dt - c0 dW`.

mod sde;
mod smbmc;

pub use sde::{radius_sde, SdeConfig};
pub use smbmc::{radial_smbmc_step, smbmc_run, stability_probe, RadialDistance, SmbmcConfig, StabilityProbe};

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};

/// Singularity threshold on `|det(I - qA)|`.
pub const DET_FLOOR: f64 = 1e-10;

/// `g(A, q) = tr(A (I - qA)^-1)` for a symmetric `k x k` matrix, `k <= 3`.
pub fn g_eval(a: &DMatrix<f64>, q: f64) -> Result<f64> {
    let k = a.nrows();
    if k == 0 || k > 3 || a.ncols() != k {
        return Err(invalid("A", format!("need a square matrix of size 1..=3, got {}x{}", a.nrows(), a.ncols())));
    }
    let m = DMatrix::<f64>::identity(k, k) - a * q;
    let det = m.determinant();
    if !(det.abs() >= DET_FLOOR) {
        return Err(Error::Singular { det });
    }
    let inv = m.try_inverse().ok_or(Error::Singular { det })?;
    Ok((a * inv).trace())
}

/// Which correction `+- eps^beta` enters the front velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
            Sign::Zero => 0.0,
        }
    }
}

/// Velocity law driving the front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    /// `-c0 dW` from the Brownian path.
    LimitSde,
    /// `eps^-1 c(eps xi^eps(t) + sign eps^beta)` from the mollified noise.
    EpsFront { eps: f64, gamma: f64, beta: f64, sign: Sign },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub dim: usize,
    pub c0: f64,
    pub drive: Drive,
    /// Multiplier of the `(n-1)/R` curvature drift; `1` except in tests.
    pub curvature_scale: f64,
}

impl FlowParams {
    pub fn new(dim: usize, drive: Drive) -> Result<FlowParams> {
        if dim < 2 {
            return Err(invalid("n", format!("need n >= 2, got {dim}")));
        }
        if let Drive::EpsFront { beta, eps, gamma, .. } = drive {
            if !(beta > 1.0 && beta < 2.0) {
                return Err(invalid("beta", format!("requires 1 < beta < 2, got {beta}")));
            }
            if !(eps > 0.0 && eps < 1.0) {
                return Err(invalid("eps", format!("requires 0 < eps < 1, got {eps}")));
            }
            crate::noise::validate_gamma(gamma)?;
        }
        Ok(FlowParams { dim, c0: crate::wave::c0(), drive, curvature_scale: 1.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_cases() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -2.0]);
        assert!((g_eval(&a, 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(g_eval(&DMatrix::zeros(3, 3), 0.7).unwrap(), 0.0);
        let s = DMatrix::from_element(1, 1, 2.0);
        assert!((g_eval(&s, 0.25).unwrap() - 2.0 / (1.0 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn diagonal_matches_sum_of_scalar_resolvents() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -0.5, 2.0]));
        let q = 0.2;
        let want: f64 = [1.0, -0.5, 2.0].iter().map(|l| l / (1.0 - q * l)).sum();
        assert!((g_eval(&a, q).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn focal_point_is_singular() {
        let s = DMatrix::from_element(1, 1, 2.0);
        assert!(matches!(g_eval(&s, 0.5), Err(Error::Singular { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![rng.gen_range(1.0..2.0), 0.1]));
        assert!(g_eval(&a, 1.0 / a[(0, 0)]).is_err());
    }

    #[test]
    fn rejects_large_or_non_square() {
        assert!(g_eval(&DMatrix::zeros(4, 4), 0.0).is_err());
        assert!(g_eval(&DMatrix::zeros(2, 3), 0.0).is_err());
    }

    #[test]
    fn beta_outside_range_rejected() {
        let d = Drive::EpsFront { eps: 0.05, gamma: 0.5, beta: 2.0, sign: Sign::Plus };
        assert!(FlowParams::new(2, d).is_err());
        assert!(FlowParams::new(1, Drive::LimitSde).is_err());
    }
}
