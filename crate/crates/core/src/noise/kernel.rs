use std::sync::OnceLock;

use crate::quad::adaptive_simpson;

/// Below this value of `1 - x^2` the bump `exp(-1/(1-x^2))` underflows to 0.
const UNDERFLOW_GAP: f64 = 1.0 / 700.0;

/// Normalized bump `rho(x) = exp(-1/(1-x^2)) / Z` on `(-1, 1)`, zero elsewhere.
///
/// Besides the normalization the constructor caches `|rho|_{L^2}^2` and the
/// sup norms of the first two derivatives.
#[derive(Debug, Clone)]
pub struct MollifierKernel {
    inv_norm: f64,
    l2_norm_sq: f64,
    sup_deriv1: f64,
    sup_deriv2: f64,
}

#[inline]
fn bump(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= UNDERFLOW_GAP {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

impl MollifierKernel {
    /// The shared kernel instance.
    pub fn standard() -> &'static MollifierKernel {
        static KERNEL: OnceLock<MollifierKernel> = OnceLock::new();
        KERNEL.get_or_init(MollifierKernel::build)
    }

    fn build() -> Self {
        let z = adaptive_simpson(&bump, -1.0, 1.0, 1e-16);
        let mut k = MollifierKernel { inv_norm: 1.0 / z, l2_norm_sq: 0.0, sup_deriv1: 0.0, sup_deriv2: 0.0 };
        k.l2_norm_sq = adaptive_simpson(&|x| k.eval(x).powi(2), -1.0, 1.0, 1e-16);
        let n = 20_000;
        for i in 0..=n {
            let x = -1.0 + 2.0 * i as f64 / n as f64;
            k.sup_deriv1 = k.sup_deriv1.max(k.deriv1(x).abs());
            k.sup_deriv2 = k.sup_deriv2.max(k.deriv2(x).abs());
        }
        k
    }

    /// Normalization constant `1 / Z` with `Z = int exp(-1/(1-x^2)) dx`.
    pub fn normalization(&self) -> f64 {
        self.inv_norm
    }

    /// `|rho|_{L^2}^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_norm_sq
    }

    /// `sup |rho'|` (grid estimate).
    pub fn sup_deriv1(&self) -> f64 {
        self.sup_deriv1
    }

    /// `sup |rho''|` (grid estimate).
    pub fn sup_deriv2(&self) -> f64 {
        self.sup_deriv2
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.inv_norm * bump(x)
    }

    /// `rho'(x) = rho(x) * (-2x / s^2)` with `s = 1 - x^2`.
    #[inline]
    pub fn deriv1(&self, x: f64) -> f64 {
        let s = 1.0 - x * x;
        if s <= UNDERFLOW_GAP {
            return 0.0;
        }
        self.eval(x) * (-2.0 * x / (s * s))
    }

    /// `rho''(x) = rho(x) * (4x^2/s^4 - 2/s^2 - 8x^2/s^3)`.
    #[inline]
    pub fn deriv2(&self, x: f64) -> f64 {
        let s = 1.0 - x * x;
        if s <= UNDERFLOW_GAP {
            return 0.0;
        }
        let s2 = s * s;
        let x2 = x * x;
        self.eval(x) * (4.0 * x2 / (s2 * s2) - 2.0 / s2 - 8.0 * x2 / (s2 * s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::trapezoid;

    #[test]
    fn compact_support() {
        let k = MollifierKernel::standard();
        for x in [1.0, -1.0, 1.5, -3.0, 1.0 + 1e-12] {
            assert_eq!(k.eval(x), 0.0);
            assert_eq!(k.deriv1(x), 0.0);
            assert_eq!(k.deriv2(x), 0.0);
        }
    }

    #[test]
    fn symmetric() {
        let k = MollifierKernel::standard();
        for x in [0.0, 0.1, 0.3, 0.77, 0.999] {
            assert_eq!(k.eval(x), k.eval(-x));
            assert_eq!(k.deriv1(x), -k.deriv1(-x));
            assert_eq!(k.deriv2(x), k.deriv2(-x));
        }
    }

    #[test]
    fn unit_mass_by_independent_trapezoid() {
        // trapezoid is spectrally accurate for this compactly supported bump
        let k = MollifierKernel::standard();
        let m = trapezoid(|x| k.eval(x), -1.0, 1.0, 4000);
        assert!((m - 1.0).abs() < 1e-10, "mass {m}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let k = MollifierKernel::standard();
        let h = 1e-5;
        for x in [-0.8, -0.4, 0.0, 0.2, 0.55, 0.9] {
            let d1 = (k.eval(x + h) - k.eval(x - h)) / (2.0 * h);
            let d2 = (k.eval(x + h) - 2.0 * k.eval(x) + k.eval(x - h)) / (h * h);
            assert!((d1 - k.deriv1(x)).abs() < 1e-6 * (1.0 + d1.abs()), "x={x}");
            assert!((d2 - k.deriv2(x)).abs() < 1e-3 * (1.0 + d2.abs()), "x={x}");
        }
    }

    #[test]
    fn cached_norms() {
        let k = MollifierKernel::standard();
        let l2 = trapezoid(|x| k.eval(x).powi(2), -1.0, 1.0, 4000);
        assert!((k.l2_norm_sq() - l2).abs() < 1e-10);
        assert!(k.sup_deriv1() > 0.0 && k.sup_deriv2() > k.sup_deriv1());
    }
}
