use super::{validate_gamma, BrownianPath, MollifierKernel};
use crate::error::{invalid, Error, Result};

/// Minimum number of path samples per kernel half-width.
pub(crate) const MIN_SAMPLES_PER_HALF_WIDTH: f64 = 20.0;

/// The mollified view `(path, eps, gamma)` with kernel half-width `eps^gamma`.
///
/// All evaluations are trapezoid sums on the path grid; since the kernel and
/// all its derivatives vanish at the window ends this is the full trapezoid
/// rule without end corrections.
#[derive(Debug, Clone, Copy)]
pub struct MollifiedNoise<'a> {
    path: &'a BrownianPath,
    epsilon: f64,
    gamma: f64,
    width: f64,
}

impl<'a> MollifiedNoise<'a> {
    pub fn new(path: &'a BrownianPath, epsilon: f64, gamma: f64) -> Result<Self> {
        validate_gamma(gamma)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid("eps", format!("requires 0 < eps < 1, got {epsilon}")));
        }
        let width = epsilon.powf(gamma);
        if path.dt() > width / MIN_SAMPLES_PER_HALF_WIDTH {
            return Err(invalid(
                "dt",
                format!("path step {} too coarse for kernel half-width {width}", path.dt()),
            ));
        }
        Ok(MollifiedNoise { path, epsilon, gamma, width })
    }

    /// Path step giving 160 samples per kernel half-width at scale `eps`.
    pub fn recommended_dt(epsilon: f64, gamma: f64) -> f64 {
        epsilon.powf(gamma) / 160.0
    }

    pub fn path(&self) -> &'a BrownianPath {
        self.path
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Kernel half-width `eps^gamma`; the correlation length is twice this.
    pub fn width(&self) -> f64 {
        self.width
    }

    /// Checks that `[t - eps^gamma, t + eps^gamma]` lies inside the path grid.
    pub fn check_window(&self, t: f64) -> Result<()> {
        let (lo, hi) = (t - self.width, t + self.width);
        if lo < self.path.t_min() || hi > self.path.t_max() || !t.is_finite() {
            return Err(Error::WindowOutsidePath {
                lo,
                hi,
                t_min: self.path.t_min(),
                t_max: self.path.t_max(),
            });
        }
        Ok(())
    }

    /// Trapezoid sum of `kernel((t - s)/width) * (W(s) - W_ref)` plus the exact
    /// contribution `mass * W_ref` of the constant part, with `W_ref` the path
    /// value at the node nearest to `t`.
    fn convolve(&self, t: f64, kernel: impl Fn(f64) -> f64, scale: f64, mass: f64) -> Result<f64> {
        self.check_window(t)?;
        let p = self.path;
        let dt = p.dt();
        let z = p.zero_index() as f64;
        let lo = (((t - self.width) / dt + z).ceil().max(0.0)) as usize;
        let hi = (((t + self.width) / dt + z).floor() as usize).min(p.len() - 1);
        let inv_w = 1.0 / self.width;
        let values = p.values();
        let w_ref = values[((t / dt + z).round() as usize).min(p.len() - 1)];
        let mut acc = 0.0;
        for (j, w) in values.iter().enumerate().take(hi + 1).skip(lo) {
            acc += kernel((t - p.time(j)) * inv_w) * (w - w_ref);
        }
        Ok(acc * dt * scale + mass * w_ref)
    }

    /// `W^eps(t) = int rho^eps(t - s) W(s) ds`.
    pub fn w_eps(&self, t: f64) -> Result<f64> {
        let k = MollifierKernel::standard();
        self.convolve(t, |x| k.eval(x), 1.0 / self.width, 1.0)
    }

    /// `xi^eps(t) = int eps^{-2 gamma} rho'((t - s)/eps^gamma) W(s) ds`.
    pub fn xi(&self, t: f64) -> Result<f64> {
        let k = MollifierKernel::standard();
        self.convolve(t, |x| k.deriv1(x), self.width.powi(-2), 0.0)
    }

    /// `d/dt xi^eps(t) = int eps^{-3 gamma} rho''((t - s)/eps^gamma) W(s) ds`.
    pub fn xi_dot(&self, t: f64) -> Result<f64> {
        let k = MollifierKernel::standard();
        self.convolve(t, |x| k.deriv2(x), self.width.powi(-3), 0.0)
    }

    /// Theoretical variance `eps^{-gamma} |rho|_{L^2}^2` of `xi^eps(t)`.
    pub fn theoretical_variance(&self) -> f64 {
        MollifierKernel::standard().l2_norm_sq() / self.width
    }
}
