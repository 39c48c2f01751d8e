use super::{stable_roots, DELTA0};
use crate::error::{invalid, Error, Result};
use crate::fit::line_fit;
use crate::potential::{reaction, reaction_deriv};
use crate::tridiag;

/// Discretization and iteration controls for [`solve_wave`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Half-length of the truncated domain `[-L, L]`.
    pub half_length: f64,
    /// Number of grid nodes (odd, so that `x = 0` is a node).
    pub nodes: usize,
    /// Max-norm tolerance on the discrete residual.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { half_length: 20.0, nodes: 4001, tol: 1e-10, max_iterations: 50 }
    }
}

/// Exponential envelope `|m(x) - m_+-| ~ a e^{-beta |x|}` fitted on the tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub a: f64,
    pub beta: f64,
    /// Largest relative misfit of the envelope on the fitted nodes.
    pub rel_residual: f64,
}

/// A traveling-wave profile on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    delta: f64,
    x0: f64,
    dx: f64,
    m_values: Vec<f64>,
    speed: f64,
    m_minus: f64,
    m_plus: f64,
    residual: f64,
    decay: DecayFit,
}

impl WaveProfile {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn m_minus(&self) -> f64 {
        self.m_minus
    }

    pub fn m_plus(&self) -> f64 {
        self.m_plus
    }

    pub fn values(&self) -> &[f64] {
        &self.m_values
    }

    pub fn half_length(&self) -> f64 {
        -self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m_values.len()).map(|i| self.x(i))
    }

    /// Max-norm of the discrete residual at the interior nodes.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn decay(&self) -> DecayFit {
        self.decay
    }

    /// Slope below which a profile counts as non-monotone: differences of a
    /// few ulps on a fully saturated tail are roundoff, not a turning point.
    fn slope_floor(&self) -> f64 {
        -8.0 * f64::EPSILON * self.m_plus.abs().max(self.m_minus.abs()) / self.dx
    }

    /// Smallest forward difference quotient of the nodal values.
    pub fn min_slope(&self) -> f64 {
        self.m_values.windows(2).map(|w| (w[1] - w[0]) / self.dx).fold(f64::INFINITY, f64::min)
    }

    /// Cubic (four-point Lagrange) interpolation; `m_-`/`m_+` beyond the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.m_values.len();
        let s = (x - self.x0) / self.dx;
        if s <= 0.0 {
            return if s < 0.0 { self.m_minus } else { self.m_values[0] };
        }
        if s >= (n - 1) as f64 {
            return if s > (n - 1) as f64 { self.m_plus } else { self.m_values[n - 1] };
        }
        let i = s.floor() as usize;
        let w = s - i as f64;
        if w == 0.0 {
            return self.m_values[i];
        }
        let j = i.clamp(1, n - 3) - 1;
        let t = s - j as f64;
        let v = &self.m_values[j..j + 4];
        // Lagrange basis on nodes 0, 1, 2, 3
        let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3]
    }

    /// The profile reflected through the origin: `x -> -m(-x)`, speed `-c`,
    /// which solves the problem for `-delta`.
    pub(crate) fn reflected(&self) -> WaveProfile {
        let mut m_values: Vec<f64> = self.m_values.iter().rev().map(|v| -v).collect();
        // keep the pinned midpoint exact
        let k = m_values.len() / 2;
        m_values[k] = -self.m_values[k];
        WaveProfile {
            delta: -self.delta,
            x0: self.x0,
            dx: self.dx,
            m_values,
            speed: -self.speed,
            m_minus: -self.m_plus,
            m_plus: -self.m_minus,
            residual: self.residual,
            decay: self.decay,
        }
    }
}

/// Discrete second and first derivative at node `i`: fourth-order centered
/// stencils in the interior, second-order next to the boundary.
#[inline]
fn stencils(m: &[f64], i: usize, dx: f64) -> (f64, f64) {
    let n = m.len();
    if i >= 2 && i + 2 < n {
        let d2 = (-m[i + 2] + 16.0 * m[i + 1] - 30.0 * m[i] + 16.0 * m[i - 1] - m[i - 2]) / (12.0 * dx * dx);
        let d1 = (-m[i + 2] + 8.0 * m[i + 1] - 8.0 * m[i - 1] + m[i - 2]) / (12.0 * dx);
        (d2, d1)
    } else {
        ((m[i + 1] - 2.0 * m[i] + m[i - 1]) / (dx * dx), (m[i + 1] - m[i - 1]) / (2.0 * dx))
    }
}

fn residuals(m: &[f64], c: f64, delta: f64, dx: f64, out: &mut [f64]) -> f64 {
    let n = m.len();
    let mut max = 0.0f64;
    for i in 1..n - 1 {
        let (d2, d1) = stencils(m, i, dx);
        let r = d2 + c * d1 + reaction(m[i]) + delta;
        out[i] = r;
        max = max.max(r.abs());
    }
    max
}

/// Solves for `(m(., delta), c(delta))`.
///
/// Unknowns are the interior nodal values and the speed `c`; the center
/// node is pinned to the midpoint of the stable roots. The residual uses
/// fourth-order centered differences; each correction solves the
/// second-order (tridiagonal) linearization, split at the pinned node into
/// two well-conditioned half-line systems coupled through `c`. Corrections
/// are damped by halving until the residual decreases.
pub fn solve_wave(delta: f64, opts: &SolveOptions) -> Result<WaveProfile> {
    let (m_minus, m_plus) = stable_roots(delta)?;
    let n = opts.nodes;
    if n < 9 || n % 2 == 0 {
        return Err(invalid("n", format!("need an odd node count >= 9, got {n}")));
    }
    if !(opts.half_length > 0.0) {
        return Err(invalid("L", "must be positive"));
    }
    let l = opts.half_length;
    let dx = 2.0 * l / (n - 1) as f64;
    let k = n / 2;
    let mid = 0.5 * (m_plus + m_minus);
    let half = 0.5 * (m_plus - m_minus);

    let mut m: Vec<f64> = (0..n)
        .map(|i| mid + half * ((-l + i as f64 * dx) / std::f64::consts::SQRT_2).tanh())
        .collect();
    m[0] = m_minus;
    m[n - 1] = m_plus;
    m[k] = mid;
    let mut c = 0.0;

    let mut res = vec![0.0; n];
    let mut trial_res = vec![0.0; n];
    let mut r_max = residuals(&m, c, delta, dx, &mut res);

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut bcol = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut trial = vec![0.0; n];

    let mut iterations = 0;
    while r_max > opts.tol {
        if iterations >= opts.max_iterations {
            return Err(Error::NewtonDivergence { iterations, residual: r_max });
        }
        iterations += 1;

        let inv_dx2 = 1.0 / (dx * dx);
        let adv = c / (2.0 * dx);
        for i in 1..n - 1 {
            sub[i] = inv_dx2 - adv;
            sup[i] = inv_dx2 + adv;
            diag[i] = -2.0 * inv_dx2 + reaction_deriv(m[i]);
            bcol[i] = stencils(&m, i, dx).1;
            y[i] = -res[i];
            z[i] = bcol[i];
        }
        // half-line systems with homogeneous Dirichlet data at 0, k and n-1
        for (lo, hi) in [(1, k), (k + 1, n - 1)] {
            let len = hi - lo;
            let mut lower = sub[lo..hi].to_vec();
            let mut upper = sup[lo..hi].to_vec();
            lower[0] = 0.0;
            upper[len - 1] = 0.0;
            tridiag::solve_in_place(&lower, &diag[lo..hi], &upper, &mut y[lo..hi], &mut scratch[..len]);
            tridiag::solve_in_place(&lower, &diag[lo..hi], &upper, &mut z[lo..hi], &mut scratch[..len]);
        }
        let denom = bcol[k] - sub[k] * z[k - 1] - sup[k] * z[k + 1];
        let dc = (-res[k] - sub[k] * y[k - 1] - sup[k] * y[k + 1]) / denom;

        let mut lambda = 1.0;
        loop {
            trial.copy_from_slice(&m);
            for i in (1..n - 1).filter(|&i| i != k) {
                trial[i] += lambda * (y[i] - dc * z[i]);
            }
            let c_trial = c + lambda * dc;
            let r_trial = residuals(&trial, c_trial, delta, dx, &mut trial_res);
            if r_trial < r_max || lambda < 1e-3 {
                std::mem::swap(&mut m, &mut trial);
                std::mem::swap(&mut res, &mut trial_res);
                c = c_trial;
                r_max = r_trial;
                break;
            }
            lambda *= 0.5;
        }
        if !r_max.is_finite() {
            return Err(Error::NewtonDivergence { iterations, residual: r_max });
        }
    }

    let mut profile = WaveProfile {
        delta,
        x0: -l,
        dx,
        m_values: m,
        speed: c,
        m_minus,
        m_plus,
        residual: r_max,
        decay: DecayFit { a: f64::NAN, beta: f64::NAN, rel_residual: f64::NAN },
    };
    let min_slope = profile.min_slope();
    if !(min_slope > profile.slope_floor()) {
        return Err(Error::NonMonotone { min_slope });
    }
    profile.decay = decay_fit(&profile)?;
    Ok(profile)
}

/// Least-squares fit of `log |m - m_+-|` against `|x|` on each tail.
///
/// The fit window is `L/2 <= |x| <= 7L/8`: the outer quarter of the grid on
/// each side, minus the last eighth where the Dirichlet truncation bends the
/// tail. The returned envelope takes the slower of the two rates and the
/// larger prefactor.
pub fn decay_fit(profile: &WaveProfile) -> Result<DecayFit> {
    let l = profile.half_length();
    let mut fits = Vec::with_capacity(2);
    for side in [-1.0, 1.0] {
        let target = if side > 0.0 { profile.m_plus } else { profile.m_minus };
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (x, m) in profile.grid().zip(profile.values()) {
            let ax = x * side;
            let gap = (m - target).abs();
            if ax >= 0.5 * l && ax <= 0.875 * l && gap > 1e-14 {
                xs.push(ax);
                ys.push(gap.ln());
            }
        }
        let (slope, intercept) =
            line_fit(&xs, &ys).ok_or_else(|| invalid("profile", "tail too short for a decay fit"))?;
        let (a, beta) = (intercept.exp(), -slope);
        let rel = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| ((a * (-beta * x).exp()) / y.exp() - 1.0).abs())
            .fold(0.0, f64::max);
        fits.push((a, beta, rel));
    }
    let beta = fits[0].1.min(fits[1].1);
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid("profile", format!("non-positive decay rate {beta}")));
    }
    Ok(DecayFit {
        a: fits[0].0.max(fits[1].0),
        beta,
        rel_residual: fits[0].2.max(fits[1].2),
    })
}

impl WaveProfile {
    /// Checks the profile invariants: admissible delta, residual, monotonicity.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.delta.abs() > DELTA0 {
            return Err(Error::DeltaOutOfRange { delta: self.delta, delta0: DELTA0 });
        }
        if self.residual > tol {
            return Err(Error::NewtonDivergence { iterations: 0, residual: self.residual });
        }
        let min_slope = self.min_slope();
        if !(min_slope > self.slope_floor()) {
            return Err(Error::NonMonotone { min_slope });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn tanh_kink_solves_unperturbed_equation() {
        // m = tanh(x/sqrt2): m'' = -m(1-m^2), f(m) = m(1-m^2); residual vanishes
        for x in [-3.0, -0.5, 0.0, 0.7, 2.0] {
            let h = 1e-4;
            let m = |x: f64| (x / SQRT_2).tanh();
            let d2 = (m(x + h) - 2.0 * m(x) + m(x - h)) / (h * h);
            assert!((d2 + reaction(m(x))).abs() < 1e-6);
        }
    }

    #[test]
    fn unperturbed_profile_is_tanh() {
        let p = solve_wave(0.0, &SolveOptions::default()).unwrap();
        let err = p
            .grid()
            .zip(p.values())
            .map(|(x, m)| (m - (x / SQRT_2).tanh()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "max nodal error {err}");
        assert!(p.speed().abs() <= 1e-8);
        assert!(p.residual() <= 1e-10);
    }

    #[test]
    fn profile_invariants_hold() {
        for delta in [-0.2, -0.05, 0.0, 0.1, 0.2] {
            let p = solve_wave(delta, &SolveOptions::default()).unwrap();
            p.validate(1e-10).unwrap();
            assert!(p.min_slope() > 0.0);
            let (first, last) = (p.values()[0], *p.values().last().unwrap());
            assert_eq!(first, p.m_minus());
            assert_eq!(last, p.m_plus());
            assert_eq!(p.eval(0.0), 0.5 * (p.m_minus() + p.m_plus()));
        }
    }

    #[test]
    fn speed_is_odd_in_delta() {
        let a = solve_wave(0.07, &SolveOptions::default()).unwrap();
        let b = solve_wave(-0.07, &SolveOptions::default()).unwrap();
        assert!((a.speed() + b.speed()).abs() < 1e-9);
    }

    #[test]
    fn speed_insensitive_to_domain_doubling() {
        let a = solve_wave(0.1, &SolveOptions::default()).unwrap();
        let opts = SolveOptions { half_length: 40.0, nodes: 8001, ..SolveOptions::default() };
        let b = solve_wave(0.1, &opts).unwrap();
        assert!((a.speed() - b.speed()).abs() < 1e-9, "{} vs {}", a.speed(), b.speed());
    }

    #[test]
    fn unperturbed_decay_rate_is_sqrt2() {
        let p = solve_wave(0.0, &SolveOptions::default()).unwrap();
        let d = p.decay();
        assert!((d.beta - SQRT_2).abs() < 0.01 * SQRT_2, "beta {}", d.beta);
        // 1 - tanh(x/sqrt2) ~ 2 e^{-sqrt2 x}
        assert!((d.a - 2.0).abs() < 0.05, "a {}", d.a);
        assert!(d.rel_residual < 0.1);
    }

    #[test]
    fn perturbed_decay_constants_exist() {
        let p = solve_wave(0.05, &SolveOptions::default()).unwrap();
        let d = decay_fit(&p).unwrap();
        assert!(d.a.is_finite() && d.a > 0.0);
        assert!(d.beta > 0.0);
    }

    #[test]
    fn rejects_even_grid_and_bad_delta() {
        let opts = SolveOptions { nodes: 4000, ..SolveOptions::default() };
        assert!(solve_wave(0.0, &opts).is_err());
        assert!(matches!(solve_wave(0.5, &SolveOptions::default()), Err(Error::DeltaOutOfRange { .. })));
    }

    #[test]
    fn reflection_solves_negated_problem() {
        let p = solve_wave(0.12, &SolveOptions::default()).unwrap();
        let q = solve_wave(-0.12, &SolveOptions::default()).unwrap();
        let r = p.reflected();
        let err = r.values().iter().zip(q.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn cubic_interpolation_is_exact_at_nodes_and_accurate_between() {
        let p = solve_wave(0.0, &SolveOptions::default()).unwrap();
        assert_eq!(p.eval(p.x(1234)), p.values()[1234]);
        for x in [-1.2345, 0.003, 0.5, 3.21] {
            assert!((p.eval(x) - (x / SQRT_2).tanh()).abs() < 2e-6);
        }
        assert_eq!(p.eval(-25.0), -1.0);
        assert_eq!(p.eval(25.0), 1.0);
    }
}
