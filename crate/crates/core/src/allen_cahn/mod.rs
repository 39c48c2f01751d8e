//! The stochastic Allen-Cahn equation
//! `u_t = Lap u + eps^-2 f(u) + eps^-1 xi(t)` with homogeneous Neumann data.
//!
//! Two geometries share one stepper: a cell-centered square grid and a
//! radially symmetric grid in any dimension `n >= 2`. Each step applies the
//! reaction and the space-constant forcing pointwise (one classical RK4
//! substep), then the diffusion implicitly.

mod interface;
mod run;

pub use interface::{extract_interface, l2_distance_to_indicator, Interface, Polyline};
pub use run::{run, run_with, InterfaceTrace, RunConfig, StopReason, StopRule};

use crate::error::{invalid, Error, Result};
use crate::tridiag::Factored;
use crate::wave;

/// Grid layout. Rect grids are cell-centered on `[x_min, x_min + nx h] x
/// [y_min, y_min + ny h]`; radial grids are cell-centered on `[0, nr dr]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Rect2d { nx: usize, ny: usize, h: f64, x_min: f64, y_min: f64 },
    Radial { nr: usize, dr: f64, dim: usize },
}

impl Geometry {
    /// The square `[-half_width, half_width]^2` with spacing close to `h`.
    pub fn square(half_width: f64, h: f64) -> Result<Geometry> {
        if !(half_width > 0.0 && h > 0.0 && h < half_width) {
            return Err(invalid("h", format!("need 0 < h < half-width, got h={h}, half-width={half_width}")));
        }
        let n = (2.0 * half_width / h).round() as usize;
        let h = 2.0 * half_width / n as f64;
        Ok(Geometry::Rect2d { nx: n, ny: n, h, x_min: -half_width, y_min: -half_width })
    }

    /// The ball of radius `r_max` in dimension `dim`, spacing close to `dr`.
    pub fn radial(r_max: f64, dr: f64, dim: usize) -> Result<Geometry> {
        if dim < 2 {
            return Err(invalid("dim", format!("radial geometry needs n >= 2, got {dim}")));
        }
        if !(r_max > 0.0 && dr > 0.0 && dr < r_max) {
            return Err(invalid("dr", format!("need 0 < dr < r_max, got dr={dr}")));
        }
        let nr = (r_max / dr).round() as usize;
        Ok(Geometry::Radial { nr, dr: r_max / nr as f64, dim })
    }

    /// Default square `[-1, 1]^2` with `h = eps / 8`.
    pub fn default_rect(eps: f64) -> Result<Geometry> {
        Geometry::square(1.0, eps / 8.0)
    }

    /// Default ball of radius 2 with `dr = eps / 8`.
    pub fn default_radial(eps: f64, dim: usize) -> Result<Geometry> {
        Geometry::radial(2.0, eps / 8.0, dim)
    }

    pub fn len(&self) -> usize {
        match *self {
            Geometry::Rect2d { nx, ny, .. } => nx * ny,
            Geometry::Radial { nr, .. } => nr,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        match *self {
            Geometry::Rect2d { h, .. } => h,
            Geometry::Radial { dr, .. } => dr,
        }
    }

    /// Spatial dimension of the modeled domain.
    pub fn dim(&self) -> usize {
        match *self {
            Geometry::Rect2d { .. } => 2,
            Geometry::Radial { dim, .. } => dim,
        }
    }

    /// Largest centered ball contained in the domain.
    pub fn inradius(&self) -> f64 {
        match *self {
            Geometry::Rect2d { nx, ny, h, x_min, y_min } => {
                let xs = [-x_min, x_min + nx as f64 * h, -y_min, y_min + ny as f64 * h];
                xs.into_iter().fold(f64::INFINITY, f64::min)
            }
            Geometry::Radial { nr, dr, .. } => nr as f64 * dr,
        }
    }

    /// Time step `min(0.2 eps^2, 0.5 h^2)`.
    pub fn stable_dt(&self, eps: f64) -> f64 {
        let h = self.spacing();
        (0.2 * eps * eps).min(0.5 * h * h)
    }

    /// Coordinates of node `k`: `[x, y]` for rect grids, `[r]` for radial ones.
    pub fn position(&self, k: usize) -> ([f64; 2], usize) {
        match *self {
            Geometry::Rect2d { nx, h, x_min, y_min, .. } => {
                let (i, j) = (k % nx, k / nx);
                ([x_min + (i as f64 + 0.5) * h, y_min + (j as f64 + 0.5) * h], 2)
            }
            Geometry::Radial { dr, .. } => ([(k as f64 + 0.5) * dr, 0.0], 1),
        }
    }

    /// Distance of node `k` from the origin.
    pub fn radius_of(&self, k: usize) -> f64 {
        let (p, d) = self.position(k);
        if d == 2 {
            p[0].hypot(p[1])
        } else {
            p[0]
        }
    }

    /// Measure of the cell around node `k` (for radial grids, of the shell).
    pub fn cell_measure(&self, k: usize) -> f64 {
        match *self {
            Geometry::Rect2d { h, .. } => h * h,
            Geometry::Radial { dr, dim, .. } => {
                let (lo, hi) = (k as f64 * dr, (k + 1) as f64 * dr);
                sphere_area(dim) * (hi.powi(dim as i32) - lo.powi(dim as i32)) / dim as f64
            }
        }
    }
}

/// Surface area of the unit sphere in `R^n`.
pub(crate) fn sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    let (mut area, mut k) = if n % 2 == 0 { (2.0 * PI, 2) } else { (4.0 * PI, 3) };
    while k < n {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Values of the order parameter on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    geometry: Geometry,
    values: Vec<f64>,
    time: f64,
}

impl ScalarField {
    pub fn new(geometry: Geometry, values: Vec<f64>, time: f64) -> Result<ScalarField> {
        if values.len() != geometry.len() {
            return Err(invalid("values", format!("expected {} values, got {}", geometry.len(), values.len())));
        }
        Ok(ScalarField { geometry, values, time })
    }

    /// Samples `f` at every node; `f` receives `[x, y]` or `[r]`.
    pub fn from_fn(geometry: Geometry, f: impl Fn(&[f64]) -> f64) -> ScalarField {
        let values = (0..geometry.len())
            .map(|k| {
                let (p, d) = geometry.position(k);
                f(&p[..d])
            })
            .collect();
        ScalarField { geometry, values, time: 0.0 }
    }

    pub fn constant(geometry: Geometry, value: f64) -> ScalarField {
        let values = vec![value; geometry.len()];
        ScalarField { geometry, values, time: 0.0 }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Integral of `u` over the domain (midpoint rule).
    pub fn integral(&self) -> f64 {
        self.values.iter().enumerate().map(|(k, v)| v * self.geometry.cell_measure(k)).sum()
    }
}

/// Initial front `u0(x) = m(d0(x)/eps, 0)` for a signed distance `d0`
/// (negative inside).
pub fn init_from_distance(geometry: Geometry, eps: f64, d0: impl Fn(&[f64]) -> f64) -> ScalarField {
    let kink = wave::kink();
    ScalarField::from_fn(geometry, |p| kink.eval(d0(p) / eps))
}

/// Initial front around the centered sphere of radius `r0`.
pub fn init_front(geometry: Geometry, eps: f64, r0: f64) -> Result<ScalarField> {
    let (lo, hi) = (5.0 * eps, geometry.inradius() - 5.0 * eps);
    if !(r0 >= lo && r0 <= hi) {
        return Err(Error::NotResolvable { r0, lo, hi });
    }
    Ok(init_from_distance(geometry, eps, |p| p.iter().map(|x| x * x).sum::<f64>().sqrt() - r0))
}

/// One time step for a fixed geometry, `eps` and `dt`, with the implicit
/// diffusion operators factored once.
#[derive(Debug, Clone)]
pub struct Stepper {
    geometry: Geometry,
    eps: f64,
    dt: f64,
    solve_x: Factored,
    solve_y: Option<Factored>,
    /// Off-diagonals of the radial system `I - dt L` (empty for rect grids).
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// `out[i] = a (u[i-1] - 2 u[i] + u[i+1])` with mirrored ends.
fn second_difference(u: &[f64], a: f64, out: &mut [f64]) {
    let n = u.len();
    for i in 0..n {
        let lo = if i == 0 { u[0] } else { u[i - 1] };
        let hi = if i + 1 == n { u[n - 1] } else { u[i + 1] };
        out[i] = a * (lo - 2.0 * u[i] + hi);
    }
}

fn neumann_1d(n: usize, a: f64) -> Factored {
    let lower = vec![-a; n];
    let upper = vec![-a; n];
    let mut diag = vec![1.0 + 2.0 * a; n];
    diag[0] = 1.0 + a;
    diag[n - 1] = 1.0 + a;
    Factored::new(&lower, &diag, &upper)
}

fn radial_operator(nr: usize, dr: f64, dim: usize, dt: f64) -> (Factored, Vec<f64>, Vec<f64>) {
    let p = dim as i32;
    let face = |i: usize| (i as f64 * dr).powi(p - 1);
    let mut lower = vec![0.0; nr];
    let mut diag = vec![0.0; nr];
    let mut upper = vec![0.0; nr];
    for i in 0..nr {
        let vol = ((i + 1) as f64 * dr).powi(p) - (i as f64 * dr).powi(p);
        let scale = dt * dim as f64 / (dr * vol);
        let inner = if i == 0 { 0.0 } else { face(i) * scale };
        let outer = if i + 1 == nr { 0.0 } else { face(i + 1) * scale };
        lower[i] = -inner;
        upper[i] = -outer;
        diag[i] = 1.0 + inner + outer;
    }
    (Factored::new(&lower, &diag, &upper), lower, upper)
}

impl Stepper {
    pub fn new(geometry: &Geometry, eps: f64, dt: f64) -> Result<Stepper> {
        if !(eps > 0.0) {
            return Err(invalid("eps", "must be positive"));
        }
        let limit = geometry.stable_dt(eps);
        if !(dt > 0.0 && dt <= limit * (1.0 + 1e-9)) {
            return Err(Error::Cfl { dt, limit });
        }
        let (solve_x, solve_y, lower, upper) = match *geometry {
            Geometry::Rect2d { nx, ny, h, .. } => {
                let a = dt / (h * h);
                (neumann_1d(nx, a), Some(neumann_1d(ny, a)), Vec::new(), Vec::new())
            }
            Geometry::Radial { nr, dr, dim } => {
                let (f, lower, upper) = radial_operator(nr, dr, dim, dt);
                (f, None, lower, upper)
            }
        };
        Ok(Stepper { geometry: geometry.clone(), eps, dt, solve_x, solve_y, lower, upper })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Advances `field` by `dt` with forcing value `xi` held constant.
    pub fn step(&self, field: &mut ScalarField, xi: f64) -> Result<()> {
        if field.geometry != self.geometry {
            return Err(invalid("field", "geometry does not match the stepper"));
        }
        let a = 1.0 / (self.eps * self.eps);
        let b = xi / self.eps;
        let dt = self.dt;
        let g = |u: f64| a * (u - u * u * u) + b;
        for u in field.values.iter_mut() {
            let k1 = g(*u);
            let k2 = g(*u + 0.5 * dt * k1);
            let k3 = g(*u + 0.5 * dt * k2);
            let k4 = g(*u + dt * k3);
            *u += dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        }
        match self.geometry {
            Geometry::Rect2d { nx, ny, .. } => {
                let a = self.dt / (self.geometry.spacing() * self.geometry.spacing());
                // increment form keeps constants exactly fixed
                let u = &mut field.values;
                let mut inc = vec![0.0; nx * ny];
                for (row, out) in u.chunks_exact(nx).zip(inc.chunks_exact_mut(nx)) {
                    second_difference(row, a, out);
                    self.solve_x.solve_in_place(out);
                }
                for (v, d) in u.iter_mut().zip(&inc) {
                    *v += d;
                }
                for j in 0..ny {
                    for i in 0..nx {
                        let c = u[j * nx + i];
                        let lo = if j == 0 { c } else { u[(j - 1) * nx + i] };
                        let hi = if j + 1 == ny { c } else { u[(j + 1) * nx + i] };
                        inc[j * nx + i] = a * (lo - 2.0 * c + hi);
                    }
                }
                if let Some(sy) = &self.solve_y {
                    sy.solve_blocks(&mut inc, nx);
                }
                for (v, d) in u.iter_mut().zip(&inc) {
                    *v += d;
                }
            }
            Geometry::Radial { .. } => {
                let u = &mut field.values;
                let mut inc: Vec<f64> = (0..u.len())
                    .map(|i| {
                        let mut r = 0.0;
                        if i > 0 {
                            r -= self.lower[i] * (u[i - 1] - u[i]);
                        }
                        if i + 1 < u.len() {
                            r -= self.upper[i] * (u[i + 1] - u[i]);
                        }
                        r
                    })
                    .collect();
                self.solve_x.solve_in_place(&mut inc);
                for (v, d) in u.iter_mut().zip(&inc) {
                    *v += d;
                }
            }
        }
        field.time += dt;
        if let Some(k) = field.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { time: field.time, what: format!("u at node {k}") });
        }
        Ok(())
    }
}

/// Single step with a freshly built [`Stepper`].
pub fn step(field: &ScalarField, noise_value: f64, eps: f64, dt: f64) -> Result<ScalarField> {
    let stepper = Stepper::new(&field.geometry, eps, dt)?;
    let mut out = field.clone();
    stepper.step(&mut out, noise_value)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn radial_cells_partition_the_ball() {
        let g = Geometry::radial(1.0, 0.01, 3).unwrap();
        let total: f64 = (0..g.len()).map(|k| g.cell_measure(k)).sum();
        assert!((total - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn wells_and_zero_are_fixed_points() {
        for geometry in [Geometry::square(1.0, 0.05).unwrap(), Geometry::radial(1.0, 0.01, 2).unwrap()] {
            for v in [1.0, -1.0, 0.0] {
                let f = ScalarField::constant(geometry.clone(), v);
                let dt = geometry.stable_dt(0.1);
                let out = step(&f, 0.0, 0.1, dt).unwrap();
                assert!(out.values().iter().all(|&u| u == v), "v={v}");
            }
        }
    }

    #[test]
    fn constant_field_follows_reaction_ode() {
        // exact solution of u' = a (u - u^3)
        let (eps, u0, t_end): (f64, f64, f64) = (0.1, 0.5, 0.01);
        let a = 1.0 / (eps * eps);
        let exact = u0 * (a * t_end).exp() / (1.0 - u0 * u0 + u0 * u0 * (2.0 * a * t_end).exp()).sqrt();
        let geometry = Geometry::default_radial(eps, 2).unwrap();
        let dt0 = geometry.stable_dt(eps);
        let n = (t_end / dt0).ceil() as usize;
        let stepper = Stepper::new(&geometry, eps, t_end / n as f64).unwrap();
        let mut f = ScalarField::constant(geometry, u0);
        for _ in 0..n {
            stepper.step(&mut f, 0.0).unwrap();
        }
        for &u in f.values() {
            assert!((u - exact).abs() < 1e-6, "{u} vs {exact}");
        }
    }

    #[test]
    fn pure_diffusion_conserves_mass() {
        // with eps huge the reaction is negligible; Neumann data means no flux
        for geometry in [Geometry::square(1.0, 0.05).unwrap(), Geometry::radial(1.0, 0.02, 3).unwrap()] {
            let f = ScalarField::from_fn(geometry.clone(), |p| 1e-3 * (3.0 * p[0]).sin());
            let stepper = Stepper::new(&geometry, 1e8, geometry.stable_dt(1e8)).unwrap();
            let mut g = f.clone();
            for _ in 0..50 {
                stepper.step(&mut g, 0.0).unwrap();
            }
            let rel = (g.integral() - f.integral()).abs() / 1e-3;
            assert!(rel < 1e-9, "{rel}");
        }
    }

    #[test]
    fn init_front_layer_values() {
        let eps = 0.04;
        let g = Geometry::default_radial(eps, 2).unwrap();
        let f = init_front(g.clone(), eps, 0.3).unwrap();
        for (k, &u) in f.values().iter().enumerate() {
            let d = g.radius_of(k) - 0.3;
            if d.abs() > 1e-12 {
                assert_eq!(u.signum(), d.signum());
            }
        }
        let kink = wave::kink();
        assert_eq!(kink.eval(0.0), 0.0);
        assert!((kink.eval(10.0) - (10.0 / SQRT_2).tanh()).abs() < 1e-7);
        assert!((kink.eval(10.0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn unresolvable_radius_rejected() {
        let g = Geometry::default_rect(0.04).unwrap();
        assert!(matches!(init_front(g.clone(), 0.04, 0.1), Err(Error::NotResolvable { .. })));
        assert!(matches!(init_front(g, 0.04, 0.9), Err(Error::NotResolvable { .. })));
    }

    #[test]
    fn oversized_step_rejected() {
        let g = Geometry::default_radial(0.04, 2).unwrap();
        let dt = 2.0 * g.stable_dt(0.04);
        assert!(matches!(Stepper::new(&g, 0.04, dt), Err(Error::Cfl { .. })));
    }

    #[test]
    fn nan_is_detected() {
        let g = Geometry::radial(1.0, 0.01, 2).unwrap();
        let f = ScalarField::constant(g.clone(), 0.0);
        let err = step(&f, f64::NAN, 0.1, g.stable_dt(0.1)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }
}
