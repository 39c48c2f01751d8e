//! Browser bindings: traveling waves, mollified noise and a radial phase-field run.

use wasm_bindgen::prelude::*;

use sac_core::allen_cahn::{extract_interface, init_front, Geometry, ScalarField, Stepper};
use sac_core::harness::shared_path;
use sac_core::noise::MollifiedNoise;
use sac_core::wave::{solve_wave, SolveOptions};

fn js_err(e: sac_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Wave {
    speed: f64,
    x: Vec<f64>,
    m: Vec<f64>,
}

#[wasm_bindgen]
impl Wave {
    #[wasm_bindgen(getter)]
    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn m(&self) -> Vec<f64> {
        self.m.clone()
    }
}

/// Traveling wave for forcing `delta` on `[-L, L]` with `nodes` points.
#[wasm_bindgen]
pub fn wave_profile(delta: f64, half_length: f64, nodes: usize) -> Result<Wave, JsError> {
    let opts = SolveOptions { half_length, nodes, ..SolveOptions::default() };
    let w = solve_wave(delta, &opts).map_err(js_err)?;
    Ok(Wave { speed: w.speed(), x: w.grid().collect(), m: w.values().to_vec() })
}

#[wasm_bindgen]
pub struct NoiseSample {
    t: Vec<f64>,
    w: Vec<f64>,
    xi: Vec<f64>,
}

#[wasm_bindgen]
impl NoiseSample {
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    pub fn w(&self) -> Vec<f64> {
        self.w.clone()
    }

    pub fn xi(&self) -> Vec<f64> {
        self.xi.clone()
    }
}

/// Brownian path and its mollified derivative on `[0, T]` at `points` times.
#[wasm_bindgen]
pub fn noise_path(seed: u64, eps: f64, gamma: f64, t_end: f64, points: usize) -> Result<NoiseSample, JsError> {
    let path = shared_path(seed, &[eps], gamma, t_end).map_err(js_err)?;
    let noise = MollifiedNoise::new(&path, eps, gamma).map_err(js_err)?;
    let n = points.max(2);
    let t: Vec<f64> = (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect();
    let w = t.iter().map(|&s| path.value_at(s)).collect();
    let xi = t.iter().map(|&s| noise.xi(s)).collect::<Result<_, _>>().map_err(js_err)?;
    Ok(NoiseSample { t, w, xi })
}

/// A radial phase-field run stepped on demand.
#[wasm_bindgen]
pub struct RadialRun {
    field: ScalarField,
    stepper: Stepper,
    /// Forcing at the midpoints of the precomputed steps.
    forcing: Vec<f64>,
    step: usize,
}

#[wasm_bindgen]
impl RadialRun {
    /// Kink of radius `r0` on the ball of radius 2; the forcing covers `[0, T]`.
    #[wasm_bindgen(constructor)]
    pub fn new(eps: f64, r0: f64, dim: usize, seed: u64, gamma: f64, t_end: f64, noise: bool) -> Result<RadialRun, JsError> {
        let g = Geometry::default_radial(eps, dim).map_err(js_err)?;
        let dt = g.stable_dt(eps);
        let steps = (t_end / dt).ceil() as usize;
        let field = init_front(g.clone(), eps, r0).map_err(js_err)?;
        let stepper = Stepper::new(&g, eps, dt).map_err(js_err)?;
        let forcing = if noise {
            let path = shared_path(seed, &[eps], gamma, t_end + dt).map_err(js_err)?;
            let xi = MollifiedNoise::new(&path, eps, gamma).map_err(js_err)?;
            (0..steps).map(|k| xi.xi((k as f64 + 0.5) * dt)).collect::<Result<_, _>>().map_err(js_err)?
        } else {
            vec![0.0; steps]
        };
        Ok(RadialRun { field, stepper, forcing, step: 0 })
    }

    /// Advances up to `n` steps; returns `false` once the forcing is used up.
    pub fn advance(&mut self, n: usize) -> Result<bool, JsError> {
        for _ in 0..n {
            let Some(&xi) = self.forcing.get(self.step) else {
                return Ok(false);
            };
            self.stepper.step(&mut self.field, xi).map_err(js_err)?;
            self.step += 1;
            self.field.set_time(self.step as f64 * self.stepper.dt());
        }
        Ok(self.step < self.forcing.len())
    }

    #[wasm_bindgen(getter)]
    pub fn time(&self) -> f64 {
        self.field.time()
    }

    /// Interface radius, or `NaN` when the field has a single phase.
    #[wasm_bindgen(getter)]
    pub fn radius(&self) -> f64 {
        extract_interface(&self.field).map(|i| i.radius()).unwrap_or(f64::NAN)
    }

    #[wasm_bindgen(getter)]
    pub fn spacing(&self) -> f64 {
        self.field.geometry().spacing()
    }

    pub fn values(&self) -> Vec<f64> {
        self.field.values().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_run_shrinks_without_noise() {
        let mut run = RadialRun::new(0.08, 0.5, 2, 1, 0.5, 0.01, false).ok().unwrap();
        let r0 = run.radius();
        while run.advance(50).ok().unwrap() {}
        assert!(run.radius() < r0);
        assert!((run.time() - 0.01).abs() < 1e-3);
    }

    #[test]
    fn noise_sample_starts_at_zero() {
        let s = noise_path(3, 0.05, 0.5, 1.0, 101).ok().unwrap();
        assert_eq!(s.t().len(), 101);
        assert_eq!(s.w()[0], 0.0);
        assert!(s.xi().iter().all(|v| v.is_finite()));
    }
}
