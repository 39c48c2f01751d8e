use super::{extract_interface, Interface, Polyline, ScalarField, Stepper};
use crate::error::{invalid, Error, Result};
use crate::noise::MollifiedNoise;

/// Early-stopping thresholds standing in for the regularity stopping time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub min_radius: f64,
    pub boundary_margin: f64,
    /// Stop when the curvature proxy `1 / radius` exceeds this bound.
    pub max_curvature: Option<f64>,
}

impl StopRule {
    /// Radius and boundary margin `5 eps`, optional curvature bound.
    pub fn for_eps(eps: f64, max_curvature: Option<f64>) -> StopRule {
        StopRule { min_radius: 5.0 * eps, boundary_margin: 5.0 * eps, max_curvature }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    EndTime,
    MinRadius,
    BoundaryMargin,
    Curvature,
    InterfaceVanished,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub eps: f64,
    /// Upper bound on the step; the run uses `t_end / ceil(t_end / dt)`.
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub stop: StopRule,
}

impl RunConfig {
    /// Stable step for `geometry`, samples every `record_every` steps.
    pub fn new(geometry: &super::Geometry, eps: f64, t_end: f64, record_every: usize) -> RunConfig {
        RunConfig {
            eps,
            dt: geometry.stable_dt(eps),
            t_end,
            record_every,
            stop: StopRule::for_eps(eps, None),
        }
    }
}

/// Interface samples of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceTrace {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    /// Zero-level curves per sample (empty for radial runs).
    pub polylines: Vec<Vec<Polyline>>,
    /// Forcing value used by the step that produced each sample.
    pub xi: Vec<f64>,
    pub stop: StopReason,
}

impl InterfaceTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn violated(rule: &StopRule, interface: &Interface, inradius: f64) -> Option<StopReason> {
    let r = interface.radius();
    if r < rule.min_radius {
        return Some(StopReason::MinRadius);
    }
    if inradius - interface.outer_extent() < rule.boundary_margin {
        return Some(StopReason::BoundaryMargin);
    }
    match rule.max_curvature {
        Some(n) if 1.0 / r > n => Some(StopReason::Curvature),
        _ => None,
    }
}

/// Steps `field` to `cfg.t_end` with forcing `xi(t)` sampled at step
/// midpoints. At `t = 0`, every `record_every` steps and at the end, the
/// interface is extracted and `observer(field, radius)` is called; a sample
/// that breaks the stop rule ends the run without being recorded.
pub fn run_with(
    mut field: ScalarField,
    mut xi: impl FnMut(f64) -> Result<f64>,
    cfg: &RunConfig,
    mut observer: impl FnMut(&ScalarField, Option<f64>) -> Result<()>,
) -> Result<(ScalarField, InterfaceTrace)> {
    if !(cfg.t_end > 0.0) || cfg.record_every == 0 {
        return Err(invalid("T", "need T > 0 and record_every >= 1"));
    }
    let steps = (cfg.t_end / cfg.dt).ceil().max(1.0) as usize;
    let dt = cfg.t_end / steps as f64;
    let stepper = Stepper::new(field.geometry(), cfg.eps, dt)?;
    let inradius = field.geometry().inradius();
    let rect = matches!(field.geometry(), super::Geometry::Rect2d { .. });
    let t0 = field.time();
    let mut trace = InterfaceTrace {
        times: Vec::new(),
        radii: Vec::new(),
        polylines: Vec::new(),
        xi: Vec::new(),
        stop: StopReason::EndTime,
    };
    let mut last_xi = 0.0;
    for k in 0..=steps {
        if k > 0 {
            let t = t0 + (k - 1) as f64 * dt;
            last_xi = xi(t + 0.5 * dt)?;
            stepper.step(&mut field, last_xi)?;
            field.set_time(t0 + k as f64 * dt);
        }
        if k % cfg.record_every != 0 && k != steps {
            continue;
        }
        match extract_interface(&field) {
            Ok(interface) => {
                if let Some(reason) = violated(&cfg.stop, &interface, inradius) {
                    trace.stop = reason;
                    break;
                }
                let r = interface.radius();
                observer(&field, Some(r))?;
                trace.times.push(field.time());
                trace.radii.push(r);
                trace.xi.push(last_xi);
                if rect {
                    if let Interface::Polylines(lines) = interface {
                        trace.polylines.push(lines);
                    }
                }
            }
            Err(Error::NoInterface) => {
                if !trace.is_empty() {
                    trace.stop = StopReason::InterfaceVanished;
                    break;
                }
                observer(&field, None)?;
            }
            Err(e) => return Err(e),
        }
    }
    Ok((field, trace))
}

/// [`run_with`] driven by mollified noise, or unforced when `noise` is `None`.
pub fn run(
    field: ScalarField,
    noise: Option<&MollifiedNoise<'_>>,
    cfg: &RunConfig,
) -> Result<(ScalarField, InterfaceTrace)> {
    match noise {
        Some(n) => run_with(field, |t| n.xi(t), cfg, |_, _| Ok(())),
        None => run_with(field, |_| Ok(0.0), cfg, |_, _| Ok(())),
    }
}
