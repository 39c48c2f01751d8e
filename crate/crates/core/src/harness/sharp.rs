use rayon::prelude::*;
use serde::Serialize;

use super::{shared_path, ConvergenceReport, ExperimentConfig, GeometryKind, ReportRow};
use crate::allen_cahn::{init_front, l2_distance_to_indicator, run_with, Geometry, RunConfig, StopReason, StopRule};
use crate::error::{Error, Result};
use crate::flow::{radius_sde, Drive, FlowParams, SdeConfig};
use crate::noise::{BrownianPath, MollifiedNoise};

/// Phase-field versus radius-law comparison for one `eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpRow {
    pub eps: f64,
    /// `sup_t |R_AC - R_SDE|` over the common interval.
    pub sup_radius_gap: f64,
    /// `sup_t || u - chi_{R_SDE} ||_{L^2}` over the common interval.
    pub sup_l2_dist: f64,
    /// End of the common comparison interval.
    pub tau: f64,
    pub samples: usize,
    /// Every recorded sample of this leg.
    #[serde(skip)]
    pub trace: Vec<SimSample>,
}

/// One recorded time of a phase-field run next to the radius law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSample {
    pub t: f64,
    /// Radius of the phase-field interface.
    pub radius: f64,
    /// Radius law on the same path.
    pub radius_sde: f64,
    /// `|| u - chi_{R_SDE} ||_{L^2}`.
    pub l2_dist: f64,
    /// Forcing of the step that produced the sample.
    pub xi: f64,
}

/// A phase-field run compared with the radius law at one `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub eps: f64,
    pub samples: Vec<SimSample>,
    /// Last time at which both solvers are inside the stopping rules.
    pub valid_until: f64,
    pub stop: StopReason,
}

fn interp(times: &[f64], values: &[f64], t: f64) -> Option<f64> {
    let last = *times.last()?;
    if t > last + 1e-12 || t < times[0] {
        return None;
    }
    let k = times.partition_point(|&s| s < t);
    if k == 0 || times[k] == t {
        return Some(values[k.min(times.len() - 1)]);
    }
    let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
    Some(values[k - 1] * (1.0 - w) + values[k] * w)
}

/// Runs the phase field from the kink profile of radius `R0` on `path` and
/// the radius law on the same path, both under the stopping rules with
/// curvature bound `N`; roughly 100 samples are recorded.
pub fn simulate(path: &BrownianPath, cfg: &ExperimentConfig, eps: f64) -> Result<Simulation> {
    let geometry = match cfg.geometry {
        GeometryKind::Radial => Geometry::default_radial(eps, cfg.dim)?,
        GeometryKind::Rect2d => Geometry::default_rect(eps)?,
    };
    let n_curv = cfg.n_curv();
    let inradius = geometry.inradius();
    let mut run_cfg = RunConfig::new(&geometry, eps, cfg.t_end, 1);
    run_cfg.stop = StopRule::for_eps(eps, Some(n_curv));
    let steps = (cfg.t_end / run_cfg.dt).ceil() as usize;
    run_cfg.record_every = (steps / 100).max(1);
    let dt = cfg.t_end / steps as f64;

    let zero;
    let sde_path = if cfg.noise {
        path
    } else {
        zero = BrownianPath::from_fn(path.t_min(), path.t_max(), path.dt(), |_| 0.0)?;
        &zero
    };
    let params = FlowParams::new(cfg.dim, Drive::LimitSde)?;
    let sde = radius_sde(cfg.r0, sde_path, &params, &SdeConfig { dt, t_end: cfg.t_end, floor: 5.0 * eps })?;
    // truncate the radius law at the same stopping rule as the phase field
    let mut sde_end = sde.times.len();
    for (k, &r) in sde.radii.iter().enumerate() {
        if r < 5.0 * eps || inradius - r < 5.0 * eps || 1.0 / r > n_curv {
            sde_end = k;
            break;
        }
    }
    let (sde_t, sde_r) = (&sde.times[..sde_end], &sde.radii[..sde_end]);
    if sde_t.is_empty() {
        return Err(Error::EmptyTrace);
    }

    let noise = MollifiedNoise::new(path, eps, cfg.gamma)?;
    let field = init_front(geometry, eps, cfg.r0)?;
    let mut samples = Vec::new();
    let forcing = |t: f64| if cfg.noise { noise.xi(t) } else { Ok(0.0) };
    let (_, trace) = run_with(field, forcing, &run_cfg, |f, r| {
        let t = f.time();
        if let (Some(radius), Some(radius_sde)) = (r, interp(sde_t, sde_r, t)) {
            let l2_dist = l2_distance_to_indicator(f, radius_sde);
            samples.push(SimSample { t, radius, radius_sde, l2_dist, xi: if t > 0.0 { forcing(t - 0.5 * dt)? } else { 0.0 } });
        }
        Ok(())
    })?;
    let ac_end = trace.times.last().copied().unwrap_or(0.0);
    Ok(Simulation { eps, samples, valid_until: ac_end.min(*sde_t.last().unwrap()), stop: trace.stop })
}

/// Per-`eps` comparison of the phase field with the radius law on `path`.
///
/// All legs are compared over the common interval `[0, tau]`, `tau` the
/// earliest time at which any leg leaves its stopping rules.
pub fn sharp_interface_on_path(path: &BrownianPath, cfg: &ExperimentConfig) -> Result<Vec<SharpRow>> {
    cfg.validate()?;
    let eps = cfg.eps_sorted();
    let legs: Vec<Simulation> = eps.par_iter().map(|&e| simulate(path, cfg, e)).collect::<Result<_>>()?;
    let tau = legs.iter().map(|l| l.valid_until).fold(f64::INFINITY, f64::min);
    legs.into_iter()
        .map(|l| {
            let inside: Vec<&SimSample> = l.samples.iter().filter(|s| s.t <= tau + 1e-12).collect();
            if inside.is_empty() {
                return Err(Error::EmptyTrace);
            }
            Ok(SharpRow {
                eps: l.eps,
                sup_radius_gap: inside.iter().map(|s| (s.radius - s.radius_sde).abs()).fold(0.0, f64::max),
                sup_l2_dist: inside.iter().map(|s| s.l2_dist).fold(0.0, f64::max),
                tau,
                samples: inside.len(),
                trace: l.samples,
            })
        })
        .collect()
}

/// [`sharp_interface_on_path`] on the configured shared path, as a report.
pub fn sharp_interface_experiment(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let path = shared_path(cfg.seed, &cfg.eps, cfg.gamma, cfg.t_end)?;
    let rows = sharp_interface_on_path(&path, cfg)?;
    let mut report = ConvergenceReport::empty(cfg);
    report.tau = rows.first().map(|r| r.tau);
    report.rows = rows
        .iter()
        .map(|r| ReportRow {
            sup_l2_dist: Some(r.sup_l2_dist),
            sup_radius_gap: Some(r.sup_radius_gap),
            ..ReportRow::new(r.eps)
        })
        .collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_helper() {
        let t = [0.0, 1.0, 2.0];
        let v = [0.0, 10.0, 30.0];
        assert_eq!(interp(&t, &v, 0.0), Some(0.0));
        assert_eq!(interp(&t, &v, 1.5), Some(20.0));
        assert_eq!(interp(&t, &v, 2.0), Some(30.0));
        assert_eq!(interp(&t, &v, 2.5), None);
    }

    #[test]
    fn deterministic_leg_tracks_exact_law() {
        let cfg = ExperimentConfig {
            eps: vec![0.08, 0.04],
            noise: false,
            r0: 0.5,
            t_end: 0.03,
            ..ExperimentConfig::default()
        };
        let path = shared_path(cfg.seed, &cfg.eps, cfg.gamma, cfg.t_end).unwrap();
        let rows = sharp_interface_on_path(&path, &cfg).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!(r.sup_radius_gap < 3.0 * r.eps, "eps={} gap={}", r.eps, r.sup_radius_gap);
            for s in &r.trace {
                assert!((s.radius_sde - (0.25 - 2.0 * s.t).sqrt()).abs() < 1e-3);
            }
        }
    }
}
