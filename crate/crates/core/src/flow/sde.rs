use super::{Drive, FlowParams};
use crate::allen_cahn::{InterfaceTrace, StopReason};
use crate::error::{invalid, Result};
use crate::noise::{BrownianPath, MollifiedNoise};
use crate::wave::WaveTable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeConfig {
    pub dt: f64,
    pub t_end: f64,
    /// The trace ends when `R` drops below this.
    pub floor: f64,
}

/// Front radius under `params.drive`.
///
/// `LimitSde`: Euler-Maruyama for `dR = -(n-1)/R dt - c0 dW` with the
/// increments of `path`. `EpsFront`: explicit Euler for
/// `R' = -(n-1)/R + eps^-1 c(eps xi^eps + sign eps^beta)`, with `xi^eps`
/// sampled at step midpoints and `c` from the standard wave table.
pub fn radius_sde(r0: f64, path: &BrownianPath, params: &FlowParams, cfg: &SdeConfig) -> Result<InterfaceTrace> {
    if !(r0 > 0.0 && cfg.dt > 0.0 && cfg.t_end > 0.0) {
        return Err(invalid("R0", "need R0, dt and T positive"));
    }
    let steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let dt = cfg.t_end / steps as f64;
    let drift = (params.dim - 1) as f64 * params.curvature_scale;
    let noise = match params.drive {
        Drive::EpsFront { eps, gamma, .. } => Some(MollifiedNoise::new(path, eps, gamma)?),
        Drive::LimitSde => None,
    };
    let table = noise.as_ref().map(|_| WaveTable::standard());

    let mut trace = InterfaceTrace {
        times: vec![0.0],
        radii: vec![r0],
        polylines: Vec::new(),
        xi: vec![0.0],
        stop: StopReason::EndTime,
    };
    let mut r = r0;
    let mut w_prev = path.value_at(0.0);
    for k in 1..=steps {
        let t = k as f64 * dt;
        let (velocity_dt, forcing) = match (params.drive, &noise, table) {
            (Drive::EpsFront { eps, beta, sign, .. }, Some(n), Some(tab)) => {
                let xi = n.xi(t - 0.5 * dt)?;
                let c = tab.speed(eps * xi + sign.value() * eps.powf(beta))?;
                (dt * c / eps, xi)
            }
            _ => {
                let w = path.value_at(t);
                let dw = w - w_prev;
                w_prev = w;
                (-params.c0 * dw, dw / dt)
            }
        };
        r += -drift / r * dt + velocity_dt;
        if !(r >= cfg.floor) {
            trace.stop = StopReason::MinRadius;
            break;
        }
        trace.times.push(t);
        trace.radii.push(r);
        trace.xi.push(forcing);
    }
    Ok(trace)
}
