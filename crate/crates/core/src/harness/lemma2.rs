use rayon::prelude::*;
use serde::Serialize;

use super::{shared_path, ExperimentConfig};
use crate::error::Result;
use crate::fit::{holder_seminorm, sup_norm};
use crate::flow::Sign;
use crate::noise::{BrownianPath, MollifiedNoise};
use crate::wave::{c0, WaveTable};

/// Distances between the integrated front drift and the limit path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Row {
    pub eps: f64,
    /// `+1` or `-1`: the sign of the `eps^beta` correction.
    pub sign: f64,
    pub sup_dist: f64,
    /// Discrete `C^{0,1/4}` seminorm on `[0, T]`.
    pub holder_dist: f64,
}

/// Cumulative trapezoid values of `int_0^t eps^-1 c(eps xi^eps(s) + sign eps^beta) ds`
/// at `t_k = k step`, `k = 0..=round(t_end / step)`.
pub fn integrated_front_drift(
    noise: &MollifiedNoise<'_>,
    table: &WaveTable,
    beta: f64,
    sign: Sign,
    step: f64,
    t_end: f64,
) -> Result<Vec<f64>> {
    let eps = noise.epsilon();
    let shift = sign.value() * eps.powf(beta);
    let n = (t_end / step).round() as usize;
    let integrand: Vec<f64> = (0..=n)
        .map(|k| Ok(table.speed(eps * noise.xi(k as f64 * step)? + shift)? / eps))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for w in integrand.windows(2) {
        acc += 0.5 * step * (w[0] + w[1]);
        out.push(acc);
    }
    Ok(out)
}

/// For each `eps` and sign: `D(t) = c0^-1 int_0^t eps^-1 c(...) ds + W(t)` on
/// the grid of step `eps^gamma / 10`, reduced to its sup-norm and its
/// `C^{0,1/4}` seminorm over dyadic lags of at least four steps.
pub fn lemma2_on_path(
    path: &BrownianPath,
    eps_list: &[f64],
    gamma: f64,
    beta: f64,
    signs: &[Sign],
    t_end: f64,
) -> Result<Vec<Lemma2Row>> {
    let table = WaveTable::standard();
    let c0 = c0();
    let legs: Vec<(f64, Sign)> = eps_list.iter().flat_map(|&e| signs.iter().map(move |&s| (e, s))).collect();
    legs.par_iter()
        .map(|&(eps, sign)| {
            let noise = MollifiedNoise::new(path, eps, gamma)?;
            let step = noise.width() / 10.0;
            let drift = integrated_front_drift(&noise, table, beta, sign, step, t_end)?;
            let diff: Vec<f64> = drift
                .iter()
                .enumerate()
                .map(|(k, v)| v / c0 + path.value_at(k as f64 * step))
                .collect();
            Ok(Lemma2Row {
                eps,
                sign: sign.value(),
                sup_dist: sup_norm(&diff),
                holder_dist: holder_seminorm(&diff, step, 0.25, 4),
            })
        })
        .collect()
}

/// [`lemma2_on_path`] on the configured shared path, both signs.
pub fn lemma2_experiment(cfg: &ExperimentConfig) -> Result<Vec<Lemma2Row>> {
    cfg.validate()?;
    let eps = cfg.eps_sorted();
    let path = shared_path(cfg.seed, &eps, cfg.gamma, cfg.t_end)?;
    lemma2_on_path(&path, &eps, cfg.gamma, cfg.beta, &[Sign::Plus, Sign::Minus], cfg.t_end)
}
