//! Monte-Carlo statistics of the mollified noise over seeded path ensembles.

use rayon::prelude::*;

use super::{sample_brownian, BrownianPath, MollifiedNoise};
use crate::error::{invalid, Result};
use crate::fit::line_fit;

/// An ensemble of independent paths `base_seed, base_seed + 1, ...`.
///
/// Each path is probed at `probes_per_path` times spaced by
/// `3 eps^gamma + lag`, more than the correlation length apart, so all
/// probes are independent samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub epsilon: f64,
    pub gamma: f64,
    pub base_seed: u64,
    pub n_paths: usize,
    pub probes_per_path: usize,
}

fn probe_pairs(spec: &EnsembleSpec, lag: f64) -> Result<Vec<(f64, f64)>> {
    super::validate_gamma(spec.gamma)?;
    if spec.n_paths < 2 || spec.probes_per_path == 0 {
        return Err(invalid("n_samples", "need at least two paths and one probe per path"));
    }
    if !(lag >= 0.0) {
        return Err(invalid("lag", format!("must be non-negative, got {lag}")));
    }
    let h = spec.epsilon.powf(spec.gamma);
    let spacing = 3.0 * h + lag;
    let last = (spec.probes_per_path - 1) as f64 * spacing + lag;
    let dt = MollifiedNoise::recommended_dt(spec.epsilon, spec.gamma);
    let per_path: Result<Vec<Vec<(f64, f64)>>> = (0..spec.n_paths)
        .into_par_iter()
        .map(|i| {
            let path = sample_brownian(spec.base_seed + i as u64, -1.05 * h, last + 1.05 * h, dt)?;
            let noise = MollifiedNoise::new(&path, spec.epsilon, spec.gamma)?;
            (0..spec.probes_per_path)
                .map(|k| {
                    let t = k as f64 * spacing;
                    Ok((noise.xi(t)?, noise.xi(t + lag)?))
                })
                .collect()
        })
        .collect();
    Ok(per_path?.into_iter().flatten().collect())
}

/// Sample variance of `xi^eps(t)` over the ensemble.
pub fn empirical_variance(spec: &EnsembleSpec) -> Result<f64> {
    let xs: Vec<f64> = probe_pairs(spec, 0.0)?.into_iter().map(|p| p.0).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    Ok(xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Pearson correlation of `xi^eps(t)` and `xi^eps(t + lag)` over the ensemble.
pub fn empirical_correlation(spec: &EnsembleSpec, lag: f64) -> Result<f64> {
    let pairs = probe_pairs(spec, lag)?;
    let n = pairs.len() as f64;
    let (ma, mb) = pairs.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let (ma, mb) = (ma / n, mb / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        sab += (a - ma) * (b - mb);
        saa += (a - ma).powi(2);
        sbb += (b - mb).powi(2);
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Pathwise sup-norm scaling of `xi^eps` and its derivative over `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub eps: Vec<f64>,
    /// Geometric mean over paths of `sup |xi^eps|`.
    pub sup_xi: Vec<f64>,
    /// Geometric mean over paths of `sup |d/dt xi^eps|`.
    pub sup_xi_dot: Vec<f64>,
    /// Least-squares slope of `log sup |xi^eps|` against `log eps`;
    /// `None` when some sup vanishes (degenerate path).
    pub slope_xi: Option<f64>,
    pub slope_xi_dot: Option<f64>,
}

/// `(sup |xi^eps|, sup |d/dt xi^eps|)` over `[0, T]` on a grid of step `eps^gamma / 10`.
pub fn pathwise_sup(noise: &MollifiedNoise<'_>, t_end: f64) -> Result<(f64, f64)> {
    let step = noise.width() / 10.0;
    let n = (t_end / step + 1e-9).floor() as usize;
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for k in 0..=n {
        let t = k as f64 * step;
        a = a.max(noise.xi(t)?.abs());
        b = b.max(noise.xi_dot(t)?.abs());
    }
    Ok((a, b))
}

/// Sup-norm scaling on freshly sampled paths, one per seed.
///
/// Each path serves every `eps` (the comparison is pathwise). The sup is
/// taken over a grid of step `eps^gamma / 10`.
pub fn sup_noise_scaling(eps_list: &[f64], gamma: f64, t_end: f64, seeds: &[u64]) -> Result<ScalingFit> {
    super::validate_gamma(gamma)?;
    let (h_min, h_max) = width_range(eps_list, gamma)?;
    let paths: Result<Vec<BrownianPath>> = seeds
        .iter()
        .map(|&s| sample_brownian(s, -1.05 * h_max, t_end + 1.05 * h_max, MollifiedNoise::recommended_dt(h_min.powf(1.0 / gamma), gamma)))
        .collect();
    sup_noise_scaling_on_paths(&paths?, eps_list, gamma, t_end)
}

fn width_range(eps_list: &[f64], gamma: f64) -> Result<(f64, f64)> {
    if eps_list.len() < 2 {
        return Err(invalid("eps", "need at least two eps values"));
    }
    let widths = eps_list.iter().map(|e| e.powf(gamma));
    let h_min = widths.clone().fold(f64::INFINITY, f64::min);
    let h_max = widths.fold(0.0, f64::max);
    Ok((h_min, h_max))
}

/// As [`sup_noise_scaling`] on caller-supplied paths.
pub fn sup_noise_scaling_on_paths(
    paths: &[BrownianPath],
    eps_list: &[f64],
    gamma: f64,
    t_end: f64,
) -> Result<ScalingFit> {
    width_range(eps_list, gamma)?;
    if paths.is_empty() {
        return Err(invalid("seeds", "need at least one path"));
    }
    let mut sup_xi = Vec::with_capacity(eps_list.len());
    let mut sup_xi_dot = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let per_path: Result<Vec<(f64, f64)>> = paths
            .par_iter()
            .map(|p| pathwise_sup(&MollifiedNoise::new(p, eps, gamma)?, t_end))
            .collect();
        let per_path = per_path?;
        let n = per_path.len() as f64;
        let gm = |f: fn(&(f64, f64)) -> f64| (per_path.iter().map(|p| f(p).ln()).sum::<f64>() / n).exp();
        sup_xi.push(gm(|p| p.0));
        sup_xi_dot.push(gm(|p| p.1));
    }
    let log_eps: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let slope = |sups: &[f64]| {
        let ys: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
        line_fit(&log_eps, &ys).map(|(s, _)| s)
    };
    Ok(ScalingFit {
        eps: eps_list.to_vec(),
        slope_xi: slope(&sup_xi),
        slope_xi_dot: slope(&sup_xi_dot),
        sup_xi,
        sup_xi_dot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::MollifierKernel;
    use crate::quad::trapezoid;

    #[test]
    fn zero_lag_correlation_is_one() {
        let spec = EnsembleSpec { epsilon: 0.05, gamma: 0.5, base_seed: 0, n_paths: 200, probes_per_path: 2 };
        let c = empirical_correlation(&spec, 0.0).unwrap();
        assert!((c - 1.0).abs() < 0.02);
    }

    #[test]
    fn half_width_lag_correlation_matches_overlap_oracle() {
        // cov(xi(t), xi(t + l)) = int rho^eps(u) rho^eps(u + l) du
        let k = MollifierKernel::standard();
        let overlap = trapezoid(|u| k.eval(u) * k.eval(u + 0.5), -1.0, 1.0, 20_000);
        let oracle = overlap / k.l2_norm_sq();
        assert!(oracle > 0.2);
        let spec = EnsembleSpec { epsilon: 0.05, gamma: 0.5, base_seed: 100, n_paths: 500, probes_per_path: 4 };
        let h = 0.05f64.sqrt();
        let c = empirical_correlation(&spec, 0.5 * h).unwrap();
        assert!(c > 0.2, "corr {c}");
        assert!((c - oracle).abs() < 0.06, "corr {c} oracle {oracle}");
    }

    #[test]
    fn degenerate_path_flags_slope() {
        let p = BrownianPath::from_fn(-1.0, 2.0, 1e-3, |_| 0.0).unwrap();
        let fit = sup_noise_scaling_on_paths(&[p], &[0.1, 0.05, 0.025], 0.5, 1.0).unwrap();
        assert!(fit.sup_xi.iter().all(|s| *s == 0.0));
        assert!(fit.slope_xi.is_none() && fit.slope_xi_dot.is_none());
    }

    #[test]
    fn rejects_bad_ensembles() {
        let spec = EnsembleSpec { epsilon: 0.05, gamma: 0.8, base_seed: 0, n_paths: 10, probes_per_path: 1 };
        assert!(empirical_variance(&spec).is_err());
        let spec = EnsembleSpec { gamma: 0.5, n_paths: 1, ..spec };
        assert!(empirical_variance(&spec).is_err());
    }
}
