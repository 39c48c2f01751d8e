//! Pathwise convergence experiments: every solver in one experiment reads
//! the same Brownian path.

mod lemma2;
mod report;
mod sandwich;
mod sharp;

pub use lemma2::{integrated_front_drift, lemma2_experiment, lemma2_on_path, Lemma2Row};
pub use report::{report_emit, run_report, ConvergenceReport, ReportRow};
pub use sandwich::{subsuper_experiment, subsuper_on_path, SandwichRow};
pub use sharp::{sharp_interface_experiment, sharp_interface_on_path, simulate, SharpRow, SimSample, Simulation};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};
use crate::noise::{sample_brownian, validate_gamma, BrownianPath, MollifiedNoise};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Radial,
    Rect2d,
}

/// Parameters shared by all experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::gamma")]
    pub gamma: f64,
    /// Correction exponent `beta` in `eps xi +- eps^beta`.
    #[serde(default = "defaults::beta")]
    pub beta: f64,
    /// Exponent `a` of the barrier offset `eps^a e^{c1 t}`.
    #[serde(default = "defaults::a")]
    pub a: f64,
    /// Barrier growth rate; defaults to `N^2 + 1`.
    #[serde(default)]
    pub c1: Option<f64>,
    /// Curvature bound; defaults to `2 / R0`.
    #[serde(default, rename = "N")]
    pub n_curv: Option<f64>,
    #[serde(default = "defaults::eps")]
    pub eps: Vec<f64>,
    #[serde(default = "defaults::t_end", rename = "T")]
    pub t_end: f64,
    #[serde(default = "defaults::r0", rename = "R0")]
    pub r0: f64,
    #[serde(default = "defaults::dim")]
    pub dim: usize,
    #[serde(default = "defaults::geometry")]
    pub geometry: GeometryKind,
    /// Drive the phase field with the noise (`false` gives the deterministic flow).
    #[serde(default = "defaults::noise")]
    pub noise: bool,
}

mod defaults {
    use super::GeometryKind;
    pub fn seed() -> u64 {
        7
    }
    pub fn gamma() -> f64 {
        0.5
    }
    pub fn beta() -> f64 {
        1.5
    }
    pub fn a() -> f64 {
        1.5
    }
    pub fn eps() -> Vec<f64> {
        vec![0.08, 0.04, 0.02]
    }
    pub fn t_end() -> f64 {
        0.05
    }
    pub fn r0() -> f64 {
        0.5
    }
    pub fn dim() -> usize {
        2
    }
    pub fn geometry() -> GeometryKind {
        GeometryKind::Radial
    }
    pub fn noise() -> bool {
        true
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| invalid("config", format!("bad config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n_curv(&self) -> f64 {
        self.n_curv.unwrap_or(2.0 / self.r0)
    }

    pub fn c1(&self) -> f64 {
        self.c1.unwrap_or_else(|| self.n_curv().powi(2) + 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        validate_gamma(self.gamma)?;
        if !(self.beta > 1.0 && self.beta < 2.0) {
            return Err(invalid("beta", format!("requires 1 < beta < 2, got {}", self.beta)));
        }
        if !(self.n_curv() > 0.0) {
            return Err(invalid("N", "must be positive"));
        }
        if !(self.c1() > self.n_curv().powi(2)) {
            return Err(invalid("c1", format!("requires c1 > N^2 = {}, got {}", self.n_curv().powi(2), self.c1())));
        }
        if !(self.a > 1.0) {
            return Err(invalid("a", format!("requires a > 1, got {}", self.a)));
        }
        if self.eps.is_empty() {
            return Err(invalid("eps", "eps list is empty"));
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(invalid("eps", format!("requires 0 < eps < 1, got {e}")));
        }
        if !(self.t_end > 0.0 && self.r0 > 0.0) {
            return Err(invalid("T", "T and R0 must be positive"));
        }
        if self.dim < 2 || (self.geometry == GeometryKind::Rect2d && self.dim != 2) {
            return Err(invalid("dim", format!("need dim >= 2 (exactly 2 for rect2d), got {}", self.dim)));
        }
        Ok(())
    }

    /// `eps` values sorted decreasingly.
    pub fn eps_sorted(&self) -> Vec<f64> {
        let mut e = self.eps.clone();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        e
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// The path shared by all legs of an experiment: covers every convolution
/// window on `[0, t_end]` with the step recommended for the smallest `eps`.
pub fn shared_path(seed: u64, eps: &[f64], gamma: f64, t_end: f64) -> Result<BrownianPath> {
    validate_gamma(gamma)?;
    let e_min = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let e_max = eps.iter().cloned().fold(0.0, f64::max);
    if !(e_min > 0.0) {
        return Err(invalid("eps", "need positive eps values"));
    }
    let h_max = e_max.powf(gamma);
    sample_brownian(seed, -1.05 * h_max, t_end + 1.05 * h_max, MollifiedNoise::recommended_dt(e_min, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.n_curv(), 4.0);
        assert_eq!(c.c1(), 17.0);
    }

    #[test]
    fn invariants_enforced() {
        assert!(ExperimentConfig::from_json(r#"{"gamma": 0.7}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"beta": 2.0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"N": 4, "c1": 16}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"eps": []}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let c = ExperimentConfig::from_json(r#"{"seed": 8, "eps": [0.1, 0.05], "geometry": "rect2d"}"#).unwrap();
        assert_eq!(c.seed, 8);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::default();
        assert_eq!(a.hash(), ExperimentConfig::default().hash());
        let b = ExperimentConfig { seed: 8, ..a.clone() };
        assert_ne!(a.hash(), b.hash());
    }
}
