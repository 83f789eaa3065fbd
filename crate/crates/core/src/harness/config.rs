use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::KernelSpec;
use crate::solvers::{Exploration, PosteriorForm, SeBelief};
use crate::spitfire::SpitfireParams;

/// Where the games of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSource {
    /// Fresh draws from GP(0, k) on an equally spaced n×m grid, one per instance.
    RandomGp {
        kernel: KernelSpec,
        n: usize,
        m: usize,
    },
    /// Hit-the-Spitfire discretized on a k×k grid.
    Spitfire {
        #[serde(default)]
        params: SpitfireParams,
        k: usize,
    },
    /// A fixed game loaded from JSON `{xs, ys, u}`.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    MGpLucb,
    GpSe,
    MGLucb,
    MLucb,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::MGpLucb => "m_gp_lucb",
            Algorithm::GpSe => "gp_se",
            Algorithm::MGLucb => "m_g_lucb",
            Algorithm::MLucb => "m_lucb",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m_gp_lucb" => Ok(Algorithm::MGpLucb),
            "gp_se" => Ok(Algorithm::GpSe),
            "m_g_lucb" => Ok(Algorithm::MGLucb),
            "m_lucb" => Ok(Algorithm::MLucb),
            other => Err(Error::param(format!(
                "unknown algorithm {other:?} (expected m_gp_lucb, gp_se, m_g_lucb or m_lucb)"
            ))),
        }
    }
}

/// GP-SE budget: a fixed T or T = factor·P·⌈H₂⌉ capped at `cap` per instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Budget {
    Fixed(u64),
    Hardness { factor: u64, cap: u64 },
}

/// Belief model used by the GP-based solvers. Unset fields fall back to the source.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kernel: Option<KernelSpec>,
    pub noise: Option<f64>,
    #[serde(default)]
    pub form: PosteriorForm,
    #[serde(default)]
    pub se_belief: SeBelief,
    pub exploration: Option<Exploration>,
}

/// Constants (a, b) of the kernel-smoothness tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smoothness {
    pub a: f64,
    pub b: f64,
}

impl Default for Smoothness {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

fn default_delta() -> f64 {
    0.1
}
fn default_round_cap() -> u64 {
    30_000
}
fn default_one() -> usize {
    1
}
fn default_reference() -> usize {
    100
}

/// One experiment: a game source, a solver and its parameters, and the run layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: GameSource,
    pub algorithm: Algorithm,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_round_cap")]
    pub round_cap: u64,
    /// Required for GP-SE.
    pub budget: Option<Budget>,
    /// Variance of the additive Gaussian simulator noise.
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default = "default_one")]
    pub instances: usize,
    #[serde(default = "default_one")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub smoothness: Smoothness,
    /// Points per axis of the reference grid used for ε̂.
    #[serde(default = "default_reference")]
    pub reference_points: usize,
    /// Minimum gap between the best two security values of a random instance.
    #[serde(default = "default_separation")]
    pub min_separation: f64,
    /// Write per-run wall time to the CSV (breaks byte-identical reruns).
    #[serde(default)]
    pub record_wall_time: bool,
    pub output: Option<PathBuf>,
}

fn default_separation() -> f64 {
    1e-9
}

/// Default belief noise for Spitfire: the largest possible damage variance.
pub const SPITFIRE_MODEL_NOISE: f64 = 0.16;

impl ExperimentConfig {
    pub fn new(source: GameSource, algorithm: Algorithm) -> Self {
        Self {
            source,
            algorithm,
            delta: default_delta(),
            epsilon: 0.0,
            round_cap: default_round_cap(),
            budget: None,
            noise: 0.0,
            model: ModelConfig::default(),
            instances: 1,
            runs: 1,
            seed: 0,
            threads: 0,
            smoothness: Smoothness::default(),
            reference_points: default_reference(),
            min_separation: default_separation(),
            record_wall_time: false,
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::param(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| Error::format(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 || self.instances < 1 {
            return Err(Error::param("runs and instances must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(format!(
                "delta must be in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::param(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::param(format!(
                "noise must be >= 0, got {}",
                self.noise
            )));
        }
        if self.round_cap == 0 {
            return Err(Error::param("round_cap must be positive"));
        }
        if self.algorithm == Algorithm::GpSe && self.budget.is_none() {
            return Err(Error::param("gp_se needs a budget"));
        }
        if self.reference_points < 2 {
            return Err(Error::param("reference_points must be at least 2"));
        }
        match &self.source {
            GameSource::RandomGp { n, m, .. } if *n < 2 || *m < 2 => {
                return Err(Error::param(format!(
                    "random games need n, m >= 2, got {n}x{m}"
                )))
            }
            GameSource::Spitfire { params, k } => {
                params.validate()?;
                if *k < 2 {
                    return Err(Error::param(format!("spitfire grid needs k >= 2, got {k}")));
                }
            }
            GameSource::File { path } if !path.exists() => {
                return Err(Error::param(format!(
                    "game file {} does not exist",
                    path.display()
                )))
            }
            _ => {}
        }
        if let Some(noise) = self.model.noise {
            if !(noise > 0.0 && noise.is_finite()) {
                return Err(Error::param(format!(
                    "model noise must be > 0, got {noise}"
                )));
            }
        }
        Ok(())
    }

    /// Belief kernel: explicit model kernel, else the source kernel, else SE with l = 0.1.
    pub fn model_kernel(&self) -> KernelSpec {
        if let Some(k) = self.model.kernel {
            return k;
        }
        match &self.source {
            GameSource::RandomGp { kernel, .. } => *kernel,
            _ => KernelSpec::squared_exponential(0.1).expect("valid default kernel"),
        }
    }

    /// Belief noise λ: explicit model noise, else the simulator noise (Spitfire: 0.16).
    /// A noiseless simulator falls back to 1e-8.
    pub fn model_noise(&self) -> f64 {
        if let Some(n) = self.model.noise {
            return n;
        }
        match self.source {
            GameSource::Spitfire { .. } => SPITFIRE_MODEL_NOISE,
            _ => self.noise.max(1e-8),
        }
    }

    pub fn exploration(&self) -> Exploration {
        self.model.exploration.unwrap_or(Exploration::Finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
algorithm = "m_gp_lucb"
delta = 0.1
round_cap = 5000
noise = 0.01
instances = 3
runs = 10
seed = 42

[source]
kind = "random_gp"
n = 3
m = 3
kernel = { kind = "squared_exponential", length_scale = 0.1 }

[model]
form = "aggregated"
"#;

    #[test]
    fn parses_sample() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.algorithm, Algorithm::MGpLucb);
        assert_eq!(cfg.instances, 3);
        assert_eq!(cfg.model.form, PosteriorForm::Aggregated);
        assert_eq!(cfg.model_kernel().length_scale(), 0.1);
        assert_eq!(cfg.model_noise(), 0.01);
        assert_eq!(cfg.reference_points, 100);
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn budgets_and_sources() {
        let se = r#"
algorithm = "gp_se"
budget = { factor = 10, cap = 30000 }
[source]
kind = "spitfire"
k = 8
"#;
        let cfg = ExperimentConfig::from_toml(se).unwrap();
        assert_eq!(
            cfg.budget,
            Some(Budget::Hardness {
                factor: 10,
                cap: 30000
            })
        );
        assert_eq!(cfg.model_noise(), SPITFIRE_MODEL_NOISE);
        let fixed = se.replace("{ factor = 10, cap = 30000 }", "100");
        assert_eq!(
            ExperimentConfig::from_toml(&fixed).unwrap().budget,
            Some(Budget::Fixed(100))
        );
    }

    #[test]
    fn rejects_invalid() {
        let bad_runs = SAMPLE.replace("runs = 10", "runs = 0");
        assert!(matches!(
            ExperimentConfig::from_toml(&bad_runs),
            Err(Error::Parameter(_))
        ));
        let missing = r#"
algorithm = "m_lucb"
[source]
kind = "file"
path = "/definitely/not/here.json"
"#;
        assert!(ExperimentConfig::from_toml(missing).is_err());
        let no_budget = SAMPLE.replace("m_gp_lucb", "gp_se");
        assert!(ExperimentConfig::from_toml(&no_budget).is_err());
        let typo = SAMPLE.replace("delta =", "dleta =");
        assert!(ExperimentConfig::from_toml(&typo).is_err());
        assert!("nope".parse::<Algorithm>().is_err());
        assert_eq!("gp_se".parse::<Algorithm>().unwrap(), Algorithm::GpSe);
    }
}
