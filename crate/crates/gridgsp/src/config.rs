//! Run configuration: one human-readable TOML file whose sections mirror
//! the CLI subcommands. Command-line flags override file values; resolved
//! configurations are echoed into every output artifact so a run can be
//! reproduced from its outputs alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Normalizer;
use crate::lp::LpAlgorithm;

/// Top-level config file. Unknown keys are rejected so typos surface as
/// errors instead of silently falling back to defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub gen: Option<GenSection>,
    pub learn: Option<LearnSection>,
    pub interpolate: Option<InterpolateSection>,
    pub eval: Option<EvalSection>,
    pub sweep_rho: Option<SweepRhoSection>,
    pub sweep_mu: Option<SweepMuSection>,
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-level validation mirroring each module's invariants, run
    /// before any command executes.
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(Error::Config("threads must be positive".to_string()));
            }
        }
        if let Some(g) = &self.gen {
            g.validate()?;
        }
        if let Some(l) = &self.learn {
            l.validate()?;
        }
        if let Some(i) = &self.interpolate {
            i.validate()?;
        }
        if let Some(e) = &self.eval {
            e.validate()?;
        }
        if let Some(s) = &self.sweep_rho {
            s.validate()?;
        }
        if let Some(s) = &self.sweep_mu {
            s.validate()?;
        }
        Ok(())
    }
}

fn check_positive(name: &str, v: Option<f64>) -> Result<()> {
    if let Some(x) = v {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Config(format!("{name} must be positive and finite, got {x}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSection {
    pub nodes: Option<usize>,
    pub samples: Option<usize>,
    pub edge_density: Option<f64>,
    pub phase_spread: Option<f64>,
    pub seed: Option<u64>,
    pub out_csv: Option<String>,
    pub out_model: Option<String>,
}

impl GenSection {
    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.nodes {
            if n < 2 {
                return Err(Error::Config(format!("gen.nodes must be at least 2, got {n}")));
            }
        }
        if let Some(k) = self.samples {
            if k == 0 {
                return Err(Error::Config("gen.samples must be positive".to_string()));
            }
        }
        if let Some(d) = self.edge_density {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::Config(format!("gen.edge_density must lie in (0, 1], got {d}")));
            }
        }
        if let Some(p) = self.phase_spread {
            if !(0.0..=std::f64::consts::PI).contains(&p) {
                return Err(Error::Config(format!("gen.phase_spread must lie in [0, π], got {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnSection {
    pub dataset: Option<String>,
    pub rho: Option<f64>,
    pub sparsity_epsilon: Option<f64>,
    pub normalizer: Option<Normalizer>,
    pub train_count: Option<usize>,
    pub split_seed: Option<u64>,
    pub pd_floor: Option<f64>,
    pub algorithm: Option<LpAlgorithm>,
    pub allow_degraded: Option<bool>,
    pub out: Option<String>,
}

impl LearnSection {
    pub fn validate(&self) -> Result<()> {
        check_positive("learn.rho", self.rho)?;
        check_positive("learn.pd_floor", self.pd_floor)?;
        if let Some(e) = self.sparsity_epsilon {
            if e < 0.0 || !e.is_finite() {
                return Err(Error::Config(format!(
                    "learn.sparsity_epsilon must be non-negative, got {e}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolateSection {
    pub laplacian: Option<String>,
    pub observations: Option<String>,
    pub observed: Option<Vec<usize>>,
    pub mu: Option<f64>,
    pub cg_tol: Option<f64>,
    pub cg_max_iters: Option<usize>,
    pub jacobi: Option<bool>,
    pub out: Option<String>,
}

impl InterpolateSection {
    pub fn validate(&self) -> Result<()> {
        check_positive("interpolate.mu", self.mu)?;
        check_positive("interpolate.cg_tol", self.cg_tol)?;
        if let Some(obs) = &self.observed {
            if obs.is_empty() {
                return Err(Error::Config("interpolate.observed must not be empty".to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub dataset: Option<String>,
    pub laplacian: Option<String>,
    pub train_count: Option<usize>,
    pub split_seed: Option<u64>,
    pub sample_counts: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub mu: Option<f64>,
    pub rho: Option<f64>,
    pub decompose: Option<bool>,
    pub normalizer: Option<Normalizer>,
    pub algorithm: Option<LpAlgorithm>,
    pub k_sweep: Option<Vec<usize>>,
    pub m_fixed: Option<usize>,
    pub ablation: Option<bool>,
    pub out_json: Option<String>,
    pub out_table: Option<String>,
    pub per_trial_csv: Option<String>,
}

impl EvalSection {
    pub fn validate(&self) -> Result<()> {
        check_positive("eval.mu", self.mu)?;
        check_positive("eval.rho", self.rho)?;
        if let Some(t) = self.trials {
            if t < 2 {
                return Err(Error::Config("eval.trials must be at least 2".to_string()));
            }
        }
        if let Some(ms) = &self.sample_counts {
            if ms.is_empty() || ms.iter().any(|&m| m == 0) {
                return Err(Error::Config("eval.sample_counts must be positive".to_string()));
            }
        }
        if let Some(ks) = &self.k_sweep {
            if ks.is_empty() || ks.iter().any(|&k| k == 0) {
                return Err(Error::Config("eval.k_sweep values must be positive".to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRhoSection {
    pub dataset: Option<String>,
    pub train_count: Option<usize>,
    pub split_seed: Option<u64>,
    pub rhos: Option<Vec<f64>>,
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub mu: Option<f64>,
    pub seed: Option<u64>,
    pub normalizer: Option<Normalizer>,
    pub out_json: Option<String>,
    pub out_table: Option<String>,
}

impl SweepRhoSection {
    pub fn validate(&self) -> Result<()> {
        check_positive("sweep_rho.mu", self.mu)?;
        if let Some(rhos) = &self.rhos {
            if rhos.is_empty() || rhos.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
                return Err(Error::Config("sweep_rho.rhos must be positive".to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepMuSection {
    pub dataset: Option<String>,
    pub train_count: Option<usize>,
    pub split_seed: Option<u64>,
    pub rho: Option<f64>,
    pub mus: Option<Vec<f64>>,
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub normalizer: Option<Normalizer>,
    pub out_json: Option<String>,
    pub out_table: Option<String>,
}

impl SweepMuSection {
    pub fn validate(&self) -> Result<()> {
        check_positive("sweep_mu.rho", self.rho)?;
        if let Some(mus) = &self.mus {
            if mus.is_empty() || mus.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
                return Err(Error::Config("sweep_mu.mus must be positive".to_string()));
            }
        }
        Ok(())
    }
}
