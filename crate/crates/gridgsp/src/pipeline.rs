//! End-to-end wiring: observations → centered train split → covariance →
//! per-column precision estimation → symmetrization → Hermitian Laplacian →
//! positive-definiteness repair. The CLI and the evaluation harness both go
//! through this one path so they cannot drift apart.

use serde::{Deserialize, Serialize};

use crate::clime::{estimate_precision, symmetrize, ClimeConfig, PrecisionEstimate};
use crate::error::Result;
use crate::laplacian::{default_pd_floor, ensure_pd, HermitianLaplacian};
use crate::linalg::{center_columns, empirical_covariance, ComplexDenseMatrix, Normalizer};
use crate::lp::SolverSettings;

/// Everything the learning stage needs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LearnSettings {
    pub clime: ClimeConfig,
    pub normalizer: Normalizer,
    pub solver: SolverSettings,
    /// Diagonal-loading floor for the repair step; `None` means
    /// `1e-8 · λ_max`.
    pub pd_floor: Option<f64>,
}

impl Default for LearnSettings {
    fn default() -> Self {
        Self {
            clime: ClimeConfig::default(),
            normalizer: Normalizer::ByNodes,
            solver: SolverSettings::default(),
            pd_floor: None,
        }
    }
}

/// Result of the learning stage: the repaired Laplacian plus the finalized
/// precision estimate it came from (per-column solver statuses live there).
#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub laplacian: HermitianLaplacian,
    pub precision: PrecisionEstimate,
    /// λ_min estimate of the un-repaired Laplacian; negative values mean
    /// the repair actually loaded the diagonal.
    pub lambda_min_before_repair: f64,
}

/// Learn a Hermitian Laplacian from training observations (columns).
pub fn learn_laplacian(x_train: &ComplexDenseMatrix, settings: &LearnSettings) -> Result<LearnOutcome> {
    let centered = center_columns(x_train);
    let cov = empirical_covariance(&centered, settings.normalizer)?;
    let raw = estimate_precision(&cov, &settings.clime, &settings.solver)?;
    let finalized = symmetrize(&raw);
    let laplacian = HermitianLaplacian::from_precision(&finalized)?;
    let summary = crate::laplacian::spectral_summary(
        &laplacian,
        crate::laplacian::SPECTRAL_DEFAULT_MAX_ITERS,
        crate::laplacian::SPECTRAL_DEFAULT_TOL,
    )?;
    let floor = match settings.pd_floor {
        Some(f) => f,
        None => default_pd_floor(&laplacian)?,
    };
    let repaired = ensure_pd(&laplacian, floor)?;
    Ok(LearnOutcome {
        laplacian: repaired,
        precision: finalized,
        lambda_min_before_repair: summary.lambda_min_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{random_hermitian_laplacian, sample_gmrf};
    use crate::lp::LpStatus;

    #[test]
    fn learn_from_synthetic_data_recovers_support_direction() {
        let model = random_hermitian_laplacian(6, 0.4, 0.8, 19).unwrap();
        let ds = sample_gmrf(&model, 2000, 7).unwrap();
        let settings = LearnSettings {
            clime: ClimeConfig { rho: 0.1, ..Default::default() },
            normalizer: Normalizer::BySamples,
            ..Default::default()
        };
        let out = learn_laplacian(ds.x(), &settings).unwrap();
        assert!(out.precision.per_column_status().iter().all(|s| *s == LpStatus::Optimal));
        assert!(out.laplacian.to_dense().max_hermitian_asymmetry() == 0.0);
        // Learned diagonal should be positive and dominated by true scale.
        for &d in out.laplacian.diag() {
            assert!(d > 0.0);
        }
    }

    #[test]
    fn learning_is_deterministic() {
        let model = random_hermitian_laplacian(5, 0.5, 0.5, 3).unwrap();
        let ds = sample_gmrf(&model, 300, 11).unwrap();
        let settings = LearnSettings::default();
        let a = learn_laplacian(ds.x(), &settings).unwrap();
        let b = learn_laplacian(ds.x(), &settings).unwrap();
        assert_eq!(a.laplacian, b.laplacian);
        assert_eq!(
            a.laplacian.to_json_string().unwrap(),
            b.laplacian.to_json_string().unwrap()
        );
    }
}
