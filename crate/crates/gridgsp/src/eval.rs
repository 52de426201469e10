//! Experiment harness: MSE-versus-observed-count sweeps with Student-t 95%
//! confidence intervals, covariance-size sweeps, and the real/imag-split
//! ablation that learns two real Laplacians instead of one complex one.
//!
//! Error decomposition convention: magnitude MSE compares moduli; phase MSE
//! compares angles wrapped to (−π, π], since phases live on the circle and
//! an unwrapped comparison would be meaningless near ±π. Both are averaged
//! over the unobserved (interpolated) indices only.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::interpolate::{apply_sampling, interpolate, InterpolateConfig, SamplingPattern};
use crate::laplacian::HermitianLaplacian;
use crate::linalg::ComplexVector;
use crate::data::Dataset;
use crate::pipeline::{learn_laplacian, LearnSettings};

/// Sweep description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Observed-node counts M to sweep.
    pub sample_counts: Vec<usize>,
    /// Random sampling patterns drawn per count.
    pub trials: usize,
    pub seed: u64,
    pub mu: f64,
    pub rho: f64,
    /// Report magnitude/phase decomposition (true) or raw complex MSE.
    pub decompose: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            sample_counts: vec![8, 12, 16, 20, 24],
            trials: 10,
            seed: 0,
            mu: 0.1,
            rho: 0.2,
            decompose: true,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.sample_counts.is_empty() {
            return Err(Error::InvalidParameter("sweep has no sample counts".to_string()));
        }
        for &m in &self.sample_counts {
            if m == 0 || m > n {
                return Err(Error::InvalidParameter(format!(
                    "sample count {m} out of range for {n} nodes"
                )));
            }
        }
        if self.trials < 2 {
            return Err(Error::InvalidParameter(
                "need at least 2 trials for a confidence interval".to_string(),
            ));
        }
        if !(self.mu > 0.0) || !(self.rho > 0.0) {
            return Err(Error::InvalidParameter("mu and rho must be positive".to_string()));
        }
        Ok(())
    }
}

/// Mean and 95% confidence half-width over trial means (Student-t).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MseStat {
    pub mean: f64,
    pub ci95_half_width: f64,
}

fn mse_stat(trial_means: &[f64]) -> MseStat {
    let n = trial_means.len() as f64;
    let mean = trial_means.iter().sum::<f64>() / n;
    let var = trial_means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    MseStat {
        mean,
        ci95_half_width: t * sd / n.sqrt(),
    }
}

/// One sweep row, keyed by the swept quantity (M or K).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub key: usize,
    pub trials_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse_magnitude: Option<MseStat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse_phase: Option<MseStat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse_complex: Option<MseStat>,
}

/// What the rows are keyed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Observed-node count M.
    SampleCount,
    /// Training-sample count K used to build the covariance.
    CovarianceSize,
    /// Real/imag-split ablation, keyed by M.
    SplitAblation,
}

/// Sweep results plus the resolved spec for reproducibility. Wall-clock
/// timings are kept in memory for logs but excluded from serialization so
/// artifacts stay byte-identical across runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub sweep: SweepKind,
    pub spec: SweepSpec,
    pub rows: Vec<ReportRow>,
    pub excluded_trials: usize,
    #[serde(skip)]
    pub wall_clock_seconds: f64,
    /// Per-trial raw MSE values `(key, trial, magnitude, phase, complex)`,
    /// populated when `keep_per_trial` was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_trial: Option<Vec<(usize, usize, f64, f64, f64)>>,
}

impl ExperimentReport {
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Aligned plain-text table.
    pub fn text_table(&self) -> String {
        use std::fmt::Write;
        let key_header = match self.sweep {
            SweepKind::SampleCount | SweepKind::SplitAblation => "M",
            SweepKind::CovarianceSize => "K",
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{key_header:>6}  {:>12} {:>12}  {:>12} {:>12}  {:>12} {:>12}  {:>6}",
            "mag MSE", "±95%", "phase MSE", "±95%", "cplx MSE", "±95%", "trials"
        );
        for row in &self.rows {
            let fmt = |s: &Option<MseStat>| match s {
                Some(st) => (format!("{:.6e}", st.mean), format!("{:.3e}", st.ci95_half_width)),
                None => ("-".to_string(), "-".to_string()),
            };
            let (m1, c1) = fmt(&row.mse_magnitude);
            let (m2, c2) = fmt(&row.mse_phase);
            let (m3, c3) = fmt(&row.mse_complex);
            let _ = writeln!(
                out,
                "{:>6}  {m1:>12} {c1:>12}  {m2:>12} {c2:>12}  {m3:>12} {c3:>12}  {:>6}",
                row.key, row.trials_used
            );
        }
        out
    }

    /// Per-trial CSV (`key,trial,mse_magnitude,mse_phase,mse_complex`) for
    /// external plotting; empty when per-trial capture was off.
    pub fn per_trial_csv(&self) -> String {
        let mut out = String::from("key,trial,mse_magnitude,mse_phase,mse_complex\n");
        if let Some(rows) = &self.per_trial {
            for (key, trial, mag, phase, cplx) in rows {
                out.push_str(&format!("{key},{trial},{mag},{phase},{cplx}\n"));
            }
        }
        out
    }
}

/// Wrap an angle difference to (−π, π].
fn wrap_angle(d: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = d.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

fn mse_over_indices(x_hat: &ComplexVector, x_true: &ComplexVector, indices: &[usize]) -> (f64, f64, f64) {
    let count = indices.len() as f64;
    let mut mag = 0.0;
    let mut phase = 0.0;
    let mut cplx = 0.0;
    for &i in indices {
        let a = x_hat[i];
        let b = x_true[i];
        mag += (a.norm() - b.norm()).powi(2);
        phase += wrap_angle(a.arg() - b.arg()).powi(2);
        cplx += (a - b).norm_sqr();
    }
    (mag / count, phase / count, cplx / count)
}

/// Magnitude and phase MSE over the unobserved indices of a pattern.
pub fn mse_decomposed(x_hat: &ComplexVector, x_true: &ComplexVector, pattern: &SamplingPattern) -> Result<(f64, f64)> {
    if x_hat.len() != x_true.len() || x_hat.len() != pattern.n() {
        return Err(Error::DimensionMismatch(format!(
            "mse: lengths {} vs {} for a {}-node pattern",
            x_hat.len(),
            x_true.len(),
            pattern.n()
        )));
    }
    let unobserved = pattern.unobserved();
    if unobserved.is_empty() {
        return Err(Error::AllObserved);
    }
    let (mag, phase, _) = mse_over_indices(x_hat, x_true, &unobserved);
    Ok((mag, phase))
}

/// Plain complex MSE `mean |x̂_i − x_i|²` over unobserved indices.
pub fn mse_complex(x_hat: &ComplexVector, x_true: &ComplexVector, pattern: &SamplingPattern) -> Result<f64> {
    if x_hat.len() != x_true.len() || x_hat.len() != pattern.n() {
        return Err(Error::DimensionMismatch("mse: length mismatch".to_string()));
    }
    let unobserved = pattern.unobserved();
    if unobserved.is_empty() {
        return Err(Error::AllObserved);
    }
    let (_, _, cplx) = mse_over_indices(x_hat, x_true, &unobserved);
    Ok(cplx)
}

/// Deterministic seed mixing (splitmix-style) for per-(key, trial) RNGs.
fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw a sampling pattern of `m` distinct nodes.
fn draw_pattern(n: usize, m: usize, rng: &mut ChaCha20Rng) -> Result<SamplingPattern> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    let mut observed: Vec<usize> = idx[..m].to_vec();
    observed.sort_unstable();
    SamplingPattern::new(n, observed)
}

/// Per-trial outcome before aggregation.
struct TrialMse {
    magnitude: f64,
    phase: f64,
    complex: f64,
}

/// Interpolate every test vector under one pattern with one solver per
/// component (joint complex, or two real Laplacians for the ablation).
/// Fully observed patterns are scored over all entries, where the error is
/// pure μ-shrinkage; partial patterns score the interpolated entries only.
fn run_trial(
    ds: &Dataset,
    pattern: &SamplingPattern,
    mu: f64,
    solver: &TrialSolver<'_>,
) -> Result<TrialMse> {
    let cfg = InterpolateConfig { mu, ..Default::default() };
    let score_indices: Vec<usize> = if pattern.is_full() {
        (0..pattern.n()).collect()
    } else {
        pattern.unobserved()
    };
    let mut mag_sum = 0.0;
    let mut phase_sum = 0.0;
    let mut cplx_sum = 0.0;
    let t_count = ds.test_indices().len();
    for t in 0..t_count {
        let x_true = ComplexVector::new(ds.test_column(t)?)?;
        let y = apply_sampling(pattern, &x_true)?;
        let x_hat = match solver {
            TrialSolver::Joint(l) => interpolate(&y, pattern, l, &cfg)?.x_star,
            TrialSolver::Split { real, imag } => {
                let y_re = ComplexVector::new(y.entries().iter().map(|z| Complex64::new(z.re, 0.0)).collect())?;
                let y_im = ComplexVector::new(y.entries().iter().map(|z| Complex64::new(z.im, 0.0)).collect())?;
                let u = interpolate(&y_re, pattern, real, &cfg)?.x_star;
                let v = interpolate(&y_im, pattern, imag, &cfg)?.x_star;
                ComplexVector::new(
                    u.entries()
                        .iter()
                        .zip(v.entries())
                        .map(|(a, b)| Complex64::new(a.re, b.re))
                        .collect(),
                )?
            }
        };
        let (mag, phase, cplx) = mse_over_indices(&x_hat, &x_true, &score_indices);
        mag_sum += mag;
        phase_sum += phase;
        cplx_sum += cplx;
    }
    let k = t_count as f64;
    Ok(TrialMse {
        magnitude: mag_sum / k,
        phase: phase_sum / k,
        complex: cplx_sum / k,
    })
}

enum TrialSolver<'a> {
    Joint(&'a HermitianLaplacian),
    Split {
        real: &'a HermitianLaplacian,
        imag: &'a HermitianLaplacian,
    },
}

fn sweep_rows(
    ds: &Dataset,
    solver: &TrialSolver<'_>,
    spec: &SweepSpec,
    keep_per_trial: bool,
    kind: SweepKind,
) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    let n = ds.n();
    spec.validate(n)?;
    if ds.test_indices().is_empty() {
        return Err(Error::InvalidParameter("dataset has no test split".to_string()));
    }

    let mut rows = Vec::with_capacity(spec.sample_counts.len());
    let mut excluded = 0usize;
    let mut per_trial_rows = Vec::new();

    let mut keys: Vec<usize> = spec.sample_counts.clone();
    keys.sort_unstable();

    for &m in &keys {
        // Trials are independent; run them in parallel, collect in order.
        let trial_results: Vec<Result<TrialMse>> = (0..spec.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha20Rng::seed_from_u64(mix_seed(spec.seed, m as u64, trial as u64));
                let pattern = draw_pattern(n, m, &mut rng)?;
                run_trial(ds, &pattern, spec.mu, solver)
            })
            .collect();

        let mut mags = Vec::new();
        let mut phases = Vec::new();
        let mut cplxs = Vec::new();
        for (trial, outcome) in trial_results.into_iter().enumerate() {
            match outcome {
                Ok(t) => {
                    if keep_per_trial {
                        per_trial_rows.push((m, trial, t.magnitude, t.phase, t.complex));
                    }
                    mags.push(t.magnitude);
                    phases.push(t.phase);
                    cplxs.push(t.complex);
                }
                Err(_) => excluded += 1,
            }
        }
        if mags.len() < 2 {
            return Err(Error::SolverFailure(format!(
                "fewer than 2 usable trials at sweep key {m}"
            )));
        }
        rows.push(ReportRow {
            key: m,
            trials_used: mags.len(),
            mse_magnitude: spec.decompose.then(|| mse_stat(&mags)),
            mse_phase: spec.decompose.then(|| mse_stat(&phases)),
            mse_complex: (!spec.decompose).then(|| mse_stat(&cplxs)),
        });
    }

    Ok(ExperimentReport {
        sweep: kind,
        spec: spec.clone(),
        rows,
        excluded_trials: excluded,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        per_trial: keep_per_trial.then_some(per_trial_rows),
    })
}

/// MSE sweep over observed-node counts with a fixed, already-learned
/// Laplacian. Taking `L` (not the dataset it was learned from) keeps the
/// test split out of the learning path by construction.
pub fn run_sweep(ds: &Dataset, l: &HermitianLaplacian, spec: &SweepSpec) -> Result<ExperimentReport> {
    run_sweep_with_options(ds, l, spec, false)
}

/// As [`run_sweep`], optionally capturing per-trial raw MSEs.
pub fn run_sweep_with_options(
    ds: &Dataset,
    l: &HermitianLaplacian,
    spec: &SweepSpec,
    keep_per_trial: bool,
) -> Result<ExperimentReport> {
    if l.n() != ds.n() {
        return Err(Error::DimensionMismatch(format!(
            "Laplacian dimension {} vs dataset with {} nodes",
            l.n(),
            ds.n()
        )));
    }
    sweep_rows(ds, &TrialSolver::Joint(l), spec, keep_per_trial, SweepKind::SampleCount)
}

/// Scheme-2-style ablation: learn two real Laplacians from the real and
/// imaginary components of the training split, interpolate each component
/// independently, and report the same metrics as [`run_sweep`] for
/// comparison against the joint complex pipeline.
pub fn run_split_ablation(ds: &Dataset, spec: &SweepSpec, learn: &LearnSettings) -> Result<ExperimentReport> {
    let learn = LearnSettings {
        clime: crate::clime::ClimeConfig {
            rho: spec.rho,
            ..learn.clime
        },
        ..*learn
    };
    let re_ds = ds.component(false)?;
    let im_ds = ds.component(true)?;
    let l_re = learn_laplacian(&re_ds.train_matrix()?, &learn)?.laplacian;
    let l_im = learn_laplacian(&im_ds.train_matrix()?, &learn)?.laplacian;
    sweep_rows(
        ds,
        &TrialSolver::Split {
            real: &l_re,
            imag: &l_im,
        },
        spec,
        false,
        SweepKind::SplitAblation,
    )
}

/// Covariance-size sensitivity: for each K, learn a Laplacian from the
/// first K training columns only, then run the M-fixed sweep. Rows are
/// keyed by K.
pub fn run_covariance_sweep(
    ds: &Dataset,
    ks: &[usize],
    m_fixed: usize,
    spec: &SweepSpec,
    learn: &LearnSettings,
) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    if ks.is_empty() {
        return Err(Error::InvalidParameter("covariance sweep has no K values".to_string()));
    }
    let learn = LearnSettings {
        clime: crate::clime::ClimeConfig {
            rho: spec.rho,
            ..learn.clime
        },
        ..*learn
    };
    let mut keys: Vec<usize> = ks.to_vec();
    keys.sort_unstable();
    let mut rows = Vec::with_capacity(keys.len());
    let mut excluded = 0usize;
    for &k in &keys {
        let x_train = ds.train_matrix_truncated(k)?;
        let l = learn_laplacian(&x_train, &learn)?.laplacian;
        let sub_spec = SweepSpec {
            sample_counts: vec![m_fixed],
            ..spec.clone()
        };
        let sub = run_sweep(ds, &l, &sub_spec)?;
        excluded += sub.excluded_trials;
        let row = &sub.rows[0];
        rows.push(ReportRow {
            key: k,
            trials_used: row.trials_used,
            mse_magnitude: row.mse_magnitude,
            mse_phase: row.mse_phase,
            mse_complex: row.mse_complex,
        });
    }
    Ok(ExperimentReport {
        sweep: SweepKind::CovarianceSize,
        spec: spec.clone(),
        rows,
        excluded_trials: excluded,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        per_trial: None,
    })
}
