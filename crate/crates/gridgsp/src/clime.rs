//! Sparse complex precision-matrix estimation, column by column.
//!
//! Each column `p_i` of the precision matrix solves
//!
//! ```text
//!   minimize ‖p_i‖₁   subject to   ‖C p_i − e_i‖_∞ ≤ ρ
//! ```
//!
//! where both norms use the per-entry Manhattan magnitude
//! `|Re(v)| + |Im(v)|` of a complex scalar. Splitting `p_i`, `C`, and the
//! residual into real and imaginary parts and introducing upper-bound
//! auxiliaries `p̄` and `s̄` turns the column problem into a linear program
//! with `6N` variables and `9N` inequality rows (four ± constraint groups of
//! `2N` rows each, plus the `N`-row slack cap). The assembled matrix is then
//! symmetrized: the real part is averaged with its transpose and the
//! imaginary part with its negated transpose, which zeroes the imaginary
//! diagonal exactly.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CovarianceMatrix;
use crate::lp::{solve_lp, LpSolution, LpStatus, SolverSettings, SparseRealMatrix, StandardFormLp, VarBound};

/// Configuration for precision estimation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClimeConfig {
    /// Slack ρ of the ∞-norm constraint; data-dependent, default 0.2.
    pub rho: f64,
    /// Relative snapping threshold: entries whose real and imaginary parts
    /// both fall below `sparsity_epsilon · max|p_i|` are set to zero.
    /// Interior-point solutions carry tiny dense residue; snapping restores
    /// the intended sparsity, and feasibility is re-verified afterwards.
    pub sparsity_epsilon: f64,
    /// Number of columns solved concurrently; 0 uses the ambient thread
    /// pool, 1 forces a serial loop.
    pub column_parallelism: usize,
}

impl Default for ClimeConfig {
    fn default() -> Self {
        Self {
            rho: 0.2,
            sparsity_epsilon: 1e-6,
            column_parallelism: 0,
        }
    }
}

impl ClimeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {}", self.rho)));
        }
        if self.sparsity_epsilon < 0.0 || !self.sparsity_epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sparsity_epsilon must be non-negative, got {}",
                self.sparsity_epsilon
            )));
        }
        Ok(())
    }
}

/// The per-column linear program.
///
/// Variable layout (each block of length `n`):
///
/// ```text
///   [ p^R | p^I | p̄^R | p̄^I | s̄^R | s̄^I ]
///     0:n   n:2n  2n:3n 3n:4n 4n:5n 5n:6n
/// ```
///
/// Row layout, in order (each group has `n` rows):
///
/// ```text
///   p^R − p̄^R ≤ 0          −p^R − p̄^R ≤ 0
///   p^I − p̄^I ≤ 0          −p^I − p̄^I ≤ 0
///   C^R p^R − C^I p^I − s̄^R ≤  e_i
///  −C^R p^R + C^I p^I − s̄^R ≤ −e_i
///   C^R p^I + C^I p^R − s̄^I ≤ 0
///  −C^R p^I − C^I p^R − s̄^I ≤ 0
///   s̄^R + s̄^I ≤ ρ
/// ```
///
/// The auxiliaries carry a zero lower bound: they upper-bound absolute
/// values, so non-negativity is implied and shrinks the problem without
/// moving the optimum (checked in tests).
#[derive(Debug, Clone)]
pub struct ColumnLpProblem {
    pub index: usize,
    pub n: usize,
    pub rho: f64,
    pub lp: StandardFormLp,
}

fn build_column_lp_impl(c: &CovarianceMatrix, i: usize, rho: f64, bound_auxiliaries: bool) -> Result<ColumnLpProblem> {
    let n = c.n();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let v = 6 * n;
    let m = 9 * n;
    let (p_r, p_i, pbar_r, pbar_i, sbar_r, sbar_i) = (0, n, 2 * n, 3 * n, 4 * n, 5 * n);

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * n + 8 * n * (n + 1) + 2 * n);
    let mut rhs = vec![0.0; m];

    // p̄ group: ±p^R ≤ p̄^R and ±p^I ≤ p̄^I.
    for k in 0..n {
        triplets.push((k, p_r + k, 1.0));
        triplets.push((k, pbar_r + k, -1.0));
        triplets.push((n + k, p_r + k, -1.0));
        triplets.push((n + k, pbar_r + k, -1.0));
        triplets.push((2 * n + k, p_i + k, 1.0));
        triplets.push((2 * n + k, pbar_i + k, -1.0));
        triplets.push((3 * n + k, p_i + k, -1.0));
        triplets.push((3 * n + k, pbar_i + k, -1.0));
    }

    // s̄ group: the real residual C^R p^R − C^I p^I − e_i and the imaginary
    // residual C^R p^I + C^I p^R, each bounded by ±s̄.
    for k in 0..n {
        let (ra, rb) = (4 * n + k, 5 * n + k);
        let (ia, ib) = (6 * n + k, 7 * n + k);
        for j in 0..n {
            let ckj = c.get(k, j);
            if ckj.re != 0.0 {
                triplets.push((ra, p_r + j, ckj.re));
                triplets.push((rb, p_r + j, -ckj.re));
                triplets.push((ia, p_i + j, ckj.re));
                triplets.push((ib, p_i + j, -ckj.re));
            }
            if ckj.im != 0.0 {
                triplets.push((ra, p_i + j, -ckj.im));
                triplets.push((rb, p_i + j, ckj.im));
                triplets.push((ia, p_r + j, ckj.im));
                triplets.push((ib, p_r + j, -ckj.im));
            }
        }
        triplets.push((ra, sbar_r + k, -1.0));
        triplets.push((rb, sbar_r + k, -1.0));
        triplets.push((ia, sbar_i + k, -1.0));
        triplets.push((ib, sbar_i + k, -1.0));
        let e = if k == i { 1.0 } else { 0.0 };
        rhs[ra] = e;
        rhs[rb] = -e;
    }

    // Slack cap: s̄^R + s̄^I ≤ ρ.
    for k in 0..n {
        let r = 8 * n + k;
        triplets.push((r, sbar_r + k, 1.0));
        triplets.push((r, sbar_i + k, 1.0));
        rhs[r] = rho;
    }

    let mut objective = vec![0.0; v];
    for k in 0..n {
        objective[pbar_r + k] = 1.0;
        objective[pbar_i + k] = 1.0;
    }

    let mut bounds = vec![VarBound::free(); v];
    if bound_auxiliaries {
        for b in bounds.iter_mut().take(v).skip(2 * n) {
            *b = VarBound::nonneg();
        }
    }

    let constraints = SparseRealMatrix::from_triplets(m, v, triplets)?;
    let lp = StandardFormLp::new(objective, constraints, rhs, bounds)?;
    Ok(ColumnLpProblem { index: i, n, rho, lp })
}

/// Assemble the LP for column `i` of the precision matrix.
pub fn build_column_lp(c: &CovarianceMatrix, i: usize, cfg: &ClimeConfig) -> Result<ColumnLpProblem> {
    cfg.validate()?;
    build_column_lp_impl(c, i, cfg.rho, true)
}

#[cfg(test)]
pub(crate) fn build_column_lp_unbounded_aux(c: &CovarianceMatrix, i: usize, rho: f64) -> Result<ColumnLpProblem> {
    build_column_lp_impl(c, i, rho, false)
}

/// `max_k (|Re r_k| + |Im r_k|)` for `r = C p − e_i`: the ∞-norm of the
/// column residual under the complex Manhattan magnitude.
pub fn column_residual_inf_norm(c: &CovarianceMatrix, p_real: &[f64], p_imag: &[f64], i: usize) -> f64 {
    let n = c.n();
    let mut worst = 0.0f64;
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += c.get(k, j) * Complex64::new(p_real[j], p_imag[j]);
        }
        if k == i {
            acc -= 1.0;
        }
        worst = worst.max(acc.re.abs() + acc.im.abs());
    }
    worst
}

/// One solved precision column.
#[derive(Debug, Clone)]
pub struct ColumnSolution {
    pub p_real: Vec<f64>,
    pub p_imag: Vec<f64>,
    pub lp: LpSolution,
    /// Residual ∞-norm of the raw (pre-snap) column.
    pub raw_residual: f64,
    /// Residual ∞-norm after snapping small entries to zero.
    pub snapped_residual: f64,
}

/// Solve column `i`: build the LP, solve it, extract `p_i`, snap
/// near-zero entries, and verify feasibility of both the raw and the
/// snapped column. The raw residual is the reported one.
pub fn solve_column(
    c: &CovarianceMatrix,
    i: usize,
    cfg: &ClimeConfig,
    settings: &SolverSettings,
) -> Result<ColumnSolution> {
    let problem = build_column_lp(c, i, cfg)?;
    let n = problem.n;
    let lp = solve_lp(&problem.lp, settings);
    let raw_real: Vec<f64> = lp.x[0..n].to_vec();
    let raw_imag: Vec<f64> = lp.x[n..2 * n].to_vec();
    let raw_residual = column_residual_inf_norm(c, &raw_real, &raw_imag, i);

    let scale = raw_real
        .iter()
        .chain(&raw_imag)
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    let threshold = cfg.sparsity_epsilon * scale;
    let mut p_real = raw_real;
    let mut p_imag = raw_imag;
    for k in 0..n {
        if p_real[k].abs() < threshold && p_imag[k].abs() < threshold {
            p_real[k] = 0.0;
            p_imag[k] = 0.0;
        }
    }
    let snapped_residual = column_residual_inf_norm(c, &p_real, &p_imag, i);

    Ok(ColumnSolution {
        p_real,
        p_imag,
        lp,
        raw_residual,
        snapped_residual,
    })
}

/// The assembled precision estimate `P = P^R + j P^I`.
///
/// Stored raw after [`estimate_precision`]; [`symmetrize`] produces the
/// finalized matrix with exactly symmetric real part and exactly
/// anti-symmetric imaginary part (zero diagonal).
#[derive(Debug, Clone)]
pub struct PrecisionEstimate {
    n: usize,
    /// Row-major `P^R`.
    p_real: Vec<f64>,
    /// Row-major `P^I`.
    p_imag: Vec<f64>,
    rho_used: f64,
    per_column_status: Vec<LpStatus>,
    /// Raw (pre-snap) residual ∞-norm per column.
    per_column_residual: Vec<f64>,
    /// ρ actually used per column (doubled once on an infeasible retry).
    per_column_rho: Vec<f64>,
    symmetrized: bool,
}

impl PrecisionEstimate {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn real(&self, i: usize, j: usize) -> f64 {
        self.p_real[i * self.n + j]
    }

    pub fn imag(&self, i: usize, j: usize) -> f64 {
        self.p_imag[i * self.n + j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.real(i, j), self.imag(i, j))
    }

    pub fn rho_used(&self) -> f64 {
        self.rho_used
    }

    pub fn per_column_status(&self) -> &[LpStatus] {
        &self.per_column_status
    }

    pub fn per_column_residual(&self) -> &[f64] {
        &self.per_column_residual
    }

    pub fn per_column_rho(&self) -> &[f64] {
        &self.per_column_rho
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// True when any column failed to solve to optimality (possibly after
    /// the ρ-doubling retry); callers decide whether to proceed.
    pub fn is_degraded(&self) -> bool {
        self.per_column_status.iter().any(|s| *s != LpStatus::Optimal)
    }

    /// Largest `|P^I|` entry; near zero when the input covariance was real.
    pub fn max_imag_abs(&self) -> f64 {
        self.p_imag.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_real_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.p_real[i * n + j] - self.p_real[j * n + i]).abs());
            }
        }
        worst
    }

    #[cfg(test)]
    pub(crate) fn from_parts_for_test(n: usize, p_real: Vec<f64>, p_imag: Vec<f64>) -> Self {
        Self {
            n,
            p_real,
            p_imag,
            rho_used: 0.1,
            per_column_status: vec![LpStatus::Optimal; n],
            per_column_residual: vec![0.0; n],
            per_column_rho: vec![0.1; n],
            symmetrized: false,
        }
    }
}

/// Estimate every column of the precision matrix. Columns are independent
/// and may be solved concurrently; results do not depend on scheduling.
/// A column whose LP reports infeasible (possible after snapping or for
/// rank-deficient covariances) is retried once with doubled ρ; a column
/// that still fails marks the estimate degraded.
pub fn estimate_precision(c: &CovarianceMatrix, cfg: &ClimeConfig, settings: &SolverSettings) -> Result<PrecisionEstimate> {
    cfg.validate()?;
    let n = c.n();

    let solve_one = |i: usize| -> Result<(ColumnSolution, f64)> {
        let sol = solve_column(c, i, cfg, settings)?;
        let feasible = sol.lp.status == LpStatus::Optimal
            && sol.snapped_residual <= cfg.rho + settings.feas_tol * 10.0;
        if feasible {
            return Ok((sol, cfg.rho));
        }
        let retry_cfg = ClimeConfig {
            rho: cfg.rho * 2.0,
            ..*cfg
        };
        let retry = solve_column(c, i, &retry_cfg, settings)?;
        if retry.lp.status == LpStatus::Optimal {
            Ok((retry, retry_cfg.rho))
        } else {
            // Keep whichever attempt came closer to feasibility.
            if sol.raw_residual <= retry.raw_residual {
                Ok((sol, cfg.rho))
            } else {
                Ok((retry, retry_cfg.rho))
            }
        }
    };

    let columns: Vec<(ColumnSolution, f64)> = if cfg.column_parallelism == 1 {
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(solve_one(i)?);
        }
        out
    } else if cfg.column_parallelism == 0 {
        (0..n).into_par_iter().map(solve_one).collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.column_parallelism)
            .build()
            .map_err(|e| Error::SolverFailure(format!("thread pool: {e}")))?;
        pool.install(|| (0..n).into_par_iter().map(solve_one).collect::<Result<Vec<_>>>())?
    };

    let mut p_real = vec![0.0; n * n];
    let mut p_imag = vec![0.0; n * n];
    let mut per_column_status = Vec::with_capacity(n);
    let mut per_column_residual = Vec::with_capacity(n);
    let mut per_column_rho = Vec::with_capacity(n);
    for (i, (sol, rho)) in columns.iter().enumerate() {
        for j in 0..n {
            p_real[j * n + i] = sol.p_real[j];
            p_imag[j * n + i] = sol.p_imag[j];
        }
        per_column_status.push(sol.lp.status);
        per_column_residual.push(sol.raw_residual);
        per_column_rho.push(*rho);
    }

    Ok(PrecisionEstimate {
        n,
        p_real,
        p_imag,
        rho_used: cfg.rho,
        per_column_status,
        per_column_residual,
        per_column_rho,
        symmetrized: false,
    })
}

/// Post-compute the Hermitian finalization:
/// `P^R ← (P^R + (P^R)ᵀ)/2` and `P^I ← (P^I − (P^I)ᵀ)/2`.
/// Idempotent bit-for-bit; the imaginary diagonal becomes exactly zero.
pub fn symmetrize(est: &PrecisionEstimate) -> PrecisionEstimate {
    let n = est.n;
    let mut p_real = vec![0.0; n * n];
    let mut p_imag = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p_real[i * n + j] = (est.p_real[i * n + j] + est.p_real[j * n + i]) * 0.5;
            p_imag[i * n + j] = if i == j {
                0.0
            } else {
                (est.p_imag[i * n + j] - est.p_imag[j * n + i]) * 0.5
            };
        }
    }
    PrecisionEstimate {
        n,
        p_real,
        p_imag,
        rho_used: est.rho_used,
        per_column_status: est.per_column_status.clone(),
        per_column_residual: est.per_column_residual.clone(),
        per_column_rho: est.per_column_rho.clone(),
        symmetrized: true,
    }
}

#[derive(Serialize, Deserialize)]
struct PrecisionJson {
    n: usize,
    rho: f64,
    format: String,
    real: Vec<(usize, usize, f64)>,
    imag: Vec<(usize, usize, f64)>,
    statuses: Vec<LpStatus>,
}

impl PrecisionEstimate {
    /// Serialize as a sparse COO JSON document; round-trips losslessly at
    /// full double precision.
    pub fn to_json_string(&self) -> Result<String> {
        let mut real = Vec::new();
        let mut imag = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let r = self.real(i, j);
                if r != 0.0 {
                    real.push((i, j, r));
                }
                let im = self.imag(i, j);
                if im != 0.0 {
                    imag.push((i, j, im));
                }
            }
        }
        let doc = PrecisionJson {
            n: self.n,
            rho: self.rho_used,
            format: "coo".to_string(),
            real,
            imag,
            statuses: self.per_column_status.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: PrecisionJson = serde_json::from_str(s)?;
        if doc.format != "coo" {
            return Err(Error::Json(format!("unsupported format {:?}", doc.format)));
        }
        if doc.n == 0 {
            return Err(Error::Json("n must be positive".to_string()));
        }
        if doc.n > 100_000 {
            return Err(Error::Json(format!("n = {} is unreasonably large", doc.n)));
        }
        if !(doc.rho > 0.0) || !doc.rho.is_finite() {
            return Err(Error::Json(format!("rho must be positive, got {}", doc.rho)));
        }
        if doc.statuses.len() != doc.n {
            return Err(Error::Json(format!(
                "expected {} per-column statuses, got {}",
                doc.n,
                doc.statuses.len()
            )));
        }
        let n = doc.n;
        let mut p_real = vec![0.0; n * n];
        let mut p_imag = vec![0.0; n * n];
        let mut seen_real = vec![false; n * n];
        let mut seen_imag = vec![false; n * n];
        for &(i, j, v) in &doc.real {
            if i >= n || j >= n {
                return Err(Error::Json(format!("real entry ({i}, {j}) out of range for n = {n}")));
            }
            if !v.is_finite() {
                return Err(Error::Json(format!("real entry ({i}, {j}) is not finite")));
            }
            if seen_real[i * n + j] {
                return Err(Error::Json(format!("duplicate real entry ({i}, {j})")));
            }
            seen_real[i * n + j] = true;
            p_real[i * n + j] = v;
        }
        for &(i, j, v) in &doc.imag {
            if i >= n || j >= n {
                return Err(Error::Json(format!("imag entry ({i}, {j}) out of range for n = {n}")));
            }
            if !v.is_finite() {
                return Err(Error::Json(format!("imag entry ({i}, {j}) is not finite")));
            }
            if seen_imag[i * n + j] {
                return Err(Error::Json(format!("duplicate imag entry ({i}, {j})")));
            }
            seen_imag[i * n + j] = true;
            p_imag[i * n + j] = v;
        }

        let mut est = PrecisionEstimate {
            n,
            p_real,
            p_imag,
            rho_used: doc.rho,
            per_column_status: doc.statuses,
            per_column_residual: vec![f64::NAN; n],
            per_column_rho: vec![doc.rho; n],
            symmetrized: false,
        };
        // Mark symmetrized only when the stored matrix satisfies the
        // finalized structure exactly, as written by `symmetrize`.
        let exact_sym = est.max_real_asymmetry() == 0.0
            && (0..n).all(|i| est.imag(i, i) == 0.0)
            && (0..n).all(|i| ((i + 1)..n).all(|j| est.imag(i, j) == -est.imag(j, i)));
        est.symmetrized = exact_sym;
        Ok(est)
    }
}
