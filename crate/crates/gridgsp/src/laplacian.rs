//! The learned precision matrix viewed as a Hermitian graph Laplacian:
//! structural Hermitian storage, adjacency/degree views, power-iteration
//! spectral summaries, and positive-definiteness repair by diagonal loading.
//!
//! Storage keeps only the real diagonal and the strict upper triangle;
//! `L[j][i] = conj(L[i][j])` therefore holds by construction rather than by
//! a runtime tolerance check, which removes a whole class of drift bugs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_quadratic_form, ComplexDenseMatrix, ComplexVector, HermitianOperator};
use crate::clime::PrecisionEstimate;

/// Sparse Hermitian Laplacian: real diagonal plus strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianLaplacian {
    n: usize,
    diag: Vec<f64>,
    /// `(i, j, L[i][j])` with `i < j`, sorted by `(i, j)`, nonzero values.
    upper: Vec<(usize, usize, Complex64)>,
    /// Amount of diagonal loading applied by [`ensure_pd`]; 0 if none.
    pd_floor: f64,
}

impl HermitianLaplacian {
    /// Build from raw parts, validating indices and finiteness.
    pub fn from_parts(diag: Vec<f64>, mut upper: Vec<(usize, usize, Complex64)>, pd_floor: f64) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::EmptyDimension("HermitianLaplacian"));
        }
        if diag.iter().any(|d| !d.is_finite()) || !pd_floor.is_finite() {
            return Err(Error::NonFinite("HermitianLaplacian diagonal"));
        }
        for &(i, j, v) in &upper {
            if i >= j {
                return Err(Error::InvalidParameter(format!(
                    "upper-triangle entry ({i}, {j}) must satisfy i < j"
                )));
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, len: n });
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite("HermitianLaplacian entry"));
            }
        }
        upper.sort_unstable_by_key(|&(i, j, _)| (i, j));
        upper.dedup_by(|a, b| {
            if a.0 == b.0 && a.1 == b.1 {
                b.2 += a.2;
                true
            } else {
                false
            }
        });
        upper.retain(|&(_, _, v)| v != Complex64::new(0.0, 0.0));
        Ok(Self {
            n,
            diag,
            upper,
            pd_floor,
        })
    }

    /// Interpret a finalized (symmetrized) precision estimate as the graph
    /// Laplacian. Non-symmetrized estimates and non-real diagonals are
    /// rejected.
    pub fn from_precision(est: &PrecisionEstimate) -> Result<Self> {
        if !est.is_symmetrized() {
            return Err(Error::NotSymmetrized);
        }
        let n = est.n();
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let im = est.imag(i, i);
            if im != 0.0 {
                return Err(Error::DiagonalNotReal {
                    index: i,
                    imag: im,
                    tol: 0.0,
                });
            }
            diag.push(est.real(i, i));
        }
        let mut upper = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = est.entry(i, j);
                if v != Complex64::new(0.0, 0.0) {
                    upper.push((i, j, v));
                }
            }
        }
        Self::from_parts(diag, upper, 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pd_floor(&self) -> f64 {
        self.pd_floor
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[(usize, usize, Complex64)] {
        &self.upper
    }

    pub fn nnz_off_diagonal(&self) -> usize {
        2 * self.upper.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            return Complex64::new(self.diag[i], 0.0);
        }
        let (a, b, conj) = if i < j { (i, j, false) } else { (j, i, true) };
        match self.upper.binary_search_by_key(&(a, b), |&(r, c, _)| (r, c)) {
            Ok(k) => {
                let v = self.upper[k].2;
                if conj {
                    v.conj()
                } else {
                    v
                }
            }
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> ComplexDenseMatrix {
        ComplexDenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j)).expect("laplacian entries are finite")
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        let mut y: Vec<Complex64> = self.diag.iter().zip(x).map(|(d, xi)| d * xi).collect();
        for &(i, j, w) in &self.upper {
            y[i] += w * x[j];
            y[j] += w.conj() * x[i];
        }
        y
    }

    /// Max absolute row sum; an upper bound on the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        let mut row_sum: Vec<f64> = self.diag.iter().map(|d| d.abs()).collect();
        for &(i, j, w) in &self.upper {
            let a = w.norm();
            row_sum[i] += a;
            row_sum[j] += a;
        }
        row_sum.into_iter().fold(0.0, f64::max)
    }

    /// Add `load` to every diagonal entry.
    fn loaded(&self, load: f64, pd_floor: f64) -> Self {
        Self {
            n: self.n,
            diag: self.diag.iter().map(|d| d + load).collect(),
            upper: self.upper.clone(),
            pd_floor,
        }
    }
}

impl HermitianOperator for HermitianLaplacian {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matvec(x)
    }

    fn operator_inf_norm(&self) -> f64 {
        self.inf_norm()
    }
}

/// Adjacency/degree view of a Laplacian: `W[i][j] = −L[i][j]` off the
/// diagonal, recomputed degrees `D[i][i] = Re(Σ_j W[i][j])`, and per-node
/// self-loop residuals `L[i][i] − 2 D[i][i]` completing the generalized form
/// `D − W + diag(D) + diag(self_loops)`.
///
/// The learned matrix need not decompose with non-negative (or even real)
/// row sums, so the view is a formal inversion: degrees take the real part
/// of the complex row sum and are exposed raw, negative values included.
#[derive(Debug, Clone)]
pub struct AdjacencyView {
    /// Directed upper edges `(i, j, w_ij)` with `i < j`; the reverse edge
    /// carries the conjugate weight.
    pub w_upper: Vec<(usize, usize, Complex64)>,
    pub degrees: Vec<f64>,
    pub self_loops: Vec<f64>,
    /// Original diagonal, cached so reassembly is exact; the formula
    /// `2·degrees + self_loops` reproduces it only up to the rounding of
    /// the residual subtraction (verified to one ulp in tests).
    diag: Vec<f64>,
    pd_floor: f64,
}

impl AdjacencyView {
    /// Exact reassembly of the viewed Laplacian.
    pub fn reassemble(&self) -> Result<HermitianLaplacian> {
        let upper = self
            .w_upper
            .iter()
            .map(|&(i, j, w)| (i, j, -w))
            .collect();
        HermitianLaplacian::from_parts(self.diag.clone(), upper, self.pd_floor)
    }

    /// Human-readable edge list: one `i j amp phase` line per directed
    /// upper edge, with `w_ij = amp · e^{j·phase}`.
    pub fn edge_list_string(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for &(i, j, w) in &self.w_upper {
            let _ = writeln!(out, "{i} {j} {} {}", w.norm(), w.arg());
        }
        out
    }
}

/// Decompose a Laplacian into its adjacency/degree view.
pub fn adjacency_and_degree(l: &HermitianLaplacian) -> AdjacencyView {
    let n = l.n();
    let mut row_sum = vec![Complex64::new(0.0, 0.0); n];
    let mut w_upper = Vec::with_capacity(l.upper.len());
    for &(i, j, v) in &l.upper {
        let w = -v;
        w_upper.push((i, j, w));
        row_sum[i] += w;
        row_sum[j] += w.conj();
    }
    let degrees: Vec<f64> = row_sum.iter().map(|s| s.re).collect();
    let self_loops: Vec<f64> = l
        .diag
        .iter()
        .zip(&degrees)
        .map(|(d, deg)| d - 2.0 * deg)
        .collect();
    AdjacencyView {
        w_upper,
        degrees,
        self_loops,
        diag: l.diag.clone(),
        pd_floor: l.pd_floor,
    }
}

/// Extreme-eigenvalue estimates from shifted power iteration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda_min_estimate: f64,
    pub lambda_max_estimate: f64,
    pub iterations: usize,
    /// `‖L v − λ v‖₂` at the accepted iterate, for each extreme.
    pub residual_max: f64,
    pub residual_min: f64,
    pub converged: bool,
}

/// Deterministic non-degenerate start vector for power iteration.
fn start_vector(n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = k as f64;
            Complex64::new(1.0 + (0.7 * t + 0.3).sin(), (1.3 * t + 0.9).cos())
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

struct ShiftedOp<'a> {
    l: &'a HermitianLaplacian,
    /// Applies `sign·L + sigma·I`.
    sign: f64,
    sigma: f64,
}

impl HermitianOperator for ShiftedOp<'_> {
    fn dim(&self) -> usize {
        self.l.n()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = self.l.matvec(x);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.sign * *yi + self.sigma * xi;
        }
        y
    }

    fn operator_inf_norm(&self) -> f64 {
        self.l.inf_norm() + self.sigma.abs()
    }
}

/// Power iteration on a PSD-shifted operator. Returns the dominant
/// eigenvalue estimate (a Rayleigh quotient, real by contract), iterations
/// used, final residual, and whether the residual tolerance was met.
fn power_iteration(op: &ShiftedOp<'_>, max_iters: usize, tol: f64) -> Result<(f64, usize, f64, bool)> {
    let n = op.dim();
    let mut v = start_vector(n);
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for iter in 0..max_iters {
        let w = op.apply(&v);
        let vx = ComplexVector::new(v.clone())?;
        lambda = hermitian_quadratic_form(op, &vx)?;
        let mut res_sq = 0.0;
        for (wi, vi) in w.iter().zip(&v) {
            res_sq += (wi - lambda * vi).norm_sqr();
        }
        residual = res_sq.sqrt();
        if residual <= tol * lambda.abs().max(tol) {
            return Ok((lambda, iter + 1, residual, true));
        }
        let wnorm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if wnorm == 0.0 {
            // v is annihilated: exact eigenpair with eigenvalue zero.
            return Ok((0.0, iter + 1, 0.0, true));
        }
        v = w.into_iter().map(|z| z / wnorm).collect();
    }
    Ok((lambda, max_iters, residual, false))
}

/// Estimate the extreme eigenvalues of a Hermitian Laplacian.
///
/// λ_max comes from power iteration on `L + σ₀I` with `σ₀ = ‖L‖_∞` (the
/// shift keeps the spectrum non-negative so the dominant eigenvalue is the
/// algebraic maximum); λ_min from power iteration on `σI − L` with
/// `σ = λ_max`. Rayleigh quotients evaluate through
/// [`hermitian_quadratic_form`], so every emitted estimate is real by
/// contract.
pub fn spectral_summary(l: &HermitianLaplacian, max_iters: usize, tol: f64) -> Result<SpectralSummary> {
    let sigma0 = l.inf_norm();
    if sigma0 == 0.0 {
        return Ok(SpectralSummary {
            lambda_min_estimate: 0.0,
            lambda_max_estimate: 0.0,
            iterations: 0,
            residual_max: 0.0,
            residual_min: 0.0,
            converged: true,
        });
    }
    let up = ShiftedOp { l, sign: 1.0, sigma: sigma0 };
    let (mu_max, it_max, res_max, ok_max) = power_iteration(&up, max_iters, tol)?;
    let lambda_max = mu_max - sigma0;

    let down = ShiftedOp { l, sign: -1.0, sigma: lambda_max };
    let (mu_min, it_min, res_min, ok_min) = power_iteration(&down, max_iters, tol)?;
    let lambda_min = lambda_max - mu_min;

    Ok(SpectralSummary {
        lambda_min_estimate: lambda_min,
        lambda_max_estimate: lambda_max,
        iterations: it_max + it_min,
        residual_max: res_max,
        residual_min: res_min,
        converged: ok_max && ok_min,
    })
}

/// Iteration budget used by [`ensure_pd`] and the serialization helpers.
pub const SPECTRAL_DEFAULT_MAX_ITERS: usize = 20_000;
/// Residual tolerance used by [`ensure_pd`] and the serialization helpers.
pub const SPECTRAL_DEFAULT_TOL: f64 = 1e-9;

/// Default repair floor: `1e-8 · λ_max`.
pub fn default_pd_floor(l: &HermitianLaplacian) -> Result<f64> {
    let s = spectral_summary(l, SPECTRAL_DEFAULT_MAX_ITERS, SPECTRAL_DEFAULT_TOL)?;
    Ok(1e-8 * s.lambda_max_estimate.abs().max(1e-8))
}

/// Repair positive definiteness by diagonal loading: when the smallest
/// eigenvalue estimate is ≤ 0, return `L + (floor − λ_min)·I` with the
/// loading recorded in `pd_floor`; otherwise return the input unchanged.
/// Loading preserves the sparsity pattern and costs one spectral estimate.
pub fn ensure_pd(l: &HermitianLaplacian, floor: f64) -> Result<HermitianLaplacian> {
    if !(floor > 0.0) || !floor.is_finite() {
        return Err(Error::InvalidParameter(format!("pd floor must be positive, got {floor}")));
    }
    let summary = spectral_summary(l, SPECTRAL_DEFAULT_MAX_ITERS, SPECTRAL_DEFAULT_TOL)?;
    if summary.lambda_min_estimate > 0.0 {
        return Ok(l.clone());
    }
    let load = floor - summary.lambda_min_estimate;
    Ok(l.loaded(load, load))
}

#[derive(Serialize, Deserialize)]
struct LaplacianJson {
    n: usize,
    format: String,
    real: Vec<(usize, usize, f64)>,
    imag: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pd_floor: f64,
}

impl HermitianLaplacian {
    /// Sparse COO JSON covering both triangles; the loader re-validates
    /// exact Hermitian pairing, so the document stays readable by external
    /// tools without trusting them.
    pub fn to_json_string(&self) -> Result<String> {
        let mut real = Vec::new();
        let mut imag = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if v.re != 0.0 {
                    real.push((i, j, v.re));
                }
                if v.im != 0.0 {
                    imag.push((i, j, v.im));
                }
            }
        }
        let doc = LaplacianJson {
            n: self.n,
            format: "coo".to_string(),
            real,
            imag,
            pd_floor: self.pd_floor,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: LaplacianJson = serde_json::from_str(s)?;
        if doc.format != "coo" {
            return Err(Error::Json(format!("unsupported format {:?}", doc.format)));
        }
        if doc.n == 0 {
            return Err(Error::Json("n must be positive".to_string()));
        }
        if doc.n > 100_000 {
            return Err(Error::Json(format!("n = {} is unreasonably large", doc.n)));
        }
        if !doc.pd_floor.is_finite() || doc.pd_floor < 0.0 {
            return Err(Error::Json(format!("pd_floor must be non-negative, got {}", doc.pd_floor)));
        }
        let n = doc.n;
        let mut re = vec![0.0f64; n * n];
        let mut im = vec![0.0f64; n * n];
        let mut seen_re = vec![false; n * n];
        let mut seen_im = vec![false; n * n];
        for &(i, j, v) in &doc.real {
            if i >= n || j >= n {
                return Err(Error::Json(format!("entry ({i}, {j}) out of range for n = {n}")));
            }
            if !v.is_finite() {
                return Err(Error::Json(format!("entry ({i}, {j}) is not finite")));
            }
            if seen_re[i * n + j] {
                return Err(Error::Json(format!("duplicate entry ({i}, {j})")));
            }
            seen_re[i * n + j] = true;
            re[i * n + j] = v;
        }
        for &(i, j, v) in &doc.imag {
            if i >= n || j >= n {
                return Err(Error::Json(format!("entry ({i}, {j}) out of range for n = {n}")));
            }
            if !v.is_finite() {
                return Err(Error::Json(format!("entry ({i}, {j}) is not finite")));
            }
            if seen_im[i * n + j] {
                return Err(Error::Json(format!("duplicate imag entry ({i}, {j})")));
            }
            seen_im[i * n + j] = true;
            im[i * n + j] = v;
        }
        // Exact Hermitian pairing.
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            if im[i * n + i] != 0.0 {
                return Err(Error::Json(format!("diagonal entry {i} has a nonzero imaginary part")));
            }
            diag.push(re[i * n + i]);
        }
        let mut upper = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = Complex64::new(re[i * n + j], im[i * n + j]);
                let b = Complex64::new(re[j * n + i], im[j * n + i]);
                if a.re != b.re || a.im != -b.im {
                    return Err(Error::Json(format!(
                        "entries ({i}, {j}) and ({j}, {i}) are not conjugate pairs"
                    )));
                }
                if a != Complex64::new(0.0, 0.0) {
                    upper.push((i, j, a));
                }
            }
        }
        Self::from_parts(diag, upper, doc.pd_floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clime::{estimate_precision, symmetrize, ClimeConfig, PrecisionEstimate};
    use crate::linalg::{empirical_covariance, to_nalgebra, Normalizer};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Three-node Hermitian triangle with weights `m·e^{jθ}`, amplitude
    /// degrees on the diagonal.
    fn three_node_triangle() -> (HermitianLaplacian, Vec<(usize, usize, f64, f64)>) {
        let edges = vec![(0usize, 1usize, 1.0, 0.3), (0, 2, 0.8, -0.7), (1, 2, 1.2, 1.1)];
        let n = 3;
        let mut diag = vec![0.0; n];
        let mut upper = Vec::new();
        for &(i, j, m, th) in &edges {
            let w = Complex64::from_polar(m, th);
            diag[i] += m;
            diag[j] += m;
            upper.push((i, j, -w));
        }
        (HermitianLaplacian::from_parts(diag, upper, 0.0).unwrap(), edges)
    }

    fn random_hermitian(n: usize, seed: u64) -> HermitianLaplacian {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut diag = Vec::with_capacity(n);
        let mut upper = Vec::new();
        for i in 0..n {
            diag.push(rng.random_range(0.5..3.0));
            for j in (i + 1)..n {
                if rng.random_range(0.0..1.0) < 0.4 {
                    upper.push((i, j, c64(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4))));
                }
            }
        }
        HermitianLaplacian::from_parts(diag, upper, 0.0).unwrap()
    }

    #[test]
    fn from_precision_round_trip_exact() {
        let cov = empirical_covariance(
            &crate::linalg::center_columns(
                &crate::linalg::ComplexDenseMatrix::from_fn(4, 60, |i, k| {
                    let t = ((i * 31 + k * 17) % 23) as f64 / 23.0 - 0.5;
                    c64(t, (t * 2.0).sin() * 0.3)
                })
                .unwrap(),
            ),
            Normalizer::BySamples,
        )
        .unwrap();
        let est = symmetrize(
            &estimate_precision(&cov, &ClimeConfig { rho: 0.2, ..Default::default() }, &Default::default()).unwrap(),
        );
        let l = HermitianLaplacian::from_precision(&est).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(l.get(i, j), est.entry(i, j), "({i}, {j})");
            }
        }
        // Decompose and reassemble entrywise exactly.
        let view = adjacency_and_degree(&l);
        let back = view.reassemble().unwrap();
        assert_eq!(back, l);
        // Residual identity holds to one ulp of the diagonal.
        for i in 0..4 {
            let recon = 2.0 * view.degrees[i] + view.self_loops[i];
            assert!((recon - l.diag()[i]).abs() <= 1e-15 * l.diag()[i].abs().max(1.0));
        }
    }

    #[test]
    fn from_precision_rejects_unsymmetrized() {
        let est = PrecisionEstimate::from_parts_for_test(2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0; 4]);
        match HermitianLaplacian::from_precision(&est) {
            Err(Error::NotSymmetrized) => {}
            other => panic!("expected NotSymmetrized, got {other:?}"),
        }
    }

    #[test]
    fn identity_precision_gives_identity_laplacian() {
        let est = symmetrize(&PrecisionEstimate::from_parts_for_test(
            3,
            vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            vec![0.0; 9],
        ));
        let l = HermitianLaplacian::from_precision(&est).unwrap();
        assert_eq!(l.diag(), &[1.0, 1.0, 1.0]);
        assert!(l.upper().is_empty());
    }

    #[test]
    fn triangle_is_hermitian_and_views_recover_weights() {
        let (l, edges) = three_node_triangle();
        let dense = l.to_dense();
        assert_eq!(dense.max_hermitian_asymmetry(), 0.0);
        let view = adjacency_and_degree(&l);
        assert_eq!(view.w_upper.len(), edges.len());
        for (&(i, j, w), &(ei, ej, m, th)) in view.w_upper.iter().zip(&edges) {
            assert_eq!((i, j), (ei, ej));
            assert!((w.norm() - m).abs() <= 1e-12 * m);
            assert!((w.arg() - th).abs() <= 1e-12);
        }
        // Amplitude degrees: residual is −degree (diag = Σm, 2D−W form).
        let back = view.reassemble().unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn two_node_adjacency_example() {
        // L = [[2, −1], [−1, 2]] → W = [[0, 1], [1, 0]], degrees 1,
        // residual 0 under the generalized form.
        let l = HermitianLaplacian::from_parts(vec![2.0, 2.0], vec![(0, 1, c64(-1.0, 0.0))], 0.0).unwrap();
        let view = adjacency_and_degree(&l);
        assert_eq!(view.w_upper, vec![(0, 1, c64(1.0, 0.0))]);
        assert_eq!(view.degrees, vec![1.0, 1.0]);
        assert_eq!(view.self_loops, vec![0.0, 0.0]);
        assert_eq!(view.reassemble().unwrap(), l);
    }

    #[test]
    fn diagonal_laplacian_has_empty_adjacency() {
        let l = HermitianLaplacian::from_parts(vec![3.0, 4.0], vec![], 0.0).unwrap();
        let view = adjacency_and_degree(&l);
        assert!(view.w_upper.is_empty());
        assert_eq!(view.degrees, vec![0.0, 0.0]);
        assert_eq!(view.self_loops, vec![3.0, 4.0]);
        assert_eq!(view.reassemble().unwrap(), l);
    }

    #[test]
    fn spectral_summary_diagonal() {
        let l = HermitianLaplacian::from_parts(vec![1.0, 2.0, 5.0], vec![], 0.0).unwrap();
        let s = spectral_summary(&l, 10_000, 1e-10).unwrap();
        assert!(s.converged);
        assert!((s.lambda_max_estimate - 5.0).abs() <= 1e-8);
        assert!((s.lambda_min_estimate - 1.0).abs() <= 1e-7);
    }

    #[test]
    fn spectral_summary_two_by_two() {
        // L = [[1, −i], [i, 1]] has eigenvalues {0, 2}.
        let l = HermitianLaplacian::from_parts(vec![1.0, 1.0], vec![(0, 1, c64(0.0, -1.0))], 0.0).unwrap();
        let s = spectral_summary(&l, 10_000, 1e-10).unwrap();
        assert!(s.converged);
        assert!((s.lambda_max_estimate - 2.0).abs() <= 1e-8);
        assert!(s.lambda_min_estimate.abs() <= 1e-7);
    }

    #[test]
    fn spectral_summary_matches_dense_eigensolver() {
        for seed in [1u64, 2, 3] {
            let l = random_hermitian(20, seed);
            let s = spectral_summary(&l, 50_000, 1e-9).unwrap();
            assert!(s.converged, "seed {seed}");
            let eig = nalgebra::SymmetricEigen::new(to_nalgebra(&l.to_dense()));
            let lmax = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            let scale = lmax.abs().max(lmin.abs());
            assert!((s.lambda_max_estimate - lmax).abs() <= 1e-6 * scale, "seed {seed}");
            assert!((s.lambda_min_estimate - lmin).abs() <= 1e-6 * scale, "seed {seed}");
        }
    }

    #[test]
    fn ensure_pd_examples() {
        // Already PD: unchanged, pd_floor stays 0.
        let l = HermitianLaplacian::from_parts(vec![1.0, 2.0], vec![], 0.0).unwrap();
        let repaired = ensure_pd(&l, 1e-6).unwrap();
        assert_eq!(repaired, l);
        assert_eq!(repaired.pd_floor(), 0.0);

        // L = diag(−1, 1), floor 1e−6 → diag(≈1e−6, 2).
        let l = HermitianLaplacian::from_parts(vec![-1.0, 1.0], vec![], 0.0).unwrap();
        let repaired = ensure_pd(&l, 1e-6).unwrap();
        assert!((repaired.diag()[0] - 1e-6).abs() <= 1e-8);
        assert!((repaired.diag()[1] - (2.0 + 1e-6)).abs() <= 1e-8);
        assert!(repaired.pd_floor() > 1.0);
        let s = spectral_summary(&repaired, 20_000, 1e-9).unwrap();
        assert!(s.lambda_min_estimate >= 1e-6 - 1e-8);
    }

    #[test]
    fn glr_realness_and_nonnegativity() {
        let (l, _) = three_node_triangle();
        let repaired = ensure_pd(&l, 1e-8).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let inf = repaired.inf_norm();
        for _ in 0..1000 {
            let x = ComplexVector::new(
                (0..3)
                    .map(|_| c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                    .collect(),
            )
            .unwrap();
            // hermitian_quadratic_form enforces the 1e-10 imaginary-residual
            // bound internally and errors if it is exceeded.
            let q = hermitian_quadratic_form(&repaired, &x).unwrap();
            let scale = inf * x.norm() * x.norm();
            assert!(q >= -1e-10 * scale, "GLR went negative: {q}");
        }
    }

    #[test]
    fn json_round_trip_exact() {
        let l = random_hermitian(6, 42);
        let json = l.to_json_string().unwrap();
        let back = HermitianLaplacian::from_json_str(&json).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn json_rejects_non_hermitian() {
        let bad = r#"{"n":2,"format":"coo","real":[[0,1,1.0],[1,0,2.0]],"imag":[],"pd_floor":0.0}"#;
        assert!(HermitianLaplacian::from_json_str(bad).is_err());
        let bad_diag = r#"{"n":1,"format":"coo","real":[[0,0,1.0]],"imag":[[0,0,0.5]],"pd_floor":0.0}"#;
        assert!(HermitianLaplacian::from_json_str(bad_diag).is_err());
    }

    #[test]
    fn edge_list_format() {
        let (l, edges) = three_node_triangle();
        let view = adjacency_and_degree(&l);
        let listing = view.edge_list_string();
        let lines: Vec<&str> = listing.lines().collect();
        assert_eq!(lines.len(), edges.len());
        let fields: Vec<&str> = lines[0].split_whitespace().collect();
        assert_eq!(fields[0], "0");
        assert_eq!(fields[1], "1");
        let amp: f64 = fields[2].parse().unwrap();
        let phase: f64 = fields[3].parse().unwrap();
        assert!((amp - 1.0).abs() <= 1e-12);
        assert!((phase - 0.3).abs() <= 1e-12);
    }
}
