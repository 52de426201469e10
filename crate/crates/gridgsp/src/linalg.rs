//! Complex dense linear-algebra primitives shared by every other module:
//! signal vectors, observation matrices, empirical covariance, and the
//! Hermitian quadratic form.
//!
//! All types are immutable after construction and validate their invariants
//! (finite entries, positive dimensions) when built, so downstream code can
//! rely on them without re-checking.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{Tolerances, QUADRATIC_FORM_IMAG_REL_TOL};

/// A complex signal vector of length `n > 0` with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDimension("ComplexVector"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("ComplexVector"));
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length > 0 by construction
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Euclidean norm `‖x‖₂`.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

/// A dense row-major complex matrix with positive dimensions and finite
/// entries. Used both for observation matrices `X ∈ ℂ^{N×K}` and for small
/// dense operators in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexDenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyDimension("ComplexDenseMatrix"));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("ComplexDenseMatrix"));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Maximum entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Matrix ∞-norm: maximum absolute row sum (moduli).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `y = A x` for square or rectangular `A`.
    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            for (a, xv) in row.iter().zip(x) {
                acc += a * xv;
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// Maximum asymmetry `max |A[i][j] − conj(A[j][i])|` over a square matrix.
    pub fn max_hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols.min(self.rows) {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Which divisor the empirical covariance used.
///
/// `ByNodes` divides by the node count `N`; `BySamples` divides by the
/// sample count `K` (the conventional estimator). The two differ by a factor
/// `K/N`, which rescales the feasible range of the sparsity slack in the
/// precision-estimation stage, so the choice is recorded in the type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    ByNodes,
    BySamples,
}

impl std::fmt::Display for Normalizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Normalizer::ByNodes => write!(f, "by-nodes"),
            Normalizer::BySamples => write!(f, "by-samples"),
        }
    }
}

/// An `N×N` empirical covariance with exact Hermitian symmetry and a real,
/// non-negative diagonal (within [`Tolerances`]).
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    matrix: ComplexDenseMatrix,
    sample_count: usize,
    normalizer: Normalizer,
}

impl CovarianceMatrix {
    /// Wrap an already-computed covariance, validating the invariants.
    pub fn new(matrix: ComplexDenseMatrix, sample_count: usize, normalizer: Normalizer) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch(format!(
                "covariance must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let tols = Tolerances::default();
        let scale = matrix.max_abs();
        let bound = tols.bound(scale);
        let asym = matrix.max_hermitian_asymmetry();
        if asym > bound {
            return Err(Error::NotHermitian {
                max_asymmetry: asym,
                tol: bound,
            });
        }
        for i in 0..matrix.rows() {
            let d = matrix.get(i, i);
            if d.im.abs() > bound {
                return Err(Error::DiagonalNotReal {
                    index: i,
                    imag: d.im,
                    tol: bound,
                });
            }
            if d.re < -bound {
                return Err(Error::InvalidParameter(format!(
                    "covariance diagonal entry {i} is negative: {}",
                    d.re
                )));
            }
        }
        Ok(Self {
            matrix,
            sample_count,
            normalizer,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexDenseMatrix {
        &self.matrix
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn normalizer(&self) -> Normalizer {
        self.normalizer
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }

    /// Real part matrix `C^R` (row-major).
    pub fn real_part(&self) -> Vec<f64> {
        self.matrix.entries().iter().map(|z| z.re).collect()
    }

    /// Imaginary part matrix `C^I` (row-major).
    pub fn imag_part(&self) -> Vec<f64> {
        self.matrix.entries().iter().map(|z| z.im).collect()
    }

    /// Largest imaginary-part magnitude; zero for covariances of real data.
    pub fn max_imag(&self) -> f64 {
        self.matrix.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Empirical covariance `C = (1/d) X Xᴴ` with `d = N` (`ByNodes`) or `d = K`
/// (`BySamples`). The caller is expected to have centered the columns first
/// (see [`center_columns`]); exact Hermitian symmetry is enforced by
/// averaging the product with its conjugate transpose.
pub fn empirical_covariance(x: &ComplexDenseMatrix, normalizer: Normalizer) -> Result<CovarianceMatrix> {
    let n = x.rows();
    let k = x.cols();
    let d = match normalizer {
        Normalizer::ByNodes => n as f64,
        Normalizer::BySamples => k as f64,
    };
    let mut raw = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for kk in 0..k {
                acc += x.get(i, kk) * x.get(j, kk).conj();
            }
            raw[i * n + j] = acc / d;
        }
    }
    // Average with the conjugate transpose; makes C[i][j] == conj(C[j][i])
    // bit-exact and the diagonal exactly real.
    let mut sym = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            sym[i * n + j] = (raw[i * n + j] + raw[j * n + i].conj()) * 0.5;
        }
    }
    let matrix = ComplexDenseMatrix::new(n, n, sym)?;
    CovarianceMatrix::new(matrix, k, normalizer)
}

/// Remove the per-row mean across columns, so every node's signal is
/// zero-mean over the K observations.
pub fn center_columns(x: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    let n = x.rows();
    let k = x.cols();
    let mut entries = Vec::with_capacity(n * k);
    for i in 0..n {
        let mut mean = Complex64::new(0.0, 0.0);
        for j in 0..k {
            mean += x.get(i, j);
        }
        mean /= k as f64;
        for j in 0..k {
            entries.push(x.get(i, j) - mean);
        }
    }
    ComplexDenseMatrix::new(n, k, entries).expect("centering preserves shape and finiteness")
}

/// A Hermitian linear operator: anything that can apply itself to a vector
/// and bound its ∞-norm. Implemented by dense matrices, the sparse Laplacian,
/// and the interpolation system operator.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
    /// Upper bound on the operator ∞-norm (max absolute row sum).
    fn operator_inf_norm(&self) -> f64;
}

impl HermitianOperator for ComplexDenseMatrix {
    fn dim(&self) -> usize {
        self.rows
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matvec(x).expect("dimension checked by caller")
    }

    fn operator_inf_norm(&self) -> f64 {
        self.inf_norm()
    }
}

/// `Re(xᴴ L x)` for Hermitian `L`, with a diagnostic error if the imaginary
/// residual exceeds `1e-10 · ‖L‖_∞ · ‖x‖₂²` (which would indicate a
/// non-Hermitian operator upstream).
pub fn hermitian_quadratic_form<L: HermitianOperator + ?Sized>(l: &L, x: &ComplexVector) -> Result<f64> {
    if x.len() != l.dim() {
        return Err(Error::DimensionMismatch(format!(
            "quadratic form: operator dimension {}, vector length {}",
            l.dim(),
            x.len()
        )));
    }
    let lx = l.apply(x.entries());
    let mut s = Complex64::new(0.0, 0.0);
    for (xi, lxi) in x.entries().iter().zip(&lx) {
        s += xi.conj() * lxi;
    }
    let norm_sq = x.entries().iter().map(|z| z.norm_sqr()).sum::<f64>();
    let bound = QUADRATIC_FORM_IMAG_REL_TOL * l.operator_inf_norm() * norm_sq;
    if s.im.abs() > bound {
        return Err(Error::ImaginaryResidual {
            residual: s.im.abs(),
            bound,
        });
    }
    Ok(s.re)
}

/// Convert to a nalgebra matrix for dense factorizations.
pub(crate) fn to_nalgebra(m: &ComplexDenseMatrix) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_row_iterator(m.rows(), m.cols(), m.entries().iter().copied())
}
