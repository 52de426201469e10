//! Synthetic ground-truth generation and dataset handling: random Hermitian
//! Laplacians, circularly-symmetric Gaussian sampling with the Laplacian as
//! precision matrix, CSV ingestion, and train/test splitting.
//!
//! Complex-Gaussian convention used throughout: a standard circular draw has
//! `E[z zᴴ] = I`, i.e. unit total variance per entry split evenly between
//! the real and imaginary components.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Cholesky, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laplacian::{spectral_summary, HermitianLaplacian, SPECTRAL_DEFAULT_MAX_ITERS, SPECTRAL_DEFAULT_TOL};
use crate::linalg::{to_nalgebra, ComplexDenseMatrix};

/// A known-good generating model: a positive-definite Hermitian Laplacian
/// plus the seed that produced it.
#[derive(Debug, Clone)]
pub struct GroundTruthModel {
    laplacian: HermitianLaplacian,
    seed: u64,
}

impl GroundTruthModel {
    pub fn new(laplacian: HermitianLaplacian, seed: u64) -> Result<Self> {
        let s = spectral_summary(&laplacian, SPECTRAL_DEFAULT_MAX_ITERS, SPECTRAL_DEFAULT_TOL)?;
        if s.lambda_min_estimate <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ground-truth Laplacian must be positive definite; smallest eigenvalue estimate {}",
                s.lambda_min_estimate
            )));
        }
        Ok(Self { laplacian, seed })
    }

    pub fn laplacian(&self) -> &HermitianLaplacian {
        &self.laplacian
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.laplacian.n()
    }

    /// Serialize as the Laplacian COO document plus the generator seed.
    pub fn to_json_string(&self) -> Result<String> {
        let mut doc: serde_json::Value = serde_json::from_str(&self.laplacian.to_json_string()?)?;
        doc.as_object_mut()
            .expect("laplacian json is an object")
            .insert("seed".to_string(), serde_json::json!(self.seed));
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: serde_json::Value = serde_json::from_str(s)?;
        let seed = doc
            .get("seed")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Json("ground-truth model is missing a seed".to_string()))?;
        let laplacian = HermitianLaplacian::from_json_str(s)?;
        Self::new(laplacian, seed)
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Synthetic { seed: u64 },
    Csv { path: String },
}

/// An observation matrix `X ∈ ℂ^{N×K}` (columns are observations) with a
/// disjoint train/test split covering all columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: ComplexDenseMatrix,
    train: Vec<usize>,
    test: Vec<usize>,
    source: DataSource,
    centered: bool,
}

impl Dataset {
    pub fn new(x: ComplexDenseMatrix, train: Vec<usize>, test: Vec<usize>, source: DataSource, centered: bool) -> Result<Self> {
        let k = x.cols();
        let mut seen = vec![false; k];
        for &idx in train.iter().chain(&test) {
            if idx >= k {
                return Err(Error::IndexOutOfRange { index: idx, len: k });
            }
            if seen[idx] {
                return Err(Error::InvalidParameter(format!(
                    "column {idx} appears twice in the train/test split"
                )));
            }
            seen[idx] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter(
                "train and test must cover every column".to_string(),
            ));
        }
        Ok(Self {
            x,
            train,
            test,
            source,
            centered,
        })
    }

    fn all_train(x: ComplexDenseMatrix, source: DataSource) -> Self {
        let k = x.cols();
        Self {
            x,
            train: (0..k).collect(),
            test: Vec::new(),
            source,
            centered: false,
        }
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn k(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &ComplexDenseMatrix {
        &self.x
    }

    pub fn train_indices(&self) -> &[usize] {
        &self.train
    }

    pub fn test_indices(&self) -> &[usize] {
        &self.test
    }

    pub fn source(&self) -> &DataSource {
        &self.source
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Submatrix of the training columns (in split order).
    pub fn train_matrix(&self) -> Result<ComplexDenseMatrix> {
        self.submatrix(&self.train)
    }

    /// Submatrix of the first `count` training columns.
    pub fn train_matrix_truncated(&self, count: usize) -> Result<ComplexDenseMatrix> {
        if count == 0 || count > self.train.len() {
            return Err(Error::InvalidParameter(format!(
                "requested {count} training columns, split has {}",
                self.train.len()
            )));
        }
        self.submatrix(&self.train[..count])
    }

    fn submatrix(&self, cols: &[usize]) -> Result<ComplexDenseMatrix> {
        if cols.is_empty() {
            return Err(Error::EmptyDimension("dataset selection"));
        }
        let n = self.n();
        let mut entries = Vec::with_capacity(n * cols.len());
        for i in 0..n {
            for &j in cols {
                entries.push(self.x.get(i, j));
            }
        }
        ComplexDenseMatrix::new(n, cols.len(), entries)
    }

    /// Test column `t` as a vector.
    pub fn test_column(&self, t: usize) -> Result<Vec<Complex64>> {
        let idx = *self
            .test
            .get(t)
            .ok_or(Error::IndexOutOfRange { index: t, len: self.test.len() })?;
        Ok(self.x.column(idx))
    }

    /// Component projection: a real dataset built from `Re(X)` or `Im(X)`.
    pub fn component(&self, imaginary: bool) -> Result<Dataset> {
        let entries = self
            .x
            .entries()
            .iter()
            .map(|z| Complex64::new(if imaginary { z.im } else { z.re }, 0.0))
            .collect();
        let x = ComplexDenseMatrix::new(self.n(), self.k(), entries)?;
        Dataset::new(x, self.train.clone(), self.test.clone(), self.source.clone(), self.centered)
    }
}

/// Generate a random Hermitian Laplacian: Bernoulli(`edge_density`) edges,
/// amplitudes `m ~ U(0.5, 1.5)`, phases `θ ~ U(−phase_spread, phase_spread)`,
/// weight `w = m·e^{jθ}` with the conjugate on the reverse edge. Node
/// degrees take the amplitude sum `Σ|w|`, which keeps `D − W` positive
/// semi-definite by Gershgorin; diagonal loading then raises the smallest
/// eigenvalue to 0.1 so the model is a usable precision matrix.
pub fn random_hermitian_laplacian(n: usize, edge_density: f64, phase_spread: f64, seed: u64) -> Result<GroundTruthModel> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 nodes, got {n}")));
    }
    if !(edge_density > 0.0 && edge_density <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "edge_density must lie in (0, 1], got {edge_density}"
        )));
    }
    if !(0.0..=std::f64::consts::PI).contains(&phase_spread) {
        return Err(Error::InvalidParameter(format!(
            "phase_spread must lie in [0, π], got {phase_spread}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut diag = vec![0.0; n];
    let mut upper = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_range(0.0..1.0) < edge_density {
                let amp = rng.random_range(0.5..1.5);
                let phase = if phase_spread == 0.0 {
                    0.0
                } else {
                    rng.random_range(-phase_spread..phase_spread)
                };
                let w = Complex64::from_polar(amp, phase);
                diag[i] += amp;
                diag[j] += amp;
                upper.push((i, j, -w));
            }
        }
    }
    let l = HermitianLaplacian::from_parts(diag, upper, 0.0)?;
    // Exact smallest eigenvalue from the dense solver, then load to 0.1.
    let eig = nalgebra::SymmetricEigen::new(to_nalgebra(&l.to_dense()));
    let lambda_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let target = 0.1;
    let loaded = if lambda_min < target {
        let load = target - lambda_min;
        let diag: Vec<f64> = l.diag().iter().map(|d| d + load).collect();
        HermitianLaplacian::from_parts(diag, l.upper().to_vec(), load)?
    } else {
        l
    };
    GroundTruthModel::new(loaded, seed)
}

/// Draw `k` i.i.d. states from the zero-mean circular Gaussian whose
/// precision matrix is the model Laplacian: Cholesky `L = GGᴴ`, then
/// `x = G^{-ᴴ} z` per column, so `E[xxᴴ] = L⁻¹`.
pub fn sample_gmrf(model: &GroundTruthModel, k: usize, seed: u64) -> Result<Dataset> {
    if k == 0 {
        return Err(Error::EmptyDimension("sample count"));
    }
    let n = model.n();
    let dense = to_nalgebra(&model.laplacian().to_dense());
    let chol = Cholesky::new(dense).ok_or(Error::CholeskyFailed)?;
    let g_adj = chol.l().adjoint(); // upper triangular

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * k];
    for col in 0..k {
        let z = DVector::from_iterator(
            n,
            (0..n).map(|_| {
                let re: f64 = normal.sample(&mut rng);
                let im: f64 = normal.sample(&mut rng);
                Complex64::new(re * half, im * half)
            }),
        );
        let x = g_adj
            .solve_upper_triangular(&z)
            .ok_or(Error::CholeskyFailed)?;
        for row in 0..n {
            entries[row * k + col] = x[row];
        }
    }
    let x = ComplexDenseMatrix::new(n, k, entries)?;
    Ok(Dataset::all_train(x, DataSource::Synthetic { seed }))
}

/// Split into `train_count` training columns and the rest for testing,
/// uniformly at random, deterministic per seed.
pub fn split(ds: &Dataset, train_count: usize, seed: u64) -> Result<Dataset> {
    let k = ds.k();
    if train_count == 0 || train_count >= k {
        return Err(Error::InvalidParameter(format!(
            "train_count must lie in [1, {}), got {train_count}",
            k
        )));
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    let mut train: Vec<usize> = idx[..train_count].to_vec();
    let mut test: Vec<usize> = idx[train_count..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Dataset::new(ds.x.clone(), train, test, ds.source.clone(), ds.centered)
}

/// CSV layout: one observation per row, `2N` fields
/// `re_1,im_1,...,re_N,im_N`, optional first header row `# n=<N>`.
pub fn save_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(ds.x(), &mut file)
}

/// Write the observation matrix in the dataset CSV layout.
pub fn write_csv<W: Write>(x: &ComplexDenseMatrix, out: &mut W) -> Result<()> {
    let n = x.rows();
    writeln!(out, "# n={n}")?;
    for col in 0..x.cols() {
        let mut row = String::new();
        for i in 0..n {
            if i > 0 {
                row.push(',');
            }
            let z = x.get(i, col);
            row.push_str(&format!("{},{}", z.re, z.im));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Parse dataset CSV bytes. Malformed rows are reported with 1-based line
/// numbers; never panics on arbitrary input.
pub fn parse_csv_bytes(bytes: &[u8]) -> Result<ComplexDenseMatrix> {
    let mut n: Option<usize> = None;
    let mut columns: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, line) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_num = lineno + 1;
        let text = std::str::from_utf8(line).map_err(|_| Error::Csv {
            line: line_num,
            message: "not valid utf-8".to_string(),
        })?;
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(value) = rest.strip_prefix("n=") {
                let declared: usize = value.trim().parse().map_err(|_| Error::Csv {
                    line: line_num,
                    message: format!("bad node count in header: {value:?}"),
                })?;
                if declared == 0 || declared > 1_000_000 {
                    return Err(Error::Csv {
                        line: line_num,
                        message: format!("node count {declared} out of range"),
                    });
                }
                if let Some(existing) = n {
                    if existing != declared {
                        return Err(Error::Csv {
                            line: line_num,
                            message: format!("header declares n={declared} but data has n={existing}"),
                        });
                    }
                } else {
                    n = Some(declared);
                }
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() % 2 != 0 {
            return Err(Error::Csv {
                line: line_num,
                message: format!("{} fields; expected an even count (re/im pairs)", fields.len()),
            });
        }
        let row_n = fields.len() / 2;
        match n {
            Some(existing) if existing != row_n => {
                return Err(Error::Csv {
                    line: line_num,
                    message: format!("row has {row_n} nodes, expected {existing}"),
                });
            }
            None => n = Some(row_n),
            _ => {}
        }
        let mut column = Vec::with_capacity(row_n);
        for pair in fields.chunks(2) {
            let re: f64 = pair[0].trim().parse().map_err(|_| Error::Csv {
                line: line_num,
                message: format!("non-numeric field {:?}", pair[0]),
            })?;
            let im: f64 = pair[1].trim().parse().map_err(|_| Error::Csv {
                line: line_num,
                message: format!("non-numeric field {:?}", pair[1]),
            })?;
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Csv {
                    line: line_num,
                    message: "non-finite value".to_string(),
                });
            }
            column.push(Complex64::new(re, im));
        }
        columns.push(column);
    }
    let n = n.ok_or(Error::Csv {
        line: 0,
        message: "no data rows".to_string(),
    })?;
    if columns.is_empty() {
        return Err(Error::Csv {
            line: 0,
            message: "no data rows".to_string(),
        });
    }
    let k = columns.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * k];
    for (col, column) in columns.iter().enumerate() {
        for (row, z) in column.iter().enumerate() {
            entries[row * k + col] = *z;
        }
    }
    ComplexDenseMatrix::new(n, k, entries)
}

/// Load a dataset from a CSV file; all columns land in the train split.
pub fn load_csv(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    let mut reader = std::io::BufReader::new(file);
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let x = parse_csv_bytes(&bytes)?;
    Ok(Dataset::all_train(
        x,
        DataSource::Csv {
            path: path.display().to_string(),
        },
    ))
}
