//! Self-contained solver for linear programs in standard inequality form
//!
//! ```text
//!   minimize    cᵀx
//!   subject to  A x ≤ b
//!               lower_j ≤ x_j ≤ upper_j   (either bound optional)
//! ```
//!
//! The default algorithm is a homogeneous self-dual Mehrotra
//! predictor-corrector interior-point method; a textbook revised simplex is
//! available for cross-validation. Both are deterministic: the same problem
//! and settings always produce bit-identical results.

mod interior_point;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse real matrix in coordinate form: triplets sorted by (row, col),
/// duplicates summed, explicit zeros dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRealMatrix {
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl SparseRealMatrix {
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(r, c, v) in &triplets {
            if r >= rows || c >= cols {
                return Err(Error::LpConstruction(format!(
                    "triplet ({r}, {c}) out of range for {rows}x{cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("SparseRealMatrix"));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != 0.0);
        Ok(Self {
            rows,
            cols,
            triplets: merged,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }

    pub fn triplets(&self) -> &[(usize, usize, f64)] {
        &self.triplets
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for &(r, c, v) in &self.triplets {
            y[r] += v * x[c];
        }
        y
    }

    /// Row-wise entry lists.
    pub fn to_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for &(r, c, v) in &self.triplets {
            rows[r].push((c, v));
        }
        rows
    }

    /// Column-wise entry lists.
    pub fn to_cols(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.cols];
        for &(r, c, v) in &self.triplets {
            cols[c].push((r, v));
        }
        cols
    }
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarBound {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl VarBound {
    pub fn free() -> Self {
        Self { lower: None, upper: None }
    }

    pub fn nonneg() -> Self {
        Self { lower: Some(0.0), upper: None }
    }

    pub fn range(lower: f64, upper: f64) -> Self {
        Self {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

/// A linear program `min cᵀx s.t. Ax ≤ b` with per-variable bounds.
#[derive(Debug, Clone)]
pub struct StandardFormLp {
    objective: Vec<f64>,
    constraints: SparseRealMatrix,
    rhs: Vec<f64>,
    bounds: Vec<VarBound>,
}

impl StandardFormLp {
    pub fn new(
        objective: Vec<f64>,
        constraints: SparseRealMatrix,
        rhs: Vec<f64>,
        bounds: Vec<VarBound>,
    ) -> Result<Self> {
        let v = objective.len();
        if v == 0 {
            return Err(Error::EmptyDimension("StandardFormLp variables"));
        }
        if constraints.cols() != v {
            return Err(Error::LpConstruction(format!(
                "constraint matrix has {} columns for {v} variables",
                constraints.cols()
            )));
        }
        if constraints.rows() != rhs.len() {
            return Err(Error::LpConstruction(format!(
                "constraint matrix has {} rows but rhs has {}",
                constraints.rows(),
                rhs.len()
            )));
        }
        if bounds.len() != v {
            return Err(Error::LpConstruction(format!(
                "{} bounds for {v} variables",
                bounds.len()
            )));
        }
        if objective.iter().any(|c| !c.is_finite()) || rhs.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("StandardFormLp"));
        }
        for (j, bd) in bounds.iter().enumerate() {
            if bd.lower.is_some_and(|l| !l.is_finite()) || bd.upper.is_some_and(|u| !u.is_finite()) {
                return Err(Error::NonFinite("StandardFormLp bounds"));
            }
            if let (Some(l), Some(u)) = (bd.lower, bd.upper) {
                if l > u {
                    return Err(Error::LpConstruction(format!(
                        "variable {j} has lower bound {l} above upper bound {u}"
                    )));
                }
            }
        }
        Ok(Self {
            objective,
            constraints,
            rhs,
            bounds,
        })
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &SparseRealMatrix {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn bounds(&self) -> &[VarBound] {
        &self.bounds
    }

    /// Objective value at a point.
    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, xv)| c * xv).sum()
    }

    /// Worst constraint or bound violation at a point (0 when feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let ax = self.constraints.matvec(x);
        let mut worst = 0.0f64;
        for (lhs, b) in ax.iter().zip(&self.rhs) {
            worst = worst.max(lhs - b);
        }
        for (j, bd) in self.bounds.iter().enumerate() {
            if let Some(l) = bd.lower {
                worst = worst.max(l - x[j]);
            }
            if let Some(u) = bd.upper {
                worst = worst.max(x[j] - u);
            }
        }
        worst
    }

    /// Plain-text dump with one constraint per line, for external
    /// cross-checking. Grammar is documented in the repository README.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# lp: {} variables, {} constraints, minimize",
            self.num_variables(),
            self.num_constraints()
        );
        let terms: Vec<String> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| format!("{c}*x{j}"))
            .collect();
        let _ = writeln!(
            out,
            "minimize: {}",
            if terms.is_empty() { "0".to_string() } else { terms.join(" + ") }
        );
        let _ = writeln!(out, "subject to:");
        let rows = self.constraints.to_rows();
        for (r, row) in rows.iter().enumerate() {
            let terms: Vec<String> = row.iter().map(|&(c, v)| format!("{v}*x{c}")).collect();
            let _ = writeln!(
                out,
                "r{r}: {} <= {}",
                if terms.is_empty() { "0".to_string() } else { terms.join(" + ") },
                self.rhs[r]
            );
        }
        let _ = writeln!(out, "bounds:");
        for (j, bd) in self.bounds.iter().enumerate() {
            let line = match (bd.lower, bd.upper) {
                (None, None) => format!("x{j} free"),
                (Some(l), None) => format!("x{j} >= {l}"),
                (None, Some(u)) => format!("x{j} <= {u}"),
                (Some(l), Some(u)) => format!("{l} <= x{j} <= {u}"),
            };
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

/// Termination status of an LP solve. Non-optimal outcomes are statuses,
/// not errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

impl std::fmt::Display for LpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpStatus::Optimal => write!(f, "optimal"),
            LpStatus::Infeasible => write!(f, "infeasible"),
            LpStatus::Unbounded => write!(f, "unbounded"),
            LpStatus::IterLimit => write!(f, "iter-limit"),
        }
    }
}

/// Result of an LP solve.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub status: LpStatus,
    pub iterations: usize,
    pub max_violation: f64,
}

/// Which backend solves the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpAlgorithm {
    /// Homogeneous self-dual Mehrotra predictor-corrector (default).
    #[default]
    InteriorPoint,
    /// Revised simplex with Bland's rule; used for cross-validation.
    Simplex,
}

/// Solver settings; defaults match the crate-wide contract
/// (`feas_tol = opt_tol = 1e-8`, 200 interior-point iterations).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverSettings {
    pub algorithm: LpAlgorithm,
    pub max_iters: usize,
    pub feas_tol: f64,
    pub opt_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            algorithm: LpAlgorithm::InteriorPoint,
            max_iters: 200,
            feas_tol: 1e-8,
            opt_tol: 1e-8,
        }
    }
}

/// How each original variable maps into the equality-form problem.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    Fixed(f64),
    /// `x = lower + x̃[col]`
    Shifted { col: usize, lower: f64 },
    /// `x = upper − x̃[col]`
    Negated { col: usize, upper: f64 },
    /// `x = x̃[pos] − x̃[neg]`
    Split { pos: usize, neg: usize },
}

/// Equality-form problem `min c̃ᵀx̃ s.t. Ã x̃ = b̃, x̃ ≥ 0` plus the mapping
/// back to the original variables.
struct EqForm {
    cols: Vec<Vec<(usize, f64)>>,
    m: usize,
    b: Vec<f64>,
    c: Vec<f64>,
    map: Vec<VarMap>,
    /// An empty-column variable wanted to run away; if the rest is feasible
    /// the problem is unbounded.
    pending_unbounded: bool,
}

enum Converted {
    Solved(LpStatus, Vec<f64>),
    Problem(EqForm),
}

/// Presolve (fixed variables, empty rows/columns) and conversion to equality
/// standard form with non-negative variables.
fn to_equality_form(p: &StandardFormLp, feas_tol: f64) -> Converted {
    let v = p.num_variables();
    let rows = p.constraints.to_rows();

    // Fixed variables: lower == upper.
    let mut fixed: Vec<Option<f64>> = vec![None; v];
    for (j, bd) in p.bounds.iter().enumerate() {
        if let (Some(l), Some(u)) = (bd.lower, bd.upper) {
            if l == u {
                fixed[j] = Some(l);
            }
        }
    }

    // Substitute fixed variables into each row; identify used variables.
    let mut row_entries: Vec<Vec<(usize, f64)>> = Vec::with_capacity(rows.len());
    let mut rhs_adj = p.rhs.clone();
    let mut used = vec![false; v];
    for (r, row) in rows.iter().enumerate() {
        let mut kept = Vec::with_capacity(row.len());
        for &(j, a) in row {
            if let Some(val) = fixed[j] {
                rhs_adj[r] -= a * val;
            } else {
                kept.push((j, a));
                used[j] = true;
            }
        }
        row_entries.push(kept);
    }

    // Empty rows after substitution: 0 <= b must hold.
    let mut keep_rows = Vec::with_capacity(row_entries.len());
    for (r, row) in row_entries.iter().enumerate() {
        if row.is_empty() {
            if rhs_adj[r] < -feas_tol {
                return Converted::Solved(LpStatus::Infeasible, vec![0.0; v]);
            }
        } else {
            keep_rows.push(r);
        }
    }

    // Variables in no constraint: their optimal value follows from the
    // objective sign and bounds alone.
    let mut pending_unbounded = false;
    let mut map: Vec<VarMap> = vec![VarMap::Fixed(0.0); v];
    for j in 0..v {
        if let Some(val) = fixed[j] {
            map[j] = VarMap::Fixed(val);
        } else if !used[j] {
            let bd = p.bounds[j];
            let c = p.objective[j];
            let val = if c > 0.0 {
                match bd.lower {
                    Some(l) => l,
                    None => {
                        pending_unbounded = true;
                        0.0
                    }
                }
            } else if c < 0.0 {
                match bd.upper {
                    Some(u) => u,
                    None => {
                        pending_unbounded = true;
                        bd.lower.unwrap_or(0.0)
                    }
                }
            } else {
                bd.lower.or(bd.upper).unwrap_or(0.0)
            };
            map[j] = VarMap::Fixed(val);
        }
    }

    // Assign equality-form columns for remaining variables; doubly-bounded
    // variables are shifted to zero lower bound and pick up an extra
    // inequality row for the width.
    let mut n_cols = 0usize;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new(); // (col, width)
    for j in 0..v {
        if fixed[j].is_some() || !used[j] {
            continue;
        }
        let bd = p.bounds[j];
        map[j] = match (bd.lower, bd.upper) {
            (Some(l), Some(u)) => {
                let col = n_cols;
                n_cols += 1;
                extra_rows.push((col, u - l));
                VarMap::Shifted { col, lower: l }
            }
            (Some(l), None) => {
                let col = n_cols;
                n_cols += 1;
                VarMap::Shifted { col, lower: l }
            }
            (None, Some(u)) => {
                let col = n_cols;
                n_cols += 1;
                VarMap::Negated { col, upper: u }
            }
            (None, None) => {
                let pos = n_cols;
                let neg = n_cols + 1;
                n_cols += 2;
                VarMap::Split { pos, neg }
            }
        };
    }

    let m = keep_rows.len() + extra_rows.len();
    if m == 0 {
        // Nothing left to optimize; all variables resolved by presolve.
        let x: Vec<f64> = map
            .iter()
            .map(|mm| match mm {
                VarMap::Fixed(val) => *val,
                _ => 0.0,
            })
            .collect();
        let status = if pending_unbounded { LpStatus::Unbounded } else { LpStatus::Optimal };
        return Converted::Solved(status, x);
    }

    let n_total = n_cols + m; // structural columns + one slack per row
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_total];
    let mut b = vec![0.0; m];
    let mut c = vec![0.0; n_total];

    for (new_r, &r) in keep_rows.iter().enumerate() {
        let mut rhs_r = rhs_adj[r];
        for &(j, a) in &row_entries[r] {
            match map[j] {
                VarMap::Shifted { col, lower } => {
                    cols[col].push((new_r, a));
                    rhs_r -= a * lower;
                }
                VarMap::Negated { col, upper } => {
                    cols[col].push((new_r, -a));
                    rhs_r -= a * upper;
                }
                VarMap::Split { pos, neg } => {
                    cols[pos].push((new_r, a));
                    cols[neg].push((new_r, -a));
                }
                VarMap::Fixed(_) => unreachable!("fixed variables were substituted"),
            }
        }
        b[new_r] = rhs_r;
    }
    for (k, &(col, width)) in extra_rows.iter().enumerate() {
        let r = keep_rows.len() + k;
        cols[col].push((r, 1.0));
        b[r] = width;
    }
    // Slacks.
    for r in 0..m {
        cols[n_cols + r].push((r, 1.0));
    }

    for j in 0..v {
        match map[j] {
            VarMap::Shifted { col, .. } => c[col] += p.objective[j],
            VarMap::Negated { col, .. } => c[col] -= p.objective[j],
            VarMap::Split { pos, neg } => {
                c[pos] += p.objective[j];
                c[neg] -= p.objective[j];
            }
            VarMap::Fixed(_) => {}
        }
    }

    Converted::Problem(EqForm {
        cols,
        m,
        b,
        c,
        map,
        pending_unbounded,
    })
}

fn reconstruct(map: &[VarMap], x_eq: &[f64]) -> Vec<f64> {
    map.iter()
        .map(|mm| match *mm {
            VarMap::Fixed(val) => val,
            VarMap::Shifted { col, lower } => lower + x_eq[col],
            VarMap::Negated { col, upper } => upper - x_eq[col],
            VarMap::Split { pos, neg } => x_eq[pos] - x_eq[neg],
        })
        .collect()
}

/// Ruiz equilibration: symmetric row/column scaling toward unit ∞-norms.
/// Returns the accumulated column scales so solutions can be mapped back
/// (`x_j = col_scale_j · u_j`); rows only rescale constraints in place.
fn equilibrate(cols: &mut [Vec<(usize, f64)>], m: usize, b: &mut [f64], c: &mut [f64]) -> Vec<f64> {
    let n = cols.len();
    let mut col_scale = vec![1.0f64; n];
    for _ in 0..5 {
        let mut row_max = vec![0.0f64; m];
        for col in cols.iter() {
            for &(r, v) in col {
                row_max[r] = row_max[r].max(v.abs());
            }
        }
        let row_scale: Vec<f64> = row_max
            .iter()
            .map(|&mx| if mx > 0.0 { 1.0 / mx.sqrt() } else { 1.0 })
            .collect();
        for col in cols.iter_mut() {
            for (r, v) in col.iter_mut() {
                *v *= row_scale[*r];
            }
        }
        for (bi, s) in b.iter_mut().zip(&row_scale) {
            *bi *= s;
        }
        for (j, col) in cols.iter_mut().enumerate() {
            let mx = col.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max);
            if mx > 0.0 {
                let s = 1.0 / mx.sqrt();
                for (_, v) in col.iter_mut() {
                    *v *= s;
                }
                c[j] *= s;
                col_scale[j] *= s;
            }
        }
    }
    col_scale
}

/// Solve a linear program. Statuses other than `Optimal` are reported, not
/// raised; malformed problems are rejected at construction time.
pub fn solve_lp(p: &StandardFormLp, settings: &SolverSettings) -> LpSolution {
    let eq = match to_equality_form(p, settings.feas_tol) {
        Converted::Solved(status, x) => {
            let objective_value = p.objective_at(&x);
            let max_violation = p.max_violation(&x);
            let status = if status == LpStatus::Optimal && max_violation > settings.feas_tol {
                LpStatus::Infeasible
            } else {
                status
            };
            return LpSolution {
                x,
                objective_value,
                status,
                iterations: 0,
                max_violation,
            };
        }
        Converted::Problem(eq) => eq,
    };

    let mut cols = eq.cols.clone();
    let mut b = eq.b.clone();
    let mut c = eq.c.clone();
    let col_scale = equilibrate(&mut cols, eq.m, &mut b, &mut c);
    let unscale = |u: &[f64]| -> Vec<f64> {
        let x_eq: Vec<f64> = u.iter().zip(&col_scale).map(|(ui, s)| ui * s).collect();
        reconstruct(&eq.map, &x_eq)
    };

    let tol = settings.feas_tol.min(settings.opt_tol);
    let mut attempt_tol = tol;
    let mut outcome = match settings.algorithm {
        LpAlgorithm::InteriorPoint => interior_point::solve(&cols, eq.m, &b, &c, attempt_tol, settings.max_iters),
        LpAlgorithm::Simplex => simplex::solve(&cols, eq.m, &b, &c, settings.max_iters),
    };

    // The interior-point convergence test is relative; tighten and re-run if
    // the returned point misses the absolute feasibility contract.
    if settings.algorithm == LpAlgorithm::InteriorPoint {
        for _ in 0..2 {
            if outcome.status != LpStatus::Optimal {
                break;
            }
            if p.max_violation(&unscale(&outcome.x)) <= settings.feas_tol {
                break;
            }
            attempt_tol *= 1e-2;
            outcome = interior_point::solve(&cols, eq.m, &b, &c, attempt_tol, settings.max_iters);
        }
    }

    let status = match outcome.status {
        LpStatus::Optimal if eq.pending_unbounded => LpStatus::Unbounded,
        s => s,
    };
    let x = unscale(&outcome.x);
    let objective_value = p.objective_at(&x);
    let max_violation = p.max_violation(&x);
    LpSolution {
        x,
        objective_value,
        status,
        iterations: outcome.iterations,
        max_violation,
    }
}

/// Outcome of a backend solve on the equality-form problem.
pub(crate) struct RawOutcome {
    pub x: Vec<f64>,
    pub status: LpStatus,
    pub iterations: usize,
}
