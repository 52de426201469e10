//! Textbook revised simplex on equality-form problems, used to
//! cross-validate the interior-point solver on small instances.
//!
//! Phase I minimizes the sum of artificial variables; Phase II minimizes the
//! original objective after driving artificials out of the basis. Bland's
//! rule (lowest eligible index for both entering and leaving variables)
//! prevents cycling. The basis is re-factored densely at every pivot, which
//! is fine at the problem sizes this backend is meant for.

use nalgebra::{DMatrix, DVector};

use super::{LpStatus, RawOutcome};

const PIVOT_TOL: f64 = 1e-9;
const REDUCED_COST_TOL: f64 = 1e-10;
const PHASE1_TOL: f64 = 1e-8;

struct Tableau {
    /// Dense columns including artificials.
    a: Vec<DVector<f64>>,
    b: DVector<f64>,
    m: usize,
    n_struct: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn basis_matrix(&self) -> DMatrix<f64> {
        let mut mat = DMatrix::zeros(self.m, self.m);
        for (k, &j) in self.basis.iter().enumerate() {
            mat.set_column(k, &self.a[j]);
        }
        mat
    }

    /// One simplex phase with the given costs. Returns Ok(pivots) at
    /// optimality, Err(status) on unbounded / iteration limit.
    fn run_phase(&mut self, costs: &[f64], allow_enter: impl Fn(usize) -> bool, max_pivots: usize) -> Result<usize, LpStatus> {
        let total = self.a.len();
        for pivot in 0..max_pivots {
            let lu = self.basis_matrix().lu();
            let x_b = match lu.solve(&self.b) {
                Some(x) => x,
                None => return Err(LpStatus::IterLimit),
            };
            // Dual: Bᵀy = c_B.
            let c_b = DVector::from_iterator(self.m, self.basis.iter().map(|&j| costs[j]));
            let y = match self.basis_matrix().transpose().lu().solve(&c_b) {
                Some(y) => y,
                None => return Err(LpStatus::IterLimit),
            };

            // Bland: first nonbasic column with negative reduced cost.
            let mut entering = None;
            for j in 0..total {
                if self.basis.contains(&j) || !allow_enter(j) {
                    continue;
                }
                let reduced = costs[j] - self.a[j].dot(&y);
                if reduced < -REDUCED_COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else {
                return Ok(pivot);
            };

            let dir = match lu.solve(&self.a[e]) {
                Some(d) => d,
                None => return Err(LpStatus::IterLimit),
            };
            // Ratio test; Bland tie-break on the lowest basis variable index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if dir[i] > PIVOT_TOL {
                    let ratio = x_b[i].max(0.0) / dir[i];
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || ((ratio - lr).abs() <= 1e-12 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((li, _)) = leave else {
                return Err(LpStatus::Unbounded);
            };
            self.basis[li] = e;
        }
        Err(LpStatus::IterLimit)
    }

    fn solution(&self, n: usize) -> Vec<f64> {
        let lu = self.basis_matrix().lu();
        let x_b = lu.solve(&self.b).unwrap_or_else(|| DVector::zeros(self.m));
        let mut x = vec![0.0; n];
        for (k, &j) in self.basis.iter().enumerate() {
            if j < n {
                x[j] = x_b[k].max(0.0);
            }
        }
        x
    }
}

pub(super) fn solve(cols: &[Vec<(usize, f64)>], m: usize, b: &[f64], c: &[f64], max_iters: usize) -> RawOutcome {
    let n = cols.len();
    let max_pivots = max_iters.max(50 * (n + m));

    // Flip rows so b >= 0, then append one artificial column per row.
    let flip: Vec<f64> = b.iter().map(|&bi| if bi < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut a: Vec<DVector<f64>> = Vec::with_capacity(n + m);
    for col in cols {
        let mut dense = DVector::zeros(m);
        for &(r, v) in col {
            dense[r] = v * flip[r];
        }
        a.push(dense);
    }
    for r in 0..m {
        let mut art = DVector::zeros(m);
        art[r] = 1.0;
        a.push(art);
    }
    let b_pos = DVector::from_iterator(m, b.iter().zip(&flip).map(|(bi, f)| bi * f));

    let mut tab = Tableau {
        a,
        b: b_pos,
        m,
        n_struct: n,
        basis: (n..n + m).collect(),
    };

    // Phase I: minimize the artificial mass.
    let mut phase1_costs = vec![0.0; n + m];
    for cost in phase1_costs.iter_mut().skip(n) {
        *cost = 1.0;
    }
    let mut pivots = match tab.run_phase(&phase1_costs, |_| true, max_pivots) {
        Ok(p) => p,
        Err(LpStatus::Unbounded) => {
            // Phase I is bounded below by zero; treat as numerical failure.
            return RawOutcome { x: vec![0.0; n], status: LpStatus::IterLimit, iterations: 0 };
        }
        Err(s) => return RawOutcome { x: vec![0.0; n], status: s, iterations: 0 },
    };

    let lu = tab.basis_matrix().lu();
    let x_b = lu.solve(&tab.b).unwrap_or_else(|| DVector::zeros(m));
    let artificial_mass: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n)
        .map(|(k, _)| x_b[k].max(0.0))
        .sum();
    if artificial_mass > PHASE1_TOL {
        return RawOutcome {
            x: vec![0.0; n],
            status: LpStatus::Infeasible,
            iterations: pivots,
        };
    }

    // Drive remaining zero-level artificials out of the basis where a
    // structural column can replace them; rows that admit none are redundant
    // and the artificial simply stays at level zero (blocked from entering).
    for k in 0..tab.m {
        if tab.basis[k] < n {
            continue;
        }
        let lu = tab.basis_matrix().lu();
        for j in 0..tab.n_struct {
            if tab.basis.contains(&j) {
                continue;
            }
            if let Some(dir) = lu.solve(&tab.a[j]) {
                if dir[k].abs() > PIVOT_TOL {
                    tab.basis[k] = j;
                    break;
                }
            }
        }
    }

    // Phase II on the original costs; artificials may not re-enter.
    let mut phase2_costs = vec![0.0; n + m];
    phase2_costs[..n].copy_from_slice(c);
    match tab.run_phase(&phase2_costs, |j| j < n, max_pivots) {
        Ok(p) => {
            pivots += p;
            RawOutcome {
                x: tab.solution(n),
                status: LpStatus::Optimal,
                iterations: pivots,
            }
        }
        Err(LpStatus::Unbounded) => RawOutcome {
            x: tab.solution(n),
            status: LpStatus::Unbounded,
            iterations: pivots,
        },
        Err(s) => RawOutcome {
            x: tab.solution(n),
            status: s,
            iterations: pivots,
        },
    }
}
