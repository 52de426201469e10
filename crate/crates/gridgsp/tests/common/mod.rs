//! Shared test oracles, independent of the library's solver paths:
//! a hand-rolled dense linear solver, basic-solution enumeration for small
//! linear programs, a reduced enumeration oracle for precision columns, a
//! real-arithmetic reference pipeline, and an exact-permutation Spearman
//! trend test.

#![allow(dead_code)]

use gridgsp::clime::ClimeConfig;
use gridgsp::linalg::CovarianceMatrix;
use gridgsp::lp::{solve_lp, LpStatus, SolverSettings, SparseRealMatrix, StandardFormLp, VarBound};

/// Gaussian elimination with partial pivoting; `None` when singular.
/// Deliberately not nalgebra: oracles must not share code with the paths
/// they check.
pub fn gauss_solve(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut m: Vec<f64> = a.to_vec();
    let mut rhs: Vec<f64> = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for row in (col + 1)..n {
            let v = m[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best < 1e-11 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            rhs.swap(col, piv);
        }
        let d = m[col * n + col];
        for row in (col + 1)..n {
            let f = m[row * n + col] / d;
            if f != 0.0 {
                for j in col..n {
                    m[row * n + j] -= f * m[col * n + j];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..n {
            acc -= m[row * n + j] * x[j];
        }
        x[row] = acc / m[row * n + row];
    }
    Some(x)
}

fn combinations(pool: usize, take: usize, mut visit: impl FnMut(&[usize])) {
    if take > pool {
        return;
    }
    let mut idx: Vec<usize> = (0..take).collect();
    loop {
        visit(&idx);
        // Advance to the next combination in lexicographic order.
        let mut i = take;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + pool - take {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..take {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Brute-force optimum of `min cᵀx s.t. rows·x ≤ rhs` plus variable bounds,
/// by enumerating every basic solution (all |vars|-subsets of the tight
/// constraint set). Exponential; fine for ≤ 10 variables.
pub fn vertex_enumeration_optimum(
    c: &[f64],
    rows: &[Vec<f64>],
    rhs: &[f64],
    bounds: &[(Option<f64>, Option<f64>)],
) -> Option<f64> {
    let v = c.len();
    let mut all_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (a, &b) in rows.iter().zip(rhs) {
        all_rows.push((a.clone(), b));
    }
    for (j, &(lo, up)) in bounds.iter().enumerate() {
        if let Some(l) = lo {
            let mut a = vec![0.0; v];
            a[j] = -1.0;
            all_rows.push((a, -l));
        }
        if let Some(u) = up {
            let mut a = vec![0.0; v];
            a[j] = 1.0;
            all_rows.push((a, u));
        }
    }
    let total = all_rows.len();
    let mut best: Option<f64> = None;
    combinations(total, v, |subset| {
        let mut mat = Vec::with_capacity(v * v);
        let mut b = Vec::with_capacity(v);
        for &r in subset {
            mat.extend_from_slice(&all_rows[r].0);
            b.push(all_rows[r].1);
        }
        if let Some(x) = gauss_solve(&mat, v, &b) {
            let feasible = all_rows.iter().all(|(a, bb)| {
                let lhs: f64 = a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
                lhs <= bb + 1e-9 * (1.0 + bb.abs())
            });
            if feasible {
                let obj: f64 = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
                best = Some(match best {
                    None => obj,
                    Some(cur) => cur.min(obj),
                });
            }
        }
    });
    best
}

/// Enumeration oracle for one precision column at small N.
///
/// Works in the reduced variable space `p̃ = (p^R, p^I) ∈ ℝ^{2N}`: the
/// feasible set is `|Re r_k| + |Im r_k| ≤ ρ` for the residual
/// `r = C p − e_i` (four linear rows per node), and the objective is
/// `‖p̃‖₁`. An optimal vertex of the lifted epigraph program projects onto
/// a point where (#zero coordinates) + (#active rows) ≥ 2N, so enumerating
/// all such square systems finds the optimal value exactly.
pub fn clime_column_oracle(c: &CovarianceMatrix, i: usize, rho: f64) -> Option<f64> {
    let n = c.n();
    let d = 2 * n;
    // Rows: (coefficients over p̃, rhs).
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(4 * n);
    for k in 0..n {
        let mut re_coeff = vec![0.0; d];
        let mut im_coeff = vec![0.0; d];
        for j in 0..n {
            let ckj = c.get(k, j);
            re_coeff[j] = ckj.re;
            re_coeff[n + j] = -ckj.im;
            im_coeff[j] = ckj.im;
            im_coeff[n + j] = ckj.re;
        }
        let delta = if k == i { 1.0 } else { 0.0 };
        for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let coeff: Vec<f64> = re_coeff
                .iter()
                .zip(&im_coeff)
                .map(|(a, b)| s1 * a + s2 * b)
                .collect();
            rows.push((coeff, rho + s1 * delta));
        }
    }

    let feasible = |p: &[f64]| {
        rows.iter().all(|(a, b)| {
            let lhs: f64 = a.iter().zip(p).map(|(ai, pi)| ai * pi).sum();
            lhs <= b + 1e-9 * (1.0 + b.abs())
        })
    };

    let mut best: Option<f64> = None;
    let mut consider = |p: &[f64]| {
        if feasible(p) {
            let obj: f64 = p.iter().map(|v| v.abs()).sum();
            best = Some(match best {
                None => obj,
                Some(cur) => cur.min(obj),
            });
        }
    };

    // p = 0 candidate (all coordinates zeroed, no active rows needed).
    consider(&vec![0.0; d]);

    let row_count = rows.len();
    for z in 0..d {
        let active_rows = d - z;
        if active_rows > row_count {
            continue;
        }
        combinations(d, z, |zero_set| {
            let free: Vec<usize> = (0..d).filter(|j| !zero_set.contains(j)).collect();
            let f = free.len();
            if f == 0 {
                return;
            }
            combinations(row_count, f, |row_set| {
                // Solve the f×f system over the free coordinates.
                let mut mat = Vec::with_capacity(f * f);
                let mut b = Vec::with_capacity(f);
                for &r in row_set {
                    for &j in &free {
                        mat.push(rows[r].0[j]);
                    }
                    b.push(rows[r].1);
                }
                if let Some(xf) = gauss_solve(&mat, f, &b) {
                    let mut p = vec![0.0; d];
                    for (slot, &j) in free.iter().enumerate() {
                        p[j] = xf[slot];
                    }
                    consider(&p);
                }
            });
        });
    }
    best
}

/// Reference implementation of real-valued precision-column estimation:
/// assembles the real program directly (variables `p` and `p̄` only) and
/// returns the symmetrized estimate, row-major.
pub fn real_clime_reference(c_real: &[f64], n: usize, rho: f64, settings: &SolverSettings) -> Vec<f64> {
    let mut p_raw = vec![0.0; n * n];
    for i in 0..n {
        // Variables [p (free, n) | p̄ (nonneg, n)].
        let v = 2 * n;
        let m = 4 * n;
        let mut triplets = Vec::new();
        let mut rhs = vec![0.0; m];
        for k in 0..n {
            // p_k − p̄_k ≤ 0 and −p_k − p̄_k ≤ 0.
            triplets.push((k, k, 1.0));
            triplets.push((k, n + k, -1.0));
            triplets.push((n + k, k, -1.0));
            triplets.push((n + k, n + k, -1.0));
            // ±(C p − e_i)_k ≤ ρ.
            for j in 0..n {
                let ckj = c_real[k * n + j];
                if ckj != 0.0 {
                    triplets.push((2 * n + k, j, ckj));
                    triplets.push((3 * n + k, j, -ckj));
                }
            }
            let delta = if k == i { 1.0 } else { 0.0 };
            rhs[2 * n + k] = rho + delta;
            rhs[3 * n + k] = rho - delta;
        }
        let mut objective = vec![0.0; v];
        for k in 0..n {
            objective[n + k] = 1.0;
        }
        let mut bounds = vec![VarBound::free(); v];
        for b in bounds.iter_mut().take(v).skip(n) {
            *b = VarBound::nonneg();
        }
        let lp = StandardFormLp::new(
            objective,
            SparseRealMatrix::from_triplets(m, v, triplets).unwrap(),
            rhs,
            bounds,
        )
        .unwrap();
        let sol = solve_lp(&lp, settings);
        assert_eq!(sol.status, LpStatus::Optimal, "real reference column {i}");
        for j in 0..n {
            p_raw[j * n + i] = sol.x[j];
        }
    }
    let mut p_sym = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p_sym[i * n + j] = (p_raw[i * n + j] + p_raw[j * n + i]) * 0.5;
        }
    }
    p_sym
}

/// Spearman rank correlation of `values` against their index order, plus
/// the exact one-sided permutation p-value `P(ρ_perm ≤ ρ_observed)`.
/// Assumes distinct values (continuous data); n ≤ 8.
pub fn spearman_exact(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!((2..=8).contains(&n), "exact permutation test limited to n in 2..=8");
    let rank = |vals: &[f64]| -> Vec<usize> {
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        let mut r = vec![0usize; vals.len()];
        for (rk, &idx) in order.iter().enumerate() {
            r[idx] = rk;
        }
        r
    };
    let rho_of = |ranks: &[usize]| -> f64 {
        let nn = ranks.len() as f64;
        let d2: f64 = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let d = i as f64 - r as f64;
                d * d
            })
            .sum();
        1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0))
    };
    let observed = rho_of(&rank(values));

    // Enumerate all permutations of 0..n (Heap's algorithm).
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counts = (0usize, 0usize); // (≤ observed, total)
    let mut stack = vec![0usize; n];
    let mut tally = |p: &[usize]| {
        counts.1 += 1;
        if rho_of(p) <= observed + 1e-12 {
            counts.0 += 1;
        }
    };
    tally(&perm);
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            tally(&perm);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    (observed, counts.0 as f64 / counts.1 as f64)
}

/// Default CLIME settings used across oracle tests.
pub fn oracle_clime_config(rho: f64) -> ClimeConfig {
    ClimeConfig {
        rho,
        sparsity_epsilon: 0.0,
        column_parallelism: 0,
    }
}
