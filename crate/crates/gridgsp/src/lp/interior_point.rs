//! Homogeneous self-dual Mehrotra predictor-corrector interior-point method
//! for equality-form problems `min cᵀx s.t. Ax = b, x ≥ 0`.
//!
//! The homogeneous embedding adds scalars τ (primal homogenization) and κ
//! (duality-gap surplus); an optimal solution has τ > 0, κ → 0, while τ → 0
//! certifies primal or dual infeasibility. Each Newton step reduces to two
//! solves against the normal-equations matrix `M = A·diag(x/z)·Aᵀ`, factored
//! once per iteration with a dense Cholesky.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{LpStatus, RawOutcome};

const ALPHA0: f64 = 0.999_95;
const BETA1: f64 = 0.1;

struct State {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    tau: f64,
    kappa: f64,
}

struct Residuals {
    r_p: Vec<f64>,
    r_d: Vec<f64>,
    r_g: f64,
    mu: f64,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn matvec(cols: &[Vec<(usize, f64)>], m: usize, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; m];
    for (j, col) in cols.iter().enumerate() {
        let xj = x[j];
        if xj != 0.0 {
            for &(r, v) in col {
                y[r] += v * xj;
            }
        }
    }
    y
}

fn t_matvec(cols: &[Vec<(usize, f64)>], y: &[f64]) -> Vec<f64> {
    cols.iter()
        .map(|col| col.iter().map(|&(r, v)| v * y[r]).sum())
        .collect()
}

fn residuals(cols: &[Vec<(usize, f64)>], m: usize, b: &[f64], c: &[f64], s: &State) -> Residuals {
    let ax = matvec(cols, m, &s.x);
    let r_p: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi * s.tau - axi).collect();
    let aty = t_matvec(cols, &s.y);
    let r_d: Vec<f64> = c
        .iter()
        .zip(aty.iter().zip(&s.z))
        .map(|(ci, (atyi, zi))| ci * s.tau - atyi - zi)
        .collect();
    let r_g = s.kappa + dot(c, &s.x) - dot(b, &s.y);
    let mu = (dot(&s.x, &s.z) + s.tau * s.kappa) / (s.x.len() as f64 + 1.0);
    Residuals { r_p, r_d, r_g, mu }
}

/// Build `M = A·diag(d)·Aᵀ` densely and factor it, adding an escalating
/// ridge if the factorization fails on rank-deficient data.
fn factor_normal_equations(cols: &[Vec<(usize, f64)>], m: usize, d: &[f64]) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let mut mat = DMatrix::<f64>::zeros(m, m);
    for (j, col) in cols.iter().enumerate() {
        let dj = d[j];
        for (a_idx, &(r1, v1)) in col.iter().enumerate() {
            let dv1 = dj * v1;
            for &(r2, v2) in &col[a_idx..] {
                mat[(r1, r2)] += dv1 * v2;
            }
        }
    }
    for r1 in 0..m {
        for r2 in (r1 + 1)..m {
            let v = mat[(r1, r2)];
            mat[(r2, r1)] = v;
        }
    }
    let mean_diag = (0..m).map(|i| mat[(i, i)]).sum::<f64>() / m as f64;
    let mut ridge = 0.0;
    for attempt in 0..6 {
        let mut trial = mat.clone();
        if ridge > 0.0 {
            for i in 0..m {
                trial[(i, i)] += ridge;
            }
        }
        if let Some(ch) = Cholesky::new(trial) {
            return Some(ch);
        }
        ridge = (1.0 + mean_diag.abs()) * 1e-12 * 100f64.powi(attempt);
    }
    None
}

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

struct Rhs {
    p: Vec<f64>,
    d: Vec<f64>,
    g: f64,
    xs: Vec<f64>,
    tk: f64,
}

#[allow(clippy::too_many_arguments)]
fn newton_direction(
    cols: &[Vec<(usize, f64)>],
    m: usize,
    b: &[f64],
    c: &[f64],
    s: &State,
    d: &[f64],
    chol: &Cholesky<f64, nalgebra::Dyn>,
    pq: &(Vec<f64>, Vec<f64>),
    rhs: &Rhs,
) -> Direction {
    let solve_pair = |r1: &[f64], r2: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let dr1: Vec<f64> = d.iter().zip(r1).map(|(di, r)| di * r).collect();
        let mut w = matvec(cols, m, &dr1);
        for (wi, r2i) in w.iter_mut().zip(r2) {
            *wi += r2i;
        }
        let v = chol.solve(&DVector::from_vec(w));
        let v: Vec<f64> = v.iter().copied().collect();
        let atv = t_matvec(cols, &v);
        let u: Vec<f64> = d
            .iter()
            .zip(atv.iter().zip(r1))
            .map(|(di, (a, r))| di * (a - r))
            .collect();
        (u, v)
    };

    let (p, q) = pq;
    let r1: Vec<f64> = rhs
        .d
        .iter()
        .zip(rhs.xs.iter().zip(&s.x))
        .map(|(rd, (rxs, xi))| rd - rxs / xi)
        .collect();
    let (u, v) = solve_pair(&r1, &rhs.p);

    let denom = s.kappa / s.tau + (-dot(c, p) + dot(b, q));
    let dtau = (rhs.g + rhs.tk / s.tau - (-dot(c, &u) + dot(b, &v))) / denom;
    let dx: Vec<f64> = u.iter().zip(p).map(|(ui, pi)| ui + pi * dtau).collect();
    let dy: Vec<f64> = v.iter().zip(q).map(|(vi, qi)| vi + qi * dtau).collect();
    let dz: Vec<f64> = rhs
        .xs
        .iter()
        .zip(s.z.iter().zip(s.x.iter().zip(&dx)))
        .map(|(rxs, (zi, (xi, dxi)))| (rxs - zi * dxi) / xi)
        .collect();
    let dkappa = (rhs.tk - s.kappa * dtau) / s.tau;
    Direction { dx, dy, dz, dtau, dkappa }
}

/// Largest step α keeping all positive quantities positive, scaled by α₀.
fn step_size(s: &State, dir: &Direction, alpha0: f64) -> f64 {
    let mut alpha = 1.0f64;
    for (xi, dxi) in s.x.iter().zip(&dir.dx) {
        if *dxi < 0.0 {
            alpha = alpha.min(-xi / dxi);
        }
    }
    for (zi, dzi) in s.z.iter().zip(&dir.dz) {
        if *dzi < 0.0 {
            alpha = alpha.min(-zi / dzi);
        }
    }
    if dir.dtau < 0.0 {
        alpha = alpha.min(-s.tau / dir.dtau);
    }
    if dir.dkappa < 0.0 {
        alpha = alpha.min(-s.kappa / dir.dkappa);
    }
    alpha * alpha0
}

pub(super) fn solve(
    cols: &[Vec<(usize, f64)>],
    m: usize,
    b: &[f64],
    c: &[f64],
    tol: f64,
    max_iters: usize,
) -> RawOutcome {
    let n = cols.len();
    let mut s = State {
        x: vec![1.0; n],
        y: vec![0.0; m],
        z: vec![1.0; n],
        tau: 1.0,
        kappa: 1.0,
    };

    let r0 = residuals(cols, m, b, c, &s);
    let rp0 = norm2(&r0.r_p).max(1.0);
    let rd0 = norm2(&r0.r_d).max(1.0);
    let rg0 = r0.r_g.abs().max(1.0);
    let mu0 = r0.mu;

    let mut best_x: Vec<f64> = s.x.iter().map(|xi| xi / s.tau).collect();
    let mut best_score = f64::INFINITY;

    for iter in 0..max_iters {
        let r = residuals(cols, m, b, c, &s);
        let rho_p = norm2(&r.r_p) / rp0;
        let rho_d = norm2(&r.r_d) / rd0;
        let rho_g = r.r_g.abs() / rg0;
        let rho_mu = r.mu / mu0;
        let bty = dot(b, &s.y);
        let rho_a = (dot(c, &s.x) - bty).abs() / (s.tau + bty.abs());

        let score = rho_p.max(rho_d).max(rho_a);
        if score < best_score && s.tau > 1e-12 {
            best_score = score;
            best_x = s.x.iter().map(|xi| xi / s.tau).collect();
        }

        if rho_p < tol && rho_d < tol && rho_a < tol {
            return RawOutcome {
                x: s.x.iter().map(|xi| xi / s.tau).collect(),
                status: LpStatus::Optimal,
                iterations: iter,
            };
        }
        let tau_small = s.tau < tol * s.kappa.max(1.0);
        let inf1 = rho_p < tol && rho_d < tol && rho_g < tol && tau_small;
        let inf2 = rho_mu < tol && tau_small;
        if inf1 || inf2 {
            let status = if bty > tol { LpStatus::Infeasible } else { LpStatus::Unbounded };
            return RawOutcome {
                x: best_x,
                status,
                iterations: iter,
            };
        }

        let d: Vec<f64> = s.x.iter().zip(&s.z).map(|(xi, zi)| xi / zi).collect();
        let Some(chol) = factor_normal_equations(cols, m, &d) else {
            return RawOutcome {
                x: best_x,
                status: LpStatus::IterLimit,
                iterations: iter,
            };
        };
        let solve_pq = {
            let dr1: Vec<f64> = d.iter().zip(c).map(|(di, ci)| di * ci).collect();
            let mut w = matvec(cols, m, &dr1);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi += bi;
            }
            let v = chol.solve(&DVector::from_vec(w));
            let v: Vec<f64> = v.iter().copied().collect();
            let atv = t_matvec(cols, &v);
            let u: Vec<f64> = d
                .iter()
                .zip(atv.iter().zip(c))
                .map(|(di, (a, ci))| di * (a - ci))
                .collect();
            (u, v)
        };

        // Predictor: pure Newton step toward the central path with γ = 0.
        let rhs_aff = Rhs {
            p: r.r_p.clone(),
            d: r.r_d.clone(),
            g: r.r_g,
            xs: s.x.iter().zip(&s.z).map(|(xi, zi)| -xi * zi).collect(),
            tk: -s.tau * s.kappa,
        };
        let aff = newton_direction(cols, m, b, c, &s, &d, &chol, &solve_pq, &rhs_aff);
        let alpha_aff = step_size(&s, &aff, 1.0).min(1.0);

        // Centering weight from the affine step.
        let gamma = (1.0 - alpha_aff).powi(2) * BETA1.min(1.0 - alpha_aff);
        let eta = 1.0 - gamma;

        let gm = gamma * r.mu;
        let rhs_cor = Rhs {
            p: r.r_p.iter().map(|v| v * eta).collect(),
            d: r.r_d.iter().map(|v| v * eta).collect(),
            g: r.r_g * eta,
            xs: s
                .x
                .iter()
                .zip(s.z.iter().zip(aff.dx.iter().zip(&aff.dz)))
                .map(|(xi, (zi, (dxi, dzi)))| -xi * zi + gm - dxi * dzi)
                .collect(),
            tk: gm - s.tau * s.kappa - aff.dtau * aff.dkappa,
        };
        let dir = newton_direction(cols, m, b, c, &s, &d, &chol, &solve_pq, &rhs_cor);
        let alpha = step_size(&s, &dir, ALPHA0).min(1.0);

        for (xi, dxi) in s.x.iter_mut().zip(&dir.dx) {
            *xi += alpha * dxi;
        }
        for (yi, dyi) in s.y.iter_mut().zip(&dir.dy) {
            *yi += alpha * dyi;
        }
        for (zi, dzi) in s.z.iter_mut().zip(&dir.dz) {
            *zi += alpha * dzi;
        }
        s.tau += alpha * dir.dtau;
        s.kappa += alpha * dir.dkappa;

        let degenerate = s.x.iter().any(|v| !v.is_finite() || *v <= 0.0)
            || s.z.iter().any(|v| !v.is_finite() || *v <= 0.0)
            || !s.tau.is_finite()
            || s.tau <= 0.0
            || !s.kappa.is_finite()
            || s.kappa <= 0.0;
        if degenerate {
            return RawOutcome {
                x: best_x,
                status: LpStatus::IterLimit,
                iterations: iter + 1,
            };
        }
    }

    RawOutcome {
        x: best_x,
        status: LpStatus::IterLimit,
        iterations: max_iters,
    }
}
