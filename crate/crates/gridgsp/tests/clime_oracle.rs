//! Precision-column estimation validated against the reduced enumeration
//! oracle, support-recovery checks on known models, the sparsity trend in ρ,
//! and the real-data reduction.

mod common;

use gridgsp::clime::{estimate_precision, solve_column, symmetrize, ClimeConfig};
use gridgsp::data::{random_hermitian_laplacian, sample_gmrf};
use gridgsp::linalg::{center_columns, empirical_covariance, ComplexDenseMatrix, CovarianceMatrix, Normalizer};
use gridgsp::lp::{LpAlgorithm, LpStatus, SolverSettings};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn random_covariance(rng: &mut ChaCha20Rng, n: usize, k: usize, complex: bool) -> CovarianceMatrix {
    let x = ComplexDenseMatrix::from_fn(n, k, |_, _| {
        Complex64::new(
            rng.random_range(-1.0..1.0),
            if complex { rng.random_range(-1.0..1.0) } else { 0.0 },
        )
    })
    .unwrap();
    empirical_covariance(&center_columns(&x), Normalizer::BySamples).unwrap()
}

#[test]
fn column_objective_matches_enumeration_oracle_small_n() {
    let mut rng = ChaCha20Rng::seed_from_u64(555);
    let settings = SolverSettings::default();
    for case in 0..40 {
        let n = rng.random_range(1..=3);
        let cov = random_covariance(&mut rng, n, 6 * n, true);
        let rho = rng.random_range(0.05..0.5);
        let i = rng.random_range(0..n);
        let cfg = common::oracle_clime_config(rho);
        let sol = solve_column(&cov, i, &cfg, &settings).unwrap();
        assert_eq!(sol.lp.status, LpStatus::Optimal, "case {case}");
        let oracle = common::clime_column_oracle(&cov, i, rho).expect("bounded feasible column problem");
        assert!(
            (sol.lp.objective_value - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
            "case {case} (n={n}, rho={rho:.3}): solver {} vs oracle {}",
            sol.lp.objective_value,
            oracle
        );
        // The oracle itself cross-checks against the simplex backend.
        let sx = solve_column(
            &cov,
            i,
            &cfg,
            &SolverSettings {
                algorithm: LpAlgorithm::Simplex,
                ..SolverSettings::default()
            },
        )
        .unwrap();
        assert!(
            (sx.lp.objective_value - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
            "case {case}: simplex {} vs oracle {}",
            sx.lp.objective_value,
            oracle
        );
    }
}

#[test]
fn feasibility_invariant_on_learned_columns() {
    // Every Optimal column satisfies the Manhattan ∞-norm constraint with
    // the raw (pre-snap) solution.
    let mut rng = ChaCha20Rng::seed_from_u64(808);
    let settings = SolverSettings::default();
    for _ in 0..5 {
        let n = rng.random_range(4..=8);
        let cov = random_covariance(&mut rng, n, 30 * n, true);
        let rho = rng.random_range(0.08..0.3);
        let cfg = ClimeConfig {
            rho,
            ..ClimeConfig::default()
        };
        for i in 0..n {
            let sol = solve_column(&cov, i, &cfg, &settings).unwrap();
            assert_eq!(sol.lp.status, LpStatus::Optimal);
            assert!(
                sol.raw_residual <= rho + 1e-7,
                "column {i}: residual {} vs rho {rho}",
                sol.raw_residual
            );
            assert!(
                sol.snapped_residual <= rho + 1e-7,
                "column {i}: snapped residual {} vs rho {rho}",
                sol.snapped_residual
            );
        }
    }
}

#[test]
fn support_recovery_on_known_models() {
    // Support recovery holds when the slack is tight relative to the
    // model's coherence (the brute-force check is the authority for where
    // that regime starts): a 4-node model with ρ matched well below the
    // weakest edge recovers the exact support in ≥ 90% of seeds. A looser
    // ρ trades support fidelity for sparsity and fails this check; see the
    // ρ-sweep utilities for picking the operating point on real data.
    let mut four_node_ok = 0;
    let total = 10;
    for seed in 0..total {
        let model = random_hermitian_laplacian(4, 0.5, 0.8, 900 + seed).unwrap();
        let ds = sample_gmrf(&model, 20_000, 30 + seed).unwrap();
        let cov = empirical_covariance(&center_columns(ds.x()), Normalizer::BySamples).unwrap();
        let cfg = ClimeConfig {
            rho: 0.02,
            sparsity_epsilon: 0.1,
            ..ClimeConfig::default()
        };
        let settings = SolverSettings::default();
        let mut all_columns_ok = true;
        for i in 0..4 {
            let sol = solve_column(&cov, i, &cfg, &settings).unwrap();
            for j in 0..4 {
                let in_true_support = j == i || model.laplacian().get(j, i) != Complex64::new(0.0, 0.0);
                let recovered = Complex64::new(sol.p_real[j], sol.p_imag[j]).norm() > 0.0;
                if recovered != in_true_support {
                    all_columns_ok = false;
                }
            }
        }
        if all_columns_ok {
            four_node_ok += 1;
        }
    }
    assert!(
        four_node_ok * 10 >= 9 * total,
        "exact support recovered in only {four_node_ok}/{total} seeds"
    );

    // 6-node models in the same regime: off-support magnitudes stay below
    // the smallest on-support magnitude in ≥ 90% of seeds.
    let mut six_node_ok = 0;
    for seed in 0..total {
        let model = random_hermitian_laplacian(6, 0.4, 0.8, 700 + seed).unwrap();
        let ds = sample_gmrf(&model, 20_000, 60 + seed).unwrap();
        let cov = empirical_covariance(&center_columns(ds.x()), Normalizer::BySamples).unwrap();
        let cfg = ClimeConfig {
            rho: 0.02,
            ..ClimeConfig::default()
        };
        let est = symmetrize(&estimate_precision(&cov, &cfg, &SolverSettings::default()).unwrap());
        let mut worst_off = 0.0f64;
        let mut best_on = f64::INFINITY;
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let true_edge = model.laplacian().get(i, j) != Complex64::new(0.0, 0.0);
                let mag = est.entry(i, j).norm();
                if true_edge {
                    best_on = best_on.min(mag);
                } else {
                    worst_off = worst_off.max(mag);
                }
            }
        }
        if worst_off <= best_on {
            six_node_ok += 1;
        }
    }
    assert!(
        six_node_ok * 10 >= 9 * total,
        "off-support magnitudes below on-support minimum in only {six_node_ok}/{total} seeds"
    );
}

#[test]
fn snapped_sparsity_nonincreasing_in_rho() {
    // Trend test: over a ρ grid on a fixed covariance, the snapped nonzero
    // count is non-increasing in at least 95% of (instance, adjacent-pair)
    // comparisons.
    let mut rng = ChaCha20Rng::seed_from_u64(4242);
    let grid = [0.05, 0.1, 0.2, 0.4];
    let mut total_pairs = 0;
    let mut ok_pairs = 0;
    for _ in 0..10 {
        let n = 6;
        let cov = random_covariance(&mut rng, n, 40 * n, true);
        let settings = SolverSettings::default();
        let mut counts = Vec::new();
        for &rho in &grid {
            let cfg = ClimeConfig {
                rho,
                sparsity_epsilon: 1e-4,
                ..ClimeConfig::default()
            };
            let est = estimate_precision(&cov, &cfg, &settings).unwrap();
            let nnz = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| est.entry(i, j) != Complex64::new(0.0, 0.0))
                .count();
            counts.push(nnz);
        }
        for w in counts.windows(2) {
            total_pairs += 1;
            if w[1] <= w[0] {
                ok_pairs += 1;
            }
        }
    }
    assert!(
        ok_pairs * 100 >= 95 * total_pairs,
        "sparsity trend held in {ok_pairs}/{total_pairs} adjacent pairs"
    );
}

#[test]
fn real_covariance_reduces_to_real_reference() {
    let mut rng = ChaCha20Rng::seed_from_u64(66);
    for case in 0..5 {
        let n = 6;
        let cov = random_covariance(&mut rng, n, 50 * n, false);
        assert_eq!(cov.max_imag(), 0.0);
        let rho = 0.15;
        let cfg = common::oracle_clime_config(rho);
        let settings = SolverSettings::default();
        let est = symmetrize(&estimate_precision(&cov, &cfg, &settings).unwrap());
        assert!(
            est.max_imag_abs() <= 1e-8,
            "case {case}: imaginary part {}",
            est.max_imag_abs()
        );
        let reference = common::real_clime_reference(&cov.real_part(), n, rho, &settings);
        for i in 0..n {
            for j in 0..n {
                let diff = (est.real(i, j) - reference[i * n + j]).abs();
                assert!(
                    diff <= 1e-6,
                    "case {case}: entry ({i}, {j}) differs by {diff}"
                );
            }
        }
    }
}
