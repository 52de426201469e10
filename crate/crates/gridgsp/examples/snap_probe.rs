use gridgsp::clime::{solve_column, ClimeConfig};
use gridgsp::data::{random_hermitian_laplacian, sample_gmrf};
use gridgsp::linalg::{center_columns, empirical_covariance, Normalizer};
use gridgsp::lp::SolverSettings;
use num_complex::Complex64;

fn main() {
    for (k, rho) in [(2000usize, 0.05), (20000, 0.05), (20000, 0.02)] {
    for eps in [0.05, 0.1] {
        let mut contained = 0;
        let mut edges_kept = 0usize;
        let mut edges_total = 0usize;
        let total = 20;
        for seed in 0..total {
            let model = random_hermitian_laplacian(4, 0.5, 0.8, 900 + seed).unwrap();
            let ds = sample_gmrf(&model, k, 30 + seed).unwrap();
            let cov = empirical_covariance(&center_columns(ds.x()), Normalizer::BySamples).unwrap();
            let cfg = ClimeConfig { rho, sparsity_epsilon: eps, ..Default::default() };
            let settings = SolverSettings::default();
            let mut ok = true;
            for i in 0..4 {
                let sol = solve_column(&cov, i, &cfg, &settings).unwrap();
                for j in 0..4 {
                    let true_edge = j == i || model.laplacian().get(j, i) != Complex64::new(0.0, 0.0);
                    let rec = Complex64::new(sol.p_real[j], sol.p_imag[j]).norm() > 0.0;
                    if rec && !true_edge { ok = false; }
                    if true_edge && j != i {
                        edges_total += 1;
                        if rec { edges_kept += 1; }
                    }
                }
            }
            if ok { contained += 1; }
        }
        println!("k={k} rho={rho} eps={eps}: contained {contained}/{total}, true edges kept {edges_kept}/{edges_total}");
    }
    }
}
