use gridgsp::clime::{estimate_precision, symmetrize, solve_column, ClimeConfig};
use gridgsp::linalg::{center_columns, empirical_covariance, ComplexDenseMatrix, Normalizer};
use gridgsp::lp::{LpAlgorithm, SolverSettings};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(40_004);
    for case in 0..20 {
        let n = rng.random_range(4..=7);
        let k = 40 * n;
        let x = ComplexDenseMatrix::from_fn(n, k, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).unwrap();
        let cov = empirical_covariance(&center_columns(&x), Normalizer::BySamples).unwrap();
        let rho = rng.random_range(0.08..0.3);
        if case != 13 { continue; }
        println!("case {case}: n={n} rho={rho}");
        let cfg = ClimeConfig { rho, sparsity_epsilon: 0.0, column_parallelism: 0 };
        let settings = SolverSettings::default();
        // column 1 in depth
        let sol_ip = solve_column(&cov, 1, &cfg, &settings).unwrap();
        let sol_sx = solve_column(&cov, 1, &cfg, &SolverSettings { algorithm: LpAlgorithm::Simplex, ..Default::default() }).unwrap();
        println!("col 1 ip:  obj={:.9} raw_res={:.12e} excess={:.3e} lp_viol={:.3e} p={:?}", sol_ip.lp.objective_value, sol_ip.raw_residual, sol_ip.raw_residual - rho, sol_ip.lp.max_violation, sol_ip.p_real);
        println!("col 1 sx:  obj={:.9} p={:?}", sol_sx.lp.objective_value, sol_sx.p_real);
        // real reference LP for column 1 via simplex and ip
        let cfg_serial = ClimeConfig { column_parallelism: 1, ..cfg };
        let raw_serial = estimate_precision(&cov, &cfg_serial, &settings).unwrap();
        println!("serial rhos: {:?}", raw_serial.per_column_rho());
        let raw2 = estimate_precision(&cov, &cfg, &settings).unwrap();
        println!("par rhos run2: {:?}", raw2.per_column_rho());
        let raw = estimate_precision(&cov, &cfg, &settings).unwrap();
        println!("statuses: {:?}", raw.per_column_status());
        println!("residuals: {:?}", raw.per_column_residual());
        println!("rhos: {:?}", raw.per_column_rho());
        let est = symmetrize(&raw);
        println!("est diag[1] = {:.6}  raw[1][1] = {:.6}", est.real(1, 1), raw.real(1, 1));
    }
}
