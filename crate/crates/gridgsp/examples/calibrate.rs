use gridgsp::*;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    match args.get(1).map(|s| s.as_str()) {
        Some("psd") => psd_rate(),
        Some("trend") => trend(),
        Some("ablation") => ablation(),
        Some("timing") => timing(),
        _ => eprintln!("usage: calibrate psd|trend|ablation|timing"),
    }
}

// Criterion 1 calibration: lambda_min before repair across seeds.
fn psd_rate() {
    for normalizer in [Normalizer::ByNodes, Normalizer::BySamples] {
        for rho in [0.1, 0.2] {
            let mut ok = 0;
            let mut total = 0;
            let mut worst = f64::INFINITY;
            let t0 = Instant::now();
            for n in [10usize, 30] {
                for seed in 0..5u64 {
                    let model = random_hermitian_laplacian(n, 0.3, 1.0, 1000 + seed * 17 + n as u64).unwrap();
                    let ds = sample_gmrf(&model, 2000, 2000 + seed).unwrap();
                    let settings = LearnSettings {
                        clime: clime::ClimeConfig { rho, ..Default::default() },
                        normalizer,
                        ..Default::default()
                    };
                    let t1 = Instant::now();
                    let out = learn_laplacian(ds.x(), &settings).unwrap();
                    let lm = out.lambda_min_before_repair;
                    worst = worst.min(lm);
                    if lm >= -1e-10 { ok += 1; }
                    total += 1;
                    if seed == 0 { eprintln!("  n={n} learn took {:.2}s lambda_min={lm:.4e} degraded={}", t1.elapsed().as_secs_f64(), out.precision.is_degraded()); }
                }
            }
            println!("normalizer={normalizer:?} rho={rho}: psd {ok}/{total}, worst lambda_min {worst:.4e}, wall {:.1}s", t0.elapsed().as_secs_f64());
        }
    }
}

// Criteria 6/7 calibration: M-trend and K-trend.
fn trend() {
    let seeds = 6u64;
    let ms = vec![8usize, 12, 16, 20, 24];
    for mu in [0.1, 1.0, 10.0, 100.0] {
        let mut agg_mag = vec![0.0; ms.len()];
        let mut agg_phase = vec![0.0; ms.len()];
        let t0 = Instant::now();
        for seed in 0..seeds {
            let model = random_hermitian_laplacian(30, 0.2, 1.0, 500 + seed).unwrap();
            let ds = sample_gmrf(&model, 2100, 700 + seed).unwrap();
            let ds = split(&ds, 2000, seed).unwrap();
            let settings = LearnSettings {
                clime: clime::ClimeConfig { rho: 0.1, ..Default::default() },
                normalizer: Normalizer::BySamples,
                ..Default::default()
            };
            let l = learn_laplacian(&ds.train_matrix().unwrap(), &settings).unwrap().laplacian;
            let spec = SweepSpec { sample_counts: ms.clone(), trials: 8, seed, mu, rho: 0.1, decompose: true };
            let rep = run_sweep(&ds, &l, &spec).unwrap();
            for (i, row) in rep.rows.iter().enumerate() {
                agg_mag[i] += row.mse_magnitude.unwrap().mean / seeds as f64;
                agg_phase[i] += row.mse_phase.unwrap().mean / seeds as f64;
            }
        }
        println!("M trend mu={mu} ({:.1}s): ms={ms:?}", t0.elapsed().as_secs_f64());
        println!("  mag:   {agg_mag:?}");
        println!("  phase: {agg_phase:?}");
    }

    let ks = vec![100usize, 500, 2000, 8000];
    let mut agg_k = vec![0.0; ks.len()];
    let mut per_seed_monotone = 0;
    let t0 = Instant::now();
    for seed in 0..seeds {
        let model = random_hermitian_laplacian(30, 0.1, 1.0, 900 + seed).unwrap();
        let ds = sample_gmrf(&model, 8100, 300 + seed).unwrap();
        let ds = split(&ds, 8000, seed).unwrap();
        let spec = SweepSpec { sample_counts: vec![16], trials: 8, seed, mu: 0.01, rho: 0.1, decompose: false };
        let learn = LearnSettings { clime: clime::ClimeConfig { rho: 0.1, ..Default::default() }, normalizer: Normalizer::BySamples, ..Default::default() };
        let rep = run_covariance_sweep(&ds, &ks, 16, &spec, &learn).unwrap();
        let vals: Vec<f64> = rep.rows.iter().map(|r| r.mse_complex.unwrap().mean).collect();
        if vals.windows(2).all(|w| w[1] <= w[0]) { per_seed_monotone += 1; }
        println!("  seed {seed}: {vals:?}");
        for (i, v) in vals.iter().enumerate() { agg_k[i] += v / seeds as f64; }
    }
    println!("K trend ({:.1}s): ks={ks:?} per-seed monotone {per_seed_monotone}/{seeds}", t0.elapsed().as_secs_f64());
    println!("  cplx: {agg_k:?}");
}

// Criterion 8 calibration: joint vs split win rate.
fn ablation() {
    let t0 = Instant::now();
    let mut wins = 0;
    let seeds = 8u64;
    for seed in 0..seeds {
        let model = random_hermitian_laplacian(30, 0.1, std::f64::consts::FRAC_PI_2, 40 + seed).unwrap();
        let ds = sample_gmrf(&model, 2100, 60 + seed).unwrap();
        let ds = split(&ds, 2000, seed).unwrap();
        let learn = LearnSettings { clime: clime::ClimeConfig { rho: 0.1, ..Default::default() }, normalizer: Normalizer::BySamples, ..Default::default() };
        let spec = SweepSpec { sample_counts: vec![12], trials: 6, seed, mu: 0.01, rho: 0.1, decompose: false };
        let l = learn_laplacian(&ds.train_matrix().unwrap(), &learn).unwrap().laplacian;
        let joint = run_sweep(&ds, &l, &spec).unwrap().rows[0].mse_complex.unwrap().mean;
        let split_rep = run_split_ablation(&ds, &spec, &learn).unwrap().rows[0].mse_complex.unwrap().mean;
        let win = joint <= split_rep;
        if win { wins += 1; }
        println!("  seed {seed}: joint {joint:.5e} vs split {split_rep:.5e} -> {}", if win { "joint" } else { "split" });
    }
    println!("ablation wins {wins}/{seeds} ({:.1}s)", t0.elapsed().as_secs_f64());
}

// Criterion 9: N=118 interpolation timing.
fn timing() {
    let model = random_hermitian_laplacian(118, 0.06, 1.0, 7).unwrap();
    let l = model.laplacian();
    let pattern = SamplingPattern::new(118, (0..30).map(|i| i * 3).collect()).unwrap();
    let x_true = {
        let ds = sample_gmrf(&model, 1, 3).unwrap();
        linalg::ComplexVector::new(ds.x().column(0)).unwrap()
    };
    let y = apply_sampling(&pattern, &x_true).unwrap();
    let t0 = Instant::now();
    let r = interpolate(&y, &pattern, l, &InterpolateConfig::default()).unwrap();
    println!("interpolate n=118 m=30: {} iters, residual {:.2e}, {:.3}s", r.cg_iterations, r.final_relative_residual, t0.elapsed().as_secs_f64());
}
