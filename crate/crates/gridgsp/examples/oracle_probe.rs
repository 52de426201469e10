use gridgsp::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

// Conditional-mean interpolation with a given Laplacian treated as
// precision: x_U = -L_UU^{-1} L_UO x_O.
fn conditional_mean(l: &DMatrix<Complex64>, obs: &[usize], x: &[Complex64]) -> Vec<Complex64> {
    let n = l.nrows();
    let mask: Vec<bool> = {
        let mut m = vec![false; n];
        for &i in obs { m[i] = true; }
        m
    };
    let un: Vec<usize> = (0..n).filter(|i| !mask[*i]).collect();
    let luu = DMatrix::from_fn(un.len(), un.len(), |a, b| l[(un[a], un[b])]);
    let luo = DMatrix::from_fn(un.len(), obs.len(), |a, b| l[(un[a], obs[b])]);
    let xo = nalgebra::DVector::from_iterator(obs.len(), obs.iter().map(|&i| x[i]));
    let rhs = -(&luo * &xo);
    let sol = luu.lu().solve(&rhs).unwrap();
    let mut out = x.to_vec();
    for (a, &i) in un.iter().enumerate() { out[i] = sol[a]; }
    out
}

fn main() {
    let n = 30usize;
    let model = random_hermitian_laplacian(n, 0.1, 1.0, 501).unwrap();
    let ds = sample_gmrf(&model, 2100, 701).unwrap();
    let ds = split(&ds, 2000, 1).unwrap();
    let l_true = {
        let d = model.laplacian().to_dense();
        DMatrix::from_fn(n, n, |i, j| d.get(i, j))
    };
    // marginal variance level
    let mv: f64 = (0..ds.test_indices().len()).map(|t| {
        let col = ds.test_column(t).unwrap();
        col.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64
    }).sum::<f64>() / ds.test_indices().len() as f64;
    println!("mean marginal E|x|^2 = {mv:.4}");

    let settings = LearnSettings {
        clime: clime::ClimeConfig { rho: 0.1, ..Default::default() },
        normalizer: Normalizer::BySamples,
        ..Default::default()
    };
    let learned = learn_laplacian(&ds.train_matrix().unwrap(), &settings).unwrap().laplacian;
    let l_learn = {
        let d = learned.to_dense();
        DMatrix::from_fn(n, n, |i, j| d.get(i, j))
    };
    // compare learned vs true laplacian entries
    let mut num = 0.0; let mut den = 0.0;
    for i in 0..n { for j in 0..n {
        num += (l_learn[(i,j)] - l_true[(i,j)]).norm_sqr();
        den += l_true[(i,j)].norm_sqr();
    }}
    println!("relative laplacian error ||Lh - L||_F / ||L||_F = {:.3}", (num/den).sqrt());

    let mut rng = ChaCha20Rng::seed_from_u64(9);
    for m in [8usize, 12, 16, 20, 24] {
        let mut mse_true = 0.0; let mut mse_learn = 0.0; let mut mse_cg = 0.0; let mut mag_true = 0.0; let mut mag_cg = 0.0;
        let trials = 20;
        let tests = 50.min(ds.test_indices().len());
        for _ in 0..trials {
            let mut idx: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() { let j = rng.random_range(0..=i); idx.swap(i, j); }
            let mut obs: Vec<usize> = idx[..m].to_vec(); obs.sort_unstable();
            let pattern = SamplingPattern::new(n, obs.clone()).unwrap();
            for t in 0..tests {
                let x = ds.test_column(t).unwrap();
                let xv = linalg::ComplexVector::new(x.clone()).unwrap();
                let un: Vec<usize> = pattern.unobserved();
                let ct = conditional_mean(&l_true, &obs, &x);
                let cl = conditional_mean(&l_learn, &obs, &x);
                let y = apply_sampling(&pattern, &xv).unwrap();
                let cg = interpolate(&y, &pattern, &learned, &InterpolateConfig { mu: 0.01, ..Default::default() }).unwrap().x_star;
                for &i in &un {
                    mse_true += (ct[i] - x[i]).norm_sqr() / un.len() as f64;
                    mse_learn += (cl[i] - x[i]).norm_sqr() / un.len() as f64;
                    mse_cg += (cg[i] - x[i]).norm_sqr() / un.len() as f64;
                    mag_true += (ct[i].norm() - x[i].norm()).powi(2) / un.len() as f64;
                    mag_cg += (cg[i].norm() - x[i].norm()).powi(2) / un.len() as f64;
                }
            }
        }
        let d = (trials * tests) as f64;
        println!("m={m:2}: oracle-true cplx {:.4} mag {:.4} | oracle-learned cplx {:.4} | cg(mu=.01) cplx {:.4} mag {:.4}",
            mse_true/d, mag_true/d, mse_learn/d, mse_cg/d, mag_cg/d);
    }
}
