use monoped_codesign::cmaes::{minimize, CmaesConfig, CmaesState};
use monoped_codesign::Result;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn sphere(x: &[f64]) -> Result<f64> {
    Ok(x.iter().map(|v| v * v).sum())
}

fn rosenbrock(x: &[f64]) -> Result<f64> {
    Ok(x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum())
}

#[test]
fn sphere_10d_converges() {
    let mut cfg = CmaesConfig::new(10, 1.0, 7);
    cfg.max_generations = 300;
    let m = minimize(sphere, &[3.0; 10], &cfg).unwrap();
    assert!(m.cost < 1e-8, "best {:e}", m.cost);
    assert!(m.history.len() <= 300);
}

#[test]
fn rosenbrock_5d_converges() {
    let mut cfg = CmaesConfig::new(5, 0.5, 1);
    cfg.max_generations = 2000;
    cfg.target_cost = Some(1e-10);
    let m = minimize(rosenbrock, &[0.0; 5], &cfg).unwrap();
    assert!(m.cost < 1e-6, "best {:e}", m.cost);
    for v in &m.x {
        assert!((v - 1.0).abs() < 1e-2);
    }
}

#[test]
fn sigma_shrinks_near_optimum() {
    let mut cfg = CmaesConfig::new(4, 1.0, 3);
    cfg.max_generations = 120;
    let m = minimize(sphere, &[0.5; 4], &cfg).unwrap();
    let tail: Vec<f64> = m.history[100..].iter().map(|r| r.sigma).collect();
    assert!(tail.last().unwrap() < tail.first().unwrap());
    assert!(m.history.windows(2).all(|w| w[1].best_cost <= w[0].best_cost));
}

fn history_bits(seed: u64) -> Vec<u64> {
    let mut cfg = CmaesConfig::new(6, 0.8, seed);
    cfg.max_generations = 80;
    let m = minimize(rosenbrock, &[0.2; 6], &cfg).unwrap();
    let mut bits: Vec<u64> = m
        .history
        .iter()
        .flat_map(|r| [r.best_cost, r.generation_best, r.median_cost, r.sigma])
        .map(f64::to_bits)
        .collect();
    bits.extend(m.x.iter().map(|v| v.to_bits()));
    bits
}

#[test]
fn seeded_runs_are_byte_identical() {
    assert_eq!(history_bits(42), history_bits(42));
    assert_ne!(history_bits(42), history_bits(43));
}

#[test]
fn sample_mean_matches_distribution_mean() {
    let n = 3;
    let mut cfg = CmaesConfig::new(n, 0.7, 5);
    cfg.population = Some(1000);
    let mean = [1.0, -2.0, 0.5];
    let mut state = CmaesState::new(&mean, &cfg).unwrap();
    let mut sum = vec![0.0; n];
    let mut count = 0usize;
    for _ in 0..100 {
        for c in state.ask(&cfg) {
            for (s, v) in sum.iter_mut().zip(&c.x) {
                *s += v;
            }
            count += 1;
        }
    }
    assert_eq!(count, 100_000);
    let tol = 3.0 * 0.7 / (count as f64).sqrt();
    for (s, m) in sum.iter().zip(mean) {
        assert!((s / count as f64 - m).abs() < tol);
    }
}

/// Textbook CMA-ES written out directly from the update equations.
struct Reference {
    n: usize,
    lambda: usize,
    weights: Vec<f64>,
    mueff: f64,
    cs: f64,
    damps: f64,
    cc: f64,
    c1: f64,
    cmu: f64,
    chin: f64,
    xmean: DVector<f64>,
    sigma: f64,
    c: DMatrix<f64>,
    b: DMatrix<f64>,
    d: DVector<f64>,
    ps: DVector<f64>,
    pc: DVector<f64>,
    counteval: usize,
    rng: ChaCha8Rng,
}

impl Reference {
    fn new(x0: &[f64], sigma: f64, seed: u64) -> Self {
        let n = x0.len();
        let lambda = 4 + (3.0 * (n as f64).ln()).floor() as usize;
        let mu = lambda / 2;
        let mut weights = Vec::with_capacity(mu);
        for i in 0..mu {
            weights.push((lambda as f64 / 2.0 + 0.5).ln() - ((i + 1) as f64).ln());
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        // Weights sum to one; the expressions below keep the library's
        // floating-point association so rounding does not compound over
        // generations.
        let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let nf = n as f64;
        let cc = (4.0 + mueff / nf) / (nf + 4.0 + 2.0 * mueff / nf);
        let cs = (mueff + 2.0) / (nf + mueff + 5.0);
        let c1 = 2.0 / ((nf + 1.3) * (nf + 1.3) + mueff);
        let cmu = f64::min(
            1.0 - c1,
            2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nf + 2.0) * (nf + 2.0) + mueff),
        );
        let damps = 1.0 + 2.0 * f64::max(0.0, ((mueff - 1.0) / (nf + 1.0)).sqrt() - 1.0) + cs;
        let chin = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        Reference {
            n,
            lambda,
            weights,
            mueff,
            cs,
            damps,
            cc,
            c1,
            cmu,
            chin,
            xmean: DVector::from_column_slice(x0),
            sigma,
            c: DMatrix::identity(n, n),
            b: DMatrix::identity(n, n),
            d: DVector::from_element(n, 1.0),
            ps: DVector::zeros(n),
            pc: DVector::zeros(n),
            counteval: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn generation(&mut self, f: impl Fn(&[f64]) -> f64) {
        let n = self.n;
        let mut xs = Vec::new();
        for _ in 0..self.lambda {
            let z: DVector<f64> = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut self.rng)));
            let bdz = &self.b * self.d.component_mul(&z);
            xs.push(&self.xmean + self.sigma * bdz);
        }
        let fit: Vec<f64> = xs.iter().map(|x| f(x.as_slice())).collect();
        self.counteval += self.lambda;
        let mut idx: Vec<usize> = (0..self.lambda).collect();
        idx.sort_by(|&a, &b| fit[a].partial_cmp(&fit[b]).unwrap().then(a.cmp(&b)));

        let xold = self.xmean.clone();
        let mut step = DVector::zeros(n);
        for (k, w) in self.weights.iter().enumerate() {
            step += *w * ((&xs[idx[k]] - &xold) / self.sigma);
        }
        self.xmean = &xold + self.sigma * &step;

        let dinv = DMatrix::from_diagonal(&self.d.map(|v| 1.0 / v));
        let invsqrt_c = &self.b * dinv * self.b.transpose();
        self.ps = (1.0 - self.cs) * &self.ps + (self.cs * (2.0 - self.cs) * self.mueff).sqrt() * (invsqrt_c * &step);
        let iters = (self.counteval / self.lambda) as f64;
        let hsig = self.ps.norm() / (1.0 - (1.0 - self.cs).powf(2.0 * iters)).sqrt()
            < (1.4 + 2.0 / (n as f64 + 1.0)) * self.chin;
        let hsig = if hsig { 1.0 } else { 0.0 };
        self.pc = (1.0 - self.cc) * &self.pc + hsig * (self.cc * (2.0 - self.cc) * self.mueff).sqrt() * &step;

        let mut artmp = DMatrix::zeros(n, n);
        for (k, w) in self.weights.iter().enumerate() {
            let y = (&xs[idx[k]] - &xold) / self.sigma;
            artmp += *w * &y * y.transpose();
        }
        let old_scale = 1.0 + self.c1 * ((1.0 - hsig) * self.cc * (2.0 - self.cc)) - self.c1 - self.cmu;
        self.c = old_scale * &self.c + self.c1 * (&self.pc * self.pc.transpose()) + self.cmu * artmp;
        self.sigma *= ((self.cs / self.damps) * (self.ps.norm() / self.chin - 1.0)).exp();

        let sym = 0.5 * (&self.c + self.c.transpose());
        let eig = SymmetricEigen::new(sym.clone());
        self.c = sym;
        self.b = eig.eigenvectors;
        self.d = eig.eigenvalues.map(f64::sqrt);
    }
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

#[test]
fn unbounded_run_matches_reference_step_by_step() {
    for (n, seed) in [(3usize, 1u64), (5, 9), (8, 2024)] {
        let x0: Vec<f64> = (0..n).map(|i| 0.5 + 0.25 * i as f64).collect();
        let cfg = CmaesConfig::new(n, 0.6, seed);
        let mut state = CmaesState::new(&x0, &cfg).unwrap();
        let mut reference = Reference::new(&x0, 0.6, seed);
        let f = |x: &[f64]| rosenbrock(x).unwrap();
        for gen in 0..60 {
            let candidates = state.ask(&cfg);
            let costs: Vec<f64> = candidates.iter().map(|c| f(&c.x)).collect();
            state.tell(&candidates, &costs).unwrap();
            reference.generation(f);
            let tol = 1e-12;
            assert!(
                (&state.mean - &reference.xmean).amax() < tol,
                "mean differs at n={n} gen {gen}"
            );
            assert!(
                ((state.sigma - reference.sigma) / reference.sigma).abs() < tol,
                "sigma differs at gen {gen}"
            );
            assert!(
                max_abs_diff(&state.cov, &reference.c) < tol,
                "covariance differs at gen {gen}"
            );
            assert!((&state.p_sigma - &reference.ps).amax() < tol);
            assert!((&state.p_c - &reference.pc).amax() < tol);
        }
        assert_eq!(state.repairs, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariance_stays_spd(seed in 0u64..10_000, n in 1usize..7, scale in 0.01..5.0f64) {
        let cfg = CmaesConfig::new(n, scale, seed);
        let mut state = CmaesState::new(&vec![1.0; n], &cfg).unwrap();
        let mut cost_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        for _ in 0..40 {
            let candidates = state.ask(&cfg);
            let costs: Vec<f64> = candidates
                .iter()
                .map(|_| StandardNormal.sample(&mut cost_rng))
                .collect();
            state.tell(&candidates, &costs).unwrap();
            prop_assert!(state.min_eigenvalue() > 0.0);
            prop_assert!(state.sigma > 0.0);
            prop_assert!((&state.cov - state.cov.transpose()).amax() == 0.0);
        }
    }

    #[test]
    fn candidates_respect_bounds(seed in 0u64..10_000, lo in -2.0..0.0f64, width in 0.01..1.0f64, limit in 0usize..4) {
        let mut cfg = CmaesConfig::new(4, 3.0, seed);
        cfg.bounds = vec![[lo, lo + width]; 4];
        cfg.resample_limit = limit;
        let mut state = CmaesState::new(&[lo + 0.5 * width; 4], &cfg).unwrap();
        for _ in 0..5 {
            let candidates = state.ask(&cfg);
            for c in &candidates {
                prop_assert!(c.x.iter().all(|v| *v >= lo && *v <= lo + width));
            }
            let costs: Vec<f64> = candidates.iter().map(|c| sphere(&c.x).unwrap()).collect();
            state.tell(&candidates, &costs).unwrap();
        }
    }
}
