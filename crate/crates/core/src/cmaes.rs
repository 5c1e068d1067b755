//! Covariance matrix adaptation evolution strategy with box bounds.
//!
//! Standard (μ/μ_w, λ) update with cumulative step-size adaptation and
//! rank-one plus rank-μ covariance learning. Candidates outside the box are
//! redrawn a bounded number of times and then clipped; the update uses the
//! unclipped draw so the search distribution is not distorted by clipping.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest eigenvalue kept in the covariance matrix.
pub const EIGEN_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmaesConfig {
    pub dimension: usize,
    /// λ; `None` means 4 + ⌊3 ln n⌋.
    pub population: Option<usize>,
    pub sigma0: f64,
    pub max_generations: usize,
    /// Stop once the best cost is at or below this value.
    pub target_cost: Option<f64>,
    pub seed: u64,
    /// Per-dimension `[lo, hi]`; infinite entries are allowed.
    pub bounds: Vec<[f64; 2]>,
    pub resample_limit: usize,
}

impl CmaesConfig {
    /// Unbounded configuration with default population.
    pub fn new(dimension: usize, sigma0: f64, seed: u64) -> Self {
        CmaesConfig {
            dimension,
            population: None,
            sigma0,
            max_generations: 1000,
            target_cost: None,
            seed,
            bounds: vec![[f64::NEG_INFINITY, f64::INFINITY]; dimension],
            resample_limit: 10,
        }
    }

    pub fn lambda(&self) -> usize {
        self.population
            .unwrap_or_else(|| 4 + (3.0 * (self.dimension as f64).ln()).floor() as usize)
    }

    pub fn mu(&self) -> usize {
        self.lambda() / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::invalid("cmaes.dimension", "must be >= 1"));
        }
        if self.lambda() < 2 {
            return Err(Error::invalid("cmaes.population", "must be >= 2"));
        }
        if !(self.sigma0.is_finite() && self.sigma0 > 0.0) {
            return Err(Error::invalid("cmaes.sigma0", "must be > 0"));
        }
        if self.bounds.len() != self.dimension {
            return Err(Error::invalid(
                "cmaes.bounds",
                format!("expected {} entries, got {}", self.dimension, self.bounds.len()),
            ));
        }
        for (i, [lo, hi]) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || !(lo < hi) {
                return Err(Error::invalid(
                    format!("cmaes.bounds[{i}]"),
                    format!("need lo < hi, got [{lo}, {hi}]"),
                ));
            }
        }
        Ok(())
    }
}

/// Strategy constants derived from n and λ.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub lambda: usize,
    pub mu: usize,
    pub weights: Vec<f64>,
    pub mu_eff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c_1: f64,
    pub c_mu: f64,
    pub chi_n: f64,
}

impl Strategy {
    pub fn new(n: usize, lambda: usize) -> Self {
        let nf = n as f64;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let sum: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c_1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let c_mu = (1.0 - c_1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        Strategy {
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
        }
    }
}

/// One sampled point: `x` is inside the box, `raw` is the Gaussian draw used for learning.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub x: Vec<f64>,
    pub raw: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CmaesState {
    pub strategy: Strategy,
    pub mean: DVector<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    /// Eigenvectors of `cov` (columns).
    pub b: DMatrix<f64>,
    /// Square roots of the eigenvalues of `cov`.
    pub d: DVector<f64>,
    pub p_sigma: DVector<f64>,
    pub p_c: DVector<f64>,
    pub generation: usize,
    /// Number of eigenvalue-floor repairs so far.
    pub repairs: usize,
    pub rng: ChaCha8Rng,
}

impl CmaesState {
    pub fn new(x0: &[f64], config: &CmaesConfig) -> Result<Self> {
        config.validate()?;
        if x0.len() != config.dimension {
            return Err(Error::invalid(
                "x0",
                format!("expected {} entries, got {}", config.dimension, x0.len()),
            ));
        }
        let n = config.dimension;
        Ok(CmaesState {
            strategy: Strategy::new(n, config.lambda()),
            mean: DVector::from_column_slice(x0),
            sigma: config.sigma0,
            cov: DMatrix::identity(n, n),
            b: DMatrix::identity(n, n),
            d: DVector::from_element(n, 1.0),
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            generation: 0,
            repairs: 0,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        })
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    fn draw(&mut self) -> DVector<f64> {
        let n = self.dimension();
        let z = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut self.rng)));
        &self.mean + self.sigma * (&self.b * self.d.component_mul(&z))
    }

    /// Samples λ candidates.
    pub fn ask(&mut self, config: &CmaesConfig) -> Vec<Candidate> {
        (0..self.strategy.lambda)
            .map(|_| {
                let mut raw = self.draw();
                let mut tries = 0;
                while !inside(&raw, &config.bounds) && tries < config.resample_limit {
                    raw = self.draw();
                    tries += 1;
                }
                let x = raw
                    .iter()
                    .zip(&config.bounds)
                    .map(|(v, [lo, hi])| v.clamp(*lo, *hi))
                    .collect();
                Candidate {
                    x,
                    raw: raw.as_slice().to_vec(),
                }
            })
            .collect()
    }

    /// Updates the distribution from costs given in candidate order.
    pub fn tell(&mut self, candidates: &[Candidate], costs: &[f64]) -> Result<()> {
        let s = &self.strategy;
        if candidates.len() != s.lambda || costs.len() != s.lambda {
            return Err(Error::invalid(
                "costs",
                format!(
                    "expected {} candidates and costs, got {} and {}",
                    s.lambda,
                    candidates.len(),
                    costs.len()
                ),
            ));
        }
        if let Some((index, &cost)) = costs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFiniteCost { index, cost });
        }
        let n = self.dimension();
        let nf = n as f64;
        let mut order: Vec<usize> = (0..s.lambda).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));

        let ys: Vec<DVector<f64>> = order[..s.mu]
            .iter()
            .map(|&i| (DVector::from_column_slice(&candidates[i].raw) - &self.mean) / self.sigma)
            .collect();
        let mut y_w = DVector::zeros(n);
        for (w, y) in s.weights.iter().zip(&ys) {
            y_w += *w * y;
        }
        self.mean += self.sigma * &y_w;

        let inv_sqrt = &self.b * DMatrix::from_diagonal(&self.d.map(|v| 1.0 / v)) * self.b.transpose();
        self.p_sigma =
            (1.0 - s.c_sigma) * &self.p_sigma + (s.c_sigma * (2.0 - s.c_sigma) * s.mu_eff).sqrt() * (inv_sqrt * &y_w);
        let gen = (self.generation + 1) as f64;
        let ps_norm = self.p_sigma.norm();
        let h_sigma = ps_norm / (1.0 - (1.0 - s.c_sigma).powf(2.0 * gen)).sqrt() < (1.4 + 2.0 / (nf + 1.0)) * s.chi_n;
        let h = if h_sigma { 1.0 } else { 0.0 };
        self.p_c = (1.0 - s.c_c) * &self.p_c + h * (s.c_c * (2.0 - s.c_c) * s.mu_eff).sqrt() * &y_w;

        let delta_h = (1.0 - h) * s.c_c * (2.0 - s.c_c);
        let mut rank_mu = DMatrix::zeros(n, n);
        for (w, y) in s.weights.iter().zip(&ys) {
            rank_mu += *w * y * y.transpose();
        }
        self.cov = (1.0 + s.c_1 * delta_h - s.c_1 - s.c_mu) * &self.cov
            + s.c_1 * &self.p_c * self.p_c.transpose()
            + s.c_mu * rank_mu;
        self.sigma *= ((s.c_sigma / s.d_sigma) * (ps_norm / s.chi_n - 1.0)).exp();
        self.generation += 1;
        self.decompose();
        Ok(())
    }

    /// Symmetrizes the covariance, refreshes B and D, and floors tiny eigenvalues.
    fn decompose(&mut self) {
        let sym = 0.5 * (&self.cov + self.cov.transpose());
        let eig = SymmetricEigen::new(sym);
        let needs_repair = eig.eigenvalues.iter().any(|&v| !(v >= EIGEN_FLOOR));
        let values = eig.eigenvalues.map(|v| if v >= EIGEN_FLOOR { v } else { EIGEN_FLOOR });
        if needs_repair {
            self.repairs += 1;
            self.cov = &eig.eigenvectors * DMatrix::from_diagonal(&values) * eig.eigenvectors.transpose();
        } else {
            self.cov = 0.5 * (&self.cov + self.cov.transpose());
        }
        self.b = eig.eigenvectors;
        self.d = values.map(f64::sqrt);
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.d.iter().map(|v| v * v).fold(f64::INFINITY, f64::min)
    }
}

fn inside(x: &DVector<f64>, bounds: &[[f64; 2]]) -> bool {
    x.iter().zip(bounds).all(|(v, [lo, hi])| *v >= *lo && *v <= *hi)
}

/// Per-generation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best cost seen so far.
    pub best_cost: f64,
    pub generation_best: f64,
    pub median_cost: f64,
    /// Step size used to sample this generation.
    pub sigma: f64,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub cost: f64,
    pub history: Vec<GenerationRecord>,
    pub evaluations: usize,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs ask/tell with a batch evaluator that returns one cost per point, in order.
pub fn minimize_batch<F>(mut evaluate: F, x0: &[f64], config: &CmaesConfig) -> Result<Minimum>
where
    F: FnMut(&[Vec<f64>]) -> Result<Vec<f64>>,
{
    let mut state = CmaesState::new(x0, config)?;
    let mut best_x: Vec<f64> = x0
        .iter()
        .zip(&config.bounds)
        .map(|(v, [lo, hi])| v.clamp(*lo, *hi))
        .collect();
    let mut best_cost = f64::INFINITY;
    let mut history = Vec::new();
    let mut evaluations = 0;
    for generation in 0..config.max_generations {
        let sigma = state.sigma;
        let candidates = state.ask(config);
        let points: Vec<Vec<f64>> = candidates.iter().map(|c| c.x.clone()).collect();
        let costs = evaluate(&points)?;
        evaluations += costs.len();
        let mut gen_best = f64::INFINITY;
        for (p, &c) in points.iter().zip(&costs) {
            if c < gen_best {
                gen_best = c;
            }
            if c < best_cost {
                best_cost = c;
                best_x = p.clone();
            }
        }
        state.tell(&candidates, &costs)?;
        history.push(GenerationRecord {
            generation,
            best_cost,
            generation_best: gen_best,
            median_cost: median(&costs),
            sigma,
        });
        if config.target_cost.is_some_and(|t| best_cost <= t) {
            break;
        }
    }
    Ok(Minimum {
        x: best_x,
        cost: best_cost,
        history,
        evaluations,
    })
}

/// Minimizes `objective` over the configured box, evaluating each population in parallel.
pub fn minimize<F>(objective: F, x0: &[f64], config: &CmaesConfig) -> Result<Minimum>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    minimize_batch(|points| points.par_iter().map(|p| objective(p)).collect(), x0, config)
}
