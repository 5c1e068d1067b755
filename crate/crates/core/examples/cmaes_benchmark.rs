//! CMA-ES on the sphere and Rosenbrock functions, plus a box-constrained run.
//!
//!     cargo run --release --example cmaes_benchmark

use monoped_codesign::cmaes::{minimize, CmaesConfig};
use monoped_codesign::Result;

fn sphere(x: &[f64]) -> Result<f64> {
    Ok(x.iter().map(|v| v * v).sum())
}

fn rosenbrock(x: &[f64]) -> Result<f64> {
    Ok(x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum())
}

fn main() -> Result<()> {
    let mut cfg = CmaesConfig::new(10, 1.0, 7);
    cfg.max_generations = 300;
    let m = minimize(sphere, &[3.0; 10], &cfg)?;
    println!("sphere 10-D: {:.3e} after {} generations", m.cost, m.history.len());

    let mut cfg = CmaesConfig::new(5, 0.5, 1);
    cfg.max_generations = 2000;
    cfg.target_cost = Some(1e-10);
    let m = minimize(rosenbrock, &[0.0; 5], &cfg)?;
    println!(
        "rosenbrock 5-D: {:.3e} after {} generations, x = {:.5?}",
        m.cost,
        m.history.len(),
        m.x
    );

    // Optimum outside the box: the search ends up on the boundary.
    let mut cfg = CmaesConfig::new(3, 0.3, 2);
    cfg.max_generations = 200;
    cfg.bounds = vec![[0.5, 2.0]; 3];
    let m = minimize(sphere, &[1.5; 3], &cfg)?;
    println!("boxed sphere: x = {:.6?}", m.x);

    for record in m.history.iter().step_by(40) {
        println!(
            "  gen {:3}  best {:.6}  median {:.6}  sigma {:.2e}",
            record.generation, record.best_cost, record.median_cost, record.sigma
        );
    }
    Ok(())
}
