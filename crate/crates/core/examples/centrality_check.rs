//! Residual equations, the acceleration oracle and the shape classifier on
//! a central and a non-central configuration.

use fourbody::centrality::{cc_residuals_four, classify, lambda_fit, DEFAULT_CLASSIFY_TOL, DEFAULT_ORACLE_TOL};
use fourbody::families::build_equilateral_centered;
use fourbody::pairspace::{Configuration, Masses};

pub fn run_example() -> fourbody::Result<()> {
    let (config, masses) = build_equilateral_centered(1.0, 3.0, 1.0)?;
    report("centred equilateral", &config, &masses)?;

    let skewed = Configuration::planar(&[[0.0, 0.0], [1.0, 0.1], [0.3, 1.2], [1.5, 1.7]])?;
    report("generic quadrilateral", &skewed, &Masses::new(vec![1.0, 2.0, 0.5, 1.2])?)?;
    Ok(())
}

fn report(name: &str, config: &Configuration, masses: &Masses) -> fourbody::Result<()> {
    let residuals = cc_residuals_four(config, masses)?;
    let fit = lambda_fit(config, masses)?;
    let shape = classify(config, DEFAULT_CLASSIFY_TOL)?;
    println!("{name}: {:?}", shape.kind);
    for e in &residuals.entries {
        println!("  {:<6} {:+.3e}", e.label, e.normalized);
    }
    println!(
        "  lambda = {:.6}, oracle deviation = {:.2e}, central = {}",
        fit.lambda,
        fit.max_relative_deviation,
        fit.is_central(DEFAULT_ORACLE_TOL)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
