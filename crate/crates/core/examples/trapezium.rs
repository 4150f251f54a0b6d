//! Solving for the isosceles trapezium at a given base angle, and the
//! inverse problem from a mass ratio.

use fourbody::centrality::{dziobek_residuals, lambda_fit};
use fourbody::families::{
    trapezium_alpha_for_ratio, trapezium_beta, trapezium_massless_residual, trapezium_ratio_range, FamilyShape,
};

pub fn run_example() -> fourbody::Result<()> {
    for a in [65.0_f64, 70.0, 75.0, 85.0] {
        let alpha = a.to_radians();
        let beta = trapezium_beta(alpha)?;
        let shape = FamilyShape::trapezium_at(alpha, beta, 1.0)?;
        let config = shape.configuration()?;
        let fit = lambda_fit(&config, &shape.masses()?)?;
        let massless = trapezium_massless_residual(&config.distances())?;
        println!(
            "alpha={a:4.1} beta={:8.4} m2/m1={:.6} deviation={:.1e} massless={:.1e}",
            beta.to_degrees(),
            shape.ratio("m2/m1").unwrap_or(f64::NAN),
            fit.max_relative_deviation,
            massless.normalized
        );
        let worst = dziobek_residuals(&config.distances())?
            .iter()
            .map(|r| r.normalized.abs())
            .fold(0.0, f64::max);
        println!("  worst mass-independent residual {worst:.1e}");
    }

    let (lo, hi) = trapezium_ratio_range()?;
    println!("reachable m2/m1 range: ({lo:.3e}, {hi:.9})");
    let (alpha, beta) = trapezium_alpha_for_ratio(0.05)?;
    println!("m2/m1 = 0.05 at alpha={:.6} beta={:.6} deg", alpha.to_degrees(), beta.to_degrees());
    match trapezium_alpha_for_ratio(1.0) {
        Ok((a, _)) => println!("equal masses at alpha={:.6}", a.to_degrees()),
        Err(e) => println!("equal masses: {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
