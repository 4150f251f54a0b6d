//! Convex and concave kites and the rhombus, checked against the oracle.

use fourbody::centrality::lambda_fit;
use fourbody::families::{rhombus_angle, rhombus_ratio, FamilyShape};

pub fn run_example() -> fourbody::Result<()> {
    let deg = f64::to_radians;
    let shapes = [
        FamilyShape::kite_convex(deg(50.0), deg(40.0), 1.0)?,
        FamilyShape::kite_concave(deg(50.0), deg(5.0), 1.0)?,
        FamilyShape::kite_concave(deg(70.0), deg(55.0), 1.0)?,
        FamilyShape::rhombus(deg(40.0), 1.0)?,
    ];
    for s in &shapes {
        let fit = lambda_fit(&s.configuration()?, &s.masses()?)?;
        println!(
            "{:<13} alpha={:5.1} beta={:5.1} {:?} deviation={:.1e}",
            s.kind.name(),
            s.alpha.to_degrees(),
            s.beta.to_degrees(),
            s.mass_ratios,
            fit.max_relative_deviation
        );
    }

    let t = rhombus_ratio(deg(40.0))?;
    println!("T(40deg) = {t:.6}, inverse = {:.6} deg", rhombus_angle(t)?.to_degrees());

    // outside the admissible region the constraint is named
    if let Err(e) = FamilyShape::kite_convex(deg(55.0), deg(10.0), 1.0) {
        println!("(55, 10): {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
