//! The four mass-independent relations among `p_ij = q_ij^-3`, on central
//! configurations and on a distance set with an equilateral triple.

use fourbody::centrality::dziobek_residuals;
use fourbody::families::FamilyShape;
use fourbody::pairspace::DistanceSet;

pub fn run_example() -> fourbody::Result<()> {
    let kite = FamilyShape::kite_convex(50f64.to_radians(), 40f64.to_radians(), 1.0)?;
    show("convex kite", &kite.configuration()?.distances())?;

    // q12 = q13 = q23, other three generic
    let triple = DistanceSet::four([1.0, 1.0, 0.8, 1.0, 0.9, 1.3])?;
    show("equilateral triple", &triple)?;
    Ok(())
}

fn show(name: &str, d: &DistanceSet) -> fourbody::Result<()> {
    println!("{name}:");
    for r in dziobek_residuals(d)? {
        println!("  {} {:+.3e}", r.label, r.normalized);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
