//! Admissible-angle grids for the kite families and the trapezium curve,
//! written as CSV into a temporary directory.

use std::fs::File;

use fourbody::cli::{grid_components, region_grid, trapezium_curve};
use fourbody::families::FamilyKind;
use fourbody::io::{write_curve, write_region};

pub fn run_example() -> fourbody::Result<()> {
    let dir = tempfile::tempdir()?;
    let n = 128;
    for kind in [FamilyKind::KiteConvex, FamilyKind::KiteConcave, FamilyKind::IsoscelesTrapezium] {
        let rows = region_grid(kind, n)?;
        let allowed = rows.iter().filter(|r| r.allowed).count();
        let path = dir.path().join(format!("{}.csv", kind.name()));
        write_region(File::create(&path)?, &rows)?;
        println!(
            "{:<13} allowed fraction {:.4}, components {}",
            kind.name(),
            allowed as f64 / rows.len() as f64,
            grid_components(&rows, n)
        );
    }
    let curve = trapezium_curve(32);
    write_curve(File::create(dir.path().join("curve.csv"))?, &curve)?;
    if let (Some(first), Some(last)) = (curve.first(), curve.last()) {
        println!(
            "curve: {} points, m2/m1 from {:.3e} to {:.6}",
            curve.len(),
            first.mass_ratio,
            last.mass_ratio
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
