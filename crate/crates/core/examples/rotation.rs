//! Rigid rotation of planar central configurations over one period.

use fourbody::dynamics::{integrate, rigid_rotation_init, rotation_period, IntegrationOptions};
use fourbody::families::{build_equilateral_centered, FamilyShape};
use fourbody::pairspace::{Configuration, Masses};

pub fn run_example() -> fourbody::Result<()> {
    let square = FamilyShape::rhombus(std::f64::consts::FRAC_PI_4, 1.0)?;
    let trap = FamilyShape::trapezium(75f64.to_radians(), 1.0)?;
    let cases: Vec<(&str, Configuration, Masses)> = vec![
        {
            let (c, m) = build_equilateral_centered(1.0, 2.0, 1.0)?;
            ("centred equilateral", c, m)
        },
        ("square", square.configuration()?, square.masses()?),
        ("trapezium 75deg", trap.configuration()?, trap.masses()?),
    ];
    for (name, config, masses) in cases {
        let period = rotation_period(&config, &masses)?;
        let state = rigid_rotation_init(&config, &masses)?;
        let steps = 10_000;
        let traj = integrate(&state, &IntegrationOptions::rk4(period / steps as f64, steps))?;
        let d = &traj.diagnostics;
        println!(
            "{name:<20} period {period:.4}: shape {:.1e}, pair momenta {:.1e}, energy {:.1e}",
            d.max_shape_deviation, d.max_pair_momentum_drift, d.energy_drift
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
