//! Homothetic collapse of the regular tetrahedron from rest, and a
//! non-central negative control.

use fourbody::dynamics::{homothetic_init, integrate, DynamicState, IntegrationOptions};
use fourbody::families::build_tetrahedron;
use fourbody::pairspace::{Configuration, Masses, Vec3};

pub fn run_example() -> fourbody::Result<()> {
    let config = build_tetrahedron(1.0)?;
    let masses = Masses::new(vec![1.0, 2.0, 3.0, 4.0])?;
    let state = homothetic_init(&config, &masses)?;
    let opts = IntegrationOptions::adaptive(1e-3, 100_000, 1e-12).stop_below_scale(0.5);
    let traj = integrate(&state, &opts)?;
    let d = &traj.diagnostics;
    let (t0, l0) = d.lambda_history[0];
    let (t1, l1) = *d.lambda_history.last().expect("at least one sample");
    println!(
        "tetrahedron: stop {:?} after {} steps, shape deviation {:.1e}",
        traj.stop, traj.steps, d.max_shape_deviation
    );
    println!("lambda {l0:.4} at t={t0:.3} -> {l1:.4} at t={t1:.3}");

    let skew = Configuration::planar(&[[0.0, 0.0], [1.0, 0.1], [0.3, 1.2], [1.5, 1.7]])?;
    let m = Masses::equal(4, 1.0)?;
    let rest = DynamicState::new(&skew, vec![Vec3::zeros(); 4], m)?;
    let traj = integrate(&rest, &IntegrationOptions::adaptive(1e-3, 100_000, 1e-12).stop_below_scale(0.8))?;
    println!("non-central from rest: shape deviation {:.2e}", traj.diagnostics.max_shape_deviation);
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
