//! Pair vectors, reduced masses and realizability of a distance set.

use fourbody::pairspace::{pair_vectors, realizable, reduced_masses, triangle_residual, Configuration, DistanceSet, Masses};

pub fn run_example() -> fourbody::Result<()> {
    let config = Configuration::planar(&[[0.0, 0.0], [1.0, 0.0], [0.3, 0.9], [1.2, 1.1]])?;
    let masses = Masses::new(vec![1.0, 2.0, 0.5, 1.5])?;

    let q = pair_vectors(&config);
    println!("q12 = {:?}", q.oriented(0, 1).as_slice());
    println!("triangle residual = {:e}", triangle_residual(&q));

    let mu = reduced_masses(&masses);
    for (p, m) in mu.pairs.iter() {
        println!("mu{} = {m:.4}", p.label());
    }
    println!("mu123 = {:.4}", mu.triplet(0, 1, 2));

    // six equal edges fit in space but not in the plane
    let equal = DistanceSet::four([1.0; 6])?;
    println!("equal edges in 3-D: {}", realizable(&equal, 3)?.realizable);
    println!("equal edges in 2-D: {}", realizable(&equal, 2)?.realizable);

    let r = realizable(&config.distances(), 2)?;
    let witness = r.witness.expect("realizable sets carry a witness");
    println!("witness centroid = {:?}", witness.centroid().as_slice());
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
