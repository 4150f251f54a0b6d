//! Writing a family member to JSON and CSV and running the CLI on it.

use std::fs::File;

use fourbody::families::FamilyShape;
use fourbody::io::{read_config_file, read_distances, write_config, write_distances};

pub fn run_example() -> fourbody::Result<()> {
    let dir = tempfile::tempdir()?;
    let shape = FamilyShape::kite_concave(70f64.to_radians(), 55f64.to_radians(), 2.0)?;
    let (config, masses) = (shape.configuration()?, shape.masses()?);

    let json = dir.path().join("kite.json");
    write_config(File::create(&json)?, &config, &masses)?;
    let (back, _) = read_config_file(&json)?;
    println!("json round trip exact: {}", back == config);

    let csv = dir.path().join("kite.csv");
    write_distances(File::create(&csv)?, &config.distances())?;
    let d = read_distances(File::open(&csv)?)?;
    println!("q14 from csv = {:.6}", d.q(0, 3));

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args = ["fourbody", "check", json.to_str().unwrap_or_default(), "--format", "csv"];
    let code = fourbody::cli::run(args, &mut out, &mut err);
    println!("check exit code {code}");
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

#[allow(dead_code)]
fn main() -> fourbody::Result<()> {
    run_example()
}
