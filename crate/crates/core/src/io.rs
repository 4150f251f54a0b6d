//! File formats: configuration JSON, distance and grid CSVs, trajectories.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{shape_deviation, Trajectory};
use crate::error::{Error, Result};
use crate::pairspace::{pairs, Configuration, DistanceSet, Masses, PairTable, Vec3};

/// On-disk configuration: `{"dim": 2, "positions": [[x, y], ...],
/// "masses": [...], "G": 1.0}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigFile {
    pub dim: usize,
    pub positions: Vec<Vec<f64>>,
    pub masses: Vec<f64>,
    #[serde(rename = "G", default = "unit_g")]
    pub g: f64,
}

fn unit_g() -> f64 {
    1.0
}

impl ConfigFile {
    pub fn new(config: &Configuration, masses: &Masses) -> Self {
        let dim = config.dim();
        ConfigFile {
            dim,
            positions: config.positions().iter().map(|r| r.iter().take(dim).copied().collect()).collect(),
            masses: masses.values().to_vec(),
            g: masses.g(),
        }
    }

    pub fn parse(&self) -> Result<(Configuration, Masses)> {
        let mut pts = Vec::with_capacity(self.positions.len());
        for (index, p) in self.positions.iter().enumerate() {
            if p.len() != self.dim {
                return Err(Error::CoordinateCount {
                    index: index + 1,
                    expected: self.dim,
                    got: p.len(),
                });
            }
            pts.push(Vec3::new(p[0], p[1], if self.dim == 3 { p[2] } else { 0.0 }));
        }
        if self.masses.len() != pts.len() {
            return Err(Error::MassCountMismatch {
                masses: self.masses.len(),
                bodies: pts.len(),
            });
        }
        let masses = Masses::with_g(self.masses.clone(), self.g)?;
        let config = Configuration::new(self.dim, pts)?;
        Ok((config, masses))
    }
}

pub fn read_config(reader: impl Read) -> Result<(Configuration, Masses)> {
    let file: ConfigFile = serde_json::from_reader(reader)?;
    file.parse()
}

pub fn read_config_file(path: &Path) -> Result<(Configuration, Masses)> {
    read_config(std::fs::File::open(path)?)
}

pub fn write_config(mut writer: impl Write, config: &Configuration, masses: &Masses) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, &ConfigFile::new(config, masses))?;
    writeln!(writer)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct DistanceRow {
    i: usize,
    j: usize,
    q: f64,
}

/// Distances as CSV with header `i,j,q`, indices from 1.
pub fn write_distances(writer: impl Write, d: &DistanceSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (p, q) in d.q_table().iter() {
        w.serialize(DistanceRow {
            i: p.i + 1,
            j: p.j + 1,
            q: *q,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `i,j,q` rows; every pair must appear exactly once.
pub fn read_distances(reader: impl Read) -> Result<DistanceSet> {
    let mut rows = Vec::new();
    for row in csv::Reader::from_reader(reader).deserialize() {
        let row: DistanceRow = row?;
        if row.i == 0 || row.j == 0 || row.i == row.j {
            return Err(Error::Distances(format!("bad pair ({}, {})", row.i, row.j)));
        }
        rows.push(row);
    }
    let n = rows.iter().map(|r| r.i.max(r.j)).max().unwrap_or(0);
    let mut table = PairTable::from_fn(n, |_| f64::NAN);
    for r in &rows {
        let slot = table.get_mut(r.i - 1, r.j - 1);
        if !slot.is_nan() {
            return Err(Error::Distances(format!("pair ({}, {}) listed twice", r.i, r.j)));
        }
        *slot = r.q;
    }
    if let Some(p) = pairs(n).find(|p| table.get(p.i, p.j).is_nan()) {
        return Err(Error::Distances(format!("missing pair {}", p.label())));
    }
    DistanceSet::new(table)
}

/// One `(alpha, beta)` grid cell; ratios are `None` outside the region.
#[derive(Clone, Debug, Serialize)]
pub struct RegionRow {
    pub alpha: f64,
    pub beta: f64,
    pub allowed: bool,
    pub m1_ratio: Option<f64>,
    pub m4_ratio: Option<f64>,
}

/// Header `alpha,beta,allowed,m1_ratio,m4_ratio`.
pub fn write_region(writer: impl Write, rows: &[RegionRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveRow {
    pub alpha: f64,
    pub beta: f64,
    pub mass_ratio: f64,
}

/// Header `alpha,beta,mass_ratio`.
pub fn write_curve(writer: impl Write, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, x1, y1(, z1), ...`, then the running shape deviation and
/// relative energy change.
pub fn write_trajectory(writer: impl Write, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let n = traj.masses.len();
    let axes = &["x", "y", "z"][..traj.dim];
    let mut header = vec!["t".to_string()];
    for i in 1..=n {
        header.extend(axes.iter().map(|a| format!("{a}{i}")));
    }
    header.extend(["shape_deviation".to_string(), "energy_drift".to_string()]);
    w.write_record(&header)?;

    let masses = Masses::new(traj.masses.clone())?;
    let energy = |k: usize| {
        let s = &traj.samples[k];
        let kin: f64 = s
            .velocities
            .iter()
            .zip(&traj.masses)
            .map(|(v, m)| 0.5 * m * v.norm_squared())
            .sum();
        let pot: f64 = pairs(n)
            .map(|p| -masses.g() * traj.masses[p.i] * traj.masses[p.j] / (s.positions[p.i] - s.positions[p.j]).norm())
            .sum();
        kin + pot
    };
    let e0 = energy(0);
    for (k, s) in traj.samples.iter().enumerate() {
        let mut rec = vec![s.time.to_string()];
        for r in &s.positions {
            rec.extend(r.iter().take(traj.dim).map(|x| x.to_string()));
        }
        let dev = if k == 0 {
            0.0
        } else {
            shape_deviation(&[traj.samples[0].clone(), s.clone()])
        };
        rec.push(dev.to_string());
        rec.push(((energy(k) - e0) / e0.abs()).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(mut writer: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writeln!(writer)?;
    Ok(())
}
