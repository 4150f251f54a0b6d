//! Command-line front end. Exit codes: 0 central (or success), 2 not
//! central, 1 input or usage error.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::{
    cc_residuals_four, cc_residuals_general, classify, dziobek_residuals, lambda_fit, LambdaFit, ResidualReport,
    ScalarResidual, ShapeClass, DEFAULT_CLASSIFY_TOL, DEFAULT_ORACLE_TOL, DEFAULT_RESIDUAL_TOL,
};
use crate::dynamics::{homothetic_init, integrate, rigid_rotation_init, rotation_period, IntegrationOptions, Method, TrajectoryDiagnostics};
use crate::error::{Error, Result};
use crate::families::{
    build_equilateral_centered, build_tetrahedron, kite_concave_ratios_raw, kite_concave_region, kite_convex_ratios_raw,
    kite_convex_region, rhombus_angle, rhombus_ratio_raw, rhombus_region, trapezium_alpha_for_ratio, trapezium_beta,
    trapezium_mass_ratio, trapezium_ratios_raw, trapezium_region, FamilyKind, FamilyShape,
};
use crate::io::{read_config_file, write_curve, write_distances, write_json, write_region, write_trajectory, ConfigFile, CurveRow, RegionRow};
use crate::pairspace::{Configuration, Masses};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CENTRAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fourbody", version, about = "Four-body central configurations: check, build, invert, region, simulate")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Tolerance override for the command's main test.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Grid resolution per axis for `region`.
    #[arg(long, global = true, default_value_t = 256)]
    pub grid: usize,

    /// Output path (stdout when absent; a file prefix for `simulate`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Read bare angle values as degrees (`NNdeg` is always degrees).
    #[arg(long, global = true)]
    pub deg: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rotate,
    Collapse,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Residuals, oracle and shape class of a configuration file.
    Check { file: PathBuf },
    /// Acceleration oracle only.
    Oracle { file: PathBuf },
    /// Build a family member and emit its configuration.
    Build {
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// Target mass ratio (rhombus m1/m2, trapezium m2/m1) instead of angles.
        #[arg(long)]
        ratio: Option<f64>,
        /// Length of q12 (edge for the tetrahedron, side for the equilateral triangle).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Comma-separated masses for the tetrahedron.
        #[arg(long, value_delimiter = ',')]
        masses: Option<Vec<f64>>,
        /// Common outer mass for the centred equilateral triangle.
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// Central mass for the centred equilateral triangle.
        #[arg(long, default_value_t = 1.0)]
        m4: f64,
    },
    /// Mass ratio to angles for the rhombus and trapezium.
    Invert {
        family: String,
        #[arg(long)]
        ratio: f64,
    },
    /// Admissible-angle grid with mass ratios.
    Region {
        family: String,
        /// Where to write the trapezium beta(alpha) curve; defaults to the
        /// `--out` path with a `.curve.csv` suffix.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Integrate a central configuration and report shape preservation.
    Simulate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Rotate)]
        mode: Mode,
        /// Steps (per period for `rotate`, a cap for `collapse`).
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        /// Number of rotation periods.
        #[arg(long, default_value_t = 1.0)]
        periods: f64,
        /// Collapse stops when the largest distance reaches this fraction.
        #[arg(long, default_value_t = 0.5)]
        shrink: f64,
        /// Sample every k steps.
        #[arg(long)]
        stride: Option<usize>,
    },
}

/// Parses `"75deg"`, `"1.2rad"` or a bare number (degrees when `deg`).
pub fn parse_angle(s: &str, deg: bool) -> Result<f64> {
    let t = s.trim();
    let (num, in_deg) = if let Some(v) = t.strip_suffix("deg") {
        (v, true)
    } else if let Some(v) = t.strip_suffix("rad") {
        (v, false)
    } else {
        (t, deg)
    };
    let x: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("cannot parse angle '{s}'")))?;
    Ok(if in_deg { x.to_radians() } else { x })
}

fn need_angle(v: &Option<String>, name: &str, deg: bool) -> Result<f64> {
    parse_angle(v.as_deref().ok_or_else(|| Error::Usage(format!("--{name} is required")))?, deg)
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Check { file } => check(cli, file, out, err),
        Command::Oracle { file } => oracle(cli, file, out, err),
        Command::Build {
            family,
            alpha,
            beta,
            ratio,
            scale,
            masses,
            mass,
            m4,
        } => {
            let (config, m, shape) = build(cli, family, alpha, beta, *ratio, *scale, masses.as_deref(), *mass, *m4)?;
            with_output(cli, out, |w| match cli.format {
                Format::Json => write_json(w, &BuildOutput { config: ConfigFile::new(&config, &m), family: shape }),
                Format::Csv => write_distances(w, &config.distances()),
            })?;
            Ok(EXIT_OK)
        }
        Command::Invert { family, ratio } => invert(cli, family, *ratio, out),
        Command::Region { family, curve } => region(cli, family, curve.as_deref(), out, err),
        Command::Simulate {
            file,
            mode,
            steps,
            dt,
            periods,
            shrink,
            stride,
        } => simulate(cli, file, *mode, *steps, *dt, *periods, *shrink, *stride, out, err),
    }
}

fn with_output(cli: &Cli, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

#[derive(Serialize)]
pub struct CheckOutput {
    pub central: bool,
    pub tol: f64,
    pub residuals: ResidualReport,
    pub residuals_central: bool,
    pub oracle: LambdaFit,
    pub shape: Option<ShapeClass>,
    pub dziobek: Option<Vec<ScalarResidual>>,
}

/// Full centrality report. The verdict is the oracle's; the residual
/// verdict is reported alongside.
pub fn check_report(config: &Configuration, masses: &Masses, tol: f64) -> Result<CheckOutput> {
    let four = config.len() == 4;
    let residuals = if four {
        cc_residuals_four(config, masses)?
    } else {
        cc_residuals_general(config, masses)?
    };
    let oracle = lambda_fit(config, masses)?;
    let shape = if four { Some(classify(config, DEFAULT_CLASSIFY_TOL)?) } else { None };
    let dziobek = if four && config.dim() == 2 {
        Some(dziobek_residuals(&config.distances())?.to_vec())
    } else {
        None
    };
    Ok(CheckOutput {
        central: oracle.is_central(tol),
        tol,
        residuals_central: residuals.is_central(DEFAULT_RESIDUAL_TOL),
        residuals,
        oracle,
        shape,
        dziobek,
    })
}

fn check(cli: &Cli, file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (config, masses) = read_config_file(file)?;
    let tol = cli.tol.unwrap_or(DEFAULT_ORACLE_TOL);
    let report = check_report(&config, &masses, tol)?;
    with_output(cli, out, |w| match cli.format {
        Format::Json => write_json(w, &report),
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["label", "raw", "normalized"])?;
            for e in &report.residuals.entries {
                c.write_record([e.label.clone(), e.signed.to_string(), e.normalized.to_string()])?;
            }
            for d in report.dziobek.iter().flatten() {
                c.write_record([d.label.clone(), d.raw.to_string(), d.normalized.to_string()])?;
            }
            c.write_record(["oracle".to_string(), report.oracle.lambda.to_string(), report.oracle.max_relative_deviation.to_string()])?;
            c.flush()?;
            Ok(())
        }
    })?;
    if report.central {
        Ok(EXIT_OK)
    } else {
        writeln!(
            err,
            "not central: oracle deviation {:e}, max normalized residual {:e}",
            report.oracle.max_relative_deviation, report.residuals.max_normalized
        )?;
        Ok(EXIT_NOT_CENTRAL)
    }
}

fn oracle(cli: &Cli, file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (config, masses) = read_config_file(file)?;
    let tol = cli.tol.unwrap_or(DEFAULT_ORACLE_TOL);
    let fit = lambda_fit(&config, &masses)?;
    with_output(cli, out, |w| match cli.format {
        Format::Json => write_json(w, &fit),
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["body", "deviation"])?;
            for (i, d) in fit.per_body_deviation.iter().enumerate() {
                c.write_record([(i + 1).to_string(), d.to_string()])?;
            }
            c.flush()?;
            Ok(())
        }
    })?;
    if fit.is_central(tol) {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "not central: oracle deviation {:e}", fit.max_relative_deviation)?;
        Ok(EXIT_NOT_CENTRAL)
    }
}

#[derive(Serialize)]
struct BuildOutput {
    #[serde(flatten)]
    config: ConfigFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<FamilyShape>,
}

#[allow(clippy::too_many_arguments)]
fn build(
    cli: &Cli,
    family: &str,
    alpha: &Option<String>,
    beta: &Option<String>,
    ratio: Option<f64>,
    scale: f64,
    masses: Option<&[f64]>,
    mass: f64,
    m4: f64,
) -> Result<(Configuration, Masses, Option<FamilyShape>)> {
    let kind: FamilyKind = family.parse()?;
    let shape = match kind {
        FamilyKind::Tetrahedron => {
            let m = Masses::new(masses.map(<[f64]>::to_vec).unwrap_or_else(|| vec![1.0; 4]))?;
            if m.len() != 4 {
                return Err(Error::BodyCount { expected: 4, got: m.len() });
            }
            return Ok((build_tetrahedron(scale)?, m, None));
        }
        FamilyKind::EquilateralCentered => {
            let (c, m) = build_equilateral_centered(mass, m4, scale)?;
            return Ok((c, m, None));
        }
        FamilyKind::KiteConvex => {
            FamilyShape::kite_convex(need_angle(alpha, "alpha", cli.deg)?, need_angle(beta, "beta", cli.deg)?, scale)?
        }
        FamilyKind::KiteConcave => {
            FamilyShape::kite_concave(need_angle(alpha, "alpha", cli.deg)?, need_angle(beta, "beta", cli.deg)?, scale)?
        }
        FamilyKind::Rhombus => {
            let a = match (alpha, ratio) {
                (Some(_), None) => need_angle(alpha, "alpha", cli.deg)?,
                (None, Some(r)) => rhombus_angle(r)?,
                _ => return Err(Error::Usage("rhombus takes exactly one of --alpha or --ratio".into())),
            };
            FamilyShape::rhombus(a, scale)?
        }
        FamilyKind::IsoscelesTrapezium => match (alpha, beta, ratio) {
            (Some(_), None, None) => FamilyShape::trapezium(need_angle(alpha, "alpha", cli.deg)?, scale)?,
            (Some(_), Some(_), None) => {
                let (a, b) = (need_angle(alpha, "alpha", cli.deg)?, need_angle(beta, "beta", cli.deg)?);
                let r = trapezium_mass_ratio(a, b)?;
                if !r.on_curve {
                    return Err(Error::domain(format!(
                        "(alpha, beta) on the trapezium solution curve; beta({a}) = {}",
                        trapezium_beta(a).map(|b| b.to_string()).unwrap_or_else(|e| e.to_string())
                    )));
                }
                FamilyShape::trapezium_at(a, b, scale)?
            }
            (None, None, Some(r)) => {
                let (a, b) = trapezium_alpha_for_ratio(r)?;
                FamilyShape::trapezium_at(a, b, scale)?
            }
            _ => return Err(Error::Usage("trapezium takes --alpha (optionally with --beta) or --ratio".into())),
        },
    };
    Ok((shape.configuration()?, shape.masses()?, Some(shape)))
}

#[derive(Serialize)]
struct InvertOutput {
    family: &'static str,
    ratio: f64,
    alpha: f64,
    beta: f64,
}

fn invert(cli: &Cli, family: &str, ratio: f64, out: &mut dyn Write) -> Result<i32> {
    let kind: FamilyKind = family.parse()?;
    let (alpha, beta) = match kind {
        FamilyKind::Rhombus => {
            let a = rhombus_angle(ratio)?;
            (a, a)
        }
        FamilyKind::IsoscelesTrapezium => trapezium_alpha_for_ratio(ratio)?,
        other => return Err(Error::Usage(format!("invert supports rhombus and trapezium, not {other}"))),
    };
    let res = InvertOutput { family: kind.name(), ratio, alpha, beta };
    with_output(cli, out, |w| match cli.format {
        Format::Json => write_json(w, &res),
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.serialize(&res)?;
            c.flush()?;
            Ok(())
        }
    })?;
    Ok(EXIT_OK)
}

/// Cell-centred `n x n` grid over `(0, pi/2)^2` (one row in `beta = alpha`
/// for the rhombus). Concave kites are reported on the `alpha > beta`
/// branch only. For the trapezium, `m1_ratio` holds `m2/m1` from the
/// pointwise formula.
pub fn region_grid(kind: FamilyKind, n: usize) -> Result<Vec<RegionRow>> {
    if n < 2 {
        return Err(Error::Usage(format!("grid resolution must be at least 2, got {n}")));
    }
    let h = FRAC_PI_2 / n as f64;
    let at = |k: usize| (k as f64 + 0.5) * h;
    let cell = |alpha: f64, beta: f64| -> RegionRow {
        let (allowed, r1, r4) = match kind {
            FamilyKind::KiteConvex => {
                let (r1, r4) = kite_convex_ratios_raw(alpha, beta);
                (kite_convex_region(alpha, beta), Some(r1), Some(r4))
            }
            FamilyKind::KiteConcave => {
                let (r1, r4) = kite_concave_ratios_raw(alpha, beta);
                (alpha > beta && kite_concave_region(alpha, beta), Some(r1), Some(r4))
            }
            FamilyKind::Rhombus => {
                let t = rhombus_ratio_raw(alpha);
                (rhombus_region(alpha), Some(t), Some(t))
            }
            FamilyKind::IsoscelesTrapezium => {
                let (r, _) = trapezium_ratios_raw(alpha, beta);
                (trapezium_region(alpha, beta), Some(r), None)
            }
            _ => (false, None, None),
        };
        RegionRow {
            alpha,
            beta,
            allowed,
            m1_ratio: r1.filter(|_| allowed),
            m4_ratio: r4.filter(|_| allowed),
        }
    };
    match kind {
        FamilyKind::Tetrahedron | FamilyKind::EquilateralCentered => {
            Err(Error::Usage(format!("{kind} has no angle parameters")))
        }
        FamilyKind::Rhombus => Ok((0..n).map(|i| cell(at(i), at(i))).collect()),
        _ => Ok((0..n * n)
            .into_par_iter()
            .map(|k| cell(at(k / n), at(k % n)))
            .collect()),
    }
}

/// Number of 4-connected components of allowed cells in an `n x n` grid
/// produced by [`region_grid`].
pub fn grid_components(rows: &[RegionRow], n: usize) -> usize {
    let mut seen = vec![false; rows.len()];
    let mut count = 0;
    for start in 0..rows.len() {
        if !rows[start].allowed || seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            let (i, j) = (k / n, k % n);
            let mut nb = Vec::with_capacity(4);
            if i > 0 {
                nb.push(k - n);
            }
            if i + 1 < n {
                nb.push(k + n);
            }
            if j > 0 {
                nb.push(k - 1);
            }
            if j + 1 < n {
                nb.push(k + 1);
            }
            for x in nb {
                if rows[x].allowed && !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
    }
    count
}

/// `beta(alpha)` and `m2/m1` at `n` base angles strictly inside
/// `(pi/3, pi/2)`; angles without a bracketed root are skipped.
pub fn trapezium_curve(n: usize) -> Vec<CurveRow> {
    let (lo, hi) = (PI / 3.0, FRAC_PI_2);
    (1..=n)
        .into_par_iter()
        .filter_map(|k| {
            let alpha = lo + (hi - lo) * k as f64 / (n + 1) as f64;
            let beta = trapezium_beta(alpha).ok()?;
            let r = trapezium_mass_ratio(alpha, beta).ok()?;
            Some(CurveRow { alpha, beta, mass_ratio: r.value })
        })
        .collect()
}

fn region(cli: &Cli, family: &str, curve: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let kind: FamilyKind = family.parse()?;
    let rows = region_grid(kind, cli.grid)?;
    with_output(cli, out, |w| match cli.format {
        Format::Csv => write_region(w, &rows),
        Format::Json => write_json(w, &rows),
    })?;
    if kind == FamilyKind::IsoscelesTrapezium {
        let path = curve.map(Path::to_path_buf).or_else(|| {
            cli.out.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(".curve.csv");
                PathBuf::from(s)
            })
        });
        let rows = trapezium_curve(cli.grid);
        match path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(&p)?);
                write_curve(&mut w, &rows)?;
                w.flush()?;
                writeln!(err, "curve written to {}", p.display())?;
            }
            None => writeln!(err, "pass --curve or --out to write the beta(alpha) curve")?,
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SimulationSummary {
    mode: &'static str,
    method: Method,
    dt: f64,
    steps: usize,
    final_time: f64,
    stop: crate::dynamics::StopReason,
    threshold: f64,
    passed: bool,
    diagnostics: TrajectoryDiagnostics,
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    cli: &Cli,
    file: &Path,
    mode: Mode,
    steps: Option<usize>,
    dt: Option<f64>,
    periods: f64,
    shrink: f64,
    stride: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let (config, masses) = read_config_file(file)?;
    let threshold = cli.tol.unwrap_or(1e-6);
    let initial = match mode {
        Mode::Rotate => rigid_rotation_init(&config, &masses),
        Mode::Collapse => homothetic_init(&config, &masses),
    };
    let state = match initial {
        Ok(s) => s,
        Err(Error::NotCentral { deviation }) => {
            writeln!(err, "not central: oracle deviation {deviation:e}")?;
            return Ok(EXIT_NOT_CENTRAL);
        }
        Err(Error::NotPlanar(_)) => {
            writeln!(err, "rigid rotation needs a planar configuration; use --mode collapse")?;
            return Ok(EXIT_INPUT);
        }
        Err(e) => return Err(e),
    };
    let opts = match mode {
        Mode::Rotate => {
            let per = steps.unwrap_or(10_000);
            let period = rotation_period(&config, &masses)?;
            let total = (per as f64 * periods).round() as usize;
            let dt = dt.unwrap_or(period / per as f64);
            IntegrationOptions::rk4(dt, total)
        }
        Mode::Collapse => {
            let lambda = lambda_fit(&config, &masses)?.lambda;
            let dt = dt.unwrap_or(1e-3 / lambda.sqrt());
            IntegrationOptions::adaptive(dt, steps.unwrap_or(1_000_000), 1e-12).stop_below_scale(shrink)
        }
    };
    let opts = match stride {
        Some(k) => opts.with_stride(k),
        None => opts,
    };
    let traj = integrate(&state, &opts)?;
    let passed = traj.diagnostics.max_shape_deviation < threshold;
    let summary = SimulationSummary {
        mode: match mode {
            Mode::Rotate => "rotate",
            Mode::Collapse => "collapse",
        },
        method: opts.method,
        dt: opts.dt,
        steps: traj.steps,
        final_time: traj.final_sample().time,
        stop: traj.stop.clone(),
        threshold,
        passed,
        diagnostics: traj.diagnostics.clone(),
    };
    match &cli.out {
        Some(prefix) => {
            let with_ext = |ext: &str| {
                let mut s = prefix.clone().into_os_string();
                s.push(ext);
                PathBuf::from(s)
            };
            let mut w = BufWriter::new(File::create(with_ext(".csv"))?);
            write_trajectory(&mut w, &traj)?;
            w.flush()?;
            let mut w = BufWriter::new(File::create(with_ext(".json"))?);
            write_json(&mut w, &summary)?;
            w.flush()?;
        }
        None => match cli.format {
            Format::Json => write_json(&mut *out, &summary)?,
            Format::Csv => write_trajectory(&mut *out, &traj)?,
        },
    }
    if passed {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "shape deviation {:e} exceeds {threshold:e}", traj.diagnostics.max_shape_deviation)?;
        Ok(EXIT_NOT_CENTRAL)
    }
}
