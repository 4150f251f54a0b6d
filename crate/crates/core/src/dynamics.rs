//! Position-space integration of the Newtonian N-body problem.
//!
//! Trajectories are integrated in ordinary coordinates, so the triangle
//! conditions hold exactly; pair-space quantities (pair momenta, the
//! pair-space kinetic energy) are derived observables.

use serde::Serialize;

use crate::centrality::{lambda_fit, DEFAULT_ORACLE_TOL};
use crate::error::{Error, Result};
use crate::pairspace::{pairs, triplets, Configuration, Masses, PairTable, Vec3};

/// Newtonian accelerations `a_i = sum_j G m_j (r_j - r_i) / |r_j - r_i|^3`.
pub fn newtonian_accelerations(positions: &[Vec3], masses: &Masses) -> Result<Vec<Vec3>> {
    let n = positions.len();
    if masses.len() != n {
        return Err(Error::MassCountMismatch {
            masses: masses.len(),
            bodies: n,
        });
    }
    let m = masses.values();
    let mut acc = vec![Vec3::zeros(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = positions[j] - positions[i];
            let r = d.norm();
            if r == 0.0 || !r.is_finite() {
                return Err(Error::Collision {
                    i: i + 1,
                    j: j + 1,
                    distance: r,
                });
            }
            let f = d * (masses.g() / (r * r * r));
            acc[i] += f * m[j];
            acc[j] -= f * m[i];
        }
    }
    Ok(acc)
}

/// Positions, velocities and masses at one instant, in the centre-of-mass
/// velocity frame.
#[derive(Clone, Debug)]
pub struct DynamicState {
    pub time: f64,
    pub dim: usize,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub masses: Masses,
}

impl DynamicState {
    /// Removes the centre-of-mass velocity.
    pub fn new(config: &Configuration, velocities: Vec<Vec3>, masses: Masses) -> Result<Self> {
        if velocities.len() != config.len() {
            return Err(Error::BodyCount {
                expected: config.len(),
                got: velocities.len(),
            });
        }
        if masses.len() != config.len() {
            return Err(Error::MassCountMismatch {
                masses: masses.len(),
                bodies: config.len(),
            });
        }
        let total = masses.total();
        let v_com: Vec3 = velocities
            .iter()
            .zip(masses.values())
            .map(|(v, m)| v * *m)
            .sum::<Vec3>()
            / total;
        let velocities = velocities.iter().map(|v| v - v_com).collect();
        Ok(DynamicState {
            time: 0.0,
            dim: config.dim(),
            positions: config.positions().to_vec(),
            velocities,
            masses,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn configuration(&self) -> Result<Configuration> {
        let mut positions = self.positions.clone();
        if self.dim == 2 {
            for r in &mut positions {
                r.z = 0.0;
            }
        }
        Configuration::new(self.dim, positions)
    }

    pub fn center_of_mass(&self) -> Vec3 {
        self.positions
            .iter()
            .zip(self.masses.values())
            .map(|(r, m)| r * *m)
            .sum::<Vec3>()
            / self.masses.total()
    }

    pub fn center_of_mass_velocity(&self) -> Vec3 {
        self.velocities
            .iter()
            .zip(self.masses.values())
            .map(|(v, m)| v * *m)
            .sum::<Vec3>()
            / self.masses.total()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.positions[i] - self.positions[j]).norm()
    }

    pub fn min_distance(&self) -> f64 {
        pairs(self.len())
            .map(|p| self.distance(p.i, p.j))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_distance(&self) -> f64 {
        pairs(self.len()).map(|p| self.distance(p.i, p.j)).fold(0.0, f64::max)
    }

    pub fn potential_energy(&self) -> f64 {
        let m = self.masses.values();
        -pairs(self.len())
            .map(|p| self.masses.g() * m[p.i] * m[p.j] / self.distance(p.i, p.j))
            .sum::<f64>()
    }

    pub fn total_energy(&self) -> f64 {
        kinetic_energy_standard(self) + self.potential_energy()
    }

    pub fn pair_momenta(&self) -> PairTable<Vec3> {
        PairTable::from_fn(self.len(), |p| {
            let q = self.positions[p.i] - self.positions[p.j];
            let qdot = self.velocities[p.i] - self.velocities[p.j];
            q.cross(&qdot) * self.masses.pair_reduced(p.i, p.j)
        })
    }

    /// `sum_ij mu_ij |q_ij| |dq_ij/dt|`, the natural size of the pair momenta.
    fn momentum_scale(&self) -> f64 {
        pairs(self.len())
            .map(|p| {
                let q = self.positions[p.i] - self.positions[p.j];
                let qdot = self.velocities[p.i] - self.velocities[p.j];
                self.masses.pair_reduced(p.i, p.j) * q.norm() * qdot.norm()
            })
            .sum()
    }
}

/// Accelerations of the bodies in `state`.
pub fn accelerations(state: &DynamicState) -> Result<Vec<Vec3>> {
    newtonian_accelerations(&state.positions, &state.masses)
}

/// `sum_i m_i |v_i|^2 / 2`
pub fn kinetic_energy_standard(state: &DynamicState) -> f64 {
    state
        .velocities
        .iter()
        .zip(state.masses.values())
        .map(|(v, m)| 0.5 * m * v.norm_squared())
        .sum()
}

/// Kinetic energy in pair-space variables:
/// `M |dR/dt|^2 / 2 + sum_ij mu_ij |dq_ij/dt|^2 / 2
///  - sum_ijk mu_ijk |dq_ij/dt + dq_jk/dt + dq_ki/dt|^2 / 2`.
pub fn kinetic_energy_pairspace(state: &DynamicState) -> f64 {
    let m = &state.masses;
    let v = &state.velocities;
    let qdot = |i: usize, j: usize| v[i] - v[j];
    let com = 0.5 * m.total() * state.center_of_mass_velocity().norm_squared();
    let pair: f64 = pairs(state.len())
        .map(|p| 0.5 * m.pair_reduced(p.i, p.j) * qdot(p.i, p.j).norm_squared())
        .sum();
    let triplet: f64 = triplets(state.len())
        .map(|[i, j, k]| {
            let s = qdot(i, j) + qdot(j, k) + qdot(k, i);
            0.5 * m.triplet_reduced(i, j, k) * s.norm_squared()
        })
        .sum();
    com + pair - triplet
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge–Kutta.
    Rk4,
    /// Dormand–Prince 5(4) with step-size control.
    DormandPrince { rtol: f64, atol: f64 },
}

#[derive(Clone, Debug)]
pub struct IntegrationOptions {
    /// Fixed step for `Rk4`, initial step for the adaptive method.
    pub dt: f64,
    /// Maximum number of (accepted) steps.
    pub n_steps: usize,
    pub method: Method,
    /// Record a sample every `sample_stride` accepted steps.
    pub sample_stride: usize,
    /// Stop once the largest distance falls below this fraction of its
    /// initial value.
    pub stop_below_scale: Option<f64>,
    /// Stop once the smallest distance falls below this fraction of its
    /// initial value.
    pub collision_fraction: f64,
}

impl IntegrationOptions {
    pub fn rk4(dt: f64, n_steps: usize) -> Self {
        IntegrationOptions {
            dt,
            n_steps,
            method: Method::Rk4,
            sample_stride: (n_steps / 200).max(1),
            stop_below_scale: None,
            collision_fraction: 0.01,
        }
    }

    pub fn adaptive(dt: f64, n_steps: usize, rtol: f64) -> Self {
        IntegrationOptions {
            dt,
            n_steps,
            method: Method::DormandPrince { rtol, atol: rtol * 1e-3 },
            sample_stride: 1,
            stop_below_scale: None,
            collision_fraction: 0.01,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride.max(1);
        self
    }

    pub fn stop_below_scale(mut self, fraction: f64) -> Self {
        self.stop_below_scale = Some(fraction);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum StopReason {
    Completed,
    ScaleReached,
    /// Two bodies came within the collision fraction of their initial
    /// minimum separation; diagnostics cover the run up to that point.
    NearCollision,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub time: f64,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryDiagnostics {
    /// Largest relative change of any ratio `q_ij / q_kl` over the samples.
    pub max_shape_deviation: f64,
    /// Per-pair relative drift of the pair angular momenta.
    pub pair_momentum_drift: PairTable<f64>,
    pub max_pair_momentum_drift: f64,
    /// Relative drift of the summed pair angular momentum.
    pub total_momentum_drift: f64,
    pub energy_drift: f64,
    /// Largest relative gap between the pair-space and standard kinetic
    /// energies over the samples.
    pub kinetic_identity_gap: f64,
    /// `(t, lambda(t))` from the oracle at each sample.
    pub lambda_history: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub masses: Vec<f64>,
    pub dim: usize,
    pub stop: StopReason,
    pub steps: usize,
    pub diagnostics: TrajectoryDiagnostics,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }
}

type Phase = (Vec<Vec3>, Vec<Vec3>);

fn derivative(pos: &[Vec3], vel: &[Vec3], masses: &Masses) -> Result<Phase> {
    Ok((vel.to_vec(), newtonian_accelerations(pos, masses)?))
}

fn axpy(base: &[Vec3], terms: &[(f64, &[Vec3])]) -> Vec<Vec3> {
    base.iter()
        .enumerate()
        .map(|(i, b)| terms.iter().fold(*b, |acc, (c, v)| acc + v[i] * *c))
        .collect()
}

fn rk4_step(state: &mut DynamicState, h: f64) -> Result<()> {
    let m = &state.masses;
    let (x, v) = (&state.positions, &state.velocities);
    let (k1x, k1v) = derivative(x, v, m)?;
    let (k2x, k2v) = derivative(&axpy(x, &[(h / 2.0, &k1x)]), &axpy(v, &[(h / 2.0, &k1v)]), m)?;
    let (k3x, k3v) = derivative(&axpy(x, &[(h / 2.0, &k2x)]), &axpy(v, &[(h / 2.0, &k2v)]), m)?;
    let (k4x, k4v) = derivative(&axpy(x, &[(h, &k3x)]), &axpy(v, &[(h, &k3v)]), m)?;
    let w = [h / 6.0, h / 3.0, h / 3.0, h / 6.0];
    state.positions = axpy(x, &[(w[0], &k1x), (w[1], &k2x), (w[2], &k3x), (w[3], &k4x)]);
    state.velocities = axpy(v, &[(w[0], &k1v), (w[1], &k2v), (w[2], &k3v), (w[3], &k4v)]);
    state.time += h;
    Ok(())
}

// Dormand–Prince 5(4) tableau
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One attempted Dormand–Prince step; returns the proposed phase point and
/// the scaled error norm.
fn dopri_attempt(state: &DynamicState, h: f64, rtol: f64, atol: f64) -> Result<(Phase, f64)> {
    let m = &state.masses;
    let (x, v) = (&state.positions, &state.velocities);
    let mut kx: Vec<Vec<Vec3>> = Vec::with_capacity(7);
    let mut kv: Vec<Vec<Vec3>> = Vec::with_capacity(7);
    for s in 0..7 {
        let tx: Vec<(f64, &[Vec3])> = (0..s).map(|r| (h * DP_A[s][r], kx[r].as_slice())).collect();
        let tv: Vec<(f64, &[Vec3])> = (0..s).map(|r| (h * DP_A[s][r], kv[r].as_slice())).collect();
        let (dx, dv) = derivative(&axpy(x, &tx), &axpy(v, &tv), m)?;
        kx.push(dx);
        kv.push(dv);
    }
    let _ = DP_C;
    let combine = |base: &[Vec3], k: &[Vec<Vec3>], b: &[f64; 7]| {
        let terms: Vec<(f64, &[Vec3])> = (0..7).map(|s| (h * b[s], k[s].as_slice())).collect();
        axpy(base, &terms)
    };
    let x5 = combine(x, &kx, &DP_B5);
    let v5 = combine(v, &kv, &DP_B5);
    let x4 = combine(x, &kx, &DP_B4);
    let v4 = combine(v, &kv, &DP_B4);
    let mut err: f64 = 0.0;
    for (new, (old, low)) in [(&x5, (x, &x4)), (&v5, (v, &v4))] {
        for i in 0..new.len() {
            for c in 0..3 {
                let sc = atol + rtol * new[i][c].abs().max(old[i][c].abs());
                err = err.max((new[i][c] - low[i][c]).abs() / sc);
            }
        }
    }
    Ok(((x5, v5), err))
}

struct Monitor {
    initial_min: f64,
    initial_max: f64,
}

impl Monitor {
    fn stop(&self, state: &DynamicState, options: &IntegrationOptions) -> Option<StopReason> {
        if state.min_distance() < options.collision_fraction * self.initial_min {
            return Some(StopReason::NearCollision);
        }
        if let Some(f) = options.stop_below_scale {
            if state.max_distance() < f * self.initial_max {
                return Some(StopReason::ScaleReached);
            }
        }
        None
    }
}

fn sample(state: &DynamicState) -> Sample {
    Sample {
        time: state.time,
        positions: state.positions.clone(),
        velocities: state.velocities.clone(),
    }
}

/// Integrates `state` forward and collects diagnostics.
///
/// Stops early (without error) when two bodies approach within
/// `collision_fraction` of their initial minimum separation, or when the
/// optional scale threshold is reached. The final state is always sampled.
pub fn integrate(state: &DynamicState, options: &IntegrationOptions) -> Result<Trajectory> {
    if !(options.dt > 0.0 && options.dt.is_finite()) {
        return Err(Error::Usage(format!("dt must be positive, got {}", options.dt)));
    }
    let mut s = state.clone();
    let monitor = Monitor {
        initial_min: s.min_distance(),
        initial_max: s.max_distance(),
    };
    let mut samples = vec![sample(&s)];
    let mut stop = StopReason::Completed;
    let mut steps = 0;
    let mut h = options.dt;

    while steps < options.n_steps {
        match options.method {
            Method::Rk4 => rk4_step(&mut s, options.dt)?,
            Method::DormandPrince { rtol, atol } => loop {
                if h < 1e-14 * options.dt.max(s.time.abs()) {
                    return Err(Error::StepUnderflow { time: s.time });
                }
                let ((x, v), err) = dopri_attempt(&s, h, rtol, atol)?;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if err <= 1.0 {
                    s.positions = x;
                    s.velocities = v;
                    s.time += h;
                    h *= factor;
                    break;
                }
                h *= factor;
            },
        }
        steps += 1;
        if let Some(reason) = monitor.stop(&s, options) {
            stop = reason;
            samples.push(sample(&s));
            break;
        }
        if steps % options.sample_stride == 0 || steps == options.n_steps {
            samples.push(sample(&s));
        }
    }

    let diagnostics = diagnose(&samples, &state.masses, state.dim)?;
    Ok(Trajectory {
        samples,
        masses: state.masses.values().to_vec(),
        dim: state.dim,
        stop,
        steps,
        diagnostics,
    })
}

fn state_at(sample: &Sample, masses: &Masses, dim: usize) -> DynamicState {
    DynamicState {
        time: sample.time,
        dim,
        positions: sample.positions.clone(),
        velocities: sample.velocities.clone(),
        masses: masses.clone(),
    }
}

/// Largest relative change of any distance ratio `q_ij / q_kl` relative to
/// the first sample.
pub fn shape_deviation(samples: &[Sample]) -> f64 {
    let n = samples[0].positions.len();
    let dist = |s: &Sample| -> Vec<f64> { pairs(n).map(|p| (s.positions[p.i] - s.positions[p.j]).norm()).collect() };
    let d0 = dist(&samples[0]);
    let mut worst: f64 = 0.0;
    for s in &samples[1..] {
        let d = dist(s);
        for a in 0..d.len() {
            for b in 0..d.len() {
                if a == b {
                    continue;
                }
                let r0 = d0[a] / d0[b];
                worst = worst.max((d[a] / d[b] - r0).abs() / r0);
            }
        }
    }
    worst
}

/// Per-pair drift `max_t |L_ij(t) - L_ij(0)| / (|L_ij(0)| + eps)`, with
/// `eps` machine epsilon times the initial summed `|L_ij|`.
pub fn pair_momentum_drift(trajectory: &Trajectory) -> Result<PairTable<f64>> {
    let masses = Masses::new(trajectory.masses.clone())?;
    Ok(momentum_drift(&trajectory.samples, &masses, trajectory.dim))
}

fn momentum_drift(samples: &[Sample], masses: &Masses, dim: usize) -> PairTable<f64> {
    let l0 = state_at(&samples[0], masses, dim).pair_momenta();
    let floor = f64::EPSILON * l0.values().iter().map(|l| l.norm()).sum::<f64>();
    let mut drift = l0.map(|_, _| 0.0_f64);
    for s in &samples[1..] {
        let l = state_at(s, masses, dim).pair_momenta();
        for (p, v) in l.iter() {
            let base = l0.get(p.i, p.j);
            let num = (v - base).norm();
            if num == 0.0 {
                continue;
            }
            let den = base.norm() + floor;
            let rel = if den > 0.0 { num / den } else { f64::INFINITY };
            let slot = drift.get_mut(p.i, p.j);
            *slot = slot.max(rel);
        }
    }
    drift
}

/// Largest change of the unit vectors `(r_i - R) / |r_i - R|` over the
/// samples, skipping bodies that sit on the centre of mass.
pub fn direction_drift(samples: &[Sample], masses: &Masses) -> f64 {
    let com = |s: &Sample| -> Vec3 {
        s.positions
            .iter()
            .zip(masses.values())
            .map(|(r, m)| r * *m)
            .sum::<Vec3>()
            / masses.total()
    };
    let scale = {
        let s = &samples[0];
        let c = com(s);
        s.positions.iter().map(|r| (r - c).norm()).fold(0.0, f64::max)
    };
    let r0 = com(&samples[0]);
    let u0: Vec<Option<Vec3>> = samples[0]
        .positions
        .iter()
        .map(|r| {
            let d = r - r0;
            (d.norm() > 1e-9 * scale).then(|| d.normalize())
        })
        .collect();
    let mut worst: f64 = 0.0;
    for s in &samples[1..] {
        let c = com(s);
        for (r, u) in s.positions.iter().zip(&u0) {
            if let Some(u) = u {
                worst = worst.max(((r - c).normalize() - u).norm());
            }
        }
    }
    worst
}

fn diagnose(samples: &[Sample], masses: &Masses, dim: usize) -> Result<TrajectoryDiagnostics> {
    let first = state_at(&samples[0], masses, dim);
    let e0 = first.total_energy();
    let l0: Vec3 = first.pair_momenta().values().iter().sum();
    let mut energy_drift: f64 = 0.0;
    let mut kinetic_identity_gap: f64 = 0.0;
    let mut momentum_scale = l0.norm();
    let mut total_dev: f64 = 0.0;
    let mut lambda_history = Vec::with_capacity(samples.len());

    for s in samples {
        let st = state_at(s, masses, dim);
        energy_drift = energy_drift.max((st.total_energy() - e0).abs() / e0.abs());
        let (tp, ts) = (kinetic_energy_pairspace(&st), kinetic_energy_standard(&st));
        let gap = if ts > 0.0 { (tp - ts).abs() / ts } else { (tp - ts).abs() };
        kinetic_identity_gap = kinetic_identity_gap.max(gap);
        let l: Vec3 = st.pair_momenta().values().iter().sum();
        total_dev = total_dev.max((l - l0).norm());
        momentum_scale = momentum_scale.max(st.momentum_scale());
        if let Ok(config) = st.configuration() {
            if let Ok(fit) = lambda_fit(&config, masses) {
                lambda_history.push((s.time, fit.lambda));
            }
        }
    }
    let total_momentum_drift = if total_dev == 0.0 { 0.0 } else { total_dev / momentum_scale };
    let pair_momentum_drift = momentum_drift(samples, masses, dim);
    let max_pair_momentum_drift = pair_momentum_drift.values().iter().copied().fold(0.0, f64::max);
    Ok(TrajectoryDiagnostics {
        max_shape_deviation: shape_deviation(samples),
        pair_momentum_drift,
        max_pair_momentum_drift,
        total_momentum_drift,
        energy_drift,
        kinetic_identity_gap,
        lambda_history,
    })
}

fn require_central(config: &Configuration, masses: &Masses) -> Result<f64> {
    let fit = lambda_fit(config, masses)?;
    if !fit.is_central(DEFAULT_ORACLE_TOL) {
        return Err(Error::NotCentral {
            deviation: fit.max_relative_deviation,
        });
    }
    Ok(fit.lambda)
}

/// Velocities for uniform rotation of a planar central configuration about
/// its centre of mass at `omega = sqrt(lambda)`.
pub fn rigid_rotation_init(config: &Configuration, masses: &Masses) -> Result<DynamicState> {
    if config.positions().iter().any(|r| r.z != 0.0) {
        return Err(Error::NotPlanar(
            config.positions().iter().position(|r| r.z != 0.0).unwrap_or(0) + 1,
        ));
    }
    let lambda = require_central(config, masses)?;
    let omega = lambda.sqrt();
    let com = config.center_of_mass(masses);
    let velocities = config
        .positions()
        .iter()
        .map(|r| Vec3::z().cross(&(r - com)) * omega)
        .collect();
    DynamicState::new(config, velocities, masses.clone())
}

/// Period `2 pi / sqrt(lambda)` of the rigid rotation started by
/// [`rigid_rotation_init`].
pub fn rotation_period(config: &Configuration, masses: &Masses) -> Result<f64> {
    Ok(2.0 * std::f64::consts::PI / require_central(config, masses)?.sqrt())
}

/// Zero velocities: a central configuration then collapses homothetically.
pub fn homothetic_init(config: &Configuration, masses: &Masses) -> Result<DynamicState> {
    require_central(config, masses)?;
    DynamicState::new(config, vec![Vec3::zeros(); config.len()], masses.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// Two bodies on a circular orbit about their centre of mass.
    fn circular_pair(m1: f64, m2: f64, d: f64) -> (DynamicState, f64) {
        let masses = Masses::new(vec![m1, m2]).unwrap();
        let total = m1 + m2;
        let omega = (total / d.powi(3)).sqrt();
        let (r1, r2) = (d * m2 / total, d * m1 / total);
        let config = Configuration::planar(&[[r1, 0.0], [-r2, 0.0]]).unwrap();
        let vel = vec![Vec3::new(0.0, omega * r1, 0.0), Vec3::new(0.0, -omega * r2, 0.0)];
        (DynamicState::new(&config, vel, masses).unwrap(), 2.0 * PI / omega)
    }

    fn analytic(m1: f64, m2: f64, d: f64, t: f64) -> Vec3 {
        let omega = ((m1 + m2) / d.powi(3)).sqrt();
        let r1 = d * m2 / (m1 + m2);
        Vec3::new(r1 * (omega * t).cos(), r1 * (omega * t).sin(), 0.0)
    }

    fn max_position_error(steps: usize) -> f64 {
        let (m1, m2, d) = (1.0, 0.5, 1.3);
        let (state, period) = circular_pair(m1, m2, d);
        let traj = integrate(&state, &IntegrationOptions::rk4(period / steps as f64, steps).with_stride(steps / 50)).unwrap();
        traj.samples
            .iter()
            .map(|s| (s.positions[0] - analytic(m1, m2, d, s.time)).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn unit_pair_accelerations() {
        let m = Masses::new(vec![1.0, 1.0]).unwrap();
        let a = newtonian_accelerations(&[Vec3::zeros(), Vec3::x()], &m).unwrap();
        assert_relative_eq!(a[0].norm(), 1.0);
        assert_relative_eq!((a[0] + a[1]).norm(), 0.0);
        assert!(a[0].x > 0.0);
    }

    #[test]
    fn forces_balance() {
        let m = Masses::new(vec![1.0, 2.0, 0.3, 4.0]).unwrap();
        let pos = [
            Vec3::new(0.1, 0.2, -0.3),
            Vec3::new(1.0, -0.5, 0.2),
            Vec3::new(-0.7, 0.4, 1.1),
            Vec3::new(0.3, 1.5, 0.0),
        ];
        let a = newtonian_accelerations(&pos, &m).unwrap();
        let net: Vec3 = a.iter().zip(m.values()).map(|(a, m)| a * *m).sum();
        let scale: f64 = a.iter().zip(m.values()).map(|(a, m)| a.norm() * m).sum();
        assert!(net.norm() < 1e-13 * scale);
    }

    #[test]
    fn collision_is_reported() {
        let m = Masses::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            newtonian_accelerations(&[Vec3::x(), Vec3::x()], &m),
            Err(Error::Collision { .. })
        ));
    }

    #[test]
    fn kinetic_energy_identity() {
        let config = Configuration::spatial(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.2], [0.0, 1.0, -0.4], [0.5, 0.5, 1.0]]).unwrap();
        let m = Masses::new(vec![1.0, 2.0, 3.0, 0.5]).unwrap();
        let vel = vec![
            Vec3::new(0.3, -0.1, 0.7),
            Vec3::new(-1.0, 0.4, 0.0),
            Vec3::new(0.2, 0.2, -0.5),
            Vec3::new(0.0, 1.1, 0.3),
        ];
        let mut state = DynamicState::new(&config, vel, m).unwrap();
        assert_relative_eq!(
            kinetic_energy_pairspace(&state),
            kinetic_energy_standard(&state),
            max_relative = 1e-12
        );
        // a moving centre of mass is part of the identity too
        state.velocities[0] += Vec3::new(2.0, 0.0, 0.0);
        assert_relative_eq!(
            kinetic_energy_pairspace(&state),
            kinetic_energy_standard(&state),
            max_relative = 1e-12
        );
        state.velocities.iter_mut().for_each(|v| *v = Vec3::zeros());
        assert_eq!(kinetic_energy_pairspace(&state), 0.0);
        assert_eq!(kinetic_energy_standard(&state), 0.0);
        state.velocities[2] = Vec3::new(0.0, -2.0, 0.5);
        assert_relative_eq!(
            kinetic_energy_pairspace(&state),
            kinetic_energy_standard(&state),
            max_relative = 1e-12
        );
    }

    #[test]
    fn center_of_mass_frame() {
        let config = Configuration::planar(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let m = Masses::new(vec![1.0, 3.0]).unwrap();
        let s = DynamicState::new(&config, vec![Vec3::x(), Vec3::y()], m).unwrap();
        assert!(s.center_of_mass_velocity().norm() < 1e-16);
    }

    #[test]
    fn circular_orbit_accuracy() {
        let err = max_position_error(10_000);
        assert!(err < 1e-8, "position error {err}");
        let (state, period) = circular_pair(1.0, 0.5, 1.3);
        let traj = integrate(&state, &IntegrationOptions::rk4(period / 1e4, 10_000)).unwrap();
        assert!(traj.diagnostics.energy_drift < 1e-9);
        assert_eq!(traj.stop, StopReason::Completed);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let coarse = max_position_error(200);
        let fine = max_position_error(400);
        let ratio = coarse / fine;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn adaptive_matches_analytic() {
        let (m1, m2, d) = (1.0, 0.5, 1.3);
        let (state, period) = circular_pair(m1, m2, d);
        let opts = IntegrationOptions::adaptive(period / 100.0, 1_000_000, 1e-11);
        let mut traj = integrate(&state, &IntegrationOptions { n_steps: 5000, ..opts }).unwrap();
        traj.samples.retain(|s| s.time <= period);
        let err = traj
            .samples
            .iter()
            .map(|s| (s.positions[0] - analytic(m1, m2, d, s.time)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn non_central_rejected() {
        let c = Configuration::planar(&[[0.0, 0.0], [1.0, 0.1], [0.3, 1.2], [1.5, 1.7]]).unwrap();
        let m = Masses::new(vec![1.0, 2.0, 0.5, 1.2]).unwrap();
        assert!(matches!(rigid_rotation_init(&c, &m), Err(Error::NotCentral { .. })));
        assert!(matches!(homothetic_init(&c, &m), Err(Error::NotCentral { .. })));
    }

    #[test]
    fn total_pair_momentum_conserved_off_equilibrium() {
        let c = Configuration::planar(&[[0.0, 0.0], [1.0, 0.1], [0.3, 1.2], [1.5, 1.7]]).unwrap();
        let m = Masses::new(vec![1.0, 2.0, 0.5, 1.2]).unwrap();
        let vel = vec![Vec3::new(0.1, 0.3, 0.0), Vec3::new(-0.2, 0.1, 0.0), Vec3::new(0.4, -0.3, 0.0), Vec3::new(0.0, 0.2, 0.0)];
        let s = DynamicState::new(&c, vel, m).unwrap();
        let traj = integrate(&s, &IntegrationOptions::adaptive(1e-3, 4000, 1e-12).with_stride(20)).unwrap();
        let d = &traj.diagnostics;
        assert!(d.total_momentum_drift < 1e-9, "{}", d.total_momentum_drift);
        assert!(d.max_pair_momentum_drift > 1e-3);
        assert!(d.kinetic_identity_gap < 1e-12);
    }
}
