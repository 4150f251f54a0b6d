//! Centrality tests for Newtonian configurations.
//!
//! Two independent routes decide whether a configuration is central:
//!
//! * the pair-space residuals ([`cc_residuals_general`] for any `N`,
//!   [`cc_residuals_four`] for the six four-body equations), which never
//!   compute an acceleration, and
//! * the acceleration oracle [`lambda_fit`], which computes the Newtonian
//!   field directly and fits `a_i = -lambda (r_i - R)` by mass-weighted least
//!   squares.
//!
//! The mass-independent relations in [`dziobek_residuals`] are necessary
//! conditions only. [`classify`] is purely geometric.

use serde::Serialize;

use crate::dynamics::newtonian_accelerations;
use crate::error::{Error, Result};
use crate::pairspace::{pair_vectors, pairs, triplets, Configuration, DistanceSet, Masses, Pair, PairTable, Vec3};

/// Default bound on the normalized pair-space residual.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;
/// Default bound on the oracle's relative deviation.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-7;
/// Default relative tolerance for geometric classification.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-8;
/// Fraction of the largest acceleration below which a body's own
/// acceleration is not used as the deviation denominator.
pub const ACCELERATION_FLOOR: f64 = 1e-6;

/// One labelled equation of a residual report.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualEntry {
    pub label: String,
    /// `lhs - rhs` as a vector (only the normal component is nonzero for
    /// planar configurations).
    pub raw: Vec3,
    /// Normal component for planar input, vector norm otherwise.
    pub signed: f64,
    /// Sum of the magnitudes of the individual terms of the equation.
    pub term_scale: f64,
    pub normalized: f64,
    /// Set when every term vanishes and `normalized` falls back to `signed`.
    pub degenerate: bool,
}

impl ResidualEntry {
    fn new(label: String, raw: Vec3, term_scale: f64, planar: bool) -> Self {
        let signed = if planar { raw.z } else { raw.norm() };
        let degenerate = term_scale == 0.0;
        let normalized = if degenerate { signed } else { signed / term_scale };
        ResidualEntry {
            label,
            raw,
            signed,
            term_scale,
            normalized,
            degenerate,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    pub max_normalized: f64,
    /// All cross products vanish: the configuration is collinear and the
    /// residuals say nothing about centrality.
    pub vacuous: bool,
}

impl ResidualReport {
    fn from_entries(entries: Vec<ResidualEntry>, vacuous: bool) -> Self {
        let max_normalized = entries
            .iter()
            .map(|e| e.normalized.abs())
            .fold(0.0, f64::max);
        ResidualReport {
            entries,
            max_normalized,
            vacuous,
        }
    }

    pub fn is_central(&self, tol: f64) -> bool {
        !self.vacuous && self.max_normalized < tol
    }

    pub fn get(&self, label: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.label == label)
    }
}

fn ensure_distinct(indices: &[usize], n: usize) -> Result<()> {
    for (a, &i) in indices.iter().enumerate() {
        if i >= n {
            return Err(Error::Usage(format!("body index {} out of range", i + 1)));
        }
        if indices[..a].contains(&i) {
            return Err(Error::Usage("body indices must be distinct".into()));
        }
    }
    Ok(())
}

fn ensure_bodies(config: &Configuration, masses: &Masses) -> Result<()> {
    if config.len() != masses.len() {
        return Err(Error::MassCountMismatch {
            masses: masses.len(),
            bodies: config.len(),
        });
    }
    Ok(())
}

fn ensure_four(config: &Configuration) -> Result<()> {
    if config.len() != 4 {
        return Err(Error::BodyCount {
            expected: 4,
            got: config.len(),
        });
    }
    Ok(())
}

/// `F_ijk = G M (q_ij/q_ij^3 + q_jk/q_jk^3 + q_ki/q_ki^3)`
pub fn newtonian_f(config: &Configuration, masses: &Masses, triplet: [usize; 3]) -> Result<Vec3> {
    ensure_bodies(config, masses)?;
    ensure_distinct(&triplet, config.len())?;
    let [i, j, k] = triplet;
    let term = |a: usize, b: usize| {
        let q = config.pair_vector(a, b);
        q / q.norm().powi(3)
    };
    Ok(masses.g() * masses.total() * (term(i, j) + term(j, k) + term(k, i)))
}

/// `J_ij / mu_ij = sum_{k != i,j} (m_k / M) F_ijk`
pub fn j_over_mu(config: &Configuration, masses: &Masses, pair: (usize, usize)) -> Result<Vec3> {
    ensure_bodies(config, masses)?;
    let (i, j) = pair;
    ensure_distinct(&[i, j], config.len())?;
    let total = masses.total();
    let mut sum = Vec3::zeros();
    for k in (0..config.len()).filter(|&k| k != i && k != j) {
        sum += newtonian_f(config, masses, [i, j, k])? * (masses.values()[k] / total);
    }
    Ok(sum)
}

fn cross_vanishes(a: &Vec3, b: &Vec3) -> bool {
    a.cross(b).norm() <= 1e-12 * a.norm() * b.norm()
}

/// Pair-space centrality residual for every pair:
/// `sum_{k != i,j} m_k (q_ij x q_jk) (1/q_ik^3 - 1/q_jk^3)`.
pub fn cc_residuals_general(config: &Configuration, masses: &Masses) -> Result<ResidualReport> {
    ensure_bodies(config, masses)?;
    let n = config.len();
    if n < 3 {
        return Err(Error::BodyCount { expected: 3, got: n });
    }
    let q = pair_vectors(config);
    let planar = config.dim() == 2;
    let m = masses.values();
    let mut all_vanish = true;
    let entries = pairs(n)
        .map(|Pair { i, j }| {
            let qij = q.oriented(i, j);
            let mut raw = Vec3::zeros();
            let mut scale = 0.0;
            for k in (0..n).filter(|&k| k != i && k != j) {
                let qjk = q.oriented(j, k);
                let c = qij.cross(&qjk);
                if !cross_vanishes(&qij, &qjk) {
                    all_vanish = false;
                }
                let (pik, pjk) = (q.get(i, k).norm().powi(-3), q.get(j, k).norm().powi(-3));
                raw += c * (m[k] * (pik - pjk));
                scale += m[k] * c.norm() * (pik + pjk);
            }
            ResidualEntry::new(format!("cceq:{}{}", i + 1, j + 1), raw, scale, planar)
        })
        .collect();
    Ok(ResidualReport::from_entries(entries, all_vanish))
}

/// `m [p_a - p_b] X = m' [p_c - p_d] Y`, indices 1-based as written.
struct FourBodyEquation {
    label: &'static str,
    lhs_mass: usize,
    lhs_p: ((usize, usize), (usize, usize)),
    lhs_cross: ((usize, usize), (usize, usize)),
    rhs_mass: usize,
    rhs_p: ((usize, usize), (usize, usize)),
    rhs_cross: ((usize, usize), (usize, usize)),
}

const FOUR_BODY_EQUATIONS: [FourBodyEquation; 6] = [
    FourBodyEquation {
        label: "4cc:a",
        lhs_mass: 3,
        lhs_p: ((3, 1), (3, 2)),
        lhs_cross: ((2, 1), (3, 1)),
        rhs_mass: 4,
        rhs_p: ((4, 2), (4, 1)),
        rhs_cross: ((2, 1), (4, 1)),
    },
    FourBodyEquation {
        label: "4cc:b",
        lhs_mass: 2,
        lhs_p: ((2, 1), (3, 2)),
        lhs_cross: ((2, 1), (3, 1)),
        rhs_mass: 4,
        rhs_p: ((4, 3), (4, 1)),
        rhs_cross: ((4, 1), (3, 1)),
    },
    FourBodyEquation {
        label: "4cc:c",
        lhs_mass: 1,
        lhs_p: ((2, 1), (3, 1)),
        lhs_cross: ((2, 1), (3, 1)),
        rhs_mass: 4,
        rhs_p: ((4, 2), (4, 3)),
        rhs_cross: ((4, 2), (3, 2)),
    },
    FourBodyEquation {
        label: "4cc:d",
        lhs_mass: 2,
        lhs_p: ((4, 2), (2, 1)),
        lhs_cross: ((2, 1), (4, 1)),
        rhs_mass: 3,
        rhs_p: ((4, 3), (3, 1)),
        rhs_cross: ((4, 1), (3, 1)),
    },
    FourBodyEquation {
        label: "4cc:e",
        lhs_mass: 1,
        lhs_p: ((4, 1), (2, 1)),
        lhs_cross: ((2, 1), (4, 1)),
        rhs_mass: 3,
        rhs_p: ((2, 3), (4, 3)),
        rhs_cross: ((4, 2), (3, 2)),
    },
    FourBodyEquation {
        label: "4cc:f",
        lhs_mass: 1,
        lhs_p: ((4, 1), (3, 1)),
        lhs_cross: ((4, 1), (3, 1)),
        rhs_mass: 2,
        rhs_p: ((3, 2), (4, 2)),
        rhs_cross: ((4, 2), (3, 2)),
    },
];

/// The six four-body centrality equations, each reported as `lhs - rhs`.
///
/// The term scale expands both brackets, so an equation whose sides vanish
/// because distances coincide still normalizes to roundoff.
pub fn cc_residuals_four(config: &Configuration, masses: &Masses) -> Result<ResidualReport> {
    ensure_bodies(config, masses)?;
    ensure_four(config)?;
    let q = pair_vectors(config);
    let planar = config.dim() == 2;
    let m = masses.values();
    let qv = |(a, b): (usize, usize)| q.oriented(a - 1, b - 1);
    let p = |(a, b): (usize, usize)| q.get(a - 1, b - 1).norm().powi(-3);
    let cross = |(x, y): ((usize, usize), (usize, usize))| qv(x).cross(&qv(y));

    let entries = FOUR_BODY_EQUATIONS
        .iter()
        .map(|eq| {
            let (lm, rm) = (m[eq.lhs_mass - 1], m[eq.rhs_mass - 1]);
            let (lx, rx) = (cross(eq.lhs_cross), cross(eq.rhs_cross));
            let (la, lb) = (p(eq.lhs_p.0), p(eq.lhs_p.1));
            let (ra, rb) = (p(eq.rhs_p.0), p(eq.rhs_p.1));
            let raw = lx * (lm * (la - lb)) - rx * (rm * (ra - rb));
            let scale = lm * lx.norm() * (la + lb) + rm * rx.norm() * (ra + rb);
            ResidualEntry::new(eq.label.to_string(), raw, scale, planar)
        })
        .collect();

    let basis = [((2, 1), (3, 1)), ((2, 1), (4, 1)), ((4, 1), (3, 1)), ((4, 2), (3, 2))];
    let vacuous = basis.iter().all(|&(x, y)| cross_vanishes(&qv(x), &qv(y)));
    Ok(ResidualReport::from_entries(entries, vacuous))
}

/// Least-squares fit of `a_i = -lambda (r_i - R)`.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaFit {
    pub lambda: f64,
    pub max_relative_deviation: f64,
    pub per_body_deviation: Vec<f64>,
    pub center_of_mass: Vec3,
    pub accelerations: Vec<Vec3>,
}

impl LambdaFit {
    pub fn is_central(&self, tol: f64) -> bool {
        self.lambda > 0.0 && self.max_relative_deviation < tol
    }
}

/// Acceleration-based centrality oracle.
///
/// Computes the Newtonian accelerations directly and minimizes
/// `sum_i m_i |a_i + lambda (r_i - R)|^2` over `lambda`. Each body's
/// deviation is `|a_i + lambda (r_i - R)| / |a_i|`, with `|a_i|` floored at
/// [`ACCELERATION_FLOOR`] times the largest acceleration so that a body
/// resting on the centre of mass is judged against the system's scale.
pub fn lambda_fit(config: &Configuration, masses: &Masses) -> Result<LambdaFit> {
    ensure_bodies(config, masses)?;
    let accelerations = newtonian_accelerations(config.positions(), masses)?;
    let com = config.center_of_mass(masses);
    let m = masses.values();
    let offsets: Vec<Vec3> = config.positions().iter().map(|r| r - com).collect();

    let a_max = accelerations.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if a_max == 0.0 {
        return Err(Error::ZeroAcceleration);
    }
    let num: f64 = (0..m.len()).map(|i| m[i] * accelerations[i].dot(&offsets[i])).sum();
    let den: f64 = (0..m.len()).map(|i| m[i] * offsets[i].norm_squared()).sum();
    let lambda = -num / den;

    let per_body_deviation: Vec<f64> = accelerations
        .iter()
        .zip(&offsets)
        .map(|(a, d)| (a + d * lambda).norm() / a.norm().max(ACCELERATION_FLOOR * a_max))
        .collect();
    let max_relative_deviation = per_body_deviation.iter().copied().fold(0.0, f64::max);
    Ok(LambdaFit {
        lambda,
        max_relative_deviation,
        per_body_deviation,
        center_of_mass: com,
        accelerations,
    })
}

/// Labelled scalar residual of a mass-independent relation.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarResidual {
    pub label: String,
    pub raw: f64,
    pub term_scale: f64,
    pub normalized: f64,
    pub degenerate: bool,
}

impl ScalarResidual {
    pub(crate) fn new(label: &str, raw: f64, term_scale: f64) -> Self {
        let degenerate = term_scale == 0.0;
        ScalarResidual {
            label: label.to_string(),
            raw,
            term_scale,
            normalized: if degenerate { raw } else { raw / term_scale },
            degenerate,
        }
    }
}

/// `(p_a - p_b)(p_c - p_d)(p_e - p_f)` together with the sum of the
/// magnitudes of its eight expanded monomials.
fn product3(p: &impl Fn(usize, usize) -> f64, f: [((usize, usize), (usize, usize)); 3]) -> (f64, f64) {
    f.iter().fold((1.0, 1.0), |(v, s), &(a, b)| {
        let (pa, pb) = (p(a.0, a.1), p(b.0, b.1));
        (v * (pa - pb), s * (pa.abs() + pb.abs()))
    })
}

type Factors = [((usize, usize), (usize, usize)); 3];

const DZIOBEK: [(&str, Factors, Factors); 4] = [
    (
        "dziobek:a",
        [((1, 3), (2, 3)), ((2, 4), (3, 4)), ((1, 4), (1, 2))],
        [((2, 4), (1, 4)), ((1, 2), (1, 3)), ((2, 3), (3, 4))],
    ),
    (
        "dziobek:b",
        [((1, 2), (2, 3)), ((1, 3), (3, 4)), ((1, 4), (2, 4))],
        [((1, 2), (2, 4)), ((1, 3), (2, 3)), ((1, 4), (3, 4))],
    ),
    (
        "dziobek:c",
        [((1, 3), (1, 4)), ((2, 3), (1, 2)), ((3, 4), (2, 4))],
        [((1, 3), (1, 2)), ((2, 3), (2, 4)), ((3, 4), (1, 4))],
    ),
    (
        "dziobek:d",
        [((1, 4), (1, 3)), ((2, 4), (1, 2)), ((3, 4), (2, 3))],
        [((1, 4), (1, 2)), ((2, 4), (2, 3)), ((3, 4), (1, 3))],
    ),
];

/// The four mass-independent relations among `p_ij = q_ij^-3`, as
/// `lhs - rhs` normalized by the summed magnitudes of all expanded products.
pub fn dziobek_residuals(d: &DistanceSet) -> Result<[ScalarResidual; 4]> {
    if d.bodies() != 4 {
        return Err(Error::BodyCount {
            expected: 4,
            got: d.bodies(),
        });
    }
    let p = |a: usize, b: usize| d.p(a - 1, b - 1);
    Ok(DZIOBEK.map(|(label, lhs, rhs)| {
        let (l, ls) = product3(&p, lhs);
        let (r, rs) = product3(&p, rhs);
        ScalarResidual::new(label, l - r, ls + rs)
    }))
}

/// Per-pair angular momenta `L_ij = q_ij x mu_ij dq_ij/dt` and their sum.
#[derive(Clone, Debug, Serialize)]
pub struct PairMomenta {
    pub pairs: PairTable<Vec3>,
    pub total: Vec3,
}

pub fn pair_angular_momentum(config: &Configuration, velocities: &[Vec3], masses: &Masses) -> Result<PairMomenta> {
    ensure_bodies(config, masses)?;
    if velocities.len() != config.len() {
        return Err(Error::BodyCount {
            expected: config.len(),
            got: velocities.len(),
        });
    }
    let table = PairTable::from_fn(config.len(), |Pair { i, j }| {
        let q = config.pair_vector(i, j);
        let qdot = velocities[i] - velocities[j];
        q.cross(&qdot) * masses.pair_reduced(i, j)
    });
    let total = table.values().iter().sum();
    Ok(PairMomenta { pairs: table, total })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ShapeKind {
    Tetrahedral,
    Collinear,
    EquilateralCentered,
    KiteConvex,
    KiteConcave,
    Rhombus,
    IsoscelesTrapezium,
    PlanarOther,
    NonPlanarOther,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeClass {
    pub kind: ShapeKind,
    pub tol: f64,
    /// Matched distance equalities, 1-based (`"q12=q13"`).
    pub equalities: Vec<String>,
    /// For family shapes, the input bodies (1-based) playing the roles of the
    /// family's bodies 1..4.
    pub roles: Option<[usize; 4]>,
}

/// In-plane coordinates of a planar four-body configuration.
fn plane_coords(config: &Configuration) -> [[f64; 2]; 4] {
    let r = config.positions();
    let e1 = (r[1] - r[0]).normalize();
    let e2 = (1..4)
        .map(|k| {
            let v = r[k] - r[0];
            v - e1 * v.dot(&e1)
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .map(|v| v.normalize())
        .unwrap();
    let mut out = [[0.0; 2]; 4];
    for (k, o) in out.iter_mut().enumerate() {
        let v = r[k] - r[0];
        *o = [v.dot(&e1), v.dot(&e2)];
    }
    out
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(pts: &[[f64; 2]; 4], (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    let o1 = orient(pts[a], pts[b], pts[c]);
    let o2 = orient(pts[a], pts[b], pts[d]);
    let o3 = orient(pts[c], pts[d], pts[a]);
    let o4 = orient(pts[c], pts[d], pts[b]);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

const MATCHINGS: [((usize, usize), (usize, usize)); 3] = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];

/// Geometric shape class of a four-body configuration.
///
/// Distance equalities use the relative tolerance `tol * mean distance`.
pub fn classify(config: &Configuration, tol: f64) -> Result<ShapeClass> {
    ensure_four(config)?;
    let d = config.distances();
    let scale = config.mean_distance();
    let q = |a: usize, b: usize| d.q(a, b);
    let eq = |x: f64, y: f64| (x - y).abs() <= tol * scale;
    let label = |a: usize, b: usize, c: usize, e: usize| {
        let pa = Pair::new(a, b);
        let pb = Pair::new(c, e);
        format!("q{}=q{}", pa.label(), pb.label())
    };
    let class = |kind, equalities, roles| ShapeClass {
        kind,
        tol,
        equalities,
        roles,
    };

    let collinear = triplets(4).all(|[i, j, k]| {
        let (a, b) = (config.pair_vector(j, i), config.pair_vector(k, i));
        a.cross(&b).norm() <= tol * a.norm() * b.norm()
    });
    if collinear {
        return Ok(class(ShapeKind::Collinear, vec![], None));
    }

    let r = config.positions();
    let volume = (r[1] - r[0]).dot(&(r[2] - r[0]).cross(&(r[3] - r[0])));
    if volume.abs() > tol * scale.powi(3) {
        let all_equal = pairs(4).all(|p| eq(q(p.i, p.j), q(0, 1)));
        return Ok(if all_equal {
            let eqs = pairs(4).skip(1).map(|p| label(0, 1, p.i, p.j)).collect();
            class(ShapeKind::Tetrahedral, eqs, None)
        } else {
            class(ShapeKind::NonPlanarOther, vec![], None)
        });
    }

    let pts = plane_coords(config);

    for c in 0..4 {
        let t: Vec<usize> = (0..4).filter(|&k| k != c).collect();
        let (a, b, e) = (t[0], t[1], t[2]);
        if eq(q(a, b), q(a, e)) && eq(q(a, b), q(b, e)) && eq(q(c, a), q(c, b)) && eq(q(c, a), q(c, e)) {
            let eqs = vec![label(a, b, a, e), label(a, b, b, e), label(c, a, c, b), label(c, a, c, e)];
            return Ok(class(ShapeKind::EquilateralCentered, eqs, Some([a + 1, b + 1, e + 1, c + 1])));
        }
    }

    for &((a, c), (b, e)) in &MATCHINGS {
        // (a, c) and (b, e) as the diagonals; sides ab, bc, ce, ea
        let side = q(a, b);
        if eq(q(b, c), side) && eq(q(c, e), side) && eq(q(e, a), side) && segments_cross(&pts, (a, c), (b, e)) {
            let eqs = vec![label(a, b, b, c), label(a, b, c, e), label(a, b, e, a)];
            return Ok(class(ShapeKind::Rhombus, eqs, Some([a + 1, b + 1, e + 1, c + 1])));
        }
    }

    for apex in pairs(4) {
        let (a, e) = (apex.i, apex.j);
        let rest: Vec<usize> = (0..4).filter(|&k| k != a && k != e).collect();
        let (b, c) = (rest[0], rest[1]);
        if eq(q(a, b), q(a, c)) && eq(q(e, b), q(e, c)) {
            let side_a = orient(pts[b], pts[c], pts[a]);
            let side_e = orient(pts[b], pts[c], pts[e]);
            let kind = if side_a * side_e < 0.0 {
                ShapeKind::KiteConvex
            } else {
                ShapeKind::KiteConcave
            };
            let eqs = vec![label(a, b, a, c), label(e, b, e, c)];
            // the body nearer to the 2-3 base plays body 4 in the concave case
            let (one, four) = if kind == ShapeKind::KiteConcave && side_a.abs() < side_e.abs() {
                (e, a)
            } else {
                (a, e)
            };
            return Ok(class(kind, eqs, Some([one + 1, b + 1, c + 1, four + 1])));
        }
    }

    let equal_matching = |&((a, b), (c, e)): &((usize, usize), (usize, usize))| eq(q(a, b), q(c, e));
    let diagonals = MATCHINGS
        .iter()
        .find(|&&(x, y)| segments_cross(&pts, x, y));
    if let Some(diag) = diagonals {
        let sides: Vec<_> = MATCHINGS.iter().filter(|m| *m != diag).collect();
        let equal_sides: Vec<_> = sides.iter().filter(|m| equal_matching(m)).collect();
        if equal_matching(diag) && !equal_sides.is_empty() {
            let legs = *equal_sides[0];
            let bases = **sides.iter().find(|m| ***m != *legs).unwrap();
            let (long, short) = if q(bases.0 .0, bases.0 .1) >= q(bases.1 .0, bases.1 .1) {
                (bases.0, bases.1)
            } else {
                (bases.1, bases.0)
            };
            let one = long.0;
            let four = long.1;
            let leg_of = |x: usize| {
                if Pair::new(legs.0 .0, legs.0 .1).contains(x) {
                    legs.0
                } else {
                    legs.1
                }
            };
            let l = leg_of(one);
            let two = if l.0 == one { l.1 } else { l.0 };
            let three = if short.0 == two { short.1 } else { short.0 };
            let eqs = vec![
                label(legs.0 .0, legs.0 .1, legs.1 .0, legs.1 .1),
                label(diag.0 .0, diag.0 .1, diag.1 .0, diag.1 .1),
            ];
            return Ok(class(
                ShapeKind::IsoscelesTrapezium,
                eqs,
                Some([one + 1, two + 1, three + 1, four + 1]),
            ));
        }
    }

    Ok(class(ShapeKind::PlanarOther, vec![], None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tetrahedron(edge: f64) -> Configuration {
        let s = edge / (2.0 * 2f64.sqrt());
        Configuration::spatial(&[[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]).unwrap()
    }

    fn centered_equilateral(side: f64) -> Configuration {
        let rad = side / 3f64.sqrt();
        let pt = |k: f64| {
            let t = std::f64::consts::FRAC_PI_2 + k * 2.0 * std::f64::consts::PI / 3.0;
            [rad * t.cos(), rad * t.sin()]
        };
        Configuration::planar(&[pt(0.0), pt(1.0), pt(2.0), [0.0, 0.0]]).unwrap()
    }

    #[test]
    fn f_vanishes_on_equilateral_triangles() {
        let m = Masses::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let c = centered_equilateral(1.3);
        assert!(newtonian_f(&c, &m, [0, 1, 2]).unwrap().norm() < 1e-13);
        let t = tetrahedron(0.8);
        for tri in triplets(4) {
            assert!(newtonian_f(&t, &m, tri).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn f_on_centered_triplet() {
        let m = Masses::new(vec![1.0, 1.0, 1.0, 2.5]).unwrap();
        let side = 1.7;
        let c = centered_equilateral(side);
        let q12 = c.pair_vector(0, 1);
        let expected = q12 * (m.g() * m.total() / side.powi(3) * (1.0 - 3f64.powf(1.5)));
        let got = newtonian_f(&c, &m, [0, 1, 3]).unwrap();
        assert!((got - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn j_over_mu_closed_forms() {
        let (m1, m4, side) = (1.3, 0.6, 1.1);
        let m = Masses::new(vec![m1, m1, m1, m4]).unwrap();
        let c = centered_equilateral(side);
        let k = 1.0 - 3f64.powf(1.5);
        let j12 = j_over_mu(&c, &m, (0, 1)).unwrap();
        let e12 = c.pair_vector(0, 1) * (m4 / side.powi(3) * k);
        assert!((j12 - e12).norm() < 1e-12 * e12.norm());
        let j14 = j_over_mu(&c, &m, (0, 3)).unwrap();
        let e14 = c.pair_vector(0, 3) * (-3.0 * m1 / side.powi(3) * k);
        assert!((j14 - e14).norm() < 1e-12 * e14.norm());
        // antisymmetry
        let j21 = j_over_mu(&c, &m, (1, 0)).unwrap();
        assert!((j21 + j12).norm() < 1e-14 * j12.norm());

        let t = tetrahedron(1.0);
        for p in pairs(4) {
            assert!(j_over_mu(&t, &m, (p.i, p.j)).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn simplex_residuals_vanish() {
        let m = Masses::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let t = tetrahedron(2.0);
        let four = cc_residuals_four(&t, &m).unwrap();
        assert!(four.max_normalized < 1e-14, "{}", four.max_normalized);
        assert_eq!(four.entries.len(), 6);
        let general = cc_residuals_general(&t, &m).unwrap();
        assert!(general.max_normalized < 1e-14);
        assert!(!general.vacuous);

        let tri = Configuration::planar(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.75f64.sqrt()]]).unwrap();
        let m3 = Masses::new(vec![1.0, 5.0, 0.2]).unwrap();
        assert!(cc_residuals_general(&tri, &m3).unwrap().max_normalized < 1e-14);
    }

    #[test]
    fn collinear_is_vacuous() {
        let c = Configuration::planar(&[[0.0, 0.0], [1.0, 0.0], [2.5, 0.0], [-3.0, 0.0]]).unwrap();
        let m = Masses::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let g = cc_residuals_general(&c, &m).unwrap();
        assert!(g.vacuous);
        assert_eq!(g.max_normalized, 0.0);
        let f = cc_residuals_four(&c, &m).unwrap();
        assert!(f.vacuous);
        assert!(!f.is_central(DEFAULT_RESIDUAL_TOL));
    }

    #[test]
    fn centered_equilateral_residuals() {
        for m4 in [0.01, 1.0, 10.0] {
            let m = Masses::new(vec![2.0, 2.0, 2.0, m4]).unwrap();
            let c = centered_equilateral(1.0);
            let r = cc_residuals_four(&c, &m).unwrap();
            assert!(r.max_normalized < 1e-12);
            assert!(lambda_fit(&c, &m).unwrap().is_central(DEFAULT_ORACLE_TOL));
        }
    }

    #[test]
    fn four_body_equations_match_general_form() {
        // 4cc:a is the pair (1,2) equation of the general form.
        let c = Configuration::planar(&[[0.1, 0.2], [1.4, -0.3], [0.7, 1.6], [-0.8, 0.9]]).unwrap();
        let m = Masses::new(vec![1.0, 0.5, 2.0, 1.5]).unwrap();
        let four = cc_residuals_four(&c, &m).unwrap();
        let general = cc_residuals_general(&c, &m).unwrap();
        let a = four.get("4cc:a").unwrap();
        let g12 = general.get("cceq:12").unwrap();
        assert_relative_eq!(a.raw.z, g12.raw.z, max_relative = 1e-12);
    }

    #[test]
    fn lambda_two_body() {
        let c = Configuration::planar(&[[0.0, 0.0], [2.0, 0.0]]).unwrap();
        let m = Masses::with_g(vec![3.0, 1.0], 0.5).unwrap();
        let fit = lambda_fit(&c, &m).unwrap();
        assert_relative_eq!(fit.lambda, 0.5 * 4.0 / 8.0, max_relative = 1e-14);
        assert!(fit.max_relative_deviation < 1e-14);
    }

    #[test]
    fn lambda_tetrahedron_and_centered() {
        let m = Masses::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let fit = lambda_fit(&tetrahedron(2.0), &m).unwrap();
        assert_relative_eq!(fit.lambda, 10.0 / 8.0, max_relative = 1e-13);
        let (mm, m4, side) = (0.7, 3.0, 1.5);
        let ms = Masses::new(vec![mm, mm, mm, m4]).unwrap();
        let fit = lambda_fit(&centered_equilateral(side), &ms).unwrap();
        let expected = (3.0 * mm + 3f64.powf(1.5) * m4) / side.powi(3);
        assert_relative_eq!(fit.lambda, expected, max_relative = 1e-13);
    }

    #[test]
    fn random_config_is_not_central() {
        let c = Configuration::planar(&[[0.0, 0.0], [1.0, 0.1], [0.3, 1.2], [1.5, 1.7]]).unwrap();
        let m = Masses::new(vec![1.0, 2.0, 0.5, 1.2]).unwrap();
        assert!(lambda_fit(&c, &m).unwrap().max_relative_deviation > 1e-3);
        assert!(cc_residuals_general(&c, &m).unwrap().max_normalized > 1e-3);
        assert!(cc_residuals_four(&c, &m).unwrap().max_normalized > 1e-3);
    }

    #[test]
    fn dziobek_equal_distances() {
        let d = DistanceSet::four([2.0; 6]).unwrap();
        for r in dziobek_residuals(&d).unwrap() {
            assert_eq!(r.raw, 0.0);
            assert!(r.normalized.abs() < 1e-15);
        }
    }

    #[test]
    fn dziobek_with_equilateral_triple() {
        // p12 = p13 = p23: (a)-(c) vanish term by term and the two products in
        // (d) are the same product, so (d) vanishes as well.
        let d = DistanceSet::four([1.0, 1.0, 0.5, 1.0, 0.8, 1.3]).unwrap();
        let r = dziobek_residuals(&d).unwrap();
        for e in &r {
            assert!(e.normalized.abs() < 1e-15, "{}: {}", e.label, e.normalized);
        }
    }

    #[test]
    fn dziobek_kite_distances() {
        let d = DistanceSet::four([1.0, 1.0, 1.9, 1.3, 0.7, 0.7]).unwrap();
        for r in dziobek_residuals(&d).unwrap() {
            assert!(r.normalized.abs() < 1e-15, "{}", r.label);
        }
    }

    #[test]
    fn pair_momenta() {
        let c = Configuration::planar(&[[1.0, 0.0], [-1.0, 0.5], [0.2, -1.3], [0.4, 0.9]]).unwrap();
        let m = Masses::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let zero = pair_angular_momentum(&c, &[Vec3::zeros(); 4], &m).unwrap();
        assert!(zero.total.norm() == 0.0);
        let omega = 0.8;
        let vel: Vec<Vec3> = c.positions().iter().map(|_| Vec3::z() * omega).zip(c.positions()).map(|(w, r)| w.cross(r)).collect();
        let l = pair_angular_momentum(&c, &vel, &m).unwrap();
        for (p, v) in l.pairs.iter() {
            let expected = m.pair_reduced(p.i, p.j) * omega * c.distance(p.i, p.j).powi(2);
            assert_relative_eq!(v.z, expected, max_relative = 1e-13);
        }
        // total pair momentum equals the usual angular momentum about the centre of mass
        let com = c.center_of_mass(&m);
        let usual: Vec3 = (0..4).map(|i| (c.position(i) - com).cross(&vel[i]) * m.values()[i]).sum();
        assert_relative_eq!(l.total.z, usual.z, max_relative = 1e-13);
    }

    #[test]
    fn classify_basic_shapes() {
        let square = Configuration::planar(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert_eq!(classify(&square, DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::Rhombus);
        let line = Configuration::planar(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0], [-2.0, 0.0]]).unwrap();
        assert_eq!(classify(&line, DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::Collinear);
        assert_eq!(classify(&tetrahedron(1.0), DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::Tetrahedral);
        let ce = classify(&centered_equilateral(1.0), DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(ce.kind, ShapeKind::EquilateralCentered);
        assert_eq!(ce.roles, Some([1, 2, 3, 4]));
        let generic = Configuration::planar(&[[0.0, 0.0], [1.0, 0.1], [0.3, 1.2], [1.5, 1.7]]).unwrap();
        assert_eq!(classify(&generic, DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::PlanarOther);
        let skew = Configuration::spatial(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(classify(&skew, DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::NonPlanarOther);
        let parallelogram = Configuration::planar(&[[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [0.5, 1.0]]).unwrap();
        assert_eq!(classify(&parallelogram, DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::PlanarOther);
    }

    #[test]
    fn classify_is_label_invariant_for_kites() {
        let kite = Configuration::planar(&[[0.0, 1.0], [-0.6, 0.0], [0.6, 0.0], [0.0, -0.4]]).unwrap();
        let k = classify(&kite, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(k.kind, ShapeKind::KiteConvex);
        let shuffled = kite.relabeled(&[2, 3, 0, 1]).unwrap();
        assert_eq!(classify(&shuffled, DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::KiteConvex);
        let concave = Configuration::planar(&[[0.0, 1.0], [-0.6, 0.0], [0.6, 0.0], [0.0, 0.3]]).unwrap();
        let k = classify(&concave, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(k.kind, ShapeKind::KiteConcave);
        assert_eq!(k.roles, Some([1, 2, 3, 4]));
    }
}
