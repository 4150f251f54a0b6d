//! Closed-form four-body central configurations: the regular tetrahedron,
//! the centred equilateral triangle, convex and concave kites, the rhombus
//! and the isosceles trapezium.
//!
//! Angles are in radians. Kites have their symmetry axis through bodies 1
//! and 4; `alpha` is the angle between `q12` and `q23`, `beta` the angle
//! between `q42` and `q23`. For the trapezium, bodies 1 and 4 span the long
//! base, `alpha` is the base angle at 1 and 4 and `beta` the angle 2-1-3.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::centrality::{lambda_fit, ScalarResidual};
use crate::error::{Error, Result};
use crate::pairspace::{Configuration, DistanceSet, Masses, Vec3};

/// Bracket ends are pulled this far inside the admissible interval.
pub const BRACKET_SHRINK: f64 = 1e-9;
/// Margin applied to every strict region inequality so that boundary points
/// given in degrees are excluded despite rounding.
pub const REGION_MARGIN: f64 = 1e-12;
/// Sign-change scan resolution used before bisection.
pub const ROOT_SCAN_POINTS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyKind {
    Tetrahedron,
    EquilateralCentered,
    KiteConvex,
    KiteConcave,
    Rhombus,
    IsoscelesTrapezium,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::Tetrahedron,
        FamilyKind::EquilateralCentered,
        FamilyKind::KiteConvex,
        FamilyKind::KiteConcave,
        FamilyKind::Rhombus,
        FamilyKind::IsoscelesTrapezium,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Tetrahedron => "tetrahedron",
            FamilyKind::EquilateralCentered => "equilateral",
            FamilyKind::KiteConvex => "kite-convex",
            FamilyKind::KiteConcave => "kite-concave",
            FamilyKind::Rhombus => "rhombus",
            FamilyKind::IsoscelesTrapezium => "trapezium",
        }
    }

    /// Admissibility of `(alpha, beta)`; `beta` is ignored by the
    /// one-parameter families and the two angle-free families admit nothing.
    pub fn region(self, alpha: f64, beta: f64) -> bool {
        match self {
            FamilyKind::KiteConvex => kite_convex_region(alpha, beta),
            FamilyKind::KiteConcave => kite_concave_region(alpha, beta),
            FamilyKind::Rhombus => rhombus_region(alpha),
            FamilyKind::IsoscelesTrapezium => trapezium_region(alpha, beta),
            FamilyKind::Tetrahedron | FamilyKind::EquilateralCentered => false,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        let kind = match key.as_str() {
            "tetrahedron" | "tetrahedral" => FamilyKind::Tetrahedron,
            "equilateral" | "equilateral-centered" | "centered-equilateral" => FamilyKind::EquilateralCentered,
            "kite-convex" | "convex-kite" | "kite" => FamilyKind::KiteConvex,
            "kite-concave" | "concave-kite" => FamilyKind::KiteConcave,
            "rhombus" | "square" => FamilyKind::Rhombus,
            "trapezium" | "trapezoid" | "isosceles-trapezium" => FamilyKind::IsoscelesTrapezium,
            _ => {
                return Err(Error::Usage(format!(
                    "unknown family '{s}' (expected one of: {})",
                    FamilyKind::ALL.map(|k| k.name()).join(", ")
                )))
            }
        };
        Ok(kind)
    }
}

/// An angle-parametrized family member with its masses.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyShape {
    pub kind: FamilyKind,
    pub alpha: f64,
    pub beta: f64,
    /// Length of `q12`.
    pub scale: f64,
    /// `m1/m2`, `m4/m2` for kites and the rhombus; `m2/m1` for the trapezium.
    pub mass_ratios: BTreeMap<String, f64>,
    /// Bodies 1 and 4 swapped relative to the canonical concave kite.
    pub mirrored: bool,
}

impl FamilyShape {
    pub fn kite_convex(alpha: f64, beta: f64, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        let (r1, r4) = kite_convex_mass_ratios(alpha, beta)?;
        Ok(Self::kite(FamilyKind::KiteConvex, alpha, beta, scale, r1, r4, false))
    }

    /// Either ordering of the angles is accepted; `beta > alpha` is the
    /// mirror image with bodies 1 and 4 exchanged.
    pub fn kite_concave(alpha: f64, beta: f64, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        let mirrored = beta > alpha;
        let (a, b) = if mirrored { (beta, alpha) } else { (alpha, beta) };
        let (r1, r4) = kite_concave_mass_ratios(a, b)?;
        let (r1, r4) = if mirrored { (r4, r1) } else { (r1, r4) };
        Ok(Self::kite(FamilyKind::KiteConcave, alpha, beta, scale, r1, r4, mirrored))
    }

    pub fn rhombus(alpha: f64, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        let t = rhombus_ratio(alpha)?;
        Ok(Self::kite(FamilyKind::Rhombus, alpha, alpha, scale, t, t, false))
    }

    /// The trapezium with base angle `alpha`; `beta` is solved for.
    pub fn trapezium(alpha: f64, scale: f64) -> Result<Self> {
        let beta = trapezium_beta(alpha)?;
        Self::trapezium_at(alpha, beta, scale)
    }

    /// Trapezium at explicit angles. Off-curve angles are accepted here; see
    /// [`trapezium_mass_ratio`].
    pub fn trapezium_at(alpha: f64, beta: f64, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        let ratio = trapezium_mass_ratio(alpha, beta)?;
        Ok(FamilyShape {
            kind: FamilyKind::IsoscelesTrapezium,
            alpha,
            beta,
            scale,
            mass_ratios: BTreeMap::from([("m2/m1".to_string(), ratio.value)]),
            mirrored: false,
        })
    }

    fn kite(kind: FamilyKind, alpha: f64, beta: f64, scale: f64, r1: f64, r4: f64, mirrored: bool) -> Self {
        FamilyShape {
            kind,
            alpha,
            beta,
            scale,
            mass_ratios: BTreeMap::from([("m1/m2".to_string(), r1), ("m4/m2".to_string(), r4)]),
            mirrored,
        }
    }

    pub fn ratio(&self, key: &str) -> Option<f64> {
        self.mass_ratios.get(key).copied()
    }

    /// Masses normalized so that the reference body (2 for kites, 1 for the
    /// trapezium) has unit mass.
    pub fn masses(&self) -> Result<Masses> {
        match self.kind {
            FamilyKind::IsoscelesTrapezium => {
                let r = self.mass_ratios["m2/m1"];
                Masses::new(vec![1.0, r, r, 1.0])
            }
            _ => {
                let (r1, r4) = (self.mass_ratios["m1/m2"], self.mass_ratios["m4/m2"]);
                Masses::new(vec![r1, 1.0, 1.0, r4])
            }
        }
    }

    pub fn configuration(&self) -> Result<Configuration> {
        match self.kind {
            FamilyKind::IsoscelesTrapezium => trapezium_coordinates(self.alpha, self.beta, self.scale),
            _ => kite_coordinates(self),
        }
    }

    pub fn trapezium_shape(&self) -> Option<TrapeziumShape> {
        (self.kind == FamilyKind::IsoscelesTrapezium).then(|| TrapeziumShape::new(self.alpha, self.beta, self.scale))
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("scale > 0 (got {scale})")))
    }
}

/// Heights of an isosceles trapezium; `h1` spans the two bases, `h2` is the
/// distance from body 2 to the diagonal 1-3.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrapeziumShape {
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
    pub h1: f64,
    pub h2: f64,
}

impl TrapeziumShape {
    pub fn new(alpha: f64, beta: f64, scale: f64) -> Self {
        TrapeziumShape {
            alpha,
            beta,
            scale,
            h1: scale * alpha.sin(),
            h2: scale * beta.sin(),
        }
    }
}

/// Regular tetrahedron with edge `edge`, centroid at the origin.
pub fn build_tetrahedron(edge: f64) -> Result<Configuration> {
    check_scale(edge)?;
    let s = edge / (2.0 * 2f64.sqrt());
    Configuration::spatial(&[[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]])
}

/// Equilateral triangle of side `side` (bodies 1-3, mass `m` each) with body
/// 4 of mass `m4` at its centre.
pub fn build_equilateral_centered(m: f64, m4: f64, side: f64) -> Result<(Configuration, Masses)> {
    check_scale(side)?;
    let masses = Masses::new(vec![m, m, m, m4])?;
    let r = side / 3f64.sqrt();
    let vertex = |k: f64| {
        let t = FRAC_PI_2 + k * 2.0 * PI / 3.0;
        [r * t.cos(), r * t.sin()]
    };
    let config = Configuration::planar(&[vertex(0.0), vertex(1.0), vertex(2.0), [0.0, 0.0]])?;
    Ok((config, masses))
}

fn lt(x: f64, bound: f64) -> bool {
    x < bound - REGION_MARGIN
}

fn gt(x: f64, bound: f64) -> bool {
    x > bound + REGION_MARGIN
}

/// First violated constraint of a strict inequality list.
fn first_violation(checks: &[(bool, &str)]) -> Option<String> {
    checks.iter().find(|(ok, _)| !ok).map(|(_, c)| c.to_string())
}

fn convex_constraints(alpha: f64, beta: f64) -> [(bool, &'static str); 6] {
    [
        (gt(alpha, 0.0), "alpha > 0"),
        (gt(beta, 0.0), "beta > 0"),
        (lt(alpha, FRAC_PI_3), "alpha < pi/3"),
        (lt(beta, FRAC_PI_3), "beta < pi/3"),
        (gt(alpha + 2.0 * beta, FRAC_PI_2), "alpha + 2*beta > pi/2"),
        (gt(beta + 2.0 * alpha, FRAC_PI_2), "beta + 2*alpha > pi/2"),
    ]
}

pub fn kite_convex_region(alpha: f64, beta: f64) -> bool {
    convex_constraints(alpha, beta).iter().all(|(ok, _)| *ok)
}

/// `(m1/m2, m4/m2)` for a convex kite, without the region check.
pub fn kite_convex_ratios_raw(alpha: f64, beta: f64) -> (f64, f64) {
    let one = |a: f64, b: f64| {
        let s = (a + b).sin();
        b.sin() * s * s * (8.0 * b.cos().powi(3) - 1.0) / (4.0 * a.cos().powi(2) * (s.powi(3) - b.cos().powi(3)))
    };
    (one(alpha, beta), one(beta, alpha))
}

pub fn kite_convex_mass_ratios(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    const SINGULAR: f64 = 1e-9;
    if (alpha - FRAC_PI_6).abs() < SINGULAR && (beta - FRAC_PI_6).abs() < SINGULAR {
        return Err(Error::domain(
            "(alpha, beta) != (pi/6, pi/6); that point is the excluded singular corner where both diagonal boundaries meet and m2 vanishes",
        ));
    }
    if let Some(c) = first_violation(&convex_constraints(alpha, beta)) {
        return Err(Error::domain(c));
    }
    Ok(kite_convex_ratios_raw(alpha, beta))
}

/// Constraints for the `alpha > beta` branch.
fn concave_constraints(alpha: f64, beta: f64) -> Vec<(bool, &'static str)> {
    let mut c = vec![
        (gt(beta, 0.0), "beta > 0"),
        (lt(alpha, FRAC_PI_2), "alpha < pi/2"),
        (lt(beta, FRAC_PI_3), "beta < pi/3"),
        ((alpha - FRAC_PI_3).abs() > REGION_MARGIN, "alpha != pi/3"),
    ];
    if alpha < FRAC_PI_3 {
        c.push((gt(2.0 * alpha - beta, FRAC_PI_2), "2*alpha - beta > pi/2 (when alpha < pi/3)"));
    } else {
        c.push((lt(2.0 * alpha - beta, FRAC_PI_2), "2*alpha - beta < pi/2 (when alpha > pi/3)"));
    }
    c
}

/// Concave-kite admissibility. `beta > alpha` is tested through the mirror
/// image.
pub fn kite_concave_region(alpha: f64, beta: f64) -> bool {
    if alpha == beta {
        return false;
    }
    let (a, b) = if beta > alpha { (beta, alpha) } else { (alpha, beta) };
    concave_constraints(a, b).iter().all(|(ok, _)| *ok)
}

/// `(m1/m2, m4/m2)` for a concave kite with body 4 inside triangle 123,
/// without the region check.
pub fn kite_concave_ratios_raw(alpha: f64, beta: f64) -> (f64, f64) {
    let s = (alpha - beta).sin();
    let s2 = s * s;
    let (ca3, cb3) = (alpha.cos().powi(3), beta.cos().powi(3));
    let r1 = beta.sin() * s2 * (1.0 - 8.0 * cb3) / (4.0 * alpha.cos().powi(2) * (s.powi(3) - cb3));
    let r4 = alpha.sin() * s2 * (8.0 * ca3 - 1.0) / (4.0 * beta.cos().powi(2) * (s.powi(3) - ca3));
    (r1, r4)
}

/// Requires `alpha > beta`; use [`FamilyShape::kite_concave`] for the
/// mirror case.
pub fn kite_concave_mass_ratios(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if alpha == beta {
        return Err(Error::Degenerate("alpha = beta places bodies 1 and 4 at the same point".into()));
    }
    if beta > alpha {
        return Err(Error::domain("alpha > beta (swap the angles for the mirrored kite)"));
    }
    if let Some(c) = first_violation(&concave_constraints(alpha, beta)) {
        return Err(Error::domain(c));
    }
    Ok(kite_concave_ratios_raw(alpha, beta))
}

/// Planar coordinates of a kite or rhombus: bodies 2 and 3 on the x axis,
/// the symmetry axis along y.
pub fn kite_coordinates(shape: &FamilyShape) -> Result<Configuration> {
    check_scale(shape.scale)?;
    let s = shape.scale;
    let (alpha, beta) = match shape.kind {
        FamilyKind::KiteConvex => {
            kite_convex_mass_ratios(shape.alpha, shape.beta)?;
            (shape.alpha, shape.beta)
        }
        FamilyKind::Rhombus => {
            rhombus_ratio(shape.alpha)?;
            (shape.alpha, shape.alpha)
        }
        FamilyKind::KiteConcave => {
            let (a, b) = if shape.beta > shape.alpha {
                (shape.beta, shape.alpha)
            } else {
                (shape.alpha, shape.beta)
            };
            kite_concave_mass_ratios(a, b)?;
            (a, b)
        }
        other => return Err(Error::Usage(format!("{other} is not a kite family"))),
    };
    let c = s * alpha.cos();
    let apex = s * alpha.sin();
    let y4 = if shape.kind == FamilyKind::KiteConcave {
        c * beta.tan()
    } else {
        -c * beta.tan()
    };
    let mut pts = [[0.0, apex], [-c, 0.0], [c, 0.0], [0.0, y4]];
    if shape.kind == FamilyKind::KiteConcave && shape.beta > shape.alpha {
        pts.swap(0, 3);
    }
    Configuration::planar(&pts)
}

pub fn rhombus_region(alpha: f64) -> bool {
    gt(alpha, FRAC_PI_6) && lt(alpha, FRAC_PI_3)
}

/// `[1 - 1/(8 cos^3 a)] / [1 - 1/(8 sin^3 a)]` without the interval check.
pub fn rhombus_ratio_raw(alpha: f64) -> f64 {
    (1.0 - 1.0 / (8.0 * alpha.cos().powi(3))) / (1.0 - 1.0 / (8.0 * alpha.sin().powi(3)))
}

/// `m1/m2 = m4/m2` of the rhombus with half-angle `alpha`; strictly
/// decreasing from infinity at pi/6 to zero at pi/3.
pub fn rhombus_ratio(alpha: f64) -> Result<f64> {
    if !(alpha > FRAC_PI_6) {
        return Err(Error::domain("alpha > pi/6"));
    }
    if !(alpha < FRAC_PI_3) {
        return Err(Error::domain("alpha < pi/3"));
    }
    Ok(rhombus_ratio_raw(alpha))
}

/// Inverse of [`rhombus_ratio`].
pub fn rhombus_angle(ratio: f64) -> Result<f64> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::domain(format!("ratio > 0 (got {ratio})")));
    }
    if ratio == 1.0 {
        return Ok(PI / 4.0);
    }
    // f decreases, so f - ratio goes from + to -
    bisect(|a| rhombus_ratio_raw(a) - ratio, FRAC_PI_6, FRAC_PI_3, 1e-15)
}

/// Bisection on a bracket with a sign change; `tol` bounds the final
/// bracket width.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol || m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn trapezium_constraints(alpha: f64, beta: f64) -> [(bool, &'static str); 6] {
    [
        (gt(alpha, FRAC_PI_3), "alpha > pi/3"),
        (lt(alpha, FRAC_PI_2), "alpha < pi/2"),
        (gt(beta, 0.0), "beta > 0"),
        (lt(beta, alpha / 2.0), "beta < alpha/2"),
        (lt(beta, 3.0 * alpha - PI), "beta < 3*alpha - pi"),
        (gt(beta, (3.0 * alpha - PI) / 2.0), "beta > (3*alpha - pi)/2"),
    ]
}

pub fn trapezium_region(alpha: f64, beta: f64) -> bool {
    trapezium_constraints(alpha, beta).iter().all(|(ok, _)| *ok)
}

/// Open admissible `beta` interval for base angle `alpha`, if non-empty.
pub fn trapezium_beta_interval(alpha: f64) -> Option<(f64, f64)> {
    if !(alpha > FRAC_PI_3 && alpha < FRAC_PI_2) {
        return None;
    }
    let lo = ((3.0 * alpha - PI) / 2.0).max(0.0);
    let hi = (alpha / 2.0).min(3.0 * alpha - PI);
    (hi > lo).then_some((lo, hi))
}

fn sin3(x: f64) -> f64 {
    x.sin().powi(3)
}

/// The two sides of the trapezium angle equation:
/// `[S(a) - S(2a-b)] / [S(a) - S(b)]` and
/// `[S(2a-b) - S(a-b)] / [S(a-b) - S(b)]` with `S = sin^3`.
pub fn trapezium_equation_sides(alpha: f64, beta: f64) -> (f64, f64) {
    let (sa, s2, s1, sb) = (sin3(alpha), sin3(2.0 * alpha - beta), sin3(alpha - beta), sin3(beta));
    ((sa - s2) / (sa - sb), (s2 - s1) / (s1 - sb))
}

/// Left minus right side of the trapezium angle equation.
pub fn trapezium_residual(alpha: f64, beta: f64) -> f64 {
    let (l, r) = trapezium_equation_sides(alpha, beta);
    l - r
}

/// `m2/m1` computed from each side of the angle equation; the two agree on
/// the solution curve.
pub fn trapezium_ratios_raw(alpha: f64, beta: f64) -> (f64, f64) {
    let pre = (beta.sin() / (2.0 * alpha - beta).sin()).powi(2);
    let (l, r) = trapezium_equation_sides(alpha, beta);
    (pre * l, pre * r)
}

/// The unique `beta` solving the angle equation for base angle `alpha`.
pub fn trapezium_beta(alpha: f64) -> Result<f64> {
    if let Some(c) = first_violation(&trapezium_constraints(alpha, f64::NAN)[..2]) {
        return Err(Error::domain(c));
    }
    let (lo, hi) = trapezium_beta_interval(alpha).ok_or_else(|| Error::domain("alpha > pi/3"))?;
    let (lo, hi) = (lo + BRACKET_SHRINK, hi - BRACKET_SHRINK);
    if hi <= lo {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    let f = |b: f64| trapezium_residual(alpha, b);
    let step = (hi - lo) / ROOT_SCAN_POINTS as f64;
    let mut brackets = Vec::new();
    let mut prev = (lo, f(lo));
    for k in 1..=ROOT_SCAN_POINTS {
        let x = if k == ROOT_SCAN_POINTS { hi } else { lo + k as f64 * step };
        let fx = f(x);
        if prev.1.is_finite() && fx.is_finite() && prev.1 * fx <= 0.0 && prev.1 != fx {
            brackets.push((prev.0, x));
        }
        prev = (x, fx);
    }
    match brackets.len() {
        0 => Err(Error::RootNotBracketed { lo, hi }),
        1 => bisect(f, brackets[0].0, brackets[0].1, 1e-15),
        count => Err(Error::MultipleRoots { count, lo, hi }),
    }
}

/// `m2/m1` together with whether `(alpha, beta)` lies on the solution
/// curve. Off-curve values are pointwise formula evaluations only.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrapeziumRatio {
    pub value: f64,
    pub on_curve: bool,
    /// `|left - right|` of the angle equation, relative to `|left|`.
    pub curve_residual: f64,
}

pub fn trapezium_mass_ratio(alpha: f64, beta: f64) -> Result<TrapeziumRatio> {
    if let Some(c) = first_violation(&trapezium_constraints(alpha, beta)) {
        return Err(Error::domain(c));
    }
    let (value, other) = trapezium_ratios_raw(alpha, beta);
    let curve_residual = (value - other).abs() / value.abs();
    Ok(TrapeziumRatio {
        value,
        on_curve: curve_residual < 1e-9,
        curve_residual,
    })
}

/// Planar coordinates: long base 1-4 on the x axis, short base 2-3 above it.
pub fn trapezium_coordinates(alpha: f64, beta: f64, scale: f64) -> Result<Configuration> {
    check_scale(scale)?;
    if let Some(c) = first_violation(&trapezium_constraints(alpha, beta)) {
        return Err(Error::domain(c));
    }
    let long = scale * (2.0 * alpha - beta).sin() / (alpha - beta).sin();
    let (x, y) = (scale * alpha.cos(), scale * alpha.sin());
    Configuration::planar(&[[0.0, 0.0], [x, y], [long - x, y], [long, 0.0]])
}

/// Mass-independent trapezium relation
/// `(p31 - p41)(p43 - p23) = (p41 - p21)(p42 - p32)`, normalized by the
/// summed magnitudes of the expanded products.
pub fn trapezium_massless_residual(d: &DistanceSet) -> Result<ScalarResidual> {
    if d.bodies() != 4 {
        return Err(Error::BodyCount {
            expected: 4,
            got: d.bodies(),
        });
    }
    let p = |a: usize, b: usize| d.p(a - 1, b - 1);
    let (a, b, c, e) = (p(3, 1), p(4, 1), p(4, 3), p(2, 3));
    let (f, g, h, k) = (p(4, 1), p(2, 1), p(4, 2), p(3, 2));
    let lhs = (a - b) * (c - e);
    let rhs = (f - g) * (h - k);
    let scale = (a.abs() + b.abs()) * (c.abs() + e.abs()) + (f.abs() + g.abs()) * (h.abs() + k.abs());
    Ok(ScalarResidual::new("trapezium:massless", lhs - rhs, scale))
}

/// Range of `m2/m1` reached by [`trapezium_alpha_for_ratio`], sampled just
/// inside the admissible base angles.
pub fn trapezium_ratio_range() -> Result<(f64, f64)> {
    let (lo, hi) = alpha_search_interval();
    Ok((curve_ratio(lo)?, curve_ratio(hi)?))
}

fn alpha_search_interval() -> (f64, f64) {
    (FRAC_PI_3 + 1e-6, FRAC_PI_2 - 1e-7)
}

fn curve_ratio(alpha: f64) -> Result<f64> {
    let beta = trapezium_beta(alpha)?;
    Ok(trapezium_mass_ratio(alpha, beta)?.value)
}

/// Base angle `alpha` (and its `beta`) whose on-curve mass ratio equals
/// `ratio`.
pub fn trapezium_alpha_for_ratio(ratio: f64) -> Result<(f64, f64)> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::domain(format!("ratio > 0 (got {ratio})")));
    }
    let (lo, hi) = alpha_search_interval();
    let f = |a: f64| curve_ratio(a).map(|r| r - ratio).unwrap_or(f64::NAN);
    let alpha = bisect(f, lo, hi, 1e-14)?;
    Ok((alpha, trapezium_beta(alpha)?))
}

/// Outcome of testing a configuration against the rule that a central
/// parallelogram must be a rhombus.
#[derive(Clone, Debug, Serialize)]
pub struct ParallelogramNote {
    pub is_parallelogram: bool,
    pub is_rhombus: bool,
    pub central: bool,
    pub deviation: f64,
    /// False only for a central parallelogram that is not a rhombus.
    pub consistent: bool,
}

/// A planar quadrilateral is a parallelogram when some pairing of its
/// vertices into diagonals has coincident midpoints.
pub fn parallelogram_check(config: &Configuration, masses: &Masses, tol: f64) -> Result<ParallelogramNote> {
    if config.len() != 4 {
        return Err(Error::BodyCount {
            expected: 4,
            got: config.len(),
        });
    }
    let r = config.positions();
    let scale = config.max_distance();
    let diag = [((0, 2), (1, 3)), ((0, 1), (2, 3)), ((0, 3), (1, 2))]
        .into_iter()
        .find(|&((a, b), (c, d))| ((r[a] + r[b]) - (r[c] + r[d])).norm() * 0.5 <= tol * scale);
    let planar = config.dim() == 2 || r.iter().all(|v| v.z == 0.0);
    let is_parallelogram = planar && diag.is_some();
    let is_rhombus = diag.is_some_and(|((a, b), (c, d))| {
        let side = |i: usize, j: usize| (r[i] - r[j]).norm();
        let sides = [side(a, c), side(c, b), side(b, d), side(d, a)];
        sides.iter().all(|s| (s - sides[0]).abs() <= tol * scale)
    });
    let fit = lambda_fit(config, masses)?;
    let central = fit.is_central(crate::centrality::DEFAULT_ORACLE_TOL);
    Ok(ParallelogramNote {
        is_parallelogram,
        is_rhombus: is_parallelogram && is_rhombus,
        central,
        deviation: fit.max_relative_deviation,
        consistent: !(is_parallelogram && central && !is_rhombus),
    })
}

/// Builds the parallelogram with sides `a`, `b` and interior angle `theta`.
pub fn parallelogram(a: f64, b: f64, theta: f64) -> Result<Configuration> {
    let v = Vec3::new(b * theta.cos(), b * theta.sin(), 0.0);
    let pts = [Vec3::zeros(), Vec3::new(a, 0.0, 0.0), Vec3::new(a, 0.0, 0.0) + v, v];
    Configuration::new(2, pts.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{cc_residuals_four, classify, dziobek_residuals, ShapeKind, DEFAULT_CLASSIFY_TOL};
    use approx::assert_relative_eq;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    fn oracle_dev(shape: &FamilyShape) -> f64 {
        lambda_fit(&shape.configuration().unwrap(), &shape.masses().unwrap())
            .unwrap()
            .max_relative_deviation
    }

    #[test]
    fn tetrahedron_lambda() {
        let c = build_tetrahedron(2.0).unwrap();
        for p in crate::pairspace::pairs(4) {
            assert_relative_eq!(c.distance(p.i, p.j), 2.0, max_relative = 1e-14);
        }
        let m = Masses::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let fit = lambda_fit(&c, &m).unwrap();
        assert_relative_eq!(fit.lambda, 10.0 / 8.0, max_relative = 1e-13);
        assert!(fit.max_relative_deviation < 1e-12);
        assert_eq!(classify(&c, DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::Tetrahedral);
    }

    #[test]
    fn equilateral_lambda_any_center_mass() {
        for m4 in [1.0, 10.0] {
            let (c, m) = build_equilateral_centered(1.0, m4, 1.0).unwrap();
            assert_relative_eq!(c.distance(0, 3), 1.0 / 3f64.sqrt(), max_relative = 1e-14);
            let fit = lambda_fit(&c, &m).unwrap();
            assert_relative_eq!(fit.lambda, 3.0 + 3f64.powf(1.5) * m4, max_relative = 1e-13);
        }
    }

    #[test]
    fn convex_region_examples() {
        assert!(!kite_convex_region(FRAC_PI_6, FRAC_PI_6));
        assert!(kite_convex_region(PI / 4.0, PI / 4.0));
        assert!(!kite_convex_region(deg(55.0), deg(10.0)));
        let err = kite_convex_mass_ratios(deg(55.0), deg(10.0)).unwrap_err().to_string();
        assert!(err.contains("alpha + 2*beta > pi/2"), "{err}");
        let err = kite_convex_mass_ratios(FRAC_PI_6, FRAC_PI_6).unwrap_err().to_string();
        assert!(err.contains("singular"), "{err}");
    }

    #[test]
    fn convex_kite_values() {
        let (r1, r4) = kite_convex_mass_ratios(deg(50.0), deg(40.0)).unwrap();
        assert_relative_eq!(r1, 1.83439, max_relative = 1e-5);
        assert_relative_eq!(r4, 0.49977, max_relative = 1e-5);
        let (s1, s4) = kite_convex_mass_ratios(deg(40.0), deg(50.0)).unwrap();
        assert_relative_eq!(s1, r4, max_relative = 1e-12);
        assert_relative_eq!(s4, r1, max_relative = 1e-12);
        let shape = FamilyShape::kite_convex(deg(50.0), deg(40.0), 1.0).unwrap();
        assert!(oracle_dev(&shape) < 1e-12);
    }

    #[test]
    fn convex_kite_distances() {
        let (a, b) = (deg(50.0), deg(40.0));
        let c = FamilyShape::kite_convex(a, b, 1.5).unwrap().configuration().unwrap();
        let q = |i: usize, j: usize| c.distance(i - 1, j - 1);
        assert_relative_eq!(q(1, 3), q(1, 2), max_relative = 1e-12);
        assert_relative_eq!(q(3, 4), q(2, 4), max_relative = 1e-12);
        assert_relative_eq!(q(1, 4), 1.5 * (a + b).sin() / b.cos(), max_relative = 1e-12);
        assert_relative_eq!(q(2, 4), 1.5 * a.cos() / b.cos(), max_relative = 1e-12);
        assert_relative_eq!(q(2, 3), 3.0 * a.cos(), max_relative = 1e-12);
    }

    #[test]
    fn concave_kites() {
        assert!(kite_concave_region(deg(50.0), deg(5.0)));
        assert!(kite_concave_region(deg(70.0), deg(55.0)));
        assert!(!kite_concave_region(deg(60.0), deg(20.0)));
        let (r1, r4) = kite_concave_mass_ratios(deg(50.0), deg(5.0)).unwrap();
        assert_relative_eq!(r1, 0.28686, max_relative = 1e-4);
        assert_relative_eq!(r4, 1.23360, max_relative = 1e-4);
        for (a, b) in [(50.0, 5.0), (70.0, 55.0)] {
            let shape = FamilyShape::kite_concave(deg(a), deg(b), 1.0).unwrap();
            assert!(oracle_dev(&shape) < 1e-12);
            // mirror image, bodies 1 and 4 relabelled
            let mirror = FamilyShape::kite_concave(deg(b), deg(a), 1.0).unwrap();
            assert!(mirror.mirrored);
            assert!(oracle_dev(&mirror) < 1e-12);
        }
        assert!(matches!(
            kite_concave_mass_ratios(0.7, 0.7),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn concave_body_four_inside() {
        let c = FamilyShape::kite_concave(deg(50.0), deg(5.0), 1.0).unwrap().configuration().unwrap();
        let r = c.positions();
        let apex = r[0].y;
        assert!(r[3].y > 0.0 && r[3].y < apex);
        let class = classify(&c, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(class.kind, ShapeKind::KiteConcave);
    }

    #[test]
    fn concave_denominator_negative() {
        for (a, b) in [(50.0, 5.0), (70.0, 55.0), (55.0, 15.0)] {
            let (a, b) = (deg(a), deg(b));
            assert!((a - b).sin().powi(3) - b.cos().powi(3) < 0.0);
        }
    }

    #[test]
    fn rhombus() {
        assert!((rhombus_ratio(PI / 4.0).unwrap() - 1.0).abs() <= 1e-15);
        assert_relative_eq!(rhombus_angle(rhombus_ratio(0.3 * PI).unwrap()).unwrap(), 0.3 * PI, epsilon = 1e-12);
        assert!(rhombus_ratio(FRAC_PI_6 + 1e-9).unwrap() > 1e6);
        assert!(rhombus_ratio(FRAC_PI_3 - 1e-9).unwrap() < 1e-6);
        assert!(rhombus_ratio(FRAC_PI_6).is_err());
        let a = deg(40.0);
        let (k1, k4) = kite_convex_mass_ratios(a, a).unwrap();
        assert_relative_eq!(k1, rhombus_ratio(a).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(k4, k1, max_relative = 1e-12);
        let c = FamilyShape::rhombus(a, 1.0).unwrap().configuration().unwrap();
        assert_relative_eq!(c.distance(1, 3), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn trapezium_region_examples() {
        let a = deg(75.0);
        assert_eq!(trapezium_beta_interval(a).map(|(l, h)| (l.to_degrees(), h.to_degrees())).map(|(l, h)| ((l - 22.5).abs() < 1e-9, (h - 37.5).abs() < 1e-9)), Some((true, true)));
        assert!(trapezium_beta_interval(FRAC_PI_3).is_none());
        assert!(!trapezium_region(deg(80.0), deg(50.0)));
        let err = trapezium_mass_ratio(deg(75.0), deg(20.0)).unwrap_err().to_string();
        assert!(err.contains("beta > (3*alpha - pi)/2"), "{err}");
    }

    #[test]
    fn trapezium_solutions() {
        for (a, b, r) in [(75.0, 26.0049, 0.11342), (70.0, 18.1001, 0.03648)] {
            let alpha = deg(a);
            let beta = trapezium_beta(alpha).unwrap();
            assert_relative_eq!(beta.to_degrees(), b, epsilon = 1e-4);
            assert!(trapezium_region(alpha, beta));
            assert!((alpha - beta).sin() > beta.sin());
            assert!((2.0 * alpha - beta).sin() > (alpha - beta).sin());
            let shape = FamilyShape::trapezium(alpha, 1.0).unwrap();
            assert_relative_eq!(shape.ratio("m2/m1").unwrap(), r, max_relative = 1e-4);
            assert!(oracle_dev(&shape) < 1e-9);
            let config = shape.configuration().unwrap();
            let d = config.distances();
            assert!(trapezium_massless_residual(&d).unwrap().normalized.abs() < 1e-12);
            assert_eq!(classify(&config, DEFAULT_CLASSIFY_TOL).unwrap().kind, ShapeKind::IsoscelesTrapezium);
            let report = cc_residuals_four(&config, &shape.masses().unwrap()).unwrap();
            assert!(report.max_normalized < 1e-9);
            for dz in dziobek_residuals(&d).unwrap() {
                assert!(dz.normalized.abs() < 1e-10, "{}: {}", dz.label, dz.normalized);
            }
        }
    }

    #[test]
    fn trapezium_geometry() {
        let (a, b) = (deg(75.0), deg(26.0));
        let c = trapezium_coordinates(a, b, 1.2).unwrap();
        let q = |i: usize, j: usize| c.distance(i - 1, j - 1);
        assert_relative_eq!(q(3, 4), q(1, 2), max_relative = 1e-12);
        assert_relative_eq!(q(1, 3), q(2, 4), max_relative = 1e-12);
        assert_relative_eq!(q(1, 4), 1.2 * (2.0 * a - b).sin() / (a - b).sin(), max_relative = 1e-12);
        assert_relative_eq!(q(2, 3), 1.2 * b.sin() / (a - b).sin(), max_relative = 1e-12);
        let h = TrapeziumShape::new(a, b, 1.2);
        assert_relative_eq!(h.h1, q(1, 3) * (a - b).sin(), max_relative = 1e-12);
        assert_relative_eq!(h.h2, q(2, 3) * (a - b).sin(), max_relative = 1e-12);
        let off = trapezium_mass_ratio(a, b).unwrap();
        assert!(!off.on_curve);
    }

    #[test]
    fn trapezium_inversion_round_trip() {
        let alpha = deg(72.5);
        let r = FamilyShape::trapezium(alpha, 1.0).unwrap().ratio("m2/m1").unwrap();
        let (a, _) = trapezium_alpha_for_ratio(r).unwrap();
        assert_relative_eq!(a, alpha, epsilon = 1e-9);
    }

    #[test]
    fn parallelograms() {
        let m = Masses::equal(4, 1.0).unwrap();
        let square = parallelogram(1.0, 1.0, FRAC_PI_2).unwrap();
        let note = parallelogram_check(&square, &m, 1e-9).unwrap();
        assert!(note.is_rhombus && note.central && note.consistent);
        let rect = parallelogram(1.0, 1.7, FRAC_PI_2).unwrap();
        let note = parallelogram_check(&rect, &m, 1e-9).unwrap();
        assert!(note.is_parallelogram && !note.is_rhombus && !note.central);
        assert!(note.deviation > 1e-3);
    }

    #[test]
    fn family_names_round_trip() {
        for k in FamilyKind::ALL {
            assert_eq!(k.name().parse::<FamilyKind>().unwrap(), k);
        }
        assert!("pentagon".parse::<FamilyKind>().is_err());
    }
}
