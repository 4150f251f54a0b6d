//! Pair-space geometry: bodies, masses, pair vectors and mutual distances.
//!
//! Positions are the ground truth. Pair vectors follow `q_ij = r_i - r_j`
//! and every cross-product sign downstream inherits that convention. A
//! [`DistanceSet`] is only a view and carries no geometric meaning until
//! [`realizable`] has produced a witness embedding for it.

use nalgebra::{Matrix4, Matrix5};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Pairs closer than this fraction of the largest distance count as collided.
pub const COLLISION_FRACTION: f64 = 1e-9;

/// Relative tolerance on Cayley–Menger determinants.
pub const CAYLEY_MENGER_TOL: f64 = 1e-10;

/// Unordered pair of bodies, stored 0-based with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    pub i: usize,
    pub j: usize,
}

impl Pair {
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "a pair needs two distinct bodies");
        Pair {
            i: a.min(b),
            j: a.max(b),
        }
    }

    /// 1-based label such as `"12"`.
    pub fn label(&self) -> String {
        format!("{}{}", self.i + 1, self.j + 1)
    }

    pub fn contains(&self, k: usize) -> bool {
        self.i == k || self.j == k
    }
}

/// Dense storage for a value per unordered pair of `n` bodies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTable<T> {
    n: usize,
    values: Vec<T>,
}

impl<T> PairTable<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(Pair) -> T) -> Self {
        let values = pairs(n).map(&mut f).collect();
        PairTable { n, values }
    }

    pub fn bodies(&self) -> usize {
        self.n
    }

    fn index(&self, pair: Pair) -> usize {
        let Pair { i, j } = pair;
        debug_assert!(j < self.n);
        // row-major over the strict upper triangle
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Value for the unordered pair `{a, b}`.
    pub fn get(&self, a: usize, b: usize) -> &T {
        &self.values[self.index(Pair::new(a, b))]
    }

    pub fn get_mut(&mut self, a: usize, b: usize) -> &mut T {
        let idx = self.index(Pair::new(a, b));
        &mut self.values[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, &T)> + '_ {
        pairs(self.n).zip(self.values.iter())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn map<U>(&self, mut f: impl FnMut(Pair, &T) -> U) -> PairTable<U> {
        PairTable {
            n: self.n,
            values: self.iter().map(|(p, v)| f(p, v)).collect(),
        }
    }
}

impl PairTable<Vec3> {
    /// Oriented pair vector: `q_ab`, with `q_ba = -q_ab`.
    pub fn oriented(&self, a: usize, b: usize) -> Vec3 {
        let v = *self.get(a, b);
        if a < b {
            v
        } else {
            -v
        }
    }
}

/// All pairs `i < j` of `n` bodies, in storage order.
pub fn pairs(n: usize) -> impl Iterator<Item = Pair> {
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| Pair { i, j }))
}

/// All triplets `i < j < k` of `n` bodies.
pub fn triplets(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |i| {
        ((i + 1)..n).flat_map(move |j| ((j + 1)..n).map(move |k| [i, j, k]))
    })
}

/// Positive body masses together with the gravitational constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Masses {
    values: Vec<f64>,
    g: f64,
}

impl Masses {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_g(values, 1.0)
    }

    pub fn with_g(values: Vec<f64>, g: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::BodyCount {
                expected: 2,
                got: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite("masses"));
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveMass { index, value });
            }
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidGravitationalConstant(g));
        }
        Ok(Masses { values, g })
    }

    pub fn equal(n: usize, m: f64) -> Result<Self> {
        Self::new(vec![m; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `mu_ij = m_i m_j / M`
    pub fn pair_reduced(&self, i: usize, j: usize) -> f64 {
        self.values[i] * self.values[j] / self.total()
    }

    /// `mu_ijk = m_i m_j m_k / M^2`
    pub fn triplet_reduced(&self, i: usize, j: usize, k: usize) -> f64 {
        let m = self.total();
        self.values[i] * self.values[j] * self.values[k] / (m * m)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::with_g(self.values.iter().map(|m| m * s).collect(), self.g)
    }
}

/// Pair and triplet reduced masses.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedMasses {
    pub pairs: PairTable<f64>,
    pub triplets: Vec<([usize; 3], f64)>,
}

impl ReducedMasses {
    pub fn triplet(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut key = [i, j, k];
        key.sort_unstable();
        self.triplets
            .iter()
            .find(|(t, _)| *t == key)
            .map(|(_, v)| *v)
            .expect("triplet indices in range")
    }
}

pub fn reduced_masses(masses: &Masses) -> ReducedMasses {
    let n = masses.len();
    ReducedMasses {
        pairs: PairTable::from_fn(n, |p| masses.pair_reduced(p.i, p.j)),
        triplets: triplets(n)
            .map(|[i, j, k]| ([i, j, k], masses.triplet_reduced(i, j, k)))
            .collect(),
    }
}

/// Body positions in two or three dimensions.
///
/// Planar configurations keep a zero third component so that cross products
/// point along the normal of the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    dim: usize,
    positions: Vec<Vec3>,
}

impl Configuration {
    pub fn new(dim: usize, positions: Vec<Vec3>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Dimension(dim));
        }
        if positions.len() < 2 {
            return Err(Error::BodyCount {
                expected: 2,
                got: positions.len(),
            });
        }
        for (idx, r) in positions.iter().enumerate() {
            if !r.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite("positions"));
            }
            if dim == 2 && r.z != 0.0 {
                return Err(Error::NotPlanar(idx));
            }
        }
        let config = Configuration { dim, positions };
        config.check_collisions()?;
        Ok(config)
    }

    pub fn planar(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(2, points.iter().map(|p| Vec3::new(p[0], p[1], 0.0)).collect())
    }

    pub fn spatial(points: &[[f64; 3]]) -> Result<Self> {
        Self::new(3, points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect())
    }

    fn check_collisions(&self) -> Result<()> {
        let max = self.max_distance();
        for p in pairs(self.len()) {
            let d = self.distance(p.i, p.j);
            if d <= COLLISION_FRACTION * max || d == 0.0 {
                return Err(Error::Collision {
                    i: p.i + 1,
                    j: p.j + 1,
                    distance: d,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> Vec3 {
        self.positions[i]
    }

    /// `q_ij = r_i - r_j`
    pub fn pair_vector(&self, i: usize, j: usize) -> Vec3 {
        self.positions[i] - self.positions[j]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.pair_vector(i, j).norm()
    }

    pub fn max_distance(&self) -> f64 {
        pairs(self.len())
            .map(|p| self.distance(p.i, p.j))
            .fold(0.0, f64::max)
    }

    pub fn mean_distance(&self) -> f64 {
        let n = self.len();
        let count = n * (n - 1) / 2;
        pairs(n).map(|p| self.distance(p.i, p.j)).sum::<f64>() / count as f64
    }

    pub fn distances(&self) -> DistanceSet {
        DistanceSet {
            q: PairTable::from_fn(self.len(), |p| self.distance(p.i, p.j)),
        }
    }

    pub fn centroid(&self) -> Vec3 {
        self.positions.iter().sum::<Vec3>() / self.len() as f64
    }

    pub fn center_of_mass(&self, masses: &Masses) -> Vec3 {
        self.positions
            .iter()
            .zip(masses.values())
            .map(|(r, m)| r * *m)
            .sum::<Vec3>()
            / masses.total()
    }

    /// Uniform scaling about the origin.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.map_positions(|r| r * s)
    }

    /// Applies `f` to every position, keeping the dimension.
    pub fn map_positions(&self, f: impl Fn(Vec3) -> Vec3) -> Result<Self> {
        Self::new(self.dim, self.positions.iter().map(|r| f(*r)).collect())
    }

    /// Same positions with bodies reordered: body `k` of the result is body
    /// `order[k]` of `self`.
    pub fn relabeled(&self, order: &[usize]) -> Result<Self> {
        Self::new(self.dim, order.iter().map(|&k| self.positions[k]).collect())
    }

    /// Positions embedded in three dimensions.
    pub fn to_spatial(&self) -> Self {
        Configuration {
            dim: 3,
            positions: self.positions.clone(),
        }
    }
}

/// Pair vectors `q_ij = r_i - r_j` for all `i < j`.
pub fn pair_vectors(config: &Configuration) -> PairTable<Vec3> {
    PairTable::from_fn(config.len(), |p| config.pair_vector(p.i, p.j))
}

/// Largest violation of `q_ij + q_jk + q_ki = 0` over all triplets.
pub fn triangle_residual(q: &PairTable<Vec3>) -> f64 {
    triplets(q.bodies())
        .map(|[i, j, k]| (q.oriented(i, j) + q.oriented(j, k) + q.oriented(k, i)).norm())
        .fold(0.0, f64::max)
}

/// Mutual distances `q_ij > 0` and their inverse cubes `p_ij = q_ij^-3`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceSet {
    q: PairTable<f64>,
}

impl DistanceSet {
    pub fn new(q: PairTable<f64>) -> Result<Self> {
        for (p, &v) in q.iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite("distances"));
            }
            if v <= 0.0 {
                return Err(Error::Distances(format!(
                    "q{} must be positive, got {v}",
                    p.label()
                )));
            }
        }
        Ok(DistanceSet { q })
    }

    /// Builds from a closure over 0-based pairs.
    pub fn from_fn(n: usize, f: impl FnMut(Pair) -> f64) -> Result<Self> {
        Self::new(PairTable::from_fn(n, f))
    }

    /// Four-body distances in the order `q12, q13, q14, q23, q24, q34`.
    pub fn four(q: [f64; 6]) -> Result<Self> {
        let mut it = q.into_iter();
        Self::from_fn(4, |_| it.next().unwrap())
    }

    /// Inverts `p_ij = q_ij^-3`.
    pub fn from_p(p: PairTable<f64>) -> Result<Self> {
        Self::new(p.map(|_, &v| v.powf(-1.0 / 3.0)))
    }

    pub fn bodies(&self) -> usize {
        self.q.bodies()
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        *self.q.get(i, j)
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.q(i, j).powi(-3)
    }

    pub fn q_table(&self) -> &PairTable<f64> {
        &self.q
    }

    pub fn p_table(&self) -> PairTable<f64> {
        self.q.map(|_, &v| v.powi(-3))
    }

    pub fn max(&self) -> f64 {
        self.q.values().iter().copied().fold(0.0, f64::max)
    }
}

/// Cayley–Menger volumes of a four-point distance set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CayleyMenger {
    /// Squared areas of triangles 123, 124, 134, 234.
    pub triangle_area_sq: [f64; 4],
    /// Squared volume of the tetrahedron.
    pub volume_sq: f64,
}

#[derive(Clone, Debug)]
pub struct Realizability {
    pub realizable: bool,
    /// Smallest dimension the distances embed in (0 when not realizable).
    pub embedding_dim: usize,
    /// Realizable, but only in a dimension lower than requested.
    pub degenerate: bool,
    pub cayley_menger: CayleyMenger,
    /// Canonical embedding: body 1 on the origin before recentring, body 2 on
    /// the positive first axis, body 3 in the upper half-plane, body 4 with a
    /// non-negative third coordinate; centroid moved to the origin.
    pub witness: Option<Configuration>,
}

fn triangle_area_sq(a: f64, b: f64, c: f64) -> f64 {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let cm = Matrix4::new(
        0.0, 1.0, 1.0, 1.0, //
        1.0, 0.0, a2, b2, //
        1.0, a2, 0.0, c2, //
        1.0, b2, c2, 0.0,
    );
    -cm.determinant() / 16.0
}

pub fn cayley_menger(d: &DistanceSet) -> Result<CayleyMenger> {
    if d.bodies() != 4 {
        return Err(Error::BodyCount {
            expected: 4,
            got: d.bodies(),
        });
    }
    let s = |i, j| d.q(i, j).powi(2);
    let tri = |i, j, k| triangle_area_sq(d.q(i, j), d.q(i, k), d.q(j, k));
    let cm = Matrix5::new(
        0.0, 1.0, 1.0, 1.0, 1.0, //
        1.0, 0.0, s(0, 1), s(0, 2), s(0, 3), //
        1.0, s(0, 1), 0.0, s(1, 2), s(1, 3), //
        1.0, s(0, 2), s(1, 2), 0.0, s(2, 3), //
        1.0, s(0, 3), s(1, 3), s(2, 3), 0.0,
    );
    Ok(CayleyMenger {
        triangle_area_sq: [tri(0, 1, 2), tri(0, 1, 3), tri(0, 2, 3), tri(1, 2, 3)],
        volume_sq: cm.determinant() / 288.0,
    })
}

/// Decides whether a four-body distance set embeds in dimension `dim`.
pub fn realizable(d: &DistanceSet, dim: usize) -> Result<Realizability> {
    if dim != 2 && dim != 3 {
        return Err(Error::Dimension(dim));
    }
    let cm = cayley_menger(d)?;
    let scale2 = d.max().powi(2);
    let area_tol = CAYLEY_MENGER_TOL * scale2 * scale2;
    let volume_tol = CAYLEY_MENGER_TOL * scale2 * scale2 * scale2;

    let not_realizable = |cm: CayleyMenger| Realizability {
        realizable: false,
        embedding_dim: 0,
        degenerate: false,
        cayley_menger: cm,
        witness: None,
    };

    if cm.triangle_area_sq.iter().any(|&a| a < -area_tol) || cm.volume_sq < -volume_tol {
        return Ok(not_realizable(cm));
    }
    let embedding_dim = if cm.volume_sq > volume_tol {
        3
    } else if cm.triangle_area_sq.iter().any(|&a| a > area_tol) {
        2
    } else {
        1
    };
    if embedding_dim > dim {
        return Ok(not_realizable(cm));
    }

    let points = canonical_embedding(d);
    let reproduces = pairs(4).all(|p| {
        let got = (points[p.i] - points[p.j]).norm();
        (got - d.q(p.i, p.j)).abs() <= 1e-8 * d.max()
    });
    if !reproduces {
        return Ok(not_realizable(cm));
    }
    let centroid = points.iter().sum::<Vec3>() / 4.0;
    let positions = points
        .iter()
        .map(|r| {
            let mut c = r - centroid;
            if dim == 2 {
                c.z = 0.0;
            }
            c
        })
        .collect();
    let witness = Configuration::new(dim, positions)?;
    Ok(Realizability {
        realizable: true,
        embedding_dim,
        degenerate: embedding_dim < dim,
        cayley_menger: cm,
        witness: Some(witness),
    })
}

fn canonical_embedding(d: &DistanceSet) -> [Vec3; 4] {
    let (d12, d13, d14) = (d.q(0, 1), d.q(0, 2), d.q(0, 3));
    let (d23, d24, d34) = (d.q(1, 2), d.q(1, 3), d.q(2, 3));
    let r2 = Vec3::new(d12, 0.0, 0.0);
    let x3 = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12);
    let y3 = (d13 * d13 - x3 * x3).max(0.0).sqrt();
    let r3 = Vec3::new(x3, y3, 0.0);
    let x4 = (d12 * d12 + d14 * d14 - d24 * d24) / (2.0 * d12);
    let r4 = if y3 > 1e-12 * d.max() {
        let y4 = (d13 * d13 - 2.0 * x4 * x3 + d14 * d14 - d34 * d34) / (2.0 * y3);
        let z4 = (d14 * d14 - x4 * x4 - y4 * y4).max(0.0).sqrt();
        Vec3::new(x4, y4, z4)
    } else {
        // bodies 1, 2, 3 collinear: body 4 goes in the upper half-plane
        let y4 = (d14 * d14 - x4 * x4).max(0.0).sqrt();
        Vec3::new(x4, y4, 0.0)
    };
    [Vec3::zeros(), r2, r3, r4]
}
