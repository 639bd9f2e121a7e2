//! Cartan–Hadamard geometries: distance, exponential and logarithm maps.
//!
//! Every instance here is complete, simply connected and has sectional
//! curvature `K <= 0`, so `exp` is a global diffeomorphism and `log` is
//! single valued. Tangent vectors live in the same ambient chart as points,
//! which makes linear combinations of logs plain coordinate arithmetic.

pub mod euclidean;
pub mod hyperbolic;
pub mod spd;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest SPD matrix size the dense eigensolver path supports.
pub const MAX_SPD_SIZE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Manifold {
    /// `R^d` with the flat metric.
    Euclidean(usize),
    /// Hyperbolic plane, `K = -1`, stored in hyperboloid coordinates `(x0, x1, x2)`.
    Hyperbolic2,
    /// `n x n` symmetric positive definite matrices with the affine-invariant metric.
    Spd(usize),
}

impl Manifold {
    /// Number of chart coordinates of a point.
    pub fn coord_len(&self) -> usize {
        match *self {
            Manifold::Euclidean(d) => d,
            Manifold::Hyperbolic2 => 3,
            Manifold::Spd(n) => n * n,
        }
    }

    pub fn validate(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.coord_len() {
            return Err(Error::InvalidPoint(format!(
                "{self} expects {} coordinates, got {}",
                self.coord_len(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        match *self {
            Manifold::Euclidean(_) => Ok(()),
            Manifold::Hyperbolic2 => hyperbolic::validate(coords),
            Manifold::Spd(n) => spd::validate(n, coords),
        }
    }

    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Manifold::Euclidean(_) => euclidean::dist(x, y),
            Manifold::Hyperbolic2 => hyperbolic::dist(x, y),
            Manifold::Spd(n) => spd::dist(n, x, y),
        }
    }

    pub fn exp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        match *self {
            Manifold::Euclidean(_) => euclidean::exp(x, v),
            Manifold::Hyperbolic2 => hyperbolic::exp(x, v),
            Manifold::Spd(n) => spd::exp(n, x, v),
        }
    }

    pub fn log(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        match *self {
            Manifold::Euclidean(_) => euclidean::log(x, y),
            Manifold::Hyperbolic2 => hyperbolic::log(x, y),
            Manifold::Spd(n) => spd::log(n, x, y),
        }
    }

    /// Riemannian inner product of two tangent vectors at `x`.
    pub fn inner(&self, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
        match *self {
            Manifold::Euclidean(_) => euclidean::dot(u, v),
            Manifold::Hyperbolic2 => hyperbolic::lorentz(u, v),
            Manifold::Spd(n) => spd::inner(n, x, u, v),
        }
    }

    pub fn norm(&self, x: &[f64], v: &[f64]) -> f64 {
        match *self {
            Manifold::Euclidean(_) => euclidean::dot(v, v).sqrt(),
            Manifold::Hyperbolic2 => hyperbolic::lorentz(v, v).max(0.0).sqrt(),
            Manifold::Spd(n) => spd::norm(n, x, v),
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Manifold::Euclidean(d) => write!(f, "euclidean:{d}"),
            Manifold::Hyperbolic2 => write!(f, "hyperbolic2"),
            Manifold::Spd(n) => write!(f, "spd:{n}"),
        }
    }
}

impl FromStr for Manifold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_size = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad manifold size in {s:?}")))
        };
        if s == "hyperbolic2" {
            return Ok(Manifold::Hyperbolic2);
        }
        if let Some(d) = s.strip_prefix("euclidean:") {
            let d = parse_size(d)?;
            if d == 0 {
                return Err(Error::Parse("euclidean dimension must be >= 1".into()));
            }
            return Ok(Manifold::Euclidean(d));
        }
        if let Some(n) = s.strip_prefix("spd:") {
            let n = parse_size(n)?;
            if n == 0 || n > MAX_SPD_SIZE {
                return Err(Error::Parse(format!("spd size must be in 1..={MAX_SPD_SIZE}")));
            }
            return Ok(Manifold::Spd(n));
        }
        Err(Error::Parse(format!("unknown manifold {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    manifold: Manifold,
    coords: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: ManifoldPoint,
    components: Vec<f64>,
}

impl ManifoldPoint {
    pub fn new(manifold: Manifold, coords: Vec<f64>) -> Result<Self> {
        manifold.validate(&coords)?;
        Ok(ManifoldPoint { manifold, coords })
    }

    /// Skips validation; callers guarantee the coordinates come from a
    /// constraint-preserving map.
    pub(crate) fn from_raw(manifold: Manifold, coords: Vec<f64>) -> Self {
        ManifoldPoint { manifold, coords }
    }

    pub fn euclidean(coords: &[f64]) -> Self {
        ManifoldPoint::from_raw(Manifold::Euclidean(coords.len()), coords.to_vec())
    }

    /// Hyperbolic point from Poincaré-disk coordinates.
    pub fn from_disk(u: f64, v: f64) -> Result<Self> {
        let coords = hyperbolic::from_disk(u, v)?;
        Ok(ManifoldPoint::from_raw(Manifold::Hyperbolic2, coords.to_vec()))
    }

    /// Poincaré-disk coordinates of a hyperbolic point.
    pub fn to_disk(&self) -> Option<[f64; 2]> {
        match self.manifold {
            Manifold::Hyperbolic2 => Some(hyperbolic::to_disk(&self.coords)),
            _ => None,
        }
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    fn same_manifold(&self, other: &ManifoldPoint) -> Result<()> {
        if self.manifold != other.manifold {
            return Err(Error::ManifoldMismatch {
                left: self.manifold.to_string(),
                right: other.manifold.to_string(),
            });
        }
        Ok(())
    }

    pub fn dist(&self, other: &ManifoldPoint) -> Result<f64> {
        self.same_manifold(other)?;
        Ok(self.manifold.dist(&self.coords, &other.coords))
    }

    pub fn log(&self, other: &ManifoldPoint) -> Result<TangentVector> {
        self.same_manifold(other)?;
        Ok(TangentVector {
            base: self.clone(),
            components: self.manifold.log(&self.coords, &other.coords),
        })
    }

    pub fn exp(&self, v: &TangentVector) -> Result<ManifoldPoint> {
        self.same_manifold(&v.base)?;
        let coords = self.manifold.exp(&self.coords, &v.components);
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ManifoldPoint::from_raw(self.manifold, coords))
    }

    /// Point at fraction `s` of the geodesic from `self` to `other`.
    /// The endpoints `s = 0` and `s = 1` are returned exactly.
    pub fn geodesic_point(&self, other: &ManifoldPoint, s: f64) -> Result<ManifoldPoint> {
        self.same_manifold(other)?;
        if s == 0.0 {
            return Ok(self.clone());
        }
        if s == 1.0 {
            return Ok(other.clone());
        }
        let v = self.log(other)?.scaled(s);
        self.exp(&v)
    }

    pub fn zero_vector(&self) -> TangentVector {
        TangentVector {
            base: self.clone(),
            components: vec![0.0; self.coords.len()],
        }
    }
}

impl TangentVector {
    pub fn new(base: ManifoldPoint, components: Vec<f64>) -> Result<Self> {
        if components.len() != base.coords.len() {
            return Err(Error::InvalidPoint("tangent vector length mismatch".into()));
        }
        Ok(TangentVector { base, components })
    }

    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.base
            .manifold
            .norm(&self.base.coords, &self.components)
    }

    pub fn inner(&self, other: &TangentVector) -> Result<f64> {
        self.base.same_manifold(&other.base)?;
        Ok(self
            .base
            .manifold
            .inner(&self.base.coords, &self.components, &other.components))
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            components: self.components.iter().map(|c| c * s).collect(),
        }
    }

    /// `self - other`, both taken at the base of `self`.
    pub fn sub(&self, other: &TangentVector) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Returns whether `dist(exp(x, u), exp(x, v)) >= |u - v| - 1e-9`.
///
/// In nonpositive curvature `exp_x` does not decrease distances, so this must
/// hold for every pair of tangent vectors.
pub fn exp_distance_nonexpansive_check(
    x: &ManifoldPoint,
    u: &TangentVector,
    v: &TangentVector,
) -> Result<bool> {
    let eu = x.exp(u)?;
    let ev = x.exp(v)?;
    let lhs = eu.dist(&ev)?;
    let rhs = u.sub(v).norm();
    Ok(lhs >= rhs - 1e-9)
}
