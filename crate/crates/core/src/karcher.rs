//! Riemannian center of mass with signed weights.
//!
//! On a Cartan–Hadamard manifold `f(x) = sum_j a_j dist(x_j, x)^2` with
//! `sum_j a_j = 1` has a unique minimizer even when some weights are
//! negative. The solver certifies its output with `|grad f / 2| / mu`, where
//! `mu` bounds the Hessian of `f / 2` from below on a ball that provably
//! contains the minimizer. With nonnegative weights (or flat geometry)
//! `mu = 1`; negative weights can push the Hessian below one, by how much
//! depends on a lower curvature bound `-kappa^2`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};
use crate::mask::{rational_to_f64, Rational};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SPD_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;
pub const MAX_HALVINGS: u32 = 60;

const ARMIJO_C: f64 = 1e-4;

/// `kappa` such that the sectional curvature is bounded below by `-kappa^2`.
fn curvature_scale(manifold: Manifold) -> f64 {
    match manifold {
        Manifold::Euclidean(_) => 0.0,
        Manifold::Hyperbolic2 => 1.0,
        // affine-invariant metric: curvature in [-1/2, 0]
        Manifold::Spd(_) => std::f64::consts::FRAC_1_SQRT_2,
    }
}

/// `t coth t`, the largest Hessian eigenvalue of `dist^2 / 2` at distance `t`
/// under curvature `-1`.
fn coth_ratio(t: f64) -> f64 {
    if t < 1e-4 {
        1.0 + t * t / 3.0
    } else {
        t / t.tanh()
    }
}

/// Default solver tolerance for a geometry.
pub fn default_tolerance(manifold: Manifold) -> f64 {
    match manifold {
        Manifold::Spd(_) => DEFAULT_SPD_TOLERANCE,
        _ => DEFAULT_TOLERANCE,
    }
}

/// A window of points with affine weights (summing to exactly one).
#[derive(Clone, Debug)]
pub struct WeightedConfiguration {
    manifold: Manifold,
    points: Vec<ManifoldPoint>,
    weights: Vec<f64>,
}

impl WeightedConfiguration {
    pub fn new(points: Vec<ManifoldPoint>, weights: &[Rational]) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidPoint(format!(
                "{} points vs {} weights",
                points.len(),
                weights.len()
            )));
        }
        let sum: Rational = weights.iter().fold(Rational::zero(), |a, w| a + w);
        if !sum.is_one() {
            return Err(Error::InvalidMask(format!("weights sum to {sum}, expected 1")));
        }
        let manifold = points[0].manifold();
        if let Some(p) = points.iter().find(|p| p.manifold() != manifold) {
            return Err(Error::ManifoldMismatch {
                left: manifold.to_string(),
                right: p.manifold().to_string(),
            });
        }
        let weights = weights.iter().map(rational_to_f64).collect();
        Ok(Self::from_parts(points, weights))
    }

    /// Caller guarantees a shared manifold and weights summing to one.
    pub(crate) fn from_parts(points: Vec<ManifoldPoint>, weights: Vec<f64>) -> Self {
        let manifold = points[0].manifold();
        WeightedConfiguration {
            manifold,
            points,
            weights,
        }
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn points(&self) -> &[ManifoldPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn objective_raw(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * self.manifold.dist(p.coords(), x).powi(2))
            .sum()
    }

    /// `sum_j |a_j| dist(x_j, x)^2`, the magnitude against which rounding in
    /// the objective is judged.
    fn objective_scale(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w.abs() * self.manifold.dist(p.coords(), x).powi(2))
            .sum()
    }

    /// `sum_j a_j log(x, x_j) = -grad f(x) / 2`.
    fn descent_raw(&self, x: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; x.len()];
        for (p, w) in self.points.iter().zip(&self.weights) {
            let l = self.manifold.log(x, p.coords());
            for (a, c) in acc.iter_mut().zip(l) {
                *a += w * c;
            }
        }
        acc
    }

    /// Upper bound on `dist(x, x*)` given `g = |grad f(x) / 2|` and `f(x)`.
    ///
    /// Outside radius `R` of `x`, `f >= rho^2 - 2 rho A - C > f(x)` with
    /// `A = sum |a_j| D_j`, `C = sum_{a_j < 0} |a_j| D_j^2`, so `x*` lies
    /// within `R`. On that ball the Hessian of `f / 2` is at least
    /// `mu(R) = 1 - sum_{a_j < 0} |a_j| (c(D_j + R) - 1)` with
    /// `c(d) = kappa d coth(kappa d)`, hence `dist(x, x*) <= g / mu(R)`; the
    /// bound is then fed back as a smaller radius.
    fn distance_bound(&self, x: &[f64], g: f64, f: f64) -> f64 {
        if self.weights.iter().all(|&w| w >= 0.0) {
            return g;
        }
        let kappa = curvature_scale(self.manifold);
        if kappa == 0.0 {
            return g;
        }
        let dists: Vec<f64> = self.points.iter().map(|p| self.manifold.dist(p.coords(), x)).collect();
        let mut a = 0.0;
        let mut c = 0.0;
        let mut reach: f64 = 0.0;
        for (&w, &d) in self.weights.iter().zip(&dists) {
            a += w.abs() * d;
            if w < 0.0 {
                c += -w * d * d;
            } else {
                reach = reach.max(d);
            }
        }
        let mu = |r: f64| {
            1.0 - self
                .weights
                .iter()
                .zip(&dists)
                .filter(|(w, _)| **w < 0.0)
                .map(|(w, d)| -w * (coth_ratio(kappa * (d + r)) - 1.0))
                .sum::<f64>()
        };
        let mut radius = reach.max(a + (a * a + c + f).max(0.0).sqrt());
        for _ in 0..4 {
            let m = mu(radius);
            if !(m > 0.0) {
                return radius;
            }
            radius = radius.min(g / m);
        }
        radius
    }

    fn check_point(&self, x: &ManifoldPoint) -> Result<()> {
        if x.manifold() != self.manifold {
            return Err(Error::ManifoldMismatch {
                left: self.manifold.to_string(),
                right: x.manifold().to_string(),
            });
        }
        Ok(())
    }

    /// `f(x) = sum_j a_j dist(x_j, x)^2`; negative values are possible.
    pub fn objective(&self, x: &ManifoldPoint) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.objective_raw(x.coords()))
    }

    /// `grad f(x) = -2 sum_j a_j log(x, x_j)`.
    pub fn gradient(&self, x: &ManifoldPoint) -> Result<TangentVector> {
        self.check_point(x)?;
        let d = self.descent_raw(x.coords());
        TangentVector::new(x.clone(), d.iter().map(|c| -2.0 * c).collect())
    }

    /// If the configuration copies a single point (one unit weight, the rest
    /// zero) returns that point.
    fn delta_point(&self) -> Option<&ManifoldPoint> {
        let mut hit = None;
        for (p, &w) in self.points.iter().zip(&self.weights) {
            if w == 1.0 && hit.is_none() {
                hit = Some(p);
            } else if w != 0.0 {
                return None;
            }
        }
        hit
    }

    fn initial_point(&self) -> &ManifoldPoint {
        let mut best = 0;
        for (k, &w) in self.weights.iter().enumerate() {
            if w > self.weights[best] {
                best = k;
            }
        }
        &self.points[best]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl SolverOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        SolverOptions {
            tolerance,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

/// Outcome of [`riemannian_average`].
#[derive(Clone, Debug)]
pub struct MeanCertificate {
    pub mean: ManifoldPoint,
    /// `|grad f / 2|` at `mean`.
    pub grad_norm: f64,
    /// Upper bound on the distance from `mean` to the true minimizer; equal to
    /// `grad_norm` for nonnegative weights or flat geometry, larger otherwise.
    pub error_bound: f64,
    pub iterations: usize,
    pub f_value: f64,
    /// `error_bound <= tolerance` was reached.
    pub certified: bool,
}

impl MeanCertificate {
    pub fn into_certified(self) -> Result<ManifoldPoint> {
        if self.certified {
            Ok(self.mean)
        } else {
            Err(Error::NotCertified {
                iterations: self.iterations,
                error_bound: self.error_bound,
            })
        }
    }
}

pub fn riemannian_average(config: &WeightedConfiguration, tolerance: f64) -> Result<MeanCertificate> {
    riemannian_average_with(config, config.initial_point(), SolverOptions::with_tolerance(tolerance))
}

/// Gradient iteration `x <- exp(x, t sum_j a_j log(x, x_j))` with `t = 1`
/// halved until the objective decreases sufficiently.
pub fn riemannian_average_with(
    config: &WeightedConfiguration,
    start: &ManifoldPoint,
    options: SolverOptions,
) -> Result<MeanCertificate> {
    if !(options.tolerance > 0.0) {
        return Err(Error::InvalidPoint(format!(
            "tolerance must be positive, got {}",
            options.tolerance
        )));
    }
    config.check_point(start)?;
    if let Some(p) = config.delta_point() {
        return Ok(MeanCertificate {
            mean: p.clone(),
            grad_norm: 0.0,
            error_bound: 0.0,
            iterations: 0,
            f_value: 0.0,
            certified: true,
        });
    }
    let m = config.manifold;
    let mut x = start.coords().to_vec();
    let mut v = config.descent_raw(&x);
    let mut g = m.norm(&x, &v);
    let mut f = config.objective_raw(&x);
    let mut iterations = 0;
    let finish = |x: Vec<f64>, g: f64, f: f64, iterations: usize| {
        if !g.is_finite() || !f.is_finite() || x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let error_bound = config.distance_bound(&x, g, f);
        Ok(MeanCertificate {
            mean: ManifoldPoint::from_raw(m, x),
            grad_norm: g,
            error_bound,
            iterations,
            f_value: f,
            certified: error_bound <= options.tolerance,
        })
    };
    while iterations < options.max_iterations {
        if !g.is_finite() {
            return Err(Error::NonFinite);
        }
        // error_bound >= g, so the bound is only worth computing once g is small
        if g <= options.tolerance && config.distance_bound(&x, g, f) <= options.tolerance {
            return finish(x, g, f, iterations);
        }
        iterations += 1;
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = v.iter().map(|c| c * step).collect();
            let y = m.exp(&x, &trial);
            let fy = config.objective_raw(&y);
            if fy <= f - ARMIJO_C * 2.0 * step * g * g {
                accepted = Some((y, fy, None));
                break;
            }
            // Near the minimizer the decrease drops below the rounding of f;
            // fall back to requiring a smaller gradient.
            let noise = 64.0 * f64::EPSILON * config.objective_scale(&y).max(f.abs());
            if fy <= f + noise {
                let vy = config.descent_raw(&y);
                let gy = m.norm(&y, &vy);
                if gy < g {
                    accepted = Some((y, fy, Some((vy, gy))));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((y, fy, cached)) => {
                x = y;
                f = fy;
                match cached {
                    Some((vy, gy)) => {
                        v = vy;
                        g = gy;
                    }
                    None => {
                        v = config.descent_raw(&x);
                        g = m.norm(&x, &v);
                    }
                }
            }
            None => return finish(x, g, f, iterations),
        }
    }
    finish(x, g, f, iterations)
}

/// Midpoint strong-convexity probe along the geodesic from `x` to `y`:
/// `4 (f(x) - 2 f(mid) + f(y)) >= dist(x, y)^2 (1 - 1e-6)`.
pub fn strong_convexity_probe(
    config: &WeightedConfiguration,
    x: &ManifoldPoint,
    y: &ManifoldPoint,
) -> Result<bool> {
    Ok(second_difference(config, x, y)? >= x.dist(y)?.powi(2) * (1.0 - 1e-6))
}

/// `4 (f(x) - 2 f(mid) + f(y))`, the second difference of `f` along the
/// geodesic `[0, 1] -> M` with step `1/2`.
pub fn second_difference(
    config: &WeightedConfiguration,
    x: &ManifoldPoint,
    y: &ManifoldPoint,
) -> Result<f64> {
    let mid = x.geodesic_point(y, 0.5)?;
    let fx = config.objective(x)?;
    let fm = config.objective(&mid)?;
    let fy = config.objective(y)?;
    Ok(4.0 * (fx - 2.0 * fm + fy))
}
