//! Hyperbolic plane in the hyperboloid model
//! `{x : -x0^2 + x1^2 + x2^2 = -1, x0 > 0}`.
//!
//! The Poincaré disk is only an input/output chart; all arithmetic happens on
//! the hyperboloid where `exp`/`log` stay well conditioned.

use crate::error::{Error, Result};

const CONSTRAINT_TOL: f64 = 1e-10;

/// Lorentz inner product `-a0 b0 + a1 b1 + a2 b2`.
pub fn lorentz(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn validate(x: &[f64]) -> Result<()> {
    let drift = (lorentz(x, x) + 1.0).abs();
    if x[0] < 1.0 - CONSTRAINT_TOL || drift > CONSTRAINT_TOL * x[0].max(1.0).powi(2) {
        return Err(Error::InvalidPoint(format!(
            "not on the upper hyperboloid: <x,x> + 1 = {drift:e}, x0 = {}",
            x[0]
        )));
    }
    Ok(())
}

/// Lifts the spatial part back onto the hyperboloid.
fn normalize(mut y: [f64; 3]) -> [f64; 3] {
    y[0] = (1.0 + y[1] * y[1] + y[2] * y[2]).sqrt();
    y
}

pub fn from_disk(u: f64, v: f64) -> Result<[f64; 3]> {
    let r2 = u * u + v * v;
    if !(r2 < 1.0) {
        return Err(Error::InvalidPoint(format!(
            "disk coordinates ({u}, {v}) outside the open unit disk"
        )));
    }
    let s = 1.0 - r2;
    Ok(normalize([(1.0 + r2) / s, 2.0 * u / s, 2.0 * v / s]))
}

pub fn to_disk(x: &[f64]) -> [f64; 2] {
    let d = 1.0 + x[0];
    [x[1] / d, x[2] / d]
}

/// `dist = 2 asinh(|x - y|_L / 2)`; avoids the cancellation of `acosh(-<x,y>)`
/// for nearby points.
pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    let d = [y[0] - x[0], y[1] - x[1], y[2] - x[2]];
    let chord2 = lorentz(&d, &d).max(0.0);
    2.0 * (chord2.sqrt() / 2.0).asinh()
}

/// `sinh(t) / t`, accurate near zero.
fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 + t * t / 6.0
    } else {
        t.sinh() / t
    }
}

pub fn exp(x: &[f64], v: &[f64]) -> Vec<f64> {
    let n = lorentz(v, v).max(0.0).sqrt();
    if n == 0.0 {
        return x.to_vec();
    }
    let c = n.cosh();
    let s = sinhc(n);
    normalize([
        c * x[0] + s * v[0],
        c * x[1] + s * v[1],
        c * x[2] + s * v[2],
    ])
    .to_vec()
}

pub fn log(x: &[f64], y: &[f64]) -> Vec<f64> {
    let diff = [y[0] - x[0], y[1] - x[1], y[2] - x[2]];
    let chord2 = lorentz(&diff, &diff).max(0.0);
    if chord2 == 0.0 {
        return vec![0.0; 3];
    }
    // y + <x,y> x = diff - (cosh d - 1) x, with cosh d - 1 = chord^2 / 2
    let h = chord2 / 2.0;
    let mut u = [diff[0] - h * x[0], diff[1] - h * x[1], diff[2] - h * x[2]];
    // project out the normal component left by rounding
    let p = lorentz(x, &u);
    for k in 0..3 {
        u[k] += p * x[k];
    }
    let d = 2.0 * (chord2.sqrt() / 2.0).asinh();
    let scale = 1.0 / sinhc(d);
    u.iter().map(|c| c * scale).collect()
}
