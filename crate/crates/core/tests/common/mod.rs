//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the library's averaging or geometry code: the
//! linear rule is applied by brute force over the coefficient list, and
//! hyperbolic distances come from the Poincaré-disk closed form.

#![allow(dead_code)]

use geosubdiv::mask::ratio;
use geosubdiv::{Manifold, ManifoldPoint, Mask, Rational};
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn builtin_masks() -> Vec<(&'static str, Mask)> {
    // Two rounds of the four-point rule as one scheme with dilation 4; the
    // iterate itself is checked against repeated application elsewhere.
    let two_round = Mask::four_point(&ratio(1, 16)).iterate(2).unwrap();
    vec![
        ("chaikin", Mask::chaikin()),
        ("fourpoint:1/16", Mask::four_point(&ratio(1, 16))),
        ("blend-example1", Mask::chaikin_four_point_blend()),
        ("two-round", two_round),
    ]
}

/// Brute force `(Sx)_p = sum_j a_{p - N j} x_j` over every output index whose
/// full stencil lies inside `0..n`, keeping the longest run of consecutive
/// indices. Returns the first emitted index and the values.
pub fn apply_linear<T, F>(mask: &Mask, xs: &[T], zero: T, mut axpy: F) -> (i64, Vec<T>)
where
    T: Clone,
    F: FnMut(&mut T, &Rational, &T),
{
    let n = mask.dilation() as i64;
    let len = xs.len() as i64;
    let coeffs: Vec<(i64, Rational)> = mask
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (mask.offset() + k as i64, c.clone()))
        .collect();
    let mut valid: Vec<(i64, T)> = Vec::new();
    for p in -(n * len + 64)..(n * len + 64) {
        let mut stencil = Vec::new();
        let mut inside = true;
        for (l, c) in &coeffs {
            let d = p - l;
            if d.rem_euclid(n) != 0 {
                continue;
            }
            let j = d / n;
            if j < 0 || j >= len {
                inside = false;
                break;
            }
            stencil.push((j as usize, c));
        }
        if !inside || stencil.is_empty() {
            continue;
        }
        let mut acc = zero.clone();
        for (j, c) in stencil {
            axpy(&mut acc, c, &xs[j]);
        }
        valid.push((p, acc));
    }
    // longest run of consecutive indices, earliest on ties
    let (mut best, mut run) = ((0, 0), (0, 0));
    for k in 0..valid.len() {
        if k > 0 && valid[k].0 == valid[k - 1].0 + 1 {
            run.1 = k + 1;
        } else {
            run = (k, k + 1);
        }
        if run.1 - run.0 > best.1 - best.0 {
            best = run;
        }
    }
    let first = valid.get(best.0).map_or(0, |v| v.0);
    let out = valid.drain(best.0..best.1).map(|v| v.1).collect();
    (first, out)
}

pub fn apply_rational(mask: &Mask, xs: &[Rational]) -> (i64, Vec<Rational>) {
    apply_linear(mask, xs, Rational::zero(), |acc, c, x| *acc += c * x)
}

pub fn apply_vectors(mask: &Mask, xs: &[Vec<f64>]) -> (i64, Vec<Vec<f64>>) {
    let dim = xs[0].len();
    apply_linear(mask, xs, vec![0.0; dim], |acc, c, x| {
        let c = geosubdiv::mask::rational_to_f64(c);
        for (a, b) in acc.iter_mut().zip(x) {
            *a += c * b;
        }
    })
}

/// Same rule on a closed polygon, indices taken mod `n`.
pub fn apply_vectors_cyclic(mask: &Mask, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = mask.dilation() as i64;
    let len = xs.len() as i64;
    (0..n * len)
        .map(|p| {
            let mut acc = vec![0.0; xs[0].len()];
            for (k, c) in mask.coeffs().iter().enumerate() {
                let d = p - (mask.offset() + k as i64);
                if d.rem_euclid(n) != 0 || c.is_zero() {
                    continue;
                }
                let j = (d / n).rem_euclid(len) as usize;
                let c = geosubdiv::mask::rational_to_f64(c);
                for (a, b) in acc.iter_mut().zip(&xs[j]) {
                    *a += c * b;
                }
            }
            acc
        })
        .collect()
}

pub fn random_rational(rng: &mut StdRng) -> Rational {
    ratio(rng.gen_range(-50..=50), rng.gen_range(1..=12))
}

/// Poincaré-disk distance, `acosh(1 + 2 |u - v|^2 / ((1 - |u|^2)(1 - |v|^2)))`.
pub fn poincare_dist(u: [f64; 2], v: [f64; 2]) -> f64 {
    let du = (u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2);
    let nu = 1.0 - u[0] * u[0] - u[1] * u[1];
    let nv = 1.0 - v[0] * v[0] - v[1] * v[1];
    (1.0 + 2.0 * du / (nu * nv)).acosh()
}

pub fn random_disk(rng: &mut StdRng, radius: f64) -> [f64; 2] {
    loop {
        let p = [rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)];
        if p[0].hypot(p[1]) < radius {
            return p;
        }
    }
}

pub fn disk_point(p: [f64; 2]) -> ManifoldPoint {
    ManifoldPoint::from_disk(p[0], p[1]).unwrap()
}

/// Random SPD matrix `A A^T + eps I`, row-major.
pub fn random_spd(rng: &mut StdRng, n: usize) -> ManifoldPoint {
    let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = if i == j { 0.2 } else { 0.0 };
            for k in 0..n {
                s += a[i * n + k] * a[j * n + k];
            }
            m[i * n + j] = s;
        }
    }
    ManifoldPoint::new(Manifold::Spd(n), m).unwrap()
}

/// Weighted sum of squared disk distances.
pub fn disk_objective(points: &[[f64; 2]], weights: &[f64], x: [f64; 2]) -> f64 {
    points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * poincare_dist(*p, x).powi(2))
        .sum()
}

/// Three nested grids over the disk, each zooming on `+-3` cells around the
/// previous best; the final cell width is about `1e-6`.
pub fn grid_minimizer(f: impl Fn([f64; 2]) -> f64) -> [f64; 2] {
    let mut center = [0.0, 0.0];
    let mut half = 0.99;
    let mut best = center;
    for _ in 0..3 {
        let steps = 400;
        let h = 2.0 * half / steps as f64;
        let mut best_f = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let p = [center[0] - half + h * i as f64, center[1] - half + h * j as f64];
                if p[0] * p[0] + p[1] * p[1] >= 0.9999 {
                    continue;
                }
                let v = f(p);
                if v < best_f {
                    best_f = v;
                    best = p;
                }
            }
        }
        center = best;
        half = 3.0 * h;
    }
    best
}
