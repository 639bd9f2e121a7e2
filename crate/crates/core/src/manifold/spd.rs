//! Symmetric positive definite matrices with the affine-invariant metric
//! `<U, V>_P = tr(P^{-1} U P^{-1} V)`.
//!
//! Points and tangent vectors are stored row-major. All maps go through the
//! symmetric eigendecomposition of a congruence-transported matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

fn to_matrix(n: usize, c: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, c)
}

fn to_coords(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(0.5 * (m[(i, j)] + m[(j, i)]));
        }
    }
    out
}

/// `V f(Lambda) V^T` for symmetric `m`.
fn sym_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// `(P^{1/2}, P^{-1/2})`.
fn sqrt_pair(p: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let sym = (p + p.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let v = &eig.eigenvectors;
    let s = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let si = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    (v * s * v.transpose(), v * si * v.transpose())
}

pub fn validate(n: usize, c: &[f64]) -> Result<()> {
    let m = to_matrix(n, c);
    let scale = m.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidPoint(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    let eig = SymmetricEigen::new(m);
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::InvalidPoint("matrix not positive definite".into()));
    }
    Ok(())
}

pub fn dist(n: usize, x: &[f64], y: &[f64]) -> f64 {
    let (_, pi) = sqrt_pair(&to_matrix(n, x));
    let m = &pi * to_matrix(n, y) * &pi;
    let eig = SymmetricEigen::new((&m + m.transpose()) * 0.5);
    eig.eigenvalues.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt()
}

pub fn exp(n: usize, x: &[f64], v: &[f64]) -> Vec<f64> {
    let (ps, pi) = sqrt_pair(&to_matrix(n, x));
    let inner = &pi * to_matrix(n, v) * &pi;
    let e = sym_apply(&inner, f64::exp);
    to_coords(&(&ps * e * &ps))
}

pub fn log(n: usize, x: &[f64], y: &[f64]) -> Vec<f64> {
    let (ps, pi) = sqrt_pair(&to_matrix(n, x));
    let inner = &pi * to_matrix(n, y) * &pi;
    let l = sym_apply(&inner, f64::ln);
    to_coords(&(&ps * l * &ps))
}

pub fn inner(n: usize, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let (_, pi) = sqrt_pair(&to_matrix(n, x));
    let a = &pi * to_matrix(n, u) * &pi;
    let b = &pi * to_matrix(n, v) * &pi;
    a.component_mul(&b).sum()
}

pub fn norm(n: usize, x: &[f64], v: &[f64]) -> f64 {
    let (_, pi) = sqrt_pair(&to_matrix(n, x));
    (&pi * to_matrix(n, v) * &pi).norm()
}
