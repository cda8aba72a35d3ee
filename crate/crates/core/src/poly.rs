//! Real-coefficient polynomials in ascending order (`coeffs[i]` multiplies `s^i`)
//! and their complex roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn eval_real(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

/// Drops zero leading coefficients.
pub fn trim(coeffs: &[f64]) -> &[f64] {
    let end = coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |p| p + 1);
    &coeffs[..end]
}

/// `sum |c_i| |z|^i`, the natural scale for a residual at `z`.
pub fn magnitude_scale(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * r + c.abs())
}

/// Relative residual `|p(z)| / sum |c_i||z|^i`.
pub fn relative_residual(coeffs: &[f64], z: Complex64) -> f64 {
    eval(coeffs, z).norm() / magnitude_scale(coeffs, z).max(f64::MIN_POSITIVE)
}

/// Synthetic division by `(s - root)`; returns the quotient and the remainder.
pub fn deflate(coeffs: &[f64], root: f64) -> (Vec<f64>, f64) {
    let d = coeffs.len() - 1;
    let mut q = vec![0.0; d];
    let mut carry = 0.0;
    for i in (0..=d).rev() {
        let v = coeffs[i] + carry * root;
        if i == 0 {
            return (q, v);
        }
        q[i - 1] = v;
        carry = v;
    }
    unreachable!()
}

/// Newton iterations on `p` from `z`; stops when the step stalls.
pub fn newton_polish(coeffs: &[f64], dcoeffs: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..60 {
        let p = eval(coeffs, z);
        let dp = eval(dcoeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        let before = eval(coeffs, z).norm();
        let after = eval(coeffs, next).norm();
        if after > before {
            break;
        }
        z = next;
        if step.norm() <= 1e-17 * z.norm().max(1e-300) {
            break;
        }
    }
    z
}

/// All complex roots with multiplicity: companion-matrix eigenvalues followed by
/// one Newton polish per root against the original coefficients.
///
/// Roots come back sorted by decreasing modulus. Fails if any polished root has
/// relative residual above `1e-12`.
pub fn roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let p = trim(coeffs);
    if p.is_empty() {
        return Err(Error::RootFinding("zero polynomial".into()));
    }
    let d = p.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = p[d];
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        companion[(i, d - 1)] = -p[i] / lead;
    }
    let eig = companion.complex_eigenvalues();
    let dp = derivative(p);
    let mut out: Vec<Complex64> = eig
        .iter()
        .map(|&z| {
            let z = Complex64::new(z.re, z.im);
            let polished = newton_polish(p, &dp, z);
            // Snap numerically real roots onto the real line.
            if polished.im.abs() <= 1e-13 * polished.norm().max(1.0) {
                let re = newton_polish(p, &dp, Complex64::new(polished.re, 0.0));
                if re.im == 0.0 && relative_residual(p, re) <= relative_residual(p, polished) {
                    return re;
                }
            }
            polished
        })
        .collect();
    for z in &out {
        let r = relative_residual(p, *z);
        if !(r <= 1e-12) {
            return Err(Error::RootFinding(format!(
                "root {z} of a degree-{d} polynomial has relative residual {r:e}"
            )));
        }
    }
    out.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(out)
}

/// Smallest pairwise distance among `roots` (infinity for fewer than two).
pub fn min_pairwise_distance(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

/// Coefficients of `prod (s - r_i)` for complex roots, returned as complex values.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &v) in c.iter().enumerate() {
            next[i + 1] += v;
            next[i] -= v * r;
        }
        c = next;
    }
    c
}
