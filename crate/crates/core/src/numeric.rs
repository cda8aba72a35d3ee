//! Floating-point helpers shared across modules.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;
/// `pi^2 / 6`.
pub const PI_SQUARED_OVER_6: f64 = 1.644_934_066_848_226_436_47;

/// Natural log of a big integer, accurate to double precision for any size.
pub fn big_ln(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln(0)");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64 bits fit");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `a / b` as a double without materializing either operand as a float.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    assert!(!b.is_zero(), "division by zero");
    if a.is_zero() {
        return 0.0;
    }
    let shift = (b.bits() as i64 - a.bits() as i64 + 64).max(0) as u64;
    let q: BigUint = (a << shift) / b;
    let qf = q.to_f64().unwrap_or(f64::INFINITY);
    if shift > 1000 {
        (qf.ln() - shift as f64 * std::f64::consts::LN_2).exp()
    } else {
        qf / 2f64.powi(shift as i32)
    }
}

/// Rounds to 12 significant digits for stable textual output.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Median and quartiles of an unsorted slice (linear interpolation).
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let q = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    (q(0.25), q(0.5), q(0.75))
}
