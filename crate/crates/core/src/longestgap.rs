//! Distribution of the longest gap: the counting generating function, roots of
//! its denominator `T_f`, the partial-fraction CDF, the double-exponential
//! limit law and the mean and variance.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{big_ln, big_ratio, EULER_GAMMA, PI_SQUARED_OVER_6};
use crate::poly;
use crate::recurrence::{Recurrence, SequenceTable};
use crate::spectral::char_roots;
use crate::zeck::{enumerate_interval, LegalityAutomaton, TrailingGap};

/// Two roots closer than this count as a multiple root.
pub const ROOT_SEPARATION_TOL: f64 = 1e-8;
/// Lower bound demanded of `|T_f'(alpha)|` at every root.
pub const DERIVATIVE_FLOOR: f64 = 1e-8;
/// Smallest `f` for which the full root validation is expected to hold.
pub const MIN_VALIDATED_F: usize = 10;

/// `M(s) = 1 - sum c_{j+1} s^{j+1}`, ascending integer coefficients.
pub fn m_coeffs(rec: &Recurrence) -> Vec<i64> {
    let mut m = vec![0i64; rec.len() + 1];
    m[0] = 1;
    for &(j, c) in rec.sparse() {
        m[j + 1] -= c as i64;
    }
    m
}

/// `R(s) = sum c_{j+1} s^j`, with one subtracted from the top coefficient.
pub fn r_coeffs(rec: &Recurrence) -> Vec<i64> {
    let mut r = vec![0i64; rec.len()];
    for &(j, c) in rec.sparse() {
        r[j] += c as i64;
    }
    r[rec.j_last()] -= 1;
    while r.len() > 1 && r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn to_f64(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&c| c as f64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GapGrammarPolynomials {
    pub m_poly: Vec<i64>,
    pub r_poly: Vec<i64>,
    pub g_poly: Vec<f64>,
    pub j_last: usize,
    pub lambda1: f64,
    pub lambda2_abs: f64,
    /// Standing-assumption violations found while building; empty when strict.
    pub violations: Vec<String>,
}

/// Refuses recurrences whose `M` or `R` has a repeated or unit-modulus root.
pub fn build_polynomials(rec: &Recurrence) -> Result<GapGrammarPolynomials> {
    let p = build_polynomials_relaxed(rec)?;
    match p.violations.first() {
        Some(v) => Err(Error::Assumption(v.clone())),
        None => Ok(p),
    }
}

/// Like [`build_polynomials`], but records assumption violations instead of failing.
pub fn build_polynomials_relaxed(rec: &Recurrence) -> Result<GapGrammarPolynomials> {
    let roots = char_roots(rec)?;
    let lambda1 = roots[0].re;
    let lambda2_abs = roots.get(1).map_or(0.0, |z| z.norm());
    let m_poly = m_coeffs(rec);
    let r_poly = r_coeffs(rec);
    let (q, rem) = poly::deflate(&to_f64(&m_poly), 1.0 / lambda1);
    if rem.abs() > 1e-9 {
        return Err(Error::RootFinding(format!(
            "M(1/lambda_1) = {rem:e} is not zero"
        )));
    }
    let g_poly: Vec<f64> = q.iter().map(|c| -c).collect();
    let mut violations = Vec::new();
    for (name, coeffs) in [("M", &m_poly), ("R", &r_poly)] {
        let rs = poly::roots(&to_f64(coeffs))?;
        if poly::min_pairwise_distance(&rs) < ROOT_SEPARATION_TOL {
            violations.push(format!("{name}(s) has a multiple root"));
        }
        if let Some(z) = rs.iter().find(|z| (z.norm() - 1.0).abs() < 1e-9) {
            violations.push(format!("{name}(s) has the unit-modulus root {z}"));
        }
    }
    Ok(GapGrammarPolynomials {
        m_poly,
        r_poly,
        g_poly,
        j_last: rec.j_last(),
        lambda1,
        lambda2_abs,
        violations,
    })
}

impl GapGrammarPolynomials {
    pub fn m_at(&self, s: Complex64) -> Complex64 {
        poly::eval(&to_f64(&self.m_poly), s)
    }

    pub fn r_at(&self, s: Complex64) -> Complex64 {
        poly::eval(&to_f64(&self.r_poly), s)
    }

    pub fn g_at(&self, s: Complex64) -> Complex64 {
        poly::eval(&self.g_poly, s)
    }

    /// `K = lambda_1 R(1/lambda_1) / G(1/lambda_1)`.
    pub fn k_const(&self) -> f64 {
        let x = 1.0 / self.lambda1;
        self.lambda1 * poly::eval_real(&to_f64(&self.r_poly), x) / poly::eval_real(&self.g_poly, x)
    }

    /// `T_f(s) = M(s) + s^f R(s)`, trimmed.
    pub fn tf_coeffs(&self, f: usize) -> Vec<i64> {
        let mut t = self.m_poly.clone();
        t.resize(t.len().max(f + self.r_poly.len()), 0);
        for (i, &r) in self.r_poly.iter().enumerate() {
            t[f + i] += r;
        }
        while t.len() > 1 && t.last() == Some(&0) {
            t.pop();
        }
        t
    }

    pub fn r_min(&self) -> f64 {
        let outer = if self.lambda2_abs > 0.0 {
            (1.0 / self.lambda2_abs).min(1.0)
        } else {
            1.0
        };
        (outer / self.lambda1).sqrt()
    }

    pub fn r_max(&self) -> f64 {
        let r = poly::roots(&to_f64(&self.r_poly)).unwrap_or_default();
        2.0 * r.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }
}

/// Numerator and exponent choices for the counting generating function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Numerator {
    /// `s R(s)`.
    ShiftedRemainder,
    /// `1 - s^{j_L}`.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GfConvention {
    pub numerator: Numerator,
    /// Denominator is `M(s) + s^{f + exponent_offset} R(s)`.
    pub exponent_offset: usize,
    pub trailing: TrailingGap,
}

/// The convention that reproduces brute-force counts.
pub const PINNED: GfConvention = GfConvention {
    numerator: Numerator::ShiftedRemainder,
    exponent_offset: 0,
    trailing: TrailingGap::Excluded,
};

pub fn candidate_conventions() -> Vec<GfConvention> {
    let mut out = Vec::new();
    for numerator in [Numerator::ShiftedRemainder, Numerator::Printed] {
        for exponent_offset in [0, 1] {
            for trailing in [TrailingGap::Excluded, TrailingGap::Included] {
                out.push(GfConvention {
                    numerator,
                    exponent_offset,
                    trailing,
                });
            }
        }
    }
    out
}

/// Power-series coefficients `0..=n_max` of the generating function under
/// `conv`, via the linear recurrence of its denominator.
pub fn convention_series(rec: &Recurrence, f: usize, conv: GfConvention, n_max: usize) -> Vec<BigInt> {
    let m = m_coeffs(rec);
    let r = r_coeffs(rec);
    let e = f + conv.exponent_offset;
    let mut t = m.clone();
    t.resize(t.len().max(e + r.len()), 0);
    for (i, &c) in r.iter().enumerate() {
        t[e + i] += c;
    }
    let numerator: Vec<i64> = match conv.numerator {
        Numerator::ShiftedRemainder => std::iter::once(0).chain(r.iter().copied()).collect(),
        Numerator::Printed => {
            let mut v = vec![0i64; rec.j_last() + 1];
            v[0] += 1;
            v[rec.j_last()] -= 1;
            v
        }
    };
    series_divide(&numerator, &t, n_max)
}

/// Coefficients of `num / den` up to `s^{n_max}`; requires `den[0] = 1`.
fn series_divide(num: &[i64], den: &[i64], n_max: usize) -> Vec<BigInt> {
    debug_assert_eq!(den[0], 1);
    let taps: Vec<(usize, BigInt)> = den
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, BigInt::from(c)))
        .collect();
    let mut u: Vec<BigInt> = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        let mut v = BigInt::from(num.get(k).copied().unwrap_or(0));
        for (i, c) in &taps {
            if *i > k {
                break;
            }
            v -= c * &u[k - i];
        }
        u.push(v);
    }
    u
}

/// `count_less_than` for every `n` in `0..=n_max` at once.
pub fn count_series(rec: &Recurrence, f: usize, n_max: usize) -> Result<Vec<BigUint>> {
    if f <= rec.j_last() {
        return Err(Error::GapBound {
            f,
            j_last: rec.j_last(),
        });
    }
    convention_series(rec, f, PINNED, n_max)
        .into_iter()
        .map(|v| {
            v.to_biguint()
                .ok_or_else(|| Error::Malformed(format!("negative series coefficient {v}")))
        })
        .collect()
}

/// Number of `m` in `[G_n, G_{n+1})` whose longest gap is below `f`.
pub fn count_less_than(table: &SequenceTable, n: usize, f: usize) -> Result<BigUint> {
    let c = count_series(table.recurrence(), f, n)?.pop().expect("n_max + 1 entries");
    if let Ok(w) = table.width(n) {
        if c > w {
            return Err(Error::Malformed(format!(
                "count {c} exceeds the interval width {w}"
            )));
        }
    }
    Ok(c)
}

/// Same count by a transfer pass over (automaton state, distance to the last
/// non-zero digit); valid for every `f >= 1`.
pub fn count_less_than_automaton(rec: &Recurrence, n: usize, f: usize) -> BigUint {
    if n == 0 || f == 0 {
        return BigUint::zero();
    }
    let automaton = LegalityAutomaton::new(rec);
    let cap = f - 1;
    let mut cur: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
    for d in 1..=automaton.max_digit(0) {
        *cur.entry((automaton.step(0, d).expect("legal"), 0)).or_default() += 1u32;
    }
    for _ in 1..n {
        let mut next: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
        for ((s, run), count) in cur {
            for d in 0..=automaton.max_digit(s) {
                let ns = automaton.step(s, d).expect("legal");
                if d == 0 {
                    *next.entry((ns, (run + 1).min(cap))).or_default() += &count;
                } else if run + 1 < f {
                    *next.entry((ns, 0)).or_default() += &count;
                }
            }
        }
        cur = next;
    }
    cur.into_values().sum()
}

/// Brute-force longest-gap histogram over the interval: `hist[g]` = number of
/// `m` with longest gap `g`.
pub fn brute_longest_histogram(
    table: &SequenceTable,
    n: usize,
    cap: u64,
    trailing: TrailingGap,
) -> Result<Vec<u64>> {
    let mut hist = vec![0u64; n + 2];
    let mut it = enumerate_interval(table, n, cap)?;
    while let Some(digits) = it.next_digits() {
        let (mut longest, mut last) = (0, 0);
        for (p, &d) in digits.iter().enumerate().skip(1) {
            if d > 0 {
                longest = longest.max(p - last);
                last = p;
            }
        }
        if trailing == TrailingGap::Included {
            longest = longest.max(n - last);
        }
        hist[longest] += 1;
    }
    Ok(hist)
}

#[derive(Debug, Clone, Serialize)]
pub struct RootCheck {
    pub min_pairwise_distance: f64,
    pub min_derivative: f64,
    pub max_residual: f64,
    pub max_modulus: f64,
    pub inside_r_min: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl RootCheck {
    /// Roots simple enough for the partial-fraction expansion.
    pub fn simple(&self) -> bool {
        self.min_pairwise_distance > ROOT_SEPARATION_TOL && self.min_derivative > DERIVATIVE_FLOOR
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.min_pairwise_distance <= ROOT_SEPARATION_TOL {
            out.push(format!(
                "roots only {:e} apart",
                self.min_pairwise_distance
            ));
        }
        if self.min_derivative <= DERIVATIVE_FLOOR {
            out.push(format!("|T_f'| drops to {:e}", self.min_derivative));
        }
        if self.max_residual >= 1e-10 {
            out.push(format!("residual {:e}", self.max_residual));
        }
        if self.max_modulus >= self.r_max {
            out.push(format!(
                "root of modulus {} outside r_max = {}",
                self.max_modulus, self.r_max
            ));
        }
        if self.inside_r_min != 1 {
            out.push(format!(
                "{} roots inside r_min = {}",
                self.inside_r_min, self.r_min
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TfRoots {
    pub f: usize,
    #[serde(serialize_with = "crate::spectral::serialize_roots")]
    pub roots: Vec<Complex64>,
    pub check: RootCheck,
}

/// Roots of `T_f` with their validation report, whether or not it passes.
pub fn tf_roots_unchecked(p: &GapGrammarPolynomials, f: usize) -> Result<TfRoots> {
    let t = to_f64(&p.tf_coeffs(f));
    let dt = poly::derivative(&t);
    let roots = poly::roots(&t)?;
    let r_min = p.r_min();
    let check = RootCheck {
        min_pairwise_distance: poly::min_pairwise_distance(&roots),
        min_derivative: roots
            .iter()
            .map(|&z| poly::eval(&dt, z).norm())
            .fold(f64::INFINITY, f64::min),
        max_residual: roots
            .iter()
            .map(|&z| poly::eval(&t, z).norm())
            .fold(0.0, f64::max),
        max_modulus: roots.first().map_or(0.0, |z| z.norm()),
        inside_r_min: roots.iter().filter(|z| z.norm() < r_min).count(),
        r_min,
        r_max: p.r_max(),
    };
    Ok(TfRoots { f, roots, check })
}

/// Roots of `T_f`, failing unless every validation passes.
pub fn tf_roots(p: &GapGrammarPolynomials, f: usize) -> Result<TfRoots> {
    let r = tf_roots_unchecked(p, f)?;
    let failures = r.check.failures();
    if failures.is_empty() {
        Ok(r)
    } else {
        Err(Error::RootValidation {
            f,
            reason: failures.join("; "),
        })
    }
}

/// The smallest root of `T_f` by Newton from `1/lambda_1`, checked against the
/// fixed-point relation `alpha = 1/lambda_1 + alpha^f R(alpha) / G(alpha)`.
pub fn alpha1(p: &GapGrammarPolynomials, f: usize) -> Result<f64> {
    let x0 = 1.0 / p.lambda1;
    let r = to_f64(&p.r_poly);
    let dr = poly::derivative(&r);
    let dg = poly::derivative(&p.g_poly);
    let (rv, gv) = (poly::eval_real(&r, x0), poly::eval_real(&p.g_poly, x0));
    let (drv, dgv) = (poly::eval_real(&dr, x0), poly::eval_real(&dg, x0));
    let slope = f as f64 * x0.powi(f as i32 - 1) * rv / gv
        + x0.powi(f as i32) * (drv * gv - rv * dgv) / (gv * gv);
    if !(slope.abs() < 0.5) {
        return Err(Error::NonContraction(f));
    }
    let t = to_f64(&p.tf_coeffs(f));
    let dt = poly::derivative(&t);
    let mut x = x0;
    for _ in 0..100 {
        let step = poly::eval_real(&t, x) / poly::eval_real(&dt, x);
        x -= step;
        if step.abs() <= 1e-16 * x {
            break;
        }
    }
    let fixed = x0 + x.powi(f as i32) * poly::eval_real(&r, x) / poly::eval_real(&p.g_poly, x);
    if (x - fixed).abs() > 1e-12 {
        return Err(Error::NonContraction(f));
    }
    Ok(x)
}

/// `P(n, f)` from the partial-fraction expansion given `ln(G_{n+1} - G_n)`.
///
/// Each term is `-R(alpha)/T_f'(alpha) alpha^{-n}`; magnitudes are formed in
/// log-polar form and scaled by the largest before summing.
pub fn cdf_from_roots(
    p: &GapGrammarPolynomials,
    roots: &TfRoots,
    n: usize,
    ln_width: f64,
) -> Result<f64> {
    if !roots.check.simple() {
        return Err(Error::RootValidation {
            f: roots.f,
            reason: roots.check.failures().join("; "),
        });
    }
    let t = p.tf_coeffs(roots.f);
    if p.r_poly.len() + 1 >= t.len() {
        return Err(Error::InvalidArgument(format!(
            "T_{} has degree {} and leaves no proper fraction",
            roots.f,
            t.len() - 1
        )));
    }
    let dt = poly::derivative(&to_f64(&t));
    let terms: Vec<(f64, f64)> = roots
        .roots
        .iter()
        .map(|&a| {
            let coef = -p.r_at(a) / poly::eval(&dt, a);
            let log = coef.ln() - a.ln() * n as f64;
            (log.re, log.im)
        })
        .collect();
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let sum: Complex64 = terms
        .iter()
        .map(|&(re, im)| Complex64::from_polar((re - top).exp(), im))
        .sum();
    let scale = top - ln_width;
    if sum.re <= 0.0 {
        return Ok(sum.re * scale.exp());
    }
    let value = (sum.re.ln() + scale).exp();
    if !value.is_finite() {
        return Err(Error::Overflow(format!("P(n = {n}, f = {}) overflows", roots.f)));
    }
    Ok(value)
}

/// Exact CDF `P(n, f)` via the roots of `T_f`.
pub fn cdf_exact(table: &SequenceTable, p: &GapGrammarPolynomials, n: usize, f: usize) -> Result<f64> {
    let w = table.width(n)?;
    let roots = tf_roots_unchecked(p, f)?;
    cdf_from_roots(p, &roots, n, big_ln(&w))
}

/// `P(n, f)` as the exact big-integer ratio.
pub fn cdf_ratio(table: &SequenceTable, n: usize, f: usize) -> Result<f64> {
    let w = table.width(n)?;
    let c = if f <= table.recurrence().j_last() {
        count_less_than_automaton(table.recurrence(), n, f)
    } else {
        count_less_than(table, n, f)?
    };
    Ok(big_ratio(&c, &w))
}

/// `exp(-n K lambda_1^{-f})`.
pub fn cdf_asymptotic(p: &GapGrammarPolynomials, n: f64, f: usize) -> f64 {
    (-n * p.k_const() * p.lambda1.powi(-(f as i32))).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanVar {
    pub mean: f64,
    pub variance: f64,
}

impl MeanVar {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanVarMode {
    ExactSum,
    AsymptoticSum,
    ClosedForm,
}

impl std::str::FromStr for MeanVarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-sum" => Ok(MeanVarMode::ExactSum),
            "asymptotic-sum" => Ok(MeanVarMode::AsymptoticSum),
            "closed-form" => Ok(MeanVarMode::ClosedForm),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

pub fn mean_var_closed_form(p: &GapGrammarPolynomials, n: f64) -> MeanVar {
    let ll = p.lambda1.ln();
    MeanVar {
        mean: ((n * p.k_const()).ln() + EULER_GAMMA) / ll - 0.5,
        variance: PI_SQUARED_OVER_6 / (ll * ll),
    }
}

/// Truncation window `[l_n, h_n]` for the asymptotic sum.
pub fn truncation_window(p: &GapGrammarPolynomials, n: f64) -> Result<(usize, usize)> {
    let ll = p.lambda1.ln();
    let c = 0.5 / ll;
    let big_c = (6.0f64).max(4.0 * ll) / ll;
    let base = (n * p.k_const()).ln();
    let lo = (c * base).floor();
    let hi = (big_c * base).floor();
    if lo < 1.0 || hi < lo + 3.0 {
        return Err(Error::DegenerateWindow(format!("[{lo}, {hi}] at n = {n}")));
    }
    Ok((lo as usize, hi as usize))
}

/// Moments of `Y` from a CDF evaluated on `g = lo..=hi`, with the mass below
/// `lo` placed at `lo` and the mass above `hi` at `hi + 1`.
fn moments_from_cdf(lo: usize, values: &[f64]) -> MeanVar {
    let (mut m1, mut m2, mut prev) = (0.0, 0.0, 0.0);
    for (i, &pg) in values.iter().enumerate() {
        let g = (lo + i) as f64;
        let mass = pg - prev;
        m1 += g * mass;
        m2 += g * g * mass;
        prev = pg;
    }
    let g = (lo + values.len()) as f64;
    m1 += g * (1.0 - prev);
    m2 += g * g * (1.0 - prev);
    MeanVar {
        mean: m1 - 1.0,
        variance: m2 - m1 * m1,
    }
}

pub fn mean_var_asymptotic_sum(p: &GapGrammarPolynomials, n: f64) -> Result<MeanVar> {
    let (lo, hi) = truncation_window(p, n)?;
    let values: Vec<f64> = (lo..=hi).map(|g| cdf_asymptotic(p, n, g)).collect();
    Ok(moments_from_cdf(lo, &values))
}

/// `P(n, f)`, preferring the root expansion and falling back to the exact ratio.
pub fn cdf_best(table: &SequenceTable, p: &GapGrammarPolynomials, n: usize, f: usize) -> Result<f64> {
    if f > p.j_last {
        if let Ok(v) = cdf_exact(table, p, n, f) {
            return Ok(v);
        }
    }
    cdf_ratio(table, n, f)
}

pub fn mean_var_exact_sum(table: &SequenceTable, p: &GapGrammarPolynomials, n: usize) -> Result<MeanVar> {
    let mut values = Vec::new();
    for g in 1..=n + 1 {
        let v = cdf_best(table, p, n, g)?;
        values.push(v);
        if 1.0 - v < 1e-17 {
            break;
        }
    }
    Ok(moments_from_cdf(1, &values))
}

pub fn mean_var(
    p: &GapGrammarPolynomials,
    n: usize,
    mode: MeanVarMode,
    table: Option<&SequenceTable>,
) -> Result<MeanVar> {
    match mode {
        MeanVarMode::ClosedForm => Ok(mean_var_closed_form(p, n as f64)),
        MeanVarMode::AsymptoticSum => mean_var_asymptotic_sum(p, n as f64),
        MeanVarMode::ExactSum => {
            let table = table.ok_or_else(|| {
                Error::InvalidArgument("exact-sum needs a sequence table".into())
            })?;
            mean_var_exact_sum(table, p, n)
        }
    }
}

/// Longest run of heads in `n` tosses of a coin with heads probability `p`.
pub fn coin_run_baseline(n: f64, p: f64) -> Result<MeanVar> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} is not in (0, 1)")));
    }
    let l = (1.0 / p).ln();
    Ok(MeanVar {
        mean: (n * (1.0 - p)).ln() / l + EULER_GAMMA / l - 0.5,
        variance: PI_SQUARED_OVER_6 / (l * l) + 1.0 / 12.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LongestGapModel {
    pub n: usize,
    pub f_range: Vec<usize>,
    pub cdf_exact: BTreeMap<usize, f64>,
    pub cdf_asymptotic: BTreeMap<usize, f64>,
    pub k_const: f64,
    pub mean: f64,
    pub variance: f64,
    pub mode: MeanVarMode,
    pub r_min: f64,
    pub r_max: f64,
    pub alpha1: BTreeMap<usize, f64>,
}

impl LongestGapModel {
    /// Evaluates both CDFs over `f_range`; the exact one needs `table` to
    /// reach `n + 1`.
    pub fn compute(
        p: &GapGrammarPolynomials,
        table: Option<&SequenceTable>,
        n: usize,
        f_range: std::ops::RangeInclusive<usize>,
        mode: MeanVarMode,
    ) -> Result<Self> {
        let f_range: Vec<usize> = f_range.collect();
        let mut cdf_exact = BTreeMap::new();
        if let Some(t) = table {
            for &f in &f_range {
                cdf_exact.insert(f, cdf_best(t, p, n, f)?);
            }
        }
        let cdf_asymptotic = f_range
            .iter()
            .map(|&f| (f, cdf_asymptotic(p, n as f64, f)))
            .collect();
        let alpha1 = f_range
            .iter()
            .filter_map(|&f| alpha1(p, f).ok().map(|a| (f, a)))
            .collect();
        let mv = mean_var(p, n, mode, table)?;
        Ok(LongestGapModel {
            n,
            f_range,
            cdf_exact,
            cdf_asymptotic,
            k_const: p.k_const(),
            mean: mv.mean,
            variance: mv.variance,
            mode,
            r_min: p.r_min(),
            r_max: p.r_max(),
            alpha1,
        })
    }
}
