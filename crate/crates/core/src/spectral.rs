//! Analytic constants of a recurrence: characteristic roots, the Binet leading
//! coefficient `a_1`, and the Lekkerkerker constants `C_Lek`, `d`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{big_ln, big_ratio};
use crate::poly;
use crate::recurrence::{Recurrence, SequenceTable};
use crate::zeck::LegalityAutomaton;

/// Required separation `lambda_1 - |lambda_2|`.
const DOMINANCE_GAP: f64 = 1e-9;
const BINET_TOLERANCE: f64 = 1e-12;

/// Characteristic polynomial `x^L - c_1 x^{L-1} - ... - c_L`, ascending.
pub fn char_poly(rec: &Recurrence) -> Vec<f64> {
    let l = rec.len();
    let mut p = vec![0.0; l + 1];
    p[l] = 1.0;
    for i in 1..=l {
        p[l - i] = -(rec.c(i) as f64);
    }
    p
}

/// Roots of the characteristic polynomial, largest modulus first. The first is
/// the real dominant root `lambda_1 > 1`.
pub fn char_roots(rec: &Recurrence) -> Result<Vec<Complex64>> {
    let p = char_poly(rec);
    let mut roots = poly::roots(&p)?;
    let top = roots[0];
    if top.im != 0.0 || top.re <= 1.0 {
        return Err(Error::RootFinding(format!(
            "dominant root {top} is not real and greater than 1"
        )));
    }
    // Refine lambda_1 on the real line by bisection-safeguarded Newton.
    let dp = poly::derivative(&p);
    let mut x = top.re;
    for _ in 0..50 {
        let step = poly::eval_real(&p, x) / poly::eval_real(&dp, x);
        x -= step;
        if step.abs() < 1e-17 * x {
            break;
        }
    }
    roots[0] = Complex64::new(x, 0.0);
    if let Some(second) = roots.get(1) {
        if x - second.norm() <= DOMINANCE_GAP {
            return Err(Error::RootFinding(format!(
                "dominant root {x} is not separated from |{second}|"
            )));
        }
    }
    Ok(roots)
}

/// `G_n / lambda_1^n` evaluated in log space.
pub fn binet_ratio(table: &SequenceTable, lambda1: f64, n: usize) -> Result<f64> {
    let g = table.get(n)?;
    Ok((big_ln(g) - n as f64 * lambda1.ln()).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct BinetEstimate {
    pub a1: f64,
    /// Depth of the deeper of the two evaluations.
    pub depth: usize,
    /// `|G_n/lambda^n - G_m/lambda^m|` between the two evaluations.
    pub agreement: f64,
}

/// Depth at which `(|lambda_2|/lambda_1)^n n^{L-2}` falls below `tol`.
pub fn binet_depth(lambda1: f64, lambda2_abs: f64, len: usize, tol: f64) -> usize {
    let ratio = lambda2_abs / lambda1;
    if ratio <= 0.0 {
        return 1;
    }
    let poly_deg = len.saturating_sub(2) as f64;
    (1..100_000)
        .find(|&n| {
            let n_f = n as f64;
            n_f * ratio.ln() + poly_deg * n_f.ln() < tol.ln()
        })
        .unwrap_or(100_000)
}

/// Leading Binet coefficient as the limit of `G_n / lambda_1^n`.
///
/// Evaluates at the smallest depth where the subdominant term is below `tol`
/// (at least 200) and at 50 beyond it; the two must agree within `tol`.
pub fn binet_a1(
    table: &SequenceTable,
    lambda1: f64,
    lambda2_abs: f64,
    tol: f64,
) -> Result<BinetEstimate> {
    let base = binet_depth(lambda1, lambda2_abs, table.recurrence().len(), tol * 1e-2).max(200);
    let deep = base + 50;
    if table.len() < deep {
        return Err(Error::InsufficientDepth(format!(
            "need {deep} terms for tolerance {tol:e}, table has {}",
            table.len()
        )));
    }
    let shallow_value = binet_ratio(table, lambda1, base)?;
    let deep_value = binet_ratio(table, lambda1, deep)?;
    let agreement = (deep_value - shallow_value).abs();
    if agreement > tol {
        return Err(Error::InsufficientDepth(format!(
            "estimates at n = {base} and {deep} differ by {agreement:e}"
        )));
    }
    Ok(BinetEstimate {
        a1: deep_value,
        depth: deep,
        agreement,
    })
}

/// Exact per-interval totals over `[G_n, G_{n+1})` for `n = 1..=n_max`.
#[derive(Debug, Clone)]
pub struct SummandTotals {
    /// `counts[n-1]` = number of legal decompositions with leading index `n`.
    pub counts: Vec<BigUint>,
    /// `totals[n-1]` = `S(n)`, the sum of `k(m)` over the interval.
    pub totals: Vec<BigUint>,
}

impl SummandTotals {
    pub fn count(&self, n: usize) -> &BigUint {
        &self.counts[n - 1]
    }

    pub fn total(&self, n: usize) -> &BigUint {
        &self.totals[n - 1]
    }

    /// `N_gaps(n) = S(n) - (G_{n+1} - G_n)`.
    pub fn gaps(&self, n: usize) -> BigUint {
        self.total(n) - self.count(n)
    }

    pub fn mean(&self, n: usize) -> f64 {
        big_ratio(self.total(n), self.count(n))
    }
}

/// Linear dynamic program over the legality automaton carrying, per state, the
/// number of legal prefixes and their total summand count.
///
/// Every state accepts, so after `t` digits the sums over states are exactly
/// the count and `S(t)` for the interval with leading index `t`.
pub fn summand_totals(rec: &Recurrence, n_max: usize) -> SummandTotals {
    let automaton = LegalityAutomaton::new(rec);
    let states = automaton.states();
    let mut count = vec![BigUint::zero(); states];
    let mut total = vec![BigUint::zero(); states];
    let mut counts = Vec::with_capacity(n_max);
    let mut totals = Vec::with_capacity(n_max);
    for t in 1..=n_max {
        let mut next_count = vec![BigUint::zero(); states];
        let mut next_total = vec![BigUint::zero(); states];
        if t == 1 {
            for d in 1..=automaton.max_digit(0) {
                let ns = automaton.step(0, d).expect("within cap");
                next_count[ns] += 1u32;
                next_total[ns] += d;
            }
        } else {
            for s in 0..states {
                if count[s].is_zero() {
                    continue;
                }
                for d in 0..=automaton.max_digit(s) {
                    let ns = automaton.step(s, d).expect("within cap");
                    next_count[ns] += &count[s];
                    next_total[ns] += &total[s];
                    if d > 0 {
                        next_total[ns] += &count[s] * d;
                    }
                }
            }
        }
        count = next_count;
        total = next_total;
        counts.push(count.iter().sum());
        totals.push(total.iter().sum());
    }
    SummandTotals { counts, totals }
}

#[derive(Debug, Clone, Serialize)]
pub struct LekkerkerkerFit {
    pub c_lek: f64,
    pub d: f64,
    /// Largest absolute deviation of an exact mean from the fitted line.
    pub residual: f64,
    pub n_lo: usize,
    pub n_hi: usize,
    /// Exact means `S(n)/(G_{n+1}-G_n)` for `n_lo..=n_hi`.
    pub means: Vec<f64>,
    /// Differences of consecutive means.
    pub successive_slopes: Vec<f64>,
}

/// Least-squares line through the exact mean summand counts for `n_lo..=n_hi`.
pub fn lekkerkerker_constants(
    table: &SequenceTable,
    n_lo: usize,
    n_hi: usize,
) -> Result<LekkerkerkerFit> {
    if n_lo == 0 || n_hi < n_lo + 4 {
        return Err(Error::InvalidArgument(format!(
            "fit range {n_lo}..={n_hi} needs n_lo >= 1 and at least 5 points"
        )));
    }
    let sums = summand_totals(table.recurrence(), n_hi);
    if table.len() > n_hi {
        for n in n_lo..=n_hi {
            debug_assert_eq!(sums.count(n), &table.width(n)?);
        }
    }
    let xs: Vec<f64> = (n_lo..=n_hi).map(|n| n as f64).collect();
    let means: Vec<f64> = (n_lo..=n_hi).map(|n| sums.mean(n)).collect();
    let (c_lek, d) = least_squares(&xs, &means);
    let residual = xs
        .iter()
        .zip(&means)
        .map(|(x, y)| (y - (c_lek * x + d)).abs())
        .fold(0.0, f64::max);
    let successive_slopes = means.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(LekkerkerkerFit {
        c_lek,
        d,
        residual,
        n_lo,
        n_hi,
        means,
        successive_slopes,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralDiagnostics {
    /// Largest relative residual of a characteristic root.
    pub max_root_residual: f64,
    /// Largest coefficient error of `prod (x - root)` against the characteristic polynomial.
    pub reconstruction_error: f64,
    pub binet: BinetEstimate,
    pub lekkerkerker: LekkerkerkerFit,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralData {
    pub lambda1: f64,
    #[serde(serialize_with = "serialize_roots")]
    pub roots: Vec<Complex64>,
    pub lambda2_abs: f64,
    pub a1: f64,
    pub c_lek: f64,
    pub d_intercept: f64,
    pub diagnostics: SpectralDiagnostics,
}

pub(crate) fn serialize_roots<S: serde::Serializer>(
    roots: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(roots.len()))?;
    for z in roots {
        seq.serialize_element(&[crate::numeric::sig12(z.re), crate::numeric::sig12(z.im)])?;
    }
    seq.end()
}

impl SpectralData {
    pub fn compute(rec: &Recurrence) -> Result<Self> {
        let roots = char_roots(rec)?;
        let lambda1 = roots[0].re;
        let lambda2_abs = roots.get(1).map_or(0.0, |z| z.norm());

        let p = char_poly(rec);
        let max_root_residual = roots
            .iter()
            .map(|&z| poly::relative_residual(&p, z))
            .fold(0.0, f64::max);
        let rebuilt = poly::from_roots(&roots);
        let reconstruction_error = rebuilt
            .iter()
            .zip(&p)
            .map(|(z, &c)| (z - c).norm())
            .fold(0.0, f64::max);

        let depth =
            binet_depth(lambda1, lambda2_abs, rec.len(), BINET_TOLERANCE * 1e-2).max(200) + 51;
        let table = SequenceTable::new(rec.clone(), depth.max(80));
        let binet = binet_a1(&table, lambda1, lambda2_abs, BINET_TOLERANCE)?;

        // Means converge like (|lambda_2|/lambda_1)^n; fit where that is negligible.
        let n_hi = binet_depth(lambda1, lambda2_abs, rec.len(), 1e-13).clamp(60, 3000);
        let lekkerkerker = lekkerkerker_constants(&table, n_hi - 20, n_hi)?;

        Ok(SpectralData {
            lambda1,
            lambda2_abs,
            a1: binet.a1,
            c_lek: lekkerkerker.c_lek,
            d_intercept: lekkerkerker.d,
            roots,
            diagnostics: SpectralDiagnostics {
                max_root_residual,
                reconstruction_error,
                binet,
                lekkerkerker,
            },
        })
    }
}
