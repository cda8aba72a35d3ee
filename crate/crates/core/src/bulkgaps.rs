//! Gaps in the bulk: exact gap histograms over an interval, the closed-form
//! counts `X_{i,i+k}(n)`, the limiting distribution `P(k)`, and the distance
//! of individual gap measures from that limit.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{big_ratio, quartiles};
use crate::recurrence::{Recurrence, SequenceTable};
use crate::spectral::{summand_totals, SpectralData};
use crate::zeck::{enumerate_interval, gap_list, Decomposition, GapTally, LegalityAutomaton};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistogramSource {
    /// Brute force over every `m` in the interval.
    Enumeration,
    /// Exact transfer count over the legality automaton (no per-`m` work).
    TransferCount,
    /// Sums of `X_{i,i+k}(n)`.
    ClosedForm,
    Sampled,
}

/// Gap counts pooled over `[G_n, G_{n+1})`, zero gaps counted with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapHistogram {
    pub n: usize,
    #[serde(serialize_with = "serialize_counts")]
    pub counts: BTreeMap<usize, BigUint>,
    #[serde(serialize_with = "serialize_big")]
    pub total: BigUint,
    pub source: HistogramSource,
}

fn serialize_counts<S: serde::Serializer>(
    counts: &BTreeMap<usize, BigUint>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(counts.len()))?;
    for (k, v) in counts {
        map.serialize_entry(&k.to_string(), &v.to_string())?;
    }
    map.end()
}

fn serialize_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl GapHistogram {
    pub fn count(&self, k: usize) -> BigUint {
        self.counts.get(&k).cloned().unwrap_or_default()
    }

    /// `P_n(k)` as an exact ratio.
    pub fn ratio(&self, k: usize) -> BigRational {
        BigRational::new(self.count(k).into(), self.total.clone().into())
    }

    pub fn probability(&self, k: usize) -> f64 {
        big_ratio(&self.count(k), &self.total)
    }

    pub fn max_gap(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}

/// `G_j` with the boundary value `G_0 = 1`; negative subscripts are rejected.
///
/// `G_0 = 1` makes `G_{j+1} - G_j` count legal strings of length `j` for every
/// `j >= 0`, which is what the boundary terms of the counting formulas need.
fn g_at(table: &SequenceTable, j: i64) -> Result<BigInt> {
    match j {
        j if j < 0 => Err(Error::InvalidArgument(format!("subscript {j} is negative"))),
        0 => Ok(BigInt::one()),
        j => Ok(table.get(j as usize)?.clone().into()),
    }
}

/// Number of `m` in `[G_n, G_{n+1})` whose decomposition contains `G_i` and
/// `G_{i+k}` but nothing strictly between them (`k >= 1`).
pub fn x_count(table: &SequenceTable, n: usize, i: usize, k: usize) -> Result<BigUint> {
    if !table.recurrence().all_positive() {
        return Err(Error::NotAllPositive);
    }
    if k == 0 || i == 0 || i + k > n {
        return Err(Error::InvalidArgument(format!(
            "x_count needs k >= 1 and 1 <= i <= n - k (n = {n}, i = {i}, k = {k})"
        )));
    }
    if table.len() < n + 1 {
        return Err(Error::TableTooShort {
            needed: n + 1,
            have: table.len(),
        });
    }
    let (n, i, k) = (n as i64, i as i64, k as i64);
    let g = |j| g_at(table, j);
    let value: BigInt = if k >= 2 {
        let below = g(i + 1)? - g(i)?;
        let above = g(n - i - k + 2)? - g(n - i - k + 1)? * 2 + g(n - i - k)?;
        below * above
    } else {
        (g(n + 1)? - g(n)?)
            - g(i + 1)? * (g(n - i)? - g(n - i - 1)?)
            - g(i)? * (g(n - i + 1)? - g(n - i)? * 2 + g(n - i - 1)?)
    };
    if value.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "negative count {value} at n = {n}, i = {i}, k = {k}"
        )));
    }
    Ok(value.to_biguint().expect("non-negative"))
}

/// `sum_{i=1}^{n-k} X_{i,i+k}(n)`.
pub fn x_count_sum(table: &SequenceTable, n: usize, k: usize) -> Result<BigUint> {
    (1..=n.saturating_sub(k)).try_fold(BigUint::zero(), |acc, i| {
        Ok(acc + x_count(table, n, i, k)?)
    })
}

/// Gap histogram by brute-force enumeration of the interval.
pub fn exact_histogram(table: &SequenceTable, n: usize, cap: u64) -> Result<GapHistogram> {
    let mut counts: BTreeMap<usize, BigUint> = BTreeMap::new();
    let mut total = BigUint::zero();
    for d in enumerate_interval(table, n, cap)? {
        for g in gap_list(&d) {
            *counts.entry(g).or_default() += 1u32;
            total += 1u32;
        }
    }
    Ok(GapHistogram {
        n,
        counts,
        total,
        source: HistogramSource::Enumeration,
    })
}

/// Exact gap histogram for any `n` and any recurrence, without enumeration.
///
/// Forward pass over (automaton state, distance to the last non-zero digit)
/// counts legal prefixes; every placed digit contributes its gaps times the
/// number of legal completions from the resulting state.
pub fn transfer_histogram(rec: &Recurrence, n: usize) -> GapHistogram {
    let automaton = LegalityAutomaton::new(rec);
    let states = automaton.states();
    // suffixes[len][s]: legal completions of length len from state s.
    let mut suffixes = vec![vec![BigUint::one(); states]];
    for len in 1..=n {
        let prev = &suffixes[len - 1];
        let row = (0..states)
            .map(|s| {
                (0..=automaton.max_digit(s))
                    .map(|d| &prev[automaton.step(s, d).expect("within cap")])
                    .sum()
            })
            .collect();
        suffixes.push(row);
    }
    let mut counts: BTreeMap<usize, BigUint> = BTreeMap::new();
    let mut add = |g: usize, v: BigUint| {
        if !v.is_zero() {
            *counts.entry(g).or_default() += v;
        }
    };
    // prefixes[(state, run)] where run = positions since the last non-zero digit.
    let mut prefixes: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
    for d in 1..=automaton.max_digit(0) {
        let ns = automaton.step(0, d).expect("within cap");
        let remaining = &suffixes[n - 1][ns];
        if d > 1 {
            add(0, remaining * (d - 1));
        }
        *prefixes.entry((ns, 0)).or_default() += 1u32;
    }
    for pos in 2..=n {
        let mut next: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
        for ((s, run), count) in prefixes {
            for d in 0..=automaton.max_digit(s) {
                let ns = automaton.step(s, d).expect("within cap");
                if d == 0 {
                    *next.entry((ns, run + 1)).or_default() += &count;
                } else {
                    let weighted = &count * &suffixes[n - pos][ns];
                    if d > 1 {
                        add(0, &weighted * (d - 1));
                    }
                    add(run + 1, weighted);
                    *next.entry((ns, 0)).or_default() += &count;
                }
            }
        }
        prefixes = next;
    }
    let total = counts.values().sum();
    GapHistogram {
        n,
        counts,
        total,
        source: HistogramSource::TransferCount,
    }
}

/// Histogram from the closed-form counts: `k >= 1` from `X_{i,i+k}`, `k = 0`
/// as the remainder of `N_gaps(n)`.
pub fn closed_form_histogram(table: &SequenceTable, n: usize) -> Result<GapHistogram> {
    let sums = summand_totals(table.recurrence(), n);
    let total = sums.gaps(n);
    let mut counts = BTreeMap::new();
    let mut positive = BigUint::zero();
    for k in 1..n {
        let c = x_count_sum(table, n, k)?;
        positive += &c;
        if !c.is_zero() {
            counts.insert(k, c);
        }
    }
    let zeros = &total - &positive;
    if !zeros.is_zero() {
        counts.insert(0, zeros);
    }
    Ok(GapHistogram {
        n,
        counts,
        total,
        source: HistogramSource::ClosedForm,
    })
}

/// `P_n(k) = sum_i X_{i,i+k}(n) / N_gaps(n)` exactly.
pub fn pn_closed_form(
    table: &SequenceTable,
    n: usize,
    k: usize,
    gaps_total: &BigUint,
) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "pn_closed_form covers k >= 1; k = 0 follows by normalization".into(),
        ));
    }
    if gaps_total.is_zero() {
        return Err(Error::InvalidArgument("N_gaps(n) is zero".into()));
    }
    Ok(BigRational::new(
        x_count_sum(table, n, k)?.into(),
        gaps_total.clone().into(),
    ))
}

/// Limiting gap distribution for a recurrence with every `c_i >= 1`.
#[derive(Debug, Clone, Serialize)]
pub struct BulkGapTheory {
    pub lambda1: f64,
    pub a1: f64,
    pub c_lek: f64,
}

impl BulkGapTheory {
    pub fn new(rec: &Recurrence, spec: &SpectralData) -> Result<Self> {
        if !rec.all_positive() {
            return Err(Error::NotAllPositive);
        }
        Ok(BulkGapTheory {
            lambda1: spec.lambda1,
            a1: spec.a1,
            c_lek: spec.c_lek,
        })
    }

    /// `(lambda_1 - 1)^2 a_1 / C_Lek`, the prefactor of the geometric tail.
    fn tail_prefactor(&self) -> f64 {
        (self.lambda1 - 1.0).powi(2) * self.a1 / self.c_lek
    }

    /// `P(k)`; `P(0)` comes from normalization.
    pub fn p(&self, k: usize) -> f64 {
        let l = self.lambda1;
        match k {
            0 => snap(1.0 - self.p(1) - self.tail_prefactor() / (l * (l - 1.0))),
            1 => snap((l * (1.0 - 2.0 * self.a1) + self.a1) / (l * self.c_lek)),
            k => self.tail_prefactor() * l.powi(-(k as i32)),
        }
    }

    /// `P(0) + ... + P(k)`.
    pub fn cdf(&self, k: usize) -> f64 {
        match k {
            0 => self.p(0),
            k => 1.0 - self.tail_prefactor() * self.lambda1.powi(-(k as i32)) / (self.lambda1 - 1.0),
        }
    }

    /// The printed closed form for `P(0)`, kept only to report how far it is
    /// from the normalized value.
    pub fn printed_p0(&self) -> f64 {
        1.0 - (self.a1 / self.c_lek) * (2.0 / self.lambda1 + 1.0 / self.a1 - 3.0)
    }
}

// Cancellation noise around zero, e.g. P(0) and P(1) for Fibonacci.
fn snap(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

pub fn p_limit(theory: &BulkGapTheory, k: usize) -> f64 {
    theory.p(k)
}

/// Spacing gap measure of one decomposition: mass `1/(k(m)-1)` per gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndividualMeasure {
    /// `masses[g]` = mass at gap length `g`.
    pub masses: Vec<f64>,
}

impl IndividualMeasure {
    pub fn from_tally(t: &GapTally) -> Result<Self> {
        Self::from_histogram(&t.histogram)
    }

    /// From gap counts indexed by gap length.
    pub fn from_histogram(histogram: &[u64]) -> Result<Self> {
        let gaps: u64 = histogram.iter().sum();
        if gaps == 0 {
            return Err(Error::InvalidArgument(
                "a single summand has no gap measure".into(),
            ));
        }
        Ok(IndividualMeasure {
            masses: histogram.iter().map(|&c| c as f64 / gaps as f64).collect(),
        })
    }

    pub fn as_map(&self) -> BTreeMap<usize, f64> {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(g, &m)| (g, m))
            .collect()
    }
}

pub fn individual_measure(d: &Decomposition) -> Result<IndividualMeasure> {
    IndividualMeasure::from_tally(&GapTally::from_decomposition(d))
}

/// Sup-norm distance between the CDF of `measure` and the limiting CDF.
pub fn kolmogorov_distance(measure: &IndividualMeasure, theory: &BulkGapTheory) -> f64 {
    let mut distance: f64 = 0.0;
    let mut cumulative = 0.0;
    let mut x = 0;
    loop {
        cumulative += measure.masses.get(x).copied().unwrap_or(0.0);
        let gap = (cumulative.min(1.0) - theory.cdf(x)).abs();
        distance = distance.max(gap);
        if x + 1 >= measure.masses.len() && 1.0 - theory.cdf(x) < 1e-16 {
            break;
        }
        x += 1;
    }
    distance
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationSummary {
    pub distances: Vec<f64>,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

pub fn concentration_from_measures(
    measures: &[IndividualMeasure],
    theory: &BulkGapTheory,
) -> Result<ConcentrationSummary> {
    if measures.is_empty() {
        return Err(Error::EmptySamples);
    }
    let distances: Vec<f64> = measures
        .iter()
        .map(|m| kolmogorov_distance(m, theory))
        .collect();
    let (q1, median, q3) = quartiles(&distances);
    Ok(ConcentrationSummary {
        distances,
        q1,
        median,
        q3,
    })
}

/// Kolmogorov distance of each sample's gap measure from the limit, with quartiles.
pub fn concentration_statistic(
    samples: &[Decomposition],
    theory: &BulkGapTheory,
) -> Result<ConcentrationSummary> {
    let measures = samples
        .iter()
        .map(individual_measure)
        .collect::<Result<Vec<_>>>()?;
    concentration_from_measures(&measures, theory)
}

/// Richardson-style extrapolation of `P_n(k)` to `n -> infinity` assuming
/// `P_n = P + A/n + B/n^2` through the three last points.
pub fn extrapolate_inverse_n(points: &[(usize, f64)]) -> Option<f64> {
    let [(n1, p1), (n2, p2), (n3, p3)] = points.get(points.len().checked_sub(3)?..)? else {
        return None;
    };
    let rows = [(*n1 as f64, *p1), (*n2 as f64, *p2), (*n3 as f64, *p3)];
    let m = nalgebra::Matrix3::from_fn(|r, c| rows[r].0.powi(-(c as i32)));
    let rhs = nalgebra::Vector3::new(rows[0].1, rows[1].1, rows[2].1);
    m.lu().solve(&rhs).map(|sol| sol[0])
}

/// Converts a ratio to `f64`, falling back through big-integer division.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        sign * big_ratio(
            &r.numer().abs().to_biguint().expect("abs"),
            &r.denom().abs().to_biguint().expect("abs"),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeck::decompose;

    fn rec(s: &str) -> Recurrence {
        s.parse().unwrap()
    }

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn x_count_examples() {
        let fib = SequenceTable::new(rec("1,1"), 12);
        assert_eq!(x_count(&fib, 6, 2, 2).unwrap(), BigUint::from(1u32));
        let m = decompose(&fib, &BigUint::from(20u32)).unwrap();
        assert_eq!(m.terms(), &[(6, 1), (4, 1), (2, 1)]);
        for n in 2..11 {
            for i in 1..n {
                assert!(x_count(&fib, n, i, 1).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn x_count_errors() {
        let gappy = SequenceTable::new(rec("1,0,1"), 12);
        assert_eq!(x_count(&gappy, 6, 1, 2), Err(Error::NotAllPositive));
        let fib = SequenceTable::new(rec("1,1"), 12);
        assert!(x_count(&fib, 6, 0, 2).is_err());
        assert!(x_count(&fib, 6, 5, 2).is_err());
        assert!(x_count(&fib, 6, 1, 0).is_err());
        assert!(matches!(
            x_count(&fib, 20, 1, 2),
            Err(Error::TableTooShort { .. })
        ));
    }

    #[test]
    fn exact_histogram_examples() {
        let fib = SequenceTable::new(rec("1,1"), 20);
        let h = exact_histogram(&fib, 4, 1000).unwrap();
        assert_eq!(h.total, BigUint::from(2u32));
        assert_eq!(h.count(2), BigUint::from(1u32));
        assert_eq!(h.count(3), BigUint::from(1u32));
        for n in 2..16 {
            let h = exact_histogram(&fib, n, 10_000).unwrap();
            assert!(h.count(0).is_zero() && h.count(1).is_zero());
        }
        let b10 = SequenceTable::new(rec("10"), 4);
        assert_eq!(exact_histogram(&b10, 2, 1000).unwrap().total, BigUint::from(765u32));
    }

    #[test]
    fn transfer_and_closed_form_match_enumeration() {
        for s in ["1,1", "2,4", "3", "1,1,1", "1,0,1", "2,0,0,3"] {
            let r = rec(s);
            let t = SequenceTable::new(r.clone(), 12);
            for n in 1..=10 {
                let Ok(brute) = exact_histogram(&t, n, 200_000) else {
                    continue;
                };
                let transfer = transfer_histogram(&r, n);
                assert_eq!(brute.counts, transfer.counts, "{s} n={n}");
                if r.all_positive() {
                    let closed = closed_form_histogram(&t, n).unwrap();
                    assert_eq!(brute.counts, closed.counts, "{s} n={n}");
                    assert_eq!(brute.total, closed.total);
                }
            }
        }
    }

    #[test]
    fn fibonacci_theory() {
        let r = rec("1,1");
        let spec = SpectralData::compute(&r).unwrap();
        let th = BulkGapTheory::new(&r, &spec).unwrap();
        for k in 2..=10 {
            assert!((th.p(k) - PHI.powi(-(k as i32))).abs() < 1e-9);
            assert!((th.p(k + 1) / th.p(k) - 1.0 / PHI).abs() < 1e-12);
        }
        assert!(th.p(0).abs() < 1e-9);
        assert!(th.p(1).abs() < 1e-9);
        assert!((th.printed_p0() - 2.0).abs() < 1e-9);
        assert!((th.cdf(60) - 1.0).abs() < 1e-12);
        let gappy = rec("1,0,1");
        let s2 = SpectralData::compute(&gappy).unwrap();
        assert!(matches!(BulkGapTheory::new(&gappy, &s2), Err(Error::NotAllPositive)));
    }

    #[test]
    fn measure_examples() {
        let hundred = Decomposition::from_terms(vec![(10, 1), (5, 1), (3, 1)]).unwrap();
        let m = individual_measure(&hundred).unwrap().as_map();
        assert_eq!(m, BTreeMap::from([(2, 0.5), (5, 0.5)]));
        let d = Decomposition::from_terms(vec![(701, 1), (601, 24), (2, 2013)]).unwrap();
        let m = individual_measure(&d).unwrap().as_map();
        assert_eq!(m[&0], 2035.0 / 2037.0);
        assert_eq!(m[&100], 1.0 / 2037.0);
        assert_eq!(m[&599], 1.0 / 2037.0);
        let two = Decomposition::from_terms(vec![(9, 1), (4, 1)]).unwrap();
        assert_eq!(individual_measure(&two).unwrap().as_map(), BTreeMap::from([(5, 1.0)]));
        let one = Decomposition::from_terms(vec![(9, 1)]).unwrap();
        assert!(individual_measure(&one).is_err());
    }

    #[test]
    fn kolmogorov_degenerate_cases() {
        let r = rec("1,1");
        let spec = SpectralData::compute(&r).unwrap();
        let th = BulkGapTheory::new(&r, &spec).unwrap();
        let exact = IndividualMeasure {
            masses: (0..80).map(|k| th.p(k).max(0.0)).collect(),
        };
        assert!(kolmogorov_distance(&exact, &th) < 1e-9);
        let atom = IndividualMeasure {
            masses: vec![0.0, 0.0, 0.0, 1.0],
        };
        let expected = th.cdf(2).max(1.0 - th.cdf(3));
        assert!((kolmogorov_distance(&atom, &th) - expected).abs() < 1e-15);
        assert!(matches!(
            concentration_statistic(&[], &th),
            Err(Error::EmptySamples)
        ));
    }

    #[test]
    fn extrapolation_recovers_limit() {
        let pts: Vec<_> = (10..=12)
            .map(|n| (n, 0.8 + 0.3 / n as f64 - 0.2 / (n * n) as f64))
            .collect();
        assert!((extrapolate_inverse_n(&pts).unwrap() - 0.8).abs() < 1e-12);
        assert!(extrapolate_inverse_n(&pts[..2]).is_none());
    }
}
