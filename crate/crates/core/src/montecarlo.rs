//! Uniform sampling from `[G_n, G_{n+1})` and the statistical experiments on
//! longest gaps, bulk gaps and summand counts.

use std::time::Instant;

use num_bigint::{BigUint, RandBigInt};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::bulkgaps::{concentration_from_measures, BulkGapTheory, ConcentrationSummary, IndividualMeasure};
use crate::error::{Error, Result};
use crate::longestgap::build_polynomials_relaxed;
use crate::longestgap::mean_var_closed_form;
use crate::numeric::big_ratio;
use crate::recurrence::{Recurrence, SequenceTable, SequenceWindow};
use crate::spectral::SpectralData;
use crate::zeck::{GapTally, GreedyWalk, LegalityAutomaton};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LongestGap,
    BulkGap,
    SummandCount,
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "longest" | "longest-gap" => Ok(ExperimentKind::LongestGap),
            "bulk" | "bulk-gap" => Ok(ExperimentKind::BulkGap),
            "summand" | "summand-count" => Ok(ExperimentKind::SummandCount),
            other => Err(Error::InvalidArgument(format!("unknown experiment kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub recurrence: Recurrence,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub kind: ExperimentKind,
    /// Keep the per-sample observations in the report.
    pub keep_samples: bool,
    /// Add wall-clock timings (makes the report non-reproducible byte for byte).
    pub record_timings: bool,
}

impl ExperimentConfig {
    pub fn new(recurrence: Recurrence, n: usize, samples: usize, seed: u64, kind: ExperimentKind) -> Self {
        ExperimentConfig {
            recurrence,
            n,
            samples,
            seed,
            workers: 1,
            kind,
            keep_samples: false,
            record_timings: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::EmptySamples);
        }
        if self.n == 0 || self.workers == 0 {
            return Err(Error::InvalidArgument("n and workers must be positive".into()));
        }
        Ok(())
    }
}

/// Random stream for one sample: depends only on `(seed, index)`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw from `[low, low + width)` by rejection on `bits(width)`-bit strings.
pub fn sample_in<R: RandBigInt>(low: &BigUint, width: &BigUint, rng: &mut R) -> BigUint {
    let bits = width.bits();
    loop {
        let x = rng.gen_biguint(bits);
        if &x < width {
            return low + x;
        }
    }
}

pub fn sample_uniform<R: RandBigInt>(table: &SequenceTable, n: usize, rng: &mut R) -> Result<BigUint> {
    let (lo, _) = table.interval(n)?;
    Ok(sample_in(lo, &table.width(n)?, rng))
}

/// Observed statistics of one sampled decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub summands: u64,
    pub longest: usize,
    pub histogram: Vec<u64>,
}

/// `G_n` and `G_{n+1}` plus a window positioned so that `G_{n+1}` is its top.
fn top_window(rec: &Recurrence, n: usize) -> (SequenceWindow, BigUint, BigUint) {
    let low = (n + 2).saturating_sub(rec.len()).max(1);
    let mut w = SequenceWindow::at(rec.clone(), low);
    let upper = w.get(n + 1).expect("window reaches n + 1").clone();
    if w.low() > n {
        w.step_down();
    }
    let lower = w.get(n).expect("window reaches n").clone();
    (w, lower, upper)
}

/// Draws samples `indices` and decomposes them in one downward sweep.
fn sweep_group(rec: &Recurrence, n: usize, seed: u64, indices: std::ops::Range<usize>) -> Vec<SampleRecord> {
    let (mut window, lower, upper) = top_window(rec, n);
    let width = &upper - &lower;
    let automaton = LegalityAutomaton::new(rec);
    let mut walks: Vec<GreedyWalk<'_, GapTally>> = indices
        .clone()
        .map(|i| {
            let m = sample_in(&lower, &width, &mut sample_stream(seed, i as u64));
            GreedyWalk::new(&automaton, m, n, GapTally::default())
        })
        .collect();
    for i in (1..=n).rev() {
        while window.low() > i {
            window.step_down();
        }
        let g = window.get(i).expect("window covers i");
        for w in &mut walks {
            w.offer(i, g);
        }
    }
    walks
        .into_iter()
        .zip(indices)
        .map(|(w, index)| {
            let (t, rest) = w.finish();
            debug_assert!(rest == BigUint::default());
            SampleRecord {
                index,
                summands: t.summands,
                longest: t.longest,
                histogram: t.histogram,
            }
        })
        .collect()
}

/// All samples of `cfg`, ordered by index; workers take contiguous blocks.
pub fn draw_samples(cfg: &ExperimentConfig) -> Result<Vec<SampleRecord>> {
    cfg.validate()?;
    let workers = cfg.workers.min(cfg.samples);
    let block = cfg.samples.div_ceil(workers);
    let ranges: Vec<_> = (0..cfg.samples)
        .step_by(block)
        .map(|s| s..(s + block).min(cfg.samples))
        .collect();
    if ranges.len() == 1 {
        return Ok(sweep_group(&cfg.recurrence, cfg.n, cfg.seed, ranges[0].clone()));
    }
    let groups: Vec<Vec<SampleRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| scope.spawn(|| sweep_group(&cfg.recurrence, cfg.n, cfg.seed, r)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .collect()
    });
    Ok(groups.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub theory_seconds: f64,
    pub sampling_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PooledRow {
    pub k: usize,
    pub count: u64,
    pub p_empirical: f64,
    pub p_theory: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BulkSummary {
    pub pooled: Vec<PooledRow>,
    pub total_gaps: u64,
    pub concentration: ConcentrationSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummandSummary {
    pub c_lek: f64,
    pub d: f64,
    pub empirical_variance: f64,
    /// Exact variance of `k(m)` over the interval.
    pub exact_variance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub recurrence: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub empirical_mean: f64,
    pub empirical_sd: f64,
    pub theory_mean: f64,
    pub theory_sd: f64,
    pub standard_error: f64,
    pub z_score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_sample: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bulk: Option<BulkSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summand: Option<SummandSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

/// Mean and sample standard deviation.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

fn report(
    cfg: &ExperimentConfig,
    observed: Vec<u64>,
    theory_mean: f64,
    theory_sd: f64,
    effective_count: f64,
    timings: (f64, f64),
) -> Result<ExperimentReport> {
    let values: Vec<f64> = observed.iter().map(|&v| v as f64).collect();
    let (empirical_mean, empirical_sd) = mean_sd(&values);
    let standard_error = theory_sd / effective_count.sqrt();
    let z_score = (empirical_mean - theory_mean) / standard_error;
    if !z_score.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "z-score is not finite (standard error {standard_error})"
        )));
    }
    Ok(ExperimentReport {
        kind: cfg.kind,
        recurrence: cfg.recurrence.to_string(),
        n: cfg.n,
        samples: cfg.samples,
        seed: cfg.seed,
        empirical_mean,
        empirical_sd,
        theory_mean,
        theory_sd,
        standard_error,
        z_score,
        per_sample: cfg.keep_samples.then_some(observed),
        bulk: None,
        summand: None,
        timings: cfg.record_timings.then_some(Timings {
            theory_seconds: timings.0,
            sampling_seconds: timings.1,
        }),
    })
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

/// Longest gap of each sample against the closed-form mean and variance.
pub fn run_longest_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (theory, t_theory) = timed(|| {
        let p = build_polynomials_relaxed(&cfg.recurrence)?;
        Ok(mean_var_closed_form(&p, cfg.n as f64))
    })?;
    let (records, t_sample) = timed(|| draw_samples(cfg))?;
    let observed = records.iter().map(|r| r.longest as u64).collect();
    report(
        cfg,
        observed,
        theory.mean,
        theory.sd(),
        cfg.samples as f64,
        (t_theory, t_sample),
    )
}

/// Pooled gap histogram against the limiting distribution, plus the
/// concentration of individual gap measures.
pub fn run_bulk_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (theory, t_theory) = timed(|| {
        let spec = SpectralData::compute(&cfg.recurrence)?;
        BulkGapTheory::new(&cfg.recurrence, &spec)
    })?;
    let (records, t_sample) = timed(|| draw_samples(cfg))?;
    let width = records.iter().map(|r| r.histogram.len()).max().unwrap_or(0);
    let mut pooled = vec![0u64; width];
    let mut measures = Vec::new();
    for r in &records {
        for (k, &c) in r.histogram.iter().enumerate() {
            pooled[k] += c;
        }
        if let Ok(m) = IndividualMeasure::from_histogram(&r.histogram) {
            measures.push(m);
        }
    }
    let total: u64 = pooled.iter().sum();
    if total == 0 {
        return Err(Error::EmptySamples);
    }
    let rows: Vec<PooledRow> = pooled
        .iter()
        .enumerate()
        .map(|(k, &count)| PooledRow {
            k,
            count,
            p_empirical: count as f64 / total as f64,
            p_theory: theory.p(k),
        })
        .collect();
    let concentration = concentration_from_measures(&measures, &theory)?;
    let kmax = width.max(1) + 200;
    let theory_mean: f64 = (0..kmax).map(|k| k as f64 * theory.p(k)).sum();
    let second: f64 = (0..kmax).map(|k| (k * k) as f64 * theory.p(k)).sum();
    let theory_sd = (second - theory_mean * theory_mean).sqrt();
    let gaps: Vec<u64> = pooled
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat(k as u64).take(c as usize))
        .collect();
    let mut out = report(cfg, gaps, theory_mean, theory_sd, total as f64, (t_theory, t_sample))?;
    out.per_sample = cfg
        .keep_samples
        .then(|| records.iter().map(|r| r.summands.saturating_sub(1)).collect());
    out.bulk = Some(BulkSummary {
        pooled: rows,
        total_gaps: total,
        concentration,
    });
    Ok(out)
}

/// Exact variance of the summand count over `[G_n, G_{n+1})`, from first and
/// second moments carried through the legality automaton.
pub fn summand_variance(rec: &Recurrence, n: usize) -> f64 {
    let automaton = LegalityAutomaton::new(rec);
    let states = automaton.states();
    let zero = || vec![BigUint::default(); states];
    let (mut cnt, mut s1, mut s2) = (zero(), zero(), zero());
    for d in 1..=automaton.max_digit(0) {
        let ns = automaton.step(0, d).expect("legal");
        cnt[ns] += 1u32;
        s1[ns] += d;
        s2[ns] += d * d;
    }
    for _ in 1..n {
        let (mut c2, mut a2, mut b2) = (zero(), zero(), zero());
        for s in 0..states {
            if cnt[s] == BigUint::default() {
                continue;
            }
            for d in 0..=automaton.max_digit(s) {
                let ns = automaton.step(s, d).expect("legal");
                c2[ns] += &cnt[s];
                a2[ns] += &s1[s];
                b2[ns] += &s2[s];
                if d > 0 {
                    a2[ns] += &cnt[s] * d;
                    b2[ns] += &s1[s] * (2 * d) + &cnt[s] * (d * d);
                }
            }
        }
        (cnt, s1, s2) = (c2, a2, b2);
    }
    let n_total: BigUint = cnt.iter().sum();
    let t1: BigUint = s1.iter().sum();
    let t2: BigUint = s2.iter().sum();
    big_ratio(&(&t2 * &n_total - &t1 * &t1), &(&n_total * &n_total))
}

/// Largest `n` for which [`summand_variance`] is evaluated directly; beyond it
/// the variance is extended linearly.
pub const EXACT_VARIANCE_MAX_N: usize = 20_000;

fn summand_variance_at(rec: &Recurrence, n: usize) -> f64 {
    if n <= EXACT_VARIANCE_MAX_N {
        return summand_variance(rec, n);
    }
    let (a, b) = (EXACT_VARIANCE_MAX_N / 2, EXACT_VARIANCE_MAX_N);
    let (va, vb) = (summand_variance(rec, a), summand_variance(rec, b));
    vb + (vb - va) / (b - a) as f64 * (n - b) as f64
}

/// Summand counts against `C_Lek n + d` and the exact variance.
pub fn run_summand_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let ((spec, variance), t_theory) = timed(|| {
        Ok((
            SpectralData::compute(&cfg.recurrence)?,
            summand_variance_at(&cfg.recurrence, cfg.n),
        ))
    })?;
    let (records, t_sample) = timed(|| draw_samples(cfg))?;
    let observed: Vec<u64> = records.iter().map(|r| r.summands).collect();
    let values: Vec<f64> = observed.iter().map(|&v| v as f64).collect();
    let (_, sd) = mean_sd(&values);
    let theory_mean = spec.c_lek * cfg.n as f64 + spec.d_intercept;
    let mut out = report(
        cfg,
        observed,
        theory_mean,
        variance.sqrt(),
        cfg.samples as f64,
        (t_theory, t_sample),
    )?;
    out.summand = Some(SummandSummary {
        c_lek: spec.c_lek,
        d: spec.d_intercept,
        empirical_variance: sd * sd,
        exact_variance: variance,
    });
    Ok(out)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match cfg.kind {
        ExperimentKind::LongestGap => run_longest_experiment(cfg),
        ExperimentKind::BulkGap => run_bulk_experiment(cfg),
        ExperimentKind::SummandCount => run_summand_experiment(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeck::{decompose, longest_gap};

    fn rec(s: &str) -> Recurrence {
        s.parse().unwrap()
    }

    #[test]
    fn uniform_on_three_values() {
        let t = SequenceTable::new(Recurrence::fibonacci(), 10);
        let mut rng = sample_stream(7, 0);
        let mut counts = [0u32; 3];
        let draws = 30_000;
        for _ in 0..draws {
            let v = sample_uniform(&t, 4, &mut rng).unwrap();
            let v = u64::try_from(&v).unwrap();
            assert!((5..8).contains(&v));
            counts[(v - 5) as usize] += 1;
        }
        let sigma = (draws as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 / 3.0).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn streams_are_deterministic() {
        let t = SequenceTable::new(rec("2,4"), 40);
        let a: Vec<_> = (0..10)
            .map(|i| sample_uniform(&t, 30, &mut sample_stream(11, i)).unwrap())
            .collect();
        let b: Vec<_> = (0..10)
            .map(|i| sample_uniform(&t, 30, &mut sample_stream(11, i)).unwrap())
            .collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn sweep_matches_table_decomposition() {
        for s in ["1,1", "2,4", "10", "1,0,2", "3"] {
            let r = rec(s);
            let n = 60;
            let t = SequenceTable::new(r.clone(), n + 2);
            let mut cfg = ExperimentConfig::new(r.clone(), n, 12, 5, ExperimentKind::LongestGap);
            let one = draw_samples(&cfg).unwrap();
            cfg.workers = 5;
            let many = draw_samples(&cfg).unwrap();
            assert_eq!(one, many);
            for rec in &one {
                let m = sample_uniform(&t, n, &mut sample_stream(5, rec.index as u64)).unwrap();
                let d = decompose(&t, &m).unwrap();
                assert_eq!(rec.longest, longest_gap(&d), "{s}");
                assert_eq!(rec.summands, d.summands());
                assert!(rec.summands >= 1);
            }
        }
    }

    #[test]
    fn exact_variance_small() {
        // Fibonacci n = 5: [8, 13) has summand counts 1, 2, 2, 2, 3.
        let v = summand_variance(&Recurrence::fibonacci(), 5);
        let mean = 2.0;
        let expect = [1.0f64, 2.0, 2.0, 2.0, 3.0].iter().map(|k| (k - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = ExperimentConfig::new(Recurrence::fibonacci(), 1000, 50, 3, ExperimentKind::LongestGap);
        let a = serde_json::to_string(&run_experiment(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let mut bad = cfg.clone();
        bad.samples = 0;
        assert!(matches!(run_experiment(&bad), Err(Error::EmptySamples)));
    }
}
