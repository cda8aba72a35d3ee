//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Criteria listed in
//! `KNOWN_FAILURES` are reported as FAIL but do not fail the process; if one of
//! them starts passing, the process fails so the list gets updated.
//!
//! `ZECKGAP_ACCEPTANCE_1E7=1` adds the n = 10^7 Monte Carlo run.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;

use zeckgap::bulkgaps::{
    exact_histogram, extrapolate_inverse_n, p_limit, transfer_histogram, x_count_sum, BulkGapTheory,
};
use zeckgap::longestgap::{
    build_polynomials_relaxed, candidate_conventions, cdf_asymptotic, cdf_best, cdf_exact, cdf_ratio,
    coin_run_baseline, convention_series, count_less_than, count_less_than_automaton,
    mean_var_closed_form, tf_roots, PINNED,
};
use zeckgap::montecarlo::{run_experiment, ExperimentConfig, ExperimentKind};
use zeckgap::spectral::{binet_ratio, lekkerkerker_constants};
use zeckgap::verify::roundtrip_suite;
use zeckgap::zeck::{enumerate_interval, TrailingGap};
use zeckgap::{Error, Recurrence, SequenceTable, SpectralData};

const PHI: f64 = 1.618_033_988_749_895;
const SEED: u64 = 20240601;

/// Criteria expected to fail, with the reason printed next to the FAIL line.
const KNOWN_FAILURES: &[(u32, &str)] = &[
    (
        4,
        "exact P_n(2) = phi^-2 + 0.62/n + O(1/n^2) (enumeration and transfer counts agree), \
         so at n = 30 the bias is 0.0216, above the 0.02 tolerance; the limit part passes",
    ),
    (
        9,
        "[2,4] closed-form means are 9.8641 / 10.4544; exact sums over the interval agree \
         (9.8645 / 10.4539), so the reference 9.95 / 10.54 cannot be reproduced",
    ),
];

type Outcome = std::result::Result<String, String>;

fn rec(s: &str) -> Recurrence {
    s.parse().expect("valid recurrence")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

// 1. enumeration covers each interval once, legality, decompose/reconstruct.
fn c1_roundtrip() -> Outcome {
    let mut checked = 0;
    let mut intervals = 0;
    for s in ["1,1", "1,1,1", "3", "10", "2,4"] {
        let table = SequenceTable::new(rec(s), 21);
        let suite = roundtrip_suite(&table, 18, 999_999).map_err(e2s)?;
        ensure(suite.passed(), || format!("[{s}]: {:?}", suite.mismatches))?;
        checked += suite.checked;
        intervals += 18 - suite.skipped.len();
    }
    Ok(format!("{intervals} intervals, {checked} equalities"))
}

// 2. Lekkerkerker slope from exact means at n = 40..60.
fn c2_lekkerkerker() -> Outcome {
    let table = SequenceTable::new(Recurrence::fibonacci(), 62);
    let fit = lekkerkerker_constants(&table, 40, 60).map_err(e2s)?;
    let target = 1.0 / (PHI * PHI + 1.0);
    let err = (fit.c_lek - target).abs();
    ensure(err <= 1e-3, || format!("C_Lek = {} vs {target}", fit.c_lek))?;
    Ok(format!("C_Lek = {:.9}, |err| = {err:.2e}", fit.c_lek))
}

// 3. Sum of X_{i,i+k}(n) against enumerated gap counts.
fn c3_bulk_closed_form() -> Outcome {
    let mut checked = 0;
    for s in ["1,1", "1,1,1", "3", "2,4"] {
        let table = SequenceTable::new(rec(s), 17);
        for n in 1..=14 {
            let hist = exact_histogram(&table, n, 20_000_000).map_err(e2s)?;
            for k in 1..=n {
                let closed = x_count_sum(&table, n, k).map_err(e2s)?;
                let brute = hist.counts.get(&k).cloned().unwrap_or_else(BigUint::zero);
                ensure(closed == brute, || format!("[{s}] n={n} k={k}: {closed} vs {brute}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (n, k) counts equal"))
}

// 4. Fibonacci limit law and the exact distribution at n = 30.
fn c4_fibonacci_limit() -> Outcome {
    let r = Recurrence::fibonacci();
    let spec = SpectralData::compute(&r).map_err(e2s)?;
    let theory = BulkGapTheory::new(&r, &spec).map_err(e2s)?;
    let mut worst_limit: f64 = 0.0;
    for k in 2..=10 {
        let err = (p_limit(&theory, k) - PHI.powi(-(k as i32))).abs();
        ensure(err <= 1e-9, || format!("p_limit({k}) off by {err:e}"))?;
        worst_limit = worst_limit.max(err);
    }
    let table = SequenceTable::new(r.clone(), 33);
    let hist = exact_histogram(&table, 30, 2_000_000).map_err(e2s)?;
    let mut worst_exact: f64 = 0.0;
    let mut off = Vec::new();
    for k in 2..=6 {
        let err = (hist.probability(k) - PHI.powi(-(k as i32))).abs();
        if err > 0.02 {
            off.push(format!("P_30({k}) off by {err:.4}"));
        }
        worst_exact = worst_exact.max(err);
    }
    // the n = 30 bias decays like 1/n
    let trend: Vec<String> = [30, 60, 120, 240]
        .iter()
        .map(|&n| {
            let bias = transfer_histogram(&r, n).probability(2) - PHI.powi(-2);
            format!("n={n}: {bias:+.5}")
        })
        .collect();
    let detail = format!(
        "limit max err {worst_limit:.1e}, P_30 max err {worst_exact:.4}; P_n(2) - phi^-2 at {}",
        trend.join(", ")
    );
    ensure(off.is_empty(), || format!("{}; {detail}", off.join(", ")))?;
    Ok(detail)
}

// 5. Base 10: extrapolated exact P_n(k) against both constant sets.
fn c5_base_ten() -> Outcome {
    let r = rec("10");
    let table = SequenceTable::new(r.clone(), 9);
    for n in 1..=6 {
        let brute = exact_histogram(&table, n, 1_000_000).map_err(e2s)?;
        let transfer = transfer_histogram(&r, n);
        ensure(brute.counts == transfer.counts, || format!("transfer != enumeration at n={n}"))?;
    }
    let printed = [0.72, 0.252, 0.0252];
    let derived = [0.8, 0.18, 0.018];
    let mut limits = [0.0; 3];
    for (k, slot) in limits.iter_mut().enumerate() {
        let pts: Vec<(usize, f64)> = (10..=12)
            .map(|n| (n, transfer_histogram(&r, n).probability(k)))
            .collect();
        *slot = extrapolate_inverse_n(&pts).ok_or("extrapolation is singular")?;
    }
    let close = |set: &[f64; 3]| set.iter().zip(&limits).all(|(a, b)| (a - b).abs() <= 0.01);
    let (p_ok, d_ok) = (close(&printed), close(&derived));
    let summary = format!(
        "extrapolated P(0..2) = {:.5} {:.5} {:.6}; 0.72/2.52e-k {}, 0.8/1.8e-k {}",
        limits[0],
        limits[1],
        limits[2],
        if p_ok { "agrees" } else { "rejected" },
        if d_ok { "agrees" } else { "rejected" },
    );
    ensure(p_ok != d_ok, || summary.clone())?;
    Ok(summary)
}

/// Cumulative "longest gap < f" counts for every n in 1..=n_max, both
/// trailing conventions, from one enumeration pass per interval.
fn brute_cumulative(table: &SequenceTable, n_max: usize) -> Result<Vec<[Vec<u64>; 2]>, String> {
    let mut out = vec![[Vec::new(), Vec::new()]];
    for n in 1..=n_max {
        let mut hist = [vec![0u64; n + 2], vec![0u64; n + 2]];
        let mut it = enumerate_interval(table, n, 200_000_000).map_err(e2s)?;
        while let Some(digits) = it.next_digits() {
            let (mut longest, mut last) = (0, 0);
            for (p, &d) in digits.iter().enumerate().skip(1) {
                if d > 0 {
                    longest = longest.max(p - last);
                    last = p;
                }
            }
            hist[0][longest] += 1;
            hist[1][longest.max(n - last)] += 1;
        }
        // cum[f] = #{longest < f}
        let cum = hist.map(|h| {
            let mut c = vec![0u64; h.len() + 1];
            for g in 0..h.len() {
                c[g + 1] = c[g] + h[g];
            }
            c
        });
        out.push(cum);
    }
    Ok(out)
}

// 6. Generating-function counts of longest gap < f against brute force.
fn c6_longest_counting() -> Outcome {
    let n_max = 16;
    let mut lines = Vec::new();
    for s in ["1,1", "2,4"] {
        let r = rec(s);
        let table = SequenceTable::new(r.clone(), n_max + 2);
        let brute = brute_cumulative(&table, n_max)?;
        let at = |cum: &[u64], f: usize| cum[f.min(cum.len() - 1)];

        let matching: Vec<_> = candidate_conventions()
            .into_iter()
            .filter(|conv| {
                let mode = (conv.trailing == TrailingGap::Included) as usize;
                (r.j_last() + 1..=n_max + 1).all(|f| {
                    let series = convention_series(&r, f, *conv, n_max);
                    (1..=n_max).all(|n| series[n] == at(&brute[n][mode], f).into())
                })
            })
            .collect();
        ensure(matching == vec![PINNED], || format!("[{s}] matching conventions {matching:?}"))?;

        let mut checked = 0;
        for n in 1..=n_max {
            for f in 1..=n + 1 {
                let expect = BigUint::from(at(&brute[n][0], f));
                let got = if f > r.j_last() {
                    count_less_than(&table, n, f).map_err(e2s)?
                } else {
                    ensure(count_less_than(&table, n, f).is_err(), || {
                        format!("[{s}] f={f} <= j_L accepted by the series")
                    })?;
                    count_less_than_automaton(&r, n, f)
                };
                ensure(got == expect, || format!("[{s}] n={n} f={f}: {got} vs {expect}"))?;
                checked += 1;
            }
        }
        lines.push(format!("[{s}] 1 of 8 conventions fits, {checked} counts equal"));
    }
    Ok(lines.join("; "))
}

// 7. Partial fractions against the exact ratio; root validations.
fn c7_partial_fractions() -> Outcome {
    let r = Recurrence::fibonacci();
    let p = build_polynomials_relaxed(&r).map_err(e2s)?;
    let table = SequenceTable::new(r, 203);
    let mut worst: f64 = 0.0;
    for f in 5..=40 {
        for n in 1..=200 {
            let exact = cdf_exact(&table, &p, n, f).map_err(e2s)?;
            let ratio = cdf_ratio(&table, n, f).map_err(e2s)?;
            let rel = (exact - ratio).abs() / ratio;
            ensure(rel <= 1e-8, || format!("n={n} f={f}: {exact} vs {ratio}"))?;
            worst = worst.max(rel);
        }
    }
    let mut validated = 0;
    for s in ["1,1", "2,4", "1,1,1"] {
        let p = build_polynomials_relaxed(&rec(s)).map_err(e2s)?;
        for f in 10..=60 {
            tf_roots(&p, f).map_err(|e| format!("[{s}] {e}"))?;
            validated += 1;
        }
    }
    Ok(format!("max rel err {worst:.1e}; {validated} root sets validated"))
}

// 8. Asymptotic CDF against the exact one at n = 10^4.
fn c8_asymptotic() -> Outcome {
    let r = Recurrence::fibonacci();
    let p = build_polynomials_relaxed(&r).map_err(e2s)?;
    let n = 10_000;
    let table = SequenceTable::new(r, n + 3);
    let mut sup: f64 = 0.0;
    let mut at = 0;
    for f in 3..=60 {
        let d = (cdf_asymptotic(&p, n as f64, f) - cdf_best(&table, &p, n, f).map_err(e2s)?).abs();
        if d > sup {
            sup = d;
            at = f;
        }
    }
    ensure(sup <= 0.01, || format!("sup = {sup} at f = {at}"))?;
    Ok(format!("sup = {sup:.2e} at f = {at}"))
}

fn mc_longest(r: &Recurrence, n: usize) -> std::result::Result<(String, bool), String> {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(r.clone(), n, 100, SEED, ExperimentKind::LongestGap);
    let rep = run_experiment(&cfg).map_err(e2s)?;
    let ok = rep.z_score.abs() <= 3.0;
    Ok((
        format!(
            "MC [{r}] n={n}: {:.2} vs {:.4}, z = {:.2} ({:.0}s)",
            rep.empirical_mean,
            rep.theory_mean,
            rep.z_score,
            start.elapsed().as_secs_f64()
        ),
        ok,
    ))
}

// 9. Closed-form mean and sd, and Monte Carlo agreement.
fn c9_mean_variance() -> Outcome {
    let fib = Recurrence::fibonacci();
    let r24 = rec("2,4");
    let pf = build_polynomials_relaxed(&fib).map_err(e2s)?;
    let p24 = build_polynomials_relaxed(&r24).map_err(e2s)?;

    // (label, value, target, tolerance)
    let mut rows: Vec<(String, f64, f64, f64)> = Vec::new();
    let mv = mean_var_closed_form(&pf, 1e6);
    rows.push(("fib 1e6 mean".into(), mv.mean, 28.73, 0.02));
    rows.push(("fib 1e6 sd".into(), mv.sd(), 2.67, 0.02));
    rows.push(("fib 1e7 mean".into(), mean_var_closed_form(&pf, 1e7).mean, 33.52, 0.02));
    let mv = mean_var_closed_form(&p24, 51200.0);
    rows.push(("[2,4] 51200 mean".into(), mv.mean, 9.95, 0.02));
    rows.push(("[2,4] 51200 sd".into(), mv.sd(), 1.09, 0.02));
    rows.push(("[2,4] 102400 mean".into(), mean_var_closed_form(&p24, 102400.0).mean, 10.54, 0.02));

    let mut notes = Vec::new();
    let mut failed = Vec::new();
    for (label, v, target, tol) in &rows {
        let ok = (v - target).abs() <= *tol;
        notes.push(format!("{label} {v:.4} (want {target} ± {tol}){}", if ok { "" } else { " X" }));
        if !ok {
            failed.push(label.clone());
        }
    }

    let mut runs = vec![(fib.clone(), 1_000_000), (r24.clone(), 51_200), (r24, 102_400)];
    if std::env::var_os("ZECKGAP_ACCEPTANCE_1E7").is_some() {
        runs.push((fib, 10_000_000));
    }
    for (r, n) in runs {
        let start = Instant::now();
        let (line, ok) = mc_longest(&r, n)?;
        if r == Recurrence::fibonacci() && n == 1_000_000 && start.elapsed().as_secs() > 900 {
            failed.push("fib 1e6 MC over 15 min".into());
        }
        if !ok {
            failed.push(line.clone());
        }
        notes.push(line);
    }
    let body = notes.join("\n      ");
    if failed.is_empty() {
        Ok(body)
    } else {
        Err(format!("off target: {}\n      {body}", failed.join(", ")))
    }
}

// 10. Coin-run identity for the recurrence [2].
fn c10_coin() -> Outcome {
    let p = build_polynomials_relaxed(&rec("2")).map_err(e2s)?;
    let n = 1e4;
    let diff = mean_var_closed_form(&p, n).mean - coin_run_baseline(n, 0.5).map_err(e2s)?.mean;
    ensure((diff - 1.0).abs() <= 1e-6, || format!("difference {diff}"))?;
    Ok(format!("difference = {diff:.12}"))
}

// 11. Individual gap measures concentrate.
fn c11_concentration() -> Outcome {
    let mut medians = Vec::new();
    for n in [1_000, 10_000] {
        let cfg = ExperimentConfig::new(Recurrence::fibonacci(), n, 200, SEED, ExperimentKind::BulkGap);
        let rep = run_experiment(&cfg).map_err(e2s)?;
        medians.push(rep.bulk.ok_or("bulk summary missing")?.concentration.median);
    }
    let msg = format!("median Kolmogorov distance {:.4} -> {:.4}", medians[0], medians[1]);
    ensure(medians[1] < medians[0] && medians[1] < 0.05, || msg.clone())?;
    Ok(msg)
}

// 12. G_n / lambda^n converges to a_1.
fn c12_binet() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in ["1,1", "1,1,1", "3", "10", "2,4", "2", "1,0,1", "2,2", "1,2,1"] {
        let r = rec(s);
        let spec = SpectralData::compute(&r).map_err(e2s)?;
        let table = SequenceTable::new(r, 201);
        let err = (binet_ratio(&table, spec.lambda1, 200).map_err(e2s)? - spec.a1).abs();
        ensure(err < 1e-10, || format!("[{s}] |G_200/l^200 - a1| = {err:e}"))?;
        worst = worst.max(err);
    }
    let fib = SpectralData::compute(&Recurrence::fibonacci()).map_err(e2s)?;
    let err = (fib.a1 - PHI / 5f64.sqrt()).abs();
    ensure(err < 1e-10, || format!("Fibonacci a1 off by {err:e}"))?;
    Ok(format!("max deviation at n = 200: {worst:.1e}; Fibonacci a1 err {err:.1e}"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "decomposition roundtrip and coverage", c1_roundtrip),
        (2, "Lekkerkerker constant", c2_lekkerkerker),
        (3, "bulk gap closed form vs enumeration", c3_bulk_closed_form),
        (4, "Fibonacci gap limit", c4_fibonacci_limit),
        (5, "base-10 constants", c5_base_ten),
        (6, "longest-gap counting", c6_longest_counting),
        (7, "partial-fraction CDF", c7_partial_fractions),
        (8, "asymptotic longest-gap law", c8_asymptotic),
        (9, "longest-gap mean and variance", c9_mean_variance),
        (10, "coin-run identity", c10_coin),
        (11, "concentration of gap measures", c11_concentration),
        (12, "Binet limit", c12_binet),
    ];
    let known: BTreeMap<u32, &str> = KNOWN_FAILURES.iter().copied().collect();
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match (&outcome, known.get(&id)) {
            (Ok(detail), None) => println!("PASS  {id:>2} {name} [{secs:.1}s]: {detail}"),
            (Ok(detail), Some(_)) => {
                println!("PASS  {id:>2} {name} [{secs:.1}s]: {detail} (listed as a known failure)");
                unexpected.push(id);
            }
            (Err(detail), None) => {
                println!("FAIL  {id:>2} {name} [{secs:.1}s]: {detail}");
                unexpected.push(id);
            }
            (Err(detail), Some(why)) => {
                println!("FAIL  {id:>2} {name} [{secs:.1}s]: {detail}\n      known: {why}")
            }
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
