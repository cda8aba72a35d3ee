//! Oracle-equivalence suites: every closed form checked against brute-force
//! enumeration of whole intervals.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::bulkgaps::{closed_form_histogram, exact_histogram, transfer_histogram};
use crate::error::{Error, Result};
use crate::longestgap::{brute_longest_histogram, count_less_than, count_less_than_automaton};
use crate::recurrence::{Recurrence, SequenceTable};
use crate::zeck::{decompose, enumerate_interval, is_legal, reconstruct, TrailingGap};

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteResult {
    pub name: String,
    /// Number of individual equalities checked.
    pub checked: u64,
    pub mismatches: Vec<String>,
    /// Intervals skipped because they exceed the enumeration cap.
    pub skipped: Vec<usize>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.into(),
            ..Default::default()
        }
    }

    fn expect_eq<T: PartialEq + std::fmt::Debug>(&mut self, what: impl FnOnce() -> String, a: T, b: T) {
        self.checked += 1;
        if a != b && self.mismatches.len() < 20 {
            self.mismatches.push(format!("{}: {a:?} != {b:?}", what()));
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub recurrence: String,
    pub max_n: usize,
    pub cap: u64,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

/// Enumeration covers the interval exactly once, every string is legal, and
/// `decompose` and `reconstruct` invert each other.
pub fn roundtrip_suite(table: &SequenceTable, max_n: usize, cap: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("roundtrip");
    for n in 1..=max_n {
        let iter = match enumerate_interval(table, n, cap) {
            Ok(it) => it,
            Err(Error::IntervalTooLarge { .. }) => {
                s.skipped.push(n);
                continue;
            }
            Err(e) => return Err(e),
        };
        let (lo, hi) = table.interval(n)?;
        let mut expected = lo.clone();
        for d in iter {
            let value = reconstruct(table, &d)?;
            s.expect_eq(|| format!("n={n} coverage"), &value, &expected);
            s.expect_eq(|| format!("legality of {d}"), is_legal(table.recurrence(), &d.to_dense())?, true);
            s.expect_eq(|| format!("decompose({value})"), &decompose(table, &value)?, &d);
            expected += BigUint::one();
        }
        s.expect_eq(|| format!("n={n} end of interval"), &expected, hi);
    }
    Ok(s)
}

/// Closed-form and transfer gap histograms equal enumerated gap counts.
pub fn bulk_suite(table: &SequenceTable, max_n: usize, cap: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("bulk");
    let rec = table.recurrence();
    for n in 1..=max_n {
        let brute = match exact_histogram(table, n, cap) {
            Ok(h) => h,
            Err(Error::IntervalTooLarge { .. }) => {
                s.skipped.push(n);
                continue;
            }
            Err(e) => return Err(e),
        };
        let transfer = transfer_histogram(rec, n);
        s.expect_eq(|| format!("n={n} transfer counts"), &transfer.counts, &brute.counts);
        if rec.all_positive() {
            let closed = closed_form_histogram(table, n)?;
            s.expect_eq(|| format!("n={n} closed-form counts"), &closed.counts, &brute.counts);
            s.expect_eq(|| format!("n={n} gap total"), &closed.total, &brute.total);
        }
    }
    Ok(s)
}

/// Generating-function counts of "longest gap < f" equal enumerated counts for every `f`.
pub fn longest_suite(table: &SequenceTable, max_n: usize, cap: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("longest");
    let rec = table.recurrence();
    for n in 1..=max_n {
        let hist = match brute_longest_histogram(table, n, cap, TrailingGap::Excluded) {
            Ok(h) => h,
            Err(Error::IntervalTooLarge { .. }) => {
                s.skipped.push(n);
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut below = 0u64;
        for f in 1..=n + 1 {
            below += hist[f - 1];
            let expect = BigUint::from(below);
            if f > rec.j_last() {
                s.expect_eq(|| format!("n={n} f={f} series"), count_less_than(table, n, f)?, expect.clone());
            }
            s.expect_eq(|| format!("n={n} f={f} transfer"), count_less_than_automaton(rec, n, f), expect);
        }
    }
    Ok(s)
}

pub fn run_verify(rec: &Recurrence, max_n: usize, cap: u64) -> Result<VerifyReport> {
    let table = SequenceTable::new(rec.clone(), max_n + 2);
    let suites = vec![
        roundtrip_suite(&table, max_n, cap)?,
        bulk_suite(&table, max_n, cap)?,
        longest_suite(&table, max_n, cap)?,
    ];
    let passed = suites.iter().all(SuiteResult::passed);
    Ok(VerifyReport {
        recurrence: rec.to_string(),
        max_n,
        cap,
        suites,
        passed,
    })
}
