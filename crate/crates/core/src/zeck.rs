//! Legal decompositions: legality automaton, greedy decomposition,
//! enumeration of whole intervals, and gap extraction.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recurrence::{Recurrence, SequenceTable};

/// Default cap on `G_{n+1} - G_n` for brute-force enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 5_000_000;

/// Deterministic automaton recognizing legal coefficient strings, read from the
/// largest index down.
///
/// The state is the length of the matched prefix of `c_1, c_2, ...`. From state
/// `s`, a digit below `c_{s+1}` closes the block (back to 0), a digit equal to
/// `c_{s+1}` extends the prefix, which is only allowed while `s + 1 < L`. Every
/// state accepts: a trailing partial prefix is a terminal block.
#[derive(Debug, Clone)]
pub struct LegalityAutomaton {
    coeffs: Vec<u32>,
}

impl LegalityAutomaton {
    pub fn new(rec: &Recurrence) -> Self {
        LegalityAutomaton {
            coeffs: rec.coeffs().to_vec(),
        }
    }

    pub fn states(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest digit allowed in `state`.
    pub fn max_digit(&self, state: usize) -> u32 {
        let c = self.coeffs[state];
        if state + 1 < self.coeffs.len() {
            c
        } else {
            c - 1
        }
    }

    pub fn step(&self, state: usize, digit: u32) -> Option<usize> {
        let c = self.coeffs[state];
        match digit.cmp(&c) {
            Ordering::Less => Some(0),
            Ordering::Equal if state + 1 < self.coeffs.len() => Some(state + 1),
            _ => None,
        }
    }
}

/// A legal decomposition `m = sum a_j G_{r_j}` stored sparsely, largest index first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<(usize, u32)>", try_from = "Vec<(usize, u32)>")]
pub struct Decomposition {
    terms: Vec<(usize, u32)>,
    summands: u64,
}

impl Decomposition {
    /// Builds from `(index, multiplicity)` pairs in strictly descending index order.
    pub fn from_terms(terms: Vec<(usize, u32)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Malformed("no terms".into()));
        }
        if terms.iter().any(|&(i, a)| i == 0 || a == 0) {
            return Err(Error::Malformed(
                "indices and multiplicities must be positive".into(),
            ));
        }
        if terms.windows(2).any(|w| w[0].0 <= w[1].0) {
            return Err(Error::Malformed("indices must strictly decrease".into()));
        }
        let summands = terms.iter().map(|&(_, a)| a as u64).sum();
        Ok(Decomposition { terms, summands })
    }

    /// From a dense coefficient list `a_1..a_n` where `a_1` multiplies `G_n`.
    pub fn from_dense(dense: &[u32]) -> Result<Self> {
        let n = dense.len();
        Decomposition::from_terms(
            dense
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(pos, &a)| (n - pos, a))
                .collect(),
        )
    }

    /// Interval index `n`: the decomposed value lies in `[G_n, G_{n+1})`.
    pub fn n(&self) -> usize {
        self.terms[0].0
    }

    pub fn terms(&self) -> &[(usize, u32)] {
        &self.terms
    }

    /// `k(m)`, summands counted with multiplicity.
    pub fn summands(&self) -> u64 {
        self.summands
    }

    pub fn to_dense(&self) -> Vec<u32> {
        let n = self.n();
        let mut dense = vec![0; n];
        for &(i, a) in &self.terms {
            dense[n - i] = a;
        }
        dense
    }

    pub fn smallest_index(&self) -> usize {
        self.terms.last().expect("non-empty").0
    }
}

impl From<Decomposition> for Vec<(usize, u32)> {
    fn from(d: Decomposition) -> Self {
        d.terms
    }
}

impl TryFrom<Vec<(usize, u32)>> for Decomposition {
    type Error = Error;
    fn try_from(v: Vec<(usize, u32)>) -> Result<Self> {
        Decomposition::from_terms(v)
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, &(i, a)) in self.terms.iter().enumerate() {
            if pos > 0 {
                f.write_str(" + ")?;
            }
            if a == 1 {
                write!(f, "G_{i}")?;
            } else {
                write!(f, "{a}*G_{i}")?;
            }
        }
        Ok(())
    }
}

/// Legality of a dense coefficient list `a_1..a_m` (`a_1` multiplies the largest term).
pub fn is_legal(rec: &Recurrence, coeffs: &[u32]) -> Result<bool> {
    match coeffs.first() {
        None => return Err(Error::Malformed("empty coefficient list".into())),
        Some(0) => return Err(Error::Malformed("a_1 must be positive".into())),
        _ => {}
    }
    let automaton = LegalityAutomaton::new(rec);
    let mut state = 0;
    for &a in coeffs {
        match automaton.step(state, a) {
            Some(s) => state = s,
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// Receives the terms of a decomposition as the greedy walk produces them.
pub trait TermSink {
    fn push(&mut self, index: usize, multiplicity: u32);
}

impl TermSink for Vec<(usize, u32)> {
    fn push(&mut self, index: usize, multiplicity: u32) {
        Vec::push(self, (index, multiplicity));
    }
}

/// Grammar-constrained greedy decomposition fed one sequence value at a time,
/// from the top index down to 1.
///
/// Decoupling from [`SequenceTable`] lets large-`n` callers stream `G_i` from a
/// [`crate::recurrence::SequenceWindow`] instead of storing every value.
#[derive(Debug, Clone)]
pub struct GreedyWalk<'a, S> {
    automaton: &'a LegalityAutomaton,
    remainder: BigUint,
    state: usize,
    next_index: usize,
    sink: S,
}

impl<'a, S: TermSink> GreedyWalk<'a, S> {
    /// Starts a walk for `m` whose first index to be offered is `top`.
    pub fn new(automaton: &'a LegalityAutomaton, m: BigUint, top: usize, sink: S) -> Self {
        GreedyWalk {
            automaton,
            remainder: m,
            state: 0,
            next_index: top,
            sink,
        }
    }

    /// Offers `G_index`; indices must arrive in descending order without skips.
    pub fn offer(&mut self, index: usize, value: &BigUint) {
        debug_assert_eq!(index, self.next_index);
        self.next_index = index.saturating_sub(1);
        let cap = self.automaton.max_digit(self.state);
        let mut digit = 0;
        while digit < cap && self.remainder >= *value {
            self.remainder -= value;
            digit += 1;
        }
        if digit > 0 {
            self.sink.push(index, digit);
        }
        self.state = self
            .automaton
            .step(self.state, digit)
            .expect("greedy digit is within the automaton cap");
    }

    pub fn remainder(&self) -> &BigUint {
        &self.remainder
    }

    pub fn finish(self) -> (S, BigUint) {
        (self.sink, self.remainder)
    }
}

/// Unique legal decomposition of `m >= 1`.
pub fn decompose(table: &SequenceTable, m: &BigUint) -> Result<Decomposition> {
    if m.is_zero() {
        return Err(Error::ZeroValue);
    }
    let n = table.locate(m).ok_or_else(|| Error::TableTooShort {
        needed: table.needed_len(m),
        have: table.len(),
    })?;
    let automaton = LegalityAutomaton::new(table.recurrence());
    let mut walk = GreedyWalk::new(&automaton, m.clone(), n, Vec::new());
    for i in (1..=n).rev() {
        walk.offer(i, table.get(i)?);
    }
    let (terms, rest) = walk.finish();
    if !rest.is_zero() {
        // Unreachable for a valid recurrence; kept as a hard failure rather than a wrong answer.
        return Err(Error::Malformed(format!("greedy left remainder {rest}")));
    }
    Decomposition::from_terms(terms)
}

/// `sum a_j G_{r_j}`.
pub fn reconstruct(table: &SequenceTable, d: &Decomposition) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for &(i, a) in d.terms() {
        total += table.get(i)? * a;
    }
    Ok(total)
}

/// Whether the gap below the smallest summand is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrailingGap {
    #[default]
    Excluded,
    /// Adds one gap of length `r_min`, the distance from the smallest summand to index 0.
    Included,
}

/// Gap multiset with the default convention (trailing gap excluded).
pub fn gap_list(d: &Decomposition) -> Vec<usize> {
    gap_list_with(d, TrailingGap::Excluded)
}

/// Gap multiset: `a - 1` zeros per term of multiplicity `a`, plus one gap per
/// pair of adjacent distinct indices. Sorted ascending.
pub fn gap_list_with(d: &Decomposition, trailing: TrailingGap) -> Vec<usize> {
    let mut gaps = Vec::with_capacity(d.summands() as usize);
    for &(_, a) in d.terms() {
        gaps.extend(std::iter::repeat(0).take(a as usize - 1));
    }
    gaps.extend(d.terms().windows(2).map(|w| w[0].0 - w[1].0));
    if trailing == TrailingGap::Included {
        gaps.push(d.smallest_index());
    }
    gaps.sort_unstable();
    gaps
}

/// Longest gap; 0 for a single summand.
pub fn longest_gap(d: &Decomposition) -> usize {
    longest_gap_with(d, TrailingGap::Excluded)
}

pub fn longest_gap_with(d: &Decomposition, trailing: TrailingGap) -> usize {
    let inner = d
        .terms()
        .windows(2)
        .map(|w| w[0].0 - w[1].0)
        .max()
        .unwrap_or(0);
    match trailing {
        TrailingGap::Excluded => inner,
        TrailingGap::Included => inner.max(d.smallest_index()),
    }
}

/// Running gap statistics of one decomposition, filled by a [`GreedyWalk`]
/// without storing the terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GapTally {
    /// `histogram[g]` = number of gaps of length `g`.
    pub histogram: Vec<u64>,
    pub summands: u64,
    pub longest: usize,
    last_index: Option<usize>,
}

impl GapTally {
    pub fn gap_count(&self) -> u64 {
        self.summands.saturating_sub(1)
    }

    fn bump(&mut self, g: usize, by: u64) {
        if self.histogram.len() <= g {
            self.histogram.resize(g + 1, 0);
        }
        self.histogram[g] += by;
    }

    pub fn from_decomposition(d: &Decomposition) -> Self {
        let mut t = GapTally::default();
        for &(i, a) in d.terms() {
            t.push(i, a);
        }
        t
    }
}

impl TermSink for GapTally {
    fn push(&mut self, index: usize, multiplicity: u32) {
        if multiplicity > 1 {
            self.bump(0, multiplicity as u64 - 1);
        }
        if let Some(prev) = self.last_index {
            let g = prev - index;
            self.bump(g, 1);
            self.longest = self.longest.max(g);
        }
        self.summands += multiplicity as u64;
        self.last_index = Some(index);
    }
}

/// Every legal decomposition with leading index `n`, in ascending order of value.
///
/// Walks legal digit strings in lexicographic order with the legality automaton;
/// it never consults the greedy algorithm, so it serves as an independent oracle.
#[derive(Debug, Clone)]
pub struct IntervalEnumerator {
    automaton: LegalityAutomaton,
    digits: Vec<u32>,
    // states[p] is the automaton state before reading digits[p].
    states: Vec<usize>,
    started: bool,
    done: bool,
}

impl IntervalEnumerator {
    fn new(rec: &Recurrence, n: usize) -> Self {
        let automaton = LegalityAutomaton::new(rec);
        let mut e = IntervalEnumerator {
            automaton,
            digits: vec![0; n],
            states: vec![0; n + 1],
            started: false,
            done: n == 0,
        };
        if n > 0 {
            e.digits[0] = 1;
            e.fill_from(0);
        }
        e
    }

    /// Recomputes states after position `p` and zeroes everything past it.
    fn fill_from(&mut self, p: usize) {
        for q in p + 1..self.digits.len() {
            self.digits[q] = 0;
        }
        for q in p..self.digits.len() {
            self.states[q + 1] = self
                .automaton
                .step(self.states[q], self.digits[q])
                .expect("zero and incremented digits stay legal");
        }
    }

    fn advance(&mut self) -> bool {
        for p in (0..self.digits.len()).rev() {
            if self.digits[p] < self.automaton.max_digit(self.states[p]) {
                self.digits[p] += 1;
                self.fill_from(p);
                return true;
            }
        }
        false
    }
}

impl IntervalEnumerator {
    /// Next digit string (most significant first) without building a [`Decomposition`].
    pub fn next_digits(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(&self.digits)
    }
}

impl Iterator for IntervalEnumerator {
    type Item = Decomposition;

    fn next(&mut self) -> Option<Decomposition> {
        self.next_digits()
            .map(|d| Decomposition::from_dense(d).expect("leading digit is positive"))
    }
}

/// Streams the decompositions of every `m` in `[G_n, G_{n+1})`, refusing intervals wider than `cap`.
pub fn enumerate_interval(
    table: &SequenceTable,
    n: usize,
    cap: u64,
) -> Result<IntervalEnumerator> {
    let width = table.width(n)?;
    if width > BigUint::from(cap) {
        return Err(Error::IntervalTooLarge {
            n,
            width: width.to_string(),
            cap,
        });
    }
    Ok(IntervalEnumerator::new(table.recurrence(), n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(s: &str) -> Recurrence {
        s.parse().unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn legality_examples() {
        let fib = rec("1,1");
        assert!(is_legal(&fib, &[1, 0, 1]).unwrap());
        assert!(!is_legal(&fib, &[1, 1]).unwrap());
        let r24 = rec("2,4");
        assert!(is_legal(&r24, &[2, 3]).unwrap());
        assert!(!is_legal(&r24, &[3, 0]).unwrap());
        assert!(!is_legal(&r24, &[2, 4]).unwrap());
        let b10 = rec("10");
        assert!(is_legal(&b10, &[9, 0, 9, 1]).unwrap());
        assert!(!is_legal(&b10, &[10]).unwrap());
        assert!(matches!(is_legal(&fib, &[0, 1]), Err(Error::Malformed(_))));
        assert!(is_legal(&fib, &[]).is_err());
    }

    #[test]
    fn decompose_examples() {
        let fib = SequenceTable::new(rec("1,1"), 15);
        let d = decompose(&fib, &big(100)).unwrap();
        assert_eq!(d.terms(), &[(10, 1), (5, 1), (3, 1)]);
        assert_eq!(d.to_string(), "G_10 + G_5 + G_3");
        for n in 1..14 {
            let d = decompose(&fib, fib.get(n).unwrap()).unwrap();
            assert_eq!(d.terms(), &[(n, 1)]);
        }
        let r24 = SequenceTable::new(rec("2,4"), 6);
        let d = decompose(&r24, &big(9)).unwrap();
        assert_eq!(d.terms(), &[(2, 2), (1, 3)]);
        assert_eq!(d.summands(), 5);
    }

    #[test]
    fn decompose_errors() {
        let fib = SequenceTable::new(rec("1,1"), 10);
        assert_eq!(decompose(&fib, &big(0)), Err(Error::ZeroValue));
        assert_eq!(
            decompose(&fib, &big(100)),
            Err(Error::TableTooShort {
                needed: 11,
                have: 10
            })
        );
    }

    #[test]
    fn reconstruct_examples() {
        let fib = SequenceTable::new(rec("1,1"), 12);
        let d = Decomposition::from_terms(vec![(10, 1), (5, 1), (3, 1)]).unwrap();
        assert_eq!(reconstruct(&fib, &d).unwrap(), big(100));
        let single = Decomposition::from_terms(vec![(7, 1)]).unwrap();
        assert_eq!(&reconstruct(&fib, &single).unwrap(), fib.get(7).unwrap());
        assert!(Decomposition::from_terms(vec![]).is_err());
        let far = Decomposition::from_terms(vec![(40, 1)]).unwrap();
        assert!(matches!(
            reconstruct(&fib, &far),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn gap_examples() {
        let d = Decomposition::from_terms(vec![(701, 1), (601, 24), (2, 2013)]).unwrap();
        let gaps = gap_list(&d);
        assert_eq!(gaps.len(), 2037);
        assert_eq!(d.summands(), 2038);
        assert_eq!(gaps.iter().filter(|&&g| g == 0).count(), 2035);
        assert_eq!(&gaps[2035..], &[100, 599]);
        assert_eq!(longest_gap(&d), 599);

        let single = Decomposition::from_terms(vec![(9, 1)]).unwrap();
        assert!(gap_list(&single).is_empty());
        assert_eq!(longest_gap(&single), 0);
        assert_eq!(longest_gap_with(&single, TrailingGap::Included), 9);

        let hundred = Decomposition::from_terms(vec![(10, 1), (5, 1), (3, 1)]).unwrap();
        assert_eq!(gap_list(&hundred), vec![2, 5]);
        assert_eq!(longest_gap(&hundred), 5);
        assert_eq!(
            gap_list_with(&hundred, TrailingGap::Included),
            vec![2, 3, 5]
        );
    }

    #[test]
    fn tally_matches_gap_list() {
        let d = Decomposition::from_terms(vec![(701, 1), (601, 24), (2, 2013)]).unwrap();
        let t = GapTally::from_decomposition(&d);
        assert_eq!(t.summands, 2038);
        assert_eq!(t.gap_count(), 2037);
        assert_eq!(t.histogram[0], 2035);
        assert_eq!(t.histogram[100], 1);
        assert_eq!(t.histogram[599], 1);
        assert_eq!(t.longest, 599);
    }

    #[test]
    fn enumeration_examples() {
        let fib = SequenceTable::new(rec("1,1"), 10);
        let all: Vec<_> = enumerate_interval(&fib, 4, 100).unwrap().collect();
        let values: Vec<_> = all.iter().map(|d| reconstruct(&fib, d).unwrap()).collect();
        assert_eq!(values, vec![big(5), big(6), big(7)]);
        assert_eq!(enumerate_interval(&fib, 1, 100).unwrap().count(), 1);
        let r24 = SequenceTable::new(rec("2,4"), 5);
        let values: Vec<_> = enumerate_interval(&r24, 2, 100)
            .unwrap()
            .map(|d| reconstruct(&r24, &d).unwrap())
            .collect();
        assert_eq!(values, (3..=9u64).map(big).collect::<Vec<_>>());
        assert!(matches!(
            enumerate_interval(&fib, 8, 5),
            Err(Error::IntervalTooLarge { .. })
        ));
    }

    #[test]
    fn serde_as_pairs() {
        let d = Decomposition::from_terms(vec![(10, 1), (5, 1), (3, 1)]).unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), "[[10,1],[5,1],[3,1]]");
        let back: Decomposition = serde_json::from_str("[[2,2],[1,3]]").unwrap();
        assert_eq!(back.summands(), 5);
        assert!(serde_json::from_str::<Decomposition>("[[1,1],[2,1]]").is_err());
    }
}
