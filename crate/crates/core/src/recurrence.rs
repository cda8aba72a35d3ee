//! Positive linear recurrences and their materialized sequences.
//!
//! A recurrence `G_{n+1} = c_1 G_n + ... + c_L G_{n+1-L}` is given by its
//! non-negative coefficient list with `c_1, c_L > 0`. The sequence starts at
//! `G_1 = 1` and, for `1 <= n < L`, uses `G_{n+1} = c_1 G_n + ... + c_n G_1 + 1`.
//! Indexing is 1-based everywhere.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated coefficient data `c_1..c_L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Recurrence {
    coeffs: Vec<u32>,
    sparse: Vec<(usize, u32)>,
    all_positive: bool,
}

impl Recurrence {
    pub fn new(coeffs: Vec<u32>) -> Result<Self> {
        let (&first, &last) = match (coeffs.first(), coeffs.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::EmptyRecurrence),
        };
        if first == 0 {
            return Err(Error::LeadingCoefficientZero);
        }
        if last == 0 {
            return Err(Error::LastCoefficientZero);
        }
        if coeffs == [1] {
            return Err(Error::DegenerateRecurrence);
        }
        let sparse = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, &c)| (j, c))
            .collect();
        let all_positive = coeffs.iter().all(|&c| c >= 1);
        Ok(Recurrence {
            coeffs,
            sparse,
            all_positive,
        })
    }

    pub fn fibonacci() -> Self {
        Recurrence::new(vec![1, 1]).expect("valid")
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// `c_i` with 1-based `i`; zero outside `1..=L`.
    pub fn c(&self, i: usize) -> u32 {
        if i == 0 {
            0
        } else {
            self.coeffs.get(i - 1).copied().unwrap_or(0)
        }
    }

    /// Length `L` of the dense coefficient list.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Pairs `(j_i, c_{j_i+1})` over the non-zero coefficients, `j_1 = 0`.
    pub fn sparse(&self) -> &[(usize, u32)] {
        &self.sparse
    }

    /// `j_L`, the offset of the last non-zero coefficient.
    pub fn j_last(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Gaps `g_{i-1} = j_i - j_{i-1}` of the sparse view, preceded by `g_0 = 1`.
    pub fn sparse_gaps(&self) -> Vec<usize> {
        std::iter::once(1)
            .chain(self.sparse.windows(2).map(|w| w[1].0 - w[0].0))
            .collect()
    }

    pub fn all_positive(&self) -> bool {
        self.all_positive
    }

    /// Rebuilds the dense coefficient list from the sparse view.
    pub fn densify(sparse: &[(usize, u32)]) -> Vec<u32> {
        let len = sparse.last().map_or(0, |&(j, _)| j + 1);
        let mut dense = vec![0; len];
        for &(j, c) in sparse {
            dense[j] = c;
        }
        dense
    }

    pub fn max_coeff(&self) -> u32 {
        self.coeffs.iter().copied().max().unwrap_or(0)
    }
}

impl TryFrom<Vec<u32>> for Recurrence {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Recurrence::new(v)
    }
}

impl From<Recurrence> for Vec<u32> {
    fn from(r: Recurrence) -> Self {
        r.coeffs
    }
}

impl FromStr for Recurrence {
    type Err = Error;

    /// Parses a comma-separated coefficient list such as `"1,0,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: String| Error::Parse {
            input: s.to_string(),
            reason,
        };
        if s.trim().is_empty() {
            return Err(Error::EmptyRecurrence);
        }
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| parse_err(format!("`{}`: {e}", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Recurrence::new(coeffs)
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Computes `G_{next}` from the values so far (`values[0] = G_1`).
fn next_value(rec: &Recurrence, values: &[BigUint]) -> BigUint {
    let n = values.len();
    let l = rec.len();
    let terms = n.min(l);
    let mut acc = BigUint::zero();
    for t in 1..=terms {
        let c = rec.c(t);
        if c == 0 {
            continue;
        }
        let g = &values[n - t];
        if c == 1 {
            acc += g;
        } else {
            acc += g * c;
        }
    }
    if n < l {
        acc += 1u32;
    }
    acc
}

/// Materialized values `G_1..G_N` of a recurrence.
#[derive(Debug, Clone)]
pub struct SequenceTable {
    recurrence: Recurrence,
    values: Vec<BigUint>,
}

impl SequenceTable {
    pub fn new(recurrence: Recurrence, len: usize) -> Self {
        let mut table = SequenceTable {
            recurrence,
            values: Vec::new(),
        };
        table.extend(len);
        table
    }

    pub fn recurrence(&self) -> &Recurrence {
        &self.recurrence
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    /// Grows the table to `len` terms. Shorter requests are no-ops.
    pub fn extend(&mut self, len: usize) {
        self.values.reserve(len.saturating_sub(self.values.len()));
        while self.values.len() < len {
            let v = if self.values.is_empty() {
                BigUint::one()
            } else {
                next_value(&self.recurrence, &self.values)
            };
            self.values.push(v);
        }
    }

    /// Consuming form of [`SequenceTable::extend`].
    pub fn extended(mut self, len: usize) -> Self {
        self.extend(len);
        self
    }

    /// `G_n`, 1-based.
    pub fn get(&self, n: usize) -> Result<&BigUint> {
        if n == 0 || n > self.values.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.values.len(),
            });
        }
        Ok(&self.values[n - 1])
    }

    /// Bounds of the half-open interval `[G_n, G_{n+1})`.
    pub fn interval(&self, n: usize) -> Result<(&BigUint, &BigUint)> {
        if n == 0 || n + 1 > self.values.len() {
            return Err(Error::IndexOutOfRange {
                index: n + 1,
                len: self.values.len(),
            });
        }
        Ok((&self.values[n - 1], &self.values[n]))
    }

    /// `G_{n+1} - G_n`, the number of integers whose decomposition tops out at `G_n`.
    pub fn width(&self, n: usize) -> Result<BigUint> {
        let (lo, hi) = self.interval(n)?;
        Ok(hi - lo)
    }

    /// Largest `n` with `G_n <= m`, if `m` lies below the last materialized value.
    pub fn locate(&self, m: &BigUint) -> Option<usize> {
        if m.is_zero() {
            return None;
        }
        let above = self.values.partition_point(|g| g <= m);
        (above < self.values.len()).then_some(above)
    }

    /// Number of terms needed so that `m < G_{len}`.
    pub fn needed_len(&self, m: &BigUint) -> usize {
        let mut values = self.values.clone();
        if values.is_empty() {
            values.push(BigUint::one());
        }
        while values.last().expect("non-empty") <= m {
            let v = next_value(&self.recurrence, &values);
            values.push(v);
        }
        values.len()
    }
}

/// A sliding window of `L` consecutive sequence values that walks up or down
/// without keeping the whole table.
///
/// Holds `G_{low}, ..., G_{low+L-1}`. Memory stays at `L` big integers, which is
/// what makes decomposition at `n ~ 10^6` feasible.
#[derive(Debug, Clone)]
pub struct SequenceWindow {
    recurrence: Recurrence,
    low: usize,
    // window[0] = G_low
    window: VecDeque<BigUint>,
}

impl SequenceWindow {
    /// Window with `G_low = G_1`.
    pub fn start(recurrence: Recurrence) -> Self {
        let table = SequenceTable::new(recurrence.clone(), recurrence.len());
        SequenceWindow {
            window: table.values.into_iter().collect(),
            recurrence,
            low: 1,
        }
    }

    /// Window whose lowest entry is `G_low`.
    pub fn at(recurrence: Recurrence, low: usize) -> Self {
        assert!(low >= 1, "indices are 1-based");
        let mut w = SequenceWindow::start(recurrence);
        while w.low < low {
            w.step_up();
        }
        w
    }

    pub fn low(&self) -> usize {
        self.low
    }

    pub fn high(&self) -> usize {
        self.low + self.window.len() - 1
    }

    /// `G_i` for `low <= i <= high`.
    pub fn get(&self, i: usize) -> Option<&BigUint> {
        i.checked_sub(self.low).and_then(|k| self.window.get(k))
    }

    /// Advances to `G_{low+1}..G_{high+1}`.
    pub fn step_up(&mut self) {
        let l = self.recurrence.len();
        let high = self.high();
        // high + 1 >= L + 1 once the window has L entries, so the pure recurrence applies.
        let mut acc = self.window.pop_front().expect("window is non-empty");
        acc *= self.recurrence.c(l);
        for t in 1..l {
            let c = self.recurrence.c(t);
            if c == 0 {
                continue;
            }
            let g = &self.window[self.window.len() - t];
            if c == 1 {
                acc += g;
            } else {
                acc += g * c;
            }
        }
        debug_assert!(high + 1 > l);
        self.window.push_back(acc);
        self.low += 1;
    }

    /// Moves to `G_{low-1}..G_{high-1}`. Returns `false` at `low = 1`.
    pub fn step_down(&mut self) -> bool {
        if self.low == 1 {
            return false;
        }
        let l = self.recurrence.len();
        // G_{high} = sum_{t=1}^{L} c_t G_{high-t}, valid since high >= L + 1.
        let mut acc = self.window.pop_back().expect("window is non-empty");
        for t in 1..l {
            let c = self.recurrence.c(t);
            if c == 0 {
                continue;
            }
            let g = &self.window[self.window.len() - t];
            if c == 1 {
                acc -= g;
            } else {
                acc -= g * c;
            }
        }
        let cl = self.recurrence.c(l);
        if cl != 1 {
            debug_assert!((&acc % cl).is_zero());
            acc /= cl;
        }
        self.window.push_front(acc);
        self.low -= 1;
        true
    }
}
