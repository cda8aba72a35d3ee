use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zeckgap::bulkgaps::{transfer_histogram, x_count_sum};
use zeckgap::longestgap::{count_less_than, count_less_than_automaton};
use zeckgap::montecarlo::sample_uniform;
use zeckgap::spectral::summand_totals;
use zeckgap::zeck::{is_legal, longest_gap_with, GapTally, TrailingGap};
use zeckgap::{decompose, gap_list, longest_gap, reconstruct, Recurrence, SequenceTable};

fn recurrence() -> impl Strategy<Value = Recurrence> {
    let longer = (1u32..=4, prop::collection::vec(0u32..=3, 0..=2), 1u32..=3).prop_map(|(first, mid, last)| {
        let mut c = vec![first];
        c.extend(mid);
        c.push(last);
        c
    });
    prop_oneof![3 => longer, 1 => (2u32..=12).prop_map(|b| vec![b])]
        .prop_map(|c| Recurrence::new(c).expect("valid by construction"))
}

fn positive_recurrence() -> impl Strategy<Value = Recurrence> {
    prop::collection::vec(1u32..=3, 1..=3)
        .prop_filter("[1] is degenerate", |c| c != &vec![1])
        .prop_map(|c| Recurrence::new(c).unwrap())
}

fn big(digits: &[u8]) -> BigUint {
    BigUint::from_bytes_be(digits) + BigUint::one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decompose_roundtrips(rec in recurrence(), bytes in prop::collection::vec(any::<u8>(), 1..=24)) {
        let m = big(&bytes);
        let mut table = SequenceTable::new(rec.clone(), 8);
        table.extend(table.needed_len(&m));
        let d = decompose(&table, &m).unwrap();
        prop_assert_eq!(reconstruct(&table, &d).unwrap(), m.clone());
        prop_assert!(is_legal(&rec, &d.to_dense()).unwrap());
        let (lo, hi) = table.interval(d.n()).unwrap();
        prop_assert!(lo <= &m && &m < hi);
    }

    #[test]
    fn gap_bookkeeping(rec in recurrence(), bytes in prop::collection::vec(any::<u8>(), 1..=16)) {
        let m = big(&bytes);
        let mut table = SequenceTable::new(rec, 8);
        table.extend(table.needed_len(&m));
        let d = decompose(&table, &m).unwrap();
        let gaps = gap_list(&d);
        prop_assert_eq!(gaps.len() as u64, d.summands() - 1);
        prop_assert_eq!(gaps.last().copied().unwrap_or(0), longest_gap(&d));
        prop_assert!(longest_gap_with(&d, TrailingGap::Included) >= longest_gap(&d));
        let tally = GapTally::from_decomposition(&d);
        prop_assert_eq!(tally.gap_count(), d.summands() - 1);
        prop_assert_eq!(tally.longest, longest_gap(&d));
    }

    #[test]
    fn gap_totals_agree(rec in recurrence(), n in 1usize..=30) {
        let hist = transfer_histogram(&rec, n);
        let sums = summand_totals(&rec, n);
        prop_assert_eq!(hist.total, sums.gaps(n));
        let table = SequenceTable::new(rec, n + 2);
        prop_assert_eq!(sums.count(n), &table.width(n).unwrap());
    }

    #[test]
    fn x_counts_match_transfer(rec in positive_recurrence(), n in 1usize..=25) {
        let table = SequenceTable::new(rec.clone(), n + 2);
        let hist = transfer_histogram(&rec, n);
        for k in 1..=n {
            let closed = x_count_sum(&table, n, k).unwrap();
            prop_assert_eq!(closed, hist.count(k), "k = {}", k);
        }
    }

    #[test]
    fn longest_counts_are_a_cdf(rec in recurrence(), n in 1usize..=30) {
        let table = SequenceTable::new(rec.clone(), n + 2);
        let mut prev = BigUint::zero();
        for f in 1..=n + 1 {
            let c = count_less_than_automaton(&rec, n, f);
            if f > rec.j_last() {
                prop_assert_eq!(&count_less_than(&table, n, f).unwrap(), &c, "f = {}", f);
            }
            prop_assert!(c >= prev);
            prev = c;
        }
        prop_assert_eq!(prev, table.width(n).unwrap());
    }

    #[test]
    fn samples_stay_in_the_interval(rec in recurrence(), n in 1usize..=200, seed: u64) {
        let table = SequenceTable::new(rec, n + 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = table.interval(n).unwrap();
        for _ in 0..8 {
            let m = sample_uniform(&table, n, &mut rng).unwrap();
            prop_assert!(lo <= &m && &m < hi);
        }
    }
}
