//! Larger instances, ignored by default. Run with
//! `cargo test -p chernbott --test long_run -- --ignored --nocapture`.

use chernbott::combinatorics::{forest_count, verify_conjecture_total};
use chernbott::exact_linalg::{hilbert_series_rank, RankOptions};
use chernbott::presentations::{groebner_series, verify_presentation, verify_subset_independence};
use num_bigint::BigUint;
use std::time::Instant;

#[test]
#[ignore]
fn presentation_n6() {
    for k in 1..=6 {
        let t = Instant::now();
        let r = verify_presentation(k, 6, true, &RankOptions::default()).unwrap();
        println!("k={k} n=6 {:?} {:?} {:.2?}", r.left, r.verdict, t.elapsed());
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
#[ignore]
fn subsets_n6() {
    for k in 1..=6 {
        assert!(verify_subset_independence(k, 6, true, &RankOptions::default())
            .unwrap()
            .passed());
    }
}

#[test]
#[ignore]
fn forest_total_n6() {
    let r = verify_conjecture_total(6, false, &RankOptions::default()).unwrap();
    assert_eq!(r.totals.last().unwrap().total_dim, 2932);
    assert!(r.passed());
}

#[test]
#[ignore]
fn n7_quotient_series() {
    // k = 7 does not finish in desk time; by the redundancy of the last
    // form, k = 6 already carries the series of A_7
    for k in 1..=6 {
        let t = Instant::now();
        let (s, size) = groebner_series(k, 7).unwrap();
        println!("k={k} n=7 quotient {s} total {} basis {size} {:.2?}", s.total(), t.elapsed());
        if k == 6 {
            assert_eq!(BigUint::from(s.total()), forest_count(7));
        }
    }
}

#[test]
#[ignore]
fn n7_rank_series_small_k() {
    for k in 1..=5 {
        let t = Instant::now();
        let subset: Vec<usize> = (1..=k).collect();
        let opts = RankOptions { max_cells: 2_000_000_000, ..RankOptions::default() };
        let s = hilbert_series_rank(7, &subset, &opts).unwrap();
        let (q, _) = groebner_series(k, 7).unwrap();
        println!("k={k} n=7 rank {} {:.2?}", s.series, t.elapsed());
        assert_eq!(s.series, q);
    }
}
