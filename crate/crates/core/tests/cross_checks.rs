use chernbott::edge_algebra::{evaluate_polynomial, Ambient};
use chernbott::exact_linalg::{hilbert_series_rank, MatrixCache, RankOptions};
use chernbott::groebner::{
    build_ideal_generators, buchberger, normal_form, Monomial, RationalPolynomial,
};
use chernbott::presentations::groebner_series;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn generators_evaluate_to_zero_on_every_subset() {
    for n in 2..=5 {
        let a = Ambient::new(n).unwrap();
        for k in 1..=n {
            let ideal = build_ideal_generators(k, n).unwrap();
            let subset: Vec<usize> = (n - k + 1..=n).collect();
            for g in &ideal.generators {
                let v = evaluate_polynomial(&g.polynomial, &subset, a).unwrap();
                assert!(v.is_zero(), "k={k} n={n} subset {:?}", g.subset);
            }
        }
    }
}

#[test]
fn normal_form_zero_iff_evaluation_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(chernbott::DEFAULT_SEED);
    for (k, n) in [(2, 3), (2, 4), (3, 3), (3, 4), (2, 5)] {
        let a = Ambient::new(n).unwrap();
        let subset: Vec<usize> = (1..=k).collect();
        let gens = build_ideal_generators(k, n).unwrap().polynomials();
        let basis = buchberger(&gens).unwrap();
        for trial in 0..30 {
            // alternate ideal elements and arbitrary polynomials
            let mut p = RationalPolynomial::zero(k);
            for _ in 0..4 {
                let exps: Vec<u32> = (0..k).map(|_| rng.gen_range(0..4)).collect();
                let c = BigRational::from_integer(rng.gen_range(-4i64..=4).into());
                let term = RationalPolynomial::from_terms(k, [(Monomial::from_exponents(&exps).unwrap(), c)]).unwrap();
                p = if trial % 2 == 0 {
                    p.add(&term.mul(&gens[rng.gen_range(0..gens.len())]))
                } else {
                    p.add(&term)
                };
            }
            let nf_zero = normal_form(&p, &basis).unwrap().is_zero();
            let ev_zero = evaluate_polynomial(&p, &subset, a).unwrap().is_zero();
            assert_eq!(nf_zero, ev_zero, "k={k} n={n} p={p}");
        }
    }
}

#[test]
fn rank_and_quotient_agree_for_permuted_subsets() {
    for (n, subset) in [(4, vec![4, 2]), (5, vec![5, 1, 3]), (5, vec![2, 3, 4, 5])] {
        let rank = hilbert_series_rank(n, &subset, &RankOptions::default()).unwrap();
        let (quotient, _) = groebner_series(subset.len(), n).unwrap();
        assert_eq!(rank.series, quotient, "n={n} subset {subset:?}");
    }
}

#[test]
fn cached_and_exact_runs_match_default() {
    let dir = tempfile::tempdir().unwrap();
    let plain = hilbert_series_rank(5, &[1, 2, 3], &RankOptions::default()).unwrap();
    let cached_opts = RankOptions {
        cache: Some(MatrixCache::new(dir.path()).unwrap()),
        exact: true,
        ..RankOptions::default()
    };
    let first = hilbert_series_rank(5, &[1, 2, 3], &cached_opts).unwrap();
    let second = hilbert_series_rank(5, &[1, 2, 3], &cached_opts).unwrap();
    assert_eq!(plain.series, first.series);
    assert_eq!(first, second);
}
