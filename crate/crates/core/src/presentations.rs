//! End-to-end checks that tie the modules together: rank series against the
//! quotient by the power-sum ideal, independence of the chosen forms,
//! comparison with the cohomology ring, and the derivative membership test.

use crate::edge_algebra::{evaluate_polynomial, Ambient};
use crate::error::{argument, Error, Result};
use crate::exact_linalg::{hilbert_series_rank, RankOptions, RankSeries};
use crate::groebner::{
    build_ideal_generators, buchberger, cohomology_poincare, hilbert_series_quotient,
    membership_via_derivatives, normal_form, IdealBases, Monomial, RationalPolynomial,
};
use crate::hilbert::HilbertSeries;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

/// Largest `n` for presentation and subset checks without the long-run flag.
pub const DEFAULT_MAX_N: usize = 5;
pub const LONG_RUN_MAX_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetSeries {
    pub subset: Vec<usize>,
    pub series: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleCounts {
    pub members: usize,
    pub non_members: usize,
    pub rerolled: usize,
    pub disagreements: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MethodDetails {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<u64>,
    pub exact_fallback: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groebner_basis_size: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subsets: Vec<SubsetSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleCounts>,
}

impl MethodDetails {
    fn record_rank(&mut self, r: &RankSeries) {
        if self.primes.is_empty() {
            self.primes = r.primes.to_vec();
        }
        self.exact_fallback |= !r.disagreements.is_empty();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationResult {
    pub name: String,
    pub parameters: Parameters,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<Vec<i64>>,
    pub verdict: Verdict,
    pub elapsed_ms: u64,
    pub details: MethodDetails,
}

impl VerificationResult {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn check_kn(k: usize, n: usize, long_run: bool) -> Result<()> {
    if k == 0 || k > n {
        return argument(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}"));
    }
    let cap = if long_run { LONG_RUN_MAX_N } else { DEFAULT_MAX_N };
    if n > cap {
        return Err(Error::Resource(format!(
            "n = {n} exceeds the cap n ≤ {cap}{}",
            if long_run { "" } else { " without --long-run" }
        )));
    }
    Ok(())
}

fn first(k: usize) -> Vec<usize> {
    (1..=k).collect()
}

/// Hilbert series of `Q[x_1..x_k] / I_{k,n}` by Buchberger.
pub fn groebner_series(k: usize, n: usize) -> Result<(HilbertSeries, usize)> {
    let ideal = build_ideal_generators(k, n)?;
    let basis = buchberger(&ideal.polynomials())?;
    Ok((hilbert_series_quotient(&basis)?, basis.len()))
}

/// Rank series of `A_{k,n}` against the quotient by the `2^k − 1` power-sum
/// generators.
pub fn verify_presentation(k: usize, n: usize, long_run: bool, opts: &RankOptions) -> Result<VerificationResult> {
    check_kn(k, n, long_run)?;
    let start = Instant::now();
    let rank = hilbert_series_rank(n, &first(k), opts)?;
    let (quotient, size) = groebner_series(k, n)?;
    let mut details = MethodDetails {
        groebner_basis_size: Some(size),
        ..MethodDetails::default()
    };
    details.record_rank(&rank);
    Ok(VerificationResult {
        name: "presentation".into(),
        parameters: Parameters {
            k: Some(k),
            n: Some(n),
            seed: Some(opts.seed),
            ..Parameters::default()
        },
        verdict: Verdict::from_bool(rank.series == quotient),
        left: rank.series.coefficients().to_vec(),
        right: quotient.coefficients().to_vec(),
        difference: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
        details,
    })
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (1..=n).filter(|v| m >> (v - 1) & 1 == 1).collect())
        .collect::<std::collections::BTreeSet<Vec<usize>>>()
        .into_iter()
        .collect()
}

/// Rank series for every `k`-subset of the forms; pass iff all coincide.
pub fn verify_subset_independence(k: usize, n: usize, long_run: bool, opts: &RankOptions) -> Result<VerificationResult> {
    check_kn(k, n, long_run)?;
    let start = Instant::now();
    let mut details = MethodDetails::default();
    for subset in k_subsets(n, k) {
        let r = hilbert_series_rank(n, &subset, opts)?;
        details.record_rank(&r);
        details.subsets.push(SubsetSeries {
            subset,
            series: r.series.coefficients().to_vec(),
        });
    }
    let left = details.subsets[0].series.clone();
    let right = details.subsets.last().unwrap().series.clone();
    let ok = details.subsets.iter().all(|s| s.series == left);
    Ok(VerificationResult {
        name: "subsets".into(),
        parameters: Parameters {
            k: Some(k),
            n: Some(n),
            seed: Some(opts.seed),
            ..Parameters::default()
        },
        left,
        right,
        difference: None,
        verdict: Verdict::from_bool(ok),
        elapsed_ms: start.elapsed().as_millis() as u64,
        details,
    })
}

/// `dim A_n` against the Poincaré polynomial of the flag variety, degree by
/// degree; pass iff the algebra is at least as large everywhere.
pub fn compare_with_cohomology(n: usize, long_run: bool, opts: &RankOptions) -> Result<VerificationResult> {
    check_kn(n, n, long_run)?;
    let start = Instant::now();
    let rank = hilbert_series_rank(n, &first(n), opts)?;
    let coh = cohomology_poincare(n)?;
    let difference = rank.series.difference(&coh);
    let mut details = MethodDetails::default();
    details.record_rank(&rank);
    Ok(VerificationResult {
        name: "cohomology".into(),
        parameters: Parameters {
            n: Some(n),
            seed: Some(opts.seed),
            ..Parameters::default()
        },
        left: rank.series.coefficients().to_vec(),
        right: coh.coefficients().to_vec(),
        verdict: Verdict::from_bool(difference.iter().all(|&x| x >= 0)),
        difference: Some(difference),
        elapsed_ms: start.elapsed().as_millis() as u64,
        details,
    })
}

fn monomials_up_to(k: usize, max_degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        for alpha in crate::edge_algebra::ExponentVector::all_of_degree(k, d) {
            out.push(Monomial::from_exponents(&alpha.0).expect("small exponents"));
        }
    }
    out
}

fn random_polynomial(rng: &mut ChaCha8Rng, k: usize, support: &[Monomial], density: f64) -> RationalPolynomial {
    let terms = support.iter().filter_map(|&m| {
        if !rng.gen_bool(density) {
            return None;
        }
        let c: i64 = rng.gen_range(-3..=3);
        Some((m, BigRational::from_integer(c.into())))
    });
    RationalPolynomial::from_terms(k, terms).expect("k within variable cap")
}

/// Largest `(k, n)` sampled without the long-run flag.
pub const DEFAULT_MAX_SAMPLE_K: usize = 3;
pub const DEFAULT_MAX_SAMPLE_N: usize = 4;

/// Outcome of the three membership tests on one polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleAnswers {
    pub evaluation: bool,
    pub normal_form: bool,
    pub derivatives: bool,
}

impl OracleAnswers {
    pub fn agree(&self) -> bool {
        self.evaluation == self.normal_form && self.normal_form == self.derivatives
    }
}

/// Membership of `p` in the vanishing ideal by substitution, by normal form
/// against a Gröbner basis of the power-sum ideal, and by the derivative
/// recursion.
pub fn membership_oracles(p: &RationalPolynomial, k: usize, n: usize, bases: &mut IdealBases) -> Result<OracleAnswers> {
    let ambient = Ambient::new(n)?;
    let evaluation = evaluate_polynomial(p, &first(k), ambient)?.is_zero();
    let normal_form = normal_form(p, bases.get(k, n)?)?.is_zero();
    let derivatives = membership_via_derivatives(p, k, n, bases)?;
    Ok(OracleAnswers {
        evaluation,
        normal_form,
        derivatives,
    })
}

/// Seeded random members `Σ q_i g_i` (coefficients in `[-3, 3]`, `q_i` of
/// degree at most 2) and non-members (a member plus a random perturbation of
/// degree at most 3, redrawn while it still evaluates to zero), alternating.
/// Pass iff all three membership tests agree on every sample.
pub fn verify_derivative_criterion(
    k: usize,
    n: usize,
    samples: usize,
    seed: u64,
    long_run: bool,
) -> Result<VerificationResult> {
    if k == 0 || k > n {
        return argument(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}"));
    }
    if !long_run && (k > DEFAULT_MAX_SAMPLE_K || n > DEFAULT_MAX_SAMPLE_N) {
        return Err(Error::Resource(format!(
            "derivative check limited to k ≤ {DEFAULT_MAX_SAMPLE_K}, n ≤ {DEFAULT_MAX_SAMPLE_N} without --long-run"
        )));
    }
    check_kn(k, n, long_run)?;
    let start = Instant::now();
    let ambient = Ambient::new(n)?;
    let generators = build_ideal_generators(k, n)?.polynomials();
    let low = monomials_up_to(k, 2);
    let perturb = monomials_up_to(k, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bases = IdealBases::new();
    let mut counts = SampleCounts::default();

    for s in 0..samples {
        let mut p = RationalPolynomial::zero(k);
        for g in &generators {
            p = p.add(&random_polynomial(&mut rng, k, &low, 0.5).mul(g));
        }
        let want_member = s % 2 == 0;
        if !want_member {
            loop {
                let q = p.add(&random_polynomial(&mut rng, k, &perturb, 0.3));
                if !evaluate_polynomial(&q, &first(k), ambient)?.is_zero() {
                    p = q;
                    break;
                }
                counts.rerolled += 1;
            }
        }
        let answers = membership_oracles(&p, k, n, &mut bases)?;
        if want_member {
            counts.members += 1;
        } else {
            counts.non_members += 1;
        }
        if !answers.agree() || answers.evaluation != want_member {
            log::warn!("membership oracles disagree on sample {s}: {answers:?} for {p}");
            counts.disagreements += 1;
        }
    }
    Ok(VerificationResult {
        name: "lemma29".into(),
        parameters: Parameters {
            k: Some(k),
            n: Some(n),
            samples: Some(samples),
            seed: Some(seed),
        },
        left: Vec::new(),
        right: Vec::new(),
        difference: None,
        verdict: Verdict::from_bool(counts.disagreements == 0),
        elapsed_ms: start.elapsed().as_millis() as u64,
        details: MethodDetails {
            samples: Some(counts),
            ..MethodDetails::default()
        },
    })
}
