//! The power-sum ideals `I_{k,n}`, membership through squarefree mixed
//! partial derivatives, and the Borel presentation of `H^*(SL_n/B)`.

use super::buchberger::{buchberger, hilbert_series_quotient, normal_form, GroebnerBasis};
use super::polynomial::{Monomial, RationalPolynomial, MAX_VARS};
use crate::error::{argument, Result};
use crate::hilbert::HilbertSeries;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// One generator `(x_{i_1} + ... + x_{i_j})^{j(n-j)+1}` together with its
/// index subset (one-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealGenerator {
    pub subset: Vec<usize>,
    pub exponent: u32,
    pub polynomial: RationalPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSpec {
    pub k: usize,
    pub n: usize,
    pub generators: Vec<IdealGenerator>,
}

impl IdealSpec {
    pub fn polynomials(&self) -> Vec<RationalPolynomial> {
        self.generators.iter().map(|g| g.polynomial.clone()).collect()
    }
}

/// Exponent attached to a subset of size `j` in ambient size `n`.
pub fn generator_exponent(j: usize, n: usize) -> u32 {
    (j * (n - j) + 1) as u32
}

/// All `2^k - 1` generators, ordered by subset size and then lexicographically.
pub fn build_ideal_generators(k: usize, n: usize) -> Result<IdealSpec> {
    if k == 0 || k > n {
        return argument(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}"));
    }
    if k > MAX_VARS {
        return argument(format!("at most {MAX_VARS} variables are supported"));
    }
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << k))
        .map(|mask| (0..k).filter(|v| mask & (1 << v) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let generators = subsets
        .into_iter()
        .map(|vars| {
            let exponent = generator_exponent(vars.len(), n);
            IdealGenerator {
                polynomial: RationalPolynomial::linear_sum(k, &vars).pow(exponent),
                subset: vars.iter().map(|v| v + 1).collect(),
                exponent,
            }
        })
        .collect();
    Ok(IdealSpec { k, n, generators })
}

/// Memoised Gröbner bases of `I_{k,n}`.
#[derive(Default)]
pub struct IdealBases {
    bases: HashMap<(usize, usize), GroebnerBasis>,
}

impl IdealBases {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, k: usize, n: usize) -> Result<&GroebnerBasis> {
        if !self.bases.contains_key(&(k, n)) {
            let ideal = build_ideal_generators(k, n)?;
            let basis = buchberger(&ideal.polynomials())?;
            self.bases.insert((k, n), basis);
        }
        Ok(&self.bases[&(k, n)])
    }
}

/// Decides `p ∈ I_{k,n}` by recursion on `n`: `p` is a member iff each of
/// its `2^k` squarefree mixed partials (the empty one included) is a member
/// at level `n - 1`. The recursion bottoms out at `n = k`, decided by normal
/// form against a Gröbner basis of `I_{k,k}`.
pub fn membership_via_derivatives(
    p: &RationalPolynomial,
    k: usize,
    n: usize,
    bases: &mut IdealBases,
) -> Result<bool> {
    if k == 0 || k > n {
        return argument(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}"));
    }
    if p.nvars() > k {
        return argument(format!("polynomial in {} variables, k = {k}", p.nvars()));
    }
    let p = p.with_nvars(k)?;
    member_rec(&p, k, n, bases)
}

fn member_rec(p: &RationalPolynomial, k: usize, n: usize, bases: &mut IdealBases) -> Result<bool> {
    if p.is_zero() {
        return Ok(true);
    }
    if n == k {
        return Ok(normal_form(p, bases.get(k, k)?)?.is_zero());
    }
    for mask in 0u32..(1 << k) {
        let vars: Vec<usize> = (0..k).filter(|v| mask & (1 << v) != 0).collect();
        let d = p.mixed_partial(&vars);
        if !member_rec(&d, k, n - 1, bases)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Poincaré polynomial of the complete flag variety,
/// `∏_{m=1}^{n} (1 + q + ... + q^{m-1})`.
pub fn cohomology_poincare(n: usize) -> Result<HilbertSeries> {
    if n == 0 {
        return argument("n must be at least 1");
    }
    let mut coeffs = vec![1u64];
    for m in 1..=n {
        let mut next = vec![0u64; coeffs.len() + m - 1];
        for (d, c) in coeffs.iter().enumerate() {
            for s in 0..m {
                next[d + s] += c;
            }
        }
        coeffs = next;
    }
    Ok(HilbertSeries::new(coeffs))
}

/// Elementary symmetric polynomial `e_j` in `n` variables.
pub fn elementary_symmetric(n: usize, j: usize) -> RationalPolynomial {
    let terms = (0u32..(1 << n))
        .filter(|mask| mask.count_ones() as usize == j)
        .map(|mask| {
            let exps: Vec<u32> = (0..n).map(|v| (mask >> v) & 1).collect();
            (Monomial::from_exponents(&exps).unwrap(), BigRational::one())
        });
    RationalPolynomial::from_terms(n, terms).unwrap()
}

/// Same series as [`cohomology_poincare`], computed by Buchberger on the
/// elementary symmetric generators.
pub fn cohomology_poincare_groebner(n: usize) -> Result<HilbertSeries> {
    if n == 0 || n > MAX_VARS {
        return argument(format!("n = {n} outside 1..={MAX_VARS}"));
    }
    let gens: Vec<RationalPolynomial> = (1..=n).map(|j| elementary_symmetric(n, j)).collect();
    hilbert_series_quotient(&buchberger(&gens)?)
}

/// Summary of a basis computation used in reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisSummary {
    pub k: usize,
    pub n: usize,
    pub generators: usize,
    pub basis_size: usize,
    pub max_degree: u32,
}

impl BasisSummary {
    pub fn new(k: usize, n: usize, generators: usize, basis: &GroebnerBasis) -> Self {
        BasisSummary {
            k,
            n,
            generators,
            basis_size: basis.len(),
            max_degree: basis
                .polys()
                .iter()
                .filter_map(|p| p.total_degree())
                .max()
                .unwrap_or(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, k: usize) -> RationalPolynomial {
        RationalPolynomial::parse_with_vars(s, k).unwrap()
    }

    #[test]
    fn generators_three_three() {
        let ideal = build_ideal_generators(3, 3).unwrap();
        let shown: Vec<String> = ideal
            .generators
            .iter()
            .map(|g| format!("{:?}^{}", g.subset, g.exponent))
            .collect();
        assert_eq!(
            shown,
            vec![
                "[1]^3", "[2]^3", "[3]^3", "[1, 2]^3", "[1, 3]^3", "[2, 3]^3", "[1, 2, 3]^1"
            ]
        );
        assert_eq!(ideal.generators[6].polynomial, p("x1 + x2 + x3", 3));
        assert_eq!(
            ideal.generators[3].polynomial,
            p("x1^3 + 3*x1^2*x2 + 3*x1*x2^2 + x2^3", 3)
        );
    }

    #[test]
    fn generators_small_cases() {
        for n in 1..7 {
            let ideal = build_ideal_generators(1, n).unwrap();
            assert_eq!(ideal.polynomials(), vec![p(&format!("x1^{n}"), 1)]);
        }
        let ideal = build_ideal_generators(2, 4).unwrap();
        let exps: Vec<u32> = ideal.generators.iter().map(|g| g.exponent).collect();
        assert_eq!(exps, vec![4, 4, 5]);
        assert_eq!(
            ideal.polynomials()[2],
            RationalPolynomial::linear_sum(2, &[0, 1]).pow(5)
        );
        for k in 1..=5 {
            assert_eq!(
                build_ideal_generators(k, 5).unwrap().generators.len(),
                (1 << k) - 1
            );
        }
        assert!(build_ideal_generators(4, 3).is_err());
        assert!(build_ideal_generators(0, 3).is_err());
    }

    #[test]
    fn derivative_membership_examples() {
        let mut bases = IdealBases::new();
        for n in 1..=5 {
            let q = p(&format!("x1^{n}"), 1);
            assert!(membership_via_derivatives(&q, 1, n, &mut bases).unwrap());
            if n > 1 {
                let below = p(&format!("x1^{}", n - 1), 1);
                assert!(!membership_via_derivatives(&below, 1, n, &mut bases).unwrap());
            }
        }
        for n in [3, 4] {
            let g = RationalPolynomial::linear_sum(2, &[0, 1]).pow(generator_exponent(2, n));
            assert!(membership_via_derivatives(&g, 2, n, &mut bases).unwrap());
        }
        assert!(!membership_via_derivatives(&p("x1", 2), 2, 3, &mut bases).unwrap());
        assert!(!membership_via_derivatives(&p("x1^2", 2), 2, 3, &mut bases).unwrap());
        let member = p("x2", 2).mul(&RationalPolynomial::linear_sum(2, &[0, 1]).pow(3));
        assert!(membership_via_derivatives(&member, 2, 3, &mut bases).unwrap());
    }

    #[test]
    fn cohomology_series() {
        assert_eq!(cohomology_poincare(1).unwrap().coefficients(), &[1]);
        assert_eq!(cohomology_poincare(2).unwrap().coefficients(), &[1, 1]);
        assert_eq!(cohomology_poincare(3).unwrap().coefficients(), &[1, 2, 2, 1]);
        assert_eq!(
            cohomology_poincare(4).unwrap().coefficients(),
            &[1, 3, 5, 6, 5, 3, 1]
        );
        for n in 1..=6 {
            let s = cohomology_poincare(n).unwrap();
            assert_eq!(s.total(), (1..=n as u64).product::<u64>());
        }
        assert!(cohomology_poincare(0).is_err());
    }

    #[test]
    fn cohomology_matches_borel_presentation() {
        for n in 1..=4 {
            assert_eq!(
                cohomology_poincare(n).unwrap(),
                cohomology_poincare_groebner(n).unwrap()
            );
        }
    }
}
