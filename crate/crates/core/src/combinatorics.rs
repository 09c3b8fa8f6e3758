//! Labeled forests, Eulerian digraphs, and checks of the dimension formulas
//! for `A_n` and `A_{k,n}` against computed Hilbert series.

use crate::error::{argument, Error, Result};
use crate::exact_linalg::{hilbert_series_rank, RankOptions};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

/// Largest `n` for [`forest_count_bruteforce`].
pub const MAX_BRUTE_FOREST_N: usize = 6;
/// Largest `n` for [`eulerian_bruteforce`].
pub const MAX_BRUTE_EULERIAN_N: usize = 5;
/// Largest `n` for [`verify_conjecture_total`] without the long-run flag.
pub const DEFAULT_MAX_TOTAL_N: usize = 6;
pub const LONG_RUN_MAX_TOTAL_N: usize = 7;

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Labeled trees on `m` vertices (Cayley), with `1` for `m ∈ {1, 2}`.
pub fn tree_count(m: usize) -> BigUint {
    if m <= 2 {
        return BigUint::one();
    }
    BigUint::from(m).pow(m as u32 - 2)
}

/// Number of acyclic simple graphs on `n` labeled vertices. Conditions on
/// the size `m` of the tree containing the last vertex.
pub fn forest_count(n: usize) -> BigUint {
    let mut f = vec![BigUint::one()];
    for n in 1..=n {
        let total = (1..=n)
            .map(|m| binomial(n - 1, m - 1) * tree_count(m) * &f[n - m])
            .sum();
        f.push(total);
    }
    f.pop().unwrap()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Counts acyclic edge subsets of `K_n` directly.
pub fn forest_count_bruteforce(n: usize) -> Result<BigUint> {
    if n > MAX_BRUTE_FOREST_N {
        return Err(Error::Resource(format!(
            "brute-force forest count limited to n ≤ {MAX_BRUTE_FOREST_N}"
        )));
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let count = (0u64..1 << edges.len())
        .into_par_iter()
        .filter(|&mask| {
            let mut parent: Vec<usize> = (0..n).collect();
            edges.iter().enumerate().all(|(b, &(i, j))| {
                if mask >> b & 1 == 0 {
                    return true;
                }
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
                ri != rj
            })
        })
        .count();
    Ok(BigUint::from(count))
}

/// Counts loop-free digraphs on `n` labeled vertices, at most one arc per
/// ordered pair, with indegree equal to outdegree everywhere (the empty
/// digraph included).
pub fn eulerian_bruteforce(n: usize) -> Result<BigUint> {
    if n > MAX_BRUTE_EULERIAN_N {
        return Err(Error::Resource(format!(
            "brute-force Eulerian count limited to n ≤ {MAX_BRUTE_EULERIAN_N}"
        )));
    }
    let arcs: Vec<(usize, usize)> = (0..n)
        .flat_map(|t| (0..n).filter(move |&h| h != t).map(move |h| (t, h)))
        .collect();
    let count = (0u64..1 << arcs.len())
        .into_par_iter()
        .filter(|&mask| {
            let mut balance = [0i32; MAX_BRUTE_EULERIAN_N];
            for (b, &(t, h)) in arcs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    balance[t] += 1;
                    balance[h] -= 1;
                }
            }
            balance.iter().all(|&x| x == 0)
        })
        .count();
    Ok(BigUint::from(count))
}

fn as_string<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TotalRecord {
    pub n: usize,
    pub series: Vec<u64>,
    pub total_dim: u64,
    #[serde(serialize_with = "as_string")]
    pub forest_count: BigUint,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolynomialRecord {
    pub k: usize,
    pub n_values: Vec<usize>,
    pub dims: Vec<u64>,
    /// Row `r` holds the `r`-th finite differences.
    pub differences: Vec<Vec<i64>>,
    pub is_monic_degree_k: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub totals: Vec<TotalRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<PolynomialRecord>,
}

impl ConjectureReport {
    pub fn passed(&self) -> bool {
        self.totals.iter().all(|r| r.matches)
            && self.polynomial.as_ref().is_none_or(|p| p.is_monic_degree_k)
    }
}

fn total_dimension(k: usize, n: usize, opts: &RankOptions) -> Result<(Vec<u64>, u64)> {
    let subset: Vec<usize> = (1..=k).collect();
    let s = hilbert_series_rank(n, &subset, opts)?.series;
    Ok((s.coefficients().to_vec(), s.total()))
}

/// Compares `dim A_n` with the forest count for `n = 1..=n_max`.
pub fn verify_conjecture_total(n_max: usize, long_run: bool, opts: &RankOptions) -> Result<ConjectureReport> {
    let cap = if long_run {
        LONG_RUN_MAX_TOTAL_N
    } else {
        DEFAULT_MAX_TOTAL_N
    };
    if n_max == 0 {
        return argument("max n must be at least 1");
    }
    if n_max > cap {
        return Err(Error::Resource(format!(
            "total-dimension check limited to n ≤ {cap}{}",
            if long_run { "" } else { " without --long-run" }
        )));
    }
    let totals = (1..=n_max)
        .map(|n| {
            let (series, total_dim) = total_dimension(n, n, opts)?;
            let forest_count = forest_count(n);
            Ok(TotalRecord {
                n,
                series,
                total_dim,
                matches: BigUint::from(total_dim) == forest_count,
                forest_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjectureReport {
        totals,
        polynomial: None,
    })
}

/// Finite-difference table of `values`; row 0 is the values themselves.
pub fn difference_table(values: &[i64]) -> Vec<Vec<i64>> {
    let mut table = vec![values.to_vec()];
    while table.last().unwrap().len() > 1 {
        let row = table.last().unwrap();
        let next = row.windows(2).map(|w| w[1] - w[0]).collect();
        table.push(next);
    }
    table
}

/// Whether the `k`-th differences of `values` (at consecutive arguments)
/// are all equal to `k!`, i.e. the values lie on a monic degree-`k`
/// polynomial. Needs at least `k + 2` values so the test is not vacuous.
pub fn is_monic_of_degree(values: &[i64], k: usize) -> Result<bool> {
    if values.len() < k + 2 {
        return argument(format!(
            "{} values cannot test degree {k}; need at least {}",
            values.len(),
            k + 2
        ));
    }
    let fact: i64 = (1..=k as i64).product();
    Ok(difference_table(values)[k].iter().all(|&x| x == fact))
}

/// Tests whether `n ↦ dim A_{k,n}` is a monic polynomial of degree `k` on
/// the given consecutive range.
pub fn verify_conjecture_polynomial(
    k: usize,
    n_range: std::ops::RangeInclusive<usize>,
    opts: &RankOptions,
) -> Result<ConjectureReport> {
    if k == 0 {
        return argument("k must be at least 1");
    }
    let n_values: Vec<usize> = n_range.collect();
    if n_values.len() < k + 2 {
        return argument(format!(
            "need at least {} consecutive values of n for k = {k}, got {}",
            k + 2,
            n_values.len()
        ));
    }
    if n_values[0] < k {
        return argument(format!("all n must be at least k = {k}"));
    }
    let dims = n_values
        .iter()
        .map(|&n| total_dimension(k, n, opts).map(|(_, t)| t))
        .collect::<Result<Vec<u64>>>()?;
    let signed: Vec<i64> = dims
        .iter()
        .map(|&d| d.to_i64().ok_or_else(|| Error::Resource("dimension overflow".into())))
        .collect::<Result<_>>()?;
    let is_monic_degree_k = is_monic_of_degree(&signed, k)?;
    Ok(ConjectureReport {
        totals: Vec::new(),
        polynomial: Some(PolynomialRecord {
            k,
            n_values,
            dims,
            differences: difference_table(&signed),
            is_monic_degree_k,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forest_values() {
        let f: Vec<u64> = (0..=8).map(|n| forest_count(n).to_u64().unwrap()).collect();
        assert_eq!(f, vec![1, 1, 2, 7, 38, 291, 2932, 36961, 561948]);
    }

    #[test]
    fn forest_recurrence_matches_bruteforce() {
        for n in 0..=MAX_BRUTE_FOREST_N {
            assert_eq!(forest_count(n), forest_count_bruteforce(n).unwrap(), "n {n}");
        }
        assert!(matches!(forest_count_bruteforce(7), Err(Error::Resource(_))));
    }

    #[test]
    fn forest_count_increases() {
        for n in 1..20 {
            assert!(forest_count(n + 1) > forest_count(n));
        }
    }

    #[test]
    fn single_tree_term_is_cayley() {
        // the m = n term of the recurrence alone counts spanning trees
        for m in 1..=7usize {
            let term = binomial(m - 1, m - 1) * tree_count(m) * forest_count(0);
            let cayley = if m == 1 { 1 } else { m.pow(m as u32 - 2) };
            assert_eq!(term, BigUint::from(cayley));
        }
        // spanning trees of K_4 by brute force: forests with 3 edges on 4 vertices
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut trees = 0;
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            let mut parent: Vec<usize> = (0..4).collect();
            let ok = edges.iter().enumerate().all(|(b, &(i, j))| {
                if mask >> b & 1 == 0 {
                    return true;
                }
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
                ri != rj
            });
            trees += ok as u32;
        }
        assert_eq!(trees, 16);
    }

    #[test]
    fn eulerian_values() {
        let z: Vec<u64> = (0..=5).map(|n| eulerian_bruteforce(n).unwrap().to_u64().unwrap()).collect();
        assert_eq!(z, vec![1, 1, 2, 10, 152, 7736]);
        assert!(matches!(eulerian_bruteforce(6), Err(Error::Resource(_))));
    }

    #[test]
    fn eulerian_matches_invariant_forms() {
        for n in 2..=5 {
            let z = crate::exterior_algebra::invariant_forms_hilbert(n, false).unwrap().total();
            assert_eq!(eulerian_bruteforce(n).unwrap(), BigUint::from(z));
        }
    }

    #[test]
    fn difference_tables() {
        let t = difference_table(&[2, 7, 14, 23]);
        assert_eq!(t, vec![vec![2, 7, 14, 23], vec![5, 7, 9], vec![2, 2], vec![0]]);
        assert!(is_monic_of_degree(&[2, 7, 14, 23], 2).unwrap());
        assert!(!is_monic_of_degree(&[2, 7, 14, 24], 2).unwrap());
        assert!(!is_monic_of_degree(&[4, 14, 28, 46], 2).unwrap()); // 2(n²−2)
        assert!(is_monic_of_degree(&[1, 2, 3, 4, 5], 1).unwrap());
        assert!(is_monic_of_degree(&[1, 2], 1).is_err());
        let cubes: Vec<i64> = (0..6).map(|n: i64| n * n * n - 4 * n + 1).collect();
        assert!(is_monic_of_degree(&cubes, 3).unwrap());
    }

    #[test]
    fn totals_small() {
        let r = verify_conjecture_total(4, false, &RankOptions::default()).unwrap();
        let got: Vec<(u64, bool)> = r.totals.iter().map(|t| (t.total_dim, t.matches)).collect();
        assert_eq!(got, vec![(1, true), (2, true), (7, true), (38, true)]);
        assert!(r.passed());
        assert!(matches!(
            verify_conjecture_total(7, false, &RankOptions::default()),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn polynomial_examples() {
        let opts = RankOptions::default();
        let r = verify_conjecture_polynomial(1, 1..=5, &opts).unwrap();
        let p = r.polynomial.as_ref().unwrap();
        assert_eq!(p.dims, vec![1, 2, 3, 4, 5]);
        assert!(p.is_monic_degree_k);
        let r = verify_conjecture_polynomial(2, 2..=5, &opts).unwrap();
        let p = r.polynomial.as_ref().unwrap();
        assert_eq!(p.dims, vec![2, 7, 14, 23]);
        assert!(p.dims.iter().zip(2u64..).all(|(&d, n)| d == n * n - 2));
        assert!(p.is_monic_degree_k);
        assert!(matches!(
            verify_conjecture_polynomial(2, 2..=4, &opts),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            verify_conjecture_polynomial(3, 2..=7, &opts),
            Err(Error::Argument(_))
        ));
    }
}
