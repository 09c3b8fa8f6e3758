//! The commutative squarefree algebra generated by the edge 2-forms
//! `γ_{i,j}` (`1 ≤ i < j ≤ n`), and the curvature forms
//! `w_i = Σ_{j>i} γ_{i,j} − Σ_{j<i} γ_{j,i}` living inside it.
//!
//! Each `γ_{i,j}` is a product of two anticommuting 1-forms, so the γ's
//! commute with each other and square to zero. A monomial is therefore a set
//! of edges of the complete graph `K_n`, stored as a bitmask whose bit `b` is
//! the position of the edge in lexicographic `(i, j)` order.

use crate::error::{argument, Error, Result};
use crate::groebner::RationalPolynomial;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Largest ambient size accepted without an explicit opt-in.
pub const DEFAULT_MAX_N: usize = 8;

/// Largest ambient size representable at all: `C(11, 2) = 55` edge bits.
pub const WIDE_MAX_N: usize = 11;

/// Size of the complete graph the edges live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ambient {
    n: usize,
}

impl Ambient {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > DEFAULT_MAX_N {
            return argument(format!(
                "ambient size n = {n} outside 1..={DEFAULT_MAX_N} (use a wide ambient for larger n)"
            ));
        }
        Ok(Ambient { n })
    }

    /// Ambient sizes beyond the default cap, up to [`WIDE_MAX_N`].
    pub fn new_wide(n: usize) -> Result<Self> {
        if n == 0 || n > WIDE_MAX_N {
            return argument(format!("ambient size n = {n} outside 1..={WIDE_MAX_N}"));
        }
        Ok(Ambient { n })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn edge_count(self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Bit position of `edge` in lexicographic order.
    pub fn bit(self, edge: Edge) -> u32 {
        let (i, j) = (edge.i - 1, edge.j - 1);
        // edges (a, *) for a < i, then offset within row i
        (i * (2 * self.n - i - 1) / 2 + (j - i - 1)) as u32
    }

    pub fn edge_at(self, bit: u32) -> Edge {
        let mut rest = bit as usize;
        for i in 1..self.n {
            let row = self.n - i;
            if rest < row {
                return Edge { i, j: i + 1 + rest };
            }
            rest -= row;
        }
        panic!("bit {bit} out of range for n = {}", self.n)
    }

    pub fn edges(self) -> impl Iterator<Item = Edge> {
        let n = self.n;
        (1..n).flat_map(move |i| (i + 1..=n).map(move |j| Edge { i, j }))
    }

    pub fn check_vertex(self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            return argument(format!("vertex index {v} outside 1..={}", self.n));
        }
        Ok(())
    }

    pub fn full_mask(self) -> u64 {
        let e = self.edge_count();
        if e == 64 {
            u64::MAX
        } else {
            (1u64 << e) - 1
        }
    }
}

/// An edge `{i, j}` of `K_n` with `1 ≤ i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    i: usize,
    j: usize,
}

impl Edge {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == 0 || i >= j {
            return argument(format!("edge ({i},{j}) must satisfy 1 ≤ i < j"));
        }
        Ok(Edge { i, j })
    }

    pub fn i(self) -> usize {
        self.i
    }

    pub fn j(self) -> usize {
        self.j
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g({},{})", self.i, self.j)
    }
}

/// A squarefree monomial in the γ's: a set of edges, as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet(pub u64);

impl EdgeSet {
    pub const EMPTY: EdgeSet = EdgeSet(0);

    pub fn from_edges(ambient: Ambient, edges: &[Edge]) -> Result<Self> {
        let mut mask = 0u64;
        for &e in edges {
            if e.j > ambient.n {
                return argument(format!("edge {e} outside n = {}", ambient.n));
            }
            let bit = 1u64 << ambient.bit(e);
            if mask & bit != 0 {
                return argument(format!("edge {e} repeated"));
            }
            mask |= bit;
        }
        Ok(EdgeSet(mask))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Number of edges, i.e. the degree in the x-grading.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: EdgeSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn edges(self, ambient: Ambient) -> impl Iterator<Item = Edge> {
        BitIter(self.0).map(move |b| ambient.edge_at(b))
    }
}

/// Iterates the set bit positions of a mask in increasing order.
#[derive(Clone, Copy, Debug)]
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Exponents `(a_1, ..., a_k)` of a monomial `x^a` in `k` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All exponent vectors of total degree `d` in `k` variables, in
    /// lexicographically decreasing order (`x_1^d` first).
    pub fn all_of_degree(k: usize, d: u32) -> Vec<ExponentVector> {
        fn rec(k: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
            if prefix.len() + 1 == k {
                prefix.push(d);
                out.push(ExponentVector(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in (0..=d).rev() {
                prefix.push(a);
                rec(k, d - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if k == 0 {
            if d == 0 {
                out.push(ExponentVector(Vec::new()));
            }
            return out;
        }
        rec(k, d, &mut Vec::with_capacity(k), &mut out);
        out
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Integer linear combination of squarefree γ-monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaPolynomial {
    ambient: Ambient,
    terms: BTreeMap<EdgeSet, BigInt>,
}

impl GammaPolynomial {
    pub fn zero(ambient: Ambient) -> Self {
        GammaPolynomial {
            ambient,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ambient: Ambient) -> Self {
        Self::constant(ambient, BigInt::one())
    }

    pub fn constant(ambient: Ambient, c: BigInt) -> Self {
        let mut p = Self::zero(ambient);
        p.add_term(EdgeSet::EMPTY, c);
        p
    }

    pub fn gamma(ambient: Ambient, edge: Edge) -> Result<Self> {
        let set = EdgeSet::from_edges(ambient, &[edge])?;
        let mut p = Self::zero(ambient);
        p.add_term(set, BigInt::one());
        Ok(p)
    }

    pub fn from_terms(
        ambient: Ambient,
        terms: impl IntoIterator<Item = (EdgeSet, BigInt)>,
    ) -> Result<Self> {
        let full = ambient.full_mask();
        let mut p = Self::zero(ambient);
        for (s, c) in terms {
            if s.0 & !full != 0 {
                return argument(format!("edge set {:#x} outside n = {}", s.0, ambient.n));
            }
            p.add_term(s, c);
        }
        Ok(p)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: EdgeSet) -> BigInt {
        self.terms.get(&s).cloned().unwrap_or_default()
    }

    /// Terms in increasing bitmask order.
    pub fn terms(&self) -> impl Iterator<Item = (EdgeSet, &BigInt)> {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    /// `Some(d)` when every term has exactly `d` edges.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(|s| s.len());
        let d = degrees.next()?;
        degrees.all(|e| e == d).then_some(d)
    }

    fn add_term(&mut self, s: EdgeSet, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(s) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_ambient(&self, other: &GammaPolynomial) -> Result<()> {
        if self.ambient != other.ambient {
            return argument(format!(
                "ambient mismatch: n = {} vs n = {}",
                self.ambient.n, other.ambient.n
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &GammaPolynomial) -> Result<GammaPolynomial> {
        self.check_same_ambient(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> GammaPolynomial {
        GammaPolynomial {
            ambient: self.ambient,
            terms: self.terms.iter().map(|(s, c)| (*s, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &GammaPolynomial) -> Result<GammaPolynomial> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> GammaPolynomial {
        if c.is_zero() {
            return Self::zero(self.ambient);
        }
        GammaPolynomial {
            ambient: self.ambient,
            terms: self.terms.iter().map(|(s, x)| (*s, x * c)).collect(),
        }
    }

    /// Product in the squarefree algebra: terms sharing an edge vanish.
    pub fn multiply(&self, other: &GammaPolynomial) -> Result<GammaPolynomial> {
        self.check_same_ambient(other)?;
        let mut out = Self::zero(self.ambient);
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                if s.is_disjoint(*t) {
                    out.add_term(EdgeSet(s.0 | t.0), a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> GammaPolynomial {
        let mut acc = Self::one(self.ambient);
        for _ in 0..e {
            if acc.is_zero() {
                break;
            }
            acc = acc.multiply(self).expect("same ambient");
        }
        acc
    }

    /// Image under the adjacent transposition `τ_t` swapping vertices `t`
    /// and `t+1`: every edge is relabelled and `γ_{t,t+1}` changes sign.
    pub fn apply_transposition(&self, t: usize) -> Result<GammaPolynomial> {
        let n = self.ambient.n;
        if t == 0 || t >= n {
            return argument(format!("transposition index {t} outside 1..={}", n - 1));
        }
        let swap = |v: usize| {
            if v == t {
                t + 1
            } else if v == t + 1 {
                t
            } else {
                v
            }
        };
        let flipped = Edge { i: t, j: t + 1 };
        let mut out = Self::zero(self.ambient);
        for (s, c) in &self.terms {
            let mut mask = 0u64;
            let mut negate = false;
            for e in s.edges(self.ambient) {
                if e == flipped {
                    negate = !negate;
                }
                let (a, b) = (swap(e.i), swap(e.j));
                let image = Edge {
                    i: a.min(b),
                    j: a.max(b),
                };
                mask |= 1u64 << self.ambient.bit(image);
            }
            out.add_term(EdgeSet(mask), if negate { -c } else { c.clone() });
        }
        Ok(out)
    }

    /// Text form: one line `±c * g(i,j) g(i,j) ...` per term, in increasing
    /// bitmask order. The zero polynomial dumps as the empty string.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            if c.is_negative() {
                out.push_str(&format!("{c} *"));
            } else {
                out.push_str(&format!("+{c} *"));
            }
            for e in s.edges(self.ambient) {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_dump(ambient: Ambient, text: &str) -> Result<GammaPolynomial> {
        let mut terms = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (coef, rest) = line
                .split_once('*')
                .ok_or_else(|| Error::Parse(format!("missing '*' in {line:?}")))?;
            let coef = coef.trim().trim_start_matches('+');
            let c: BigInt = coef
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {coef:?}")))?;
            let mut edges = Vec::new();
            for tok in rest.split_whitespace() {
                let inner = tok
                    .strip_prefix("g(")
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("bad edge token {tok:?}")))?;
                let (i, j) = inner
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad edge token {tok:?}")))?;
                let parse = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad vertex in {tok:?}")))
                };
                edges.push(Edge::new(parse(i)?, parse(j)?)?);
            }
            terms.push((EdgeSet::from_edges(ambient, &edges)?, c));
        }
        GammaPolynomial::from_terms(ambient, terms)
    }
}

impl fmt::Display for GammaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (s, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let edges: Vec<String> = s.edges(self.ambient).map(|e| e.to_string()).collect();
            if edges.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", edges.join("*"))?;
            } else {
                write!(f, "{mag}*{}", edges.join("*"))?;
            }
        }
        Ok(())
    }
}

/// The curvature form `w_i`: sum of row `i` of the antisymmetric matrix of
/// γ's, `Σ_{j>i} γ_{i,j} − Σ_{j<i} γ_{j,i}`.
pub fn curvature_form(i: usize, ambient: Ambient) -> Result<GammaPolynomial> {
    ambient.check_vertex(i)?;
    let n = ambient.n;
    let mut p = GammaPolynomial::zero(ambient);
    for j in 1..=n {
        if j == i {
            continue;
        }
        let e = Edge {
            i: i.min(j),
            j: i.max(j),
        };
        let c = if j > i { BigInt::one() } else { -BigInt::one() };
        p.add_term(EdgeSet(1u64 << ambient.bit(e)), c);
    }
    Ok(p)
}

/// Signed single-edge terms of `w_i`, `(bit, ±1)`, for kernels that avoid
/// big integers.
pub(crate) fn curvature_terms(i: usize, ambient: Ambient) -> Vec<(u32, i64)> {
    (1..=ambient.n)
        .filter(|&j| j != i)
        .map(|j| {
            let e = Edge {
                i: i.min(j),
                j: i.max(j),
            };
            (ambient.bit(e), if j > i { 1 } else { -1 })
        })
        .collect()
}

pub(crate) fn check_subset(subset: &[usize], ambient: Ambient) -> Result<()> {
    for (idx, &v) in subset.iter().enumerate() {
        ambient.check_vertex(v)?;
        if subset[..idx].contains(&v) {
            return argument(format!("vertex {v} repeated in subset"));
        }
    }
    Ok(())
}

/// `∏_t w_{subset[t]}^{alpha[t]}` in the squarefree algebra.
pub fn evaluate_exponent(
    alpha: &ExponentVector,
    subset: &[usize],
    ambient: Ambient,
) -> Result<GammaPolynomial> {
    check_subset(subset, ambient)?;
    if alpha.len() != subset.len() {
        return argument(format!(
            "exponent vector has {} entries but subset has {}",
            alpha.len(),
            subset.len()
        ));
    }
    let mut acc = GammaPolynomial::one(ambient);
    for (&a, &v) in alpha.0.iter().zip(subset) {
        if a == 0 {
            continue;
        }
        let w = curvature_form(v, ambient)?;
        for _ in 0..a {
            acc = acc.multiply(&w)?;
            if acc.is_zero() {
                return Ok(acc);
            }
        }
    }
    Ok(acc)
}

/// Value of a rational polynomial at the curvature forms: an integer
/// γ-polynomial over a positive common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledGammaPolynomial {
    pub numerator: GammaPolynomial,
    pub denominator: BigInt,
}

impl ScaledGammaPolynomial {
    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn coefficient(&self, s: EdgeSet) -> BigRational {
        BigRational::new(self.numerator.coefficient(s), self.denominator.clone())
    }
}

/// Substitutes `x_t ↦ w_{subset[t]}` into `p`.
pub fn evaluate_polynomial(
    p: &RationalPolynomial,
    subset: &[usize],
    ambient: Ambient,
) -> Result<ScaledGammaPolynomial> {
    check_subset(subset, ambient)?;
    if p.nvars() > subset.len() {
        return argument(format!(
            "polynomial in {} variables but only {} forms supplied",
            p.nvars(),
            subset.len()
        ));
    }
    let denominator = p
        .terms()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));

    let forms = subset[..p.nvars()]
        .iter()
        .map(|&v| curvature_form(v, ambient))
        .collect::<Result<Vec<_>>>()?;
    // powers[t][e] = w_t^e, extended on demand
    let mut powers: Vec<Vec<GammaPolynomial>> = forms
        .iter()
        .map(|_| vec![GammaPolynomial::one(ambient)])
        .collect();

    let mut out = GammaPolynomial::zero(ambient);
    for (mono, c) in p.terms() {
        let scaled = c * BigRational::from_integer(denominator.clone());
        debug_assert!(scaled.is_integer());
        let mut value = GammaPolynomial::constant(ambient, scaled.to_integer());
        for (t, e) in mono.exponents(p.nvars()).into_iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[t].len() <= e as usize {
                let next = powers[t].last().unwrap().multiply(&forms[t])?;
                powers[t].push(next);
            }
            value = value.multiply(&powers[t][e as usize])?;
            if value.is_zero() {
                break;
            }
        }
        for (s, x) in value.terms {
            out.add_term(s, x);
        }
    }
    Ok(ScaledGammaPolynomial {
        numerator: out,
        denominator,
    })
}
