//! Sparse multivariate polynomials over the rationals, ordered by degrevlex.

use crate::error::{argument, Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Maximum number of variables a packed monomial can carry.
pub const MAX_VARS: usize = 8;

/// Maximum exponent of a single variable.
pub const MAX_EXPONENT: u32 = 127;

const GUARD: u64 = 0x8080_8080_8080_8080;

/// A monomial `x_1^{a_1} ... x_k^{a_k}` packed one byte per variable, `x_1`
/// in the lowest byte. Exponents stay below 128 so a guard bit per byte
/// detects borrows in divisibility tests and overflow in products.
///
/// `Ord` is the graded reverse-lexicographic order with `x_1 > ... > x_k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_VARS {
            return argument(format!("at most {MAX_VARS} variables are supported"));
        }
        let mut packed = 0u64;
        for (v, &e) in exps.iter().enumerate() {
            if e > MAX_EXPONENT {
                return argument(format!("exponent {e} exceeds {MAX_EXPONENT}"));
            }
            packed |= (e as u64) << (8 * v);
        }
        Ok(Monomial(packed))
    }

    /// `x_{v+1}` for a zero-based variable index `v`.
    pub fn var(v: usize) -> Self {
        assert!(v < MAX_VARS);
        Monomial(1u64 << (8 * v))
    }

    pub fn exponent(self, v: usize) -> u32 {
        ((self.0 >> (8 * v)) & 0xff) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.exponent(v)).collect()
    }

    pub fn degree(self) -> u32 {
        self.0.to_le_bytes().iter().map(|&b| b as u32).sum()
    }

    /// Highest variable index (one-based) with a nonzero exponent.
    pub fn support_len(self) -> usize {
        if self.0 == 0 {
            0
        } else {
            (64 - self.0.leading_zeros() as usize).div_ceil(8)
        }
    }

    pub fn divides(self, other: Monomial) -> bool {
        ((other.0 | GUARD) - self.0) & GUARD == GUARD
    }

    pub fn checked_mul(self, other: Monomial) -> Option<Monomial> {
        let s = self.0 + other.0;
        (s & GUARD == 0).then_some(Monomial(s))
    }

    /// `self / other`; the caller guarantees divisibility.
    pub fn div(self, other: Monomial) -> Monomial {
        debug_assert!(other.divides(self));
        Monomial(self.0 - other.0)
    }

    pub fn lcm(self, other: Monomial) -> Monomial {
        let (a, b) = (self.0.to_le_bytes(), other.0.to_le_bytes());
        let mut out = [0u8; 8];
        for i in 0..8 {
            out[i] = a[i].max(b[i]);
        }
        Monomial(u64::from_le_bytes(out))
    }

    pub fn is_coprime(self, other: Monomial) -> bool {
        let (a, b) = (self.0.to_le_bytes(), other.0.to_le_bytes());
        a.iter().zip(b.iter()).all(|(&x, &y)| x == 0 || y == 0)
    }

    /// `Some(v)` when the monomial is a pure power of the zero-based variable `v`.
    pub fn pure_power_of(self) -> Option<usize> {
        let bytes = self.0.to_le_bytes();
        let mut found = None;
        for (v, &b) in bytes.iter().enumerate() {
            if b != 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(v);
            }
        }
        found
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // With the last variable in the most significant byte, a smaller
        // packed value means a smaller exponent in the last differing variable,
        // which degrevlex ranks higher.
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for v in 0..MAX_VARS {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", v + 1)?;
            } else {
                write!(f, "x{}^{}", v + 1, e)?;
            }
        }
        Ok(())
    }
}

/// A polynomial in `nvars` variables with exact rational coefficients.
/// Terms are kept sorted by decreasing monomial and never hold zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalPolynomial {
    nvars: usize,
    terms: Vec<(Monomial, BigRational)>,
}

impl RationalPolynomial {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        RationalPolynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.push((Monomial::ONE, c));
        }
        p
    }

    /// The variable `x_{v+1}`.
    pub fn var(nvars: usize, v: usize) -> Self {
        assert!(v < nvars);
        Self::from_terms(nvars, [(Monomial::var(v), BigRational::one())]).unwrap()
    }

    /// `Σ x_{v+1}` over zero-based indices `vars`.
    pub fn linear_sum(nvars: usize, vars: &[usize]) -> Self {
        Self::from_terms(
            nvars,
            vars.iter().map(|&v| (Monomial::var(v), BigRational::one())),
        )
        .unwrap()
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Result<Self> {
        if nvars > MAX_VARS {
            return argument(format!("at most {MAX_VARS} variables are supported"));
        }
        let mut v: Vec<(Monomial, BigRational)> = Vec::new();
        for (m, c) in terms {
            if m.support_len() > nvars {
                return argument(format!("monomial {m} uses more than {nvars} variables"));
            }
            v.push((m, c));
        }
        Ok(Self::normalize(nvars, v))
    }

    fn normalize(nvars: usize, mut v: Vec<(Monomial, BigRational)>) -> Self {
        v.sort_by(|a, b| b.0.cmp(&a.0));
        let mut terms: Vec<(Monomial, BigRational)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match terms.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        RationalPolynomial { nvars, terms }
    }

    pub(crate) fn from_sorted_terms(nvars: usize, terms: Vec<(Monomial, BigRational)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        RationalPolynomial { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Same polynomial viewed in a ring with more variables.
    pub fn with_nvars(&self, nvars: usize) -> Result<Self> {
        if nvars < self.nvars && self.terms.iter().any(|(m, _)| m.support_len() > nvars) {
            return argument("polynomial uses variables beyond the requested count");
        }
        Ok(RationalPolynomial {
            nvars,
            terms: self.terms.clone(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in decreasing degrevlex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().map(|(m, c)| (m, c))
    }

    pub fn leading_term(&self) -> Option<(Monomial, &BigRational)> {
        self.terms.first().map(|(m, c)| (*m, c))
    }

    pub fn leading_monomial(&self) -> Option<Monomial> {
        self.terms.first().map(|(m, _)| *m)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn coefficient(&self, m: Monomial) -> BigRational {
        self.terms
            .iter()
            .find(|(x, _)| *x == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.iter().map(|(m, _)| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(
            self.nvars, other.nvars,
            "polynomials live in rings with different variable counts"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut v = self.terms.clone();
        v.extend(other.terms.iter().cloned());
        Self::normalize(self.nvars, v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        RationalPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    /// Multiplies by `c * m`.
    pub fn mul_term(&self, m: Monomial, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        RationalPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(x, y)| (x.checked_mul(m).expect("exponent overflow"), y * c))
                .collect(),
        }
    }

    /// # Panics
    /// If an exponent of the product exceeds [`MAX_EXPONENT`].
    pub fn mul(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut v = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                v.push((a.checked_mul(*b).expect("exponent overflow"), x * y));
            }
        }
        Self::normalize(self.nvars, v)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `∂/∂x_{v+1}`.
    pub fn derivative(&self, v: usize) -> Self {
        let step = Monomial::var(v);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = m.exponent(v);
                (e > 0).then(|| (m.div(step), c * BigRational::from_integer(BigInt::from(e))))
            })
            .collect();
        Self::normalize(self.nvars, terms)
    }

    /// Mixed partial `∂^l / ∂x_{i_1} ... ∂x_{i_l}` over distinct zero-based
    /// variables.
    pub fn mixed_partial(&self, vars: &[usize]) -> Self {
        vars.iter().fold(self.clone(), |p, &v| p.derivative(v))
    }

    /// Multiplies through by the least common denominator and removes the
    /// integer content, keeping the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        use num_integer::Integer;
        let lcm = self
            .terms
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .terms
            .iter()
            .map(|(_, c)| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if ints[0].is_negative() {
            g = -g;
        }
        RationalPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .zip(ints)
                .map(|((m, _), x)| (*m, BigRational::from_integer(x / &g)))
                .collect(),
        }
    }

    pub fn monic(&self) -> Self {
        match self.terms.first() {
            None => self.clone(),
            Some((_, lc)) => self.scale(&lc.recip()),
        }
    }

    pub fn parse_with_vars(s: &str, nvars: usize) -> Result<Self> {
        let p: RationalPolynomial = s.parse()?;
        if p.nvars > nvars {
            return argument(format!(
                "polynomial {s:?} uses x{} but only {nvars} variables are allowed",
                p.nvars
            ));
        }
        p.with_nvars(nvars)
    }
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if *m == Monomial::ONE {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Parses the ASCII grammar printed by `Display`: signed terms of the form
/// `c*x1^a1*x2^a2` with optional rational coefficient `p/q` and optional
/// exponents. The variable count is the largest index that occurs.
impl FromStr for RationalPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let mut terms = Vec::new();
        let mut nvars = 0usize;
        parser.skip_ws();
        if parser.at_end() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut first = true;
        while !parser.at_end() {
            let mut negative = false;
            match parser.peek() {
                Some(b'+') => parser.pos += 1,
                Some(b'-') => {
                    negative = true;
                    parser.pos += 1;
                }
                _ if first => {}
                other => {
                    return Err(Error::Parse(format!(
                        "expected '+' or '-' at byte {}, found {:?}",
                        parser.pos,
                        other.map(|b| b as char)
                    )))
                }
            }
            first = false;
            let (m, c, vars) = parser.term()?;
            nvars = nvars.max(vars);
            terms.push((m, if negative { -c } else { c }));
            parser.skip_ws();
        }
        RationalPolynomial::from_terms(nvars, terms)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("expected digits at byte {start}")));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    fn small(&mut self) -> Result<u32> {
        let n = self.number()?;
        u32::try_from(n).map_err(|_| Error::Parse("integer too large".into()))
    }

    /// One product of factors; returns the monomial, coefficient and the
    /// number of variables it needs.
    fn term(&mut self) -> Result<(Monomial, BigRational, usize)> {
        let mut coef = BigRational::one();
        let mut exps = [0u32; MAX_VARS];
        let mut nvars = 0;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'x') => {
                    self.pos += 1;
                    let idx = self.small()? as usize;
                    if idx == 0 || idx > MAX_VARS {
                        return Err(Error::Parse(format!("variable x{idx} out of range")));
                    }
                    self.skip_ws();
                    let mut e = 1;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.skip_ws();
                        e = self.small()?;
                    }
                    exps[idx - 1] += e;
                    nvars = nvars.max(idx);
                }
                Some(b) if b.is_ascii_digit() => {
                    let num = self.number()?;
                    self.skip_ws();
                    let mut c = BigRational::from_integer(num);
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        self.skip_ws();
                        let den = self.number()?;
                        if den.is_zero() {
                            return Err(Error::Parse("zero denominator".into()));
                        }
                        c /= BigRational::from_integer(den);
                    }
                    coef *= c;
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected {:?} at byte {}",
                        other.map(|b| b as char),
                        self.pos
                    )))
                }
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let m = Monomial::from_exponents(&exps)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Ok((m, coef, nvars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mono(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e).unwrap()
    }

    #[test]
    fn degrevlex_order() {
        // x1 > x2 > x3
        assert!(mono(&[1, 0, 0]) > mono(&[0, 1, 0]));
        assert!(mono(&[0, 1, 0]) > mono(&[0, 0, 1]));
        // degree first
        assert!(mono(&[0, 0, 2]) > mono(&[1, 0, 0]));
        // x1 x3 < x2^2 in degrevlex (smaller power of last variable wins)
        assert!(mono(&[0, 2, 0]) > mono(&[1, 0, 1]));
        assert!(mono(&[2, 0, 0]) > mono(&[1, 1, 0]));
        // x1^2 x3 < x1 x2^2: x3 exponent 1 vs 0
        assert!(mono(&[1, 2, 0]) > mono(&[2, 0, 1]));
    }

    #[test]
    fn divisibility_lcm_and_coprimality() {
        let a = mono(&[2, 1, 0]);
        let b = mono(&[3, 1, 4]);
        assert!(a.divides(b));
        assert!(!b.divides(a));
        assert_eq!(b.div(a), mono(&[1, 0, 4]));
        assert_eq!(a.lcm(mono(&[0, 3, 1])), mono(&[2, 3, 1]));
        assert!(mono(&[2, 0, 0]).is_coprime(mono(&[0, 1, 1])));
        assert!(!a.is_coprime(b));
        assert_eq!(mono(&[0, 0, 5]).pure_power_of(), Some(2));
        assert_eq!(a.pure_power_of(), None);
        assert!(mono(&[127]).checked_mul(mono(&[1])).is_none());
        assert!(Monomial::from_exponents(&[128]).is_err());
    }

    #[test]
    fn parse_and_print() {
        let p: RationalPolynomial = "x1^2 - 3/2*x1*x2 + 4 + x3".parse().unwrap();
        assert_eq!(p.nvars(), 3);
        assert_eq!(p.to_string(), "x1^2 - 3/2*x1*x2 + x3 + 4");
        let q: RationalPolynomial = p.to_string().parse().unwrap();
        assert_eq!(p, q);
        let r: RationalPolynomial = "-x2 + x2".parse().unwrap();
        assert!(r.is_zero());
        assert_eq!(r.to_string(), "0");
        assert!("x1 +".parse::<RationalPolynomial>().is_err());
        assert!("x0".parse::<RationalPolynomial>().is_err());
        assert!("1/0".parse::<RationalPolynomial>().is_err());
        assert!("".parse::<RationalPolynomial>().is_err());
        let s: RationalPolynomial = "2 * x1 * 3 * x1".parse().unwrap();
        assert_eq!(s.to_string(), "6*x1^2");
    }

    #[test]
    fn binomial_cube() {
        let s = RationalPolynomial::linear_sum(2, &[0, 1]);
        assert_eq!(
            s.pow(3).to_string(),
            "x1^3 + 3*x1^2*x2 + 3*x1*x2^2 + x2^3"
        );
    }

    #[test]
    fn partial_derivatives() {
        let p: RationalPolynomial = "x1^3*x2^2 + 5*x2 + 7".parse().unwrap();
        assert_eq!(p.derivative(0).to_string(), "3*x1^2*x2^2");
        assert_eq!(p.mixed_partial(&[0, 1]).to_string(), "6*x1^2*x2");
        let g = RationalPolynomial::linear_sum(2, &[0, 1]).pow(5);
        let d = g.derivative(0);
        assert_eq!(
            d,
            RationalPolynomial::linear_sum(2, &[0, 1])
                .pow(4)
                .scale(&BigRational::from_integer(5.into()))
        );
    }

    #[test]
    fn primitive_part_clears_denominators() {
        let p: RationalPolynomial = "-1/2*x1 + 3/4*x2".parse().unwrap();
        assert_eq!(p.primitive_part().to_string(), "2*x1 - 3*x2");
        assert_eq!(p.monic().to_string(), "x1 - 3/2*x2");
    }

    fn arb_poly() -> impl Strategy<Value = RationalPolynomial> {
        prop::collection::vec(
            (prop::collection::vec(0u32..4, 3), -4i64..=4, 1i64..=3),
            0..6,
        )
        .prop_map(|terms| {
            RationalPolynomial::from_terms(
                3,
                terms.into_iter().map(|(e, n, d)| {
                    (
                        Monomial::from_exponents(&e).unwrap(),
                        BigRational::new(n.into(), d.into()),
                    )
                }),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(p in arb_poly()) {
            let q = RationalPolynomial::parse_with_vars(&p.to_string(), 3).unwrap();
            prop_assert_eq!(p, q);
        }

        #[test]
        fn leibniz_rule(p in arb_poly(), q in arb_poly(), v in 0usize..3) {
            let lhs = p.mul(&q).derivative(v);
            let rhs = p.derivative(v).mul(&q).add(&p.mul(&q.derivative(v)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn order_is_monomial_order(a in prop::collection::vec(0u32..10, 4),
                                   b in prop::collection::vec(0u32..10, 4),
                                   c in prop::collection::vec(0u32..10, 4)) {
            let (a, b, c) = (mono(&a), mono(&b), mono(&c));
            prop_assert_eq!(a.cmp(&b), a.checked_mul(c).unwrap().cmp(&b.checked_mul(c).unwrap()));
            prop_assert!(a.checked_mul(c).unwrap() >= a);
        }
    }
}
