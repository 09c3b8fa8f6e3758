//! Buchberger's algorithm over the rationals, normal forms and standard
//! monomial counting.
//!
//! Internally the basis is kept as primitive integer polynomials and reduced
//! fraction-free; the public surface exposes monic rational polynomials.

use super::polynomial::{Monomial, RationalPolynomial};
use crate::error::{argument, Error, Result};
use crate::hilbert::HilbertSeries;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeSet, HashSet};

/// Primitive integer polynomial, terms sorted by decreasing monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
struct IntPoly {
    terms: Vec<(Monomial, BigInt)>,
}

impl IntPoly {
    fn from_rational(p: &RationalPolynomial) -> Self {
        let prim = p.primitive_part();
        IntPoly {
            terms: prim
                .terms()
                .map(|(m, c)| (*m, c.to_integer()))
                .collect(),
        }
    }

    fn to_monic_rational(&self, nvars: usize) -> RationalPolynomial {
        let lc = BigRational::from_integer(self.terms[0].1.clone());
        RationalPolynomial::from_sorted_terms(
            nvars,
            self.terms
                .iter()
                .map(|(m, c)| (*m, BigRational::from_integer(c.clone()) / &lc))
                .collect(),
        )
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> Monomial {
        self.terms[0].0
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    fn make_primitive(&mut self) {
        make_primitive(&mut self.terms);
    }
}

fn content(terms: &[(Monomial, BigInt)]) -> BigInt {
    let mut g = BigInt::zero();
    for (_, c) in terms {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn make_primitive(terms: &mut [(Monomial, BigInt)]) {
    if terms.is_empty() {
        return;
    }
    let mut g = content(terms);
    if terms[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, c) in terms.iter_mut() {
            *c /= &g;
        }
    }
}

/// `a * f - b * m * g`, merging two sorted term lists.
fn combine(
    f: &[(Monomial, BigInt)],
    a: &BigInt,
    b: &BigInt,
    m: Monomial,
    g: &[(Monomial, BigInt)],
) -> Vec<(Monomial, BigInt)> {
    let mut out = Vec::with_capacity(f.len() + g.len());
    let (mut i, mut j) = (0, 0);
    let a_is_one = a.is_one();
    while i < f.len() || j < g.len() {
        let gm = g.get(j).map(|(x, _)| x.checked_mul(m).expect("exponent overflow"));
        match (f.get(i), gm) {
            (Some((fm, fc)), Some(gm)) if *fm == gm => {
                let c = if a_is_one { fc.clone() } else { a * fc } - b * &g[j].1;
                if !c.is_zero() {
                    out.push((gm, c));
                }
                i += 1;
                j += 1;
            }
            (Some((fm, fc)), Some(gm)) if *fm > gm => {
                out.push((*fm, if a_is_one { fc.clone() } else { a * fc }));
                i += 1;
            }
            (_, Some(gm)) => {
                out.push((gm, -(b * &g[j].1)));
                j += 1;
            }
            (Some((fm, fc)), None) => {
                out.push((*fm, if a_is_one { fc.clone() } else { a * fc }));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Reduces `p` modulo `basis`. With `full` every term is reduced, otherwise
/// only the leading term. The result is primitive up to sign.
fn reduce(p: IntPoly, basis: &[IntPoly], full: bool) -> IntPoly {
    let mut rest = p.terms;
    let mut done: Vec<(Monomial, BigInt)> = Vec::new();
    let mut head = 0usize;
    let mut steps = 0usize;
    while head < rest.len() {
        let (m, c) = (rest[head].0, rest[head].1.clone());
        match basis.iter().find(|g| g.lm().divides(m)) {
            Some(g) => {
                let gcd = c.gcd(g.lc());
                let a = g.lc() / &gcd;
                let b = &c / &gcd;
                let mut next = combine(&rest[head..], &a, &b, m.div(g.lm()), &g.terms);
                debug_assert!(next.first().is_none_or(|(x, _)| *x < m));
                if !a.is_one() {
                    for (_, x) in done.iter_mut() {
                        *x *= &a;
                    }
                }
                steps += 1;
                if steps % 8 == 0 {
                    let mut g = content(&next).gcd(&content(&done));
                    if !g.is_zero() && !g.is_one() {
                        g = g.abs();
                        for (_, x) in next.iter_mut().chain(done.iter_mut()) {
                            *x /= &g;
                        }
                    }
                }
                rest = next;
                head = 0;
            }
            None if full => {
                done.push(rest[head].clone());
                head += 1;
            }
            None => break,
        }
    }
    done.extend(rest.drain(head..));
    let mut out = IntPoly { terms: done };
    out.make_primitive();
    out
}

fn s_polynomial(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let lcm = f.lm().lcm(g.lm());
    let (cf, cg) = (f.lc(), g.lc());
    let gcd = cf.gcd(cg);
    let a = cg / &gcd;
    let b = cf / &gcd;
    let scaled: Vec<(Monomial, BigInt)> = {
        let mf = lcm.div(f.lm());
        f.terms
            .iter()
            .map(|(m, c)| (m.checked_mul(mf).expect("exponent overflow"), c.clone()))
            .collect()
    };
    let mut terms = combine(&scaled, &a, &b, lcm.div(g.lm()), &g.terms);
    make_primitive(&mut terms);
    IntPoly { terms }
}

/// A reduced Gröbner basis for degrevlex with `x_1 > ... > x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    nvars: usize,
    polys: Vec<RationalPolynomial>,
    reduced: bool,
}

impl GroebnerBasis {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Monic basis elements sorted by increasing leading monomial.
    pub fn polys(&self) -> &[RationalPolynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn order(&self) -> &'static str {
        "degrevlex"
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys
            .iter()
            .filter_map(|p| p.leading_monomial())
            .collect()
    }

    pub fn contains(&self, p: &RationalPolynomial) -> Result<bool> {
        Ok(normal_form(p, self)?.is_zero())
    }

    /// Checks Buchberger's criterion directly: every S-polynomial of a pair
    /// of basis elements reduces to zero.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        let ints: Vec<IntPoly> = self.polys.iter().map(IntPoly::from_rational).collect();
        for i in 0..ints.len() {
            for j in i + 1..ints.len() {
                let s = s_polynomial(&ints[i], &ints[j]);
                if !reduce(s, &ints, true).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Pair {
    degree: u32,
    lcm: Monomial,
    i: usize,
    j: usize,
}

struct Engine {
    basis: Vec<IntPoly>,
    queue: BTreeSet<Pair>,
    pending: HashSet<(usize, usize)>,
}

impl Engine {
    fn insert(&mut self, p: IntPoly) {
        let idx = self.basis.len();
        let lm = p.lm();
        self.basis.push(p);
        for i in 0..idx {
            let other = self.basis[i].lm();
            // product criterion: coprime leading monomials reduce to zero
            if other.is_coprime(lm) {
                continue;
            }
            let lcm = other.lcm(lm);
            self.queue.insert(Pair {
                degree: lcm.degree(),
                lcm,
                i,
                j: idx,
            });
            self.pending.insert((i, idx));
        }
    }

    fn is_pending(&self, a: usize, b: usize) -> bool {
        self.pending.contains(&(a.min(b), a.max(b)))
    }

    /// Chain criterion: some third element's leading monomial divides the
    /// lcm and both companion pairs are already treated.
    fn chain_skips(&self, pair: &Pair) -> bool {
        self.basis.iter().enumerate().any(|(l, g)| {
            l != pair.i
                && l != pair.j
                && g.lm().divides(pair.lcm)
                && !self.is_pending(pair.i, l)
                && !self.is_pending(pair.j, l)
        })
    }
}

/// Reduced degrevlex Gröbner basis of the ideal generated by `gens`.
///
/// Pairs are processed by the normal strategy (smallest lcm first) with the
/// product and chain criteria. The output is deterministic for a fixed
/// generator order.
pub fn buchberger(gens: &[RationalPolynomial]) -> Result<GroebnerBasis> {
    let Some(first) = gens.first() else {
        return argument("empty generator list");
    };
    let nvars = first.nvars();
    if gens.iter().any(|g| g.nvars() != nvars) {
        return argument("generators live in rings with different variable counts");
    }
    let mut engine = Engine {
        basis: Vec::new(),
        queue: BTreeSet::new(),
        pending: HashSet::new(),
    };
    for g in gens {
        let r = reduce(IntPoly::from_rational(g), &engine.basis, true);
        if !r.is_zero() {
            engine.insert(r);
        }
    }
    while let Some(pair) = engine.queue.pop_first() {
        engine.pending.remove(&(pair.i, pair.j));
        if engine.chain_skips(&pair) {
            continue;
        }
        let s = s_polynomial(&engine.basis[pair.i], &engine.basis[pair.j]);
        let r = reduce(s, &engine.basis, true);
        if !r.is_zero() {
            log::trace!("new basis element with leading monomial {}", r.lm());
            engine.insert(r);
        }
    }
    Ok(interreduce(nvars, engine.basis))
}

fn interreduce(nvars: usize, basis: Vec<IntPoly>) -> GroebnerBasis {
    let mut keep: Vec<IntPoly> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(other_idx, h)| {
            other_idx != idx
                && h.lm().divides(g.lm())
                && (h.lm() != g.lm() || other_idx < idx)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for idx in 0..keep.len() {
        let others: Vec<IntPoly> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, g)| g.clone())
            .collect();
        let r = reduce(keep[idx].clone(), &others, true);
        reduced.push(r.to_monic_rational(nvars));
    }
    reduced.sort_by_key(|p| p.leading_monomial());
    GroebnerBasis {
        nvars,
        polys: reduced,
        reduced: true,
    }
}

/// Remainder of `p` on division by `basis`: no remaining term is divisible
/// by a leading monomial. Zero exactly when `p` lies in the ideal.
pub fn normal_form(p: &RationalPolynomial, basis: &GroebnerBasis) -> Result<RationalPolynomial> {
    if p.nvars() > basis.nvars() {
        return argument(format!(
            "polynomial in {} variables, basis in {}",
            p.nvars(),
            basis.nvars()
        ));
    }
    let nvars = basis.nvars();
    let lms = basis.leading_monomials();
    let mut rest: Vec<(Monomial, BigRational)> = p.terms().map(|(m, c)| (*m, c.clone())).collect();
    let mut done: Vec<(Monomial, BigRational)> = Vec::new();
    let mut head = 0;
    while head < rest.len() {
        let m = rest[head].0;
        match lms.iter().position(|lm| lm.divides(m)) {
            Some(idx) => {
                let c = rest[head].1.clone();
                let q = m.div(lms[idx]);
                let g = &basis.polys[idx];
                let mut next = Vec::with_capacity(rest.len() - head + g.len());
                let mut gi = g.terms().map(|(x, y)| (x.checked_mul(q).unwrap(), y)).peekable();
                let mut fi = rest[head..].iter().peekable();
                loop {
                    match (fi.peek(), gi.peek()) {
                        (Some((fm, fc)), Some((gm, gc))) if fm == gm => {
                            let v = fc - &c * *gc;
                            if !v.is_zero() {
                                next.push((*fm, v));
                            }
                            fi.next();
                            gi.next();
                        }
                        (Some((fm, _)), Some((gm, _))) if fm > gm => {
                            next.push(fi.next().unwrap().clone());
                        }
                        (_, Some(_)) => {
                            let (gm, gc) = gi.next().unwrap();
                            next.push((gm, -(&c * gc)));
                        }
                        (Some(_), None) => next.push(fi.next().unwrap().clone()),
                        (None, None) => break,
                    }
                }
                rest = next;
                head = 0;
            }
            None => {
                done.push(rest[head].clone());
                head += 1;
            }
        }
    }
    Ok(RationalPolynomial::from_sorted_terms(nvars, done))
}

/// Hilbert series of `Q[x_1..x_k] / I` from a Gröbner basis of `I`: the
/// number of standard monomials in each degree.
pub fn hilbert_series_quotient(basis: &GroebnerBasis) -> Result<HilbertSeries> {
    let lms = basis.leading_monomials();
    let nvars = basis.nvars();
    if lms.contains(&Monomial::ONE) {
        return Ok(HilbertSeries::new(Vec::new()));
    }
    for v in 0..nvars {
        if !lms.iter().any(|m| m.pure_power_of() == Some(v)) {
            return Err(Error::NotFiniteDimensional);
        }
    }
    let standard = |m: &Monomial| !lms.iter().any(|lm| lm.divides(*m));
    let mut counts = vec![1u64];
    let mut level: BTreeSet<Monomial> = BTreeSet::from([Monomial::ONE]);
    loop {
        let mut next = BTreeSet::new();
        for m in &level {
            for v in 0..nvars {
                let candidate = m.checked_mul(Monomial::var(v)).expect("exponent overflow");
                if standard(&candidate) {
                    next.insert(candidate);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        counts.push(next.len() as u64);
        level = next;
    }
    Ok(HilbertSeries::new(counts))
}
