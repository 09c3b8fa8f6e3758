//! Exterior algebra on the one-forms `a_{ij}`, `ā_{ij}` (`i < j`), their
//! torus multiweights, and the count of weight-zero (invariant) monomials.
//!
//! Generator `a_{ij}` has bit `2·b`, `ā_{ij}` has bit `2·b + 1`, where `b`
//! is the lexicographic position of the edge. Canonical order is increasing
//! bit, i.e. by edge and then plain before conjugate.

use crate::edge_algebra::{Ambient, BitIter, Edge};
use crate::error::{argument, Error, Result};
use crate::hilbert::HilbertSeries;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Largest `n` counted without an explicit override.
pub const DEFAULT_MAX_INVARIANT_N: usize = 5;
/// Largest `n` counted at all.
pub const OVERRIDE_MAX_INVARIANT_N: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorKind {
    Plain,
    Conjugate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OneFormGenerator {
    pub edge: Edge,
    pub kind: GeneratorKind,
}

impl OneFormGenerator {
    pub fn plain(edge: Edge) -> Self {
        OneFormGenerator {
            edge,
            kind: GeneratorKind::Plain,
        }
    }

    pub fn conjugate(edge: Edge) -> Self {
        OneFormGenerator {
            edge,
            kind: GeneratorKind::Conjugate,
        }
    }

    pub fn index(self, ambient: Ambient) -> u32 {
        2 * ambient.bit(self.edge) + (self.kind == GeneratorKind::Conjugate) as u32
    }

    pub fn from_index(index: u32, ambient: Ambient) -> Self {
        let edge = ambient.edge_at(index / 2);
        if index % 2 == 0 {
            Self::plain(edge)
        } else {
            Self::conjugate(edge)
        }
    }

    /// Arc of the associated digraph: `a_{ij}` is `i → j`, `ā_{ij}` is `j → i`.
    pub fn arc(self) -> (usize, usize) {
        match self.kind {
            GeneratorKind::Plain => (self.edge.i(), self.edge.j()),
            GeneratorKind::Conjugate => (self.edge.j(), self.edge.i()),
        }
    }

    pub fn multiweight(self, ambient: Ambient) -> Multiweight {
        let mut lambda = vec![0i64; ambient.n()];
        let (tail, head) = self.arc();
        lambda[tail - 1] += 1;
        lambda[head - 1] -= 1;
        Multiweight(lambda)
    }
}

impl fmt::Display for OneFormGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GeneratorKind::Plain => "a",
            GeneratorKind::Conjugate => "abar",
        };
        write!(f, "{name}({},{})", self.edge.i(), self.edge.j())
    }
}

/// Torus weight in the `λ` basis: entry `v` is outdegree minus indegree at
/// vertex `v` of the associated digraph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Multiweight(pub Vec<i64>);

impl Multiweight {
    pub fn zero(n: usize) -> Self {
        Multiweight(vec![0; n])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Coordinates in the basis `α_t = λ_t − λ_{t+1}`, `t = 1..n-1`.
    /// Requires the entries to sum to zero.
    pub fn alpha_coordinates(&self) -> Vec<i64> {
        debug_assert_eq!(self.0.iter().sum::<i64>(), 0);
        let n = self.0.len();
        self.0[..n.saturating_sub(1)]
            .iter()
            .scan(0i64, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }

    pub fn add(&self, other: &Multiweight) -> Multiweight {
        Multiweight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Signed exterior monomial `±` (generators in canonical order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExteriorMonomial {
    ambient: Ambient,
    bits: u64,
    sign: i8,
}

/// Parity of the number of pairs `(x ∈ left, y ∈ right)` with `x > y`.
fn crossing_parity(left: u64, right: u64) -> bool {
    let mut odd = false;
    for y in BitIter(right) {
        let above = if y >= 63 { 0 } else { left >> (y + 1) };
        odd ^= above.count_ones() % 2 == 1;
    }
    odd
}

impl ExteriorMonomial {
    pub fn one(ambient: Ambient) -> Self {
        ExteriorMonomial {
            ambient,
            bits: 0,
            sign: 1,
        }
    }

    /// `g_1 ∧ g_2 ∧ ...` in the given order; `None` if a generator repeats.
    pub fn from_generators(ambient: Ambient, gens: &[OneFormGenerator]) -> Result<Option<Self>> {
        let mut m = Self::one(ambient);
        for &g in gens {
            ambient.check_vertex(g.edge.j())?;
            let single = ExteriorMonomial {
                ambient,
                bits: 1 << g.index(ambient),
                sign: 1,
            };
            match m.wedge(&single)? {
                Some(next) => m = next,
                None => return Ok(None),
            }
        }
        Ok(Some(m))
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn degree(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Generators in canonical order.
    pub fn generators(&self) -> Vec<OneFormGenerator> {
        BitIter(self.bits)
            .map(|b| OneFormGenerator::from_index(b, self.ambient))
            .collect()
    }

    pub fn wedge(&self, other: &ExteriorMonomial) -> Result<Option<ExteriorMonomial>> {
        if self.ambient != other.ambient {
            return argument("exterior monomials from different ambients");
        }
        if self.bits & other.bits != 0 {
            return Ok(None);
        }
        let mut sign = self.sign * other.sign;
        if crossing_parity(self.bits, other.bits) {
            sign = -sign;
        }
        Ok(Some(ExteriorMonomial {
            ambient: self.ambient,
            bits: self.bits | other.bits,
            sign,
        }))
    }

    pub fn multiweight(&self) -> Multiweight {
        multiweight_of(self)
    }
}

impl fmt::Display for ExteriorMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        if self.bits == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// `γ_{ij} ↦ a_{ij} ∧ ā_{ij}`.
pub fn gamma_embed(edge: Edge, ambient: Ambient) -> Result<ExteriorMonomial> {
    ambient.check_vertex(edge.j())?;
    Ok(ExteriorMonomial::from_generators(
        ambient,
        &[OneFormGenerator::plain(edge), OneFormGenerator::conjugate(edge)],
    )?
    .expect("distinct generators"))
}

pub fn multiweight_of(m: &ExteriorMonomial) -> Multiweight {
    m.generators()
        .into_iter()
        .fold(Multiweight::zero(m.ambient.n()), |acc, g| {
            acc.add(&g.multiweight(m.ambient))
        })
}

/// Loop-free digraph with at most one arc per ordered pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    pub n: usize,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (t, h) in arcs {
            if t == h || t == 0 || h == 0 || t > n || h > n {
                return argument(format!("invalid arc {t}->{h} on {n} vertices"));
            }
            if !set.insert((t, h)) {
                return argument(format!("repeated arc {t}->{h}"));
            }
        }
        Ok(Digraph { n, arcs: set })
    }

    /// Outdegree minus indegree at each vertex.
    pub fn imbalance(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.n];
        for &(t, h) in &self.arcs {
            v[t - 1] += 1;
            v[h - 1] -= 1;
        }
        v
    }

    pub fn is_eulerian(&self) -> bool {
        self.imbalance().iter().all(|&x| x == 0)
    }
}

pub fn monomial_to_digraph(m: &ExteriorMonomial) -> Digraph {
    Digraph {
        n: m.ambient.n(),
        arcs: m.generators().into_iter().map(OneFormGenerator::arc).collect(),
    }
}

/// Inverse of [`monomial_to_digraph`] (canonical order, sign +1).
pub fn digraph_to_monomial(g: &Digraph, ambient: Ambient) -> Result<ExteriorMonomial> {
    if g.n != ambient.n() {
        return argument("digraph and ambient sizes differ");
    }
    let gens: Vec<OneFormGenerator> = g
        .arcs
        .iter()
        .map(|&(t, h)| {
            let edge = Edge::new(t.min(h), t.max(h))?;
            Ok(if t < h {
                OneFormGenerator::plain(edge)
            } else {
                OneFormGenerator::conjugate(edge)
            })
        })
        .collect::<Result<_>>()?;
    let mut bits = 0u64;
    for g in gens {
        bits |= 1 << g.index(ambient);
    }
    Ok(ExteriorMonomial {
        ambient,
        bits,
        sign: 1,
    })
}

fn check_invariant_n(n: usize, allow_large: bool) -> Result<Ambient> {
    if n < 2 {
        return argument(format!("n must be at least 2, got {n}"));
    }
    let cap = if allow_large {
        OVERRIDE_MAX_INVARIANT_N
    } else {
        DEFAULT_MAX_INVARIANT_N
    };
    if n > cap {
        return Err(Error::Resource(format!(
            "invariant-form count for n = {n} exceeds the cap n ≤ {cap}"
        )));
    }
    Ambient::new(n)
}

/// Hilbert series of the algebra of invariant forms: coefficient `d` counts
/// `d`-element generator subsets of total multiweight zero.
///
/// Edges are processed in lexicographic order, carrying a table from the
/// partial imbalance vector to a degree-indexed count. Each edge adds
/// nothing, `a`, `ā`, or both; vertex `v` is complete after edge `(v, n)` and
/// states with a nonzero entry there are dropped.
pub fn invariant_forms_hilbert(n: usize, allow_large: bool) -> Result<HilbertSeries> {
    let ambient = check_invariant_n(n, allow_large)?;
    let top = 2 * ambient.edge_count();
    let mut states: HashMap<Vec<i8>, Vec<u64>> = HashMap::new();
    let mut unit = vec![0u64; top + 1];
    unit[0] = 1;
    states.insert(vec![0; n], unit);

    for edge in ambient.edges() {
        let (i, j) = (edge.i() - 1, edge.j() - 1);
        let mut next: HashMap<Vec<i8>, Vec<u64>> = HashMap::with_capacity(states.len() * 3);
        for (imb, counts) in &states {
            // (degree shift, change at i)
            for (shift, delta) in [(0usize, 0i8), (1, 1), (1, -1), (2, 0)] {
                let mut v = imb.clone();
                v[i] += delta;
                v[j] -= delta;
                let slot = next.entry(v).or_insert_with(|| vec![0; top + 1]);
                for (d, &c) in counts.iter().enumerate() {
                    if c != 0 {
                        slot[d + shift] += c;
                    }
                }
            }
        }
        if j == n - 1 {
            next.retain(|v, _| v[i] == 0);
        }
        // a vertex with r untouched edges left can move by at most r
        let remaining: Vec<i64> = (0..n)
            .map(|v| {
                ambient
                    .edges()
                    .filter(|e| (e.i() - 1, e.j() - 1) > (i, j))
                    .filter(|e| e.i() - 1 == v || e.j() - 1 == v)
                    .count() as i64
            })
            .collect();
        next.retain(|v, _| v.iter().zip(&remaining).all(|(&x, &r)| (x as i64).abs() <= r));
        states = next;
    }
    let zero = vec![0i8; n];
    let counts = states.remove(&zero).unwrap_or_default();
    debug_assert!(states.is_empty());
    Ok(HilbertSeries::new(counts))
}

/// Total weight-zero subsets, the subsets closed under swapping `a ↔ ā`,
/// and the number of swap-orbit pairs among the rest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerianIdentityReport {
    pub n: usize,
    pub z: u64,
    pub symmetric_count: u64,
    pub implied_eul: u64,
}

/// Every edge contributes both or neither direction in a symmetric subset,
/// so those `2^{C(n,2)}` subsets are all balanced and fixed by the swap; the
/// remaining balanced subsets pair up.
pub fn eulerian_identity_check(n: usize, allow_large: bool) -> Result<EulerianIdentityReport> {
    let ambient = check_invariant_n(n, allow_large)?;
    let z = invariant_forms_hilbert(n, allow_large)?.total();
    let symmetric_count = 1u64 << ambient.edge_count();
    if z < symmetric_count || (z - symmetric_count) % 2 != 0 {
        return Err(Error::Invariant(format!(
            "Z({n}) = {z} is not 2^{} plus an even number",
            ambient.edge_count()
        )));
    }
    Ok(EulerianIdentityReport {
        n,
        z,
        symmetric_count,
        implied_eul: (z - symmetric_count) / 2,
    })
}
