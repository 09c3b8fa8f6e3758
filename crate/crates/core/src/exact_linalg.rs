//! Evaluation matrices of `A_{k,n}` and their exact ranks.
//!
//! The degree-`d` matrix has one row per monomial `x^α` of degree `d` in `k`
//! variables (lexicographically decreasing) and one column per `d`-edge
//! subset of `K_n` (increasing bitmask). Entry `(α, S)` is the coefficient
//! of `γ_S` in `∏ w_{s_t}^{α_t}`, so the rank of the matrix is the dimension
//! of the degree-`d` piece of `A_{k,n}`.
//!
//! Entries are stored as `i128`. A coefficient of `w^α` counts signed
//! injective assignments of the `d` edges to the `d` linear factors, so its
//! absolute value is at most `d! ≤ 28! < 2^127` for `n ≤ 8`; wider ambients
//! use checked arithmetic and fail with a resource error on overflow.

use crate::edge_algebra::{
    check_subset, curvature_terms, Ambient, BitIter, EdgeSet, ExponentVector,
};
use crate::error::{argument, Error, Result};
use crate::hilbert::HilbertSeries;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Default bound on `rows × columns` of a single evaluation matrix.
pub const DEFAULT_MAX_CELLS: u128 = 50_000_000;

/// Parameters identifying one evaluation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixKey {
    pub k: usize,
    pub n: usize,
    pub d: usize,
    pub subset: Vec<usize>,
}

impl MatrixKey {
    fn header(&self) -> String {
        format!("{} {} {} {}", self.k, self.n, self.d, join(&self.subset, ","))
    }
}

fn join(v: &[usize], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// Row-sparse integer matrix with optional monomial/edge-set labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseExactMatrix {
    key: Option<MatrixKey>,
    ncols: usize,
    row_labels: Vec<ExponentVector>,
    col_labels: Vec<EdgeSet>,
    rows: Vec<Vec<(u32, i128)>>,
}

impl SparseExactMatrix {
    /// Unlabelled matrix from dense rows.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        SparseExactMatrix {
            key: None,
            ncols,
            row_labels: Vec::new(),
            col_labels: Vec::new(),
            rows: rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(_, &x)| x != 0)
                        .map(|(c, &x)| (c as u32, x as i128))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn key(&self) -> Option<&MatrixKey> {
        self.key.as_ref()
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_labels(&self) -> &[ExponentVector] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[EdgeSet] {
        &self.col_labels
    }

    /// Nonzero entries of row `r` as `(column, value)`, columns increasing.
    pub fn row(&self, r: usize) -> &[(u32, i128)] {
        &self.rows[r]
    }

    pub fn to_dense(&self) -> Vec<Vec<i128>> {
        self.rows
            .iter()
            .map(|r| {
                let mut out = vec![0i128; self.ncols];
                for &(c, x) in r {
                    out[c as usize] = x;
                }
                out
            })
            .collect()
    }
}

/// Binomial coefficients `C(a, b)` for `a ≤ 64`, saturating.
struct Binomials([[u64; 65]; 65]);

impl Binomials {
    fn new() -> Self {
        let mut t = [[0u64; 65]; 65];
        for a in 0..65 {
            t[a][0] = 1;
            for b in 1..=a {
                t[a][b] = t[a - 1][b - 1].saturating_add(t[a - 1][b]);
            }
        }
        Binomials(t)
    }

    fn get(&self, a: usize, b: usize) -> u64 {
        if b > a {
            0
        } else {
            self.0[a][b]
        }
    }

    /// Position of `mask` among all masks of the same popcount, in
    /// increasing numeric order (colexicographic rank).
    fn colex_rank(&self, mask: u64) -> usize {
        BitIter(mask)
            .enumerate()
            .map(|(t, b)| self.get(b as usize, t + 1) as usize)
            .sum()
    }
}

fn binomial(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128)
}

/// `rows × columns` of the degree-`d` matrix for `A_{k,n}`.
pub fn matrix_cells(k: usize, n: usize, d: usize) -> u128 {
    let edges = (n * n.saturating_sub(1) / 2) as u64;
    binomial((k + d).saturating_sub(1) as u64, d as u64) * binomial(edges, d as u64)
}

/// Upper bound on the work of a full rank-series computation: the sum of
/// matrix cells over all degrees up to `min(C(n,2), k(n-1))`.
pub fn projected_cells(k: usize, n: usize) -> u128 {
    let top = (n * n.saturating_sub(1) / 2).min(k * n.saturating_sub(1));
    (0..=top).map(|d| matrix_cells(k, n, d)).sum()
}

/// All `d`-subsets of `edges` bits as masks, increasing.
fn masks_of_weight(edges: usize, d: usize) -> Vec<u64> {
    if d > edges {
        return Vec::new();
    }
    if d == 0 {
        return vec![0];
    }
    if d == 64 {
        return vec![u64::MAX];
    }
    let limit: u128 = 1u128 << edges;
    let mut out = Vec::new();
    let mut m: u64 = (1u64 << d) - 1;
    loop {
        out.push(m);
        // Gosper's hack
        let c = m & m.wrapping_neg();
        let r = m.wrapping_add(c);
        if r == 0 {
            break;
        }
        m = (((r ^ m) >> 2) / c) | r;
        if (m as u128) >= limit {
            break;
        }
    }
    out
}

/// Computes evaluation matrices degree by degree, each from the previous one
/// by multiplying a parent row with one more curvature form.
pub struct DegreeBuilder {
    ambient: Ambient,
    subset: Vec<usize>,
    forms: Vec<Vec<(u32, i64)>>,
    binomials: Binomials,
    max_cells: u128,
    current: SparseExactMatrix,
}

impl DegreeBuilder {
    pub fn new(ambient: Ambient, subset: &[usize], max_cells: u128) -> Result<Self> {
        check_subset(subset, ambient)?;
        if subset.is_empty() {
            return argument("subset must be nonempty");
        }
        let k = subset.len();
        let forms = subset.iter().map(|&v| curvature_terms(v, ambient)).collect();
        let current = SparseExactMatrix {
            key: Some(MatrixKey {
                k,
                n: ambient.n(),
                d: 0,
                subset: subset.to_vec(),
            }),
            ncols: 1,
            row_labels: vec![ExponentVector(vec![0; k])],
            col_labels: vec![EdgeSet::EMPTY],
            rows: vec![vec![(0, 1)]],
        };
        Ok(DegreeBuilder {
            ambient,
            subset: subset.to_vec(),
            forms,
            binomials: Binomials::new(),
            max_cells,
            current,
        })
    }

    pub fn degree(&self) -> usize {
        self.current.key.as_ref().map_or(0, |k| k.d)
    }

    pub fn current(&self) -> &SparseExactMatrix {
        &self.current
    }

    /// Replaces the current matrix (e.g. with one loaded from a cache).
    pub fn set_current(&mut self, m: SparseExactMatrix) {
        self.current = m;
    }

    pub fn next_key(&self) -> MatrixKey {
        MatrixKey {
            k: self.subset.len(),
            n: self.ambient.n(),
            d: self.degree() + 1,
            subset: self.subset.clone(),
        }
    }

    pub fn check_cells(&self, d: usize) -> Result<()> {
        let cells = matrix_cells(self.subset.len(), self.ambient.n(), d);
        if cells > self.max_cells {
            return Err(Error::Resource(format!(
                "degree-{d} matrix for k = {}, n = {} has {cells} cells (cap {})",
                self.subset.len(),
                self.ambient.n(),
                self.max_cells
            )));
        }
        Ok(())
    }

    /// Builds the matrix one degree higher and makes it current.
    pub fn advance(&mut self) -> Result<&SparseExactMatrix> {
        let key = self.next_key();
        let d = key.d;
        self.check_cells(d)?;
        let k = self.subset.len();
        let edges = self.ambient.edge_count();
        let col_labels: Vec<EdgeSet> = masks_of_weight(edges, d).into_iter().map(EdgeSet).collect();
        let row_labels = ExponentVector::all_of_degree(k, d as u32);

        let parent_index: HashMap<&ExponentVector, usize> = self
            .current
            .row_labels
            .iter()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        let prev = &self.current;
        let binomials = &self.binomials;
        let forms = &self.forms;
        let ncols = col_labels.len();

        let rows: Vec<Result<Vec<(u32, i128)>>> = row_labels
            .par_iter()
            .map_init(
                || (vec![0i128; ncols], Vec::<u32>::new()),
                |(acc, touched), alpha| {
                    let t = alpha.0.iter().rposition(|&a| a > 0).expect("degree ≥ 1");
                    let mut parent = alpha.clone();
                    parent.0[t] -= 1;
                    let p = parent_index[&parent];
                    for &(col, c) in &prev.rows[p] {
                        let mask = prev.col_labels[col as usize].0;
                        for &(bit, s) in &forms[t] {
                            if mask >> bit & 1 == 1 {
                                continue;
                            }
                            let idx = binomials.colex_rank(mask | 1 << bit);
                            if acc[idx] == 0 {
                                touched.push(idx as u32);
                            }
                            let term = if s > 0 { c } else { -c };
                            acc[idx] = acc[idx].checked_add(term).ok_or_else(|| {
                                Error::Resource("evaluation coefficient overflow".into())
                            })?;
                        }
                    }
                    touched.sort_unstable();
                    touched.dedup();
                    let mut row = Vec::with_capacity(touched.len());
                    for &idx in touched.iter() {
                        let v = std::mem::take(&mut acc[idx as usize]);
                        if v != 0 {
                            row.push((idx, v));
                        }
                    }
                    touched.clear();
                    Ok(row)
                },
            )
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

        self.current = SparseExactMatrix {
            key: Some(key),
            ncols,
            row_labels,
            col_labels,
            rows,
        };
        Ok(&self.current)
    }
}

/// The degree-`d` evaluation matrix of `A_{k,n}` for the given forms.
pub fn build_matrix(
    k: usize,
    ambient: Ambient,
    d: usize,
    subset: &[usize],
    max_cells: u128,
) -> Result<SparseExactMatrix> {
    if subset.len() != k {
        return argument(format!("subset has {} indices, k = {k}", subset.len()));
    }
    let mut b = DegreeBuilder::new(ambient, subset, max_cells)?;
    b.check_cells(d)?;
    for _ in 0..d {
        b.advance()?;
    }
    Ok(b.current)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Two distinct primes in `[2^30, 2^31)` drawn from a seeded generator.
pub fn select_primes(seed: u64) -> [u64; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |avoid: u64| loop {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if c != avoid && is_prime(c) {
            return c;
        }
    };
    let p = draw(0);
    let q = draw(p);
    [p, q]
}

/// Column occurrence counts, used to prefer sparse pivot columns.
fn column_counts(m: &SparseExactMatrix) -> Vec<u32> {
    let mut counts = vec![0u32; m.ncols];
    for r in &m.rows {
        for &(c, _) in r {
            counts[c as usize] += 1;
        }
    }
    counts
}

/// Row processing order: fewest nonzeros first.
fn row_order(m: &SparseExactMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.rows.len()).collect();
    order.sort_by_key(|&r| m.rows[r].len());
    order
}

/// Among the surviving columns pick the one appearing in fewest rows
/// (Markowitz-style), lowest index on ties.
fn choose_pivot(cols: impl Iterator<Item = u32>, counts: &[u32]) -> u32 {
    cols.min_by_key(|&c| (counts[c as usize], c))
        .expect("nonzero row")
}

/// Rank over `GF(p)` by sparse elimination.
///
/// Each incoming row is reduced against the existing pivot rows in the order
/// the pivots were created; pivot row `t` is zero in the pivot columns of all
/// earlier pivots, so this order never reintroduces an eliminated column.
pub fn rank_mod_p(m: &SparseExactMatrix, p: u64) -> Result<usize> {
    if !is_prime(p) {
        return argument(format!("{p} is not prime"));
    }
    if p >= 1 << 62 {
        return argument("modulus must be below 2^62");
    }
    let counts = column_counts(m);
    let mut pivot_of_col = vec![u32::MAX; m.ncols];
    let mut pivot_rows: Vec<(u32, Vec<(u32, u64)>)> = Vec::new();
    let mut acc = vec![0u64; m.ncols];
    let mut touched: Vec<u32> = Vec::new();
    let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
    let pi = p as i128;

    for r in row_order(m) {
        for &(c, x) in &m.rows[r] {
            let v = x.rem_euclid(pi) as u64;
            if v == 0 {
                continue;
            }
            acc[c as usize] = v;
            touched.push(c);
            if pivot_of_col[c as usize] != u32::MAX {
                heap.push(Reverse(pivot_of_col[c as usize]));
            }
        }
        while let Some(Reverse(t)) = heap.pop() {
            let (pc, ref prow) = pivot_rows[t as usize];
            let v = acc[pc as usize];
            if v == 0 {
                continue;
            }
            // pivot rows are normalised to 1 at their pivot column
            for &(c, x) in prow {
                let cur = acc[c as usize];
                if cur == 0 {
                    touched.push(c);
                }
                let sub = mul_mod(v, x, p);
                let next = if cur >= sub { cur - sub } else { cur + p - sub };
                acc[c as usize] = next;
                let owner = pivot_of_col[c as usize];
                if next != 0 && owner != u32::MAX && owner != t {
                    debug_assert!(owner > t);
                    heap.push(Reverse(owner));
                }
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let mut row: Vec<(u32, u64)> = touched
            .iter()
            .filter_map(|&c| {
                let v = std::mem::take(&mut acc[c as usize]);
                (v != 0).then_some((c, v))
            })
            .collect();
        touched.clear();
        if row.is_empty() {
            continue;
        }
        let pc = choose_pivot(row.iter().map(|&(c, _)| c), &counts);
        let lead = row.iter().find(|&&(c, _)| c == pc).unwrap().1;
        let inv = pow_mod(lead, p - 2, p);
        for (_, x) in row.iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        pivot_of_col[pc as usize] = pivot_rows.len() as u32;
        pivot_rows.push((pc, row));
    }
    Ok(pivot_rows.len())
}

/// Rank over the rationals by fraction-free sparse elimination with content
/// removal. Slower than [`rank_mod_p`] but never undercounts.
pub fn rank_exact(m: &SparseExactMatrix) -> usize {
    let counts = column_counts(m);
    let mut pivot_of_col = vec![u32::MAX; m.ncols];
    let mut pivot_rows: Vec<(u32, Vec<(u32, BigInt)>)> = Vec::new();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); m.ncols];
    let mut touched: Vec<u32> = Vec::new();
    let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();

    for r in row_order(m) {
        for &(c, x) in &m.rows[r] {
            acc[c as usize] = BigInt::from(x);
            touched.push(c);
            if pivot_of_col[c as usize] != u32::MAX {
                heap.push(Reverse(pivot_of_col[c as usize]));
            }
        }
        while let Some(Reverse(t)) = heap.pop() {
            let (pc, ref prow) = pivot_rows[t as usize];
            let v = acc[pc as usize].clone();
            if v.is_zero() {
                continue;
            }
            let a = &prow.iter().find(|(c, _)| *c == pc).unwrap().1;
            let g = v.gcd(a);
            let (scale, factor) = (a / &g, &v / &g);
            // acc <- scale * acc - factor * prow
            if !scale.is_one() {
                touched.sort_unstable();
                touched.dedup();
                for &c in &touched {
                    acc[c as usize] *= &scale;
                }
            }
            for (c, x) in prow {
                if acc[*c as usize].is_zero() {
                    touched.push(*c);
                }
                acc[*c as usize] -= &factor * x;
                let owner = pivot_of_col[*c as usize];
                if !acc[*c as usize].is_zero() && owner != u32::MAX && owner != t {
                    heap.push(Reverse(owner));
                }
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let mut row: Vec<(u32, BigInt)> = touched
            .iter()
            .filter_map(|&c| {
                let v = std::mem::take(&mut acc[c as usize]);
                (!v.is_zero()).then_some((c, v))
            })
            .collect();
        touched.clear();
        if row.is_empty() {
            continue;
        }
        let content = row.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
        if !content.is_one() {
            for (_, x) in row.iter_mut() {
                *x /= &content;
            }
        }
        let pc = choose_pivot(row.iter().map(|(c, _)| *c), &counts);
        pivot_of_col[pc as usize] = pivot_rows.len() as u32;
        pivot_rows.push((pc, row));
    }
    pivot_rows.len()
}

/// On-disk store of evaluation matrices, one text file per key.
///
/// File layout: a header line `k n d subset` (subset comma-separated), then
/// one line `row_index column_bitmask coefficient` per nonzero entry.
#[derive(Clone, Debug)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(MatrixCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &MatrixKey) -> PathBuf {
        self.dir.join(format!(
            "k{}_n{}_d{}_s{}.txt",
            key.k,
            key.n,
            key.d,
            join(&key.subset, "-")
        ))
    }

    pub fn store(&self, m: &SparseExactMatrix) -> Result<()> {
        let key = m
            .key
            .as_ref()
            .ok_or_else(|| Error::Argument("cannot cache an unlabelled matrix".into()))?;
        let mut text = key.header();
        text.push('\n');
        for (r, row) in m.rows.iter().enumerate() {
            for &(c, x) in row {
                writeln!(text, "{r} {} {x}", m.col_labels[c as usize].0).unwrap();
            }
        }
        let path = self.path(key);
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    /// Loads the matrix for `key` if present. A file whose header does not
    /// match is treated as corrupt.
    pub fn load(&self, key: &MatrixKey, ambient: Ambient) -> Result<Option<SparseExactMatrix>> {
        let path = self.path(key);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header.trim() != key.header() {
            return Err(Error::Parse(format!(
                "cache file {} has header {header:?}, expected {:?}",
                path.display(),
                key.header()
            )));
        }
        let row_labels = ExponentVector::all_of_degree(key.k, key.d as u32);
        let col_labels: Vec<EdgeSet> = masks_of_weight(ambient.edge_count(), key.d)
            .into_iter()
            .map(EdgeSet)
            .collect();
        let binomials = Binomials::new();
        let mut rows: Vec<Vec<(u32, i128)>> = vec![Vec::new(); row_labels.len()];
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let bad = || Error::Parse(format!("bad cache line {line:?} in {}", path.display()));
            let mut parts = line.split_whitespace();
            let r: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let mask: u64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let x: i128 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if r >= rows.len() || mask.count_ones() as usize != key.d || mask & !ambient.full_mask() != 0 {
                return Err(bad());
            }
            rows[r].push((binomials.colex_rank(mask) as u32, x));
        }
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|&(c, _)| c);
        }
        Ok(Some(SparseExactMatrix {
            key: Some(key.clone()),
            ncols: col_labels.len(),
            row_labels,
            col_labels,
            rows,
        }))
    }
}

/// Options for [`hilbert_series_rank`].
#[derive(Clone, Debug)]
pub struct RankOptions {
    /// Seed for choosing the two primes.
    pub seed: u64,
    /// Always compute the exact rank as well.
    pub exact: bool,
    /// Build one degree past the first zero and check it is zero too.
    pub verify_extra_degree: bool,
    pub max_cells: u128,
    /// Allow ambients above the default size cap.
    pub wide: bool,
    pub cache: Option<MatrixCache>,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            seed: crate::DEFAULT_SEED,
            exact: false,
            verify_extra_degree: false,
            max_cells: DEFAULT_MAX_CELLS,
            wide: false,
            cache: None,
        }
    }
}

/// Result of a rank-based series computation with the method details.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSeries {
    pub series: HilbertSeries,
    pub primes: [u64; 2],
    /// Degrees where the two modular ranks disagreed.
    pub disagreements: Vec<usize>,
    /// Degrees where the exact rank was computed.
    pub exact_degrees: Vec<usize>,
}

fn degree_rank(m: &SparseExactMatrix, opts: &RankOptions, primes: [u64; 2], d: usize, out: &mut RankSeries) -> Result<u64> {
    let (r1, r2) = rayon::join(|| rank_mod_p(m, primes[0]), || rank_mod_p(m, primes[1]));
    let (r1, r2) = (r1?, r2?);
    if r1 != r2 {
        log::warn!("modular ranks disagree in degree {d}: {r1} vs {r2}; computing exact rank");
        out.disagreements.push(d);
    }
    if opts.exact || r1 != r2 {
        out.exact_degrees.push(d);
        let exact = rank_exact(m);
        if exact < r1.max(r2) {
            return Err(Error::Invariant(format!(
                "exact rank {exact} below modular rank {} in degree {d}",
                r1.max(r2)
            )));
        }
        return Ok(exact as u64);
    }
    Ok(r1 as u64)
}

fn current_or_cached(b: &mut DegreeBuilder, cache: Option<&MatrixCache>, ambient: Ambient) -> Result<()> {
    let key = b.next_key();
    if let Some(cache) = cache {
        b.check_cells(key.d)?;
        if let Some(m) = cache.load(&key, ambient)? {
            b.set_current(m);
            return Ok(());
        }
        b.advance()?;
        cache.store(b.current())?;
        return Ok(());
    }
    b.advance()?;
    Ok(())
}

/// Hilbert series of `A_{k,n}` generated by the curvature forms `w_s`,
/// `s ∈ subset`: the rank of each degree's evaluation matrix, up to the
/// first degree of rank zero.
pub fn hilbert_series_rank(n: usize, subset: &[usize], opts: &RankOptions) -> Result<RankSeries> {
    let ambient = if opts.wide {
        Ambient::new_wide(n)?
    } else {
        Ambient::new(n)?
    };
    let primes = select_primes(opts.seed);
    let mut builder = DegreeBuilder::new(ambient, subset, opts.max_cells)?;
    let mut out = RankSeries {
        series: HilbertSeries::new(Vec::new()),
        primes,
        disagreements: Vec::new(),
        exact_degrees: Vec::new(),
    };
    if let Some(cache) = &opts.cache {
        cache.store(builder.current())?;
    }
    let mut coeffs = Vec::new();
    loop {
        let d = builder.degree();
        let r = degree_rank(builder.current(), opts, primes, d, &mut out)?;
        if r == 0 {
            if opts.verify_extra_degree {
                current_or_cached(&mut builder, opts.cache.as_ref(), ambient)?;
                let extra = degree_rank(builder.current(), opts, primes, d + 1, &mut out)?;
                if extra != 0 {
                    return Err(Error::Invariant(format!(
                        "degree {} has rank {extra} after a zero degree",
                        d + 1
                    )));
                }
            }
            break;
        }
        coeffs.push(r);
        current_or_cached(&mut builder, opts.cache.as_ref(), ambient)?;
    }
    out.series = HilbertSeries::new(coeffs);
    Ok(out)
}

/// Convenience wrapper using forms `w_1, ..., w_k`.
pub fn hilbert_series_rank_first(k: usize, n: usize, opts: &RankOptions) -> Result<RankSeries> {
    if k == 0 || k > n {
        return argument(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}"));
    }
    let subset: Vec<usize> = (1..=k).collect();
    hilbert_series_rank(n, &subset, opts)
}

impl std::fmt::Display for MatrixKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.header())
    }
}

/// Sanity helper: is every entry's magnitude below `bound`?
pub fn max_abs_entry(m: &SparseExactMatrix) -> BigInt {
    m.rows
        .iter()
        .flatten()
        .map(|&(_, x)| BigInt::from(x).abs())
        .max()
        .unwrap_or_default()
}
