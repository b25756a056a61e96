use rayon::prelude::*;

use super::count::{count_representations, isqrt};
use super::{CopyKind, CopySet, GeometryError, SimplexConfig};

/// Largest number of stored coordinates a single copy set may hold.
const MAX_COORDS: u64 = 1 << 31;

/// `target = other . x` over the not-yet-placed coordinates.
struct DotConstraint<'a> {
    other: &'a [i64],
    target: i64,
    /// `tail_sq[p] = sum_{i >= p} other[i]^2`, with a trailing zero.
    tail_sq: Vec<i64>,
}

impl<'a> DotConstraint<'a> {
    fn new(other: &'a [i64], target: i64) -> Self {
        let mut tail_sq = vec![0i64; other.len() + 1];
        for p in (0..other.len()).rev() {
            tail_sq[p] = tail_sq[p + 1] + other[p] * other[p];
        }
        Self {
            other,
            target,
            tail_sq,
        }
    }
}

/// Depth-first walk over integer vectors of length `dim` with `|x|^2 = norm_sq`
/// and every dot constraint satisfied, in lexicographic order.
struct Walker<'a> {
    dim: usize,
    constraints: &'a [DotConstraint<'a>],
    current: Vec<i64>,
    dots: Vec<i64>,
}

impl<'a> Walker<'a> {
    fn new(dim: usize, constraints: &'a [DotConstraint<'a>]) -> Self {
        Self {
            dim,
            constraints,
            current: vec![0; dim],
            dots: vec![0; constraints.len()],
        }
    }

    /// Walk with the first coordinate fixed to `x0`.
    fn run_from(&mut self, x0: i64, norm_sq: i64, visit: &mut dyn FnMut(&[i64])) {
        if self.dim == 1 {
            if x0 * x0 == norm_sq && self.constraints.iter().all(|c| x0 * c.other[0] == c.target) {
                self.current[0] = x0;
                visit(&self.current);
            }
            return;
        }
        if self.place(0, x0, norm_sq) {
            self.descend(1, norm_sq - x0 * x0, visit);
        }
        self.unplace(0, x0);
    }

    /// Set coordinate `p` and report whether the partial point can still be completed.
    fn place(&mut self, p: usize, x: i64, budget_before: i64) -> bool {
        self.current[p] = x;
        let rest = budget_before - x * x;
        let mut feasible = rest >= 0;
        for (c, dot) in self.constraints.iter().zip(self.dots.iter_mut()) {
            *dot += x * c.other[p];
            let needed = (c.target - *dot) as i128;
            // Cauchy-Schwarz on the remaining coordinates.
            if needed * needed > rest as i128 * c.tail_sq[p + 1] as i128 {
                feasible = false;
            }
        }
        feasible
    }

    fn unplace(&mut self, p: usize, x: i64) {
        for (c, dot) in self.constraints.iter().zip(self.dots.iter_mut()) {
            *dot -= x * c.other[p];
        }
    }

    fn descend(&mut self, p: usize, budget: i64, visit: &mut dyn FnMut(&[i64])) {
        if p + 1 == self.dim {
            let root = isqrt(budget as u64) as i64;
            if root * root != budget {
                return;
            }
            let last: &[i64] = if root == 0 { &[0] } else { &[-root, root] };
            for &x in last {
                let ok = self
                    .constraints
                    .iter()
                    .zip(&self.dots)
                    .all(|(c, &dot)| dot + x * c.other[p] == c.target);
                if ok {
                    self.current[p] = x;
                    visit(&self.current);
                }
            }
            return;
        }
        let bound = isqrt(budget as u64) as i64;
        for x in -bound..=bound {
            if self.place(p, x, budget) {
                self.descend(p + 1, budget - x * x, visit);
            }
            self.unplace(p, x);
        }
    }
}

/// All `y` with `|y|^2 = norm_sq` and the given dot constraints, lexicographic.
/// The first coordinate's range is split across threads and merged in order.
fn solutions(dim: usize, norm_sq: i64, constraints: &[DotConstraint<'_>]) -> Vec<i64> {
    let bound = isqrt(norm_sq as u64) as i64;
    let chunks: Vec<Vec<i64>> = (-bound..=bound)
        .into_par_iter()
        .map(|x0| {
            let mut out = Vec::new();
            Walker::new(dim, constraints).run_from(x0, norm_sq, &mut |p| out.extend_from_slice(p));
            out
        })
        .collect();
    chunks.concat()
}

/// Lattice points on the sphere `|y|^2 = m` in `Z^n`, lexicographically ordered.
pub fn enumerate_sphere(n: usize, m: u64) -> Result<CopySet, GeometryError> {
    if n == 0 {
        return Err(GeometryError::ZeroDimension);
    }
    let norm_sq =
        i64::try_from(m).map_err(|_| GeometryError::Overflow(format!("squared radius {m}")))?;
    check_capacity(count_representations(n, m)?, n)?;
    let coords = solutions(n, norm_sq, &[]);
    Ok(CopySet::from_parts(
        CopyKind::Sphere,
        n,
        1,
        m,
        vec![vec![0, 1], vec![1, 0]],
        coords,
    ))
}

/// All `(m_1, ..., m_k)` in `Z^{nk}` with `|m_i - m_j|^2 = lambda_sq * d_ij`
/// (`m_0 = 0`), ordered lexicographically on the concatenated coordinates.
///
/// `m_1` runs over its sphere; each later `m_i` is found by coordinate
/// backtracking under `|m_i|^2 = lambda_sq g_ii` and `m_i . m_j = lambda_sq g_ij`
/// for every placed `j`, which is the same set of equalities written through
/// the Gram matrix. An empty result is not an error.
pub fn enumerate_simplex_copies(
    simplex: &SimplexConfig,
    lambda_sq: u64,
) -> Result<CopySet, GeometryError> {
    if lambda_sq == 0 {
        return Err(GeometryError::ZeroDilation);
    }
    let (n, k) = (simplex.n(), simplex.k());
    let scale = i64::try_from(lambda_sq)
        .map_err(|_| GeometryError::Overflow(format!("lambda_sq {lambda_sq}")))?;
    let mut targets = vec![vec![0i64; k]; k];
    let mut largest = 0i64;
    for i in 0..k {
        for j in 0..k {
            let t = simplex.gram()[i][j].checked_mul(scale).ok_or_else(|| {
                GeometryError::Overflow(format!("lambda_sq * g[{i}][{j}] does not fit in i64"))
            })?;
            targets[i][j] = t;
            largest = largest.max(t.abs());
        }
    }
    // Partial dot products are bounded by n * max |target|.
    largest
        .checked_mul(n as i64 + 1)
        .ok_or_else(|| GeometryError::Overflow("partial sums of the constraints".into()))?;

    check_capacity(count_representations(n, targets[0][0] as u64)?, n)?;
    let first = solutions(n, targets[0][0], &[]);

    let coords = if k == 1 {
        first
    } else {
        let joins: Vec<Option<HalfBalls>> = (0..k)
            .map(|i| {
                if i == 0 {
                    None
                } else {
                    HalfBalls::new(n, targets[i][i])
                }
            })
            .collect();
        let chunks: Vec<Vec<i64>> = first
            .par_chunks(n)
            .map_init(JoinScratch::default, |scratch, m1| {
                let mut out = Vec::new();
                let mut prefix = m1.to_vec();
                extend_copy(n, k, &targets, &joins, scratch, &mut prefix, &mut out);
                out
            })
            .collect();
        let total: usize = chunks.iter().map(Vec::len).sum();
        check_capacity((total / (n * k)) as u64, n * k)?;
        chunks.concat()
    };
    Ok(CopySet::from_parts(
        CopyKind::Simplex,
        n,
        k,
        lambda_sq,
        simplex.dist_sq().to_vec(),
        coords,
    ))
}

fn extend_copy(
    n: usize,
    k: usize,
    targets: &[Vec<i64>],
    joins: &[Option<HalfBalls>],
    scratch: &mut JoinScratch,
    prefix: &mut Vec<i64>,
    out: &mut Vec<i64>,
) {
    let i = prefix.len() / n;
    if i == k {
        out.extend_from_slice(prefix);
        return;
    }
    let last = i + 1 == k;
    let mut found = Vec::new();
    {
        let constraints: Vec<DotConstraint<'_>> = (0..i)
            .map(|j| DotConstraint::new(&prefix[j * n..(j + 1) * n], targets[i][j]))
            .collect();
        let head: &[i64] = prefix;
        let sink = if last { &mut *out } else { &mut found };
        match &joins[i] {
            Some(balls) => balls.solve(&constraints, scratch, &mut |a, b| {
                if last {
                    sink.extend_from_slice(head);
                }
                sink.extend_from_slice(a);
                sink.extend_from_slice(b);
            }),
            None => {
                let bound = isqrt(targets[i][i] as u64) as i64;
                let mut walker = Walker::new(n, &constraints);
                for x0 in -bound..=bound {
                    walker.run_from(x0, targets[i][i], &mut |p| {
                        if last {
                            sink.extend_from_slice(head);
                        }
                        sink.extend_from_slice(p);
                    });
                }
            }
        }
    }
    for next in found.chunks(n) {
        prefix.extend_from_slice(next);
        extend_copy(n, k, targets, joins, scratch, prefix, out);
        prefix.truncate(i * n);
    }
}

/// Largest half-ball the meet-in-the-middle search will tabulate.
const MAX_HALF_BALL: u64 = 1 << 20;

/// Lattice points of the balls `|a|^2 <= norm_sq` in the first `split`
/// coordinates and in the remaining ones, for solving `|y|^2 = norm_sq` under
/// dot constraints by joining the halves on partial norms and dot products.
struct HalfBalls {
    n: usize,
    split: usize,
    norm_sq: i64,
    low: Vec<i64>,
    low_norm: Vec<i64>,
    high: Vec<i64>,
    high_norm: Vec<i64>,
}

/// Reusable hash table over the high half-ball, chained by index and keyed
/// on the partial norm and the first dot product.
#[derive(Default)]
struct JoinScratch {
    heads: Vec<u32>,
    next: Vec<u32>,
    keys: Vec<u64>,
    dots: Vec<i64>,
}

const EMPTY: u32 = u32::MAX;

fn join_key(norm: i64, dot: i64) -> u64 {
    (norm as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (dot as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f)
}

impl HalfBalls {
    /// `None` when a half-ball would be too large to tabulate.
    fn new(n: usize, norm_sq: i64) -> Option<Self> {
        if n < 2 {
            return None;
        }
        let split = n / 2;
        let side = 2 * isqrt(norm_sq as u64) + 1;
        let box_size = |d: usize| side.checked_pow(d as u32).filter(|&s| s <= MAX_HALF_BALL);
        box_size(split)?;
        box_size(n - split)?;
        let norms = |points: &[i64], d: usize| -> Vec<i64> {
            points
                .chunks(d)
                .map(|p| p.iter().map(|x| x * x).sum())
                .collect()
        };
        let low = ball_points(split, norm_sq);
        let high = ball_points(n - split, norm_sq);
        Some(Self {
            n,
            split,
            norm_sq,
            low_norm: norms(&low, split),
            high_norm: norms(&high, n - split),
            low,
            high,
        })
    }

    /// Calls `emit(a, b)` for every solution `y = (a, b)`, lexicographically.
    fn solve(
        &self,
        constraints: &[DotConstraint<'_>],
        scratch: &mut JoinScratch,
        emit: &mut dyn FnMut(&[i64], &[i64]),
    ) {
        let (split, rest) = (self.split, self.n - self.split);
        let Some((first, others)) = constraints.split_first() else {
            // A bare sphere: no prefix to join against.
            for (a, &na) in self.low.chunks(split).zip(&self.low_norm) {
                for (b, &nb) in self.high.chunks(rest).zip(&self.high_norm) {
                    if na + nb == self.norm_sq {
                        emit(a, b);
                    }
                }
            }
            return;
        };
        let (u_low, u_high) = first.other.split_at(split);
        let count = self.high_norm.len();
        let bits = (2 * count).next_power_of_two().trailing_zeros().max(1);
        let slot = |key: u64| (key.wrapping_mul(0xff51_afd7_ed55_8ccd) >> (64 - bits)) as usize;
        let JoinScratch {
            heads,
            next,
            keys,
            dots,
        } = scratch;
        heads.clear();
        heads.resize(1 << bits, EMPTY);
        next.clear();
        next.resize(count, EMPTY);
        dots.clear();
        dots.extend(self.high.chunks(rest).map(|b| dot(b, u_high)));
        keys.clear();
        keys.extend(
            self.high_norm
                .iter()
                .zip(dots.iter())
                .map(|(&nb, &d)| join_key(nb, d)),
        );
        // Inserting in reverse keeps every chain in ascending index order.
        for q in (0..count).rev() {
            let s = slot(keys[q]);
            next[q] = heads[s];
            heads[s] = q as u32;
        }
        for (a, &na) in self.low.chunks(split).zip(&self.low_norm) {
            let want_norm = self.norm_sq - na;
            let want_dot = first.target - dot(a, u_low);
            let key = join_key(want_norm, want_dot);
            let mut q = heads[slot(key)];
            while q != EMPTY {
                let i = q as usize;
                if keys[i] == key && self.high_norm[i] == want_norm && dots[i] == want_dot {
                    let b = &self.high[i * rest..(i + 1) * rest];
                    let ok = others
                        .iter()
                        .all(|c| dot(a, &c.other[..split]) + dot(b, &c.other[split..]) == c.target);
                    if ok {
                        emit(a, b);
                    }
                }
                q = next[i];
            }
        }
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Points with `|x|^2 <= norm_sq` in `Z^dim`, lexicographic and flattened.
fn ball_points(dim: usize, norm_sq: i64) -> Vec<i64> {
    fn fill(p: usize, budget: i64, current: &mut [i64], out: &mut Vec<i64>) {
        if p == current.len() {
            out.extend_from_slice(current);
            return;
        }
        let bound = isqrt(budget as u64) as i64;
        for x in -bound..=bound {
            current[p] = x;
            fill(p + 1, budget - x * x, current, out);
        }
    }
    let mut out = Vec::new();
    fill(0, norm_sq, &mut vec![0; dim], &mut out);
    out
}

fn check_capacity(count: u64, dim: usize) -> Result<(), GeometryError> {
    match count.checked_mul(dim as u64) {
        Some(c) if c <= MAX_COORDS => Ok(()),
        _ => Err(GeometryError::Capacity(format!(
            "{count} points of dimension {dim}"
        ))),
    }
}

/// Whether `candidate = (m_1, ..., m_k)` is a copy of `lambda S`, checked in exact
/// integer arithmetic on all `(k+1 choose 2)` squared distances.
pub fn verify_isometry(
    simplex: &SimplexConfig,
    lambda_sq: u64,
    candidate: &[i64],
) -> Result<bool, GeometryError> {
    let (n, k) = (simplex.n(), simplex.k());
    if candidate.len() != n * k {
        return Err(GeometryError::DimensionMismatch {
            expected: n * k,
            found: candidate.len(),
        });
    }
    let vertex = |i: usize| -> Option<&[i64]> { (i > 0).then(|| &candidate[(i - 1) * n..i * n]) };
    let d = simplex.dist_sq();
    for i in 0..=k {
        for j in i + 1..=k {
            let a = vertex(i);
            let b = vertex(j).expect("j >= 1");
            let got: i128 = (0..n)
                .map(|c| {
                    let diff = b[c] as i128 - a.map_or(0, |a| a[c]) as i128;
                    diff * diff
                })
                .sum();
            if got != lambda_sq as i128 * d[i][j] as i128 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
