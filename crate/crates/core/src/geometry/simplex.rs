use super::GeometryError;

/// A non-degenerate simplex `{0, s_1, ..., s_k}` in `Z^n`.
///
/// Besides the vertices this keeps the Gram matrix `g_ij = s_i . s_j` (the
/// form actually used by the enumerator) and the squared distance matrix
/// `d_ij = |s_i - s_j|^2` with `s_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexConfig {
    n: usize,
    vertices: Vec<Vec<i64>>,
    gram: Vec<Vec<i64>>,
    dist_sq: Vec<Vec<i64>>,
    norm_sq: i64,
}

impl SimplexConfig {
    pub fn new(n: usize, vertices: Vec<Vec<i64>>) -> Result<Self, GeometryError> {
        if n == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let k = vertices.len();
        if k == 0 || k > n {
            return Err(GeometryError::VertexCount { n, k });
        }
        for (index, v) in vertices.iter().enumerate() {
            if v.len() != n {
                return Err(GeometryError::VertexLength {
                    index,
                    expected: n,
                    found: v.len(),
                });
            }
        }
        if rank(&vertices) != k {
            return Err(GeometryError::Degenerate);
        }

        let dot = |a: &[i64], b: &[i64]| -> Result<i64, GeometryError> {
            a.iter()
                .zip(b)
                .try_fold(0i64, |acc, (&x, &y)| acc.checked_add(x.checked_mul(y)?))
                .ok_or_else(|| GeometryError::Overflow("vertex inner product".into()))
        };
        let mut gram = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in 0..k {
                gram[i][j] = dot(&vertices[i], &vertices[j])?;
            }
        }
        // Index 0 of dist_sq is the origin vertex.
        let mut dist_sq = vec![vec![0i64; k + 1]; k + 1];
        for i in 1..=k {
            dist_sq[0][i] = gram[i - 1][i - 1];
            dist_sq[i][0] = gram[i - 1][i - 1];
            for j in 1..=k {
                if i != j {
                    dist_sq[i][j] =
                        gram[i - 1][i - 1] + gram[j - 1][j - 1] - 2 * gram[i - 1][j - 1];
                }
            }
        }
        let norm_sq = (0..k)
            .try_fold(0i64, |acc, i| acc.checked_add(gram[i][i]))
            .ok_or_else(|| GeometryError::Overflow("simplex norm".into()))?;

        Ok(Self {
            n,
            vertices,
            gram,
            dist_sq,
            norm_sq,
        })
    }

    /// The segment `{0, e_1}` in `Z^n`; its dilated copies are sphere points.
    pub fn unit(n: usize) -> Result<Self, GeometryError> {
        if n == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let mut e1 = vec![0; n];
        e1[0] = 1;
        Self::new(n, vec![e1])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    /// Dimension `nk` of the space the copies and averaged functions live in.
    pub fn dim(&self) -> usize {
        self.n * self.k()
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn dist_sq(&self) -> &[Vec<i64>] {
        &self.dist_sq
    }

    /// `|s|^2` for the concatenation `s = (s_1, ..., s_k)`.
    pub fn norm_sq(&self) -> i64 {
        self.norm_sq
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq as f64).sqrt()
    }

    /// `n >= 2k + 3`.
    pub fn regime_ok(&self) -> bool {
        self.n >= 2 * self.k() + 3
    }

    /// Growth exponent `nk - k(k+1)` of the copy count.
    pub fn scaling_exponent(&self) -> i64 {
        let (n, k) = (self.n as i64, self.k() as i64);
        n * k - k * (k + 1)
    }
}

/// Rank over the rationals by fraction-free elimination.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            let (p, f) = (m[rank][col], m[r][col]);
            if f == 0 {
                continue;
            }
            for c in col..cols {
                m[r][c] = m[r][c] * p - m[rank][c] * f;
            }
            let g = m[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                m[r].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
