use std::collections::BTreeMap;

use num_complex::Complex64;

use super::GridError;

/// Period `N` per axis and number of axes of a periodic grid `Z_N^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct GridShape {
    period: usize,
    dim: usize,
    len: usize,
}

impl GridShape {
    pub fn new(period: usize, dim: usize) -> Result<Self, GridError> {
        if period == 0 || dim == 0 {
            return Err(GridError::EmptyGrid);
        }
        let len = u32::try_from(dim)
            .ok()
            .and_then(|d| period.checked_pow(d))
            .filter(|&len| len <= isize::MAX as usize / std::mem::size_of::<Complex64>())
            .ok_or(GridError::TooLarge { period, dim })?;
        Ok(Self { period, dim, len })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `period^dim`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance in flat index between neighbours along `axis` (row-major).
    pub fn stride(&self, axis: usize) -> usize {
        self.period.pow((self.dim - 1 - axis) as u32)
    }

    /// Row-major flat index of a multi-index with entries in `0..period`.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.period + i)
    }

    /// Flat index of an arbitrary lattice point reduced modulo the period.
    pub fn wrap_index(&self, point: &[i64]) -> usize {
        let n = self.period as i64;
        point
            .iter()
            .fold(0, |acc, &x| acc * self.period + x.rem_euclid(n) as usize)
    }

    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = flat % self.period;
            flat /= self.period;
        }
    }

    /// Multi-index of `flat` as signed coordinates in `0..period`.
    pub fn point(&self, flat: usize) -> Vec<i64> {
        let mut idx = vec![0usize; self.dim];
        self.multi_index(flat, &mut idx);
        idx.into_iter().map(|i| i as i64).collect()
    }
}

/// A function on the periodic grid `Z_N^dim`, values in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFunction {
    shape: GridShape,
    values: Vec<Complex64>,
}

impl DenseFunction {
    pub fn zeros(shape: GridShape) -> Self {
        Self {
            shape,
            values: vec![Complex64::new(0.0, 0.0); shape.len()],
        }
    }

    pub fn constant(shape: GridShape, c: Complex64) -> Self {
        Self {
            shape,
            values: vec![c; shape.len()],
        }
    }

    pub fn delta(shape: GridShape) -> Self {
        let mut f = Self::zeros(shape);
        f.values[0] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn from_values(shape: GridShape, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != shape.len() {
            return Err(GridError::LengthMismatch {
                expected: shape.len(),
                found: values.len(),
            });
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(GridError::NonFinite);
        }
        Ok(Self { shape, values })
    }

    pub fn from_real(shape: GridShape, values: Vec<f64>) -> Result<Self, GridError> {
        Self::from_values(
            shape,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Values already known to be finite and of the right length.
    pub(crate) fn from_raw(shape: GridShape, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), shape.len());
        Self { shape, values }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at a lattice point, taken modulo the period.
    pub fn at(&self, point: &[i64]) -> Complex64 {
        self.values[self.shape.wrap_index(point)]
    }

    /// `g(x) = f(x - shift)` on the torus.
    pub fn translate(&self, shift: &[i64]) -> Self {
        let mut out = Self::zeros(self.shape);
        let mut idx = vec![0usize; self.shape.dim()];
        let mut src = vec![0i64; self.shape.dim()];
        for (flat, slot) in out.values.iter_mut().enumerate() {
            self.shape.multi_index(flat, &mut idx);
            for a in 0..idx.len() {
                src[a] = idx[a] as i64 - shift[a];
            }
            *slot = self.at(&src);
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            shape: self.shape,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.shape, other.shape, "grid shapes differ");
        Self {
            shape: self.shape,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    /// Largest `|f(x) - g(x)|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape, other.shape, "grid shapes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_sparse(&self) -> SparseFunction {
        let mut entries = BTreeMap::new();
        for (flat, &v) in self.values.iter().enumerate() {
            if v != Complex64::new(0.0, 0.0) {
                entries.insert(self.shape.point(flat), v);
            }
        }
        SparseFunction {
            dim: self.shape.dim(),
            entries,
        }
    }
}

/// A finitely supported function on `Z^dim`. Zero values are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFunction {
    dim: usize,
    entries: BTreeMap<Vec<i64>, Complex64>,
}

impl SparseFunction {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn delta(dim: usize) -> Self {
        let mut f = Self::new(dim);
        f.entries.insert(vec![0; dim], Complex64::new(1.0, 0.0));
        f
    }

    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
    ) -> Result<Self, GridError> {
        let mut f = Self::new(dim);
        for (point, value) in entries {
            f.add_at(point, value)?;
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &BTreeMap<Vec<i64>, Complex64> {
        &self.entries
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, point: &[i64]) -> Complex64 {
        self.entries.get(point).copied().unwrap_or_default()
    }

    /// Add `value` at `point`, removing the entry if it cancels to zero.
    pub fn add_at(&mut self, point: Vec<i64>, value: Complex64) -> Result<(), GridError> {
        if point.len() != self.dim {
            return Err(GridError::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(GridError::NonFinite);
        }
        let slot = self.entries.entry(point).or_default();
        *slot += value;
        if *slot == Complex64::new(0.0, 0.0) {
            self.entries.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        }
        Ok(())
    }

    /// Largest coordinate spread of the support along any axis.
    pub fn diameter(&self) -> u64 {
        (0..self.dim)
            .map(|a| {
                let (lo, hi) = self
                    .entries
                    .keys()
                    .fold((i64::MAX, i64::MIN), |(lo, hi), p| {
                        (lo.min(p[a]), hi.max(p[a]))
                    });
                if lo > hi {
                    0
                } else {
                    (hi - lo) as u64
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Periodise onto `Z_N^dim`, summing points that collide modulo `N`.
    pub fn to_dense(&self, shape: GridShape) -> Result<DenseFunction, GridError> {
        if shape.dim() != self.dim {
            return Err(GridError::DimensionMismatch {
                expected: shape.dim(),
                found: self.dim,
            });
        }
        let mut out = DenseFunction::zeros(shape);
        for (p, &v) in &self.entries {
            out.values[shape.wrap_index(p)] += v;
        }
        Ok(out)
    }
}

/// A complex-valued function on `Z^dim`, either periodic-dense or sparse.
#[derive(Debug, Clone, PartialEq)]
pub enum LatticeFunction {
    Dense(DenseFunction),
    Sparse(SparseFunction),
}

impl LatticeFunction {
    pub fn dim(&self) -> usize {
        match self {
            LatticeFunction::Dense(f) => f.shape().dim(),
            LatticeFunction::Sparse(f) => f.dim(),
        }
    }

    pub fn as_dense(&self) -> Option<&DenseFunction> {
        match self {
            LatticeFunction::Dense(f) => Some(f),
            LatticeFunction::Sparse(_) => None,
        }
    }

    pub fn as_sparse(&self) -> Option<&SparseFunction> {
        match self {
            LatticeFunction::Sparse(f) => Some(f),
            LatticeFunction::Dense(_) => None,
        }
    }

    pub fn into_dense(self) -> Option<DenseFunction> {
        match self {
            LatticeFunction::Dense(f) => Some(f),
            LatticeFunction::Sparse(_) => None,
        }
    }

    /// Iterate over (point, value) pairs of the stored representation.
    pub fn for_each_value(&self, mut visit: impl FnMut(&[i64], Complex64)) {
        match self {
            LatticeFunction::Dense(f) => {
                for (flat, &v) in f.values().iter().enumerate() {
                    visit(&f.shape().point(flat), v);
                }
            }
            LatticeFunction::Sparse(f) => {
                for (p, &v) in f.entries() {
                    visit(p, v);
                }
            }
        }
    }
}

impl From<DenseFunction> for LatticeFunction {
    fn from(f: DenseFunction) -> Self {
        LatticeFunction::Dense(f)
    }
}

impl From<SparseFunction> for LatticeFunction {
    fn from(f: SparseFunction) -> Self {
        LatticeFunction::Sparse(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let shape = GridShape::new(4, 3).unwrap();
        assert_eq!(shape.len(), 64);
        assert_eq!(shape.stride(0), 16);
        assert_eq!(shape.stride(2), 1);
        let mut idx = [0usize; 3];
        for flat in 0..shape.len() {
            shape.multi_index(flat, &mut idx);
            assert_eq!(shape.flat_index(&idx), flat);
        }
        assert_eq!(shape.wrap_index(&[-1, 4, 5]), shape.flat_index(&[3, 0, 1]));
    }

    #[test]
    fn invalid_shapes() {
        assert_eq!(GridShape::new(0, 2).unwrap_err(), GridError::EmptyGrid);
        assert!(matches!(
            GridShape::new(1 << 20, 4),
            Err(GridError::TooLarge { .. })
        ));
    }

    #[test]
    fn dense_rejects_non_finite() {
        let shape = GridShape::new(2, 1).unwrap();
        assert_eq!(
            DenseFunction::from_real(shape, vec![1.0, f64::NAN]).unwrap_err(),
            GridError::NonFinite
        );
        assert!(matches!(
            DenseFunction::from_real(shape, vec![1.0]),
            Err(GridError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn sparse_drops_cancelled_entries() {
        let mut f = SparseFunction::new(2);
        f.add_at(vec![1, 2], Complex64::new(1.0, 0.0)).unwrap();
        f.add_at(vec![1, 2], Complex64::new(-1.0, 0.0)).unwrap();
        assert_eq!(f.support_len(), 0);
        f.add_at(vec![-3, 2], Complex64::new(2.0, 0.0)).unwrap();
        f.add_at(vec![4, 0], Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(f.diameter(), 7);
        assert!(f.add_at(vec![1], Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn translation_is_circular() {
        let shape = GridShape::new(5, 2).unwrap();
        let f = DenseFunction::delta(shape);
        let g = f.translate(&[2, -1]);
        assert_eq!(g.at(&[2, 4]), Complex64::new(1.0, 0.0));
        assert_eq!(g.values().iter().filter(|v| v.norm() > 0.0).count(), 1);
    }
}
