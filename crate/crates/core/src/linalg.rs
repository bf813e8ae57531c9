//! Dense and compressed-row matrices, vector kernels, and direct solvers.
//!
//! Everything here is plain `f64` arithmetic on slices. Vectors are
//! `Vec<f64>`/`&[f64]`; matrices are [`DenseMatrix`] (row-major) and
//! [`CsrMatrix`] (compressed rows). Both implement [`LinearOperator`], which is
//! what the Krylov solvers consume.

use thiserror::Error;

use crate::krylov::{cg_solve, TerminationCriterion};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular to working precision (pivot {index})")]
    Singular { index: usize },
    #[error("invalid compressed-row structure: {0}")]
    InvalidStructure(String),
}

/// A linear map `y = M x`.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// Writes `M x` into `y`. Panics if the slice lengths disagree with the shape;
    /// use [`matvec`] for a checked product.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }
}

/// Checked matrix-vector product.
pub fn matvec<M: LinearOperator + ?Sized>(m: &M, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if x.len() != m.ncols() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.ncols(),
            found: x.len(),
        });
    }
    let mut y = vec![0.0; m.nrows()];
    m.apply(x, &mut y);
    Ok(y)
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += a * x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// `‖x − y‖₂`
pub fn dist2(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `b − M x`
pub fn residual<M: LinearOperator + ?Sized>(m: &M, x: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; m.nrows()];
    m.apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `self − other`
    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.data.len(),
                found: other.data.len(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "dense matvec: x has wrong length");
        assert_eq!(y.len(), self.rows, "dense matvec: y has wrong length");
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }
}

/// Square sparse matrix in compressed-row storage.
///
/// Column indices are strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        if row_offsets.len() != n + 1 {
            return Err(LinalgError::InvalidStructure(format!(
                "expected {} row offsets, found {}",
                n + 1,
                row_offsets.len()
            )));
        }
        if row_offsets[0] != 0 || row_offsets[n] != col_indices.len() {
            return Err(LinalgError::InvalidStructure(
                "offsets must start at 0 and end at nnz".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(LinalgError::InvalidStructure(
                "column index and value arrays differ in length".into(),
            ));
        }
        for i in 0..n {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if start > end {
                return Err(LinalgError::InvalidStructure(format!(
                    "row offsets decrease at row {i}"
                )));
            }
            let cols = &col_indices[start..end];
            if cols.iter().any(|&c| c >= n) {
                return Err(LinalgError::InvalidStructure(format!(
                    "column index out of range in row {i}"
                )));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(LinalgError::InvalidStructure(format!(
                    "column indices not strictly increasing in row {i}"
                )));
            }
        }
        Ok(Self {
            n,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, LinalgError> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(LinalgError::InvalidStructure(format!(
                    "triplet ({i}, {j}) outside {n}x{n}"
                )));
            }
            rows[i].push((j, v));
        }
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                if col_indices.len() > *row_offsets.last().unwrap()
                    && *col_indices.last().unwrap() == j
                {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self::new(n, row_offsets, col_indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// The 1D Laplacian `tridiag(−1, 2, −1)`.
    pub fn laplacian_1d(n: usize) -> Self {
        let mut t = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        Self::from_triplets(n, t).expect("valid tridiagonal structure")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `i` as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// `y = Mᵀ x`
    pub fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                y[j] += v * xi;
            }
        }
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }

    /// Square block `rows × cols` given as index ranges, re-indexed from zero.
    /// The two ranges must have equal length.
    pub fn block(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Result<CsrMatrix, LinalgError> {
        if rows.len() != cols.len() {
            return Err(LinalgError::NotSquare {
                rows: rows.len(),
                cols: cols.len(),
            });
        }
        let mut t = Vec::new();
        for i in rows.clone() {
            for (j, v) in self.row(i) {
                if cols.contains(&j) {
                    t.push((i - rows.start, j - cols.start, v));
                }
            }
        }
        CsrMatrix::from_triplets(rows.len(), t)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d.set(i, j, v);
            }
        }
        d
    }

    /// Largest `|i − j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.n
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n, "csr matvec: x has wrong length");
        assert_eq!(y.len(), self.n, "csr matvec: y has wrong length");
        for (i, yi) in y.iter_mut().enumerate() {
            let range = self.row_offsets[i]..self.row_offsets[i + 1];
            *yi = self.col_indices[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(|(&j, v)| v * x[j])
                .sum();
        }
    }
}

/// Pivot magnitudes at or below this fraction of `‖M‖_∞` count as singular.
const PIVOT_RTOL: f64 = 1e-13;

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactorization {
    pub fn factor(m: &DenseMatrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = PIVOT_RTOL * m.norm_inf();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if !(pmax > threshold) {
                return Err(LinalgError::Singular { index: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let l = lu[i * n + k] / pivot;
                lu[i * n + k] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= l * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Solves `Mᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        // Mᵀ = Uᵀ Lᵀ P
        let mut z = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[j * n + i] * z[j]).sum();
            z[i] = (z[i] - s) / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[j * n + i] * z[j]).sum();
            z[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        Ok(x)
    }
}

/// Solves `M x = b` by Gaussian elimination with partial pivoting.
pub fn solve_direct(m: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    LuFactorization::factor(m)?.solve(b)
}

/// LU factorization of a banded sparse matrix without pivoting.
///
/// Meant for the SPD / diagonally dominant matrices of the model problems,
/// where elimination without row exchanges is stable and fill stays inside
/// the band.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    bw: usize,
    // row i stores columns i-bw ..= i+bw at offsets 0 ..= 2*bw
    band: Vec<f64>,
}

impl BandedLu {
    pub fn factor(m: &CsrMatrix) -> Result<Self, LinalgError> {
        let n = m.dim();
        let bw = m.bandwidth();
        let width = 2 * bw + 1;
        let mut band = vec![0.0; n * width];
        for i in 0..n {
            for (j, v) in m.row(i) {
                band[i * width + (j + bw - i)] = v;
            }
        }
        let threshold = PIVOT_RTOL * m.norm_inf();
        for k in 0..n {
            let pivot = band[k * width + bw];
            if !(pivot.abs() > threshold) {
                return Err(LinalgError::Singular { index: k });
            }
            for i in k + 1..(k + bw + 1).min(n) {
                let off = k + bw - i;
                let l = band[i * width + off] / pivot;
                if l == 0.0 {
                    continue;
                }
                band[i * width + off] = l;
                for j in k + 1..(k + bw + 1).min(n) {
                    band[i * width + (j + bw - i)] -= l * band[k * width + (j + bw - k)];
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let (n, bw) = (self.n, self.bw);
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let width = 2 * bw + 1;
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let s: f64 = (lo..i)
                .map(|j| self.band[i * width + (j + bw - i)] * x[j])
                .sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let hi = (i + bw + 1).min(n);
            let s: f64 = (i + 1..hi)
                .map(|j| self.band[i * width + (j + bw - i)] * x[j])
                .sum();
            x[i] = (x[i] - s) / self.band[i * width + bw];
        }
        Ok(x)
    }
}

/// Result of [`condition_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionEstimate {
    pub value: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// False when either power iteration hit its cap before settling.
    pub converged: bool,
}

/// Matrices whose normal operator `MᵀM` can be applied and inverted.
pub trait NormalOperator {
    fn dim(&self) -> usize;
    fn apply_normal(&self, x: &[f64]) -> Vec<f64>;
    fn solve_normal(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError>;
}

/// Dense matrices are inverted through a cached LU factorization.
pub struct DenseNormal<'a> {
    m: &'a DenseMatrix,
    lu: LuFactorization,
}

impl<'a> DenseNormal<'a> {
    pub fn new(m: &'a DenseMatrix) -> Result<Self, LinalgError> {
        Ok(Self {
            m,
            lu: LuFactorization::factor(m)?,
        })
    }
}

impl NormalOperator for DenseNormal<'_> {
    fn dim(&self) -> usize {
        self.m.rows
    }
    fn apply_normal(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m.rows];
        self.m.apply(x, &mut y);
        let mut z = vec![0.0; self.m.cols];
        self.m.transpose().apply(&y, &mut z);
        z
    }
    fn solve_normal(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        // (MᵀM)⁻¹ = M⁻¹ M⁻ᵀ
        let y = self.lu.solve_transpose(x)?;
        self.lu.solve(&y)
    }
}

struct CsrNormalOp<'a>(&'a CsrMatrix);

impl LinearOperator for CsrNormalOp<'_> {
    fn nrows(&self) -> usize {
        self.0.dim()
    }
    fn ncols(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; x.len()];
        self.0.apply(x, &mut t);
        self.0.apply_transpose(&t, y);
    }
}

impl NormalOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply_normal(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        CsrNormalOp(self).apply(x, &mut y);
        y
    }
    fn solve_normal(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let crit = TerminationCriterion::relative_to_rhs(1e-12);
        let report = cg_solve(
            &CsrNormalOp(self),
            x,
            &vec![0.0; self.n],
            crit,
            20 * self.n.max(10),
        )
        .map_err(|_| LinalgError::DimensionMismatch {
            expected: self.n,
            found: x.len(),
        })?;
        Ok(report.solution)
    }
}

const POWER_CAP: usize = 2000;
const POWER_RTOL: f64 = 1e-9;

/// Deterministic start vector without the symmetries of the model matrices.
fn start_vector(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i * 7919 + 13) % 31) as f64 / 31.0)
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

fn power_iteration(
    n: usize,
    mut op: impl FnMut(&[f64]) -> Result<Vec<f64>, LinalgError>,
) -> Result<(f64, bool), LinalgError> {
    let mut v = start_vector(n);
    let mut lambda = 0.0;
    for _ in 0..POWER_CAP {
        let mut w = op(&v)?;
        let next = norm2(&w);
        if next == 0.0 {
            return Ok((0.0, true));
        }
        w.iter_mut().for_each(|x| *x /= next);
        v = w;
        if (next - lambda).abs() <= POWER_RTOL * next {
            return Ok((next, true));
        }
        lambda = next;
    }
    Ok((lambda, false))
}

/// Estimates `κ₂(M) = σ_max / σ_min` by power iteration on `MᵀM` and
/// inverse power iteration. Report-only quantity.
pub fn condition_estimate<M: NormalOperator + ?Sized>(
    m: &M,
) -> Result<ConditionEstimate, LinalgError> {
    let n = m.dim();
    if n == 0 {
        return Ok(ConditionEstimate {
            value: 1.0,
            sigma_max: 0.0,
            sigma_min: 0.0,
            converged: true,
        });
    }
    let (lmax, c1) = power_iteration(n, |v| Ok(m.apply_normal(v)))?;
    let (linv, c2) = power_iteration(n, |v| m.solve_normal(v))?;
    let sigma_max = lmax.sqrt();
    let sigma_min = 1.0 / linv.sqrt();
    Ok(ConditionEstimate {
        value: sigma_max / sigma_min,
        sigma_max,
        sigma_min,
        converged: c1 && c2,
    })
}

/// Convenience wrapper for dense matrices.
pub fn condition_estimate_dense(m: &DenseMatrix) -> Result<ConditionEstimate, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    condition_estimate(&DenseNormal::new(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coupled_matrix(alpha: f64) -> DenseMatrix {
        DenseMatrix::from_rows(&[&[alpha, 0.0], &[0.001, 0.001]]).unwrap()
    }

    #[test]
    fn matvec_examples() {
        let i3 = DenseMatrix::identity(3);
        assert_eq!(matvec(&i3, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let z = DenseMatrix::zeros(2, 2);
        assert_eq!(matvec(&z, &[5.0, 7.0]).unwrap(), vec![0.0, 0.0]);
        let y = matvec(&coupled_matrix(0.1), &[1.0, 1.0]).unwrap();
        assert_relative_eq!(y[0], 0.1, max_relative = 1e-15);
        assert_relative_eq!(y[1], 0.002, max_relative = 1e-15);
    }

    #[test]
    fn matvec_rejects_wrong_length() {
        let err = matvec(&DenseMatrix::identity(3), &[1.0, 2.0]).unwrap_err();
        assert_eq!(
            err,
            LinalgError::DimensionMismatch {
                expected: 3,
                found: 2
            }
        );
        assert!(matvec(&CsrMatrix::identity(2), &[1.0]).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm2(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(norm2(&[3.0, 4.0]), 5.0);
        assert_eq!(norm2(&[1.0; 4]), 2.0);
    }

    #[test]
    fn direct_solve_examples() {
        assert_eq!(
            solve_direct(&DenseMatrix::identity(2), &[4.0, 9.0]).unwrap(),
            vec![4.0, 9.0]
        );
        let d = DenseMatrix::from_diagonal(&[2.0, 4.0]);
        assert_eq!(solve_direct(&d, &[2.0, 2.0]).unwrap(), vec![1.0, 0.5]);

        let a = coupled_matrix(0.1);
        let ab = a.matmul(&a).unwrap();
        let m = DenseMatrix::identity(2).sub(&ab).unwrap();
        let x = solve_direct(&m, &[1.0, 1.0]).unwrap();
        // hand elimination: x1 = 1/0.99, x2 = (1 + 0.000101 x1) / 0.999999
        let x1 = 1.0 / 0.99;
        let x2 = (1.0 + 0.000101 * x1) / 0.999999;
        assert_relative_eq!(x[0], x1, max_relative = 1e-14);
        assert_relative_eq!(x[1], x2, max_relative = 1e-14);
    }

    #[test]
    fn singular_matrix_names_pivot() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert_eq!(
            solve_direct(&m, &[1.0, 1.0]).unwrap_err(),
            LinalgError::Singular { index: 1 }
        );
    }

    #[test]
    fn transpose_solve_matches_transposed_matrix() {
        let m = DenseMatrix::from_rows(&[&[4.0, 1.0, 0.5], &[2.0, 5.0, 1.0], &[0.0, 3.0, 6.0]])
            .unwrap();
        let lu = LuFactorization::factor(&m).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = lu.solve_transpose(&b).unwrap();
        let y = solve_direct(&m.transpose(), &b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn banded_matches_dense() {
        let m = CsrMatrix::laplacian_1d(12);
        let b: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let x = BandedLu::factor(&m).unwrap().solve(&b).unwrap();
        let y = solve_direct(&m.to_dense(), &b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn csr_validation() {
        assert!(CsrMatrix::new(2, vec![0, 2, 3], vec![1, 0, 1], vec![1.0; 3]).is_err());
        assert!(CsrMatrix::new(2, vec![0, 1, 3], vec![0, 0, 1], vec![1.0; 3]).is_ok());
        assert!(CsrMatrix::new(2, vec![0, 1, 2], vec![0, 2], vec![1.0; 2]).is_err());
        let m = CsrMatrix::from_triplets(2, [(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.nnz(), 2);
        assert!(!m.is_symmetric());
        assert!(CsrMatrix::laplacian_1d(5).is_symmetric());
    }

    #[test]
    fn condition_examples() {
        let c = condition_estimate_dense(&DenseMatrix::identity(5)).unwrap();
        assert_relative_eq!(c.value, 1.0, max_relative = 0.05);
        let c = condition_estimate_dense(&DenseMatrix::from_diagonal(&[10.0, 1.0])).unwrap();
        assert_relative_eq!(c.value, 10.0, max_relative = 0.05);

        // eigenvalues 2 − 2cos(kπ/5), k = 1..4
        let lam = |k: f64| 2.0 - 2.0 * (k * std::f64::consts::PI / 5.0).cos();
        let expected = lam(4.0) / lam(1.0);
        let lap = CsrMatrix::laplacian_1d(4);
        let dense = condition_estimate_dense(&lap.to_dense()).unwrap();
        let sparse = condition_estimate(&lap).unwrap();
        assert_relative_eq!(dense.value, expected, max_relative = 0.05);
        assert_relative_eq!(sparse.value, expected, max_relative = 0.05);
        assert_relative_eq!(expected, 9.472, max_relative = 1e-3);
    }

    #[test]
    fn two_norm_of_coupling_matrix() {
        // σ_max of [[0.1, 0], [0.001, 0.001]] from the 2x2 closed form
        let a = coupled_matrix(0.1);
        let ata = a.transpose().matmul(&a).unwrap();
        let (p, q, r) = (ata.get(0, 0), ata.get(0, 1), ata.get(1, 1));
        let lmax = 0.5 * (p + r) + (0.25 * (p - r).powi(2) + q * q).sqrt();
        let c = condition_estimate_dense(&a).unwrap();
        assert_relative_eq!(c.sigma_max, lmax.sqrt(), max_relative = 1e-8);
        assert_relative_eq!(c.sigma_max, 0.100005, max_relative = 1e-6);
    }
}
