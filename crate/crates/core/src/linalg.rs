//! Dense linear algebra: truncated SVD, Moore–Penrose pseudo-inverse and
//! minimum-norm least squares.
//!
//! Matrices are stored row-major. The SVD itself is delegated to `faer`; every
//! quantity built on top of it (pseudo-inverse, min-norm solutions, kernel
//! projectors) goes through [`SvdResult`] so that one rank-truncation rule is
//! applied everywhere:
//!
//! ```text
//! keep sigma_k  iff  sigma_k > RANK_EPS * max(rows, cols) * sigma_max
//! ```

use std::fmt;
use std::sync::Once;

use faer::Mat;

use crate::error::{invalid, Error, Result};
use crate::stats::{dot, norm};

pub type DenseVector = Vec<f64>;

/// Relative cutoff used when deciding the numerical rank.
pub const RANK_EPS: f64 = 1e-12;

static FAER_SERIAL: Once = Once::new();

/// faer kernels run single-threaded so results do not depend on the host's
/// thread count; parallelism lives at the trial level instead.
fn faer_serial() {
    FAER_SERIAL.call_once(|| faer::set_global_parallelism(faer::Parallelism::None));
}

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(8)])?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return invalid(format!("expected {} entries for a {rows}x{cols} matrix, got {}", rows * cols, data.len()));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite entry at ({}, {})", pos / cols.max(1), pos % cols.max(1)));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return invalid("ragged rows");
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Builds a matrix from an index function. Entries are not validated here;
    /// decompositions reject non-finite input.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn column_vector(v: &[f64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return invalid(format!("shape mismatch {:?} vs {:?}", self.shape(), other.shape()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| op(*a, *b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return invalid(format!("cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols));
        }
        faer_serial();
        let prod = &self.to_faer() * &other.to_faer();
        Ok(Self::from_faer(&prod))
    }

    /// `A v`
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return invalid(format!("vector of length {} against {} columns", v.len(), self.cols));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `Aᵀ v`
    pub fn tr_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return invalid(format!("vector of length {} against {} rows", v.len(), self.rows));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.cols) {
            return invalid(format!("column {bad} out of range for {} columns", self.cols));
        }
        Ok(Self::from_fn(self.rows, idx.len(), |i, k| self.get(i, idx[k])))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.rows) {
            return invalid(format!("row {bad} out of range for {} rows", self.rows));
        }
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Ok(Self { rows: idx.len(), cols: self.cols, data })
    }

    pub(crate) fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    pub(crate) fn from_faer(m: &Mat<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m.read(i, j))
    }
}

/// Thin SVD truncated to the numerical rank: `A ≈ U diag(s) Vᵀ` with
/// `U` n×r, `s` strictly positive and nonincreasing, `Vᵀ` r×d.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub vt: DenseMatrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let us = DenseMatrix::from_fn(self.u.rows(), self.rank(), |i, k| self.u.get(i, k) * self.singular_values[k]);
        us.matmul(&self.vt).expect("factor shapes agree")
    }

    /// `A⁺ b` for a right-hand side with `A.rows` entries.
    pub fn solve_min_norm(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut coef = self.u.tr_matvec(b)?;
        for (c, s) in coef.iter_mut().zip(&self.singular_values) {
            *c /= s;
        }
        self.vt.tr_matvec(&coef)
    }

    /// Orthogonal projection of `v` onto the row space of `A`, i.e. `A⁺A v`.
    pub fn project_row_space(&self, v: &[f64]) -> Result<Vec<f64>> {
        let coef = self.vt.matvec(v)?;
        self.vt.tr_matvec(&coef)
    }
}

/// Truncated thin SVD.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    let (n, d) = a.shape();
    if n == 0 || d == 0 {
        return invalid("svd of an empty matrix");
    }
    if !a.is_finite() {
        return invalid("svd input has non-finite entries");
    }
    faer_serial();
    let dec = a.to_faer().thin_svd();
    let s = dec.s_diagonal();
    let k = s.nrows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s.read(j).total_cmp(&s.read(i)));
    let smax = order.first().map_or(0.0, |&i| s.read(i));
    if !smax.is_finite() {
        return Err(Error::NumericalFailure("svd produced non-finite singular values".into()));
    }
    let cutoff = RANK_EPS * n.max(d) as f64 * smax;
    let kept: Vec<usize> = order.into_iter().filter(|&i| s.read(i) > cutoff && smax > 0.0).collect();
    let r = kept.len();

    let (uf, vf) = (dec.u(), dec.v());
    let u = DenseMatrix::from_fn(n, r, |i, c| uf.read(i, kept[c]));
    let vt = DenseMatrix::from_fn(r, d, |c, j| vf.read(j, kept[c]));
    let singular_values: Vec<f64> = kept.iter().map(|&i| s.read(i)).collect();
    if !u.is_finite() || !vt.is_finite() {
        return Err(Error::NumericalFailure("svd produced non-finite singular vectors".into()));
    }
    Ok(SvdResult { u, singular_values, vt })
}

/// Moore–Penrose pseudo-inverse `V Σ⁺ Uᵀ` (d×n).
pub fn pseudo_inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    let dec = svd(a)?;
    pseudo_inverse_from_svd(&dec, a.rows(), a.cols())
}

pub(crate) fn pseudo_inverse_from_svd(dec: &SvdResult, rows: usize, cols: usize) -> Result<DenseMatrix> {
    if dec.rank() == 0 {
        return Ok(DenseMatrix::zeros(cols, rows));
    }
    let v_scaled = DenseMatrix::from_fn(cols, dec.rank(), |j, k| dec.vt.get(k, j) / dec.singular_values[k]);
    v_scaled.matmul(&dec.u.transpose())
}

/// A linear model `x ↦ wᵀx` together with the coordinates it was fit on.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPredictor {
    pub weights: DenseVector,
    pub active: Vec<usize>,
}

impl LinearPredictor {
    pub fn dense(weights: DenseVector) -> Self {
        let active = (0..weights.len()).collect();
        Self { weights, active }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x)
    }

    pub fn predict_rows(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        x.matvec(&self.weights)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.weights)
    }
}

fn check_rhs(x: &DenseMatrix, y: &[f64]) -> Result<()> {
    if x.rows() != y.len() {
        return invalid(format!("design has {} rows but target has {} entries", x.rows(), y.len()));
    }
    Ok(())
}

/// `w = X⁺y`: the least-squares minimiser of smallest Euclidean norm.
pub fn min_norm_least_squares(x: &DenseMatrix, y: &[f64]) -> Result<LinearPredictor> {
    check_rhs(x, y)?;
    let dec = svd(x)?;
    Ok(LinearPredictor::dense(dec.solve_min_norm(y)?))
}

/// The member `X⁺y + (I − X⁺X)u` of the least-squares solution set.
pub fn least_squares_solution_member(x: &DenseMatrix, y: &[f64], u: &[f64]) -> Result<DenseVector> {
    check_rhs(x, y)?;
    if u.len() != x.cols() {
        return invalid(format!("offset has length {} but design has {} columns", u.len(), x.cols()));
    }
    let dec = svd(x)?;
    let base = dec.solve_min_norm(y)?;
    let proj = dec.project_row_space(u)?;
    Ok(base.iter().zip(u).zip(&proj).map(|((b, u), p)| b + u - p).collect())
}

/// `I − X⁺X`, the orthogonal projector onto `Ker(X)`.
pub fn kernel_projector(x: &DenseMatrix) -> Result<DenseMatrix> {
    let dec = svd(x)?;
    let d = x.cols();
    let vtv = dec.vt.transpose().matmul(&dec.vt)?;
    Ok(DenseMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 } - vtv.get(i, j)))
}
