//! Dense real matrices and vectors, Cholesky solves, and the two eigensolvers
//! (symmetric Jacobi and the Cholesky-whitened generalized problem).
//!
//! Storage is column-major; wherever a matrix holds a data set, each column is
//! one sample.

use std::ops::{Deref, DerefMut, Index, IndexMut};

use crate::error::{Error, Result};

/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to `‖A‖_F`.
pub const JACOBI_REL_THRESHOLD: f64 = 1e-12;
/// Relative asymmetry accepted by the symmetric solvers.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// `gen_eig` refuses a within-class matrix whose condition estimate exceeds this.
pub const MAX_CONDITION: f64 = 1e12;

/// A dense real vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(data: Vec<f64>) -> Self {
        Vector(data)
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

/// Dense column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.data[c * rows + r] = f(r, c);
            }
        }
        m
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} values supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(Matrix { rows, cols, data })
    }

    /// Build from a list of rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != nc) {
            return Err(Error::dim("ragged rows"));
        }
        let mut data = vec![0.0; nr * nc];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.as_ref().iter().enumerate() {
                data[c * nr + r] = v;
            }
        }
        Matrix::from_col_major(nr, nc, data)
    }

    /// Build from a list of columns (one sample per column).
    pub fn from_columns<C: AsRef<[f64]>>(cols: &[C]) -> Result<Self> {
        let nc = cols.len();
        let nr = cols.first().map_or(0, |c| c.as_ref().len());
        if cols.iter().any(|c| c.as_ref().len() != nr) {
            return Err(Error::dim("columns of unequal length"));
        }
        let data = cols.iter().flat_map(|c| c.as_ref().iter().copied()).collect();
        Matrix::from_col_major(nr, nc, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.rows)
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<Matrix> {
        if idx.is_empty() {
            return Err(Error::dim("no columns selected"));
        }
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for &j in idx {
            if j >= self.cols {
                return Err(Error::Index {
                    index: j,
                    len: self.cols,
                });
            }
            data.extend_from_slice(self.col(j));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        })
    }

    /// First `n` columns.
    pub fn leading_columns(&self, n: usize) -> Result<Matrix> {
        if n == 0 || n > self.cols {
            return Err(Error::dim(format!(
                "cannot take {n} leading columns of {} ",
                self.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: n,
            data: self.data[..n * self.rows].to_vec(),
        })
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let bj = other.col(j);
            let oj = out.col_mut(j);
            for (k, &b) in bj.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let ak = &self.data[k * self.rows..(k + 1) * self.rows];
                for (o, &a) in oj.iter_mut().zip(ak) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `A·x`
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::dim(format!(
                "{}x{} matrix times length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.col(j)) {
                *o += a * xj;
            }
        }
        Ok(Vector(out))
    }

    /// `Aᵀ·x`
    pub fn tr_mul_vec(&self, x: &[f64]) -> Result<Vector> {
        if x.len() != self.rows {
            return Err(Error::dim(format!(
                "transpose of {}x{} matrix times length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(Vector(self.columns().map(|c| dot_raw(c, x)).collect()))
    }

    /// `AᵀA` (Gram matrix of the columns).
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot_raw(self.col(i), self.col(j));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// `AAᵀ` (sum of column outer products).
    pub fn outer_gram(&self) -> Matrix {
        let d = self.rows;
        let mut s = Matrix::zeros(d, d);
        for c in self.columns() {
            add_outer_upper(&mut s, c, 1.0);
        }
        mirror_upper(&mut s);
        s
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `A + s·I`
    pub fn add_diagonal(&self, s: f64) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::dim("add_diagonal on non-square matrix"));
        }
        let mut m = self.clone();
        for i in 0..self.rows {
            m[(i, i)] += s;
        }
        Ok(m)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = rel_tol * self.max_abs();
        for j in 0..self.cols {
            for i in (j + 1)..self.rows {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[c * self.rows + r]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[c * self.rows + r]
    }
}

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::domain(format!("non-finite entry at index {i}"))),
        None => Ok(()),
    }
}

pub(crate) fn dot_raw(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `s += w·x·xᵀ`, upper triangle only.
pub(crate) fn add_outer_upper(s: &mut Matrix, x: &[f64], w: f64) {
    let d = s.rows;
    for j in 0..d {
        let xj = w * x[j];
        if xj == 0.0 {
            continue;
        }
        let col = &mut s.data[j * d..j * d + j + 1];
        for (i, c) in col.iter_mut().enumerate() {
            *c += x[i] * xj;
        }
    }
}

pub(crate) fn mirror_upper(s: &mut Matrix) {
    let d = s.rows;
    for j in 0..d {
        for i in (j + 1)..d {
            s.data[j * d + i] = s.data[i * d + j];
        }
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::dim(format!(
            "dot of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(dot_raw(x, y))
}

pub fn norm(x: &[f64]) -> f64 {
    dot_raw(x, x).sqrt()
}

pub fn sub(x: &[f64], y: &[f64]) -> Result<Vector> {
    if x.len() != y.len() {
        return Err(Error::dim(format!(
            "difference of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(Vector(x.iter().zip(y).map(|(a, b)| a - b).collect()))
}

/// Lower Cholesky factor `L` with `A = L·Lᵀ`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "cholesky of {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Factorization(format!(
                "matrix is not positive definite (pivot {j} = {d:e})"
            )));
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solve `L·x = b` for lower-triangular `L`.
fn forward_sub(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solve `Lᵀ·x = b` for lower-triangular `L`.
fn backward_sub_transposed(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solve `A·x = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<Vector> {
    if b.len() != a.rows {
        return Err(Error::dim(format!(
            "{}x{} system with length-{} right-hand side",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::Factorization("matrix is not symmetric".into()));
    }
    let l = cholesky(a)?;
    Ok(Vector(backward_sub_transposed(&l, &forward_sub(&l, b))))
}

/// Eigenvalues sorted descending with matching unit-norm eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Flip `v` so that its entry of largest magnitude is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eig(a: &Matrix) -> Result<EigenPairs> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "sym_eig of {}x{} matrix",
            a.rows, a.cols
        )));
    }
    if !a.all_finite() {
        return Err(Error::domain("sym_eig input has non-finite entries"));
    }
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::domain("sym_eig input is not symmetric"));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let threshold = JACOBI_REL_THRESHOLD * a.frobenius();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&m);
        if off > threshold {
            return Err(Error::Convergence {
                sweeps: JACOBI_MAX_SWEEPS,
                off_norm: off,
            });
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = vectors.col_mut(dst);
        col.copy_from_slice(v.col(src));
        fix_sign(col);
    }
    Ok(EigenPairs { values, vectors })
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.rows;
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `m[p][q]`; accumulates into `v`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = m[(p, p)];
    let aqq = m[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = m.rows;
    m[(p, p)] = app - t * apq;
    m[(q, q)] = aqq + t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let nkp = c * akp - s * akq;
        let nkq = s * akp + c * akq;
        m[(k, p)] = nkp;
        m[(p, k)] = nkp;
        m[(k, q)] = nkq;
        m[(q, k)] = nkq;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Solves `(s_w + reg·I)⁻¹ s_b v = λ v` by Cholesky whitening.
///
/// Eigenvectors are scaled to unit Euclidean norm; they are not
/// `s_w`-orthonormal.
pub fn gen_eig(s_b: &Matrix, s_w: &Matrix, reg: f64) -> Result<EigenPairs> {
    if !s_b.is_square() || !s_w.is_square() || s_b.rows != s_w.rows {
        return Err(Error::dim(format!(
            "gen_eig of {}x{} and {}x{}",
            s_b.rows, s_b.cols, s_w.rows, s_w.cols
        )));
    }
    if !(reg >= 0.0) || !reg.is_finite() {
        return Err(Error::domain(format!("regularization must be >= 0, got {reg}")));
    }
    if !s_b.is_symmetric(SYMMETRY_TOL) || !s_w.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::domain("gen_eig inputs must be symmetric"));
    }
    let advice = "increase the regularization or reduce dimension (e.g. PCA first)";
    let b = s_w.add_diagonal(reg)?;
    let l = cholesky(&b).map_err(|_| Error::Singular {
        condition: f64::INFINITY,
        advice: advice.into(),
    })?;
    let diag: Vec<f64> = (0..l.rows).map(|i| l[(i, i)]).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = (dmax / dmin).powi(2);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Singular {
            condition,
            advice: advice.into(),
        });
    }

    // C = L⁻¹ s_b L⁻ᵀ, built column by column from Y = L⁻¹ s_b.
    let n = s_b.rows;
    let mut y = Matrix::zeros(n, n);
    for j in 0..n {
        y.col_mut(j).copy_from_slice(&forward_sub(&l, s_b.col(j)));
    }
    let yt = y.transpose();
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        c.col_mut(j).copy_from_slice(&forward_sub(&l, yt.col(j)));
    }
    let c = Matrix::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));

    let whitened = sym_eig(&c)?;
    let mut vectors = Matrix::zeros(n, n);
    for j in 0..n {
        let mut v = backward_sub_transposed(&l, whitened.vectors.col(j));
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        fix_sign(&mut v);
        vectors.col_mut(j).copy_from_slice(&v);
    }
    Ok(EigenPairs {
        values: whitened.values,
        vectors,
    })
}
