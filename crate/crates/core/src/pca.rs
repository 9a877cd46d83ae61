//! Eigenface-style principal component analysis.
//!
//! When there are fewer samples than dimensions the eigenvectors of the
//! `d×d` scatter `X̄X̄ᵀ` are obtained from the `p×p` Gram matrix `X̄ᵀX̄` and
//! lifted back (`v = X̄u / ‖X̄u‖`).

use crate::error::{Error, Result};
use crate::ingest::LabeledDataset;
use crate::linalg::{fix_sign, sym_eig, Matrix, Vector};

/// Eigenvalues at or below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubspaceKind {
    Pca,
    Lda,
}

/// A learned linear projection `x ↦ basisᵀ(x − mean)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    pub kind: SubspaceKind,
    pub mean: Vector,
    pub basis: Matrix,
}

impl Subspace {
    pub fn new(kind: SubspaceKind, mean: Vector, basis: Matrix) -> Result<Self> {
        if mean.len() != basis.rows() {
            return Err(Error::dim(format!(
                "mean of length {} for a basis with {} rows",
                mean.len(),
                basis.rows()
            )));
        }
        Ok(Subspace { kind, mean, basis })
    }

    pub fn retained(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vector> {
        project(self, x)
    }

    /// Project every column of `x`.
    pub fn project_columns(&self, x: &Matrix) -> Result<Matrix> {
        let cols = x
            .columns()
            .map(|c| project(self, c).map(Vector::into_inner))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(&cols)
    }

    /// Project a whole dataset, keeping labels and ids.
    pub fn project_dataset(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        ds.with_features(self.project_columns(ds.features())?)
    }
}

pub fn project(s: &Subspace, x: &[f64]) -> Result<Vector> {
    if x.len() != s.ambient_dim() {
        return Err(Error::dim(format!(
            "projecting length-{} vector into a {}-dimensional subspace",
            x.len(),
            s.ambient_dim()
        )));
    }
    let centered: Vec<f64> = x.iter().zip(s.mean.iter()).map(|(a, m)| a - m).collect();
    s.basis.tr_mul_vec(&centered)
}

pub fn mean_vector(ds: &LabeledDataset) -> Vector {
    column_mean(ds.features())
}

pub(crate) fn column_mean(x: &Matrix) -> Vector {
    let mut m = vec![0.0; x.rows()];
    for c in x.columns() {
        for (acc, v) in m.iter_mut().zip(c) {
            *acc += v;
        }
    }
    let p = x.cols() as f64;
    m.iter_mut().for_each(|v| *v /= p);
    Vector::new(m)
}

pub fn center(ds: &LabeledDataset, m: &[f64]) -> Result<Matrix> {
    center_columns(ds.features(), m)
}

pub(crate) fn center_columns(x: &Matrix, m: &[f64]) -> Result<Matrix> {
    if m.len() != x.rows() {
        return Err(Error::dim(format!(
            "centering {}-dimensional data by a length-{} mean",
            x.rows(),
            m.len()
        )));
    }
    Ok(Matrix::from_fn(x.rows(), x.cols(), |r, c| x[(r, c)] - m[r]))
}

/// Everything computed while fitting, for inspection and tests.
#[derive(Clone, Debug)]
pub struct PcaFit {
    pub subspace: Subspace,
    /// Full spectrum of the matrix actually diagonalized, descending.
    pub spectrum: Vec<f64>,
    /// Number of eigenvalues above `RANK_TOL · λ_max`.
    pub usable_rank: usize,
    /// Training coordinates (`retained × p`) computed at fit time.
    pub coords: Matrix,
    /// Whether the `p×p` Gram route was used.
    pub used_gram: bool,
}

pub fn fit_pca(ds: &LabeledDataset, retained: usize) -> Result<Subspace> {
    Ok(fit_pca_detailed(ds, |_| retained)?.subspace)
}

/// Fisherface default: `p − C` components, capped at `p − 1` and at the usable rank.
pub fn fit_pca_fisherface(ds: &LabeledDataset) -> Result<Subspace> {
    let default = default_retained(ds.num_samples(), ds.num_classes());
    Ok(fit_pca_detailed(ds, |rank| default.min(rank))?.subspace)
}

pub fn default_retained(samples: usize, classes: usize) -> usize {
    samples
        .saturating_sub(classes)
        .min(samples.saturating_sub(1))
        .max(1)
}

/// Fit with the retained count chosen from the usable rank.
pub fn fit_pca_detailed(
    ds: &LabeledDataset,
    choose: impl FnOnce(usize) -> usize,
) -> Result<PcaFit> {
    let x = ds.features();
    let (d, p) = (x.rows(), x.cols());
    let mean = column_mean(x);
    let xc = center_columns(x, &mean)?;

    let used_gram = p < d;
    let eig = if used_gram {
        sym_eig(&xc.gram())?
    } else {
        sym_eig(&xc.outer_gram())?
    };
    let lmax = eig.values.first().copied().unwrap_or(0.0);
    let usable_rank = if lmax > 0.0 {
        eig.values.iter().filter(|&&l| l > RANK_TOL * lmax).count()
    } else {
        0
    };

    let retained = choose(usable_rank);
    let cap = d.min(p.saturating_sub(1));
    if retained == 0 || retained > cap || retained > usable_rank {
        return Err(Error::Rank {
            requested: retained,
            usable: usable_rank.min(cap),
        });
    }

    let mut basis = Matrix::zeros(d, retained);
    let mut coords = Matrix::zeros(retained, p);
    for j in 0..retained {
        if used_gram {
            let u = eig.vectors.col(j);
            let mut v = xc.mul_vec(u)?.into_inner();
            let nv = crate::linalg::norm(&v);
            v.iter_mut().for_each(|e| *e /= nv);
            // keep u consistent with the sign-fixed v so coords match projections
            let flip = {
                let before = v.clone();
                fix_sign(&mut v);
                before != v
            };
            let s = if flip { -1.0 } else { 1.0 } * eig.values[j].sqrt();
            for (i, &ui) in u.iter().enumerate() {
                coords[(j, i)] = s * ui;
            }
            basis.col_mut(j).copy_from_slice(&v);
        } else {
            basis.col_mut(j).copy_from_slice(eig.vectors.col(j));
        }
    }
    if !used_gram {
        coords = xc.transpose().matmul(&basis)?.transpose();
    }

    Ok(PcaFit {
        subspace: Subspace::new(SubspaceKind::Pca, mean, basis)?,
        spectrum: eig.values,
        usable_rank,
        coords,
        used_gram,
    })
}
