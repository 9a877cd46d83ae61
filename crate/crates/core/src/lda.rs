//! Fisher linear discriminant analysis, shared by the face and voice chains.
//!
//! Between-class scatter uses class-mean deviations from the total mean,
//! `S_B = Σ nᵢ (mᵢ − m)(mᵢ − m)ᵀ`, so that `S_W + S_B` equals the total
//! scatter.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::ingest::LabeledDataset;
use crate::linalg::{add_outer_upper, gen_eig, mirror_upper, Matrix, Vector};
use crate::pca::{Subspace, SubspaceKind};

/// Generalized eigenvalues at or below `INFORMATIVE_TOL · max(1, λ_max)` carry
/// no discriminant information.
pub const INFORMATIVE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterPair {
    pub s_w: Matrix,
    pub s_b: Matrix,
    /// One column per class.
    pub class_means: Matrix,
    pub total_mean: Vector,
    pub class_counts: Vec<usize>,
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Within- and between-class scatter.
///
/// Samples are accumulated in a canonical order (by class, then
/// lexicographically by value) so the result does not depend on column order.
pub fn scatter(ds: &LabeledDataset) -> Result<ScatterPair> {
    let x = ds.features();
    let d = x.rows();
    let c = ds.num_classes();
    let mut groups = ds.class_indices();
    for g in &mut groups {
        if g.is_empty() {
            return Err(Error::Class("class with zero samples".into()));
        }
        g.sort_by(|&i, &j| lexicographic(x.col(i), x.col(j)));
    }

    let mut class_means = Matrix::zeros(d, c);
    let mut total = vec![0.0; d];
    for (k, g) in groups.iter().enumerate() {
        let mut sum = vec![0.0; d];
        for &i in g {
            for (s, v) in sum.iter_mut().zip(x.col(i)) {
                *s += v;
            }
        }
        for (t, s) in total.iter_mut().zip(&sum) {
            *t += s;
        }
        let n = g.len() as f64;
        for (m, s) in class_means.col_mut(k).iter_mut().zip(&sum) {
            *m = s / n;
        }
    }
    let p = ds.num_samples() as f64;
    total.iter_mut().for_each(|t| *t /= p);

    let mut s_w = Matrix::zeros(d, d);
    let mut s_b = Matrix::zeros(d, d);
    let mut dev = vec![0.0; d];
    for (k, g) in groups.iter().enumerate() {
        let mk = class_means.col(k).to_vec();
        for &i in g {
            for ((e, v), m) in dev.iter_mut().zip(x.col(i)).zip(&mk) {
                *e = v - m;
            }
            add_outer_upper(&mut s_w, &dev, 1.0);
        }
        for ((e, m), t) in dev.iter_mut().zip(&mk).zip(&total) {
            *e = m - t;
        }
        add_outer_upper(&mut s_b, &dev, g.len() as f64);
    }
    mirror_upper(&mut s_w);
    mirror_upper(&mut s_b);

    Ok(ScatterPair {
        s_w,
        s_b,
        class_means,
        total_mean: Vector::new(total),
        class_counts: groups.iter().map(Vec::len).collect(),
    })
}

/// `1e-6 · trace(S_W) / d`
pub fn default_reg(sc: &ScatterPair) -> f64 {
    1e-6 * sc.s_w.trace() / sc.s_w.rows() as f64
}

/// Fitted discriminant with its full generalized spectrum.
#[derive(Clone, Debug)]
pub struct LdaFit {
    pub subspace: Subspace,
    pub eigenvalues: Vec<f64>,
    pub reg: f64,
}

pub fn fit_lda(ds: &LabeledDataset, retained: usize, reg: f64) -> Result<Subspace> {
    let sc = scatter(ds)?;
    Ok(fit_from_scatter(ds.num_classes(), &sc, retained, reg)?.subspace)
}

/// `retained = C − 1` (when `None`) and `reg = default_reg` (when `None`).
pub fn fit_lda_with_defaults(
    ds: &LabeledDataset,
    retained: Option<usize>,
    reg: Option<f64>,
) -> Result<LdaFit> {
    let sc = scatter(ds)?;
    let c = ds.num_classes();
    let retained = retained.unwrap_or(c.saturating_sub(1));
    let reg = reg.unwrap_or_else(|| default_reg(&sc));
    fit_from_scatter(c, &sc, retained, reg)
}

pub fn fit_from_scatter(
    classes: usize,
    sc: &ScatterPair,
    retained: usize,
    reg: f64,
) -> Result<LdaFit> {
    if classes < 2 {
        return Err(Error::Class(format!(
            "LDA needs at least 2 classes, got {classes}"
        )));
    }
    if retained == 0 || retained > classes - 1 {
        return Err(Error::Rank {
            requested: retained,
            usable: classes - 1,
        });
    }
    let eig = gen_eig(&sc.s_b, &sc.s_w, reg).map_err(|e| match e {
        Error::Singular { condition, .. } => Error::Singular {
            condition,
            advice: "within-class scatter is singular; pass a positive reg or apply PCA first"
                .into(),
        },
        other => other,
    })?;
    let lmax = eig.values.first().copied().unwrap_or(0.0);
    let informative = eig
        .values
        .iter()
        .filter(|&&l| l > INFORMATIVE_TOL * lmax.max(1.0))
        .count();
    if retained > informative {
        return Err(Error::Rank {
            requested: retained,
            usable: informative,
        });
    }
    let basis = eig.vectors.leading_columns(retained)?;
    Ok(LdaFit {
        subspace: Subspace::new(SubspaceKind::Lda, sc.total_mean.clone(), basis)?,
        eigenvalues: eig.values,
        reg,
    })
}

/// Same contract as [`crate::pca::project`].
pub fn lda_project(s: &Subspace, x: &[f64]) -> Result<Vector> {
    crate::pca::project(s, x)
}
