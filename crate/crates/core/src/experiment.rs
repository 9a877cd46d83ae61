//! Experiment grids: SVM cross-validation with and without a discriminant
//! front end, and nearest-neighbor face recognition over several `k`.

use crate::error::Result;
use crate::ingest::LabeledDataset;
use crate::knn::KnnModel;
use crate::lda::fit_lda_with_defaults;
use crate::linalg::Matrix;
use crate::pca::{fit_pca, fit_pca_fisherface};
use crate::pipeline::{calibrate_face_distance, FaceChain, PipelineConfig};
use crate::svm::{cross_validate_with, predict_multiclass, train_multiclass_raw, SvmParams};

/// Voice cross-validation accuracy in percent.
///
/// With `lda` set, the discriminant is refitted on each training fold and the
/// held-out fold is projected through it.
pub fn crossval_svm(
    ds: &LabeledDataset,
    params: &SvmParams,
    lda: bool,
    reg: Option<f64>,
    folds: usize,
    seed: u64,
) -> Result<f64> {
    let c = ds.num_classes();
    let names = ds.class_names().to_vec();
    cross_validate_with(ds.features(), ds.labels(), folds, seed, |tx, ty, qx| {
        let (tx, qx) = if lda {
            let train = LabeledDataset::new(
                tx.clone(),
                ty.to_vec(),
                names.clone(),
                (0..ty.len()).map(|i| format!("s{i}")).collect(),
            )?;
            let s = fit_lda_with_defaults(&train, None, reg)?.subspace;
            (s.project_columns(tx)?, s.project_columns(qx)?)
        } else {
            (tx.clone(), qx.clone())
        };
        let model = train_multiclass_raw(&tx, ty, c, params)?;
        qx.columns()
            .map(|q| predict_multiclass(&model, q).map(|p| p.label))
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnGridRow {
    pub k: usize,
    /// Percent of test samples labeled correctly.
    pub test_accuracy: f64,
    /// `(rejected, total)` fraud probes, when a fraud set was given.
    pub fraud_rejected: Option<(usize, usize)>,
}

/// Face recognition for each `k`: fit on `train`, score `test`, and count
/// fraud probes whose mean neighbor distance exceeds the calibrated rejection
/// distance.
pub fn knn_grid(
    train: &LabeledDataset,
    test: &LabeledDataset,
    fraud: Option<&Matrix>,
    ks: &[usize],
    cfg: &PipelineConfig,
) -> Result<Vec<KnnGridRow>> {
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let cfg = PipelineConfig {
            knn_k: k,
            ..cfg.clone()
        };
        let chain = FaceChain::fit(train, &cfg)?;
        let mut correct = 0;
        for (i, &l) in test.labels().iter().enumerate() {
            let z = chain.embed(test.features().col(i))?;
            if chain.gallery.classify(&z)?.label == l {
                correct += 1;
            }
        }
        let fraud_rejected = match fraud {
            Some(f) => {
                let tau = calibrate_face_distance(train, &cfg)?;
                let mut rejected = 0;
                for q in f.columns() {
                    let z = chain.embed(q)?;
                    if chain.gallery.classify(&z)?.mean_distance > tau {
                        rejected += 1;
                    }
                }
                Some((rejected, f.cols()))
            }
            None => None,
        };
        rows.push(KnnGridRow {
            k,
            test_accuracy: 100.0 * correct as f64 / test.num_samples().max(1) as f64,
            fraud_rejected,
        });
    }
    Ok(rows)
}

/// Face cross-validation accuracy in percent with a nearest-neighbor gallery.
///
/// With `lda` set the full PCA → LDA chain is refitted per fold; otherwise
/// neighbors are searched in the PCA space alone.
pub fn crossval_face(
    ds: &LabeledDataset,
    cfg: &PipelineConfig,
    lda: bool,
    folds: usize,
    seed: u64,
) -> Result<f64> {
    let names = ds.class_names().to_vec();
    cross_validate_with(ds.features(), ds.labels(), folds, seed, |tx, ty, qx| {
        let train = LabeledDataset::new(
            tx.clone(),
            ty.to_vec(),
            names.clone(),
            (0..ty.len()).map(|i| format!("s{i}")).collect(),
        )?;
        if lda {
            let chain = FaceChain::fit(&train, cfg)?;
            qx.columns()
                .map(|q| chain.gallery.classify(&chain.embed(q)?).map(|c| c.label))
                .collect()
        } else {
            let pca = match cfg.pca_retained {
                Some(r) => fit_pca(&train, r)?,
                None => fit_pca_fisherface(&train)?,
            };
            let gallery = KnnModel::new(pca.project_columns(tx)?, ty.to_vec(), cfg.knn_k)?;
            qx.columns()
                .map(|q| gallery.classify(&pca.project(q)?).map(|c| c.label))
                .collect()
        }
    })
}
