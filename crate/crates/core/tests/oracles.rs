//! Worked examples checked against independent computations.

mod common;

use std::f64::consts::PI;

use biomm::ingest::{AudioRecord, ImageRecord};
use biomm::knn::euclidean;
use biomm::lda::{fit_lda, fit_lda_with_defaults};
use biomm::linalg::{sym_eig, Matrix};
use biomm::mfcc::{hz_to_mel, MfccConfig, MfccExtractor};
use biomm::modelfile::encode;
use biomm::pca::fit_pca_detailed;
use biomm::pipeline::{Enrollment, FaceChain, PipelineConfig, SystemModel, Thresholds};
use biomm::svm::{
    cross_validate, predict_multiclass, train_multiclass, BinarySvm, KernelSpec, PairMachine,
    SvmModel, SvmParams,
};
use biomm::synth::{corpus, CorpusSpec, SyntheticCorpus};
use biomm::LabeledDataset;
use common::*;
use rand::seq::SliceRandom;
use rand::RngExt;

#[test]
fn small_spectra_match_characteristic_polynomial_roots() {
    let mut r = rng(3);
    for _ in 0..50 {
        let n = r.random_range(1..=4);
        let a = random_symmetric(&mut r, n);
        let got = sym_eig(&a).unwrap().values;
        let want = charpoly_eigenvalues(&a);
        assert_eq!(want.len(), n, "oracle missed a root of {a:?}");
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-6, "{g} vs {w}");
        }
    }
}

#[test]
fn gram_and_direct_spectra_agree_ten_samples_in_six_d() {
    let mut r = rng(5);
    let x = random_matrix(&mut r, 6, 10, 3.0);
    let xc = Matrix::from_fn(6, 10, |i, j| {
        x[(i, j)] - (0..10).map(|k| x[(i, k)]).sum::<f64>() / 10.0
    });
    let small = sym_eig(&naive_matmul(&xc, &xc.transpose())).unwrap().values;
    let big = sym_eig(&naive_matmul(&xc.transpose(), &xc)).unwrap().values;
    for (s, b) in small.iter().zip(&big) {
        assert!((s - b).abs() <= 1e-8 * small[0]);
    }
    assert!(big[6..].iter().all(|l| l.abs() <= 1e-8 * small[0]));
}

#[test]
fn pca_training_coordinates_are_reproduced_by_projection() {
    let mut r = rng(9);
    for (d, p) in [(40, 12), (5, 20)] {
        let x = random_matrix(&mut r, d, p, 10.0);
        let ds = LabeledDataset::from_parts(x.clone(), vec![0; p]).unwrap();
        let fit = fit_pca_detailed(&ds, |rank| rank).unwrap();
        let again = fit.subspace.project_columns(&x).unwrap();
        assert!(again.sub(&fit.coords).unwrap().max_abs() <= 1e-10 * fit.coords.max_abs());
    }
}

#[test]
fn face_gallery_is_the_projected_training_set() {
    let ds = clustered(&mut rng(4), 30, 4, 5, 8.0);
    let chain = FaceChain::fit(&ds, &PipelineConfig::default()).unwrap();
    for (i, col) in ds.features().columns().enumerate() {
        let z = chain.embed(col).unwrap();
        assert_eq!(z.as_slice(), chain.gallery.points().col(i));
    }
}

#[test]
fn five_separated_clusters_stay_separated_after_projection() {
    let ds = clustered(&mut rng(21), 8, 5, 20, 20.0);
    let s = fit_lda_with_defaults(&ds, Some(4), None).unwrap().subspace;
    let z = s.project_columns(ds.features()).unwrap();
    let members = ds.class_indices();
    let means: Vec<Vec<f64>> = members
        .iter()
        .map(|m| (0..4).map(|r| m.iter().map(|&i| z[(r, i)]).sum::<f64>() / m.len() as f64).collect())
        .collect();
    // largest per-axis within-class standard deviation
    let mut within: f64 = 0.0;
    let z = &z;
    for r in 0..4 {
        let ss: f64 = members
            .iter()
            .zip(&means)
            .flat_map(|(m, mu)| m.iter().map(move |&i| (z[(r, i)] - mu[r]).powi(2)))
            .sum();
        within = within.max((ss / ds.num_samples() as f64).sqrt());
    }
    for a in 0..5 {
        for b in a + 1..5 {
            let gap: f64 = means[a].iter().zip(&means[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            assert!(gap >= 10.0 * within, "classes {a},{b}: gap {gap}, within std {within}");
        }
    }
}

#[test]
fn one_dimensional_fisher_score_separates_the_worked_example() {
    let x = Matrix::from_columns(&[[0.0, 0.0], [2.0, 0.0], [5.0, 1.0], [7.0, 1.0]]).unwrap();
    let ds = LabeledDataset::from_parts(x.clone(), vec![0, 0, 1, 1]).unwrap();
    let s = fit_lda(&ds, 1, 0.1).unwrap();
    let z = s.project_columns(&x).unwrap();
    let (a, b) = (z.row(0)[..2].to_vec(), z.row(0)[2..].to_vec());
    let (amax, amin) = (a.iter().copied().fold(f64::MIN, f64::max), a.iter().copied().fold(f64::MAX, f64::min));
    let (bmax, bmin) = (b.iter().copied().fold(f64::MIN, f64::max), b.iter().copied().fold(f64::MAX, f64::min));
    assert!(amax < bmin || bmax < amin, "scores {a:?} and {b:?} overlap");
}

#[test]
fn sine_at_one_kilohertz_lights_the_nearest_filter() {
    let cfg = MfccConfig::default();
    let ex = MfccExtractor::new(&cfg, 8000).unwrap();
    let samples: Vec<f64> = (0..8000).map(|n| 0.5 * (2.0 * PI * 1000.0 * n as f64 / 8000.0).sin()).collect();
    let loge = ex.log_energies(&samples).unwrap();

    // triangle weight at 1 kHz from the mel center layout alone
    let k = cfg.num_filters;
    let top = hz_to_mel(4000.0);
    let hz = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let edge = |i: usize| hz(top * i as f64 / (k + 1) as f64);
    let weight = |i: usize| {
        let (lo, mid, hi) = (edge(i), edge(i + 1), edge(i + 2));
        if 1000.0 > lo && 1000.0 <= mid {
            (1000.0 - lo) / (mid - lo)
        } else if 1000.0 > mid && 1000.0 < hi {
            (hi - 1000.0) / (hi - mid)
        } else {
            0.0
        }
    };
    let expected = (0..k).max_by(|&a, &b| weight(a).total_cmp(&weight(b))).unwrap();
    for t in 0..loge.cols() {
        let col = loge.col(t);
        let got = (0..k).max_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
        assert_eq!(got, expected, "frame {t}");
    }
}

#[test]
fn euclidean_matches_a_plain_loop() {
    let mut r = rng(8);
    for _ in 0..200 {
        let d = r.random_range(1..50);
        let x: Vec<f64> = (0..d).map(|_| r.random_range(-100.0..100.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| r.random_range(-100.0..100.0)).collect();
        let mut acc = 0.0;
        for i in 0..d {
            let t = x[i] - y[i];
            acc += t * t;
        }
        let want = acc.sqrt();
        assert!((euclidean(&x, &y).unwrap() - want).abs() <= 1e-12 * want.max(1.0));
    }
}

#[test]
fn separated_clusters_are_learned_exactly() {
    let ds = clustered(&mut rng(13), 3, 5, 10, 10.0);
    let m = train_multiclass(&ds, &SvmParams::default()).unwrap();
    assert_eq!(m.num_machines(), 10);
    for (i, col) in ds.features().columns().enumerate() {
        assert_eq!(predict_multiclass(&m, col).unwrap().label, ds.labels()[i]);
    }
}

fn constant_machine(positive: usize, negative: usize, bias: f64) -> PairMachine {
    PairMachine {
        positive,
        negative,
        machine: BinarySvm {
            // one inert support vector: f(x) = bias everywhere
            support_vectors: Matrix::zeros(1, 1),
            dual_coefs: vec![0.0],
            bias,
            kernel: KernelSpec::Linear,
            c: 1.0,
            support_indices: vec![0],
        },
    }
}

#[test]
fn cyclic_vote_tie_goes_to_the_largest_score_sum_in_any_order() {
    // 0 beats 1, 1 beats 2, 2 beats 0: one vote each
    let mut pairs = vec![
        constant_machine(0, 1, 0.3),
        constant_machine(1, 2, 0.5),
        constant_machine(0, 2, -0.9),
    ];
    let mut r = rng(1);
    for _ in 0..6 {
        pairs.shuffle(&mut r);
        let m = SvmModel {
            num_classes: 3,
            trained_classes: vec![0, 1, 2],
            pairs: pairs.clone(),
        };
        let p = predict_multiclass(&m, &[0.0]).unwrap();
        assert_eq!(p.votes, vec![1, 1, 1]);
        assert_eq!(p.label, 2);
    }
}

#[test]
fn shuffled_labels_fall_to_chance() {
    let mut accs = Vec::new();
    for seed in 0..5 {
        let mut r = rng(100 + seed);
        let ds = clustered(&mut r, 3, 5, 10, 10.0);
        let mut labels = ds.labels().to_vec();
        labels.shuffle(&mut r);
        let shuffled = LabeledDataset::from_parts(ds.features().clone(), labels).unwrap();
        accs.push(cross_validate(&shuffled, &SvmParams { c: 5.0, ..SvmParams::default() }, 5, seed).unwrap());
    }
    let mean = accs.iter().sum::<f64>() / accs.len() as f64;
    assert!((10.0..=30.0).contains(&mean), "mean accuracy {mean}% over {accs:?}");
}

fn enrolled(seed: u64) -> (SystemModel, SyntheticCorpus) {
    let c = corpus(&CorpusSpec::default(), seed).unwrap();
    let mut e = Enrollment::new();
    for k in &c.clients {
        e.enroll(&k.name, k.faces.clone(), k.voices.clone()).unwrap();
    }
    (e.fit(&PipelineConfig::default()).unwrap(), c)
}

#[test]
fn five_client_enrollment_shapes() {
    let (m, _) = enrolled(42);
    assert_eq!(m.num_clients(), 5);
    assert_eq!(m.voice_svm.num_machines(), 10);
    assert_eq!(m.face_lda.retained(), 4);
    assert_eq!(m.voice_lda.retained(), 4);
    assert_eq!(m.templates.len(), 5);
    assert_eq!(m.face_gallery.points().cols(), 20);
}

#[test]
fn noise_image_with_silence_is_rejected() {
    let (m, _) = enrolled(42);
    let mut r = rng(77);
    let face = ImageRecord::new(16, 16, (0..256).map(|_| r.random::<u8>()).collect()).unwrap();
    let silence = AudioRecord::new(8000, vec![0.0; 4000]).unwrap();
    let d = m.identify(&face, &silence).unwrap();
    assert!(d.face_distance > m.thresholds.tau_dist);
    assert!(!d.accepted(), "{d}");
}

#[test]
fn midpoint_threshold_separates_genuine_from_impostor_claims() {
    let (m, c) = enrolled(42);
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    for k in &c.clients {
        for (f, v) in k.probe_faces.iter().zip(&k.probe_voices) {
            for other in &c.clients {
                let s = m.verify(f, v, &other.name).unwrap().fused_score;
                if other.name == k.name {
                    genuine.push(s);
                } else {
                    impostor.push(s);
                }
            }
        }
    }
    let lo = genuine.iter().copied().fold(f64::MAX, f64::min);
    let hi = impostor.iter().copied().fold(f64::MIN, f64::max);
    assert!(lo > hi, "genuine min {lo} below impostor max {hi}");
    let m = m.clone().with_thresholds(Thresholds { tau_fused: 0.5 * (lo + hi), ..m.thresholds });
    for k in &c.clients {
        for (f, v) in k.probe_faces.iter().zip(&k.probe_voices) {
            for other in &c.clients {
                let d = m.verify(f, v, &other.name).unwrap();
                assert_eq!(d.accepted(), other.name == k.name, "{d}");
            }
        }
    }
}

#[test]
fn refitting_writes_the_same_model_file() {
    let (a, _) = enrolled(42);
    let (b, _) = enrolled(42);
    assert_eq!(encode(&a), encode(&b));
}
