//! Browser bindings for three small demos: the MFCC front end on a synthetic
//! voice, PCA versus LDA projections of synthetic faces, and the decision
//! regions of a one-vs-one RBF SVM on clicked points.
//!
//! Every export takes and returns plain numbers and vectors so the same
//! functions run natively under `cargo test`.

use biomm::ingest::{image_to_vector, LabeledDataset};
use biomm::linalg::Matrix;
use biomm::mfcc::{MfccConfig, MfccExtractor};
use biomm::pipeline::{face_features, FaceChain, PipelineConfig};
use biomm::svm::{predict_multiclass, train_multiclass, KernelSpec, SvmParams};
use biomm::synth::{face_prototype, face_sample, utterance, Formant, VoiceSignature};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

const SAMPLE_RATE: u32 = 8000;
const FACE_SIDE: usize = 16;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Log mel energies and cepstra of one synthetic utterance.
#[wasm_bindgen]
pub struct Spectrogram {
    frames: usize,
    filters: usize,
    num_ceps: usize,
    log_mel: Vec<f64>,
    cepstra: Vec<f64>,
    summary: Vec<f64>,
    waveform: Vec<f64>,
}

#[wasm_bindgen]
impl Spectrogram {
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn filters(&self) -> usize {
        self.filters
    }

    #[wasm_bindgen(js_name = numCeps)]
    pub fn num_ceps(&self) -> usize {
        self.num_ceps
    }

    /// Frame-major `frames × filters`.
    #[wasm_bindgen(js_name = logMel)]
    pub fn log_mel(&self) -> Vec<f64> {
        self.log_mel.clone()
    }

    /// Frame-major `frames × num_ceps`.
    pub fn cepstra(&self) -> Vec<f64> {
        self.cepstra.clone()
    }

    /// Means then standard deviations of the cepstra.
    pub fn summary(&self) -> Vec<f64> {
        self.summary.clone()
    }

    pub fn waveform(&self) -> Vec<f64> {
        self.waveform.clone()
    }
}

/// Synthesize a three-formant utterance and run it through the MFCC chain.
#[wasm_bindgen(js_name = voiceSpectrogram)]
pub fn voice_spectrogram(
    seed: u32,
    f1: f64,
    f2: f64,
    f3: f64,
    secs: f64,
    num_filters: usize,
    num_ceps: usize,
) -> Result<Spectrogram, String> {
    if !(secs > 0.03 && secs <= 5.0) {
        return Err(format!("duration must be in (0.03, 5] s, got {secs}"));
    }
    let sig = VoiceSignature {
        formants: [f1, f2, f3]
            .iter()
            .map(|&freq_hz| Formant {
                freq_hz,
                bandwidth_hz: 100.0,
                gain: 1.0,
            })
            .collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let audio = utterance(&sig, &mut rng, SAMPLE_RATE, secs, 0.0, 0.0);
    let cfg = MfccConfig {
        num_filters,
        num_ceps,
        ..MfccConfig::default()
    };
    let ex = MfccExtractor::new(&cfg, SAMPLE_RATE).map_err(fail)?;
    let loge = ex.log_energies(&audio.samples).map_err(fail)?;
    let feats = ex.extract(&audio.samples).map_err(fail)?;
    Ok(Spectrogram {
        frames: loge.cols(),
        filters: loge.rows(),
        num_ceps,
        log_mel: loge.as_slice().to_vec(),
        cepstra: feats.frames.as_slice().to_vec(),
        summary: feats.summary.into_inner(),
        waveform: audio.samples,
    })
}

/// Two-dimensional views of the same synthetic faces.
#[wasm_bindgen]
pub struct Projection {
    labels: Vec<u32>,
    pca: Vec<f64>,
    lda: Vec<f64>,
    pca_ratio: f64,
    lda_ratio: f64,
}

#[wasm_bindgen]
impl Projection {
    pub fn labels(&self) -> Vec<u32> {
        self.labels.clone()
    }

    /// Interleaved `x, y` per sample on the two leading principal axes.
    pub fn pca(&self) -> Vec<f64> {
        self.pca.clone()
    }

    /// Interleaved `x, y` per sample on the two leading discriminant axes.
    pub fn lda(&self) -> Vec<f64> {
        self.lda.clone()
    }

    /// Between- over within-class scatter trace of the PCA view.
    #[wasm_bindgen(js_name = pcaRatio)]
    pub fn pca_ratio(&self) -> f64 {
        self.pca_ratio
    }

    #[wasm_bindgen(js_name = ldaRatio)]
    pub fn lda_ratio(&self) -> f64 {
        self.lda_ratio
    }
}

fn first_two(v: &[f64]) -> [f64; 2] {
    [v[0], v.get(1).copied().unwrap_or(0.0)]
}

/// `tr(S_B) / tr(S_W)` of interleaved 2-D points.
fn separation(xy: &[f64], labels: &[u32], classes: usize) -> f64 {
    let n = labels.len();
    let mut sums = vec![[0.0; 2]; classes];
    let mut counts = vec![0usize; classes];
    for (i, &l) in labels.iter().enumerate() {
        sums[l as usize][0] += xy[2 * i];
        sums[l as usize][1] += xy[2 * i + 1];
        counts[l as usize] += 1;
    }
    let means: Vec<[f64; 2]> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| [s[0] / c as f64, s[1] / c as f64])
        .collect();
    let grand = [
        xy.iter().step_by(2).sum::<f64>() / n as f64,
        xy.iter().skip(1).step_by(2).sum::<f64>() / n as f64,
    ];
    let between: f64 = means
        .iter()
        .zip(&counts)
        .map(|(m, &c)| c as f64 * ((m[0] - grand[0]).powi(2) + (m[1] - grand[1]).powi(2)))
        .sum();
    let within: f64 = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let m = means[l as usize];
            (xy[2 * i] - m[0]).powi(2) + (xy[2 * i + 1] - m[1]).powi(2)
        })
        .sum();
    if within > 0.0 {
        between / within
    } else {
        f64::INFINITY
    }
}

/// Generate `clients × faces_per_client` noisy faces and project them.
#[wasm_bindgen(js_name = faceProjection)]
pub fn face_projection(
    seed: u32,
    clients: usize,
    faces_per_client: usize,
    pixel_noise: f64,
) -> Result<Projection, String> {
    if !(2..=12).contains(&clients) || !(2..=20).contains(&faces_per_client) {
        return Err("need 2-12 clients with 2-20 faces each".into());
    }
    if !(0.0..=128.0).contains(&pixel_noise) {
        return Err(format!("pixel noise must be in [0, 128], got {pixel_noise}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let mut faces = Vec::new();
    let mut labels = Vec::new();
    for k in 0..clients {
        let proto = face_prototype(&mut rng, FACE_SIDE, FACE_SIDE);
        for _ in 0..faces_per_client {
            faces.push(face_sample(&proto, &mut rng, pixel_noise));
            labels.push(k);
        }
    }
    let refs: Vec<_> = faces.iter().collect();
    let (x, _, _) = face_features(&refs).map_err(fail)?;
    let ds = LabeledDataset::from_parts(x, labels.clone()).map_err(fail)?;
    let chain = FaceChain::fit(&ds, &PipelineConfig::default()).map_err(fail)?;

    let mut pca = Vec::with_capacity(2 * faces.len());
    let mut lda = Vec::with_capacity(2 * faces.len());
    for f in &faces {
        let v = image_to_vector(f);
        let p = chain.pca.project(&v).map_err(fail)?;
        pca.extend(first_two(&p));
        lda.extend(first_two(&chain.lda.project(&p).map_err(fail)?));
    }
    let labels: Vec<u32> = labels.iter().map(|&l| l as u32).collect();
    Ok(Projection {
        pca_ratio: separation(&pca, &labels, clients),
        lda_ratio: separation(&lda, &labels, clients),
        labels,
        pca,
        lda,
    })
}

/// Predicted class over a square grid covering `[0, 1]²`.
#[wasm_bindgen]
pub struct DecisionGrid {
    resolution: usize,
    cells: Vec<u32>,
    support_vectors: usize,
    train_accuracy: f64,
}

#[wasm_bindgen]
impl DecisionGrid {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Row-major, row 0 at `y = 0`.
    pub fn cells(&self) -> Vec<u32> {
        self.cells.clone()
    }

    #[wasm_bindgen(js_name = supportVectors)]
    pub fn support_vectors(&self) -> usize {
        self.support_vectors
    }

    #[wasm_bindgen(js_name = trainAccuracy)]
    pub fn train_accuracy(&self) -> f64 {
        self.train_accuracy
    }
}

/// Train on points in the unit square and label every grid cell center.
#[wasm_bindgen(js_name = svmDecisionGrid)]
pub fn svm_decision_grid(
    xs: Vec<f64>,
    ys: Vec<f64>,
    labels: Vec<u32>,
    c: f64,
    gamma: f64,
    resolution: usize,
) -> Result<DecisionGrid, String> {
    if xs.len() != ys.len() || xs.len() != labels.len() {
        return Err("xs, ys and labels must have equal length".into());
    }
    if !(2..=400).contains(&resolution) {
        return Err(format!("resolution must be in [2, 400], got {resolution}"));
    }
    let present = {
        let mut l = labels.clone();
        l.sort_unstable();
        l.dedup();
        l
    };
    if present.len() < 2 {
        return Err("place points of at least two classes".into());
    }
    // compact ids so absent classes do not get machines
    let ids: Vec<usize> = labels
        .iter()
        .map(|l| present.binary_search(l).expect("present"))
        .collect();
    let cols: Vec<[f64; 2]> = xs.iter().zip(&ys).map(|(&x, &y)| [x, y]).collect();
    let ds = LabeledDataset::from_parts(Matrix::from_columns(&cols).map_err(fail)?, ids.clone())
        .map_err(fail)?;
    let params = SvmParams {
        kernel: KernelSpec::rbf(gamma).map_err(fail)?,
        c,
        ..SvmParams::default()
    };
    let model = train_multiclass(&ds, &params).map_err(fail)?;

    let predict = |x: f64, y: f64| predict_multiclass(&model, &[x, y]).map(|p| p.label);
    let mut correct = 0;
    for (col, &l) in cols.iter().zip(&ids) {
        if predict(col[0], col[1]).map_err(fail)? == l {
            correct += 1;
        }
    }
    let mut cells = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        let y = (row as f64 + 0.5) / resolution as f64;
        for col in 0..resolution {
            let x = (col as f64 + 0.5) / resolution as f64;
            cells.push(present[predict(x, y).map_err(fail)?]);
        }
    }
    let mut sv: Vec<usize> = model
        .pairs
        .iter()
        .flat_map(|p| p.machine.support_indices.iter().copied())
        .collect();
    sv.sort_unstable();
    sv.dedup();
    Ok(DecisionGrid {
        resolution,
        cells,
        support_vectors: sv.len(),
        train_accuracy: correct as f64 / ids.len() as f64,
    })
}
