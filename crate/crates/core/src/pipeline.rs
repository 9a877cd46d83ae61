//! Enrollment, identification and verification over both modalities.
//!
//! Each modality yields a score in [0, 1]: `1/(1 + d)` for the face gallery
//! distance and a vote fraction for the voice machines. The scores are fused
//! as `w·face + (1 − w)·voice`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ingest::{image_to_vector, AudioRecord, ImageRecord, LabeledDataset};
use crate::knn::KnnModel;
use crate::lda::fit_lda_with_defaults;
use crate::linalg::{Matrix, Vector};
use crate::mfcc::{MfccConfig, MfccExtractor};
use crate::pca::{fit_pca, fit_pca_fisherface, Subspace};
use crate::svm::{predict_multiclass, stratified_folds, train_multiclass, SvmModel, SvmParams};

/// Upper bound on calibration folds.
pub const CALIBRATION_FOLDS: usize = 5;
/// Percentile of genuine face distances used as the rejection distance.
pub const DIST_PERCENTILE: f64 = 99.0;
/// Percentile of genuine fused scores used as the acceptance threshold.
pub const FUSED_PERCENTILE: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// `None`: `p − C` components.
    pub pca_retained: Option<usize>,
    /// `None`: `C − 1` components.
    pub lda_retained: Option<usize>,
    /// `None`: `1e-6 · trace(S_W) / d`.
    pub reg: Option<f64>,
    pub knn_k: usize,
    pub mfcc: MfccConfig,
    pub svm: SvmParams,
    pub w_face: f64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            pca_retained: None,
            lda_retained: None,
            reg: None,
            knn_k: 2,
            mfcc: MfccConfig::default(),
            svm: SvmParams::default(),
            w_face: 0.5,
            seed: 42,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.w_face) {
            return Err(Error::domain(format!("w_face must be in [0, 1], got {}", self.w_face)));
        }
        if self.knn_k == 0 {
            return Err(Error::domain("knn k must be at least 1"));
        }
        if let Some(r) = self.reg {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(Error::domain(format!("reg must be >= 0, got {r}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiometricTemplate {
    pub client_id: String,
    /// Mean of the client's gallery points in face LDA space.
    pub face_coords: Vector,
    pub voice_class_id: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Face mean distance above which a probe may be rejected as unknown.
    pub tau_dist: f64,
    /// Fused score needed for acceptance.
    pub tau_fused: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemModel {
    pub image_width: usize,
    pub image_height: usize,
    pub face_pca: Subspace,
    pub face_lda: Subspace,
    pub face_gallery: KnnModel,
    pub mfcc: MfccConfig,
    pub voice_lda: Subspace,
    pub voice_svm: SvmModel,
    pub templates: Vec<BiometricTemplate>,
    pub thresholds: Thresholds,
    pub w_face: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Identification,
    Verification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept(String),
    Reject,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    pub mode: Mode,
    pub claimed_id: Option<String>,
    pub face_score: f64,
    pub voice_score: f64,
    pub fused_score: f64,
    pub verdict: Verdict,
    /// Client chosen by each modality alone (the claimed client when verifying).
    pub face_client: String,
    pub voice_client: String,
    pub face_distance: f64,
}

impl Decision {
    pub fn accepted(&self) -> bool {
        matches!(self.verdict, Verdict::Accept(_))
    }

    pub fn modalities_agree(&self) -> bool {
        self.face_client == self.voice_client
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Accept(id) => write!(f, "verdict=accept id={id}")?,
            Verdict::Reject => write!(f, "verdict=reject id=unknown")?,
        }
        if let Some(c) = &self.claimed_id {
            write!(f, " claimed={c}")?;
        }
        write!(
            f,
            " fused={:.6} face={:.6} voice={:.6} face_id={} voice_id={} agree={} distance={:.6}",
            self.fused_score,
            self.face_score,
            self.voice_score,
            self.face_client,
            self.voice_client,
            self.modalities_agree(),
            self.face_distance
        )
    }
}

pub fn fuse(w_face: f64, face_score: f64, voice_score: f64) -> f64 {
    w_face * face_score + (1.0 - w_face) * voice_score
}

pub fn distance_score(d: f64) -> f64 {
    1.0 / (1.0 + d)
}

/// Linear-interpolated percentile of unsorted values.
pub fn percentile(values: &[f64], pct: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty set");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = pct.clamp(0.0, 100.0) / 100.0 * (v.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    v[lo] + (rank - lo as f64) * (v[hi] - v[lo])
}

/// PCA → LDA → nearest-neighbor gallery.
#[derive(Clone, Debug)]
pub struct FaceChain {
    pub pca: Subspace,
    pub lda: Subspace,
    pub gallery: KnnModel,
}

impl FaceChain {
    pub fn fit(ds: &LabeledDataset, cfg: &PipelineConfig) -> Result<Self> {
        let pca = match cfg.pca_retained {
            Some(r) => fit_pca(ds, r)?,
            None => fit_pca_fisherface(ds)?,
        };
        let reduced = pca.project_dataset(ds)?;
        let lda = fit_lda_with_defaults(&reduced, cfg.lda_retained, cfg.reg)?.subspace;
        let coords = lda.project_columns(reduced.features())?;
        let gallery = KnnModel::new(coords, ds.labels().to_vec(), cfg.knn_k)?;
        Ok(FaceChain { pca, lda, gallery })
    }

    pub fn embed(&self, x: &[f64]) -> Result<Vector> {
        self.lda.project(&self.pca.project(x)?)
    }
}

/// LDA → one-vs-one SVM.
#[derive(Clone, Debug)]
pub struct VoiceChain {
    pub lda: Subspace,
    pub svm: SvmModel,
}

impl VoiceChain {
    pub fn fit(ds: &LabeledDataset, cfg: &PipelineConfig) -> Result<Self> {
        let lda = fit_lda_with_defaults(ds, cfg.lda_retained, cfg.reg)?.subspace;
        let projected = lda.project_dataset(ds)?;
        let svm = train_multiclass(&projected, &cfg.svm)?;
        Ok(VoiceChain { lda, svm })
    }

    pub fn embed(&self, summary: &[f64]) -> Result<Vector> {
        self.lda.project(summary)
    }
}

/// MFCC summary vectors, one extractor per distinct sample rate.
pub fn voice_features(voices: &[&AudioRecord], cfg: &MfccConfig) -> Result<Matrix> {
    let mut extractors: BTreeMap<u32, MfccExtractor> = BTreeMap::new();
    let mut cols = Vec::with_capacity(voices.len());
    for a in voices {
        if !extractors.contains_key(&a.sample_rate) {
            extractors.insert(a.sample_rate, MfccExtractor::new(cfg, a.sample_rate)?);
        }
        cols.push(extractors[&a.sample_rate].extract(&a.samples)?.summary.into_inner());
    }
    Matrix::from_columns(&cols)
}

pub fn face_features(faces: &[&ImageRecord]) -> Result<(Matrix, usize, usize)> {
    let first = faces
        .first()
        .ok_or_else(|| Error::Enrollment("no face images".into()))?;
    let (w, h) = (first.width, first.height);
    if let Some(bad) = faces.iter().find(|f| f.width != w || f.height != h) {
        return Err(Error::dim(format!(
            "face images of {}x{} and {}x{} in one gallery",
            w, h, bad.width, bad.height
        )));
    }
    let cols: Vec<Vec<f64>> = faces.iter().map(|f| image_to_vector(f).into_inner()).collect();
    Ok((Matrix::from_columns(&cols)?, w, h))
}

#[derive(Clone, Debug)]
struct EnrolledClient {
    id: String,
    faces: Vec<ImageRecord>,
    voices: Vec<AudioRecord>,
}

/// Batch enrollment: collect every client, then [`Enrollment::fit`] once.
#[derive(Clone, Debug, Default)]
pub struct Enrollment {
    clients: Vec<EnrolledClient>,
}

impl Enrollment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enroll(
        &mut self,
        client_id: &str,
        faces: Vec<ImageRecord>,
        voices: Vec<AudioRecord>,
    ) -> Result<()> {
        if client_id.is_empty() || client_id.chars().any(char::is_whitespace) {
            return Err(Error::Enrollment(format!(
                "client id {client_id:?} must be non-empty without whitespace"
            )));
        }
        if self.clients.iter().any(|c| c.id == client_id) {
            return Err(Error::Enrollment(format!("client {client_id} is already enrolled")));
        }
        if faces.len() < 2 || voices.len() < 2 {
            return Err(Error::Enrollment(format!(
                "client {client_id} needs at least 2 face images and 2 recordings, got {} and {}",
                faces.len(),
                voices.len()
            )));
        }
        self.clients.push(EnrolledClient {
            id: client_id.to_string(),
            faces,
            voices,
        });
        Ok(())
    }

    pub fn num_clients(&self) -> usize {
        self.clients.len()
    }

    fn datasets(&self, cfg: &PipelineConfig) -> Result<(LabeledDataset, LabeledDataset, usize, usize)> {
        let names: Vec<String> = self.clients.iter().map(|c| c.id.clone()).collect();
        let mut face_refs = Vec::new();
        let mut voice_refs = Vec::new();
        let mut face_labels = Vec::new();
        let mut voice_labels = Vec::new();
        let mut face_ids = Vec::new();
        let mut voice_ids = Vec::new();
        for (k, c) in self.clients.iter().enumerate() {
            for (i, f) in c.faces.iter().enumerate() {
                face_refs.push(f);
                face_labels.push(k);
                face_ids.push(format!("{}/face{i}", c.id));
            }
            for (i, v) in c.voices.iter().enumerate() {
                voice_refs.push(v);
                voice_labels.push(k);
                voice_ids.push(format!("{}/voice{i}", c.id));
            }
        }
        let (fx, w, h) = face_features(&face_refs)?;
        let vx = voice_features(&voice_refs, &cfg.mfcc)?;
        Ok((
            LabeledDataset::new(fx, face_labels, names.clone(), face_ids)?,
            LabeledDataset::new(vx, voice_labels, names, voice_ids)?,
            w,
            h,
        ))
    }

    /// Refit both chains on every enrolled sample and calibrate thresholds.
    pub fn fit(&self, cfg: &PipelineConfig) -> Result<SystemModel> {
        cfg.validate()?;
        if self.clients.len() < 2 {
            return Err(Error::Class(format!(
                "need at least 2 enrolled clients, got {}",
                self.clients.len()
            )));
        }
        let (face_ds, voice_ds, w, h) = self.datasets(cfg)?;
        let face = FaceChain::fit(&face_ds, cfg)?;
        let voice = VoiceChain::fit(&voice_ds, cfg)?;
        let thresholds = calibrate(&face_ds, &voice_ds, cfg)?;

        let coords = face.gallery.points();
        let templates = self
            .clients
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let members: Vec<usize> = (0..coords.cols())
                    .filter(|&i| face.gallery.labels()[i] == k)
                    .collect();
                let mut mean = vec![0.0; coords.rows()];
                for &i in &members {
                    for (m, v) in mean.iter_mut().zip(coords.col(i)) {
                        *m += v;
                    }
                }
                mean.iter_mut().for_each(|m| *m /= members.len() as f64);
                BiometricTemplate {
                    client_id: c.id.clone(),
                    face_coords: Vector::new(mean),
                    voice_class_id: k,
                }
            })
            .collect();

        Ok(SystemModel {
            image_width: w,
            image_height: h,
            face_pca: face.pca,
            face_lda: face.lda,
            face_gallery: face.gallery,
            mfcc: cfg.mfcc.clone(),
            voice_lda: voice.lda,
            voice_svm: voice.svm,
            templates,
            thresholds,
            w_face: cfg.w_face,
        })
    }
}

/// Held-out genuine scores from stratified refits.
///
/// Each sample is scored by chains fitted without it: its face distance to its
/// own class and its voice vote fraction for its own class. When some client
/// has fewer than 3 samples a refit would leave a single sample per class, so
/// the full chains are used instead (face: leave-one-out inside the gallery).
pub fn calibrate(
    face_ds: &LabeledDataset,
    voice_ds: &LabeledDataset,
    cfg: &PipelineConfig,
) -> Result<Thresholds> {
    let (face_d, voice_s) = genuine_scores(face_ds, voice_ds, cfg)?;
    let c = face_ds.num_classes();

    // every same-client pairing of a face score with a voice score
    let mut fused = Vec::new();
    for k in 0..c {
        for (fd, _) in face_d.iter().filter(|(_, l)| *l == k) {
            for (vs, _) in voice_s.iter().filter(|(_, l)| *l == k) {
                fused.push(fuse(cfg.w_face, distance_score(*fd), *vs));
            }
        }
    }
    let dists: Vec<f64> = face_d.iter().map(|(d, _)| *d).collect();
    Ok(Thresholds {
        tau_dist: percentile(&dists, DIST_PERCENTILE),
        tau_fused: percentile(&fused, FUSED_PERCENTILE),
    })
}

type Scored = Vec<(f64, usize)>;

/// Refit folds, or `None` when some class is too small to refit without it.
fn calibration_folds(counts: impl IntoIterator<Item = usize>) -> Option<usize> {
    let min_count = counts.into_iter().min().unwrap_or(0);
    (min_count >= 3).then(|| CALIBRATION_FOLDS.min(min_count))
}

fn genuine_scores(
    face_ds: &LabeledDataset,
    voice_ds: &LabeledDataset,
    cfg: &PipelineConfig,
) -> Result<(Scored, Scored)> {
    let folds = calibration_folds(face_ds.class_counts());
    Ok((face_genuine(face_ds, cfg, folds)?, voice_genuine(voice_ds, cfg)?))
}

/// Rejection distance calibrated on a face dataset alone.
pub fn calibrate_face_distance(face_ds: &LabeledDataset, cfg: &PipelineConfig) -> Result<f64> {
    let folds = calibration_folds(face_ds.class_counts());
    let d: Vec<f64> = face_genuine(face_ds, cfg, folds)?.into_iter().map(|(d, _)| d).collect();
    Ok(percentile(&d, DIST_PERCENTILE))
}

fn face_genuine(ds: &LabeledDataset, cfg: &PipelineConfig, folds: Option<usize>) -> Result<Scored> {
    let mut out = Vec::new();
    match folds {
        None => {
            let chain = FaceChain::fit(ds, cfg)?;
            let coords = chain.gallery.points();
            for (i, &l) in ds.labels().iter().enumerate() {
                out.push((chain.gallery.class_mean_distance(coords.col(i), l, Some(i))?, l));
            }
        }
        Some(folds) => for_each_fold(ds, folds, cfg.seed, |train, test| {
            let chain = FaceChain::fit(train, cfg)?;
            for (i, &l) in test.labels().iter().enumerate() {
                let z = chain.embed(test.features().col(i))?;
                out.push((chain.gallery.class_mean_distance(&z, l, None)?, l));
            }
            Ok(())
        })?,
    }
    Ok(out)
}

/// Vote fractions from the chain fitted on all enrollment voices, the same
/// machines that score probes. Refits on a few utterances per client leave
/// held-out points outside the kernel's reach, where votes follow the biases.
fn voice_genuine(ds: &LabeledDataset, cfg: &PipelineConfig) -> Result<Scored> {
    let chain = VoiceChain::fit(ds, cfg)?;
    ds.labels()
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let z = chain.embed(ds.features().col(i))?;
            Ok((chain.svm.class_vote_fraction(&z, l)?, l))
        })
        .collect()
}

fn for_each_fold(
    ds: &LabeledDataset,
    folds: usize,
    seed: u64,
    mut f: impl FnMut(&LabeledDataset, &LabeledDataset) -> Result<()>,
) -> Result<()> {
    let assignment = stratified_folds(ds.labels(), folds, seed)?;
    for k in 0..folds {
        let (test, train): (Vec<usize>, Vec<usize>) =
            (0..ds.num_samples()).partition(|&i| assignment[i] == k);
        if test.is_empty() {
            continue;
        }
        f(&ds.select(&train)?, &ds.select(&test)?)?;
    }
    Ok(())
}

impl SystemModel {
    pub fn num_clients(&self) -> usize {
        self.templates.len()
    }

    pub fn client_names(&self) -> Vec<&str> {
        self.templates.iter().map(|t| t.client_id.as_str()).collect()
    }

    pub fn client_index(&self, id: &str) -> Option<usize> {
        self.templates.iter().position(|t| t.client_id == id)
    }

    pub fn with_weight(mut self, w_face: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w_face) {
            return Err(Error::domain(format!("w_face must be in [0, 1], got {w_face}")));
        }
        self.w_face = w_face;
        Ok(self)
    }

    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn face_embedding(&self, face: &ImageRecord) -> Result<Vector> {
        if face.width != self.image_width || face.height != self.image_height {
            return Err(Error::dim(format!(
                "probe image is {}x{}, gallery is {}x{}",
                face.width, face.height, self.image_width, self.image_height
            )));
        }
        self.face_lda.project(&self.face_pca.project(&image_to_vector(face))?)
    }

    pub fn voice_embedding(&self, voice: &AudioRecord) -> Result<Vector> {
        let summary = MfccExtractor::new(&self.mfcc, voice.sample_rate)?
            .extract(&voice.samples)?
            .summary;
        self.voice_lda.project(&summary)
    }

    fn name(&self, k: usize) -> String {
        self.templates[k].client_id.clone()
    }

    pub fn identify(&self, face: &ImageRecord, voice: &AudioRecord) -> Result<Decision> {
        let fz = self.face_embedding(face)?;
        let vz = self.voice_embedding(voice)?;
        let fc = self.face_gallery.classify(&fz)?;
        let vp = predict_multiclass(&self.voice_svm, &vz)?;

        let c = self.num_clients();
        let face_score = distance_score(fc.mean_distance);
        let voice_score = vp.votes[vp.label] as f64 / (c - 1) as f64;
        let fused_score = fuse(self.w_face, face_score, voice_score);

        // on disagreement the modality with the larger weighted score wins
        let winner = if fc.label == vp.label
            || self.w_face * face_score >= (1.0 - self.w_face) * voice_score
        {
            fc.label
        } else {
            vp.label
        };
        let reject =
            fc.mean_distance > self.thresholds.tau_dist && fused_score < self.thresholds.tau_fused;
        Ok(Decision {
            mode: Mode::Identification,
            claimed_id: None,
            face_score,
            voice_score,
            fused_score,
            verdict: if reject {
                Verdict::Reject
            } else {
                Verdict::Accept(self.name(winner))
            },
            face_client: self.name(fc.label),
            voice_client: self.name(vp.label),
            face_distance: fc.mean_distance,
        })
    }

    pub fn verify(
        &self,
        face: &ImageRecord,
        voice: &AudioRecord,
        claimed_id: &str,
    ) -> Result<Decision> {
        let k = self
            .client_index(claimed_id)
            .ok_or_else(|| Error::Identity(claimed_id.to_string()))?;
        let fz = self.face_embedding(face)?;
        let vz = self.voice_embedding(voice)?;
        let face_distance = self.face_gallery.class_mean_distance(&fz, k, None)?;
        let face_score = distance_score(face_distance);
        let voice_score = self.voice_svm.class_vote_fraction(&vz, k)?;
        let fused_score = fuse(self.w_face, face_score, voice_score);
        let name = self.name(k);
        Ok(Decision {
            mode: Mode::Verification,
            claimed_id: Some(name.clone()),
            face_score,
            voice_score,
            fused_score,
            verdict: if fused_score >= self.thresholds.tau_fused {
                Verdict::Accept(name.clone())
            } else {
                Verdict::Reject
            },
            face_client: name.clone(),
            voice_client: name,
            face_distance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 100.0), 4.0);
        assert_eq!(percentile(&v, 50.0), 2.5);
        assert_eq!(percentile(&[7.0], 99.0), 7.0);
    }

    #[test]
    fn fusion_is_convex() {
        assert_eq!(fuse(1.0, 0.3, 0.9), 0.3);
        assert_eq!(fuse(0.0, 0.3, 0.9), 0.9);
        assert!((fuse(0.25, 0.2, 0.6) - 0.5).abs() < 1e-15);
        assert_eq!(distance_score(0.0), 1.0);
        assert_eq!(distance_score(1.0), 0.5);
    }

    #[test]
    fn enrollment_errors() {
        let img = ImageRecord::new(2, 2, vec![0; 4]).unwrap();
        let audio = AudioRecord::new(8000, vec![0.0; 800]).unwrap();
        let mut e = Enrollment::new();
        e.enroll("a", vec![img.clone(); 2], vec![audio.clone(); 2]).unwrap();
        assert!(matches!(
            e.enroll("a", vec![img.clone(); 2], vec![audio.clone(); 2]),
            Err(Error::Enrollment(_))
        ));
        assert!(matches!(
            e.enroll("b", vec![img.clone()], vec![audio.clone(); 2]),
            Err(Error::Enrollment(_))
        ));
        assert!(matches!(e.fit(&PipelineConfig::default()), Err(Error::Class(_))));
    }
}
