//! Loaders for binary PGM images, 16-bit mono PCM WAV audio and TAB-separated
//! label manifests, plus the `LabeledDataset` container and stratified splits.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Sample rates accepted by the audio loader.
pub const SUPPORTED_SAMPLE_RATES: [u32; 4] = [8000, 16000, 22050, 44100];

/// 8-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageRecord {
    pub width: usize,
    pub height: usize,
    pub gray: Vec<u8>,
}

impl ImageRecord {
    pub fn new(width: usize, height: usize, gray: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || width * height != gray.len() {
            return Err(Error::dim(format!(
                "{width}x{height} image with {} pixels",
                gray.len()
            )));
        }
        Ok(ImageRecord {
            width,
            height,
            gray,
        })
    }
}

/// Mono audio with samples normalized to [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct AudioRecord {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
}

impl AudioRecord {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self> {
        if !SUPPORTED_SAMPLE_RATES.contains(&sample_rate) {
            return Err(Error::UnsupportedFormat(format!(
                "sample rate {sample_rate} Hz (supported: 8000, 16000, 22050, 44100)"
            )));
        }
        if samples.iter().any(|s| !s.is_finite() || s.abs() > 1.0) {
            return Err(Error::domain("audio samples must lie in [-1, 1]"));
        }
        Ok(AudioRecord {
            sample_rate,
            samples,
        })
    }

    /// Build from signed 16-bit PCM values (each divided by 32768).
    pub fn from_pcm16(sample_rate: u32, pcm: &[i16]) -> Result<Self> {
        AudioRecord::new(sample_rate, pcm.iter().map(|&v| v as f64 / 32768.0).collect())
    }

    /// Quantize back to 16-bit PCM, saturating at the integer range.
    pub fn to_pcm16(&self) -> Vec<i16> {
        self.samples
            .iter()
            .map(|&s| (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16)
            .collect()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Feature matrix (one column per sample) with contiguous 0-based class ids.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    features: Matrix,
    labels: Vec<usize>,
    class_names: Vec<String>,
    sample_ids: Vec<String>,
}

impl LabeledDataset {
    pub fn new(
        features: Matrix,
        labels: Vec<usize>,
        class_names: Vec<String>,
        sample_ids: Vec<String>,
    ) -> Result<Self> {
        if labels.len() != features.cols() || sample_ids.len() != features.cols() {
            return Err(Error::dim(format!(
                "{} columns, {} labels, {} sample ids",
                features.cols(),
                labels.len(),
                sample_ids.len()
            )));
        }
        let c = class_names.len();
        let mut seen = vec![false; c];
        for &l in &labels {
            if l >= c {
                return Err(Error::Class(format!("label {l} outside [0, {c})")));
            }
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Class(format!(
                "class {missing} ({}) has no samples",
                class_names[missing]
            )));
        }
        Ok(LabeledDataset {
            features,
            labels,
            class_names,
            sample_ids,
        })
    }

    /// Dataset with generated class names ("class0", ...) and sample ids ("s0", ...).
    pub fn from_parts(features: Matrix, labels: Vec<usize>) -> Result<Self> {
        let c = labels.iter().max().map_or(0, |m| m + 1);
        let names = (0..c).map(|i| format!("class{i}")).collect();
        let ids = (0..labels.len()).map(|i| format!("s{i}")).collect();
        LabeledDataset::new(features, labels, names, ids)
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn num_samples(&self) -> usize {
        self.features.cols()
    }

    pub fn dim(&self) -> usize {
        self.features.rows()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Column indices per class, in dataset order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut idx = vec![Vec::new(); self.num_classes()];
        for (i, &l) in self.labels.iter().enumerate() {
            idx[l].push(i);
        }
        idx
    }

    /// Subset keeping the full class-name table; every class must remain present.
    pub fn select(&self, idx: &[usize]) -> Result<LabeledDataset> {
        LabeledDataset::new(
            self.features.select_columns(idx)?,
            idx.iter().map(|&i| self.labels[i]).collect(),
            self.class_names.clone(),
            idx.iter().map(|&i| self.sample_ids[i].clone()).collect(),
        )
    }

    /// Same labels and ids, new feature matrix (e.g. after projection).
    pub fn with_features(&self, features: Matrix) -> Result<LabeledDataset> {
        LabeledDataset::new(
            features,
            self.labels.clone(),
            self.class_names.clone(),
            self.sample_ids.clone(),
        )
    }
}

/// Stratified, seeded train/test split. Both sides contain every class.
pub fn split(
    ds: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!(
            "split fraction must be in (0, 1), got {fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut members) in ds.class_indices().into_iter().enumerate() {
        let n = members.len();
        if n < 2 {
            return Err(Error::Stratification(format!(
                "class {} has {n} sample(s); at least 2 are needed",
                ds.class_names[class]
            )));
        }
        members.shuffle(&mut rng);
        let n_train = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select(&train)?, ds.select(&test)?))
}

/// Row-major flattening of the pixel grid; values are not rescaled.
pub fn image_to_vector(img: &ImageRecord) -> Vector {
    Vector::new(img.gray.iter().map(|&g| g as f64).collect())
}

/// Inverse of [`image_to_vector`], rounding and clamping to [0, 255].
pub fn vector_to_image(v: &[f64], width: usize, height: usize) -> Result<ImageRecord> {
    ImageRecord::new(
        width,
        height,
        v.iter().map(|x| x.round().clamp(0.0, 255.0) as u8).collect(),
    )
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<ImageRecord> {
    parse_pgm(&read_file(path.as_ref())?)
}

/// Parse a binary ("P5") PGM.
pub fn parse_pgm(bytes: &[u8]) -> Result<ImageRecord> {
    if bytes.len() < 2 {
        return Err(Error::format("magic", "file too short"));
    }
    match &bytes[..2] {
        b"P5" => {}
        b"P2" => {
            return Err(Error::format(
                "magic",
                "ASCII PGM (P2) is not supported; only binary P5",
            ))
        }
        other => {
            return Err(Error::format(
                "magic",
                format!("expected P5, found {:?}", String::from_utf8_lossy(other)),
            ))
        }
    }
    let mut pos = 2;
    let mut header = [0usize; 3];
    for (slot, field) in header.iter_mut().zip(["width", "height", "maxval"]) {
        *slot = next_header_int(bytes, &mut pos, field)?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 {
        return Err(Error::format("width", "image dimensions must be positive"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::format(
            "maxval",
            format!("{maxval} (must be in 1..=255)"),
        ));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format("raster", "missing whitespace after maxval")),
    }
    let n = width * height;
    let raster = &bytes[pos..];
    if raster.len() < n {
        return Err(Error::format(
            "raster",
            format!("truncated payload: {} of {n} bytes", raster.len()),
        ));
    }
    ImageRecord::new(width, height, raster[..n].to_vec())
}

fn next_header_int(bytes: &[u8], pos: &mut usize, field: &str) -> Result<usize> {
    loop {
        match bytes.get(*pos) {
            None => return Err(Error::format(field, "unexpected end of header")),
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| b.is_ascii_digit()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::format(field, "expected a decimal integer"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format(field, "integer out of range"))
}

pub fn encode_pgm(img: &ImageRecord) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.gray);
    out
}

pub fn save_pgm(img: &ImageRecord, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_pgm(img))
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioRecord> {
    parse_wav(&read_file(path.as_ref())?)
}

fn le_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn le_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Parse a RIFF/WAVE file holding 16-bit mono PCM.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioRecord> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::format("riff", "not a RIFF/WAVE file"));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = le_u32(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| {
                Error::format(
                    String::from_utf8_lossy(id).trim().to_string(),
                    "chunk extends past end of file",
                )
            })?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(Error::format("fmt", "chunk shorter than 16 bytes"));
                }
                fmt = Some((
                    le_u16(body, 0),
                    le_u16(body, 2),
                    le_u32(body, 4),
                    le_u16(body, 14),
                ));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        pos = body_end + (size & 1);
    }
    let (format_code, channels, sample_rate, bits) =
        fmt.ok_or_else(|| Error::format("fmt", "missing fmt chunk"))?;
    if format_code != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "WAV format code {format_code} (only PCM = 1)"
        )));
    }
    if channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{channels} channels (only mono)"
        )));
    }
    if bits != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "{bits}-bit samples (only 16-bit)"
        )));
    }
    let data = data.ok_or_else(|| Error::format("data", "missing data chunk"))?;
    let pcm: Vec<i16> = data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]))
        .collect();
    AudioRecord::from_pcm16(sample_rate, &pcm)
}

pub fn encode_wav(audio: &AudioRecord) -> Vec<u8> {
    let pcm = audio.to_pcm16();
    let data_len = (pcm.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + pcm.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&audio.sample_rate.to_le_bytes());
    out.extend_from_slice(&(audio.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in pcm {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn save_wav(audio: &AudioRecord, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_wav(audio))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path as written in the manifest.
    pub path: PathBuf,
    pub class_name: String,
}

/// Parsed label manifest. Class ids are assigned by first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub base_dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
    pub class_names: Vec<String>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_id(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }

    pub fn labels(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|e| self.class_id(&e.class_name).expect("class registered at parse"))
            .collect()
    }

    /// Entry path resolved against the manifest's directory.
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.base_dir.join(&entry.path)
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::format("manifest", "file is not valid UTF-8"))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest(&text, base)
}

pub fn parse_manifest(text: &str, base_dir: impl Into<PathBuf>) -> Result<Manifest> {
    let mut entries = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (p, class) = line.split_once('\t').ok_or_else(|| {
            Error::format(
                format!("manifest line {}", lineno + 1),
                "expected <path><TAB><class_name>",
            )
        })?;
        if p.is_empty() || class.is_empty() {
            return Err(Error::format(
                format!("manifest line {}", lineno + 1),
                "empty path or class name",
            ));
        }
        if let Some(first) = seen.insert(p.to_string(), lineno + 1) {
            return Err(Error::Manifest(format!(
                "duplicate sample path {p:?} on lines {first} and {}",
                lineno + 1
            )));
        }
        if !class_names.iter().any(|c| c == class) {
            class_names.push(class.to_string());
        }
        entries.push(ManifestEntry {
            path: PathBuf::from(p),
            class_name: class.to_string(),
        });
    }
    if entries.is_empty() {
        return Err(Error::Manifest("manifest has no entries".into()));
    }
    Ok(Manifest {
        base_dir: base_dir.into(),
        entries,
        class_names,
    })
}

/// Load every image listed in a manifest into a dataset (one column per image).
pub fn load_image_dataset(manifest: &Manifest) -> Result<(LabeledDataset, usize, usize)> {
    let mut cols = Vec::with_capacity(manifest.len());
    let mut dims: Option<(usize, usize)> = None;
    for e in &manifest.entries {
        let img = load_pgm(manifest.resolve(e))?;
        match dims {
            None => dims = Some((img.width, img.height)),
            Some((w, h)) if (w, h) != (img.width, img.height) => {
                return Err(Error::dim(format!(
                    "{} is {}x{}, expected {w}x{h}",
                    e.path.display(),
                    img.width,
                    img.height
                )))
            }
            Some(_) => {}
        }
        cols.push(image_to_vector(&img).into_inner());
    }
    let (w, h) = dims.expect("manifest is non-empty");
    let ds = LabeledDataset::new(
        Matrix::from_columns(&cols)?,
        manifest.labels(),
        manifest.class_names.clone(),
        manifest
            .entries
            .iter()
            .map(|e| e.path.display().to_string())
            .collect(),
    )?;
    Ok((ds, w, h))
}
