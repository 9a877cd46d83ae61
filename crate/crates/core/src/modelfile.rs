//! Text serialization of a fitted [`SystemModel`].
//!
//! ```text
//! BIOMM 1
//! SECTION FACE_PCA
//! image_size <width> <height>
//! mean 1 <d>
//! <values>
//! basis <d> <r>
//! <d lines of r values>
//! SECTION FACE_LDA ...
//! ...
//! CRC32 <8 hex digits over every preceding byte>
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, ModelFileError, Result};
use crate::knn::KnnModel;
use crate::linalg::{Matrix, Vector};
use crate::mfcc::MfccConfig;
use crate::pca::{Subspace, SubspaceKind};
use crate::pipeline::{BiometricTemplate, SystemModel, Thresholds};
use crate::svm::{BinarySvm, KernelSpec, PairMachine, SvmModel};

pub const MAGIC: &str = "BIOMM";
pub const VERSION: &str = "1";
pub const SECTIONS: [&str; 7] = [
    "FACE_PCA",
    "FACE_LDA",
    "GALLERY",
    "VOICE_LDA",
    "VOICE_SVM",
    "TEMPLATES",
    "THRESHOLDS",
];

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_matrix(out: &mut String, name: &str, m: &Matrix) {
    let _ = writeln!(out, "{name} {} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| real(m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

fn write_vector(out: &mut String, name: &str, v: &[f64]) {
    let _ = writeln!(out, "{name} 1 {}", v.len());
    let row: Vec<String> = v.iter().map(|&x| real(x)).collect();
    let _ = writeln!(out, "{}", row.join(" "));
}

fn write_subspace(out: &mut String, s: &Subspace) {
    write_vector(out, "mean", &s.mean);
    write_matrix(out, "basis", &s.basis);
}

fn write_opt(v: Option<impl ToString>) -> String {
    v.map_or_else(|| "auto".to_string(), |x| x.to_string())
}

pub fn encode(m: &SystemModel) -> String {
    let mut out = format!("{MAGIC} {VERSION}\n");

    out.push_str("SECTION FACE_PCA\n");
    let _ = writeln!(out, "image_size {} {}", m.image_width, m.image_height);
    write_subspace(&mut out, &m.face_pca);

    out.push_str("SECTION FACE_LDA\n");
    write_subspace(&mut out, &m.face_lda);

    out.push_str("SECTION GALLERY\n");
    let g = &m.face_gallery;
    let _ = writeln!(out, "k {}", g.k());
    let labels: Vec<String> = g.labels().iter().map(usize::to_string).collect();
    let _ = writeln!(out, "labels {} {}", labels.len(), labels.join(" "));
    write_matrix(&mut out, "points", g.points());

    out.push_str("SECTION VOICE_LDA\n");
    let c = &m.mfcc;
    let _ = writeln!(
        out,
        "mfcc {} {} {} {} {} {} {}",
        real(c.frame_ms),
        real(c.shift_ms),
        write_opt(c.fft_size),
        c.num_filters,
        c.num_ceps,
        real(c.fmin_hz),
        write_opt(c.fmax_hz.map(real)),
    );
    write_subspace(&mut out, &m.voice_lda);

    out.push_str("SECTION VOICE_SVM\n");
    let s = &m.voice_svm;
    let trained: Vec<String> = s.trained_classes.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "classes {}", s.num_classes);
    let _ = writeln!(out, "trained {} {}", trained.len(), trained.join(" "));
    let _ = writeln!(out, "machines {}", s.pairs.len());
    for p in &s.pairs {
        let b = &p.machine;
        let _ = writeln!(out, "machine {} {}", p.positive, p.negative);
        match b.kernel {
            KernelSpec::Linear => out.push_str("kernel linear\n"),
            KernelSpec::Rbf { gamma } => {
                let _ = writeln!(out, "kernel rbf {}", real(gamma));
            }
        }
        let _ = writeln!(out, "c {}", real(b.c));
        let _ = writeln!(out, "bias {}", real(b.bias));
        let idx: Vec<String> = b.support_indices.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "support_indices {} {}", idx.len(), idx.join(" "));
        write_vector(&mut out, "dual_coefs", &b.dual_coefs);
        write_matrix(&mut out, "support_vectors", &b.support_vectors);
    }

    out.push_str("SECTION TEMPLATES\n");
    let _ = writeln!(out, "clients {}", m.templates.len());
    for t in &m.templates {
        let _ = writeln!(out, "client {} {}", t.client_id, t.voice_class_id);
        write_vector(&mut out, "face_coords", &t.face_coords);
    }

    out.push_str("SECTION THRESHOLDS\n");
    let _ = writeln!(out, "tau_dist {}", real(m.thresholds.tau_dist));
    let _ = writeln!(out, "tau_fused {}", real(m.thresholds.tau_fused));
    let _ = writeln!(out, "w_face {}", real(m.w_face));

    let crc = crc32fast::hash(out.as_bytes());
    let _ = writeln!(out, "CRC32 {crc:08x}");
    out
}

pub fn save_model(m: &SystemModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode(m)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SystemModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

fn malformed(section: &str, reason: impl Into<String>) -> Error {
    ModelFileError::Malformed {
        section: section.to_string(),
        reason: reason.into(),
    }
    .into()
}

/// Checks magic, then checksum, then parses every section.
pub fn decode(bytes: &[u8]) -> Result<SystemModel> {
    let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let first = String::from_utf8_lossy(first);
    let mut head = first.split(' ');
    match (head.next(), head.next(), head.next()) {
        (Some(MAGIC), Some(VERSION), None) => {}
        (Some(MAGIC), Some(v), None) => return Err(ModelFileError::Version(v.to_string()).into()),
        _ => return Err(ModelFileError::BadMagic(first.into_owned()).into()),
    }

    let text = std::str::from_utf8(bytes).map_err(|e| malformed("file", e.to_string()))?;
    let body_end = text
        .trim_end_matches('\n')
        .rfind('\n')
        .map(|i| i + 1)
        .unwrap_or(0);
    let last = text[body_end..].trim_end_matches('\n');
    let Some(stored) = last.strip_prefix("CRC32 ") else {
        // locate the section that was cut short, ignoring a partial last line
        let complete = &text[..text.rfind('\n').map_or(0, |i| i + 1)];
        let section = match parse(complete) {
            Err(Error::ModelFile(
                ModelFileError::Truncated { section } | ModelFileError::Malformed { section, .. },
            )) => section,
            _ => "CRC32".into(),
        };
        return Err(ModelFileError::Truncated { section }.into());
    };
    let stored = u32::from_str_radix(stored.trim(), 16)
        .map_err(|_| malformed("CRC32", format!("not a hex checksum: {stored:?}")))?;
    let body = &text[..body_end];
    let computed = crc32fast::hash(body.as_bytes());
    if stored != computed {
        return Err(ModelFileError::Checksum { stored, computed }.into());
    }
    parse(body)
}

struct Reader<'a> {
    lines: std::str::Lines<'a>,
    section: String,
}

impl<'a> Reader<'a> {
    fn next_line(&mut self) -> Result<&'a str> {
        self.lines.next().ok_or_else(|| {
            ModelFileError::Truncated {
                section: self.section.clone(),
            }
            .into()
        })
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        malformed(&self.section, reason)
    }

    fn section(&mut self, name: &str) -> Result<()> {
        let line = self.next_line()?;
        self.section = name.to_string();
        if line != format!("SECTION {name}") {
            return Err(self.err(format!("expected section header, found {line:?}")));
        }
        Ok(())
    }

    /// Tokens after `key` on the next line.
    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let line = self.next_line()?;
        let mut toks = line.split(' ');
        if toks.next() != Some(key) {
            return Err(self.err(format!("expected {key:?}, found {line:?}")));
        }
        Ok(toks.collect())
    }

    fn num<T: std::str::FromStr>(&self, tok: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(format!("cannot parse {tok:?}")))
    }

    fn single<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let toks = self.keyed(key)?;
        if toks.len() != 1 {
            return Err(self.err(format!("{key} takes one value")));
        }
        self.num(toks[0])
    }

    fn counted<T: std::str::FromStr>(&mut self, key: &str) -> Result<Vec<T>> {
        let toks = self.keyed(key)?;
        let (n, rest) = toks
            .split_first()
            .ok_or_else(|| self.err(format!("{key} has no count")))?;
        let n: usize = self.num(n)?;
        if rest.len() != n {
            return Err(self.err(format!("{key} declares {n} values, has {}", rest.len())));
        }
        rest.iter().map(|t| self.num(t)).collect()
    }

    fn row(&mut self, cols: usize) -> Result<Vec<f64>> {
        let line = self.next_line()?;
        let vals: Vec<f64> = if line.is_empty() {
            Vec::new()
        } else {
            line.split(' ').map(|t| self.num(t)).collect::<Result<_>>()?
        };
        if vals.len() != cols {
            return Err(self.err(format!("row has {} values, expected {cols}", vals.len())));
        }
        Ok(vals)
    }

    fn matrix(&mut self, key: &str) -> Result<Matrix> {
        let toks = self.keyed(key)?;
        if toks.len() != 2 {
            return Err(self.err(format!("{key} header needs rows and cols")));
        }
        let (rows, cols): (usize, usize) = (self.num(toks[0])?, self.num(toks[1])?);
        let mut data = vec![0.0; rows * cols];
        for i in 0..rows {
            for (j, v) in self.row(cols)?.into_iter().enumerate() {
                data[j * rows + i] = v;
            }
        }
        Matrix::from_col_major(rows, cols, data).map_err(|e| self.err(e.to_string()))
    }

    fn vector(&mut self, key: &str) -> Result<Vector> {
        let m = self.matrix(key)?;
        if m.rows() != 1 {
            return Err(self.err(format!("{key} must be a single row")));
        }
        Ok(Vector::new(m.as_slice().to_vec()))
    }

    fn subspace(&mut self, kind: SubspaceKind) -> Result<Subspace> {
        let mean = self.vector("mean")?;
        let basis = self.matrix("basis")?;
        Subspace::new(kind, mean, basis).map_err(|e| self.err(e.to_string()))
    }

    fn opt<T: std::str::FromStr>(&self, tok: &str) -> Result<Option<T>> {
        if tok == "auto" {
            Ok(None)
        } else {
            self.num(tok).map(Some)
        }
    }
}

fn parse(text: &str) -> Result<SystemModel> {
    let mut r = Reader {
        lines: text.lines(),
        section: "header".into(),
    };
    r.next_line()?;

    r.section("FACE_PCA")?;
    let size = r.keyed("image_size")?;
    if size.len() != 2 {
        return Err(r.err("image_size needs width and height"));
    }
    let (image_width, image_height) = (r.num(size[0])?, r.num(size[1])?);
    let face_pca = r.subspace(SubspaceKind::Pca)?;

    r.section("FACE_LDA")?;
    let face_lda = r.subspace(SubspaceKind::Lda)?;

    r.section("GALLERY")?;
    let k = r.single("k")?;
    let labels = r.counted("labels")?;
    let points = r.matrix("points")?;
    let face_gallery = KnnModel::new(points, labels, k).map_err(|e| r.err(e.to_string()))?;

    r.section("VOICE_LDA")?;
    let t = r.keyed("mfcc")?;
    if t.len() != 7 {
        return Err(r.err("mfcc needs 7 parameters"));
    }
    let mfcc = MfccConfig {
        frame_ms: r.num(t[0])?,
        shift_ms: r.num(t[1])?,
        fft_size: r.opt(t[2])?,
        num_filters: r.num(t[3])?,
        num_ceps: r.num(t[4])?,
        fmin_hz: r.num(t[5])?,
        fmax_hz: r.opt(t[6])?,
    };
    let voice_lda = r.subspace(SubspaceKind::Lda)?;

    r.section("VOICE_SVM")?;
    let num_classes = r.single("classes")?;
    let trained_classes = r.counted("trained")?;
    let machines: usize = r.single("machines")?;
    let mut pairs = Vec::with_capacity(machines);
    for _ in 0..machines {
        let t = r.keyed("machine")?;
        if t.len() != 2 {
            return Err(r.err("machine needs two class ids"));
        }
        let (positive, negative) = (r.num(t[0])?, r.num(t[1])?);
        let t = r.keyed("kernel")?;
        let kernel = match t.as_slice() {
            ["linear"] => KernelSpec::Linear,
            ["rbf", g] => KernelSpec::rbf(r.num(g)?).map_err(|e| r.err(e.to_string()))?,
            _ => return Err(r.err(format!("unknown kernel {t:?}"))),
        };
        let c = r.single("c")?;
        let bias = r.single("bias")?;
        let support_indices = r.counted("support_indices")?;
        let dual_coefs = r.vector("dual_coefs")?.into_inner();
        let support_vectors = r.matrix("support_vectors")?;
        if dual_coefs.len() != support_vectors.cols() || support_indices.len() != dual_coefs.len()
        {
            return Err(r.err("support vector counts disagree"));
        }
        pairs.push(PairMachine {
            positive,
            negative,
            machine: BinarySvm {
                support_vectors,
                dual_coefs,
                bias,
                kernel,
                c,
                support_indices,
            },
        });
    }
    let voice_svm = SvmModel {
        num_classes,
        trained_classes,
        pairs,
    };

    r.section("TEMPLATES")?;
    let n: usize = r.single("clients")?;
    let mut templates = Vec::with_capacity(n);
    for _ in 0..n {
        let t = r.keyed("client")?;
        if t.len() != 2 {
            return Err(r.err("client needs an id and a class id"));
        }
        let client_id = t[0].to_string();
        let voice_class_id = r.num(t[1])?;
        templates.push(BiometricTemplate {
            client_id,
            face_coords: r.vector("face_coords")?,
            voice_class_id,
        });
    }

    r.section("THRESHOLDS")?;
    let thresholds = Thresholds {
        tau_dist: r.single("tau_dist")?,
        tau_fused: r.single("tau_fused")?,
    };
    let w_face = r.single("w_face")?;

    if let Some(extra) = r.lines.next() {
        return Err(r.err(format!("unexpected trailing line {extra:?}")));
    }

    let m = SystemModel {
        image_width,
        image_height,
        face_pca,
        face_lda,
        face_gallery,
        mfcc,
        voice_lda,
        voice_svm,
        templates,
        thresholds,
        w_face,
    };
    check_consistency(&m)?;
    Ok(m)
}

fn check_consistency(m: &SystemModel) -> Result<()> {
    let c = m.templates.len();
    let bad = |section: &str, reason: &str| Err(malformed(section, reason));
    if m.face_pca.ambient_dim() != m.image_width * m.image_height {
        return bad("FACE_PCA", "basis does not match the image size");
    }
    if m.face_lda.ambient_dim() != m.face_pca.retained() {
        return bad("FACE_LDA", "basis does not match the PCA dimension");
    }
    if m.face_gallery.dim() != m.face_lda.retained() {
        return bad("GALLERY", "points do not match the LDA dimension");
    }
    if m.face_gallery.labels().iter().any(|&l| l >= c) {
        return bad("GALLERY", "label outside the client range");
    }
    if m.voice_lda.ambient_dim() != 2 * m.mfcc.num_ceps {
        return bad("VOICE_LDA", "basis does not match the MFCC summary length");
    }
    if m.voice_svm.num_classes != c {
        return bad("VOICE_SVM", "class count differs from the template count");
    }
    if m.voice_svm.pairs.iter().any(|p| {
        p.positive >= c || p.negative >= c || p.machine.support_vectors.rows() != m.voice_lda.retained()
    }) {
        return bad("VOICE_SVM", "machine inconsistent with classes or LDA dimension");
    }
    for (k, t) in m.templates.iter().enumerate() {
        if t.voice_class_id != k || t.face_coords.len() != m.face_lda.retained() {
            return bad("TEMPLATES", "template inconsistent with gallery");
        }
        if m.templates[..k].iter().any(|o| o.client_id == t.client_id) {
            return bad("TEMPLATES", "duplicate client id");
        }
    }
    if !(0.0..=1.0).contains(&m.w_face) {
        return bad("THRESHOLDS", "w_face outside [0, 1]");
    }
    Ok(())
}
