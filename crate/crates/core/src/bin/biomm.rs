//! Command-line front end.
//!
//! Exit codes: 0 success, 1 rejected probe, 2 usage error, 3 data or format
//! error. Results go to stdout as `key=value` lines, diagnostics to stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use biomm::error::{Error, Result};
use biomm::experiment::{crossval_face, crossval_svm, knn_grid};
use biomm::ingest::{
    load_image_dataset, load_manifest, load_pgm, load_wav, save_pgm, save_wav, LabeledDataset,
    Manifest,
};
use biomm::mfcc::{extract, MfccConfig};
use biomm::modelfile::{load_model, save_model};
use biomm::pipeline::{voice_features, Enrollment, PipelineConfig};
use biomm::svm::{KernelSpec, SvmParams};
use biomm::synth::{corpus, CorpusSpec};

/// A value or `auto`.
#[derive(Clone, Copy, Debug)]
struct Auto<T>(Option<T>);

impl<T: FromStr> FromStr for Auto<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            Ok(Auto(None))
        } else {
            s.parse().map(|v| Auto(Some(v))).map_err(|e: T::Err| e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "biomm", version, about = "Face and voice biometric recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Tunables {
    /// PCA components kept before LDA (auto: samples − classes)
    #[arg(long, default_value = "auto")]
    pca_retained: Auto<usize>,
    /// LDA components kept (auto: classes − 1)
    #[arg(long, default_value = "auto")]
    lda_retained: Auto<usize>,
    /// Ridge added to the within-class scatter (auto: 1e-6 · trace / dim)
    #[arg(long, default_value = "auto")]
    reg: Auto<f64>,
    /// Nearest neighbors for the face gallery
    #[arg(long, default_value_t = 2)]
    knn_k: usize,
    /// Analysis frame length in milliseconds
    #[arg(long, default_value_t = 25.0)]
    frame_ms: f64,
    /// Hop between frames in milliseconds
    #[arg(long, default_value_t = 10.0)]
    shift_ms: f64,
    /// Mel filters
    #[arg(long, default_value_t = 20)]
    num_filters: usize,
    /// Cepstral coefficients kept (c1..cN)
    #[arg(long, default_value_t = 12)]
    num_ceps: usize,
    /// SVM box constraint
    #[arg(long, default_value_t = 10.0)]
    svm_c: f64,
    /// RBF kernel width
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// SVM stopping tolerance
    #[arg(long, default_value_t = 1e-3)]
    svm_tol: f64,
    /// Cross-validation folds
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Weight of the face score in the fused score
    #[arg(long, default_value_t = 0.5)]
    w_face: f64,
    /// Seed for every stochastic choice
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl Tunables {
    fn mfcc(&self) -> MfccConfig {
        MfccConfig {
            frame_ms: self.frame_ms,
            shift_ms: self.shift_ms,
            num_filters: self.num_filters,
            num_ceps: self.num_ceps,
            ..MfccConfig::default()
        }
    }

    fn pipeline(&self) -> std::result::Result<PipelineConfig, String> {
        let cfg = PipelineConfig {
            pca_retained: self.pca_retained.0,
            lda_retained: self.lda_retained.0,
            reg: self.reg.0,
            knn_k: self.knn_k,
            mfcc: self.mfcc(),
            svm: SvmParams {
                kernel: KernelSpec::rbf(self.gamma).map_err(|e| e.to_string())?,
                c: self.svm_c,
                tol: self.svm_tol,
            },
            w_face: self.w_face,
            seed: self.seed,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        if !(self.svm_c > 0.0) || !(self.svm_tol > 0.0) {
            return Err("svm-c and svm-tol must be > 0".into());
        }
        if self.folds < 2 {
            return Err("folds must be at least 2".into());
        }
        if self.num_ceps == 0 || self.num_filters == 0 {
            return Err("num-ceps and num-filters must be at least 1".into());
        }
        if self.num_ceps >= self.num_filters {
            return Err("num-ceps must be smaller than num-filters".into());
        }
        if !(self.frame_ms > 0.0) || !(self.shift_ms > 0.0) {
            return Err("frame-ms and shift-ms must be > 0".into());
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Modality {
    Face,
    Voice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model from face and voice manifests
    Enroll {
        /// Manifest of PGM face images
        #[arg(long)]
        faces: PathBuf,
        /// Manifest of WAV recordings
        #[arg(long)]
        voices: PathBuf,
        /// Output model file
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        tune: Tunables,
    },
    /// Identify the client behind a face image and a recording
    Identify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        face: PathBuf,
        #[arg(long)]
        voice: PathBuf,
    },
    /// Accept or reject a claimed identity
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        face: PathBuf,
        #[arg(long)]
        voice: PathBuf,
        /// Claimed client id
        #[arg(long)]
        claim: String,
    },
    /// Stratified k-fold accuracy of one modality
    Crossval {
        #[arg(long, value_enum)]
        modality: Modality,
        /// Apply the discriminant front end
        #[arg(long, value_enum, default_value_t = Switch::On)]
        lda: Switch,
        /// Manifest of samples (PGM for face, WAV for voice)
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        tune: Tunables,
    },
    /// Print per-frame cepstra and the mean/std summary row as CSV
    ExtractMfcc {
        wav: PathBuf,
        #[command(flatten)]
        tune: Tunables,
    },
    /// Face k-grid on test and fraud sets, voice cross-validation with and without LDA
    Eval {
        /// Face training manifest
        #[arg(long)]
        train: Option<PathBuf>,
        /// Face test manifest (same client names as training)
        #[arg(long)]
        test: Option<PathBuf>,
        /// Face manifest of unenrolled identities
        #[arg(long)]
        fraud: Option<PathBuf>,
        /// Voice manifest for cross-validation
        #[arg(long)]
        voices: Option<PathBuf>,
        /// Neighbor counts to evaluate
        #[arg(long, value_delimiter = ',', default_value = "2,5,10")]
        ks: Vec<usize>,
        #[command(flatten)]
        tune: Tunables,
    },
    /// Write a synthetic dataset with manifests
    Synth {
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        clients: usize,
        /// Enrollment face images per client
        #[arg(long, default_value_t = 4)]
        faces: usize,
        /// Enrollment recordings per client
        #[arg(long, default_value_t = 4)]
        utterances: usize,
        /// Held-out probe pairs per client
        #[arg(long, default_value_t = 2)]
        probes: usize,
        /// Unenrolled identities
        #[arg(long, default_value_t = 10)]
        impostors: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome = std::result::Result<(String, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: kind=usage reason={}", clap_reason(&e));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok((out, accepted)) => {
            print!("{out}");
            if accepted {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(reason)) => {
            eprintln!("error: kind=usage reason={}", one_line(&reason));
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: kind={} reason={}", e.kind(), one_line(&e.to_string()));
            ExitCode::from(3)
        }
    }
}

/// Clap's message without the usage block, on one line.
fn clap_reason(e: &clap::Error) -> String {
    let text = e.to_string();
    let parts: Vec<&str> = text
        .lines()
        .take_while(|l| !l.starts_with("Usage:"))
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    parts.join(" ").trim_start_matches("error: ").to_string()
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

fn config(tune: &Tunables) -> std::result::Result<PipelineConfig, Failure> {
    tune.pipeline().map_err(Failure::Usage)
}

fn load_voice_dataset(manifest: &Manifest, cfg: &MfccConfig) -> Result<LabeledDataset> {
    let audio = manifest
        .entries
        .iter()
        .map(|e| load_wav(manifest.resolve(e)))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = audio.iter().collect();
    LabeledDataset::new(
        voice_features(&refs, cfg)?,
        manifest.labels(),
        manifest.class_names.clone(),
        manifest.entries.iter().map(|e| e.path.display().to_string()).collect(),
    )
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Enroll {
            faces,
            voices,
            model,
            tune,
        } => {
            let cfg = config(&tune)?;
            let fm = load_manifest(&faces)?;
            let vm = load_manifest(&voices)?;
            let mut enrollment = Enrollment::new();
            for name in &fm.class_names {
                let imgs = fm
                    .entries
                    .iter()
                    .filter(|e| &e.class_name == name)
                    .map(|e| load_pgm(fm.resolve(e)))
                    .collect::<Result<Vec<_>>>()?;
                let recs = vm
                    .entries
                    .iter()
                    .filter(|e| &e.class_name == name)
                    .map(|e| load_wav(vm.resolve(e)))
                    .collect::<Result<Vec<_>>>()?;
                enrollment.enroll(name, imgs, recs)?;
            }
            if let Some(extra) = vm.class_names.iter().find(|c| fm.class_id(c).is_none()) {
                return Err(Error::Enrollment(format!("client {extra} has recordings but no face images")).into());
            }
            let m = enrollment.fit(&cfg)?;
            save_model(&m, &model)?;
            let out = format!(
                "enrolled clients={} faces={} voices={} tau_dist={:.6} tau_fused={:.6} model={}\n",
                m.num_clients(),
                fm.len(),
                vm.len(),
                m.thresholds.tau_dist,
                m.thresholds.tau_fused,
                model.display()
            );
            Ok((out, true))
        }
        Command::Identify { model, face, voice } => {
            let m = load_model(&model)?;
            let d = m.identify(&load_pgm(&face)?, &load_wav(&voice)?)?;
            Ok((format!("{d}\n"), d.accepted()))
        }
        Command::Verify {
            model,
            face,
            voice,
            claim,
        } => {
            let m = load_model(&model)?;
            let d = m.verify(&load_pgm(&face)?, &load_wav(&voice)?, &claim)?;
            Ok((format!("{d}\n"), d.accepted()))
        }
        Command::Crossval {
            modality,
            lda,
            manifest,
            tune,
        } => {
            let cfg = config(&tune)?;
            let man = load_manifest(&manifest)?;
            let on = lda == Switch::On;
            let (name, acc) = match modality {
                Modality::Voice => {
                    let ds = load_voice_dataset(&man, &cfg.mfcc)?;
                    ("voice", crossval_svm(&ds, &cfg.svm, on, cfg.reg, tune.folds, cfg.seed)?)
                }
                Modality::Face => {
                    let (ds, _, _) = load_image_dataset(&man)?;
                    ("face", crossval_face(&ds, &cfg, on, tune.folds, cfg.seed)?)
                }
            };
            let out = format!(
                "crossval modality={name} lda={} folds={} accuracy={acc:.2}\n",
                if on { "on" } else { "off" },
                tune.folds
            );
            Ok((out, true))
        }
        Command::ExtractMfcc { wav, tune } => {
            config(&tune)?;
            let feats = extract(&load_wav(&wav)?, &tune.mfcc())?;
            Ok((mfcc_csv(&feats.frames, &feats.summary), true))
        }
        Command::Eval {
            train,
            test,
            fraud,
            voices,
            ks,
            tune,
        } => {
            let cfg = config(&tune)?;
            if ks.contains(&0) {
                return Err(Failure::Usage("ks must be positive".into()));
            }
            let mut out = String::new();
            match (&train, &test) {
                (Some(train), Some(test)) => {
                    let (tr, _, _) = load_image_dataset(&load_manifest(train)?)?;
                    let te = relabel(&load_manifest(test)?, &tr)?;
                    let fr = match &fraud {
                        Some(p) => Some(load_image_dataset(&load_manifest(p)?)?.0),
                        None => None,
                    };
                    let rows = knn_grid(&tr, &te, fr.as_ref().map(|d| d.features()), &ks, &cfg)?;
                    for r in rows {
                        let _ = write!(out, "knn k={} test_accuracy={:.2}", r.k, r.test_accuracy);
                        if let Some((rej, total)) = r.fraud_rejected {
                            let _ = write!(out, " fraud_rejected={rej}/{total}");
                        }
                        out.push('\n');
                    }
                }
                (None, None) => {
                    if fraud.is_some() {
                        return Err(Failure::Usage("--fraud needs --train and --test".into()));
                    }
                }
                _ => return Err(Failure::Usage("--train and --test go together".into())),
            }
            if let Some(v) = &voices {
                let ds = load_voice_dataset(&load_manifest(v)?, &cfg.mfcc)?;
                for on in [false, true] {
                    let acc = crossval_svm(&ds, &cfg.svm, on, cfg.reg, tune.folds, cfg.seed)?;
                    let _ = writeln!(
                        out,
                        "svm lda={} folds={} cv_accuracy={acc:.2}",
                        if on { "on" } else { "off" },
                        tune.folds
                    );
                }
            }
            if out.is_empty() {
                return Err(Failure::Usage("nothing to evaluate: pass --train/--test or --voices".into()));
            }
            Ok((out, true))
        }
        Command::Synth {
            out,
            clients,
            faces,
            utterances,
            probes,
            impostors,
            seed,
        } => {
            if clients < 2 || faces < 2 || utterances < 2 {
                return Err(Failure::Usage(
                    "need at least 2 clients, 2 faces and 2 utterances".into(),
                ));
            }
            let spec = CorpusSpec {
                clients,
                faces_per_client: faces,
                utterances_per_client: utterances,
                probes_per_client: probes,
                impostors,
                ..CorpusSpec::default()
            };
            write_synth(&out, &spec, seed)?;
            Ok((format!("synth clients={clients} impostors={impostors} dir={}\n", out.display()), true))
        }
    }
}

/// Test set labeled with the training set's class ids.
fn relabel(test: &Manifest, train: &LabeledDataset) -> Result<LabeledDataset> {
    let (ds, _, _) = load_image_dataset(test)?;
    let labels = test
        .entries
        .iter()
        .map(|e| {
            train
                .class_names()
                .iter()
                .position(|c| c == &e.class_name)
                .ok_or_else(|| Error::Identity(e.class_name.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledDataset::new(
        ds.features().clone(),
        labels,
        train.class_names().to_vec(),
        ds.sample_ids().to_vec(),
    )
}

/// One row of cepstra per frame, then `summary,` with the means followed by
/// the standard deviations. Nine significant digits throughout.
fn mfcc_csv(frames: &biomm::Matrix, summary: &[f64]) -> String {
    let row = |out: &mut String, vals: &[f64]| {
        let cells: Vec<String> = vals.iter().map(|v| format!("{v:.8e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    };
    let mut out = String::new();
    for frame in frames.columns() {
        row(&mut out, frame);
    }
    out.push_str("summary,");
    row(&mut out, summary);
    out
}

fn write_synth(dir: &Path, spec: &CorpusSpec, seed: u64) -> Result<()> {
    let c = corpus(spec, seed)?;
    for sub in ["faces", "voices"] {
        std::fs::create_dir_all(dir.join(sub)).map_err(|e| Error::Io {
            path: dir.join(sub),
            source: e,
        })?;
    }
    let mut manifests: [(&str, String); 6] = [
        ("enroll_faces.tsv", String::new()),
        ("enroll_voices.tsv", String::new()),
        ("probe_faces.tsv", String::new()),
        ("probe_voices.tsv", String::new()),
        ("fraud_faces.tsv", String::new()),
        ("fraud_voices.tsv", String::new()),
    ];
    for k in &c.clients {
        for (i, f) in k.faces.iter().enumerate() {
            let rel = format!("faces/{}_{i}.pgm", k.name);
            save_pgm(f, dir.join(&rel))?;
            let _ = writeln!(manifests[0].1, "{rel}\t{}", k.name);
        }
        for (i, v) in k.voices.iter().enumerate() {
            let rel = format!("voices/{}_{i}.wav", k.name);
            save_wav(v, dir.join(&rel))?;
            let _ = writeln!(manifests[1].1, "{rel}\t{}", k.name);
        }
        for (i, f) in k.probe_faces.iter().enumerate() {
            let rel = format!("faces/{}_probe{i}.pgm", k.name);
            save_pgm(f, dir.join(&rel))?;
            let _ = writeln!(manifests[2].1, "{rel}\t{}", k.name);
        }
        for (i, v) in k.probe_voices.iter().enumerate() {
            let rel = format!("voices/{}_probe{i}.wav", k.name);
            save_wav(v, dir.join(&rel))?;
            let _ = writeln!(manifests[3].1, "{rel}\t{}", k.name);
        }
    }
    for (i, (f, v)) in c.impostor_faces.iter().zip(&c.impostor_voices).enumerate() {
        let face = format!("faces/fraud{i}.pgm");
        let voice = format!("voices/fraud{i}.wav");
        save_pgm(f, dir.join(&face))?;
        save_wav(v, dir.join(&voice))?;
        let _ = writeln!(manifests[4].1, "{face}\tfraud{i}");
        let _ = writeln!(manifests[5].1, "{voice}\tfraud{i}");
    }
    for (name, text) in &manifests {
        if text.is_empty() {
            continue;
        }
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?;
    }
    Ok(())
}
