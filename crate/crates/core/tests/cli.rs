//! End-to-end runs of the `biomm` binary on a synthetic dataset.

use std::path::Path;
use std::process::{Command, Output};

use biomm::ingest::{save_wav, AudioRecord};
use tempfile::TempDir;

fn biomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biomm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(dir: &Path, rel: &str) -> String {
    dir.join(rel).to_str().unwrap().to_string()
}

/// Synthetic dataset plus an enrolled model in a fresh directory.
fn enrolled(utterances: usize) -> TempDir {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let o = biomm(&["synth", "--out", &p(d, ""), "--utterances", &utterances.to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = biomm(&[
        "enroll",
        "--faces",
        &p(d, "enroll_faces.tsv"),
        "--voices",
        &p(d, "enroll_voices.tsv"),
        "--model",
        &p(d, "model.biomm"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    dir
}

#[test]
fn genuine_probes_accept_and_fraud_probes_reject() {
    let dir = enrolled(4);
    let d = dir.path();
    let model = p(d, "model.biomm");

    let o = biomm(&[
        "identify",
        "--model",
        &model,
        "--face",
        &p(d, "faces/client0_probe0.pgm"),
        "--voice",
        &p(d, "voices/client0_probe0.wav"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("verdict=accept id=client0 "), "{}", stdout(&o));

    let o = biomm(&[
        "identify",
        "--model",
        &model,
        "--face",
        &p(d, "faces/fraud0.pgm"),
        "--voice",
        &p(d, "voices/fraud0.wav"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("verdict=reject"), "{}", stdout(&o));
    assert!(stderr(&o).is_empty());

    let o = biomm(&[
        "verify",
        "--model",
        &model,
        "--face",
        &p(d, "faces/client1_probe0.pgm"),
        "--voice",
        &p(d, "voices/client1_probe0.wav"),
        "--claim",
        "client1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("claimed=client1"));
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = enrolled(4);
    let d = dir.path();
    let model = p(d, "model.biomm");
    let face = p(d, "faces/client0_probe0.pgm");
    let voice = p(d, "voices/client0_probe0.wav");

    // usage: missing flag, bad value, out-of-range tunable
    for args in [
        vec!["identify", "--model", &model],
        vec!["crossval", "--modality", "ear", "--manifest", &model],
        vec!["enroll", "--faces", &face, "--voices", &voice, "--model", &model, "--w-face", "1.5"],
    ] {
        let o = biomm(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error: kind=usage reason="), "{}", stderr(&o));
        assert!(stdout(&o).is_empty());
    }

    // data: unknown claim, missing file, corrupt model
    let o = biomm(&["verify", "--model", &model, "--face", &face, "--voice", &voice, "--claim", "nobody"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error: kind="));
    let o = biomm(&["identify", "--model", &p(d, "absent"), "--face", &face, "--voice", &voice]);
    assert_eq!(o.status.code(), Some(3));

    let mut bytes = std::fs::read(&model).unwrap();
    bytes.truncate(bytes.len() / 2);
    let broken = p(d, "broken.biomm");
    std::fs::write(&broken, bytes).unwrap();
    let o = biomm(&["identify", "--model", &broken, "--face", &face, "--voice", &voice]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
}

#[test]
fn voice_crossval_gains_from_the_discriminant() {
    let dir = enrolled(10);
    let manifest = p(dir.path(), "enroll_voices.tsv");
    let acc = |lda: &str| {
        let o = biomm(&["crossval", "--modality", "voice", "--lda", lda, "--manifest", &manifest]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let out = stdout(&o);
        let v = out.trim().rsplit("accuracy=").next().unwrap().parse::<f64>().unwrap();
        (v, out)
    };
    let (on, text) = acc("on");
    let (off, _) = acc("off");
    assert!(text.starts_with("crossval modality=voice lda=on folds=10 "));
    assert!(on >= off, "lda on {on} < off {off}");
}

#[test]
fn silence_has_zero_spread_in_the_csv_summary() {
    let dir = TempDir::new().unwrap();
    let wav = p(dir.path(), "silence.wav");
    save_wav(&AudioRecord::new(8000, vec![0.0; 8000]).unwrap(), &wav).unwrap();
    let o = biomm(&["extract-mfcc", &wav]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    let frames = &lines[..lines.len() - 1];
    assert_eq!(frames.len(), 98);
    assert!(frames.iter().all(|l| l.split(',').count() == 12));
    let summary: Vec<f64> = lines[lines.len() - 1]
        .strip_prefix("summary,")
        .expect("summary row last")
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(summary.len(), 24);
    assert!(summary[12..].iter().all(|&s| s == 0.0), "{summary:?}");
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let a = enrolled(4);
    let b = enrolled(4);
    let model_a = std::fs::read(a.path().join("model.biomm")).unwrap();
    let model_b = std::fs::read(b.path().join("model.biomm")).unwrap();
    assert_eq!(model_a, model_b);

    let run = |d: &Path| {
        let id = biomm(&[
            "identify",
            "--model",
            &p(d, "model.biomm"),
            "--face",
            &p(d, "faces/client2_probe1.pgm"),
            "--voice",
            &p(d, "voices/client2_probe1.wav"),
        ]);
        let mfcc = biomm(&["extract-mfcc", &p(d, "voices/client2_0.wav")]);
        let eval = biomm(&[
            "eval",
            "--train",
            &p(d, "enroll_faces.tsv"),
            "--test",
            &p(d, "probe_faces.tsv"),
            "--fraud",
            &p(d, "fraud_faces.tsv"),
        ]);
        (id.stdout, mfcc.stdout, eval.stdout)
    };
    let first = run(a.path());
    assert_eq!(first, run(a.path()));
    assert_eq!(first, run(b.path()));
    let eval = String::from_utf8(first.2).unwrap();
    assert_eq!(eval.lines().filter(|l| l.starts_with("knn k=")).count(), 3);
}

#[test]
fn help_lists_every_flag_with_its_default() {
    let tunables = [
        ("--pca-retained", "auto"),
        ("--lda-retained", "auto"),
        ("--reg", "auto"),
        ("--knn-k", "2"),
        ("--frame-ms", "25"),
        ("--shift-ms", "10"),
        ("--num-filters", "20"),
        ("--num-ceps", "12"),
        ("--svm-c", "10"),
        ("--gamma", "2"),
        ("--svm-tol", "0.001"),
        ("--folds", "10"),
        ("--w-face", "0.5"),
        ("--seed", "42"),
    ];
    for sub in ["enroll", "crossval", "extract-mfcc", "eval"] {
        let o = biomm(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let help = stdout(&o);
        for (flag, default) in tunables {
            let line = help
                .lines()
                .find(|l| l.trim_start().starts_with(flag) && l.contains(&format!("{flag} <")))
                .unwrap_or_else(|| panic!("{sub}: {flag} missing"));
            let block: String = help
                .lines()
                .skip_while(|l| *l != line)
                .take_while(|l| *l == line || !l.trim_start().starts_with("--"))
                .collect();
            assert!(block.contains(&format!("[default: {default}]")), "{sub} {flag}: {block}");
        }
    }
    for (sub, flags) in [
        ("identify", &["--model", "--face", "--voice"][..]),
        ("verify", &["--model", "--face", "--voice", "--claim"][..]),
        ("synth", &["--out", "--clients", "--faces", "--utterances", "--probes", "--impostors", "--seed"][..]),
    ] {
        let help = stdout(&biomm(&[sub, "--help"]));
        for f in flags {
            assert!(help.contains(f), "{sub}: {f} missing");
        }
    }
}
