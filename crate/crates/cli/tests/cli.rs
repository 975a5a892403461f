use std::path::Path;
use std::process::{Command, Output};

use dsmkit::pipeline::ExperimentConfig;

fn dsmkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsmkit"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = dsmkit(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    dsmkit(dir, args).status.code().unwrap()
}

fn small_config(dir: &Path, models: &str) -> std::path::PathBuf {
    ok(dir, &["synth", "--tokens", "30000", "--out", "data"]);
    let path = dir.join("data/small.toml");
    std::fs::write(
        &path,
        format!(
            "slices = [10000, 30000]\nmodels = [{models}]\n\
             [tsvd]\ndim = 20\n[isvd]\nremove = 20\nkeep_through = 80\n\
             [ri]\ndim = 128\n[neural]\ndim = 16\nepochs = 1\n"
        ),
    )
    .unwrap();
    path
}

#[test]
fn printed_defaults_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(dir.path(), &["print-config"]);
    assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), ExperimentConfig::default());
    let seeded = ok(dir.path(), &["print-config", "--seed", "7", "--threads", "3"]);
    let cfg = ExperimentConfig::from_toml(&seeded).unwrap();
    assert_eq!((cfg.seed, cfg.threads), (7, 3));
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["--help"]), 0);
    assert_eq!(code(d, &["frobnicate"]), 1);
    assert_eq!(code(d, &["run", "--config", "absent.toml"]), 1);
    std::fs::write(d.join("bad.toml"), "models = [\"xyz\"]\n").unwrap();
    let out = dsmkit(d, &["run", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("co, ppmi, tsvd, isvd, ri, sgns, cbow"));
    std::fs::write(d.join("cooc.txt"), "not a matrix\n").unwrap();
    assert_eq!(code(d, &["weight", "--cooc", "cooc.txt"]), 2);
    std::fs::write(d.join("empty.txt"), "\n").unwrap();
    ok(d, &["slice", "empty.txt", "--tokens", "10"]);
    ok(d, &["cooc", "--vocab", "vocab.txt", "--slice", "slice.tokens", "--out", "c.txt"]);
    assert_eq!(code(d, &["weight", "--cooc", "c.txt"]), 3);
}

#[test]
fn stages_chain_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--tokens", "20000", "--out", "data"]);
    let tokens = ok(d, &["tokenize", "data/corpus.txt"]);
    assert!(tokens.lines().count() > 1);
    ok(d, &["slice", "data/corpus.txt", "--tokens", "20000", "--out", "s"]);
    let slice = ["--vocab", "s/vocab.txt", "--slice", "s/slice.tokens"];
    ok(d, &[&["cooc"][..], &slice, &["--out", "cooc.txt"]].concat());
    ok(d, &["weight", "--cooc", "cooc.txt", "--out", "ppmi.txt"]);
    ok(d, &["factorize", "--weights", "ppmi.txt", "--vocab", "s/vocab.txt", "--rank", "60", "--tsvd-dim", "20", "--isvd-remove", "20", "--out", "f"]);
    ok(d, &[&["ri"][..], &slice, &["--dim", "64", "--out", "ri.vec"]].concat());
    ok(d, &[&["train"][..], &slice, &["--dim", "8", "--epochs", "1", "--out", "sg.vec"]].concat());
    assert!(d.join("ri.manifest").exists());

    let bench = ["--benchmark", "TOEFL:choice:data/toefl.txt", "--benchmark", "MEN:rating:data/men.txt"];
    for v in ["f/tsvd.vec", "f/isvd.vec", "ri.vec", "sg.vec"] {
        let report = ok(d, &[&["eval", "--vectors", v, "--freqs", "s/vocab.txt"][..], &bench].concat());
        assert!(report.contains("TOEFL") && report.contains("MEDIUM"), "{report}");
    }
    let sparse = ok(d, &[&["eval", "--weights", "ppmi.txt", "--vocab", "s/vocab.txt", "--name", "ppmi"][..], &bench].concat());
    assert!(sparse.contains("ppmi"));
    let split = ok(d, &[&["freqsplit", "--freqs", "s/vocab.txt"][..], &bench].concat());
    assert!(split.contains("HIGH"));
}

#[test]
fn single_threaded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = small_config(d, "\"co\", \"ppmi\", \"tsvd\", \"isvd\", \"ri\", \"sgns\", \"cbow\"");
    let cfg = cfg.to_str().unwrap();
    let first = ok(d, &["run", "--config", cfg, "--threads", "1", "--out", "a"]);
    let second = ok(d, &["run", "--config", cfg, "--threads", "1", "--out", "b"]);
    assert_eq!(first, second);
    for rel in ["report.txt", "partition.txt", "10k/report.txt", "30k/records.txt", "30k/isvd.vec", "30k/sgns.vec", "30k/cbow.vec", "10k/ri.vec"] {
        let a = std::fs::read(d.join("a").join(rel)).unwrap();
        let b = std::fs::read(d.join("b").join(rel)).unwrap();
        assert!(a == b, "{rel} differs");
    }
}
