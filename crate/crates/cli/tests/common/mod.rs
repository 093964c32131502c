//! Drives the `dtfsel` binary over the bundled demo data.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_dtfsel");

pub fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("demo")
}

/// Copies the demo inputs into `dir/demo`, so that every path the pipeline
/// sees is relative to `dir`.
pub fn stage_demo(dir: &Path) {
    let dst = dir.join("demo");
    fs::create_dir_all(&dst).unwrap();
    for entry in fs::read_dir(demo_dir()).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, dst.join(p.file_name().unwrap())).unwrap();
    }
}

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("DTFSEL_THREADS")
        .env_remove("RUST_LOG")
        .output()
        .expect("spawning dtfsel")
}

pub fn run_ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "dtfsel {}: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Every pipeline stage on the demo data, outputs under `dir/out`.
pub const PIPELINE: &[&[&str]] = &[
    &["--seed", "11", "chunk", "--in", "demo/texts.jsonl", "--out", "out/chunks.jsonl"],
    &["featurize", "--corpus", "demo/reference.jsonl", "--embeddings", "demo/reference_embeddings.jsonl", "--out", "out/ref.tsv"],
    &["featurize", "--corpus", "demo/candidates.jsonl", "--embeddings", "demo/candidate_embeddings.jsonl", "--out", "out/cand.tsv"],
    &["--seed", "11", "profile", "--ref", "out/ref.tsv", "--full", "--out", "out/profile.json"],
    &["select", "--method", "1", "--profile", "out/profile.json", "--cand", "out/cand.tsv", "--out", "out/select1.json"],
    &["select", "--method", "2", "--profile", "out/profile.json", "--cand", "out/cand.tsv", "--out", "out/select2.json"],
    &["select", "--method", "3", "--profile", "out/profile.json", "--cand", "out/cand.tsv", "--out", "out/select3.json"],
    &["--seed", "11", "fewshot", "--selection", "out/select1.json", "--out", "out/fewshot.json"],
    &["report", "--ref", "out/profile.json", "--datasets", "out/ref.tsv", "out/cand.tsv", "--names", "ref", "cand", "--out", "out/report.md"],
    &["evaluate", "wilcoxon", "--series-a", "demo/series_a.csv", "--series-b", "demo/series_b.csv", "--out", "out/wilcoxon.json"],
    &["evaluate", "qwk", "--pairs", "demo/pairs.csv", "--out", "out/qwk.json"],
    &["--seed", "11", "evaluate", "balanced-acc", "--pairs", "demo/pairs.csv", "--out", "out/balanced.json"],
];

/// Runs the whole pipeline in `dir`, with `--threads` when given.
pub fn pipeline(dir: &Path, threads: Option<usize>) {
    stage_demo(dir);
    let t = threads.map(|n| n.to_string());
    for step in PIPELINE {
        let mut args: Vec<&str> = Vec::new();
        if let Some(t) = &t {
            args.extend(["--threads", t]);
        }
        args.extend_from_slice(step);
        run_ok(dir, &args);
    }
}

/// Name → bytes of every file the pipeline wrote.
pub fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir.join("out"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect()
}
