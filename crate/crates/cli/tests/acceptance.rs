//! CLI acceptance: byte-identical sweep output for identical config and seed.

use std::fs;
use std::process::Command;

use ssg_core::corpus::{write_corpus, write_sentence_vectors};
use ssg_core::synth::{planted_corpus, PlantedConfig};
use ssg_core::SentenceVectorSource;

#[test]
fn sweep_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (docs, source) = planted_corpus(&PlantedConfig {
        n_docs: 10,
        ..Default::default()
    });
    let corpus = dir.path().join("corpus.jsonl");
    let mut buf = Vec::new();
    write_corpus(&docs, &mut buf).unwrap();
    fs::write(&corpus, buf).unwrap();

    let vectors = dir.path().join("vectors.jsonl");
    let table = match &source {
        SentenceVectorSource::Precomputed { table, .. } => table,
        _ => unreachable!(),
    };
    let mut entries: Vec<(&str, usize, &[f64])> = table
        .iter()
        .map(|((id, idx), v)| (id.as_str(), *idx, v.as_slice()))
        .collect();
    entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut buf = Vec::new();
    write_sentence_vectors(&entries, &mut buf).unwrap();
    fs::write(&vectors, buf).unwrap();

    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        format!(
            "approach = \"MSV\"\nseed = 42\npermutations = 6\ncorpus = {:?}\nsentence_vectors = {:?}\n",
            corpus, vectors
        ),
    )
    .unwrap();

    let run_once = |output: &std::path::Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_ssg"))
            .args([
                "sweep",
                "--config",
                config.to_str().unwrap(),
                "--task",
                "ddt",
                "--grid",
                "0,0.1,0.2,0.3",
                "--output",
                output.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(output).unwrap()
    };

    let first = run_once(&dir.path().join("a.csv"));
    let second = run_once(&dir.path().join("b.csv"));
    let ok = first == second && !first.is_empty();
    println!(
        "{} determinism: two sweep runs with identical config and seed are byte-identical",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}
