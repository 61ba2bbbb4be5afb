//! `ssg` — coherence scoring over semantic similarity graphs.
//!
//! Subcommands: `preprocess`, `score`, `ddt`, `it`, `sweep`. All randomness
//! flows from the single `--seed` value; identical invocations produce
//! byte-identical outputs.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use ssg_core::corpus::{read_corpus, read_sentence_vectors, write_corpus};
use ssg_core::evaluation::{write_report, write_sweep_csv};
use ssg_core::graph::dump_graph;
use ssg_core::preprocess::build_document;
use ssg_core::{
    build_graph, coherence_score, load_word_vectors, run_ddt, run_insertion, sweep, Approach,
    Document, EvalError, LemmaDictionary, SentenceVectorSource, SimilarityParams, StopwordList,
    Task,
};

use config::{parse_oov, validate, FileConfig, RunConfig};

#[derive(Parser)]
#[command(name = "ssg", about = "Text coherence scoring via semantic similarity graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess raw text files into a canonical corpus file
    Preprocess(PreprocessArgs),
    /// Score every corpus document and print "doc_id t_c" lines
    Score(RunArgs),
    /// Document discrimination task
    Ddt(RunArgs),
    /// Insertion task
    It(RunArgs),
    /// Accuracy across a parameter grid, emitted as CSV
    Sweep(SweepArgs),
}

#[derive(Args)]
struct PreprocessArgs {
    /// Config file with flat key = value settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory of UTF-8 text files, one document per file
    #[arg(long)]
    input_dir: PathBuf,
    /// Lemma dictionary file (surface<TAB>lemma per line)
    #[arg(long)]
    lemmas: Option<PathBuf>,
    /// Stopword file (one word per line)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Canonical corpus output path
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Config file with flat key = value settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// PAV, SSV or MSV
    #[arg(long)]
    approach: Option<Approach>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Word vectors in word2vec text format
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Precomputed sentence vectors (JSON lines)
    #[arg(long)]
    sentence_vectors: Option<PathBuf>,
    /// OOV policy: skip or random
    #[arg(long)]
    oov: Option<String>,
    /// Shuffles per document for the discrimination task
    #[arg(long)]
    permutations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Directory for per-document graph dumps (score only)
    #[arg(long)]
    dump_graph: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Task to sweep: ddt or it
    #[arg(long, default_value = "ddt")]
    task: String,
    /// Comma-separated grid values, e.g. 0,0.1,0.2
    #[arg(long)]
    grid: String,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let name = err
                .downcast_ref::<EvalError>()
                .map(error_name)
                .unwrap_or("error");
            eprintln!("{name}: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn error_name(err: &EvalError) -> &'static str {
    match err {
        EvalError::TooShort(_) => "TooShort",
        EvalError::EmptyEligibleSet => "EmptyEligibleSet",
        EvalError::UnsupportedApproach(_) => "UnsupportedApproach",
        EvalError::Embedding(_) => "EmbeddingError",
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Preprocess(args) => cmd_preprocess(args),
        Command::Score(args) => cmd_score(resolve(args)?),
        Command::Ddt(args) => cmd_task(resolve(args)?, Task::Ddt),
        Command::It(args) => cmd_task(resolve(args)?, Task::It),
        Command::Sweep(args) => {
            let task = match args.task.to_ascii_lowercase().as_str() {
                "ddt" => Task::Ddt,
                "it" => Task::It,
                other => bail!("task: unknown task '{other}' (expected 'ddt' or 'it')"),
            };
            let grid = parse_grid(&args.grid)?;
            cmd_sweep(resolve(args.run)?, task, &grid)
        }
    }
}

struct Resolved {
    config: RunConfig,
    dump_graph: Option<PathBuf>,
}

fn resolve(args: RunArgs) -> Result<Resolved> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let approach = match args.approach {
        Some(a) => a,
        None => file
            .approach
            .as_deref()
            .map(|s| s.parse().map_err(anyhow::Error::msg))
            .transpose()?
            .unwrap_or(Approach::Msv),
    };
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let oov_name = args.oov.or(file.oov).unwrap_or_else(|| "skip".to_string());
    let config = RunConfig {
        approach,
        alpha: args.alpha.or(file.alpha).unwrap_or(0.5),
        theta: args.theta.or(file.theta).unwrap_or(0.0),
        oov: parse_oov(&oov_name, seed)?,
        permutations: args.permutations.or(file.permutations).unwrap_or(20),
        seed,
        jobs: args.jobs.or(file.jobs),
        corpus: args
            .corpus
            .or(file.corpus)
            .context("corpus: no corpus path given (flag --corpus or config key)")?,
        embeddings: args.embeddings.or(file.embeddings),
        sentence_vectors: args.sentence_vectors.or(file.sentence_vectors),
        output: args.output.or(file.output),
    };
    validate(&config)?;
    if let Some(jobs) = config.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    Ok(Resolved {
        config,
        dump_graph: args.dump_graph,
    })
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let grid: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| anyhow::anyhow!("grid: bad value '{s}'")))
        .collect::<Result<_>>()?;
    if grid.is_empty() {
        bail!("grid: at least one value required");
    }
    Ok(grid)
}

fn vector_source(config: &RunConfig) -> Result<SentenceVectorSource> {
    if let Some(path) = &config.sentence_vectors {
        return Ok(read_sentence_vectors(path)?);
    }
    if let Some(path) = &config.embeddings {
        let store = load_word_vectors(path, config.oov)?;
        if store.duplicate_count > 0 {
            eprintln!(
                "warning: {} duplicate words in {} (last entry wins)",
                store.duplicate_count,
                path.display()
            );
        }
        return Ok(SentenceVectorSource::average(store));
    }
    bail!("embeddings: either an embeddings file or a sentence-vectors file is required")
}

fn load_corpus(config: &RunConfig) -> Result<Vec<Document>> {
    let docs = read_corpus(&config.corpus)?;
    if docs.is_empty() {
        return Err(EvalError::EmptyEligibleSet)
            .with_context(|| format!("corpus file {} is empty", config.corpus.display()));
    }
    Ok(docs)
}

/// Writes via a temp file in the target directory plus an atomic rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn cmd_preprocess(args: PreprocessArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let lemmas = args.lemmas.or(file.lemmas);
    let stopwords = args.stopwords.or(file.stopwords);
    let dict = match &lemmas {
        Some(p) => LemmaDictionary::load(p)?,
        None => LemmaDictionary::new(),
    };
    let stops = match &stopwords {
        Some(p) => StopwordList::load(p)?,
        None => StopwordList::new(),
    };

    let mut files: Vec<PathBuf> = fs::read_dir(&args.input_dir)
        .with_context(|| format!("cannot read {}", args.input_dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("input_dir: no files in {}", args.input_dir.display());
    }

    let mut docs = Vec::new();
    let mut failures = Vec::new();
    for path in &files {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let result = fs::read_to_string(path)
            .map_err(anyhow::Error::from)
            .and_then(|text| build_document(&id, &text, &dict, &stops).map_err(Into::into));
        match result {
            Ok(doc) => docs.push(doc),
            Err(err) => {
                eprintln!("warning: skipping {}: {err:#}", path.display());
                failures.push(id);
            }
        }
    }
    if docs.is_empty() {
        bail!("all {} input files failed preprocessing", failures.len());
    }

    let mut buf = Vec::new();
    write_corpus(&docs, &mut buf)?;
    write_atomic(&args.output, &buf)?;
    eprintln!(
        "wrote {} documents to {} ({} skipped)",
        docs.len(),
        args.output.display(),
        failures.len()
    );
    Ok(())
}

fn cmd_score(resolved: Resolved) -> Result<()> {
    let config = &resolved.config;
    let docs = load_corpus(config)?;
    let source = vector_source(config)?;
    let params = SimilarityParams {
        alpha: config.alpha,
        theta: config.theta,
    };

    let mut scored: Vec<(String, f64, Vec<u8>)> = docs
        .par_iter()
        .map(|doc| -> Result<_> {
            let attached = source.attach(doc)?;
            let graph = build_graph(&attached, config.approach, &params);
            let score = coherence_score(&graph);
            let dump = if resolved.dump_graph.is_some() {
                let mut buf = Vec::new();
                dump_graph(&graph, &mut buf)?;
                buf
            } else {
                Vec::new()
            };
            Ok((doc.id.clone(), score, dump))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.0.cmp(&b.0));

    if let Some(dir) = &resolved.dump_graph {
        fs::create_dir_all(dir)?;
        for (id, _, dump) in &scored {
            write_atomic(&dir.join(format!("{id}.graph")), dump)?;
        }
    }

    let mut out = String::new();
    for (id, score, _) in &scored {
        out.push_str(&format!("{id} {score}\n"));
    }
    print!("{out}");
    if let Some(path) = &config.output {
        write_atomic(path, out.as_bytes())?;
    }
    Ok(())
}

fn cmd_task(resolved: Resolved, task: Task) -> Result<()> {
    let config = &resolved.config;
    let docs = load_corpus(config)?;
    let source = vector_source(config)?;
    let params = SimilarityParams {
        alpha: config.alpha,
        theta: config.theta,
    };

    let report = match task {
        Task::Ddt => run_ddt(
            &docs,
            config.approach,
            &params,
            &source,
            config.permutations,
            config.seed,
        )?,
        Task::It => run_insertion(&docs, config.approach, &params, &source, config.seed)?,
    };

    println!(
        "{} approach={} accuracy={:.4} trials={} skipped={}",
        report.task,
        report.approach,
        report.accuracy,
        report.trials.len(),
        report.skipped.len()
    );
    if let Some(path) = &config.output {
        let mut buf = Vec::new();
        write_report(&report, &mut buf)?;
        write_atomic(path, &buf)?;
    }
    Ok(())
}

fn cmd_sweep(resolved: Resolved, task: Task, grid: &[f64]) -> Result<()> {
    let config = &resolved.config;
    let docs = load_corpus(config)?;
    let source = vector_source(config)?;

    let rows = sweep(
        &docs,
        config.approach,
        task,
        grid,
        &source,
        config.permutations,
        config.seed,
    )?;

    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    if let Some(path) = &config.output {
        write_atomic(path, &buf)?;
    }
    Ok(())
}
