use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use dtfsel_core::chunker::{chunk_document, ChunkParams, TargetPolicy};
use dtfsel_core::corpus::{load_corpus, Label, LABELS};
use dtfsel_core::embedding::load_embeddings;
use dtfsel_core::features::{
    featurize, fit_corpus_idf, read_features, write_features, Feature, FeatureVector,
    LabeledFeatureSet,
};
use dtfsel_core::lexical::{load_tags, HeuristicTagger, PosTagger};
use dtfsel_core::selection::{
    build_profile, sample_fewshot, select, Grouping, Method, ProfileParams, ReferenceProfile,
    SelectionParams, SelectionResult,
};
use dtfsel_core::stats::{
    balanced_accuracy, feature_mean_diff_report, pair_runs, quadratic_weighted_kappa,
    wilcoxon_signed_rank_with, BalancedMode, ModeChoice, PairedAccuracySeries, WilcoxonOptions,
    ZeroMethod,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{set, RunConfig};
use crate::manifest::write_atomic;

/// What a command read, wrote and seeded, for the manifest.
pub struct Run {
    pub command: String,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<(String, PathBuf)>,
    pub outputs: Vec<(String, PathBuf)>,
    /// Printed on stdout after the manifest is written.
    pub stdout: Option<String>,
}

impl Run {
    fn new(command: &str) -> Self {
        Run {
            command: command.to_string(),
            seeds: BTreeMap::new(),
            inputs: vec![],
            outputs: vec![],
            stdout: None,
        }
    }

    fn input(mut self, role: &str, path: &Path) -> Self {
        self.inputs.push((role.to_string(), path.to_path_buf()));
        self
    }

    fn output(mut self, role: &str, path: &Path) -> Self {
        self.outputs.push((role.to_string(), path.to_path_buf()));
        self
    }

    fn seed(mut self, purpose: &str, seed: u64) -> Self {
        self.seeds.insert(purpose.to_string(), seed);
        self
    }
}

fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `out` when given, otherwise hands the text back for stdout.
fn emit(run: Run, role: &str, out: Option<&Path>, text: String) -> Result<Run> {
    match out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            Ok(run.output(role, path))
        }
        None => Ok(Run {
            stdout: Some(text),
            ..run
        }),
    }
}

// ------------------------------------------------------------------ chunk

#[derive(Debug, Args)]
pub struct ChunkArgs {
    /// JSONL of `{id, text}` documents.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// JSONL of `{id, chunk_index, text}` chunks.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Smallest chunk target in words [default: 150].
    #[arg(long)]
    pub min: Option<usize>,
    /// Largest chunk target in words [default: 800].
    #[arg(long)]
    pub max: Option<usize>,
    /// Draw a new target for every chunk or once per document [default: per-chunk].
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    PerChunk,
    PerDocument,
}

#[derive(Deserialize)]
struct Document {
    id: String,
    text: String,
}

#[derive(Serialize)]
struct ChunkRecord<'a> {
    id: &'a str,
    chunk_index: usize,
    text: &'a str,
}

pub fn chunk(cfg: &mut RunConfig, args: &ChunkArgs) -> Result<Run> {
    set(&mut cfg.chunk.min_words, args.min);
    set(&mut cfg.chunk.max_words, args.max);
    set(
        &mut cfg.chunk.target_policy,
        args.policy.map(|p| match p {
            PolicyArg::PerChunk => TargetPolicy::PerChunk,
            PolicyArg::PerDocument => TargetPolicy::PerDocument,
        }),
    );
    let seed = cfg.require_seed("chunk")?;
    let params = ChunkParams {
        min_words: cfg.chunk.min_words,
        max_words: cfg.chunk.max_words,
        seed,
        target_policy: cfg.chunk.target_policy,
    };
    params.validate()?;

    let text = read_text(&args.input)?;
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(line)
            .with_context(|| format!("{} line {}", args.input.display(), i + 1))?;
        docs.push(doc);
    }
    let chunks: Vec<Vec<String>> = docs
        .par_iter()
        .map(|d| chunk_document(&d.id, &d.text, &params))
        .collect::<dtfsel_core::Result<_>>()?;

    let mut out = String::new();
    let mut total = 0;
    for (doc, pieces) in docs.iter().zip(&chunks) {
        if pieces.is_empty() {
            log::warn!("document `{}` is shorter than {} words; no chunk emitted", doc.id, params.min_words);
        }
        for (i, text) in pieces.iter().enumerate() {
            out += &serde_json::to_string(&ChunkRecord {
                id: &doc.id,
                chunk_index: i,
                text,
            })?;
            out.push('\n');
            total += 1;
        }
    }
    log::info!("{} documents -> {total} chunks", docs.len());
    write_atomic(&args.out, out.as_bytes())?;
    Ok(Run::new("chunk")
        .input("texts", &args.input)
        .output("chunks", &args.out)
        .seed("chunk", seed))
}

// -------------------------------------------------------------- featurize

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// Corpus JSONL.
    #[arg(long, value_name = "PATH")]
    pub corpus: PathBuf,
    /// Embedding JSONL with context, question, answer and rubric_fc vectors.
    #[arg(long, value_name = "PATH")]
    pub embeddings: PathBuf,
    /// Precomputed answer POS tags (JSONL); the built-in heuristic tagger is used otherwise.
    #[arg(long, value_name = "PATH")]
    pub tags: Option<PathBuf>,
    /// Feature table (TSV).
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Fail on the first malformed corpus record instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

pub fn featurize_cmd(cfg: &mut RunConfig, args: &FeaturizeArgs) -> Result<Run> {
    cfg.featurize.strict |= args.strict;
    let (corpus, report) = load_corpus(&args.corpus, cfg.featurize.strict)?;
    for s in &report.skipped {
        log::warn!("{} line {}: skipped ({})", args.corpus.display(), s.line, s.reason);
    }
    let emb = load_embeddings(&args.embeddings)?;
    let tagger: Box<dyn PosTagger> = match &args.tags {
        Some(p) => Box::new(load_tags(p)?),
        None => Box::new(HeuristicTagger),
    };
    let idf = fit_corpus_idf(&corpus)?;
    let set = featurize(&corpus, &idf, &emb, tagger.as_ref())?;
    let flagged = set.rows.iter().filter(|r| !r.degenerate.is_empty()).count();
    log::info!(
        "{} rows featurized ({} skipped, {flagged} with degenerate components, tagger {})",
        set.len(),
        report.skipped.len(),
        tagger.id()
    );
    let mut buf = Vec::new();
    write_features(&set, &mut buf)?;
    write_atomic(&args.out, &buf)?;
    let mut run = Run::new("featurize")
        .input("corpus", &args.corpus)
        .input("embeddings", &args.embeddings);
    if let Some(p) = &args.tags {
        run = run.input("tags", p);
    }
    Ok(run.output("features", &args.out))
}

// ---------------------------------------------------------------- profile

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Reference feature table (TSV).
    #[arg(long = "ref", value_name = "PATH")]
    pub reference: PathBuf,
    /// Profile JSON.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Number of k-means representatives [default: 8].
    #[arg(long)]
    pub k: Option<usize>,
    /// Embed the full reference matrix (needed by method 3).
    #[arg(long)]
    pub full: bool,
    /// Cluster each label separately (k representatives per label).
    #[arg(long)]
    pub per_label: bool,
    /// k-means restarts; the lowest-inertia run is kept [default: 1].
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Cluster raw feature values instead of z-scores.
    #[arg(long)]
    pub raw: bool,
    /// Also write the representatives as a TSV table.
    #[arg(long, value_name = "PATH")]
    pub dump_centers: Option<PathBuf>,
}

fn read_feature_file(path: &Path) -> Result<LabeledFeatureSet> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_features(file).with_context(|| format!("reading {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn centers_tsv(profile: &ReferenceProfile) -> String {
    let mut out = String::from("index\tlabel");
    for f in Feature::ALL {
        out.push('\t');
        out.push_str(f.name());
    }
    out.push('\n');
    for (i, r) in profile.representatives.iter().enumerate() {
        let label = r.label.map(|l| l.to_string()).unwrap_or_default();
        let _ = write!(out, "{i}\t{label}");
        for v in r.center.0 {
            let _ = write!(out, "\t{v}");
        }
        out.push('\n');
    }
    out
}

pub fn profile(cfg: &mut RunConfig, args: &ProfileArgs) -> Result<Run> {
    let p = &mut cfg.profile;
    set(&mut p.k, args.k);
    set(&mut p.restarts, args.restarts);
    p.include_full |= args.full;
    p.per_label |= args.per_label;
    if args.raw {
        p.standardize = false;
    }
    let seed = cfg.require_seed("profile")?;
    let p = &cfg.profile;
    let params = ProfileParams {
        k: p.k,
        seed,
        standardize: p.standardize,
        per_label: p.per_label,
        restarts: p.restarts,
        max_iter: p.max_iter,
        tol: p.tol,
        include_full: p.include_full,
    };
    let reference = read_feature_file(&args.reference)?;
    let profile = build_profile(&reference, &params)?;
    log::info!(
        "profile of {} rows, {} representatives",
        profile.n_rows,
        profile.representatives.len()
    );
    write_atomic(&args.out, to_json_line(&profile)?.as_bytes())?;
    let mut run = Run::new("profile")
        .input("reference_features", &args.reference)
        .output("profile", &args.out)
        .seed("kmeans", seed);
    if let Some(path) = &args.dump_centers {
        write_atomic(path, centers_tsv(&profile).as_bytes())?;
        run = run.output("centers", path);
    }
    Ok(run)
}

// ----------------------------------------------------------------- select

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GroupArg {
    Label,
    Domain,
    Global,
}

impl From<GroupArg> for Grouping {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Label => Grouping::Label,
            GroupArg::Domain => Grouping::Domain,
            GroupArg::Global => Grouping::Global,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// 1: nearest label mean, 2: nearest representative, 3: reference rank [default: 1].
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub method: Option<u8>,
    /// Profile JSON from `profile`.
    #[arg(long, value_name = "PATH")]
    pub profile: PathBuf,
    /// Candidate feature table (TSV).
    #[arg(long, value_name = "PATH")]
    pub cand: PathBuf,
    /// Share of each group to keep [default: 0.05].
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Reference rows averaged by method 3 [default: 5].
    #[arg(long)]
    pub m: Option<usize>,
    /// Representatives expected in the profile (method 2) [default: 8].
    #[arg(long)]
    pub k: Option<usize>,
    /// Compare raw feature values instead of z-scores.
    #[arg(long)]
    pub raw: bool,
    /// Method 3: keep the scored candidate itself in the ranking pool.
    #[arg(long)]
    pub include_self: bool,
    /// Override the method's quota grouping.
    #[arg(long, value_enum)]
    pub group: Option<GroupArg>,
    /// Selection JSON.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

pub fn select_cmd(cfg: &mut RunConfig, args: &SelectArgs) -> Result<Run> {
    let s = &mut cfg.select;
    set(&mut s.method, args.method);
    set(&mut s.fraction, args.fraction);
    set(&mut s.m, args.m);
    set(&mut s.k, args.k);
    s.include_self |= args.include_self;
    if args.raw {
        s.standardized = false;
    }
    if let Some(g) = args.group {
        s.grouping = Some(g.into());
    }
    let method = Method::try_from(s.method)?;
    let profile: ReferenceProfile = serde_json::from_str(&read_text(&args.profile)?)
        .with_context(|| format!("parsing profile {}", args.profile.display()))?;
    let cand = read_feature_file(&args.cand)?;
    let params = SelectionParams {
        fraction: s.fraction,
        k: s.k,
        m: s.m,
        standardized: s.standardized,
        grouping: s.grouping.unwrap_or(method.default_grouping()),
        include_self: s.include_self,
        seed: profile.params.seed,
    };
    let result = select(method, &profile, &cand, params)?;
    log::info!(
        "method {}: {} of {} candidates selected",
        method.number(),
        result.selected_ids.len(),
        cand.len()
    );
    write_atomic(&args.out, to_json_line(&result)?.as_bytes())?;
    Ok(Run::new("select")
        .input("profile", &args.profile)
        .input("candidate_features", &args.cand)
        .output("selection", &args.out))
}

// ---------------------------------------------------------------- fewshot

#[derive(Debug, Args)]
pub struct FewshotArgs {
    /// Selection JSON from `select`.
    #[arg(long, value_name = "PATH")]
    pub selection: PathBuf,
    /// Examples drawn per domain [default: 2].
    #[arg(long)]
    pub per_domain: Option<usize>,
    /// Output JSON; printed to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Pick {
    id: String,
    domain: String,
}

#[derive(Serialize)]
struct FewshotOutput {
    per_domain: usize,
    seed: u64,
    picks: Vec<Pick>,
}

pub fn fewshot(cfg: &mut RunConfig, args: &FewshotArgs) -> Result<Run> {
    set(&mut cfg.fewshot.per_domain, args.per_domain);
    let seed = cfg.require_seed("fewshot")?;
    let selection: SelectionResult = serde_json::from_str(&read_text(&args.selection)?)
        .with_context(|| format!("parsing selection {}", args.selection.display()))?;
    let ids = sample_fewshot(&selection, cfg.fewshot.per_domain, seed)?;
    let domain_of: BTreeMap<&str, &str> = selection
        .scores
        .iter()
        .map(|s| (s.id.as_str(), s.domain.as_str()))
        .collect();
    let output = FewshotOutput {
        per_domain: cfg.fewshot.per_domain,
        seed,
        picks: ids
            .iter()
            .map(|id| Pick {
                id: id.clone(),
                domain: domain_of[id.as_str()].to_string(),
            })
            .collect(),
    };
    let run = Run::new("fewshot")
        .input("selection", &args.selection)
        .seed("fewshot", seed);
    emit(run, "fewshot", args.out.as_deref(), to_json_line(&output)?)
}

// ----------------------------------------------------------------- report

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Reference: a profile JSON or a feature table TSV.
    #[arg(long = "ref", value_name = "PATH")]
    pub reference: PathBuf,
    /// Feature tables to compare against the reference.
    #[arg(long, value_name = "PATH", num_args = 1.., required = true)]
    pub datasets: Vec<PathBuf>,
    /// Column names, one per dataset [default: file stems].
    #[arg(long, num_args = 1..)]
    pub names: Vec<String>,
    /// Decimals in the table [default: 4].
    #[arg(long)]
    pub precision: Option<usize>,
    /// Markdown output; printed to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn reference_means(path: &Path) -> Result<FeatureVector> {
    if path.extension().is_some_and(|e| e == "json") {
        let profile: ReferenceProfile = serde_json::from_str(&read_text(path)?)
            .with_context(|| format!("parsing profile {}", path.display()))?;
        Ok(profile.feature_means)
    } else {
        Ok(read_feature_file(path)?.mean()?)
    }
}

pub fn report(cfg: &mut RunConfig, args: &ReportArgs) -> Result<Run> {
    set(&mut cfg.report.precision, args.precision);
    ensure!(
        args.names.is_empty() || args.names.len() == args.datasets.len(),
        "--names needs one name per dataset ({} given for {})",
        args.names.len(),
        args.datasets.len()
    );
    let means = reference_means(&args.reference)?;
    let sets = args
        .datasets
        .iter()
        .map(|p| read_feature_file(p))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = if args.names.is_empty() {
        args.datasets
            .iter()
            .map(|p| p.file_stem().unwrap_or_default().to_string_lossy().into_owned())
            .collect()
    } else {
        args.names.clone()
    };
    let others: Vec<(&str, &LabeledFeatureSet)> =
        names.iter().map(String::as_str).zip(sets.iter()).collect();
    let table = feature_mean_diff_report(&means, &others)?.to_markdown(cfg.report.precision);
    let mut run = Run::new("report").input("reference", &args.reference);
    for p in &args.datasets {
        run = run.input("dataset", p);
    }
    emit(run, "report", args.out.as_deref(), table)
}

// --------------------------------------------------------------- evaluate

#[derive(Debug, Subcommand)]
pub enum EvaluateCommand {
    /// Wilcoxon signed-rank test on paired accuracy series (`step,accuracy` CSV).
    Wilcoxon(WilcoxonArgs),
    /// Quadratic weighted kappa on `id,true,pred` CSV pairs.
    Qwk(PairsArgs),
    /// Class-balanced accuracy on `id,true,pred` CSV pairs.
    BalancedAcc(BalancedArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ZeroArg {
    Wilcox,
    Pratt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Args)]
pub struct WilcoxonArgs {
    /// Series of arm A; several files are paired run-by-run with a seeded shuffle.
    #[arg(long, value_name = "PATH", num_args = 1.., required = true)]
    pub series_a: Vec<PathBuf>,
    /// Series of arm B, as many files as arm A.
    #[arg(long, value_name = "PATH", num_args = 1.., required = true)]
    pub series_b: Vec<PathBuf>,
    /// Treatment of zero differences [default: wilcox].
    #[arg(long, value_enum)]
    pub zero_method: Option<ZeroArg>,
    /// p-value computation [default: auto].
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    #[arg(long, value_name = "PATH")]
    pub pairs: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BalancedArg {
    Resample,
    Macro,
}

#[derive(Debug, Args)]
pub struct BalancedArgs {
    #[arg(long, value_name = "PATH")]
    pub pairs: PathBuf,
    /// Downsample to the minority class, or average per-class recall [default: resample].
    #[arg(long, value_enum)]
    pub mode: Option<BalancedArg>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct SeriesRow {
    step: u64,
    accuracy: f64,
}

#[derive(Deserialize)]
struct PairRow {
    #[allow(dead_code)]
    id: String,
    #[serde(rename = "true")]
    truth: Label,
    pred: Label,
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.with_context(|| format!("{} row {}", path.display(), i + 1)))
        .collect()
}

fn read_series(path: &Path) -> Result<(Vec<u64>, Vec<f64>)> {
    let rows: Vec<SeriesRow> = read_csv(path)?;
    ensure!(!rows.is_empty(), "{} holds no rows", path.display());
    Ok(rows.into_iter().map(|r| (r.step, r.accuracy)).unzip())
}

#[derive(Serialize)]
struct WilcoxonReport {
    n_pairs: usize,
    n_effective: usize,
    statistic: f64,
    rank_sum_positive: f64,
    rank_sum_negative: f64,
    p_value: f64,
    mode: dtfsel_core::stats::WilcoxonMode,
    /// Mean of `a - b`.
    mean_gain: f64,
}

pub fn wilcoxon(cfg: &mut RunConfig, args: &WilcoxonArgs) -> Result<Run> {
    let e = &mut cfg.evaluate;
    set(
        &mut e.zero_method,
        args.zero_method.map(|z| match z {
            ZeroArg::Wilcox => ZeroMethod::Wilcox,
            ZeroArg::Pratt => ZeroMethod::Pratt,
        }),
    );
    set(
        &mut e.wilcoxon_mode,
        args.mode.map(|m| match m {
            ModeArg::Auto => ModeChoice::Auto,
            ModeArg::Exact => ModeChoice::Exact,
            ModeArg::Normal => ModeChoice::Normal,
        }),
    );
    ensure!(
        args.series_a.len() == args.series_b.len(),
        "arm A has {} series but arm B has {}",
        args.series_a.len(),
        args.series_b.len()
    );
    let a = args.series_a.iter().map(|p| read_series(p)).collect::<Result<Vec<_>>>()?;
    let b = args.series_b.iter().map(|p| read_series(p)).collect::<Result<Vec<_>>>()?;
    let steps = &a[0].0;
    for (path, (s, _)) in args.series_a.iter().chain(&args.series_b).zip(a.iter().chain(&b)) {
        ensure!(s == steps, "{} is evaluated at different steps than {}", path.display(), args.series_a[0].display());
    }
    let mut run = Run::new("evaluate wilcoxon");
    let diffs = if a.len() == 1 {
        PairedAccuracySeries::new(steps.clone(), a[0].1.clone(), b[0].1.clone())?.diffs()
    } else {
        let seed = cfg.require_seed("pairing several runs per arm")?;
        run = run.seed("pairing", seed);
        let arm = |x: &[(Vec<u64>, Vec<f64>)]| x.iter().map(|(_, acc)| acc.clone()).collect::<Vec<_>>();
        pair_runs(&arm(&a), &arm(&b), seed)?
    };
    let opts = WilcoxonOptions {
        zero_method: cfg.evaluate.zero_method,
        mode: cfg.evaluate.wilcoxon_mode,
    };
    let o = wilcoxon_signed_rank_with(&diffs, &opts)?;
    let rep = WilcoxonReport {
        n_pairs: diffs.len(),
        n_effective: o.n_effective,
        statistic: o.statistic,
        rank_sum_positive: o.rank_sum_positive,
        rank_sum_negative: o.rank_sum_negative,
        p_value: o.p_value,
        mode: o.mode,
        mean_gain: o.mean_difference,
    };
    for p in &args.series_a {
        run = run.input("series_a", p);
    }
    for p in &args.series_b {
        run = run.input("series_b", p);
    }
    emit(run, "result", args.out.as_deref(), to_json_line(&rep)?)
}

fn read_pairs(path: &Path) -> Result<(Vec<Label>, Vec<Label>)> {
    let rows: Vec<PairRow> = read_csv(path)?;
    ensure!(!rows.is_empty(), "{} holds no pairs", path.display());
    for (i, r) in rows.iter().enumerate() {
        if !LABELS.contains(&r.truth) || !LABELS.contains(&r.pred) {
            bail!("{} row {}: labels must be 0, 1 or 2", path.display(), i + 1);
        }
    }
    Ok(rows.into_iter().map(|r| (r.truth, r.pred)).unzip())
}

pub fn qwk(_cfg: &mut RunConfig, args: &PairsArgs) -> Result<Run> {
    let (t, p) = read_pairs(&args.pairs)?;
    let kappa = quadratic_weighted_kappa(&t, &p, &LABELS)?;
    let text = to_json_line(&serde_json::json!({ "n": t.len(), "qwk": kappa }))?;
    let run = Run::new("evaluate qwk").input("pairs", &args.pairs);
    emit(run, "result", args.out.as_deref(), text)
}

pub fn balanced(cfg: &mut RunConfig, args: &BalancedArgs) -> Result<Run> {
    set(
        &mut cfg.evaluate.balanced_mode,
        args.mode.map(|m| match m {
            BalancedArg::Resample => BalancedMode::Resample,
            BalancedArg::Macro => BalancedMode::Macro,
        }),
    );
    let mode = cfg.evaluate.balanced_mode;
    let mut run = Run::new("evaluate balanced-acc").input("pairs", &args.pairs);
    let seed = match mode {
        BalancedMode::Resample => {
            let s = cfg.require_seed("resampled balanced accuracy")?;
            run = run.seed("resample", s);
            s
        }
        BalancedMode::Macro => cfg.seed.unwrap_or(0),
    };
    let (t, p) = read_pairs(&args.pairs)?;
    let acc = balanced_accuracy(&t, &p, &LABELS, seed, mode)?;
    let text = to_json_line(&serde_json::json!({
        "n": t.len(), "mode": mode, "balanced_accuracy": acc,
    }))?;
    emit(run, "result", args.out.as_deref(), text)
}
