//! The `policy-mcdm` command line.
//!
//! Human-readable summaries go to standard output; files are only written
//! through `--out` style flags. Exit codes: 0 success, 1 validation, 2 I/O,
//! 3 provider, 4 partial run.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aggregation::{aggregate, compare_rankings, AggregationResult, RankComparison};
use crate::analysis::{rank_table, AnalysisError, CriteriaSelection, RankingRequest, WeightSpec};
use crate::io::{
    self, load_acs_csv, load_acs_csv_with, load_catalogs, load_criteria, load_etable,
    load_ranking, resolve_manifest_path, save_acs_csv, save_partial_acs_csv, FileDigest, IoError, ManifestStep, RunManifest,
    StepSettings,
};
use crate::model::{AlternativeId, ModelError};
use crate::rules::{EvaluationTable, PreferenceFunction, RuleError, RuleId, RuleParams, SawNormalization};
use crate::scoring::{
    score_table, CellOptions, DecodingParams, HttpChatProvider, LiveConfig, LlmProvider, PromptTemplate, RangePolicy,
    RetryPolicy, ScoreOptions, ScoringError, ScriptedProvider, TranscriptArchive,
};

#[derive(Debug, Parser)]
#[command(name = "policy-mcdm", version, about = "Rank, aggregate, score and compare policy alternatives")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply decision rules to an ACS table and write the E table.
    Rank(RankArgs),
    /// Borda, simple median and averaged-rank median of an E table.
    Aggregate(AggregateArgs),
    /// Fill an ACS table by querying an LLM provider.
    Score(ScoreArgs),
    /// Compare two orderings over their common alternatives.
    Compare(CompareArgs),
    /// Rerun the steps of a manifest and check the outputs byte for byte.
    Replay(ReplayArgs),
    /// Serve the session API over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SawNorm {
    DivideByMax,
    MinMax,
}

impl From<SawNorm> for SawNormalization {
    fn from(v: SawNorm) -> Self {
        match v {
            SawNorm::DivideByMax => SawNormalization::DivideByMax,
            SawNorm::MinMax => SawNormalization::MinMax,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RangeArg {
    Midpoint,
    Lower,
    Upper,
}

impl From<RangeArg> for RangePolicy {
    fn from(v: RangeArg) -> Self {
        match v {
            RangeArg::Midpoint => RangePolicy::Midpoint,
            RangeArg::Lower => RangePolicy::Lower,
            RangeArg::Upper => RangePolicy::Upper,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    /// ACS table (`id,name,<criteria>` CSV).
    #[arg(long)]
    pub table: PathBuf,
    /// Criterion definitions; defaults to the table's `.criteria.toml` sidecar.
    #[arg(long)]
    pub criteria_file: Option<PathBuf>,
    /// `equal`, or a TOML file mapping criterion ids to weights.
    #[arg(long, default_value = "equal")]
    pub weights: String,
    /// `all`, `qol` (Q1..Q9), `ma` (mitigation, adaptation) or a comma list.
    #[arg(long, default_value = "all")]
    pub criteria: String,
    /// `all` or a comma list of rule names or codes (D1..D9).
    #[arg(long, default_value = "all")]
    pub rules: String,
    /// Hurwicz optimism coefficient.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = SawNorm::DivideByMax)]
    pub saw_normalization: SawNorm,
    /// PROMETHEE preference function: `usual` or `linear:q:p`.
    #[arg(long, default_value = "usual")]
    pub promethee: String,
    /// E table output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record this run in a manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub etable: PathBuf,
    /// A table output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// Catalog files holding `[[alternative]]` and `[[criterion]]` entries.
    #[arg(long, num_args = 1.., required = true)]
    pub catalog: Vec<PathBuf>,
    /// Query template; defaults to the canonical one.
    #[arg(long)]
    pub template: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub scale_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub scale_max: f64,
    /// `mock:SCRIPT` or `live` (configured through MCDM_LLM_* variables).
    #[arg(long)]
    pub provider: String,
    /// ACS table output; the criteria sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Transcript archive; defaults to `<out stem>.transcripts.ndjson`.
    #[arg(long)]
    pub archive: Option<PathBuf>,
    /// Write unparsed cells to a worklist instead of failing.
    #[arg(long)]
    pub allow_partial: bool,
    /// Worklist output; defaults to `<out stem>.worklist.csv`.
    #[arg(long)]
    pub worklist: Option<PathBuf>,
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// Attempts per cell.
    #[arg(long)]
    pub retries: Option<u32>,
    /// Comma list of policy ids; defaults to every catalog policy.
    #[arg(long)]
    pub policies: Option<String>,
    /// `all`, `qol`, `ma` or a comma list of criterion ids.
    #[arg(long, default_value = "all")]
    pub criteria: String,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long, value_enum, default_value_t = RangeArg::Midpoint)]
    pub range_policy: RangeArg,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Id list, or a CSV with an `id` column.
    #[arg(long)]
    pub ranking_a: PathBuf,
    #[arg(long)]
    pub ranking_b: PathBuf,
    /// Column of `ranking_a` to sort by, descending.
    #[arg(long)]
    pub by_a: Option<String>,
    #[arg(long)]
    pub by_b: Option<String>,
    /// Comparison as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Validation = 1,
    Io = 2,
    Provider = 3,
    Partial = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self { kind: ExitKind::Validation, message: message.into() }
    }

    pub fn code(&self) -> u8 {
        self.kind as u8
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let kind = if matches!(e, IoError::Io { .. }) { ExitKind::Io } else { ExitKind::Validation };
        Self { kind, message: e.to_string() }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<RuleError> for CliError {
    fn from(e: RuleError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<ScoringError> for CliError {
    fn from(e: ScoringError) -> Self {
        let kind = match &e {
            ScoringError::CellFailed { .. } => ExitKind::Provider,
            ScoringError::Unparsed { .. } => ExitKind::Partial,
            ScoringError::Archive { .. } => ExitKind::Io,
            _ => ExitKind::Validation,
        };
        Self { kind, message: e.to_string() }
    }
}

fn write_err(e: std::io::Error) -> CliError {
    CliError { kind: ExitKind::Io, message: format!("stdout: {e}") }
}

type Out<'a> = &'a mut dyn Write;

/// Runs one parsed command, printing its summary to `out`.
pub fn run(cli: Cli, out: Out) -> Result<(), CliError> {
    match cli.command {
        Command::Rank(a) => rank(&a, out),
        Command::Aggregate(a) => aggregate_cmd(&a, out),
        Command::Score(a) => score(&a, out),
        Command::Compare(a) => compare(&a, out),
        Command::Replay(a) => replay(&a, out),
        Command::Serve(a) => serve(&a, out),
    }
}

/// Parses `std::env::args`, runs, and maps failures to exit codes.
pub fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            let _ = lock.flush();
            for line in e.message.lines() {
                eprintln!("error: {line}");
            }
            std::process::ExitCode::from(e.code())
        }
    }
}

fn manifest_base(manifest: &Path) -> PathBuf {
    manifest.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn rel(base: &Path, p: &Path) -> String {
    io::manifest_path(base, p)
}

fn rank_request(a: &RankArgs) -> Result<RankingRequest, CliError> {
    let criteria: CriteriaSelection = a.criteria.parse().map_err(CliError::validation)?;
    let weights = if a.weights == "equal" {
        WeightSpec::Equal
    } else {
        let path = Path::new(&a.weights);
        let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        let map: BTreeMap<String, f64> =
            toml::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        WeightSpec::ById(map)
    };
    let rules = RuleId::parse_list(&a.rules)?;
    let promethee: PreferenceFunction = a.promethee.parse()?;
    let params = RuleParams {
        hurwicz_alpha: a.alpha,
        saw_normalization: a.saw_normalization.into(),
        promethee_preference: promethee,
        ..RuleParams::default()
    };
    Ok(RankingRequest { criteria, weights, rules, params })
}

fn rank(a: &RankArgs, out: Out) -> Result<(), CliError> {
    let request = rank_request(a)?;
    let table = match &a.criteria_file {
        Some(c) => load_acs_csv_with(&a.table, &load_criteria(c)?)?,
        None => load_acs_csv(&a.table)?,
    };
    let r = rank_table(&table, &request)?;

    writeln!(out, "{} alternatives, criteria {}", table.m(), r.criteria.join(",")).map_err(write_err)?;
    let names: Vec<_> = r.evaluation.results.iter().map(|x| x.rule.name()).collect();
    let width = names.iter().map(|n| n.len()).max().unwrap_or(0);
    for res in &r.evaluation.results {
        let order: Vec<String> =
            res.ranks.preference_order().iter().map(|&i| table.alternatives()[i].id.to_string()).collect();
        writeln!(out, "{:<width$}  {}", res.rule.name(), order.join(" ")).map_err(write_err)?;
    }

    if let Some(path) = &a.out {
        io::save_etable(path, &r.evaluation.etable)?;
    }
    if let Some(m) = &a.manifest {
        let base = manifest_base(m);
        let mut args = vec!["--table".into(), rel(&base, &a.table)];
        let mut inputs = vec![FileDigest::of(&base, &a.table)?];
        match &a.criteria_file {
            Some(c) => {
                args.extend(["--criteria-file".into(), rel(&base, c)]);
                inputs.push(FileDigest::of(&base, c)?);
            }
            None => inputs.push(FileDigest::of(&base, &io::sidecar_path(&a.table))?),
        }
        if a.weights == "equal" {
            args.extend(["--weights".into(), "equal".into()]);
        } else {
            args.extend(["--weights".into(), rel(&base, Path::new(&a.weights))]);
            inputs.push(FileDigest::of(&base, Path::new(&a.weights))?);
        }
        args.extend([
            "--criteria".into(),
            a.criteria.clone(),
            "--rules".into(),
            a.rules.clone(),
            "--alpha".into(),
            a.alpha.to_string(),
            "--saw-normalization".into(),
            a.saw_normalization.to_possible_value().expect("no skipped variants").get_name().to_string(),
            "--promethee".into(),
            a.promethee.clone(),
        ]);
        let mut outputs = Vec::new();
        if let Some(p) = &a.out {
            args.extend(["--out".into(), rel(&base, p)]);
            outputs.push(FileDigest::of(&base, p)?);
        }
        let settings = StepSettings {
            rules: Some(r.evaluation.results.iter().map(|x| x.rule.name().to_string()).collect()),
            criteria: Some(r.criteria.clone()),
            weights: Some(r.weights.clone()),
            rule_params: Some(r.params),
            ..Default::default()
        };
        RunManifest::append_to(m, ManifestStep { command: "rank".into(), args, settings, inputs, outputs })?;
    }
    Ok(())
}

fn print_atable(out: Out, a: &AggregationResult) -> Result<(), CliError> {
    let width = a.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(4).max(4);
    writeln!(out, "{:>4}  {:<width$}  {:>8}  {:>6}  {:>6}", "id", "name", "borda", "median", "arm").map_err(write_err)?;
    for r in &a.rows {
        writeln!(
            out,
            "{:>4}  {:<width$}  {:>8.2}  {:>6.2}  {:>6.2}",
            r.id, r.name, r.borda, r.simple_median, r.averaged_rank_median
        )
        .map_err(write_err)?;
    }
    Ok(())
}

fn aggregate_cmd(a: &AggregateArgs, out: Out) -> Result<(), CliError> {
    let etable: EvaluationTable = load_etable(&a.etable)?;
    let result = aggregate(&etable);
    print_atable(out, &result)?;
    if let Some(path) = &a.out {
        io::save_atable(path, &result)?;
    }
    if let Some(m) = &a.manifest {
        let base = manifest_base(m);
        let mut args = vec!["--etable".into(), rel(&base, &a.etable)];
        let inputs = vec![FileDigest::of(&base, &a.etable)?];
        let mut outputs = Vec::new();
        if let Some(p) = &a.out {
            args.extend(["--out".into(), rel(&base, p)]);
            outputs.push(FileDigest::of(&base, p)?);
        }
        RunManifest::append_to(m, ManifestStep { command: "aggregate".into(), args, settings: StepSettings::default(), inputs, outputs })?;
    }
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

enum ProviderChoice {
    Mock(PathBuf),
    Live,
}

fn parse_provider(spec: &str) -> Result<ProviderChoice, CliError> {
    if spec == "live" {
        Ok(ProviderChoice::Live)
    } else if let Some(path) = spec.strip_prefix("mock:") {
        Ok(ProviderChoice::Mock(PathBuf::from(path)))
    } else {
        Err(CliError::validation(format!("provider must be `mock:SCRIPT` or `live`, got `{spec}`")))
    }
}

fn score(a: &ScoreArgs, out: Out) -> Result<(), CliError> {
    let catalog = load_catalogs(&a.catalog)?;
    let template = match &a.template {
        Some(p) => PromptTemplate::new(io::read_text(p)?.trim_end(), a.scale_min, a.scale_max)?,
        None => PromptTemplate::new(crate::scoring::CANONICAL_TEMPLATE.trim_end(), a.scale_min, a.scale_max)?,
    };
    let alternatives = match &a.policies {
        None => catalog.alternatives.clone(),
        Some(list) => list
            .split(',')
            .map(|s| {
                let id: AlternativeId =
                    s.trim().parse().map_err(|_| CliError::validation(format!("`{s}` is not a policy id")))?;
                catalog.alternative(id).cloned().ok_or_else(|| CliError::validation(format!("policy {id} is not in the catalog")))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let selection: CriteriaSelection = a.criteria.parse().map_err(CliError::validation)?;
    let criteria = match selection {
        CriteriaSelection::All => catalog.criteria.clone(),
        other => {
            let ids = match other {
                CriteriaSelection::Qol => crate::analysis::QOL.iter().map(|s| s.to_string()).collect(),
                CriteriaSelection::Ma => crate::analysis::CLIMATE.iter().map(|s| s.to_string()).collect(),
                CriteriaSelection::List(ids) => ids,
                CriteriaSelection::All => unreachable!(),
            };
            ids.iter()
                .map(|id| catalog.criterion(id).cloned().ok_or_else(|| CliError::validation(format!("criterion `{id}` is not in the catalog"))))
                .collect::<Result<Vec<_>, _>>()?
        }
    };

    let choice = parse_provider(&a.provider)?;
    let (provider, mut concurrency, mut retries): (Box<dyn LlmProvider>, usize, u32) = match &choice {
        ProviderChoice::Mock(script) => {
            let text = io::read_text(script)?;
            let p = ScriptedProvider::from_toml(&text).map_err(|e| CliError::validation(format!("{}: {e}", script.display())))?;
            (Box::new(p), 4, 3)
        }
        ProviderChoice::Live => {
            let cfg = LiveConfig::from_env().map_err(|e| CliError { kind: ExitKind::Provider, message: e.to_string() })?;
            let (c, r) = (cfg.concurrency, cfg.retries);
            let p = HttpChatProvider::new(cfg).map_err(|e| CliError { kind: ExitKind::Provider, message: e.to_string() })?;
            (Box::new(p), c, r)
        }
    };
    concurrency = a.concurrency.unwrap_or(concurrency);
    retries = a.retries.unwrap_or(retries);
    let retry = match choice {
        ProviderChoice::Mock(_) => RetryPolicy::immediate(retries),
        ProviderChoice::Live => RetryPolicy { max_attempts: retries, ..RetryPolicy::default() },
    };
    let options = ScoreOptions {
        concurrency,
        cell: CellOptions {
            retry,
            decoding: DecodingParams { temperature: a.temperature, ..DecodingParams::default() },
            range_policy: a.range_policy.into(),
        },
        allow_partial: a.allow_partial,
    };

    let archive_path = a.archive.clone().unwrap_or_else(|| with_suffix(&a.out, ".transcripts.ndjson"));
    let worklist_path = a.worklist.clone().unwrap_or_else(|| with_suffix(&a.out, ".worklist.csv"));
    let mut archive = TranscriptArchive::open(&archive_path)?;
    let before = archive.len();
    let run = score_table(provider.as_ref(), &template, &alternatives, &criteria, &options, &mut archive)?;

    writeln!(
        out,
        "scored {} x {} cells with {} ({} cached, {} new transcripts)",
        alternatives.len(),
        criteria.len(),
        provider.model(),
        run.cache_hits,
        archive.len() - before
    )
    .map_err(write_err)?;

    let mut outputs = Vec::new();
    let complete = run.is_complete();
    if complete {
        let table = run.table().expect("complete run")?;
        save_acs_csv(&a.out, &table)?;
        if worklist_path.exists() {
            std::fs::remove_file(&worklist_path).map_err(|e| IoError::io(&worklist_path, e))?;
        }
    } else {
        save_partial_acs_csv(&a.out, &run.alternatives, &run.criteria, &run.scores)?;
        let mut text = String::from("alternative_id,criterion_id\n");
        for c in &run.worklist {
            text.push_str(&format!("{},{}\n", c.alternative_id, c.criterion_id));
            writeln!(out, "needs a human score: {c}").map_err(write_err)?;
        }
        std::fs::write(&worklist_path, text).map_err(|e| IoError::io(&worklist_path, e))?;
    }

    if let Some(m) = &a.manifest {
        let base = manifest_base(m);
        let mut args = vec!["--catalog".to_string()];
        args.extend(a.catalog.iter().map(|c| rel(&base, c)));
        let mut inputs = a.catalog.iter().map(|c| FileDigest::of(&base, c)).collect::<Result<Vec<_>, _>>()?;
        if let Some(t) = &a.template {
            args.extend(["--template".into(), rel(&base, t)]);
            inputs.push(FileDigest::of(&base, t)?);
        }
        args.extend(["--scale-min".into(), a.scale_min.to_string(), "--scale-max".into(), a.scale_max.to_string()]);
        match parse_provider(&a.provider)? {
            ProviderChoice::Mock(script) => {
                args.extend(["--provider".into(), format!("mock:{}", rel(&base, &script))]);
                inputs.push(FileDigest::of(&base, &script)?);
            }
            ProviderChoice::Live => args.extend(["--provider".into(), "live".into()]),
        }
        args.extend(["--out".into(), rel(&base, &a.out), "--archive".into(), rel(&base, &archive_path)]);
        args.extend(["--worklist".into(), rel(&base, &worklist_path)]);
        if a.allow_partial {
            args.push("--allow-partial".into());
        }
        args.extend(["--concurrency".into(), concurrency.to_string(), "--retries".into(), retries.to_string()]);
        if let Some(p) = &a.policies {
            args.extend(["--policies".into(), p.clone()]);
        }
        args.extend(["--criteria".into(), a.criteria.clone()]);
        if let Some(t) = a.temperature {
            args.extend(["--temperature".into(), t.to_string()]);
        }
        args.extend([
            "--range-policy".into(),
            a.range_policy.to_possible_value().expect("no skipped variants").get_name().to_string(),
        ]);
        outputs.push(FileDigest::of(&base, &a.out)?);
        outputs.push(FileDigest::of(&base, &io::sidecar_path(&a.out))?);
        if !complete {
            outputs.push(FileDigest::of(&base, &worklist_path)?);
        }
        outputs.push(FileDigest::unpinned(&base, &archive_path));
        let settings = StepSettings {
            criteria: Some(criteria.iter().map(|c| c.id.clone()).collect()),
            provider_model: Some(provider.model().to_string()),
            decoding: Some(options.cell.decoding.clone()),
            ..Default::default()
        };
        RunManifest::append_to(m, ManifestStep { command: "score".into(), args, settings, inputs, outputs })?;
    }

    if complete {
        Ok(())
    } else {
        Err(CliError {
            kind: ExitKind::Partial,
            message: format!("{} cell(s) left for human entry in {}", run.worklist.len(), worklist_path.display()),
        })
    }
}

fn print_comparison(out: Out, c: &RankComparison) -> Result<(), CliError> {
    let list = |v: &[AlternativeId]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    writeln!(out, "common alternatives: {}", c.common_ids.len()).map_err(write_err)?;
    writeln!(out, "a: {}", list(&c.restricted_a)).map_err(write_err)?;
    writeln!(out, "b: {}", list(&c.restricted_b)).map_err(write_err)?;
    writeln!(out, "kendall tau-b: {:.4}", c.kendall_tau).map_err(write_err)?;
    writeln!(out, "spearman rho:  {:.4}", c.spearman_rho).map_err(write_err)?;
    for t in &c.top_k_overlap {
        writeln!(out, "top-{:<3} shared {}/{}", t.k, t.shared, t.k).map_err(write_err)?;
    }
    for d in &c.rank_deltas {
        writeln!(out, "id {:>4}: position {} -> {} ({:+})", d.id, d.position_a, d.position_b, d.delta).map_err(write_err)?;
    }
    Ok(())
}

fn compare(a: &CompareArgs, out: Out) -> Result<(), CliError> {
    let ra = load_ranking(&a.ranking_a, a.by_a.as_deref())?;
    let rb = load_ranking(&a.ranking_b, a.by_b.as_deref())?;
    let c = compare_rankings(&ra, &rb).map_err(|e| CliError::validation(e.to_string()))?;
    print_comparison(out, &c)?;
    if let Some(path) = &a.out {
        let mut json = serde_json::to_string_pretty(&c).expect("comparisons serialize");
        json.push('\n');
        std::fs::write(path, json).map_err(|e| IoError::io(path, e))?;
    }
    if let Some(m) = &a.manifest {
        let base = manifest_base(m);
        let mut args = vec!["--ranking-a".into(), rel(&base, &a.ranking_a), "--ranking-b".into(), rel(&base, &a.ranking_b)];
        if let Some(c) = &a.by_a {
            args.extend(["--by-a".into(), c.clone()]);
        }
        if let Some(c) = &a.by_b {
            args.extend(["--by-b".into(), c.clone()]);
        }
        let inputs = vec![FileDigest::of(&base, &a.ranking_a)?, FileDigest::of(&base, &a.ranking_b)?];
        let mut outputs = Vec::new();
        if let Some(p) = &a.out {
            args.extend(["--out".into(), rel(&base, p)]);
            outputs.push(FileDigest::of(&base, p)?);
        }
        RunManifest::append_to(m, ManifestStep { command: "compare".into(), args, settings: StepSettings::default(), inputs, outputs })?;
    }
    Ok(())
}

const PATH_FLAGS: [&str; 11] = [
    "--table",
    "--criteria-file",
    "--out",
    "--etable",
    "--template",
    "--archive",
    "--worklist",
    "--ranking-a",
    "--ranking-b",
    "--catalog",
    "--weights",
];

/// Resolves the recorded relative paths of `args` against `base`.
fn rebase_args(args: &[String], base: &Path) -> Vec<String> {
    let resolve = |s: &str| resolve_manifest_path(base, s).display().to_string();
    let mut out = Vec::with_capacity(args.len());
    let mut current: Option<&str> = None;
    for arg in args {
        if arg.starts_with("--") {
            current = PATH_FLAGS.iter().copied().find(|f| f == arg).or(if arg == "--provider" { Some("--provider") } else { None });
            out.push(arg.clone());
            continue;
        }
        match current {
            Some("--weights") if arg == "equal" => out.push(arg.clone()),
            Some("--provider") => match arg.strip_prefix("mock:") {
                Some(p) => out.push(format!("mock:{}", resolve(p))),
                None => out.push(arg.clone()),
            },
            Some(_) => out.push(resolve(arg)),
            None => out.push(arg.clone()),
        }
        if current != Some("--catalog") {
            current = None;
        }
    }
    out
}

fn replay(a: &ReplayArgs, out: Out) -> Result<(), CliError> {
    let manifest = RunManifest::load(&a.manifest)?;
    let base = manifest_base(&a.manifest);
    if manifest.steps.is_empty() {
        return Err(CliError::validation(format!("{} has no steps", a.manifest.display())));
    }
    let mut mismatches = Vec::new();
    for (k, step) in manifest.steps.iter().enumerate() {
        for input in &step.inputs {
            let path = resolve_manifest_path(&base, &input.path);
            let actual = io::file_sha256(&path)?;
            if input.sha256.as_deref().is_some_and(|d| d != actual) {
                return Err(CliError::validation(format!("step {} ({}): input {} changed since it was recorded", k + 1, step.command, input.path)));
            }
        }
        let mut argv = vec!["policy-mcdm".to_string(), step.command.clone()];
        argv.extend(rebase_args(&step.args, &base));
        let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::validation(format!("step {}: {e}", k + 1)))?;
        if matches!(cli.command, Command::Replay(_) | Command::Serve(_)) {
            return Err(CliError::validation(format!("step {}: `{}` cannot be replayed", k + 1, step.command)));
        }
        let mut sink = Vec::new();
        match run(cli, &mut sink) {
            Ok(()) => {}
            Err(e) if e.kind == ExitKind::Partial && step.command == "score" => {}
            Err(e) => return Err(e),
        }
        for output in &step.outputs {
            let Some(expected) = &output.sha256 else { continue };
            let actual = io::file_sha256(resolve_manifest_path(&base, &output.path))?;
            let same = &actual == expected;
            writeln!(out, "step {} {:<9} {:<40} {}", k + 1, step.command, output.path, if same { "identical" } else { "DIFFERS" })
                .map_err(write_err)?;
            if !same {
                mismatches.push(output.path.clone());
            }
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(CliError::validation(format!("replay produced different bytes for: {}", mismatches.join(", "))))
    }
}

fn serve(a: &ServeArgs, out: Out) -> Result<(), CliError> {
    let addr: std::net::SocketAddr =
        a.addr.parse().map_err(|_| CliError::validation(format!("`{}` is not a socket address", a.addr)))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError { kind: ExitKind::Io, message: e.to_string() })?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError { kind: ExitKind::Io, message: format!("bind {addr}: {e}") })?;
        writeln!(out, "listening on http://{}", listener.local_addr().unwrap_or(addr)).map_err(write_err)?;
        out.flush().map_err(write_err)?;
        axum::serve(listener, crate::service::router(crate::service::AppState::default()))
            .await
            .map_err(|e| CliError { kind: ExitKind::Io, message: e.to_string() })
    })
}
