mod config;

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use ontoqual::report::{compare_csv, compare_json, compare_markdown, CompareColumn, LabelFilterInfo};
use ontoqual::synth::{self, Skew, SynthParams};
use ontoqual::{metrics, parse_ntriples, Error, MetricReport, OntologyGraph, ParseMode, TripleStore};
use serde_json::json;

use config::{Format, RunConfig, RunFile, RunFlags};

/// Process exit codes. Stable; documented in the README.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INTERNAL: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const PARSE: u8 = 4;
    pub const EMPTY_ONTOLOGY: u8 = 5;
    pub const CONFIG: u8 = 6;
    pub const PARAMS: u8 = 7;
    pub const PARTIAL: u8 = 8;
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code, kind, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(exit::USAGE, "usage", message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(exit::CONFIG, "config", message)
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        Self::new(exit::IO, "io", format!("`{}`: {err}", path.display()))
    }

    /// Maps a library error raised while handling `path`.
    fn from_lib(path: &Path, err: Error) -> Self {
        let at = path.display();
        match err {
            Error::Io(e) => Self::io(path, e),
            Error::Syntax { .. } => Self::new(exit::PARSE, "parse", format!("`{at}`: {err}")),
            Error::EmptyOntology { .. } => Self::new(exit::EMPTY_ONTOLOGY, "empty-ontology", format!("`{at}`: {err}")),
            Error::Profile(_) | Error::UnknownProfile(_) => Self::config(err.to_string()),
            Error::Params(_) => Self::new(exit::PARAMS, "params", err.to_string()),
            other => Self::new(exit::INTERNAL, "internal", other.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.kind, self.message)
    }
}

#[derive(Parser)]
#[command(name = "ontoqual", version, about = "Structural quality metrics for RDF knowledge graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the metric report of one knowledge graph.
    Analyze(AnalyzeArgs),
    /// Analyze several knowledge graphs (one run file each) into one table.
    Compare(CompareArgs),
    /// Generate a synthetic knowledge graph with a ground-truth ledger.
    Synth(SynthArgs),
    /// Print parse statistics of an N-Triples file as JSON.
    Stats(StatsArgs),
}

#[derive(Args, Default)]
struct OutputFlags {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the generation timestamp so identical inputs give identical bytes.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    run: RunFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct CompareArgs {
    /// Run files, one per knowledge graph.
    #[arg(required = true, num_args = 2..)]
    runs: Vec<PathBuf>,
    /// Profile for run files that name none.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Start from a preset: tree, multi-parent or skewed.
    #[arg(long)]
    preset: Option<String>,
    /// Start from a TOML parameter file.
    #[arg(long, conflicts_with = "preset")]
    params: Option<PathBuf>,
    /// Write the worked example graph (showcase.nt) instead.
    #[arg(long, conflicts_with_all = ["preset", "params"])]
    showcase: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long)]
    multi_parent: Option<f64>,
    #[arg(long)]
    entities: Option<usize>,
    #[arg(long)]
    properties: Option<usize>,
    #[arg(long)]
    props_per_class: Option<f64>,
    /// `uniform` or `zipf:<exponent>`.
    #[arg(long)]
    skew: Option<Skew>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    triples_per_entity: Option<f64>,
    #[arg(long)]
    instantiated_fraction: Option<f64>,
    #[arg(long)]
    property_usage: Option<f64>,
    #[arg(long)]
    multi_type: Option<f64>,
    #[arg(long)]
    labels: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Stats(args) => cmd_stats(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("ontoqual: {failure}");
            ExitCode::from(failure.code)
        }
    }
}

fn load_store(path: &Path, mode: ParseMode) -> Result<TripleStore, Failure> {
    let file = File::open(path).map_err(|e| Failure::io(path, e))?;
    parse_ntriples(file, mode).map_err(|e| Failure::from_lib(path, e))
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Full pipeline for one configuration.
fn analyze(cfg: &RunConfig, timestamp: bool) -> Result<MetricReport, Failure> {
    let profile = cfg.load_profile()?;
    let data = load_store(&cfg.data, cfg.mode)?;
    let (graph, source) = match &cfg.ontology {
        Some(path) => {
            let onto = load_store(path, cfg.mode)?;
            let graph = OntologyGraph::load_ontology_triples(&onto, &profile).map_err(|e| Failure::from_lib(path, e))?;
            (graph, path.display().to_string())
        }
        None => {
            let graph = OntologyGraph::extract(&data, &profile).map_err(|e| Failure::from_lib(&cfg.data, e))?;
            (graph, "data".to_string())
        }
    };
    let (graph, _) = graph.prepare();

    let mut label_info = None;
    let data = match &cfg.lang_filter {
        None => data,
        Some(language) => {
            let predicate = profile
                .label_predicate
                .clone()
                .ok_or_else(|| Failure::config(format!("profile `{}` has no label_predicate for --lang-filter", profile.name)))?;
            let outcome = data.filter_by_label_language(&predicate, language);
            if let Some(w) = outcome.warning {
                eprintln!("ontoqual: warning: label filter `{language}`: {}", serde_json::to_value(w).unwrap_or_default());
            }
            label_info = Some(LabelFilterInfo {
                predicate,
                language: language.clone(),
                retained_subjects: outcome.retained_subjects.len(),
                warning: outcome.warning,
            });
            outcome.store
        }
    };

    let mut report = metrics::full_report(&data, &graph, &profile).map_err(|e| Failure::from_lib(&cfg.data, e))?;
    report.name = cfg.name.clone();
    report.provenance.ontology_source = source;
    report.provenance.label_filter = label_info;
    if timestamp {
        report.generated_at_unix = Some(now_unix());
    }
    let s = &report.statistics;
    eprintln!(
        "{}: {} classes, {} properties, {} triples, {} instances",
        report.name, s.classes, s.properties, s.triples, s.instances
    );
    Ok(report)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8, Failure> {
    let cfg = RunConfig::resolve(&args.run)?;
    let report = analyze(&cfg, !args.output.no_timestamp)?;
    let format = args.output.format.or(cfg.format).unwrap_or_default();
    let text = match format {
        Format::Json => report.to_json_string(),
        Format::Csv => report.to_csv(),
        Format::Markdown => report.to_markdown(),
    };
    emit(&text, args.output.out.as_deref().or(cfg.out.as_deref()))?;
    Ok(exit::OK)
}

fn cmd_compare(args: CompareArgs) -> Result<u8, Failure> {
    let flags = RunFlags { strict: args.strict, ..RunFlags::default() };
    let mut columns = Vec::new();
    for path in &args.runs {
        let outcome = RunFile::load(path).and_then(|mut file| {
            if file.profile.is_none() && file.profile_file.is_none() {
                file.profile = args.profile.clone();
            }
            let cfg = RunConfig::merge(&flags, file)?;
            analyze(&cfg, !args.output.no_timestamp)
        });
        columns.push(match outcome {
            Ok(report) => CompareColumn::Report(Box::new(report)),
            Err(failure) => {
                eprintln!("ontoqual: `{}`: {failure}", path.display());
                let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("kg").to_string();
                CompareColumn::Failed { name, error: failure.to_string() }
            }
        });
    }
    let text = match args.output.format.unwrap_or(Format::Markdown) {
        Format::Json => compare_json(&columns),
        Format::Csv => compare_csv(&columns),
        Format::Markdown => compare_markdown(&columns),
    };
    emit(&text, args.output.out.as_deref())?;
    let failed = columns.iter().any(|c| matches!(c, CompareColumn::Failed { .. }));
    Ok(if failed { exit::PARTIAL } else { exit::OK })
}

fn synth_params(args: &SynthArgs) -> Result<SynthParams, Failure> {
    let seed = args.seed.unwrap_or(0);
    let mut p = match (&args.preset, &args.params) {
        (Some(name), _) => SynthParams::preset(name, seed).map_err(|e| Failure::new(exit::PARAMS, "params", e.to_string()))?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            toml::from_str(&text).map_err(|e| Failure::new(exit::PARAMS, "params", format!("`{}`: {e}", path.display())))?
        }
        (None, None) => SynthParams::default(),
    };
    if let Some(v) = args.seed {
        p.seed = v;
    }
    macro_rules! set {
        ($($flag:ident => $field:ident),* $(,)?) => {
            $(if let Some(v) = args.$flag { p.$field = v; })*
        };
    }
    set!(
        classes => class_count,
        max_depth => max_depth,
        multi_parent => multi_parent_probability,
        entities => entity_count,
        properties => property_count,
        props_per_class => property_per_class_mean,
        skew => instantiation_skew,
        cycles => planted_cycles,
        triples_per_entity => triples_per_entity_mean,
        instantiated_fraction => instantiated_class_fraction,
        property_usage => property_usage_fraction,
        multi_type => multi_type_probability,
        labels => label_probability,
    );
    p.validate().map_err(|e| Failure::new(exit::PARAMS, "params", e.to_string()))?;
    Ok(p)
}

fn cmd_synth(args: SynthArgs) -> Result<u8, Failure> {
    std::fs::create_dir_all(&args.out).map_err(|e| Failure::io(&args.out, e))?;
    if args.showcase {
        let path = args.out.join("showcase.nt");
        std::fs::write(&path, synth::showcase().to_ntriples_string()).map_err(|e| Failure::io(&path, e))?;
        println!("wrote {}", path.display());
        return Ok(exit::OK);
    }
    let params = synth_params(&args)?;
    let kg = synth::generate_kg(&params).map_err(|e| Failure::from_lib(&args.out, e))?;
    kg.write_to_dir(&args.out).map_err(|e| Failure::from_lib(&args.out, e))?;
    println!("{}", kg.ledger.summary());
    println!("wrote data.nt, ontology.nt and ledger.json to {}", args.out.display());
    Ok(exit::OK)
}

fn cmd_stats(args: StatsArgs) -> Result<u8, Failure> {
    let mode = if args.strict { ParseMode::Strict } else { ParseMode::Lenient };
    let store = load_store(&args.data, mode)?;
    let text = serde_json::to_string_pretty(&json!({
        "parse": store.parse_stats(),
        "store": store.stats(),
    }))
    .expect("plain structs");
    println!("{text}");
    Ok(exit::OK)
}
