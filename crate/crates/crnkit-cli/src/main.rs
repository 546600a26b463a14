//! Command-line interface: analyze, apply, fuzz, export.
//!
//! Exit codes are stable for scripting:
//! 0 success, 1 I/O error, 2 parse error, 3 invalid network,
//! 4 operation precondition failure, 5 theorem invariant failure,
//! 64 usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crnkit::enlarge::{EnlargeError, EnlargementSpec, OpKind};
use crnkit::fuzz::{summarize, DeltaMutation, GenParams, SuiteConfig, TrialReport, Verdict};
use crnkit::metrics::NetworkMetrics;
use crnkit::model::Network;
use crnkit::textio::{
    network_to_json, parse_crn_with_warnings, parse_script, serialize_crn, CrnError,
};

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INVALID_NETWORK: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;
const EXIT_THEOREM: u8 = 5;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "crnkit",
    about = "Structural analysis and deficiency-monotone enlargement of reaction networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the structural invariants of a network.
    Analyze {
        /// Path to a .crn file.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Apply an enlargement script to a network, step by step.
    Apply {
        /// Path to a .crn file.
        input: PathBuf,
        /// Path to a JSON script.
        script: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Write the final network to this .crn file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized verification suite.
    Fuzz(FuzzArgs),
    /// Export a network, with its metrics, as JSON.
    Export {
        /// Path to a .crn file.
        input: PathBuf,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FuzzArgs {
    /// Trials per operation kind.
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Seed for the deterministic generator.
    #[arg(long, env = "CRNKIT_SEED", default_value_t = GenParams::default().seed)]
    seed: u64,
    /// Comma-separated operation kinds (default: all).
    #[arg(long, value_delimiter = ',')]
    kinds: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Directory for failure reproduction bundles.
    #[arg(long, default_value = "crnkit-failures")]
    bundle_dir: PathBuf,
    /// Inject an off-by-N fault into one kind's expected delta, e.g. "E6:+1".
    /// For exercising the failure path; a healthy build then exits 5.
    #[arg(long, hide = true)]
    mutate: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

/// Best-effort stdout. A consumer like `head` closing the pipe early is
/// normal: the command keeps running (file side effects still happen) and
/// the exit code is unaffected, matching usual Unix tool behavior.
struct Emit {
    closed: bool,
}

impl Emit {
    fn new() -> Self {
        Emit { closed: false }
    }

    fn text(&mut self, text: impl AsRef<str>) {
        if self.closed {
            return;
        }
        use std::io::Write;
        let stdout = std::io::stdout();
        let mut handle = stdout.lock();
        if handle.write_all(text.as_ref().as_bytes()).is_err() || handle.flush().is_err() {
            self.closed = true;
        }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.text(text.as_ref());
        self.text("\n");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    return ExitCode::SUCCESS;
                }
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut emit = Emit::new();
    match cli.command {
        Command::Analyze { input, format } => cmd_analyze(&mut emit, &input, format),
        Command::Apply {
            input,
            script,
            format,
            out,
        } => cmd_apply(&mut emit, &input, &script, format, out.as_deref()),
        Command::Fuzz(args) => cmd_fuzz(&mut emit, &args),
        Command::Export { input, out } => cmd_export(&mut emit, &input, out.as_deref()),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot write {}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    let text = read_file(path)?;
    let (network, warnings) = parse_crn_with_warnings(&text).map_err(|e| {
        let code = match e {
            CrnError::Syntax { .. } | CrnError::ZeroCoefficient { .. } => EXIT_PARSE,
            CrnError::SelfLoop { .. } | CrnError::EmptyNetwork => EXIT_INVALID_NETWORK,
        };
        Failure::new(code, format!("{}: {e}", path.display()))
    })?;
    for warning in warnings {
        eprintln!("warning: {}: {warning}", path.display());
    }
    Ok(network)
}

fn metrics_json(metrics: &NetworkMetrics, network: &Network) -> Value {
    let partition: Vec<Vec<String>> = crnkit::linkage_classes(network)
        .classes()
        .iter()
        .map(|class| class.iter().map(|c| c.canonical_text()).collect())
        .collect();
    json!({
        "metrics": metrics,
        "linkage_partition": partition,
    })
}

fn cmd_analyze(emit: &mut Emit, input: &Path, format: Format) -> Result<(), Failure> {
    let network = load_network(input)?;
    let metrics = crnkit::compute_metrics(&network);
    match format {
        Format::Json => emit.line(
            serde_json::to_string_pretty(&metrics_json(&metrics, &network)).expect("serializable"),
        ),
        Format::Table => {
            let mut out = String::new();
            let rows = [
                ("species", metrics.species as i64),
                ("complexes", metrics.complexes as i64),
                ("reactions", metrics.reactions as i64),
                ("linkage classes", metrics.linkage_classes as i64),
                ("rank", metrics.rank as i64),
                ("deficiency", metrics.deficiency),
                ("cyclomatic number", metrics.cyclomatic),
                ("missing unimolecular", metrics.missing_unimolecular as i64),
                (
                    "classes with unimolecular",
                    metrics.classes_with_unimolecular as i64,
                ),
            ];
            for (label, value) in rows {
                let _ = writeln!(out, "{label:<28}{value}");
            }
            let _ = writeln!(out, "\nlinkage classes:");
            for (i, class) in crnkit::linkage_classes(&network)
                .classes()
                .iter()
                .enumerate()
            {
                let members: Vec<String> = class.iter().map(|c| c.canonical_text()).collect();
                let _ = writeln!(out, "  {}: {}", i + 1, members.join(", "));
            }
            emit.text(out);
        }
    }
    Ok(())
}

fn enlarge_failure(error: EnlargeError) -> Failure {
    let code = match &error {
        EnlargeError::TheoremFalsified { .. } => EXIT_THEOREM,
        _ => EXIT_PRECONDITION,
    };
    Failure::new(code, format!("{}: {error}", check_name(&error)))
}

/// Stable name of the failed check, for scripting against exit 4 output.
fn check_name(error: &EnlargeError) -> &'static str {
    match error {
        EnlargeError::DuplicateReaction(_) => "DuplicateReaction",
        EnlargeError::NewSpeciesForbidden(_) => "NewSpeciesForbidden",
        EnlargeError::RankChanged { .. } => "RankChanged",
        EnlargeError::SpeciesExists(_) => "SpeciesExists",
        EnlargeError::EmptyAssignment => "EmptyAssignment",
        EnlargeError::BothCoefficientsZero(_) => "BothCoefficientsZero",
        EnlargeError::UnknownReaction(_) => "UnknownReaction",
        EnlargeError::DuplicateAssignment(_) => "DuplicateAssignment",
        EnlargeError::EmptyPairs => "EmptyPairs",
        EnlargeError::EmptySplits => "EmptySplits",
        EnlargeError::SelfLoopPair(_) => "SelfLoopPair",
        EnlargeError::DuplicateSplit(_) => "DuplicateSplit",
        EnlargeError::DuplicateIntermediate(_) => "DuplicateIntermediate",
        EnlargeError::IntermediateNotNew(_) => "IntermediateNotNew",
        EnlargeError::TooFewNewSpecies { .. } => "TooFewNewSpecies",
        EnlargeError::RankConditionFailed { .. } => "RankConditionFailed",
        EnlargeError::Model(_) => "InvalidNetwork",
        EnlargeError::TheoremFalsified { .. } => "TheoremFalsified",
    }
}

fn cmd_apply(
    emit: &mut Emit,
    input: &Path,
    script_path: &Path,
    format: Format,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut network = load_network(input)?;
    let script_text = read_file(script_path)?;
    let specs: Vec<EnlargementSpec> = parse_script(&script_text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", script_path.display())))?;

    let mut steps_json = Vec::new();
    for (index, spec) in specs.iter().enumerate() {
        let result = crnkit::apply(&network, spec).map_err(|e| {
            let failure = enlarge_failure(e);
            Failure::new(
                failure.code,
                format!("step {}: {}", index + 1, failure.message),
            )
        })?;
        for warning in &result.warnings {
            eprintln!("warning: step {}: {warning}", index + 1);
        }
        match format {
            Format::Json => steps_json.push(json!({
                "op": spec.kind().name(),
                "predicted_delta": result.predicted_delta,
                "observed_delta": result.observed_delta,
                "delta_cyclomatic": result.breakdown.cyclomatic,
                "deficiency_before": result.metrics_before.deficiency,
                "deficiency_after": result.metrics_after.deficiency,
                "network_crn": serialize_crn(&result.enlarged),
            })),
            Format::Table => {
                // Streamed per step, so completed steps stay visible when a
                // later one is rejected.
                let mut table = String::new();
                let _ = writeln!(table, "step {}: {}", index + 1, spec.kind().name());
                let _ = writeln!(table, "  predicted delta   {:+}", result.predicted_delta);
                let _ = writeln!(table, "  observed delta    {:+}", result.observed_delta);
                let _ = writeln!(
                    table,
                    "  delta cyclomatic  {:+}",
                    result.breakdown.cyclomatic
                );
                let _ = writeln!(
                    table,
                    "  deficiency        {} -> {}",
                    result.metrics_before.deficiency, result.metrics_after.deficiency
                );
                let _ = writeln!(table, "  network:");
                for line in serialize_crn(&result.enlarged).lines() {
                    let _ = writeln!(table, "    {line}");
                }
                emit.text(table);
            }
        }
        network = result.enlarged;
    }

    if format == Format::Json {
        emit.line(
            serde_json::to_string_pretty(&json!({
                "steps": steps_json,
                "final_network_crn": serialize_crn(&network),
            }))
            .expect("serializable"),
        );
    }
    if let Some(path) = out {
        write_file(path, &serialize_crn(&network))?;
    }
    Ok(())
}

fn parse_kinds(names: &[String]) -> Result<Vec<OpKind>, Failure> {
    if names.is_empty() {
        return Ok(OpKind::ALL.to_vec());
    }
    names
        .iter()
        .map(|name| {
            OpKind::parse(name).ok_or_else(|| {
                Failure::new(
                    EXIT_USAGE,
                    format!("unknown operation kind {name:?} (expected E1..E6 or E5prime)"),
                )
            })
        })
        .collect()
}

fn parse_mutation(text: &str) -> Result<DeltaMutation, Failure> {
    let usage = || {
        Failure::new(
            EXIT_USAGE,
            format!("bad --mutate value {text:?}, expected KIND:OFFSET"),
        )
    };
    let (kind, offset) = text.split_once(':').ok_or_else(usage)?;
    Ok(DeltaMutation {
        kind: OpKind::parse(kind).ok_or_else(usage)?,
        offset: offset.parse().map_err(|_| usage())?,
    })
}

fn cmd_fuzz(emit: &mut Emit, args: &FuzzArgs) -> Result<(), Failure> {
    if args.trials == 0 {
        return Err(Failure::new(EXIT_USAGE, "--trials must be at least 1"));
    }
    let kinds = parse_kinds(&args.kinds)?;
    let mut config = SuiteConfig::new(GenParams::with_seed(args.seed), args.trials, &kinds);
    if let Some(text) = &args.mutate {
        config.mutation = Some(parse_mutation(text)?);
    }

    let reports = crnkit::fuzz::run_suite_with(&config);
    let summary = summarize(&reports);
    let failures: Vec<&TrialReport> = reports
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Fail { .. }))
        .collect();

    let bundle = match failures.first() {
        Some(report) => Some(write_bundle(&args.bundle_dir, report)?),
        None => None,
    };

    match args.format {
        Format::Json => {
            let value = json!({
                "seed": args.seed,
                "trials": args.trials,
                "summary": summary,
                "failures": failures,
                "bundle": bundle.as_ref().map(|p| p.display().to_string()),
            });
            emit.line(serde_json::to_string_pretty(&value).expect("serializable"));
        }
        Format::Table => {
            emit.line(format!("seed {} trials {}", args.seed, args.trials));
            emit.line(format!(
                "{:<10}{:>8}{:>8}{:>9}",
                "kind", "passed", "failed", "skipped"
            ));
            for entry in &summary {
                emit.line(format!(
                    "{:<10}{:>8}{:>8}{:>9}",
                    entry.kind.name(),
                    entry.passed,
                    entry.failed,
                    entry.skipped
                ));
            }
            if let Some(path) = &bundle {
                emit.line(format!("reproduction bundle: {}", path.display()));
            }
        }
    }

    if let Some(first) = failures.first() {
        let invariant = match &first.verdict {
            Verdict::Fail { invariant, .. } => invariant.clone(),
            _ => unreachable!(),
        };
        return Err(Failure::new(
            EXIT_THEOREM,
            format!(
                "{} failing trial(s); first: trial {} kind {} invariant {}",
                failures.len(),
                first.trial,
                first.kind,
                invariant
            ),
        ));
    }
    Ok(())
}

fn write_bundle(dir: &Path, report: &TrialReport) -> Result<PathBuf, Failure> {
    let Verdict::Fail { repro, .. } = &report.verdict else {
        unreachable!("bundles are only written for failures");
    };
    let bundle = dir.join(format!("trial-{}-{}", report.trial, report.kind.name()));
    std::fs::create_dir_all(&bundle)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot create {}: {e}", bundle.display())))?;
    write_file(&bundle.join("network.crn"), &repro.network_crn)?;
    write_file(&bundle.join("spec.json"), &repro.spec_json)?;
    Ok(bundle)
}

fn cmd_export(emit: &mut Emit, input: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let network = load_network(input)?;
    let metrics = crnkit::compute_metrics(&network);
    let mut value = network_to_json(&network);
    value
        .as_object_mut()
        .expect("network export is an object")
        .insert(
            "metrics".to_string(),
            serde_json::to_value(&metrics).expect("serializable"),
        );
    let text = format!(
        "{}\n",
        serde_json::to_string_pretty(&value).expect("serializable")
    );
    match out {
        Some(path) => write_file(path, &text)?,
        None => emit.text(text),
    }
    Ok(())
}
