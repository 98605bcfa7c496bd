use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use wsts_cli::{
    emit_report, parse_model, run_decide, run_query, strip_comments, AbstractMode, Analysis,
    CliError, Diagnostic, DiagnosticKind, Format, Options, Outcome, Query,
};
use wsts_core::algorithms::Budgets;
use wsts_core::models::Semantics;
use wsts_presburger::{parse_formula, PresburgerError};

#[derive(Parser)]
#[command(
    name = "wsts",
    version,
    about = "Decision procedures for well-structured transition systems"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Cap on explored configurations and tree nodes.
    #[arg(long, global = true, value_name = "N")]
    budget_states: Option<usize>,
    /// Cap on basis elements generated by backward analysis.
    #[arg(long, global = true, value_name = "N")]
    budget_basis: Option<usize>,
    /// Also run the bounded forward oracle with this cutoff and report agreement.
    #[arg(long, global = true, value_name = "N")]
    oracle_cutoff: Option<usize>,
    /// Override the semantics declared by a channel machine.
    #[arg(long, value_enum, global = true)]
    semantics: Option<SemanticsArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Lossy,
    Perfect,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryKind {
    Coverability,
    Termination,
    Boundedness,
    /// Control-state reachability.
    Csr,
}

#[derive(Subcommand)]
enum Command {
    /// Coverability, control-state reachability, termination or boundedness.
    Check {
        model: PathBuf,
        #[arg(long, value_enum)]
        query: QueryKind,
        /// Configuration to cover, e.g. "q1 (0,1)" or "q1 [a] []".
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        state: Option<String>,
    },
    /// Karp-Miller tree and its clover.
    Km {
        model: PathBuf,
        /// Write the tree in Graphviz format to this file.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Over-approximate a model by a well-structured one, printed in the model language.
    Abstract {
        model: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<AbstractMode>,
    },
    /// Decide strong monotonicity under an ordering.
    Mono {
        model: PathBuf,
        /// File holding a Presburger ordering over u1..ud, v1..vd.
        #[arg(long, value_name = "FILE")]
        order: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
    /// Search for an ordering under which the model is strongly monotone.
    FindOrder {
        model: PathBuf,
        /// Candidate formulas to generate before giving up.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long)]
        strict: bool,
    },
    /// Decide a closed Presburger sentence.
    Decide { sentence: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let defaults = Budgets::default();
    let options = Options {
        budgets: Budgets {
            max_basis: cli.budget_basis.unwrap_or(defaults.max_basis),
            max_states: cli.budget_states.unwrap_or(defaults.max_states),
            max_nodes: cli.budget_states.unwrap_or(defaults.max_nodes),
        },
        oracle_cutoff: cli.oracle_cutoff,
        semantics: cli.semantics.map(|s| match s {
            SemanticsArg::Lossy => Semantics::Lossy,
            SemanticsArg::Perfect => Semantics::Perfect,
        }),
    };
    let (path, analysis) = match &cli.command {
        Command::Decide { sentence } => return run_decide(&file_name(sentence), &read(sentence)?),
        Command::Check {
            model,
            query,
            target,
            state,
        } => {
            let analysis = match query {
                QueryKind::Coverability => Analysis::Coverability(
                    target
                        .clone()
                        .ok_or_else(|| CliError::Usage("coverability needs --target".into()))?,
                ),
                QueryKind::Csr => Analysis::ControlStateReachability(
                    state
                        .clone()
                        .ok_or_else(|| CliError::Usage("csr needs --state".into()))?,
                ),
                QueryKind::Termination => Analysis::Termination,
                QueryKind::Boundedness => Analysis::Boundedness,
            };
            (model, analysis)
        }
        Command::Km { model, .. } => (model, Analysis::KarpMiller),
        Command::Abstract { model, mode } => (model, Analysis::Abstract(*mode)),
        Command::Mono {
            model,
            order,
            strict,
        } => {
            let ordering = match order {
                Some(p) => Some(
                    parse_formula(&strip_comments(&read(p)?)).map_err(|e| ordering_error(p, e))?,
                ),
                None => None,
            };
            (
                model,
                Analysis::CheckMonotonicity {
                    ordering,
                    strict: *strict,
                },
            )
        }
        Command::FindOrder {
            model,
            budget,
            strict,
        } => (
            model,
            Analysis::FindOrdering {
                budget: *budget,
                strict: *strict,
            },
        ),
    };
    let name = file_name(path);
    let model = parse_model(&read(path)?).map_err(|source| CliError::Parse {
        path: name.clone(),
        source,
    })?;
    let outcome = run_query(&model, &name, &Query { analysis, options })?;
    if let (
        Command::Km {
            dot: Some(file), ..
        },
        Some(dot),
    ) = (&cli.command, &outcome.dot)
    {
        fs::write(file, dot).map_err(|source| CliError::Io {
            path: file.display().to_string(),
            source,
        })?;
    }
    Ok(outcome)
}

fn ordering_error(path: &Path, e: PresburgerError) -> CliError {
    match e {
        PresburgerError::Parse {
            line,
            column,
            message,
        } => CliError::Parse {
            path: file_name(path),
            source: Diagnostic {
                kind: DiagnosticKind::Syntax,
                line,
                column,
                message,
            },
        },
        other => other.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli).and_then(|mut outcome| {
        outcome.report.timing_ms = Some(start.elapsed().as_secs_f64() * 1000.0);
        let text = emit_report(&outcome, cli.format)?;
        Ok((outcome.exit_code, text))
    });
    match result {
        Ok((code, text)) => {
            print!("{text}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
