use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pid_secret::broja::DEFAULT_TOL;
use pid_secret_cli::experiments::{
    cmd_decompose, cmd_epsilon_sweep, cmd_lattice, cmd_prescribe, cmd_verify_pairs, cmd_xor_counterexample,
    noisy_xor, parse_epsilons, parse_prescription_file, random_prescription, solo_pair, xor_system, CliMeasure,
    DecomposeInput,
};
use pid_secret_cli::io::{
    distribution_to_json, parse_distribution, parse_schemes, parse_target, read_file, schemes_to_json,
    sources_argument,
};
use pid_secret_cli::report::ExperimentReport;

#[derive(Parser)]
#[command(name = "pidss", version, about = "Secret sharing and partial information decomposition experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List the antichain lattice on n participants with its cover edges.
    Lattice {
        n: usize,
        /// Print only the number of nodes.
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate a measure on every lattice node and write a CSV valuation.
    Decompose {
        /// Distribution JSON file.
        #[arg(long, conflicts_with = "schemes", required_unless_present = "schemes")]
        dist: Option<PathBuf>,
        /// Scheme JSON file (one scheme or an array); the schemes are combined.
        #[arg(long)]
        schemes: Option<PathBuf>,
        /// Target variables, comma separated.
        #[arg(long)]
        target: Option<String>,
        /// Sources as inline JSON (`[["X1"],["X2"]]`) or a JSON file.
        #[arg(long)]
        sources: Option<String>,
        /// imin, immi, reference or broja-pair.
        #[arg(long, default_value = "immi")]
        measure: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Reproduce the XOR counterexample to local positivity.
    XorCounterexample {
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Decompose the noisy XOR system for a list of flip probabilities.
    EpsilonSweep {
        /// Comma-separated values in [0, 1].
        #[arg(long, default_value = "0,0.01,0.1,0.25,0.5")]
        epsilon: String,
        /// Comma-separated measures among imin, immi and broja-pair.
        #[arg(long, default_value = "imin,immi,broja-pair")]
        measure: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Build a combination with prescribed partial terms and recover them.
    Prescribe {
        n: usize,
        /// JSON object mapping antichain text to bits; omit with --seed.
        h_file: Option<PathBuf>,
        /// Draw a random dyadic prescription from this seed instead.
        #[arg(long, conflicts_with = "h_file", required_unless_present = "h_file")]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Check pairs of combined one-bit schemes on n ≤ 3 participants.
    VerifyPairs {
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        parallel: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Write a built-in example as JSON.
    Example {
        #[arg(value_enum)]
        which: Example,
        /// Flip probability for noisy-xor.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    /// Distribution of the XOR system.
    Xor,
    /// Distribution of the noisy XOR system.
    NoisyXor,
    /// Two one-bit schemes, each secret held by one participant.
    SoloPair,
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(output: &Output, format: Format, report: &ExperimentReport) -> Result<bool> {
    let text = match format {
        Format::Text => report.render_text(),
        Format::Json => report.render_json(),
    };
    emit(output, &text)?;
    Ok(report.passed())
}

fn load(path: &Path) -> Result<String> {
    Ok(read_file(path)?)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Lattice { n, count, output } => emit(&output, &cmd_lattice(n, count)?).map(|_| true),
        Command::Decompose {
            dist,
            schemes,
            target,
            sources,
            measure,
            tol,
            parallel,
            output,
        } => {
            let input = match (dist, schemes) {
                (Some(d), _) => DecomposeInput::Distribution(parse_distribution(&load(&d)?)?),
                (None, Some(s)) => DecomposeInput::schemes(&parse_schemes(&load(&s)?)?)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let target = match (&target, &input) {
                (Some(t), DecomposeInput::Distribution(d)) => Some(parse_target(t, d)?),
                (Some(t), DecomposeInput::Schemes(c)) => Some(parse_target(t, c.dist())?),
                (None, _) => None,
            };
            let sources = sources.as_deref().map(sources_argument).transpose()?;
            let measure = CliMeasure::parse(&measure)?;
            let d = cmd_decompose(&input, target.as_deref(), sources, measure, tol, parallel)?;
            emit(&output, &d.render_csv()).map(|_| true)
        }
        Command::XorCounterexample { tol, format, output } => emit_report(&output, format, &cmd_xor_counterexample(tol)?),
        Command::EpsilonSweep {
            epsilon,
            measure,
            tol,
            parallel,
            output,
        } => {
            let eps = parse_epsilons(&epsilon)?;
            let measures = measure.split(',').map(CliMeasure::parse).collect::<Result<Vec<_>, _>>()?;
            let sweep = cmd_epsilon_sweep(&eps, &measures, tol, parallel)?;
            emit(&output, &sweep.render_csv()).map(|_| true)
        }
        Command::Prescribe {
            n,
            h_file,
            seed,
            format,
            output,
        } => {
            let h = match (h_file, seed) {
                (Some(f), _) => parse_prescription_file(n, &load(&f)?)?,
                (None, Some(s)) => random_prescription(n, s)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            emit_report(&output, format, &cmd_prescribe(n, &h)?)
        }
        Command::VerifyPairs {
            n,
            tol,
            parallel,
            format,
            output,
        } => emit_report(&output, format, &cmd_verify_pairs(n, tol, parallel)?),
        Command::Example { which, epsilon, output } => {
            let text = match which {
                Example::Xor => distribution_to_json(&xor_system()),
                Example::NoisyXor => distribution_to_json(&noisy_xor(epsilon)?),
                Example::SoloPair => schemes_to_json(&solo_pair()),
            };
            emit(&output, &text).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
