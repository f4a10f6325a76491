//! Command-line front end: analyze, transform, invariance, counterexample, fuzz.
//!
//! Exit status: 0 when every check passes (or breaks as expected under column
//! addition), 1 on any failed check, 2 on usage or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sparkcert::io::{parse_matrix, parse_ops, write_matrix, MatrixFormat, ParsedMatrix};
use sparkcert::parallel::with_threads;
use sparkcert::properties::{fuzz_suite, FuzzConfig};
use sparkcert::report::{
    analyze, counterexample, invariance, render_analysis, transform, AnalysisConfig,
    CounterexampleKind, DEFAULT_NSP_SAMPLES, DEFAULT_SEED,
};
use sparkcert::rip::DEFAULT_ALPHA_FLOOR;
use sparkcert::{Error, OpKind, Result};

#[derive(Parser)]
#[command(
    name = "sparkcert",
    version,
    about = "Spark, NSP and RIP certificates for sensing matrices"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Largest order in the RIP table and NSP constants [default: min(n, m+1, 6)]
    #[arg(long, global = true)]
    k_max: Option<usize>,
    /// Squared singular values at or below this count as zero
    #[arg(long, global = true, default_value_t = DEFAULT_ALPHA_FLOOR)]
    alpha_floor: f64,
    /// Samples for the NSP constant lower bound (null spaces of dimension > 1)
    #[arg(long, global = true, default_value_t = DEFAULT_NSP_SAMPLES)]
    nsp_samples: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (0 = one per core); never changes the output
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Enumerate even above 24 columns
    #[arg(long, global = true)]
    force_large: bool,
    /// Matrix file format [default: from the file extension]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the JSON report (or, for transform, the matrix) here
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Print JSON instead of the text summary
    #[arg(long, global = true)]
    json: bool,
    /// Record wall-clock timings in the analysis report
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Mtx,
    Json,
    Csv,
}

impl From<Format> for MatrixFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Mtx => MatrixFormat::Mtx,
            Format::Json => MatrixFormat::Json,
            Format::Csv => MatrixFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    SparkBreak,
    Universality,
}

#[derive(Subcommand)]
enum Command {
    /// Spark, NSP and RIP report for one matrix
    Analyze { matrix: PathBuf },
    /// Apply an operation file exactly; --output receives the result in the input format
    Transform { matrix: PathBuf, ops: PathBuf },
    /// Check that an operation sequence leaves spark and highest orders unchanged
    Invariance { matrix: PathBuf, ops: PathBuf },
    /// Emit column-addition or universality counterexamples
    Counterexample {
        #[arg(value_enum)]
        kind: Kind,
        matrix: Option<PathBuf>,
    },
    /// Seeded differential fuzzing of the invariance checks
    Fuzz {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 12)]
        ops_per_trial: usize,
        /// Shapes as MxN, repeatable
        #[arg(long = "shape", value_parser = parse_shape)]
        shapes: Vec<(usize, usize)>,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        entry_min: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        entry_max: i64,
        /// Also draw column additions (their changes count as expected breaks)
        #[arg(long)]
        col_add: bool,
    },
}

fn parse_shape(s: &str) -> std::result::Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected MxN, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let shape = (parse(m)?, parse(n)?);
    if shape.0 == 0 || shape.1 == 0 {
        return Err("shape dimensions must be positive".into());
    }
    Ok(shape)
}

impl Common {
    fn format_for(&self, path: &Path) -> Result<MatrixFormat> {
        self.format
            .map(MatrixFormat::from)
            .or_else(|| MatrixFormat::from_path(path))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "cannot infer the format of {}; pass --format",
                    path.display()
                ))
            })
    }

    fn load(&self, path: &Path) -> Result<(ParsedMatrix, MatrixFormat)> {
        let format = self.format_for(path)?;
        Ok((parse_matrix(path, format)?, format))
    }

    fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig {
            k_max: self.k_max,
            alpha_floor: self.alpha_floor,
            nsp_samples: self.nsp_samples,
            seed: self.seed,
            force_large: self.force_large,
            timings: self.timings,
        }
    }

    /// JSON to --output (if given), then JSON or `text` to stdout.
    fn emit<T: Serialize>(&self, report: &T, text: Option<String>) -> Result<()> {
        let json = serde_json::to_string_pretty(report)? + "\n";
        if let Some(path) = &self.output {
            std::fs::write(path, &json)?;
        }
        match text {
            Some(t) if !self.json => print!("{t}"),
            _ => print!("{json}"),
        }
        Ok(())
    }
}

fn id_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// `Ok(true)` when nothing failed.
fn run(cli: &Cli) -> Result<bool> {
    let c = &cli.common;
    let check_cfg = c.analysis().check_config();
    match &cli.command {
        Command::Analyze { matrix } => {
            let (a, _) = c.load(matrix)?;
            let report = analyze(&a, &id_of(matrix), &c.analysis())?;
            c.emit(&report, Some(render_analysis(&report)))?;
            Ok(true)
        }
        Command::Transform { matrix, ops } => {
            let (a, format) = c.load(matrix)?;
            let a = a.exact();
            let seq = parse_ops(ops, a.shape())?;
            let report = transform(&a, &seq, &check_cfg)?;
            match &c.output {
                Some(path) => std::fs::write(path, write_matrix(&report.after.matrix, format)?)?,
                None if !c.json => print!("{}", write_matrix(&report.after.matrix, format)?),
                None => {}
            }
            let json = serde_json::to_string_pretty(&report)?;
            if c.json {
                println!("{json}");
            } else {
                eprintln!(
                    "before: {}\nafter:  {}",
                    serde_json::to_string(&report.before.quantities)?,
                    serde_json::to_string(&report.after.quantities)?
                );
            }
            Ok(true)
        }
        Command::Invariance { matrix, ops } => {
            let (a, _) = c.load(matrix)?;
            let a = a.exact();
            let seq = parse_ops(ops, a.shape())?;
            let report = invariance(&a, &seq, &check_cfg)?;
            let text = report
                .checks
                .iter()
                .map(|r| {
                    format!(
                        "{:<26} {:?}  {}\n",
                        r.check_id,
                        r.verdict,
                        r.detail.join("; ")
                    )
                })
                .collect();
            c.emit(&report, Some(text))?;
            Ok(report.all_passed)
        }
        Command::Counterexample { kind, matrix } => {
            let a = match matrix {
                Some(p) => Some(c.load(p)?.0.exact()),
                None => None,
            };
            let kind = match kind {
                Kind::SparkBreak => CounterexampleKind::SparkBreak,
                Kind::Universality => CounterexampleKind::Universality,
            };
            let report = counterexample(kind, a.as_ref(), &check_cfg)?;
            c.emit(&report, None)?;
            Ok(report.replayed)
        }
        Command::Fuzz {
            trials,
            ops_per_trial,
            shapes,
            entry_min,
            entry_max,
            col_add,
        } => {
            let defaults = FuzzConfig::default();
            let cfg = FuzzConfig {
                shapes: if shapes.is_empty() {
                    defaults.shapes
                } else {
                    shapes.clone()
                },
                entry_min: *entry_min,
                entry_max: *entry_max,
                kinds: if *col_add {
                    OpKind::ALL.to_vec()
                } else {
                    OpKind::PRESERVING.to_vec()
                },
                ops_per_trial: *ops_per_trial,
                trials: *trials,
                seed: c.seed,
                alpha_floor: c.alpha_floor,
            };
            let report = fuzz_suite(&cfg)?;
            c.emit(&report, None)?;
            Ok(report.all_passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_threads(cli.common.threads, || run(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
