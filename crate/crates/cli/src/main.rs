use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use slhnet::eval::{check_output, evaluate, reduce_output, Outcome};
use slhnet::{parse_netspec, EvalError, ParseError};
use slhnet_core::linear_passive::{sweep_to_json, write_sweep_csv, LinearPassiveModel};
use slhnet_core::Error as CoreError;

/// Reduce quantum feedback networks described by a netlist.
#[derive(Parser)]
#[command(name = "slhnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the netlist and print the output model as JSON.
    Reduce {
        file: PathBuf,
        /// Write the JSON here instead of standard output.
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        /// Emit the open output model in Stratonovich (E-matrix) form.
        #[arg(long)]
        strat: bool,
    },
    /// Close every port of a linear passive output model through a delay
    /// and sweep the effective frequency matrix over a grid in s.
    Delay {
        file: PathBuf,
        #[arg(long)]
        tau: f64,
        /// re0,re1,nre,im0,im1,nim
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Also write the sweep as CSV.
        #[arg(long, value_name = "OUT")]
        csv: Option<PathBuf>,
    },
    /// Evaluate the netlist and check the output model.
    Validate { file: PathBuf },
}

enum Failure {
    Usage(String),
    Parse(ParseError),
    Eval(EvalError),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Parse(_) => 1,
            Failure::Eval(e) => match e.core_error() {
                Some(CoreError::IllPosedNetwork { .. } | CoreError::NoStratonovichForm) => 2,
                _ => 3,
            },
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Parse(e) => e.to_string(),
            Failure::Eval(e) => e.to_string(),
        }
    }
}

fn load(file: &Path) -> Result<Outcome, Failure> {
    let text = fs::read_to_string(file).map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
    let spec = parse_netspec(&text).map_err(Failure::Parse)?;
    let base = file.parent().unwrap_or(Path::new("."));
    evaluate(&spec, base).map_err(Failure::Eval)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn parse_grid(spec: &str) -> Result<Vec<Complex64>, Failure> {
    let bad = || Failure::Usage(format!("--grid expects re0,re1,nre,im0,im1,nim, got `{spec}`"));
    let fields: Vec<&str> = spec.split(',').map(str::trim).collect();
    if fields.len() != 6 {
        return Err(bad());
    }
    let real = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    let count = |s: &str| s.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(bad);
    let re = linspace(real(fields[0])?, real(fields[1])?, count(fields[2])?);
    let im = linspace(real(fields[3])?, real(fields[4])?, count(fields[5])?);
    Ok(re
        .iter()
        .flat_map(|&x| im.iter().map(move |&y| Complex64::new(x, y)))
        .collect())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Reduce { file, json, strat } => {
            let outcome = load(&file)?;
            let doc = reduce_output(&outcome, strat).map_err(Failure::Eval)?;
            let text = serde_json::to_string(&doc).map_err(|e| Failure::Io(e.to_string()))? + "\n";
            write_out(json.as_deref(), &text)
        }
        Command::Delay { file, tau, grid, csv } => {
            let points = parse_grid(&grid)?;
            let outcome = load(&file)?;
            let model = LinearPassiveModel::from_slh(&outcome.model).map_err(|error| {
                Failure::Eval(EvalError::Model {
                    location: outcome.location,
                    source_text: format!("output {}", outcome.name),
                    error,
                })
            })?;
            let sweep = model.delay_sweep(tau, &points).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(path) = csv {
                let f = fs::File::create(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                write_sweep_csv(&sweep, model.n_modes(), f).map_err(|e| Failure::Io(e.to_string()))?;
            }
            let text = serde_json::to_string(&sweep_to_json(&sweep)).map_err(|e| Failure::Io(e.to_string()))? + "\n";
            write_out(None, &text)
        }
        Command::Validate { file } => {
            let outcome = load(&file)?;
            check_output(&outcome.model).map_err(Failure::Eval)?;
            let g = &outcome.model;
            let summary = if g.is_closed() {
                format!("closed system on {}", g.layout())
            } else {
                format!("{} ports on {}", g.n_ports(), g.layout())
            };
            write_out(None, &format!("ok: `{}` is a valid model ({summary})\n", outcome.name))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(Failure::Usage(String::new()).exit_code());
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
