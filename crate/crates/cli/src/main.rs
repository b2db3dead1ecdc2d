//! `blockwin`: simulate long-range dependent series and build block-sampling
//! confidence intervals for their mean.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error.

use blockwin::{
    harness, parse_config, run_coverage, run_single, simulate_window, sweep, write_sweep_csv,
    zeta, Error, ExperimentConfig, HermiteSpec, Method, ModelName, ModelSpec, SeriesWindow,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "blockwin", version, about = "Block-sampling inference for long-range dependent means")]
struct Cli {
    /// Worker threads for replicate-level parallelism (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Model preset: model-i .. model-iv
    #[arg(long)]
    model: String,

    /// Coefficient decay exponent (beta > 1/2)
    #[arg(long)]
    beta: f64,

    /// Coefficient truncation M
    #[arg(long, default_value_t = harness::DEFAULT_TRUNCATION)]
    truncation: usize,
}

impl ModelArgs {
    fn spec(&self) -> blockwin::Result<ModelSpec> {
        ModelSpec::preset(ModelName::parse(&self.model)?, self.beta, self.truncation)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one series and emit it as CSV (index, y)
    Simulate {
        #[command(flatten)]
        model: ModelArgs,

        /// Observed series length
        #[arg(long)]
        n: usize,

        /// Extra past values Y_{-past+1}..Y_0 to include
        #[arg(long, default_value_t = 0)]
        past: usize,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Confidence intervals and diagnostics for one series
    Estimate {
        /// One-column numeric data file (exclusive with --model)
        #[arg(long, conflicts_with_all = ["model", "beta"])]
        data: Option<PathBuf>,

        #[arg(long, required_unless_present = "data")]
        model: Option<String>,

        #[arg(long, required_unless_present = "data")]
        beta: Option<f64>,

        #[arg(long, default_value_t = harness::DEFAULT_TRUNCATION)]
        truncation: usize,

        /// Simulated series length (ignored with --data)
        #[arg(long, default_value_t = 1000)]
        n: usize,

        /// Block-size multiplier: l = floor(c * sqrt(n))
        #[arg(long, default_value_t = 1.0)]
        c: f64,

        /// h_hat or subsampling
        #[arg(long, default_value = "h_hat")]
        method: String,

        #[arg(long, default_value_t = harness::DEFAULT_ALPHA)]
        alpha: f64,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Write the sampling-distribution atoms as CSV here
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Monte Carlo coverage of both one-sided intervals for one config
    Coverage {
        /// Config file (exclusive with the individual flags)
        #[arg(long)]
        config: Option<PathBuf>,

        #[arg(long, required_unless_present = "config")]
        model: Option<String>,

        #[arg(long, required_unless_present = "config")]
        beta: Option<f64>,

        #[arg(long, required_unless_present = "config")]
        n: Option<usize>,

        #[arg(long, default_value_t = 1.0)]
        c: f64,

        #[arg(long, default_value = "h_hat")]
        method: String,

        #[arg(long, default_value_t = harness::DEFAULT_ALPHA)]
        alpha: f64,

        #[arg(long, default_value_t = harness::DEFAULT_REPS)]
        reps: usize,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        #[arg(long, default_value_t = harness::DEFAULT_TRUNCATION)]
        truncation: usize,

        /// Also write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run every config in a file; emit one CSV row per config
    Sweep {
        #[arg(long)]
        config: PathBuf,

        /// Output CSV (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Limit-distribution oracles: Hermite-marginal samples or the zeta constant
    Oracle {
        /// Volterra order (1 = fractional Brownian motion, 2 = Rosenblatt)
        #[arg(long, default_value_t = 1)]
        r: u32,

        #[arg(long)]
        beta: f64,

        /// Print the zeta variance constant instead of sampling
        #[arg(long)]
        zeta: bool,

        /// Quadrature tolerance for --zeta
        #[arg(long)]
        tol: Option<f64>,

        /// Discretization grid length of the partial sum
        #[arg(long, default_value_t = 2000)]
        n: usize,

        #[arg(long, default_value_t = harness::DEFAULT_TRUNCATION)]
        truncation: usize,

        #[arg(long, default_value_t = 10_000)]
        reps: usize,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Output CSV of samples (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: invalid configuration: --workers must be >= 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// stdout or a file, behind one writer
fn sink(out: &Option<PathBuf>) -> blockwin::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn read_series(path: &PathBuf) -> blockwin::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) => values.push(v),
            // tolerate a single header line
            Err(_) if i == 0 => {}
            Err(_) => {
                return Err(Error::Config(format!(
                    "{}:{}: not a number: '{line}'",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Config(format!(
            "{}: no numeric values found",
            path.display()
        )));
    }
    Ok(values)
}

fn run(cmd: Command) -> blockwin::Result<()> {
    match cmd {
        Command::Simulate {
            model,
            n,
            past,
            seed,
            out,
        } => {
            let spec = model.spec()?;
            let window = simulate_window(&spec, n, past, seed)?;
            window.write_csv(sink(&out)?)
        }

        Command::Estimate {
            data,
            model,
            beta,
            truncation,
            n,
            c,
            method,
            alpha,
            seed,
            out,
        } => {
            let method = Method::parse(&method)?;
            let window = match data {
                Some(path) => SeriesWindow::from_parts(&[], &read_series(&path)?)?,
                None => {
                    let args = ModelArgs {
                        model: model.expect("required by clap"),
                        beta: beta.expect("required by clap"),
                        truncation,
                    };
                    let spec = args.spec()?;
                    let l = (c * (n as f64).sqrt()).floor() as usize;
                    let past = match method {
                        Method::HHat => 2 * l,
                        Method::Subsampling => 0,
                    };
                    simulate_window(&spec, n, past, seed)?
                }
            };
            let l = (c * (window.n() as f64).sqrt()).floor() as usize;
            if l < 2 {
                return Err(Error::Config(format!(
                    "block size l = floor({c} * sqrt({})) = {l} must be >= 2",
                    window.n()
                )));
            }
            let result = run_single(&window, method, l, alpha)?;
            if let Some(path) = out {
                result.dist.write_csv(BufWriter::new(File::create(path)?))?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&result).map_err(|e| Error::Csv(e.to_string()))?
            );
            Ok(())
        }

        Command::Coverage {
            config,
            model,
            beta,
            n,
            c,
            method,
            alpha,
            reps,
            seed,
            truncation,
            out,
        } => {
            let cfg = match config {
                Some(path) => {
                    let configs = parse_config(&std::fs::read_to_string(&path)?)?;
                    match <[ExperimentConfig; 1]>::try_from(configs) {
                        Ok([single]) => single,
                        Err(v) => {
                            return Err(Error::Config(format!(
                                "{}: coverage takes exactly one config, found {} (use sweep)",
                                path.display(),
                                v.len()
                            )))
                        }
                    }
                }
                None => ExperimentConfig {
                    model: ModelName::parse(&model.expect("required by clap"))?,
                    beta: beta.expect("required by clap"),
                    n: n.expect("required by clap"),
                    c,
                    method: Method::parse(&method)?,
                    alpha,
                    reps,
                    master_seed: seed,
                    truncation,
                    rep_offset: 0,
                },
            };
            let report = run_coverage(&cfg)?;
            let json =
                serde_json::to_string_pretty(&report).map_err(|e| Error::Csv(e.to_string()))?;
            if let Some(path) = out {
                writeln!(File::create(path)?, "{json}")?;
            }
            println!("{json}");
            Ok(())
        }

        Command::Sweep { config, out } => {
            let configs = parse_config(&std::fs::read_to_string(&config)?)?;
            let rows = sweep(&configs)?;
            write_sweep_csv(&rows, sink(&out)?)
        }

        Command::Oracle {
            r,
            beta,
            zeta: want_zeta,
            tol,
            n,
            truncation,
            reps,
            seed,
            out,
        } => {
            if want_zeta {
                let tol = tol.unwrap_or(if r == 1 { 1e-7 } else { 0.5 });
                let z = zeta(r, beta, tol)?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&z).map_err(|e| Error::Csv(e.to_string()))?
                );
                Ok(())
            } else {
                let spec = HermiteSpec::new(r, beta, n, truncation)?;
                let dist = blockwin::sample_limit(&spec, reps, seed)?;
                dist.write_csv(sink(&out)?)
            }
        }
    }
}
