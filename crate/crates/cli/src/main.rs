use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dqsim_cli::{
    exit_code, loglog_slope, parse_value, render_table, run_config, run_suite, slope_row, sweep, write_csv, RunConfig,
    RunOptions, Suite, EXIT_NUMERICAL,
};
use dqsim_core::cost::{cost_table, CostModel, CostParams};
use dqsim_core::{Error, Result};

#[derive(Parser)]
#[command(name = "dqsim", version, about = "Distributed quantum simulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one JSON config and write its result row as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Print closed-form communication costs for all three protocols.
    Cost(CostArgs),
    /// Run a config once per value of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated; may be empty.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        values: String,
        /// Append the log-log slope of this column against the parameter.
        #[arg(long)]
        fit: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = default_threads())]
        threads: usize,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Args)]
struct RunFlags {
    /// Fill the wall_ms column.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long)]
    model: CostModel,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    edges: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_comm: Option<f64>,
    #[arg(long)]
    induced_norm: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
}

impl CostArgs {
    fn params(&self) -> CostParams {
        CostParams {
            gamma: self.gamma,
            n: self.n,
            edges: self.edges,
            alpha: self.alpha,
            alpha_comm: self.alpha_comm,
            induced_norm: self.induced_norm,
            k: self.k,
            p: self.p,
            t: self.t,
            eps: self.eps,
        }
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { config, out, run } => {
            let cfg = RunConfig::load(&config)?;
            let row = run_config(&cfg, RunOptions { timing: run.timing })?;
            let target = out.or_else(|| cfg.output.clone());
            write_csv(sink(target.as_ref())?, &[row])?;
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let checks = run_suite(suite);
            print!("{}", render_table(&checks));
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::from(EXIT_NUMERICAL));
            }
        }
        Command::Cost(args) => {
            let rows = cost_table(args.model, &args.params())?;
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            let io_err = |e: csv::Error| Error::Io(io::Error::other(e.to_string()));
            w.write_record(["protocol", "model", "value", "formula", "driver"]).map_err(io_err)?;
            for r in rows {
                w.write_record([r.protocol, &r.model.to_string(), &r.value.to_string(), r.formula, r.driver])
                    .map_err(io_err)?;
            }
            w.flush()?;
        }
        Command::Sweep { config, param, values, fit, out, threads, run } => {
            let cfg = RunConfig::load(&config)?;
            let values: Vec<_> = values.split(',').filter(|v| !v.trim().is_empty()).map(parse_value).collect();
            let mut rows = sweep(&cfg, &param, &values, RunOptions { timing: run.timing }, threads)?;
            if let Some(col) = fit {
                let slope = loglog_slope(&values, &rows, &col)?;
                rows.push(slope_row(&param, &col, slope, cfg.seed));
            }
            let target = out.or_else(|| cfg.output.clone());
            write_csv(sink(target.as_ref())?, &rows)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dqsim: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
