use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entroute::harness::output::{write_aggregates, write_fidelity, write_results};
use entroute::harness::run::{build_instance, evaluate, ResultRow};
use entroute::harness::{run_fidelity, run_grid_check, run_sweep_with, Algorithm, Execution, ExperimentConfig, SweepAxis};
use entroute::rng::child_seed;
use entroute::{Error, Result};

#[derive(Parser)]
#[command(name = "entroute", version, about = "k-entangled multipath routing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance and schedule it.
    Schedule {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to every algorithm in the config.
        #[arg(long)]
        algorithm: Option<Algorithm>,
        /// Overrides master_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Also write the entangled graph as JSON.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Fill the runtime_ms column (not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Run seeded iterations over a sweep axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, requires = "values")]
        axis: Option<SweepAxis>,
        /// Comma-separated axis values.
        #[arg(long, requires = "axis")]
        values: Option<String>,
        /// Raw rows; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-algorithm means for each sweep value.
        #[arg(long)]
        aggregate: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
        /// Run iterations on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Bell-pair fidelity over the configured noise grid.
    Fidelity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schedule boundary demands on a fully entangled grid with MCSA.
    Gridcheck {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        demands: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Config(format!("sweep value {v:?}: {e}"))))
        .collect()
}

fn schedule(
    config: &Path,
    algorithm: Option<Algorithm>,
    seed: Option<u64>,
    out: Option<&Path>,
    format: Format,
    graph: Option<&Path>,
    timing: bool,
) -> Result<bool> {
    let mut cfg = ExperimentConfig::from_file(config)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    let instance = build_instance(&cfg, child_seed(cfg.master_seed, 0, 0))?;
    if let Some(p) = graph {
        std::fs::write(p, instance.graph.to_json())?;
    }
    let algorithms = algorithm.map_or_else(|| cfg.algorithm_set(), |a| vec![a]);
    let mut w = sink(out)?;
    let mut rows = Vec::new();
    for a in algorithms {
        let (s, m, runtime_ms) = evaluate(a, &instance)?;
        match format {
            Format::Json => writeln!(w, "{}", s.to_json())?,
            Format::Csv => rows.push(ResultRow {
                seed: instance.seed,
                algorithm: a,
                sweep_value: None,
                iteration: 0,
                k: m.k,
                avg_hop_count: m.avg_hop_count,
                depletion_ratio: m.depletion_ratio,
                total_paths: m.total_paths,
                runtime_ms,
            }),
        }
    }
    if let Format::Csv = format {
        write_results(&mut w, &rows, timing)?;
    }
    w.flush()?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Schedule { config, algorithm, seed, out, format, graph, timing } => {
            schedule(&config, algorithm, seed, out.as_deref(), format, graph.as_deref(), timing)
        }
        Command::Sweep { config, axis, values, out, aggregate, timing, sequential } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let (Some(axis), Some(values)) = (axis, values) {
                cfg.sweep_axis = Some(axis);
                cfg.sweep_values = parse_values(&values)?;
            }
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            let result = run_sweep_with(&cfg, exec)?;
            let mut w = sink(out.as_deref())?;
            write_results(&mut w, &result.rows, timing)?;
            w.flush()?;
            if let Some(p) = aggregate {
                let mut w = BufWriter::new(File::create(p)?);
                write_aggregates(&mut w, &result.aggregates)?;
                w.flush()?;
            }
            Ok(true)
        }
        Command::Fidelity { config, out } => {
            let rows = run_fidelity(&ExperimentConfig::from_file(&config)?)?;
            let mut w = sink(out.as_deref())?;
            write_fidelity(&mut w, &rows)?;
            w.flush()?;
            Ok(true)
        }
        Command::Gridcheck { rows, cols, demands, seed } => {
            let r = run_grid_check(rows, cols, demands, seed)?;
            println!(
                "{{\"rows\":{rows},\"cols\":{cols},\"demands\":{demands},\"seed\":{seed},\"flexibility\":{:?},\"paths\":{:?},\"passed\":{}}}",
                r.flexibility,
                r.paths_per_demand,
                r.passed()
            );
            Ok(r.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("entroute: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
