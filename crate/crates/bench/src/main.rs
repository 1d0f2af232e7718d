//! `bench`: runs experiment plans and post-processes their results.
//!
//! Exit codes: 0 success, 1 invalid plan or arguments, 2 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pcmcts::harness::{
    aggregate, read_csv_file, run_plan, write_aggregate_csv, write_csv, write_csv_file,
    write_plot_data, ExperimentPlan, RunRecord, RunResult, SearchOverrides,
};
use pcmcts::parallel::StrategyKind;
use pcmcts::Error;

#[derive(Debug, Parser)]
#[command(name = "bench", version, about = "Parallel continuous MCTS benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a plan file, or a single combination given by flags.
    Run(RunArgs),
    /// Per-combination success rate, σ and 2σ band.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plot-ready tables (scalability, comparison, per-scenario detail).
    PlotData {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Scenarios pooled into the scored set; defaults to all non-easy
        /// presets present in the input.
        #[arg(long, value_delimiter = ',')]
        scenarios: Vec<String>,
    },
    /// List the scenario presets.
    Presets,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, conflicts_with_all = ["scenario", "strategy"])]
    plan: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Results CSV; stdout when absent (and the plan names no output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the executed action traces as JSON.
    #[arg(long)]
    traces: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPlan(_)
            | Error::UnknownPreset(_)
            | Error::InvalidConfig(_)
            | Error::Toml(_) => Failure::Invalid(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn plan_from_args(args: &RunArgs) -> Result<ExperimentPlan, Failure> {
    let mut plan = match &args.plan {
        Some(path) => ExperimentPlan::from_file(path).map_err(|e| match e {
            Error::Io(io) => Failure::Invalid(format!("cannot read {}: {io}", path.display())),
            other => other.into(),
        })?,
        None => {
            let scenario = args
                .scenario
                .clone()
                .ok_or_else(|| Failure::Invalid("either --plan or --scenario is required".into()))?;
            let strategy: StrategyKind = args
                .strategy
                .as_deref()
                .unwrap_or("single")
                .parse()
                .map_err(Failure::from)?;
            ExperimentPlan {
                scenarios: vec![scenario],
                strategies: vec![strategy],
                iteration_budgets: vec![args.iterations],
                worker_counts: vec![args.workers],
                repetitions: args.reps,
                base_seed: args.seed,
                output: None,
                root_budget: Default::default(),
                visit_credit: Default::default(),
                search: SearchOverrides::default(),
            }
        }
    };
    if let Some(out) = &args.out {
        plan.output = Some(out.clone());
    }
    plan.validate()?;
    Ok(plan)
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let plan = plan_from_args(&args)?;
    let results: Vec<RunResult> = run_plan(&plan)?;
    let records: Vec<RunRecord> = results.iter().map(|r| r.record.clone()).collect();
    match &plan.output {
        Some(path) => write_csv_file(path, &records)?,
        None => write_csv(std::io::stdout().lock(), &records)?,
    }
    if let Some(path) = &args.traces {
        let json = serde_json::to_string(&results).map_err(|e| Failure::Runtime(e.to_string()))?;
        std::fs::write(path, json).map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let failed = results.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        log::warn!("{failed} episodes failed and were recorded as unsuccessful");
    }
    Ok(())
}

fn read_records(path: &Path) -> Result<Vec<RunRecord>, Failure> {
    read_csv_file(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors; that code means runtime failure here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Aggregate { input, out } => read_records(&input).and_then(|records| {
            let rows = aggregate(&records);
            let file = std::fs::File::create(&out).map_err(|e| Failure::Runtime(e.to_string()))?;
            write_aggregate_csv(file, &rows).map_err(Failure::from)
        }),
        Command::PlotData {
            input,
            out,
            scenarios,
        } => read_records(&input).and_then(|records| {
            let scored: Vec<&str> = if scenarios.is_empty() {
                let mut present: Vec<&str> = records
                    .iter()
                    .map(|r| r.scenario.as_str())
                    .filter(|s| pcmcts::env::preset(s).map_or(true, |p| !p.easy))
                    .collect();
                present.sort_unstable();
                present.dedup();
                present
            } else {
                scenarios.iter().map(String::as_str).collect()
            };
            let files = write_plot_data(&records, &scored, &out)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }),
        Command::Presets => {
            for name in pcmcts::env::preset_names() {
                let p = pcmcts::env::preset(name).expect("built-in preset");
                let spec = p.env.spec();
                println!(
                    "{name}\tagents={}\thorizon={}\teasy={}",
                    spec.agent_count, spec.horizon, p.easy
                );
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
