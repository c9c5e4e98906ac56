//! Files-in, files-out driver.
//!
//! Exit status: 0 on success, 1 when an input cannot be read or parsed or the
//! parameters make no sense, 2 when the inputs parse but violate an invariant
//! (not a tree, unknown flow endpoint, negative budget, a plan that would cut
//! the network).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use trie_reconfig::experiment::{
    complexity_probe, run_multi_root, run_sweep, summarize, write_complexity_csv,
    write_summary_csv, write_trials_csv, ExperimentError, MultiRootConfig, SweepConfig,
};
use trie_reconfig::io::{self, IoError, SummaryRecord};
use trie_reconfig::optimizer::{OptimizeError, ORACLE_MAX_ACTIVE};
use trie_reconfig::reconfig::SimulateError;
use trie_reconfig::{
    assign_prefix_labels, brute_force_oracle, optimize_bnb, optimize_greedy, plan_labels, simulate,
    Algorithm, BoundMode, LabeledTree,
};

#[derive(Parser)]
#[command(
    name = "trie-reconfig",
    version,
    about = "Minimum-traffic tree reconfiguration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose a final topology and write it with its plan and a summary.
    Optimize(OptimizeArgs),
    /// Compute the move plan between two topologies.
    Plan(PlanArgs),
    /// Replay a plan hop by hop and audit connectivity.
    Simulate(SimulateArgs),
    /// Monte Carlo sweeps over random instances, as CSV.
    Experiment(ExperimentArgs),
    /// Operation counts on the all-movers worst case, as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    flows: PathBuf,
    #[arg(long)]
    budgets: PathBuf,
    #[arg(long, default_value = "optimal")]
    algorithm: Algorithm,
    #[arg(long, default_value = "admissible")]
    bound: BoundMode,
    /// Writes final_topology.json, plan.json and summary.json here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    desired: PathBuf,
    /// Also check every move against these budgets.
    #[arg(long)]
    budgets: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    /// Writes trace.json here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Mode {
    Sweep,
    MultiRoot,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum, default_value = "sweep")]
    mode: Mode,
    /// Network sizes for a sweep.
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7")]
    sizes: Vec<usize>,
    /// Network size for multi-root runs.
    #[arg(long, default_value_t = 5)]
    n: usize,
    #[arg(long = "h-max", value_delimiter = ',', default_value = "1,3,10")]
    h_max: Vec<u32>,
    /// Candidate root counts for multi-root runs.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    roots: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "greedy,optimal")]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value = "admissible")]
    bound: BoundMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "total-flow", default_value_t = 1.0)]
    total_flow: f64,
    /// Exhaustive algorithms are skipped above this size.
    #[arg(long = "optimal-max-n", default_value_t = 7)]
    optimal_max_n: usize,
    /// Fill the ms column. Output is then no longer reproducible byte for byte.
    #[arg(long)]
    timing: bool,
    /// Writes trials.csv and summary.csv here; otherwise the summary goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 3)]
    from: usize,
    #[arg(long, default_value_t = 8)]
    to: usize,
    /// Largest size searched with branch-and-bound.
    #[arg(long = "bnb-max-n", default_value_t = 6)]
    bnb_max_n: usize,
    /// Largest size enumerated without pruning.
    #[arg(long = "exhaustive-max-n", default_value_t = 5)]
    exhaustive_max_n: usize,
    /// Writes complexity.csv here; otherwise to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Unreadable input or meaningless parameters.
    Input(String),
    /// Well-formed input describing something impossible.
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Invariant(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Invariant(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Reads and parses one input file, prefixing diagnostics with its path.
fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, IoError>) -> Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| match e {
        IoError::Syntax {
            line,
            column,
            message,
        } => Failure::Input(format!("{}:{line}:{column}: {message}", path.display())),
        IoError::Invalid(_) => Failure::Invariant(format!("{}: {e}", path.display())),
    })
}

fn write(dir: &Path, name: &str, contents: &[u8]) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<LabeledTree, Failure> {
    Ok(assign_prefix_labels(&load(path, io::parse_topology)?))
}

fn optimize(args: &OptimizeArgs) -> Outcome {
    let tree = load_tree(&args.topology)?;
    let flows = load(&args.flows, |t| io::parse_flows(t, Some(tree.topology())))?;
    let budgets = load(&args.budgets, |t| io::parse_budgets(t, tree.topology()))?;
    let start = Instant::now();
    let result = match args.algorithm {
        Algorithm::Greedy => optimize_greedy(&tree, &flows, &budgets),
        Algorithm::Optimal => optimize_bnb(&tree, &flows, &budgets, args.bound),
        Algorithm::Oracle => brute_force_oracle(&tree, &flows, &budgets),
    }
    .map_err(|e| match e {
        OptimizeError::ActiveSetTooLarge(k) => Failure::Input(format!(
            "the oracle handles at most {ORACLE_MAX_ACTIVE} active movers, this instance has {k}"
        )),
        other => Failure::Invariant(other.to_string()),
    })?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let summary = SummaryRecord::new(&result, ms);
    if let Some(dir) = &args.out {
        write(
            dir,
            "final_topology.json",
            io::topology_to_json(result.final_topology()).as_bytes(),
        )?;
        write(dir, "plan.json", io::plan_to_json(&result.plan).as_bytes())?;
        let pretty = serde_json::to_string_pretty(&summary).expect("plain data");
        write(dir, "summary.json", pretty.as_bytes())?;
    }
    println!("{}", serde_json::to_string(&summary).expect("plain data"));
    Ok(())
}

fn plan(args: &PlanArgs) -> Outcome {
    let tree = load_tree(&args.topology)?;
    let desired = load(&args.desired, io::parse_topology)?;
    let plan = plan_labels(&tree, &desired).map_err(|e| Failure::Invariant(e.to_string()))?;
    if let Some(path) = &args.budgets {
        let budgets = load(path, |t| io::parse_budgets(t, tree.topology()))?;
        if let Some(v) = tree
            .topology()
            .nodes()
            .find(|&v| plan.move_distance(v) > budgets.get(v) as usize)
        {
            return Err(Failure::Invariant(format!(
                "node {v} would move {} hops with a budget of {}",
                plan.move_distance(v),
                budgets.get(v)
            )));
        }
    }
    let json = io::plan_to_json(&plan);
    match &args.out {
        Some(dir) => write(dir, "plan.json", json.as_bytes()),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn simulate_cmd(args: &SimulateArgs) -> Outcome {
    let tree = load_tree(&args.topology)?;
    let plan = load(&args.plan, |t| io::parse_plan(t, &tree))?;
    let trace = match simulate(&plan) {
        Ok(trace) => trace,
        Err(SimulateError::Disconnected { step, node, steps }) => {
            for (i, s) in steps.iter().enumerate() {
                println!(
                    "step {} node {} {} -> {} {}",
                    i + 1,
                    s.node,
                    s.from,
                    s.to,
                    verdict(s.connected)
                );
            }
            return Err(Failure::Invariant(format!(
                "step {} moving node {node} disconnects the network",
                step + 1
            )));
        }
        Err(e) => return Err(Failure::Invariant(e.to_string())),
    };
    for (i, s) in trace.steps.iter().enumerate() {
        let relabel = s
            .relabeled
            .as_ref()
            .map(|l| format!(" as {l}"))
            .unwrap_or_default();
        println!(
            "step {} node {} {} -> {}{relabel} {}",
            i + 1,
            s.node,
            s.from,
            s.to,
            verdict(s.connected)
        );
    }
    if let Some(dir) = &args.out {
        write(dir, "trace.json", io::trace_to_json(&trace).as_bytes())?;
    }
    if trace.all_connected() {
        Ok(())
    } else {
        Err(Failure::Invariant("a snapshot is disconnected".into()))
    }
}

fn verdict(connected: bool) -> &'static str {
    if connected {
        "connected"
    } else {
        "DISCONNECTED"
    }
}

fn experiment_failure(e: ExperimentError) -> Failure {
    match e {
        ExperimentError::Optimize(OptimizeError::ActiveSetTooLarge(k)) => Failure::Input(format!(
            "the oracle handles at most {ORACLE_MAX_ACTIVE} active movers, an instance has {k}"
        )),
        ExperimentError::Io(_) | ExperimentError::Csv(_) => Failure::Input(e.to_string()),
        ExperimentError::Optimize(_) => Failure::Invariant(e.to_string()),
        _ => Failure::Input(e.to_string()),
    }
}

fn experiment(args: &ExperimentArgs) -> Outcome {
    let rows = match args.mode {
        Mode::Sweep => run_sweep(&SweepConfig {
            sizes: args.sizes.clone(),
            h_max_values: args.h_max.clone(),
            trials: args.trials,
            algorithms: args.algorithms.clone(),
            base_seed: args.seed,
            total_flow: args.total_flow,
            optimal_max_n: args.optimal_max_n,
            bound: args.bound,
            timing: args.timing,
        }),
        Mode::MultiRoot => run_multi_root(&MultiRootConfig {
            n: args.n,
            h_max_values: args.h_max.clone(),
            roots: args.roots.clone(),
            trials: args.trials,
            algorithms: args.algorithms.clone(),
            base_seed: args.seed,
            total_flow: args.total_flow,
            bound: args.bound,
            timing: args.timing,
        }),
    }
    .map_err(experiment_failure)?;
    let mut summary = Vec::new();
    write_summary_csv(&summarize(&rows), &mut summary).map_err(experiment_failure)?;
    match &args.out {
        Some(dir) => {
            let mut trials = Vec::new();
            write_trials_csv(&rows, &mut trials).map_err(experiment_failure)?;
            write(dir, "trials.csv", &trials)?;
            write(dir, "summary.csv", &summary)
        }
        None => {
            print!("{}", String::from_utf8(summary).expect("csv is utf-8"));
            Ok(())
        }
    }
}

fn bench(args: &BenchArgs) -> Outcome {
    if args.from > args.to {
        return Err(Failure::Input(format!(
            "empty size range {}..={}",
            args.from, args.to
        )));
    }
    let rows = complexity_probe(args.from..=args.to, args.bnb_max_n, args.exhaustive_max_n)
        .map_err(experiment_failure)?;
    let mut csv = Vec::new();
    write_complexity_csv(&rows, &mut csv).map_err(experiment_failure)?;
    match &args.out {
        Some(dir) => write(dir, "complexity.csv", &csv),
        None => {
            print!("{}", String::from_utf8(csv).expect("csv is utf-8"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Optimize(a) => optimize(a),
        Command::Plan(a) => plan(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Experiment(a) => experiment(a),
        Command::Bench(a) => bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
