//! `circform`: assign circle-formation goals, simulate them, run batches.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use circform::io::{
    append_csv, e_trace_rows, generate_preset, read_json, to_json_string, trajectory_rows,
    write_csv, GoalsFile, Preset, ReportRow, ScenarioFile,
};
use circform::montecarlo::{plan_scenario, run_study, simulate_scenario, StudySpec};
use circform::presets::Region;
use circform::Error;

#[derive(Parser)]
#[command(
    name = "circform",
    version,
    about = "Conflict-free goal assignment on an enclosing circle"
)]
struct Cli {
    /// Override the seed stored in any input file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assign goals for a scenario file (`-` reads stdin).
    Assign {
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Assign goals and execute the motion.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo study.
    Montecarlo {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Append a one-line summary (with header when the file is new).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads; all cores when absent.
        #[arg(long, env = "CIRCFORM_JOBS")]
        jobs: Option<usize>,
    },
    /// Write a generated scenario.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    scenario: PathBuf,
    /// Fly the quadrotor model instead of ideal straight lines.
    #[arg(long)]
    dynamics: bool,
    /// Trajectory CSV (`t,agent_id,x,y`).
    #[arg(long)]
    traj: Option<PathBuf>,
    /// Minimum-separation trace CSV (`t,E`).
    #[arg(long)]
    etrace: Option<PathBuf>,
    /// Summary JSON; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// hexagon_example2 or random_disc.
    #[arg(long)]
    preset: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Agent count for random presets.
    #[arg(long)]
    n: Option<usize>,
    /// Sampling radius for random presets.
    #[arg(long)]
    r_c: Option<f64>,
    #[arg(long)]
    min_separation: Option<f64>,
    /// Sample from a square of half-width `r_c` instead of a disc.
    #[arg(long)]
    square: bool,
}

fn read_input(path: &Path) -> Result<String> {
    let mut text = String::new();
    let read = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|e| Error::Validation {
        field: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(text)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<ScenarioFile> {
    let mut file = ScenarioFile::from_json(&read_input(path)?)?;
    if let Some(seed) = seed {
        file.seed = seed;
    }
    Ok(file)
}

fn assign(path: &Path, output: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let file = load_scenario(path, seed)?;
    let plan = plan_scenario(&file.to_scenario()?, 0)?;
    let a = &plan.assignment;
    log::info!(
        "{} goals on {} layers, last arrival {:.3} s",
        a.len(),
        a.layer_count,
        a.max_arrival_time()
    );
    emit(
        output,
        &to_json_string(&GoalsFile::from_assignment(&file.ids(), a))?,
    )
}

fn simulate(args: &SimulateArgs, seed: Option<u64>) -> Result<()> {
    let mut file = load_scenario(&args.scenario, seed)?;
    file.parameters.dynamics |= args.dynamics;
    let scenario = file.to_scenario()?;
    let (plan, log, metrics) = simulate_scenario(&scenario, 0, file.flight_model().as_ref())?;
    let ids = file.ids();
    if let Some(path) = &args.traj {
        write_csv(fs::File::create(path)?, &trajectory_rows(&log, &ids))?;
    }
    if let Some(path) = &args.etrace {
        write_csv(fs::File::create(path)?, &e_trace_rows(&log))?;
    }
    let conflicts: Vec<_> = log
        .conflict_pairs
        .iter()
        .map(|c| {
            serde_json::json!({
                "first": ids[c.i],
                "second": ids[c.j],
                "time": c.time,
                "distance": c.distance,
            })
        })
        .collect();
    let summary = serde_json::json!({
        "n": ids.len(),
        "layer_count": plan.assignment.layer_count,
        "n_conflicts": metrics.n_conflicts,
        "min_e": log.min_e.is_finite().then_some(log.min_e),
        "max_tf": metrics.max_tf,
        "excess_path": metrics.excess_path,
        "modified_goals": metrics.modified_goals,
        "goals_audited": metrics.goals_audited,
        "conflicts": conflicts,
    });
    emit(args.output.as_deref(), &to_json_string(&summary)?)
}

fn montecarlo(
    spec_path: &Path,
    output: Option<&Path>,
    csv: Option<&Path>,
    jobs: Option<usize>,
    seed: Option<u64>,
) -> Result<()> {
    let mut spec: StudySpec = read_json(spec_path).map_err(|e| match e {
        Error::Io(io) => Error::Validation {
            field: spec_path.display().to_string(),
            message: io.to_string(),
        },
        e => e,
    })?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let report = run_study(&spec, jobs)?;
    let a = &report.aggregate;
    log::info!(
        "{} trials: P_col {:.4}, S_m avg {:.4} %, {} failed",
        a.trials,
        a.p_col,
        100.0 * a.s_m_avg,
        report.failed_trials
    );
    if let Some(path) = csv {
        append_csv(path, &ReportRow::from(&report))?;
    }
    emit(output, &to_json_string(&report)?)
}

fn generate(args: &GenerateArgs, seed: Option<u64>) -> Result<()> {
    let mut preset: Preset = args.preset.parse()?;
    if let Preset::RandomDisc {
        n,
        r_c,
        min_separation,
        region,
    } = &mut preset
    {
        *n = args.n.unwrap_or(*n);
        *r_c = args.r_c.unwrap_or(*r_c);
        *min_separation = args.min_separation.unwrap_or(*min_separation);
        if args.square {
            *region = Region::Square;
        }
    }
    let file = generate_preset(&preset, seed.unwrap_or(0))?;
    emit(args.output.as_deref(), &to_json_string(&file)?)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Assign { scenario, output } => assign(scenario, output.as_deref(), cli.seed),
        Command::Simulate(args) => simulate(args, cli.seed),
        Command::Montecarlo {
            spec,
            output,
            csv,
            jobs,
        } => montecarlo(spec, output.as_deref(), csv.as_deref(), *jobs, cli.seed),
        Command::Generate(args) => generate(args, cli.seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e.downcast_ref::<Error>().is_some_and(Error::is_validation);
            ExitCode::from(if validation { 1 } else { 2 })
        }
    }
}
