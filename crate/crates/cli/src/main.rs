//! `ucsim` — batch front end for the unit-commitment simulation engine.
//!
//! Exit codes: 0 success, 1 infeasible model or failed validation,
//! 2 usage or I/O error, 3 solver/internal failure.
//!
//! The solve backend is chosen with the `UCSIM_BACKEND` environment
//! variable (default `reference`); everything else is a flag.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;
use ucsim_core::dispatch::{solve_case, DispatchError, DispatchResult};
use ucsim_core::formulation::{AssembleOptions, ProsumerMode, Variant};
use ucsim_core::io::{
    generate_case, load_case, load_results, persist_results, save_case, IoError, RunMetadata,
    SyntheticCaseSpec,
};
use ucsim_core::metrics::{compare, res_spillage_mwh, total_cost};
use ucsim_core::milp::{SolveError, SolveStatus};
use ucsim_core::model::validate;
use ucsim_core::rolling::{run_rolling, HorizonPlan, RollingError};

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_USAGE_IO: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "ucsim", version, about = "Electricity-market unit-commitment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic case bundle into a directory.
    Gen(GenArgs),
    /// Check a case bundle against every model invariant.
    Validate { case_dir: PathBuf },
    /// Solve a case over the whole horizon at once.
    Solve(SolveArgs),
    /// Solve a case over rolling windows and stitch the result.
    Roll(RollArgs),
    /// Compare two persisted runs of the same case.
    Compare {
        case_dir: PathBuf,
        run_a: PathBuf,
        run_b: PathBuf,
    },
    /// Time formulations against each other on synthetic cases.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Output directory for case.toml + traces.csv.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    regions: usize,
    #[arg(long, default_value_t = 168)]
    slots: usize,
    #[arg(long, default_value_t = 1.0)]
    dt_hours: f64,
    #[arg(long, default_value_t = 10_000.0)]
    peak_load_mw: f64,
    /// Renewable share of load energy over the horizon, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    res_penetration: f64,
    #[arg(long, default_value_t = 0.10)]
    reserve_fraction: f64,
    #[arg(long, default_value_t = 3.0)]
    inertia_load_factor: f64,
    /// Scales per-plant unit counts (floor 1) for bench-sized systems.
    #[arg(long, default_value_t = 1.0)]
    unit_count_scale: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Clone)]
struct SolveArgs {
    case_dir: PathBuf,
    /// Output directory for dispatch.csv + result.json + metadata.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "mst")]
    variant: Variant,
    /// Relative optimality gap.
    #[arg(long, default_value_t = 0.01)]
    gap: f64,
    #[arg(long)]
    time_limit_s: Option<u64>,
    /// Keep provably non-binding constraint rows.
    #[arg(long)]
    no_clipping: bool,
    #[arg(long, default_value = "presolve")]
    prosumer_mode: String,
    /// Model AC line losses.
    #[arg(long)]
    losses: bool,
}

#[derive(Args)]
struct RollArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Slots visible to each window.
    #[arg(long)]
    window_slots: usize,
    /// Leading slots of each window that become final.
    #[arg(long)]
    commit_slots: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Repetitions per configuration; the median is reported.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 8)]
    slots: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.0,0.75")]
    penetrations: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "mst,buc,agg")]
    variants: Vec<Variant>,
    #[arg(long, default_value_t = 0.01)]
    gap: f64,
    /// Per-solve wall-clock cap, seconds.
    #[arg(long, default_value_t = 300)]
    time_limit_s: u64,
}

fn backend() -> String {
    std::env::var("UCSIM_BACKEND").unwrap_or_else(|_| "reference".to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug)]
struct CliError {
    message: String,
    code: u8,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        self.code
    }
    fn usage(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_USAGE_IO }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        // A case that parses but breaks model invariants is a bad model,
        // not a bad invocation.
        let code = match &e {
            IoError::Validation(_) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE_IO,
        };
        Self { message: e.to_string(), code }
    }
}

impl From<DispatchError> for CliError {
    fn from(e: DispatchError) -> Self {
        let code = match &e {
            DispatchError::NoSolution(SolveStatus::Infeasible) => EXIT_INFEASIBLE,
            DispatchError::Solve(SolveError::UnknownBackend(_)) => EXIT_USAGE_IO,
            _ => EXIT_SOLVER,
        };
        Self { message: e.to_string(), code }
    }
}

impl From<RollingError> for CliError {
    fn from(e: RollingError) -> Self {
        let code = match &e {
            RollingError::BadPlan(_) => EXIT_USAGE_IO,
            RollingError::Window { source, .. } => Self::from_dispatch_ref(source),
            RollingError::StitchedInfeasible(_) => EXIT_SOLVER,
        };
        Self { message: e.to_string(), code }
    }
}

impl CliError {
    fn from_dispatch_ref(e: &DispatchError) -> u8 {
        match e {
            DispatchError::NoSolution(SolveStatus::Infeasible) => EXIT_INFEASIBLE,
            DispatchError::Solve(SolveError::UnknownBackend(_)) => EXIT_USAGE_IO,
            _ => EXIT_SOLVER,
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Validate { case_dir } => cmd_validate(&case_dir),
        Command::Solve(a) => cmd_solve(a),
        Command::Roll(a) => cmd_roll(a),
        Command::Compare { case_dir, run_a, run_b } => cmd_compare(&case_dir, &run_a, &run_b),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode, CliError> {
    let spec = SyntheticCaseSpec {
        regions: a.regions,
        slots: a.slots,
        dt_hours: a.dt_hours,
        peak_load_mw: a.peak_load_mw,
        res_penetration: a.res_penetration,
        reserve_fraction: a.reserve_fraction,
        inertia_load_factor: a.inertia_load_factor,
        unit_count_scale: a.unit_count_scale,
        seed: a.seed,
    };
    let (case, init) = generate_case(&spec);
    std::fs::create_dir_all(&a.out).map_err(IoError::from)?;
    save_case(&a.out, &case, &init)?;
    println!(
        "wrote {}: {} plants, {} slots, {} nodes",
        a.out.display(),
        case.system.plants.len(),
        case.scenario.slots,
        case.system.network.nodes.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(case_dir: &std::path::Path) -> Result<ExitCode, CliError> {
    let (case, init) = match load_case(case_dir) {
        Ok(loaded) => loaded,
        Err(IoError::Validation(report)) => {
            for v in &report {
                eprintln!("{v}");
            }
            eprintln!("{} problem(s) found", report.len());
            return Ok(ExitCode::from(EXIT_INFEASIBLE));
        }
        Err(e) => return Err(e.into()),
    };
    let report = validate(&case, &init);
    if report.is_empty() {
        println!("{}: ok", case_dir.display());
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &report {
            eprintln!("{v}");
        }
        eprintln!("{} problem(s) found", report.len());
        Ok(ExitCode::from(EXIT_INFEASIBLE))
    }
}

fn parse_solve_options(a: &SolveArgs) -> Result<AssembleOptions, CliError> {
    let prosumer_mode = match a.prosumer_mode.as_str() {
        "presolve" => ProsumerMode::Presolve,
        "kkt" => ProsumerMode::Kkt,
        other => return Err(CliError::usage(format!("unknown prosumer mode `{other}`"))),
    };
    Ok(AssembleOptions {
        clipping: !a.no_clipping,
        prosumer_mode,
        losses: a.losses,
        symmetry_breaking: false,
    })
}

fn print_summary(result: &DispatchResult, case: &ucsim_core::model::Case) {
    println!(
        "status {:?}  objective {:.2}  gap {:.2e}  wall {:.3}s  nodes {}",
        result.status, result.objective, result.gap, result.wall_time_s, result.node_count
    );
    println!(
        "cost {:.2}  spillage {:.1} MWh  vars {} ({} commitment)  rows {} ({} clipped)",
        total_cost(case, result),
        res_spillage_mwh(case, result),
        result.counts.variables,
        result.counts.commitment_variables,
        result.counts.constraints,
        result.clipping.total_clipped(),
    );
}

fn cmd_solve(a: SolveArgs) -> Result<ExitCode, CliError> {
    let (case, init) = load_case(&a.case_dir)?;
    let options = parse_solve_options(&a)?;
    let time_limit = a.time_limit_s.map(Duration::from_secs);
    let result = solve_case(&case, &init, a.variant, options, a.gap, time_limit, &backend())?;
    std::fs::create_dir_all(&a.out).map_err(IoError::from)?;
    let meta = RunMetadata::from_result(&result, options, None, &backend(), a.gap);
    persist_results(&a.out, &result, &meta)?;
    print_summary(&result, &case);
    println!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_roll(a: RollArgs) -> Result<ExitCode, CliError> {
    let (case, init) = load_case(&a.solve.case_dir)?;
    let options = parse_solve_options(&a.solve)?;
    let plan = HorizonPlan { window_slots: a.window_slots, commit_slots: a.commit_slots };
    let time_limit = a.solve.time_limit_s.map(Duration::from_secs);
    let rolled = run_rolling(
        &case, &init, a.solve.variant, options, plan, a.solve.gap, time_limit, &backend(),
    )?;
    std::fs::create_dir_all(&a.solve.out).map_err(IoError::from)?;
    let meta = RunMetadata::from_result(&rolled.result, options, Some(plan), &backend(), a.solve.gap);
    persist_results(&a.solve.out, &rolled.result, &meta)?;
    for w in &rolled.windows {
        println!(
            "window {:>3}..{:<3} commit ..{:<3} {:?} gap {:.2e} wall {:.3}s",
            w.window.start, w.window.end, w.window.commit_end, w.status, w.gap, w.wall_time_s
        );
    }
    print_summary(&rolled.result, &case);
    println!("stitched cost {:.2}", rolled.total_cost);
    println!("wrote {}", a.solve.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(
    case_dir: &std::path::Path,
    run_a: &std::path::Path,
    run_b: &std::path::Path,
) -> Result<ExitCode, CliError> {
    let (case, _) = load_case(case_dir)?;
    let (a, meta_a) = load_results(run_a)?;
    let (b, meta_b) = load_results(run_b)?;
    let c = compare(&case, &a, &b);
    println!("metric,a ({}),b ({}),delta", meta_a.variant, meta_b.variant);
    println!("objective,{:.4},{:.4},{:.3e}", c.objective_a, c.objective_b, c.objective_rel_diff);
    println!("total_cost,{:.4},{:.4},", c.total_cost_a, c.total_cost_b);
    println!("spillage_mwh,{:.3},{:.3},", c.spillage_mwh_a, c.spillage_mwh_b);
    println!("wall_time_s,{:.3},{:.3},", c.wall_time_s_a, c.wall_time_s_b);
    println!("max_commitment_diff,,,{:.4}", c.max_commitment_diff);
    println!("max_inertia_diff_mws,,,{:.4}", c.max_inertia_diff_mws);
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode, CliError> {
    if a.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    println!("penetration,variant,slots,commitment_vars,constraints,median_wall_s,gap,status");
    for &penetration in &a.penetrations {
        let spec = SyntheticCaseSpec {
            regions: 1,
            slots: a.slots,
            peak_load_mw: 1500.0,
            res_penetration: penetration,
            unit_count_scale: 0.2,
            ..SyntheticCaseSpec::default()
        };
        let (case, init) = generate_case(&spec);
        for &variant in &a.variants {
            let mut times = Vec::with_capacity(a.reps);
            let mut last: Option<DispatchResult> = None;
            for _ in 0..a.reps {
                let result = solve_case(
                    &case,
                    &init,
                    variant,
                    AssembleOptions::default(),
                    a.gap,
                    Some(Duration::from_secs(a.time_limit_s)),
                    &backend(),
                )?;
                times.push(result.wall_time_s);
                last = Some(result);
            }
            times.sort_by(f64::total_cmp);
            let median = times[times.len() / 2];
            let r = last.unwrap();
            println!(
                "{penetration},{variant},{},{},{},{median:.4},{:.3e},{:?}",
                a.slots, r.counts.commitment_variables, r.counts.constraints, r.gap, r.status
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
