// Copyright 2026 The ec3probe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `ec3probe` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ec3probe::evolution::Splitting;
use ec3probe::experiment::{solve, Experiment, SolveReport, DECAY_THRESHOLD};
use ec3probe::random::{random_instance, rng};
use ec3probe::report::{
    omega_sweep_csv, round_sig, tau_sweep_csv, AnalyticsDoc, ParamsDoc, ResultDoc,
};
use ec3probe::verify::{run_checks, VerifyOptions};
use ec3probe::{
    analytic_prediction, brute_force_solve, extract_solutions, parse_instance, sweep_omega,
    sweep_tau, DecayResult, Ec3Instance, Error, Method, PropagatorSpec, SimulationParams,
    TrotterSteps,
};

const THREADS_ENV: &str = "EC3PROBE_THREADS";
const DEFAULT_TAU_GRID: &str = "0:1600:25";

#[derive(Parser)]
#[command(
    name = "ec3probe",
    version,
    about = "Probe-qubit spectroscopy of 3-bit exact cover instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical energy spectrum of an instance, as JSON.
    Spectrum {
        instance: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// One run of the protocol at a fixed evolution time.
    Run {
        instance: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Decay probability against evolution time, as CSV.
    SweepTau {
        instance: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Decay probability against probe frequency, as CSV.
    SweepOmega {
        instance: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Fixed evolution time; by default each frequency runs the m-doubling search.
        #[arg(long)]
        tau: Option<f64>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Decide satisfiability from the probe and read out solutions.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Cross-check the simulator against dense reference implementations.
    Verify {
        /// Instance file; omit to draw a random one.
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        random_n: usize,
        #[arg(long)]
        clauses: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 0.002)]
        c: f64,
        #[arg(long, hide = true)]
        corrupt_coupling_sign: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    ExactEig,
    ExactKrylov,
    Trotter,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplittingArg {
    FirstOrder,
    Strang,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.002)]
    c: f64,
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// Trotter step count, or `auto`. Implies `--method trotter`.
    #[arg(long, value_name = "L|auto")]
    trotter_steps: Option<String>,
    #[arg(long, value_enum, default_value = "first-order")]
    splitting: SplittingArg,
    /// Sample this many measurements in addition to the exact readout.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// `start:stop:step`, both ends inclusive. Defaults to `0:1600:25` for
    /// evolution time and `1:M+1:1` for frequency.
    #[arg(long, conflicts_with = "grid_file")]
    grid: Option<String>,
    /// JSON array of grid values.
    #[arg(long)]
    grid_file: Option<PathBuf>,
}

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self(e.to_string())
    }
}

fn io_failure(what: &str, path: &Path, e: std::io::Error) -> Failure {
    Failure(format!("cannot {what} {}: {e}", path.display()))
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn dispatch(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Spectrum { instance, output } => cmd_spectrum(&instance, output.as_deref()),
        Command::Run {
            instance,
            tau,
            threshold,
            sim,
        } => cmd_run(&instance, tau, threshold, &sim),
        Command::SweepTau {
            instance,
            grid,
            sim,
        } => cmd_sweep_tau(&instance, &grid, &sim),
        Command::SweepOmega {
            instance,
            grid,
            tau,
            sim,
        } => cmd_sweep_omega(&instance, &grid, tau, &sim),
        Command::Solve {
            instance,
            threshold,
            sim,
        } => cmd_solve(&instance, threshold, &sim),
        Command::Verify {
            instance,
            random_n,
            clauses,
            seed,
            omega,
            c,
            corrupt_coupling_sign,
        } => {
            let inst = match instance {
                Some(path) => load_instance(&path)?,
                None => random_instance(&mut rng(seed), random_n, clauses.unwrap_or(random_n)),
            };
            let opts = VerifyOptions {
                omega,
                c,
                seed,
                skew_coupling: corrupt_coupling_sign,
            };
            cmd_verify(&inst, &opts)
        }
    }
}

fn load_instance(path: &Path) -> CliResult<Ec3Instance> {
    let text = fs::read_to_string(path).map_err(|e| io_failure("read", path, e))?;
    parse_instance(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure("write", path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure(format!("cannot write to stdout: {e}"))),
    }
}

fn sim_params(args: &SimArgs) -> CliResult<SimulationParams> {
    let mut spec = PropagatorSpec::with_method(match args.method {
        MethodArg::Exact => Method::Exact,
        MethodArg::ExactEig => Method::ExactEig,
        MethodArg::ExactKrylov => Method::ExactKrylov,
        MethodArg::Trotter => Method::Trotter,
    });
    if let Some(raw) = &args.trotter_steps {
        spec.method = Method::Trotter;
        spec.trotter_steps = parse_trotter_steps(raw)?;
    }
    spec.splitting = match args.splitting {
        SplittingArg::FirstOrder => Splitting::FirstOrder,
        SplittingArg::Strang => Splitting::Strang,
    };
    let mut sp = SimulationParams::new(args.omega, args.c, 0.0).with_propagator(spec);
    sp.shots = args.shots;
    sp.seed = args.seed;
    sp.validate()?;
    Ok(sp)
}

fn parse_trotter_steps(raw: &str) -> CliResult<TrotterSteps> {
    if raw.eq_ignore_ascii_case("auto") {
        return Ok(TrotterSteps::Auto);
    }
    match raw.parse::<usize>() {
        Ok(l) if l > 0 => Ok(TrotterSteps::Fixed(l)),
        _ => Err(Error::InvalidParameter(format!(
            "trotter steps must be a positive integer or 'auto', got {raw:?}"
        ))
        .into()),
    }
}

/// Parses `start:stop:step` into its grid points.
fn parse_grid_spec(spec: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| Failure(format!("grid {spec:?}: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(bad("expected start:stop:step"));
    };
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
    let (Some(start), Some(stop), Some(step)) = (num(start), num(stop), num(step)) else {
        return Err(bad("values must be finite numbers"));
    };
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("stop must not be below start"));
    }
    let count = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize;
    Ok((0..=count)
        .map(|k| round_sig(start + k as f64 * step))
        .collect())
}

fn load_grid(args: &GridArgs, default: &str) -> CliResult<Vec<f64>> {
    if let Some(path) = &args.grid_file {
        let text = fs::read_to_string(path).map_err(|e| io_failure("read", path, e))?;
        return serde_json::from_str(&text)
            .map_err(|e| Failure(format!("grid file {}: {e}", path.display())));
    }
    parse_grid_spec(args.grid.as_deref().unwrap_or(default))
}

fn cmd_spectrum(path: &Path, output: Option<&Path>) -> CliResult<ExitCode> {
    let inst = load_instance(path)?;
    let s = brute_force_solve(&inst)?;
    let doc = serde_json::json!({
        "n": inst.n(),
        "num_clauses": s.num_clauses,
        "satisfiable": s.is_satisfiable(),
        "min_energy": s.min_energy,
        "degeneracies": s.degeneracies,
        "minimizers": s.minimizers,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("spectrum serializes");
    text.push('\n');
    emit(output, &text)?;
    Ok(exit_for(s.is_satisfiable()))
}

fn exit_for(satisfiable: bool) -> ExitCode {
    if satisfiable {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn analytics(inst: &Ec3Instance, sp: &SimulationParams) -> CliResult<Option<AnalyticsDoc>> {
    let m = brute_force_solve(inst)?.solution_count();
    if m == 0 {
        return Ok(None);
    }
    Ok(Some(AnalyticsDoc::from(&analytic_prediction(inst, sp, m)?)))
}

fn readout(inst: &Ec3Instance, d: &DecayResult, threshold: f64) -> CliResult<Vec<String>> {
    match extract_solutions(inst, d, threshold) {
        Ok(v) => Ok(v.iter().map(ToString::to_string).collect()),
        Err(Error::NoDecay(_)) => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

fn report_shots(d: &DecayResult) {
    if let Some(s) = &d.shots {
        eprintln!("shots: {} decays of {}", s.decays, s.shots);
        for (a, count) in &s.register_counts {
            eprintln!("  {a} {count}");
        }
    }
}

fn cmd_run(path: &Path, tau: f64, threshold: f64, args: &SimArgs) -> CliResult<ExitCode> {
    let inst = load_instance(path)?;
    let sp = sim_params(args)?.with_tau(tau);
    sp.validate()?;
    let d = Experiment::new(&inst, &sp)?.run_at(tau)?;
    report_shots(&d);
    let doc = ResultDoc {
        params: ParamsDoc::new(&inst, &sp, tau),
        satisfiable: d.p_decay > DECAY_THRESHOLD,
        p_decay: round_sig(d.p_decay),
        chosen_l: d.chosen_l,
        solutions: readout(&inst, &d, threshold)?,
        analytics: analytics(&inst, &sp)?,
    };
    emit(args.output.as_deref(), &doc.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep_tau(path: &Path, grid: &GridArgs, args: &SimArgs) -> CliResult<ExitCode> {
    let inst = load_instance(path)?;
    let sp = sim_params(args)?;
    let taus = load_grid(grid, DEFAULT_TAU_GRID)?;
    let sweep = sweep_tau(&inst, &sp, &taus)?;
    if let Some(peak) = sweep.first_peak_tau() {
        log::info!("first peak at tau = {peak}");
    }
    emit(args.output.as_deref(), &tau_sweep_csv(&sweep))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep_omega(
    path: &Path,
    grid: &GridArgs,
    tau: Option<f64>,
    args: &SimArgs,
) -> CliResult<ExitCode> {
    let inst = load_instance(path)?;
    let sp = sim_params(args)?;
    let default = format!("1:{}:1", inst.num_clauses() + 1);
    let omegas = load_grid(grid, &default)?;
    let sweep = sweep_omega(&inst, &sp, &omegas, tau)?;
    match sweep.first_resonant_omega {
        Some(w) => log::info!("first resonant omega = {w}"),
        None => log::info!("no resonance on the grid"),
    }
    emit(args.output.as_deref(), &omega_sweep_csv(&sweep))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(path: &Path, threshold: f64, args: &SimArgs) -> CliResult<ExitCode> {
    let inst = load_instance(path)?;
    let sp = sim_params(args)?;
    let SolveReport {
        satisfiable,
        search,
        solutions,
        follow_up,
    } = solve(&inst, &sp, threshold)?;
    report_shots(&search.decay);
    let sp_at = sp.with_tau(search.tau);
    let doc = ResultDoc {
        params: ParamsDoc::new(&inst, &sp_at, search.tau),
        satisfiable,
        p_decay: round_sig(search.decay.p_decay),
        chosen_l: search.decay.chosen_l,
        solutions: solutions.iter().map(ToString::to_string).collect(),
        analytics: analytics(&inst, &sp_at)?,
    };
    emit(args.output.as_deref(), &doc.to_json())?;
    if let Some(f) = follow_up {
        match f.first_resonant_omega {
            Some(w) => {
                let mut mins = f.minimizers.clone();
                mins.sort();
                let mins: Vec<String> = mins.iter().map(ToString::to_string).collect();
                eprintln!(
                    "unsatisfiable: first_resonant_omega = {w}; minimal-violation assignments: {}",
                    mins.join(" ")
                );
            }
            None => eprintln!(
                "unsatisfiable: no resonance found up to omega = {}",
                inst.num_clauses() + 1
            ),
        }
    }
    Ok(exit_for(satisfiable))
}

fn cmd_verify(inst: &Ec3Instance, opts: &VerifyOptions) -> CliResult<ExitCode> {
    let outcomes = run_checks(inst, opts)?;
    let mut out = String::new();
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{tag} {} measured={:.3e} limit={:.3e}\n",
            o.name, o.measured, o.limit
        ));
    }
    emit(None, &out)?;
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name)
        .collect();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}
