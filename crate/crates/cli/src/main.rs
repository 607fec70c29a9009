//! `sgb`: validate schedules, run learners, sweep experiments.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sgb_core::algorithms::{brute_force_opt, offline_greedy, offline_stochastic_greedy};
use sgb_core::env::{Environment, ExpectedValue};
use sgb_core::harness::{
    aggregate_runs, compute_reference_value, estimate_clean_event_rate, fmt_float, fmt_opt,
    run_experiment, run_method, write_trace, AnyEnv, EnvironmentSpec, ExperimentConfig, MethodName,
    MethodSpec, ReferenceKind, ReferenceSpec, RunSummary, SUMMARY_COLUMNS,
};
use sgb_core::schedule::validate_horizon;
use sgb_core::{rng_from_seed, BanditParams};

#[derive(Parser)]
#[command(
    name = "sgb",
    version,
    about = "Stochastic-greedy bandits with submodular rewards"
)]
struct Cli {
    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a horizon against the theory and print the derived schedule.
    Validate {
        /// Number of base arms.
        #[arg(long)]
        n: usize,
        /// Cardinality constraint.
        #[arg(long)]
        k: usize,
        /// Time horizon T.
        #[arg(long)]
        horizon: usize,
        /// Use this epsilon instead of the horizon-optimal one.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run one learner and print its summary line.
    Run(RunArgs),
    /// Run every cell of a sweep config and write CSV results.
    Sweep {
        /// TOML sweep configuration.
        #[arg(long)]
        config: PathBuf,
        /// Worker threads [default: available processors].
        #[arg(long, env = "SGB_JOBS")]
        jobs: Option<usize>,
        /// Override the config's output directory.
        #[arg(long, env = "SGB_OUTPUT_DIR")]
        output_dir: Option<PathBuf>,
    },
    /// Solve the offline problem on the expected-value oracle.
    Offline {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Algo::Greedy)]
        algo: Algo,
        /// Accuracy parameter for stochastic greedy.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Seed for stochastic greedy's candidate sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Diagnostics of the exploration schedule.
    #[command(subcommand)]
    Diagnose(Diagnose),
}

#[derive(Subcommand)]
enum Diagnose {
    /// Fraction of runs in which every empirical mean is within the
    /// confidence radius (coverage environments only).
    CleanEvent {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        horizon: usize,
        /// Number of exploration replays.
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use this epsilon instead of the horizon-optimal one.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Multiply the radius by this factor.
        #[arg(long, default_value_t = 1.0)]
        rad_scale: f64,
    },
}

#[derive(Args)]
struct EnvArgs {
    /// Environment: `coverage:<path>`, `graph:<path>`,
    /// `random-coverage:arms=..,universe=..,p_max=..,density=..,seed=..`,
    /// or a path (coverage files are recognised by their `format` line).
    #[arg(long)]
    env: String,
    /// Activation probability for graph environments.
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Live-edge worlds behind the spread oracle.
    #[arg(long, default_value_t = 1000)]
    mc_reps: usize,
    /// Seed of the spread oracle's worlds.
    #[arg(long, default_value_t = 0)]
    oracle_seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long, value_enum)]
    method: Method,
    /// Override epsilon (sgb and sgb-anytime).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-step trace CSV here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Run even if the horizon check fails.
    #[arg(long)]
    force: bool,
    /// First window of sgb-anytime [default: minimal valid horizon].
    #[arg(long)]
    t_initial: Option<usize>,
    /// How the regret reference is computed.
    #[arg(long, value_enum, default_value_t = Reference::OfflineGreedy)]
    reference: Reference,
    /// Print the column header before the summary line.
    #[arg(long)]
    header: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sgb,
    Etcg,
    SgbAnytime,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Greedy,
    StochasticGreedy,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reference {
    OfflineGreedy,
    BruteForce,
}

impl EnvArgs {
    fn build(&self) -> Result<AnyEnv> {
        let spec = EnvironmentSpec::parse_cli(&self.env, self.p)?;
        let reference = ReferenceSpec {
            mc_reps: self.mc_reps,
            oracle_seed: self.oracle_seed,
            ..ReferenceSpec::default()
        };
        Ok(spec.build(&reference)?)
    }
}

fn validate(
    out: &mut impl Write,
    n: usize,
    k: usize,
    horizon: usize,
    epsilon: Option<f64>,
) -> Result<()> {
    let mut report = validate_horizon(n, k, horizon);
    if let Some(eps) = epsilon {
        let params = BanditParams::new(n, k, horizon, eps)?;
        report = sgb_core::HorizonReport::for_params(&params);
    }
    writeln!(out, "n = {n}, k = {k}, T = {horizon}")?;
    writeln!(
        out,
        "horizon condition: T >= n(k+1)sqrt(ln T) = {} ({})",
        fmt_float(report.required_horizon),
        if report.meets_theorem {
            "holds"
        } else {
            "fails"
        }
    )?;
    if let Some(p) = &report.params {
        let label = if epsilon.is_some() {
            "epsilon"
        } else {
            "epsilon*"
        };
        writeln!(out, "{label} = {}", fmt_float(p.epsilon()))?;
        writeln!(out, "m = {}", p.m())?;
        writeln!(out, "beta = {}", fmt_float(p.beta()))?;
        writeln!(out, "s_1 = {}", p.sample_size(1))?;
        writeln!(out, "rad = {}", fmt_float(p.rad()))?;
        writeln!(
            out,
            "exploration length = {} ({})",
            p.exploration_length(),
            if report.fits_budget {
                "fits in T"
            } else {
                "exceeds T"
            }
        )?;
    }
    for note in &report.notes {
        writeln!(out, "note: {note}")?;
    }
    match report.failure_reason() {
        None => writeln!(out, "valid")?,
        Some(reason) => writeln!(out, "invalid: {reason}")?,
    }
    Ok(())
}

fn run(out: &mut impl Write, args: &RunArgs) -> Result<()> {
    let env = args.env.build()?;
    let name = match args.method {
        Method::Sgb => MethodName::Sgb,
        Method::Etcg => MethodName::Etcg,
        Method::SgbAnytime => MethodName::SgbAnytime,
        Method::Random => MethodName::Random,
    };
    if args.epsilon.is_some() && matches!(name, MethodName::Etcg | MethodName::Random) {
        bail!("--epsilon does not apply to {}", name.label());
    }
    let method = MethodSpec {
        name,
        epsilon: args.epsilon,
        t_initial: args.t_initial,
        force: args.force,
    };
    let kind = match args.reference {
        Reference::OfflineGreedy => ReferenceKind::OfflineGreedy,
        Reference::BruteForce => ReferenceKind::BruteForce,
    };
    let reference = compute_reference_value(&env, args.k, kind)?;
    let trace = run_method(
        &env,
        &method,
        args.k,
        args.horizon,
        &mut rng_from_seed(args.seed),
    )?;
    for w in &trace.warnings {
        log::warn!("{w}");
    }
    if let Some(path) = &args.trace_out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_trace(BufWriter::new(file), &trace)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = RunSummary::from_trace(
        name.label(),
        args.k,
        0,
        args.seed,
        &trace,
        reference.value,
        None,
    );
    if args.header {
        writeln!(out, "{}", SUMMARY_COLUMNS.join(","))?;
    }
    writeln!(out, "{}", summary.line())?;
    Ok(())
}

fn sweep(
    out: &mut impl Write,
    config: &Path,
    jobs: Option<usize>,
    output_dir: Option<PathBuf>,
) -> Result<bool> {
    let mut config = ExperimentConfig::from_path(config)?;
    if jobs.is_some() {
        config.jobs = jobs;
    }
    if let Some(dir) = output_dir {
        config.output_dir = dir;
    }
    let result = run_experiment(&config)?;
    writeln!(
        out,
        "method,epsilon,k,horizon,runs,regret_mean,regret_std,exploration_end_mean"
    )?;
    for g in aggregate_runs(&result.summaries) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            g.method,
            fmt_opt(g.epsilon),
            g.k,
            g.horizon,
            g.runs,
            fmt_float(g.regret_mean),
            fmt_float(g.regret_std),
            fmt_float(g.exploration_end_mean)
        )?;
    }
    for e in &result.errors {
        log::error!(
            "{} k={} T={} rep={}: {}",
            e.method,
            e.k,
            e.horizon,
            e.rep,
            e.message
        );
    }
    Ok(result.errors.is_empty())
}

fn offline(
    out: &mut impl Write,
    env_args: &EnvArgs,
    k: usize,
    algo: Algo,
    epsilon: f64,
    seed: u64,
) -> Result<()> {
    let env = env_args.build()?;
    let oracle = ExpectedValue(&env);
    let (label, result) = match algo {
        Algo::Greedy => ("greedy", offline_greedy(&oracle, k)?),
        Algo::StochasticGreedy => (
            "stochastic-greedy",
            offline_stochastic_greedy(&oracle, k, epsilon, &mut rng_from_seed(seed))?,
        ),
        Algo::Brute => ("brute", brute_force_opt(&oracle, k)?),
    };
    let estimate = env.expected(&result.selected)?;
    let set: Vec<String> = result.selected.iter().map(ToString::to_string).collect();
    writeln!(
        out,
        "algo = {label}\nk = {k}\nset = {}\nvalue = {}\nstd_error = {}\nevaluations = {}",
        set.join(" "),
        fmt_float(result.value),
        fmt_float(estimate.std_error),
        result.evaluations
    )?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn clean_event(
    out: &mut impl Write,
    env_args: &EnvArgs,
    k: usize,
    horizon: usize,
    reps: usize,
    seed: u64,
    epsilon: Option<f64>,
    rad_scale: f64,
) -> Result<()> {
    let env = env_args.build()?;
    let (params, warnings) = BanditParams::derive(env.arm_count(), k, horizon, epsilon)?;
    for w in warnings {
        log::warn!("{w}");
    }
    if let Some(reason) = sgb_core::HorizonReport::for_params(&params).failure_reason() {
        log::warn!("horizon check fails: {reason}");
    }
    let est = estimate_clean_event_rate(&env, &params, reps, rad_scale, &mut rng_from_seed(seed))?;
    writeln!(out, "runs = {}", est.runs)?;
    writeln!(out, "clean = {}", est.clean_runs)?;
    writeln!(out, "frequency = {}", fmt_float(est.frequency()))?;
    writeln!(out, "radius = {}", fmt_float(est.radius))?;
    writeln!(out, "bound 1 - 2/T = {}", fmt_float(est.bound))?;
    writeln!(
        out,
        "bound std error = {}",
        fmt_float(est.bound_std_error())
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level))
        .format_timestamp(None)
        .init();

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let outcome = match &cli.command {
        Command::Validate {
            n,
            k,
            horizon,
            epsilon,
        } => validate(&mut out, *n, *k, *horizon, *epsilon).map(|_| true),
        Command::Run(args) => run(&mut out, args).map(|_| true),
        Command::Sweep {
            config,
            jobs,
            output_dir,
        } => sweep(&mut out, config, *jobs, output_dir.clone()),
        Command::Offline {
            env,
            k,
            algo,
            epsilon,
            seed,
        } => offline(&mut out, env, *k, *algo, *epsilon, *seed).map(|_| true),
        Command::Diagnose(Diagnose::CleanEvent {
            env,
            k,
            horizon,
            reps,
            seed,
            epsilon,
            rad_scale,
        }) => clean_event(
            &mut out, env, *k, *horizon, *reps, *seed, *epsilon, *rad_scale,
        )
        .map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some runs failed; see errors.csv");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
