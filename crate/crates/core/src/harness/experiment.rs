use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, MethodName, MethodSpec};
use super::fmt::fmt_float;
use super::metrics::{csv_writer, write_summaries, write_trace, RunSummary};
use super::reference::{compute_reference_value, Reference};
use super::seed::derive_run_seed;
use crate::algorithms::{
    etcg_epsilon, run_etcg, run_random_constant, run_sgb, run_sgb_anytime, SgbOptions,
};
use crate::env::Environment;
use crate::schedule::{minimal_valid_horizon, HorizonReport};
use crate::{rng_from_seed, BanditParams, Error, Result, RunTrace, SimRng};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const REFERENCES_FILE: &str = "references.csv";
pub const ERRORS_FILE: &str = "errors.csv";
pub const TRACE_DIR: &str = "traces";

/// A run that failed; the sweep carries on without it.
#[derive(Debug, Clone, PartialEq)]
pub struct CellError {
    pub method: String,
    pub k: usize,
    pub horizon: usize,
    pub rep: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub summaries: Vec<RunSummary>,
    pub references: Vec<Reference>,
    pub errors: Vec<CellError>,
    pub output_dir: PathBuf,
}

/// Runs one method for `horizon` steps.
pub fn run_method<E: Environment + ?Sized>(
    env: &E,
    method: &MethodSpec,
    k: usize,
    horizon: usize,
    rng: &mut SimRng,
) -> Result<RunTrace> {
    let opts = SgbOptions {
        epsilon: method.epsilon,
        force: method.force,
    };
    match method.name {
        MethodName::Sgb => run_sgb(env, k, horizon, opts, rng),
        MethodName::Etcg => run_etcg(env, k, horizon, method.force, rng),
        MethodName::SgbAnytime => {
            let t0 = match method.t_initial {
                Some(t0) => t0,
                None => minimal_valid_horizon(env.arm_count(), k)?,
            };
            run_sgb_anytime(env, k, t0, horizon, opts, rng)
        }
        MethodName::Random => run_random_constant(env, k, horizon, rng),
    }
}

/// Why `method` cannot run unforced at `(n, k, horizon)`, if it cannot.
pub fn cell_problem(method: &MethodSpec, n: usize, k: usize, horizon: usize) -> Option<String> {
    if k > n {
        return Some(format!("k = {k} exceeds the {n} available arms"));
    }
    let (window, epsilon) = match method.name {
        MethodName::Random => return None,
        MethodName::Sgb => (horizon, method.epsilon),
        MethodName::Etcg => match etcg_epsilon(k) {
            Ok(eps) => (horizon, Some(eps)),
            Err(e) => return Some(e.to_string()),
        },
        MethodName::SgbAnytime => match method
            .t_initial
            .map(Ok)
            .unwrap_or_else(|| minimal_valid_horizon(n, k))
        {
            Ok(t0) => (t0, method.epsilon),
            Err(e) => return Some(e.to_string()),
        },
    };
    if method.force {
        return None;
    }
    match BanditParams::derive(n, k, window, epsilon) {
        Ok((params, _)) => HorizonReport::for_params(&params).failure_reason(),
        Err(e) => Some(e.to_string()),
    }
}

struct Cell {
    method_index: usize,
    k: usize,
    horizon: usize,
    rep: usize,
    seed: u64,
}

fn trace_path(dir: &Path, method: &MethodSpec, cell: &Cell) -> PathBuf {
    dir.join(format!(
        "{:02}-{}-k{}-T{}-rep{}.csv",
        cell.method_index,
        method.name.label(),
        cell.k,
        cell.horizon,
        cell.rep
    ))
}

/// Executes every `(method, k, horizon, rep)` cell and writes the CSV files
/// into the configured output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let env = config.environment.build(&config.reference)?;
    let n = env.arm_count();
    log::info!("environment: {}", env.describe());

    for method in &config.methods {
        for &k in &config.ks {
            for &horizon in &config.horizons {
                if let Some(reason) = cell_problem(method, n, k, horizon) {
                    return Err(Error::Config(format!(
                        "{} at k = {k}, T = {horizon}: {reason} (set force = true to run it anyway)",
                        method.name.label()
                    )));
                }
            }
        }
    }

    let out_dir = config.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(|e| Error::from(e).in_file(&out_dir))?;
    let trace_dir = out_dir.join(TRACE_DIR);
    if config.write_traces {
        fs::create_dir_all(&trace_dir).map_err(|e| Error::from(e).in_file(&trace_dir))?;
    }

    let references = config
        .ks
        .iter()
        .map(|&k| {
            let r = compute_reference_value(&env, k, config.reference.kind)?;
            log::info!(
                "reference k = {k}: f_ref = {} ± {} ({} oracle calls)",
                fmt_float(r.value.mean),
                fmt_float(r.value.std_error),
                r.evaluations
            );
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    for (method_index, _) in config.methods.iter().enumerate() {
        for &k in &config.ks {
            for &horizon in &config.horizons {
                for rep in 0..config.repetitions {
                    let seed = derive_run_seed(config.master_seed, method_index, k, horizon, rep);
                    cells.push(Cell {
                        method_index,
                        k,
                        horizon,
                        rep,
                        seed,
                    });
                }
            }
        }
    }
    let total = cells.len();

    let jobs = config
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;

    let run_cell = |cell: &Cell| -> Result<RunSummary> {
        let method = &config.methods[cell.method_index];
        let reference = &references[config
            .ks
            .iter()
            .position(|&k| k == cell.k)
            .expect("k in ks")];
        let start = Instant::now();
        let trace = run_method(
            &env,
            method,
            cell.k,
            cell.horizon,
            &mut rng_from_seed(cell.seed),
        )?;
        let wall_ms = config
            .record_wall_time
            .then(|| start.elapsed().as_secs_f64() * 1e3);
        for warning in &trace.warnings {
            log::debug!(
                "{} k={} T={} rep={}: {warning}",
                method.name.label(),
                cell.k,
                cell.horizon,
                cell.rep
            );
        }
        if config.write_traces {
            let path = trace_path(&trace_dir, method, cell);
            let file = File::create(&path).map_err(|e| Error::from(e).in_file(&path))?;
            write_trace(BufWriter::new(file), &trace).map_err(|e| e.in_file(&path))?;
        }
        Ok(RunSummary::from_trace(
            method.name.label(),
            cell.k,
            cell.rep,
            cell.seed,
            &trace,
            reference.value,
            wall_ms,
        ))
    };

    let outcomes: Vec<Result<RunSummary>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let outcome = run_cell(cell);
                let label = config.methods[cell.method_index].name.label();
                match &outcome {
                    Ok(s) => log::info!(
                        "done {label} k={} T={} rep={} regret={}",
                        cell.k,
                        cell.horizon,
                        cell.rep,
                        fmt_float(s.regret)
                    ),
                    Err(e) => log::error!(
                        "failed {label} k={} T={} rep={}: {e}",
                        cell.k,
                        cell.horizon,
                        cell.rep
                    ),
                }
                outcome
            })
            .collect()
    });

    let mut summaries = Vec::with_capacity(total);
    let mut errors = Vec::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(s) => summaries.push(s),
            Err(e) => errors.push(CellError {
                method: config.methods[cell.method_index].name.label().to_string(),
                k: cell.k,
                horizon: cell.horizon,
                rep: cell.rep,
                seed: cell.seed,
                message: e.to_string(),
            }),
        }
    }

    write_outputs(&out_dir, &summaries, &references, &errors)?;
    log::info!(
        "{} of {total} runs succeeded; results in {}",
        summaries.len(),
        out_dir.display()
    );
    Ok(ExperimentOutput {
        summaries,
        references,
        errors,
        output_dir: out_dir,
    })
}

fn write_outputs(
    dir: &Path,
    summaries: &[RunSummary],
    references: &[Reference],
    errors: &[CellError],
) -> Result<()> {
    let create = |name: &str| -> Result<(PathBuf, BufWriter<File>)> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| Error::from(e).in_file(&path))?;
        Ok((path, BufWriter::new(file)))
    };

    let (path, file) = create(SUMMARY_FILE)?;
    write_summaries(file, summaries).map_err(|e| e.in_file(path))?;

    let (path, file) = create(REFERENCES_FILE)?;
    (|| -> Result<()> {
        let mut w = csv_writer(file);
        w.write_record(["k", "kind", "f_ref", "f_ref_stderr", "evaluations", "set"])?;
        for r in references {
            let set: Vec<String> = r.set.iter().map(ToString::to_string).collect();
            w.write_record([
                r.k.to_string(),
                r.kind.label().to_string(),
                fmt_float(r.value.mean),
                fmt_float(r.value.std_error),
                r.evaluations.to_string(),
                set.join(" "),
            ])?;
        }
        w.flush()?;
        Ok(())
    })()
    .map_err(|e| e.in_file(path))?;

    let (path, file) = create(ERRORS_FILE)?;
    (|| -> Result<()> {
        let mut w = csv_writer(file);
        w.write_record(["method", "k", "horizon", "rep", "seed", "error"])?;
        for e in errors {
            w.write_record([
                e.method.clone(),
                e.k.to_string(),
                e.horizon.to_string(),
                e.rep.to_string(),
                e.seed.to_string(),
                e.message.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })()
    .map_err(|e| e.in_file(path))?;
    Ok(())
}
