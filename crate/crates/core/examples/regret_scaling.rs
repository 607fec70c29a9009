//! Mean regret of SGB(ε*) on a random coverage instance across doubling
//! horizons, with the least-squares slope of log regret against log T.
//!
//! ```text
//! cargo run --release -p sgb-core --example regret_scaling -- \
//!     [arms universe p_max density instance_seed k reps]
//! ```

use rayon::prelude::*;
use sgb_core::algorithms::{run_sgb, SgbOptions};
use sgb_core::env::{CoverageInstance, CoverageParams};
use sgb_core::harness::{compute_reference_value, derive_run_seed, MeanStd, ReferenceKind};
use sgb_core::rng_from_seed;

fn arg<T: std::str::FromStr>(args: &[String], i: usize, default: T) -> T {
    args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> sgb_core::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let params = CoverageParams {
        arms: arg(&args, 0, 50),
        universe: arg(&args, 1, 40),
        p_max: arg(&args, 2, 0.3),
        density: arg(&args, 3, 0.3),
    };
    let seed: u64 = arg(&args, 4, 1);
    let k: usize = arg(&args, 5, 5);
    let reps: usize = arg(&args, 6, 10);
    let env = CoverageInstance::generate(params, &mut rng_from_seed(seed))?;
    let f_ref = compute_reference_value(&env, k, ReferenceKind::OfflineGreedy)?
        .value
        .mean;
    println!("f_ref = {f_ref:.6}");

    let horizons = [20_000usize, 40_000, 80_000, 160_000];
    let mut points = Vec::new();
    for &t in &horizons {
        let regrets = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let trace = run_sgb(
                    &env,
                    k,
                    t,
                    SgbOptions::default(),
                    &mut rng_from_seed(derive_run_seed(seed, 0, k, t, rep)),
                )?;
                Ok(t as f64 * f_ref - trace.cumulative_reward())
            })
            .collect::<sgb_core::Result<Vec<f64>>>()?;
        let stats: MeanStd = regrets.into_iter().collect();
        println!(
            "T = {t:>7}  mean regret = {:>10.2}  std = {:>8.2}",
            stats.mean,
            stats.std()
        );
        points.push(((t as f64).ln(), stats.mean.ln()));
    }
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    println!("slope = {:.4}", sxy / sxx);
    Ok(())
}
