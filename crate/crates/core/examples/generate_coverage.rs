//! Writes a random probabilistic-coverage instance in the `coverage/1` format.
//!
//! ```text
//! cargo run -p sgb-core --example generate_coverage -- [arms universe p_max density seed] > inst.txt
//! ```
//!
//! `data/coverage-50.txt` was produced with the defaults.

use sgb_core::env::{CoverageInstance, CoverageParams};
use sgb_core::rng_from_seed;

fn main() -> sgb_core::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, default: f64| {
        args.get(i)
            .map_or(default, |a| a.parse().expect("numeric argument"))
    };
    let params = CoverageParams {
        arms: num(0, 50.0) as usize,
        universe: num(1, 60.0) as usize,
        p_max: num(2, 0.2),
        density: num(3, 0.5),
    };
    let seed = num(4, 1.0) as u64;
    let instance = CoverageInstance::generate(params, &mut rng_from_seed(seed))?;
    print!("{}", instance.to_text());
    Ok(())
}
