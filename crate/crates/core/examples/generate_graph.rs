//! Writes a preferential-attachment graph as an edge list.
//!
//! ```text
//! cargo run -p sgb-core --example generate_graph -- [nodes attach seed] > graph.txt
//! ```
//!
//! `data/pa-534.txt` was produced with the defaults.

use sgb_core::env::{emit_edge_list, preferential_attachment};
use sgb_core::rng_from_seed;

fn main() -> sgb_core::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let nodes = args.first().copied().unwrap_or(534) as usize;
    let attach = args.get(1).copied().unwrap_or(4) as usize;
    let seed = args.get(2).copied().unwrap_or(2024);
    let graph = preferential_attachment(nodes, attach, &mut rng_from_seed(seed))?;
    print!("{}", emit_edge_list(&graph));
    Ok(())
}
