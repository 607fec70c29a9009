//! Independent-cascade diffusion on undirected graphs.
//!
//! Two routes compute the same quantity:
//!
//! - [`simulate_cascade`] runs the process forward, giving every newly
//!   activated node one Bernoulli(p) attempt per neighbour. Attempts are
//!   drawn with geometric skipping, so the cost is proportional to the number
//!   of successful attempts rather than to the degree.
//! - [`LiveEdgeOracle`] samples a fixed set of live-edge worlds (each directed
//!   incidence live with probability `p`) and averages reachability. With the
//!   worlds fixed the estimate is itself a monotone submodular set function,
//!   which is what the offline greedy reference needs.

use std::cell::RefCell;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rayon::prelude::*;

use super::{Environment, Estimate, Graph};
use crate::{ArmId, Error, Result, SimRng};

/// Visited marks stamped with a generation counter so they never need clearing.
#[derive(Default)]
struct Scratch {
    stamp: Vec<u32>,
    generation: u32,
    stack: Vec<u32>,
}

impl Scratch {
    fn reset(&mut self, nodes: usize) {
        if self.stamp.len() < nodes {
            self.stamp.resize(nodes, 0);
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        self.stack.clear();
    }

    #[inline]
    fn visit(&mut self, node: u32) -> bool {
        let slot = &mut self.stamp[node as usize];
        if *slot == self.generation {
            false
        } else {
            *slot = self.generation;
            true
        }
    }
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

fn check_inputs(graph: &Graph, seeds: &[ArmId], p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "probability must lie in [0, 1] (got {p})"
        )));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s >= graph.node_count()) {
        return Err(Error::UnknownArm {
            arm: bad,
            arm_count: graph.node_count(),
        });
    }
    Ok(())
}

/// Number of failures before the next success of a Bernoulli(p) sequence,
/// given `ln(1 - p)`.
#[inline]
fn geometric_skip(ln_q: f64, rng: &mut SimRng) -> usize {
    let u = 1.0 - rng.gen::<f64>(); // (0, 1]
    let skip = (u.ln() / ln_q).floor();
    if skip >= usize::MAX as f64 {
        usize::MAX
    } else {
        skip as usize
    }
}

/// Runs one independent cascade from `seeds` and returns the number of
/// activated nodes, seeds included.
pub fn simulate_cascade(graph: &Graph, seeds: &[ArmId], p: f64, rng: &mut SimRng) -> Result<usize> {
    check_inputs(graph, seeds, p)?;
    SCRATCH.with(|cell| {
        let scratch = &mut *cell.borrow_mut();
        scratch.reset(graph.node_count());
        let mut active = 0usize;
        for &s in seeds {
            if scratch.visit(s as u32) {
                scratch.stack.push(s as u32);
                active += 1;
            }
        }
        if p <= 0.0 {
            return Ok(active);
        }
        let ln_q = (1.0 - p).ln(); // -inf when p == 1
        while let Some(node) = scratch.stack.pop() {
            let neighbors = graph.neighbors(node as usize);
            let mut idx = if p >= 1.0 {
                0
            } else {
                geometric_skip(ln_q, rng)
            };
            while idx < neighbors.len() {
                let target = neighbors[idx];
                if scratch.visit(target) {
                    scratch.stack.push(target);
                    active += 1;
                }
                let gap = if p >= 1.0 {
                    0
                } else {
                    geometric_skip(ln_q, rng)
                };
                idx = idx.saturating_add(1).saturating_add(gap);
            }
        }
        Ok(active)
    })
}

/// Activated fraction of one cascade, in `[0, 1]`.
pub fn influence_reward(graph: &Graph, seeds: &[ArmId], p: f64, rng: &mut SimRng) -> Result<f64> {
    Ok(simulate_cascade(graph, seeds, p, rng)? as f64 / graph.node_count() as f64)
}

fn mean_and_std_error(counts: &[u64], scale: f64) -> Estimate {
    let reps = counts.len() as f64;
    let sum: u64 = counts.iter().sum();
    let mean_count = sum as f64 / reps;
    let std_error = if counts.len() > 1 {
        let ss: f64 = counts
            .iter()
            .map(|&c| (c as f64 - mean_count).powi(2))
            .sum();
        (ss / (reps - 1.0)).sqrt() / reps.sqrt()
    } else {
        0.0
    };
    Estimate {
        mean: sum as f64 / (reps * scale),
        std_error: std_error / scale,
    }
}

/// Monte Carlo mean and standard error of [`influence_reward`] over `reps`
/// cascades.
///
/// One `u64` is drawn from `rng`; repetition `r` then runs on ChaCha8 stream
/// `r` under that key, so results do not depend on thread scheduling.
pub fn estimate_expected_spread(
    graph: &Graph,
    seeds: &[ArmId],
    p: f64,
    reps: usize,
    rng: &mut SimRng,
) -> Result<Estimate> {
    if reps == 0 {
        return Err(Error::domain("reps must be positive"));
    }
    check_inputs(graph, seeds, p)?;
    let key = rng.next_u64();
    let counts = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut stream = SimRng::seed_from_u64(key);
            stream.set_stream(r);
            simulate_cascade(graph, seeds, p, &mut stream).map(|c| c as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_and_std_error(&counts, graph.node_count() as f64))
}

/// Expected-spread oracle over a fixed sample of live-edge worlds.
#[derive(Debug, Clone)]
pub struct LiveEdgeOracle {
    graph: Arc<Graph>,
    p: f64,
    seed: u64,
    /// Per world: CSR offsets (node_count + 1 entries) into `targets`.
    offsets: Vec<Vec<u32>>,
    targets: Vec<Vec<u32>>,
}

impl LiveEdgeOracle {
    /// Samples `worlds` live-edge graphs; world `r` uses ChaCha8 stream `r`
    /// keyed by `seed`.
    pub fn new(graph: Arc<Graph>, p: f64, worlds: usize, seed: u64) -> Result<Self> {
        if worlds == 0 {
            return Err(Error::domain("live-edge oracle needs at least one world"));
        }
        check_inputs(&graph, &[], p)?;
        let n = graph.node_count();
        let (offsets, targets): (Vec<_>, Vec<_>) = (0..worlds as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = SimRng::seed_from_u64(seed);
                rng.set_stream(r);
                let mut live = vec![Vec::new(); n];
                for &(u, v) in graph.edges() {
                    if rng.gen::<f64>() < p {
                        live[u as usize].push(v);
                    }
                    if rng.gen::<f64>() < p {
                        live[v as usize].push(u);
                    }
                }
                let mut offsets = Vec::with_capacity(n + 1);
                let mut targets = Vec::new();
                offsets.push(0u32);
                for out in live {
                    targets.extend(out);
                    offsets.push(targets.len() as u32);
                }
                (offsets, targets)
            })
            .unzip();
        Ok(Self {
            graph,
            p,
            seed,
            offsets,
            targets,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn worlds(&self) -> usize {
        self.offsets.len()
    }

    fn reach(&self, world: usize, seeds: &[ArmId], scratch: &mut Scratch) -> u64 {
        let offsets = &self.offsets[world];
        let targets = &self.targets[world];
        scratch.reset(self.graph.node_count());
        let mut count = 0;
        for &s in seeds {
            if scratch.visit(s as u32) {
                scratch.stack.push(s as u32);
                count += 1;
            }
        }
        while let Some(node) = scratch.stack.pop() {
            let range = offsets[node as usize] as usize..offsets[node as usize + 1] as usize;
            for &t in &targets[range] {
                if scratch.visit(t) {
                    scratch.stack.push(t);
                    count += 1;
                }
            }
        }
        count
    }

    /// Mean activated fraction over the sampled worlds, with its standard error.
    pub fn estimate(&self, seeds: &[ArmId]) -> Result<Estimate> {
        check_inputs(&self.graph, seeds, self.p)?;
        let counts: Vec<u64> = SCRATCH.with(|cell| {
            let scratch = &mut *cell.borrow_mut();
            (0..self.worlds())
                .map(|w| self.reach(w, seeds, scratch))
                .collect()
        });
        Ok(mean_and_std_error(&counts, self.graph.node_count() as f64))
    }
}

impl super::SetOracle for LiveEdgeOracle {
    fn arm_count(&self) -> usize {
        self.graph.node_count()
    }

    fn value(&self, set: &[ArmId]) -> Result<f64> {
        Ok(self.estimate(set)?.mean)
    }
}

/// Influence maximisation as a bandit: arms are seed nodes, the reward is the
/// activated fraction of one cascade.
#[derive(Debug, Clone)]
pub struct CascadeEnv {
    oracle: LiveEdgeOracle,
}

impl CascadeEnv {
    /// `oracle_worlds` and `oracle_seed` configure the Monte Carlo
    /// expected-value oracle.
    pub fn new(graph: Arc<Graph>, p: f64, oracle_worlds: usize, oracle_seed: u64) -> Result<Self> {
        Ok(Self {
            oracle: LiveEdgeOracle::new(graph, p, oracle_worlds, oracle_seed)?,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.oracle.graph()
    }

    pub fn p(&self) -> f64 {
        self.oracle.p()
    }

    pub fn oracle(&self) -> &LiveEdgeOracle {
        &self.oracle
    }
}

impl Environment for CascadeEnv {
    fn arm_count(&self) -> usize {
        self.graph().node_count()
    }

    fn sample(&self, action: &[ArmId], rng: &mut SimRng) -> Result<f64> {
        influence_reward(self.graph(), action, self.p(), rng)
    }

    fn expected(&self, action: &[ArmId]) -> Result<Estimate> {
        self.oracle.estimate(action)
    }

    fn has_exact_oracle(&self) -> bool {
        false
    }
}
