//! Sweep configuration, read from TOML.
//!
//! ```toml
//! master_seed = 2024
//! repetitions = 10            # default 10
//! ks = [4, 8]
//! horizons = [20000, 40000]   # strictly ascending
//! output_dir = "results"      # default "results", relative to this file
//! write_traces = false        # one trace CSV per run
//! record_wall_time = false    # fill the wall_ms column (breaks byte-identical reruns)
//! jobs = 4                    # default: available processors
//!
//! [environment]
//! kind = "cascade"            # or "coverage" / "random-coverage"
//! graph = "graph.txt"
//! p = 0.1
//!
//! [reference]
//! kind = "offline-greedy"     # or "brute-force"
//! mc_reps = 1000              # live-edge worlds for the spread oracle
//! oracle_seed = 0
//!
//! [[methods]]
//! name = "sgb"                # sgb | etcg | sgb-anytime | random
//! epsilon = 0.3               # optional
//! force = false               # run cells that fail the horizon check
//!
//! [[methods]]
//! name = "sgb-anytime"
//! t_initial = 5000            # default: minimal valid horizon
//! ```
//!
//! A `coverage` environment takes `path`; `random-coverage` takes `arms`,
//! `universe`, `p_max`, `density` and `seed`.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::reference::ReferenceKind;
use crate::env::{
    load_edge_list, CascadeEnv, CoverageInstance, CoverageParams, Environment, Estimate,
};
use crate::{rng_from_seed, ArmId, Error, Result, SimRng};

fn default_repetitions() -> usize {
    10
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_mc_reps() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    pub ks: Vec<usize>,
    pub horizons: Vec<usize>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub write_traces: bool,
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default)]
    pub jobs: Option<usize>,
    pub environment: EnvironmentSpec,
    #[serde(default)]
    pub reference: ReferenceSpec,
    pub methods: Vec<MethodSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    Coverage {
        path: PathBuf,
    },
    RandomCoverage {
        arms: usize,
        universe: usize,
        p_max: f64,
        density: f64,
        seed: u64,
    },
    Cascade {
        graph: PathBuf,
        p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    #[serde(default)]
    pub kind: ReferenceKind,
    #[serde(default = "default_mc_reps")]
    pub mc_reps: usize,
    #[serde(default)]
    pub oracle_seed: u64,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        Self {
            kind: ReferenceKind::default(),
            mc_reps: default_mc_reps(),
            oracle_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Sgb,
    Etcg,
    SgbAnytime,
    Random,
}

impl MethodName {
    pub fn label(self) -> &'static str {
        match self {
            MethodName::Sgb => "sgb",
            MethodName::Etcg => "etcg",
            MethodName::SgbAnytime => "sgb-anytime",
            MethodName::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Sgb, Self::Etcg, Self::SgbAnytime, Self::Random]
            .into_iter()
            .find(|m| m.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub name: MethodName,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub t_initial: Option<usize>,
    #[serde(default)]
    pub force: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a config file; relative paths inside it are
    /// resolved against the file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let mut config = Self::from_toml(&text).map_err(|e| e.in_file(path))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.output_dir);
        match &mut self.environment {
            EnvironmentSpec::Coverage { path } => join(path),
            EnvironmentSpec::Cascade { graph, .. } => join(graph),
            EnvironmentSpec::RandomCoverage { .. } => {}
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return fail("ks must be a non-empty list of positive integers".into());
        }
        let mut ks = self.ks.clone();
        ks.sort_unstable();
        if ks.windows(2).any(|w| w[0] == w[1]) {
            return fail("ks must not repeat".into());
        }
        if self.horizons.is_empty() {
            return fail("horizons must not be empty".into());
        }
        if !self.horizons.windows(2).all(|w| w[0] < w[1]) {
            return fail("horizons must be strictly ascending".into());
        }
        if self.methods.is_empty() {
            return fail("at least one [[methods]] entry is required".into());
        }
        if self.jobs == Some(0) {
            return fail("jobs must be positive".into());
        }
        for m in &self.methods {
            if let Some(eps) = m.epsilon {
                if !(eps > 0.0 && eps <= 1.0) {
                    return fail(format!(
                        "{}: epsilon {eps} is outside (0, 1]",
                        m.name.label()
                    ));
                }
                if matches!(m.name, MethodName::Etcg | MethodName::Random) {
                    return fail(format!("{} does not take an epsilon", m.name.label()));
                }
            }
            if m.t_initial.is_some() && m.name != MethodName::SgbAnytime {
                return fail(format!("{} does not take t_initial", m.name.label()));
            }
        }
        if let EnvironmentSpec::Cascade { p, .. } = self.environment {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("cascade probability {p} is outside [0, 1]"));
            }
        }
        if self.reference.mc_reps == 0 {
            return fail("reference.mc_reps must be positive".into());
        }
        Ok(())
    }
}

/// A loaded environment of any supported kind.
#[derive(Debug, Clone)]
pub enum AnyEnv {
    Coverage(CoverageInstance),
    Cascade(CascadeEnv),
}

impl AnyEnv {
    pub fn describe(&self) -> String {
        match self {
            AnyEnv::Coverage(c) => {
                format!("coverage ({} arms, universe {})", c.arms(), c.universe())
            }
            AnyEnv::Cascade(c) => format!(
                "cascade ({} nodes, {} edges, p = {})",
                c.graph().node_count(),
                c.graph().edge_count(),
                c.p()
            ),
        }
    }
}

impl Environment for AnyEnv {
    fn arm_count(&self) -> usize {
        match self {
            AnyEnv::Coverage(e) => e.arm_count(),
            AnyEnv::Cascade(e) => e.arm_count(),
        }
    }

    fn sample(&self, action: &[ArmId], rng: &mut SimRng) -> Result<f64> {
        match self {
            AnyEnv::Coverage(e) => e.sample(action, rng),
            AnyEnv::Cascade(e) => e.sample(action, rng),
        }
    }

    fn expected(&self, action: &[ArmId]) -> Result<Estimate> {
        match self {
            AnyEnv::Coverage(e) => e.expected(action),
            AnyEnv::Cascade(e) => e.expected(action),
        }
    }

    fn has_exact_oracle(&self) -> bool {
        matches!(self, AnyEnv::Coverage(_))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::from(e).in_file(path))
}

impl EnvironmentSpec {
    /// Loads the environment; `reference` configures the spread oracle.
    pub fn build(&self, reference: &ReferenceSpec) -> Result<AnyEnv> {
        match self {
            EnvironmentSpec::Coverage { path } => {
                let inst =
                    CoverageInstance::from_reader(open(path)?).map_err(|e| e.in_file(path))?;
                Ok(AnyEnv::Coverage(inst))
            }
            EnvironmentSpec::RandomCoverage {
                arms,
                universe,
                p_max,
                density,
                seed,
            } => {
                let params = CoverageParams {
                    arms: *arms,
                    universe: *universe,
                    p_max: *p_max,
                    density: *density,
                };
                Ok(AnyEnv::Coverage(CoverageInstance::generate(
                    params,
                    &mut rng_from_seed(*seed),
                )?))
            }
            EnvironmentSpec::Cascade { graph, p } => {
                let loaded = load_edge_list(open(graph)?).map_err(|e| e.in_file(graph))?;
                for (count, what) in [
                    (loaded.dropped_self_loops, "self-loops"),
                    (loaded.dropped_duplicates, "duplicate edges"),
                ] {
                    if count > 0 {
                        log::warn!("{}: dropped {count} {what}", graph.display());
                    }
                }
                let env = CascadeEnv::new(
                    Arc::new(loaded.graph),
                    *p,
                    reference.mc_reps,
                    reference.oracle_seed,
                )?;
                Ok(AnyEnv::Cascade(env))
            }
        }
    }

    /// Parses a command-line environment spec:
    ///
    /// - `coverage:<path>`
    /// - `graph:<path>` (with the cascade probability given separately)
    /// - `random-coverage:arms=50,universe=40,p_max=0.5,density=0.3,seed=1`
    /// - a bare path, read as a coverage file if it has a `format = coverage/1`
    ///   line and as an edge list otherwise.
    pub fn parse_cli(spec: &str, p: f64) -> Result<Self> {
        if let Some(path) = spec.strip_prefix("coverage:") {
            return Ok(EnvironmentSpec::Coverage { path: path.into() });
        }
        if let Some(path) = spec.strip_prefix("graph:") {
            return Ok(EnvironmentSpec::Cascade {
                graph: path.into(),
                p,
            });
        }
        if let Some(args) = spec.strip_prefix("random-coverage:") {
            return parse_random_coverage(args);
        }
        let path = PathBuf::from(spec);
        if is_coverage_file(&path)? {
            Ok(EnvironmentSpec::Coverage { path })
        } else {
            Ok(EnvironmentSpec::Cascade { graph: path, p })
        }
    }
}

fn parse_random_coverage(args: &str) -> Result<EnvironmentSpec> {
    let mut fields = [None; 5];
    const NAMES: [&str; 5] = ["arms", "universe", "p_max", "density", "seed"];
    for pair in args.split(',').filter(|s| !s.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
        let idx = NAMES
            .iter()
            .position(|n| *n == key.trim())
            .ok_or_else(|| Error::Config(format!("unknown random-coverage key `{key}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("`{key}` needs a number, got `{value}`")))?;
        fields[idx] = Some(value);
    }
    let get = |i: usize| {
        fields[i].ok_or_else(|| Error::Config(format!("random-coverage needs `{}`", NAMES[i])))
    };
    let count = |i: usize| -> Result<usize> {
        let v = get(i)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Config(format!(
                "`{}` must be a non-negative integer",
                NAMES[i]
            )));
        }
        Ok(v as usize)
    };
    Ok(EnvironmentSpec::RandomCoverage {
        arms: count(0)?,
        universe: count(1)?,
        p_max: get(2)?,
        density: get(3)?,
        seed: fields[4].map_or(0, |s| s as u64),
    })
}

fn is_coverage_file(path: &Path) -> Result<bool> {
    for line in open(path)?.lines() {
        let line = line.map_err(|e| Error::from(e).in_file(path))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        return Ok(line
            .split_once('=')
            .is_some_and(|(k, v)| k.trim() == "format" && v.trim().starts_with("coverage")));
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
master_seed = 7
ks = [2, 3]
horizons = [1000, 2000]

[environment]
kind = "random-coverage"
arms = 10
universe = 8
p_max = 0.5
density = 0.4
seed = 3

[[methods]]
name = "sgb"
epsilon = 0.3

[[methods]]
name = "etcg"
force = true
"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.repetitions, 10);
        assert_eq!(c.output_dir, PathBuf::from("results"));
        assert_eq!(c.reference, ReferenceSpec::default());
        assert_eq!(c.methods[0].name, MethodName::Sgb);
        assert_eq!(c.methods[0].epsilon, Some(0.3));
        assert!(c.methods[1].force);
        assert!(!c.write_traces && !c.record_wall_time);
        let env = c.environment.build(&c.reference).unwrap();
        assert_eq!(env.arm_count(), 10);
        assert!(env.has_exact_oracle());
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            SAMPLE.replace("[1000, 2000]", "[2000, 1000]"),
            SAMPLE.replace("ks = [2, 3]", "ks = []"),
            SAMPLE.replace("ks = [2, 3]", "ks = [2, 2]"),
            SAMPLE.replace("master_seed = 7", "master_seed = 7\nrepetitions = 0"),
            SAMPLE.replace("epsilon = 0.3", "epsilon = 1.5"),
            SAMPLE.replace("name = \"etcg\"", "name = \"ucb\""),
            SAMPLE.replace("master_seed = 7", "master_seed = 7\ncolour = 1"),
        ];
        for text in cases {
            assert!(
                matches!(ExperimentConfig::from_toml(&text), Err(Error::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn toml_errors_carry_line_numbers() {
        let text = SAMPLE.replace("horizons = [1000, 2000]", "horizons = [1000, 2000");
        let msg = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let text = SAMPLE.replace(
            "kind = \"random-coverage\"\narms = 10\nuniverse = 8\np_max = 0.5\ndensity = 0.4\nseed = 3",
            "kind = \"cascade\"\ngraph = \"g.txt\"\np = 0.1",
        );
        let path = dir.path().join("sweep.toml");
        std::fs::write(&path, text).unwrap();
        let c = ExperimentConfig::from_path(&path).unwrap();
        assert_eq!(c.output_dir, dir.path().join("results"));
        assert_eq!(
            c.environment,
            EnvironmentSpec::Cascade {
                graph: dir.path().join("g.txt"),
                p: 0.1
            }
        );
        let err = c.environment.build(&c.reference).unwrap_err();
        assert!(err.to_string().contains("g.txt"));
    }

    #[test]
    fn cli_specs() {
        let spec = EnvironmentSpec::parse_cli(
            "random-coverage:arms=5,universe=4,p_max=0.5,density=0.5,seed=9",
            0.1,
        )
        .unwrap();
        assert_eq!(
            spec,
            EnvironmentSpec::RandomCoverage {
                arms: 5,
                universe: 4,
                p_max: 0.5,
                density: 0.5,
                seed: 9
            }
        );
        assert!(EnvironmentSpec::parse_cli("random-coverage:arms=5", 0.1).is_err());
        assert!(EnvironmentSpec::parse_cli(
            "random-coverage:arms=2.5,universe=4,p_max=0.5,density=0.5",
            0.1
        )
        .is_err());

        let dir = tempfile::tempdir().unwrap();
        let cov = dir.path().join("c.txt");
        std::fs::write(
            &cov,
            "# header\nformat = coverage/1\narms = 1\nuniverse = 1\np0 = 0.5\n",
        )
        .unwrap();
        let graph = dir.path().join("g.txt");
        std::fs::write(&graph, "0 1\n1 2\n").unwrap();
        assert!(matches!(
            EnvironmentSpec::parse_cli(cov.to_str().unwrap(), 0.1).unwrap(),
            EnvironmentSpec::Coverage { .. }
        ));
        assert!(matches!(
            EnvironmentSpec::parse_cli(graph.to_str().unwrap(), 0.1).unwrap(),
            EnvironmentSpec::Cascade { p, .. } if p == 0.1
        ));
        let env = EnvironmentSpec::parse_cli(graph.to_str().unwrap(), 0.1)
            .unwrap()
            .build(&ReferenceSpec::default())
            .unwrap();
        assert_eq!(env.arm_count(), 3);
        assert!(!env.has_exact_oracle());
    }
}
