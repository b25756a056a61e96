//! The experiments behind the command-line subcommands.

mod decay;
mod enumerate;
mod local_sup;
mod multiplier;
mod scaling;
mod variation;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use simplicial_core::averaging::CopySource;
use simplicial_core::grid::{
    lp_norm_dense, random_test_function, trial_seed, DenseFunction, GeneratorSpec, GridShape,
};

use crate::config::ExperimentConfig;
use crate::error::{ExperimentError, Result};
use crate::report::{AggregateOp, Condition, Report};

pub use decay::{run_lemma_decay, DecayExperiment};
pub use enumerate::{run_enumerate, EnumerateExperiment};
pub use local_sup::{run_local_sup, LocalSupExperiment};
pub use multiplier::{run_prop_square_multiplier, MultiplierCheckExperiment};
pub use scaling::{run_scaling, ScalingExperiment};
pub use variation::{run_jump_theorem, run_theorem_variation, JumpExperiment, VariationExperiment};

/// Everything an experiment run needs besides its own code.
pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub source: &'a dyn CopySource,
    /// Omit timestamps so repeated runs are byte-identical.
    pub stable: bool,
}

pub trait Experiment: Send + Sync {
    /// Subcommand name.
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn run(&self, ctx: &Context<'_>) -> Result<Report>;
}

/// Experiments by subcommand name.
pub struct ExperimentRegistry {
    experiments: BTreeMap<&'static str, Arc<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self {
            experiments: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(EnumerateExperiment));
        r.register(Arc::new(ScalingExperiment));
        r.register(Arc::new(MultiplierCheckExperiment));
        r.register(Arc::new(VariationExperiment));
        r.register(Arc::new(JumpExperiment));
        r.register(Arc::new(DecayExperiment));
        r.register(Arc::new(LocalSupExperiment));
        r
    }

    pub fn register(&mut self, e: Arc<dyn Experiment>) {
        self.experiments.insert(e.name(), e);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Experiment>> {
        self.experiments.get(name).cloned()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn Experiment>> + '_ {
        self.experiments.values()
    }
}

/// Config echo: the shared sections plus the experiment's own section.
fn echo<T: Serialize>(config: &ExperimentConfig, section: &str, value: &T) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("seed".into(), Value::from(config.seed));
    map.insert(
        "simplex".into(),
        serde_json::to_value(&config.simplex).expect("serialisable"),
    );
    map.insert(
        "grid".into(),
        serde_json::to_value(&config.grid).expect("serialisable"),
    );
    map.insert(
        section.into(),
        serde_json::to_value(value).expect("serialisable"),
    );
    Value::Object(map)
}

fn max_of(table: &str, column: &str, filter: Vec<Condition>) -> AggregateOp {
    AggregateOp::Max {
        table: table.into(),
        column: column.into(),
        filter,
    }
}

fn min_of(table: &str, column: &str, filter: Vec<Condition>) -> AggregateOp {
    AggregateOp::Min {
        table: table.into(),
        column: column.into(),
        filter,
    }
}

fn quotient(numerator: &str, denominator: &str) -> AggregateOp {
    AggregateOp::Quotient {
        numerator: numerator.into(),
        denominator: denominator.into(),
    }
}

fn require(condition: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if condition {
        Ok(())
    } else {
        Err(ExperimentError::Config(msg()))
    }
}

/// Strictly increasing and non-empty.
fn check_scales(name: &str, scales: &[u64]) -> Result<()> {
    require(!scales.is_empty(), || format!("{name}: empty scale list"))?;
    require(
        scales[0] > 0 && scales.windows(2).all(|w| w[0] < w[1]),
        || format!("{name}: scales must be positive and strictly increasing"),
    )
}

/// One random test function per trial, `trial_seed(seed, i)`, evaluated in
/// parallel; results come back in trial order.
fn run_trials<T: Send>(
    trials: usize,
    seed: u64,
    shape: GridShape,
    generator: &GeneratorSpec,
    body: impl Fn(usize, u64, DenseFunction, f64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i as u64);
            let f = random_test_function(s, shape, generator)?
                .into_dense()
                .ok_or_else(|| {
                    ExperimentError::Internal("generators return dense functions".into())
                })?;
            let norm = lp_norm_dense(&f, 2.0)?;
            body(i, s, f, norm)
        })
        .collect()
}

/// `|g|_2 / |f|_2`, zero when `f = 0`.
fn ratio(g: f64, f: f64) -> f64 {
    if f == 0.0 {
        0.0
    } else {
        g / f
    }
}
