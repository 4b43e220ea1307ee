//! Seeded replication engine.
//!
//! Replication r draws its links from ChaCha8 stream r of the master seed,
//! so results are bit-identical across runs, execution orders and thread
//! counts. Chains are grown as real graphs by default; increment mode
//! (per-step alpha additions) serves user-defined families and very long
//! chains, and is validated against graph mode on short ones.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::family::{alpha_vector, ChainState, CustomFamily, Family, LinkDistribution};
use crate::index::{topological_index, IndexFunction};
use crate::stats::{self, DensityEstimate, StatsError};
use crate::theory::MomentSummary;

#[derive(Debug, Error, PartialEq)]
pub enum SimulationError {
    #[error("need n >= 2 units, got {0}")]
    TooFewUnits(usize),
    #[error("need at least one replication")]
    NoReplications,
    #[error("probability vector has {got} entries but the model has {expected} links")]
    ProbabilityLength { expected: usize, got: usize },
}

/// What one replication grows.
#[derive(Debug, Clone)]
pub enum SimulationModel<'a> {
    /// Grow the actual graph and evaluate the index on it.
    Graph { family: Family, index: &'a IndexFunction },
    /// Add per-link increments to the starting value; no graphs.
    Increments {
        family_label: String,
        index_label: String,
        ti2: f64,
        alpha: Vec<f64>,
    },
}

impl<'a> SimulationModel<'a> {
    /// Increment-mode twin of a graph model (the `--fast-increments` path).
    pub fn fast_increments(family: Family, index: &IndexFunction) -> SimulationModel<'static> {
        SimulationModel::Increments {
            family_label: family.name().to_owned(),
            index_label: index.name().to_owned(),
            ti2: crate::family::initial_index_value(family, index),
            alpha: alpha_vector(family, index),
        }
    }

    /// Increment mode for a user-defined family.
    pub fn custom(custom: &CustomFamily, index_label: &str) -> SimulationModel<'static> {
        SimulationModel::Increments {
            family_label: custom.name.clone(),
            index_label: index_label.to_owned(),
            ti2: custom.ti2,
            alpha: custom.alpha.clone(),
        }
    }

    pub fn link_count(&self) -> usize {
        match self {
            SimulationModel::Graph { family, .. } => family.link_count(),
            SimulationModel::Increments { alpha, .. } => alpha.len(),
        }
    }

    pub fn family_label(&self) -> &str {
        match self {
            SimulationModel::Graph { family, .. } => family.name(),
            SimulationModel::Increments { family_label, .. } => family_label,
        }
    }

    pub fn index_label(&self) -> &str {
        match self {
            SimulationModel::Graph { index, .. } => index.name(),
            SimulationModel::Increments { index_label, .. } => index_label,
        }
    }
}

/// Monte Carlo replication results.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub family: String,
    pub index: String,
    pub n: usize,
    pub probs: Vec<f64>,
    pub master_seed: u64,
    /// Final TI of replication r, ordered by r.
    pub ti_values: Vec<f64>,
    /// Per-replication link counts (each sums to n - 2).
    pub x_counts: Vec<Vec<u64>>,
}

impl SampleSet {
    pub fn reps(&self) -> usize {
        self.ti_values.len()
    }
}

/// Sample summary against the theoretical moments.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub reps: usize,
    pub mean: f64,
    /// Unbiased sample variance (divisor reps - 1).
    pub variance: f64,
    /// KS distance of the standardized sample from N(0, 1); `None` when the
    /// theoretical variance is zero (degenerate chain, nothing to test).
    pub ks_statistic: Option<f64>,
}

/// The RNG for replication `replication` of a run seeded by `master_seed`.
fn replication_rng(master_seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replication);
    rng
}

/// Draws a 1-based link from the cumulative distribution.
fn draw_link(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i + 1;
        }
    }
    // cumulative sum fell a few ulps short of 1; take the last feasible link
    probs.iter().rposition(|&p| p > 0.0).map_or(probs.len(), |i| i + 1)
}

fn run_one(
    model: &SimulationModel,
    probs: &LinkDistribution<f64>,
    n: usize,
    mut rng: ChaCha8Rng,
) -> (f64, Vec<u64>) {
    let m = model.link_count();
    let mut counts = vec![0u64; m];
    match model {
        SimulationModel::Graph { family, index } => {
            let mut state = ChainState::initial(*family);
            for _ in 2..n {
                let link = draw_link(&mut rng, probs.probs());
                counts[link - 1] += 1;
                state.attach(link).expect("drawn link in range");
            }
            (topological_index(state.graph(), index), counts)
        }
        SimulationModel::Increments { ti2, alpha, .. } => {
            let mut ti = *ti2;
            for _ in 2..n {
                let link = draw_link(&mut rng, probs.probs());
                counts[link - 1] += 1;
                ti += alpha[link - 1];
            }
            (ti, counts)
        }
    }
}

fn validate(
    model: &SimulationModel,
    probs: &LinkDistribution<f64>,
    n: usize,
) -> Result<(), SimulationError> {
    if n < 2 {
        return Err(SimulationError::TooFewUnits(n));
    }
    if probs.len() != model.link_count() {
        return Err(SimulationError::ProbabilityLength {
            expected: model.link_count(),
            got: probs.len(),
        });
    }
    Ok(())
}

/// One replication: grows a chain of `n` units with links drawn i.i.d. from
/// `probs` on the generator seeded by `seed` (stream 0). Returns the final
/// TI and the link-count vector. Same seed, same output, bit for bit.
pub fn simulate_chain(
    model: &SimulationModel,
    probs: &LinkDistribution<f64>,
    n: usize,
    seed: u64,
) -> Result<(f64, Vec<u64>), SimulationError> {
    validate(model, probs, n)?;
    Ok(run_one(model, probs, n, replication_rng(seed, 0)))
}

/// Rebuilds the chain grown by replication `rep` of a graph-mode run, for
/// inspection or export.
pub fn replication_chain(
    family: Family,
    probs: &LinkDistribution<f64>,
    n: usize,
    master_seed: u64,
    rep: u64,
) -> Result<ChainState, SimulationError> {
    if n < 2 {
        return Err(SimulationError::TooFewUnits(n));
    }
    if probs.len() != family.link_count() {
        return Err(SimulationError::ProbabilityLength {
            expected: family.link_count(),
            got: probs.len(),
        });
    }
    let mut rng = replication_rng(master_seed, rep);
    let mut state = ChainState::initial(family);
    for _ in 2..n {
        let link = draw_link(&mut rng, probs.probs());
        state.attach(link).expect("drawn link in range");
    }
    Ok(state)
}

/// Runs `reps` independent replications in parallel. Replication r uses
/// stream r, so the result does not depend on scheduling.
pub fn run_experiment(
    model: &SimulationModel,
    probs: &LinkDistribution<f64>,
    n: usize,
    reps: usize,
    master_seed: u64,
) -> Result<SampleSet, SimulationError> {
    validate(model, probs, n)?;
    if reps == 0 {
        return Err(SimulationError::NoReplications);
    }
    let results: Vec<(f64, Vec<u64>)> = (0..reps)
        .into_par_iter()
        .map(|r| run_one(model, probs, n, replication_rng(master_seed, r as u64)))
        .collect();
    let mut ti_values = Vec::with_capacity(reps);
    let mut x_counts = Vec::with_capacity(reps);
    for (ti, x) in results {
        debug_assert_eq!(x.iter().sum::<u64>(), (n - 2) as u64);
        ti_values.push(ti);
        x_counts.push(x);
    }
    Ok(SampleSet {
        family: model.family_label().to_owned(),
        index: model.index_label().to_owned(),
        n,
        probs: probs.probs().to_vec(),
        master_seed,
        ti_values,
        x_counts,
    })
}

/// Sample mean/variance plus the KS distance of the theory-standardized
/// values from the standard normal.
pub fn summarize(s: &SampleSet, theory: &MomentSummary<f64>) -> Result<SampleSummary, StatsError> {
    if s.reps() < 2 {
        return Err(StatsError::TooFewSamples { needed: 2, got: s.reps() });
    }
    let mean = stats::mean(&s.ti_values);
    let variance = stats::sample_variance(&s.ti_values);
    let ks_statistic = if theory.variance > 0.0 {
        let sd = theory.variance.sqrt();
        let standardized: Vec<f64> =
            s.ti_values.iter().map(|ti| (ti - theory.mean) / sd).collect();
        Some(stats::ks_normal(&standardized)?)
    } else {
        None
    };
    Ok(SampleSummary { reps: s.reps(), mean, variance, ks_statistic })
}

/// Gaussian KDE of the TI sample (Silverman bandwidth).
pub fn kde(s: &SampleSet, grid_points: usize) -> Result<DensityEstimate<f64>, StatsError> {
    stats::kde(&s.ti_values, grid_points)
}

/// Writes the sample as CSV: `rep,ti,x1..xm`, one row per replication.
/// Output is deterministic, so equal seeds give byte-identical files.
pub fn write_csv<W: Write>(s: &SampleSet, mut out: W) -> io::Result<()> {
    write!(out, "rep,ti")?;
    for i in 1..=s.probs.len() {
        write!(out, ",x{i}")?;
    }
    writeln!(out)?;
    for (r, (ti, x)) in s.ti_values.iter().zip(&s.x_counts).enumerate() {
        write!(out, "{r},{ti}")?;
        for c in x {
            write!(out, ",{c}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
