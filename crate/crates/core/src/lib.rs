//! Random molecular chains and degree-based topological indices.
//!
//! A chain grows one unit at a time (hexagons, octagons, squares), each
//! step picking one of m attachment modes i.i.d. with probabilities
//! p_1..p_m. For any symmetric degree-pair function h, the edge sum
//! TI(G) = Σ h(d_u, d_v) then changes by a per-link constant, which makes
//! its mean and variance linear in n, its exact law a multinomial
//! pushforward, and its standardized value asymptotically normal.
//!
//! The crate provides:
//!
//! * [`graph`] — the undirected simple graph chains are realized as;
//! * [`index`] — the catalog of degree-pair functions and TI evaluation;
//! * [`expr`] — a parser for custom h(x, y) expressions;
//! * [`family`] — the five chain families and their growth rules;
//! * [`theory`] — closed-form moments, A/B/C constants, the exact law
//!   and its moment generating function;
//! * [`oracle`] — brute-force enumeration of all link sequences;
//! * [`montecarlo`] — the seeded, parallel replication engine;
//! * [`stats`] — normal CDF, Kolmogorov-Smirnov distance and Gaussian KDE.
//!
//! The numeric core is generic over the scalar type (any [`scalar::Real`],
//! in practice `f32` or `f64`); the aliases below pin the common
//! double-precision instantiation used by the simulation engine and CLI.

pub mod expr;
pub mod family;
pub mod graph;
pub mod index;
pub mod montecarlo;
pub mod oracle;
pub mod scalar;
pub mod stats;
pub mod theory;

pub use expr::HExpression;
pub use family::{alpha_vector, three_chains, verify_0mp, ChainState, CustomFamily, Family};
pub use graph::Graph;
pub use index::{topological_index, vertex_power_sum, Builtin, IndexFunction};
pub use montecarlo::{run_experiment, simulate_chain, SampleSet, SimulationModel};
pub use oracle::{enumerate_exact, OracleLimit};
pub use scalar::Real;

/// Double-precision link distribution.
pub type LinkDistribution = family::LinkDistribution<f64>;
/// Double-precision moment summary.
pub type MomentSummary = theory::MomentSummary<f64>;
/// Double-precision exact law.
pub type ExactDistribution = theory::ExactDistribution<f64>;
/// Double-precision closed-form constants.
pub type AbcConstants = theory::AbcConstants<f64>;
/// Double-precision kernel density estimate.
pub type DensityEstimate = stats::DensityEstimate<f64>;
