//! The five chain families and their stepwise growth.
//!
//! Every family grows one unit per step; the attachment mode ("link") is an
//! integer in `1..=m`. Canonical labelings, with the terminal unit written
//! `t1..t6` (or `t1..t8`) in cyclic order:
//!
//! * **polyphenyl** — hexagons joined by bridge edges. `t1` is the terminal
//!   hexagon's bridge endpoint; link 1/2/3 bridges from `t2`/`t3`/`t4`
//!   (ortho/meta/para) to vertex `u1` of a fresh hexagon. Unit k occupies
//!   vertices `6(k-1)..6k`, with `u1` the lowest id.
//! * **cyclooctane** — octagons joined by bridge edges; links 1..4 bridge
//!   from `t2`..`t5`. Unit k occupies vertices `8(k-1)..8k`.
//! * **phenylene** — hexagons joined through squares. `(t1, t2)` is the
//!   terminal hexagon's entry edge (shared with the previous square); the
//!   exit edge is `(t4,t5)` for link 1 (para), `(t3,t4)` for link 2 and
//!   `(t5,t6)` for link 3. A step adds the square on the exit edge
//!   (`u1`, `u2` new) and a hexagon on `(u1, u2)` (`u3..u6` new), six new
//!   vertices in total.
//! * **hexagonal** — hexagons fused on shared edges (catacondensed).
//!   `(t1, t2)` is the fused entry edge; exit edges per link as for
//!   phenylene; a step adds four vertices closing the new hexagon.
//! * **spiro** — hexagons sharing a single vertex of degree 4. `t1` is the
//!   shared vertex seen from the terminal hexagon; link 1/2/3 picks
//!   `t2`/`t3`/`t4` as the new shared vertex; a step adds five vertices.
//!
//! Link 1 is the labeling that reproduces the A-coefficient of the
//! closed-form constants in [`crate::theory`]; all other links share the
//! B-coefficient. Growth is deterministic given the link history.

use thiserror::Error;

use crate::graph::Graph;
use crate::index::IndexFunction;
use crate::index::topological_index;
use crate::scalar::{real, Real};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Error, PartialEq)]
pub enum FamilyError {
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("link {link} out of range 1..={m}")]
    LinkOutOfRange { link: usize, m: usize },
    #[error("0MP verification needs depth >= 3, got {0}")]
    DepthTooSmall(usize),
    #[error("probability vector must have {expected} entries, got {got}")]
    ProbabilityLength { expected: usize, got: usize },
    #[error("probabilities must be nonnegative and sum to 1 (sum = {sum})")]
    InvalidProbabilities { sum: f64 },
}

/// The five graph-backed chain families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Phenylene,
    Polyphenyl,
    Cyclooctane,
    Hexagonal,
    Spiro,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Phenylene,
        Family::Polyphenyl,
        Family::Cyclooctane,
        Family::Hexagonal,
        Family::Spiro,
    ];

    /// The three families with closed-form A/B/C constants.
    pub const CLOSED_FORM: [Family; 3] =
        [Family::Phenylene, Family::Polyphenyl, Family::Cyclooctane];

    pub fn name(self) -> &'static str {
        match self {
            Family::Phenylene => "phenylene",
            Family::Polyphenyl => "polyphenyl",
            Family::Cyclooctane => "cyclooctane",
            Family::Hexagonal => "hexagonal",
            Family::Spiro => "spiro",
        }
    }

    pub fn from_name(name: &str) -> Result<Family, FamilyError> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| FamilyError::UnknownFamily(name.into()))
    }

    /// Number of attachment modes m.
    pub fn link_count(self) -> usize {
        match self {
            Family::Cyclooctane => 4,
            _ => 3,
        }
    }

    /// Closed-form vertex count of a chain with `n` units.
    pub fn vertex_count(self, n: usize) -> usize {
        match self {
            Family::Phenylene => 6 * n,
            Family::Polyphenyl => 6 * n,
            Family::Cyclooctane => 8 * n,
            Family::Hexagonal => 4 * n + 2,
            Family::Spiro => 5 * n + 1,
        }
    }

    /// Closed-form edge count of a chain with `n` units.
    pub fn edge_count(self, n: usize) -> usize {
        match self {
            Family::Phenylene => 8 * n - 2,
            Family::Polyphenyl => 7 * n - 1,
            Family::Cyclooctane => 9 * n - 1,
            Family::Hexagonal => 5 * n + 1,
            Family::Spiro => 6 * n,
        }
    }

    fn ring_size(self) -> usize {
        match self {
            Family::Cyclooctane => 8,
            _ => 6,
        }
    }

    /// The n = 1 chain: a single hexagon or octagon. Convenience only;
    /// growth and all distribution theory start from the n = 2 chain.
    pub fn single_unit(self) -> Graph {
        let size = self.ring_size();
        let mut g = Graph::new(size);
        let ring: Vec<usize> = (0..size).collect();
        g.add_cycle(&ring).expect("fresh ring");
        g
    }
}

/// Per-link selection probabilities p_1..p_m.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDistribution<F: Real> {
    probs: Vec<F>,
}

impl<F: Real> LinkDistribution<F> {
    /// Validates nonnegativity and unit sum (within 1e-9).
    pub fn new(probs: Vec<F>) -> Result<Self, FamilyError> {
        let sum: F = probs.iter().copied().sum();
        let sum64 = sum.to_f64().unwrap_or(f64::NAN);
        if probs.iter().any(|p| *p < F::zero()) || (sum64 - 1.0).abs() > 1e-9 {
            return Err(FamilyError::InvalidProbabilities { sum: sum64 });
        }
        Ok(LinkDistribution { probs })
    }

    /// p_1 fixed, remaining mass spread uniformly over links 2..m.
    pub fn with_first(p1: F, m: usize) -> Result<Self, FamilyError> {
        let rest = (F::one() - p1) / real::<F>((m - 1) as f64);
        let mut probs = vec![rest; m];
        probs[0] = p1;
        LinkDistribution::new(probs)
    }

    pub fn uniform(m: usize) -> Self {
        let p = F::one() / real::<F>(m as f64);
        LinkDistribution { probs: vec![p; m] }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }
}

/// A chain realization: the graph, the terminal-unit attachment context and
/// the link history (L_3, ..., L_n).
#[derive(Debug, Clone)]
pub struct ChainState {
    family: Family,
    graph: Graph,
    units: usize,
    // Terminal unit's vertices in cyclic order, starting at the entry
    // vertex (or the entry edge's two endpoints).
    terminal: Vec<usize>,
    history: Vec<u8>,
}

impl ChainState {
    /// Builds the two-unit chain G_2 for `family`.
    pub fn initial(family: Family) -> ChainState {
        let ring = family.ring_size();
        let mut graph = Graph::new(0);
        let terminal = match family {
            Family::Polyphenyl | Family::Cyclooctane => {
                let first = graph.add_vertices(2 * ring);
                let cycle1: Vec<usize> = (first..first + ring).collect();
                let cycle2: Vec<usize> = (first + ring..first + 2 * ring).collect();
                graph.add_cycle(&cycle1).expect("fresh ring");
                graph.add_cycle(&cycle2).expect("fresh ring");
                graph.add_edge(cycle1[0], cycle2[0]).expect("bridge");
                cycle2
            }
            Family::Phenylene => {
                let first = graph.add_vertices(6);
                let hexagon1: Vec<usize> = (first..first + 6).collect();
                graph.add_cycle(&hexagon1).expect("fresh ring");
                // square on hexagon edge (v1, v2), then hexagon on (u1, u2)
                attach_square_and_hexagon(&mut graph, hexagon1[0], hexagon1[1])
            }
            Family::Hexagonal => {
                let first = graph.add_vertices(6);
                let hexagon1: Vec<usize> = (first..first + 6).collect();
                graph.add_cycle(&hexagon1).expect("fresh ring");
                fuse_hexagon(&mut graph, hexagon1[0], hexagon1[1])
            }
            Family::Spiro => {
                let first = graph.add_vertices(6);
                let hexagon1: Vec<usize> = (first..first + 6).collect();
                graph.add_cycle(&hexagon1).expect("fresh ring");
                share_vertex_hexagon(&mut graph, hexagon1[0])
            }
        };
        ChainState { family, graph, units: 2, terminal, history: Vec::new() }
    }

    /// Replays a link history on top of the initial chain.
    pub fn from_history(family: Family, links: &[u8]) -> Result<ChainState, FamilyError> {
        let mut state = ChainState::initial(family);
        for &link in links {
            state.attach(link as usize)?;
        }
        Ok(state)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Number of units n.
    pub fn units(&self) -> usize {
        self.units
    }

    /// Link choices L_3..L_n made so far (length n - 2).
    pub fn history(&self) -> &[u8] {
        &self.history
    }

    /// Terminal unit's vertices in cyclic order (entry label first).
    pub fn terminal_unit(&self) -> &[usize] {
        &self.terminal
    }

    /// Attaches one unit using attachment mode `link` (1-based).
    pub fn attach(&mut self, link: usize) -> Result<(), FamilyError> {
        let m = self.family.link_count();
        if link < 1 || link > m {
            return Err(FamilyError::LinkOutOfRange { link, m });
        }
        let t = &self.terminal;
        match self.family {
            Family::Polyphenyl | Family::Cyclooctane => {
                // bridge from t_{link+1} to u1 of a fresh ring
                let anchor = t[link];
                let ring = self.family.ring_size();
                let first = self.graph.add_vertices(ring);
                let cycle: Vec<usize> = (first..first + ring).collect();
                self.graph.add_cycle(&cycle).expect("fresh ring");
                self.graph.add_edge(anchor, cycle[0]).expect("bridge");
                self.terminal = cycle;
            }
            Family::Phenylene => {
                let (e1, e2) = exit_edge(t, link);
                self.terminal = attach_square_and_hexagon(&mut self.graph, e1, e2);
            }
            Family::Hexagonal => {
                let (e1, e2) = exit_edge(t, link);
                self.terminal = fuse_hexagon(&mut self.graph, e1, e2);
            }
            Family::Spiro => {
                let anchor = t[link];
                self.terminal = share_vertex_hexagon(&mut self.graph, anchor);
            }
        }
        self.units += 1;
        self.history.push(link as u8);
        Ok(())
    }
}

/// Exit edge of an edge-attached terminal hexagon: (t4,t5) for link 1
/// (para), (t3,t4) for link 2, (t5,t6) for link 3.
fn exit_edge(t: &[usize], link: usize) -> (usize, usize) {
    match link {
        1 => (t[3], t[4]),
        2 => (t[2], t[3]),
        _ => (t[4], t[5]),
    }
}

/// Square on existing edge (e1, e2) plus a hexagon on the square's far
/// edge. Returns the new terminal hexagon `u1..u6` (entry edge first).
fn attach_square_and_hexagon(g: &mut Graph, e1: usize, e2: usize) -> Vec<usize> {
    let u = g.add_vertices(6);
    g.add_edge(e1, u).expect("square side");
    g.add_edge(e2, u + 1).expect("square side");
    g.add_edge(u, u + 1).expect("square far edge");
    for k in 1..5 {
        g.add_edge(u + k, u + k + 1).expect("hexagon edge");
    }
    g.add_edge(u + 5, u).expect("hexagon closing edge");
    (u..u + 6).collect()
}

/// Hexagon fused on existing edge (a, b): four new vertices w1..w4 with the
/// path a-w1-w2-w3-w4-b. Returns the new terminal hexagon with entry edge
/// (b, a) first.
fn fuse_hexagon(g: &mut Graph, a: usize, b: usize) -> Vec<usize> {
    let w = g.add_vertices(4);
    g.add_edge(a, w).expect("fused hexagon edge");
    for k in 0..3 {
        g.add_edge(w + k, w + k + 1).expect("fused hexagon edge");
    }
    g.add_edge(w + 3, b).expect("fused hexagon edge");
    vec![b, a, w, w + 1, w + 2, w + 3]
}

/// Hexagon sharing the single vertex `a`. Returns the new terminal hexagon
/// with the shared vertex first.
fn share_vertex_hexagon(g: &mut Graph, a: usize) -> Vec<usize> {
    let w = g.add_vertices(5);
    let cycle = [a, w, w + 1, w + 2, w + 3, w + 4];
    g.add_cycle(&cycle).expect("fresh ring sharing one vertex");
    cycle.to_vec()
}

/// The m chains G_3^1..G_3^m obtained by one attachment from G_2.
pub fn three_chains(family: Family) -> Vec<ChainState> {
    (1..=family.link_count())
        .map(|link| {
            let mut state = ChainState::initial(family);
            state.attach(link).expect("link in range");
            state
        })
        .collect()
}

/// Per-link increments alpha_i = TI(G_3^i) - TI(G_2), derived from graphs.
pub fn alpha_vector<F: Real>(family: Family, f: &IndexFunction) -> Vec<F> {
    let ti2: F = topological_index(&ChainState::initial(family).graph, f);
    three_chains(family)
        .iter()
        .map(|s| topological_index::<F>(&s.graph, f) - ti2)
        .collect()
}

/// TI of the initial chain G_2.
pub fn initial_index_value<F: Real>(family: Family, f: &IndexFunction) -> F {
    topological_index(&ChainState::initial(family).graph, f)
}

/// One failed step of the 0MP check.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMpCounterexample {
    pub trial: usize,
    pub history: Vec<u8>,
    pub step: usize,
    pub link: usize,
    pub increment: f64,
    pub expected: f64,
}

/// Outcome of [`verify_0mp`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMpReport {
    pub family: Family,
    pub index: String,
    pub trials: usize,
    pub steps_checked: usize,
    pub counterexample: Option<ZeroMpCounterexample>,
}

impl ZeroMpReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks the zero-order Markov property on random growth histories:
/// at every step the TI increment must equal alpha_{L_n} within
/// `1e-9 * (1 + |TI_n|)`, independent of n and of the earlier links.
pub fn verify_0mp(
    family: Family,
    f: &IndexFunction,
    depth: usize,
    trials: usize,
    seed: u64,
) -> Result<ZeroMpReport, FamilyError> {
    if depth < 3 {
        return Err(FamilyError::DepthTooSmall(depth));
    }
    let alpha: Vec<f64> = alpha_vector(family, f);
    let m = family.link_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps_checked = 0;
    for trial in 0..trials {
        let mut state = ChainState::initial(family);
        let mut previous: f64 = topological_index(&state.graph, f);
        for step in 3..=depth {
            let link = rng.random_range(1..=m);
            state.attach(link).expect("link in range");
            let current: f64 = topological_index(&state.graph, f);
            let increment = current - previous;
            let expected = alpha[link - 1];
            steps_checked += 1;
            if (increment - expected).abs() > 1e-9 * (1.0 + current.abs()) {
                return Ok(ZeroMpReport {
                    family,
                    index: f.name().to_owned(),
                    trials,
                    steps_checked,
                    counterexample: Some(ZeroMpCounterexample {
                        trial,
                        history: state.history.clone(),
                        step,
                        link,
                        increment,
                        expected,
                    }),
                });
            }
            previous = current;
        }
    }
    Ok(ZeroMpReport {
        family,
        index: f.name().to_owned(),
        trials,
        steps_checked,
        counterexample: None,
    })
}

/// A user-defined 0MP chain given directly by its increments; supports the
/// distribution theory and increment-mode simulation, but has no graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomFamily {
    pub name: String,
    pub ti2: f64,
    pub alpha: Vec<f64>,
}

impl CustomFamily {
    pub fn new(name: impl Into<String>, ti2: f64, alpha: Vec<f64>) -> CustomFamily {
        CustomFamily { name: name.into(), ti2, alpha }
    }

    pub fn link_count(&self) -> usize {
        self.alpha.len()
    }
}
