//! Brute-force ground truth: enumerate every link sequence for small n,
//! build each graph, and accumulate the exact TI distribution.
//!
//! The depth-first walk carries an incrementally updated TI (recomputed
//! from the actual changed edges, not from the alpha shortcut) and audits
//! it against a full recomputation on one leaf in a hundred.

use thiserror::Error;

use crate::family::{ChainState, Family, FamilyError, LinkDistribution};
use crate::index::{topological_index, IndexFunction};
use crate::scalar::{real_usize, Real};
use crate::theory::ExactDistribution;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("need n >= 2 units, got {0}")]
    TooFewUnits(usize),
    #[error("enumeration needs {required} sequences (limit {limit})")]
    LimitExceeded { required: u128, limit: u64 },
    #[error("incremental TI drifted from full recomputation at leaf {leaf}: {incremental} vs {full}")]
    SelfCheckFailed { leaf: u64, incremental: f64, full: f64 },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Cap on the number of enumerated link sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimit {
    pub max_sequences: u64,
}

impl Default for OracleLimit {
    fn default() -> Self {
        OracleLimit { max_sequences: 1_000_000 }
    }
}

/// Attaches one unit and returns the TI change computed from the graph:
/// new edges at their final degrees plus the shift on surviving edges whose
/// endpoint degrees were bumped.
fn attach_delta<F: Real>(
    state: &mut ChainState,
    link: usize,
    f: &IndexFunction,
) -> Result<F, FamilyError> {
    let old_degrees = state.graph().degrees();
    let edge_mark = state.graph().edge_count();
    state.attach(link)?;
    let g = state.graph();
    let new_edges = g.edges_since(edge_mark);

    let mut delta = F::zero();
    for &(u, v) in new_edges {
        delta += f.eval(real_usize(g.degree(u)), real_usize(g.degree(v)));
    }
    for u in 0..old_degrees.len() {
        if g.degree(u) == old_degrees[u] {
            continue;
        }
        for &w in g.neighbors(u) {
            let pair = (u.min(w), u.max(w));
            if new_edges.contains(&pair) {
                continue;
            }
            // surviving edge: both endpoints predate this step
            if w < u && g.degree(w) != old_degrees[w] {
                continue; // already handled from w's side
            }
            let after = f.eval(real_usize::<F>(g.degree(u)), real_usize(g.degree(w)));
            let before = f.eval(real_usize::<F>(old_degrees[u]), real_usize(old_degrees[w]));
            delta += after - before;
        }
    }
    Ok(delta)
}

struct Enumeration<'a, F: Real> {
    family: Family,
    f: &'a IndexFunction,
    probs: &'a [F],
    steps: usize,
    atoms: Vec<(F, F)>,
    leaf_index: u64,
}

impl<F: Real> Enumeration<'_, F> {
    fn walk(&mut self, state: &ChainState, ti: F, prob: F, depth: usize) -> Result<(), OracleError> {
        if depth == self.steps {
            if self.leaf_index.is_multiple_of(100) {
                let full: F = topological_index(state.graph(), self.f);
                let (t, fu) = (
                    ti.to_f64().unwrap_or(f64::NAN),
                    full.to_f64().unwrap_or(f64::NAN),
                );
                if (t - fu).abs() > 1e-9 * (1.0 + fu.abs()) {
                    return Err(OracleError::SelfCheckFailed {
                        leaf: self.leaf_index,
                        incremental: t,
                        full: fu,
                    });
                }
            }
            self.leaf_index += 1;
            self.atoms.push((ti, prob));
            return Ok(());
        }
        for link in 1..=self.family.link_count() {
            let p = self.probs[link - 1];
            if p <= F::zero() {
                // impossible branch carries no probability mass; skipping it
                // does not change the accumulated law
                self.leaf_index += (self.family.link_count() as u64)
                    .pow((self.steps - depth - 1) as u32);
                continue;
            }
            let mut child = state.clone();
            let delta: F = attach_delta(&mut child, link, self.f)?;
            self.walk(&child, ti + delta, prob * p, depth + 1)?;
        }
        Ok(())
    }
}

/// Exact law of TI_n over all m^(n-2) link sequences, built from graphs.
pub fn enumerate_exact<F: Real>(
    family: Family,
    f: &IndexFunction,
    probs: &LinkDistribution<F>,
    n: usize,
    limit: OracleLimit,
) -> Result<ExactDistribution<F>, OracleError> {
    if n < 2 {
        return Err(OracleError::TooFewUnits(n));
    }
    let steps = n - 2;
    let m = family.link_count() as u128;
    let required = m.pow(steps as u32);
    if required > u128::from(limit.max_sequences) {
        return Err(OracleError::LimitExceeded { required, limit: limit.max_sequences });
    }
    let initial = ChainState::initial(family);
    let ti2: F = topological_index(initial.graph(), f);
    let mut enumeration = Enumeration {
        family,
        f,
        probs: probs.probs(),
        steps,
        atoms: Vec::new(),
        leaf_index: 0,
    };
    enumeration.walk(&initial, ti2, F::one(), 0)?;
    Ok(ExactDistribution::from_atoms(enumeration.atoms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::alpha_vector;
    use crate::index::{Builtin, IndexFunction};
    use crate::theory::exact_distribution;

    fn m2() -> IndexFunction {
        IndexFunction::from_builtin(Builtin::SecondZagreb)
    }

    fn probs3() -> LinkDistribution<f64> {
        LinkDistribution::new(vec![0.5, 0.3, 0.2]).unwrap()
    }

    #[test]
    fn polyphenyl_two_steps() {
        let d = enumerate_exact(
            Family::Polyphenyl,
            &m2(),
            &probs3(),
            4,
            OracleLimit::default(),
        )
        .unwrap();
        assert_eq!(d.support(), &[147.0, 148.0, 149.0]);
        let expected = [0.25, 0.5, 0.25];
        for (p, e) in d.probs().iter().zip(expected) {
            assert!((p - e).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_chain_single_atom() {
        let d = enumerate_exact(
            Family::Polyphenyl,
            &m2(),
            &probs3(),
            2,
            OracleLimit::default(),
        )
        .unwrap();
        assert_eq!(d.support(), &[65.0]);
        assert_eq!(d.probs(), &[1.0]);
    }

    #[test]
    fn matches_multinomial_law() {
        let sombor = IndexFunction::from_builtin(Builtin::Sombor);
        for family in Family::ALL {
            let m = family.link_count();
            let probs = if m == 4 {
                LinkDistribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap()
            } else {
                probs3()
            };
            for f in [&m2(), &sombor] {
                let n = 6;
                let oracle =
                    enumerate_exact(family, f, &probs, n, OracleLimit::default()).unwrap();
                let ti2 = crate::family::initial_index_value(family, f);
                let alpha: Vec<f64> = alpha_vector(family, f);
                let theory = exact_distribution(&alpha, &probs, ti2, n).unwrap();
                let tv = oracle.total_variation(&theory);
                assert!(tv < 1e-12, "{family:?}/{}: tv = {tv}", f.name());
                let total: f64 = oracle.probs().iter().sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_multinomial_law_whole_catalog() {
        for family in Family::ALL {
            let probs = LinkDistribution::with_first(0.4, family.link_count()).unwrap();
            for b in Builtin::ALL {
                let f = IndexFunction::from_builtin(b);
                let n = 5;
                let oracle =
                    enumerate_exact(family, &f, &probs, n, OracleLimit::default()).unwrap();
                let ti2 = crate::family::initial_index_value(family, &f);
                let alpha: Vec<f64> = alpha_vector(family, &f);
                let theory = exact_distribution(&alpha, &probs, ti2, n).unwrap();
                let tv = oracle.total_variation(&theory);
                assert!(tv < 1e-12, "{family:?}/{}: tv = {tv}", b.name());
            }
        }
    }

    #[test]
    fn zero_probability_links_are_pruned() {
        let probs = LinkDistribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        let d =
            enumerate_exact(Family::Polyphenyl, &m2(), &probs, 5, OracleLimit::default()).unwrap();
        let total: f64 = d.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // only links 1 and 3 appear: 65 + 42 x1 + 41 (3 - x1)
        assert_eq!(d.support(), &[188.0, 189.0, 190.0, 191.0]);
    }

    #[test]
    fn support_size_bounded_for_closed_form_families() {
        for family in Family::CLOSED_FORM {
            let probs = LinkDistribution::<f64>::uniform(family.link_count());
            for n in 3..=6 {
                let d =
                    enumerate_exact(family, &m2(), &probs, n, OracleLimit::default()).unwrap();
                assert!(d.len() < n, "{family:?} n={n}: {} atoms", d.len());
            }
        }
    }

    #[test]
    fn limit_enforced() {
        let err = enumerate_exact(
            Family::Polyphenyl,
            &m2(),
            &probs3(),
            20,
            OracleLimit { max_sequences: 1000 },
        )
        .unwrap_err();
        assert!(matches!(err, OracleError::LimitExceeded { required, .. }
            if required == 3u128.pow(18)));
    }

    #[test]
    fn attach_delta_equals_full_difference() {
        let sombor = IndexFunction::from_builtin(Builtin::Sombor);
        for family in Family::ALL {
            let mut state = ChainState::initial(family);
            for step in 0..6 {
                let before: f64 = topological_index(state.graph(), &sombor);
                let link = 1 + (step * 2) % family.link_count();
                let delta: f64 = attach_delta(&mut state, link, &sombor).unwrap();
                let after: f64 = topological_index(state.graph(), &sombor);
                assert!(
                    (before + delta - after).abs() <= 1e-9 * (1.0 + after.abs()),
                    "{family:?} step {step}"
                );
            }
        }
    }
}
