//! Closed-form distribution theory for 0MP chains.
//!
//! Everything here is driven by the increment vector alpha, the link
//! distribution and the two-unit starting value: the mean and variance are
//! linear in n, the exact law is a pushforward of a multinomial, and the
//! moment generating function factorizes step by step.

use thiserror::Error;

use crate::family::{Family, LinkDistribution};
use crate::index::IndexFunction;
use crate::scalar::{real, Real};

/// Absolute tolerance for merging nearby support values of the exact law.
pub const SUPPORT_MERGE_TOL: f64 = 1e-9;

/// Largest number of multinomial count vectors the exact law will enumerate.
pub const MAX_COMPOSITIONS: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("need n >= 2 units, got {0}")]
    TooFewUnits(usize),
    #[error("alpha vector has {alpha} entries but distribution has {probs}")]
    LengthMismatch { alpha: usize, probs: usize },
    #[error(
        "variance is zero: all increments with positive probability are equal, \
         so the chain is deterministic (TI_n = B*n + C)"
    )]
    DegenerateVariance,
    #[error("exact law would need {required} count vectors (limit {limit})")]
    TooManyCompositions { required: u128, limit: u64 },
    #[error("moment generating function overflows f64 at t = {t}")]
    MgfOverflow { t: f64 },
    #[error("no closed-form constants for family '{0}'")]
    NoClosedForm(String),
}

/// First two moments of TI_n: alpha (mean increment), beta (its second
/// moment), and the resulting mean and variance at n units.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary<F: Real> {
    pub alpha_vec: Vec<F>,
    pub alpha: F,
    pub beta: F,
    pub n: usize,
    pub mean: F,
    pub variance: F,
}

/// mean = TI_2 + alpha (n - 2), variance = (beta - alpha^2)(n - 2).
///
/// A per-step variance below `1e-12 * max(1, beta)` is treated as exactly
/// zero: the chain is deterministic and TI_n = B n + C.
pub fn moments<F: Real>(
    alpha_vec: &[F],
    probs: &LinkDistribution<F>,
    ti2: F,
    n: usize,
) -> Result<MomentSummary<F>, TheoryError> {
    if n < 2 {
        return Err(TheoryError::TooFewUnits(n));
    }
    if alpha_vec.len() != probs.len() {
        return Err(TheoryError::LengthMismatch {
            alpha: alpha_vec.len(),
            probs: probs.len(),
        });
    }
    let mut alpha = F::zero();
    let mut beta = F::zero();
    for (&a, &p) in alpha_vec.iter().zip(probs.probs()) {
        alpha += a * p;
        beta += a * a * p;
    }
    let steps = real::<F>((n - 2) as f64);
    let mut step_variance = beta - alpha * alpha;
    if step_variance < real::<F>(1e-12) * F::one().max(beta) {
        step_variance = F::zero();
    }
    Ok(MomentSummary {
        alpha_vec: alpha_vec.to_vec(),
        alpha,
        beta,
        n,
        mean: ti2 + alpha * steps,
        variance: step_variance * steps,
    })
}

/// Closed-form constants with TI_n = A X + B n + C, X ~ Binomial(n-2, p_1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcConstants<F: Real> {
    pub a: F,
    pub b: F,
    pub c: F,
}

impl<F: Real> AbcConstants<F> {
    /// Evaluates the family's closed forms at h22 = h(2,2), h23 = h(2,3),
    /// h33 = h(3,3). Only the three bridge/square families have them.
    pub fn from_h(family: Family, h22: F, h23: F, h33: F) -> Result<Self, TheoryError> {
        let two = real::<F>(2.0);
        let four = real::<F>(4.0);
        let five = real::<F>(5.0);
        let six = real::<F>(6.0);
        match family {
            Family::Phenylene => Ok(AbcConstants {
                a: two * h23 - h22 - h33,
                b: h22 + two * h23 + five * h33,
                c: four * h22 - six * h33,
            }),
            Family::Polyphenyl => Ok(AbcConstants {
                a: h22 - two * h23 + h33,
                b: two * h22 + four * h23 + h33,
                c: four * h22 - four * h23 - h33,
            }),
            Family::Cyclooctane => Ok(AbcConstants {
                a: h22 - two * h23 + h33,
                b: four * h22 + four * h23 + h33,
                c: four * h22 - four * h23 - h33,
            }),
            other => Err(TheoryError::NoClosedForm(other.name().into())),
        }
    }
}

/// Closed-form constants for `family` under the index function `f`.
pub fn abc_constants<F: Real>(
    family: Family,
    f: &IndexFunction,
) -> Result<AbcConstants<F>, TheoryError> {
    let two = real::<F>(2.0);
    let three = real::<F>(3.0);
    AbcConstants::from_h(family, f.eval(two, two), f.eval(two, three), f.eval(three, three))
}

/// Finite support law of TI_n: sorted values with positive probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution<F: Real> {
    support: Vec<F>,
    probs: Vec<F>,
}

impl<F: Real> ExactDistribution<F> {
    /// Builds a distribution from raw (value, probability) atoms: sorts,
    /// merges values within [`SUPPORT_MERGE_TOL`] and drops zero atoms.
    pub(crate) fn from_atoms(mut atoms: Vec<(F, F)>) -> ExactDistribution<F> {
        atoms.retain(|&(_, p)| p > F::zero());
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite support values"));
        let tol = real::<F>(SUPPORT_MERGE_TOL);
        let mut support: Vec<F> = Vec::new();
        let mut probs: Vec<F> = Vec::new();
        for (value, p) in atoms {
            match support.last() {
                Some(&last) if value - last <= tol => {
                    *probs.last_mut().expect("parallel vectors") += p;
                }
                _ => {
                    support.push(value);
                    probs.push(p);
                }
            }
        }
        ExactDistribution { support, probs }
    }

    pub fn support(&self) -> &[F] {
        &self.support
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn mean(&self) -> F {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(&v, &p)| v * p)
            .sum()
    }

    pub fn variance(&self) -> F {
        let mean = self.mean();
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(&v, &p)| (v - mean) * (v - mean) * p)
            .sum()
    }

    /// E[e^{tX}] evaluated directly over the support.
    pub fn mgf_at(&self, t: F) -> F {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(&v, &p)| p * (t * v).exp())
            .sum()
    }

    /// Total variation distance, aligning support values within the merge
    /// tolerance. Unmatched atoms count in full.
    pub fn total_variation(&self, other: &ExactDistribution<F>) -> F {
        let tol = real::<F>(SUPPORT_MERGE_TOL);
        let half = real::<F>(0.5);
        let mut diff = F::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.len() && j < other.len() {
            let a = self.support[i];
            let b = other.support[j];
            if (a - b).abs() <= tol {
                diff += (self.probs[i] - other.probs[j]).abs();
                i += 1;
                j += 1;
            } else if a < b {
                diff += self.probs[i];
                i += 1;
            } else {
                diff += other.probs[j];
                j += 1;
            }
        }
        diff += self.probs[i..].iter().copied().sum();
        diff += other.probs[j..].iter().copied().sum();
        half * diff
    }
}

/// Number of count vectors (x_1..x_m) with sum s: C(s + m - 1, m - 1).
fn composition_count(s: u64, m: u64) -> u128 {
    let mut result: u128 = 1;
    for k in 1..m {
        result = result.saturating_mul((s + k) as u128) / k as u128;
        if result > u128::from(u64::MAX) {
            return result;
        }
    }
    result
}

/// Exact law of TI_n = TI_2 + Σ alpha_i X_i with X multinomial(n-2, p).
///
/// Enumerates every count vector; probabilities go through log-factorials
/// so large n does not overflow.
pub fn exact_distribution<F: Real>(
    alpha_vec: &[F],
    probs: &LinkDistribution<F>,
    ti2: F,
    n: usize,
) -> Result<ExactDistribution<F>, TheoryError> {
    if n < 2 {
        return Err(TheoryError::TooFewUnits(n));
    }
    if alpha_vec.len() != probs.len() {
        return Err(TheoryError::LengthMismatch {
            alpha: alpha_vec.len(),
            probs: probs.len(),
        });
    }
    let steps = n - 2;
    let m = alpha_vec.len();
    let required = composition_count(steps as u64, m as u64);
    if required > u128::from(MAX_COMPOSITIONS) {
        return Err(TheoryError::TooManyCompositions {
            required,
            limit: MAX_COMPOSITIONS,
        });
    }

    // ln k! for k = 0..steps
    let mut log_factorial: Vec<F> = Vec::with_capacity(steps + 1);
    let mut acc = F::zero();
    log_factorial.push(acc);
    for k in 1..=steps {
        acc += real::<F>(k as f64).ln();
        log_factorial.push(acc);
    }
    let log_probs: Vec<F> = probs.probs().iter().map(|&p| p.ln()).collect();

    let mut atoms: Vec<(F, F)> = Vec::new();
    let mut counts = vec![0usize; m];
    enumerate_compositions(steps, 0, &mut counts, &mut |counts| {
        let mut log_p = log_factorial[steps];
        let mut value = ti2;
        for i in 0..m {
            if counts[i] > 0 {
                if probs.probs()[i] <= F::zero() {
                    return; // impossible outcome
                }
                log_p = log_p - log_factorial[counts[i]]
                    + real::<F>(counts[i] as f64) * log_probs[i];
                value += alpha_vec[i] * real::<F>(counts[i] as f64);
            }
        }
        atoms.push((value, log_p.exp()));
    });
    Ok(ExactDistribution::from_atoms(atoms))
}

fn enumerate_compositions(
    remaining: usize,
    slot: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if slot == counts.len() - 1 {
        counts[slot] = remaining;
        visit(counts);
        return;
    }
    for take in 0..=remaining {
        counts[slot] = take;
        enumerate_compositions(remaining - take, slot + 1, counts, visit);
    }
    counts[slot] = 0;
}

/// M_{TI_n}(t) = e^{t TI_2} (Σ p_i e^{t alpha_i})^{n-2}, evaluated in log
/// space so the only failure mode is a genuine f64 overflow.
pub fn mgf<F: Real>(
    alpha_vec: &[F],
    probs: &LinkDistribution<F>,
    ti2: F,
    n: usize,
    t: F,
) -> Result<F, TheoryError> {
    if n < 2 {
        return Err(TheoryError::TooFewUnits(n));
    }
    if alpha_vec.len() != probs.len() {
        return Err(TheoryError::LengthMismatch {
            alpha: alpha_vec.len(),
            probs: probs.len(),
        });
    }
    // log-sum-exp over t * alpha_i with weights p_i
    let shift = alpha_vec
        .iter()
        .map(|&a| t * a)
        .fold(F::neg_infinity(), F::max);
    let mut inner = F::zero();
    for (&a, &p) in alpha_vec.iter().zip(probs.probs()) {
        inner += p * (t * a - shift).exp();
    }
    let steps = real::<F>((n - 2) as f64);
    let log_mgf = t * ti2 + steps * (shift + inner.ln());
    let max_exp = real::<F>(f64::MAX.ln());
    if log_mgf > max_exp {
        return Err(TheoryError::MgfOverflow {
            t: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(log_mgf.exp())
}

/// The martingale transform M_n = TI_n - alpha (n - 2); its conditional
/// expectation is constant in n.
pub fn martingale_value<F: Real>(ti_n: F, n: usize, alpha: F) -> F {
    ti_n - alpha * real::<F>((n - 2) as f64)
}

/// Standardized value (TI_n - E TI_n) / sqrt(V TI_n), asymptotically
/// standard normal. Errors when the variance is (clamped to) zero.
pub fn clt_statistic<F: Real>(ti_n: F, summary: &MomentSummary<F>) -> Result<F, TheoryError> {
    if summary.variance <= F::zero() {
        return Err(TheoryError::DegenerateVariance);
    }
    Ok((ti_n - summary.mean) / summary.variance.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::alpha_vector;
    use crate::index::{Builtin, IndexFunction};

    fn dist(p: &[f64]) -> LinkDistribution<f64> {
        LinkDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn moments_polyphenyl_example() {
        let alpha = [42.0, 41.0, 41.0];
        let s = moments(&alpha, &dist(&[0.5, 0.3, 0.2]), 65.0, 10).unwrap();
        assert!((s.alpha - 41.5).abs() < 1e-12);
        assert!((s.mean - 397.0).abs() < 1e-9);
        assert!((s.variance - 2.0).abs() < 1e-9);
    }

    #[test]
    fn moments_generic_f32() {
        let alpha = [42.0f32, 41.0, 41.0];
        let probs = LinkDistribution::new(vec![0.5f32, 0.3, 0.2]).unwrap();
        let s = moments(&alpha, &probs, 65.0f32, 10).unwrap();
        assert!((s.mean - 397.0).abs() < 1e-3);
        assert!((s.variance - 2.0).abs() < 1e-2);
        let law = exact_distribution(&alpha, &probs, 65.0f32, 4).unwrap();
        assert_eq!(law.support(), &[147.0f32, 148.0, 149.0]);
    }

    #[test]
    fn moments_initial_chain() {
        let alpha = [42.0, 41.0, 41.0];
        let s = moments(&alpha, &dist(&[0.5, 0.3, 0.2]), 65.0, 2).unwrap();
        assert_eq!(s.mean, 65.0);
        assert_eq!(s.variance, 0.0);
    }

    #[test]
    fn moments_rejects_bad_input() {
        let alpha = [1.0, 2.0];
        assert_eq!(
            moments(&alpha, &dist(&[0.5, 0.5]), 0.0, 1).unwrap_err(),
            TheoryError::TooFewUnits(1)
        );
        assert!(matches!(
            moments(&[1.0], &dist(&[0.5, 0.5]), 0.0, 4).unwrap_err(),
            TheoryError::LengthMismatch { .. }
        ));
    }

    #[test]
    fn equal_increments_clamp_variance_to_zero() {
        let alpha = [7.0, 7.0, 7.0];
        let s = moments(&alpha, &dist(&[0.5, 0.3, 0.2]), 10.0, 50).unwrap();
        assert_eq!(s.variance, 0.0);
    }

    #[test]
    fn abc_m2_examples() {
        let m2 = IndexFunction::from_builtin(Builtin::SecondZagreb);
        let phen: AbcConstants<f64> = abc_constants(Family::Phenylene, &m2).unwrap();
        assert_eq!((phen.a, phen.b, phen.c), (-1.0, 61.0, -38.0));
        let poly: AbcConstants<f64> = abc_constants(Family::Polyphenyl, &m2).unwrap();
        assert_eq!((poly.a, poly.b, poly.c), (1.0, 41.0, -17.0));
        let cyclo: AbcConstants<f64> = abc_constants(Family::Cyclooctane, &m2).unwrap();
        assert_eq!((cyclo.a, cyclo.b, cyclo.c), (1.0, 49.0, -17.0));
    }

    #[test]
    fn abc_rejects_families_without_closed_form() {
        let m2 = IndexFunction::from_builtin(Builtin::SecondZagreb);
        assert!(matches!(
            abc_constants::<f64>(Family::Hexagonal, &m2).unwrap_err(),
            TheoryError::NoClosedForm(_)
        ));
        assert!(matches!(
            abc_constants::<f64>(Family::Spiro, &m2).unwrap_err(),
            TheoryError::NoClosedForm(_)
        ));
    }

    #[test]
    fn alpha_ties_to_abc() {
        for family in Family::CLOSED_FORM {
            for b in Builtin::ALL {
                let f = IndexFunction::from_builtin(b);
                let alpha: Vec<f64> = alpha_vector(family, &f);
                let abc: AbcConstants<f64> = abc_constants(family, &f).unwrap();
                assert!(
                    (alpha[0] - (abc.a + abc.b)).abs() < 1e-9,
                    "{family:?}/{}: alpha1={} A+B={}",
                    b.name(),
                    alpha[0],
                    abc.a + abc.b
                );
                for aj in &alpha[1..] {
                    assert!((aj - abc.b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn exact_distribution_two_steps() {
        let alpha = [42.0, 41.0, 41.0];
        let d = exact_distribution(&alpha, &dist(&[0.5, 0.3, 0.2]), 65.0, 4).unwrap();
        assert_eq!(d.support(), &[147.0, 148.0, 149.0]);
        let expected = [0.25, 0.5, 0.25];
        for (p, e) in d.probs().iter().zip(expected) {
            assert!((p - e).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_distribution_initial_chain_is_atom() {
        let alpha = [42.0, 41.0, 41.0];
        let d = exact_distribution(&alpha, &dist(&[0.5, 0.3, 0.2]), 65.0, 2).unwrap();
        assert_eq!(d.support(), &[65.0]);
        assert_eq!(d.probs(), &[1.0]);
    }

    #[test]
    fn exact_distribution_matches_moments() {
        let alpha = [3.5, -1.0, 0.25];
        let probs = dist(&[0.2, 0.45, 0.35]);
        for n in 2..=20 {
            let d = exact_distribution(&alpha, &probs, 12.0, n).unwrap();
            let s = moments(&alpha, &probs, 12.0, n).unwrap();
            let total: f64 = d.probs().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n}: total={total}");
            assert!((d.mean() - s.mean).abs() <= 1e-9 * (1.0 + s.mean.abs()), "n={n}");
            assert!(
                (d.variance() - s.variance).abs() <= 1e-9 * (1.0 + s.variance.abs()),
                "n={n}"
            );
        }
    }

    #[test]
    fn exact_distribution_zero_probability_link() {
        let alpha = [42.0, 41.0, 40.0];
        let d = exact_distribution(&alpha, &dist(&[0.5, 0.0, 0.5]), 0.0, 5).unwrap();
        // only links 1 and 3 appear; support is 3*40 + 2k for k = 0..3
        assert_eq!(d.support(), &[120.0, 122.0, 124.0, 126.0]);
        let total: f64 = d.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_increments_single_atom_at_bn_plus_c() {
        // h22 + h33 = 2 h23 forces the one-atom law at B n + C
        let m1 = IndexFunction::from_builtin(Builtin::FirstZagreb);
        for family in Family::CLOSED_FORM {
            let alpha: Vec<f64> = alpha_vector(family, &m1);
            let abc: AbcConstants<f64> = abc_constants(family, &m1).unwrap();
            let n = 9;
            let ti2 = 2.0 * abc.b + abc.c;
            let probs = LinkDistribution::with_first(0.5, alpha.len()).unwrap();
            let d = exact_distribution(&alpha, &probs, ti2, n).unwrap();
            assert_eq!(d.len(), 1, "{family:?}");
            let expected = abc.b * n as f64 + abc.c;
            assert!((d.support()[0] - expected).abs() < 1e-9, "{family:?}");
        }
    }

    #[test]
    fn composition_limit_enforced() {
        let alpha = vec![1.0; 3];
        let err = exact_distribution(&alpha, &dist(&[0.4, 0.3, 0.3]), 0.0, 100_000).unwrap_err();
        assert!(matches!(err, TheoryError::TooManyCompositions { .. }));
    }

    #[test]
    fn mgf_at_zero_is_one() {
        let alpha = [42.0, 41.0, 41.0];
        let v = mgf(&alpha, &dist(&[0.5, 0.3, 0.2]), 65.0, 10, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mgf_matches_exact_distribution() {
        let alpha = [42.0, 41.0, 41.0];
        let probs = dist(&[0.5, 0.3, 0.2]);
        let t = 1e-3;
        let d = exact_distribution(&alpha, &probs, 65.0, 4).unwrap();
        let direct = d.mgf_at(t);
        let closed = mgf(&alpha, &probs, 65.0, 4, t).unwrap();
        assert!((closed - direct).abs() <= 1e-12 * direct.abs());
    }

    #[test]
    fn mgf_degenerate_single_link() {
        let alpha = [5.0f64];
        let probs = LinkDistribution::new(vec![1.0]).unwrap();
        let t = 0.25f64;
        let v = mgf(&alpha, &probs, 3.0, 6, t).unwrap();
        let expected = (t * (3.0 + 5.0 * 4.0)).exp();
        assert!((v - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn mgf_overflow_reported() {
        let alpha = [1000.0, 900.0];
        let err = mgf(&alpha, &dist(&[0.5, 0.5]), 0.0, 10_000, 1.0).unwrap_err();
        assert!(matches!(err, TheoryError::MgfOverflow { .. }));
    }

    #[test]
    fn martingale_examples() {
        assert_eq!(martingale_value(65.0, 2, 41.5), 65.0);
        // deterministic chain: M_n constant in n
        let alpha = 4.0;
        for n in 2..10 {
            let ti_n = 10.0 + alpha * (n as f64 - 2.0);
            assert_eq!(martingale_value(ti_n, n, alpha), 10.0);
        }
    }

    #[test]
    fn clt_statistic_examples() {
        let alpha = [42.0, 41.0, 41.0];
        let s = moments(&alpha, &dist(&[0.5, 0.3, 0.2]), 65.0, 10).unwrap();
        assert_eq!(clt_statistic(s.mean, &s).unwrap(), 0.0);
        let z = clt_statistic(399.0, &s).unwrap();
        assert!((z - 2.0 / 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn clt_statistic_degenerate() {
        let alpha = [7.0, 7.0, 7.0];
        let s = moments(&alpha, &dist(&[0.5, 0.3, 0.2]), 10.0, 50).unwrap();
        let err = clt_statistic(10.0, &s).unwrap_err();
        assert_eq!(err, TheoryError::DegenerateVariance);
        assert!(err.to_string().contains("B*n + C"));
    }

    #[test]
    fn total_variation_of_identical_laws_is_zero() {
        let alpha = [3.0, 1.0, 2.0];
        let probs = dist(&[0.3, 0.3, 0.4]);
        let d1 = exact_distribution(&alpha, &probs, 1.0, 6).unwrap();
        let d2 = exact_distribution(&alpha, &probs, 1.0, 6).unwrap();
        assert!(d1.total_variation(&d2) < 1e-15);
        // disjoint supports give the maximal distance
        let d3 = exact_distribution(&alpha, &probs, 101.0, 6).unwrap();
        assert!((d1.total_variation(&d3) - 1.0).abs() < 1e-12);
    }
}
