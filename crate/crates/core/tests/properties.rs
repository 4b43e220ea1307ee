//! Property tests for the structural invariants.

use proptest::prelude::*;

use topochain::family::{alpha_vector, ChainState, Family, LinkDistribution};
use topochain::index::{topological_index, Builtin, IndexFunction};
use topochain::theory::{exact_distribution, moments};
use topochain::HExpression;

/// Expressions closed under positive values: safe for sqrt and division.
fn positive_expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (1u32..100).prop_map(|n| format!("{}", n as f64 / 10.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}+{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("min({a},{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("max({a},{b})")),
            inner.clone().prop_map(|a| format!("sqrt({a})")),
            inner.clone().prop_map(|a| format!("abs({a})")),
        ]
    })
}

/// Expressions with subtraction, negation and small integer powers.
fn signed_expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("y".to_string()),
        (1u32..50).prop_map(|n| format!("{}", n as f64 / 5.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}+{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}-{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner.clone(), 2u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
        ]
    })
}

fn assert_print_reparse(source: &str) {
    let parsed = HExpression::parse(source).unwrap();
    let printed = parsed.to_string();
    let reparsed = HExpression::parse(&printed)
        .unwrap_or_else(|e| panic!("printed form '{printed}' failed to parse: {e}"));
    for x in 1..=8 {
        for y in 1..=8 {
            let a: f64 = parsed.eval(x as f64, y as f64);
            let b: f64 = reparsed.eval(x as f64, y as f64);
            if a.is_finite() || b.is_finite() {
                assert!(
                    (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                    "'{source}' -> '{printed}': {a} vs {b} at ({x},{y})"
                );
            }
        }
    }
}

fn family_strategy() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Phenylene),
        Just(Family::Polyphenyl),
        Just(Family::Cyclooctane),
        Just(Family::Hexagonal),
        Just(Family::Spiro),
    ]
}

proptest! {
    #[test]
    fn print_reparse_positive(source in positive_expression()) {
        assert_print_reparse(&source);
    }

    #[test]
    fn print_reparse_signed(source in signed_expression()) {
        assert_print_reparse(&source);
    }

    #[test]
    fn step_variance_is_nonnegative(
        pairs in prop::collection::vec(((-100.0..100.0f64), (0.01..1.0f64)), 2..6)
    ) {
        let alpha: Vec<f64> = pairs.iter().map(|(a, _)| *a).collect();
        let total: f64 = pairs.iter().map(|(_, w)| *w).sum();
        let probs: Vec<f64> = pairs.iter().map(|(_, w)| w / total).collect();
        let probs = LinkDistribution::new(probs).unwrap();
        let summary = moments(&alpha, &probs, 0.0, 12).unwrap();
        // Cauchy-Schwarz: beta >= alpha^2 up to rounding
        prop_assert!(summary.beta - summary.alpha * summary.alpha >= -1e-9 * summary.beta.abs());
        prop_assert!(summary.variance >= 0.0);
    }

    #[test]
    fn exact_law_total_mass_and_mean(
        pairs in prop::collection::vec(((-10.0..10.0f64), (0.01..1.0f64)), 2..5),
        n in 2usize..9,
        ti2 in -50.0..50.0f64,
    ) {
        let alpha: Vec<f64> = pairs.iter().map(|(a, _)| *a).collect();
        let total: f64 = pairs.iter().map(|(_, w)| *w).sum();
        let probs: Vec<f64> = pairs.iter().map(|(_, w)| w / total).collect();
        let probs = LinkDistribution::new(probs).unwrap();
        let law = exact_distribution(&alpha, &probs, ti2, n).unwrap();
        let mass: f64 = law.probs().iter().sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
        let summary = moments(&alpha, &probs, ti2, n).unwrap();
        prop_assert!((law.mean() - summary.mean).abs() <= 1e-9 * (1.0 + summary.mean.abs()));
        // support is strictly increasing
        for window in law.support().windows(2) {
            prop_assert!(window[0] < window[1]);
        }
    }

    #[test]
    fn chain_census_and_handshake(
        family in family_strategy(),
        raw_links in prop::collection::vec(0usize..12, 0..10),
    ) {
        let m = family.link_count();
        let links: Vec<u8> = raw_links.iter().map(|l| (1 + l % m) as u8).collect();
        let state = ChainState::from_history(family, &links).unwrap();
        let n = state.units();
        prop_assert_eq!(n, 2 + links.len());
        prop_assert_eq!(state.graph().vertex_count(), family.vertex_count(n));
        prop_assert_eq!(state.graph().edge_count(), family.edge_count(n));
        let degree_sum: usize = state.graph().degrees().iter().sum();
        prop_assert_eq!(degree_sum, 2 * state.graph().edge_count());

        // replaying the same history gives the identical graph
        let replay = ChainState::from_history(family, &links).unwrap();
        prop_assert_eq!(replay.graph().edge_list(), state.graph().edge_list());
    }

    #[test]
    fn increment_depends_only_on_link(
        family in family_strategy(),
        raw_links in prop::collection::vec(0usize..12, 0..8),
        last in 0usize..12,
    ) {
        let m = family.link_count();
        let links: Vec<u8> = raw_links.iter().map(|l| (1 + l % m) as u8).collect();
        let link = 1 + last % m;
        let f = IndexFunction::from_builtin(Builtin::Sombor);
        let alpha: Vec<f64> = alpha_vector(family, &f);

        let mut state = ChainState::from_history(family, &links).unwrap();
        let before: f64 = topological_index(state.graph(), &f);
        state.attach(link).unwrap();
        let after: f64 = topological_index(state.graph(), &f);
        prop_assert!(
            ((after - before) - alpha[link - 1]).abs() <= 1e-9 * (1.0 + after.abs()),
            "increment {} vs alpha {}", after - before, alpha[link - 1]
        );
    }
}
