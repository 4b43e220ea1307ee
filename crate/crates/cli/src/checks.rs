//! The `check` subcommand's invariant battery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topochain::family::{alpha_vector, initial_index_value, verify_0mp, ChainState, Family};
use topochain::index::{topological_index, vertex_power_sum, Builtin, IndexFunction};
use topochain::oracle::{enumerate_exact, OracleLimit};
use topochain::theory::{abc_constants, exact_distribution, moments, AbcConstants};
use topochain::{HExpression, LinkDistribution};

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckOutcome { name, passed: true, detail }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        CheckOutcome { name, passed: false, detail }
    }
}

pub struct BatterySettings {
    pub families: Vec<Family>,
    pub n: usize,
    pub seed: u64,
    pub oracle_limit: u64,
    /// Test hook: perturbs one alpha component so the first check must fail.
    pub inject_alpha_error: bool,
}

pub fn run_battery(settings: &BatterySettings) -> Vec<CheckOutcome> {
    vec![
        check_alpha_vs_abc(settings),
        check_oracle_vs_law(settings),
        check_zero_markov(settings),
        check_constant_identities(settings),
        check_degenerate_law(settings),
        check_vertex_power_sum(settings),
    ]
}

fn catalog() -> Vec<IndexFunction> {
    Builtin::ALL.iter().map(|&b| IndexFunction::from_builtin(b)).collect()
}

fn closed_form(settings: &BatterySettings) -> Vec<Family> {
    settings
        .families
        .iter()
        .copied()
        .filter(|f| Family::CLOSED_FORM.contains(f))
        .collect()
}

fn check_alpha_vs_abc(settings: &BatterySettings) -> CheckOutcome {
    const NAME: &str = "alpha vs ABC constants";
    let mut worst: f64 = 0.0;
    let mut injected = settings.inject_alpha_error;
    for family in closed_form(settings) {
        for f in catalog() {
            let mut alpha: Vec<f64> = alpha_vector(family, &f);
            if injected {
                alpha[0] += 1e-3;
                injected = false;
            }
            let abc: AbcConstants<f64> = match abc_constants(family, &f) {
                Ok(abc) => abc,
                Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
            };
            let ti2: f64 = initial_index_value(family, &f);
            let mut dev = (alpha[0] - (abc.a + abc.b)).abs();
            for &aj in &alpha[1..] {
                dev = dev.max((aj - abc.b).abs());
            }
            dev = dev.max((ti2 - (2.0 * abc.b + abc.c)).abs());
            if dev > 1e-9 {
                return CheckOutcome::fail(
                    NAME,
                    format!("{}/{}: deviation {dev:.3e}", family.name(), f.name()),
                );
            }
            worst = worst.max(dev);
        }
    }
    CheckOutcome::pass(NAME, format!("max deviation {worst:.3e}"))
}

fn check_oracle_vs_law(settings: &BatterySettings) -> CheckOutcome {
    const NAME: &str = "oracle vs multinomial law";
    let indices = [
        IndexFunction::from_builtin(Builtin::SecondZagreb),
        IndexFunction::from_builtin(Builtin::Sombor),
    ];
    let limit = OracleLimit { max_sequences: settings.oracle_limit };
    let mut worst_tv: f64 = 0.0;
    let mut sequences: u128 = 0;
    for &family in &settings.families {
        let probs = LinkDistribution::with_first(0.5, family.link_count()).unwrap();
        for f in &indices {
            let oracle = match enumerate_exact(family, f, &probs, settings.n, limit) {
                Ok(d) => d,
                Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
            };
            let ti2: f64 = initial_index_value(family, f);
            let alpha: Vec<f64> = alpha_vector(family, f);
            let law = match exact_distribution(&alpha, &probs, ti2, settings.n) {
                Ok(d) => d,
                Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
            };
            let tv = oracle.total_variation(&law);
            if tv >= 1e-12 {
                return CheckOutcome::fail(
                    NAME,
                    format!("{}/{}: total variation {tv:.3e}", family.name(), f.name()),
                );
            }
            let th = moments(&alpha, &probs, ti2, settings.n).unwrap();
            let mean_err = (oracle.mean() - th.mean).abs() / (1.0 + th.mean.abs());
            let var_err = (oracle.variance() - th.variance).abs() / (1.0 + th.variance.abs());
            if mean_err > 1e-9 || var_err > 1e-9 {
                return CheckOutcome::fail(
                    NAME,
                    format!("{}/{}: moment mismatch", family.name(), f.name()),
                );
            }
            worst_tv = worst_tv.max(tv);
            sequences += (family.link_count() as u128).pow((settings.n - 2) as u32);
        }
    }
    CheckOutcome::pass(
        NAME,
        format!("{sequences} sequences enumerated, worst total variation {worst_tv:.3e}"),
    )
}

fn check_zero_markov(settings: &BatterySettings) -> CheckOutcome {
    const NAME: &str = "zero-order Markov property";
    let indices = [
        IndexFunction::from_builtin(Builtin::SecondZagreb),
        IndexFunction::from_builtin(Builtin::Sombor),
    ];
    let mut steps = 0;
    for &family in &settings.families {
        for f in &indices {
            match verify_0mp(family, f, 50, 100, settings.seed) {
                Ok(report) if report.passed() => steps += report.steps_checked,
                Ok(report) => {
                    return CheckOutcome::fail(
                        NAME,
                        format!(
                            "{}/{}: counterexample {:?}",
                            family.name(),
                            f.name(),
                            report.counterexample
                        ),
                    )
                }
                Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
            }
        }
    }
    CheckOutcome::pass(NAME, format!("{steps} growth steps verified"))
}

fn check_constant_identities(settings: &BatterySettings) -> CheckOutcome {
    const NAME: &str = "A/C constant identities";
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    for _ in 0..50 {
        let h22: f64 = rng.random_range(-10.0..10.0);
        let h23: f64 = rng.random_range(-10.0..10.0);
        let h33: f64 = rng.random_range(-10.0..10.0);
        let phen = AbcConstants::from_h(Family::Phenylene, h22, h23, h33).unwrap();
        let poly = AbcConstants::from_h(Family::Polyphenyl, h22, h23, h33).unwrap();
        let cyclo = AbcConstants::from_h(Family::Cyclooctane, h22, h23, h33).unwrap();
        if (cyclo.a - poly.a).abs() > 1e-12
            || (cyclo.a + phen.a).abs() > 1e-12
            || (cyclo.c - poly.c).abs() > 1e-12
        {
            return CheckOutcome::fail(
                NAME,
                format!("violated at h22={h22:.4}, h23={h23:.4}, h33={h33:.4}"),
            );
        }
    }
    CheckOutcome::pass(NAME, "50 random h grids".into())
}

fn check_degenerate_law(settings: &BatterySettings) -> CheckOutcome {
    const NAME: &str = "equal-increment degenerate law";
    let m1 = IndexFunction::from_builtin(Builtin::FirstZagreb);
    let n = 25;
    for &family in &settings.families {
        let probs = LinkDistribution::with_first(0.5, family.link_count()).unwrap();
        let ti2: f64 = initial_index_value(family, &m1);
        let alpha: Vec<f64> = alpha_vector(family, &m1);
        let th = moments(&alpha, &probs, ti2, n).unwrap();
        if th.variance != 0.0 {
            return CheckOutcome::fail(
                NAME,
                format!("{}: variance {} != 0", family.name(), th.variance),
            );
        }
        let law = exact_distribution(&alpha, &probs, ti2, n).unwrap();
        if law.len() != 1 {
            return CheckOutcome::fail(
                NAME,
                format!("{}: {} atoms instead of 1", family.name(), law.len()),
            );
        }
        if let Ok(abc) = abc_constants::<f64>(family, &m1) {
            let expected = abc.b * n as f64 + abc.c;
            if (law.support()[0] - expected).abs() > 1e-9 {
                return CheckOutcome::fail(
                    NAME,
                    format!("{}: atom {} != Bn+C {expected}", family.name(), law.support()[0]),
                );
            }
        }
    }
    CheckOutcome::pass(NAME, "first-Zagreb law is a single atom at Bn+C".into())
}

fn check_vertex_power_sum(settings: &BatterySettings) -> CheckOutcome {
    const NAME: &str = "vertex power sum identity";
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    for &family in &settings.families {
        let mut state = ChainState::initial(family);
        for _ in 0..10 {
            state.attach(rng.random_range(1..=family.link_count())).unwrap();
        }
        for a in [0.0f64, 1.0, 2.0] {
            let expr = HExpression::parse(&format!("x^{a}+y^{a}")).unwrap();
            let f = IndexFunction::from_expression(expr).unwrap();
            let edge_form: f64 = topological_index(state.graph(), &f);
            let vertex_form: f64 = vertex_power_sum(state.graph(), a);
            if (edge_form - vertex_form).abs() > 1e-9 * (1.0 + vertex_form.abs()) {
                return CheckOutcome::fail(
                    NAME,
                    format!("{} a={a}: {edge_form} vs {vertex_form}", family.name()),
                );
            }
        }
    }
    CheckOutcome::pass(NAME, "edge form equals vertex form for a in {0,1,2}".into())
}
