//! Command-line frontend: reproducible chain experiments with CSV/JSON output.

mod checks;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use topochain::family::{alpha_vector, initial_index_value, CustomFamily, Family};
use topochain::index::Builtin;
use topochain::montecarlo::{
    self, kde, replication_chain, run_experiment, summarize, write_csv, SimulationModel,
};
use topochain::stats::ks_critical_value_5pct;
use topochain::theory::{abc_constants, exact_distribution, moments};
use topochain::{HExpression, IndexFunction, LinkDistribution, MomentSummary};

#[derive(Parser)]
#[command(
    name = "topochain",
    version,
    about = "Random molecular chains and degree-based topological indices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in index functions
    ListIndices,
    /// Closed-form mean and variance of TI_n (JSON)
    Moments(MomentsArgs),
    /// Exact finite-support law of TI_n (JSON)
    Exact(ExactArgs),
    /// Seeded Monte Carlo replications with CSV/JSON output
    Simulate(SimulateArgs),
    /// Run the invariant battery and print a pass/fail table
    Check(CheckArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Chain family: phenylene, polyphenyl, cyclooctane, hexagonal, spiro
    /// or custom (with --config)
    #[arg(long)]
    family: String,
    /// Built-in index function (see list-indices)
    #[arg(long, conflicts_with = "h_expr")]
    index: Option<String>,
    /// Custom symmetric h(x,y) expression, e.g. "sqrt(x^2+y^2)"
    #[arg(long)]
    h_expr: Option<String>,
    /// TOML file defining a custom increment family (keys m, ti2, alpha)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Link probabilities p1,...,pm (default: p1 = 0.5, rest uniform)
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of chain units
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Write the JSON here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of chain units
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Write the JSON here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of chain units per replication
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Number of replications
    #[arg(long, default_value_t = 500)]
    reps: usize,
    /// Master seed; replication r uses stream r
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path (default: sample.csv or sample.json)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Grid size of the kernel density estimate (JSON output)
    #[arg(long, default_value_t = 256)]
    kde_points: usize,
    /// Simulate by adding per-link increments instead of growing graphs
    #[arg(long)]
    fast_increments: bool,
    /// Debug export: write replication 0's edge list as "u,v" CSV lines
    #[arg(long)]
    dump_graph: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Restrict the battery to one family (default: all five)
    #[arg(long)]
    family: Option<String>,
    /// Chain length for the oracle comparison
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Seed for the randomized checks
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Cap on enumerated link sequences
    #[arg(long, default_value_t = 1_000_000)]
    oracle_limit: u64,
    /// Test hook: corrupt one alpha component to force a failure
    #[arg(long, hide = true)]
    inject_alpha_error: bool,
}

/// A resolved model: either a graph family with an index function, or a
/// user-supplied increment family.
struct Resolved {
    family_label: String,
    index_label: String,
    graph: Option<(Family, IndexFunction)>,
    ti2: f64,
    alpha: Vec<f64>,
    probs: LinkDistribution,
}

#[derive(Deserialize)]
struct CustomConfig {
    m: usize,
    ti2: f64,
    alpha: Vec<f64>,
}

fn resolve_index(args: &ModelArgs) -> Result<IndexFunction> {
    match (&args.index, &args.h_expr) {
        (Some(name), None) => Ok(IndexFunction::builtin(name)?),
        (None, Some(source)) => {
            let expr = HExpression::parse(source)?;
            Ok(IndexFunction::from_expression(expr)?)
        }
        (None, None) => bail!("exactly one of --index or --h-expr is required"),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

fn resolve_probs(p: &Option<Vec<f64>>, m: usize) -> Result<LinkDistribution> {
    match p {
        Some(values) => {
            if values.len() != m {
                bail!("--p needs {m} entries for this family, got {}", values.len());
            }
            Ok(LinkDistribution::new(values.clone())?)
        }
        None => Ok(LinkDistribution::with_first(0.5, m)?),
    }
}

fn resolve(args: &ModelArgs) -> Result<Resolved> {
    if args.family == "custom" {
        let path = args
            .config
            .as_ref()
            .context("--family custom requires --config <file>")?;
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let config: CustomConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if config.alpha.len() != config.m {
            bail!(
                "config declares m = {} but alpha has {} entries",
                config.m,
                config.alpha.len()
            );
        }
        if args.h_expr.is_some() {
            bail!("--h-expr has no effect on a custom increment family");
        }
        let custom = CustomFamily::new("custom", config.ti2, config.alpha);
        let probs = resolve_probs(&args.p, custom.link_count())?;
        Ok(Resolved {
            family_label: custom.name.clone(),
            index_label: args.index.clone().unwrap_or_else(|| "custom".into()),
            graph: None,
            ti2: custom.ti2,
            alpha: custom.alpha,
            probs,
        })
    } else {
        let family = Family::from_name(&args.family)?;
        let index = resolve_index(args)?;
        let probs = resolve_probs(&args.p, family.link_count())?;
        let ti2: f64 = initial_index_value(family, &index);
        let alpha: Vec<f64> = alpha_vector(family, &index);
        Ok(Resolved {
            family_label: family.name().into(),
            index_label: index.name().into(),
            graph: Some((family, index)),
            ti2,
            alpha,
            probs,
        })
    }
}

fn emit(document: &impl Serialize, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(document)?;
    match out {
        Some(path) => {
            fs::write(path, text.as_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct MomentsDocument {
    family: String,
    index: String,
    n: usize,
    p: Vec<f64>,
    ti2: f64,
    alpha_vec: Vec<f64>,
    alpha: f64,
    beta: f64,
    #[serde(rename = "A")]
    a: Option<f64>,
    #[serde(rename = "B")]
    b: Option<f64>,
    #[serde(rename = "C")]
    c: Option<f64>,
    mean: f64,
    variance: f64,
}

fn closed_form_constants(resolved: &Resolved) -> (Option<f64>, Option<f64>, Option<f64>) {
    if let Some((family, index)) = &resolved.graph {
        if let Ok(abc) = abc_constants::<f64>(*family, index) {
            return (Some(abc.a), Some(abc.b), Some(abc.c));
        }
    }
    (None, None, None)
}

fn moments_document(resolved: &Resolved, n: usize) -> Result<MomentsDocument> {
    let summary = moments(&resolved.alpha, &resolved.probs, resolved.ti2, n)?;
    let (a, b, c) = closed_form_constants(resolved);
    Ok(MomentsDocument {
        family: resolved.family_label.clone(),
        index: resolved.index_label.clone(),
        n,
        p: resolved.probs.probs().to_vec(),
        ti2: resolved.ti2,
        alpha_vec: resolved.alpha.clone(),
        alpha: summary.alpha,
        beta: summary.beta,
        a,
        b,
        c,
        mean: summary.mean,
        variance: summary.variance,
    })
}

fn cmd_list_indices() {
    for builtin in Builtin::ALL {
        println!("{:<18}{}", builtin.name(), builtin.formula());
    }
}

fn cmd_moments(args: &MomentsArgs) -> Result<()> {
    let resolved = resolve(&args.model)?;
    let document = moments_document(&resolved, args.n)?;
    emit(&document, &args.out)
}

#[derive(Serialize)]
struct ExactDocument {
    family: String,
    index: String,
    n: usize,
    p: Vec<f64>,
    ti2: f64,
    support: Vec<f64>,
    probs: Vec<f64>,
    mean: f64,
    variance: f64,
}

fn cmd_exact(args: &ExactArgs) -> Result<()> {
    let resolved = resolve(&args.model)?;
    let law = exact_distribution(&resolved.alpha, &resolved.probs, resolved.ti2, args.n)?;
    let document = ExactDocument {
        family: resolved.family_label.clone(),
        index: resolved.index_label.clone(),
        n: args.n,
        p: resolved.probs.probs().to_vec(),
        ti2: resolved.ti2,
        support: law.support().to_vec(),
        probs: law.probs().to_vec(),
        mean: law.mean(),
        variance: law.variance(),
    };
    emit(&document, &args.out)
}

#[derive(Serialize)]
struct SimulationDocument {
    family: String,
    index: String,
    n: usize,
    reps: usize,
    p: Vec<f64>,
    seed: u64,
    theory: TheoryBlock,
    summary: SummaryBlock,
    kde: Option<KdeBlock>,
    replications: Vec<ReplicationRow>,
}

#[derive(Serialize)]
struct TheoryBlock {
    mean: f64,
    variance: f64,
}

#[derive(Serialize)]
struct SummaryBlock {
    mean: f64,
    variance: f64,
    ks: Option<f64>,
    ks_critical_5pct: f64,
}

#[derive(Serialize)]
struct KdeBlock {
    bandwidth: f64,
    grid: Vec<f64>,
    density: Vec<f64>,
}

#[derive(Serialize)]
struct ReplicationRow {
    rep: usize,
    ti: f64,
    x: Vec<u64>,
}

fn print_simulation_summary(
    resolved: &Resolved,
    args: &SimulateArgs,
    theory: &MomentSummary,
    summary: &montecarlo::SampleSummary,
) {
    println!(
        "family {}  index {}  n {}  reps {}  seed {}",
        resolved.family_label, resolved.index_label, args.n, args.reps, args.seed
    );
    println!("             {:>18} {:>18}", "theory", "sample");
    println!("mean         {:>18.6} {:>18.6}", theory.mean, summary.mean);
    println!("variance     {:>18.6} {:>18.6}", theory.variance, summary.variance);
    match summary.ks_statistic {
        Some(ks) => {
            let critical = ks_critical_value_5pct::<f64>(summary.reps);
            println!("KS statistic {ks:>18.6} (5% critical value {critical:.6})");
            if ks > critical {
                println!(
                    "warning: KS statistic exceeds the 5% critical value; \
                     this happens for ~5% of seeds even under the limit law"
                );
            }
        }
        None => println!("KS statistic skipped: theoretical variance is zero"),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let resolved = resolve(&args.model)?;
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }

    let model = match (&resolved.graph, args.fast_increments) {
        (Some((family, index)), false) => SimulationModel::Graph { family: *family, index },
        (Some((family, index)), true) => SimulationModel::fast_increments(*family, index),
        (None, _) => SimulationModel::Increments {
            family_label: resolved.family_label.clone(),
            index_label: resolved.index_label.clone(),
            ti2: resolved.ti2,
            alpha: resolved.alpha.clone(),
        },
    };

    let sample = run_experiment(&model, &resolved.probs, args.n, args.reps, args.seed)?;
    let theory = moments(&resolved.alpha, &resolved.probs, resolved.ti2, args.n)?;
    let summary = summarize(&sample, &theory)?;

    if let Some(path) = &args.dump_graph {
        let (family, _) = resolved
            .graph
            .as_ref()
            .context("--dump-graph needs a graph family, not a custom one")?;
        let chain = replication_chain(*family, &resolved.probs, args.n, args.seed, 0)?;
        let mut text = String::new();
        for (u, v) in chain.graph().edge_list() {
            text.push_str(&format!("{u},{v}\n"));
        }
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }

    let out = args.out.clone().unwrap_or_else(|| {
        PathBuf::from(match args.format {
            OutputFormat::Csv => "sample.csv",
            OutputFormat::Json => "sample.json",
        })
    });
    match args.format {
        OutputFormat::Csv => {
            let mut buffer = Vec::new();
            write_csv(&sample, &mut buffer)?;
            fs::write(&out, &buffer).with_context(|| format!("writing {}", out.display()))?;
        }
        OutputFormat::Json => {
            let density = match kde(&sample, args.kde_points) {
                Ok(estimate) => Some(KdeBlock {
                    bandwidth: estimate.bandwidth,
                    grid: estimate.grid,
                    density: estimate.density,
                }),
                // a degenerate sample has no density estimate
                Err(_) => None,
            };
            let document = SimulationDocument {
                family: sample.family.clone(),
                index: sample.index.clone(),
                n: sample.n,
                reps: args.reps,
                p: sample.probs.clone(),
                seed: sample.master_seed,
                theory: TheoryBlock { mean: theory.mean, variance: theory.variance },
                summary: SummaryBlock {
                    mean: summary.mean,
                    variance: summary.variance,
                    ks: summary.ks_statistic,
                    ks_critical_5pct: ks_critical_value_5pct::<f64>(summary.reps),
                },
                kde: density,
                replications: sample
                    .ti_values
                    .iter()
                    .zip(&sample.x_counts)
                    .enumerate()
                    .map(|(rep, (&ti, x))| ReplicationRow { rep, ti, x: x.clone() })
                    .collect(),
            };
            let mut buffer = serde_json::to_vec_pretty(&document)?;
            buffer.push(b'\n');
            fs::write(&out, &buffer).with_context(|| format!("writing {}", out.display()))?;
        }
    }

    print_simulation_summary(&resolved, args, &theory, &summary);
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<ExitCode> {
    let families = match &args.family {
        Some(name) => vec![Family::from_name(name)?],
        None => Family::ALL.to_vec(),
    };
    let settings = checks::BatterySettings {
        families,
        n: args.n,
        seed: args.seed,
        oracle_limit: args.oracle_limit,
        inject_alpha_error: args.inject_alpha_error,
    };
    let outcomes = checks::run_battery(&settings);
    let mut all_passed = true;
    let mut stdout = std::io::stdout().lock();
    for outcome in &outcomes {
        all_passed &= outcome.passed;
        writeln!(
            stdout,
            "{}  {:<32} {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.name,
            outcome.detail
        )?;
    }
    if all_passed {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::ListIndices => {
            cmd_list_indices();
            Ok(ExitCode::SUCCESS)
        }
        Command::Moments(args) => {
            cmd_moments(args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Exact(args) => {
            cmd_exact(args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(args) => {
            cmd_simulate(args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check(args) => cmd_check(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
