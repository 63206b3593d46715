// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

//! `qwass` command-line front end.
//!
//! Every command prints one JSON document on stdout (experiments may print
//! CSV instead). Failures print a JSON error record on stderr and exit with
//! status 2 for invalid input, 1 otherwise.

mod output;
mod settings;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwass::dual::{dw1_lower_estimate, lipschitz_estimate, DualBudget};
use qwass::exec::{set_threads, ExecMode};
use qwass::experiments::{
    run_high_rank, run_hypercontractivity, run_low_rank, EnsembleConfig, ExperimentRecord, HyperConfig, NoiseKind,
};
use qwass::metrics::{metric_from_name, plugin_metric, MetricSpec};
use qwass::norms::{asym_cost, asym_cost_stabilized, w1h_norm, TracelessHermitian};
use qwass::states::io::{load_operator, load_state};
use qwass::states::random::haar_pure_seeded;
use qwass::states::{random_mixed, DensityOperator};
use qwass::transport::{estimate_winf, estimate_wp, plan_value, reduce_plan, Order, SearchBudget, TransportPlan};
use qwass::{Error, Result};
use serde_json::{json, Value};
use settings::FileConfig;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qwass", version, about = "Wasserstein distances between quantum states via pure-state transport plans")]
struct Cli {
    /// Master seed; falls back to QOT_SEED, then the config file, then 0.
    #[arg(long, global = true, help_heading = "Global options", env = "QOT_SEED")]
    seed: Option<u64>,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, help_heading = "Global options")]
    threads: Option<usize>,
    /// TOML configuration merged underneath the flags.
    #[arg(long, global = true, help_heading = "Global options")]
    config: Option<PathBuf>,
    /// Write solver iterates as JSON lines to this file.
    #[arg(long, global = true, help_heading = "Global options")]
    debug_log: Option<PathBuf>,
    /// Run restarts and trials on the calling thread.
    #[arg(long, global = true, help_heading = "Global options")]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bracket W_p between two states.
    #[command(subcommand)]
    Wp(WpCommand),
    /// Evaluate or shrink a transport plan.
    #[command(subcommand)]
    Plan(PlanCommand),
    /// SDP norms of state differences.
    #[command(subcommand)]
    Norm(NormCommand),
    /// Lower estimate of the Lipschitz constant of an observable under a metric,
    /// found by multi-start ascent over pure pairs.
    Lipschitz(LipschitzArgs),
    /// Certified lower bound on the dual norm of a state difference; a lower bound on W_1.
    Dw1(PairArgs),
    /// Inspect a metric.
    #[command(subcommand)]
    Metric(MetricCommand),
    /// Random-state experiments with CSV or JSON records.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Draw random states.
    #[command(subcommand)]
    Sample(SampleCommand),
}

#[derive(Subcommand, Debug)]
enum WpCommand {
    /// Finite-order bracket [lower, upper] with a witness plan. The lower
    /// bound combines the Hölder bound and the metric's exact norm bound.
    Estimate {
        #[command(flatten)]
        pair: PairArgs,
        /// Order p ≥ 1.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Bottleneck (p = ∞) bracket with a witness plan.
    Winf {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Subcommand, Debug)]
enum PlanCommand {
    /// Transport cost Σ q d^p of a plan, and its p-th root.
    Cost(PlanArgs),
    /// Reduce a plan to at most 2D² entries without raising its cost.
    Reduce {
        #[command(flatten)]
        plan: PlanArgs,
        /// Write the reduced plan here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum NormCommand {
    /// W1H norm of ρ - σ with its dual observable.
    W1h {
        /// First state (JSON file)
        #[arg(long)]
        a: PathBuf,
        /// Second state (JSON file)
        #[arg(long)]
        b: PathBuf,
    },
    /// Minimal coupling cost against the antisymmetric projector.
    Asym {
        /// First state (JSON file)
        #[arg(long)]
        a: PathBuf,
        /// Second state (JSON file)
        #[arg(long)]
        b: PathBuf,
        /// One projector per site instead of one on the whole space.
        #[arg(long)]
        per_site: bool,
        /// Also report the cost after adjoining maximally mixed qubits.
        #[arg(long)]
        stabilized: bool,
    },
}

#[derive(Subcommand, Debug)]
enum MetricCommand {
    /// Check axioms on random pairs and triples and report the metadata.
    Check {
        #[arg(long)]
        metric: String,
        /// Site dimensions, e.g. 2,2 (implied by hamming:d,n).
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// W1H norms of i.i.d. low-rank random states against λ_c n.
    LowRank {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Entropies, deviations from I/D and tail frequencies of the
    /// common-part bound for high-rank random states.
    HighRank {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, default_value = "hamming:2,2")]
        metric: String,
        /// Tail grid.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        betas: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Plan-level hypercontractivity of noise channels on random plans.
    Hypercontractivity {
        #[arg(long, default_value = "hamming:2,2")]
        metric: String,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1.0)]
        p1: f64,
        #[arg(long, default_value_t = 2.0)]
        p2: f64,
        /// Mixing weight, or `auto` for each plan's threshold.
        #[arg(long, default_value = "auto")]
        delta: String,
        #[arg(long, value_enum, default_value_t = Noise::Depolarizing)]
        noise: Noise,
        /// Entries per random plan.
        #[arg(long, default_value_t = 6)]
        entries: usize,
        /// Independent trials
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand, Debug)]
enum SampleCommand {
    /// Haar-random pure state.
    Pure {
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
    },
    /// Reduced state of a Haar-random vector on H ⊗ C^s.
    Mixed {
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        /// Auxiliary dimension.
        #[arg(long, default_value_t = 1)]
        s: usize,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    /// trace, hamming:d,n or plugin:<path>.
    #[arg(long, default_value = "trace")]
    metric: String,
    /// First state (JSON file)
    #[arg(long)]
    a: PathBuf,
    /// Second state (JSON file)
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Independent restarts
    #[arg(long)]
    restarts: Option<usize>,
    /// Iterations per restart
    #[arg(long)]
    iterations: Option<usize>,
    /// Vectors per decomposition.
    #[arg(long)]
    plan_size: Option<usize>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long, default_value = "trace")]
    metric: String,
    /// Order: a number ≥ 1 or `inf`.
    #[arg(long, default_value = "1")]
    p: Order,
}

#[derive(Args, Debug)]
struct LipschitzArgs {
    #[arg(long, default_value = "trace")]
    metric: String,
    /// Traceless Hermitian observable in the matrix layout.
    #[arg(long)]
    op: PathBuf,
    /// Independent restarts
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    /// Local dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Number of sites.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Qudit ratio; the auxiliary dimension is round(d^{c n}).
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    /// Independent trials
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    out: Format,
    /// With `--out csv`, also write the JSON summary here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Noise {
    Depolarizing,
    Replacement,
}

/// Settings shared by every command after merging flags and the file.
struct Context {
    seed: u64,
    exec: ExecMode,
    file: FileConfig,
}

impl Context {
    fn search(&self, args: &SearchArgs) -> SearchBudget {
        let mut b = self.file.search.clone();
        b.restarts = args.restarts.unwrap_or(b.restarts);
        b.iterations = args.iterations.unwrap_or(b.iterations);
        b.plan_size = args.plan_size.or(b.plan_size);
        b.seed = self.seed;
        b.exec = self.exec;
        b
    }
}

fn load_pair(a: &Path, b: &Path) -> Result<(DensityOperator, DensityOperator)> {
    Ok((load_state(a)?, load_state(b)?))
}

/// Site dims implied by a `hamming:d,n` name, if any.
fn implied_dims(metric: &str) -> Option<Vec<usize>> {
    let rest = metric.trim().strip_prefix("hamming:")?;
    let v: Vec<usize> = rest.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
    (v.len() == 2).then(|| vec![v[0]; v[1]])
}

fn dims_for(metric: &str, dims: Option<Vec<usize>>) -> Result<Vec<usize>> {
    dims.or_else(|| implied_dims(metric))
        .ok_or_else(|| Error::validation("dims_given", format!("metric {metric:?} needs --dims")))
}

fn with_metric(mut v: Value, metric: &MetricSpec) -> Value {
    v["metric"] = json!(metric.name);
    v
}

fn emit_record(rec: &ExperimentRecord, out: &OutArgs) -> Result<String> {
    let summary = json!({
        "experiment": rec.experiment,
        "summary": rec.summary,
        "config": rec.config,
        "version": rec.version,
    });
    match out.out {
        Format::Json => Ok(output::render(serde_json::to_value(rec)?)),
        Format::Csv => {
            if let Some(path) = &out.summary {
                std::fs::write(path, output::render(summary) + "\n")?;
            }
            let mut buf = Vec::new();
            rec.write_csv(&mut buf)?;
            Ok(String::from_utf8(buf).expect("CSV is UTF-8").trim_end().to_string())
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    if let Some(t) = &file.tolerances {
        qwass::config::set_tolerances(t.clone());
    }
    if let Some(n) = cli.threads.or(file.threads) {
        set_threads(n);
    }
    if let Some(path) = &cli.debug_log {
        qwass::solver::debug::set_sink(Box::new(std::fs::File::create(path)?));
    }
    let ctx = Context {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        exec: if cli.sequential { ExecMode::Sequential } else { ExecMode::Parallel },
        file,
    };
    let v = match cli.command {
        Command::Wp(WpCommand::Estimate { pair, p, search }) => {
            let (rho, sigma) = load_pair(&pair.a, &pair.b)?;
            let metric = metric_from_name(&pair.metric, rho.dims())?;
            with_metric(estimate_wp(&rho, &sigma, &metric, p, &ctx.search(&search))?.to_json(), &metric)
        }
        Command::Wp(WpCommand::Winf { pair, search }) => {
            let (rho, sigma) = load_pair(&pair.a, &pair.b)?;
            let metric = metric_from_name(&pair.metric, rho.dims())?;
            with_metric(estimate_winf(&rho, &sigma, &metric, &ctx.search(&search))?.to_json(), &metric)
        }
        Command::Plan(PlanCommand::Cost(args)) => {
            let plan = TransportPlan::load(&args.plan)?;
            let metric = metric_from_name(&args.metric, plan.dims())?;
            let value = plan_value(&plan, &metric, args.p)?;
            let cost = match args.p {
                Order::Finite(p) => value.powf(p),
                Order::Infinity => value,
            };
            json!({ "metric": metric.name, "order": args.p, "entries": plan.len(), "cost": cost, "value": value })
        }
        Command::Plan(PlanCommand::Reduce { plan: args, output }) => {
            let plan = TransportPlan::load(&args.plan)?;
            let metric = metric_from_name(&args.metric, plan.dims())?;
            let reduced = reduce_plan(&plan, &metric, args.p)?;
            let drift = (reduced.source_marginal() - plan.source_marginal()).norm()
                + (reduced.target_marginal() - plan.target_marginal()).norm();
            if let Some(path) = &output {
                std::fs::write(path, serde_json::to_string_pretty(&reduced.to_json())? + "\n")?;
            }
            json!({
                "metric": metric.name,
                "order": args.p,
                "entries_before": plan.len(),
                "entries_after": reduced.len(),
                "value_before": plan_value(&plan, &metric, args.p)?,
                "value_after": plan_value(&reduced, &metric, args.p)?,
                "marginal_drift": drift,
                "plan": reduced.to_json(),
            })
        }
        Command::Norm(NormCommand::W1h { a, b }) => {
            let (rho, sigma) = load_pair(&a, &b)?;
            let r = w1h_norm(&TracelessHermitian::difference(&rho, &sigma)?)?;
            json!({
                "value": r.value,
                "dual_value": r.dual_value,
                "certified_lower": r.certified_lower(),
                "status": format!("{:?}", r.status),
                "probe": output::matrix(&r.probe, rho.dims()),
            })
        }
        Command::Norm(NormCommand::Asym { a, b, per_site, stabilized }) => {
            let (rho, sigma) = load_pair(&a, &b)?;
            let r = asym_cost(&rho, &sigma, per_site)?;
            let mut v = json!({ "value": r.value, "per_site": per_site, "status": format!("{:?}", r.status) });
            if stabilized {
                v["stabilized"] = json!(asym_cost_stabilized(&rho, &sigma, per_site)?.value);
            }
            v
        }
        Command::Lipschitz(args) => {
            let (m, dims) = load_operator(&args.op)?;
            let o = TracelessHermitian::new(m, dims.clone())?;
            let metric = metric_from_name(&args.metric, &dims)?;
            let mut budget = DualBudget { seed: ctx.seed, exec: ctx.exec, ..ctx.file.dual.clone() };
            budget.restarts = args.restarts.unwrap_or(budget.restarts);
            let est = lipschitz_estimate(&o, &metric, &budget)?;
            json!({
                "metric": metric.name,
                "value": est.value,
                "bound": est.bound,
                "certified": est.certified,
                "restart": est.restart,
                "witness": { "psi": output::pure(&est.psi), "phi": output::pure(&est.phi) },
            })
        }
        Command::Dw1(pair) => {
            let (rho, sigma) = load_pair(&pair.a, &pair.b)?;
            let metric = metric_from_name(&pair.metric, rho.dims())?;
            let est = dw1_lower_estimate(&rho, &sigma, &metric)?;
            json!({
                "metric": metric.name,
                "value": est.value,
                "pairing": est.pairing,
                "bound": est.bound,
                "probe": output::matrix(&est.probe, rho.dims()),
            })
        }
        Command::Metric(MetricCommand::Check { metric, dims }) => {
            let dims = dims_for(&metric, dims)?;
            let spec = metric_from_name(&metric, &dims)?;
            let checked = match &spec.validation {
                Some(_) => spec.clone(),
                None => plugin_metric(
                    &spec.name,
                    spec.evaluator().clone(),
                    dims.clone(),
                    spec.diameter,
                    spec.hoelder,
                    &[],
                    ctx.seed,
                )?,
            };
            json!({
                "metric": spec.name,
                "dims": dims,
                "diameter": spec.diameter,
                "hoelder": spec.hoelder,
                "exact_lower_norm": spec.exact_lower_norm().map(|n| n.name()),
                "validation": checked.validation,
            })
        }
        Command::Experiment(ExperimentCommand::LowRank { ensemble, out }) => {
            let cfg = ensemble_config(&ensemble, &ctx, format!("hamming:{},{}", ensemble.d, ensemble.n), vec![]);
            return emit_record(&run_low_rank(&cfg)?, &out);
        }
        Command::Experiment(ExperimentCommand::HighRank { ensemble, metric, betas, out }) => {
            let cfg = ensemble_config(&ensemble, &ctx, metric, betas);
            return emit_record(&run_high_rank(&cfg)?, &out);
        }
        Command::Experiment(ExperimentCommand::Hypercontractivity {
            metric,
            dims,
            p1,
            p2,
            delta,
            noise,
            entries,
            trials,
            out,
        }) => {
            let delta = match delta.trim() {
                "auto" => None,
                s => Some(s.parse::<f64>().map_err(|_| Error::Parse(format!("--delta {s:?}: expected a number or auto")))?),
            };
            let cfg = HyperConfig {
                dims: dims_for(&metric, dims)?,
                metric,
                p1,
                p2,
                delta,
                noise: match noise {
                    Noise::Depolarizing => NoiseKind::Depolarizing,
                    Noise::Replacement => NoiseKind::Replacement,
                },
                plan_entries: entries,
                trials,
                seed: ctx.seed,
                exec: ctx.exec,
            };
            return emit_record(&run_hypercontractivity(&cfg)?, &out);
        }
        // State files keep full precision so they load back bit for bit.
        Command::Sample(SampleCommand::Pure { dims }) => {
            return Ok(serde_json::to_string(&output::pure(&haar_pure_seeded(&dims, ctx.seed)?))?);
        }
        Command::Sample(SampleCommand::Mixed { dims, s }) => {
            let rho = random_mixed(&dims, s, ctx.seed)?;
            return Ok(serde_json::to_string(&output::matrix(rho.matrix(), rho.dims()))?);
        }
    };
    Ok(output::render(v))
}

fn ensemble_config(e: &EnsembleArgs, ctx: &Context, metric: String, betas: Vec<f64>) -> EnsembleConfig {
    let mut cfg = EnsembleConfig {
        d_local: e.d,
        n: e.n,
        c: e.c,
        trials: e.trials,
        seed: ctx.seed,
        metric,
        exec: ctx.exec,
        ..Default::default()
    };
    if !betas.is_empty() {
        cfg.betas = betas;
    }
    cfg
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = run(cli);
    qwass::solver::debug::clear_sink();
    match result {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(stdout, "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", output::error(&e));
            match e {
                Error::Validation { .. } | Error::Parse(_) | Error::MetricAxiom { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
