//! Command-line front end: generation, exact oracles, influence and
//! spectral checks, chain simulation, and mixing-bound arithmetic, all with
//! JSON output and a machine-readable exit contract (0 = all checks passed,
//! 1 = some check failed, 2 = usage/input error or violated hypothesis).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spectral_colorings::dynamics;
use spectral_colorings::generators::{self, GeneratorSpec};
use spectral_colorings::influence::{self, IDENTITY_TOL, INEQUALITY_SLACK};
use spectral_colorings::instance::InstanceCollection;
use spectral_colorings::io;
use spectral_colorings::oracle;
use spectral_colorings::region::RegionParams;
use spectral_colorings::report::{CheckReport, Summary};
use spectral_colorings::spectral;
use spectral_colorings::{Error, ListColoringInstance};

const SCHEMA: &str = "spectral-colorings/1";

#[derive(Parser, Debug)]
#[command(name = "spectral-colorings", version, about = "Glauber dynamics for list-colorings with exact spectral verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Instance file: JSON schema, or an edge list (one "u v" per line)
    /// together with --q.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Generator spec instead of a file: star:3, path:5, cycle:6, grid:3x3,
    /// kbip:2x3, rbip:a=4,b=4,edges=6,seed=1, rtf:n=10,dmax=3,edges=15,seed=1.
    #[arg(long, global = true)]
    gen: Option<String>,

    /// Palette size for generated graphs and edge-list inputs (full palettes).
    #[arg(long, global = true)]
    q: Option<u32>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Master seed for every randomized component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Tolerance override for identity and inequality checks.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit an instance in the JSON format.
    Gen {
        /// Random lists respecting the (delta, q) floor |L(v)| >= q - delta + deg(v).
        #[arg(long)]
        random_lists: bool,
        /// Extra minimum list size on top of the (delta, q) floor.
        #[arg(long)]
        min_list_size: Option<usize>,
    },
    /// Exact enumeration: total counts or per-pair marginals.
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
    /// Influence-side lemma/theorem checks.
    Verify {
        #[arg(long, value_enum)]
        check: VerifyCheck,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Cap on enumerated tuples; seeded sampling beyond it.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Spectral-side checks: the eigenvalue identity, the expansion sweep,
    /// the exact Glauber gap, and the headline bound.
    Spectral {
        #[arg(long, value_enum)]
        check: SpectralCheck,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1_000)]
        budget: usize,
        /// Cap on the enumerated Glauber state space.
        #[arg(long, default_value_t = spectral::DEFAULT_OMEGA_CAP)]
        omega_cap: usize,
    },
    /// Run the Glauber sampler and write a snapshot trace.
    Sample {
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long, default_value_t = 1_000)]
        stride: u64,
    },
    /// Total-variation estimate against exact uniform (small instances).
    Tv {
        #[arg(long, default_value_t = 1_000)]
        steps: u64,
        #[arg(long, default_value_t = 10_000)]
        chains: usize,
        #[arg(long, default_value_t = spectral::DEFAULT_OMEGA_CAP)]
        omega_cap: usize,
    },
    /// Identity-coupling coalescence diagnostic.
    Couple {
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
    },
    /// Mixing-bound constants for given (n, delta, epsilon); the palette
    /// comes from the global --q.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: u32,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "lower")]
enum VerifyCheck {
    /// |M entry| <= maximum influence, pointwise.
    Obs11,
    /// The per-tuple influence recursion identity.
    Lemma14,
    /// The aggregate influence recursion over derived collections.
    Lemma17,
    /// Marginal ratio <= min(1/((1+eps) deg), 4/q). Needs triangle-free,
    /// (delta, q), in-region.
    Lemma18,
    /// Row sums of M <= 2 deg (Ihat* + P I*).
    Lemma22,
    /// Marginal ratio <= 1/(Phi deg). Needs triangle-free, (delta, q).
    Lemma25,
    /// Phi >= 1 + (1 + 1/alpha*) eps over the region grid (no instance).
    Lemma26,
    /// lambda_1(M) and row sums <= 64 (1/eps+1)^2 delta/q. Needs region.
    Thm9,
    /// I* <= 4(1/eps+1) and Ihat* <= (16/q)(1/eps+1)^2. Needs region.
    Thm19,
    /// The biased influence recursion (total and per-target).
    Biased,
    /// The walk/influence eigenvalue identity (also under `spectral`).
    Thm8,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "lower")]
enum SpectralCheck {
    Thm8,
    Sweep,
    Gap,
    Bound,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: failed to set thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Resolved configuration echoed into every report.
#[derive(Serialize)]
struct ConfigEcho {
    subcommand: String,
    instance_source: String,
    seed: u64,
    threads: usize,
    tol: Option<f64>,
    parameters: BTreeMap<String, Value>,
}

struct Ctx<'a> {
    cli: &'a Cli,
    config: ConfigEcho,
}

impl<'a> Ctx<'a> {
    fn new(cli: &'a Cli, subcommand: &str) -> Self {
        let instance_source = match (&cli.input, &cli.gen) {
            (Some(path), _) => format!("file:{}", path.display()),
            (None, Some(spec)) => format!("gen:{spec}"),
            (None, None) => "none".into(),
        };
        Ctx {
            cli,
            config: ConfigEcho {
                subcommand: subcommand.to_string(),
                instance_source,
                seed: cli.seed,
                threads: cli.threads.unwrap_or_else(rayon::current_num_threads),
                tol: cli.tol,
                parameters: BTreeMap::new(),
            },
        }
    }

    fn param<T: Into<Value>>(&mut self, key: &str, value: T) {
        self.config.parameters.insert(key.into(), value.into());
    }

    fn instance(&self) -> Result<ListColoringInstance, Error> {
        match (&self.cli.input, &self.cli.gen) {
            (Some(path), _) => io::load_instance(path, self.cli.q),
            (None, Some(spec)) => {
                let spec = GeneratorSpec::parse(spec)?;
                let q = self.cli.q.ok_or_else(|| {
                    Error::BadParams("generated instances need --q".into())
                })?;
                if let GeneratorSpec::Cycle { n: 3 } = spec {
                    eprintln!("warning: cycle:3 is a triangle; triangle-free checks will reject it");
                }
                generators::full_palette_instance(&spec, q)
            }
            (None, None) => Err(Error::BadParams(
                "no instance: pass --input FILE or --gen SPEC".into(),
            )),
        }
    }

    /// Writes the report envelope; returns whether stdout/file write worked.
    fn emit(&self, results: Value, summary: Option<&Summary>) -> Result<(), Error> {
        let mut envelope = json!({
            "schema": SCHEMA,
            "config": serde_json::to_value(&self.config).expect("config serializes"),
            "results": results,
        });
        if let Some(summary) = summary {
            envelope["summary"] = json!(summary.line());
        }
        if !self.cli.no_timestamp {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            envelope["unix_time"] = json!(now);
        }
        let text = serde_json::to_string_pretty(&envelope).expect("report serializes");
        match &self.cli.out {
            Some(path) => std::fs::write(path, text + "\n")
                .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))?,
            None => println!("{text}"),
        }
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::Gen {
            random_lists,
            min_list_size,
        } => cmd_gen(cli, *random_lists, *min_list_size),
        Command::Oracle { op } => cmd_oracle(cli, op),
        Command::Verify {
            check,
            epsilon,
            budget,
        } => cmd_verify(cli, *check, *epsilon, *budget),
        Command::Spectral {
            check,
            epsilon,
            budget,
            omega_cap,
        } => cmd_spectral(cli, *check, *epsilon, *budget, *omega_cap),
        Command::Sample {
            steps,
            chains,
            stride,
        } => cmd_sample(cli, *steps, *chains, *stride),
        Command::Tv {
            steps,
            chains,
            omega_cap,
        } => cmd_tv(cli, *steps, *chains, *omega_cap),
        Command::Couple { max_steps } => cmd_couple(cli, *max_steps),
        Command::Bound { n, delta, epsilon } => {
            let q = cli.q.ok_or_else(|| {
                Error::BadParams("bound needs a palette size (--q)".into())
            })?;
            cmd_bound(cli, *n, *delta, q, *epsilon)
        }
    }
}

#[derive(Subcommand, Debug)]
enum OracleOp {
    /// Total number of proper list-colorings.
    Count,
    /// All vertex-color marginals.
    Marginals,
}

fn cmd_gen(cli: &Cli, random_lists: bool, min_list_size: Option<usize>) -> Result<bool, Error> {
    let mut ctx = Ctx::new(cli, "gen");
    ctx.param("random_lists", random_lists);
    if let Some(m) = min_list_size {
        ctx.param("min_list_size", m);
    }
    let mut inst = ctx.instance()?;
    if random_lists {
        let delta = influence::declared_delta(&inst);
        let floor = min_list_size.unwrap_or(0);
        let mut rng = dynamics::master_rng(cli.seed);
        let lists =
            generators::random_lists(inst.graph(), inst.q(), delta, |_| floor, &mut rng)?;
        inst = ListColoringInstance::new(inst.graph().clone(), lists, inst.q())?;
    }
    let results = serde_json::to_value(io::InstanceJson::from_instance(&inst))
        .expect("instance serializes");
    ctx.emit(results, None)?;
    Ok(true)
}

fn cmd_oracle(cli: &Cli, op: &OracleOp) -> Result<bool, Error> {
    let mut ctx = Ctx::new(cli, "oracle");
    let inst = ctx.instance()?;
    let counts = oracle::count_colorings(&inst)?;
    let results = match op {
        OracleOp::Count => {
            ctx.param("op", "count");
            json!({ "total": counts.total().to_string() })
        }
        OracleOp::Marginals => {
            ctx.param("op", "marginals");
            let mut rows = Vec::new();
            for v in 0..inst.n() {
                for &c in inst.list(v) {
                    rows.push(json!({
                        "vertex": v,
                        "color": c,
                        "count": counts.pair_count(v, c).to_string(),
                        "probability": counts.marginal(v, c),
                    }));
                }
            }
            json!({ "total": counts.total().to_string(), "marginals": rows })
        }
    };
    ctx.emit(results, None)?;
    Ok(true)
}

/// Exit-2 gate for checks whose hypotheses the instance must satisfy.
fn require_hypotheses(
    inst: &ListColoringInstance,
    epsilon: f64,
    triangle_free: bool,
    delta_q: bool,
    region: bool,
) -> Result<(), Error> {
    let delta = influence::declared_delta(inst);
    if triangle_free && !inst.graph().is_triangle_free() {
        return Err(Error::BadParams("hypothesis violated: triangle-free".into()));
    }
    if delta_q
        && !matches!(
            spectral_colorings::is_delta_q_instance(inst, delta, inst.q()),
            Ok(true)
        )
    {
        return Err(Error::BadParams(format!(
            "hypothesis violated: ({delta}, {}) list-coloring instance",
            inst.q()
        )));
    }
    if region {
        let params = RegionParams::new(epsilon)?;
        if !params.contains(delta, inst.q()) {
            return Err(Error::BadParams(format!(
                "hypothesis violated: (delta, q) = ({delta}, {}) outside the region for epsilon = {epsilon} (needs q >= {:.3})",
                inst.q(),
                params.q_threshold(delta)
            )));
        }
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, check: VerifyCheck, epsilon: f64, budget: usize) -> Result<bool, Error> {
    let mut ctx = Ctx::new(cli, "verify");
    ctx.param("check", format!("{check:?}").to_lowercase());
    ctx.param("epsilon", epsilon);
    ctx.param("budget", budget);
    let id_tol = cli.tol.unwrap_or(IDENTITY_TOL);
    let ineq_tol = cli.tol.unwrap_or(INEQUALITY_SLACK);

    // the region grid check needs no instance
    if check == VerifyCheck::Lemma26 {
        let reports = vec![influence::verify_phi_lower_bound(epsilon, 50)?];
        return finish_verify(&ctx, reports);
    }

    let inst = ctx.instance()?;
    let reports: Vec<CheckReport> = match check {
        VerifyCheck::Obs11 => vec![influence::verify_obs11(&inst)?],
        VerifyCheck::Lemma14 => {
            let sweep =
                influence::verify_recursion_identity_all(&inst, id_tol, budget, cli.seed)?;
            ctx.param("tuples_checked", sweep.tuples_checked);
            ctx.param(
                "tuples_skipped_degenerate",
                sweep.tuples_skipped_degenerate,
            );
            sweep.reports
        }
        VerifyCheck::Lemma17 => {
            let coll = InstanceCollection::singleton(&inst);
            let mut out = Vec::new();
            for v in 0..inst.n() {
                if inst.graph().degree(v) >= 1 {
                    out.push(influence::verify_aggregate_recursion(&coll, v, ineq_tol)?);
                }
            }
            out
        }
        VerifyCheck::Lemma18 => {
            require_hypotheses(&inst, epsilon, true, true, true)?;
            let all = influence::verify_marginal_ratio_bounds(&inst, epsilon)?;
            all.into_iter()
                .filter(|r| r.quantity != "marginal_ratio_vs_phi")
                .collect()
        }
        VerifyCheck::Lemma22 => {
            let all = influence::verify_row_sum_bound(&inst, epsilon)?;
            all.into_iter()
                .filter(|r| r.quantity == "row_sum_vs_influences")
                .collect()
        }
        VerifyCheck::Lemma25 => {
            require_hypotheses(&inst, epsilon, true, true, false)?;
            let all = influence::verify_marginal_ratio_bounds(&inst, epsilon)?;
            all.into_iter()
                .filter(|r| r.quantity == "marginal_ratio_vs_phi")
                .collect()
        }
        VerifyCheck::Lemma26 => unreachable!("handled above"),
        VerifyCheck::Thm9 => {
            require_hypotheses(&inst, epsilon, true, true, true)?;
            let mut out = vec![spectral::verify_lambda1_bound(&inst, epsilon)?];
            out.extend(
                influence::verify_row_sum_bound(&inst, epsilon)?
                    .into_iter()
                    .filter(|r| r.quantity == "row_sum_vs_region_bound"),
            );
            out
        }
        VerifyCheck::Thm19 => {
            require_hypotheses(&inst, epsilon, true, true, true)?;
            vec![
                influence::verify_total_influence_bound(&inst, epsilon)?,
                influence::verify_total_biased_bound(&inst, epsilon)?,
            ]
        }
        VerifyCheck::Biased => {
            let coll = InstanceCollection::singleton(&inst);
            let mut out = Vec::new();
            for v in 0..inst.n() {
                if inst.graph().degree(v) >= 1 {
                    out.extend(influence::verify_biased_recursion(&coll, v, ineq_tol)?);
                }
            }
            out
        }
        VerifyCheck::Thm8 => {
            if let Some(v) = inst.ergodicity_violation() {
                return Err(Error::BadParams(format!(
                    "hypothesis violated: |L({v})| >= deg({v}) + 2"
                )));
            }
            let rep = spectral::verify_theorem8(&inst, cli.tol.unwrap_or(1e-8))?;
            let mut check = CheckReport::identity(
                "walk_influence_identity",
                rep.lambda2_walk,
                rep.lambda1_m / (inst.n() as f64 - 1.0),
                cli.tol.unwrap_or(1e-8),
            );
            check.pass = rep.pass;
            check.residual = rep.identity_residual;
            let check = check
                .with("max_imag_part", rep.max_imag_part)
                .with("null_residual_ones", rep.null_residual_ones)
                .with("null_residual_indicators", rep.null_residual_indicators);
            vec![check]
        }
    };
    finish_verify(&ctx, reports)
}

fn finish_verify(ctx: &Ctx, reports: Vec<CheckReport>) -> Result<bool, Error> {
    let summary = Summary::of(&reports);
    let results = serde_json::to_value(&reports).expect("reports serialize");
    ctx.emit(results, Some(&summary))?;
    eprintln!("{}", summary.line());
    Ok(summary.all_pass())
}

fn cmd_spectral(
    cli: &Cli,
    check: SpectralCheck,
    epsilon: f64,
    budget: usize,
    omega_cap: usize,
) -> Result<bool, Error> {
    let mut ctx = Ctx::new(cli, "spectral");
    ctx.param("check", format!("{check:?}").to_lowercase());
    ctx.param("epsilon", epsilon);
    ctx.param("budget", budget);
    ctx.param("omega_cap", omega_cap);
    match check {
        SpectralCheck::Thm8 => {
            let inst = ctx.instance()?;
            if let Some(v) = inst.ergodicity_violation() {
                return Err(Error::BadParams(format!(
                    "hypothesis violated: |L({v})| >= deg({v}) + 2"
                )));
            }
            let rep = spectral::verify_theorem8(&inst, cli.tol.unwrap_or(1e-8))?;
            let pass = rep.pass;
            ctx.emit(serde_json::to_value(&rep).expect("serializes"), None)?;
            Ok(pass)
        }
        SpectralCheck::Sweep => {
            let inst = ctx.instance()?;
            let rep = spectral::local_expansion_sweep(&inst, epsilon, budget, cli.seed)?;
            let pass = rep.pass;
            ctx.emit(serde_json::to_value(&rep).expect("serializes"), None)?;
            Ok(pass)
        }
        SpectralCheck::Gap => {
            let inst = ctx.instance()?;
            let glauber = spectral::glauber_matrix_capped(&inst, omega_cap)?;
            let rep = spectral::spectral_gap(&glauber)?;
            ctx.emit(serde_json::to_value(&rep).expect("serializes"), None)?;
            Ok(true)
        }
        SpectralCheck::Bound => Err(Error::BadParams(
            "use the dedicated `bound` subcommand with --n/--delta/--q".into(),
        )),
    }
}

fn cmd_sample(cli: &Cli, steps: u64, chains: usize, stride: u64) -> Result<bool, Error> {
    let mut ctx = Ctx::new(cli, "sample");
    ctx.param("steps", steps);
    ctx.param("chains", chains);
    ctx.param("stride", stride);
    let inst = ctx.instance()?;
    let traces: Result<Vec<_>, Error> = (0..chains)
        .map(|c| dynamics::trace(&inst, cli.seed.wrapping_add(c as u64), steps, stride))
        .collect();
    let traces = traces?;
    let results = if chains == 1 {
        serde_json::to_value(&traces[0]).expect("trace serializes")
    } else {
        serde_json::to_value(&traces).expect("traces serialize")
    };
    ctx.emit(results, None)?;
    Ok(true)
}

fn cmd_tv(cli: &Cli, steps: u64, chains: usize, omega_cap: usize) -> Result<bool, Error> {
    let mut ctx = Ctx::new(cli, "tv");
    ctx.param("steps", steps);
    ctx.param("chains", chains);
    ctx.param("omega_cap", omega_cap);
    let inst = ctx.instance()?;
    if let Some(v) = inst.ergodicity_violation() {
        eprintln!(
            "warning: |L({v})| < deg({v}) + 2; the chain may not be ergodic and the \
             fixed-start TV may not converge to 0"
        );
    }
    let est = dynamics::estimate_tv(&inst, steps, chains, cli.seed, omega_cap)?;
    ctx.emit(serde_json::to_value(&est).expect("serializes"), None)?;
    Ok(true)
}

fn cmd_couple(cli: &Cli, max_steps: u64) -> Result<bool, Error> {
    let mut ctx = Ctx::new(cli, "couple");
    ctx.param("max_steps", max_steps);
    let inst = ctx.instance()?;
    let out = dynamics::coupling_time(&inst, cli.seed, max_steps)?;
    if out.ergodicity_warning {
        eprintln!("warning: ergodicity condition unmet; coupling diagnostic is heuristic");
    }
    ctx.emit(serde_json::to_value(&out).expect("serializes"), None)?;
    Ok(true)
}

fn cmd_bound(cli: &Cli, n: usize, delta: u32, q: u32, epsilon: f64) -> Result<bool, Error> {
    let mut ctx = Ctx::new(cli, "bound");
    ctx.param("n", n);
    ctx.param("delta", delta);
    ctx.param("q", q);
    ctx.param("epsilon", epsilon);
    let bound = spectral::mixing_bound_theorem1(n, delta, q, epsilon)?;
    for note in &bound.notes {
        eprintln!("note: {note}");
    }
    ctx.emit(serde_json::to_value(&bound).expect("serializes"), None)?;
    Ok(true)
}
