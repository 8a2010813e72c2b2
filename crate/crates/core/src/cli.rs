//! Command-line interface: generation, property checks, game playback,
//! exact solving, sweeps and trace replay, all reproducible from a single
//! seed.
//!
//! Exit codes: 0 success, 1 domain or input errors, 2 budget refusals.
//! With `--format json`, errors are emitted as structured objects on
//! stderr.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::experiments::{classify_regime, run_sweep, sweep_csv, SweepSpec};
use crate::game::{play, replay, GameConfig, Trace};
use crate::graph::{load_graph, sample_gnp, save_graph, GnpParams, Graph, VertexSet};
use crate::properties::{
    audit_expansion, check_common_neighbor_bound, check_ec, check_nonneighborhood_bound,
    check_nonneighborhood_corollary, matching_set_report, CheckMode, EcVariant, PropertyError,
    DEFAULT_BUDGET,
};
use crate::solver::{
    extracted_strategies, solve, verify_trivial_bounds, SolverError, Winner, DEFAULT_STATE_BUDGET,
};
use crate::strategies::{make_rev_strategy, make_spy_strategy};

#[derive(Parser)]
#[command(
    name = "revspy",
    about = "Revolutionaries and Spies on graphs: generate, check, play, solve, sweep",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed for everything randomized
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (subcommands pick a sensible default)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a G(n,p) graph to the edge-list format
    Gen(GenArgs),
    /// Run a property checker and emit its report
    Check(CheckArgs),
    /// Play one game and emit the trace
    Play(PlayArgs),
    /// Decide one instance exactly
    Solve(SolveArgs),
    /// Compute the exact spy number with the trivial-bounds annotation
    Spynum(SpynumArgs),
    /// Run a parameter sweep from a key-value config file
    Sweep(SweepArgs),
    /// Re-validate a trace file against its graph
    Replay(ReplayArgs),
    /// Classify a parameter tuple into its spy-number regime
    Regime(RegimeArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: f64,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum PropertyKind {
    /// (l,k) witness property, distance-j form when --j > 1
    Ec,
    /// anchored (1,l,k) witness property
    OneEc,
    /// non-neighborhood intersection bound (needs --gnp-p, --beta, --alpha)
    Nonneigh,
    /// corollary form with alpha = (1+eps)/(beta-1)
    NonneighCor,
    /// pairwise common-neighbor cap (needs --cap)
    CommonNeighbor,
    /// certified matching-set search (needs --gnp-p, --gamma, --delta)
    MatchingSet,
    /// neighborhood expansion audit (needs --set, --radius, --tol)
    Expansion,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    property: PropertyKind,
    #[arg(long, default_value_t = 1)]
    l: u32,
    #[arg(long, default_value_t = 0)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    j: u32,
    /// exact | sampled
    #[arg(long, default_value = "exact")]
    mode: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// the p the graph was sampled with, for L_n-scaled properties
    #[arg(long)]
    gnp_p: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 10)]
    retries: u32,
    #[arg(long)]
    cap: Option<u64>,
    /// comma-separated vertex set, e.g. --set 0,3,7
    #[arg(long)]
    set: Option<String>,
    #[arg(long, default_value_t = 1)]
    radius: u32,
    #[arg(long, default_value_t = 0.1)]
    tol: f64,
    /// degree scale override; defaults to 2m/n
    #[arg(long)]
    d: Option<f64>,
    /// extra vertex for the escape count
    #[arg(long)]
    x: Option<u32>,
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    s: u32,
    #[arg(long, default_value = "greedy")]
    rev: String,
    #[arg(long, default_value = "follow")]
    spy: String,
    #[arg(long, default_value_t = 100)]
    horizon: u32,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    s: u32,
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    budget: u64,
    /// also emit the positional strategies as a replayable optimal
    /// self-play trace
    #[arg(long)]
    emit_strategy: bool,
}

#[derive(Args)]
struct SpynumArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// grid sweep from a key-value config file
    #[arg(long, required_unless_present = "threshold_scan")]
    config: Option<PathBuf>,
    /// instead: scan seeded samples for the largest exactly-confirmed
    /// (2,s) property
    #[arg(long)]
    threshold_scan: bool,
    #[arg(long, default_value_t = 32)]
    n: u64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 20)]
    scan_seeds: u32,
    #[arg(long, default_value_t = 3)]
    s_max: u32,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    trace: PathBuf,
}

#[derive(Args)]
struct RegimeArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    omega: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ErrorObject {
    error: String,
    kind: &'static str,
}

enum CliError {
    Domain(String),
    Budget(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget(_) => 2,
            _ => 1,
        }
    }

    fn object(&self) -> ErrorObject {
        let (error, kind) = match self {
            CliError::Domain(e) => (e.clone(), "domain"),
            CliError::Budget(e) => (e.clone(), "budget"),
            CliError::Io(e) => (e.clone(), "io"),
        };
        ErrorObject { error, kind }
    }
}

impl From<PropertyError> for CliError {
    fn from(e: PropertyError) -> Self {
        match e {
            PropertyError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn read_graph(path: &PathBuf) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    load_graph(&text).map_err(|e| CliError::Domain(e.to_string()))
}

/// Honor REVSPY_THREADS (0 or unset = automatic).
fn configure_threads() {
    if let Ok(v) = std::env::var("REVSPY_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

/// Entry point: parse argv, dispatch, print, return the exit code.
pub fn run() -> i32 {
    configure_threads();
    let cli = Cli::parse();
    let format = cli.format;
    let out_path = cli.out.clone();
    match dispatch(cli) {
        Ok(output) => match write_output(out_path, &output) {
            Ok(()) => 0,
            Err(e) => {
                report_error(&e, format);
                e.exit_code()
            }
        },
        Err(e) => {
            report_error(&e, format);
            e.exit_code()
        }
    }
}

fn report_error(e: &CliError, format: Option<Format>) {
    if matches!(format, Some(Format::Json)) {
        eprintln!("{}", serde_json::to_string(&e.object()).unwrap());
    } else {
        eprintln!("error: {}", e.object().error);
    }
}

fn write_output(path: Option<PathBuf>, output: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(&p, output).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    let seed = cli.seed;
    let format = cli.format;
    match cli.command {
        Command::Gen(a) => {
            if !(0.0..=1.0).contains(&a.p) {
                return Err(CliError::Domain("p must lie in [0,1]".into()));
            }
            if a.n < 1 {
                return Err(CliError::Domain("n must be >= 1".into()));
            }
            let g = sample_gnp(&GnpParams::new(a.n, a.p, seed));
            Ok(save_graph(&g))
        }
        Command::Check(a) => run_check(a, seed),
        Command::Play(a) => {
            let g = read_graph(&a.graph)?;
            let config = GameConfig::new(a.r, a.m, a.s, a.horizon);
            let mut rev = make_rev_strategy(&a.rev, &g, &config)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            let mut spy = make_spy_strategy(&a.spy, &g, &config, seed)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            let result = play(&g, &config, rev.as_mut(), spy.as_mut(), seed);
            match format {
                Some(Format::Text) => Ok(format!(
                    "{:?} at round {:?} after {} rounds\n",
                    result.verdict,
                    result.winning_round,
                    result.trace.rounds.len()
                )),
                _ => Ok(to_json(&result.trace)),
            }
        }
        Command::Solve(a) => {
            let g = read_graph(&a.graph)?;
            let solved = solve(&g, a.r, a.m, a.s, a.budget)?;
            #[derive(Serialize)]
            struct SolveOut {
                winner: &'static str,
                states: u64,
                edges: u64,
                #[serde(skip_serializing_if = "Option::is_none")]
                optimal_play: Option<Trace>,
            }
            let winner = solved.winner;
            let (states, edges) = (solved.states, solved.edges);
            let optimal_play = if a.emit_strategy {
                // the positional strategies made concrete: perfect play on
                // both sides, replayable against the graph
                let horizon = (states as u32).clamp(2, 10_000);
                let (mut rev, mut spy) = extracted_strategies(solved);
                let config = GameConfig::new(a.r, a.m, a.s, horizon);
                Some(play(&g, &config, &mut rev, &mut spy, seed).trace)
            } else {
                None
            };
            let out = SolveOut {
                winner: match winner {
                    Winner::Revolutionaries => "revolutionaries",
                    Winner::Spies => "spies",
                },
                states,
                edges,
                optimal_play,
            };
            match format {
                Some(Format::Json) => Ok(to_json(&out)),
                _ if out.optimal_play.is_some() => Ok(to_json(&out)),
                _ => Ok(format!(
                    "winner: {} (states: {}, edges: {})\n",
                    out.winner, out.states, out.edges
                )),
            }
        }
        Command::Spynum(a) => {
            let g = read_graph(&a.graph)?;
            let report = verify_trivial_bounds(&g, a.r, a.m, a.budget)?;
            #[derive(Serialize)]
            struct SpynumOut {
                sigma: u32,
                lower: u32,
                upper: u32,
                vacuous: bool,
                bounds_ok: bool,
            }
            let out = SpynumOut {
                sigma: report.sigma,
                lower: report.lower,
                upper: report.upper,
                vacuous: report.vacuous,
                bounds_ok: report.lower_ok && report.upper_ok,
            };
            match format {
                Some(Format::Json) => Ok(to_json(&out)),
                _ if out.vacuous => Ok(format!(
                    "{} (m > r: no meeting can form; lower bound {} holds)\n",
                    out.sigma, out.lower
                )),
                _ => Ok(format!(
                    "{} (bounds {} <= sigma <= {}: {})\n",
                    out.sigma,
                    out.lower,
                    out.upper,
                    if out.bounds_ok { "ok" } else { "VIOLATED" }
                )),
            }
        }
        Command::Sweep(a) => {
            if a.threshold_scan {
                let scan = crate::experiments::ec_threshold_scan(
                    a.n,
                    a.p,
                    a.scan_seeds,
                    a.s_max,
                    a.budget,
                    seed,
                )
                .map_err(|e| CliError::Domain(e.to_string()))?;
                return match format {
                    Some(Format::Text) => {
                        let mut s = format!(
                            "n={} p={} median threshold {} (analytic scale {:.2})\n",
                            scan.n, scan.p, scan.median, scan.predicted_scale
                        );
                        for row in &scan.rows {
                            s.push_str(&format!(
                                "seed {}: {:?}{}\n",
                                row.seed,
                                row.threshold,
                                if row.truncated {
                                    " (budget-truncated)"
                                } else {
                                    ""
                                }
                            ));
                        }
                        Ok(s)
                    }
                    _ => Ok(to_json(&scan)),
                };
            }
            let config = a.config.expect("clap enforces config unless scanning");
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
            let mut spec = SweepSpec::parse(&text).map_err(|e| CliError::Domain(e.to_string()))?;
            if spec.seed == 0 {
                spec.seed = seed;
            }
            let rows = run_sweep(&spec);
            match format {
                Some(Format::Json) => Ok(to_json(&rows)),
                _ => Ok(sweep_csv(&rows)),
            }
        }
        Command::Replay(a) => {
            let g = read_graph(&a.graph)?;
            let text = std::fs::read_to_string(&a.trace)
                .map_err(|e| CliError::Io(format!("{}: {e}", a.trace.display())))?;
            let trace: Trace = serde_json::from_str(&text)
                .map_err(|e| CliError::Domain(format!("trace parse: {e}")))?;
            let verdict =
                replay(&g, &trace).map_err(|e| CliError::Domain(format!("replay failed: {e}")))?;
            if verdict != trace.verdict {
                return Err(CliError::Domain(format!(
                    "verdict mismatch: trace says {:?}, replay finds {:?}",
                    trace.verdict, verdict
                )));
            }
            Ok(format!(
                "ok: {} rounds, verdict {:?}\n",
                trace.rounds.len(),
                verdict
            ))
        }
        Command::Regime(a) => {
            let pred = classify_regime(a.n, a.p, a.r, a.m, a.omega)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            match format {
                Some(Format::Text) => Ok(format!(
                    "{} (prediction {:?}; {})\n",
                    pred.regime, pred.prediction, pred.rule
                )),
                _ => Ok(to_json(&pred)),
            }
        }
    }
}

fn parse_mode(mode: &str, trials: u64, seed: u64) -> Result<CheckMode, CliError> {
    match mode {
        "exact" => Ok(CheckMode::Exact),
        "sampled" => Ok(CheckMode::Sampled { trials, seed }),
        other => Err(CliError::Domain(format!(
            "mode must be exact or sampled, got '{other}'"
        ))),
    }
}

fn need<T: Copy>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Domain(format!("this property needs --{what}")))
}

fn run_check(a: CheckArgs, seed: u64) -> Result<String, CliError> {
    let g = read_graph(&a.graph)?;
    match a.property {
        PropertyKind::Ec | PropertyKind::OneEc => {
            let variant = match (a.property, a.j) {
                (PropertyKind::Ec, 1) => EcVariant::Ec,
                (PropertyKind::Ec, _) => EcVariant::EcJ,
                (PropertyKind::OneEc, 1) => EcVariant::OneEc,
                (PropertyKind::OneEc, _) => EcVariant::OneEcJ,
                _ => unreachable!(),
            };
            let mode = parse_mode(&a.mode, a.trials, seed)?;
            let rep = check_ec(&g, variant, a.l, a.k, a.j, mode, a.budget)?;
            Ok(to_json(&rep))
        }
        PropertyKind::Nonneigh => {
            let p = need(a.gnp_p, "gnp-p")?;
            let beta = need(a.beta, "beta")?;
            let alpha = need(a.alpha, "alpha")?;
            let mode = parse_mode(&a.mode, a.trials, seed)?;
            let rep = check_nonneighborhood_bound(&g, p, beta, alpha, mode, a.budget)?;
            Ok(to_json(&rep))
        }
        PropertyKind::NonneighCor => {
            let p = need(a.gnp_p, "gnp-p")?;
            let beta = need(a.beta, "beta")?;
            let mode = parse_mode(&a.mode, a.trials, seed)?;
            let rep = check_nonneighborhood_corollary(&g, p, beta, a.eps, mode, a.budget)?;
            Ok(to_json(&rep))
        }
        PropertyKind::CommonNeighbor => {
            let cap = need(a.cap, "cap")?;
            let rep = check_common_neighbor_bound(&g, cap)?;
            Ok(to_json(&rep))
        }
        PropertyKind::MatchingSet => {
            let p = need(a.gnp_p, "gnp-p")?;
            let gamma = need(a.gamma, "gamma")?;
            let delta = need(a.delta, "delta")?;
            let rep = matching_set_report(&g, p, gamma, delta, seed, a.retries)?;
            Ok(to_json(&rep))
        }
        PropertyKind::Expansion => {
            let set_text = a
                .set
                .ok_or_else(|| CliError::Domain("expansion needs --set".into()))?;
            let verts: Vec<u32> = set_text
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|e| CliError::Domain(format!("bad vertex '{t}': {e}")))
                })
                .collect::<Result<_, _>>()?;
            let s = VertexSet::from_unsorted(verts);
            let rep = audit_expansion(&g, &s, a.radius, a.tol, a.d, a.x)?;
            Ok(to_json(&rep))
        }
    }
}
