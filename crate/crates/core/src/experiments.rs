//! Regime classification and the Monte Carlo sweep harness.
//!
//! The classifier maps a parameter tuple (n, p, r, m, ω) to the spy-number
//! regime its density and gap sizes fall into, together with the numeric
//! prediction at those parameters. Asymptotic side conditions are evaluated
//! with deterministic finite-n gates built on the slowly-growing parameter
//! ω (default ln ln n):
//!
//! * `x = O(1)`  reads `x <= ω`, and `x >> 1` reads `x > ω`;
//! * `x = O(L_n)` reads `x <= ω L_n`, and `x >> L_n` reads `x > ω L_n`;
//! * `x = o(Y)`  reads `x <= Y / ω`;
//! * the excluded degree window around sqrt(n log n) reads
//!   `pn ∈ [sqrt(n ln n)/ω, ω sqrt(n ln n)]`.
//!
//! Tuples matching no rule are labelled out-of-range rather than guessed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{play, GameConfig, Verdict as GameVerdict};
use crate::graph::{ell_n, sample_gnp, GnpParams, Graph};
use crate::properties::{check_ec, CheckMode, EcVariant, PropertyError, Verdict as PropVerdict};
use crate::rng::derive_seed;
use crate::solver::{spy_number_exact, state_estimate, SolverError};
use crate::strategies::{make_rev_strategy, make_spy_strategy, spy_team_parameters};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("sweep spec line {line}: {msg}")]
    Spec { line: usize, msg: String },
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Spy-number regime at the given parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// sigma = r - m + 1 exactly
    #[serde(rename = "r-m+1")]
    ExactGap,
    /// sigma = (1 + o(1)) (r - m)
    #[serde(rename = "r-m")]
    AsymptoticGap,
    /// sigma = Theta(L_n)
    #[serde(rename = "theta-Ln")]
    LogBand,
    /// sigma = (1 + o(1)) r / m
    #[serde(rename = "r/m")]
    RatioScale,
    /// no rule applies; unresolved band or vacuous input
    #[serde(rename = "out-of-range")]
    OutOfRange,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::ExactGap => "r-m+1",
            Regime::AsymptoticGap => "r-m",
            Regime::LogBand => "theta-Ln",
            Regime::RatioScale => "r/m",
            Regime::OutOfRange => "out-of-range",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimePrediction {
    pub regime: Regime,
    /// the gate that fired, spelled out with its numbers
    pub rule: String,
    /// numeric prediction at (n,p,r,m); the log band predicts the scale L_n
    pub prediction: Option<f64>,
    pub eta: f64,
    pub elln: f64,
    pub omega: f64,
}

/// Default slowly-growing gate parameter.
pub fn default_omega(n: u64) -> f64 {
    (n as f64).ln().ln()
}

/// Classify a parameter tuple into its spy-number regime.
pub fn classify_regime(
    n: u64,
    p: f64,
    r: u32,
    m: u32,
    omega: Option<f64>,
) -> Result<RegimePrediction, ExperimentError> {
    if !(p > 0.0 && p < 1.0) || n < 2 {
        return Err(ExperimentError::Domain(format!(
            "need 0 < p < 1 and n >= 2 (got n = {n}, p = {p})"
        )));
    }
    if r < 1 || m < 1 {
        return Err(ExperimentError::Domain("need r >= 1 and m >= 1".into()));
    }
    let omega = omega.unwrap_or_else(|| default_omega(n));
    let eta = (-p.ln() / (n as f64).ln()).clamp(0.0, 1.0);
    let elln = ell_n(n, p).map_err(|e| ExperimentError::Domain(e.to_string()))?;
    let nf = n as f64;
    let d = p * nf;
    let done = |regime, rule: String, prediction| {
        Ok(RegimePrediction {
            regime,
            rule,
            prediction,
            eta,
            elln,
            omega,
        })
    };

    if m > r {
        return done(
            Regime::OutOfRange,
            format!("vacuous: m = {m} > r = {r}, no meeting can form (sigma = 0)"),
            Some(0.0),
        );
    }
    let gap = (r - m) as f64;
    let ratio = r as f64 / m as f64;

    if eta < 1.0 / 3.0 {
        // dense: average degree n^(2/3 + eta_d), eta_d = 1/3 - eta
        let eta_d = 1.0 / 3.0 - eta;
        let gap_cut = 2.99 * eta_d * elln;
        if gap <= gap_cut {
            return done(
                Regime::ExactGap,
                format!("dense: r-m = {gap} <= 2.99*{eta_d:.4}*Ln = {gap_cut:.4}"),
                Some((r - m + 1) as f64),
            );
        }
        if ratio <= omega * elln {
            return done(
                Regime::LogBand,
                format!("dense: r-m > {gap_cut:.4} and r/m = {ratio:.4} <= omega*Ln"),
                Some(elln),
            );
        }
        return done(
            Regime::RatioScale,
            format!("dense: r/m = {ratio:.4} > omega*Ln = {:.4}", omega * elln),
            Some(ratio),
        );
    }

    if eta < 0.5 {
        // medium: average degree n^(1/2 + eta_d), eta_d = 1/2 - eta
        let eta_d = 0.5 - eta;
        if gap <= omega {
            return done(
                Regime::ExactGap,
                format!("medium: r-m = {gap} bounded (<= omega = {omega:.4})"),
                Some((r - m + 1) as f64),
            );
        }
        let gap_cut = 1.99 * eta_d * elln;
        if gap <= gap_cut {
            return done(
                Regime::AsymptoticGap,
                format!("medium: 1 << r-m = {gap} <= 1.99*{eta_d:.4}*Ln = {gap_cut:.4}"),
                Some(gap),
            );
        }
        if ratio <= omega * elln {
            return done(
                Regime::LogBand,
                format!("medium: r-m > {gap_cut:.4} and r/m <= omega*Ln"),
                Some(elln),
            );
        }
        return done(
            Regime::RatioScale,
            format!("medium: r/m = {ratio:.4} > omega*Ln"),
            Some(ratio),
        );
    }

    // sparse: average degree n^(1 - eta) <= sqrt(n)
    let log3 = nf.ln().powi(3);
    let window_lo = (nf * nf.ln()).sqrt() / omega;
    let window_hi = (nf * nf.ln()).sqrt() * omega;
    if gap <= omega {
        if d >= log3 && !(window_lo..=window_hi).contains(&d) {
            return done(
                Regime::ExactGap,
                format!(
                    "sparse: r-m bounded, pn = {d:.4} >= ln^3 n, outside the sqrt(n ln n) window"
                ),
                Some((r - m + 1) as f64),
            );
        }
        if d >= log3 {
            return done(
                Regime::OutOfRange,
                format!(
                    "sparse: r-m bounded but pn = {d:.4} sits in the unresolved window [{window_lo:.4}, {window_hi:.4}]"
                ),
                None,
            );
        }
        // too sparse for the constant-gap rule; fall through to the ratio rule
    } else if d > omega {
        let band1 = (omega * nf * nf.ln()).powf(0.25);
        let band2 = (omega * nf * nf.ln()).powf(1.0 / 6.0);
        let (band, cut) = if d >= band1 {
            (1, (d.min(nf / (d * d))) / omega)
        } else if d >= band2 {
            (2, d / (omega * nf.ln()) / omega)
        } else {
            (3, d / omega)
        };
        if gap <= cut {
            return done(
                Regime::AsymptoticGap,
                format!("sparse band {band}: r-m = {gap} <= {cut:.4}"),
                Some(gap),
            );
        }
    }
    if ratio > omega * elln {
        return done(
            Regime::RatioScale,
            format!("sparse: r/m = {ratio:.4} > omega*Ln = {:.4}", omega * elln),
            Some(ratio),
        );
    }
    done(
        Regime::OutOfRange,
        "no rule applies: unresolved band between the known gap and ratio regimes".into(),
        None,
    )
}

/// Largest s in 0..=s_max whose exact (2,s) witness property holds, scanning
/// upward until a failure or a budget refusal. None when s = 0 already
/// fails; the property is downward closed so the scan order is exhaustive.
pub fn largest_exact_ec2(
    g: &Graph,
    s_max: u32,
    budget: u64,
) -> Result<(Option<u32>, bool), ExperimentError> {
    let mut best: Option<u32> = None;
    for s in 0..=s_max {
        match check_ec(g, EcVariant::Ec, 2, s, 1, CheckMode::Exact, budget) {
            Ok(rep) => match rep.verdict {
                PropVerdict::Holds => best = Some(s),
                _ => return Ok((best, false)),
            },
            Err(PropertyError::BudgetExceeded { .. }) => return Ok((best, true)),
            Err(e) => return Err(e.into()),
        }
    }
    Ok((best, false))
}

/// One seed's threshold curve entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub seed: u64,
    /// largest s with the exact property confirmed, None when s = 0 fails
    pub threshold: Option<u32>,
    /// the scan stopped on a budget refusal rather than a failure
    pub truncated: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub n: u64,
    pub p: f64,
    pub s_max: u32,
    pub rows: Vec<ThresholdRow>,
    /// lower median of the thresholds (None counted as -1)
    pub median: i64,
    /// the analytic scale 2.99 * max(0, 1/3 - eta) * L_n; a trend reference,
    /// never an assertion
    pub predicted_scale: f64,
}

/// Scan seeded G(n,p) samples for the largest exactly-confirmed (2,s)
/// property.
pub fn ec_threshold_scan(
    n: u64,
    p: f64,
    seeds: u32,
    s_max: u32,
    budget: u64,
    base_seed: u64,
) -> Result<ThresholdScan, ExperimentError> {
    let eta = (-p.ln() / (n as f64).ln()).clamp(0.0, 1.0);
    let elln = ell_n(n, p).map_err(|e| ExperimentError::Domain(e.to_string()))?;
    let rows: Vec<ThresholdRow> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(base_seed, "threshold-scan", i as u64);
            let g = sample_gnp(&GnpParams::new(n as u32, p, seed));
            let (threshold, truncated) = largest_exact_ec2(&g, s_max, budget)?;
            Ok(ThresholdRow {
                seed,
                threshold,
                truncated,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;
    let mut vals: Vec<i64> = rows
        .iter()
        .map(|r| r.threshold.map(|t| t as i64).unwrap_or(-1))
        .collect();
    vals.sort_unstable();
    let median = if vals.is_empty() {
        -1
    } else {
        vals[(vals.len() - 1) / 2]
    };
    Ok(ThresholdScan {
        n,
        p,
        s_max,
        rows,
        median,
        predicted_scale: 2.99 * (1.0 / 3.0 - eta).max(0.0) * elln,
    })
}

/// Which evidence columns a sweep fills.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Methods {
    pub exact: bool,
    pub certified: bool,
    pub simulate: bool,
}

impl Default for Methods {
    fn default() -> Self {
        Methods {
            exact: true,
            certified: true,
            simulate: true,
        }
    }
}

/// A sweep specification: parameter grids plus the method selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n: Vec<u64>,
    pub p: Vec<f64>,
    pub r: Vec<u32>,
    pub m: Vec<u32>,
    pub trials: u32,
    pub seed: u64,
    pub methods: Methods,
    pub omega: Option<f64>,
    pub horizon: u32,
    pub eps: f64,
    pub check_budget: u64,
    pub solver_budget: u64,
    pub sampled_trials: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            n: vec![],
            p: vec![],
            r: vec![],
            m: vec![],
            trials: 5,
            seed: 0,
            methods: Methods::default(),
            omega: None,
            horizon: 100,
            eps: 0.1,
            check_budget: crate::properties::DEFAULT_BUDGET,
            solver_budget: crate::solver::DEFAULT_STATE_BUDGET,
            sampled_trials: 2000,
        }
    }
}

impl SweepSpec {
    /// Parse the plain key-value format: one `key = value` per line, lists
    /// comma-separated, `#` comments.
    pub fn parse(text: &str) -> Result<SweepSpec, ExperimentError> {
        let mut spec = SweepSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (key, value) = t.split_once('=').ok_or(ExperimentError::Spec {
                line,
                msg: "expected key = value".into(),
            })?;
            let err = |msg: String| ExperimentError::Spec { line, msg };
            let values = || value.split(',').map(|v| v.trim().to_string());
            match key.trim() {
                "n" => {
                    spec.n = values()
                        .map(|v| v.parse().map_err(|e| err(format!("bad n '{v}': {e}"))))
                        .collect::<Result<_, _>>()?
                }
                "p" => {
                    spec.p = values()
                        .map(|v| v.parse().map_err(|e| err(format!("bad p '{v}': {e}"))))
                        .collect::<Result<_, _>>()?
                }
                "r" => {
                    spec.r = values()
                        .map(|v| v.parse().map_err(|e| err(format!("bad r '{v}': {e}"))))
                        .collect::<Result<_, _>>()?
                }
                "m" => {
                    spec.m = values()
                        .map(|v| v.parse().map_err(|e| err(format!("bad m '{v}': {e}"))))
                        .collect::<Result<_, _>>()?
                }
                "trials" => spec.trials = value.trim().parse().map_err(|e| err(format!("{e}")))?,
                "seed" => spec.seed = value.trim().parse().map_err(|e| err(format!("{e}")))?,
                "omega" => {
                    spec.omega = Some(value.trim().parse().map_err(|e| err(format!("{e}")))?)
                }
                "horizon" => {
                    spec.horizon = value.trim().parse().map_err(|e| err(format!("{e}")))?
                }
                "eps" => spec.eps = value.trim().parse().map_err(|e| err(format!("{e}")))?,
                "check_budget" => {
                    spec.check_budget = value.trim().parse().map_err(|e| err(format!("{e}")))?
                }
                "solver_budget" => {
                    spec.solver_budget = value.trim().parse().map_err(|e| err(format!("{e}")))?
                }
                "sampled_trials" => {
                    spec.sampled_trials = value.trim().parse().map_err(|e| err(format!("{e}")))?
                }
                "methods" => {
                    let mut methods = Methods {
                        exact: false,
                        certified: false,
                        simulate: false,
                    };
                    for v in values() {
                        match v.as_str() {
                            "exact" => methods.exact = true,
                            "certified" => methods.certified = true,
                            "simulate" => methods.simulate = true,
                            other => return Err(err(format!("unknown method '{other}'"))),
                        }
                    }
                    spec.methods = methods;
                }
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        if spec.n.is_empty() || spec.p.is_empty() || spec.r.is_empty() || spec.m.is_empty() {
            return Err(ExperimentError::Spec {
                line: 0,
                msg: "grids n, p, r, m must all be nonempty".into(),
            });
        }
        if spec.trials < 1 {
            return Err(ExperimentError::Spec {
                line: 0,
                msg: "trials must be >= 1".into(),
            });
        }
        Ok(spec)
    }
}

/// One sweep cell's results. Empty options render as blank CSV cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u64,
    pub p: f64,
    pub r: u32,
    pub m: u32,
    pub regime: Regime,
    pub prediction: Option<f64>,
    /// sigma >= cert_lb, from an exactly confirmed property on the cell's
    /// representative graph (trial 0)
    pub cert_lb: Option<u32>,
    /// sigma >= evidence_lb suggested by sampled-unrefuted checks; evidence,
    /// never certified
    pub evidence_lb: Option<u32>,
    pub exact_sigma: Option<u32>,
    /// fraction of trials the three-team defense survived vs greedy
    pub spy_survival: Option<f64>,
    /// fraction of trials the growth offense won at s = cert_lb - 1 vs the
    /// follow baseline
    pub rev_win: Option<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Run a sweep: cells in grid order (n, then p, then r, then m), trials fan
/// out in parallel, results merged deterministically.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let mut cells = Vec::new();
    for &n in &spec.n {
        for &p in &spec.p {
            for &r in &spec.r {
                for &m in &spec.m {
                    cells.push((n, p, r, m));
                }
            }
        }
    }
    cells
        .into_par_iter()
        .enumerate()
        .map(|(idx, (n, p, r, m))| sweep_cell(spec, idx as u64, n, p, r, m))
        .collect()
}

fn sweep_cell(spec: &SweepSpec, idx: u64, n: u64, p: f64, r: u32, m: u32) -> SweepRow {
    let cell_seed = derive_seed(spec.seed, "cell", idx);
    let mut row = SweepRow {
        n,
        p,
        r,
        m,
        regime: Regime::OutOfRange,
        prediction: None,
        cert_lb: None,
        evidence_lb: None,
        exact_sigma: None,
        spy_survival: None,
        rev_win: None,
        seed: cell_seed,
        error: None,
    };
    let mut errs: Vec<String> = Vec::new();
    match classify_regime(n, p, r, m, spec.omega) {
        Ok(pred) => {
            row.regime = pred.regime;
            row.prediction = pred.prediction;
        }
        Err(e) => errs.push(e.to_string()),
    }

    let graph_seed = |t: u64| derive_seed(cell_seed, "graph", t);
    let rep_graph = sample_gnp(&GnpParams::new(n as u32, p, graph_seed(0)));

    if spec.methods.certified && r > m {
        let s_cap = r - m;
        match largest_exact_ec2(&rep_graph, s_cap, spec.check_budget) {
            Ok((best, _truncated)) => {
                // sigma >= s + 1 needs s >= 1
                row.cert_lb = best.filter(|&s| s >= 1).map(|s| s + 1);
            }
            Err(e) => errs.push(format!("cert: {e}")),
        }
        // sampled evidence: largest s not refuted by sampling
        let mut evidence: Option<u32> = None;
        for s in 1..=s_cap.min(64) {
            let mode = CheckMode::Sampled {
                trials: spec.sampled_trials,
                seed: derive_seed(cell_seed, "evidence", s as u64),
            };
            match check_ec(&rep_graph, EcVariant::Ec, 2, s, 1, mode, spec.check_budget) {
                Ok(rep) if rep.verdict == PropVerdict::Inconclusive => evidence = Some(s),
                Ok(_) => break,
                Err(e) => {
                    errs.push(format!("evidence: {e}"));
                    break;
                }
            }
        }
        row.evidence_lb = evidence.map(|s| s + 1);
    }

    if spec.methods.exact {
        let cap = if m > r { 0 } else { (r - m + 1).min(n as u32) };
        let feasible = n <= crate::solver::MAX_N as u64
            && r + cap <= crate::solver::MAX_TOKENS
            && state_estimate(n as u32, r, cap) <= spec.solver_budget as u128;
        if feasible {
            match spy_number_exact(&rep_graph, r, m, spec.solver_budget) {
                Ok(sigma) => row.exact_sigma = Some(sigma),
                Err(e) => errs.push(format!("exact: {e}")),
            }
        }
    }

    if spec.methods.simulate {
        // spy-side: the three-team defense against the greedy offense
        match spy_team_parameters(n, p, spec.eps, r, m) {
            Ok(params) => {
                let s = params.total_spies();
                if (s as u64) < n {
                    let config = GameConfig::new(r, m, s, spec.horizon);
                    let mut survived = 0u32;
                    let mut failed = false;
                    for t in 0..spec.trials {
                        let g = sample_gnp(&GnpParams::new(n as u32, p, graph_seed(t as u64)));
                        let seed = derive_seed(cell_seed, "spy-game", t as u64);
                        let spy = make_spy_strategy(
                            &format!("three-teams:eps={},p={}", spec.eps, p),
                            &g,
                            &config,
                            seed,
                        );
                        let mut rev = match make_rev_strategy("greedy", &g, &config) {
                            Ok(r) => r,
                            Err(e) => {
                                errs.push(format!("simulate: {e}"));
                                failed = true;
                                break;
                            }
                        };
                        match spy {
                            Ok(mut spy) => {
                                let res = play(&g, &config, rev.as_mut(), spy.as_mut(), seed);
                                if res.verdict == GameVerdict::SpiesSurvived {
                                    survived += 1;
                                }
                            }
                            Err(e) => {
                                errs.push(format!("simulate: {e}"));
                                failed = true;
                                break;
                            }
                        }
                    }
                    if !failed {
                        row.spy_survival = Some(survived as f64 / spec.trials as f64);
                    }
                }
            }
            Err(e) => errs.push(format!("simulate: {e}")),
        }
        // rev-side: the growth offense at one spy below the certified bound
        if let Some(cert) = row.cert_lb {
            let s = cert - 1;
            let config = GameConfig::new(r, m, s, spec.horizon);
            let mut wins = 0u32;
            let mut played = 0u32;
            for t in 0..spec.trials {
                let g = sample_gnp(&GnpParams::new(n as u32, p, graph_seed(t as u64)));
                let seed = derive_seed(cell_seed, "rev-game", t as u64);
                let rev = make_rev_strategy("ec-growth:j=1", &g, &config);
                let spy = make_spy_strategy("follow", &g, &config, seed);
                if let (Ok(mut rev), Ok(mut spy)) = (rev, spy) {
                    played += 1;
                    let res = play(&g, &config, rev.as_mut(), spy.as_mut(), seed);
                    if res.verdict == GameVerdict::Revolutionaries {
                        wins += 1;
                    }
                }
            }
            if played > 0 {
                row.rev_win = Some(wins as f64 / played as f64);
            }
        }
    }

    if !errs.is_empty() {
        row.error = Some(errs.join("; "));
    }
    row
}

/// Fixed CSV header of a sweep table.
pub const SWEEP_HEADER: &str =
    "n,p,r,m,regime,prediction,cert_lb,evidence_lb,exact_sigma,spy_survival,rev_win,seed";

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

fn fmt_opt_u32(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render rows as the fixed-header CSV, bit-stable for fixed inputs.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.n,
            row.p,
            row.r,
            row.m,
            row.regime,
            fmt_opt_f64(row.prediction),
            fmt_opt_u32(row.cert_lb),
            fmt_opt_u32(row.evidence_lb),
            fmt_opt_u32(row.exact_sigma),
            fmt_opt_f64(row.spy_survival),
            fmt_opt_f64(row.rev_win),
            row.seed,
        ));
    }
    out
}
