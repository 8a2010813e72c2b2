//! Playable strategies: the three-team spy defense and the witness-growth
//! revolutionary offenses, plus the trivial baselines both are measured
//! against.
//!
//! Strategy objects hold per-game mutable state and are built per game via
//! [`make_rev_strategy`] / [`make_spy_strategy`] or the specific
//! constructors.

mod rev;
mod spy;

pub use rev::{GreedyRally, GrowthStrategy, RandomWalkRev};
pub use spy::{FollowStrategy, RandomWalkSpy, StationarySpy, ThreeTeams};

use thiserror::Error;

use crate::game::{GameConfig, RevStrategy, SpyStrategy};
use crate::graph::{ell_n, Graph};

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("unknown strategy '{0}'")]
    Unknown(String),
    #[error("bad strategy parameter: {0}")]
    BadParameter(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Density exponent estimate: eta = -ln p / ln n, clamped to \[0,1\].
pub fn estimate_eta(n: u64, p: f64) -> Result<f64, StrategyError> {
    if !(p > 0.0 && p < 1.0) || n < 2 {
        return Err(StrategyError::BadParameter(format!(
            "eta estimate needs 0 < p < 1 and n >= 2 (got n = {n}, p = {p})"
        )));
    }
    Ok((-p.ln() / (n as f64).ln()).clamp(0.0, 1.0))
}

/// The constants behind the three-team spy strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpyTeamParams {
    pub eta: f64,
    pub eps: f64,
    /// delta = (1 - eta + sqrt(eta^2 + 2 eta + 5)) / 2
    pub delta: f64,
    /// gamma = 1 + eta + delta + eps
    pub gamma: f64,
    pub elln: f64,
    /// each super-team holds ceil(gamma * L_n) spies
    pub team_size: u32,
    /// floor(r/m) regular spies
    pub regular_size: u32,
}

impl SpyTeamParams {
    /// Derive from an explicit exponent (useful at the exact endpoints
    /// eta = 0 and eta = 1, which no finite (n,p) attains).
    pub fn from_eta(eta: f64, eps: f64, elln: f64, r: u32, m: u32) -> Result<Self, StrategyError> {
        if eps <= 0.0 {
            return Err(StrategyError::BadParameter("eps must be positive".into()));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(StrategyError::BadParameter("eta must lie in [0,1]".into()));
        }
        let delta = (1.0 - eta + (eta * eta + 2.0 * eta + 5.0).sqrt()) / 2.0;
        let gamma = 1.0 + eta + delta + eps;
        Ok(SpyTeamParams {
            eta,
            eps,
            delta,
            gamma,
            elln,
            team_size: (gamma * elln).ceil() as u32,
            regular_size: r / m,
        })
    }

    pub fn total_spies(&self) -> u32 {
        self.regular_size + 2 * self.team_size
    }
}

/// Derive the spy-team constants from concrete (n, p).
pub fn spy_team_parameters(
    n: u64,
    p: f64,
    eps: f64,
    r: u32,
    m: u32,
) -> Result<SpyTeamParams, StrategyError> {
    let eta = estimate_eta(n, p)?;
    let elln = ell_n(n, p).map_err(|e| StrategyError::BadParameter(e.to_string()))?;
    SpyTeamParams::from_eta(eta, eps, elln, r, m)
}

type KeyValues<'a> = Vec<(&'a str, &'a str)>;

fn parse_params(spec: &str) -> Result<(&str, KeyValues<'_>), StrategyError> {
    match spec.split_once(':') {
        None => Ok((spec, Vec::new())),
        Some((name, rest)) => {
            let mut kv = Vec::new();
            for part in rest.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(|| {
                    StrategyError::BadParameter(format!("expected key=value, got '{part}'"))
                })?;
                kv.push((k.trim(), v.trim()));
            }
            Ok((name, kv))
        }
    }
}

fn get_num<T: std::str::FromStr>(
    kv: &[(&str, &str)],
    key: &str,
    default: T,
) -> Result<T, StrategyError> {
    match kv.iter().find(|(k, _)| *k == key) {
        None => Ok(default),
        Some((_, v)) => v
            .parse()
            .map_err(|_| StrategyError::BadParameter(format!("cannot parse {key}='{v}'"))),
    }
}

/// Build a revolutionary strategy from its CLI spelling, e.g.
/// `ec-growth:j=1`, `one-ec:l=2,j=1`, `greedy`, `random`.
pub fn make_rev_strategy(
    spec: &str,
    g: &Graph,
    config: &GameConfig,
) -> Result<Box<dyn RevStrategy>, StrategyError> {
    let (name, kv) = parse_params(spec)?;
    match name {
        "ec-growth" => {
            let j = get_num(&kv, "j", 1u32)?;
            Ok(Box::new(GrowthStrategy::pair_growth(g, config, j)?))
        }
        "one-ec" => {
            let l = get_num(&kv, "l", 1u32)?;
            let j = get_num(&kv, "j", 1u32)?;
            Ok(Box::new(GrowthStrategy::anchored_growth(g, config, l, j)?))
        }
        "greedy" => Ok(Box::new(GreedyRally::new(g))),
        "random" => Ok(Box::new(RandomWalkRev)),
        other => Err(StrategyError::Unknown(other.to_string())),
    }
}

/// The spy baselines, i.e. every spy strategy other than the three-team
/// defense (whose spy-count precondition excludes small-s play).
pub const SPY_BASELINES: [&str; 3] = ["follow", "stationary", "random"];

/// The revolutionary baselines.
pub const REV_BASELINES: [&str; 2] = ["greedy", "random"];

/// Build a spy strategy from its CLI spelling, e.g. `three-teams:eps=0.1`,
/// `follow`, `stationary`, `random`.
pub fn make_spy_strategy(
    spec: &str,
    g: &Graph,
    config: &GameConfig,
    seed: u64,
) -> Result<Box<dyn SpyStrategy>, StrategyError> {
    let (name, kv) = parse_params(spec)?;
    match name {
        "three-teams" => {
            let eps = get_num(&kv, "eps", 0.1f64)?;
            let density = 2.0 * g.edge_count() as f64 / (g.n() as f64 * (g.n() as f64 - 1.0));
            let p = get_num(&kv, "p", density)?;
            let params = spy_team_parameters(g.n() as u64, p, eps, config.r, config.m)?;
            Ok(Box::new(ThreeTeams::new(g, config, &params, seed)?))
        }
        "follow" => Ok(Box::new(FollowStrategy::default())),
        "stationary" => Ok(Box::new(StationarySpy)),
        "random" => Ok(Box::new(RandomWalkSpy)),
        other => Err(StrategyError::Unknown(other.to_string())),
    }
}
