//! Browser-facing wrappers: JSON in, JSON out, no panics across the
//! boundary. The page in `www/` renders the results; all game and graph
//! logic stays in the core crate.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

use revspy::experiments::classify_regime;
use revspy::game::{play, GameConfig, Trace};
use revspy::graph::{sample_gnp, GnpParams, Graph};
use revspy::solver::{solve, state_estimate, Winner};
use revspy::strategies::{make_rev_strategy, make_spy_strategy};

#[derive(Serialize)]
struct GraphOut {
    n: u32,
    edges: Vec<(u32, u32)>,
}

impl GraphOut {
    fn from(g: &Graph) -> Self {
        let mut edges = Vec::with_capacity(g.edge_count() as usize);
        for u in 0..g.n() {
            for &v in g.neighbors(u) {
                if v > u {
                    edges.push((u, v));
                }
            }
        }
        GraphOut { n: g.n(), edges }
    }
}

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

#[derive(Deserialize)]
struct PlayInput {
    n: u32,
    p: f64,
    seed: u64,
    r: u32,
    m: u32,
    s: u32,
    rev: String,
    spy: String,
    horizon: u32,
}

#[derive(Serialize)]
struct PlayOutput {
    graph: GraphOut,
    trace: Trace,
}

fn play_inner(input: &str) -> Result<String, String> {
    let req: PlayInput = serde_json::from_str(input).map_err(|e| e.to_string())?;
    if req.n == 0 || req.n > 2000 {
        return Err("demo supports 1 <= n <= 2000".into());
    }
    if !(0.0..=1.0).contains(&req.p) {
        return Err("p must lie in [0,1]".into());
    }
    if req.r < 1 || req.m < 1 || req.horizon < 1 || req.horizon > 2000 {
        return Err("need r >= 1, m >= 1, 1 <= horizon <= 2000".into());
    }
    let g = sample_gnp(&GnpParams::new(req.n, req.p, req.seed));
    let config = GameConfig::new(req.r, req.m, req.s, req.horizon);
    let mut rev = make_rev_strategy(&req.rev, &g, &config).map_err(|e| e.to_string())?;
    let spy_spec = if req.spy == "three-teams" {
        // the demo knows the sampling p; pass it through
        format!("three-teams:eps=0.1,p={}", req.p)
    } else {
        req.spy.clone()
    };
    let mut spy = make_spy_strategy(&spy_spec, &g, &config, req.seed).map_err(|e| e.to_string())?;
    let result = play(&g, &config, rev.as_mut(), spy.as_mut(), req.seed);
    serde_json::to_string(&PlayOutput {
        graph: GraphOut::from(&g),
        trace: result.trace,
    })
    .map_err(|e| e.to_string())
}

/// Sample a graph, play one game, return `{graph, trace}`.
#[wasm_bindgen]
pub fn demo_play(input: &str) -> String {
    play_inner(input).unwrap_or_else(err_json)
}

#[derive(Deserialize)]
struct ClassifyInput {
    n: u64,
    p: f64,
    r: u32,
    m: u32,
    omega: Option<f64>,
}

fn classify_inner(input: &str) -> Result<String, String> {
    let req: ClassifyInput = serde_json::from_str(input).map_err(|e| e.to_string())?;
    let pred = classify_regime(req.n, req.p, req.r, req.m, req.omega).map_err(|e| e.to_string())?;
    serde_json::to_string(&pred).map_err(|e| e.to_string())
}

/// Classify a parameter tuple; returns the regime label, the fired rule and
/// the numeric prediction.
#[wasm_bindgen]
pub fn demo_classify(input: &str) -> String {
    classify_inner(input).unwrap_or_else(err_json)
}

#[derive(Deserialize)]
struct SolveInput {
    n: u32,
    p: f64,
    seed: u64,
    r: u32,
    m: u32,
}

#[derive(Serialize)]
struct SolveOutput {
    graph: GraphOut,
    sigma: u32,
    /// winner per spy count, 0..=sigma
    per_s: Vec<PerS>,
    states: u64,
}

#[derive(Serialize)]
struct PerS {
    s: u32,
    winner: &'static str,
}

fn solve_inner(input: &str) -> Result<String, String> {
    let req: SolveInput = serde_json::from_str(input).map_err(|e| e.to_string())?;
    if req.n > 8 || req.r > 5 {
        return Err("demo solver is capped at n <= 8, r <= 5".into());
    }
    if req.r < 1 || req.m < 1 {
        return Err("need r >= 1 and m >= 1".into());
    }
    let cap = if req.m > req.r {
        0
    } else {
        (req.r - req.m + 1).min(req.n)
    };
    if state_estimate(req.n, req.r, cap) > 2_000_000 {
        return Err("instance too large for the in-browser solver".into());
    }
    let g = sample_gnp(&GnpParams::new(req.n, req.p, req.seed));
    let mut per_s = Vec::new();
    let mut sigma = cap;
    let mut states = 0;
    for s in 0..=cap {
        let solved = solve(&g, req.r, req.m, s, 2_000_000).map_err(|e| e.to_string())?;
        states = states.max(solved.states);
        let name = match solved.winner {
            Winner::Revolutionaries => "revolutionaries",
            Winner::Spies => "spies",
        };
        per_s.push(PerS { s, winner: name });
        if solved.winner == Winner::Spies {
            sigma = s;
            break;
        }
    }
    serde_json::to_string(&SolveOutput {
        graph: GraphOut::from(&g),
        sigma,
        per_s,
        states,
    })
    .map_err(|e| e.to_string())
}

/// Exact spy number of a tiny sampled instance, with the per-s verdicts.
#[wasm_bindgen]
pub fn demo_solve(input: &str) -> String {
    solve_inner(input).unwrap_or_else(err_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn play_round_trips_json() {
        let out = demo_play(
            r#"{"n":40,"p":0.5,"seed":3,"r":6,"m":3,"s":2,"rev":"ec-growth:j=1","spy":"random","horizon":40}"#,
        );
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["graph"]["n"], 40);
        assert!(v["trace"]["rounds"].as_array().unwrap().len() >= 2);
    }

    #[test]
    fn play_rejects_oversized_requests() {
        let out = demo_play(
            r#"{"n":99999,"p":0.5,"seed":1,"r":2,"m":2,"s":0,"rev":"greedy","spy":"follow","horizon":10}"#,
        );
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn classify_matches_core() {
        let out = demo_classify(r#"{"n":10000,"p":0.5,"r":12,"m":10}"#);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["regime"], "r-m+1");
        assert_eq!(v["prediction"], 3.0);
    }

    #[test]
    fn solve_tiny_instance() {
        let out = demo_solve(r#"{"n":5,"p":0.6,"seed":2,"r":3,"m":2}"#);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        let sigma = v["sigma"].as_u64().unwrap();
        assert!(sigma <= 2);
        assert_eq!(
            v["per_s"].as_array().unwrap().len() as u64,
            sigma + 1,
            "one verdict per scanned spy count"
        );
    }
}
