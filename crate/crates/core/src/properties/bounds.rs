//! Set-intersection, common-neighbor and expansion bounds.

use rayon::prelude::*;

use crate::graph::{ell_n, Graph, VertexSet};
use crate::rng::SplitMix64;

use super::{CheckMode, CheckStats, PropertyError, PropertyReport, Verdict, Witness};

/// Size of the intersection of the non-neighborhoods of S. Every vertex of
/// the intersection is outside the closed 1-ball of every member, so the
/// count is n - |N[S,1]|.
fn nonneighborhood_intersection(g: &Graph, s: &VertexSet) -> u64 {
    let ball = g.ball(s, 1).expect("validated set");
    g.n() as u64 - ball.len() as u64
}

/// Check that every vertex set of cardinality ceil(beta * L_n) has
/// non-neighborhood intersection at most alpha * beta * L_n.
///
/// Adversarial set sizes round up. When the required size exceeds n the
/// bound holds vacuously and the report is flagged. The measured maximum
/// intersection is always reported alongside the verdict.
pub fn check_nonneighborhood_bound(
    g: &Graph,
    p: f64,
    beta: f64,
    alpha: f64,
    mode: CheckMode,
    budget: u64,
) -> Result<PropertyReport, PropertyError> {
    if beta <= 0.0 || alpha <= 0.0 {
        return Err(PropertyError::Domain("need alpha > 0 and beta > 0".into()));
    }
    let elln = ell_n(g.n() as u64, p)?;
    let size = (beta * elln).ceil() as u64;
    if size < 1 {
        return Err(PropertyError::Domain("set size must be >= 1".into()));
    }
    let bound = alpha * beta * elln;
    let name = format!("nonneighborhood-intersection(beta={beta},alpha={alpha},p={p},size={size})");
    if size > g.n() as u64 {
        return Ok(PropertyReport::new(
            name,
            mode,
            Verdict::Holds,
            None,
            CheckStats {
                queries: 0,
                max_observed: None,
                vacuous: true,
            },
        ));
    }
    let size = size as usize;
    match mode {
        CheckMode::Exact => {
            let count = super::ec::query_count(g.n(), super::EcVariant::Ec, size as u32, 0);
            let estimate = count.saturating_mul(g.n() as u128);
            if estimate > budget as u128 {
                return Err(PropertyError::BudgetExceeded { estimate, budget });
            }
            let mut idx: Vec<u32> = (0..size as u32).collect();
            let n = g.n();
            let mut queries = 0u64;
            let mut max_seen = 0u64;
            loop {
                let s = VertexSet::from_sorted(idx.clone()).unwrap();
                let val = nonneighborhood_intersection(g, &s);
                queries += 1;
                max_seen = max_seen.max(val);
                if val as f64 > bound {
                    return Ok(PropertyReport::new(
                        name,
                        mode,
                        Verdict::Fails,
                        Some(Witness::Set {
                            s: s.into_vec(),
                            value: val as f64,
                        }),
                        CheckStats {
                            queries,
                            max_observed: Some(max_seen as f64),
                            vacuous: false,
                        },
                    ));
                }
                // next lexicographic size-subset of 0..n
                let mut i = size;
                loop {
                    if i == 0 {
                        return Ok(PropertyReport::new(
                            name,
                            mode,
                            Verdict::Holds,
                            None,
                            CheckStats {
                                queries,
                                max_observed: Some(max_seen as f64),
                                vacuous: false,
                            },
                        ));
                    }
                    i -= 1;
                    if idx[i] != i as u32 + n - size as u32 {
                        idx[i] += 1;
                        for col in i + 1..size {
                            idx[col] = idx[col - 1] + 1;
                        }
                        break;
                    }
                }
            }
        }
        CheckMode::Sampled { trials, seed } => {
            let results: Vec<(u64, Vec<u32>, u64)> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = SplitMix64::new(seed.wrapping_add(trial));
                    let s: Vec<u32> = rng
                        .distinct_sorted(g.n() as u64, size)
                        .into_iter()
                        .map(|x| x as u32)
                        .collect();
                    let val = nonneighborhood_intersection(
                        g,
                        &VertexSet::from_sorted(s.clone()).unwrap(),
                    );
                    (trial, s, val)
                })
                .collect();
            let max_seen = results.iter().map(|r| r.2).max().unwrap_or(0);
            let refuted = results
                .iter()
                .filter(|r| r.2 as f64 > bound)
                .min_by_key(|r| r.0);
            let stats = CheckStats {
                queries: trials,
                max_observed: Some(max_seen as f64),
                vacuous: false,
            };
            Ok(match refuted {
                Some((_, s, val)) => PropertyReport::new(
                    name,
                    mode,
                    Verdict::RefutedBySample,
                    Some(Witness::Set {
                        s: s.clone(),
                        value: *val as f64,
                    }),
                    stats,
                ),
                None => PropertyReport::new(name, mode, Verdict::Inconclusive, None, stats),
            })
        }
        CheckMode::CertifiedSufficient => Err(PropertyError::Domain(
            "certified-sufficient mode does not apply here".into(),
        )),
    }
}

/// Specialization with alpha = (1+eps)/(beta-1), so the bound reads
/// (1+eps) * beta/(beta-1) * L_n.
pub fn check_nonneighborhood_corollary(
    g: &Graph,
    p: f64,
    beta: f64,
    eps: f64,
    mode: CheckMode,
    budget: u64,
) -> Result<PropertyReport, PropertyError> {
    if beta <= 1.0 {
        return Err(PropertyError::Domain(
            "corollary form needs beta > 1".into(),
        ));
    }
    check_nonneighborhood_bound(g, p, beta, (1.0 + eps) / (beta - 1.0), mode, budget)
}

/// Exact scan of |S(u,1) ∩ N(w,1)| over all vertex pairs u != w, verdict
/// against `cap`, plus the global maximum. A violation at cap = c-1 is
/// exactly a K_{2,c} subgraph witness when u and w are non-adjacent.
pub fn check_common_neighbor_bound(g: &Graph, cap: u64) -> Result<PropertyReport, PropertyError> {
    if cap < 1 {
        return Err(PropertyError::Domain("cap must be >= 1".into()));
    }
    let name = format!("common-neighbor-cap(cap={cap})");
    let mut max_seen = 0u64;
    let mut first_violation: Option<(u32, u32, u64)> = None;
    let mut queries = 0u64;
    let bits = g.bitset();
    for u in 0..g.n() {
        for w in u + 1..g.n() {
            queries += 1;
            // |N(u) ∩ (N(w) ∪ {w})| = common neighbors + [u ~ w]
            let common = match bits {
                Some(b) => {
                    let (ru, rw) = (b.row(u), b.row(w));
                    let mut c = 0u64;
                    for (x, y) in ru.iter().zip(rw) {
                        c += (x & y).count_ones() as u64;
                    }
                    c + u64::from(b.has(u, w))
                }
                None => {
                    let (mut i, mut jj, mut c) = (0usize, 0usize, 0u64);
                    let (nu, nw) = (g.neighbors(u), g.neighbors(w));
                    while i < nu.len() && jj < nw.len() {
                        match nu[i].cmp(&nw[jj]) {
                            std::cmp::Ordering::Less => i += 1,
                            std::cmp::Ordering::Greater => jj += 1,
                            std::cmp::Ordering::Equal => {
                                c += 1;
                                i += 1;
                                jj += 1;
                            }
                        }
                    }
                    c + u64::from(nu.binary_search(&w).is_ok())
                }
            };
            if common > max_seen {
                max_seen = common;
            }
            if common > cap && first_violation.is_none() {
                first_violation = Some((u, w, common));
            }
        }
    }
    let stats = CheckStats {
        queries,
        max_observed: Some(max_seen as f64),
        vacuous: false,
    };
    Ok(match first_violation {
        Some((u, w, value)) => PropertyReport::new(
            name,
            CheckMode::Exact,
            Verdict::Fails,
            Some(Witness::Pair { u, w, value }),
            stats,
        ),
        None => PropertyReport::new(name, CheckMode::Exact, Verdict::Holds, None, stats),
    })
}

/// Outcome of one expansion audit.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExpansionReport {
    /// |N\[S,i\]|
    pub ball_size: u64,
    /// s * d^i, the predicted size
    pub expected: f64,
    /// ball_size / expected
    pub ratio: f64,
    /// |ratio - 1| <= tol
    pub within_tol: bool,
    /// s * d^i < n / ln n; outside this regime no verdict is asserted
    pub in_regime: bool,
    /// within_tol when in_regime, None otherwise
    pub verdict: Option<bool>,
    /// |N(x,i) minus N\[S,i\]| and its d^i/2 threshold, when x was supplied
    pub escape: Option<EscapeReport>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EscapeReport {
    pub x: u32,
    pub count: u64,
    pub threshold: f64,
    pub pass: bool,
}

/// Measure |N\[S,i\]| against (1 +- tol) * s * d^i, and optionally the part of
/// N(x,i) escaping N\[S,i\] against d^i / 2.
///
/// `d` defaults to the mean degree 2m/n when not supplied.
pub fn audit_expansion(
    g: &Graph,
    s: &VertexSet,
    i: u32,
    tol: f64,
    d: Option<f64>,
    x: Option<u32>,
) -> Result<ExpansionReport, PropertyError> {
    if i < 1 {
        return Err(PropertyError::Domain("radius i must be >= 1".into()));
    }
    let d = d.unwrap_or_else(|| g.mean_degree());
    if d <= 0.0 {
        return Err(PropertyError::Domain(
            "degree scale d must be positive".into(),
        ));
    }
    let ball = g.ball(s, i)?;
    let expected = s.len() as f64 * d.powi(i as i32);
    let ratio = ball.len() as f64 / expected;
    let within_tol = (ratio - 1.0).abs() <= tol;
    let n = g.n() as f64;
    let in_regime = expected < n / n.ln();
    let escape = match x {
        Some(x) => {
            let xball = g.ball(&VertexSet::singleton(x), i)?;
            let count = xball.iter().filter(|&z| !ball.contains(z)).count() as u64;
            let threshold = d.powi(i as i32) / 2.0;
            Some(EscapeReport {
                x,
                count,
                threshold,
                pass: count as f64 >= threshold,
            })
        }
        None => None,
    };
    Ok(ExpansionReport {
        ball_size: ball.len() as u64,
        expected,
        ratio,
        within_tol,
        in_regime,
        verdict: if in_regime { Some(within_tol) } else { None },
        escape,
    })
}
