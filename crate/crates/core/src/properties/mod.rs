//! Checkers for the graph properties the game analysis rests on: the
//! existentially-closed family, non-neighborhood intersection bounds, the
//! matching-set certificate, Hall matchings, common-neighbor caps and
//! neighborhood expansion.
//!
//! Every checker is a pure function of (graph, parameters, seed). Exact
//! modes enumerate and their verdicts are authoritative; sampled modes are
//! one-sided: a refutation carries a certificate, a pass is only ever
//! `inconclusive`.

mod bounds;
mod ec;
mod matching;

pub use bounds::{
    audit_expansion, check_common_neighbor_bound, check_nonneighborhood_bound,
    check_nonneighborhood_corollary, ExpansionReport,
};
pub use ec::{check_ec, find_witness, query_count, WitnessOracle};
pub use matching::{
    certify_matching_set, find_matching_set, hall_matching, matching_set_report,
    search_matching_set, search_matching_set_sized, staged_matching, MatchingSetSearch,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexSet;

/// Default cost budget for exact enumeration, in elementary adjacency tests.
/// A witness scan over sets of total size t costs t*n tests.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum PropertyError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("exact check refused: estimated cost {estimate} elementary adjacency tests exceeds budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u64 },
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// The four existentially-closed query shapes.
///
/// * `Ec`: some z outside A and B is at distance <= j from every vertex of A
///   and at distance >= j+1 from every vertex of B.
/// * `OneEc`: additionally anchored at a vertex v; z must be at distance
///   <= j from v and at distance <= j from *some* vertex of A.
///
/// `j = 1` reads "adjacent" / "non-adjacent".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EcVariant {
    Ec,
    OneEc,
    EcJ,
    OneEcJ,
}

impl EcVariant {
    pub fn anchored(self) -> bool {
        matches!(self, EcVariant::OneEc | EcVariant::OneEcJ)
    }

    pub fn distance_generalized(self) -> bool {
        matches!(self, EcVariant::EcJ | EcVariant::OneEcJ)
    }
}

/// A single witness query (v, A, B, j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcQuery {
    pub variant: EcVariant,
    pub v: Option<u32>,
    pub a: VertexSet,
    pub b: VertexSet,
    pub j: u32,
}

impl EcQuery {
    pub fn validate(&self, n: u32) -> Result<(), PropertyError> {
        let err = |msg: String| Err(PropertyError::InvalidQuery(msg));
        if self.a.is_empty() {
            return err("A must be nonempty (l >= 1)".into());
        }
        if self.j < 1 {
            return err("j must be >= 1".into());
        }
        if !self.variant.distance_generalized() && self.j != 1 {
            return err(format!("variant {:?} requires j = 1", self.variant));
        }
        match (self.variant.anchored(), self.v) {
            (true, None) => return err("anchored variant requires v".into()),
            (false, Some(_)) => return err("non-anchored variant must not carry v".into()),
            _ => {}
        }
        if !self.a.is_disjoint(&self.b) {
            return err("A and B intersect".into());
        }
        if let Some(v) = self.v {
            if self.a.contains(v) || self.b.contains(v) {
                return err("v must avoid A and B".into());
            }
            if v >= n {
                return err(format!("v = {v} out of range"));
            }
        }
        for x in self.a.iter().chain(self.b.iter()) {
            if x >= n {
                return err(format!("vertex {x} out of range"));
            }
        }
        Ok(())
    }
}

/// How a property was checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    Exact,
    Sampled { trials: u64, seed: u64 },
    CertifiedSufficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    RefutedBySample,
    Inconclusive,
}

/// Certificate attached to a failing verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    /// A query (v, A, B) admitting no witness vertex.
    EcQuery {
        v: Option<u32>,
        a: Vec<u32>,
        b: Vec<u32>,
    },
    /// A vertex set violating a set-intersection bound.
    Set { s: Vec<u32>, value: f64 },
    /// A vertex pair violating a pairwise cap.
    Pair { u: u32, w: u32, value: u64 },
}

/// Counters and measurements accumulated by a check.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckStats {
    /// Queries (or sets, or pairs) actually evaluated.
    pub queries: u64,
    /// Largest measured quantity, when the property bounds one
    /// (e.g. the maximum non-neighborhood intersection seen).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_observed: Option<f64>,
    /// True when the bound held for lack of anything to check.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub vacuous: bool,
}

/// Outcome of a property check, serializable with fixed field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub mode: CheckMode,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub stats: CheckStats,
}

impl PropertyReport {
    pub(crate) fn new(
        property: String,
        mode: CheckMode,
        verdict: Verdict,
        witness: Option<Witness>,
        stats: CheckStats,
    ) -> Self {
        debug_assert!(
            !matches!(verdict, Verdict::Fails | Verdict::RefutedBySample) || witness.is_some(),
            "failing verdicts must carry a witness"
        );
        debug_assert!(
            !matches!(mode, CheckMode::Exact) || matches!(verdict, Verdict::Holds | Verdict::Fails),
            "exact mode decides"
        );
        PropertyReport {
            property,
            mode,
            verdict,
            witness,
            stats,
        }
    }
}
