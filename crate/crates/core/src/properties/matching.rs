//! Hall matchings between vertex sets and the certified matching-set search.

use crate::graph::{ell_n, Graph, VertexSet};
use crate::rng::{derive_seed, SplitMix64};

use super::PropertyError;

/// Maximum matching from T into S using only edges of g, by augmenting
/// paths, processed in ascending order of T and of adjacency. Returns the
/// matching as (t, s) pairs sorted by t iff it saturates T, else None.
pub fn hall_matching(g: &Graph, t: &VertexSet, s: &VertexSet) -> Option<Vec<(u32, u32)>> {
    if !t.is_disjoint(s) {
        return None;
    }
    let t_verts: Vec<u32> = t.iter().collect();
    let s_verts: Vec<u32> = s.iter().collect();
    let mut matching = vec![usize::MAX; t_verts.len()];
    let size = run_augment(g, &t_verts, &s_verts, &mut matching, s_verts.len());
    if size < t_verts.len() {
        return None;
    }
    Some(collect_pairs(&t_verts, &s_verts, &matching))
}

/// Two-stage matching used by the spy dispatcher: saturate T preferring
/// sources in `primary`, then augment with `secondary` sources. Returns the
/// pairs for whatever maximum was reached plus the list of unmatched T
/// vertices (empty on success).
pub fn staged_matching(
    g: &Graph,
    t: &[u32],
    primary: &[u32],
    secondary: &[u32],
) -> (Vec<(u32, u32)>, Vec<u32>) {
    let mut s_all: Vec<u32> = primary.to_vec();
    s_all.extend_from_slice(secondary);
    let mut matching = vec![usize::MAX; t.len()];
    // stage 1: only primary columns are usable
    run_augment(g, t, &s_all, &mut matching, primary.len());
    // stage 2: all columns
    run_augment(g, t, &s_all, &mut matching, s_all.len());
    let pairs = collect_pairs(t, &s_all, &matching);
    let matched: std::collections::HashSet<u32> = pairs.iter().map(|&(tv, _)| tv).collect();
    let unmatched: Vec<u32> = t
        .iter()
        .copied()
        .filter(|tv| !matched.contains(tv))
        .collect();
    (pairs, unmatched)
}

/// Kuhn's augmenting-path pass over rows t against the first `usable_cols`
/// columns of s; matching[i] = column index matched to t[i] or usize::MAX.
fn run_augment(
    g: &Graph,
    t: &[u32],
    s: &[u32],
    matching: &mut [usize],
    usable_cols: usize,
) -> usize {
    // col_owner[c] = row index matched to column c
    let mut col_owner = vec![usize::MAX; s.len()];
    for (row, &c) in matching.iter().enumerate() {
        if c != usize::MAX {
            col_owner[c] = row;
        }
    }
    let col_index: std::collections::HashMap<u32, usize> = s
        .iter()
        .enumerate()
        .take(usable_cols)
        .map(|(i, &v)| (v, i))
        .collect();
    fn try_augment(
        g: &Graph,
        t: &[u32],
        row: usize,
        col_index: &std::collections::HashMap<u32, usize>,
        visited: &mut [bool],
        matching: &mut [usize],
        col_owner: &mut [usize],
    ) -> bool {
        for &nb in g.neighbors(t[row]) {
            if let Some(&c) = col_index.get(&nb) {
                if visited[c] {
                    continue;
                }
                visited[c] = true;
                let owner = col_owner[c];
                if owner == usize::MAX
                    || try_augment(g, t, owner, col_index, visited, matching, col_owner)
                {
                    matching[row] = c;
                    col_owner[c] = row;
                    return true;
                }
            }
        }
        false
    }
    for row in 0..t.len() {
        if matching[row] == usize::MAX {
            let mut visited = vec![false; s.len()];
            try_augment(
                g,
                t,
                row,
                &col_index,
                &mut visited,
                matching,
                &mut col_owner,
            );
        }
    }
    matching.iter().filter(|&&c| c != usize::MAX).count()
}

fn collect_pairs(t: &[u32], s: &[u32], matching: &[usize]) -> Vec<(u32, u32)> {
    let mut pairs: Vec<(u32, u32)> = matching
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != usize::MAX)
        .map(|(row, &c)| (t[row], s[c]))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// True iff every vertex outside `s` has at least `threshold` neighbors in
/// `s`. This single-vertex domination condition implies Hall's condition
/// for every outside set T with |T| <= threshold.
pub fn certify_matching_set(g: &Graph, s: &VertexSet, threshold: usize) -> (bool, usize) {
    let mut min_deg = usize::MAX;
    for v in 0..g.n() {
        if s.contains(v) {
            continue;
        }
        let deg_into = g.neighbors(v).iter().filter(|&&u| s.contains(u)).count();
        min_deg = min_deg.min(deg_into);
        if min_deg == 0 {
            // cannot get worse; keep scanning is pointless for the minimum
            break;
        }
    }
    if min_deg == usize::MAX {
        min_deg = 0; // no outside vertex
        return (true, min_deg);
    }
    (min_deg >= threshold, min_deg)
}

/// Result of a randomized matching-set search: the best candidate over all
/// attempts, certified or not.
#[derive(Debug, Clone)]
pub struct MatchingSetSearch {
    pub set: VertexSet,
    pub min_outside_degree: usize,
    pub required: usize,
    pub certified: bool,
    pub attempts: u32,
}

/// Search random sets of the given size for one certifying min-S-degree >=
/// threshold; keeps the best candidate seen.
pub fn search_matching_set_sized(
    g: &Graph,
    size: usize,
    threshold: usize,
    seed: u64,
    retries: u32,
) -> Result<MatchingSetSearch, PropertyError> {
    if size == 0 || size > g.n() as usize {
        return Err(PropertyError::Domain(format!(
            "matching set size {size} out of range for n = {}",
            g.n()
        )));
    }
    let mut best: Option<MatchingSetSearch> = None;
    for attempt in 0..retries.max(1) {
        let mut rng = SplitMix64::new(derive_seed(seed, "matching-set", attempt as u64));
        let s = VertexSet::from_sorted(
            rng.distinct_sorted(g.n() as u64, size)
                .into_iter()
                .map(|x| x as u32)
                .collect(),
        )
        .unwrap();
        let (certified, min_deg) = certify_matching_set(g, &s, threshold);
        let cand = MatchingSetSearch {
            set: s,
            min_outside_degree: min_deg,
            required: threshold,
            certified,
            attempts: attempt + 1,
        };
        if certified {
            return Ok(cand);
        }
        if best
            .as_ref()
            .map(|b| cand.min_outside_degree > b.min_outside_degree)
            .unwrap_or(true)
        {
            best = Some(cand);
        }
    }
    let mut best = best.unwrap();
    best.attempts = retries.max(1);
    Ok(best)
}

/// L_n-parameterized search: set size ceil(gamma * L_n), certificate
/// threshold ceil(delta * L_n).
pub fn search_matching_set(
    g: &Graph,
    p: f64,
    gamma: f64,
    delta: f64,
    seed: u64,
    retries: u32,
) -> Result<MatchingSetSearch, PropertyError> {
    if !(gamma > delta && delta > 0.0) {
        return Err(PropertyError::Domain("need gamma > delta > 0".into()));
    }
    let elln = ell_n(g.n() as u64, p)?;
    let size = (gamma * elln).ceil() as usize;
    let threshold = (delta * elln).ceil() as usize;
    if size > g.n() as usize {
        return Err(PropertyError::Domain(format!(
            "gamma * L_n = {size} exceeds n = {}",
            g.n()
        )));
    }
    search_matching_set_sized(g, size, threshold, seed, retries)
}

/// The certified matching set, or None when no attempt certified.
pub fn find_matching_set(
    g: &Graph,
    p: f64,
    gamma: f64,
    delta: f64,
    seed: u64,
    retries: u32,
) -> Result<Option<VertexSet>, PropertyError> {
    let search = search_matching_set(g, p, gamma, delta, seed, retries)?;
    Ok(search.certified.then_some(search.set))
}

/// The matching-set search as a report. Certification is a sufficient
/// condition, so a success is `holds` under the certified-sufficient mode
/// while exhausted retries are only `inconclusive` (the set may still have
/// the matching property).
pub fn matching_set_report(
    g: &Graph,
    p: f64,
    gamma: f64,
    delta: f64,
    seed: u64,
    retries: u32,
) -> Result<super::PropertyReport, PropertyError> {
    use super::{CheckMode, CheckStats, PropertyReport, Verdict, Witness};
    let search = search_matching_set(g, p, gamma, delta, seed, retries)?;
    let name = format!(
        "matching-set(gamma={gamma},delta={delta},p={p},size={},threshold={})",
        search.set.len(),
        search.required
    );
    let stats = CheckStats {
        queries: search.attempts as u64,
        max_observed: Some(search.min_outside_degree as f64),
        vacuous: false,
    };
    Ok(if search.certified {
        PropertyReport::new(
            name,
            CheckMode::CertifiedSufficient,
            Verdict::Holds,
            Some(Witness::Set {
                s: search.set.into_vec(),
                value: search.min_outside_degree as f64,
            }),
            stats,
        )
    } else {
        PropertyReport::new(
            name,
            CheckMode::CertifiedSufficient,
            Verdict::Inconclusive,
            None,
            stats,
        )
    })
}
