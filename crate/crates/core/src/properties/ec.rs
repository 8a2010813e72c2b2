//! Existentially-closed witness search and whole-property checks.

use rayon::prelude::*;

use crate::graph::{Graph, VertexSet};
use crate::rng::SplitMix64;

use super::{
    CheckMode, CheckStats, EcQuery, EcVariant, PropertyError, PropertyReport, Verdict, Witness,
};

/// Reusable witness oracle for a fixed graph and radius.
///
/// For graphs small enough to carry a bitset index it precomputes the closed
/// ball of radius j around every vertex as a bit row, making a witness scan
/// a handful of word operations per 64 candidates. Larger graphs fall back
/// to per-query BFS marking.
pub struct WitnessOracle<'g> {
    g: &'g Graph,
    j: u32,
    words: usize,
    balls: Option<Vec<u64>>,
}

impl<'g> WitnessOracle<'g> {
    pub fn new(g: &'g Graph, j: u32) -> Self {
        assert!(j >= 1);
        let n = g.n() as usize;
        let words = n.div_ceil(64);
        let balls = if n <= crate::graph::BITSET_MAX_N {
            let mut rows = vec![0u64; words * n];
            if j == 1 {
                let bits = g.bitset().expect("bitset available for small graphs");
                for v in 0..n {
                    let row = &mut rows[v * words..(v + 1) * words];
                    row.copy_from_slice(bits.row(v as u32));
                    row[v >> 6] |= 1u64 << (v & 63);
                }
            } else {
                let mut dist = vec![u32::MAX; n];
                let mut queue = std::collections::VecDeque::new();
                for v in 0..n {
                    dist.fill(u32::MAX);
                    dist[v] = 0;
                    queue.push_back(v as u32);
                    let row_base = v * words;
                    rows[row_base + (v >> 6)] |= 1u64 << (v & 63);
                    while let Some(u) = queue.pop_front() {
                        let du = dist[u as usize];
                        if du == j {
                            continue;
                        }
                        for &w in g.neighbors(u) {
                            if dist[w as usize] == u32::MAX {
                                dist[w as usize] = du + 1;
                                rows[row_base + (w as usize >> 6)] |= 1u64 << (w & 63);
                                queue.push_back(w);
                            }
                        }
                    }
                }
            }
            Some(rows)
        } else {
            None
        };
        WitnessOracle { g, j, words, balls }
    }

    #[inline]
    fn ball_row(&self, v: u32) -> &[u64] {
        let rows = self.balls.as_ref().unwrap();
        let base = v as usize * self.words;
        &rows[base..base + self.words]
    }

    /// Lowest-id vertex z satisfying the variant conditions, or None.
    pub fn find(&self, variant: EcVariant, v: Option<u32>, a: &[u32], b: &[u32]) -> Option<u32> {
        if self.balls.is_some() {
            self.find_bitset(variant, v, a, b)
        } else {
            self.find_bfs(variant, v, a, b)
        }
    }

    fn find_bitset(&self, variant: EcVariant, v: Option<u32>, a: &[u32], b: &[u32]) -> Option<u32> {
        let words = self.words;
        let mut acc = vec![0u64; words];
        if variant.anchored() {
            // z within distance j of some vertex of A ...
            for &x in a {
                let row = self.ball_row(x);
                for (w, r) in acc.iter_mut().zip(row) {
                    *w |= r;
                }
            }
            // ... and within distance j of v.
            let row = self.ball_row(v.expect("anchored query carries v"));
            for (w, r) in acc.iter_mut().zip(row) {
                *w &= r;
            }
        } else {
            // z within distance j of every vertex of A.
            acc.copy_from_slice(self.ball_row(a[0]));
            for &x in &a[1..] {
                let row = self.ball_row(x);
                for (w, r) in acc.iter_mut().zip(row) {
                    *w &= r;
                }
            }
        }
        // z at distance >= j+1 from every vertex of B.
        for &x in b {
            let row = self.ball_row(x);
            for (w, r) in acc.iter_mut().zip(row) {
                *w &= !r;
            }
        }
        // z outside {v} united with A and B.
        for &x in a.iter().chain(b.iter()).chain(v.iter()) {
            acc[x as usize >> 6] &= !(1u64 << (x & 63));
        }
        // mask tail bits beyond n
        let n = self.g.n() as usize;
        if !n.is_multiple_of(64) {
            acc[words - 1] &= (1u64 << (n % 64)) - 1;
        }
        for (wi, word) in acc.iter().enumerate() {
            if *word != 0 {
                return Some((wi * 64 + word.trailing_zeros() as usize) as u32);
            }
        }
        None
    }

    fn find_bfs(&self, variant: EcVariant, v: Option<u32>, a: &[u32], b: &[u32]) -> Option<u32> {
        let n = self.g.n() as usize;
        let mark = |from: u32, f: &mut dyn FnMut(usize)| {
            let mut dist = vec![u32::MAX; n];
            let mut queue = std::collections::VecDeque::new();
            dist[from as usize] = 0;
            queue.push_back(from);
            f(from as usize);
            while let Some(u) = queue.pop_front() {
                let du = dist[u as usize];
                if du == self.j {
                    continue;
                }
                for &w in self.g.neighbors(u) {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = du + 1;
                        f(w as usize);
                        queue.push_back(w);
                    }
                }
            }
        };
        let mut a_hits = vec![0u32; n];
        let mut v_ok = vec![v.is_none(); n];
        let mut banned = vec![false; n];
        for &x in a {
            mark(x, &mut |z| a_hits[z] += 1);
        }
        if let Some(vv) = v {
            mark(vv, &mut |z| v_ok[z] = true);
        }
        for &x in b {
            mark(x, &mut |z| banned[z] = true);
        }
        let excluded: Vec<u32> = a.iter().chain(b.iter()).chain(v.iter()).copied().collect();
        let a_needed = if variant.anchored() {
            1
        } else {
            a.len() as u32
        };
        (0..self.g.n()).find(|&z| {
            let zi = z as usize;
            a_hits[zi] >= a_needed && v_ok[zi] && !banned[zi] && !excluded.contains(&z)
        })
    }
}

/// Lowest-id witness for a validated query, or None when no vertex
/// satisfies the variant conditions.
pub fn find_witness(g: &Graph, q: &EcQuery) -> Result<Option<u32>, PropertyError> {
    q.validate(g.n())?;
    let oracle = WitnessOracle::new(g, q.j);
    Ok(oracle.find(q.variant, q.v, q.a.as_slice(), q.b.as_slice()))
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Number of (v,)A,B queries enumerated by an exact check.
pub fn query_count(n: u32, variant: EcVariant, l: u32, k: u32) -> u128 {
    let n = n as u64;
    if variant.anchored() {
        (n as u128)
            .saturating_mul(binomial(n - 1, l as u64))
            .saturating_mul(binomial(n - 1 - l as u64, k as u64))
    } else {
        binomial(n, l as u64).saturating_mul(binomial(n - l as u64, k as u64))
    }
}

fn estimated_cost(n: u32, variant: EcVariant, l: u32, k: u32) -> u128 {
    let sets = l as u128 + k as u128 + if variant.anchored() { 1 } else { 0 };
    query_count(n, variant, l, k)
        .saturating_mul(n as u128)
        .saturating_mul(sets)
}

fn property_name(variant: EcVariant, l: u32, k: u32, j: u32) -> String {
    match variant {
        EcVariant::Ec => format!("ec(l={l},k={k})"),
        EcVariant::OneEc => format!("one-ec(l={l},k={k})"),
        EcVariant::EcJ => format!("ec-j(l={l},k={k},j={j})"),
        EcVariant::OneEcJ => format!("one-ec-j(l={l},k={k},j={j})"),
    }
}

/// Iterate k-subsets of `pool` in lexicographic order.
struct Combinations<'a> {
    pool: &'a [u32],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Combinations<'a> {
    fn new(pool: &'a [u32], k: usize) -> Self {
        let done = k > pool.len();
        Combinations {
            pool,
            idx: (0..k).collect(),
            done,
        }
    }

    fn next_into(&mut self, out: &mut Vec<u32>) -> bool {
        if self.done {
            return false;
        }
        out.clear();
        out.extend(self.idx.iter().map(|&i| self.pool[i]));
        // advance
        let k = self.idx.len();
        if k == 0 {
            self.done = true;
            return true;
        }
        let n = self.pool.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] != i + n - k {
                self.idx[i] += 1;
                for col in i + 1..k {
                    self.idx[col] = self.idx[col - 1] + 1;
                }
                break;
            }
        }
        true
    }
}

/// Exhaustive or sampled check of an e.c. property over the whole graph.
///
/// Exact mode enumerates v ascending, then A, then B, each in lexicographic
/// order, and reports the first query with no witness. Sampled mode draws
/// `trials` uniform disjoint queries with per-trial seed `seed + trial`; a
/// refutation is a certificate, a clean pass is merely `inconclusive`.
pub fn check_ec(
    g: &Graph,
    variant: EcVariant,
    l: u32,
    k: u32,
    j: u32,
    mode: CheckMode,
    budget: u64,
) -> Result<PropertyReport, PropertyError> {
    if l < 1 {
        return Err(PropertyError::Domain("l must be >= 1".into()));
    }
    if j < 1 || (!variant.distance_generalized() && j != 1) {
        return Err(PropertyError::Domain("invalid j for variant".into()));
    }
    let needed = l + k + if variant.anchored() { 1 } else { 0 };
    if g.n() < needed + 1 {
        return Err(PropertyError::Domain(format!(
            "graph has {} vertices, query needs at least {}",
            g.n(),
            needed + 1
        )));
    }
    let name = property_name(variant, l, k, j);
    match mode {
        CheckMode::Exact => {
            let estimate = estimated_cost(g.n(), variant, l, k);
            if estimate > budget as u128 {
                return Err(PropertyError::BudgetExceeded { estimate, budget });
            }
            check_ec_exact(g, variant, l, k, j, name)
        }
        CheckMode::Sampled { trials, seed } => {
            Ok(check_ec_sampled(g, variant, l, k, j, trials, seed, name))
        }
        CheckMode::CertifiedSufficient => Err(PropertyError::Domain(
            "certified-sufficient mode does not apply to e.c. checks".into(),
        )),
    }
}

fn check_ec_exact(
    g: &Graph,
    variant: EcVariant,
    l: u32,
    k: u32,
    j: u32,
    name: String,
) -> Result<PropertyReport, PropertyError> {
    let oracle = WitnessOracle::new(g, j);
    let all: Vec<u32> = (0..g.n()).collect();
    let mut queries: u64 = 0;
    let anchors: Vec<Option<u32>> = if variant.anchored() {
        (0..g.n()).map(Some).collect()
    } else {
        vec![None]
    };
    let mut a = Vec::with_capacity(l as usize);
    let mut b = Vec::with_capacity(k as usize);
    for v in anchors {
        let pool_a: Vec<u32> = match v {
            Some(vv) => all.iter().copied().filter(|&x| x != vv).collect(),
            None => all.clone(),
        };
        let mut combs_a = Combinations::new(&pool_a, l as usize);
        while combs_a.next_into(&mut a) {
            let pool_b: Vec<u32> = pool_a.iter().copied().filter(|x| !a.contains(x)).collect();
            let mut combs_b = Combinations::new(&pool_b, k as usize);
            while combs_b.next_into(&mut b) {
                queries += 1;
                if oracle.find(variant, v, &a, &b).is_none() {
                    return Ok(PropertyReport::new(
                        name,
                        CheckMode::Exact,
                        Verdict::Fails,
                        Some(Witness::EcQuery {
                            v,
                            a: a.clone(),
                            b: b.clone(),
                        }),
                        CheckStats {
                            queries,
                            ..Default::default()
                        },
                    ));
                }
            }
        }
    }
    Ok(PropertyReport::new(
        name,
        CheckMode::Exact,
        Verdict::Holds,
        None,
        CheckStats {
            queries,
            ..Default::default()
        },
    ))
}

/// Draw a uniform disjoint (v, A, B) query from one trial stream.
fn sample_query(g: &Graph, variant: EcVariant, l: u32, k: u32, j: u32, trial_seed: u64) -> EcQuery {
    let mut rng = SplitMix64::new(trial_seed);
    let take = l + k + if variant.anchored() { 1 } else { 0 };
    // distinct vertices, then assigned in draw order: v, then A, then B
    let mut pool: Vec<u32> = Vec::with_capacity(take as usize);
    while pool.len() < take as usize {
        let x = rng.below(g.n() as u64) as u32;
        if !pool.contains(&x) {
            pool.push(x);
        }
    }
    let mut at = 0usize;
    let v = if variant.anchored() {
        at = 1;
        Some(pool[0])
    } else {
        None
    };
    let a = VertexSet::from_unsorted(pool[at..at + l as usize].to_vec());
    let b = VertexSet::from_unsorted(pool[at + l as usize..].to_vec());
    EcQuery {
        variant,
        v,
        a,
        b,
        j,
    }
}

#[allow(clippy::too_many_arguments)]
fn check_ec_sampled(
    g: &Graph,
    variant: EcVariant,
    l: u32,
    k: u32,
    j: u32,
    trials: u64,
    seed: u64,
    name: String,
) -> PropertyReport {
    let oracle = WitnessOracle::new(g, j);
    // per-trial seeds are seed + trial, so fanning out is order-independent
    let refuted = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let q = sample_query(g, variant, l, k, j, seed.wrapping_add(trial));
            if oracle
                .find(q.variant, q.v, q.a.as_slice(), q.b.as_slice())
                .is_none()
            {
                Some((trial, q))
            } else {
                None
            }
        })
        .min_by_key(|(trial, _)| *trial);
    let mode = CheckMode::Sampled { trials, seed };
    match refuted {
        Some((_, q)) => PropertyReport::new(
            name,
            mode,
            Verdict::RefutedBySample,
            Some(Witness::EcQuery {
                v: q.v,
                a: q.a.into_vec(),
                b: q.b.into_vec(),
            }),
            CheckStats {
                queries: trials,
                ..Default::default()
            },
        ),
        None => PropertyReport::new(
            name,
            mode,
            Verdict::Inconclusive,
            None,
            CheckStats {
                queries: trials,
                ..Default::default()
            },
        ),
    }
}
