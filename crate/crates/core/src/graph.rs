//! Immutable simple undirected graphs with BFS neighborhood machinery and
//! seeded G(n,p) sampling.
//!
//! Vertices are `0..n`. Adjacency is kept as sorted neighbor lists; for
//! graphs with at most [`BITSET_MAX_N`] vertices a bitset adjacency index is
//! built lazily the first time a membership-heavy query needs it. Graphs are
//! immutable after construction and safe to share across threads.
//!
//! # G(n,p) sampling
//!
//! Each unordered pair `{u,v}` with `u < v` has the lexicographic index
//! `idx(u,v) = u*(2n-u-1)/2 + (v-u-1)` and is an edge iff output `idx(u,v)`
//! of the SplitMix64 stream seeded with the sample seed is below
//! `p * 2^64`. One stream output is dedicated to each pair, so the sampled
//! graph is bit-identical across platforms and any single pair or row can be
//! queried in O(1)/O(n) without materializing the rest ([`gnp_has_edge`],
//! [`gnp_neighbors`]).

use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::stream_at;

/// Largest vertex count for which the lazy adjacency bitset is built.
pub const BITSET_MAX_N: usize = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(u32, u32),
    #[error("vertex set must be nonempty")]
    EmptySet,
    #[error("vertex set not strictly increasing at position {0}")]
    NotSorted(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(u32, u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("L_n undefined: requires 0 < p < 1 and n >= 2 (got n = {n}, p = {p})")]
    EllDomain { n: u64, p: f64 },
}

/// Sorted set of distinct vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet(Vec<u32>);

impl VertexSet {
    /// Build from a strictly increasing vector.
    pub fn from_sorted(v: Vec<u32>) -> Result<Self, GraphError> {
        for (i, w) in v.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(GraphError::NotSorted(i + 1));
            }
        }
        Ok(VertexSet(v))
    }

    /// Build from arbitrary ids, sorting and deduplicating.
    pub fn from_unsorted(mut v: Vec<u32>) -> Self {
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn singleton(v: u32) -> Self {
        VertexSet(vec![v])
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        // merge scan over the two sorted lists
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

impl From<Vec<u32>> for VertexSet {
    fn from(v: Vec<u32>) -> Self {
        VertexSet::from_unsorted(v)
    }
}

/// Parameters of a seeded G(n,p) sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnpParams {
    pub n: u32,
    pub p: f64,
    pub seed: u64,
}

impl GnpParams {
    pub fn new(n: u32, p: f64, seed: u64) -> Self {
        assert!(n >= 1, "n must be at least 1");
        assert!((0.0..=1.0).contains(&p), "p must lie in [0,1]");
        GnpParams { n, p, seed }
    }

    /// Expected degree d = p(n-1).
    pub fn expected_degree(&self) -> f64 {
        self.p * (self.n as f64 - 1.0)
    }

    #[inline]
    fn threshold(&self) -> u128 {
        // p quantized to a 64-bit threshold; p = 1 maps to 2^64 (all pairs).
        (self.p * 18_446_744_073_709_551_616.0) as u128
    }
}

#[inline]
fn pair_index(n: u64, u: u64, v: u64) -> u64 {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// O(1) membership test for a single pair of a G(n,p) sample.
#[inline]
pub fn gnp_has_edge(params: &GnpParams, u: u32, v: u32) -> bool {
    if u == v {
        return false;
    }
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    let idx = pair_index(params.n as u64, a as u64, b as u64);
    (stream_at(params.seed, idx) as u128) < params.threshold()
}

/// The sorted neighbor list of one vertex of a G(n,p) sample, computed in
/// O(n) without materializing the graph. Identical to
/// `sample_gnp(params).neighbors(v)`.
pub fn gnp_neighbors(params: &GnpParams, v: u32) -> Vec<u32> {
    assert!(v < params.n);
    let n = params.n as u64;
    let t = params.threshold();
    let mut out = Vec::new();
    for u in 0..v as u64 {
        if (stream_at(params.seed, pair_index(n, u, v as u64)) as u128) < t {
            out.push(u as u32);
        }
    }
    if v + 1 < params.n {
        let base = pair_index(n, v as u64, v as u64 + 1);
        for (off, w) in (v + 1..params.n).enumerate() {
            if (stream_at(params.seed, base + off as u64) as u128) < t {
                out.push(w);
            }
        }
    }
    out
}

/// Draw a G(n,p) sample. Deterministic in `params` down to the bit level.
pub fn sample_gnp(params: &GnpParams) -> Graph {
    let n = params.n as u64;
    let t = params.threshold();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); params.n as usize];
    let mut edges: u64 = 0;
    if t == 0 || n < 2 {
        return Graph {
            n: params.n,
            adj,
            edge_count: 0,
            bits: OnceLock::new(),
        };
    }
    let mut idx: u64 = 0;
    for u in 0..params.n {
        for v in u + 1..params.n {
            if (stream_at(params.seed, idx) as u128) < t {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
                edges += 1;
            }
            idx += 1;
        }
    }
    // rows for u got pushes from later v in ascending order; pushes from the
    // u-loop arrive ascending as well, but interleaved, so sort once.
    for row in &mut adj {
        row.sort_unstable();
    }
    Graph {
        n: params.n,
        adj,
        edge_count: edges,
        bits: OnceLock::new(),
    }
}

/// Row-major bitset adjacency matrix.
#[derive(Debug)]
pub struct BitMatrix {
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn build(adj: &[Vec<u32>]) -> BitMatrix {
        let n = adj.len();
        let w = n.div_ceil(64);
        let mut bits = vec![0u64; w * n];
        for (v, row) in adj.iter().enumerate() {
            let base = v * w;
            for &u in row {
                bits[base + (u as usize >> 6)] |= 1u64 << (u & 63);
            }
        }
        BitMatrix {
            words_per_row: w,
            bits,
        }
    }

    #[inline]
    pub fn row(&self, v: u32) -> &[u64] {
        let base = v as usize * self.words_per_row;
        &self.bits[base..base + self.words_per_row]
    }

    #[inline]
    pub fn has(&self, u: u32, v: u32) -> bool {
        self.row(u)[v as usize >> 6] & (1u64 << (v & 63)) != 0
    }
}

/// Immutable simple undirected graph.
#[derive(Debug)]
pub struct Graph {
    n: u32,
    adj: Vec<Vec<u32>>,
    edge_count: u64,
    bits: OnceLock<Option<BitMatrix>>,
}

impl Graph {
    /// Build from an edge list; rejects self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n as usize];
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for (v, row) in adj.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(v as u32, w[0]));
            }
        }
        Ok(Graph {
            n,
            adj,
            edge_count: edges.len() as u64,
            bits: OnceLock::new(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.n
    }

    /// Average degree 2m/n, the fallback estimate for d when p is unknown.
    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.n as f64
        }
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if let Some(b) = self.bitset() {
            return b.has(u, v);
        }
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Lazy bitset index, present only for n <= [`BITSET_MAX_N`].
    pub fn bitset(&self) -> Option<&BitMatrix> {
        self.bits
            .get_or_init(|| {
                if (self.n as usize) <= BITSET_MAX_N {
                    Some(BitMatrix::build(&self.adj))
                } else {
                    None
                }
            })
            .as_ref()
    }

    fn check_vertex(&self, v: u32) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange(v, self.n))
        } else {
            Ok(())
        }
    }

    /// BFS distances from `v`; `u32::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, v: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n as usize];
        dist[v as usize] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &w in self.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// N\[S,i\]: all vertices at distance <= i from some vertex of S.
    pub fn ball(&self, sources: &VertexSet, radius: u32) -> Result<VertexSet, GraphError> {
        if sources.is_empty() {
            return Err(GraphError::EmptySet);
        }
        for v in sources.iter() {
            self.check_vertex(v)?;
        }
        let mut dist = vec![u32::MAX; self.n as usize];
        let mut queue = std::collections::VecDeque::new();
        for v in sources.iter() {
            dist[v as usize] = 0;
            queue.push_back(v);
        }
        let mut members: Vec<u32> = sources.iter().collect();
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            if du == radius {
                continue;
            }
            for &w in self.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        Ok(VertexSet(members))
    }

    /// S(v,i): vertices at distance exactly i from v.
    pub fn sphere(&self, v: u32, radius: u32) -> Result<VertexSet, GraphError> {
        self.check_vertex(v)?;
        let dist = self.bfs_distances(v);
        let mut out: Vec<u32> = (0..self.n)
            .filter(|&u| dist[u as usize] == radius)
            .collect();
        out.sort_unstable();
        Ok(VertexSet(out))
    }

    /// N^c(v) = V minus the closed neighborhood of v.
    pub fn non_neighborhood(&self, v: u32) -> Result<VertexSet, GraphError> {
        self.check_vertex(v)?;
        let row = self.neighbors(v);
        let mut out = Vec::with_capacity(self.n as usize - row.len() - 1);
        let mut it = row.iter().peekable();
        for u in 0..self.n {
            while let Some(&&w) = it.peek() {
                if w < u {
                    it.next();
                } else {
                    break;
                }
            }
            if u == v || it.peek() == Some(&&u) {
                continue;
            }
            out.push(u);
        }
        Ok(VertexSet(out))
    }
}

/// L_n = log base 1/(1-p) of n.
pub fn ell_n(n: u64, p: f64) -> Result<f64, GraphError> {
    if !(p > 0.0 && p < 1.0) || n < 2 {
        return Err(GraphError::EllDomain { n, p });
    }
    Ok((n as f64).ln() / -(1.0 - p).ln())
}

/// Serialize to the interchange edge-list format: `n m` then one `u v` line
/// per edge with u < v, ascending lexicographic, LF line endings.
pub fn save_graph(g: &Graph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", g.n, g.edge_count);
    for u in 0..g.n {
        for &v in g.neighbors(u) {
            if v > u {
                let _ = writeln!(s, "{u} {v}");
            }
        }
    }
    s
}

/// Parse the edge-list format produced by [`save_graph`].
pub fn load_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let mut parts = header.split_whitespace();
    let parse_u32 = |tok: Option<&str>, line: usize, what: &str| -> Result<u32, GraphError> {
        tok.ok_or_else(|| GraphError::Parse {
            line,
            msg: format!("missing {what}"),
        })?
        .parse::<u32>()
        .map_err(|e| GraphError::Parse {
            line,
            msg: format!("bad {what}: {e}"),
        })
    };
    let n = parse_u32(parts.next(), 1, "vertex count")?;
    let m = parse_u32(parts.next(), 1, "edge count")?;
    if parts.next().is_some() {
        return Err(GraphError::Parse {
            line: 1,
            msg: "trailing tokens in header".into(),
        });
    }
    let mut edges = Vec::with_capacity(m as usize);
    for (i, raw) in lines {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut parts = raw.split_whitespace();
        let u = parse_u32(parts.next(), line, "endpoint")?;
        let v = parse_u32(parts.next(), line, "endpoint")?;
        if parts.next().is_some() {
            return Err(GraphError::Parse {
                line,
                msg: "trailing tokens".into(),
            });
        }
        if u >= v {
            return Err(GraphError::Parse {
                line,
                msg: format!("edge endpoints must satisfy u < v, got {u} {v}"),
            });
        }
        if v >= n {
            return Err(GraphError::Parse {
                line,
                msg: format!("vertex {v} out of range (n = {n})"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() as u32 != m {
        return Err(GraphError::Parse {
            line: 1,
            msg: format!("header promises {m} edges, found {}", edges.len()),
        });
    }
    let g = Graph::from_edges(n, &edges)?;
    Ok(g)
}

/// Named constructor: path 0-1-...-(n-1).
pub fn path(n: u32) -> Graph {
    let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Named constructor: cycle on n >= 3 vertices.
pub fn cycle(n: u32) -> Graph {
    assert!(n >= 3);
    let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    edges.push((0, n - 1));
    Graph::from_edges(n, &edges).unwrap()
}

/// Named constructor: complete graph K_n.
pub fn complete(n: u32) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Named constructor: complete bipartite K_{a,b} with parts 0..a and a..a+b.
pub fn complete_bipartite(a: u32, b: u32) -> Graph {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in a..a + b {
            edges.push((u, v));
        }
    }
    Graph::from_edges(a + b, &edges).unwrap()
}

/// Named constructor: star with center 0 and `leaves` leaves.
pub fn star(leaves: u32) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    Graph::from_edges(leaves + 1, &edges).unwrap()
}

/// Named constructor: the Petersen graph. Outer cycle 0..5, inner pentagram
/// 5..10, spokes i - (i+5).
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, i + 5));
    }
    let edges: Vec<(u32, u32)> = edges
        .into_iter()
        .map(|(u, v): (u32, u32)| if u < v { (u, v) } else { (v, u) })
        .collect();
    Graph::from_edges(10, &edges).unwrap()
}
