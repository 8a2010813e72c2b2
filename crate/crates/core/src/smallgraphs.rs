//! Exhaustive enumeration of tiny graphs up to isomorphism.
//!
//! Graphs on n <= 8 vertices are edge bitmasks over the C(n,2) vertex
//! pairs; the canonical form is the minimum mask over all vertex
//! relabelings. Good enough for the handfuls of vertices the exact solver
//! handles; no attempt at real graph-isomorphism machinery.

use crate::graph::Graph;

fn pair_bit(n: usize, u: usize, v: usize) -> u32 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    let idx = a * (2 * n - a - 1) / 2 + (b - a - 1);
    1u32 << idx
}

fn relabel(n: usize, mask: u32, perm: &[usize]) -> u32 {
    let mut out = 0u32;
    for u in 0..n {
        for v in u + 1..n {
            if mask & pair_bit(n, u, v) != 0 {
                out |= pair_bit(n, perm[u], perm[v]);
            }
        }
    }
    out
}

fn canonical(n: usize, mask: u32) -> u32 {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = relabel(n, mask, &perm);
    // Heap's algorithm over all n! relabelings
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(relabel(n, mask, &perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn is_connected(n: usize, mask: u32) -> bool {
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for (v, s) in seen.iter_mut().enumerate() {
            if v != u && !*s && mask & pair_bit(n, u, v) != 0 {
                *s = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

fn mask_to_graph(n: usize, mask: u32) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if mask & pair_bit(n, u, v) != 0 {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Graph::from_edges(n as u32, &edges).unwrap()
}

/// All connected graphs on exactly n vertices with `edge_filter` edges (None
/// = any count), one representative per isomorphism class, in ascending
/// canonical-mask order.
fn enumerate(n: usize, edge_filter: Option<u32>) -> Vec<Graph> {
    assert!((1..=8).contains(&n), "mask enumeration supports n <= 8");
    let bits = n * (n - 1) / 2;
    let mut canon: std::collections::BTreeSet<u32> = std::collections::BTreeSet::new();
    for mask in 0..(1u32 << bits) {
        if let Some(m) = edge_filter {
            if mask.count_ones() != m {
                continue;
            }
        }
        if !is_connected(n, mask) {
            continue;
        }
        canon.insert(canonical(n, mask));
    }
    canon.into_iter().map(|m| mask_to_graph(n, m)).collect()
}

/// Connected graphs on exactly n vertices up to isomorphism.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    enumerate(n, None)
}

/// Trees on exactly n vertices up to isomorphism.
pub fn trees(n: usize) -> Vec<Graph> {
    if n == 1 {
        return enumerate(1, Some(0));
    }
    enumerate(n, Some(n as u32 - 1))
}

/// Unicyclic graphs (connected, exactly one cycle) on n vertices up to
/// isomorphism.
pub fn unicyclic(n: usize) -> Vec<Graph> {
    enumerate(n, Some(n as u32))
}
