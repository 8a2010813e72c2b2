//! Exact decision of the infinite game on tiny instances.
//!
//! The full position graph is explored and the set of positions from which
//! the revolutionaries can force an unguarded meeting is computed as a least
//! fixed point (attractor). Spies win everywhere else: in a finite position
//! space "prevent it forever" is exactly "the revolutionaries can never
//! force it", so no draw handling is needed.
//!
//! Positions are multisets (tokens of one team are interchangeable) and the
//! simultaneous move of a team is decomposed into per-token sub-moves: the
//! largest-position unmoved token moves first. Within one team's phase no
//! information reaches the opponent, so the decomposition preserves the game
//! value while bounding branching at max degree + 1 per state.
//!
//! States pack into a u64 (4-bit vertex ids): n <= 16 and r + s <= 14.
//! Anything larger is refused with a state-count estimate, as is any
//! instance whose estimate exceeds the configured budget.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::game::{RevStrategy, SpyStrategy, StrategyCtx, View};
use crate::graph::Graph;

/// Default ceiling on the number of explored states.
pub const DEFAULT_STATE_BUDGET: u64 = 10_000_000;

pub const MAX_N: u32 = 16;
pub const MAX_TOKENS: u32 = 14;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("instance refused: estimated {estimate} states exceeds budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u64 },
    #[error("instance not encodable: need n <= {MAX_N} and r + s <= {MAX_TOKENS} (got n = {n}, r = {r}, s = {s})")]
    TooLarge { n: u32, r: u32, s: u32 },
    #[error("r must be >= 1")]
    NoRevolutionaries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Revolutionaries,
    Spies,
}

const PHASE_REV_PLACE: u64 = 0;
const PHASE_SPY_PLACE: u64 = 1;
const PHASE_REV_MOVE: u64 = 2;
const PHASE_SPY_MOVE: u64 = 3;
const PHASE_ROUND_END: u64 = 4;

const PHASE_SHIFT: u32 = 56;
const MOVED_SHIFT: u32 = 59;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Key(u64);

impl Key {
    fn phase(self) -> u64 {
        (self.0 >> PHASE_SHIFT) & 0x7
    }

    fn moved(self) -> usize {
        ((self.0 >> MOVED_SHIFT) & 0x7) as usize
    }

    fn nibble(self, i: usize) -> u8 {
        ((self.0 >> (4 * i)) & 0xF) as u8
    }
}

/// Scratch decoding of a state into token arrays.
#[derive(Debug, Default, Clone)]
struct Pos {
    rev: Vec<u8>,
    spy: Vec<u8>,
}

struct Encoder {
    r: usize,
    s: usize,
}

impl Encoder {
    fn decode(&self, key: Key, pos: &mut Pos) {
        pos.rev.clear();
        pos.spy.clear();
        for i in 0..self.r {
            pos.rev.push(key.nibble(i));
        }
        for i in 0..self.s {
            pos.spy.push(key.nibble(self.r + i));
        }
    }

    fn encode(&self, phase: u64, moved: usize, rev: &[u8], spy: &[u8]) -> Key {
        debug_assert_eq!(rev.len(), self.r);
        debug_assert_eq!(spy.len(), self.s);
        let mut bits: u64 = 0;
        for (i, &v) in rev.iter().chain(spy.iter()).enumerate() {
            bits |= (v as u64) << (4 * i);
        }
        Key(bits | (phase << PHASE_SHIFT) | ((moved as u64) << MOVED_SHIFT))
    }
}

/// Sorted insert into a slice prefix: `xs[..len]` sorted, place `v`, keeping
/// ascending order.
fn insert_sorted(xs: &mut Vec<u8>, v: u8) {
    let at = xs.partition_point(|&x| x <= v);
    xs.insert(at, v);
}

fn is_rev_owned(phase: u64) -> bool {
    matches!(phase, PHASE_REV_PLACE | PHASE_REV_MOVE | PHASE_ROUND_END)
}

/// Outcome of one exact solve, with the solved fixed point retained for
/// strategy extraction.
pub struct Solved {
    pub winner: Winner,
    pub states: u64,
    pub edges: u64,
    r: u32,
    m: u32,
    s: u32,
    n: u32,
    adjacency: Vec<Vec<u8>>,
    keys: Vec<u64>,
    index: FxHashMap<u64, u32>,
    winning: Vec<bool>,
    rank: Vec<u32>,
}

/// Count multisets of size k over n symbols: C(n+k-1, k).
fn multisets(n: u64, k: u64) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n + i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Exact state-space size of an instance.
pub fn state_estimate(n: u32, r: u32, s: u32) -> u128 {
    let (n, r, s) = (n as u64, r as u64, s as u64);
    let m_r = multisets(n, r);
    let m_s = multisets(n, s);
    let mut total: u128 = 1 + m_r + m_r.saturating_mul(m_s); // RevPlace, SpyPlace, RoundEnd
    for k in 1..r {
        total = total.saturating_add(
            multisets(n, k)
                .saturating_mul(multisets(n, r - k))
                .saturating_mul(m_s),
        );
    }
    for k in 0..s {
        total = total.saturating_add(
            m_r.saturating_mul(multisets(n, k))
                .saturating_mul(multisets(n, s - k)),
        );
    }
    total
}

/// Decide the infinite game exactly.
pub fn solve(g: &Graph, r: u32, m: u32, s: u32, budget: u64) -> Result<Solved, SolverError> {
    if r < 1 {
        return Err(SolverError::NoRevolutionaries);
    }
    if g.n() > MAX_N || r + s > MAX_TOKENS {
        return Err(SolverError::TooLarge { n: g.n(), r, s });
    }
    let estimate = state_estimate(g.n(), r, s);
    if estimate > budget as u128 {
        return Err(SolverError::BudgetExceeded { estimate, budget });
    }

    let n = g.n();
    let adjacency: Vec<Vec<u8>> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&u| u as u8).collect())
        .collect();
    let enc = Encoder {
        r: r as usize,
        s: s as usize,
    };

    // forward exploration
    let root = Key(PHASE_REV_PLACE << PHASE_SHIFT);
    let mut keys: Vec<u64> = vec![root.0];
    let mut index: FxHashMap<u64, u32> = FxHashMap::default();
    index.insert(root.0, 0);
    let mut pred_edges: Vec<(u32, u32)> = Vec::new(); // (target, source)
    let mut out_deg: Vec<u32> = vec![0];
    let mut terminal: Vec<bool> = vec![false];
    let mut head = 0usize;
    let mut succ_buf: Vec<Key> = Vec::new();
    let mut pos = Pos::default();

    while head < keys.len() {
        let key = Key(keys[head]);
        let src = head as u32;
        head += 1;
        succ_buf.clear();
        successors(&enc, &adjacency, n, m, s, key, &mut pos, &mut succ_buf);
        if succ_buf.is_empty() {
            // only unguarded round ends are terminal
            terminal[src as usize] = true;
            continue;
        }
        out_deg[src as usize] = succ_buf.len() as u32;
        for &succ in &succ_buf {
            let idx = match index.get(&succ.0) {
                Some(&i) => i,
                None => {
                    let i = keys.len() as u32;
                    keys.push(succ.0);
                    index.insert(succ.0, i);
                    out_deg.push(0);
                    terminal.push(false);
                    i
                }
            };
            pred_edges.push((idx, src));
        }
    }

    let state_count = keys.len();
    let edge_count = pred_edges.len() as u64;

    // predecessor CSR by counting sort on target
    let mut pred_off: Vec<u32> = vec![0; state_count + 1];
    for &(t, _) in &pred_edges {
        pred_off[t as usize + 1] += 1;
    }
    for i in 0..state_count {
        pred_off[i + 1] += pred_off[i];
    }
    let mut pred: Vec<u32> = vec![0; pred_edges.len()];
    let mut cursor = pred_off.clone();
    for &(t, src) in &pred_edges {
        pred[cursor[t as usize] as usize] = src;
        cursor[t as usize] += 1;
    }
    drop(pred_edges);

    // attractor to the terminal set
    let mut winning = vec![false; state_count];
    let mut rank = vec![u32::MAX; state_count];
    let mut pending = out_deg.clone(); // spy states: successors not yet known winning
    let mut queue = std::collections::VecDeque::new();
    for (i, &t) in terminal.iter().enumerate() {
        if t {
            winning[i] = true;
            rank[i] = 0;
            queue.push_back(i as u32);
        }
    }
    while let Some(v) = queue.pop_front() {
        let rv = rank[v as usize];
        for &u in &pred[pred_off[v as usize] as usize..pred_off[v as usize + 1] as usize] {
            let ui = u as usize;
            if winning[ui] {
                continue;
            }
            let phase = Key(keys[ui]).phase();
            let capture = if is_rev_owned(phase) {
                true
            } else {
                pending[ui] -= 1;
                pending[ui] == 0
            };
            if capture {
                winning[ui] = true;
                rank[ui] = rv + 1;
                queue.push_back(u);
            }
        }
    }

    let winner = if winning[0] {
        Winner::Revolutionaries
    } else {
        Winner::Spies
    };
    Ok(Solved {
        winner,
        states: state_count as u64,
        edges: edge_count,
        r,
        m,
        s,
        n,
        adjacency,
        keys,
        index,
        winning,
        rank,
    })
}

#[allow(clippy::too_many_arguments)]
fn successors(
    enc: &Encoder,
    adjacency: &[Vec<u8>],
    n: u32,
    m: u32,
    s: u32,
    key: Key,
    pos: &mut Pos,
    out: &mut Vec<Key>,
) {
    match key.phase() {
        PHASE_REV_PLACE => {
            // every revolutionary multiset
            let mut rev = vec![0u8; enc.r];
            let spy = vec![0u8; enc.s];
            loop {
                out.push(enc.encode(PHASE_SPY_PLACE, 0, &rev, &spy));
                if !next_multiset(&mut rev, n as u8) {
                    break;
                }
            }
        }
        PHASE_SPY_PLACE => {
            enc.decode(key, pos);
            if s == 0 {
                out.push(enc.encode(PHASE_ROUND_END, 0, &pos.rev, &pos.spy));
                return;
            }
            let mut spy = vec![0u8; enc.s];
            loop {
                out.push(enc.encode(PHASE_ROUND_END, 0, &pos.rev, &spy));
                if !next_multiset(&mut spy, n as u8) {
                    break;
                }
            }
        }
        PHASE_ROUND_END => {
            enc.decode(key, pos);
            if has_unguarded_meeting(&pos.rev, &pos.spy, m) {
                return; // terminal: revolutionaries won
            }
            // the largest revolutionary token moves first
            expand_move(enc, adjacency, pos, 0, true, s, out);
        }
        PHASE_REV_MOVE => {
            enc.decode(key, pos);
            expand_move(enc, adjacency, pos, key.moved(), true, s, out);
        }
        PHASE_SPY_MOVE => {
            enc.decode(key, pos);
            expand_move(enc, adjacency, pos, key.moved(), false, s, out);
        }
        _ => unreachable!("invalid phase"),
    }
}

/// Expand the sub-move of the largest unmoved token of the active team.
///
/// Team layout inside a move phase is [moved ascending | unmoved ascending],
/// so the mover (largest unmoved) is the last entry.
#[allow(clippy::too_many_arguments)]
fn expand_move(
    enc: &Encoder,
    adjacency: &[Vec<u8>],
    pos: &mut Pos,
    moved: usize,
    rev_team: bool,
    s: u32,
    out: &mut Vec<Key>,
) {
    let team_len = if rev_team { enc.r } else { enc.s };
    debug_assert!(moved < team_len);
    let team: &Vec<u8> = if rev_team { &pos.rev } else { &pos.spy };
    let mover = team[team_len - 1];
    let rest = &team[..team_len - 1]; // moved part [..moved], rest unmoved
    let last_sub_move = moved + 1 == team_len;
    let mut dests: Vec<u8> = adjacency[mover as usize].clone();
    dests.push(mover);
    for dest in dests {
        let mut new_team: Vec<u8> = rest[..moved].to_vec();
        insert_sorted(&mut new_team, dest);
        new_team.extend_from_slice(&rest[moved..]);
        let key = if last_sub_move {
            // moved part is now the whole team, already sorted
            if rev_team {
                if s == 0 {
                    enc.encode(PHASE_ROUND_END, 0, &new_team, &pos.spy)
                } else {
                    enc.encode(PHASE_SPY_MOVE, 0, &new_team, &pos.spy)
                }
            } else {
                enc.encode(PHASE_ROUND_END, 0, &pos.rev, &new_team)
            }
        } else if rev_team {
            enc.encode(PHASE_REV_MOVE, moved + 1, &new_team, &pos.spy)
        } else {
            enc.encode(PHASE_SPY_MOVE, moved + 1, &pos.rev, &new_team)
        };
        out.push(key);
    }
}

fn has_unguarded_meeting(rev: &[u8], spy: &[u8], m: u32) -> bool {
    let mut spy_mask: u32 = 0;
    for &v in spy {
        spy_mask |= 1 << v;
    }
    let mut counts = [0u8; 16];
    for &v in rev {
        counts[v as usize] += 1;
    }
    counts
        .iter()
        .enumerate()
        .any(|(v, &c)| c as u32 >= m && spy_mask & (1 << v) == 0)
}

/// Advance a sorted multiset (non-decreasing vector over 0..n) to its
/// lexicographic successor; false when exhausted.
fn next_multiset(xs: &mut [u8], n: u8) -> bool {
    if xs.is_empty() {
        return false;
    }
    let len = xs.len();
    let mut i = len;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if xs[i] + 1 < n {
            let v = xs[i] + 1;
            for x in xs.iter_mut().skip(i) {
                *x = v;
            }
            return true;
        }
    }
}

impl Solved {
    fn idx(&self, key: Key) -> Option<u32> {
        self.index.get(&key.0).copied()
    }

    fn enc(&self) -> Encoder {
        Encoder {
            r: self.r as usize,
            s: self.s as usize,
        }
    }

    fn succ_of(&self, key: Key) -> Vec<Key> {
        let mut out = Vec::new();
        let mut pos = Pos::default();
        successors(
            &self.enc(),
            &self.adjacency,
            self.n,
            self.m,
            self.s,
            key,
            &mut pos,
            &mut out,
        );
        out
    }

    /// Verify the fixed point is closed: every winning revolutionary-owned
    /// state has a winning successor, every winning spy-owned state has only
    /// winning successors, and no losing state violates the complements.
    pub fn check_closure(&self) -> bool {
        for (i, &raw) in self.keys.iter().enumerate() {
            let key = Key(raw);
            let succs = self.succ_of(key);
            if succs.is_empty() {
                if !self.winning[i] {
                    return false; // terminals are winning by construction
                }
                continue;
            }
            let wins: Vec<bool> = succs
                .iter()
                .map(|&k| self.winning[self.idx(k).expect("successor explored") as usize])
                .collect();
            let expected = if is_rev_owned(key.phase()) {
                wins.iter().any(|&w| w)
            } else {
                wins.iter().all(|&w| w)
            };
            if self.winning[i] != expected {
                return false;
            }
        }
        true
    }

    /// Positional policy: the successor a perfect player picks at `key`.
    fn pick(&self, key: Key) -> Option<Key> {
        let succs = self.succ_of(key);
        if succs.is_empty() {
            return None;
        }
        let i = self.idx(key).expect("state explored") as usize;
        let rev_owned = is_rev_owned(key.phase());
        let prefer_winning = if rev_owned {
            self.winning[i]
        } else {
            // spies prefer to stay outside the attractor
            false
        };
        let mut best: Option<(u32, u64)> = None;
        let mut fallback: Option<u64> = None;
        for s in succs {
            let si = self.idx(s).expect("successor explored") as usize;
            if self.winning[si] == prefer_winning {
                let r = if prefer_winning {
                    self.rank[si]
                } else {
                    0 // any non-winning successor keeps the spies safe
                };
                let cand = (r, s.0);
                if best.map(|b| cand < b).unwrap_or(true) {
                    best = Some(cand);
                }
            }
            if fallback.map(|f| s.0 < f).unwrap_or(true) {
                fallback = Some(s.0);
            }
        }
        Some(Key(best.map(|(_, k)| k).or(fallback).unwrap()))
    }

    /// Walk a full team phase with the positional policy, returning the
    /// ordered sub-moves (from, to). A revolutionary walk starts at a
    /// round-end state and runs through the rev-move chain; a spy walk
    /// starts at a spy-move state with nothing moved yet.
    fn walk_phase(&self, start: Key, rev_team: bool) -> Vec<(u8, u8)> {
        let mut key = start;
        let mut moves = Vec::new();
        let enc = self.enc();
        let mut before = Pos::default();
        let mut after = Pos::default();
        let team_len = if rev_team {
            self.r as usize
        } else {
            self.s as usize
        };
        let chain_phase = if rev_team {
            PHASE_REV_MOVE
        } else {
            PHASE_SPY_MOVE
        };
        loop {
            enc.decode(key, &mut before);
            let team = if rev_team { &before.rev } else { &before.spy };
            let mover = team[team_len - 1];
            let moved_before = &team[..key.moved()];
            let next = self.pick(key).expect("non-terminal state has successors");
            enc.decode(next, &mut after);
            let team_after = if rev_team { &after.rev } else { &after.spy };
            let in_chain = next.phase() == chain_phase && next.moved() > 0;
            let k_after = if in_chain { next.moved() } else { team_len };
            let dest = diff_inserted(moved_before, &team_after[..k_after]);
            moves.push((mover, dest));
            if !in_chain {
                return moves;
            }
            key = next;
        }
    }
}

/// The single element of `after` not accounted for by `before` (both
/// sorted; after = before + one insertion).
fn diff_inserted(before: &[u8], after: &[u8]) -> u8 {
    debug_assert_eq!(before.len() + 1, after.len());
    for (i, &a) in after.iter().enumerate() {
        if i >= before.len() || before[i] != a {
            return a;
        }
    }
    unreachable!("after must contain one extra element")
}

/// Perfect-play strategies read off a solved fixed point.
pub struct ExtractedRev {
    solved: std::rc::Rc<Solved>,
}

pub struct ExtractedSpy {
    solved: std::rc::Rc<Solved>,
}

/// Build the pair of positional strategies for a solved instance.
pub fn extracted_strategies(solved: Solved) -> (ExtractedRev, ExtractedSpy) {
    let rc = std::rc::Rc::new(solved);
    (
        ExtractedRev { solved: rc.clone() },
        ExtractedSpy { solved: rc },
    )
}

fn multiset_to_tokens(ms: &[u8]) -> Vec<u32> {
    ms.iter().map(|&v| v as u32).collect()
}

/// Convert a list of multiset sub-moves into a token-indexed move vector.
fn assign_token_moves(current: &[u32], sub_moves: &[(u8, u8)]) -> Vec<u32> {
    let mut dest: Vec<Option<u32>> = vec![None; current.len()];
    for &(from, to) in sub_moves {
        let token = current
            .iter()
            .enumerate()
            .position(|(i, &v)| v == from as u32 && dest[i].is_none())
            .expect("sub-move source token present");
        dest[token] = Some(to as u32);
    }
    dest.into_iter()
        .zip(current)
        .map(|(d, &cur)| d.unwrap_or(cur))
        .collect()
}

impl RevStrategy for ExtractedRev {
    fn name(&self) -> &'static str {
        "extracted"
    }

    fn place(&mut self, _ctx: &mut StrategyCtx) -> Vec<u32> {
        let root = Key(PHASE_REV_PLACE << PHASE_SHIFT);
        let choice = self.solved.pick(root).expect("placement exists");
        let enc = self.solved.enc();
        let mut pos = Pos::default();
        enc.decode(choice, &mut pos);
        multiset_to_tokens(&pos.rev)
    }

    fn moves(&mut self, _ctx: &mut StrategyCtx, view: &View) -> Vec<u32> {
        let enc = self.solved.enc();
        let mut rev: Vec<u8> = view.rev.iter().map(|&v| v as u8).collect();
        let mut spy: Vec<u8> = view.spy.iter().map(|&v| v as u8).collect();
        rev.sort_unstable();
        spy.sort_unstable();
        let key = enc.encode(PHASE_ROUND_END, 0, &rev, &spy);
        let subs = self.solved.walk_phase(key, true);
        assign_token_moves(view.rev, &subs)
    }
}

impl SpyStrategy for ExtractedSpy {
    fn name(&self) -> &'static str {
        "extracted"
    }

    fn place(&mut self, _ctx: &mut StrategyCtx, rev: &[u32]) -> Vec<u32> {
        if self.solved.s == 0 {
            return Vec::new();
        }
        let enc = self.solved.enc();
        let mut rev_ms: Vec<u8> = rev.iter().map(|&v| v as u8).collect();
        rev_ms.sort_unstable();
        let key = enc.encode(
            PHASE_SPY_PLACE,
            0,
            &rev_ms,
            &vec![0u8; self.solved.s as usize],
        );
        let choice = self.solved.pick(key).expect("spy placement exists");
        let mut pos = Pos::default();
        enc.decode(choice, &mut pos);
        multiset_to_tokens(&pos.spy)
    }

    fn moves(&mut self, _ctx: &mut StrategyCtx, view: &View) -> Vec<u32> {
        if self.solved.s == 0 {
            return Vec::new();
        }
        let enc = self.solved.enc();
        let mut rev: Vec<u8> = view.rev.iter().map(|&v| v as u8).collect();
        let mut spy: Vec<u8> = view.spy.iter().map(|&v| v as u8).collect();
        rev.sort_unstable();
        spy.sort_unstable();
        let key = enc.encode(PHASE_SPY_MOVE, 0, &rev, &spy);
        let subs = self.solved.walk_phase(key, false);
        assign_token_moves(view.spy, &subs)
    }
}

/// The spy number: smallest s for which the spies win, scanned upward from
/// zero. Existence is guaranteed by the trivial upper bound min(n, r-m+1).
pub fn spy_number_exact(g: &Graph, r: u32, m: u32, budget: u64) -> Result<u32, SolverError> {
    let cap = if m > r { 0 } else { (r - m + 1).min(g.n()) };
    for s in 0..=cap {
        if solve(g, r, m, s, budget)?.winner == Winner::Spies {
            return Ok(s);
        }
    }
    unreachable!("min(n, r-m+1) spies always win");
}

/// Report of the trivial-bounds audit for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub sigma: u32,
    pub lower: u32,
    pub upper: u32,
    /// m > r: no meeting can ever form and the upper bound degenerates
    pub vacuous: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Assert min(n, floor(r/m)) <= sigma <= min(n, r-m+1) on the exact value.
pub fn verify_trivial_bounds(
    g: &Graph,
    r: u32,
    m: u32,
    budget: u64,
) -> Result<BoundsReport, SolverError> {
    let sigma = spy_number_exact(g, r, m, budget)?;
    let lower = (r / m).min(g.n());
    let vacuous = m > r;
    let upper = if vacuous { 0 } else { (r - m + 1).min(g.n()) };
    Ok(BoundsReport {
        sigma,
        lower,
        upper,
        vacuous,
        lower_ok: lower <= sigma,
        upper_ok: vacuous || sigma <= upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, path, star};

    #[test]
    fn k2_two_revolutionaries_win_unwatched() {
        let g = complete(2);
        let solved = solve(&g, 2, 2, 0, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(solved.winner, Winner::Revolutionaries);
    }

    #[test]
    fn occupying_every_vertex_wins() {
        let g = cycle(4);
        let solved = solve(&g, 3, 1, 4, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(solved.winner, Winner::Spies);
    }

    #[test]
    fn p4_tree_spy_number() {
        // sigma(tree) = floor(r/m)
        let g = path(4);
        let solved = solve(&g, 3, 2, 1, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(solved.winner, Winner::Spies);
        assert_eq!(spy_number_exact(&g, 3, 2, DEFAULT_STATE_BUDGET).unwrap(), 1);
    }

    #[test]
    fn k4_spy_number_is_floor_r_over_m() {
        let g = complete(4);
        assert_eq!(spy_number_exact(&g, 4, 2, DEFAULT_STATE_BUDGET).unwrap(), 2);
    }

    #[test]
    fn c5_spy_number_frozen() {
        // with r = 2, m = 2 the trivial bounds pin sigma to 1 on any graph:
        // floor(r/m) = 1 from below, r-m+1 = 1 from above (one spy shadows
        // one revolutionary). The attractor must agree.
        let g = cycle(5);
        let sigma = spy_number_exact(&g, 2, 2, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(sigma, 1);
    }

    #[test]
    fn cycles_need_one_extra_spy_sometimes() {
        // unicyclic graphs may need floor(r/m) + 1; cycles with r = 3,
        // m = 2 are such cases. Frozen values of the exact runs.
        for n in [4, 5, 6] {
            let g = cycle(n);
            let sigma = spy_number_exact(&g, 3, 2, DEFAULT_STATE_BUDGET).unwrap();
            assert_eq!(sigma, 2, "C{n}");
        }
        // while floor(r/m) spies suffice on C5 at r = 4, m = 2
        assert_eq!(
            spy_number_exact(&cycle(5), 4, 2, DEFAULT_STATE_BUDGET).unwrap(),
            2
        );
    }

    #[test]
    fn star_is_a_tree() {
        let g = star(4);
        assert_eq!(spy_number_exact(&g, 4, 2, DEFAULT_STATE_BUDGET).unwrap(), 2);
        assert_eq!(spy_number_exact(&g, 3, 3, DEFAULT_STATE_BUDGET).unwrap(), 1);
    }

    #[test]
    fn meeting_size_above_r_needs_no_spies() {
        let g = path(4);
        let rep = verify_trivial_bounds(&g, 2, 3, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(rep.sigma, 0);
        assert!(rep.vacuous);
        assert!(rep.lower_ok);
    }

    #[test]
    fn m_equals_one_needs_min_n_r_spies() {
        for g in [path(4), cycle(4), complete(3)] {
            for r in 1..=3 {
                let sigma = spy_number_exact(&g, r, 1, DEFAULT_STATE_BUDGET).unwrap();
                assert_eq!(sigma, r.min(g.n()));
            }
        }
    }

    #[test]
    fn budget_refusal_reports_estimate() {
        let g = complete(8);
        match solve(&g, 4, 2, 4, 1000) {
            Err(SolverError::BudgetExceeded { estimate, budget }) => {
                assert!(estimate > 1000);
                assert_eq!(budget, 1000);
            }
            other => panic!("expected refusal, got {:?}", other.map(|s| s.winner)),
        }
    }

    #[test]
    fn too_large_instances_are_rejected() {
        let g = path(4);
        assert!(matches!(
            solve(&g, 10, 2, 5, u64::MAX),
            Err(SolverError::TooLarge { .. })
        ));
    }

    #[test]
    fn fixed_point_is_closed() {
        for (g, r, m, s) in [
            (path(4), 3, 2, 1),
            (cycle(5), 2, 2, 1),
            (complete(4), 4, 2, 2),
        ] {
            let solved = solve(&g, r, m, s, DEFAULT_STATE_BUDGET).unwrap();
            assert!(solved.check_closure());
        }
    }

    #[test]
    fn extracted_strategies_reproduce_verdicts() {
        use crate::game::{play, GameConfig, Verdict};
        use crate::graph::{sample_gnp, GnpParams};
        let mut checked = 0;
        for seed in 0..115 {
            let n = 3 + (seed % 3) as u32;
            let g = sample_gnp(&GnpParams::new(n, 0.5, seed));
            let (r, m, s) = (2 + (seed % 2) as u32, 2, (seed % 3) as u32);
            let solved = match solve(&g, r, m, s, DEFAULT_STATE_BUDGET) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let winner = solved.winner;
            let states = solved.states;
            let (mut rev, mut spy) = extracted_strategies(solved);
            let horizon = (states as u32).min(500);
            let config = GameConfig::new(r, m, s, horizon);
            let result = play(&g, &config, &mut rev, &mut spy, seed);
            match winner {
                Winner::Revolutionaries => {
                    assert_eq!(result.verdict, Verdict::Revolutionaries, "seed {seed}")
                }
                Winner::Spies => {
                    assert_eq!(result.verdict, Verdict::SpiesSurvived, "seed {seed}")
                }
            }
            checked += 1;
        }
        assert!(checked >= 100);
    }
}
