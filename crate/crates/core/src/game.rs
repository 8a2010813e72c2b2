//! The Revolutionaries and Spies game as a deterministic state machine.
//!
//! A game is a placement round followed by move rounds. Within every round
//! revolutionaries commit their moves first, then spies move with full
//! knowledge of the new revolutionary positions. Meetings are inspected only
//! at the end of a round, after the spies have moved. The revolutionaries
//! win as soon as a round ends with an unguarded meeting; surviving to the
//! horizon is reported as `SpiesSurvived`, which is *not* a proof that the
//! spies win the infinite game (only the exact solver decides that).
//!
//! Teams are token vectors: index i of the position vector is token i, and
//! traces preserve token order so that every recorded move can be
//! re-validated against the edge set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    /// revolutionary count
    pub r: u32,
    /// meeting size
    pub m: u32,
    /// spy count
    pub s: u32,
    /// maximum number of rounds to simulate
    pub horizon: u32,
}

impl GameConfig {
    pub fn new(r: u32, m: u32, s: u32, horizon: u32) -> Self {
        assert!(r >= 1 && m >= 1 && horizon >= 1);
        GameConfig { r, m, s, horizon }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    RevPlace,
    SpyPlace,
    RevMove,
    SpyMove,
    RoundEnd,
}

/// Full game position. Position vectors are token-indexed multisets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub rev: Vec<u32>,
    pub spy: Vec<u32>,
    pub round: u32,
    pub phase: Phase,
}

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("{team} token {token} attempts illegal move {from} -> {to} in round {round}")]
    RuleViolation {
        team: Team,
        token: usize,
        from: u32,
        to: u32,
        round: u32,
    },
    #[error("move vector for {team} has length {got}, expected {expected}")]
    WrongArity {
        team: Team,
        got: usize,
        expected: usize,
    },
    #[error("placement vertex {0} out of range")]
    BadPlacement(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Team {
    Revolutionaries,
    Spies,
}

impl std::fmt::Display for Team {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Team::Revolutionaries => write!(f, "revolutionaries"),
            Team::Spies => write!(f, "spies"),
        }
    }
}

/// Vertices holding at least m revolutionaries.
pub fn meetings(state: &GameState, m: u32) -> VertexSet {
    let mut counts: std::collections::BTreeMap<u32, u32> = std::collections::BTreeMap::new();
    for &v in &state.rev {
        *counts.entry(v).or_insert(0) += 1;
    }
    VertexSet::from_sorted(
        counts
            .into_iter()
            .filter(|&(_, c)| c >= m)
            .map(|(v, _)| v)
            .collect(),
    )
    .unwrap()
}

/// Meetings with no spy on the vertex.
pub fn unguarded_meetings(state: &GameState, m: u32) -> VertexSet {
    let spy_set: std::collections::BTreeSet<u32> = state.spy.iter().copied().collect();
    VertexSet::from_sorted(
        meetings(state, m)
            .iter()
            .filter(|v| !spy_set.contains(v))
            .collect(),
    )
    .unwrap()
}

/// The closed neighborhood N(v) ∪ {v}: everywhere a token at v may end the
/// round.
pub fn legal_moves(g: &Graph, position: u32) -> VertexSet {
    let mut out: Vec<u32> = g.neighbors(position).to_vec();
    match out.binary_search(&position) {
        Ok(_) => unreachable!("simple graph has no self-loop"),
        Err(i) => out.insert(i, position),
    }
    VertexSet::from_sorted(out).unwrap()
}

fn validate_moves(
    g: &Graph,
    team: Team,
    from: &[u32],
    to: &[u32],
    round: u32,
) -> Result<(), GameError> {
    if from.len() != to.len() {
        return Err(GameError::WrongArity {
            team,
            got: to.len(),
            expected: from.len(),
        });
    }
    for (token, (&f, &t)) in from.iter().zip(to).enumerate() {
        if t != f && !g.has_edge(f, t) {
            return Err(GameError::RuleViolation {
                team,
                token,
                from: f,
                to: t,
                round,
            });
        }
    }
    Ok(())
}

/// Apply one full move round (revolutionaries then spies) to a round-end
/// state, validating every token move.
pub fn apply_round(
    g: &Graph,
    state: &GameState,
    rev_moves: &[u32],
    spy_moves: &[u32],
) -> Result<GameState, GameError> {
    let round = state.round + 1;
    validate_moves(g, Team::Revolutionaries, &state.rev, rev_moves, round)?;
    validate_moves(g, Team::Spies, &state.spy, spy_moves, round)?;
    Ok(GameState {
        rev: rev_moves.to_vec(),
        spy: spy_moves.to_vec(),
        round,
        phase: Phase::RoundEnd,
    })
}

/// What a strategy sees when asked to move: the position after any earlier
/// phases of the current round.
#[derive(Debug, Clone)]
pub struct View<'a> {
    pub round: u32,
    pub rev: &'a [u32],
    pub spy: &'a [u32],
}

/// Per-strategy context: the graph, the configuration, a private seeded
/// stream, and the event sink feeding the trace.
pub struct StrategyCtx<'a> {
    pub g: &'a Graph,
    pub config: &'a GameConfig,
    pub rng: &'a mut SplitMix64,
    pub events: &'a mut Vec<TraceEvent>,
}

pub trait RevStrategy {
    fn name(&self) -> &'static str;
    /// Initial positions, one vertex per token.
    fn place(&mut self, ctx: &mut StrategyCtx) -> Vec<u32>;
    /// Destinations for all tokens; view holds the positions at the start of
    /// the round.
    fn moves(&mut self, ctx: &mut StrategyCtx, view: &View) -> Vec<u32>;
}

pub trait SpyStrategy {
    fn name(&self) -> &'static str;
    /// Initial positions, chosen after seeing the revolutionary placement.
    fn place(&mut self, ctx: &mut StrategyCtx, rev: &[u32]) -> Vec<u32>;
    /// Destinations for all tokens; view holds post-move revolutionary
    /// positions and current spy positions.
    fn moves(&mut self, ctx: &mut StrategyCtx, view: &View) -> Vec<u32>;
}

/// Typed events strategies may emit into the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceEvent {
    /// The spy dispatcher could not saturate the unguarded meetings.
    MatchingFailed { round: u32, unmatched: Vec<u32> },
    /// A revolutionary witness query came back empty; the group stalls.
    WitnessNotFound { round: u32, detail: String },
    /// The matching-set search did not certify; play proceeds with the best
    /// candidate.
    UncertifiedMatchingSet { required: u32, achieved: u32 },
    /// A strategy emitted an illegal move and forfeits.
    RuleViolation {
        round: u32,
        team: Team,
        token: u32,
        from: u32,
        to: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub rev: Vec<u32>,
    pub spy: Vec<u32>,
    pub unguarded: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// An unguarded meeting occurred at the stamped round.
    Revolutionaries,
    /// The horizon was exhausted without an unguarded meeting; not a proof
    /// that the spies win the infinite game.
    SpiesSurvived,
    /// The revolutionary strategy emitted an illegal move.
    RevForfeit,
    /// The spy strategy emitted an illegal move.
    SpyForfeit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub n: u32,
    pub config: GameConfig,
    pub seed: u64,
    pub rev_strategy: String,
    pub spy_strategy: String,
    pub rounds: Vec<RoundRecord>,
    pub verdict: Verdict,
    pub winning_round: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    pub verdict: Verdict,
    pub winning_round: Option<u32>,
    pub trace: Trace,
}

/// Run a full game. Both strategies receive private streams derived from
/// `seed` (tags "rev" and "spy"), so a fixed seed with deterministic
/// strategies reproduces the trace bit for bit.
pub fn play(
    g: &Graph,
    config: &GameConfig,
    rev: &mut dyn RevStrategy,
    spy: &mut dyn SpyStrategy,
    seed: u64,
) -> GameResult {
    let mut rev_rng = SplitMix64::new(derive_seed(seed, "rev", 0));
    let mut spy_rng = SplitMix64::new(derive_seed(seed, "spy", 0));
    let mut trace = Trace {
        n: g.n(),
        config: *config,
        seed,
        rev_strategy: rev.name().to_string(),
        spy_strategy: spy.name().to_string(),
        rounds: Vec::new(),
        verdict: Verdict::SpiesSurvived,
        winning_round: None,
    };
    let mut events: Vec<TraceEvent> = Vec::new();

    let finish = |mut trace: Trace, verdict: Verdict, round: Option<u32>| {
        trace.verdict = verdict;
        trace.winning_round = round;
        GameResult {
            verdict,
            winning_round: round,
            trace,
        }
    };

    // round 1: placement
    let rev_pos = {
        let mut ctx = StrategyCtx {
            g,
            config,
            rng: &mut rev_rng,
            events: &mut events,
        };
        rev.place(&mut ctx)
    };
    if rev_pos.len() != config.r as usize || rev_pos.iter().any(|&v| v >= g.n()) {
        events.push(TraceEvent::RuleViolation {
            round: 1,
            team: Team::Revolutionaries,
            token: 0,
            from: 0,
            to: 0,
        });
        trace.rounds.push(RoundRecord {
            round: 1,
            rev: rev_pos,
            spy: vec![],
            unguarded: vec![],
            events,
        });
        return finish(trace, Verdict::RevForfeit, Some(1));
    }
    let spy_pos = {
        let mut ctx = StrategyCtx {
            g,
            config,
            rng: &mut spy_rng,
            events: &mut events,
        };
        spy.place(&mut ctx, &rev_pos)
    };
    if spy_pos.len() != config.s as usize || spy_pos.iter().any(|&v| v >= g.n()) {
        events.push(TraceEvent::RuleViolation {
            round: 1,
            team: Team::Spies,
            token: 0,
            from: 0,
            to: 0,
        });
        trace.rounds.push(RoundRecord {
            round: 1,
            rev: rev_pos,
            spy: spy_pos,
            unguarded: vec![],
            events,
        });
        return finish(trace, Verdict::SpyForfeit, Some(1));
    }
    let mut state = GameState {
        rev: rev_pos,
        spy: spy_pos,
        round: 1,
        phase: Phase::RoundEnd,
    };

    loop {
        // inspect the position at round end
        let unguarded = unguarded_meetings(&state, config.m);
        trace.rounds.push(RoundRecord {
            round: state.round,
            rev: state.rev.clone(),
            spy: state.spy.clone(),
            unguarded: unguarded.iter().collect(),
            events: std::mem::take(&mut events),
        });
        if !unguarded.is_empty() {
            return finish(trace, Verdict::Revolutionaries, Some(state.round));
        }
        if state.round >= config.horizon {
            return finish(trace, Verdict::SpiesSurvived, None);
        }

        // next round: revolutionaries move first
        let round = state.round + 1;
        let rev_moves = {
            let mut ctx = StrategyCtx {
                g,
                config,
                rng: &mut rev_rng,
                events: &mut events,
            };
            let view = View {
                round,
                rev: &state.rev,
                spy: &state.spy,
            };
            rev.moves(&mut ctx, &view)
        };
        if let Err(e) = validate_moves(g, Team::Revolutionaries, &state.rev, &rev_moves, round) {
            record_violation(&mut events, &e);
            trace.rounds.push(RoundRecord {
                round,
                rev: state.rev.clone(),
                spy: state.spy.clone(),
                unguarded: vec![],
                events,
            });
            return finish(trace, Verdict::RevForfeit, Some(round));
        }
        // spies see the committed revolutionary moves
        let spy_moves = {
            let mut ctx = StrategyCtx {
                g,
                config,
                rng: &mut spy_rng,
                events: &mut events,
            };
            let view = View {
                round,
                rev: &rev_moves,
                spy: &state.spy,
            };
            spy.moves(&mut ctx, &view)
        };
        if let Err(e) = validate_moves(g, Team::Spies, &state.spy, &spy_moves, round) {
            record_violation(&mut events, &e);
            trace.rounds.push(RoundRecord {
                round,
                rev: rev_moves,
                spy: state.spy.clone(),
                unguarded: vec![],
                events,
            });
            return finish(trace, Verdict::SpyForfeit, Some(round));
        }
        state = GameState {
            rev: rev_moves,
            spy: spy_moves,
            round,
            phase: Phase::RoundEnd,
        };
    }
}

fn record_violation(events: &mut Vec<TraceEvent>, e: &GameError) {
    if let GameError::RuleViolation {
        team,
        token,
        from,
        to,
        round,
    } = e
    {
        events.push(TraceEvent::RuleViolation {
            round: *round,
            team: *team,
            token: *token as u32,
            from: *from,
            to: *to,
        });
    }
}

/// Re-validate a trace against a graph: every recorded move must be legal,
/// token counts must be conserved, and the verdict must match the recorded
/// meetings. Returns the verdict it reconstructs.
pub fn replay(g: &Graph, trace: &Trace) -> Result<Verdict, GameError> {
    let m = trace.config.m;
    for (i, rec) in trace.rounds.iter().enumerate() {
        // token conservation (forfeit rounds may truncate the loser's vector)
        let last = i + 1 == trace.rounds.len();
        if !last
            || matches!(
                trace.verdict,
                Verdict::Revolutionaries | Verdict::SpiesSurvived
            )
        {
            if rec.rev.len() != trace.config.r as usize {
                return Err(GameError::WrongArity {
                    team: Team::Revolutionaries,
                    got: rec.rev.len(),
                    expected: trace.config.r as usize,
                });
            }
            if rec.spy.len() != trace.config.s as usize {
                return Err(GameError::WrongArity {
                    team: Team::Spies,
                    got: rec.spy.len(),
                    expected: trace.config.s as usize,
                });
            }
        }
        if i > 0 {
            let prev = &trace.rounds[i - 1];
            validate_moves(g, Team::Revolutionaries, &prev.rev, &rec.rev, rec.round)?;
            validate_moves(g, Team::Spies, &prev.spy, &rec.spy, rec.round)?;
        }
        let state = GameState {
            rev: rec.rev.clone(),
            spy: rec.spy.clone(),
            round: rec.round,
            phase: Phase::RoundEnd,
        };
        let unguarded: Vec<u32> = unguarded_meetings(&state, m).iter().collect();
        if unguarded != rec.unguarded {
            return Err(GameError::BadPlacement(rec.round));
        }
        if !unguarded.is_empty() {
            return if trace.verdict == Verdict::Revolutionaries
                && trace.winning_round == Some(rec.round)
                && i + 1 == trace.rounds.len()
            {
                Ok(Verdict::Revolutionaries)
            } else {
                Err(GameError::BadPlacement(rec.round))
            };
        }
    }
    Ok(trace.verdict)
}
