//! Revolutionaries and Spies on graphs: game engine, constructive
//! strategies, graph-property checkers, an exact small-instance solver, and
//! a Monte Carlo sweep harness.
//!
//! * [`graph`] — immutable graphs, BFS machinery, seeded G(n,p) sampling
//! * [`properties`] — exact/sampled/certified checkers for the witness
//!   adjacency properties and set bounds the game analysis uses
//! * [`game`] — the round-structured game with replayable traces
//! * [`strategies`] — the three-team spy defense, the witness-growth
//!   offenses, and the baselines
//! * [`solver`] — exact decision of the infinite game on tiny instances
//! * [`experiments`] — regime classification, sweeps, threshold scans
//! * [`smallgraphs`] — exhaustive tiny-graph enumeration up to isomorphism
//! * [`cli`] — the `revspy` binary

pub mod cli;
pub mod experiments;
pub mod game;
pub mod graph;
pub mod properties;
pub mod rng;
pub mod smallgraphs;
pub mod solver;
pub mod strategies;
