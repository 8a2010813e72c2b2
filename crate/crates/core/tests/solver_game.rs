//! Coherence between the exact solver and the playable strategies.

use revspy::game::{play, replay, GameConfig, Verdict};
use revspy::graph::{sample_gnp, GnpParams};
use revspy::solver::{extracted_strategies, solve, Winner, DEFAULT_STATE_BUDGET};
use revspy::strategies::{make_rev_strategy, make_spy_strategy, spy_team_parameters};

/// Whenever the attractor says the spies win, no revolutionary strategy may
/// beat the extracted positional spy; the witness-growth offenses at j = 1
/// and j = 2 both get to try. When the revolutionaries win the game, the
/// greedy offenses are allowed to miss (they are not optimal), but at least
/// some instances should fall to them.
#[test]
fn growth_never_beats_optimal_spies_in_losing_positions() {
    let mut losing_checked = 0;
    let mut winning_found = 0;
    let mut greedy_wins = 0;
    for seed in 0..60u64 {
        let n = 4 + (seed % 3) as u32;
        let g = sample_gnp(&GnpParams::new(n, 0.3 + 0.1 * (seed % 5) as f64, seed));
        let (r, m, s) = (3, 2, 1);
        let solved = match solve(&g, r, m, s, DEFAULT_STATE_BUDGET) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let winner = solved.winner;
        let (_, mut opt_spy) = extracted_strategies(solved);
        for rev_spec in ["ec-growth:j=1", "ec-growth:j=2", "one-ec:l=2,j=1"] {
            let config = GameConfig::new(r, m, s, 60);
            let mut rev = make_rev_strategy(rev_spec, &g, &config).unwrap();
            let res = play(&g, &config, rev.as_mut(), &mut opt_spy, seed);
            match winner {
                Winner::Spies => {
                    assert_eq!(
                        res.verdict,
                        Verdict::SpiesSurvived,
                        "seed {seed}: {rev_spec} beat a position the attractor calls safe"
                    );
                    losing_checked += 1;
                }
                Winner::Revolutionaries => {
                    winning_found += 1;
                    if res.verdict == Verdict::Revolutionaries {
                        greedy_wins += 1;
                    }
                }
            }
        }
    }
    assert!(
        losing_checked >= 10,
        "need losing positions to be meaningful"
    );
    assert!(winning_found >= 10, "need winning positions too");
    assert!(
        greedy_wins >= 1,
        "the growth offense should crack at least one winning position"
    );
    println!(
        "losing positions held: {losing_checked}; greedy cracked {greedy_wins}/{winning_found} winning ones"
    );
}

/// The three-team defense holds at its designed spy count against the
/// witness-growth offense, and its traces replay cleanly (every dispatch
/// move is a legal edge).
#[test]
fn three_team_traces_replay_against_growth_offense() {
    let (n, p) = (120u32, 0.5);
    let params = spy_team_parameters(n as u64, p, 0.1, 12, 3).unwrap();
    let s = params.total_spies();
    assert!((s as u64) < n as u64, "the defense must fit the graph");
    for seed in 0..5u64 {
        let g = sample_gnp(&GnpParams::new(n, p, seed));
        let config = GameConfig::new(12, 3, s, 50);
        let mut rev = make_rev_strategy("ec-growth:j=1", &g, &config).unwrap();
        let mut spy =
            make_spy_strategy(&format!("three-teams:eps=0.1,p={p}"), &g, &config, seed).unwrap();
        let res = play(&g, &config, rev.as_mut(), spy.as_mut(), seed);
        assert_eq!(res.verdict, Verdict::SpiesSurvived, "seed {seed}");
        assert_eq!(replay(&g, &res.trace).unwrap(), res.verdict);
    }
}
