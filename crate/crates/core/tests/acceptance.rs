//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measurements (run with `--nocapture` to see them).
//!
//! Where a criterion quantifies over a property that turns out to hold for
//! no seed at the stated size, the test states the vacuity loudly and a
//! supplementary test exercises the same implication at a size where the
//! property does occur.

use std::process::Command;
use std::time::Instant;

use revspy::game::{play, GameConfig, TraceEvent, Verdict};
use revspy::graph::{gnp_neighbors, sample_gnp, GnpParams, VertexSet};
use revspy::properties::{check_ec, CheckMode, EcVariant, Verdict as PVerdict, DEFAULT_BUDGET};
use revspy::rng::{derive_seed, SplitMix64};
use revspy::smallgraphs::{connected_graphs, trees, unicyclic};
use revspy::solver::{spy_number_exact, verify_trivial_bounds, DEFAULT_STATE_BUDGET};
use revspy::strategies::{
    make_rev_strategy, make_spy_strategy, spy_team_parameters, REV_BASELINES, SPY_BASELINES,
};

#[test]
fn criterion_1_trivial_bounds_all_connected_graphs_up_to_5() {
    let t0 = Instant::now();
    let mut checked = 0;
    for n in 1..=5 {
        for g in connected_graphs(n) {
            for r in 1..=3 {
                for m in 1..=2 {
                    let rep = verify_trivial_bounds(&g, r, m, DEFAULT_STATE_BUDGET)
                        .expect("tiny instances fit the budget");
                    assert!(
                        rep.lower_ok && rep.upper_ok,
                        "bounds violated on n={n} r={r} m={m}: sigma={} lower={} upper={}",
                        rep.sigma,
                        rep.lower,
                        rep.upper
                    );
                    checked += 1;
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 300.0, "criterion 1 must finish in under 5 minutes");
    println!("ACCEPTANCE 1 trivial-bounds: PASS ({checked} instances, {secs:.1}s)");
}

#[test]
fn criterion_2_trees_and_unicyclic() {
    let t0 = Instant::now();
    let mut tree_checked = 0;
    for n in 1..=7 {
        for g in trees(n) {
            for r in 1..=4u32 {
                for m in 1..=3u32 {
                    let sigma = spy_number_exact(&g, r, m, DEFAULT_STATE_BUDGET).unwrap();
                    let expected = (r / m).min(g.n());
                    assert_eq!(
                        sigma, expected,
                        "tree n={n} r={r} m={m}: sigma={sigma}, expected floor(r/m)={expected}"
                    );
                    tree_checked += 1;
                }
            }
        }
    }
    let mut uni_checked = 0;
    for n in 3..=6 {
        for g in unicyclic(n) {
            for r in 1..=4u32 {
                for m in 1..=3u32 {
                    let sigma = spy_number_exact(&g, r, m, DEFAULT_STATE_BUDGET).unwrap();
                    let cap = (r / m).min(g.n()) + 1;
                    assert!(
                        sigma <= cap,
                        "unicyclic n={n} r={r} m={m}: sigma={sigma} above floor(r/m)+1={cap}"
                    );
                    uni_checked += 1;
                }
            }
        }
    }
    println!(
        "ACCEPTANCE 2 tree/unicyclic: PASS ({tree_checked} tree + {uni_checked} unicyclic instances, {:.1}s)",
        t0.elapsed().as_secs_f64()
    );
}

/// The frozen tiny corpus: 50 seeded G(n,p) samples with n <= 8.
fn tiny_corpus() -> Vec<(GnpParams, revspy::graph::Graph)> {
    let ps = [0.15, 0.3, 0.5, 0.7, 0.85];
    (0..50u64)
        .map(|i| {
            let params = GnpParams::new(
                5 + (i % 4) as u32,
                ps[(i / 4) as usize % ps.len()],
                derive_seed(0xC0FFEE, "tiny-corpus", i),
            );
            let g = sample_gnp(&params);
            (params, g)
        })
        .collect()
}

#[test]
fn criterion_3_ec_implications_on_tiny_corpus() {
    let t0 = Instant::now();
    // (variant, l, s, j, r, m): preconditions s <= r - m (pair variants) and
    // s <= r - m - l + 1 (anchored variants) hold with m = 2
    let cases = [
        (EcVariant::Ec, 2u32, 1u32, 1u32, 3u32, 2u32),
        (EcVariant::Ec, 2, 2, 1, 4, 2),
        (EcVariant::OneEc, 2, 1, 1, 4, 2),
        (EcVariant::EcJ, 2, 1, 2, 3, 2),
        (EcVariant::EcJ, 2, 1, 3, 3, 2),
        (EcVariant::OneEcJ, 2, 1, 2, 4, 2),
    ];
    let mut confirmed = 0;
    let mut implications = 0;
    for (params, g) in tiny_corpus() {
        for &(variant, l, s, j, r, m) in &cases {
            if g.n() < l + s + 2 {
                continue;
            }
            let rep = check_ec(&g, variant, l, s, j, CheckMode::Exact, DEFAULT_BUDGET)
                .expect("tiny exact checks fit the budget");
            if rep.verdict != PVerdict::Holds {
                continue;
            }
            confirmed += 1;
            let sigma = spy_number_exact(&g, r, m, DEFAULT_STATE_BUDGET).unwrap();
            assert!(
                sigma > s,
                "confirmed {variant:?}(l={l},k={s},j={j}) on n={} seed={} but sigma({r},{m})={sigma} < {}",
                params.n,
                params.seed,
                s + 1
            );
            implications += 1;
        }
    }
    assert_eq!(confirmed, implications);
    if confirmed == 0 {
        // At n <= 8 a (2,s) witness with s >= 1 must sit among at most 5
        // candidate vertices for each of hundreds of (A,B) queries; the
        // probability that every query succeeds is negligible at any p, and
        // the distance-j variants collide with diameters this small. The
        // zero-violation gate is met vacuously; the non-vacuous exercise of
        // the same implication lives in the criterion-6 supplement, where
        // G(128,1/2) seeds with the property exactly confirmed must be
        // beaten by the witness strategy.
        println!(
            "ACCEPTANCE 3 e.c. implications: PASS vacuously (0 instances confirm on the n <= 8 corpus, {:.1}s)",
            t0.elapsed().as_secs_f64()
        );
    } else {
        println!(
            "ACCEPTANCE 3 e.c. implications: PASS ({confirmed} exactly-confirmed instances, all imply sigma >= s+1, {:.1}s)",
            t0.elapsed().as_secs_f64()
        );
    }
}

#[test]
fn criterion_4_expansion_concentration() {
    let t0 = Instant::now();
    let n: u32 = 100_000;
    let p = 1526.0 / 99_999.0;
    let d = p * (n as f64 - 1.0); // exactly 1526
    let tol = 2.0 / (n as f64).ln();
    let expected = 3.0 * d;

    // tie the lazy row oracle to the materialized path once
    let consistency_params = GnpParams::new(n, p, derive_seed(4, "expansion-trial", 0));
    let g = sample_gnp(&consistency_params);
    for v in [0u32, 1, 99_999, 31_415] {
        assert_eq!(
            gnp_neighbors(&consistency_params, v),
            g.neighbors(v).to_vec(),
            "lazy row must equal the materialized row"
        );
    }
    {
        let s = VertexSet::from_unsorted(vec![10, 20, 30]);
        let ball = g.ball(&s, 1).unwrap();
        let mut lazy: Vec<u32> = s.iter().collect();
        for v in s.iter() {
            lazy.extend(gnp_neighbors(&consistency_params, v));
        }
        lazy.sort_unstable();
        lazy.dedup();
        assert_eq!(ball.as_slice(), &lazy[..]);
        let audit = revspy::properties::audit_expansion(&g, &s, 1, tol, Some(d), None).unwrap();
        assert_eq!(audit.ball_size as usize, lazy.len());
        assert!(audit.in_regime);
    }
    drop(g);

    let mut within = 0;
    for trial in 0..100u64 {
        let seed = derive_seed(4, "expansion-trial", trial);
        let params = GnpParams::new(n, p, seed);
        let mut rng = SplitMix64::new(derive_seed(seed, "expansion-set", 0));
        let s: Vec<u32> = rng
            .distinct_sorted(n as u64, 3)
            .into_iter()
            .map(|x| x as u32)
            .collect();
        let mut members: Vec<u32> = s.clone();
        for &v in &s {
            members.extend(gnp_neighbors(&params, v));
        }
        members.sort_unstable();
        members.dedup();
        let ratio = members.len() as f64 / expected;
        if (ratio - 1.0).abs() <= tol {
            within += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(
        within >= 99,
        "only {within}/100 trials inside (1 +- 2/ln n) * 3d"
    );
    assert!(secs < 120.0, "criterion 4 must finish in under 2 minutes");
    println!("ACCEPTANCE 4 expansion concentration: PASS ({within}/100 within band, {secs:.1}s)");
}

#[test]
fn criterion_5_spy_survival_at_theorem_scale() {
    let t0 = Instant::now();
    let (n, p, r, m, eps) = (1000u32, 0.5, 500u32, 10u32, 0.1);
    let params = spy_team_parameters(n as u64, p, eps, r, m).unwrap();
    let s = params.total_spies();
    // the team sizes must respect the guaranteed ceiling
    let ceiling = (r / m) as f64 + 2.0 * (2.0 + 2f64.sqrt() + eps) * params.elln;
    assert!(
        (s as f64) <= ceiling,
        "spy count {s} above the ceiling {ceiling}"
    );

    for baseline in REV_BASELINES {
        let mut good_seeds = 0;
        for seed in 0..20u64 {
            let g = sample_gnp(&GnpParams::new(
                n,
                p,
                derive_seed(seed, "survival-graph", 0),
            ));
            let config = GameConfig::new(r, m, s, 200);
            let mut rev = make_rev_strategy(baseline, &g, &config).unwrap();
            let mut spy =
                make_spy_strategy(&format!("three-teams:eps={eps},p={p}"), &g, &config, seed)
                    .unwrap();
            let res = play(&g, &config, rev.as_mut(), spy.as_mut(), seed);
            let matching_failures: usize = res
                .trace
                .rounds
                .iter()
                .map(|rec| {
                    rec.events
                        .iter()
                        .filter(|e| matches!(e, TraceEvent::MatchingFailed { .. }))
                        .count()
                })
                .sum();
            if res.verdict == Verdict::SpiesSurvived && matching_failures == 0 {
                good_seeds += 1;
            }
        }
        assert!(
            good_seeds >= 19,
            "vs {baseline}: only {good_seeds}/20 seeds survived with zero dispatch failures"
        );
        println!(
            "ACCEPTANCE 5 spy survival vs {baseline}: PASS ({good_seeds}/20 seeds, {:.1}s)",
            t0.elapsed().as_secs_f64()
        );
    }
}

/// Shared machinery for criterion 6 and its supplement: collect seeds whose
/// sample exactly satisfies the property, then demand the growth offense
/// beats every spy baseline on those seeds within the round cap.
#[allow(clippy::too_many_arguments)]
fn growth_wins_on_qualifying_seeds(
    n: u32,
    p: f64,
    k: u32,
    r: u32,
    m: u32,
    s: u32,
    seeds: std::ops::Range<u64>,
    cap: u32,
) -> (usize, usize) {
    let mut qualifying = 0;
    let mut winners = 0;
    for seed in seeds {
        let g = sample_gnp(&GnpParams::new(n, p, seed));
        let rep = check_ec(&g, EcVariant::Ec, 2, k, 1, CheckMode::Exact, DEFAULT_BUDGET)
            .expect("within budget");
        if rep.verdict != PVerdict::Holds {
            continue;
        }
        qualifying += 1;
        let mut all_won = true;
        for baseline in SPY_BASELINES {
            let config = GameConfig::new(r, m, s, cap);
            let mut rev = make_rev_strategy("ec-growth:j=1", &g, &config).unwrap();
            let mut spy = make_spy_strategy(baseline, &g, &config, seed).unwrap();
            let res = play(&g, &config, rev.as_mut(), spy.as_mut(), seed);
            if res.verdict != Verdict::Revolutionaries {
                all_won = false;
            }
        }
        if all_won {
            winners += 1;
        }
    }
    (qualifying, winners)
}

#[test]
fn criterion_6_revolutionary_success_below_threshold() {
    let t0 = Instant::now();
    let (qualifying, winners) = growth_wins_on_qualifying_seeds(64, 0.5, 2, 6, 4, 2, 1..41, 50);
    if qualifying == 0 {
        // At n = 64, p = 1/2 the exact (2,2) property holds for no seed: a
        // fixed disjoint (A,B) pair has no witness with probability
        // (1 - 1/16)^60 ~ 0.021 and there are ~3.8M pairs, so the expected
        // number of violating pairs is ~8e4. The criterion is vacuously
        // true; the supplementary test below runs the same implication at a
        // size where the property does occur.
        println!(
            "ACCEPTANCE 6 revolutionary success: PASS vacuously (0/40 seeds of G(64,1/2) are (2,2)-e.c.; see supplement, {:.1}s)",
            t0.elapsed().as_secs_f64()
        );
        return;
    }
    assert!(
        winners * 20 >= qualifying * 19,
        "only {winners}/{qualifying} qualifying seeds won against every baseline"
    );
    println!(
        "ACCEPTANCE 6 revolutionary success: PASS ({winners}/{qualifying} qualifying seeds, {:.1}s)",
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_6_supplement_nonvacuous_at_128() {
    let t0 = Instant::now();
    // G(128, 1/2) is (2,1)-e.c. for most seeds (expected violating pairs
    // ~0.04); with s = 1 <= r - m the win guarantee applies wherever the
    // property is exactly confirmed.
    let (qualifying, winners) = growth_wins_on_qualifying_seeds(128, 0.5, 1, 5, 4, 1, 0..20, 50);
    assert!(
        qualifying >= 10,
        "expected most seeds of G(128,1/2) to be (2,1)-e.c., got {qualifying}/20"
    );
    assert_eq!(
        winners, qualifying,
        "the growth offense must win on every exactly-confirmed seed"
    );
    println!(
        "ACCEPTANCE 6s supplement: PASS ({winners}/{qualifying} confirmed seeds all won, {:.1}s)",
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_7_sampled_never_contradicts_exact() {
    let t0 = Instant::now();
    let corpus: Vec<GnpParams> = (0..12u64)
        .map(|i| {
            GnpParams::new(
                [24u32, 32, 40][(i % 3) as usize],
                [0.3, 0.5, 0.7][(i / 3) as usize % 3],
                derive_seed(7, "midsize-corpus", i),
            )
        })
        .collect();
    let configs = [
        (EcVariant::Ec, 1u32, 1u32),
        (EcVariant::Ec, 2, 1),
        (EcVariant::Ec, 2, 2),
        (EcVariant::OneEc, 1, 1),
        (EcVariant::OneEc, 2, 1),
    ];
    let mut holds_checked = 0;
    let mut fails_checked = 0;
    for params in &corpus {
        let g = sample_gnp(params);
        for &(variant, l, k) in &configs {
            let exact = check_ec(&g, variant, l, k, 1, CheckMode::Exact, DEFAULT_BUDGET)
                .expect("within budget at n <= 40");
            match exact.verdict {
                PVerdict::Holds => {
                    holds_checked += 1;
                    for seed in [1u64, 99] {
                        let sampled = check_ec(
                            &g,
                            variant,
                            l,
                            k,
                            1,
                            CheckMode::Sampled {
                                trials: 10_000,
                                seed,
                            },
                            DEFAULT_BUDGET,
                        )
                        .unwrap();
                        assert_eq!(
                            sampled.verdict,
                            PVerdict::Inconclusive,
                            "sampled refutation contradicts an exact holds: n={} {variant:?}({l},{k})",
                            params.n
                        );
                    }
                }
                PVerdict::Fails => {
                    fails_checked += 1;
                    // the exact counterexample re-verifies: no witness exists
                    if let Some(revspy::properties::Witness::EcQuery { v, a, b }) = exact.witness {
                        let q = revspy::properties::EcQuery {
                            variant,
                            v,
                            a: VertexSet::from_unsorted(a),
                            b: VertexSet::from_unsorted(b),
                            j: 1,
                        };
                        assert_eq!(revspy::properties::find_witness(&g, &q).unwrap(), None);
                    } else {
                        panic!("failing exact check must carry a query witness");
                    }
                }
                other => panic!("exact mode returned {other:?}"),
            }
        }
    }
    assert!(holds_checked >= 5, "corpus must exercise the holds side");
    assert!(fails_checked >= 5, "corpus must exercise the fails side");
    println!(
        "ACCEPTANCE 7 oracle equivalence: PASS ({holds_checked} holds x 2 seeds x 10^4 trials, {fails_checked} fails re-verified, {:.1}s)",
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_8_bit_reproducibility() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_revspy");
    let dir = std::env::temp_dir().join("revspy-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let run = |args: &[&str]| -> Vec<u8> {
        let out = Command::new(bin).args(args).output().expect("binary runs");
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };

    let gen_args = ["gen", "--n", "2000", "--p", "0.3", "--seed", "42"];
    assert_eq!(run(&gen_args), run(&gen_args), "gen not reproducible");

    let gpath = dir.join("repro.graph");
    std::fs::write(
        &gpath,
        run(&["gen", "--n", "200", "--p", "0.4", "--seed", "9"]),
    )
    .unwrap();
    let g = gpath.to_str().unwrap();
    let play_args = [
        "play",
        "--graph",
        g,
        "--r",
        "24",
        "--m",
        "4",
        "--s",
        "4",
        "--rev",
        "greedy",
        "--spy",
        "random",
        "--horizon",
        "80",
        "--seed",
        "5",
    ];
    assert_eq!(run(&play_args), run(&play_args), "play not reproducible");

    let cfg = dir.join("repro.conf");
    std::fs::write(
        &cfg,
        "n = 20\np = 0.5\nr = 4\nm = 2\ntrials = 3\nseed = 11\nhorizon = 40\nsampled_trials = 200\n",
    )
    .unwrap();
    let sweep_args = ["sweep", "--config", cfg.to_str().unwrap()];
    assert_eq!(run(&sweep_args), run(&sweep_args), "sweep not reproducible");

    println!(
        "ACCEPTANCE 8 bit-reproducibility: PASS (gen, play, sweep byte-identical, {:.1}s)",
        t0.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_9_regime_classifier_spot_checks() {
    use revspy::experiments::{classify_regime, Regime};
    let t0 = Instant::now();

    let pred = classify_regime(10_000, 0.5, 10_000, 10, None).unwrap();
    assert_eq!(pred.regime, Regime::RatioScale);
    assert_eq!(pred.prediction, Some(1000.0));

    let pred = classify_regime(10_000, 0.5, 12, 10, None).unwrap();
    assert_eq!(pred.regime, Regime::ExactGap);
    assert_eq!(pred.prediction, Some(3.0));

    let n = 10_000u64;
    let p = (n as f64).powf(-0.6);
    let gap = (n as f64).powf(0.7).round() as u32;
    let pred = classify_regime(n, p, gap + 1, 1, None).unwrap();
    assert_eq!(pred.regime, Regime::OutOfRange);
    assert_eq!(pred.prediction, None);

    println!(
        "ACCEPTANCE 9 regime spot checks: PASS (3/3 pinned labels and predictions, {:.2}s)",
        t0.elapsed().as_secs_f64()
    );
}
