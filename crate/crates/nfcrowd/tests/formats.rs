use nfcrowd::config::parse_config;
use nfcrowd::output::{receipts_csv, render_run, Format};
use nfcrowd::vectors;
use nfcrowd_core::harness::{run_scenario_full, ScenarioReport};
use nfcrowd_core::ledger::Mode;
use nfcrowd_core::offchain::{Behavior, Strategy};

#[test]
fn config_defaults_and_strategies() {
    let cfg = parse_config(
        r#"{"mode": "nfcrowd", "designers": 3, "reviewers": 4,
            "client": ["withhold_roots", {"exclude_entries": [2]}],
            "reviewer_strategies": {"1": ["double_vote"]}}"#,
    )
    .unwrap();
    assert_eq!(cfg.mode, Mode::NfCrowd);
    assert_eq!(cfg.reward_usd, 500.0);
    assert_eq!(cfg.chunk_size, 50);
    assert_eq!((cfg.phase_spacing, cfg.delta, cfg.tick), (100, 10, 1));
    assert!(cfg.client.has(&Behavior::WithholdRoots));
    assert_eq!(cfg.client.excluded_entries(), [2].into());
    assert_eq!(cfg.reviewer_strategy(1), Strategy::of([Behavior::DoubleVote]));
    assert!(cfg.reviewer_strategy(0).is_honest());

    assert!(parse_config(r#"{"mode": "nfcrowd", "designers": 3, "reviewers": 4, "delta": 60}"#).is_err());
    assert!(parse_config(r#"{"mode": "nfcrowd", "designers": 3, "reviewers": 4, "client": ["double_vote"]}"#).is_err());
}

#[test]
fn report_json_round_trips() {
    let cfg = parse_config(r#"{"mode": "nfcrowd", "designers": 2, "reviewers": 3}"#).unwrap();
    let run = run_scenario_full(&cfg).unwrap();
    let json = render_run(&run.report, Format::Json).unwrap();
    let back: ScenarioReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, run.report);

    let csv = receipts_csv(run.world.ledger.receipts()).unwrap();
    assert_eq!(csv.lines().count(), 1 + run.world.ledger.receipts().len());
}

#[test]
fn hash_vectors_match_reference_digests() {
    let v = vectors::vectors();
    // Keccak-256 of "" and "abc" from the reference implementation.
    assert_eq!(v[0].to_string(), "0xc5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
    assert_eq!(v[1].to_string(), "0x4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
    assert_eq!(vectors::parse(&vectors::render(&v)), Some(v.clone()));
    let pinned = include_str!("../testdata/vectors.txt");
    assert_eq!(vectors::parse(pinned), Some(v));
    assert_eq!(vectors::parse("0x12\n"), None);
}
