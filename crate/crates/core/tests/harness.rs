//! End-to-end runs of a small experiment plan.

use std::collections::HashSet;

use pcmcts::harness::{
    aggregate, episode_seed, read_csv, read_csv_file, run_plan, to_csv_string, write_csv_file,
    ExperimentPlan, RunRecord, CSV_HEADER,
};
use pcmcts::StrategyKind;

const SMOKE: &str = r#"
scenarios = ["merge-2a-easy", "narrow-5pct", "toy-parabola"]
strategies = ["single", "leaf_max"]
iteration_budgets = [20, 40]
worker_counts = [1, 2]
repetitions = 5
base_seed = 11
"#;

fn smoke_records() -> (ExperimentPlan, Vec<RunRecord>) {
    let plan = ExperimentPlan::from_toml_str(SMOKE).unwrap();
    let records = run_plan(&plan).unwrap().into_iter().map(|r| r.record).collect();
    (plan, records)
}

#[test]
fn record_count_matches_plan() {
    let (plan, records) = smoke_records();
    assert_eq!(plan.expected_records(), 3 * 2 * 2 * 2 * 5);
    assert_eq!(records.len(), 120);

    // ordered by combination, then repetition
    let combos = plan.combinations();
    for (i, r) in records.iter().enumerate() {
        let c = &combos[i / 5];
        assert_eq!(r.rep, i % 5);
        assert_eq!((r.scenario.as_str(), r.strategy, r.budget), (c.scenario.as_str(), c.strategy, c.budget));
        assert_eq!(r.seed, episode_seed(plan.base_seed, c.index, r.rep));
        let expected_workers = if c.strategy == StrategyKind::Single { 1 } else { c.workers };
        assert_eq!(r.workers, expected_workers);
        assert!(r.steps >= 1 && r.wall_ms >= 0.0);
    }
    let seeds: HashSet<u64> = records.iter().map(|r| r.seed).collect();
    assert_eq!(seeds.len(), 120);
}

#[test]
fn csv_round_trip_is_lossless() {
    let (_, records) = smoke_records();
    let text = to_csv_string(&records).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(text.lines().count(), 121);
    assert_eq!(read_csv(text.as_bytes()).unwrap(), records);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    write_csv_file(&path, &records).unwrap();
    assert_eq!(read_csv_file(&path).unwrap(), records);
}

#[test]
fn reruns_reproduce_everything_but_timing() {
    let (_, a) = smoke_records();
    let (_, b) = smoke_records();
    let strip = |v: &[RunRecord]| v.iter().map(RunRecord::without_timing).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn aggregate_covers_every_group() {
    let (_, records) = smoke_records();
    let rows = aggregate(&records);
    // single collapses its two worker counts into one group of 10 runs
    assert_eq!(rows.len(), 3 * 2 * (1 + 2));
    let runs: usize = rows.iter().map(|r| r.runs).sum();
    assert_eq!(runs, 120);
    for r in &rows {
        let expected = if r.strategy == StrategyKind::Single { 10 } else { 5 };
        assert_eq!(r.runs, expected);
        assert!((0.0..=1.0).contains(&r.mean));
        assert!((r.band_hi - r.band_lo - 4.0 * r.std).abs() < 1e-12);
    }
}
