use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "scenario,strategy,workers,budget,rep,seed,success,steps,wall_ms";

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .output()
        .expect("bench runs")
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn run_from_flags_writes_one_row_per_rep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = bench(&[
        "run", "--scenario", "toy-parabola", "--strategy", "leaf_max", "--workers", "2",
        "--iterations", "50", "--reps", "4", "--seed", "9", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = lines(&out);
    assert_eq!(rows[0], HEADER);
    assert_eq!(rows.len(), 5);
    for (rep, row) in rows[1..].iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(&f[..5], &["toy-parabola", "leaf_max", "2", "50", &rep.to_string()]);
    }
}

#[test]
fn run_without_out_prints_csv() {
    let o = bench(&["run", "--scenario", "toy-parabola", "--iterations", "20", "--reps", "2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn plan_file_then_aggregate_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    let results = dir.path().join("results.csv");
    std::fs::write(
        &plan,
        format!(
            r#"
scenarios = ["toy-parabola", "narrow-5pct"]
strategies = ["single", "root_vote"]
iteration_budgets = [20]
worker_counts = [2]
repetitions = 3
base_seed = 4
output = "{}"
"#,
            results.display()
        ),
    )
    .unwrap();
    let o = bench(&["run", "--plan", plan.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&results).len(), 1 + 2 * 2 * 3);

    let summary = dir.path().join("summary.csv");
    let o = bench(&["aggregate", "--in", results.to_str().unwrap(), "--out", summary.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(lines(&summary).len(), 1 + 4);

    let plots = dir.path().join("plots");
    let o = bench(&["plot-data", "--in", results.to_str().unwrap(), "--out", plots.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(plots.join("comparison.csv").exists());
}

#[test]
fn invalid_plans_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("bad.toml");
    std::fs::write(&plan, "scenarios = []\nstrategies = [\"single\"]\niteration_budgets = [10]\nworker_counts = [1]\nrepetitions = 1\nbase_seed = 0\n").unwrap();
    assert_eq!(bench(&["run", "--plan", plan.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(bench(&["run", "--plan", "/no/such/plan.toml"]).status.code(), Some(1));
    assert_eq!(bench(&["run", "--scenario", "no-such-preset", "--reps", "1"]).status.code(), Some(1));
    assert_eq!(bench(&["run", "--scenario", "toy-parabola", "--strategy", "bogus"]).status.code(), Some(1));
    assert_eq!(bench(&["run", "--bogus-flag"]).status.code(), Some(1));
}

#[test]
fn unreadable_results_are_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = bench(&["aggregate", "--in", "/no/such/results.csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
