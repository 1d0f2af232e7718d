use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::parallel::StrategyKind;
use crate::stats::SuccessSummary;

use super::records::RunRecord;

/// Success statistics of one (scenario set, strategy, workers, budget) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenario: String,
    pub strategy: StrategyKind,
    pub workers: usize,
    pub budget: usize,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub band_lo: f64,
    pub band_hi: f64,
}

type GroupKey = (String, StrategyKind, usize, usize);

fn summarize(groups: BTreeMap<GroupKey, Vec<bool>>) -> Vec<AggregateRow> {
    groups
        .into_iter()
        .map(|((scenario, strategy, workers, budget), flags)| {
            let s = SuccessSummary::from_flags(&flags).expect("groups are non-empty");
            AggregateRow {
                scenario,
                strategy,
                workers,
                budget,
                runs: s.n,
                mean: s.mean,
                std: s.std,
                band_lo: s.band_lo,
                band_hi: s.band_hi,
            }
        })
        .collect()
}

/// Groups records per scenario, strategy, worker count and budget.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<GroupKey, Vec<bool>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.scenario.clone(), r.strategy, r.workers, r.budget))
            .or_default()
            .push(r.success);
    }
    summarize(groups)
}

/// Name of the pooled scenario set: scenario names joined with `+`.
pub fn scenario_set_name(scenarios: &[&str]) -> String {
    scenarios.join("+")
}

/// Like [`aggregate`] but pools the given scenarios into one set.
pub fn aggregate_pooled(records: &[RunRecord], scenarios: &[&str]) -> Vec<AggregateRow> {
    let name = scenario_set_name(scenarios);
    let mut groups: BTreeMap<GroupKey, Vec<bool>> = BTreeMap::new();
    for r in records.iter().filter(|r| scenarios.contains(&r.scenario.as_str())) {
        groups
            .entry((name.clone(), r.strategy, r.workers, r.budget))
            .or_default()
            .push(r.success);
    }
    summarize(groups)
}

pub fn write_aggregate_csv<W: Write>(writer: W, rows: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Row of a scalability table: one strategy/worker curve against the
/// single-threaded baseline at the same budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
struct CurveRow {
    budget: usize,
    log10_budget: f64,
    strategy: StrategyKind,
    workers: usize,
    mean: f64,
    std: f64,
    baseline_mean: Option<f64>,
    baseline_band_lo: Option<f64>,
    baseline_band_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct DetailRow {
    scenario: String,
    budget: usize,
    log10_budget: f64,
    workers: usize,
    mean: f64,
    std: f64,
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn curve_rows(rows: &[AggregateRow], filter: impl Fn(&AggregateRow) -> bool) -> Vec<CurveRow> {
    let baseline: BTreeMap<usize, &AggregateRow> = rows
        .iter()
        .filter(|r| r.strategy == StrategyKind::Single)
        .map(|r| (r.budget, r))
        .collect();
    let mut out: Vec<CurveRow> = rows
        .iter()
        .filter(|r| filter(r))
        .map(|r| {
            let b = baseline.get(&r.budget);
            CurveRow {
                budget: r.budget,
                log10_budget: (r.budget as f64).log10(),
                strategy: r.strategy,
                workers: r.workers,
                mean: r.mean,
                std: r.std,
                baseline_mean: b.map(|b| b.mean),
                baseline_band_lo: b.map(|b| b.band_lo),
                baseline_band_hi: b.map(|b| b.band_hi),
            }
        })
        .collect();
    out.sort_by(|a, b| (a.strategy, a.workers, a.budget).cmp(&(b.strategy, b.workers, b.budget)));
    out
}

/// Writes plot-ready tables into `dir` and returns the files written.
///
/// * `scalability_<strategy>.csv`: one curve per worker count over
///   budgets, pooled over the non-easy scenarios, with the single-threaded
///   baseline mean and 2σ band.
/// * `comparison.csv`: every parallel strategy at its largest worker count.
/// * `single_detail.csv` and `<strategy>_detail.csv`: per-scenario success
///   by budget for the baseline and for every worker count.
/// * `axes.json`: axis annotations (the budget axis is logarithmic).
pub fn write_plot_data(records: &[RunRecord], scored: &[&str], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let scored: Vec<&str> = if scored.is_empty() {
        let mut all: Vec<&str> = records.iter().map(|r| r.scenario.as_str()).collect();
        all.sort_unstable();
        all.dedup();
        all
    } else {
        scored.to_vec()
    };
    let pooled = aggregate_pooled(records, &scored);

    let mut kinds: Vec<StrategyKind> = pooled.iter().map(|r| r.strategy).collect();
    kinds.sort();
    kinds.dedup();
    for kind in kinds.iter().filter(|k| **k != StrategyKind::Single) {
        let path = dir.join(format!("scalability_{kind}.csv"));
        write_rows(&path, &curve_rows(&pooled, |r| r.strategy == *kind))?;
        written.push(path);
    }

    let max_workers: BTreeMap<StrategyKind, usize> =
        pooled.iter().fold(BTreeMap::new(), |mut m, r| {
            let e = m.entry(r.strategy).or_insert(0);
            *e = (*e).max(r.workers);
            m
        });
    let path = dir.join("comparison.csv");
    write_rows(
        &path,
        &curve_rows(&pooled, |r| {
            r.strategy != StrategyKind::Single && Some(&r.workers) == max_workers.get(&r.strategy)
        }),
    )?;
    written.push(path);

    let per_scenario = aggregate(records);
    for kind in &kinds {
        let rows: Vec<DetailRow> = per_scenario
            .iter()
            .filter(|r| r.strategy == *kind)
            .map(|r| DetailRow {
                scenario: r.scenario.clone(),
                budget: r.budget,
                log10_budget: (r.budget as f64).log10(),
                workers: r.workers,
                mean: r.mean,
                std: r.std,
            })
            .collect();
        let path = dir.join(format!("{kind}_detail.csv"));
        write_rows(&path, &rows)?;
        written.push(path);
    }

    let axes = serde_json::json!({
        "x": { "column": "budget", "label": "iterations", "scale": "log10" },
        "y": { "column": "mean", "label": "success rate", "range": [0.0, 1.0] },
        "band": "baseline mean ± 2σ (sample standard deviation over repetitions)",
        "scenario_set": scenario_set_name(&scored),
    });
    let path = dir.join("axes.json");
    std::fs::write(&path, serde_json::to_string_pretty(&axes)?)?;
    written.push(path);
    Ok(written)
}
