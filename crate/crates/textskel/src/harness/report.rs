use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::harness::HarnessError;
use crate::metrics::{CellSummary, METRICS};

pub const MISSING_CELL: &str = "—";

pub fn write_summary(path: &Path, rows: &[CellSummary]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Vec<CellSummary>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<Result<Vec<CellSummary>, _>>()?;
    Ok(rows)
}

fn lower_is_better(metric: &str) -> bool {
    metric == "cer"
}

/// Strategies in first-appearance order and rates in descending order.
fn axes(rows: &[&CellSummary]) -> (Vec<String>, Vec<f64>) {
    let mut strategies: Vec<String> = Vec::new();
    let mut rates: Vec<f64> = Vec::new();
    for r in rows {
        if !strategies.contains(&r.strategy) {
            strategies.push(r.strategy.clone());
        }
        if !rates.contains(&r.r_keep) {
            rates.push(r.r_keep);
        }
    }
    rates.sort_by(|a, b| b.total_cmp(a));
    (strategies, rates)
}

/// Markdown table of cell means: strategies × rates, best entry per column
/// in bold (lowest for CER, highest otherwise). `None` when the metric has no
/// rows.
pub fn metric_table(rows: &[CellSummary], metric: &str) -> Option<String> {
    let rows: Vec<&CellSummary> = rows.iter().filter(|r| r.metric == metric).collect();
    if rows.is_empty() {
        return None;
    }
    let (strategies, rates) = axes(&rows);
    let cell = |s: &str, r: f64| {
        rows.iter()
            .find(|x| x.strategy == s && x.r_keep == r)
            .map(|x| x.mean)
    };
    let best: Vec<Option<f64>> = rates
        .iter()
        .map(|&r| {
            let vals = strategies.iter().filter_map(|s| cell(s, r));
            if lower_is_better(metric) {
                vals.min_by(f64::total_cmp)
            } else {
                vals.max_by(f64::total_cmp)
            }
        })
        .collect();

    let mut out = String::from("| strategy |");
    for r in &rates {
        write!(out, " {r} |").unwrap();
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(rates.len()));
    out.push('\n');
    for s in &strategies {
        write!(out, "| {s} |").unwrap();
        for (j, &r) in rates.iter().enumerate() {
            match cell(s, r) {
                Some(v) if Some(v) == best[j] => write!(out, " **{v:.3}** |").unwrap(),
                Some(v) => write!(out, " {v:.3} |").unwrap(),
                None => write!(out, " {MISSING_CELL} |").unwrap(),
            }
        }
        out.push('\n');
    }
    Some(out)
}

/// Tab-separated x/y series, one block of rows per strategy in ascending
/// `r_keep`.
pub fn metric_series(rows: &[CellSummary], metric: &str) -> Option<String> {
    let rows: Vec<&CellSummary> = rows.iter().filter(|r| r.metric == metric).collect();
    if rows.is_empty() {
        return None;
    }
    let (strategies, _) = axes(&rows);
    let mut out = String::from("strategy\tr_keep\tmean\tci_low\tci_high\n");
    for s in &strategies {
        let mut pts: Vec<&&CellSummary> = rows.iter().filter(|r| &r.strategy == s).collect();
        pts.sort_by(|a, b| a.r_keep.total_cmp(&b.r_keep));
        for p in pts {
            writeln!(out, "{s}\t{}\t{}\t{}\t{}", p.r_keep, p.mean, p.ci_low, p.ci_high).unwrap();
        }
    }
    Some(out)
}

/// Writes `report.md` plus `series_<metric>.tsv` for every metric present.
pub fn emit_report(summary_csv: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let rows = read_summary(summary_csv)?;
    fs::create_dir_all(out_dir)?;
    let mut md = String::new();
    let mut written = Vec::new();
    for metric in METRICS {
        let (Some(table), Some(series)) = (metric_table(&rows, metric), metric_series(&rows, metric)) else {
            continue;
        };
        write!(md, "## {metric}\n\n{table}\n").unwrap();
        let path = out_dir.join(format!("series_{metric}.tsv"));
        fs::write(&path, series)?;
        written.push(path);
    }
    let path = out_dir.join("report.md");
    fs::write(&path, md)?;
    written.insert(0, path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(s: &str, r: f64, metric: &str, mean: f64) -> CellSummary {
        CellSummary {
            strategy: s.into(),
            r_keep: r,
            metric: metric.into(),
            n: 1,
            mean,
            std: 0.0,
            ci_low: mean,
            ci_high: mean,
        }
    }

    #[test]
    fn two_by_two_table() {
        let rows = vec![
            row("step", 0.9, "sim", 0.8),
            row("step", 0.5, "sim", 0.4),
            row("wordfreq", 0.9, "sim", 0.85),
            row("wordfreq", 0.5, "sim", 0.3),
        ];
        let t = metric_table(&rows, "sim").unwrap();
        assert_eq!(
            t,
            "| strategy | 0.9 | 0.5 |\n|---|---|---|\n| step | 0.800 | **0.400** |\n| wordfreq | **0.850** | 0.300 |\n"
        );
    }

    #[test]
    fn missing_cell_and_cer_direction() {
        let rows = vec![
            row("step", 0.9, "cer", 0.1),
            row("opt", 0.9, "cer", 0.05),
            row("opt", 0.5, "cer", 0.4),
        ];
        let t = metric_table(&rows, "cer").unwrap();
        assert!(t.contains("| step | 0.100 | — |"));
        assert!(t.contains("| opt | **0.050** | **0.400** |"));
        assert!(metric_table(&rows, "sim").is_none());
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![row("step", 0.9, "sim", 0.8), row("step", 0.5, "sim", 0.4)];
        let csv = dir.path().join("summary.csv");
        write_summary(&csv, &rows).unwrap();
        assert_eq!(read_summary(&csv).unwrap(), rows);
        let files = emit_report(&csv, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let series = fs::read_to_string(dir.path().join("series_sim.tsv")).unwrap();
        assert_eq!(series, "strategy\tr_keep\tmean\tci_low\tci_high\nstep\t0.5\t0.4\t0.4\t0.4\nstep\t0.9\t0.8\t0.8\t0.8\n");
    }
}
