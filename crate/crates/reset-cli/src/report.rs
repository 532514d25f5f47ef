//! Result emission: the fixed-schema CSV, markdown summary tables, and
//! simple standalone SVG bar charts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

use crate::orchestrate::{BenchRow, TheoryReport};

/// Stable column schema; `wall_ms` is the only non-deterministic column.
pub const CSV_HEADER: &str = "task,method,demos,seed,scenarios,successes,rate,mean_reduction_steps,tr_sigma0,tr_sigma_a,gap0,gap_a,bound,mi_sb,mi_sa,wall_ms";

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

pub fn row_to_csv(row: &BenchRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.task,
        row.method,
        row.demos,
        row.seed,
        row.scenarios,
        row.successes,
        fmt6(row.rate),
        fmt6(row.mean_reduction_steps),
        fmt6(row.tr_sigma0),
        fmt6(row.tr_sigma_a),
        fmt6(row.gap0),
        fmt6(row.gap_a),
        fmt6(row.bound),
        fmt6(row.mi_sb),
        fmt6(row.mi_sa),
        row.wall_ms
    )
}

pub fn rows_to_csv(rows: &[BenchRow], config_hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash={config_hash}");
    let _ = writeln!(out, "{CSV_HEADER}");
    for row in rows {
        let _ = writeln!(out, "{}", row_to_csv(row));
    }
    out
}

pub fn write_csv(path: &Path, rows: &[BenchRow], config_hash: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, rows_to_csv(rows, config_hash))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Parse a CSV produced by [`write_csv`] back into rows (used by `report`).
pub fn read_csv(path: &Path) -> Result<Vec<BenchRow>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("task,") || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 16 {
            anyhow::bail!("malformed CSV row: {line}");
        }
        rows.push(BenchRow {
            task: cells[0].to_string(),
            method: cells[1].to_string(),
            demos: cells[2].parse()?,
            seed: cells[3].parse()?,
            scenarios: cells[4].parse()?,
            successes: cells[5].parse()?,
            rate: cells[6].parse()?,
            mean_reduction_steps: cells[7].parse()?,
            tr_sigma0: cells[8].parse()?,
            tr_sigma_a: cells[9].parse()?,
            gap0: cells[10].parse()?,
            gap_a: cells[11].parse()?,
            bound: cells[12].parse()?,
            mi_sb: cells[13].parse()?,
            mi_sa: cells[14].parse()?,
            wall_ms: cells[15].parse()?,
        });
    }
    Ok(rows)
}

pub fn theory_to_csv(reports: &[TheoryReport], config_hash: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash={config_hash}");
    let _ = writeln!(
        out,
        "task,seed,tr_sigma0,tr_sigma_oracle,tr_sigma_learned,anchor_oracle,anchor_learned,gap0,gap_a,rademacher,bound,bound_trace,b_norm,mi_sb,mi_sa,dpi_learned,mi_sb_oracle,mi_sa_oracle,dpi_oracle"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.task.name(),
            r.seed,
            fmt6(r.tr_sigma0),
            fmt6(r.tr_sigma_oracle),
            fmt6(r.tr_sigma_learned),
            r.anchor_oracle,
            r.anchor_learned,
            fmt6(r.gap0.gap),
            fmt6(r.gap_a.gap),
            fmt6(r.gap0.rademacher),
            fmt6(r.gap0.bound),
            fmt6(r.gap0.bound_trace),
            fmt6(r.gap0.b_norm),
            fmt6(r.mi_learned.i_s0_sb),
            fmt6(r.mi_learned.i_s0_sa),
            r.dpi_learned(),
            fmt6(r.mi_oracle.i_s0_sb),
            fmt6(r.mi_oracle.i_s0_sa),
            r.dpi_oracle()
        );
    }
    out
}

/// Markdown summary: one success-rate table per task plus the theory columns.
pub fn markdown_summary(rows: &[BenchRow]) -> String {
    let mut by_task: BTreeMap<&str, Vec<&BenchRow>> = BTreeMap::new();
    for row in rows {
        by_task.entry(&row.task).or_default().push(row);
    }
    let mut out = String::from("# Benchmark summary\n");
    for (task, rows) in by_task {
        let _ = writeln!(out, "\n## {task}\n");
        let _ = writeln!(
            out,
            "| method | demos | seed | scenarios | successes | rate | mean reduction steps |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for r in rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {:.3} | {:.2} |",
                r.method, r.demos, r.seed, r.scenarios, r.successes, r.rate, r.mean_reduction_steps
            );
        }
    }
    out
}

/// Standalone SVG bar chart of success rates grouped by task.
pub fn svg_success_chart(rows: &[BenchRow]) -> String {
    let mut groups: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for row in rows {
        groups
            .entry(row.task.clone())
            .or_default()
            .push((format!("{}@{}", row.method, row.demos), row.rate));
    }
    let bar_w = 34;
    let gap = 8;
    let group_gap = 30;
    let chart_h = 220.0;
    let label_h = 90;
    let mut total_bars = 0;
    for bars in groups.values() {
        total_bars += bars.len();
    }
    let width = total_bars * (bar_w + gap) + groups.len() * group_gap + 60;
    let height = chart_h as usize + label_h + 40;

    let palette = ["#4878cf", "#ee854a", "#6acc65", "#d65f5f", "#956cb4"];
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(
        out,
        "<line x1=\"40\" y1=\"20\" x2=\"40\" y2=\"{}\" stroke=\"#333\"/>",
        20.0 + chart_h
    );
    for tick in 0..=4 {
        let frac = tick as f64 / 4.0;
        let y = 20.0 + chart_h * (1.0 - frac);
        let _ = writeln!(
            out,
            "<text x=\"34\" y=\"{:.1}\" text-anchor=\"end\" dominant-baseline=\"middle\">{:.2}</text>",
            y, frac
        );
        let _ = writeln!(
            out,
            "<line x1=\"38\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>",
            width - 10
        );
    }
    let mut x = 52;
    for (task, bars) in &groups {
        let group_start = x;
        for (i, (label, rate)) in bars.iter().enumerate() {
            let h = chart_h * rate;
            let y = 20.0 + chart_h - h;
            let color = palette[i % palette.len()];
            let _ = writeln!(
                out,
                "<rect x=\"{x}\" y=\"{y:.1}\" width=\"{bar_w}\" height=\"{h:.1}\" fill=\"{color}\"/>"
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{:.2}</text>",
                x as f64 + bar_w as f64 / 2.0,
                y - 4.0,
                rate
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"end\" transform=\"rotate(-45 {:.1} {})\">{label}</text>",
                x as f64 + bar_w as f64 / 2.0,
                chart_h as usize + 34,
                x as f64 + bar_w as f64 / 2.0,
                chart_h as usize + 34
            );
            x += bar_w + gap;
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\" font-weight=\"bold\">{task}</text>",
            (group_start + x - gap) as f64 / 2.0,
            chart_h as usize + label_h + 20
        );
        x += group_gap;
    }
    let _ = writeln!(out, "</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(task: &str, method: &str, rate: f64) -> BenchRow {
        BenchRow {
            task: task.to_string(),
            method: method.to_string(),
            demos: 20,
            seed: 1,
            scenarios: 10,
            successes: (rate * 10.0) as usize,
            rate,
            mean_reduction_steps: 1.0,
            tr_sigma0: 0.2,
            tr_sigma_a: 0.05,
            gap0: 0.1,
            gap_a: 0.02,
            bound: 1.5,
            mi_sb: 3.0,
            mi_sa: 1.0,
            wall_ms: 12,
        }
    }

    #[test]
    fn csv_roundtrip_preserves_rows() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![row("pick_place", "reset", 0.9), row("pick_place", "direct", 0.3)];
        let path = dir.path().join("bench.csv");
        write_csv(&path, &rows, "abc").unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# config_hash=abc\n"));
        assert!(text.contains(CSV_HEADER));
        let back = read_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].task, "pick_place");
        assert!((back[0].rate - 0.9).abs() < 1e-9);
    }

    #[test]
    fn markdown_and_svg_render() {
        let rows = vec![row("pick_place", "reset", 0.9), row("multi_task", "direct", 0.4)];
        let md = markdown_summary(&rows);
        assert!(md.contains("## pick_place"));
        assert!(md.contains("| reset |"));
        let svg = svg_success_chart(&rows);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("</svg>"));
    }
}
