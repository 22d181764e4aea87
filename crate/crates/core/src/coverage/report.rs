// Report files. Every writer is a pure function of the kill matrix, so
// output is byte-stable across runs and thread counts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, BaseRun, CoverageReport, CoverageTable, KillMatrix, KillRecord};
use crate::mutation::MutationOperator;
use crate::oracles::{OracleKind, OracleThresholds, Verdicts};
use crate::planner::WEIGHT_COUNT;

const MATRIX_HEADER: &str =
    "scenario,weight,operator,factor,PO,SO,CO,base_min_dis,mutant_min_dis,base_comfort,mutant_comfort,max_deviation";
const BASE_HEADER: &str = "scenario,min_dis,comfort,g1,g2,g3,g4,g5,g6";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown format `{other}` (expected csv or text)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    scenarios: Vec<String>,
    operators: Vec<MutationOperator>,
    thresholds: OracleThresholds,
}

fn tf(b: bool) -> &'static str {
    if b {
        "T"
    } else {
        "F"
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn overall_csv(report: &CoverageReport) -> String {
    let mut out = String::from("weight,PO,SO,CO\n");
    for (i, row) in report.overall.iter().enumerate() {
        let _ = writeln!(out, "w{},{},{},{}", i + 1, tf(row[0]), tf(row[1]), tf(row[2]));
    }
    out
}

/// Table with `k/6` row counts and a trailing column-count row.
pub fn table_csv(table: &CoverageTable, label: &str) -> String {
    let mut out = format!("{label},w1,w2,w3,w4,w5,w6,count\n");
    for (r, (name, cells)) in table.labels.iter().zip(&table.cells).enumerate() {
        out.push_str(name);
        for &c in cells {
            out.push(',');
            out.push_str(tf(c));
        }
        let _ = writeln!(out, ",{}/{}", table.row_count(r), WEIGHT_COUNT);
    }
    out.push_str("count");
    for w in 1..=WEIGHT_COUNT {
        let _ = write!(out, ",{}/{}", table.column_count(w), table.labels.len());
    }
    out.push_str(",\n");
    out
}

pub fn summary_text(report: &CoverageReport, matrix: &KillMatrix) -> String {
    let t = &report.thresholds;
    let mut out = String::new();
    let _ = writeln!(out, "scenarios: {}", matrix.scenarios.len());
    let _ = writeln!(out, "operators: {}", matrix.operators.len());
    let _ = writeln!(out, "mutant runs: {}", report.record_count);
    let _ = writeln!(out, "thresholds: theta_p={} theta_s={} theta_c={}", t.theta_p, t.theta_s, t.theta_c);
    out.push('\n');
    out.push_str("weight  PO  SO  CO  base-run firings\n");
    for (i, row) in report.overall.iter().enumerate() {
        let firings: usize = matrix.base.iter().map(|b| b.guard_firings[i]).sum();
        let _ = writeln!(out, "w{}      {}   {}   {}   {}", i + 1, tf(row[0]), tf(row[1]), tf(row[2]), firings);
    }
    for (m, kind) in OracleKind::ALL.iter().enumerate() {
        let n = report.overall.iter().filter(|r| r[m]).count();
        let _ = writeln!(out, "{kind}-covered weights: {n}/{WEIGHT_COUNT}");
    }
    let never: Vec<String> =
        report.never_fired.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| format!("w{}", i + 1)).collect();
    if never.is_empty() {
        out.push_str("every weight's term was active in some base run\n");
    } else {
        let _ = writeln!(out, "never active in any base run: {}", never.join(" "));
    }
    let violations = matrix.subsumption_violations().len();
    let _ = writeln!(out, "cells killed by SO or CO but not PO: {violations}");
    out
}

/// Everything `report --format csv` prints, in file order.
pub fn render(matrix: &KillMatrix, format: ReportFormat) -> String {
    let report = CoverageReport::from_matrix(matrix);
    match format {
        ReportFormat::Text => summary_text(&report, matrix),
        ReportFormat::Csv => {
            let mut out = overall_csv(&report);
            for t in &report.by_scenario {
                out.push('\n');
                out.push_str(&table_csv(t, "scenario"));
            }
            for t in &report.by_operator {
                out.push('\n');
                out.push_str(&table_csv(t, "K"));
            }
            out
        }
    }
}

fn write(dir: &FsPath, name: &str, contents: &str) -> Result<(), AnalysisError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| AnalysisError::io(&path, e))
}

/// Write the coverage tables and the raw matrix into `dir`.
pub fn emit_report(matrix: &KillMatrix, dir: &FsPath) -> Result<CoverageReport, AnalysisError> {
    fs::create_dir_all(dir).map_err(|e| AnalysisError::io(dir, e))?;
    let report = CoverageReport::from_matrix(matrix);
    write(dir, "coverage_overall.csv", &overall_csv(&report))?;
    for t in &report.by_scenario {
        write(dir, &format!("coverage_by_scenario_{}.csv", t.oracle), &table_csv(t, "scenario"))?;
    }
    for t in &report.by_operator {
        write(dir, &format!("coverage_by_operator_{}.csv", t.oracle), &table_csv(t, "K"))?;
    }
    write(dir, "summary.txt", &summary_text(&report, matrix))?;
    write_matrix(matrix, dir)?;
    Ok(report)
}

/// Persist the matrix so reports can be re-rendered without re-running.
pub fn write_matrix(matrix: &KillMatrix, dir: &FsPath) -> Result<(), AnalysisError> {
    let meta = Meta {
        scenarios: matrix.scenarios.clone(),
        operators: matrix.operators.clone(),
        thresholds: matrix.thresholds,
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| AnalysisError::Format(e.to_string()))?;
    write(dir, "analysis.json", &(json + "\n"))?;

    let mut out = format!("{MATRIX_HEADER}\n");
    for r in &matrix.records {
        let v = r.verdicts;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.weight,
            r.operator.index,
            r.operator.factor,
            tf(v.po),
            tf(v.so),
            tf(v.co),
            opt(r.base_min_dis),
            opt(r.mutant_min_dis),
            r.base_comfort,
            r.mutant_comfort,
            r.max_deviation
        );
    }
    write(dir, "kill_matrix.csv", &out)?;

    let mut out = format!("{BASE_HEADER}\n");
    for b in &matrix.base {
        let g: Vec<String> = b.guard_firings.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "{},{},{},{}", b.scenario, opt(b.min_dis), b.comfort, g.join(","));
    }
    write(dir, "base_runs.csv", &out)
}

fn rows<'a>(text: &'a str, header: &str, file: &str) -> Result<Vec<Vec<&'a str>>, AnalysisError> {
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(AnalysisError::Format(format!("{file}: unexpected header")));
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .map(|(n, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() == width {
                Ok(cells)
            } else {
                Err(AnalysisError::Format(format!("{file}:{}: expected {width} fields", n + 2)))
            }
        })
        .collect()
}

fn num<T: FromStr>(s: &str, file: &str) -> Result<T, AnalysisError> {
    s.parse().map_err(|_| AnalysisError::Format(format!("{file}: bad number `{s}`")))
}

fn opt_num(s: &str, file: &str) -> Result<Option<f64>, AnalysisError> {
    if s.is_empty() {
        Ok(None)
    } else {
        num(s, file).map(Some)
    }
}

fn flag(s: &str, file: &str) -> Result<bool, AnalysisError> {
    match s {
        "T" => Ok(true),
        "F" => Ok(false),
        _ => Err(AnalysisError::Format(format!("{file}: bad flag `{s}`"))),
    }
}

/// Load a matrix written by [`write_matrix`].
pub fn read_matrix(dir: &FsPath) -> Result<KillMatrix, AnalysisError> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|e| AnalysisError::io(&path, e))
    };
    let meta: Meta =
        serde_json::from_str(&read("analysis.json")?).map_err(|e| AnalysisError::Format(format!("analysis.json: {e}")))?;

    let text = read("kill_matrix.csv")?;
    let f = "kill_matrix.csv";
    let records = rows(&text, MATRIX_HEADER, f)?
        .into_iter()
        .map(|c| {
            Ok(KillRecord {
                scenario: c[0].to_string(),
                weight: num(c[1], f)?,
                operator: MutationOperator { index: num(c[2], f)?, factor: num(c[3], f)? },
                verdicts: Verdicts { po: flag(c[4], f)?, so: flag(c[5], f)?, co: flag(c[6], f)? },
                base_min_dis: opt_num(c[7], f)?,
                mutant_min_dis: opt_num(c[8], f)?,
                base_comfort: num(c[9], f)?,
                mutant_comfort: num(c[10], f)?,
                max_deviation: num(c[11], f)?,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;

    let text = read("base_runs.csv")?;
    let f = "base_runs.csv";
    let base = rows(&text, BASE_HEADER, f)?
        .into_iter()
        .map(|c| {
            let mut guard_firings = [0; WEIGHT_COUNT];
            for (g, s) in guard_firings.iter_mut().zip(&c[3..]) {
                *g = num(s, f)?;
            }
            Ok(BaseRun { scenario: c[0].to_string(), min_dis: opt_num(c[1], f)?, comfort: num(c[2], f)?, guard_firings })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;

    let expected = meta.scenarios.len() * meta.operators.len() * WEIGHT_COUNT;
    if records.len() != expected || base.len() != meta.scenarios.len() {
        return Err(AnalysisError::Format(format!("expected {expected} records, found {}", records.len())));
    }
    if records.iter().any(|r| r.weight == 0 || r.weight > WEIGHT_COUNT) {
        return Err(AnalysisError::Format("weight index out of range".into()));
    }
    Ok(KillMatrix { scenarios: meta.scenarios, operators: meta.operators, thresholds: meta.thresholds, base, records })
}
