//! Suite-level mutation analysis and weight coverage.
//!
//! For every scenario the original planner runs once; every mutant runs
//! once per scenario and its ego path is compared with the original under
//! the three oracles. A weight is covered under an oracle when at least one
//! of its mutants is killed by at least one scenario.

mod report;

pub use report::{emit_report, overall_csv, read_matrix, render, summary_text, table_csv, write_matrix, ReportFormat};

use std::collections::HashSet;
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::metrics::{comfort, min_distance, MetricError};
use crate::mutation::{generate_mutants, MutationError, MutationOperator};
use crate::oracles::{evaluate, max_deviation, OracleKind, OracleThresholds, Verdicts};
use crate::path::Path;
use crate::planner::{plan_with_objects, PlannerConfig, PlannerError, Weights, WEIGHT_COUNT};
use crate::propagate::propagate_all;
use crate::scenario::{parse_scenario, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("suite: {0}")]
    Suite(String),
    #[error("scenario `{id}`: {source}")]
    Scenario { id: String, source: ScenarioError },
    #[error("scenario `{scenario}`, base run: {source}")]
    BaseRun { scenario: String, source: PlannerError },
    #[error("scenario `{scenario}`, mutant w{weight} K={factor}: {source}")]
    Cell { scenario: String, weight: usize, factor: f64, source: PlannerError },
    #[error("scenario `{scenario}`: {source}")]
    Metric { scenario: String, source: MetricError },
    #[error(transparent)]
    Mutation(#[from] MutationError),
    #[error("oracle subsumption violated at scenario `{scenario}`, w{weight} K={factor}")]
    Subsumption { scenario: String, weight: usize, factor: f64 },
    #[error("invalid oracle thresholds")]
    Thresholds,
    #[error("malformed analysis data: {0}")]
    Format(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl AnalysisError {
    pub(crate) fn io(path: &FsPath, source: std::io::Error) -> Self {
        AnalysisError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub id: String,
    pub path: PathBuf,
}

/// An ordered list of scenario files.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSuite {
    pub scenarios: Vec<SuiteEntry>,
}

impl TestSuite {
    pub fn from_json(text: &str) -> Result<Self, AnalysisError> {
        let suite: TestSuite = serde_json::from_str(text).map_err(|e| AnalysisError::Suite(e.to_string()))?;
        if suite.scenarios.is_empty() {
            return Err(AnalysisError::Suite("suite has no scenarios".into()));
        }
        let mut seen = HashSet::new();
        for e in &suite.scenarios {
            if e.id.is_empty() || e.id.contains([',', '\n', '\r']) {
                return Err(AnalysisError::Suite(format!("scenario id `{}` must be nonempty without commas", e.id)));
            }
            if !seen.insert(&e.id) {
                return Err(AnalysisError::Suite(format!("duplicate scenario id `{}`", e.id)));
            }
        }
        Ok(suite)
    }

    /// Read a suite file and every scenario it lists. Scenario paths are
    /// relative to the suite file. Each scenario takes its suite id.
    pub fn load(path: &FsPath) -> Result<Vec<Scenario>, AnalysisError> {
        let text = fs::read_to_string(path).map_err(|e| AnalysisError::io(path, e))?;
        let suite = Self::from_json(&text)?;
        let dir = path.parent().unwrap_or(FsPath::new("."));
        suite
            .scenarios
            .iter()
            .map(|e| {
                let file = dir.join(&e.path);
                let text = fs::read_to_string(&file).map_err(|err| AnalysisError::io(&file, err))?;
                let mut s = parse_scenario(&text).map_err(|source| AnalysisError::Scenario { id: e.id.clone(), source })?;
                s.id = e.id.clone();
                Ok(s)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillRecord {
    pub scenario: String,
    /// 1-based weight index.
    pub weight: usize,
    pub operator: MutationOperator,
    pub verdicts: Verdicts,
    pub base_min_dis: Option<f64>,
    pub mutant_min_dis: Option<f64>,
    pub base_comfort: f64,
    pub mutant_comfort: f64,
    pub max_deviation: f64,
}

/// Original-planner run of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseRun {
    pub scenario: String,
    pub min_dis: Option<f64>,
    pub comfort: f64,
    /// Feasible candidates on which each weight's term was active, summed
    /// over all decisions.
    pub guard_firings: [usize; WEIGHT_COUNT],
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillMatrix {
    pub scenarios: Vec<String>,
    pub operators: Vec<MutationOperator>,
    pub thresholds: OracleThresholds,
    pub base: Vec<BaseRun>,
    /// Sorted by (scenario order, weight, operator).
    pub records: Vec<KillRecord>,
}

struct Prepared {
    objects: Vec<Path>,
    base: Path,
    run: BaseRun,
}

fn prepare(s: &Scenario, base: &Weights, config: &PlannerConfig) -> Result<Prepared, AnalysisError> {
    let base_err = |source: PlannerError| AnalysisError::BaseRun { scenario: s.id.clone(), source };
    let objects = propagate_all(s, config.dt_sim).map_err(|e| base_err(e.into()))?;
    let outcome = plan_with_objects(s, &objects, base, config).map_err(base_err)?;
    let metric = |source| AnalysisError::Metric { scenario: s.id.clone(), source };
    let run = BaseRun {
        scenario: s.id.clone(),
        min_dis: min_distance(&outcome.path, &objects).map_err(metric)?,
        comfort: comfort(&outcome.path).map_err(metric)?,
        guard_firings: outcome.guard_firings,
    };
    Ok(Prepared { objects, base: outcome.path, run })
}

/// Run the original planner and every mutant over the suite.
///
/// `jobs` bounds the worker threads; the result does not depend on it.
pub fn evaluate_suite(
    scenarios: &[Scenario],
    base: &Weights,
    operators: &[MutationOperator],
    config: &PlannerConfig,
    thresholds: &OracleThresholds,
    jobs: usize,
) -> Result<KillMatrix, AnalysisError> {
    if !thresholds.is_valid() {
        return Err(AnalysisError::Thresholds);
    }
    if scenarios.is_empty() {
        return Err(AnalysisError::Suite("suite has no scenarios".into()));
    }
    if operators.is_empty() {
        return Err(AnalysisError::Suite("no mutation operators".into()));
    }
    config.validate().map_err(|e| AnalysisError::Suite(e.to_string()))?;
    base.validate().map_err(|e| AnalysisError::Suite(e.to_string()))?;
    let mutants = generate_mutants(base, operators)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| AnalysisError::Suite(format!("thread pool: {e}")))?;

    pool.install(|| {
        let prepared: Vec<Prepared> = scenarios
            .par_iter()
            .map(|s| prepare(s, base, config))
            .collect::<Result<_, _>>()?;

        let cells: Vec<(usize, usize)> = (0..scenarios.len())
            .flat_map(|si| (0..mutants.len()).map(move |mi| (si, mi)))
            .collect();
        let records: Vec<KillRecord> = cells
            .par_iter()
            .map(|&(si, mi)| {
                let s = &scenarios[si];
                let p = &prepared[si];
                let m = &mutants[mi];
                let outcome = plan_with_objects(s, &p.objects, &m.weights, config).map_err(|source| AnalysisError::Cell {
                    scenario: s.id.clone(),
                    weight: m.weight,
                    factor: m.operator.factor,
                    source,
                })?;
                let metric = |source| AnalysisError::Metric { scenario: s.id.clone(), source };
                let mutated = outcome.path;
                let verdicts = evaluate(&p.base, &mutated, &p.objects, thresholds).map_err(metric)?;
                Ok(KillRecord {
                    scenario: s.id.clone(),
                    weight: m.weight,
                    operator: m.operator,
                    verdicts,
                    base_min_dis: p.run.min_dis,
                    mutant_min_dis: min_distance(&mutated, &p.objects).map_err(metric)?,
                    base_comfort: p.run.comfort,
                    mutant_comfort: comfort(&mutated).map_err(metric)?,
                    max_deviation: max_deviation(&p.base, &mutated).map_err(metric)?,
                })
            })
            .collect::<Result<_, AnalysisError>>()?;

        let matrix = KillMatrix {
            scenarios: scenarios.iter().map(|s| s.id.clone()).collect(),
            operators: operators.to_vec(),
            thresholds: *thresholds,
            base: prepared.into_iter().map(|p| p.run).collect(),
            records,
        };
        if *thresholds == OracleThresholds::ZERO {
            if let Some(r) = matrix.subsumption_violations().first() {
                return Err(AnalysisError::Subsumption {
                    scenario: r.scenario.clone(),
                    weight: r.weight,
                    factor: r.operator.factor,
                });
            }
        }
        Ok(matrix)
    })
}

impl KillMatrix {
    /// Records where SO or CO kills but PO does not.
    pub fn subsumption_violations(&self) -> Vec<&KillRecord> {
        self.records
            .iter()
            .filter(|r| (r.verdicts.so || r.verdicts.co) && !r.verdicts.po)
            .collect()
    }

    /// Copy of the matrix restricted to the given scenarios.
    pub fn restrict(&self, keep: &[&str]) -> KillMatrix {
        let keep: HashSet<&str> = keep.iter().copied().collect();
        KillMatrix {
            scenarios: self.scenarios.iter().filter(|s| keep.contains(s.as_str())).cloned().collect(),
            operators: self.operators.clone(),
            thresholds: self.thresholds,
            base: self.base.iter().filter(|b| keep.contains(b.scenario.as_str())).cloned().collect(),
            records: self.records.iter().filter(|r| keep.contains(r.scenario.as_str())).cloned().collect(),
        }
    }

    /// Weights whose terms never fired on a feasible candidate in any base run.
    pub fn never_fired(&self) -> [bool; WEIGHT_COUNT] {
        let mut out = [true; WEIGHT_COUNT];
        for b in &self.base {
            for (flag, n) in out.iter_mut().zip(b.guard_firings) {
                *flag &= n == 0;
            }
        }
        out
    }
}

/// Whether some scenario kills some mutant of weight `i` under `kind`.
pub fn covered(matrix: &KillMatrix, i: usize, kind: OracleKind) -> bool {
    matrix.records.iter().any(|r| r.weight == i && r.verdicts.get(kind))
}

/// A boolean table over weights with row and column counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageTable {
    pub oracle: OracleKind,
    /// Row labels: scenario ids or operator factors.
    pub labels: Vec<String>,
    pub cells: Vec<[bool; WEIGHT_COUNT]>,
}

impl CoverageTable {
    pub fn row_count(&self, row: usize) -> usize {
        self.cells[row].iter().filter(|&&c| c).count()
    }

    pub fn column_count(&self, weight: usize) -> usize {
        self.cells.iter().filter(|r| r[weight - 1]).count()
    }
}

/// Rows are scenarios: cell (s, i) is true when some operator on weight i
/// is killed by s.
pub fn per_scenario_table(matrix: &KillMatrix, kind: OracleKind) -> CoverageTable {
    let cells = matrix
        .scenarios
        .iter()
        .map(|s| {
            let mut row = [false; WEIGHT_COUNT];
            for r in matrix.records.iter().filter(|r| &r.scenario == s) {
                row[r.weight - 1] |= r.verdicts.get(kind);
            }
            row
        })
        .collect();
    CoverageTable { oracle: kind, labels: matrix.scenarios.clone(), cells }
}

/// Rows are operators: cell (K, i) is true when some scenario kills the
/// mutant of weight i under operator K.
pub fn per_operator_table(matrix: &KillMatrix, kind: OracleKind) -> CoverageTable {
    let cells = matrix
        .operators
        .iter()
        .map(|op| {
            let mut row = [false; WEIGHT_COUNT];
            for r in matrix.records.iter().filter(|r| r.operator.index == op.index) {
                row[r.weight - 1] |= r.verdicts.get(kind);
            }
            row
        })
        .collect();
    CoverageTable {
        oracle: kind,
        labels: matrix.operators.iter().map(|o| o.factor.to_string()).collect(),
        cells,
    }
}

/// All coverage views of a kill matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub thresholds: OracleThresholds,
    /// `overall[i][m]`: weight i+1 covered under `OracleKind::ALL[m]`.
    pub overall: [[bool; 3]; WEIGHT_COUNT],
    pub by_scenario: Vec<CoverageTable>,
    pub by_operator: Vec<CoverageTable>,
    pub never_fired: [bool; WEIGHT_COUNT],
    pub record_count: usize,
}

impl CoverageReport {
    pub fn from_matrix(matrix: &KillMatrix) -> Self {
        let mut overall = [[false; 3]; WEIGHT_COUNT];
        for (i, row) in overall.iter_mut().enumerate() {
            for (m, kind) in OracleKind::ALL.iter().enumerate() {
                row[m] = covered(matrix, i + 1, *kind);
            }
        }
        CoverageReport {
            thresholds: matrix.thresholds,
            overall,
            by_scenario: OracleKind::ALL.iter().map(|&k| per_scenario_table(matrix, k)).collect(),
            by_operator: OracleKind::ALL.iter().map(|&k| per_operator_table(matrix, k)).collect(),
            never_fired: matrix.never_fired(),
            record_count: matrix.records.len(),
        }
    }
}
