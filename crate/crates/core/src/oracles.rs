//! Mutation oracles: does a mutant's ego path differ enough from the
//! original's?
//!
//! All three use strict inequalities, so with a zero threshold any nonzero
//! difference kills.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::metrics::{comfort, min_distance, MetricError};
use crate::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OracleKind {
    /// Point-wise position difference.
    PO,
    /// Difference of minimum distance to the objects.
    SO,
    /// Difference of peak absolute acceleration.
    CO,
}

impl OracleKind {
    pub const ALL: [OracleKind; 3] = [OracleKind::PO, OracleKind::SO, OracleKind::CO];
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::PO => "PO",
            OracleKind::SO => "SO",
            OracleKind::CO => "CO",
        })
    }
}

impl FromStr for OracleKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PO" => Ok(OracleKind::PO),
            "SO" => Ok(OracleKind::SO),
            "CO" => Ok(OracleKind::CO),
            other => Err(format!("unknown oracle `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OracleThresholds {
    pub theta_p: f64,
    pub theta_s: f64,
    pub theta_c: f64,
}

impl OracleThresholds {
    pub const ZERO: OracleThresholds = OracleThresholds { theta_p: 0.0, theta_s: 0.0, theta_c: 0.0 };

    pub fn uniform(theta: f64) -> Self {
        Self { theta_p: theta, theta_s: theta, theta_c: theta }
    }

    pub fn is_valid(&self) -> bool {
        [self.theta_p, self.theta_s, self.theta_c].iter().all(|t| t.is_finite() && *t >= 0.0)
    }
}

/// Largest point-wise location difference between two paths.
pub fn max_deviation(p: &Path, q: &Path) -> Result<f64, MetricError> {
    if !p.same_grid(q) {
        return Err(MetricError::LengthMismatch(p.len(), q.len()));
    }
    Ok(p.points
        .iter()
        .zip(&q.points)
        .map(|(a, b)| a.location.distance(b.location))
        .fold(0.0, f64::max))
}

pub fn killed_path(p: &Path, q: &Path, theta_p: f64) -> Result<bool, MetricError> {
    if !p.same_grid(q) {
        return Err(MetricError::LengthMismatch(p.len(), q.len()));
    }
    Ok(p.points.iter().zip(&q.points).any(|(a, b)| a.location.distance(b.location) > theta_p))
}

/// Absolute difference of the two minimum distances; 0 without objects.
pub fn safety_difference(p: &Path, q: &Path, objects: &[Path]) -> Result<f64, MetricError> {
    if !p.same_grid(q) {
        return Err(MetricError::LengthMismatch(p.len(), q.len()));
    }
    Ok(match (min_distance(p, objects)?, min_distance(q, objects)?) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => 0.0,
    })
}

pub fn killed_safety(p: &Path, q: &Path, objects: &[Path], theta_s: f64) -> Result<bool, MetricError> {
    Ok(safety_difference(p, q, objects)? > theta_s)
}

pub fn killed_comfort(p: &Path, q: &Path, theta_c: f64) -> Result<bool, MetricError> {
    Ok((comfort(p)? - comfort(q)?).abs() > theta_c)
}

/// Verdicts of all three oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Verdicts {
    pub po: bool,
    pub so: bool,
    pub co: bool,
}

impl Verdicts {
    pub fn get(&self, kind: OracleKind) -> bool {
        match kind {
            OracleKind::PO => self.po,
            OracleKind::SO => self.so,
            OracleKind::CO => self.co,
        }
    }

    pub fn any(&self) -> bool {
        self.po || self.so || self.co
    }
}

pub fn evaluate(p: &Path, q: &Path, objects: &[Path], theta: &OracleThresholds) -> Result<Verdicts, MetricError> {
    Ok(Verdicts {
        po: killed_path(p, q, theta.theta_p)?,
        so: killed_safety(p, q, objects, theta.theta_s)?,
        co: killed_comfort(p, q, theta.theta_c)?,
    })
}
