//! Whole-path quality metrics.

use thiserror::Error;

use crate::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("paths are sampled on different time grids ({0} vs {1} samples)")]
    LengthMismatch(usize, usize),
    #[error("path is empty")]
    EmptyPath,
}

/// Smallest center-to-center distance between the ego and any object at a
/// common timestep. `None` when there are no objects.
pub fn min_distance(ego: &Path, objects: &[Path]) -> Result<Option<f64>, MetricError> {
    for o in objects {
        if !ego.same_grid(o) {
            return Err(MetricError::LengthMismatch(ego.len(), o.len()));
        }
    }
    let min = objects
        .iter()
        .flat_map(|o| ego.points.iter().zip(&o.points).map(|(e, q)| e.location.distance(q.location)))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |m| m.min(d))));
    Ok(min)
}

/// Peak absolute acceleration along the path.
pub fn comfort(ego: &Path) -> Result<f64, MetricError> {
    ego.points
        .iter()
        .map(|p| p.acceleration.abs())
        .reduce(f64::max)
        .ok_or(MetricError::EmptyPath)
}
