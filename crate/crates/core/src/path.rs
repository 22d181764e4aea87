//! Timestamped trajectories.
//!
//! Every path produced by this crate stores speeds and accelerations that are
//! backward finite differences of its locations (the first sample takes them
//! from the initial state instead). Two paths with bit-identical locations
//! and initial state therefore agree on every derived quantity.

use std::io::{self, Write};

use thiserror::Error;

use crate::geometry::Vec2;

/// Tolerance used when checking that a horizon is a whole number of steps.
pub const STEP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("invalid step: dt = {dt}, horizon = {horizon} (dt must be > 0 and divide the horizon)")]
pub struct InvalidStep {
    pub dt: f64,
    pub horizon: f64,
}

/// Number of `dt` steps in `horizon`, if it is a positive whole number.
pub fn step_count(horizon: f64, dt: f64) -> Result<usize, InvalidStep> {
    let err = InvalidStep { dt, horizon };
    if !(dt.is_finite() && dt > 0.0 && horizon.is_finite() && horizon > 0.0) {
        return Err(err);
    }
    let n = (horizon / dt).round();
    if n < 1.0 || (n * dt - horizon).abs() > STEP_TOLERANCE {
        return Err(err);
    }
    Ok(n as usize)
}

/// `n + 1` uniform timestamps from 0 to exactly `horizon`.
pub fn time_grid(horizon: f64, dt: f64) -> Result<Vec<f64>, InvalidStep> {
    let n = step_count(horizon, dt)?;
    Ok((0..=n).map(|i| horizon * i as f64 / n as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub location: Vec2,
    /// Heading in radians.
    pub direction: f64,
    pub speed: f64,
    pub acceleration: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Path {
    pub points: Vec<TrajectoryPoint>,
}

impl Path {
    pub fn new(points: Vec<TrajectoryPoint>) -> Self {
        Self { points }
    }

    /// Build a path from sampled locations, deriving speed and acceleration
    /// by finite differences over `dt`.
    ///
    /// `times`, `locations` and `directions` must have equal length.
    pub fn from_samples(
        times: &[f64],
        locations: &[Vec2],
        directions: &[f64],
        initial_speed: f64,
        initial_acceleration: f64,
        dt: f64,
    ) -> Self {
        assert_eq!(times.len(), locations.len());
        assert_eq!(times.len(), directions.len());
        let mut points: Vec<TrajectoryPoint> = Vec::with_capacity(times.len());
        for i in 0..times.len() {
            let (speed, acceleration) = match points.last() {
                None => (initial_speed, initial_acceleration),
                Some(prev) => {
                    let v = locations[i].distance(locations[i - 1]) / dt;
                    (v, (v - prev.speed) / dt)
                }
            };
            points.push(TrajectoryPoint {
                t: times[i],
                location: locations[i],
                direction: directions[i],
                speed,
                acceleration,
            });
        }
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Option<&TrajectoryPoint> {
        self.points.first()
    }

    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    pub fn locations(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.points.iter().map(|p| p.location)
    }

    /// Whether both paths sample the same timestamps.
    pub fn same_grid(&self, other: &Path) -> bool {
        self.len() == other.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a.t - b.t).abs() <= STEP_TOLERANCE)
    }

    /// Check the structural invariants: first timestamp 0, uniform `dt`
    /// steps, nonnegative speeds, and finite-difference consistency of
    /// speed and acceleration within `tol`.
    pub fn check_consistency(&self, dt: f64, tol: f64) -> Result<(), String> {
        let Some(first) = self.points.first() else {
            return Err("path is empty".into());
        };
        if first.t != 0.0 {
            return Err(format!("first timestamp is {}, expected 0", first.t));
        }
        for (i, w) in self.points.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if ((b.t - a.t) - dt).abs() > STEP_TOLERANCE {
                return Err(format!("step {} has dt {}", i + 1, b.t - a.t));
            }
            let v = b.location.distance(a.location) / dt;
            if (b.speed - v).abs() > tol {
                return Err(format!("speed at {} is {}, finite difference gives {v}", i + 1, b.speed));
            }
            let acc = (b.speed - a.speed) / dt;
            if (b.acceleration - acc).abs() > tol {
                return Err(format!(
                    "acceleration at {} is {}, finite difference gives {acc}",
                    i + 1,
                    b.acceleration
                ));
            }
        }
        if let Some(p) = self.points.iter().find(|p| p.speed < 0.0) {
            return Err(format!("negative speed at t = {}", p.t));
        }
        Ok(())
    }

    /// Write the path as CSV with header `t,x,y,heading,speed,accel`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,y,heading,speed,accel")?;
        for p in &self.points {
            writeln!(
                out,
                "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                p.t, p.location.x, p.location.y, p.direction, p.speed, p.acceleration
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends_exactly_at_horizon() {
        let g = time_grid(2.0, 0.1).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 2.0);
        let g = time_grid(0.3, 0.1).unwrap();
        assert_eq!(*g.last().unwrap(), 0.3);
    }

    #[test]
    fn bad_steps_are_rejected() {
        assert!(step_count(1.0, 0.0).is_err());
        assert!(step_count(1.0, -0.1).is_err());
        assert!(step_count(1.0, 0.3).is_err());
        assert!(step_count(0.05, 0.1).is_err());
        assert_eq!(step_count(1.0, 0.1), Ok(10));
    }

    #[test]
    fn finite_differences_are_consistent() {
        let times = time_grid(0.4, 0.1).unwrap();
        let locs: Vec<Vec2> = [0.0, 1.0, 2.5, 4.5, 7.0].iter().map(|&x| Vec2::new(x, 0.0)).collect();
        let dirs = vec![0.0; 5];
        let p = Path::from_samples(&times, &locs, &dirs, 9.0, 1.0, 0.1);
        assert_eq!(p.points[0].speed, 9.0);
        assert_eq!(p.points[0].acceleration, 1.0);
        assert!((p.points[2].speed - 15.0).abs() < 1e-9);
        assert!((p.points[2].acceleration - 50.0).abs() < 1e-6);
        p.check_consistency(0.1, 1e-9).unwrap();
    }

    #[test]
    fn csv_has_six_decimals() {
        let p = Path::from_samples(&[0.0], &[Vec2::new(1.0, 2.0)], &[0.5], 3.0, -1.0, 0.1);
        assert_eq!(
            p.to_csv_string(),
            "t,x,y,heading,speed,accel\n0.000000,1.000000,2.000000,0.500000,3.000000,-1.000000\n"
        );
    }
}
