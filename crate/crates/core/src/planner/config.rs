use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec2;

pub const WEIGHT_COUNT: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid weights: {0}")]
    Weights(String),
    #[error("invalid planner config: {0}")]
    Planner(String),
    #[error("malformed document: {0}")]
    Parse(String),
}

/// The six mutable cost weights.
///
/// `w1` scales the peak lateral acceleration; `w2`..`w6` are flat penalties
/// added when, respectively, lateral acceleration, speed, acceleration,
/// deceleration or curvature exceed their thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
    pub w5: f64,
    pub w6: f64,
}

impl Weights {
    pub fn from_array(w: [f64; WEIGHT_COUNT]) -> Self {
        Self { w1: w[0], w2: w[1], w3: w[2], w4: w[3], w5: w[4], w6: w[5] }
    }

    pub fn to_array(self) -> [f64; WEIGHT_COUNT] {
        [self.w1, self.w2, self.w3, self.w4, self.w5, self.w6]
    }

    /// Weight by 1-based index.
    pub fn get(&self, i: usize) -> Option<f64> {
        (1..=WEIGHT_COUNT).contains(&i).then(|| self.to_array()[i - 1])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (i, w) in self.to_array().iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(ConfigError::Weights(format!("w{} = {w} must be finite and >= 0", i + 1)));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let w: Weights = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        w.validate()?;
        Ok(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("weights serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    /// Duration of one decision, seconds.
    pub dt_dec: f64,
    /// Sampling step of every path, seconds.
    pub dt_sim: f64,
    pub lateral_offsets: Vec<f64>,
    pub speed_deltas: Vec<f64>,
    pub tau_lat: f64,
    pub tau_acc: f64,
    pub tau_dec: f64,
    pub tau_curv: f64,
    /// Cost per meter of remaining distance to the goal.
    pub c_prog: f64,
    pub safety_margin: f64,
    /// Ego vehicle length; half of it plus the margin is the collision radius.
    pub ego_length: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            dt_dec: 1.0,
            dt_sim: 0.1,
            lateral_offsets: vec![-3.0, -1.5, 0.0, 1.5, 3.0],
            speed_deltas: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            tau_lat: 2.0,
            tau_acc: 2.5,
            tau_dec: 3.0,
            tau_curv: 0.1,
            c_prog: 1.0,
            safety_margin: 0.2,
            ego_length: 4.0,
        }
    }
}

impl PlannerConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let c: PlannerConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialize")
    }

    pub fn steps_per_decision(&self) -> usize {
        crate::path::step_count(self.dt_dec, self.dt_sim).expect("validated config")
    }

    pub fn ego_radius(&self) -> f64 {
        0.5 * self.ego_length + self.safety_margin
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Planner(m));
        if crate::path::step_count(self.dt_dec, self.dt_sim).is_err() {
            return bad(format!("dt_dec = {} must be a positive multiple of dt_sim = {}", self.dt_dec, self.dt_sim));
        }
        if self.lateral_offsets.is_empty() || self.speed_deltas.is_empty() {
            return bad("lateral_offsets and speed_deltas must be nonempty".into());
        }
        if self.lateral_offsets.iter().chain(&self.speed_deltas).any(|v| !v.is_finite()) {
            return bad("grid values must be finite".into());
        }
        for (name, v) in [
            ("tau_lat", self.tau_lat),
            ("tau_acc", self.tau_acc),
            ("tau_dec", self.tau_dec),
            ("tau_curv", self.tau_curv),
            ("c_prog", self.c_prog),
            ("ego_length", self.ego_length),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} = {v} must be finite and > 0"));
            }
        }
        if !(self.safety_margin.is_finite() && self.safety_margin >= 0.0) {
            return bad("safety_margin must be finite and >= 0".into());
        }
        Ok(())
    }
}

/// Ego state at the head of the current path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub t: f64,
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub acceleration: f64,
}
