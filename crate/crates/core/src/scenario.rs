//! Maps, scenarios and the scenario file format.
//!
//! A scenario is the full test input for one planner run: the road map, the
//! ego vehicle's initial state and destination, the other traffic
//! participants, and the simulated horizon. Scenario files are JSON; every
//! object rejects unknown keys and every value is validated after parsing.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{point_segment_distance, Vec2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("validation error at `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn field(&self) -> &str {
        match self {
            ScenarioError::Parse { field, .. } | ScenarioError::Validation { field, .. } => field,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("arc length {s} outside [0, {length}]")]
pub struct OutOfRange {
    pub s: f64,
    pub length: f64,
}

/// A single-direction lane. Traffic moves in centerline order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lane {
    pub id: String,
    pub centerline: Vec<Vec2>,
    pub width: f64,
    pub speed_limit: f64,
}

impl Lane {
    pub fn total_length(&self) -> f64 {
        self.centerline
            .windows(2)
            .map(|w| w[0].distance(w[1]))
            .sum()
    }

    /// Point and segment heading at arc length `s` along the centerline.
    pub fn arc_length_position(&self, s: f64) -> Result<(Vec2, f64), OutOfRange> {
        let length = self.total_length();
        if !(0.0..=length).contains(&s) {
            return Err(OutOfRange { s, length });
        }
        let last = self.centerline.len() - 2;
        let mut remaining = s;
        for (i, w) in self.centerline.windows(2).enumerate() {
            let seg = w[1] - w[0];
            let seg_len = seg.norm();
            if remaining <= seg_len || i == last {
                let t = (remaining / seg_len).min(1.0);
                return Ok((w[0] + seg * t, seg.heading()));
            }
            remaining -= seg_len;
        }
        unreachable!("validated lanes have at least one segment")
    }

    /// Arc length of the closest centerline point to `p` and the signed
    /// lateral offset of `p` (positive to the left of travel).
    pub fn project(&self, p: Vec2) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let mut base = 0.0;
        for w in self.centerline.windows(2) {
            let seg = w[1] - w[0];
            let len = seg.norm();
            let t = ((p - w[0]).dot(seg) / (len * len)).clamp(0.0, 1.0);
            let foot = w[0] + seg * t;
            let d = p.distance(foot);
            if d < best.0 {
                let side = seg.cross(p - w[0]).signum();
                best = (d, base + t * len, side * d);
            }
            base += len;
        }
        (best.1, best.2)
    }

    pub fn distance_to(&self, p: Vec2) -> f64 {
        self.centerline
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `p` lies within the lane corridor.
    pub fn contains(&self, p: Vec2) -> bool {
        self.distance_to(p) <= 0.5 * self.width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Map {
    pub lanes: Vec<Lane>,
}

impl Map {
    pub fn lane(&self, id: &str) -> Option<&Lane> {
        self.lanes.iter().find(|l| l.id == id)
    }

    /// Whether `p` is inside at least one lane corridor.
    pub fn is_drivable(&self, p: Vec2) -> bool {
        self.lanes.iter().any(|l| l.contains(p))
    }

    /// How far `p` lies outside the nearest lane corridor; 0 on the road.
    pub fn off_road_distance(&self, p: Vec2) -> f64 {
        self.lanes
            .iter()
            .map(|l| (l.distance_to(p) - 0.5 * l.width).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Speed limit governing `p`: the lowest limit among the lanes containing
    /// it, or the nearest lane's limit when `p` is off the road.
    pub fn speed_limit_at(&self, p: Vec2) -> f64 {
        let inside = self
            .lanes
            .iter()
            .filter(|l| l.contains(p))
            .map(|l| l.speed_limit)
            .fold(f64::INFINITY, f64::min);
        if inside.is_finite() {
            return inside;
        }
        self.lanes
            .iter()
            .map(|l| (l.distance_to(p), l.speed_limit))
            .fold((f64::INFINITY, f64::INFINITY), |a, b| if b.0 < a.0 { b } else { a })
            .1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectInit {
    pub id: String,
    pub position: Vec2,
    /// `[length, width]` in meters.
    pub size: [f64; 2],
    pub speed: f64,
    pub acceleration: f64,
    pub heading: f64,
    #[serde(rename = "lane", default, skip_serializing_if = "Option::is_none")]
    pub lane_id: Option<String>,
}

impl ObjectInit {
    pub fn length(&self) -> f64 {
        self.size[0]
    }

    pub fn width(&self) -> f64 {
        self.size[1]
    }

    /// Radius of the disc enclosing the object's footprint.
    pub fn bounding_radius(&self) -> f64 {
        0.5 * self.length().hypot(self.width())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoInit {
    pub position: Vec2,
    pub speed: f64,
    pub acceleration: f64,
    pub heading: f64,
    pub goal: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub map: Map,
    pub ego: EgoInit,
    #[serde(default)]
    pub objects: Vec<ObjectInit>,
    pub timeout: f64,
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        validate_map(&self.map)?;

        let ego = &self.ego;
        check_finite_vec("ego.position", ego.position)?;
        check_finite_vec("ego.goal", ego.goal)?;
        check_finite("ego.heading", ego.heading)?;
        check_finite("ego.acceleration", ego.acceleration)?;
        check_finite("ego.speed", ego.speed)?;
        if ego.speed < 0.0 {
            return Err(ScenarioError::invalid("ego.speed", "must be >= 0"));
        }

        let mut ids = HashSet::new();
        for (i, obj) in self.objects.iter().enumerate() {
            let at = |f: &str| format!("objects[{i}].{f}");
            if !ids.insert(obj.id.as_str()) {
                return Err(ScenarioError::invalid(at("id"), format!("duplicate object id `{}`", obj.id)));
            }
            check_finite_vec(&at("position"), obj.position)?;
            check_finite(&at("heading"), obj.heading)?;
            check_finite(&at("acceleration"), obj.acceleration)?;
            check_finite(&at("speed"), obj.speed)?;
            if obj.speed < 0.0 {
                return Err(ScenarioError::invalid(at("speed"), "must be >= 0"));
            }
            if !(obj.length() > 0.0 && obj.width() > 0.0) || !obj.length().is_finite() || !obj.width().is_finite() {
                return Err(ScenarioError::invalid(at("size"), "length and width must be finite and > 0"));
            }
            if let Some(lane) = &obj.lane_id {
                if self.map.lane(lane).is_none() {
                    return Err(ScenarioError::invalid(at("lane"), format!("unknown lane `{lane}`")));
                }
            }
        }

        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err(ScenarioError::invalid("timeout", "must be finite and > 0"));
        }
        Ok(())
    }
}

fn check_finite(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::invalid(field, "must be finite"))
    }
}

fn check_finite_vec(field: &str, v: Vec2) -> Result<(), ScenarioError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::invalid(field, "must be finite"))
    }
}

fn validate_map(map: &Map) -> Result<(), ScenarioError> {
    if map.lanes.is_empty() {
        return Err(ScenarioError::invalid("map.lanes", "at least one lane is required"));
    }
    let mut ids = HashSet::new();
    for (i, lane) in map.lanes.iter().enumerate() {
        let at = |f: &str| format!("map.lanes[{i}].{f}");
        if !ids.insert(lane.id.as_str()) {
            return Err(ScenarioError::invalid(at("id"), format!("duplicate lane id `{}`", lane.id)));
        }
        if lane.centerline.len() < 2 {
            return Err(ScenarioError::invalid(at("centerline"), "needs at least two points"));
        }
        for (k, p) in lane.centerline.iter().enumerate() {
            check_finite_vec(&at(&format!("centerline[{k}]")), *p)?;
        }
        if lane.centerline.windows(2).any(|w| w[0] == w[1]) {
            return Err(ScenarioError::invalid(at("centerline"), "consecutive points must be distinct"));
        }
        if !(lane.width.is_finite() && lane.width > 0.0) {
            return Err(ScenarioError::invalid(at("width"), "must be finite and > 0"));
        }
        if !(lane.speed_limit.is_finite() && lane.speed_limit > 0.0) {
            return Err(ScenarioError::invalid(at("speed_limit"), "must be finite and > 0"));
        }
    }
    Ok(())
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().to_string();
        // serde reports missing fields against the enclosing object
        let field = match missing_field_name(&message) {
            Some(name) if path == "." => name.to_string(),
            Some(name) => format!("{path}.{name}"),
            None => path,
        };
        ScenarioError::Parse { field, message }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn missing_field_name(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}
