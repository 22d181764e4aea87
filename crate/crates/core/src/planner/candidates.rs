//! Candidate short-term paths.
//!
//! Candidates live in a frame whose x axis points at the goal (limited to
//! [`MAX_FRAME_TURN`] away from the current heading). Each candidate is a
//! circular arc leaving the current pose tangentially and ending at a grid
//! point: ahead by the distance covered under constant longitudinal
//! acceleration to the target speed, and sideways by the lateral offset.
//! The arc is sampled by its longitudinal coordinate, so speed along the
//! path grows with the heading angle relative to the frame.

use std::f64::consts::PI;

use crate::geometry::{wrap_angle, Vec2};
use crate::path::{Path, TrajectoryPoint};

use super::config::{PlannerConfig, VehicleState};

/// Largest angle between the current heading and the candidate frame.
pub const MAX_FRAME_TURN: f64 = PI / 6.0;
/// Arcs whose end heading leaves this cone around the frame are not drivable.
pub const MAX_END_HEADING: f64 = 4.0 * PI / 9.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ShortTermPath {
    pub samples: Vec<TrajectoryPoint>,
    /// Grid cell, `offset_index * speed_deltas.len() + delta_index`;
    /// `None` for the emergency-brake fallback.
    pub index: Option<usize>,
    pub lateral_offset: f64,
    pub speed_delta: f64,
    pub target_speed: f64,
    /// False when no tangent arc reaches the endpoint without turning past
    /// [`MAX_END_HEADING`].
    pub drivable: bool,
}

impl ShortTermPath {
    pub fn first(&self) -> &TrajectoryPoint {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectoryPoint {
        self.samples.last().expect("short-term paths are nonempty")
    }
}

/// Heading of the candidate frame for `state` pursuing `goal`.
pub fn frame_heading(state: &VehicleState, goal: Vec2) -> f64 {
    let to_goal = goal - state.position;
    if to_goal.norm() < 1e-9 {
        return state.heading;
    }
    let turn = wrap_angle(to_goal.heading() - state.heading).clamp(-MAX_FRAME_TURN, MAX_FRAME_TURN);
    state.heading + turn
}

/// Longitudinal coordinate after `t` seconds, clamped at the stopping point.
fn longitudinal(v: f64, a: f64, t: f64) -> f64 {
    if a < 0.0 && t * -a > v {
        return v * v / (-2.0 * a);
    }
    v * t + 0.5 * a * t * t
}

struct Arc {
    /// Start heading relative to the frame.
    alpha: f64,
    curvature: f64,
}

impl Arc {
    /// Local `(x, y, heading)` at longitudinal coordinate `x`.
    fn at(&self, x: f64) -> (f64, f64, f64) {
        if self.curvature == 0.0 {
            return (x, x * self.alpha.tan(), self.alpha);
        }
        let u = (self.alpha.sin() + self.curvature * x).clamp(-1.0, 1.0);
        let phi = u.asin();
        // a circular chord bisects the start and end headings
        (x, x * (0.5 * (self.alpha + phi)).tan(), phi)
    }
}

fn sample(
    state: &VehicleState,
    frame: f64,
    v_long: f64,
    accel: f64,
    local: impl Fn(f64) -> (f64, f64, f64),
    config: &PlannerConfig,
) -> Vec<TrajectoryPoint> {
    let m = config.steps_per_decision();
    let mut times = Vec::with_capacity(m + 1);
    let mut locations = Vec::with_capacity(m + 1);
    let mut directions = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let tau = config.dt_dec * k as f64 / m as f64;
        times.push(state.t + tau);
        if k == 0 {
            locations.push(state.position);
            directions.push(state.heading);
            continue;
        }
        let (x, y, phi) = local(longitudinal(v_long, accel, tau));
        locations.push(state.position + Vec2::new(x, y).rotate(frame));
        directions.push(frame + phi);
    }
    Path::from_samples(&times, &locations, &directions, state.speed, state.acceleration, config.dt_sim).points
}

fn candidate(state: &VehicleState, frame: f64, offset: f64, delta: f64, config: &PlannerConfig) -> ShortTermPath {
    let alpha = wrap_angle(state.heading - frame);
    let v_long = state.speed * alpha.cos();
    let target = (v_long + delta).max(0.0);
    let accel = (target - v_long) / config.dt_dec;
    let ahead = 0.5 * (v_long + target) * config.dt_dec;

    let (arc, drivable) = if ahead <= 0.0 {
        // stationary: only the zero-offset cell is meaningful
        (Arc { alpha, curvature: 0.0 }, offset == 0.0)
    } else {
        let chord = offset.atan2(ahead);
        let end_heading = 2.0 * chord - alpha;
        let length = ahead.hypot(offset);
        let curvature = 2.0 * (chord - alpha).sin() / length;
        (Arc { alpha, curvature }, end_heading.abs() <= MAX_END_HEADING)
    };
    let samples = if drivable {
        sample(state, frame, v_long, accel, |x| arc.at(x), config)
    } else {
        // straight-line placeholder towards the endpoint; never selected
        let slope = if ahead > 0.0 { offset / ahead } else { 0.0 };
        let heading = slope.atan();
        sample(state, frame, v_long, accel, |x| (x, x * slope, heading), config)
    };
    ShortTermPath {
        samples,
        index: None,
        lateral_offset: offset,
        speed_delta: delta,
        target_speed: target,
        drivable,
    }
}

/// All grid candidates, offsets ascending in the outer loop and speed
/// deltas ascending in the inner loop.
pub fn enumerate_candidates(state: &VehicleState, goal: Vec2, config: &PlannerConfig) -> Vec<ShortTermPath> {
    let frame = frame_heading(state, goal);
    let mut offsets = config.lateral_offsets.clone();
    let mut deltas = config.speed_deltas.clone();
    offsets.sort_by(f64::total_cmp);
    deltas.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(offsets.len() * deltas.len());
    for &offset in &offsets {
        for &delta in &deltas {
            let mut c = candidate(state, frame, offset, delta, config);
            c.index = Some(out.len());
            out.push(c);
        }
    }
    out
}

/// Straight ahead along the current heading at the strongest braking the
/// grid offers. Used when every grid candidate is infeasible.
pub fn fallback_candidate(state: &VehicleState, config: &PlannerConfig) -> ShortTermPath {
    let delta = config.speed_deltas.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let mut c = candidate(state, state.heading, 0.0, delta, config);
    c.drivable = true;
    c
}
