//! Offline trajectories of the non-ego traffic participants.
//!
//! Objects do not react to the ego vehicle: each one moves with constant
//! acceleration from its initial state, its speed clamped at zero, either
//! along its lane centerline or along a straight ray.

use crate::geometry::Vec2;
use crate::path::{time_grid, InvalidStep, Path};
use crate::scenario::{Map, ObjectInit, Scenario};

/// Distance covered after `t` seconds starting at `speed` with constant
/// `acceleration`, stopping for good once the speed reaches zero.
pub fn travelled_distance(speed: f64, acceleration: f64, t: f64) -> f64 {
    if acceleration < 0.0 {
        let t_stop = speed / -acceleration;
        if t >= t_stop {
            return speed * speed / (-2.0 * acceleration);
        }
    }
    speed * t + 0.5 * acceleration * t * t
}

/// Sample an object's trajectory from 0 to `timeout` every `dt` seconds.
pub fn propagate_object(obj: &ObjectInit, map: &Map, timeout: f64, dt: f64) -> Result<Path, InvalidStep> {
    let times = time_grid(timeout, dt)?;
    let lane = obj.lane_id.as_deref().and_then(|id| map.lane(id));
    let anchor = lane.map(|l| (l.project(obj.position), l.total_length()));

    let mut locations = Vec::with_capacity(times.len());
    let mut directions = Vec::with_capacity(times.len());
    for &t in &times {
        let d = travelled_distance(obj.speed, obj.acceleration, t);
        let (location, direction) = match (lane, anchor) {
            (Some(lane), Some(((s0, lateral), length))) => {
                let s = s0 + d;
                let (centre, heading, overshoot) = if s <= length {
                    let (p, h) = lane.arc_length_position(s).expect("s within lane");
                    (p, h, 0.0)
                } else {
                    let (p, h) = lane.arc_length_position(length).expect("lane end");
                    (p, h, s - length)
                };
                let location = if d == 0.0 {
                    obj.position
                } else {
                    let normal = Vec2::from_heading(heading + std::f64::consts::FRAC_PI_2);
                    centre + Vec2::from_heading(heading) * overshoot + normal * lateral
                };
                (location, heading)
            }
            _ => {
                let location = if d == 0.0 {
                    obj.position
                } else {
                    obj.position + Vec2::from_heading(obj.heading) * d
                };
                (location, obj.heading)
            }
        };
        locations.push(location);
        directions.push(direction);
    }
    Ok(Path::from_samples(&times, &locations, &directions, obj.speed, obj.acceleration, dt))
}

/// Trajectories of every object in the scenario, in declaration order.
pub fn propagate_all(scenario: &Scenario, dt: f64) -> Result<Vec<Path>, InvalidStep> {
    scenario
        .objects
        .iter()
        .map(|o| propagate_object(o, &scenario.map, scenario.timeout, dt))
        .collect()
}
