use thiserror::Error;

use crate::geometry::{wrap_angle, Vec2};
use crate::scenario::Map;

use super::candidates::ShortTermPath;
use super::config::PlannerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("short-term path has {0} samples, at least 2 are required")]
pub struct DegeneratePath(pub usize);

/// An object's locations over a candidate window, aligned sample by sample.
#[derive(Debug, Clone, Copy)]
pub struct Obstacle<'a> {
    pub locations: &'a [Vec2],
    pub radius: f64,
}

/// Road and traffic around the ego for one decision window.
#[derive(Debug, Clone, Copy)]
pub struct Surroundings<'a> {
    pub map: Option<&'a Map>,
    pub obstacles: &'a [Obstacle<'a>],
}

/// Per-aspect quantities of a short-term path. All magnitudes are >= 0.
///
/// Everything except `goal_dist` is taken over the samples after the shared
/// anchor, i.e. over the motion the decision actually controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Features {
    pub max_lat_acc: f64,
    pub max_acc: f64,
    pub max_decel: f64,
    pub max_speed: f64,
    pub max_curv: f64,
    pub goal_dist: f64,
    /// Lowest speed limit along the samples.
    pub speed_limit: f64,
    pub collides: bool,
    /// Some sample is farther outside the road than the start point.
    pub off_road: bool,
}

impl Features {
    pub fn feasible(&self) -> bool {
        !self.collides && !self.off_road
    }
}

/// Signed curvature of each sample from the heading change over the
/// preceding segment; the anchor sample gets 0.
pub fn sample_curvatures(stp: &ShortTermPath) -> Vec<f64> {
    let s = &stp.samples;
    let mut out = vec![0.0; s.len()];
    for i in 1..s.len() {
        let ds = s[i].location.distance(s[i - 1].location);
        if ds > 0.0 {
            out[i] = wrap_angle(s[i].direction - s[i - 1].direction) / ds;
        }
    }
    out
}

pub fn compute_features(
    stp: &ShortTermPath,
    goal: Vec2,
    around: &Surroundings<'_>,
    config: &PlannerConfig,
) -> Result<Features, DegeneratePath> {
    let samples = &stp.samples;
    if samples.len() < 2 {
        return Err(DegeneratePath(samples.len()));
    }
    let curvatures = sample_curvatures(stp);
    // a candidate may not get farther from the road than where it starts,
    // which on the road means it must stay on it
    let start_off_road = around.map.map_or(0.0, |m| m.off_road_distance(samples[0].location));
    let ego_radius = config.ego_radius();

    let mut f = Features {
        max_lat_acc: 0.0,
        max_acc: 0.0,
        max_decel: 0.0,
        max_speed: 0.0,
        max_curv: 0.0,
        goal_dist: samples[samples.len() - 1].location.distance(goal),
        speed_limit: f64::INFINITY,
        collides: false,
        off_road: false,
    };
    for (i, p) in samples.iter().enumerate().skip(1) {
        let kappa = curvatures[i].abs();
        f.max_lat_acc = f.max_lat_acc.max(p.speed * p.speed * kappa);
        f.max_curv = f.max_curv.max(kappa);
        f.max_acc = f.max_acc.max(p.acceleration);
        f.max_decel = f.max_decel.max(-p.acceleration);
        f.max_speed = f.max_speed.max(p.speed);
        if let Some(map) = around.map {
            f.speed_limit = f.speed_limit.min(map.speed_limit_at(p.location));
            f.off_road |= map.off_road_distance(p.location) > start_off_road;
        }
        f.collides |= around.obstacles.iter().any(|o| {
            o.locations
                .get(i)
                .is_some_and(|&q| p.location.distance(q) < ego_radius + o.radius)
        });
    }
    Ok(f)
}
