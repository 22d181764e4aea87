//! The path planner under test.
//!
//! Every decision step enumerates a grid of candidate short-term paths,
//! drops the infeasible ones (collision, leaving the road, undrivable arc),
//! scores the rest with the six-weight cost function and commits the
//! cheapest. A full run repeats this until the scenario timeout.

mod candidates;
mod config;
mod cost;
mod features;

pub use candidates::{enumerate_candidates, fallback_candidate, frame_heading, ShortTermPath, MAX_END_HEADING, MAX_FRAME_TURN};
pub use config::{ConfigError, PlannerConfig, VehicleState, Weights, WEIGHT_COUNT};
pub use cost::{cost, guards, CostBreakdown};
pub use features::{compute_features, sample_curvatures, DegeneratePath, Features, Obstacle, Surroundings};

use thiserror::Error;

use crate::geometry::Vec2;
use crate::path::{step_count, time_grid, InvalidStep, Path};
use crate::propagate::propagate_all;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlannerError {
    #[error("timeout {timeout} is not a multiple of the decision step {dt_dec}")]
    InvalidTimeout { timeout: f64, dt_dec: f64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Step(#[from] InvalidStep),
    #[error("object trajectories do not cover the scenario horizon")]
    ObjectHorizon,
}

/// A candidate with its features and cost under some weights.
#[derive(Debug, Clone)]
pub struct ScoredCandidate {
    pub candidate: ShortTermPath,
    pub features: Features,
    pub feasible: bool,
    pub cost: CostBreakdown,
}

pub fn score_candidates(
    state: &VehicleState,
    goal: Vec2,
    around: &Surroundings<'_>,
    weights: &Weights,
    config: &PlannerConfig,
) -> Vec<ScoredCandidate> {
    enumerate_candidates(state, goal, config)
        .into_iter()
        .map(|candidate| {
            let features = compute_features(&candidate, goal, around, config).expect("grid candidates have >= 2 samples");
            ScoredCandidate {
                feasible: candidate.drivable && features.feasible(),
                cost: cost(&features, weights, config),
                features,
                candidate,
            }
        })
        .collect()
}

/// Index of the cheapest feasible candidate; ties go to the lowest index.
pub fn select(scored: &[ScoredCandidate]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scored.iter().enumerate() {
        if !s.feasible {
            continue;
        }
        match best {
            Some(b) if scored[b].cost.total <= s.cost.total => {}
            _ => best = Some(i),
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Candidate(usize),
    /// Every grid candidate was infeasible; the planner brakes straight ahead.
    Fallback,
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub choice: Choice,
    pub path: ShortTermPath,
    pub cost: Option<CostBreakdown>,
    /// Number of feasible candidates on which each weight's term was active.
    pub guard_firings: [usize; WEIGHT_COUNT],
    pub feasible_count: usize,
}

pub fn decide(
    state: &VehicleState,
    goal: Vec2,
    around: &Surroundings<'_>,
    weights: &Weights,
    config: &PlannerConfig,
) -> Decision {
    let scored = score_candidates(state, goal, around, weights, config);
    let mut guard_firings = [0; WEIGHT_COUNT];
    let mut feasible_count = 0;
    for s in scored.iter().filter(|s| s.feasible) {
        feasible_count += 1;
        for (count, fired) in guard_firings.iter_mut().zip(guards(&s.features, config)) {
            *count += usize::from(fired);
        }
    }
    match select(&scored) {
        Some(i) => {
            let s = scored.into_iter().nth(i).expect("selected index in range");
            Decision { choice: Choice::Candidate(i), path: s.candidate, cost: Some(s.cost), guard_firings, feasible_count }
        }
        None => Decision {
            choice: Choice::Fallback,
            path: fallback_candidate(state, config),
            cost: None,
            guard_firings,
            feasible_count,
        },
    }
}

/// Summary of one committed decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRecord {
    pub t: f64,
    pub choice: Choice,
    pub lateral_offset: f64,
    pub speed_delta: f64,
    /// Cost of the committed candidate; `None` for the fallback.
    pub cost: Option<CostBreakdown>,
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub path: Path,
    pub decisions: Vec<DecisionRecord>,
    /// Guard firings summed over all decisions.
    pub guard_firings: [usize; WEIGHT_COUNT],
}

/// Plan the ego path for a scenario.
pub fn plan(scenario: &Scenario, weights: &Weights, config: &PlannerConfig) -> Result<Path, PlannerError> {
    plan_traced(scenario, weights, config).map(|o| o.path)
}

pub fn plan_traced(scenario: &Scenario, weights: &Weights, config: &PlannerConfig) -> Result<PlanOutcome, PlannerError> {
    config.validate()?;
    let objects = propagate_all(scenario, config.dt_sim)?;
    plan_with_objects(scenario, &objects, weights, config)
}

/// Plan against precomputed object trajectories (one per scenario object,
/// sampled at `config.dt_sim` up to the timeout).
pub fn plan_with_objects(
    scenario: &Scenario,
    objects: &[Path],
    weights: &Weights,
    config: &PlannerConfig,
) -> Result<PlanOutcome, PlannerError> {
    config.validate()?;
    weights.validate()?;
    let decisions = step_count(scenario.timeout, config.dt_dec)
        .map_err(|_| PlannerError::InvalidTimeout { timeout: scenario.timeout, dt_dec: config.dt_dec })?;
    let times = time_grid(scenario.timeout, config.dt_sim)?;
    let m = config.steps_per_decision();
    if objects.len() != scenario.objects.len() || objects.iter().any(|p| p.len() != times.len()) {
        return Err(PlannerError::ObjectHorizon);
    }
    let object_locations: Vec<Vec<Vec2>> = objects.iter().map(|p| p.locations().collect()).collect();
    let radii: Vec<f64> = scenario.objects.iter().map(|o| o.bounding_radius()).collect();

    let ego = &scenario.ego;
    let mut state = VehicleState {
        t: 0.0,
        position: ego.position,
        heading: ego.heading,
        speed: ego.speed,
        acceleration: ego.acceleration,
    };
    let mut locations = vec![ego.position];
    let mut directions = vec![ego.heading];
    let mut records = Vec::with_capacity(decisions);
    let mut firings = [0; WEIGHT_COUNT];

    for d in 0..decisions {
        let g0 = d * m;
        state.t = times[g0];
        let obstacles: Vec<Obstacle<'_>> = object_locations
            .iter()
            .zip(&radii)
            .map(|(locs, &radius)| Obstacle { locations: &locs[g0..=g0 + m], radius })
            .collect();
        let around = Surroundings { map: Some(&scenario.map), obstacles: &obstacles };
        let decision = decide(&state, ego.goal, &around, weights, config);
        for (total, n) in firings.iter_mut().zip(decision.guard_firings) {
            *total += n;
        }
        let stp = decision.path;
        records.push(DecisionRecord {
            t: state.t,
            choice: decision.choice,
            lateral_offset: stp.lateral_offset,
            speed_delta: stp.speed_delta,
            cost: decision.cost,
        });
        for p in &stp.samples[1..] {
            locations.push(p.location);
            directions.push(p.direction);
        }
        let end = stp.last();
        state = VehicleState {
            t: end.t,
            position: end.location,
            heading: end.direction,
            speed: end.speed,
            acceleration: end.acceleration,
        };
    }

    let path = Path::from_samples(&times, &locations, &directions, ego.speed, ego.acceleration, config.dt_sim);
    Ok(PlanOutcome { path, decisions: records, guard_firings: firings })
}
