use super::config::{PlannerConfig, Weights, WEIGHT_COUNT};
use super::features::Features;

/// Cost contributions of one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// Contribution of `w1`..`w6`.
    pub terms: [f64; WEIGHT_COUNT],
    pub progress: f64,
    pub total: f64,
}

/// Which weight terms are active for `f`.
///
/// Entry 0 is true when `w1` multiplies a nonzero lateral acceleration;
/// entries 1..=5 are the threshold predicates guarding the flat penalties.
/// All comparisons are strict.
pub fn guards(f: &Features, config: &PlannerConfig) -> [bool; WEIGHT_COUNT] {
    [
        f.max_lat_acc > 0.0,
        f.max_lat_acc > config.tau_lat,
        f.max_speed > f.speed_limit,
        f.max_acc > config.tau_acc,
        f.max_decel > config.tau_dec,
        f.max_curv > config.tau_curv,
    ]
}

pub fn cost(f: &Features, w: &Weights, config: &PlannerConfig) -> CostBreakdown {
    let g = guards(f, config);
    let w = w.to_array();
    let flat = |i: usize| if g[i] { w[i] } else { 0.0 };
    let terms = [w[0] * f.max_lat_acc, flat(1), flat(2), flat(3), flat(4), flat(5)];
    let progress = config.c_prog * f.goal_dist;
    let total = terms.iter().fold(0.0, |acc, t| acc + t) + progress;
    CostBreakdown { terms, progress, total }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet(goal_dist: f64) -> Features {
        Features {
            max_lat_acc: 0.0,
            max_acc: 0.0,
            max_decel: 0.0,
            max_speed: 0.0,
            max_curv: 0.0,
            goal_dist,
            speed_limit: 10.0,
            collides: false,
            off_road: false,
        }
    }

    const ONES: Weights = Weights { w1: 1.0, w2: 1.0, w3: 1.0, w4: 1.0, w5: 1.0, w6: 1.0 };

    #[test]
    fn only_progress_when_features_are_zero() {
        let cfg = PlannerConfig { c_prog: 1.5, ..PlannerConfig::default() };
        let c = cost(&quiet(4.0), &ONES, &cfg);
        assert_eq!(c.total, 6.0);
        assert_eq!(c.terms, [0.0; 6]);
    }

    #[test]
    fn threshold_equality_is_not_penalised() {
        let cfg = PlannerConfig::default();
        let f = Features { max_lat_acc: cfg.tau_lat, ..quiet(0.0) };
        assert_eq!(cost(&f, &ONES, &cfg).terms[1], 0.0);
        let f = Features { max_lat_acc: cfg.tau_lat + 1e-12, ..quiet(0.0) };
        assert_eq!(cost(&f, &ONES, &cfg).terms[1], 1.0);
        let f = Features { max_speed: 10.0, ..quiet(0.0) };
        assert_eq!(cost(&f, &ONES, &cfg).terms[2], 0.0);
    }

    #[test]
    fn linear_lateral_term() {
        let cfg = PlannerConfig::default();
        let w = Weights { w1: 2.0, ..ONES };
        let f = Features { max_lat_acc: 1.5, ..quiet(0.0) };
        let c = cost(&f, &w, &cfg);
        assert_eq!(c.total, 3.0);
        assert_eq!(c.terms[0], 3.0);
    }

    #[test]
    fn every_guard_fires_past_its_threshold() {
        let cfg = PlannerConfig::default();
        let f = Features {
            max_lat_acc: 3.0,
            max_acc: 3.0,
            max_decel: 4.0,
            max_speed: 11.0,
            max_curv: 0.2,
            ..quiet(2.0)
        };
        let w = Weights::from_array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let c = cost(&f, &w, &cfg);
        assert_eq!(c.terms, [3.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(c.total, 25.0);
    }
}
