//! End-to-end acceptance checks over the bundled suite.
//!
//! Runs without the libtest harness so the PASS/FAIL line of every
//! criterion is always shown; exits nonzero if any is red.
//! Derived quantities are checked against oracles written here, not against
//! the library's own helpers.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weightcov::coverage::{covered, evaluate_suite, KillMatrix, TestSuite};
use weightcov::geometry::{point_segment_distance, wrap_angle, Vec2};
use weightcov::mutation::{canonical_operators, generate_mutants, operators_from_factors};
use weightcov::oracles::{OracleKind, OracleThresholds};
use weightcov::path::Path;
use weightcov::planner::{
    compute_features, decide, enumerate_candidates, Choice, Obstacle, PlannerConfig, ShortTermPath, Surroundings,
    VehicleState, Weights,
};
use weightcov::scenario::{Lane, Map, Scenario};

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn suite_path() -> PathBuf {
    repo_root().join("scenarios/suite.json")
}

fn weights_path() -> PathBuf {
    repo_root().join("scenarios/weights.json")
}

fn load() -> (Vec<Scenario>, Weights) {
    let scenarios = TestSuite::load(&suite_path()).expect("bundled suite loads");
    let weights = Weights::from_json(&fs::read_to_string(weights_path()).unwrap()).unwrap();
    (scenarios, weights)
}

fn jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

struct Ledger(Vec<Outcome>);

impl Ledger {
    fn check(&mut self, name: &'static str, pass: bool, detail: impl Into<String>) {
        let detail = detail.into();
        println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.0.push(Outcome { name, pass, detail });
    }
}

fn weight_kind_kills(m: &KillMatrix, kind: OracleKind) -> [usize; 6] {
    let mut out = [0; 6];
    for r in &m.records {
        out[r.weight - 1] += usize::from(r.verdicts.get(kind));
    }
    out
}

// 1
fn mutant_cardinality(ledger: &mut Ledger, full: &KillMatrix, weights: &Weights) {
    let start = Instant::now();
    let mutants = generate_mutants(weights, &canonical_operators()).unwrap();
    let elapsed = start.elapsed();
    let mut per_scenario: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &full.records {
        *per_scenario.entry(r.scenario.as_str()).or_default() += 1;
    }
    let mut cells: Vec<(usize, usize)> = mutants.iter().map(|m| (m.weight, m.operator.index)).collect();
    cells.sort();
    cells.dedup();
    let ok = mutants.len() == 42
        && cells.len() == 42
        && per_scenario.len() == full.scenarios.len()
        && per_scenario.values().all(|&n| n == 42)
        && elapsed < Duration::from_secs(1);
    ledger.check(
        "mutant cardinality",
        ok,
        format!("{} mutants in {elapsed:?}, records per scenario {:?}", mutants.len(), per_scenario.values().collect::<Vec<_>>()),
    );
}

// 2
fn identity_survival(ledger: &mut Ledger, scenarios: &[Scenario], weights: &Weights) {
    let identity = operators_from_factors(&[1.0]).unwrap();
    let m = evaluate_suite(scenarios, weights, &identity, &PlannerConfig::default(), &OracleThresholds::ZERO, jobs()).unwrap();
    let kills = m.records.iter().filter(|r| r.verdicts.any()).count();
    let exact = m.records.iter().all(|r| r.max_deviation == 0.0);
    ledger.check(
        "identity mutants survive",
        m.records.len() == 6 * scenarios.len() && kills == 0 && exact,
        format!("{} K=1 runs, {kills} kills, all deviations exactly zero: {exact}", m.records.len()),
    );
}

// 3
fn oracle_subsumption(ledger: &mut Ledger, full: &KillMatrix) {
    let cellwise = full.records.iter().filter(|r| (r.verdicts.so || r.verdicts.co) && !r.verdicts.po).count();
    let po = weight_kind_kills(full, OracleKind::PO);
    let so = weight_kind_kills(full, OracleKind::SO);
    let co = weight_kind_kills(full, OracleKind::CO);
    let counts = (0..6).all(|i| po[i] >= so[i] && po[i] >= co[i]);
    ledger.check(
        "oracle subsumption",
        cellwise == 0 && counts,
        format!("{cellwise} SO/CO-only cells; kills per weight PO {po:?} SO {so:?} CO {co:?}"),
    );
}

// 4
fn irrelevance_invariance(ledger: &mut Ledger, full: &KillMatrix) {
    let id = "s3";
    let firings = full.base.iter().find(|b| b.scenario == id).map(|b| b.guard_firings);
    let records: Vec<_> = full.records.iter().filter(|r| r.scenario == id).collect();
    let killed = records.iter().filter(|r| r.verdicts.any()).count();
    ledger.check(
        "irrelevance invariance",
        firings == Some([0; 6]) && records.len() == 42 && killed == 0,
        format!("{id} guard firings {firings:?}, {killed}/{} mutants killed", records.len()),
    );
}

// 5
fn coverage_attainability(ledger: &mut Ledger, full: &KillMatrix) {
    let row: Vec<bool> = (1..=6).map(|i| covered(full, i, OracleKind::PO)).collect();
    let firings: Vec<usize> = (0..6).map(|i| full.base.iter().map(|b| b.guard_firings[i]).sum()).collect();
    ledger.check(
        "PO coverage of every weight",
        row.iter().all(|&c| c),
        format!("covered {row:?}, base-run guard firings {firings:?}"),
    );
}

// 6
fn threshold_monotonicity(ledger: &mut Ledger, scenarios: &[Scenario], weights: &Weights, full: &KillMatrix) {
    let half = evaluate_suite(
        scenarios,
        weights,
        &canonical_operators(),
        &PlannerConfig::default(),
        &OracleThresholds::uniform(0.5),
        jobs(),
    )
    .unwrap();
    let mut escaped = 0;
    let mut strict_kills = 0;
    for (a, b) in half.records.iter().zip(&full.records) {
        assert_eq!((&a.scenario, a.weight, a.operator.index), (&b.scenario, b.weight, b.operator.index));
        for kind in OracleKind::ALL {
            strict_kills += usize::from(a.verdicts.get(kind));
            escaped += usize::from(a.verdicts.get(kind) && !b.verdicts.get(kind));
        }
    }
    let loose_kills: usize = full.records.iter().map(|r| OracleKind::ALL.iter().filter(|k| r.verdicts.get(**k)).count()).sum();
    ledger.check(
        "threshold monotonicity",
        half.records.len() == full.records.len() && escaped == 0,
        format!("{strict_kills} kills at 0.5 vs {loose_kills} at 0, {escaped} not in the zero-threshold set"),
    );
}

fn dir_bytes(dir: &FsPath) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

// 7
fn parallel_determinism(ledger: &mut Ledger) {
    let tmp = tempfile::tempdir().unwrap();
    let run = |jobs: &str| {
        let out = tmp.path().join(format!("jobs{jobs}"));
        let status = Command::new(env!("CARGO_BIN_EXE_weightcov"))
            .args(["analyze", "--jobs", jobs, "--suite"])
            .arg(suite_path())
            .arg("--weights")
            .arg(weights_path())
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        dir_bytes(&out)
    };
    let one = run("1");
    let eight = run("8");
    let differing: Vec<&String> = one.keys().filter(|k| one.get(*k) != eight.get(*k)).collect();
    ledger.check(
        "determinism under parallelism",
        !one.is_empty() && one == eight,
        format!("{} files compared, differing {differing:?}", one.len()),
    );
}

// 8
fn arc_features(ledger: &mut Ledger) {
    let (r, v) = (20.0, 10.0);
    let cfg = PlannerConfig::default();
    let n = cfg.steps_per_decision();
    let dt = cfg.dt_sim;
    // exact circle, constant angular rate v / r
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let theta: Vec<f64> = times.iter().map(|t| v * t / r).collect();
    let locations: Vec<Vec2> = theta.iter().map(|th| Vec2::new(r * th.sin(), r * (1.0 - th.cos()))).collect();
    let stp = ShortTermPath {
        samples: Path::from_samples(&times, &locations, &theta, v, 0.0, dt).points,
        index: Some(0),
        lateral_offset: 0.0,
        speed_delta: 0.0,
        target_speed: v,
        drivable: true,
    };
    let f = compute_features(&stp, Vec2::new(100.0, 0.0), &Surroundings { map: None, obstacles: &[] }, &cfg).unwrap();
    let lat_err = (f.max_lat_acc - v * v / r).abs() / (v * v / r);
    let curv_err = (f.max_curv - 1.0 / r).abs() / (1.0 / r);
    ledger.check(
        "arc feature accuracy",
        lat_err <= 0.05 && curv_err <= 0.05,
        format!("maxLatAcc {:.4} ({:.3}% off), maxCurv {:.5} ({:.3}% off)", f.max_lat_acc, 100.0 * lat_err, f.max_curv, 100.0 * curv_err),
    );
}

// 9
fn runtime(ledger: &mut Ledger, elapsed: Duration, runs: usize) {
    ledger.check(
        "desk-scale runtime",
        elapsed < Duration::from_secs(60),
        format!("{runs} planner runs in {elapsed:.2?} on {} threads ({} build)", jobs(), if cfg!(debug_assertions) { "debug" } else { "release" }),
    );
}

struct Brute<'a> {
    map: &'a Map,
    obstacles: &'a [(Vec<Vec2>, f64)],
    weights: [f64; 6],
    cfg: &'a PlannerConfig,
    goal: Vec2,
}

fn lane_distance(lane: &Lane, p: Vec2) -> f64 {
    let mut best = f64::INFINITY;
    for w in lane.centerline.windows(2) {
        best = best.min(point_segment_distance(p, w[0], w[1]));
    }
    best
}

impl Brute<'_> {
    fn outside(&self, p: Vec2) -> f64 {
        let mut best = f64::INFINITY;
        for l in &self.map.lanes {
            best = best.min((lane_distance(l, p) - l.width / 2.0).max(0.0));
        }
        best
    }

    fn limit(&self, p: Vec2) -> f64 {
        let mut inside = f64::INFINITY;
        let mut nearest = (f64::INFINITY, f64::INFINITY);
        for l in &self.map.lanes {
            let d = lane_distance(l, p);
            if d <= l.width / 2.0 {
                inside = inside.min(l.speed_limit);
            }
            if d < nearest.0 {
                nearest = (d, l.speed_limit);
            }
        }
        if inside.is_finite() {
            inside
        } else {
            nearest.1
        }
    }

    /// Total cost, or `None` when the candidate may not be taken.
    fn score(&self, c: &ShortTermPath) -> Option<f64> {
        if !c.drivable {
            return None;
        }
        let s = &c.samples;
        let start_out = self.outside(s[0].location);
        let ego_r = self.cfg.ego_length / 2.0 + self.cfg.safety_margin;
        let (mut lat, mut acc, mut dec, mut speed, mut curv, mut limit) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
        for i in 1..s.len() {
            let ds = s[i].location.distance(s[i - 1].location);
            let k = if ds > 0.0 { (wrap_angle(s[i].direction - s[i - 1].direction) / ds).abs() } else { 0.0 };
            lat = lat.max(s[i].speed * s[i].speed * k);
            curv = curv.max(k);
            acc = acc.max(s[i].acceleration);
            dec = dec.max(-s[i].acceleration);
            speed = speed.max(s[i].speed);
            limit = limit.min(self.limit(s[i].location));
            if self.outside(s[i].location) > start_out {
                return None;
            }
            for (locs, r) in self.obstacles {
                if s[i].location.distance(locs[i]) < ego_r + r {
                    return None;
                }
            }
        }
        let w = self.weights;
        let flat = |on: bool, wi: f64| if on { wi } else { 0.0 };
        let terms = [
            w[0] * lat,
            flat(lat > self.cfg.tau_lat, w[1]),
            flat(speed > limit, w[2]),
            flat(acc > self.cfg.tau_acc, w[3]),
            flat(dec > self.cfg.tau_dec, w[4]),
            flat(curv > self.cfg.tau_curv, w[5]),
        ];
        let progress = self.cfg.c_prog * s[s.len() - 1].location.distance(self.goal);
        Some(terms.iter().fold(0.0, |a, t| a + t) + progress)
    }

    fn argmin(&self, candidates: &[ShortTermPath]) -> Option<usize> {
        let scores: Vec<Option<f64>> = candidates.iter().map(|c| self.score(c)).collect();
        let best = scores.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        scores.iter().position(|s| *s == Some(best))
    }
}

fn straight_lane(id: &str, y: f64, width: f64, limit: f64) -> Lane {
    Lane {
        id: id.into(),
        centerline: vec![Vec2::new(-200.0, y), Vec2::new(200.0, y)],
        width,
        speed_limit: limit,
    }
}

// 10
fn brute_force_argmin(ledger: &mut Ledger) {
    let cfg = PlannerConfig::default();
    let n = cfg.steps_per_decision();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2026);
    let (mut agree, mut fallbacks, mut ties) = (0, 0, 0);
    let mut mismatches = Vec::new();
    for case in 0..100 {
        let mirrored = case % 5 == 0;
        let (wa, la) = (rng.gen_range(4.0..7.0), rng.gen_range(5.0..15.0));
        let (wb, lb) = if mirrored { (wa, la) } else { (rng.gen_range(4.0..7.0), rng.gen_range(5.0..15.0)) };
        let map = Map { lanes: vec![straight_lane("a", 2.0, wa, la), straight_lane("b", -2.0, wb, lb)] };
        let (state, goal) = if mirrored {
            // symmetric about the x axis, so mirrored candidates tie exactly
            let s = VehicleState { t: 0.0, position: Vec2::new(0.0, 0.0), heading: 0.0, speed: rng.gen_range(3.0..12.0), acceleration: 0.0 };
            (s, Vec2::new(rng.gen_range(20.0..150.0), 0.0))
        } else {
            let s = VehicleState {
                t: rng.gen_range(0.0..10.0),
                position: Vec2::new(rng.gen_range(-20.0..20.0), rng.gen_range(-3.0..3.0)),
                heading: rng.gen_range(-0.6..0.6),
                speed: rng.gen_range(0.0..15.0),
                acceleration: rng.gen_range(-2.0..2.0),
            };
            (s, Vec2::new(rng.gen_range(-50.0..150.0), rng.gen_range(-20.0..20.0)))
        };
        let mut obstacles: Vec<(Vec<Vec2>, f64)> = Vec::new();
        let count = if mirrored { 1 } else { rng.gen_range(0..4) };
        for _ in 0..count {
            let (p0, vel) = if mirrored {
                (Vec2::new(state.speed * rng.gen_range(0.8..1.2), 0.0), Vec2::new(0.0, 0.0))
            } else {
                (
                    state.position + Vec2::new(rng.gen_range(-5.0..25.0), rng.gen_range(-8.0..8.0)),
                    Vec2::new(rng.gen_range(-8.0..8.0), rng.gen_range(-2.0..2.0)),
                )
            };
            let locs = (0..=n).map(|k| p0 + vel * (k as f64 * cfg.dt_sim)).collect();
            obstacles.push((locs, if mirrored { 0.3 } else { rng.gen_range(0.3..2.0) }));
        }
        let mut w: [f64; 6] = std::array::from_fn(|_| rng.gen_range(0.0..10.0));
        if !mirrored && rng.gen_bool(0.3) {
            w[rng.gen_range(0..6)] = 0.0;
        }
        let weights = Weights::from_array(w);

        let obs: Vec<Obstacle<'_>> = obstacles.iter().map(|(l, r)| Obstacle { locations: l, radius: *r }).collect();
        let around = Surroundings { map: Some(&map), obstacles: &obs };
        let got = match decide(&state, goal, &around, &weights, &cfg).choice {
            Choice::Candidate(i) => Some(i),
            Choice::Fallback => None,
        };
        let brute = Brute { map: &map, obstacles: &obstacles, weights: w, cfg: &cfg, goal };
        let candidates = enumerate_candidates(&state, goal, &cfg);
        let want = brute.argmin(&candidates);
        if let Some(i) = want {
            let best = brute.score(&candidates[i]);
            ties += usize::from(candidates.iter().filter(|c| brute.score(c) == best).count() > 1);
        }
        fallbacks += usize::from(want.is_none());
        if got == want {
            agree += 1;
        } else {
            mismatches.push((case, got, want));
        }
    }
    ledger.check(
        "brute-force argmin",
        agree == 100,
        format!("{agree}/100 agree ({ties} with tied minima, {fallbacks} fallbacks), mismatches {mismatches:?}"),
    );
}

fn main() {
    let (scenarios, weights) = load();
    assert_eq!(scenarios.len(), 10);
    let mut ledger = Ledger(Vec::new());

    let start = Instant::now();
    let full = evaluate_suite(
        &scenarios,
        &weights,
        &canonical_operators(),
        &PlannerConfig::default(),
        &OracleThresholds::ZERO,
        jobs(),
    )
    .unwrap();
    let elapsed = start.elapsed();

    mutant_cardinality(&mut ledger, &full, &weights);
    identity_survival(&mut ledger, &scenarios, &weights);
    oracle_subsumption(&mut ledger, &full);
    irrelevance_invariance(&mut ledger, &full);
    coverage_attainability(&mut ledger, &full);
    threshold_monotonicity(&mut ledger, &scenarios, &weights, &full);
    parallel_determinism(&mut ledger);
    arc_features(&mut ledger);
    runtime(&mut ledger, elapsed, scenarios.len() * 43);
    brute_force_argmin(&mut ledger);

    let failed: Vec<String> = ledger.0.iter().filter(|o| !o.pass).map(|o| format!("{}: {}", o.name, o.detail)).collect();
    println!("{}/{} criteria pass", ledger.0.len() - failed.len(), ledger.0.len());
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:#?}");
        std::process::exit(1);
    }
}
