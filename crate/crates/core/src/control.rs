//! Receding-horizon heading control of a glider along a designed line.
//!
//! At every surfacing the controller optimizes `H` cumulative turning
//! angles against a rollout in the imputed current, applies only the first
//! one, flies one cycle in the true current and then adapts the objective
//! weights and the horizon to the progress made.
//!
//! The objective of a candidate `α` is `w1·f1 + w2·f2`, where `f1` is the
//! mean distance of the rollout surfacings to the designed line and `f2`
//! the distance of the last one to the target.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::current::{CurrentProvider, CurrentSource};
use crate::error::{Error, Result};
use crate::geo::{Region, SurfacePoint};
use crate::glider::{integrate_cycle, travel_ratio, GliderParams, LinePath, TrackPoint};
use crate::optim::{island_seed, OptProblem, OptimizerSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    /// Base horizon `H0`, cycles.
    pub h0: usize,
    /// Hard cap on the horizon, cycles.
    pub max_horizon: usize,
    /// Endpoint tolerance, km.
    pub eta_km: f64,
    /// Turning angles are bounded to `±turn_bound_deg`.
    pub turn_bound_deg: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub w1_min: f64,
    pub w1_max: f64,
    pub w2_min: f64,
    pub w2_max: f64,
    pub epsilon: f64,
    /// `None` uses `travel_ratio` of the mission length.
    pub delta: Option<f64>,
    pub max_time_s: f64,
    /// Euler step of planning rollouts, s.
    pub rollout_dt: f64,
    /// Euler step of the true cycle, s.
    pub step_dt: f64,
    /// Objective value of a rollout that leaves the region.
    pub exit_penalty: f64,
    /// Use `f2` alone with fixed weights.
    pub single_objective: bool,
    pub glider: GliderParams,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            h0: 10,
            max_horizon: 40,
            eta_km: 2.0,
            turn_bound_deg: 100.0,
            c_min: 0.1,
            c_max: 10.0,
            w1_min: 0.1,
            w1_max: 10.0,
            w2_min: 0.1,
            w2_max: 10.0,
            epsilon: 1e-5,
            delta: None,
            max_time_s: 30.0 * 86_400.0,
            rollout_dt: 200.0,
            step_dt: 50.0,
            exit_penalty: 1e6,
            single_objective: false,
            glider: GliderParams::default(),
        }
    }
}

impl ControlConfig {
    pub fn validate(&self) -> Result<()> {
        self.glider.validate()?;
        if self.h0 == 0 {
            return Err(Error::param("h0", "must be at least 1"));
        }
        if self.max_horizon < self.h0 {
            return Err(Error::param("max_horizon", "must be at least h0"));
        }
        for (name, v) in [
            ("eta_km", self.eta_km),
            ("turn_bound_deg", self.turn_bound_deg),
            ("epsilon", self.epsilon),
            ("max_time_s", self.max_time_s),
            ("rollout_dt", self.rollout_dt),
            ("step_dt", self.step_dt),
            ("exit_penalty", self.exit_penalty),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if self.step_dt > self.glider.sample_dt {
            return Err(Error::param("step_dt", "must not exceed the glider sample_dt"));
        }
        for (name, lo, hi) in [
            ("c", self.c_min, self.c_max),
            ("w1", self.w1_min, self.w1_max),
            ("w2", self.w2_min, self.w2_max),
        ] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::param(name, format!("need 0 < min <= max, got [{lo}, {hi}]")));
            }
        }
        if let Some(d) = self.delta {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::param("delta", format!("must be positive, got {d}")));
            }
        }
        Ok(())
    }

    fn initial_weights(&self) -> (f64, f64) {
        if self.single_objective {
            (0.0, 1.0)
        } else {
            (0.5 * (self.w1_min + self.w1_max), 0.5 * (self.w2_min + self.w2_max))
        }
    }
}

/// Controller state between surfacings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlState {
    /// Number of completed cycles.
    pub k: usize,
    pub w1: f64,
    pub w2: f64,
    pub horizon: usize,
    /// Current heading, degrees counter-clockwise from east.
    pub heading: f64,
    /// Surfacing positions in projected km, starting with the launch point.
    pub positions: Vec<[f64; 2]>,
    /// Time since launch, s.
    pub t: f64,
}

/// Mean distance of `points` to the line `Ax + By + C = 0`.
pub fn f1(points: &[[f64; 2]], line: [f64; 3]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let n = line[0].hypot(line[1]);
    let sum: f64 = points
        .iter()
        .map(|p| (line[0] * p[0] + line[1] * p[1] + line[2]).abs() / n)
        .sum();
    sum / points.len() as f64
}

/// Distance from the last rollout surfacing to the target.
pub fn f2(points: &[[f64; 2]], target: [f64; 2]) -> f64 {
    points
        .last()
        .map_or(f64::INFINITY, |p| (p[0] - target[0]).hypot(p[1] - target[1]))
}

/// Everything a planning rollout needs. The current is the planner's
/// estimate; the true field is never visible here.
#[derive(Clone, Copy)]
pub struct Rollout<'a> {
    pub region: &'a Region,
    pub glider: &'a GliderParams,
    pub current: &'a dyn CurrentSource,
    pub start_km: [f64; 2],
    pub heading: f64,
    pub t0: f64,
    pub dt: f64,
}

impl Rollout<'_> {
    /// Surfacings after applying cumulative turning angles, or `None` when
    /// the glider would leave the region.
    pub fn run(&self, angles: &[f64]) -> Option<Vec<[f64; 2]>> {
        let mut xy = self.start_km;
        let mut heading = self.heading;
        let mut t = self.t0;
        let period = self.glider.period();
        let mut out = Vec::with_capacity(angles.len());
        for a in angles {
            heading += a;
            xy = integrate_cycle(self.region, xy, heading, self.glider, self.current, t, self.dt, None).ok()?;
            t += period;
            out.push(xy);
        }
        Some(out)
    }
}

/// The planner's objective: both parts come from one rollout.
#[derive(Clone, Copy)]
pub struct Objective<'a> {
    pub rollout: Rollout<'a>,
    pub line: [f64; 3],
    pub target: [f64; 2],
    pub w1: f64,
    pub w2: f64,
    pub exit_penalty: f64,
}

impl Objective<'_> {
    pub fn eval(&self, angles: &[f64]) -> f64 {
        match self.rollout.run(angles) {
            Some(pts) => self.w1 * f1(&pts, self.line) + self.w2 * f2(&pts, self.target),
            None => self.exit_penalty,
        }
    }
}

/// Clamped weight-update factor `c = δ / Δr`.
pub fn update_factor(delta: f64, delta_r: f64, cfg: &ControlConfig) -> f64 {
    (delta / delta_r).clamp(cfg.c_min, cfg.c_max)
}

/// `Δr = max(r_prev − r, ε)`.
pub fn progress(r_prev: f64, r: f64, epsilon: f64) -> f64 {
    (r_prev - r).max(epsilon)
}

/// New `(w1, w2)` after a cycle that moved the relative distance from
/// `r_prev` to `r`. Returns the factor `c` as well.
pub fn update_weights(w: (f64, f64), r_prev: f64, r: f64, delta: f64, cfg: &ControlConfig) -> ((f64, f64), f64) {
    let c = update_factor(delta, progress(r_prev, r, cfg.epsilon), cfg);
    let w1 = (w.0 / c).clamp(cfg.w1_min, cfg.w1_max);
    let w2 = (w.1 * c).clamp(cfg.w2_min, cfg.w2_max);
    ((w1, w2), c)
}

/// Grow the horizon while `w2` is saturated, shrink it otherwise, then cap
/// it by the cycles the current pace needs to finish.
pub fn update_horizon(h: usize, w2: f64, r: f64, delta_r: f64, cfg: &ControlConfig) -> usize {
    let h = if w2 == cfg.w2_max {
        h + cfg.h0
    } else {
        h.saturating_sub(cfg.h0).max(cfg.h0)
    };
    let pace = (r / delta_r).ceil();
    let cap = if pace.is_finite() && pace < cfg.max_horizon as f64 {
        (pace as usize).max(1)
    } else {
        cfg.max_horizon
    };
    h.min(cap).min(cfg.max_horizon).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    ExitedRegion,
    TimeExceeded,
}

/// One controller step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surfacing {
    pub k: usize,
    /// Time of this surfacing since launch, s.
    pub t: f64,
    pub lon: f64,
    pub lat: f64,
    pub x_km: f64,
    pub y_km: f64,
    /// Heading flown in the cycle that ended here.
    pub heading: f64,
    /// Turning angle applied at the previous surfacing.
    pub alpha: f64,
    /// Horizon and weights the optimizer used.
    pub horizon: usize,
    pub w1: f64,
    pub w2: f64,
    pub objective: f64,
    pub evaluations: usize,
    /// Distance to the designed line, km.
    pub deviation_km: f64,
    pub distance_to_target_km: f64,
    /// Relative distance to target after this cycle.
    pub r: f64,
    /// Weight-update factor and progress; absent after the final cycle.
    pub c: Option<f64>,
    pub delta_r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionResult {
    pub mission: LinePath,
    pub optimizer: OptimizerSpec,
    pub seed: u64,
    pub delta: f64,
    pub outcome: Outcome,
    pub completed: bool,
    pub surfacings: Vec<Surfacing>,
    pub track: Vec<TrackPoint>,
    pub deviation: Option<DeviationStats>,
    /// Optimizer wall time per surfacing, s. Excluded from
    /// [`MissionResult::same_run`].
    pub wall_times: Vec<f64>,
}

impl MissionResult {
    /// Equality of everything except wall times.
    pub fn same_run(&self, other: &Self) -> bool {
        let strip = |m: &Self| Self {
            wall_times: Vec::new(),
            ..m.clone()
        };
        strip(self) == strip(other)
    }

    pub fn surfacing_points(&self) -> Vec<[f64; 2]> {
        self.surfacings.iter().map(|s| [s.x_km, s.y_km]).collect()
    }

    /// Largest `w2` hit during the mission.
    pub fn max_w2(&self) -> f64 {
        self.surfacings.iter().map(|s| s.w2).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Min, mean and max distance of `points` to `line` (projected km).
pub fn deviation_stats(points: &[[f64; 2]], line: [f64; 3]) -> Option<DeviationStats> {
    if points.is_empty() {
        return None;
    }
    let n = line[0].hypot(line[1]);
    let d: Vec<f64> = points
        .iter()
        .map(|p| (line[0] * p[0] + line[1] * p[1] + line[2]).abs() / n)
        .collect();
    Some(DeviationStats {
        min: d.iter().copied().fold(f64::INFINITY, f64::min),
        mean: d.iter().sum::<f64>() / d.len() as f64,
        max: d.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// The five reference missions.
pub fn table_missions() -> [LinePath; 5] {
    let l = |a: (f64, f64), b: (f64, f64)| LinePath {
        start: SurfacePoint::new(a.0, a.1),
        end: SurfacePoint::new(b.0, b.1),
    };
    [
        l((145.1, 38.0), (142.4, 38.0)),
        l((142.4, 38.6), (145.1, 38.6)),
        l((143.3, 37.3), (143.3, 39.1)),
        l((144.2, 39.1), (144.2, 37.3)),
        l((142.4, 37.3), (145.1, 39.1)),
    ]
}

fn wrap_degrees(a: f64) -> f64 {
    let w = (a + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 {
        180.0
    } else {
        w
    }
}

/// Fly `mission` under `truth` while planning with `provider` only.
///
/// Returns an error only for invalid input; a glider that leaves the
/// region or runs out of time yields `completed = false`.
pub fn run_mission(
    mission: &LinePath,
    region: &Region,
    cfg: &ControlConfig,
    optimizer: &OptimizerSpec,
    provider: &CurrentProvider,
    truth: &dyn CurrentSource,
    seed: u64,
) -> Result<MissionResult> {
    cfg.validate()?;
    region.validate()?;
    let mission = LinePath::new(mission.start, mission.end)?;
    for p in [mission.start, mission.end] {
        if !region.contains_surface(p) {
            return Err(Error::OutsideRegion {
                lon: p.lon,
                lat: p.lat,
                depth: 0.0,
            });
        }
    }
    let g = &cfg.glider;
    let line = mission.line_coefficients(region);
    let start = region.project(mission.start);
    let target = region.project(mission.end);
    let dist = |p: [f64; 2]| (p[0] - target[0]).hypot(p[1] - target[1]);
    let total = dist(start);
    let delta = cfg.delta.unwrap_or_else(|| travel_ratio(total, g));
    let period = g.period();
    let bound = cfg.turn_bound_deg;

    let (w1, w2) = cfg.initial_weights();
    let mut st = ControlState {
        k: 0,
        w1,
        w2,
        horizon: cfg.h0.min(cfg.max_horizon),
        heading: (target[1] - start[1]).atan2(target[0] - start[0]).to_degrees(),
        positions: vec![start],
        t: 0.0,
    };
    let mut surfacings = Vec::new();
    let mut wall_times = Vec::new();
    let mut track = Vec::new();
    let mut outcome = Outcome::TimeExceeded;

    while st.t < cfg.max_time_s {
        let pos = *st.positions.last().expect("launch point");
        let objective = Objective {
            rollout: Rollout {
                region,
                glider: g,
                current: &provider.at_time(st.t),
                start_km: pos,
                heading: st.heading,
                t0: st.t,
                dt: cfg.rollout_dt,
            },
            line,
            target,
            w1: st.w1,
            w2: st.w2,
            exit_penalty: cfg.exit_penalty,
        };
        let h = st.horizon;
        let problem = OptProblem::new(&vec![(-bound, bound); h], |a: &[f64]| objective.eval(a))?
            .with_initial_guess(vec![0.0; h])?;
        let clock = Instant::now();
        let best = optimizer.run(&problem, island_seed(seed, st.k))?;
        wall_times.push(clock.elapsed().as_secs_f64());

        let alpha = best.best[0];
        st.heading = wrap_degrees(st.heading + alpha);
        let mut cycle = Vec::new();
        let flown = integrate_cycle(region, pos, st.heading, g, truth, st.t, cfg.step_dt, Some(&mut cycle));
        if !track.is_empty() && !cycle.is_empty() {
            cycle.remove(0);
        }
        track.extend(cycle);
        let next = match flown {
            Ok(xy) => xy,
            Err(Error::ExitedRegion { .. }) => {
                outcome = Outcome::ExitedRegion;
                break;
            }
            Err(e) => return Err(e),
        };
        st.t += period;
        st.k += 1;
        st.positions.push(next);

        let r_prev = dist(pos) / total;
        let r = dist(next) / total;
        let lonlat = region.unproject(next);
        let mut rec = Surfacing {
            k: st.k,
            t: st.t,
            lon: lonlat.lon,
            lat: lonlat.lat,
            x_km: next[0],
            y_km: next[1],
            heading: st.heading,
            alpha,
            horizon: h,
            w1: st.w1,
            w2: st.w2,
            objective: best.value,
            evaluations: best.evaluations,
            deviation_km: f1(&[next], line),
            distance_to_target_km: dist(next),
            r,
            c: None,
            delta_r: None,
        };
        if dist(next) <= cfg.eta_km {
            surfacings.push(rec);
            outcome = Outcome::Reached;
            break;
        }
        let dr = progress(r_prev, r, cfg.epsilon);
        let c = update_factor(delta, dr, cfg);
        if !cfg.single_objective {
            let ((w1, w2), _) = update_weights((st.w1, st.w2), r_prev, r, delta, cfg);
            st.w1 = w1;
            st.w2 = w2;
        }
        st.horizon = update_horizon(st.horizon, st.w2, r, dr, cfg);
        rec.c = Some(c);
        rec.delta_r = Some(dr);
        surfacings.push(rec);
    }

    let points: Vec<[f64; 2]> = surfacings.iter().map(|s| [s.x_km, s.y_km]).collect();
    Ok(MissionResult {
        mission,
        optimizer: optimizer.clone(),
        seed,
        delta,
        outcome,
        completed: outcome == Outcome::Reached,
        deviation: deviation_stats(&points, line),
        surfacings,
        track,
        wall_times,
    })
}

/// Designed line and realized track over the region, as an SVG document.
pub fn mission_svg(region: &Region, result: &MissionResult) -> String {
    let (w, h) = (region.width_km(), region.height_km());
    let scale = 600.0 / w.max(h);
    let px = |xy: [f64; 2]| (xy[0] * scale + 20.0, (h - xy[1]) * scale + 20.0);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\">\n",
        w * scale + 40.0,
        h * scale + 40.0
    );
    s += &format!(
        "<rect x=\"20\" y=\"20\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#888\"/>\n",
        w * scale,
        h * scale
    );
    let (a, b) = (
        px(region.project(result.mission.start)),
        px(region.project(result.mission.end)),
    );
    s += &format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#1f77b4\" stroke-dasharray=\"6 4\"/>\n",
        a.0, a.1, b.0, b.1
    );
    let pts: Vec<String> = result
        .track
        .iter()
        .map(|p| {
            let q = px(region.project(SurfacePoint::new(p.lon, p.lat)));
            format!("{:.2},{:.2}", q.0, q.1)
        })
        .collect();
    s += &format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\"/>\n",
        pts.join(" ")
    );
    for p in result.surfacing_points() {
        let q = px(p);
        s += &format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"#d62728\"/>\n",
            q.0, q.1
        );
    }
    s += "</svg>\n";
    s
}
