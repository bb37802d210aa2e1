//! Glider kinematics.
//!
//! A glider moves horizontally at `v_h` through the water while its depth
//! follows a triangle wave of slope `v_z` between the surface and `h_max`.
//! One dive plus climb takes `2 h_max / v_z` seconds.

use serde::{Deserialize, Serialize};

use crate::current::CurrentSource;
use crate::error::{Error, Result};
use crate::geo::{Dataset, GriddedField3D, Region, SamplePoint, SurfacePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GliderParams {
    /// Horizontal speed through water, m/s.
    pub v_h: f64,
    /// Vertical speed, m/s.
    pub v_z: f64,
    /// Maximum dive depth, m.
    pub h_max: f64,
    /// Seconds between recorded samples.
    pub sample_dt: f64,
    /// Nominal pitch, degrees. Informational only; slopes use `v_z / v_h`.
    pub pitch: f64,
}

impl Default for GliderParams {
    fn default() -> Self {
        Self {
            v_h: 0.5,
            v_z: 0.2,
            h_max: 800.0,
            sample_dt: 50.0,
            pitch: 20.0,
        }
    }
}

impl GliderParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v_h", self.v_h),
            ("v_z", self.v_z),
            ("h_max", self.h_max),
            ("sample_dt", self.sample_dt),
            ("pitch", self.pitch),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Duration of one dive and climb, s.
    pub fn period(&self) -> f64 {
        2.0 * self.h_max / self.v_z
    }

    /// Horizontal distance covered per cycle in still water, km.
    pub fn run_per_cycle_km(&self) -> f64 {
        self.v_h * self.period() / 1000.0
    }

    pub fn tan_beta(&self) -> f64 {
        self.v_z / self.v_h
    }

    /// Depth at `t` seconds after a surfacing.
    #[inline]
    pub fn depth_at(&self, t: f64) -> f64 {
        let p = self.period();
        let phase = t.rem_euclid(p);
        let d = if phase <= 0.5 * p {
            self.v_z * phase
        } else {
            self.v_z * (p - phase)
        };
        d.clamp(0.0, self.h_max)
    }
}

/// `L tan β / (2h)` cycles for a straight run of `length_km`.
pub fn expected_cycles(length_km: f64, g: &GliderParams) -> f64 {
    length_km * g.tan_beta() / (2.0 * g.h_max / 1000.0)
}

/// `δ = h / (L tan β)`: half the relative distance covered per cycle.
pub fn travel_ratio(length_km: f64, g: &GliderParams) -> f64 {
    (g.h_max / 1000.0) / (length_km * g.tan_beta())
}

/// A straight survey line on the sea surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinePath {
    pub start: SurfacePoint,
    pub end: SurfacePoint,
}

impl LinePath {
    pub fn new(start: SurfacePoint, end: SurfacePoint) -> Result<Self> {
        if start == end {
            return Err(Error::param("path", "start and end coincide"));
        }
        Ok(Self { start, end })
    }

    pub fn length_km(&self, region: &Region) -> f64 {
        region.distance_km(self.start, self.end)
    }

    /// `(A, B, C)` with `A² + B² = 1` such that `Ax + By + C = 0` on the
    /// line, in projected km.
    pub fn line_coefficients(&self, region: &Region) -> [f64; 3] {
        let a = region.project(self.start);
        let b = region.project(self.end);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let n = dx.hypot(dy);
        let (ca, cb) = (dy / n, -dx / n);
        [ca, cb, -(ca * a[0] + cb * a[1])]
    }

    /// Perpendicular distance from a projected point to the line, km.
    pub fn distance_to_line_km(&self, region: &Region, xy: [f64; 2]) -> f64 {
        let [a, b, c] = self.line_coefficients(region);
        (a * xy[0] + b * xy[1] + c).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub t: f64,
    pub lon: f64,
    pub lat: f64,
    pub depth: f64,
}

/// Time-ordered glider positions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub points: Vec<TrackPoint>,
    /// Indices into `points` where the glider is at the surface.
    pub surfacings: Vec<usize>,
}

impl Track {
    fn push(&mut self, p: TrackPoint) {
        if p.depth == 0.0 {
            self.surfacings.push(self.points.len());
        }
        self.points.push(p);
    }
}

/// Fly a straight line in still water, sampling `truth` every
/// `sample_dt` seconds. The glider surfaces at the end point.
pub fn sample_line(path: &LinePath, g: &GliderParams, truth: &GriddedField3D) -> Result<(Dataset, Track)> {
    g.validate()?;
    let region = truth.region();
    for p in [path.start, path.end] {
        if !region.contains_surface(p) {
            return Err(Error::OutsideRegion {
                lon: p.lon,
                lat: p.lat,
                depth: 0.0,
            });
        }
    }
    if g.h_max > region.depth_max {
        return Err(Error::param("h_max", "dives below the bottom of the region"));
    }
    let a = region.project(path.start);
    let b = region.project(path.end);
    let length = (b[0] - a[0]).hypot(b[1] - a[1]);
    if !(length > 0.0) {
        return Err(Error::param("path", "zero length"));
    }
    let speed = g.v_h / 1000.0;
    let dir = [(b[0] - a[0]) / length, (b[1] - a[1]) / length];
    let total = length / speed;
    let n = (total / g.sample_dt).floor() as usize + 1;

    let mut samples = Vec::with_capacity(n);
    let mut track = Track::default();
    for k in 0..n {
        let t = k as f64 * g.sample_dt;
        let s = speed * t;
        let surf = region.unproject([a[0] + dir[0] * s, a[1] + dir[1] * s]);
        let x = surf.at_depth(g.depth_at(t));
        samples.push(SamplePoint { x, y: truth.eval(x)? });
        track.push(TrackPoint {
            t,
            lon: x.lon,
            lat: x.lat,
            depth: x.depth,
        });
    }
    let last = track.points.last().map_or(-1.0, |p| p.t);
    if total > last {
        track.push(TrackPoint {
            t: total,
            lon: path.end.lon,
            lat: path.end.lat,
            depth: 0.0,
        });
    } else if let Some(p) = track.points.last_mut() {
        if p.depth != 0.0 {
            p.depth = 0.0;
            let i = track.points.len() - 1;
            track.surfacings.push(i);
        }
    }
    Ok((Dataset::new(samples), track))
}

/// Surfacing position of one cycle plus the positions at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    pub end: SurfacePoint,
    pub end_km: [f64; 2],
    pub track: Vec<TrackPoint>,
}

/// Integrate one dive and climb by forward Euler with step `dt`
/// (at most `sample_dt`).
///
/// `heading` is in degrees counter-clockwise from east. `start_time` is
/// the absolute time of the surfacing, used to query `current`.
pub fn simulate_cycle(
    region: &Region,
    pos: SurfacePoint,
    heading: f64,
    g: &GliderParams,
    current: &dyn CurrentSource,
    start_time: f64,
    dt: f64,
) -> Result<CycleResult> {
    if dt > g.sample_dt {
        return Err(Error::param(
            "dt",
            format!("must not exceed sample_dt = {}", g.sample_dt),
        ));
    }
    let mut track = Vec::new();
    let end_km = integrate_cycle(
        region,
        region.project(pos),
        heading,
        g,
        current,
        start_time,
        dt,
        Some(&mut track),
    )?;
    Ok(CycleResult {
        end: region.unproject(end_km),
        end_km,
        track,
    })
}

/// Core integrator in projected km; records steps when `track` is given.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_cycle(
    region: &Region,
    start_km: [f64; 2],
    heading: f64,
    g: &GliderParams,
    current: &dyn CurrentSource,
    start_time: f64,
    dt: f64,
    mut track: Option<&mut Vec<TrackPoint>>,
) -> Result<[f64; 2]> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let period = g.period();
    let (s, c) = heading.to_radians().sin_cos();
    let thrust = [g.v_h * c, g.v_h * s];
    let mut xy = start_km;
    let mut t = 0.0;
    let record = |track: &mut Option<&mut Vec<TrackPoint>>, t: f64, xy: [f64; 2], depth: f64| {
        if let Some(tr) = track.as_deref_mut() {
            let p = region.unproject(xy);
            tr.push(TrackPoint {
                t: start_time + t,
                lon: p.lon,
                lat: p.lat,
                depth,
            });
        }
    };
    record(&mut track, 0.0, xy, 0.0);
    while t < period {
        let step = dt.min(period - t);
        let depth = g.depth_at(t);
        let here = region.unproject(xy).at_depth(depth);
        let uv = current.velocity(start_time + t, here);
        xy[0] += (thrust[0] + uv[0]) * step / 1000.0;
        xy[1] += (thrust[1] + uv[1]) * step / 1000.0;
        t += step;
        if !region.contains_km(xy) {
            let p = region.unproject(xy);
            return Err(Error::ExitedRegion {
                lon: p.lon,
                lat: p.lat,
                t: start_time + t,
            });
        }
        let depth = if t >= period { 0.0 } else { g.depth_at(t) };
        record(&mut track, t, xy, depth);
    }
    Ok(xy)
}
