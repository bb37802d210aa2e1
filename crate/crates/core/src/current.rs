//! Vertical current profiles and current sources for glider simulation.
//!
//! Subsurface velocity is imputed from the surface velocity through a cubic
//! velocity-ratio profile per component:
//!
//! ```text
//! ρ(z) = β₀ + β₁z + β₂z² + β₃z³,    v(x, y, z) ≈ ρ(z) · v(x, y, 0)
//! ```
//!
//! with `z` in meters, positive downward.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{uniform_cell, GeoPoint, Region, VectorField3D};

/// Lower and upper bounds of retained velocity ratios (inclusive).
pub const RATIO_BOUNDS: (f64, f64) = (-0.5, 1.5);

/// Surface speeds below this (m/s) are not used as ratio denominators.
pub const SURFACE_FLOOR: f64 = 1e-3;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Evaluate `c₀ + c₁z + c₂z² + c₃z³`.
#[inline]
pub fn cubic(c: &[f64; 4], z: f64) -> f64 {
    ((c[3] * z + c[2]) * z + c[1]) * z + c[0]
}

/// Regression of one velocity component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentFit {
    pub coefficients: [f64; 4],
    pub r2: f64,
    /// Pairs used in the fit.
    pub n: usize,
    /// Pairs dropped by the bounds or the surface floor.
    pub n_excluded: usize,
}

impl ComponentFit {
    pub fn fixed(coefficients: [f64; 4]) -> Self {
        Self {
            coefficients,
            r2: 1.0,
            n: 0,
            n_excluded: 0,
        }
    }

    pub fn ratio(&self, z: f64) -> f64 {
        cubic(&self.coefficients, z)
    }
}

/// Per-component cubic velocity-ratio profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioModel {
    pub zonal: ComponentFit,
    pub meridional: ComponentFit,
}

impl RatioModel {
    pub fn new(zonal: [f64; 4], meridional: [f64; 4]) -> Self {
        Self {
            zonal: ComponentFit::fixed(zonal),
            meridional: ComponentFit::fixed(meridional),
        }
    }

    /// Reference depth profile used when no history is available.
    pub fn default_profile() -> Self {
        Self::new([1.03, -3.84e-4, -4.93e-6, 4.98e-9], [1.03, -6.27e-4, -4.62e-6, 4.87e-9])
    }

    /// Depth-independent profile: `ρ ≡ 1`.
    pub fn identity() -> Self {
        Self::new([1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])
    }

    pub fn zonal_ratio(&self, z: f64) -> f64 {
        self.zonal.ratio(z)
    }

    pub fn meridional_ratio(&self, z: f64) -> f64 {
        self.meridional.ratio(z)
    }

    /// Subsurface `(u, v)` at `depth` from the surface vector.
    pub fn impute(&self, depth: f64, surface_uv: [f64; 2]) -> [f64; 2] {
        [
            self.zonal_ratio(depth) * surface_uv[0],
            self.meridional_ratio(depth) * surface_uv[1],
        ]
    }
}

/// `(depth, ratio)` pairs per component.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatioPairs {
    pub zonal: Vec<(f64, f64)>,
    pub meridional: Vec<(f64, f64)>,
    pub zonal_excluded: usize,
    pub meridional_excluded: usize,
}

/// Ratio of every node to the shallowest node of its water column, for
/// every snapshot.
pub fn build_ratio_dataset(history: &[VectorField3D]) -> Result<RatioPairs> {
    if history.is_empty() {
        return Err(Error::param("history", "no snapshots"));
    }
    let mut out = RatioPairs::default();
    for snap in history {
        let spec = snap.spec();
        for i in 0..spec.n_lon {
            for j in 0..spec.n_lat {
                let su = snap.u.value(i, j, 0);
                let sv = snap.v.value(i, j, 0);
                for k in 0..spec.n_dep() {
                    let z = spec.levels[k];
                    push_ratio(&mut out.zonal, &mut out.zonal_excluded, z, snap.u.value(i, j, k), su);
                    push_ratio(
                        &mut out.meridional,
                        &mut out.meridional_excluded,
                        z,
                        snap.v.value(i, j, k),
                        sv,
                    );
                }
            }
        }
    }
    if out.zonal.is_empty() && out.meridional.is_empty() {
        return Err(Error::NoRatioPairs);
    }
    Ok(out)
}

fn push_ratio(pairs: &mut Vec<(f64, f64)>, excluded: &mut usize, z: f64, value: f64, surface: f64) {
    if surface.abs() < SURFACE_FLOOR {
        *excluded += 1;
        return;
    }
    let r = value / surface;
    if (RATIO_BOUNDS.0..=RATIO_BOUNDS.1).contains(&r) {
        pairs.push((z, r));
    } else {
        *excluded += 1;
    }
}

/// Least-squares cubic in depth.
pub fn fit_ratio_cubic(pairs: &[(f64, f64)]) -> Result<ComponentFit> {
    let mut depths: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    depths.sort_by(f64::total_cmp);
    depths.dedup();
    if depths.len() < 4 {
        return Err(Error::RankDeficient(format!(
            "a cubic needs at least 4 distinct depths, got {}",
            depths.len()
        )));
    }
    // Regress on z / z_scale to keep the design well conditioned.
    let scale = pairs.iter().fold(0.0f64, |m, p| m.max(p.0.abs()));
    let n = pairs.len();
    let x = DMatrix::from_fn(n, 4, |i, c| (pairs[i].0 / scale).powi(c as i32));
    let y = DVector::from_iterator(n, pairs.iter().map(|p| p.1));
    let qr = x.qr();
    let r = qr.r();
    let diag_max = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-12 * diag_max) {
        return Err(Error::RankDeficient("design matrix is rank deficient".into()));
    }
    let qty = qr.q().tr_mul(&y);
    let gamma = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient("triangular solve failed".into()))?;
    let mut coefficients = [0.0; 4];
    for (k, c) in coefficients.iter_mut().enumerate() {
        *c = gamma[k] / scale.powi(k as i32);
    }

    let mean = y.mean();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = pairs.iter().map(|&(z, v)| (v - cubic(&coefficients, z)).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(ComponentFit {
        coefficients,
        r2,
        n,
        n_excluded: 0,
    })
}

/// Fit both components from a ratio dataset.
pub fn fit_ratio_model(pairs: &RatioPairs) -> Result<RatioModel> {
    if pairs.zonal.is_empty() || pairs.meridional.is_empty() {
        return Err(Error::NoRatioPairs);
    }
    let mut zonal = fit_ratio_cubic(&pairs.zonal)?;
    zonal.n_excluded = pairs.zonal_excluded;
    let mut meridional = fit_ratio_cubic(&pairs.meridional)?;
    meridional.n_excluded = pairs.meridional_excluded;
    Ok(RatioModel { zonal, meridional })
}

/// Horizontal current as a function of time (s) and position, m/s.
pub trait CurrentSource: Sync {
    fn velocity(&self, t: f64, p: GeoPoint) -> [f64; 2];
}

/// No current anywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroCurrent;

impl CurrentSource for ZeroCurrent {
    fn velocity(&self, _t: f64, _p: GeoPoint) -> [f64; 2] {
        [0.0, 0.0]
    }
}

/// The same vector everywhere and always.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformCurrent {
    pub u: f64,
    pub v: f64,
}

impl CurrentSource for UniformCurrent {
    fn velocity(&self, _t: f64, _p: GeoPoint) -> [f64; 2] {
        [self.u, self.v]
    }
}

/// Index of the daily snapshot in force at time `t`, holding the last.
fn day_index(t: f64, days: usize) -> usize {
    let d = (t / SECONDS_PER_DAY).floor();
    if d <= 0.0 {
        0
    } else {
        (d as usize).min(days - 1)
    }
}

/// Full 3D daily current fields, used as ground truth in simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueCurrent {
    days: Vec<VectorField3D>,
}

impl TrueCurrent {
    pub fn new(days: Vec<VectorField3D>) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::param("days", "at least one snapshot is required"));
        }
        Ok(Self { days })
    }

    pub fn days(&self) -> &[VectorField3D] {
        &self.days
    }
}

impl CurrentSource for TrueCurrent {
    fn velocity(&self, t: f64, p: GeoPoint) -> [f64; 2] {
        let f = &self.days[day_index(t, self.days.len())];
        f.eval(p).unwrap_or([0.0, 0.0])
    }
}

/// Surface `(u, v)` on a regular lon/lat grid, bilinear in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCurrent {
    region: Region,
    n_lon: usize,
    n_lat: usize,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl SurfaceCurrent {
    /// The shallowest level of a 3D field.
    pub fn from_field(f: &VectorField3D) -> Self {
        let s = f.spec();
        let mut u = Vec::with_capacity(s.n_lon * s.n_lat);
        let mut v = Vec::with_capacity(s.n_lon * s.n_lat);
        for i in 0..s.n_lon {
            for j in 0..s.n_lat {
                u.push(f.u.value(i, j, 0));
                v.push(f.v.value(i, j, 0));
            }
        }
        Self {
            region: *f.region(),
            n_lon: s.n_lon,
            n_lat: s.n_lat,
            u,
            v,
        }
    }

    pub fn uniform(region: Region, u: f64, v: f64) -> Self {
        Self {
            region,
            n_lon: 2,
            n_lat: 2,
            u: vec![u; 4],
            v: vec![v; 4],
        }
    }

    /// Bilinear lookup, clamped to the grid edges.
    pub fn eval(&self, lon: f64, lat: f64) -> [f64; 2] {
        let r = &self.region;
        let (i, fx) = uniform_cell(lon, r.lon_min, r.lon_max, self.n_lon);
        let (j, fy) = uniform_cell(lat, r.lat_min, r.lat_max, self.n_lat);
        let idx = |a: usize, b: usize| a * self.n_lat + b;
        let bl = |f: &[f64]| {
            let c0 = f[idx(i, j)] + (f[idx(i + 1, j)] - f[idx(i, j)]) * fx;
            let c1 = f[idx(i, j + 1)] + (f[idx(i + 1, j + 1)] - f[idx(i, j + 1)]) * fx;
            c0 + (c1 - c0) * fy
        };
        [bl(&self.u), bl(&self.v)]
    }
}

/// Imputed current: daily surface snapshots scaled with depth by a
/// [`RatioModel`]. This is all a planner gets to see.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentProvider {
    snapshots: Vec<SurfaceCurrent>,
    model: RatioModel,
}

impl CurrentProvider {
    pub fn new(snapshots: Vec<SurfaceCurrent>, model: RatioModel) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::param("snapshots", "at least one snapshot is required"));
        }
        Ok(Self { snapshots, model })
    }

    /// Surface levels of daily 3D fields.
    pub fn from_history(history: &[VectorField3D], model: RatioModel) -> Result<Self> {
        Self::new(history.iter().map(SurfaceCurrent::from_field).collect(), model)
    }

    pub fn zero(region: Region) -> Self {
        Self::uniform(region, 0.0, 0.0, RatioModel::identity())
    }

    pub fn uniform(region: Region, u: f64, v: f64, model: RatioModel) -> Self {
        Self {
            snapshots: vec![SurfaceCurrent::uniform(region, u, v)],
            model,
        }
    }

    pub fn model(&self) -> &RatioModel {
        &self.model
    }

    pub fn days(&self) -> usize {
        self.snapshots.len()
    }

    /// The snapshot in force at `t`, frozen for all later times.
    pub fn at_time(&self, t: f64) -> FrozenCurrent<'_> {
        FrozenCurrent {
            snapshot: &self.snapshots[day_index(t, self.snapshots.len())],
            model: &self.model,
        }
    }
}

impl CurrentSource for CurrentProvider {
    fn velocity(&self, t: f64, p: GeoPoint) -> [f64; 2] {
        self.at_time(t).velocity(t, p)
    }
}

/// A single imputed snapshot, independent of time.
#[derive(Debug, Clone, Copy)]
pub struct FrozenCurrent<'a> {
    snapshot: &'a SurfaceCurrent,
    model: &'a RatioModel,
}

impl CurrentSource for FrozenCurrent<'_> {
    fn velocity(&self, _t: f64, p: GeoPoint) -> [f64; 2] {
        self.model.impute(p.depth, self.snapshot.eval(p.lon, p.lat))
    }
}
