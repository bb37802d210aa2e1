//! Synthetic mesoscale eddy with closed-form temperature, salinity and swirl.
//!
//! The hydrographic anomaly is a Gaussian bump centered on the eddy and on
//! the thermocline:
//!
//! ```text
//! T(r, z) = T_surf - Γ z + A exp(-r² / 2σ²) exp(-((z - z_t) / z_d)²)
//! ```
//!
//! and the current is an azimuthal swirl whose speed peaks at `r = σ`,
//! scaled with depth by the default zonal velocity-ratio cubic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::current::RatioModel;
use crate::error::{Error, Result};
use crate::geo::{GeoPoint, GridSpec, GriddedField3D, Region, SurfacePoint, VectorField3D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    /// Counter-clockwise seen from above.
    Cyclonic,
    /// Clockwise seen from above.
    Anticyclonic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EddyParams {
    pub center: SurfacePoint,
    /// Horizontal e-folding radius, km.
    pub sigma_km: f64,
    pub t_surface: f64,
    /// Background temperature decrease per meter of depth.
    pub t_lapse: f64,
    pub t_amplitude: f64,
    pub s_surface: f64,
    pub s_lapse: f64,
    pub s_amplitude: f64,
    /// Depth of the anomaly core, m.
    pub thermocline_depth: f64,
    /// Vertical e-folding scale of the anomaly, m.
    pub decay_depth: f64,
    /// Peak swirl speed at the surface before depth scaling, m/s.
    pub max_swirl: f64,
    pub rotation: Rotation,
    /// Standard deviation of iid node noise added to temperature.
    pub t_noise: f64,
    pub s_noise: f64,
    pub seed: u64,
}

impl Default for EddyParams {
    fn default() -> Self {
        Self {
            center: Region::default().center(),
            sigma_km: 40.0,
            t_surface: 18.0,
            t_lapse: 0.012,
            t_amplitude: 3.0,
            s_surface: 34.6,
            s_lapse: -0.0003,
            s_amplitude: 0.25,
            thermocline_depth: 200.0,
            decay_depth: 150.0,
            max_swirl: 0.3,
            rotation: Rotation::Anticyclonic,
            t_noise: 0.0,
            s_noise: 0.0,
            seed: 0,
        }
    }
}

impl EddyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_km > 0.0) {
            return Err(Error::param("sigma_km", "must be positive"));
        }
        if !(self.decay_depth > 0.0) {
            return Err(Error::param("decay_depth", "must be positive"));
        }
        if self.t_noise < 0.0 || self.s_noise < 0.0 {
            return Err(Error::param("t_noise/s_noise", "must be non-negative"));
        }
        Ok(())
    }

    fn horizontal_shape(&self, r_km: f64) -> f64 {
        (-r_km * r_km / (2.0 * self.sigma_km * self.sigma_km)).exp()
    }

    fn vertical_shape(&self, z: f64) -> f64 {
        let s = (z - self.thermocline_depth) / self.decay_depth;
        (-s * s).exp()
    }

    /// Noise-free temperature at horizontal distance `r_km` from the center.
    pub fn temperature(&self, r_km: f64, z: f64) -> f64 {
        self.t_surface - self.t_lapse * z + self.t_amplitude * self.horizontal_shape(r_km) * self.vertical_shape(z)
    }

    pub fn salinity(&self, r_km: f64, z: f64) -> f64 {
        self.s_surface - self.s_lapse * z + self.s_amplitude * self.horizontal_shape(r_km) * self.vertical_shape(z)
    }

    /// Azimuthal speed `V (r/σ) exp(1/2 - r²/2σ²) ρ(z)`, m/s.
    pub fn swirl_speed(&self, r_km: f64, z: f64) -> f64 {
        let q = r_km / self.sigma_km;
        self.max_swirl * q * (0.5 - 0.5 * q * q).exp() * RatioModel::default_profile().zonal_ratio(z)
    }

    /// Horizontal current at a point, given the region used for projection.
    pub fn current(&self, region: &Region, p: GeoPoint) -> [f64; 2] {
        let c = region.project(self.center);
        let xy = region.project(p.surface());
        let (dx, dy) = (xy[0] - c[0], xy[1] - c[1]);
        let r = dx.hypot(dy);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let s = self.swirl_speed(r, p.depth) / r;
        match self.rotation {
            Rotation::Cyclonic => [-dy * s, dx * s],
            Rotation::Anticyclonic => [dy * s, -dx * s],
        }
    }
}

/// Ground-truth fields produced by [`synth_eddy`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticEddy {
    pub temperature: GriddedField3D,
    pub salinity: GriddedField3D,
    pub current: VectorField3D,
}

/// Evaluate the synthetic eddy on every node of `spec` over `region`.
pub fn synth_eddy(params: &EddyParams, spec: &GridSpec, region: &Region) -> Result<SyntheticEddy> {
    params.validate()?;
    spec.validate_for(region)?;
    let center = region.project(params.center);
    let radius = |p: GeoPoint| {
        let xy = region.project(p.surface());
        (xy[0] - center[0]).hypot(xy[1] - center[1])
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let t_noise = Normal::new(0.0, params.t_noise.max(0.0)).expect("finite std");
    let s_noise = Normal::new(0.0, params.s_noise.max(0.0)).expect("finite std");

    // Noise is drawn in node order regardless of the amplitude so that the
    // two fields use independent, reproducible streams.
    let temperature = GriddedField3D::from_fn(*region, spec.clone(), |p| {
        params.temperature(radius(p), p.depth) + t_noise.sample(&mut rng)
    })?;
    let salinity = GriddedField3D::from_fn(*region, spec.clone(), |p| {
        params.salinity(radius(p), p.depth) + s_noise.sample(&mut rng)
    })?;
    let current = eddy_current(params, spec, region)?;
    Ok(SyntheticEddy {
        temperature,
        salinity,
        current,
    })
}

/// The swirl current of the eddy alone.
pub fn eddy_current(params: &EddyParams, spec: &GridSpec, region: &Region) -> Result<VectorField3D> {
    params.validate()?;
    let u = GriddedField3D::from_fn(*region, spec.clone(), |p| params.current(region, p)[0])?;
    let v = GriddedField3D::from_fn(*region, spec.clone(), |p| params.current(region, p)[1])?;
    VectorField3D::new(u, v)
}

/// Daily current snapshots of an eddy whose center drifts by
/// `drift_km_per_day` (east, north) each day.
pub fn drifting_current(
    params: &EddyParams,
    spec: &GridSpec,
    region: &Region,
    days: usize,
    drift_km_per_day: [f64; 2],
) -> Result<Vec<VectorField3D>> {
    let c0 = region.project(params.center);
    (0..days)
        .map(|d| {
            let mut p = params.clone();
            p.center = region.unproject([
                c0[0] + drift_km_per_day[0] * d as f64,
                c0[1] + drift_km_per_day[1] * d as f64,
            ]);
            eddy_current(&p, spec, region)
        })
        .collect()
}
