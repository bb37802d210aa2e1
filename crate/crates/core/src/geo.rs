//! Coordinates, study regions and gridded fields.
//!
//! Longitude and latitude are in degrees, depth in meters positive downward
//! with the sea surface at depth 0. Horizontal distances use a local
//! equirectangular projection anchored at the south-west corner of the
//! region, with the longitude scale taken at the southern boundary latitude.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kilometers per degree of latitude.
pub const KM_PER_DEG_LAT: f64 = 111.19;

/// Relative slack (in units of each axis span) for region membership tests.
const CONTAINS_EPS: f64 = 1e-9;

/// A 3D location: longitude, latitude (degrees), depth (m, positive down).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
    pub depth: f64,
}

impl GeoPoint {
    pub const fn new(lon: f64, lat: f64, depth: f64) -> Self {
        Self { lon, lat, depth }
    }

    pub fn surface(&self) -> SurfacePoint {
        SurfacePoint::new(self.lon, self.lat)
    }
}

/// A location on the sea surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub lon: f64,
    pub lat: f64,
}

impl SurfacePoint {
    pub const fn new(lon: f64, lat: f64) -> Self {
        Self { lon, lat }
    }

    pub fn at_depth(&self, depth: f64) -> GeoPoint {
        GeoPoint::new(self.lon, self.lat, depth)
    }
}

/// Axis-aligned lon/lat/depth box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lon_min: f64,
    pub lon_max: f64,
    pub lat_min: f64,
    pub lat_max: f64,
    pub depth_min: f64,
    pub depth_max: f64,
}

impl Default for Region {
    /// A 2.9° x 1.9° box east of Japan, surface to 830 m.
    fn default() -> Self {
        Self {
            lon_min: 142.3,
            lon_max: 145.2,
            lat_min: 37.25,
            lat_max: 39.15,
            depth_min: 0.0,
            depth_max: 830.0,
        }
    }
}

impl Region {
    pub fn new(lon: (f64, f64), lat: (f64, f64), depth: (f64, f64)) -> Result<Self> {
        let region = Self {
            lon_min: lon.0,
            lon_max: lon.1,
            lat_min: lat.0,
            lat_max: lat.1,
            depth_min: depth.0,
            depth_max: depth.1,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.lon_min,
            self.lon_max,
            self.lat_min,
            self.lat_max,
            self.depth_min,
            self.depth_max,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRegion("non-finite bound".into()));
        }
        if self.lon_min >= self.lon_max {
            return Err(Error::InvalidRegion(format!(
                "lon_min {} >= lon_max {}",
                self.lon_min, self.lon_max
            )));
        }
        if self.lat_min >= self.lat_max {
            return Err(Error::InvalidRegion(format!(
                "lat_min {} >= lat_max {}",
                self.lat_min, self.lat_max
            )));
        }
        if self.depth_min < 0.0 || self.depth_min >= self.depth_max {
            return Err(Error::InvalidRegion(format!(
                "need 0 <= depth_min < depth_max, got {}..{}",
                self.depth_min, self.depth_max
            )));
        }
        Ok(())
    }

    pub fn center(&self) -> SurfacePoint {
        SurfacePoint::new(0.5 * (self.lon_min + self.lon_max), 0.5 * (self.lat_min + self.lat_max))
    }

    fn lon_scale(&self) -> f64 {
        KM_PER_DEG_LAT * self.lat_min.to_radians().cos()
    }

    /// Surface position to local (x east, y north) kilometers.
    pub fn project(&self, p: SurfacePoint) -> [f64; 2] {
        [
            (p.lon - self.lon_min) * self.lon_scale(),
            (p.lat - self.lat_min) * KM_PER_DEG_LAT,
        ]
    }

    /// Inverse of [`Region::project`].
    pub fn unproject(&self, xy: [f64; 2]) -> SurfacePoint {
        SurfacePoint::new(
            self.lon_min + xy[0] / self.lon_scale(),
            self.lat_min + xy[1] / KM_PER_DEG_LAT,
        )
    }

    pub fn width_km(&self) -> f64 {
        (self.lon_max - self.lon_min) * self.lon_scale()
    }

    pub fn height_km(&self) -> f64 {
        (self.lat_max - self.lat_min) * KM_PER_DEG_LAT
    }

    /// Projected distance between two surface points, km.
    pub fn distance_km(&self, a: SurfacePoint, b: SurfacePoint) -> f64 {
        let pa = self.project(a);
        let pb = self.project(b);
        (pa[0] - pb[0]).hypot(pa[1] - pb[1])
    }

    pub fn contains_surface(&self, p: SurfacePoint) -> bool {
        let el = CONTAINS_EPS * (self.lon_max - self.lon_min);
        let ea = CONTAINS_EPS * (self.lat_max - self.lat_min);
        p.lon >= self.lon_min - el
            && p.lon <= self.lon_max + el
            && p.lat >= self.lat_min - ea
            && p.lat <= self.lat_max + ea
    }

    /// Whether projected km coordinates fall inside the surface rectangle.
    pub fn contains_km(&self, xy: [f64; 2]) -> bool {
        let ex = CONTAINS_EPS * self.width_km();
        let ey = CONTAINS_EPS * self.height_km();
        xy[0] >= -ex && xy[0] <= self.width_km() + ex && xy[1] >= -ey && xy[1] <= self.height_km() + ey
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        let ed = CONTAINS_EPS * (self.depth_max - self.depth_min);
        self.contains_surface(p.surface()) && p.depth >= self.depth_min - ed && p.depth <= self.depth_max + ed
    }

    /// Min-max scaling of a point onto the unit cube.
    pub fn normalize(&self, p: GeoPoint) -> Result<[f64; 3]> {
        let spans = [
            self.lon_max - self.lon_min,
            self.lat_max - self.lat_min,
            self.depth_max - self.depth_min,
        ];
        if spans.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidRegion("degenerate axis (max = min)".into()));
        }
        Ok([
            (p.lon - self.lon_min) / spans[0],
            (p.lat - self.lat_min) / spans[1],
            (p.depth - self.depth_min) / spans[2],
        ])
    }

    pub fn denormalize(&self, u: [f64; 3]) -> GeoPoint {
        GeoPoint::new(
            self.lon_min + u[0] * (self.lon_max - self.lon_min),
            self.lat_min + u[1] * (self.lat_max - self.lat_min),
            self.depth_min + u[2] * (self.depth_max - self.depth_min),
        )
    }
}

/// Node counts and depth levels of a regular lon-lat grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_lon: usize,
    pub n_lat: usize,
    /// Level depths in meters, strictly increasing.
    pub levels: Vec<f64>,
}

impl Default for GridSpec {
    /// 30 x 20 nodes (0.1° spacing over the default region), 39 evenly
    /// spaced levels from the surface to 830 m.
    fn default() -> Self {
        Self::uniform(30, 20, 39, 0.0, 830.0)
    }
}

impl GridSpec {
    pub fn uniform(n_lon: usize, n_lat: usize, n_dep: usize, top: f64, bottom: f64) -> Self {
        let levels = if n_dep == 1 {
            vec![top]
        } else {
            (0..n_dep)
                .map(|k| top + (bottom - top) * k as f64 / (n_dep - 1) as f64)
                .collect()
        };
        Self { n_lon, n_lat, levels }
    }

    pub fn n_dep(&self) -> usize {
        self.levels.len()
    }

    pub fn len(&self) -> usize {
        self.n_lon * self.n_lat * self.n_dep()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_lon < 2 || self.n_lat < 2 || self.n_dep() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes per axis, got {}x{}x{}",
                self.n_lon,
                self.n_lat,
                self.n_dep()
            )));
        }
        if self.levels.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("levels must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Validate against a region: the level span must coincide with the
    /// region's depth range.
    pub fn validate_for(&self, region: &Region) -> Result<()> {
        self.validate()?;
        region.validate()?;
        let top = self.levels[0];
        let bottom = *self.levels.last().unwrap();
        let tol = 1e-9 * (region.depth_max - region.depth_min);
        if (top - region.depth_min).abs() > tol || (bottom - region.depth_max).abs() > tol {
            return Err(Error::InvalidGrid(format!(
                "levels span {top}..{bottom} but region depth is {}..{}",
                region.depth_min, region.depth_max
            )));
        }
        Ok(())
    }

    /// Flat index, lon-major then lat then depth.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n_lat + j) * self.n_dep() + k
    }
}

/// Scalar values at the nodes of a regular grid over a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GriddedField3D {
    region: Region,
    spec: GridSpec,
    values: Vec<f64>,
}

impl GriddedField3D {
    pub fn new(region: Region, spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate_for(&region)?;
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "grid has {} nodes but {} values were given",
                spec.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at node {i}")));
        }
        Ok(Self { region, spec, values })
    }

    /// Build a field by evaluating `f` at every node.
    pub fn from_fn(region: Region, spec: GridSpec, mut f: impl FnMut(GeoPoint) -> f64) -> Result<Self> {
        spec.validate_for(&region)?;
        let mut values = Vec::with_capacity(spec.len());
        for i in 0..spec.n_lon {
            for j in 0..spec.n_lat {
                for k in 0..spec.n_dep() {
                    values.push(f(node_coord(&region, &spec, i, j, k)));
                }
            }
        }
        Self::new(region, spec, values)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.spec.index(i, j, k)]
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> GeoPoint {
        node_coord(&self.region, &self.spec, i, j, k)
    }

    /// All nodes with their values, in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (GeoPoint, f64)> + '_ {
        let s = &self.spec;
        (0..s.n_lon).flat_map(move |i| {
            (0..s.n_lat).flat_map(move |j| (0..s.n_dep()).map(move |k| (self.node(i, j, k), self.value(i, j, k))))
        })
    }

    pub fn to_dataset(&self) -> Dataset {
        Dataset::new(self.nodes().map(|(x, y)| SamplePoint { x, y }).collect())
    }

    /// (min, max) over all nodes.
    pub fn value_range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Trilinear interpolation; exact at nodes.
    pub fn eval(&self, p: GeoPoint) -> Result<f64> {
        if !self.region.contains(p) {
            return Err(Error::OutsideRegion {
                lon: p.lon,
                lat: p.lat,
                depth: p.depth,
            });
        }
        Ok(self.eval_unchecked(p))
    }

    /// Trilinear interpolation with coordinates clamped into the grid.
    pub(crate) fn eval_unchecked(&self, p: GeoPoint) -> f64 {
        let r = &self.region;
        let s = &self.spec;
        let (i, fx) = uniform_cell(p.lon, r.lon_min, r.lon_max, s.n_lon);
        let (j, fy) = uniform_cell(p.lat, r.lat_min, r.lat_max, s.n_lat);
        let (k, fz) = level_cell(p.depth, &s.levels);
        let c = |di: usize, dj: usize, dk: usize| self.value(i + di, j + dj, k + dk);
        let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
        let c00 = lerp(c(0, 0, 0), c(1, 0, 0), fx);
        let c10 = lerp(c(0, 1, 0), c(1, 1, 0), fx);
        let c01 = lerp(c(0, 0, 1), c(1, 0, 1), fx);
        let c11 = lerp(c(0, 1, 1), c(1, 1, 1), fx);
        lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz)
    }
}

fn node_coord(region: &Region, spec: &GridSpec, i: usize, j: usize, k: usize) -> GeoPoint {
    let lon = region.lon_min + (region.lon_max - region.lon_min) * i as f64 / (spec.n_lon - 1) as f64;
    let lat = region.lat_min + (region.lat_max - region.lat_min) * j as f64 / (spec.n_lat - 1) as f64;
    GeoPoint::new(lon, lat, spec.levels[k])
}

/// Cell index and fractional offset on an evenly spaced axis of `n` nodes.
#[inline]
pub(crate) fn uniform_cell(v: f64, lo: f64, hi: f64, n: usize) -> (usize, f64) {
    let t = ((v - lo) / (hi - lo) * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
    let i = (t.floor() as usize).min(n - 2);
    (i, t - i as f64)
}

#[inline]
fn level_cell(z: f64, levels: &[f64]) -> (usize, f64) {
    let n = levels.len();
    let z = z.clamp(levels[0], levels[n - 1]);
    // first level strictly greater than z
    let upper = levels.partition_point(|&l| l <= z).clamp(1, n - 1);
    let k = upper - 1;
    (k, (z - levels[k]) / (levels[k + 1] - levels[k]))
}

/// Horizontal current (u east, v north) on a grid, m/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField3D {
    pub u: GriddedField3D,
    pub v: GriddedField3D,
}

impl VectorField3D {
    pub fn new(u: GriddedField3D, v: GriddedField3D) -> Result<Self> {
        if u.region() != v.region() || u.spec() != v.spec() {
            return Err(Error::InvalidGrid("u and v components live on different grids".into()));
        }
        Ok(Self { u, v })
    }

    pub fn region(&self) -> &Region {
        self.u.region()
    }

    pub fn spec(&self) -> &GridSpec {
        self.u.spec()
    }

    pub fn eval(&self, p: GeoPoint) -> Result<[f64; 2]> {
        Ok([self.u.eval(p)?, self.v.eval(p)?])
    }
}

/// One observation: a location and the measured scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub x: GeoPoint,
    pub y: f64,
}

/// Ordered collection of observations.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub points: Vec<SamplePoint>,
}

impl Dataset {
    pub fn new(points: Vec<SamplePoint>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extend(&mut self, other: Dataset) {
        self.points.extend(other.points);
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset::new(indices.iter().map(|&i| self.points[i]).collect())
    }

    /// Coordinates mapped onto the unit cube of `region`.
    pub fn normalized(&self, region: &Region) -> Result<Vec<[f64; 3]>> {
        self.points.iter().map(|p| region.normalize(p.x)).collect()
    }
}

/// Split `n` items into `k` disjoint folds of near-equal size.
///
/// Fold sizes differ by at most one. The partition depends only on `n`,
/// `k` and `seed`.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::param("k", format!("need k >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::param("k", format!("k = {k} exceeds the {n} available samples")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, idx) in order.into_iter().enumerate() {
        folds[pos % k].push(idx);
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_origin_and_extent() {
        let r = Region::default();
        let o = r.project(SurfacePoint::new(142.3, 37.25));
        assert_eq!(o, [0.0, 0.0]);
        let n = r.project(SurfacePoint::new(142.3, 39.15));
        assert!(n[0].abs() < 1e-12);
        assert!((n[1] - 1.9 * 111.19).abs() < 1e-9);
        assert!((n[1] - 211.26).abs() < 0.01);
        let e = r.project(SurfacePoint::new(145.2, 37.25));
        let expected = 2.9 * 111.19 * 37.25f64.to_radians().cos();
        assert!((e[0] - expected).abs() < 1e-9);
        assert!((e[0] - 256.7).abs() < 0.05);
        assert!(e[1].abs() < 1e-12);
    }

    #[test]
    fn normalize_corners_and_midpoint() {
        let r = Region::default();
        let lo = r.normalize(GeoPoint::new(r.lon_min, r.lat_min, r.depth_min)).unwrap();
        assert_eq!(lo, [0.0, 0.0, 0.0]);
        let hi = r.normalize(GeoPoint::new(r.lon_max, r.lat_max, r.depth_max)).unwrap();
        assert_eq!(hi, [1.0, 1.0, 1.0]);
        let c = r.center();
        let mid = r.normalize(c.at_depth(415.0)).unwrap();
        for m in mid {
            assert!((m - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_degenerate_axis() {
        let mut r = Region::default();
        r.depth_max = r.depth_min;
        assert!(r.normalize(GeoPoint::new(143.0, 38.0, 0.0)).is_err());
        assert!(r.validate().is_err());
    }

    #[test]
    fn region_validation() {
        assert!(Region::new((1.0, 0.0), (0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(Region::new((0.0, 1.0), (0.0, 1.0), (-1.0, 1.0)).is_err());
        assert!(Region::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)).is_ok());
    }

    fn small_field(f: impl FnMut(GeoPoint) -> f64) -> GriddedField3D {
        let region = Region::new((0.0, 2.0), (0.0, 1.0), (0.0, 100.0)).unwrap();
        let spec = GridSpec {
            n_lon: 3,
            n_lat: 2,
            levels: vec![0.0, 10.0, 40.0, 100.0],
        };
        GriddedField3D::from_fn(region, spec, f).unwrap()
    }

    #[test]
    fn field_eval_exact_at_nodes() {
        let f = small_field(|p| (p.lon * 7.3).sin() + p.lat * p.lat - 0.01 * p.depth);
        for (p, v) in f.nodes() {
            assert!((f.eval(p).unwrap() - v).abs() < 1e-12);
        }
    }

    #[test]
    fn field_eval_edge_midpoint_is_linear() {
        let region = Region::new((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)).unwrap();
        let spec = GridSpec::uniform(2, 2, 2, 0.0, 1.0);
        let f = GriddedField3D::from_fn(region, spec, |p| if p.lon > 0.5 { 4.0 } else { 2.0 }).unwrap();
        let v = f.eval(GeoPoint::new(0.5, 0.0, 0.0)).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn field_eval_constant_and_outside() {
        let f = small_field(|_| 4.25);
        assert_eq!(f.eval(GeoPoint::new(1.3, 0.7, 55.0)).unwrap(), 4.25);
        assert!(matches!(
            f.eval(GeoPoint::new(2.5, 0.5, 10.0)),
            Err(Error::OutsideRegion { .. })
        ));
        assert!(f.eval(GeoPoint::new(1.0, 0.5, 101.0)).is_err());
    }

    #[test]
    fn field_rejects_wrong_count() {
        let region = Region::default();
        let spec = GridSpec::default();
        assert_eq!(spec.len(), 23400);
        assert!(GriddedField3D::new(region, spec, vec![0.0; 10]).is_err());
    }

    #[test]
    fn kfold_sizes_and_determinism() {
        let folds = kfold_split(10, 5, 3).unwrap();
        assert!(folds.iter().all(|f| f.len() == 2));
        assert_eq!(folds, kfold_split(10, 5, 3).unwrap());
        let big = kfold_split(23400, 5, 11).unwrap();
        assert!(big.iter().all(|f| f.len() == 4680));
        assert!(kfold_split(3, 5, 0).is_err());
        assert!(kfold_split(10, 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn project_unproject_identity(lon in 142.3f64..145.2, lat in 37.25f64..39.15) {
            let r = Region::default();
            let p = SurfacePoint::new(lon, lat);
            let back = r.project(r.unproject(r.project(p)));
            let xy = r.project(p);
            prop_assert!((back[0] - xy[0]).abs() < 1e-9 && (back[1] - xy[1]).abs() < 1e-9);
        }

        #[test]
        fn normalize_denormalize_identity(u in 0.0f64..=1.0, v in 0.0f64..=1.0, w in 0.0f64..=1.0) {
            let r = Region::default();
            let back = r.normalize(r.denormalize([u, v, w])).unwrap();
            prop_assert!((back[0] - u).abs() < 1e-12);
            prop_assert!((back[1] - v).abs() < 1e-12);
            prop_assert!((back[2] - w).abs() < 1e-12);
        }

        #[test]
        fn kfold_partitions(n in 2usize..300, k in 2usize..10, seed in any::<u64>()) {
            prop_assume!(k <= n);
            let folds = kfold_split(n, k, seed).unwrap();
            let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
