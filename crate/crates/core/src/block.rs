//! Overlapping block decomposition of the unit cube.
//!
//! Each axis of the normalized domain is cut into `B` intervals that
//! overlap their neighbours by a fraction `c` of the nominal width:
//!
//! ```text
//! E^L_i = max(0, (i − 1 − c/2) / B),    E^U_i = min(1, (i + c/2) / B)
//! ```
//!
//! One local model is fitted per cuboid and the predictions are blended
//! with weights `d²/Σd²`, where `d` is the product over axes of the
//! distance to the nearest interior edge of the cuboid. Faces of the unit
//! cube are not counted as edges, so weights stay well defined on the
//! domain boundary.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{Dataset, GeoPoint, Region};
use crate::tps::{self, TpsModel, MIN_SAMPLES};

/// Per-axis overlapping intervals of the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    counts: [usize; 3],
    overlap: f64,
    intervals: [Vec<(f64, f64)>; 3],
}

pub fn make_partition(b_lon: usize, b_lat: usize, b_dep: usize, c: f64) -> Result<BlockPartition> {
    BlockPartition::new([b_lon, b_lat, b_dep], c)
}

impl BlockPartition {
    pub fn new(counts: [usize; 3], c: f64) -> Result<Self> {
        if counts.contains(&0) {
            return Err(Error::param("blocks", "block counts must be at least 1"));
        }
        if !(0.0..1.0).contains(&c) {
            return Err(Error::param("overlap", format!("must satisfy 0 <= c < 1, got {c}")));
        }
        let axis = |b: usize| -> Vec<(f64, f64)> {
            let bf = b as f64;
            (1..=b)
                .map(|i| {
                    let i = i as f64;
                    (((i - 1.0 - c / 2.0) / bf).max(0.0), ((i + c / 2.0) / bf).min(1.0))
                })
                .collect()
        };
        Ok(Self {
            counts,
            overlap: c,
            intervals: [axis(counts[0]), axis(counts[1]), axis(counts[2])],
        })
    }

    pub fn single() -> Self {
        Self::new([1, 1, 1], 0.0).expect("valid")
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn intervals(&self, axis: usize) -> &[(f64, f64)] {
        &self.intervals[axis]
    }

    pub fn n_blocks(&self) -> usize {
        self.counts.iter().product()
    }

    #[inline]
    pub fn block_id(&self, ijk: [usize; 3]) -> usize {
        (ijk[0] * self.counts[1] + ijk[1]) * self.counts[2] + ijk[2]
    }

    pub fn block_ijk(&self, id: usize) -> [usize; 3] {
        let k = id % self.counts[2];
        let j = (id / self.counts[2]) % self.counts[1];
        let i = id / (self.counts[1] * self.counts[2]);
        [i, j, k]
    }

    /// Intervals of one axis containing `u`, with the distance from `u` to
    /// the nearest interior edge.
    fn axis_cover(&self, axis: usize, u: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.intervals[axis]
            .iter()
            .enumerate()
            .filter(move |(_, &(lo, hi))| lo <= u && u <= hi)
            .map(move |(i, &(lo, hi))| {
                let mut s = f64::INFINITY;
                if lo > 0.0 {
                    s = s.min(u - lo);
                }
                if hi < 1.0 {
                    s = s.min(hi - u);
                }
                (i, if s.is_finite() { s } else { 1.0 })
            })
    }

    /// Covering cuboids of `x` with their unnormalized `d`.
    pub fn covering(&self, x: [f64; 3]) -> Result<Vec<(usize, f64)>> {
        // absorb rounding from min-max scaling
        let x = x.map(|u| {
            if (-1e-9..=1.0 + 1e-9).contains(&u) {
                u.clamp(0.0, 1.0)
            } else {
                u
            }
        });
        if x.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(Error::param(
                "x",
                format!("({}, {}, {}) lies outside the unit cube", x[0], x[1], x[2]),
            ));
        }
        let a: Vec<_> = self.axis_cover(0, x[0]).collect();
        let b: Vec<_> = self.axis_cover(1, x[1]).collect();
        let c: Vec<_> = self.axis_cover(2, x[2]).collect();
        let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
        for &(i, si) in &a {
            for &(j, sj) in &b {
                for &(k, sk) in &c {
                    out.push((self.block_id([i, j, k]), si * sj * sk));
                }
            }
        }
        Ok(out)
    }

    /// Does cuboid `id` contain `x` (closed)?
    pub fn contains(&self, id: usize, x: [f64; 3]) -> bool {
        let ijk = self.block_ijk(id);
        (0..3).all(|a| {
            let (lo, hi) = self.intervals[a][ijk[a]];
            lo <= x[a] && x[a] <= hi
        })
    }
}

/// Normalize `d²` over a set of covering cuboids.
fn blend(cover: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let total: f64 = cover.iter().map(|(_, d)| d * d).sum();
    if total > 0.0 {
        cover.iter().map(|&(id, d)| (id, d * d / total)).collect()
    } else {
        let w = 1.0 / cover.len() as f64;
        cover.iter().map(|&(id, _)| (id, w)).collect()
    }
}

/// Blending weight of every cuboid at `x` (zero for non-covering cuboids).
pub fn block_weights(p: &BlockPartition, x: [f64; 3]) -> Result<Vec<f64>> {
    let cover = p.covering(x)?;
    let mut w = vec![0.0; p.n_blocks()];
    for (id, v) in blend(&cover) {
        w[id] = v;
    }
    Ok(w)
}

/// How each block picks its smoothing parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum LambdaPolicy {
    Gcv { grid: Vec<f64> },
    Fixed { lambda: f64 },
}

impl Default for LambdaPolicy {
    fn default() -> Self {
        LambdaPolicy::Gcv {
            grid: tps::default_lambda_grid(),
        }
    }
}

/// Local interpolator fitted inside each cuboid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BaseMethod {
    Tps {
        #[serde(default)]
        lambda: LambdaPolicy,
    },
    Idw {
        #[serde(default = "default_idw_power")]
        power: f64,
        #[serde(default = "default_idw_neighbors")]
        neighbors: Option<usize>,
    },
}

fn default_idw_power() -> f64 {
    5.0
}

fn default_idw_neighbors() -> Option<usize> {
    Some(64)
}

impl Default for BaseMethod {
    fn default() -> Self {
        BaseMethod::Tps {
            lambda: LambdaPolicy::default(),
        }
    }
}

impl BaseMethod {
    pub fn idw() -> Self {
        BaseMethod::Idw {
            power: default_idw_power(),
            neighbors: default_idw_neighbors(),
        }
    }

    pub fn tps_fixed(lambda: f64) -> Self {
        BaseMethod::Tps {
            lambda: LambdaPolicy::Fixed { lambda },
        }
    }
}

/// Inverse-distance weighting over stored samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdwModel {
    points: Vec<[f64; 3]>,
    values: Vec<f64>,
    power: f64,
    neighbors: Option<usize>,
}

impl IdwModel {
    pub fn new(points: Vec<[f64; 3]>, values: Vec<f64>, power: f64, neighbors: Option<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        if points.len() != values.len() {
            return Err(Error::param("values", "one value per point is required"));
        }
        if !(power > 0.0) {
            return Err(Error::param("power", "must be positive"));
        }
        if neighbors == Some(0) {
            return Err(Error::param("neighbors", "must be at least 1"));
        }
        Ok(Self {
            points,
            values,
            power,
            neighbors,
        })
    }

    pub fn predict(&self, x: [f64; 3]) -> f64 {
        idw_predict(&self.points, &self.values, x, self.power, self.neighbors)
    }
}

/// `Σ yᵢ dᵢ⁻ᵖ / Σ dᵢ⁻ᵖ` over the `k` nearest samples (all when `k` is
/// `None`). A query on a sample returns that sample's value.
pub fn idw_predict(points: &[[f64; 3]], values: &[f64], x: [f64; 3], power: f64, k: Option<usize>) -> f64 {
    let mut d: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (a, b, c) = (p[0] - x[0], p[1] - x[1], p[2] - x[2]);
            ((a * a + b * b + c * c).sqrt(), i)
        })
        .collect();
    if let Some(k) = k {
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d.truncate(k);
        }
    }
    // Canonical order so that the sum does not depend on selection order.
    d.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let dmin = d[0].0;
    if dmin == 0.0 {
        return values[d[0].1];
    }
    // Weights are scaled by dminᵖ, which cancels but avoids overflow.
    let mut num = 0.0;
    let mut den = 0.0;
    for &(di, i) in &d {
        let w = (dmin / di).powf(power);
        num += w * values[i];
        den += w;
    }
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum LocalModel {
    Tps(TpsModel),
    Idw(IdwModel),
}

impl LocalModel {
    fn predict(&self, x: [f64; 3]) -> f64 {
        match self {
            LocalModel::Tps(m) => m.predict(x),
            LocalModel::Idw(m) => m.predict(x),
        }
    }
}

/// Outcome of fitting one cuboid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BlockStatus {
    Fitted,
    /// Fewer samples than [`MIN_SAMPLES`].
    Empty,
    /// The local system could not be solved; the block is skipped.
    Singular {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub block: [usize; 3],
    pub n: usize,
    #[serde(flatten)]
    pub status: BlockStatus,
    pub lambda: Option<f64>,
    pub condition: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub blocks: Vec<BlockReport>,
    pub fitted: usize,
    pub empty: usize,
    pub singular: usize,
    pub seconds: f64,
}

/// One local model per non-empty cuboid, blended by boundary distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockedModel {
    region: Option<Region>,
    partition: BlockPartition,
    method: BaseMethod,
    models: Vec<Option<LocalModel>>,
}

impl BlockedModel {
    /// Fit on normalized coordinates.
    pub fn fit(
        points: &[[f64; 3]],
        values: &[f64],
        partition: &BlockPartition,
        method: &BaseMethod,
    ) -> Result<(Self, FitReport)> {
        if points.len() != values.len() {
            return Err(Error::param("values", "one value per point is required"));
        }
        let start = Instant::now();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); partition.n_blocks()];
        for (i, x) in points.iter().enumerate() {
            for (id, _) in partition.covering(*x)? {
                members[id].push(i);
            }
        }

        let results: Vec<(Option<LocalModel>, BlockReport)> = members
            .par_iter()
            .enumerate()
            .map(|(id, idx)| fit_block(partition.block_ijk(id), idx, points, values, method))
            .collect::<Result<_>>()?;

        let mut models = Vec::with_capacity(results.len());
        let mut blocks = Vec::with_capacity(results.len());
        for (m, r) in results {
            models.push(m);
            blocks.push(r);
        }
        let count = |f: fn(&BlockStatus) -> bool| blocks.iter().filter(|b| f(&b.status)).count();
        let fitted = count(|s| matches!(s, BlockStatus::Fitted));
        if fitted == 0 {
            return Err(Error::AllBlocksEmpty);
        }
        let report = FitReport {
            fitted,
            empty: count(|s| matches!(s, BlockStatus::Empty)),
            singular: count(|s| matches!(s, BlockStatus::Singular { .. })),
            blocks,
            seconds: start.elapsed().as_secs_f64(),
        };
        Ok((
            Self {
                region: None,
                partition: partition.clone(),
                method: method.clone(),
                models,
            },
            report,
        ))
    }

    /// Normalize a geographic dataset over `region` and fit.
    pub fn fit_dataset(
        data: &Dataset,
        region: &Region,
        partition: &BlockPartition,
        method: &BaseMethod,
    ) -> Result<(Self, FitReport)> {
        let points = data.normalized(region)?;
        let (mut model, report) = Self::fit(&points, &data.values(), partition, method)?;
        model.region = Some(*region);
        Ok((model, report))
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn method(&self) -> &BaseMethod {
        &self.method
    }

    pub fn region(&self) -> Option<&Region> {
        self.region.as_ref()
    }

    pub fn is_fitted(&self, id: usize) -> bool {
        self.models[id].is_some()
    }

    /// Fitted TPS of a block, if any.
    pub fn block_tps(&self, id: usize) -> Option<&TpsModel> {
        match &self.models[id] {
            Some(LocalModel::Tps(m)) => Some(m),
            _ => None,
        }
    }

    /// Blending weights at `x`, renormalized over fitted cuboids.
    pub fn weights(&self, x: [f64; 3]) -> Result<Vec<(usize, f64)>> {
        let cover: Vec<(usize, f64)> = self
            .partition
            .covering(x)?
            .into_iter()
            .filter(|(id, _)| self.models[*id].is_some())
            .collect();
        if cover.is_empty() {
            return Err(Error::NoCoveringBlock(x[0], x[1], x[2]));
        }
        Ok(blend(&cover))
    }

    /// Blended prediction at a normalized coordinate.
    pub fn predict(&self, x: [f64; 3]) -> Result<f64> {
        let w = self.weights(x)?;
        Ok(w.iter()
            .map(|&(id, wi)| {
                let m = self.models[id].as_ref().expect("filtered to fitted blocks");
                wi * m.predict(x)
            })
            .sum())
    }

    /// Prediction at a geographic point; requires a model fitted with
    /// [`BlockedModel::fit_dataset`].
    pub fn predict_geo(&self, p: GeoPoint) -> Result<f64> {
        let region = self
            .region
            .as_ref()
            .ok_or_else(|| Error::param("region", "model was fitted on normalized coordinates"))?;
        self.predict(region.normalize(p)?)
    }

    pub fn predict_many(&self, xs: &[[f64; 3]]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.predict(*x)).collect()
    }
}

fn fit_block(
    ijk: [usize; 3],
    idx: &[usize],
    points: &[[f64; 3]],
    values: &[f64],
    method: &BaseMethod,
) -> Result<(Option<LocalModel>, BlockReport)> {
    let start = Instant::now();
    let mut report = BlockReport {
        block: ijk,
        n: idx.len(),
        status: BlockStatus::Empty,
        lambda: None,
        condition: None,
        seconds: 0.0,
    };
    if idx.len() < MIN_SAMPLES {
        return Ok((None, report));
    }
    let pts: Vec<[f64; 3]> = idx.iter().map(|&i| points[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| values[i]).collect();

    let fitted = match method {
        BaseMethod::Tps { lambda } => {
            let lam = match lambda {
                LambdaPolicy::Fixed { lambda } => Ok(*lambda),
                LambdaPolicy::Gcv { grid } => tps::gcv_select(&pts, &ys, grid).map(|r| r.chosen),
            };
            lam.and_then(|l| TpsModel::fit(&pts, &ys, l)).map(|m| {
                report.lambda = Some(m.lambda());
                report.condition = Some(m.condition());
                LocalModel::Tps(m)
            })
        }
        BaseMethod::Idw { power, neighbors } => IdwModel::new(pts, ys, *power, *neighbors).map(LocalModel::Idw),
    };
    let model = match fitted {
        Ok(m) => {
            report.status = BlockStatus::Fitted;
            Some(m)
        }
        Err(e @ (Error::SingularSystem(_) | Error::DegenerateGcv { .. })) => {
            report.status = BlockStatus::Singular { reason: e.to_string() };
            None
        }
        Err(e) => return Err(e),
    };
    report.seconds = start.elapsed().as_secs_f64();
    Ok((model, report))
}
