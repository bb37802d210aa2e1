//! Survey formations and their selection by reconstruction error.
//!
//! A formation is a set of straight surface lines, one per glider. Each
//! candidate is flown in still water, the pooled samples are fitted with a
//! blocked model, and the candidate with the lowest RMSE on a test set
//! wins.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block::{BaseMethod, BlockPartition, BlockedModel};
use crate::error::{Error, Result};
use crate::geo::{Dataset, GriddedField3D, Region, SurfacePoint};
use crate::glider::{sample_line, GliderParams, LinePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormationKind {
    /// Zonal lines at evenly spaced latitudes.
    Parallel,
    /// Meridional lines at evenly spaced longitudes.
    Parallel90,
    /// Chords through the region center at equal angular steps.
    Center,
    /// Zonal and meridional lines, split as evenly as possible.
    Cross,
}

impl FormationKind {
    pub const ALL: [FormationKind; 4] = [Self::Parallel, Self::Parallel90, Self::Center, Self::Cross];

    pub fn name(self) -> &'static str {
        match self {
            Self::Parallel => "parallel",
            Self::Parallel90 => "parallel90",
            Self::Center => "center",
            Self::Cross => "cross",
        }
    }
}

impl fmt::Display for FormationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for FormationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::param("formation", format!("unknown kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Formation {
    pub kind: FormationKind,
    pub k: usize,
    pub paths: Vec<LinePath>,
}

impl Formation {
    /// Sum of the projected line lengths, km.
    pub fn length_km(&self, region: &Region) -> f64 {
        self.paths.iter().map(|p| p.length_km(region)).sum()
    }

    pub fn label(&self) -> String {
        format!("{} K={}", self.kind, self.k)
    }
}

/// Positions `lo + (j − ½)(hi − lo)/n`, `j = 1..=n`.
fn inset(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |j| lo + (j as f64 - 0.5) * (hi - lo) / n as f64)
}

fn zonal(region: &Region, n: usize) -> impl Iterator<Item = LinePath> + '_ {
    inset(region.lat_min, region.lat_max, n).map(|lat| LinePath {
        start: SurfacePoint::new(region.lon_min, lat),
        end: SurfacePoint::new(region.lon_max, lat),
    })
}

fn meridional(region: &Region, n: usize) -> impl Iterator<Item = LinePath> + '_ {
    inset(region.lon_min, region.lon_max, n).map(|lon| LinePath {
        start: SurfacePoint::new(lon, region.lat_min),
        end: SurfacePoint::new(lon, region.lat_max),
    })
}

/// Chord through the center at `theta` degrees from east, clipped to the
/// rectangle in projected km.
fn chord(region: &Region, theta: f64) -> LinePath {
    let (w, h) = (region.width_km(), region.height_km());
    let c = [0.5 * w, 0.5 * h];
    let (s, co) = theta.to_radians().sin_cos();
    let reach = |d: f64, half: f64| if d.abs() < 1e-12 { f64::INFINITY } else { half / d.abs() };
    let t = reach(co, 0.5 * w).min(reach(s, 0.5 * h));
    let clip = |xy: [f64; 2]| [xy[0].clamp(0.0, w), xy[1].clamp(0.0, h)];
    let a = clip([c[0] - t * co, c[1] - t * s]);
    let b = clip([c[0] + t * co, c[1] + t * s]);
    let snap = |p: SurfacePoint| {
        SurfacePoint::new(
            p.lon.clamp(region.lon_min, region.lon_max),
            p.lat.clamp(region.lat_min, region.lat_max),
        )
    };
    LinePath {
        start: snap(region.unproject(a)),
        end: snap(region.unproject(b)),
    }
}

pub fn gen_formation(kind: FormationKind, k: usize, region: &Region) -> Result<Formation> {
    if k < 2 {
        return Err(Error::param(
            "gliders",
            format!("a formation needs at least 2 gliders, got {k}"),
        ));
    }
    region.validate()?;
    let paths: Vec<LinePath> = match kind {
        FormationKind::Parallel => zonal(region, k).collect(),
        FormationKind::Parallel90 => meridional(region, k).collect(),
        FormationKind::Center => (0..k).map(|j| chord(region, j as f64 * 180.0 / k as f64)).collect(),
        FormationKind::Cross => zonal(region, k.div_ceil(2)).chain(meridional(region, k / 2)).collect(),
    };
    Ok(Formation { kind, k, paths })
}

/// Blocked interpolation settings for design evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterpConfig {
    /// Block counts along longitude, latitude and depth.
    pub blocks: [usize; 3],
    pub overlap: f64,
    pub method: BaseMethod,
}

impl Default for InterpConfig {
    fn default() -> Self {
        Self {
            blocks: [3, 3, 40],
            overlap: 0.25,
            method: BaseMethod::default(),
        }
    }
}

impl InterpConfig {
    pub fn partition(&self) -> Result<BlockPartition> {
        BlockPartition::new(self.blocks, self.overlap)
    }
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    let ss: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    (ss / pred.len() as f64).sqrt()
}

/// Pearson correlation; `None` when either side is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa > 0.0 && sbb > 0.0 {
        Some(sab / (saa * sbb).sqrt())
    } else {
        None
    }
}

/// Grid nodes no deeper than the glider dives: the default test set.
pub fn default_test_set(truth: &GriddedField3D, g: &GliderParams) -> Dataset {
    let mut d = truth.to_dataset();
    d.points.retain(|p| p.x.depth <= g.h_max);
    d
}

/// Pooled still-water samples of every line of `f`.
pub fn sample_formation(f: &Formation, g: &GliderParams, truth: &GriddedField3D) -> Result<Dataset> {
    let mut all = Dataset::default();
    for p in &f.paths {
        all.extend(sample_line(p, g, truth)?.0);
    }
    Ok(all)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthError {
    pub depth: f64,
    pub rmse: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignEval {
    pub kind: FormationKind,
    pub k: usize,
    pub length_km: f64,
    pub samples: usize,
    pub rmse: f64,
    pub corr: Option<f64>,
    pub per_depth: Vec<DepthError>,
    pub blocks_fitted: usize,
    pub blocks_singular: usize,
    pub seconds: f64,
}

fn per_depth(test: &Dataset, pred: &[f64]) -> Vec<DepthError> {
    let mut order: Vec<usize> = (0..test.len()).collect();
    order.sort_by(|&a, &b| test.points[a].x.depth.total_cmp(&test.points[b].x.depth));
    let mut out: Vec<DepthError> = Vec::new();
    let mut acc = (f64::NAN, 0.0, 0usize);
    let flush = |acc: (f64, f64, usize), out: &mut Vec<DepthError>| {
        if acc.2 > 0 {
            out.push(DepthError {
                depth: acc.0,
                rmse: (acc.1 / acc.2 as f64).sqrt(),
                n: acc.2,
            });
        }
    };
    for i in order {
        let p = &test.points[i];
        if p.x.depth != acc.0 {
            flush(acc, &mut out);
            acc = (p.x.depth, 0.0, 0);
        }
        acc.1 += (pred[i] - p.y) * (pred[i] - p.y);
        acc.2 += 1;
    }
    flush(acc, &mut out);
    out
}

/// Sample, fit and score one formation. Errors carry the formation label.
pub fn eval_design(
    f: &Formation,
    truth: &GriddedField3D,
    g: &GliderParams,
    interp: &InterpConfig,
    test: &Dataset,
) -> Result<DesignEval> {
    let tag = |e: Error| Error::Formation {
        formation: f.label(),
        source: Box::new(e),
    };
    if test.is_empty() {
        return Err(tag(Error::param("test", "test set is empty")));
    }
    let start = Instant::now();
    let region = truth.region();
    let run = || -> Result<DesignEval> {
        let samples = sample_formation(f, g, truth)?;
        let (model, report) = BlockedModel::fit_dataset(&samples, region, &interp.partition()?, &interp.method)?;
        let pred = model.predict_many(&test.normalized(region)?)?;
        let truth_values = test.values();
        Ok(DesignEval {
            kind: f.kind,
            k: f.k,
            length_km: f.length_km(region),
            samples: samples.len(),
            rmse: rmse(&pred, &truth_values),
            corr: pearson(&pred, &truth_values),
            per_depth: per_depth(test, &pred),
            blocks_fitted: report.fitted,
            blocks_singular: report.singular,
            seconds: start.elapsed().as_secs_f64(),
        })
    };
    run().map_err(tag)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub kind: FormationKind,
    pub k: usize,
    pub length_km: f64,
    /// `None` when the formation could not be reconstructed.
    pub eval: Option<DesignEval>,
    pub error: Option<String>,
}

impl Candidate {
    pub fn rmse(&self) -> Option<f64> {
        self.eval.as_ref().map(|e| e.rmse)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub candidates: Vec<Candidate>,
    /// Index into `candidates` of the lowest RMSE.
    pub chosen: usize,
}

/// Index of the lowest RMSE; failed candidates are skipped and ties go to
/// the earliest candidate.
pub fn select_best(candidates: &[Candidate]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        if let Some(r) = c.rmse() {
            if best.is_none_or(|(_, b)| r < b) {
                best = Some((i, r));
            }
        }
    }
    best.map(|(i, _)| i).ok_or(Error::AllFormationsFailed)
}

/// Evaluate every `(kind, K)` pair, in that order, and pick the best.
pub fn design_sweep(
    kinds: &[FormationKind],
    ks: &[usize],
    truth: &GriddedField3D,
    g: &GliderParams,
    interp: &InterpConfig,
    test: &Dataset,
) -> Result<DesignReport> {
    let region = truth.region();
    let formations: Vec<Formation> = kinds
        .iter()
        .flat_map(|&kind| ks.iter().map(move |&k| (kind, k)))
        .map(|(kind, k)| gen_formation(kind, k, region))
        .collect::<Result<_>>()?;
    let candidates: Vec<Candidate> = formations
        .par_iter()
        .map(|f| {
            let (eval, error) = match eval_design(f, truth, g, interp, test) {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Candidate {
                kind: f.kind,
                k: f.k,
                length_km: f.length_km(region),
                eval,
                error,
            }
        })
        .collect();
    let chosen = select_best(&candidates)?;
    Ok(DesignReport { candidates, chosen })
}
