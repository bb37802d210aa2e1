//! File formats: CSV for bulk numbers, JSON for metadata and configs.
//!
//! A gridded field is stored as `name.csv` with one row per node plus a
//! sidecar `name.json` holding the region and grid. Floats are written in
//! shortest round-trip form, so a store/load cycle is bit exact.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::control::Surfacing;
use crate::error::{Error, Result};
use crate::geo::{Dataset, GeoPoint, GridSpec, GriddedField3D, Region, SamplePoint, VectorField3D};
use crate::glider::TrackPoint;
use crate::optim::TraceEntry;

/// Region and grid of a stored field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMeta {
    pub region: Region,
    pub grid: GridSpec,
    /// Names of the value columns, e.g. `["value"]` or `["u", "v"]`.
    pub columns: Vec<String>,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => fs::create_dir_all(p).map_err(|e| Error::io(p, e)),
        _ => Ok(()),
    }
}

/// Write through a temporary file and rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    create_parent(path)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.into(),
        source: e,
    })?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Parse JSON, reporting the offending field path on schema errors.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() || inner.is_io() {
            Error::Json {
                path: path.into(),
                source: inner,
            }
        } else {
            Error::Schema {
                path: path.into(),
                field,
                message: inner.to_string(),
            }
        }
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_json(path, &text)
}

/// Numeric columns of a headed CSV, selected by name, row-major.
pub fn read_columns(path: &Path, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| Error::MissingColumn {
                    path: path.into(),
                    column: (*c).into(),
                })
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let row = r + 1;
        let rec = rec.map_err(|e| Error::Parse {
            path: path.into(),
            row,
            message: e.to_string(),
        })?;
        let vals = idx
            .iter()
            .zip(columns)
            .map(|(&i, name)| {
                let cell = rec.get(i).ok_or_else(|| Error::Parse {
                    path: path.into(),
                    row,
                    message: format!("missing value for `{name}`"),
                })?;
                cell.parse::<f64>().map_err(|e| Error::Parse {
                    path: path.into(),
                    row,
                    message: format!("`{name}` = {cell:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(vals);
    }
    Ok(rows)
}

/// Write a headed CSV of numeric rows.
pub fn write_columns(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    write_atomic(path, &bytes)
}

fn node_rows<'a>(fields: &'a [&'a GriddedField3D]) -> impl Iterator<Item = Vec<f64>> + 'a {
    fields[0].nodes().enumerate().map(move |(n, (x, v))| {
        let mut row = vec![x.lon, x.lat, x.depth, v];
        row.extend(fields[1..].iter().map(|f| f.values()[n]));
        row
    })
}

fn store_nodes(path: &Path, fields: &[&GriddedField3D], names: &[&str]) -> Result<()> {
    let f = fields[0];
    let mut header = vec!["lon", "lat", "depth"];
    header.extend_from_slice(names);
    write_columns(path, &header, node_rows(fields))?;
    write_json(
        &sidecar_path(path),
        &FieldMeta {
            region: *f.region(),
            grid: f.spec().clone(),
            columns: names.iter().map(|s| s.to_string()).collect(),
        },
    )
}

fn load_nodes(path: &Path, names: &[&str]) -> Result<(FieldMeta, Vec<Vec<f64>>)> {
    let meta: FieldMeta = read_json(&sidecar_path(path))?;
    meta.grid.validate_for(&meta.region)?;
    let mut cols = vec!["lon", "lat", "depth"];
    cols.extend_from_slice(names);
    let rows = read_columns(path, &cols)?;
    if rows.len() != meta.grid.len() {
        return Err(Error::Parse {
            path: path.into(),
            row: rows.len(),
            message: format!(
                "grid has {} nodes but the file has {} rows",
                meta.grid.len(),
                rows.len()
            ),
        });
    }
    // rows must follow the node order of the sidecar grid
    let probe = GriddedField3D::new(meta.region, meta.grid.clone(), vec![0.0; meta.grid.len()])?;
    for (r, (row, (x, _))) in rows.iter().zip(probe.nodes()).enumerate() {
        let tol = 1e-9 * (1.0 + x.lon.abs().max(x.lat.abs()).max(x.depth.abs()));
        if (row[0] - x.lon).abs() > tol || (row[1] - x.lat).abs() > tol || (row[2] - x.depth).abs() > tol {
            return Err(Error::Parse {
                path: path.into(),
                row: r + 1,
                message: format!(
                    "coordinates ({}, {}, {}) do not match grid node ({}, {}, {})",
                    row[0], row[1], row[2], x.lon, x.lat, x.depth
                ),
            });
        }
    }
    Ok((meta, rows))
}

/// `path` is the CSV; the sidecar goes next to it.
pub fn store_field(path: &Path, f: &GriddedField3D) -> Result<()> {
    store_nodes(path, &[f], &["value"])
}

pub fn load_field(path: &Path) -> Result<GriddedField3D> {
    let (meta, rows) = load_nodes(path, &["value"])?;
    GriddedField3D::new(meta.region, meta.grid, rows.iter().map(|r| r[3]).collect())
}

pub fn store_vector_field(path: &Path, f: &VectorField3D) -> Result<()> {
    store_nodes(path, &[&f.u, &f.v], &["u", "v"])
}

pub fn load_vector_field(path: &Path) -> Result<VectorField3D> {
    let (meta, rows) = load_nodes(path, &["u", "v"])?;
    let u = GriddedField3D::new(meta.region, meta.grid.clone(), rows.iter().map(|r| r[3]).collect())?;
    let v = GriddedField3D::new(meta.region, meta.grid, rows.iter().map(|r| r[4]).collect())?;
    VectorField3D::new(u, v)
}

/// Vector-field CSVs of a directory in file-name order (one per day).
pub fn load_vector_history(dir: &Path) -> Result<Vec<VectorField3D>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && sidecar_path(p).exists())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::param(
            "history",
            format!("no field CSVs with sidecars in {}", dir.display()),
        ));
    }
    files.iter().map(|p| load_vector_field(p)).collect()
}

pub fn store_dataset(path: &Path, d: &Dataset) -> Result<()> {
    write_columns(
        path,
        &["lon", "lat", "depth", "value"],
        d.points.iter().map(|p| vec![p.x.lon, p.x.lat, p.x.depth, p.y]),
    )
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let rows = read_columns(path, &["lon", "lat", "depth", "value"])?;
    Ok(Dataset::new(
        rows.into_iter()
            .map(|r| SamplePoint {
                x: GeoPoint::new(r[0], r[1], r[2]),
                y: r[3],
            })
            .collect(),
    ))
}

pub fn store_track(path: &Path, track: &[TrackPoint]) -> Result<()> {
    write_columns(
        path,
        &["t", "lon", "lat", "depth"],
        track.iter().map(|p| vec![p.t, p.lon, p.lat, p.depth]),
    )
}

pub fn load_track(path: &Path) -> Result<Vec<TrackPoint>> {
    Ok(read_columns(path, &["t", "lon", "lat", "depth"])?
        .into_iter()
        .map(|r| TrackPoint {
            t: r[0],
            lon: r[1],
            lat: r[2],
            depth: r[3],
        })
        .collect())
}

pub fn store_trace(path: &Path, trace: &[TraceEntry]) -> Result<()> {
    write_columns(
        path,
        &["generation", "evaluations", "best"],
        trace
            .iter()
            .map(|e| vec![e.generation as f64, e.evaluations as f64, e.best]),
    )
}

pub fn store_surfacings(path: &Path, s: &[Surfacing], wall_times: &[f64]) -> Result<()> {
    let opt = |v: Option<f64>| v.unwrap_or(f64::NAN);
    write_columns(
        path,
        &[
            "k",
            "t",
            "lon",
            "lat",
            "x_km",
            "y_km",
            "heading",
            "alpha",
            "horizon",
            "w1",
            "w2",
            "objective",
            "evaluations",
            "deviation_km",
            "distance_to_target_km",
            "r",
            "c",
            "delta_r",
            "wall_time_s",
        ],
        s.iter().enumerate().map(|(i, s)| {
            vec![
                s.k as f64,
                s.t,
                s.lon,
                s.lat,
                s.x_km,
                s.y_km,
                s.heading,
                s.alpha,
                s.horizon as f64,
                s.w1,
                s.w2,
                s.objective,
                s.evaluations as f64,
                s.deviation_km,
                s.distance_to_target_km,
                s.r,
                opt(s.c),
                opt(s.delta_r),
                wall_times.get(i).copied().unwrap_or(f64::NAN),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema_errors_name_the_field() {
        #[derive(Debug, Deserialize)]
        #[allow(dead_code)]
        struct Cfg {
            inner: Inner,
        }
        #[derive(Debug, Deserialize)]
        #[allow(dead_code)]
        struct Inner {
            n: usize,
        }
        let p = Path::new("cfg.json");
        match parse_json::<Cfg>(p, r#"{"inner": {"n": "x"}}"#) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "inner.n"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_json::<Cfg>(p, "{"), Err(Error::Json { .. })));
    }
}
