//! Command-line front end.
//!
//! Every subcommand writes its outputs plus a `manifest.json` into one
//! output directory. Failures print a JSON error object on stderr; config
//! schema problems exit with 2, runtime errors with 1.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::block::{make_partition, BaseMethod, BlockedModel, LambdaPolicy};
use crate::control::{mission_svg, run_mission, table_missions, ControlConfig};
use crate::current::{
    build_ratio_dataset, fit_ratio_model, CurrentProvider, CurrentSource, RatioModel, TrueCurrent, UniformCurrent,
};
use crate::design::{
    default_test_set, design_sweep, gen_formation, rmse, sample_formation, FormationKind, InterpConfig,
};
use crate::eddy::{drifting_current, eddy_current, synth_eddy, EddyParams};
use crate::error::{Error, Result};
use crate::geo::{GridSpec, GriddedField3D, Region};
use crate::glider::{GliderParams, LinePath};
use crate::io;
use crate::optim::{OptimizerKind, OptimizerSpec};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "EDDY_GLIDER_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "eddy-glider",
    version,
    about = "Eddy reconstruction, glider formation design and adaptive path control"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory (default: $EDDY_GLIDER_OUT/COMMAND, or out/COMMAND).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON config for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic eddy: temperature, salinity and daily currents.
    SynthEddy,
    /// Fit a blocked model to samples and predict on a grid.
    Reconstruct(ReconstructArgs),
    /// Sweep survey formations and pick the lowest reconstruction error.
    Design(DesignArgs),
    /// Fit velocity-ratio cubics from a history of current fields.
    ImputeCurrent(ImputeArgs),
    /// Fly one mission with adaptive heading control.
    Control(ControlArgs),
    /// Fit time and error against the number of depth blocks.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Sample CSV (`lon,lat,depth,value`).
    #[arg(long)]
    pub samples: PathBuf,
    /// Region JSON; defaults to the region of --eval-grid.
    #[arg(long)]
    pub region: Option<PathBuf>,
    /// Blocks as LONxLATxDEP.
    #[arg(long)]
    pub blocks: Option<Blocks>,
    #[arg(long)]
    pub overlap: Option<f64>,
    #[arg(long, default_value = "tps")]
    pub method: MethodName,
    /// Fixed smoothing parameter; GCV per block when absent.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// JSON with `region` and `grid` to predict on.
    #[arg(long)]
    pub eval_grid: Option<PathBuf>,
    /// Field CSV to score the prediction against.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Predicted field CSV (default: OUT_DIR/field.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Truth field CSV; the synthetic eddy temperature when absent.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value = "parallel,parallel90,center,cross")]
    pub kinds: String,
    /// Glider counts: `4..10`, `4,6,8` or `5`.
    #[arg(long, default_value = "4..10")]
    pub gliders: String,
    #[arg(long)]
    pub blocks: Option<Blocks>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Report JSON (default: OUT_DIR/report.json).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImputeArgs {
    /// Directory of daily vector-field CSVs with sidecars.
    #[arg(long)]
    pub history: PathBuf,
    /// Model JSON (default: OUT_DIR/model.json).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ControlArgs {
    /// Mission number 1-5 or a JSON file `{"start": {...}, "end": {...}}`.
    #[arg(long)]
    pub mission: String,
    #[arg(long, default_value = "depso")]
    pub optimizer: OptimizerKind,
    /// `zero`, `uniform:U,V`, `eddy`, or a directory of daily vector fields.
    #[arg(long, default_value = "eddy")]
    pub current: String,
    /// Ratio model JSON used for imputation (default: reference profile).
    #[arg(long)]
    pub ratio_model: Option<PathBuf>,
    /// Evaluations per surfacing (default: 400 per dimension).
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    /// Evaluate candidates in parallel.
    #[arg(long)]
    pub parallel: bool,
    /// Output directory alias kept for symmetry with other commands.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Depth block counts to compare.
    #[arg(long, default_value = "10,20,40,80")]
    pub blocks: String,
    /// Gliders of the parallel formation that produces the samples.
    #[arg(long, default_value_t = 5)]
    pub gliders: usize,
    /// Truth field CSV; the synthetic eddy temperature when absent.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Fixed smoothing parameter; GCV per block when absent.
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blocks(pub [usize; 3]);

impl FromStr for Blocks {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(['x', 'X']).collect();
        if parts.len() != 3 {
            return Err(format!("expected LONxLATxDEP, got `{s}`"));
        }
        let mut b = [0; 3];
        for (i, p) in parts.iter().enumerate() {
            b[i] = p.trim().parse().map_err(|e| format!("`{p}`: {e}"))?;
        }
        Ok(Blocks(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodName {
    Tps,
    Idw,
}

/// Parse `4..10`, `4..=10`, `4,6,8` or `5`.
pub fn parse_counts(s: &str) -> Result<Vec<usize>> {
    let bad = |m: String| Error::param("gliders", m);
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.trim_start_matches('=');
        let (a, b): (usize, usize) = (
            a.trim().parse().map_err(|e| bad(format!("`{a}`: {e}")))?,
            b.trim().parse().map_err(|e| bad(format!("`{b}`: {e}")))?,
        );
        if a > b {
            return Err(bad(format!("empty range {s}")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse().map_err(|e| bad(format!("`{p}`: {e}"))))
        .collect()
}

/// What a run did, enough to replay it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub timings: BTreeMap<String, f64>,
    pub outputs: Vec<PathBuf>,
}

struct Run {
    out_dir: PathBuf,
    manifest: RunManifest,
    clock: Instant,
}

impl Run {
    fn output(&mut self, name: &str) -> PathBuf {
        let p = self.out_dir.join(name);
        self.manifest.outputs.push(p.clone());
        p
    }

    fn record(&mut self, p: &Path) {
        self.manifest.outputs.push(p.to_path_buf());
    }

    fn time(&mut self, label: &str, since: Instant) {
        self.manifest
            .timings
            .insert(label.into(), since.elapsed().as_secs_f64());
    }

    fn finish(mut self) -> Result<()> {
        self.manifest
            .timings
            .insert("total".into(), self.clock.elapsed().as_secs_f64());
        let path = self.out_dir.join("manifest.json");
        io::write_json(&path, &self.manifest)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T> {
    path.map_or_else(|| Ok(T::default()), io::read_json)
}

/// Inputs of `synth-eddy`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub region: Region,
    pub grid: GridSpec,
    pub eddy: EddyParams,
    /// Number of daily current snapshots.
    pub days: usize,
    /// Eddy drift per day (east, north), km.
    pub drift_km_per_day: [f64; 2],
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            region: Region::default(),
            grid: GridSpec::default(),
            eddy: EddyParams::default(),
            days: 1,
            drift_km_per_day: [0.0, 0.0],
        }
    }
}

/// Inputs of `design`, `reconstruct` and `bench` beyond their flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct DesignConfig {
    pub interp: InterpConfig,
    pub glider: GliderParams,
}

/// Run the CLI on `args` and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("{}", json!({"error": {"kind": "threads", "message": e.to_string()}}));
            return 1;
        }
    }
    let printable: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(&cli, printable) {
        Ok(()) => 0,
        Err(e) => {
            let mut payload = json!({"kind": e.kind(), "message": e.to_string()});
            if let Error::Schema { field, .. } = &e {
                payload["field"] = json!(field);
            }
            eprintln!("{}", json!({ "error": payload }));
            match e {
                Error::Schema { .. } | Error::Json { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::SynthEddy => "synth-eddy",
        Command::Reconstruct(_) => "reconstruct",
        Command::Design(_) => "design",
        Command::ImputeCurrent(_) => "impute-current",
        Command::Control(_) => "control",
        Command::Bench(_) => "bench",
    }
}

fn out_dir(cli: &Cli, name: &str) -> PathBuf {
    cli.out_dir.clone().unwrap_or_else(|| {
        std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"))
            .join(name)
    })
}

fn dispatch(cli: &Cli, args: Vec<String>) -> Result<()> {
    let name = command_name(&cli.command);
    let mut run = Run {
        out_dir: out_dir(cli, name),
        manifest: RunManifest {
            command: name.into(),
            args,
            config: Value::Null,
            seed: cli.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            timings: BTreeMap::new(),
            outputs: Vec::new(),
        },
        clock: Instant::now(),
    };
    std::fs::create_dir_all(&run.out_dir).map_err(|e| Error::io(&run.out_dir, e))?;
    let config = cli.config.as_deref();
    match &cli.command {
        Command::SynthEddy => cmd_synth_eddy(&mut run, config, cli.seed)?,
        Command::Reconstruct(a) => cmd_reconstruct(&mut run, config, a)?,
        Command::Design(a) => cmd_design(&mut run, config, a)?,
        Command::ImputeCurrent(a) => cmd_impute_current(&mut run, a)?,
        Command::Control(a) => cmd_control(&mut run, config, cli.seed.unwrap_or(0), a)?,
        Command::Bench(a) => cmd_bench(&mut run, config, a)?,
    }
    run.finish()
}

fn cmd_synth_eddy(run: &mut Run, config: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let mut cfg: SynthConfig = load_config(config)?;
    if let Some(s) = seed {
        cfg.eddy.seed = s;
    }
    if cfg.days == 0 {
        return Err(Error::param("days", "must be at least 1"));
    }
    run.manifest.config = to_value(&cfg);
    let t = Instant::now();
    let eddy = synth_eddy(&cfg.eddy, &cfg.grid, &cfg.region)?;
    let days = if cfg.days == 1 && cfg.drift_km_per_day == [0.0, 0.0] {
        vec![eddy.current.clone()]
    } else {
        drifting_current(&cfg.eddy, &cfg.grid, &cfg.region, cfg.days, cfg.drift_km_per_day)?
    };
    run.time("generate", t);
    let t = Instant::now();
    let p = run.output("temperature.csv");
    io::store_field(&p, &eddy.temperature)?;
    run.record(&io::sidecar_path(&p));
    let p = run.output("salinity.csv");
    io::store_field(&p, &eddy.salinity)?;
    run.record(&io::sidecar_path(&p));
    for (d, f) in days.iter().enumerate() {
        let p = run.output(&format!("current/day_{d:03}.csv"));
        io::store_vector_field(&p, f)?;
        run.record(&io::sidecar_path(&p));
    }
    run.time("write", t);
    Ok(())
}

fn method_from(name: MethodName, lambda: Option<f64>, fallback: &BaseMethod) -> BaseMethod {
    match (name, lambda) {
        (MethodName::Idw, _) => match fallback {
            m @ BaseMethod::Idw { .. } => m.clone(),
            _ => BaseMethod::idw(),
        },
        (MethodName::Tps, Some(l)) => BaseMethod::tps_fixed(l),
        (MethodName::Tps, None) => match fallback {
            m @ BaseMethod::Tps { .. } => m.clone(),
            _ => BaseMethod::Tps {
                lambda: LambdaPolicy::default(),
            },
        },
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalGrid {
    #[serde(default)]
    region: Option<Region>,
    grid: GridSpec,
}

fn cmd_reconstruct(run: &mut Run, config: Option<&Path>, a: &ReconstructArgs) -> Result<()> {
    let base: DesignConfig = load_config(config)?;
    let mut interp = base.interp.clone();
    if let Some(b) = a.blocks {
        interp.blocks = b.0;
    }
    if let Some(c) = a.overlap {
        interp.overlap = c;
    }
    interp.method = method_from(a.method, a.lambda, &interp.method);

    let region_file: Option<Region> = a.region.as_deref().map(io::read_json).transpose()?;
    let eval: Option<EvalGrid> = a.eval_grid.as_deref().map(io::read_json).transpose()?;
    let truth = a.truth.as_deref().map(io::load_field).transpose()?;
    let region = region_file
        .or_else(|| eval.as_ref().and_then(|e| e.region))
        .or_else(|| truth.as_ref().map(|t| *t.region()))
        .ok_or_else(|| Error::param("region", "give --region, an --eval-grid with a region, or --truth"))?;
    let grid = eval
        .map(|e| e.grid)
        .or_else(|| truth.as_ref().map(|t| t.spec().clone()))
        .unwrap_or_default();
    run.manifest.config = json!({ "interp": to_value(&interp), "region": to_value(&region), "grid": to_value(&grid) });

    let data = io::load_dataset(&a.samples)?;
    let t = Instant::now();
    let (model, report) = BlockedModel::fit_dataset(&data, &region, &interp.partition()?, &interp.method)?;
    run.time("fit", t);
    let t = Instant::now();
    let probe = GriddedField3D::new(region, grid.clone(), vec![0.0; grid.len()])?;
    let xs = probe.to_dataset().normalized(&region)?;
    let pred = model.predict_many(&xs)?;
    run.time("predict", t);
    let field = GriddedField3D::new(region, grid, pred)?;

    let out = match &a.out {
        Some(p) => {
            run.record(p);
            p.clone()
        }
        None => run.output("field.csv"),
    };
    io::store_field(&out, &field)?;
    run.record(&io::sidecar_path(&out));
    let mut summary = json!({ "fit": to_value(&report), "samples": data.len() });
    if let Some(t) = &truth {
        if t.spec() == field.spec() && t.region() == field.region() {
            let r = rmse(field.values(), t.values());
            let (lo, hi) = t.value_range();
            summary["rmse"] = json!(r);
            summary["relative_rmse"] = json!(r / (hi - lo).max(f64::MIN_POSITIVE));
        }
    }
    let p = run.output("fit_report.json");
    io::write_json(&p, &summary)
}

fn truth_or_eddy(path: Option<&Path>) -> Result<GriddedField3D> {
    match path {
        Some(p) => io::load_field(p),
        None => Ok(synth_eddy(&EddyParams::default(), &GridSpec::default(), &Region::default())?.temperature),
    }
}

fn cmd_design(run: &mut Run, config: Option<&Path>, a: &DesignArgs) -> Result<()> {
    let mut cfg: DesignConfig = load_config(config)?;
    if let Some(b) = a.blocks {
        cfg.interp.blocks = b.0;
    }
    if let Some(l) = a.lambda {
        cfg.interp.method = BaseMethod::tps_fixed(l);
    }
    let kinds: Vec<FormationKind> = a.kinds.split(',').map(str::parse).collect::<Result<_>>()?;
    let ks = parse_counts(&a.gliders)?;
    run.manifest.config = json!({ "design": to_value(&cfg), "kinds": to_value(&kinds), "gliders": ks });

    let truth = truth_or_eddy(a.truth.as_deref())?;
    let test = default_test_set(&truth, &cfg.glider);
    let t = Instant::now();
    let report = design_sweep(&kinds, &ks, &truth, &cfg.glider, &cfg.interp, &test)?;
    run.time("sweep", t);

    let out = match &a.out {
        Some(p) => {
            run.record(p);
            p.clone()
        }
        None => run.output("report.json"),
    };
    io::write_json(&out, &report)?;

    let mut table = csv::Writer::from_writer(Vec::new());
    table.write_record(["kind", "gliders", "length_km", "rmse", "corr", "error"])?;
    let mut depth = csv::Writer::from_writer(Vec::new());
    depth.write_record(["kind", "gliders", "depth", "rmse", "n"])?;
    for c in &report.candidates {
        let (r, corr) = c.eval.as_ref().map_or((String::new(), String::new()), |e| {
            (e.rmse.to_string(), e.corr.map_or(String::new(), |v| v.to_string()))
        });
        table.write_record([
            c.kind.to_string(),
            c.k.to_string(),
            c.length_km.to_string(),
            r,
            corr,
            c.error.clone().unwrap_or_default(),
        ])?;
        for d in c.eval.iter().flat_map(|e| &e.per_depth) {
            depth.write_record([
                c.kind.to_string(),
                c.k.to_string(),
                d.depth.to_string(),
                d.rmse.to_string(),
                d.n.to_string(),
            ])?;
        }
    }
    let csv_bytes = |w: csv::Writer<Vec<u8>>, p: &Path| w.into_inner().map_err(|e| Error::io(p, e.into_error()));
    let p = run.output("designs.csv");
    io::write_atomic(&p, &csv_bytes(table, &p)?)?;
    let p = run.output("depth_rmse.csv");
    io::write_atomic(&p, &csv_bytes(depth, &p)?)?;
    let c = &report.candidates[report.chosen];
    println!("chosen: {} K={} rmse={}", c.kind, c.k, c.rmse().unwrap_or(f64::NAN));
    Ok(())
}

fn cmd_impute_current(run: &mut Run, a: &ImputeArgs) -> Result<()> {
    let history = io::load_vector_history(&a.history)?;
    run.manifest.config = json!({ "history": a.history, "days": history.len() });
    let t = Instant::now();
    let pairs = build_ratio_dataset(&history)?;
    let model = fit_ratio_model(&pairs)?;
    run.time("fit", t);
    let out = match &a.out {
        Some(p) => {
            run.record(p);
            p.clone()
        }
        None => run.output("model.json"),
    };
    io::write_json(&out, &model)
}

fn parse_mission(s: &str) -> Result<LinePath> {
    if let Ok(i) = s.trim().parse::<usize>() {
        return table_missions()
            .get(i.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::param("mission", format!("mission number must be 1-5, got {i}")));
    }
    io::read_json(Path::new(s))
}

/// Planner view and truth for a `--current` spec.
fn currents(spec: &str, region: &Region, model: RatioModel) -> Result<(CurrentProvider, Box<dyn CurrentSource>)> {
    let spec = spec.trim();
    if spec == "zero" {
        return Ok((
            CurrentProvider::zero(*region),
            Box::new(UniformCurrent { u: 0.0, v: 0.0 }),
        ));
    }
    if let Some(uv) = spec.strip_prefix("uniform:") {
        let parts: Vec<f64> = uv
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::param("current", format!("`{uv}`: {e}")))?;
        let [u, v] = parts[..] else {
            return Err(Error::param("current", "uniform needs U,V"));
        };
        return Ok((
            CurrentProvider::uniform(*region, u, v, RatioModel::identity()),
            Box::new(UniformCurrent { u, v }),
        ));
    }
    let history = if spec == "eddy" {
        vec![eddy_current(&EddyParams::default(), &GridSpec::default(), region)?]
    } else {
        io::load_vector_history(Path::new(spec))?
    };
    let provider = CurrentProvider::from_history(&history, model)?;
    Ok((provider, Box::new(TrueCurrent::new(history)?)))
}

fn cmd_control(run: &mut Run, config: Option<&Path>, seed: u64, a: &ControlArgs) -> Result<()> {
    let cfg: ControlConfig = load_config(config)?;
    cfg.validate()?;
    let mission = parse_mission(&a.mission)?;
    let optimizer = OptimizerSpec {
        kind: a.optimizer,
        population: a.population,
        max_evals: a.budget,
        parallel: a.parallel,
    };
    let model = a
        .ratio_model
        .as_deref()
        .map_or_else(|| Ok(RatioModel::default_profile()), io::read_json)?;
    run.manifest.seed = Some(seed);
    run.manifest.config = json!({
        "control": to_value(&cfg),
        "mission": to_value(&mission),
        "optimizer": to_value(&optimizer),
        "current": a.current,
        "ratio_model": to_value(&model),
    });
    if let Some(o) = &a.out {
        run.out_dir = o.clone();
        std::fs::create_dir_all(o).map_err(|e| Error::io(o, e))?;
    }
    let region = Region::default();
    let (provider, truth) = currents(&a.current, &region, model)?;
    let t = Instant::now();
    let res = run_mission(&mission, &region, &cfg, &optimizer, &provider, truth.as_ref(), seed)?;
    run.time("mission", t);

    io::store_track(&run.output("track.csv"), &res.track)?;
    io::store_surfacings(&run.output("surfacings.csv"), &res.surfacings, &res.wall_times)?;
    let dev = json!({
        "outcome": to_value(&res.outcome),
        "completed": res.completed,
        "surfacings": res.surfacings.len(),
        "deviation_km": to_value(&res.deviation),
        "max_wall_time_s": res.wall_times.iter().copied().fold(0.0, f64::max),
    });
    io::write_json(&run.output("deviation.json"), &dev)?;
    io::write_json(&run.output("mission.json"), &res)?;
    let p = run.output("path.svg");
    io::write_atomic(&p, mission_svg(&region, &res).as_bytes())?;
    println!("{}", dev);
    Ok(())
}

fn cmd_bench(run: &mut Run, config: Option<&Path>, a: &BenchArgs) -> Result<()> {
    let cfg: DesignConfig = load_config(config)?;
    let b_deps = parse_counts(&a.blocks)?;
    let method = a
        .lambda
        .map_or_else(|| cfg.interp.method.clone(), BaseMethod::tps_fixed);
    run.manifest.config = json!({
        "design": to_value(&cfg),
        "b_dep": b_deps,
        "gliders": a.gliders,
        "method": to_value(&method),
    });
    let truth = truth_or_eddy(a.truth.as_deref())?;
    let region = *truth.region();
    let f = gen_formation(FormationKind::Parallel, a.gliders, &region)?;
    let data = sample_formation(&f, &cfg.glider, &truth)?;
    let test = default_test_set(&truth, &cfg.glider);
    let xs = test.normalized(&region)?;
    let [bl, bt, _] = cfg.interp.blocks;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["b_dep", "fit_seconds", "rmse", "fitted", "empty", "singular", "error"])?;
    for &bd in &b_deps {
        let t = Instant::now();
        let (model, rep) = BlockedModel::fit_dataset(
            &data,
            &region,
            &make_partition(bl, bt, bd, cfg.interp.overlap)?,
            &method,
        )?;
        let secs = t.elapsed().as_secs_f64();
        let (r, err) = match model.predict_many(&xs) {
            Ok(p) => (rmse(&p, &test.values()).to_string(), String::new()),
            Err(e) => (String::new(), e.to_string()),
        };
        println!("b_dep={bd} fit={secs:.3}s rmse={r} {err}");
        w.write_record([
            bd.to_string(),
            secs.to_string(),
            r,
            rep.fitted.to_string(),
            rep.empty.to_string(),
            rep.singular.to_string(),
            err,
        ])?;
    }
    let p = run.output("bench.csv");
    let bytes = w.into_inner().map_err(|e| Error::io(&p, e.into_error()))?;
    io::write_atomic(&p, &bytes)
}
