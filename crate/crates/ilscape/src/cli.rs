//! The `ilscape` command line.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ilscape_core::analysis::{
    correspondence, distance_matrix, leave_one_out, mds_embed, precision_recall, predict, prediction_report, retrieve,
    saliency, segment_signatures, SaliencyMap,
};
use ilscape_core::descriptor::{distance, AttributeWeights};
use ilscape_core::encode::{EncodeStats, Encoder, SceneEncoding};
use ilscape_core::geometry::Mesh;
use ilscape_core::trajectory::{synthesize, Preset, TrajectorySet};
use serde::Deserialize;

use crate::config::{DomainSetting, MeshSource, SceneConfig, ShapeSpec, SynthSpec, TrajectorySource};
use crate::error::{read, write, Context, Error, Result};
use crate::{corpus, db, export, ild, obj, svg, trajectory_csv};

#[derive(Debug, Parser)]
#[command(name = "ilscape", version, about = "Encode and compare object-motion interactions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a scene into an `.ild` descriptor.
    Encode(EncodeArgs),
    /// Print the distance between two descriptors.
    Compare(CompareArgs),
    /// Write synthetic trajectories, a built-in mesh or the demo corpus.
    Gen(GenArgs),
    /// Work with a directory of descriptors.
    #[command(subcommand)]
    Db(DbCommand),
    /// Per-vertex saliency of the observed mesh.
    Saliency(SaliencyArgs),
    /// Match regions of two meshes by saliency.
    Correspond(CorrespondArgs),
}

/// Scene selection: a config file, flags, or both (flags win).
#[derive(Debug, Clone, Default, Args)]
pub struct SceneArgs {
    /// Scene config (TOML).
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Mesh file (OBJ).
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Trajectory CSV.
    #[arg(long)]
    pub trajectories: Option<PathBuf>,
    /// Synthetic preset instead of a trajectory file.
    #[arg(long, conflicts_with = "trajectories")]
    pub preset: Option<String>,
    #[arg(long)]
    pub label: Option<String>,
    /// Interaction-space edge length, or `auto`.
    #[arg(long)]
    pub domain_size: Option<String>,
    #[arg(long)]
    pub up_axis: Option<String>,
    /// Poisson-disk spacing as a fraction of the mesh's largest extent.
    #[arg(long)]
    pub sample_spacing: Option<f64>,
    #[arg(long)]
    pub max_depth: Option<u32>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// `average` or `direction`.
    #[arg(long)]
    pub norm_mode: Option<String>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SceneArgs {
    pub fn resolve(&self) -> Result<SceneConfig> {
        let mut cfg = match &self.scene {
            Some(p) => SceneConfig::load(p)?,
            None => {
                let mesh = self
                    .mesh
                    .clone()
                    .ok_or_else(|| Error::Invalid("either --scene or --mesh is required".into()))?;
                let traj = match (&self.trajectories, &self.preset) {
                    (Some(p), _) => TrajectorySource::Path { path: p.clone() },
                    (None, Some(p)) => TrajectorySource::Synth(SynthSpec {
                        preset: p.clone(),
                        ..SynthSpec::default()
                    }),
                    (None, None) => {
                        return Err(Error::Invalid("either --scene, --trajectories or --preset is required".into()))
                    }
                };
                SceneConfig::new(MeshSource::Path(mesh), traj)
            }
        };
        let cwd = |p: &PathBuf| std::path::absolute(p).unwrap_or_else(|_| p.clone());
        if let Some(m) = &self.mesh {
            cfg.mesh = MeshSource::Path(cwd(m));
        }
        if let Some(t) = &self.trajectories {
            cfg.trajectories = TrajectorySource::Path { path: cwd(t) };
        }
        if let Some(p) = &self.preset {
            match &mut cfg.trajectories {
                TrajectorySource::Synth(s) => s.preset = p.clone(),
                t => {
                    *t = TrajectorySource::Synth(SynthSpec {
                        preset: p.clone(),
                        ..SynthSpec::default()
                    })
                }
            }
        }
        if let Some(v) = &self.label {
            cfg.label = Some(v.clone());
        }
        if let Some(v) = &self.domain_size {
            cfg.domain_size = match v.parse::<f64>() {
                Ok(d) => DomainSetting::Fixed(d),
                Err(_) => DomainSetting::Named(v.clone()),
            };
        }
        if let Some(v) = &self.up_axis {
            cfg.up_axis = v.clone();
        }
        if let Some(v) = self.sample_spacing {
            cfg.sample_spacing = v;
        }
        if let Some(v) = self.max_depth {
            cfg.max_depth = v;
        }
        if let Some(v) = self.dt {
            cfg.dt = Some(v);
        }
        if let Some(v) = self.resolution {
            cfg.resolution = v;
        }
        if let Some(v) = &self.norm_mode {
            cfg.norm_mode = v.clone();
        }
        if let Some(v) = self.bins {
            cfg.bins = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Output descriptor.
    #[arg(long)]
    pub out: PathBuf,
    /// Only use samples at or after this time.
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Only use samples at or before this time.
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Also store descriptors of this many growing time windows.
    #[arg(long)]
    pub segments: Option<usize>,
    /// Write surface samples, sensor boxes and vector fields here.
    #[arg(long)]
    pub debug_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// TOML file with `weights = [Mt, Md, Ms, Mw, M, O]`.
    #[arg(long)]
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "what")]
pub struct GenTarget {
    /// Synthetic trajectory preset.
    #[arg(long)]
    pub preset: Option<String>,
    /// Built-in mesh: cube, plane, sphere or cup.
    #[arg(long)]
    pub shape: Option<String>,
    /// Write the labeled demo corpus into this directory.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub target: GenTarget,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (trajectory CSV or OBJ).
    #[arg(long, required_unless_present = "corpus")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub speed: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Mesh the converge preset moves towards.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DbCommand {
    /// Write a manifest listing every `.ild` file in a directory.
    Build {
        dir: PathBuf,
        /// Defaults to `<dir>/manifest.toml`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank database entries by distance to a query.
    Retrieve {
        #[arg(long)]
        db: PathBuf,
        #[arg(long, required_unless_present = "loo")]
        query: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Ranking CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Precision/recall CSV for the query's label.
        #[arg(long)]
        pr_out: Option<PathBuf>,
        /// Leave-one-out evaluation of the whole database instead of a query.
        #[arg(long, conflicts_with = "query")]
        loo: bool,
    },
    /// Distance matrix and 2D embedding.
    Mds {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Prediction from partial interactions.
    Predict {
        #[arg(long)]
        db: PathBuf,
        /// Writes `prediction.csv` and `prediction_pr.csv`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Rank the database for this query's segment `k`.
        #[arg(long, requires = "k")]
        query: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SaliencyArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Neighborhood radius around each vertex's cell (0 = that cell only).
    #[arg(long, default_value_t = 0.0)]
    pub radius: f64,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// `vertex_id,saliency` CSV.
    #[arg(long)]
    pub out_csv: PathBuf,
    /// Mesh with saliency as vertex colors.
    #[arg(long)]
    pub out_obj: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrespondArgs {
    #[arg(long)]
    pub mesh1: PathBuf,
    #[arg(long)]
    pub saliency1: PathBuf,
    #[arg(long)]
    pub mesh2: PathBuf,
    #[arg(long)]
    pub saliency2: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    /// Ignore cells where either shape's mean saliency is lower.
    #[arg(long, default_value_t = 0.0)]
    pub min_saliency: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    weights: [f64; 6],
}

pub fn load_weights(path: Option<&Path>) -> Result<AttributeWeights> {
    let Some(path) = path else {
        return Ok(AttributeWeights::default());
    };
    let f: WeightsFile = toml::from_str(&read(path)?).map_err(|e| Error::parse(path, "weights", e.message().trim()))?;
    let w = AttributeWeights(f.weights);
    w.validate().context(|| path.display().to_string())?;
    Ok(w)
}

pub fn load_saliency(path: &Path, vertices: usize) -> Result<SaliencyMap> {
    let text = read(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut values = vec![None; vertices];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, "record", e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = || Error::parse(path, format!("line {line}"), "expected `vertex_id,saliency`");
        let i: usize = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let v: f64 = rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        if i >= vertices || !(0.0..=1.0).contains(&v) {
            return Err(bad());
        }
        values[i] = Some(v);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::parse(path, "values", format!("vertex {i} has no saliency"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SaliencyMap {
        values,
        radius: 0.0,
        weights: AttributeWeights::default(),
    })
}

/// A scene ready to encode.
pub struct LoadedScene {
    pub config: SceneConfig,
    pub encoder: Encoder,
    pub trajectories: TrajectorySet,
}

pub fn load_scene(cfg: SceneConfig) -> Result<LoadedScene> {
    let mesh = cfg.load_mesh().context(|| "loading mesh".into())?;
    let trajectories = cfg.load_trajectories(&mesh).context(|| "loading trajectories".into())?;
    let encoder = Encoder::new(mesh, cfg.encoder_config()?).context(|| "placing sensors".into())?;
    Ok(LoadedScene {
        config: cfg,
        encoder,
        trajectories,
    })
}

fn window(ts: &TrajectorySet, t0: Option<f64>, t1: Option<f64>) -> TrajectorySet {
    if t0.is_none() && t1.is_none() {
        return ts.clone();
    }
    ts.clip_to_window(t0.unwrap_or(f64::NEG_INFINITY), t1.unwrap_or(f64::INFINITY))
}

fn summary(stats: &EncodeStats, started: Instant) {
    println!(
        "active sensors: {} of {}\ntrajectory samples: {} ({} outside the interaction space)\nwall time: {:.3} s",
        stats.active_sensors,
        stats.sensors,
        stats.samples,
        stats.samples_outside,
        started.elapsed().as_secs_f64()
    );
}

fn write_debug(dir: &Path, enc: &Encoder, scene: &SceneEncoding) -> Result<()> {
    let s = enc.surface_samples();
    write(&dir.join("samples.csv"), export::points_csv(&s.points, &s.triangles))?;
    write(&dir.join("leaves.csv"), export::leaves_csv(enc.tree()))?;
    export::write_fields(&dir.join("fields"), &scene.sensors)
}

fn cmd_encode(a: &EncodeArgs) -> Result<()> {
    let started = Instant::now();
    let scene = load_scene(a.scene.resolve()?)?;
    let ts = window(&scene.trajectories, a.t0, a.t1);
    let enc = &scene.encoder;
    let detailed = enc.encode_detailed(&ts).context(|| "encoding".into())?;
    let segments = match a.segments {
        Some(n) => Some(segment_signatures(enc, &ts, n).context(|| "encoding time windows".into())?),
        None => None,
    };
    ild::save_ild(&a.out, &detailed.descriptor, segments.as_ref())?;
    if let Some(dir) = &a.debug_dir {
        write_debug(dir, enc, &detailed)?;
    }
    summary(&detailed.stats, started);
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let w = load_weights(a.weights.as_deref())?;
    let x = ild::load_ild(&a.a)?.descriptor;
    let y = ild::load_ild(&a.b)?.descriptor;
    println!("{:.6}", distance(&x, &y, &w)?);
    Ok(())
}

fn shape(name: &str) -> Result<Mesh> {
    let spec = match name {
        "cube" => ShapeSpec::Cube { size: 1.0 },
        "plane" => ShapeSpec::Plane { size: 2.0, divisions: 16 },
        "sphere" => ShapeSpec::Sphere { radius: 0.5, subdivisions: 3 },
        "cup" => return Ok(corpus::desk_mesh()),
        _ => return Err(Error::Invalid(format!("unknown shape `{name}` (cube, plane, sphere or cup)"))),
    };
    Ok(spec.build())
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    if let Some(dir) = &a.target.corpus {
        let scenes = corpus::write_corpus(dir, a.seed)?;
        println!("wrote {} scenes to {}", scenes.len(), dir.display());
        return Ok(());
    }
    let out = a.out.as_deref().ok_or_else(|| Error::Invalid("--out is required".into()))?;
    if let Some(name) = &a.target.shape {
        return obj::save_mesh(out, &shape(name)?, None);
    }
    let spec = SynthSpec {
        preset: a.target.preset.clone().unwrap_or_default(),
        count: a.count,
        duration: a.duration,
        speed: a.speed,
        ..SynthSpec::default()
    };
    let preset: Preset = spec.preset()?;
    let mesh = a.mesh.as_deref().map(obj::load_mesh).transpose()?;
    let params = spec.params(a.dt.unwrap_or(ilscape_core::trajectory::DEFAULT_DT));
    let ts = synthesize(preset, &params, a.seed, mesh.as_ref())?;
    trajectory_csv::save_trajectories(out, &ts)
}

fn print_ranking(r: &[ilscape_core::analysis::Ranked]) {
    for (i, e) in r.iter().enumerate() {
        println!("{:>3}  {:<24} {:<12} {:.6}", i + 1, e.id, e.label.as_deref().unwrap_or("-"), e.distance);
    }
}

fn cmd_db(c: &DbCommand) -> Result<()> {
    match c {
        DbCommand::Build { dir, out } => {
            let (manifest, _) = db::scan(dir)?;
            let out = out.clone().unwrap_or_else(|| dir.join("manifest.toml"));
            db::save_manifest(&out, &manifest)?;
            for e in &manifest.entries {
                println!("{}\t{}", e.id, e.label.as_deref().unwrap_or("-"));
            }
            Ok(())
        }
        DbCommand::Retrieve { db, query, top_k, weights, out, pr_out, loo } => {
            let w = load_weights(weights.as_deref())?;
            let base = db::load_db(db)?;
            if *loo {
                let r = leave_one_out(&base, &w)?;
                println!(
                    "leave-one-out accuracy: {:.4}\nmean intra-class distance: {:.6}\nmean inter-class distance: {:.6}\nprecision at recall 0.5: {:.4}",
                    r.accuracy, r.mean_intra, r.mean_inter, r.mean_precision_at_half_recall
                );
                if let Some(p) = pr_out {
                    write(p, export::pr_csv(&r.mean_pr))?;
                }
                return Ok(());
            }
            let q = ild::load_ild(query.as_deref().expect("clap requires --query"))?.descriptor;
            let ranking = retrieve(&base, &q, *top_k, &w)?;
            print_ranking(&ranking);
            if let Some(p) = out {
                write(p, export::ranking_csv(&ranking))?;
            }
            if let Some(p) = pr_out {
                if let Some(e) = base.entries().iter().find(|e| e.label.is_none()) {
                    return Err(ilscape_core::Error::Unlabeled(e.id.clone()).into());
                }
                let label = q
                    .label()
                    .ok_or_else(|| Error::Invalid("the query has no label; precision/recall is undefined".into()))?;
                let full = retrieve(&base, &q, usize::MAX, &w)?;
                match precision_recall(&full, label) {
                    Some(c) => write(p, export::pr_csv(&c))?,
                    None => eprintln!("class `{label}` is not in the database; precision/recall is undefined"),
                }
            }
            Ok(())
        }
        DbCommand::Mds { db, out_dir, weights } => {
            let w = load_weights(weights.as_deref())?;
            let base = db::load_db(db)?;
            let m = distance_matrix(&base, &w)?;
            let e = mds_embed(&m.values)?;
            let labels: Vec<Option<String>> = base.entries().iter().map(|e| e.label.clone()).collect();
            write(&out_dir.join("matrix.csv"), export::matrix_csv(&m))?;
            write(&out_dir.join("mds.csv"), export::mds_csv(&m.ids, &labels, &e))?;
            write(&out_dir.join("mds.svg"), svg::scatter_svg(&e.points, &labels, &m.ids))?;
            println!("reconstruction error: {:.6}", e.reconstruction_error);
            Ok(())
        }
        DbCommand::Predict { db, out_dir, query, k, weights } => {
            let w = load_weights(weights.as_deref())?;
            let base = db::load_db(db)?;
            if let (Some(q), Some(k)) = (query, k) {
                let doc = ild::load_ild(q)?;
                let seg = doc
                    .segments
                    .ok_or_else(|| Error::Invalid(format!("{} has no time-window descriptors", q.display())))?;
                let d = seg.segment(*k)?.ok_or(ilscape_core::Error::NoInteraction)?;
                print_ranking(&predict(&base, d, *k, &w)?);
                return Ok(());
            }
            let levels = prediction_report(&base, &w)?;
            println!("  k  queries  accuracy  P@R0.5");
            for l in &levels {
                println!("{:>3}  {:>7}  {:>8.4}  {:>6.4}", l.k, l.queries, l.accuracy, l.precision_at_half_recall);
            }
            if let Some(dir) = out_dir {
                write(&dir.join("prediction.csv"), export::prediction_csv(&levels))?;
                write(&dir.join("prediction_pr.csv"), export::prediction_pr_csv(&levels))?;
            }
            Ok(())
        }
    }
}

fn cmd_saliency(a: &SaliencyArgs) -> Result<()> {
    let cfg = a.scene.resolve()?;
    let w = match &a.weights {
        Some(p) => load_weights(Some(p))?,
        None => cfg.weights()?,
    };
    let scene = load_scene(cfg)?;
    let detailed = scene.encoder.encode_detailed(&scene.trajectories)?;
    let map = saliency(&scene.encoder, &detailed, &w, a.radius)?;
    write(&a.out_csv, export::saliency_csv(&map))?;
    if let Some(p) = &a.out_obj {
        let colors: Vec<[f64; 3]> = map.values.iter().map(|&s| obj::heat_color(s)).collect();
        obj::save_mesh(p, scene.encoder.mesh(), Some(&colors))?;
    }
    Ok(())
}

fn cmd_correspond(a: &CorrespondArgs) -> Result<()> {
    let m1 = obj::load_mesh(&a.mesh1)?;
    let m2 = obj::load_mesh(&a.mesh2)?;
    let s1 = load_saliency(&a.saliency1, m1.vertex_count())?;
    let s2 = load_saliency(&a.saliency2, m2.vertex_count())?;
    let matches = correspondence(&m1, &s1, &m2, &s2, a.grid, a.min_saliency)?;
    write(&a.out, export::correspondence_csv(&matches))?;
    println!("{} matched cells", matches.len());
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Encode(a) => cmd_encode(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Db(c) => cmd_db(c),
        Command::Saliency(a) => cmd_saliency(a),
        Command::Correspond(a) => cmd_correspond(a),
    }
}

/// Caps the worker pool from `ILSCAPE_THREADS` (unset or 0 = one per core).
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("ILSCAPE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("ILSCAPE_THREADS must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Invalid(format!("cannot start {n} worker threads: {e}")))?;
    }
    Ok(())
}
