//! Scene configuration files (TOML).

use std::path::{Path, PathBuf};

use ilscape_core::descriptor::{AttributeWeights, Scales, DEFAULT_BINS};
use ilscape_core::encode::EncoderConfig;
use ilscape_core::flowfield::{NormMode, DEFAULT_RESOLUTION};
use ilscape_core::geometry::{shapes, Mesh};
use ilscape_core::sensor::{DomainSize, DEFAULT_MAX_DEPTH};
use ilscape_core::trajectory::{synthesize, Preset, SynthParams, TrajectorySet};
use ilscape_core::{Aabb, Axis, Vec3};
use serde::Deserialize;

use crate::error::{read, Context, Error, Result};
use crate::obj::load_mesh;
use crate::trajectory_csv::load_trajectories;

/// Either a mesh file or one of the built-in shapes.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, untagged)]
pub enum MeshSource {
    Path(PathBuf),
    Shape(ShapeSpec),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "shape", rename_all = "lowercase")]
pub enum ShapeSpec {
    Cube { size: f64 },
    Plane { size: f64, divisions: usize },
    Sphere { radius: f64, subdivisions: u32 },
    Cup { radius: f64, height: f64, segments: usize, rings: usize },
}

impl ShapeSpec {
    pub fn build(&self) -> Mesh {
        match *self {
            ShapeSpec::Cube { size } => shapes::cube(Vec3::splat(-0.5 * size), size),
            ShapeSpec::Plane { size, divisions } => shapes::plane(size, divisions),
            ShapeSpec::Sphere { radius, subdivisions } => shapes::icosphere(Vec3::ZERO, radius, subdivisions),
            ShapeSpec::Cup { radius, height, segments, rings } => shapes::cup(radius, height, segments, rings),
        }
    }
}

/// Parameters of a synthetic motion driver. Missing fields take the preset
/// defaults.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub preset: String,
    pub count: Option<usize>,
    pub duration: Option<f64>,
    pub speed: Option<f64>,
    pub axis: Option<[f64; 3]>,
    pub origin: Option<[f64; 3]>,
    pub radius: Option<f64>,
    pub emitter_min: Option<[f64; 3]>,
    pub emitter_max: Option<[f64; 3]>,
    pub target_min: Option<[f64; 3]>,
    pub target_max: Option<[f64; 3]>,
    pub gravity: Option<f64>,
}

impl SynthSpec {
    pub fn preset(&self) -> Result<Preset> {
        Preset::parse(&self.preset).ok_or_else(|| {
            let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            Error::Invalid(format!("unknown preset `{}` (expected one of {})", self.preset, names.join(", ")))
        })
    }

    pub fn params(&self, dt: f64) -> SynthParams {
        let d = SynthParams::default();
        let v = |a: Option<[f64; 3]>, or: Vec3| a.map_or(or, Vec3::from_array);
        SynthParams {
            count: self.count.unwrap_or(d.count),
            duration: self.duration.unwrap_or(d.duration),
            dt,
            speed: self.speed.unwrap_or(d.speed),
            axis: v(self.axis, d.axis),
            origin: v(self.origin, d.origin),
            radius: self.radius.unwrap_or(d.radius),
            emitter: Aabb::new(v(self.emitter_min, d.emitter.min), v(self.emitter_max, d.emitter.max)),
            target: Aabb::new(v(self.target_min, d.target.min), v(self.target_max, d.target.max)),
            gravity: self.gravity.unwrap_or(d.gravity),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, untagged)]
#[allow(clippy::large_enum_variant)]
pub enum TrajectorySource {
    Path { path: PathBuf },
    Synth(SynthSpec),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DomainSetting {
    Fixed(f64),
    Named(String),
}

/// Everything needed to encode one scene. Relative paths are resolved
/// against the directory of the config file.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub mesh: MeshSource,
    pub trajectories: TrajectorySource,
    pub label: Option<String>,
    #[serde(default = "default_domain")]
    pub domain_size: DomainSetting,
    #[serde(default = "default_up")]
    pub up_axis: String,
    #[serde(default = "default_spacing")]
    pub sample_spacing: f64,
    #[serde(default = "default_depth")]
    pub max_depth: u32,
    /// Resample loaded trajectories to this step; synthetic ones use it directly.
    pub dt: Option<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_norm_mode")]
    pub norm_mode: String,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_scales")]
    pub scales: [f64; 6],
    #[serde(default = "default_weights")]
    pub weights: [f64; 6],
    #[serde(default)]
    pub seed: u64,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_domain() -> DomainSetting {
    DomainSetting::Named("auto".into())
}
fn default_up() -> String {
    "z".into()
}
fn default_spacing() -> f64 {
    EncoderConfig::default().sample_spacing
}
fn default_depth() -> u32 {
    DEFAULT_MAX_DEPTH
}
fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}
fn default_norm_mode() -> String {
    NormMode::default().name().into()
}
fn default_bins() -> usize {
    DEFAULT_BINS
}
fn default_scales() -> [f64; 6] {
    Scales::default().0
}
fn default_weights() -> [f64; 6] {
    AttributeWeights::default().0
}

impl SceneConfig {
    pub fn new(mesh: MeshSource, trajectories: TrajectorySource) -> Self {
        SceneConfig {
            mesh,
            trajectories,
            label: None,
            domain_size: default_domain(),
            up_axis: default_up(),
            sample_spacing: default_spacing(),
            max_depth: default_depth(),
            dt: None,
            resolution: default_resolution(),
            norm_mode: default_norm_mode(),
            bins: default_bins(),
            scales: default_scales(),
            weights: default_weights(),
            seed: 0,
            base_dir: PathBuf::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg: SceneConfig = toml::from_str(text).map_err(|e| {
            let at = e.span().map_or_else(|| "byte ?".to_string(), |s| format!("byte {}", s.start));
            Error::parse(path, at, e.message().trim().to_string())
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate().context(|| path.display().to_string())?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.encoder_config()?.validate()?;
        self.weights()?;
        if let Some(dt) = self.dt {
            if dt.is_nan() || dt <= 0.0 {
                return Err(Error::Invalid("dt must be positive".into()));
            }
        }
        if let TrajectorySource::Synth(s) = &self.trajectories {
            s.preset()?;
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn encoder_config(&self) -> Result<EncoderConfig> {
        let domain = match &self.domain_size {
            DomainSetting::Fixed(d) if *d > 0.0 => DomainSize::Fixed(*d),
            DomainSetting::Named(s) if s == "auto" => DomainSize::Auto,
            other => return Err(Error::Invalid(format!("domain_size must be `auto` or a positive number, got {other:?}"))),
        };
        let up_axis =
            Axis::parse(&self.up_axis).ok_or_else(|| Error::Invalid(format!("unknown up axis `{}`", self.up_axis)))?;
        let norm_mode = NormMode::parse(&self.norm_mode)
            .ok_or_else(|| Error::Invalid(format!("unknown norm mode `{}` (average or direction)", self.norm_mode)))?;
        let cfg = EncoderConfig {
            domain,
            up_axis,
            sample_spacing: self.sample_spacing,
            max_depth: self.max_depth,
            resolution: self.resolution,
            norm_mode,
            bins: self.bins,
            scales: Scales(self.scales),
            seed: self.seed,
            ..EncoderConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn weights(&self) -> Result<AttributeWeights> {
        let w = AttributeWeights(self.weights);
        w.validate()?;
        Ok(w)
    }

    pub fn load_mesh(&self) -> Result<Mesh> {
        match &self.mesh {
            MeshSource::Path(p) => load_mesh(&self.resolve(p)),
            MeshSource::Shape(s) => Ok(s.build()),
        }
    }

    /// Loads or synthesizes the trajectories. `mesh` is the observed object,
    /// needed by presets that react to it.
    pub fn load_trajectories(&self, mesh: &Mesh) -> Result<TrajectorySet> {
        let ts = match &self.trajectories {
            TrajectorySource::Path { path } => {
                let ts = load_trajectories(&self.resolve(path))?;
                match self.dt {
                    Some(dt) if dt != ts.dt() => ts.resample(dt)?,
                    _ => ts,
                }
            }
            TrajectorySource::Synth(s) => {
                let dt = self.dt.unwrap_or(ilscape_core::trajectory::DEFAULT_DT);
                synthesize(s.preset()?, &s.params(dt), self.seed, Some(mesh))?
            }
        };
        Ok(match &self.label {
            Some(l) => ts.with_label(l.clone()),
            None => ts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENE: &str = r#"
label = "swirl"
domain_size = 4.0
max_depth = 7
seed = 3

[mesh]
shape = "cup"
radius = 0.5
height = 1.0
segments = 16
rings = 3

[trajectories]
preset = "swirl"
count = 50
speed = 2.0
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = SceneConfig::parse(SCENE, Path::new("dir/scene.toml")).unwrap();
        assert_eq!(cfg.max_depth, 7);
        assert_eq!(cfg.base_dir, Path::new("dir"));
        assert_eq!(cfg.encoder_config().unwrap().domain, DomainSize::Fixed(4.0));
        let mesh = cfg.load_mesh().unwrap();
        let ts = cfg.load_trajectories(&mesh).unwrap();
        assert_eq!(ts.len(), 50);
        assert_eq!(ts.label(), Some("swirl"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("bogus = 1\n{SCENE}");
        let e = SceneConfig::parse(&text, Path::new("s.toml")).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let text = SCENE.replace("count = 50", "count = 50\nspeeed = 1");
        assert!(SceneConfig::parse(&text, Path::new("s.toml")).is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        for (from, to) in [("max_depth = 7", "max_depth = 0"), ("domain_size = 4.0", "domain_size = -1.0")] {
            let text = SCENE.replace(from, to);
            assert!(SceneConfig::parse(&text, Path::new("s.toml")).is_err(), "{to}");
        }
        let text = SCENE.replace("preset = \"swirl\"", "preset = \"spin\"");
        assert!(SceneConfig::parse(&text, Path::new("s.toml")).is_err());
    }

    #[test]
    fn mesh_paths_resolve_against_the_config() {
        let text = "mesh = \"cup.obj\"\n[trajectories]\npath = \"t.csv\"\n";
        let cfg = SceneConfig::parse(text, Path::new("/data/scene.toml")).unwrap();
        assert_eq!(cfg.mesh, MeshSource::Path("cup.obj".into()));
        assert_eq!(cfg.resolve(Path::new("cup.obj")), Path::new("/data/cup.obj"));
    }
}
