//! A small labeled corpus around a cup: swirl, translate and pour variants
//! with jittered speed, direction and placement.

use std::fmt::Write as _;
use std::path::Path;

use ilscape_core::encode::EncoderConfig;
use ilscape_core::flowfield::NormMode;
use ilscape_core::geometry::{shapes, Mesh};
use ilscape_core::sensor::DomainSize;
use ilscape_core::trajectory::{synthesize, Preset, SynthParams, TrajectorySet};
use ilscape_core::{Aabb, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{write, Result};
use crate::obj::save_mesh;
use crate::trajectory_csv::save_trajectories;

pub const CLASSES: [Preset; 3] = [Preset::Swirl, Preset::Translate, Preset::Pour];
pub const INSTANCES: usize = 5;
pub const DEFAULT_SEED: u64 = 42;
pub const DOMAIN: f64 = 6.0;
pub const SAMPLE_SPACING: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct CorpusScene {
    pub id: String,
    pub label: String,
    pub trajectories: TrajectorySet,
}

pub fn desk_mesh() -> Mesh {
    shapes::cup(0.5, 1.0, 32, 6)
}

pub fn desk_config(norm_mode: NormMode, max_depth: u32) -> EncoderConfig {
    EncoderConfig {
        domain: DomainSize::Fixed(DOMAIN),
        sample_spacing: SAMPLE_SPACING,
        norm_mode,
        max_depth,
        ..EncoderConfig::default()
    }
}

fn base() -> SynthParams {
    SynthParams {
        count: 1500,
        duration: 2.0,
        ..SynthParams::default()
    }
}

/// Translate flow past the cup from the `-x` side.
pub fn translate_params() -> SynthParams {
    SynthParams {
        speed: 1.0,
        axis: Vec3::X,
        emitter: Aabb::new(Vec3::new(-2.75, -0.7, -0.2), Vec3::new(-0.6, 0.7, 1.2)),
        ..base()
    }
}

fn jittered(preset: Preset, rng: &mut ChaCha8Rng) -> SynthParams {
    let j: f64 = rng.random_range(0.85..1.15);
    let tilt: f64 = rng.random_range(-0.1..0.1);
    let shift: f64 = rng.random_range(-0.05..0.05);
    match preset {
        Preset::Swirl => SynthParams {
            speed: 2.0 * j,
            axis: Vec3::new(tilt, 0.0, 1.0),
            origin: Vec3::new(shift, 0.0, 0.0),
            emitter: Aabb::new(Vec3::new(-0.45, -0.45, 0.1), Vec3::new(0.45, 0.45, 0.9)),
            ..base()
        },
        Preset::Translate => {
            let t = translate_params();
            SynthParams {
                speed: j,
                axis: Vec3::new(1.0, tilt, 0.0),
                emitter: Aabb::new(t.emitter.min + Vec3::Z * shift, t.emitter.max + Vec3::Z * shift),
                ..t
            }
        }
        _ => SynthParams {
            speed: 0.5 * j,
            axis: Vec3::Z,
            emitter: Aabb::new(Vec3::new(-0.1 + shift, -0.1, 1.15), Vec3::new(0.1 + shift, 0.1, 1.2)),
            target: Aabb::new(Vec3::new(-0.5, -0.5, 0.0), Vec3::new(0.5, 0.5, 1.0)),
            ..base()
        },
    }
}

/// Parameters of every scene, class by class.
pub fn desk_params(seed: u64) -> Vec<(String, Preset, SynthParams, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for preset in CLASSES {
        for i in 0..INSTANCES {
            let p = jittered(preset, &mut rng);
            out.push((format!("{}_{i}", preset.name()), preset, p, 100 + i as u64));
        }
    }
    out
}

pub fn desk_scenes(seed: u64) -> Result<Vec<CorpusScene>> {
    let mesh = desk_mesh();
    desk_params(seed)
        .into_iter()
        .map(|(id, preset, p, s)| {
            Ok(CorpusScene {
                id,
                label: preset.name().into(),
                trajectories: synthesize(preset, &p, s, Some(&mesh))?.with_label(preset.name()),
            })
        })
        .collect()
}

/// Writes `cup.obj` plus a trajectory CSV and a scene config per scene.
pub fn write_corpus(dir: &Path, seed: u64) -> Result<Vec<CorpusScene>> {
    save_mesh(&dir.join("cup.obj"), &desk_mesh(), None)?;
    let scenes = desk_scenes(seed)?;
    for s in &scenes {
        save_trajectories(&dir.join(format!("{}.csv", s.id)), &s.trajectories)?;
        let mut cfg = String::new();
        let _ = writeln!(cfg, "mesh = \"cup.obj\"");
        let _ = writeln!(cfg, "label = \"{}\"", s.label);
        let _ = writeln!(cfg, "domain_size = {DOMAIN:?}");
        let _ = writeln!(cfg, "sample_spacing = {SAMPLE_SPACING:?}");
        let _ = writeln!(cfg, "\n[trajectories]\npath = \"{}.csv\"", s.id);
        write(&dir.join(format!("{}.toml", s.id)), cfg)?;
    }
    Ok(scenes)
}
