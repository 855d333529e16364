//! Deterministic synthetic motion drivers.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Track, TrackPoint, TrajectorySet};
use crate::error::{Error, Result};
use crate::geometry::{DriverParticleSet, Mesh, TriangleBvh};
use crate::math::{cos, exp, round, sin, sqrt, Aabb, Mat3, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    /// Straight lines at constant velocity `speed · axis`.
    Translate,
    /// Rigid rotation about `axis` through `origin` at angular speed `speed`.
    Swirl,
    /// Radial expansion `v = speed · (x − origin)`.
    Source,
    /// Ballistic fall along `−axis` with staggered emission, stopping on the
    /// floor of `target`.
    Pour,
    /// Particles leave a sphere around `origin` and decelerate onto the
    /// closest surface points of a mesh.
    Converge,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Translate,
        Preset::Swirl,
        Preset::Source,
        Preset::Pour,
        Preset::Converge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Translate => "translate",
            Preset::Swirl => "swirl",
            Preset::Source => "source",
            Preset::Pour => "pour",
            Preset::Converge => "converge",
        }
    }

    pub fn parse(s: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthParams {
    pub count: usize,
    pub duration: f64,
    pub dt: f64,
    /// Linear speed (translate, pour launch), angular speed (swirl) or growth rate (source).
    pub speed: f64,
    /// Flow direction (translate), rotation axis (swirl) or up direction (pour).
    pub axis: Vec3,
    pub origin: Vec3,
    /// Start-sphere radius for converge.
    pub radius: f64,
    /// Region of start positions for every preset but converge.
    pub emitter: Aabb,
    /// Receiving box for pour.
    pub target: Aabb,
    pub gravity: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            count: 2000,
            duration: 1.0,
            dt: super::DEFAULT_DT,
            speed: 1.0,
            axis: Vec3::Z,
            origin: Vec3::ZERO,
            radius: 1.0,
            emitter: Aabb::new(Vec3::splat(-0.5), Vec3::splat(0.5)),
            target: Aabb::new(Vec3::new(-0.5, -0.5, -0.5), Vec3::new(0.5, 0.5, 0.0)),
            gravity: 9.81,
        }
    }
}

fn uniform_in(rng: &mut ChaCha8Rng, b: &Aabb) -> Vec3 {
    let mut c = [0.0; 3];
    for (i, v) in c.iter_mut().enumerate() {
        let (lo, hi) = (b.min[i], b.max[i]);
        *v = if hi > lo { rng.random_range(lo..=hi) } else { lo };
    }
    Vec3::from_array(c)
}

fn unit_sphere(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..core::f64::consts::TAU);
    let r = sqrt((1.0 - z * z).max(0.0));
    Vec3::new(r * cos(phi), r * sin(phi), z)
}

/// Generates a trajectory set for `preset`. Identical inputs give bit-identical output.
pub fn synthesize(preset: Preset, params: &SynthParams, seed: u64, mesh: Option<&Mesh>) -> Result<TrajectorySet> {
    let p = params;
    if p.count == 0 {
        return Err(Error::InvalidParameter("particle count must be positive".into()));
    }
    if !(p.duration > 0.0) || !(p.dt > 0.0) {
        return Err(Error::InvalidParameter("duration and dt must be positive".into()));
    }
    let axis = p
        .axis
        .try_normalize()
        .ok_or_else(|| Error::InvalidParameter("axis must be nonzero".into()))?;
    let steps = round(p.duration / p.dt) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let time = |k: usize| k as f64 * p.dt;
    let mut tracks = Vec::with_capacity(p.count);

    match preset {
        Preset::Translate => {
            let v = axis * p.speed;
            for id in 0..p.count {
                let p0 = uniform_in(&mut rng, &p.emitter);
                let points = (0..=steps)
                    .map(|k| TrackPoint {
                        t: time(k),
                        position: p0 + v * time(k),
                        velocity: v,
                    })
                    .collect();
                tracks.push(Track { particle_id: id as u64, points });
            }
        }
        Preset::Swirl => {
            let omega = axis * p.speed;
            for id in 0..p.count {
                let r0 = uniform_in(&mut rng, &p.emitter) - p.origin;
                let points = (0..=steps)
                    .map(|k| {
                        let r = Mat3::rotation(axis, p.speed * time(k)).mul_vec(r0);
                        TrackPoint {
                            t: time(k),
                            position: p.origin + r,
                            velocity: omega.cross(r),
                        }
                    })
                    .collect();
                tracks.push(Track { particle_id: id as u64, points });
            }
        }
        Preset::Source => {
            for id in 0..p.count {
                let r0 = uniform_in(&mut rng, &p.emitter) - p.origin;
                let points = (0..=steps)
                    .map(|k| {
                        let r = r0 * exp(p.speed * time(k));
                        TrackPoint {
                            t: time(k),
                            position: p.origin + r,
                            velocity: r * p.speed,
                        }
                    })
                    .collect();
                tracks.push(Track { particle_id: id as u64, points });
            }
        }
        Preset::Pour => {
            let floor = p.target.min.dot(axis).min(p.target.max.dot(axis));
            let g = axis * -p.gravity;
            for id in 0..p.count {
                let k0 = rng.random_range(0..=steps / 2);
                let p0 = uniform_in(&mut rng, &p.emitter);
                let jitter = Vec3::new(
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(-1.0..=1.0),
                );
                let v0 = axis * -p.speed + (jitter - axis * jitter.dot(axis)) * (0.1 * p.speed);
                let mut points = Vec::new();
                for k in k0..=steps {
                    let tau = time(k - k0);
                    let mut pos = p0 + v0 * tau + g * (0.5 * tau * tau);
                    let mut vel = v0 + g * tau;
                    let landed = pos.dot(axis) <= floor && p.target.contains(pos - axis * (pos.dot(axis) - floor));
                    if landed {
                        pos = pos - axis * (pos.dot(axis) - floor);
                        vel = Vec3::ZERO;
                    }
                    points.push(TrackPoint { t: time(k), position: pos, velocity: vel });
                    if landed {
                        break;
                    }
                }
                tracks.push(Track { particle_id: id as u64, points });
            }
        }
        Preset::Converge => {
            let mesh = mesh.ok_or(Error::MissingMesh("converge"))?;
            let bvh = TriangleBvh::new(mesh);
            let total = p.duration;
            for id in 0..p.count {
                let start = p.origin + unit_sphere(&mut rng) * p.radius;
                let target = bvh.closest_point(mesh, start).point;
                let delta = target - start;
                let points = (0..=steps)
                    .map(|k| {
                        let u = (time(k) / total).min(1.0);
                        let s = 1.0 - (1.0 - u) * (1.0 - u);
                        TrackPoint {
                            t: time(k),
                            position: start + delta * s,
                            velocity: delta * (2.0 * (1.0 - u) / total),
                        }
                    })
                    .collect();
                tracks.push(Track { particle_id: id as u64, points });
            }
        }
    }
    TrajectorySet::from_tracks(tracks, p.dt)
}

/// Rigid motion of a driver: translation plus rotation about `pivot`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidMotion {
    pub linear_velocity: Vec3,
    pub angular_velocity: Vec3,
    pub pivot: Vec3,
}

/// Tracks of driver particles carried by a rigid motion.
pub fn animate_driver(driver: &DriverParticleSet, motion: RigidMotion, duration: f64, dt: f64) -> Result<TrajectorySet> {
    if !(duration > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter("duration and dt must be positive".into()));
    }
    let steps = round(duration / dt) as usize;
    let w = motion.angular_velocity;
    let speed = w.norm();
    let tracks = driver
        .points
        .iter()
        .enumerate()
        .map(|(id, &p0)| {
            let r0 = p0 - motion.pivot;
            let points = (0..=steps)
                .map(|k| {
                    let t = k as f64 * dt;
                    let r = if speed > 0.0 { Mat3::rotation(w, speed * t).mul_vec(r0) } else { r0 };
                    TrackPoint {
                        t,
                        position: motion.pivot + motion.linear_velocity * t + r,
                        velocity: motion.linear_velocity + w.cross(r),
                    }
                })
                .collect();
            Track { particle_id: id as u64, points }
        })
        .collect();
    TrajectorySet::from_tracks(tracks, dt)
}
