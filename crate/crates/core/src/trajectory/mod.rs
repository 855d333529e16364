//! Motion-driver trajectories sampled at a constant time step.

mod synth;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

pub use synth::{animate_driver, synthesize, Preset, RigidMotion, SynthParams};

use crate::error::{Error, Result};
use crate::math::{ceil, floor, Vec3};

pub const DEFAULT_DT: f64 = 0.025;

/// Relative deviation from the median step tolerated when reading samples.
const DT_TOLERANCE: f64 = 0.01;
const TIME_EPS: f64 = 1e-9;

/// One row of a trajectory file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub particle_id: u64,
    pub t: f64,
    pub position: Vec3,
    pub velocity: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackPoint {
    pub t: f64,
    pub position: Vec3,
    pub velocity: Vec3,
}

/// Time-sorted samples of a single particle.
#[derive(Clone, Debug, PartialEq)]
pub struct Track {
    pub particle_id: u64,
    pub points: Vec<TrackPoint>,
}

/// All particle tracks of one interaction, sorted by particle id.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySet {
    tracks: Vec<Track>,
    dt: f64,
    label: Option<String>,
}

impl TrajectorySet {
    /// Groups rows by particle and sorts them in time. The step is the median
    /// positive gap; velocities are derived when `has_velocity` is false.
    pub fn from_samples(rows: Vec<TrajectorySample>, has_velocity: bool) -> Result<Self> {
        for r in &rows {
            if !r.t.is_finite() || !r.position.is_finite() || (has_velocity && !r.velocity.is_finite()) {
                return Err(Error::NonFiniteSample {
                    particle: r.particle_id,
                    t: r.t,
                });
            }
            if r.t < 0.0 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "negative time {} for particle {}",
                    r.t,
                    r.particle_id
                )));
            }
        }
        let mut groups: BTreeMap<u64, Vec<TrackPoint>> = BTreeMap::new();
        for r in rows {
            groups.entry(r.particle_id).or_default().push(TrackPoint {
                t: r.t,
                position: r.position,
                velocity: if has_velocity { r.velocity } else { Vec3::ZERO },
            });
        }
        let mut gaps = Vec::new();
        for pts in groups.values_mut() {
            pts.sort_by(|a, b| a.t.total_cmp(&b.t));
            gaps.extend(pts.windows(2).map(|w| w[1].t - w[0].t).filter(|g| *g > 0.0));
        }
        let dt = if gaps.is_empty() {
            DEFAULT_DT
        } else {
            gaps.sort_by(f64::total_cmp);
            gaps[gaps.len() / 2]
        };
        for (&id, pts) in &groups {
            for w in pts.windows(2) {
                let gap = w[1].t - w[0].t;
                if (gap - dt).abs() > DT_TOLERANCE * dt {
                    return Err(Error::InconsistentTimeStep {
                        particle: id,
                        t: w[1].t,
                        gap,
                        expected: dt,
                    });
                }
            }
        }
        let set = TrajectorySet {
            tracks: groups
                .into_iter()
                .map(|(particle_id, points)| Track { particle_id, points })
                .collect(),
            dt,
            label: None,
        };
        Ok(if has_velocity { set } else { set.derive_velocities() })
    }

    /// Builds a set from tracks already sampled at `dt`. Tracks are sorted by id.
    pub fn from_tracks(mut tracks: Vec<Track>, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("time step must be positive, got {dt}")));
        }
        tracks.retain(|t| !t.points.is_empty());
        tracks.sort_by_key(|t| t.particle_id);
        if let Some(w) = tracks.windows(2).find(|w| w[0].particle_id == w[1].particle_id) {
            return Err(Error::DuplicateId(alloc::format!("particle {}", w[0].particle_id)));
        }
        Ok(TrajectorySet {
            tracks,
            dt,
            label: None,
        })
    }

    pub fn empty(dt: f64) -> Self {
        TrajectorySet {
            tracks: Vec::new(),
            dt,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of particles.
    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn sample_count(&self) -> usize {
        self.tracks.iter().map(|t| t.points.len()).sum()
    }

    pub fn t_begin(&self) -> Option<f64> {
        self.tracks.iter().filter_map(|t| t.points.first()).map(|p| p.t).reduce(f64::min)
    }

    pub fn t_end(&self) -> Option<f64> {
        self.tracks.iter().filter_map(|t| t.points.last()).map(|p| p.t).reduce(f64::max)
    }

    /// `t_end − t_begin`, zero for empty sets.
    pub fn duration(&self) -> f64 {
        match (self.t_begin(), self.t_end()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Rows in particle-then-time order.
    pub fn samples(&self) -> impl Iterator<Item = TrajectorySample> + '_ {
        self.tracks.iter().flat_map(|tr| {
            tr.points.iter().map(move |p| TrajectorySample {
                particle_id: tr.particle_id,
                t: p.t,
                position: p.position,
                velocity: p.velocity,
            })
        })
    }

    /// Central differences inside each track, one-sided at its ends.
    pub fn derive_velocities(mut self) -> Self {
        let dt = self.dt;
        for tr in &mut self.tracks {
            let p: Vec<Vec3> = tr.points.iter().map(|q| q.position).collect();
            let n = p.len();
            for k in 0..n {
                tr.points[k].velocity = if n == 1 {
                    Vec3::ZERO
                } else if k == 0 {
                    (p[1] - p[0]) / dt
                } else if k == n - 1 {
                    (p[n - 1] - p[n - 2]) / dt
                } else {
                    (p[k + 1] - p[k - 1]) / (2.0 * dt)
                };
            }
        }
        self
    }

    /// Linear interpolation onto the grid `t = k·dt_new` inside each track's
    /// time span, then fresh velocities.
    pub fn resample(&self, dt_new: f64) -> Result<Self> {
        if !(dt_new > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("time step must be positive, got {dt_new}")));
        }
        let mut tracks = Vec::with_capacity(self.tracks.len());
        for tr in &self.tracks {
            let (first, last) = (tr.points[0].t, tr.points[tr.points.len() - 1].t);
            let k0 = ceil((first - TIME_EPS) / dt_new) as i64;
            let k1 = floor((last + TIME_EPS) / dt_new) as i64;
            let mut seg = 0;
            let mut points = Vec::new();
            for k in k0..=k1 {
                let t = k as f64 * dt_new;
                while seg + 1 < tr.points.len() && tr.points[seg + 1].t < t - TIME_EPS {
                    seg += 1;
                }
                let a = tr.points[seg];
                let position = match tr.points.get(seg + 1) {
                    Some(b) if b.t > a.t => {
                        let s = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
                        if s == 0.0 {
                            a.position
                        } else if s == 1.0 {
                            b.position
                        } else {
                            a.position.lerp(b.position, s)
                        }
                    }
                    _ => a.position,
                };
                points.push(TrackPoint {
                    t,
                    position,
                    velocity: Vec3::ZERO,
                });
            }
            if !points.is_empty() {
                tracks.push(Track {
                    particle_id: tr.particle_id,
                    points,
                });
            }
        }
        Ok(TrajectorySet {
            tracks,
            dt: dt_new,
            label: self.label.clone(),
        }
        .derive_velocities())
    }

    /// Samples with `t0 ≤ t ≤ t1`; tracks left empty are dropped.
    pub fn clip_to_window(&self, t0: f64, t1: f64) -> Self {
        let tracks = self
            .tracks
            .iter()
            .filter_map(|tr| {
                let points: Vec<TrackPoint> = tr
                    .points
                    .iter()
                    .filter(|p| p.t >= t0 - TIME_EPS && p.t <= t1 + TIME_EPS)
                    .copied()
                    .collect();
                (!points.is_empty()).then_some(Track {
                    particle_id: tr.particle_id,
                    points,
                })
            })
            .collect();
        TrajectorySet {
            tracks,
            dt: self.dt,
            label: self.label.clone(),
        }
    }

    /// Applies `pos` to every position and `vel` to every velocity.
    pub fn map(&self, pos: impl Fn(Vec3) -> Vec3, vel: impl Fn(Vec3) -> Vec3) -> Self {
        let mut out = self.clone();
        for tr in &mut out.tracks {
            for p in &mut tr.points {
                p.position = pos(p.position);
                p.velocity = vel(p.velocity);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn row(id: u64, t: f64, x: f64) -> TrajectorySample {
        TrajectorySample {
            particle_id: id,
            t,
            position: Vec3::new(x, 0.0, 0.0),
            velocity: Vec3::ZERO,
        }
    }

    #[test]
    fn infers_step_from_unsorted_rows() {
        let rows = vec![
            row(2, 0.05, 0.0),
            row(1, 0.0, 0.0),
            row(1, 0.025, 0.0),
            row(2, 0.0, 0.0),
            row(1, 0.05, 0.0),
            row(2, 0.025, 0.0),
        ];
        let s = TrajectorySet::from_samples(rows, false).unwrap();
        assert_eq!(s.dt(), 0.025);
        assert_eq!(s.len(), 2);
        assert_eq!(s.tracks()[0].particle_id, 1);
        assert!(s.tracks()[1].points.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn given_velocities_pass_through() {
        let mut r = row(1, 0.0, 0.0);
        r.velocity = Vec3::new(7.0, 8.0, 9.0);
        let mut r2 = row(1, 0.025, 1.0);
        r2.velocity = Vec3::new(1.0, 2.0, 3.0);
        let s = TrajectorySet::from_samples(vec![r, r2], true).unwrap();
        assert_eq!(s.tracks()[0].points[0].velocity, Vec3::new(7.0, 8.0, 9.0));
    }

    #[test]
    fn single_sample_has_zero_velocity() {
        let s = TrajectorySet::from_samples(vec![row(4, 0.3, 1.0)], false).unwrap();
        assert_eq!(s.tracks()[0].points[0].velocity, Vec3::ZERO);
        assert_eq!(s.dt(), DEFAULT_DT);
    }

    #[test]
    fn rejects_bad_steps_and_nan() {
        let rows = vec![row(1, 0.0, 0.0), row(1, 0.025, 0.0), row(1, 0.05, 0.0), row(1, 0.08, 0.0)];
        match TrajectorySet::from_samples(rows, false) {
            Err(Error::InconsistentTimeStep { particle: 1, t, .. }) => assert_eq!(t, 0.08),
            other => panic!("{other:?}"),
        }
        let rows = vec![row(1, 0.0, f64::NAN)];
        assert!(matches!(
            TrajectorySet::from_samples(rows, false),
            Err(Error::NonFiniteSample { particle: 1, .. })
        ));
    }

    fn linear(n: usize, dt: f64, v: Vec3) -> TrajectorySet {
        let pts = (0..n)
            .map(|k| TrackPoint {
                t: k as f64 * dt,
                position: v * (k as f64 * dt),
                velocity: Vec3::ZERO,
            })
            .collect();
        TrajectorySet::from_tracks(vec![Track { particle_id: 0, points: pts }], dt).unwrap()
    }

    #[test]
    fn velocities_of_uniform_and_static_motion() {
        let s = linear(20, 0.025, Vec3::X).derive_velocities();
        for p in &s.tracks()[0].points {
            assert!((p.velocity - Vec3::X).norm() < 1e-12);
        }
        let s = linear(5, 0.025, Vec3::ZERO).derive_velocities();
        assert!(s.samples().all(|r| r.velocity == Vec3::ZERO));
    }

    #[test]
    fn central_difference_error_bound() {
        let dt = 0.025;
        let pts = (0..200)
            .map(|k| {
                let t = k as f64 * dt;
                TrackPoint {
                    t,
                    position: Vec3::new(crate::math::sin(t), 0.0, 0.0),
                    velocity: Vec3::ZERO,
                }
            })
            .collect();
        let s = TrajectorySet::from_tracks(vec![Track { particle_id: 0, points: pts }], dt)
            .unwrap()
            .derive_velocities();
        let pts = &s.tracks()[0].points;
        for p in &pts[1..pts.len() - 1] {
            assert!((p.velocity.x - crate::math::cos(p.t)).abs() <= dt * dt / 6.0 + 1e-15);
        }
    }

    #[test]
    fn resample_midpoint_and_identity() {
        let pts = vec![
            TrackPoint { t: 0.0, position: Vec3::ZERO, velocity: Vec3::ZERO },
            TrackPoint { t: 0.05, position: Vec3::X, velocity: Vec3::ZERO },
        ];
        let s = TrajectorySet::from_tracks(vec![Track { particle_id: 0, points: pts }], 0.05).unwrap();
        let r = s.resample(0.025).unwrap();
        let p = &r.tracks()[0].points;
        assert_eq!(p.len(), 3);
        assert!((p[1].t - 0.025).abs() < 1e-15);
        assert!((p[1].position - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);

        let s = linear(30, 0.025, Vec3::new(1.0, -2.0, 0.5));
        let r = s.resample(0.025).unwrap();
        for (a, b) in s.samples().zip(r.samples()) {
            assert!((a.position - b.position).norm() <= 1e-12);
            assert!((a.t - b.t).abs() <= 1e-12);
        }
    }

    #[test]
    fn resample_round_trip_on_straight_lines() {
        let s = linear(41, 0.025, Vec3::new(0.3, 0.1, -1.0));
        let back = s.resample(0.00625).unwrap().resample(0.025).unwrap();
        assert_eq!(back.sample_count(), s.sample_count());
        for (a, b) in s.samples().zip(back.samples()) {
            assert!((a.position - b.position).norm() <= 1e-12);
        }
    }

    #[test]
    fn refined_cubic_path_stays_within_chord_deviation() {
        let dt = 0.1;
        let f = |t: f64| Vec3::new(t, t * t * t, 0.0);
        let pts = (0..=20)
            .map(|k| {
                let t = k as f64 * dt;
                TrackPoint { t, position: f(t), velocity: Vec3::ZERO }
            })
            .collect();
        let s = TrajectorySet::from_tracks(vec![Track { particle_id: 0, points: pts }], dt).unwrap();
        let r = s.resample(dt / 4.0).unwrap();
        // chord deviation of a segment is bounded by dt²/8 · max|x''| = dt²/8 · 6·t_max
        let bound = dt * dt / 8.0 * 6.0 * 2.0;
        let err = r.samples().map(|q| (q.position - f(q.t)).norm()).fold(0.0, f64::max);
        assert!(err <= bound, "{err} > {bound}");
        assert!(err > 0.0);
    }

    #[test]
    fn windows() {
        let s = linear(321, 0.025, Vec3::X); // 8 s
        let w = s.clip_to_window(0.0, s.duration() / 8.0);
        assert!(w.samples().all(|r| r.t <= 1.0 + 1e-9));
        assert_eq!(w.sample_count(), 41);
        assert_eq!(s.clip_to_window(0.0, 100.0), s);
        assert!(s.clip_to_window(8.5, 9.5).is_empty());
    }
}
