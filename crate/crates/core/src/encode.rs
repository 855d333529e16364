//! The encoding pipeline: mesh → sensors → vector fields → descriptor.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::descriptor::{
    aggregate_histograms, local_histogram, DescriptorMeta, InteractionDescriptor, LocalHistogram, Scales,
    DEFAULT_BINS, ENCODER_VERSION, MIN_BINS,
};
use crate::error::{Error, Result};
use crate::flowfield::{
    compute_attributes, probe_surface, AttributeGrids, AttributeKind, CellSurface, NormMode, VectorField,
    DEFAULT_RESOLUTION,
};
use crate::geometry::{poisson_disk_sample, Mesh, PoissonParams, SurfaceSampleSet, TriangleBvh};
use crate::math::{Axis, Vec3};
use crate::par;
use crate::sensor::{build_sensor_tree, build_space, DomainSize, InteractionSpace, SensorTree, DEFAULT_MAX_DEPTH};
use crate::trajectory::TrajectorySet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncoderConfig {
    pub domain: DomainSize,
    pub up_axis: Axis,
    /// Poisson-disk spacing as a fraction of the mesh's largest extent.
    pub sample_spacing: f64,
    pub max_depth: u32,
    pub resolution: usize,
    pub norm_mode: NormMode,
    pub bins: usize,
    pub scales: Scales,
    pub seed: u64,
    pub poisson: PoissonParams,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            domain: DomainSize::Auto,
            up_axis: Axis::Z,
            sample_spacing: 0.1,
            max_depth: DEFAULT_MAX_DEPTH,
            resolution: DEFAULT_RESOLUTION,
            norm_mode: NormMode::Direction,
            bins: DEFAULT_BINS,
            scales: Scales::default(),
            seed: 0,
            poisson: PoissonParams::default(),
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_spacing > 0.0) {
            return Err(Error::InvalidParameter("sample spacing must be positive".into()));
        }
        if !(MIN_BINS..=1024).contains(&self.bins) {
            return Err(Error::InvalidParameter(alloc::format!("bins must be in {MIN_BINS}..=1024")));
        }
        if !crate::flowfield::SUPPORTED_RESOLUTIONS.contains(&self.resolution) {
            return Err(Error::InvalidParameter(alloc::format!(
                "resolution must be 4, 8 or 16, got {}",
                self.resolution
            )));
        }
        if !(1..=12).contains(&self.max_depth) {
            return Err(Error::InvalidDepth(self.max_depth));
        }
        self.scales.validate()
    }
}

/// Everything kept about one active sensor by [`Encoder::encode_detailed`].
#[derive(Clone, Debug)]
pub struct SensorEncoding {
    pub field: VectorField,
    pub surface: Vec<Option<CellSurface>>,
    pub attributes: AttributeGrids,
    pub histograms: Vec<LocalHistogram>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncodeStats {
    pub samples: usize,
    /// Samples outside the interaction space, which are ignored.
    pub samples_outside: usize,
    pub sensors: usize,
    pub active_sensors: usize,
}

#[derive(Clone, Debug)]
pub struct SceneEncoding {
    pub descriptor: InteractionDescriptor,
    pub stats: EncodeStats,
    /// Active sensors in ascending id order.
    pub sensors: Vec<SensorEncoding>,
}

/// Closest-point probes per sensor, reusable across windows of one trajectory set.
#[derive(Clone, Debug, Default)]
pub struct ProbeCache {
    probes: BTreeMap<usize, Vec<Option<CellSurface>>>,
}

impl ProbeCache {
    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }
}

/// Observed mesh with its sensors, ready to encode any number of trajectory sets.
#[derive(Clone, Debug)]
pub struct Encoder {
    mesh: Mesh,
    bvh: TriangleBvh,
    space: InteractionSpace,
    samples: SurfaceSampleSet,
    tree: SensorTree,
    config: EncoderConfig,
}

/// Samples of one sensor: `(sensor id, [(position, velocity)])`.
type SensorSamples = (usize, Vec<(Vec3, Vec3)>);

struct SensorResult {
    histograms: Vec<LocalHistogram>,
    detail: Option<SensorEncoding>,
}

impl Encoder {
    pub fn new(mesh: Mesh, config: EncoderConfig) -> Result<Self> {
        config.validate()?;
        let space = build_space(mesh.bounds(), config.domain, config.up_axis)?;
        let spacing = config.sample_spacing * mesh.bounds().max_extent().max(f64::MIN_POSITIVE);
        let samples = poisson_disk_sample(&mesh, spacing, config.seed, config.poisson);
        let tree = build_sensor_tree(&space, &samples, config.max_depth)?;
        let bvh = TriangleBvh::new(&mesh);
        log::debug!(
            "encoder: {} surface samples, {} sensors, domain edge {}",
            samples.len(),
            tree.len(),
            space.edge
        );
        Ok(Encoder {
            mesh,
            bvh,
            space,
            samples,
            tree,
            config,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn bvh(&self) -> &TriangleBvh {
        &self.bvh
    }

    pub fn space(&self) -> &InteractionSpace {
        &self.space
    }

    pub fn surface_samples(&self) -> &SurfaceSampleSet {
        &self.samples
    }

    pub fn tree(&self) -> &SensorTree {
        &self.tree
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn encode(&self, ts: &TrajectorySet) -> Result<InteractionDescriptor> {
        Ok(self.run(ts, None, false)?.0)
    }

    pub fn encode_with_stats(&self, ts: &TrajectorySet) -> Result<(InteractionDescriptor, EncodeStats)> {
        let (d, stats, _) = self.run(ts, None, false)?;
        Ok((d, stats))
    }

    /// Like [`Encoder::encode`] but keeps fields, attribute grids and local
    /// histograms of every active sensor.
    pub fn encode_detailed(&self, ts: &TrajectorySet) -> Result<SceneEncoding> {
        let (descriptor, stats, sensors) = self.run(ts, None, true)?;
        Ok(SceneEncoding {
            descriptor,
            stats,
            sensors,
        })
    }

    /// Probes every cell `ts` occupies; any time window of `ts` can then be
    /// encoded without further closest-point queries.
    pub fn probe_cache(&self, ts: &TrajectorySet) -> Result<ProbeCache> {
        let groups = self.group(ts).0;
        let probes = par::map(&groups, |(id, samples)| {
            let field = self.field(*id, samples)?;
            Ok((*id, probe_surface(&field, &self.mesh, &self.bvh)))
        });
        Ok(ProbeCache {
            probes: probes.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn encode_cached(&self, ts: &TrajectorySet, cache: &ProbeCache) -> Result<InteractionDescriptor> {
        Ok(self.run(ts, Some(cache), false)?.0)
    }

    /// Samples grouped by sensor, ascending sensor id, each group in set order.
    fn group(&self, ts: &TrajectorySet) -> (Vec<SensorSamples>, EncodeStats) {
        let mut owner: Vec<u32> = Vec::with_capacity(ts.sample_count());
        let mut counts = alloc::vec![0usize; self.tree.len()];
        let mut stats = EncodeStats {
            sensors: self.tree.len(),
            ..EncodeStats::default()
        };
        for tr in ts.tracks() {
            for p in &tr.points {
                stats.samples += 1;
                match self.tree.locate(p.position) {
                    Some(id) => {
                        counts[id] += 1;
                        owner.push(id as u32);
                    }
                    None => {
                        stats.samples_outside += 1;
                        owner.push(u32::MAX);
                    }
                }
            }
        }
        let mut groups: Vec<(usize, Vec<(Vec3, Vec3)>)> = Vec::new();
        let mut slot = alloc::vec![usize::MAX; self.tree.len()];
        for (id, &c) in counts.iter().enumerate() {
            if c > 0 {
                slot[id] = groups.len();
                groups.push((id, Vec::with_capacity(c)));
            }
        }
        let mut k = 0;
        for tr in ts.tracks() {
            for p in &tr.points {
                let o = owner[k];
                k += 1;
                if o != u32::MAX {
                    groups[slot[o as usize]].1.push((p.position, p.velocity));
                }
            }
        }
        stats.active_sensors = groups.len();
        if stats.samples_outside > 0 {
            log::info!("{} trajectory samples lie outside the interaction space", stats.samples_outside);
        }
        (groups, stats)
    }

    fn field(&self, id: usize, samples: &[(Vec3, Vec3)]) -> Result<VectorField> {
        VectorField::bin_samples(
            self.tree.sensor(id),
            samples.iter().copied(),
            self.config.resolution,
            self.config.norm_mode,
        )
    }

    fn run(
        &self,
        ts: &TrajectorySet,
        cache: Option<&ProbeCache>,
        keep: bool,
    ) -> Result<(InteractionDescriptor, EncodeStats, Vec<SensorEncoding>)> {
        let (groups, stats) = self.group(ts);
        let cfg = &self.config;
        let results = par::map(&groups, |(id, samples)| -> Result<SensorResult> {
            let field = self.field(*id, samples)?;
            let surface = match cache.and_then(|c| c.probes.get(id)) {
                Some(p) if field.occupied_cells().all(|c| p[c].is_some()) => p.clone(),
                _ => probe_surface(&field, &self.mesh, &self.bvh),
            };
            let attributes = compute_attributes(&field, &surface);
            let histograms: Vec<LocalHistogram> = AttributeKind::ALL
                .iter()
                .map(|&a| local_histogram(a, attributes.get(a), &field, &surface, cfg.bins, cfg.scales.get(a)))
                .collect();
            Ok(if keep {
                SensorResult {
                    histograms: histograms.clone(),
                    detail: Some(SensorEncoding {
                        field,
                        surface,
                        attributes,
                        histograms,
                    }),
                }
            } else {
                SensorResult { histograms, detail: None }
            })
        });
        let results: Vec<SensorResult> = results.into_iter().collect::<Result<_>>()?;
        let histograms = AttributeKind::ALL
            .iter()
            .map(|a| aggregate_histograms(results.iter().map(|r| &r.histograms[a.index()]), cfg.bins))
            .collect::<Result<Vec<_>>>()?;
        let histograms: [Vec<f64>; 6] = histograms.try_into().expect("six attributes");
        let descriptor = InteractionDescriptor {
            meta: DescriptorMeta {
                version: ENCODER_VERSION,
                bins: cfg.bins,
                resolution: cfg.resolution,
                norm_mode: cfg.norm_mode,
                scales: cfg.scales,
                active_sensors: stats.active_sensors,
                label: ts.label().map(Into::into),
            },
            histograms,
        };
        let details = results.into_iter().filter_map(|r| r.detail).collect();
        Ok((descriptor, stats, details))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{distance, AttributeWeights};
    use crate::geometry::shapes;
    use crate::math::Aabb;
    use crate::trajectory::{synthesize, Preset, SynthParams};

    fn scene() -> (Encoder, TrajectorySet) {
        let mesh = shapes::cube(Vec3::splat(-0.5), 1.0);
        let cfg = EncoderConfig {
            domain: DomainSize::Fixed(3.0),
            max_depth: 6,
            ..EncoderConfig::default()
        };
        let enc = Encoder::new(mesh, cfg).unwrap();
        let p = SynthParams {
            count: 300,
            speed: 1.0,
            axis: Vec3::Z,
            emitter: Aabb::new(Vec3::new(-1.2, -1.2, -0.6), Vec3::new(1.2, 1.2, 0.6)),
            ..SynthParams::default()
        };
        (enc, synthesize(Preset::Swirl, &p, 3, None).unwrap())
    }

    #[test]
    fn encodes_unit_histograms() {
        let (enc, ts) = scene();
        let (d, stats) = enc.encode_with_stats(&ts).unwrap();
        assert!(stats.active_sensors > 0);
        assert!(d.validate().is_ok());
        assert_eq!(d.meta.active_sensors, stats.active_sensors);
        for a in AttributeKind::ALL {
            assert!((d.histogram(a).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn detailed_and_cached_agree_with_plain() {
        let (enc, ts) = scene();
        let plain = enc.encode(&ts).unwrap();
        let det = enc.encode_detailed(&ts).unwrap();
        assert_eq!(plain, det.descriptor);
        assert_eq!(det.sensors.len(), det.stats.active_sensors);
        assert!(det.sensors.windows(2).all(|w| w[0].field.sensor_id < w[1].field.sensor_id));
        let cache = enc.probe_cache(&ts).unwrap();
        assert_eq!(enc.encode_cached(&ts, &cache).unwrap(), plain);
        let part = ts.clip_to_window(0.0, 0.3);
        assert_eq!(enc.encode_cached(&part, &cache).unwrap(), enc.encode(&part).unwrap());
    }

    #[test]
    fn nothing_inside_is_no_interaction() {
        let (enc, ts) = scene();
        let far = ts.map(|p| p + Vec3::splat(100.0), |v| v);
        assert_eq!(enc.encode(&far), Err(Error::NoInteraction));
        assert_eq!(enc.encode(&ts.clip_to_window(50.0, 60.0)), Err(Error::NoInteraction));
    }

    #[test]
    fn track_order_does_not_matter() {
        let (enc, ts) = scene();
        // relabel particles in reverse so the set iterates in the opposite order
        let mut tracks = ts.tracks().to_vec();
        let n = tracks.len() as u64;
        for t in &mut tracks {
            t.particle_id = n - 1 - t.particle_id;
        }
        let rev = TrajectorySet::from_tracks(tracks, ts.dt()).unwrap();
        let (a, b) = (enc.encode(&ts).unwrap(), enc.encode(&rev).unwrap());
        // per-cell sums change order, so allow rounding
        assert!(distance(&a, &b, &AttributeWeights::default()).unwrap() < 1e-6);
    }

    #[test]
    fn rejects_bad_config() {
        let m = shapes::cube(Vec3::ZERO, 1.0);
        let bad = EncoderConfig { resolution: 5, ..EncoderConfig::default() };
        assert!(Encoder::new(m.clone(), bad).is_err());
        let bad = EncoderConfig { domain: DomainSize::Fixed(0.5), ..EncoderConfig::default() };
        assert!(matches!(Encoder::new(m, bad), Err(Error::DomainTooSmall { .. })));
    }
}
