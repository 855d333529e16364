use alloc::vec::Vec;

use crate::descriptor::AttributeWeights;
use crate::encode::{Encoder, SceneEncoding};
use crate::error::{Error, Result};
use crate::flowfield::AttributeKind;
use crate::geometry::Mesh;
use crate::math::{ceil, clamp01, floor, Vec3};
use crate::par;

#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyMap {
    /// One value in `[0, 1]` per mesh vertex.
    pub values: Vec<f64>,
    pub radius: f64,
    pub weights: AttributeWeights,
}

/// Per-vertex weighted sum of scaled attribute values, averaged over cells
/// whose centers lie within `radius` of the center of the vertex's cell, then
/// min-max normalized over the mesh. Cells without motion count with the
/// values of an empty cell. Vertices outside the interaction space get 0.
pub fn saliency(encoder: &Encoder, scene: &SceneEncoding, weights: &AttributeWeights, radius: f64) -> Result<SaliencyMap> {
    weights.validate()?;
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter("saliency radius must be non-negative".into()));
    }
    let tree = encoder.tree();
    let n = scene.descriptor.meta.resolution;
    let scales = scene.descriptor.meta.scales;
    let mut active = alloc::vec![usize::MAX; tree.len()];
    for (slot, s) in scene.sensors.iter().enumerate() {
        active[s.field.sensor_id] = slot;
    }
    let empty: f64 = AttributeKind::ALL
        .iter()
        .map(|&a| {
            let v = if a == AttributeKind::O { 0.5 } else { 0.0 };
            weights.get(a) * clamp01(v / scales.get(a))
        })
        .sum();
    let cell_value = |sensor: usize, c: usize| -> f64 {
        match scene.sensors.get(active[sensor]) {
            Some(enc) => AttributeKind::ALL
                .iter()
                .map(|&a| weights.get(a) * clamp01(enc.attributes.get(a)[c] / scales.get(a)))
                .sum(),
            None => empty,
        }
    };
    let cell_geometry = |sensor: usize| {
        let s = tree.sensor(sensor);
        (s.min, s.size / n as f64)
    };

    let raw = par::map(encoder.mesh().vertices(), |&v| -> Option<f64> {
        let s0 = tree.locate(v)?;
        let (min0, h0) = cell_geometry(s0);
        let cell = |x: f64| floor(x / h0).clamp(0.0, (n - 1) as f64);
        let d = v - min0;
        let (i0, j0, k0) = (cell(d.x), cell(d.y), cell(d.z));
        if radius == 0.0 {
            return Some(cell_value(s0, i0 as usize + n * (j0 as usize + n * k0 as usize)));
        }
        let center = min0 + Vec3::new((i0 + 0.5) * h0, (j0 + 0.5) * h0, (k0 + 0.5) * h0);
        let r2 = radius * radius;
        let (mut sum, mut count) = (0.0, 0usize);
        for s in tree.sensors_within(center, radius) {
            let (min, h) = cell_geometry(s);
            let range = |axis: usize| {
                let lo = ceil((center[axis] - radius - min[axis]) / h - 0.5).max(0.0) as usize;
                let hi = floor((center[axis] + radius - min[axis]) / h - 0.5).min((n - 1) as f64);
                (lo, hi)
            };
            let (rx, ry, rz) = (range(0), range(1), range(2));
            if rx.1 < 0.0 || ry.1 < 0.0 || rz.1 < 0.0 {
                continue;
            }
            for k in rz.0..=rz.1 as usize {
                for j in ry.0..=ry.1 as usize {
                    for i in rx.0..=rx.1 as usize {
                        let c = min + Vec3::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h);
                        if c.distance_squared(center) <= r2 {
                            sum += cell_value(s, i + n * (j + n * k));
                            count += 1;
                        }
                    }
                }
            }
        }
        Some(if count == 0 { cell_value(s0, 0) } else { sum / count as f64 })
    });

    let outside = raw.iter().filter(|r| r.is_none()).count();
    if outside > 0 {
        log::warn!("{outside} vertices lie outside the interaction space; their saliency is 0");
    }
    let (lo, hi) = raw
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    let values = raw
        .iter()
        .map(|r| match r {
            Some(v) if range > 1e-12 * hi.abs().max(1e-300) => clamp01((v - lo) / range),
            _ => 0.0,
        })
        .collect();
    Ok(SaliencyMap {
        values,
        radius,
        weights: *weights,
    })
}

/// A grid cell occupied by vertices of both shapes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellMatch {
    pub cell: [usize; 3],
    /// Mean vertex saliency of each shape in this cell.
    pub saliency: [f64; 2],
    pub score: f64,
}

fn cell_means(mesh: &Mesh, map: &SaliencyMap, res: usize) -> Result<Vec<Option<f64>>> {
    if map.values.len() != mesh.vertex_count() {
        return Err(Error::InvalidParameter(alloc::format!(
            "saliency map has {} values for {} vertices",
            map.values.len(),
            mesh.vertex_count()
        )));
    }
    let b = mesh.bounds();
    let ext = b.max_extent().max(f64::MIN_POSITIVE);
    let mut sum = alloc::vec![0.0; res * res * res];
    let mut count = alloc::vec![0usize; res * res * res];
    for (v, s) in mesh.vertices().iter().zip(&map.values) {
        let p = (*v - b.min) * (1.0 / ext);
        let c = |x: f64| (floor(x * res as f64).max(0.0) as usize).min(res - 1);
        let idx = c(p.x) + res * (c(p.y) + res * c(p.z));
        sum[idx] += s;
        count[idx] += 1;
    }
    Ok(sum.iter().zip(&count).map(|(s, &c)| (c > 0).then(|| s / c as f64)).collect())
}

/// Matches same-index cells of a `grid_res³` grid over each mesh scaled into
/// the unit cube, ranked by saliency difference. Cells where either mean is
/// below `min_saliency` are skipped.
pub fn correspondence(
    mesh1: &Mesh,
    map1: &SaliencyMap,
    mesh2: &Mesh,
    map2: &SaliencyMap,
    grid_res: usize,
    min_saliency: f64,
) -> Result<Vec<CellMatch>> {
    if !(2..=256).contains(&grid_res) {
        return Err(Error::InvalidParameter("correspondence grid resolution must be in 2..=256".into()));
    }
    let a = cell_means(mesh1, map1, grid_res)?;
    let b = cell_means(mesh2, map2, grid_res)?;
    let mut out: Vec<(usize, CellMatch)> = a
        .iter()
        .zip(&b)
        .enumerate()
        .filter_map(|(idx, (x, y))| {
            let (x, y) = ((*x)?, (*y)?);
            if x < min_saliency || y < min_saliency {
                return None;
            }
            let cell = [idx % grid_res, (idx / grid_res) % grid_res, idx / (grid_res * grid_res)];
            Some((idx, CellMatch { cell, saliency: [x, y], score: 1.0 - (x - y).abs() }))
        })
        .collect();
    out.sort_by(|(i, a), (j, b)| b.score.total_cmp(&a.score).then(i.cmp(j)));
    Ok(out.into_iter().map(|(_, m)| m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::EncoderConfig;
    use crate::geometry::shapes;
    use crate::sensor::DomainSize;
    use crate::trajectory::{synthesize, Preset, SynthParams};

    fn plane_scene() -> (Encoder, SceneEncoding) {
        let mesh = shapes::plane(2.0, 8);
        let cfg = EncoderConfig {
            domain: DomainSize::Fixed(4.0),
            ..EncoderConfig::default()
        };
        let enc = Encoder::new(mesh, cfg).unwrap();
        let params = SynthParams {
            count: 300,
            speed: 1.0,
            ..SynthParams::default()
        };
        let ts = synthesize(Preset::Swirl, &params, 3, None).unwrap();
        let scene = enc.encode_detailed(&ts).unwrap();
        (enc, scene)
    }

    #[test]
    fn values_are_normalized_and_weight_scale_invariant() {
        let (enc, scene) = plane_scene();
        let w = AttributeWeights::default();
        let a = saliency(&enc, &scene, &w, 0.2).unwrap();
        assert_eq!(a.values.len(), enc.mesh().vertex_count());
        assert!(a.values.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(a.values.contains(&1.0));
        let scaled = AttributeWeights(w.0.map(|x| x * 3.5));
        let b = saliency(&enc, &scene, &scaled, 0.2).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_map_is_zero() {
        let (enc, mut scene) = plane_scene();
        scene.sensors.clear();
        let s = saliency(&enc, &scene, &AttributeWeights::default(), 0.3).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn self_correspondence_scores_one() {
        let mesh = shapes::icosphere(Vec3::ZERO, 1.0, 2);
        let values = mesh.vertices().iter().map(|v| clamp01(v.z * 0.5 + 0.5)).collect();
        let map = SaliencyMap { values, radius: 0.0, weights: AttributeWeights::default() };
        let m = correspondence(&mesh, &map, &mesh, &map, 4, 0.0).unwrap();
        assert!(!m.is_empty());
        assert!(m.iter().all(|c| c.score == 1.0));
        assert!(correspondence(&mesh, &map, &mesh, &map, 1, 0.0).is_err());
    }

    #[test]
    fn disjoint_shapes_have_no_matches() {
        let tiny = |c: Vec3| [c, c + Vec3::new(0.01, 0.0, 0.0), c + Vec3::new(0.0, 0.01, 0.0)];
        let two = |a: Vec3, b: Vec3| {
            let mut v = tiny(a).to_vec();
            v.extend(tiny(b));
            Mesh::new(v, alloc::vec![[0, 1, 2], [3, 4, 5]]).unwrap()
        };
        let m1 = two(Vec3::ZERO, Vec3::splat(1.0));
        let m2 = two(Vec3::X, Vec3::new(0.0, 1.0, 1.0));
        let map = SaliencyMap { values: alloc::vec![0.5; 6], radius: 0.0, weights: AttributeWeights::default() };
        assert!(correspondence(&m1, &map, &m2, &map, 4, 0.0).unwrap().is_empty());
        assert_eq!(correspondence(&m1, &map, &m1, &map, 4, 0.0).unwrap().len(), 2);
    }
}
