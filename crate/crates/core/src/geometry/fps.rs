//! Saliency-aware farthest point sampling of a motion-driver surface.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{estimate_lfs, LfsField, LfsParams, Mesh};
use crate::math::Vec3;

/// Drivers coarser than this are refined by midpoint subdivision before sampling.
const MIN_CANDIDATES: usize = 200;

/// Where a driver particle sits on the driver mesh at its reference pose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Anchor {
    Vertex(usize),
    Barycentric { triangle: usize, weights: [f64; 3] },
}

impl Anchor {
    /// Position of this anchor on `mesh` (which may be an animated copy of the
    /// reference mesh with identical topology).
    pub fn resolve(&self, mesh: &Mesh) -> Vec3 {
        match *self {
            Anchor::Vertex(i) => mesh.vertices()[i],
            Anchor::Barycentric { triangle, weights } => {
                let [a, b, c] = mesh.triangle(triangle);
                a * weights[0] + b * weights[1] + c * weights[2]
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriverParticleSet {
    pub points: Vec<Vec3>,
    pub anchors: Vec<Anchor>,
    /// A triangle of the driver mesh containing each particle.
    pub triangles: Vec<usize>,
}

impl DriverParticleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Asymmetric bilateral distance from candidate `s` to existing sample `p`:
/// the Euclidean distance scaled by the density `1/lfs(p)²` at `p`.
#[inline]
pub fn bilateral_distance(s: Vec3, p: Vec3, lfs_p: f64) -> f64 {
    s.distance(p) / (lfs_p * lfs_p)
}

/// Greedy max-min sampling over the vertices of `mesh` under the bilateral
/// distance, starting from `first`. Returns vertex indices in pick order.
///
/// Ties in the max-min score go to the lexicographically smallest position,
/// so the result does not depend on vertex order.
pub fn bilateral_fps_from(mesh: &Mesh, lfs: &LfsField, count: usize, first: usize) -> Vec<usize> {
    greedy_fps(mesh.vertices(), |p| lfs.density(p), count, first)
}

/// Plain Euclidean farthest point sampling, for comparison.
pub fn euclidean_fps_from(mesh: &Mesh, count: usize, first: usize) -> Vec<usize> {
    greedy_fps(mesh.vertices(), |_| 1.0, count, first)
}

fn greedy_fps(verts: &[Vec3], density: impl Fn(usize) -> f64, count: usize, first: usize) -> Vec<usize> {
    let n = verts.len();
    let count = count.min(n);
    if count == 0 {
        return Vec::new();
    }
    let mut picked = Vec::with_capacity(count);
    let mut chosen = alloc::vec![false; n];
    let mut score = alloc::vec![f64::INFINITY; n];
    let mut last = first;
    picked.push(first);
    chosen[first] = true;
    while picked.len() < count {
        let (p, rho) = (verts[last], density(last));
        let mut best: Option<usize> = None;
        for s in 0..n {
            let d = verts[s].distance(p) * rho;
            if d < score[s] {
                score[s] = d;
            }
            if chosen[s] {
                continue;
            }
            best = match best {
                None => Some(s),
                Some(b) if score[s] > score[b]
                    || (score[s] == score[b] && verts[s].lex_cmp(verts[b]).is_lt()) =>
                {
                    Some(s)
                }
                keep => keep,
            };
        }
        let s = best.expect("unchosen vertex remains");
        chosen[s] = true;
        picked.push(s);
        last = s;
    }
    picked
}

/// Distributes `count` motion particles over a driver mesh, denser where the
/// local feature size is small. The first particle is drawn at random from `seed`.
pub fn bilateral_fps(driver: &Mesh, count: usize, seed: u64, params: LfsParams) -> DriverParticleSet {
    assert!(count >= 1, "count must be at least 1");
    let (mesh, anchors) = refine_for_sampling(driver);
    if count > mesh.vertex_count() {
        log::warn!(
            "requested {count} driver particles but only {} candidate vertices exist; using all",
            mesh.vertex_count()
        );
    }
    let lfs = estimate_lfs(&mesh, params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..mesh.vertex_count());
    let picks = bilateral_fps_from(&mesh, &lfs, count, first);
    let incident = driver.incident_triangle();
    DriverParticleSet {
        points: picks.iter().map(|&i| mesh.vertices()[i]).collect(),
        anchors: picks.iter().map(|&i| anchors[i]).collect(),
        triangles: picks
            .iter()
            .map(|&i| match anchors[i] {
                Anchor::Vertex(v) => incident[v],
                Anchor::Barycentric { triangle, .. } => triangle,
            })
            .collect(),
    }
}

/// Midpoint-subdivides coarse drivers until the candidate pool is large
/// enough, tracking each vertex's anchor on the original mesh.
fn refine_for_sampling(driver: &Mesh) -> (Mesh, Vec<Anchor>) {
    let mut mesh = driver.clone();
    let mut anchors: Vec<Anchor> = (0..driver.vertex_count()).map(Anchor::Vertex).collect();
    let mut origin: Vec<usize> = (0..driver.triangle_count()).collect();
    while mesh.vertex_count() < MIN_CANDIDATES {
        let (fine, local) = mesh.subdivide_midpoint();
        let mut next = Vec::with_capacity(fine.vertex_count());
        next.extend_from_slice(&anchors);
        for (v, a) in local.iter().enumerate().skip(mesh.vertex_count()) {
            let Anchor::Barycentric { triangle, .. } = *a else {
                unreachable!("new vertices are edge midpoints");
            };
            let t = origin[triangle];
            next.push(Anchor::Barycentric {
                triangle: t,
                weights: barycentric(fine.vertices()[v], driver.triangle(t)),
            });
        }
        origin = origin.iter().flat_map(|&t| [t; 4]).collect();
        anchors = next;
        mesh = fine;
    }
    (mesh, anchors)
}

fn barycentric(p: Vec3, [a, b, c]: [Vec3; 3]) -> [f64; 3] {
    let (e0, e1, d) = (b - a, c - a, p - a);
    let (d00, d01, d11) = (e0.dot(e0), e0.dot(e1), e1.dot(e1));
    let (d20, d21) = (d.dot(e0), d.dot(e1));
    let den = d00 * d11 - d01 * d01;
    if den.abs() < 1e-300 {
        return [1.0, 0.0, 0.0];
    }
    let v = (d11 * d20 - d01 * d21) / den;
    let w = (d00 * d21 - d01 * d20) / den;
    [1.0 - v - w, v, w]
}
