//! Local feature size by the shrinking-ball medial-axis approximation.
//!
//! For every vertex `p` with normal `n`, a ball tangent at `p` with its center
//! on `p ∓ n·r` is shrunk until it contains no other vertex. The final radius
//! approximates the distance from `p` to the inner (or outer) medial axis; the
//! smaller of the two is the local feature size.

use alloc::vec::Vec;

use super::{KdTree, Mesh};
use crate::math::Vec3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LfsParams {
    /// Lower clamp, as a fraction of the bounding-box diagonal.
    pub min_fraction: f64,
    /// Vertices closer than this fraction of the diagonal to the query vertex
    /// are ignored (duplicate vertices in soups, sliver edges).
    pub edge_threshold_fraction: f64,
    /// Radius convergence tolerance, as a fraction of the diagonal.
    pub tolerance_fraction: f64,
    pub max_iterations: usize,
    /// A shrink step is rejected when the new contact point subtends less
    /// than this angle (radians) with the query vertex, as seen from the
    /// new center. Suppresses collapse onto direct neighbours under normal noise.
    pub min_separation_angle: f64,
}

impl Default for LfsParams {
    fn default() -> Self {
        LfsParams {
            min_fraction: 1e-3,
            edge_threshold_fraction: 1e-6,
            tolerance_fraction: 1e-4,
            max_iterations: 64,
            min_separation_angle: 0.3,
        }
    }
}

/// Per-vertex local feature size.
#[derive(Clone, Debug, PartialEq)]
pub struct LfsField {
    pub values: Vec<f64>,
    pub lfs_min: f64,
    /// True when the mesh was flat and a uniform fallback was used.
    pub degenerate: bool,
}

impl LfsField {
    /// Sampling density `1 / lfs²` at vertex `i`.
    #[inline]
    pub fn density(&self, i: usize) -> f64 {
        let l = self.values[i];
        1.0 / (l * l)
    }
}

pub fn estimate_lfs(mesh: &Mesh, params: LfsParams) -> LfsField {
    let diag = mesh.bounds().diagonal();
    let lfs_min = (params.min_fraction * diag).max(f64::MIN_POSITIVE);
    let n = mesh.vertex_count();
    if is_flat(mesh.vertices(), diag) {
        log::info!("mesh is flat or has fewer than 4 non-coplanar vertices; using uniform lfs = {diag}");
        return LfsField {
            values: alloc::vec![diag.max(lfs_min); n],
            lfs_min,
            degenerate: true,
        };
    }

    let tree = KdTree::new(mesh.vertices());
    let threshold2 = params.edge_threshold_fraction * diag * params.edge_threshold_fraction * diag;
    let tol = params.tolerance_fraction * diag;
    let r_init = 0.5 * diag;
    let verts = mesh.vertices();
    let min_cos = crate::math::cos(params.min_separation_angle);

    let values = (0..n)
        .map(|i| {
            let p = verts[i];
            let normal = mesh.vertex_normals()[i];
            let keep = |j: usize| j != i && verts[j].distance_squared(p) > threshold2;
            let inner = shrink_ball(&tree, p, -normal, r_init, tol, min_cos, params.max_iterations, &keep);
            let outer = shrink_ball(&tree, p, normal, r_init, tol, min_cos, params.max_iterations, &keep);
            inner.min(outer).clamp(lfs_min, diag.max(lfs_min))
        })
        .collect();
    LfsField {
        values,
        lfs_min,
        degenerate: false,
    }
}

fn shrink_ball(
    tree: &KdTree,
    p: Vec3,
    dir: Vec3,
    r_init: f64,
    tol: f64,
    min_cos: f64,
    max_iter: usize,
    keep: &impl Fn(usize) -> bool,
) -> f64 {
    let mut r = r_init;
    for _ in 0..max_iter {
        let c = p + dir * r;
        let Some((j, d2)) = tree.nearest_filtered(c, keep) else {
            break;
        };
        if crate::math::sqrt(d2) >= r - tol {
            break;
        }
        // radius of the ball through p and q whose center lies on the ray p + dir·t
        let q = tree.point(j);
        let pq = q - p;
        let denom = 2.0 * dir.dot(pq);
        if denom <= 0.0 {
            break;
        }
        let next = pq.norm_squared() / denom;
        if !(next < r) {
            break;
        }
        let center = p + dir * next;
        let (cp, cq) = (p - center, q - center);
        if cp.dot(cq) > min_cos * next * next {
            break;
        }
        let done = r - next < tol;
        r = next;
        if done {
            break;
        }
    }
    r
}

fn is_flat(v: &[Vec3], diag: f64) -> bool {
    if v.len() < 4 || diag <= 0.0 {
        return true;
    }
    let a = v[0];
    let b = *v
        .iter()
        .max_by(|p, q| p.distance_squared(a).total_cmp(&q.distance_squared(a)))
        .unwrap();
    let ab = b - a;
    let Some(ab_dir) = ab.try_normalize() else {
        return true;
    };
    let c = *v
        .iter()
        .max_by(|p, q| {
            let dp = (**p - a).cross(ab_dir).norm_squared();
            let dq = (**q - a).cross(ab_dir).norm_squared();
            dp.total_cmp(&dq)
        })
        .unwrap();
    let Some(n) = ab.cross(c - a).try_normalize() else {
        return true;
    };
    let eps = 1e-9 * diag;
    v.iter().all(|p| (*p - a).dot(n).abs() <= eps)
}

#[cfg(test)]
mod tests {
    use super::super::shapes;
    use super::*;

    #[test]
    fn sphere_lfs_is_radius() {
        // medial axis of a sphere is its center, so lfs = R everywhere
        let m = shapes::icosphere(Vec3::new(0.2, -0.1, 0.3), 1.0, 3);
        let f = estimate_lfs(&m, LfsParams::default());
        assert!(!f.degenerate);
        for &l in &f.values {
            assert!((l - 1.0).abs() <= 0.1, "lfs {l}");
        }
    }

    #[test]
    fn capsule_body_lfs_is_tube_radius() {
        let r = 0.25;
        let m = shapes::capsule(r, 6.0, 48, 120);
        let f = estimate_lfs(&m, LfsParams::default());
        let mut checked = 0;
        for (v, &l) in m.vertices().iter().zip(&f.values) {
            if v.z.abs() < 2.0 {
                assert!((l - r).abs() <= 0.15 * r, "lfs {l} at {v:?}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn flat_mesh_falls_back_to_diagonal() {
        let m = shapes::plane(2.0, 4);
        let f = estimate_lfs(&m, LfsParams::default());
        assert!(f.degenerate);
        let d = m.bounds().diagonal();
        assert!(f.values.iter().all(|&l| l == d));
    }

    #[test]
    fn lfs_is_bounded_below() {
        let m = shapes::dumbbell(1.0, 0.05, 2.0, 32);
        let f = estimate_lfs(&m, LfsParams::default());
        assert!(f.values.iter().all(|&l| l >= f.lfs_min && l > 0.0));
        assert!((0..m.vertex_count()).all(|i| f.density(i).is_finite()));
    }
}
