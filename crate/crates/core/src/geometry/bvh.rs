//! Bounding volume hierarchy over mesh triangles for exact closest-point queries.

use alloc::vec::Vec;

use super::Mesh;
use crate::math::{Aabb, Vec3};

/// Closest point on triangle `(a, b, c)` to `p`, with its barycentric weights.
pub fn closest_point_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> (Vec3, [f64; 3]) {
    // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5)
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (a, [1.0, 0.0, 0.0]);
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (b, [0.0, 1.0, 0.0]);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, [1.0 - v, v, 0.0]);
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (c, [0.0, 0.0, 1.0]);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, [1.0 - w, 0.0, w]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, [0.0, 1.0 - w, w]);
    }
    let denom = va + vb + vc;
    if denom.abs() < 1e-300 {
        // degenerate (zero-area) triangle: fall back to its closest edge
        let cands = [
            closest_on_segment(p, a, b),
            closest_on_segment(p, b, c),
            closest_on_segment(p, a, c),
        ];
        let (mut best, mut bd) = (cands[0], cands[0].0.distance_squared(p));
        for cand in &cands[1..] {
            let d = cand.0.distance_squared(p);
            if d < bd {
                best = *cand;
                bd = d;
            }
        }
        let (q, t) = best;
        return (q, [1.0 - t, t, 0.0]);
    }
    let v = vb / denom;
    let w = vc / denom;
    (a + ab * v + ac * w, [1.0 - v - w, v, w])
}

fn closest_on_segment(p: Vec3, a: Vec3, b: Vec3) -> (Vec3, f64) {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * t, t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosestPoint {
    pub point: Vec3,
    /// Interpolated, renormalized vertex normal at `point`.
    pub normal: Vec3,
    pub distance: f64,
    pub triangle: usize,
}

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    // leaf: [start, start + count) into `order`; inner: children at `start`, `start + 1`
    start: usize,
    count: usize,
}

/// Triangle BVH built once per mesh; immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct TriangleBvh {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

const MAX_LEAF: usize = 4;

impl TriangleBvh {
    pub fn new(mesh: &Mesh) -> Self {
        let n = mesh.triangle_count();
        let boxes: Vec<Aabb> = (0..n)
            .map(|t| Aabb::from_points(mesh.triangle(t)))
            .collect();
        let centroids: Vec<Vec3> = boxes.iter().map(|b| b.center()).collect();
        let mut bvh = TriangleBvh {
            nodes: Vec::with_capacity(2 * n / MAX_LEAF + 1),
            order: (0..n).collect(),
        };
        bvh.nodes.push(Node {
            bounds: Aabb::EMPTY,
            start: 0,
            count: n,
        });
        let mut stack = alloc::vec![0usize];
        while let Some(id) = stack.pop() {
            let (start, count) = (bvh.nodes[id].start, bvh.nodes[id].count);
            let range = &mut bvh.order[start..start + count];
            let bounds = range.iter().fold(Aabb::EMPTY, |b, &t| b.union(boxes[t]));
            bvh.nodes[id].bounds = bounds;
            if count <= MAX_LEAF {
                continue;
            }
            let cb = Aabb::from_points(range.iter().map(|&t| centroids[t]));
            let e = cb.extent();
            let axis = if e.x >= e.y && e.x >= e.z { 0 } else if e.y >= e.z { 1 } else { 2 };
            let mid = count / 2;
            range.select_nth_unstable_by(mid, |&a, &b| {
                centroids[a][axis].total_cmp(&centroids[b][axis]).then(a.cmp(&b))
            });
            let left = bvh.nodes.len();
            bvh.nodes.push(Node { bounds: Aabb::EMPTY, start, count: mid });
            bvh.nodes.push(Node {
                bounds: Aabb::EMPTY,
                start: start + mid,
                count: count - mid,
            });
            bvh.nodes[id].start = left;
            bvh.nodes[id].count = 0;
            stack.push(left);
            stack.push(left + 1);
        }
        bvh
    }

    /// Exact closest point on the mesh to `q`. Ties go to the lower triangle index.
    pub fn closest_point(&self, mesh: &Mesh, q: Vec3) -> ClosestPoint {
        let mut best_d = f64::INFINITY;
        let mut best: Option<(Vec3, [f64; 3], usize)> = None;
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        stack.push((0, self.nodes[0].bounds.distance_squared(q)));
        while let Some((id, bound)) = stack.pop() {
            if bound > best_d {
                continue;
            }
            let node = &self.nodes[id];
            if node.count > 0 {
                for &t in &self.order[node.start..node.start + node.count] {
                    let [a, b, c] = mesh.triangle(t);
                    let (p, w) = closest_point_on_triangle(q, a, b, c);
                    let d = p.distance_squared(q);
                    let better = d < best_d || (d == best_d && best.is_some_and(|(_, _, bt)| t < bt));
                    if better {
                        best_d = d;
                        best = Some((p, w, t));
                    }
                }
                continue;
            }
            let (l, r) = (node.start, node.start + 1);
            let dl = self.nodes[l].bounds.distance_squared(q);
            let dr = self.nodes[r].bounds.distance_squared(q);
            if dl <= dr {
                stack.push((r, dr));
                stack.push((l, dl));
            } else {
                stack.push((l, dl));
                stack.push((r, dr));
            }
        }
        let (point, w, triangle) = best.expect("mesh has at least one triangle");
        ClosestPoint {
            point,
            normal: mesh.interpolated_normal(triangle, w),
            distance: crate::math::sqrt(best_d),
            triangle,
        }
    }
}
