//! Observed-shape geometry: mesh storage, surface sampling, local feature
//! size, driver particle placement and closest-point queries.

mod bvh;
mod fps;
mod kdtree;
mod lfs;
mod sampling;
pub mod shapes;

use alloc::vec::Vec;

pub use bvh::{closest_point_on_triangle, ClosestPoint, TriangleBvh};
pub use fps::{bilateral_distance, bilateral_fps, bilateral_fps_from, euclidean_fps_from, Anchor, DriverParticleSet};
pub use kdtree::KdTree;
pub use lfs::{estimate_lfs, LfsField, LfsParams};
pub use sampling::{
    poisson_disk_sample, random_subset, sample_triangle_point, PoissonParams, SurfaceSampleSet,
};

use crate::error::{Error, Result};
use crate::math::{Aabb, Vec3};

/// Static triangle mesh. Triangle soups are fine; no manifoldness is assumed.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    vertex_normals: Vec<Vec3>,
    bounds: Aabb,
}

impl Mesh {
    /// Builds a mesh and computes area-weighted vertex normals and bounds.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(vertex) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteVertex { vertex });
        }
        if triangles.is_empty() {
            return Err(Error::ZeroTriangles);
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= vertices.len() {
                    return Err(Error::IndexOutOfRange {
                        triangle: t,
                        index: i,
                        vertex_count: vertices.len(),
                    });
                }
            }
        }
        let vertex_normals = area_weighted_normals(&vertices, &triangles);
        let bounds = Aabb::from_points(vertices.iter().copied());
        Ok(Mesh {
            vertices,
            triangles,
            vertex_normals,
            bounds,
        })
    }

    /// Builds a mesh from polygons, fan-triangulating faces with more than
    /// three corners. Faces with fewer than three corners are dropped.
    pub fn from_polygons(vertices: Vec<Vec3>, faces: &[Vec<usize>]) -> Result<Self> {
        let mut triangles = Vec::new();
        for f in faces {
            for k in 1..f.len().saturating_sub(1) {
                triangles.push([f[0], f[k], f[k + 1]]);
            }
        }
        Mesh::new(vertices, triangles)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex_normals(&self) -> &[Vec3] {
        &self.vertex_normals
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle(t);
        0.5 * (b - a).cross(c - a).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Vertex normal interpolated with barycentric weights and renormalized.
    pub fn interpolated_normal(&self, t: usize, bary: [f64; 3]) -> Vec3 {
        let [a, b, c] = self.triangles[t];
        let n = self.vertex_normals[a] * bary[0]
            + self.vertex_normals[b] * bary[1]
            + self.vertex_normals[c] * bary[2];
        n.try_normalize().unwrap_or_else(|| self.face_normal(t))
    }

    pub fn face_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangle(t);
        (b - a).cross(c - a).try_normalize().unwrap_or(Vec3::Z)
    }

    /// Applies `f` to every vertex and rebuilds normals and bounds.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> Result<Mesh> {
        Mesh::new(self.vertices.iter().map(|&v| f(v)).collect(), self.triangles.clone())
    }

    /// 4-to-1 midpoint subdivision. Returns the refined mesh and, for each new
    /// vertex, the original triangle and barycentric weights it came from.
    pub fn subdivide_midpoint(&self) -> (Mesh, Vec<Anchor>) {
        use alloc::collections::BTreeMap;
        let mut vertices = self.vertices.clone();
        let mut anchors: Vec<Anchor> = (0..self.vertices.len()).map(Anchor::Vertex).collect();
        let mut edge_mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
            let corners = [a, b, c];
            let mut mid = [0usize; 3];
            for e in 0..3 {
                let (i, j) = (corners[e], corners[(e + 1) % 3]);
                let key = (i.min(j), i.max(j));
                mid[e] = *edge_mid.entry(key).or_insert_with(|| {
                    vertices.push((self.vertices[i] + self.vertices[j]) * 0.5);
                    let mut w = [0.0; 3];
                    w[e] = 0.5;
                    w[(e + 1) % 3] = 0.5;
                    anchors.push(Anchor::Barycentric { triangle: t, weights: w });
                    vertices.len() - 1
                });
            }
            triangles.push([a, mid[0], mid[2]]);
            triangles.push([mid[0], b, mid[1]]);
            triangles.push([mid[2], mid[1], c]);
            triangles.push([mid[0], mid[1], mid[2]]);
        }
        let mesh = Mesh::new(vertices, triangles).expect("subdivision preserves validity");
        (mesh, anchors)
    }

    /// Index of one triangle incident to each vertex (`usize::MAX` for
    /// unreferenced vertices).
    pub fn incident_triangle(&self) -> Vec<usize> {
        let mut inc = alloc::vec![usize::MAX; self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                if inc[v] == usize::MAX {
                    inc[v] = t;
                }
            }
        }
        inc
    }
}

fn area_weighted_normals(vertices: &[Vec3], triangles: &[[usize; 3]]) -> Vec<Vec3> {
    let mut acc = alloc::vec![Vec3::ZERO; vertices.len()];
    for &[a, b, c] in triangles {
        // cross product magnitude is twice the area, so this is area-weighted
        let n = (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]);
        acc[a] += n;
        acc[b] += n;
        acc[c] += n;
    }
    acc.into_iter()
        .map(|n| n.try_normalize().unwrap_or(Vec3::Z))
        .collect()
}
