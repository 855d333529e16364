//! Interaction space and the octree whose leaves are the sensor regions.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::SurfaceSampleSet;
use crate::math::{Aabb, Axis, Vec3};

/// Edge of the automatic interaction space, relative to the mesh's largest extent.
pub const AUTO_DOMAIN_FACTOR: f64 = 1.5;
pub const DEFAULT_MAX_DEPTH: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainSize {
    Auto,
    Fixed(f64),
}

/// Cubic region around the observed object in which motion is sensed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionSpace {
    pub center: Vec3,
    pub edge: f64,
    /// `edge / max mesh extent`.
    pub padding_factor: f64,
    pub up_axis: Axis,
}

impl InteractionSpace {
    pub fn bounds(&self) -> Aabb {
        let h = Vec3::splat(self.edge * 0.5);
        Aabb::new(self.center - h, self.center + h)
    }

    pub fn volume(&self) -> f64 {
        self.edge * self.edge * self.edge
    }
}

/// Cube centered on the mesh bounds. Fails if the cube cannot hold the mesh.
pub fn build_space(mesh_bounds: Aabb, domain: DomainSize, up_axis: Axis) -> Result<InteractionSpace> {
    let extent = mesh_bounds.max_extent();
    let edge = match domain {
        DomainSize::Auto => AUTO_DOMAIN_FACTOR * extent,
        DomainSize::Fixed(d) => {
            if !(d >= extent) || d <= 0.0 {
                return Err(Error::DomainTooSmall {
                    domain: d,
                    required: extent,
                });
            }
            d
        }
    };
    let edge = if edge > 0.0 { edge } else { 1.0 };
    Ok(InteractionSpace {
        center: mesh_bounds.center(),
        edge,
        padding_factor: if extent > 0.0 { edge / extent } else { f64::INFINITY },
        up_axis,
    })
}

/// A cuboidal sensor region (an octree leaf).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sensor {
    pub id: usize,
    pub min: Vec3,
    pub size: f64,
    pub depth: u32,
}

impl Sensor {
    pub fn center(&self) -> Vec3 {
        self.min + Vec3::splat(self.size * 0.5)
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(self.min, self.min + Vec3::splat(self.size))
    }

    pub fn volume(&self) -> f64 {
        self.size * self.size * self.size
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    min: Vec3,
    size: f64,
    // 0 for leaves; otherwise index of the first of 8 consecutive children
    first_child: u32,
    leaf: u32,
}

/// Octree over the interaction space. A cell is split while it holds more
/// than one surface sample and is shallower than `max_depth`.
#[derive(Clone, Debug)]
pub struct SensorTree {
    space: InteractionSpace,
    nodes: Vec<Node>,
    leaves: Vec<Sensor>,
    max_depth: u32,
}

#[inline]
fn octant(p: Vec3, center: Vec3) -> usize {
    (p.x >= center.x) as usize | ((p.y >= center.y) as usize) << 1 | ((p.z >= center.z) as usize) << 2
}

#[inline]
fn child_min(min: Vec3, half: f64, oct: usize) -> Vec3 {
    min + Vec3::new(
        (oct & 1) as f64 * half,
        ((oct >> 1) & 1) as f64 * half,
        ((oct >> 2) & 1) as f64 * half,
    )
}

pub fn build_sensor_tree(
    space: &InteractionSpace,
    samples: &SurfaceSampleSet,
    max_depth: u32,
) -> Result<SensorTree> {
    build_sensor_tree_from_points(space, &samples.points, max_depth)
}

pub fn build_sensor_tree_from_points(
    space: &InteractionSpace,
    points: &[Vec3],
    max_depth: u32,
) -> Result<SensorTree> {
    if !(1..=12).contains(&max_depth) {
        return Err(Error::InvalidDepth(max_depth));
    }
    let bounds = space.bounds();
    if let Some(index) = points.iter().position(|p| !bounds.contains(*p)) {
        return Err(Error::SampleOutsideSpace {
            index,
            point: points[index],
        });
    }
    let mut tree = SensorTree {
        space: *space,
        nodes: alloc::vec![Node {
            min: bounds.min,
            size: space.edge,
            first_child: 0,
            leaf: 0,
        }],
        leaves: Vec::new(),
        max_depth,
    };
    let all: Vec<usize> = (0..points.len()).collect();
    tree.split(0, 0, all, points);
    Ok(tree)
}

impl SensorTree {
    fn split(&mut self, id: usize, depth: u32, members: Vec<usize>, points: &[Vec3]) {
        let Node { min, size, .. } = self.nodes[id];
        if members.len() <= 1 || depth >= self.max_depth {
            self.nodes[id].leaf = self.leaves.len() as u32;
            self.leaves.push(Sensor {
                id: self.leaves.len(),
                min,
                size,
                depth,
            });
            return;
        }
        let half = size * 0.5;
        let center = min + Vec3::splat(half);
        let mut buckets: [Vec<usize>; 8] = Default::default();
        for i in members {
            buckets[octant(points[i], center)].push(i);
        }
        let first = self.nodes.len();
        self.nodes[id].first_child = first as u32;
        for oct in 0..8 {
            self.nodes.push(Node {
                min: child_min(min, half, oct),
                size: half,
                first_child: 0,
                leaf: 0,
            });
        }
        for (oct, b) in buckets.into_iter().enumerate() {
            self.split(first + oct, depth + 1, b, points);
        }
    }

    pub fn space(&self) -> &InteractionSpace {
        &self.space
    }

    pub fn sensors(&self) -> &[Sensor] {
        &self.leaves
    }

    pub fn sensor(&self, id: usize) -> &Sensor {
        &self.leaves[id]
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    /// The leaf owning `q`. Cells are half-open `[min, max)` except on the
    /// interaction space's own max faces, which are closed.
    pub fn locate(&self, q: Vec3) -> Option<usize> {
        if !self.space.bounds().contains(q) {
            return None;
        }
        let mut id = 0;
        loop {
            let n = &self.nodes[id];
            if n.first_child == 0 {
                return Some(n.leaf as usize);
            }
            let center = n.min + Vec3::splat(n.size * 0.5);
            id = n.first_child as usize + octant(q, center);
        }
    }

    /// Leaves whose boxes intersect the ball of `radius` around `q`.
    pub fn sensors_within(&self, q: Vec3, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let r2 = radius * radius;
        let mut stack = alloc::vec![0usize];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id];
            let b = Aabb::new(n.min, n.min + Vec3::splat(n.size));
            if b.distance_squared(q) > r2 {
                continue;
            }
            if n.first_child == 0 {
                out.push(n.leaf as usize);
            } else {
                stack.extend((0..8).map(|k| n.first_child as usize + k));
            }
        }
        out.sort_unstable();
        out
    }
}
