use alloc::vec::Vec;

use crate::math::Vec3;

/// Static 3D k-d tree over a point set, answering filtered nearest-neighbour
/// queries. Indices returned refer to the input slice.
#[derive(Clone, Debug)]
pub struct KdTree {
    points: Vec<Vec3>,
    // permutation of point indices; node ranges index into this
    order: Vec<usize>,
    nodes: Vec<Node>,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    start: usize,
    end: usize,
    axis: usize,
    split: f64,
    left: usize,
    right: usize,
}

const LEAF: usize = usize::MAX;
const LEAF_SIZE: usize = 8;

impl KdTree {
    pub fn new(points: &[Vec3]) -> Self {
        let mut tree = KdTree {
            points: points.to_vec(),
            order: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build(0, points.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            axis: 0,
            split: 0.0,
            left: LEAF,
            right: LEAF,
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let pts = &self.points;
        let (mut lo, mut hi) = (Vec3::splat(f64::INFINITY), Vec3::splat(f64::NEG_INFINITY));
        for &i in &self.order[start..end] {
            lo = lo.min(pts[i]);
            hi = hi.max(pts[i]);
        }
        let ext = hi - lo;
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a][axis].total_cmp(&pts[b][axis]).then(a.cmp(&b))
        });
        let split = pts[self.order[mid]][axis];
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        let n = &mut self.nodes[id];
        n.axis = axis;
        n.split = split;
        n.left = left;
        n.right = right;
        id
    }

    #[inline]
    pub fn point(&self, i: usize) -> Vec3 {
        self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest point to `q` among those accepted by `keep`, with its squared
    /// distance. Ties go to the lower index.
    pub fn nearest_filtered(&self, q: Vec3, keep: impl Fn(usize) -> bool) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        stack.push((0, 0.0));
        while let Some((id, bound)) = stack.pop() {
            if let Some((_, bd)) = best {
                if bound > bd {
                    continue;
                }
            }
            let n = self.nodes[id];
            if n.left == LEAF {
                for &i in &self.order[n.start..n.end] {
                    if !keep(i) {
                        continue;
                    }
                    let d = self.points[i].distance_squared(q);
                    let better = match best {
                        None => true,
                        Some((bi, bd)) => d < bd || (d == bd && i < bi),
                    };
                    if better {
                        best = Some((i, d));
                    }
                }
                continue;
            }
            let diff = q[n.axis] - n.split;
            let (near, far) = if diff < 0.0 { (n.left, n.right) } else { (n.right, n.left) };
            // far side first so the near side is popped first
            stack.push((far, bound.max(diff * diff)));
            stack.push((near, bound));
        }
        best
    }

    pub fn nearest(&self, q: Vec3) -> Option<(usize, f64)> {
        self.nearest_filtered(q, |_| true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec3> = (0..500)
            .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()))
            .collect();
        let tree = KdTree::new(&pts);
        for _ in 0..300 {
            let q = Vec3::new(rng.random(), rng.random(), rng.random()) * 1.2;
            let skip = rng.random_range(0..500);
            let (i, d) = tree.nearest_filtered(q, |j| j != skip).unwrap();
            let bd = pts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != skip)
                .map(|(_, p)| p.distance_squared(q))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d, bd);
            assert_ne!(i, skip);
        }
    }

    #[test]
    fn empty_tree() {
        assert!(KdTree::new(&[]).nearest(Vec3::ZERO).is_none());
    }
}
