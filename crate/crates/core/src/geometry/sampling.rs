use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Mesh;
use crate::math::{floor, sqrt, Vec3};

/// Point on triangle `(a, b, c)` from two uniform numbers in `[0,1]`.
///
/// Uniformly distributed over the triangle when `r1`, `r2` are uniform.
#[inline]
pub fn sample_triangle_point(a: Vec3, b: Vec3, c: Vec3, r1: f64, r2: f64) -> Vec3 {
    let s = sqrt(r1);
    a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2)
}

/// Dart-throwing blue-noise samples on a mesh surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSampleSet {
    pub points: Vec<Vec3>,
    pub triangles: Vec<usize>,
    pub min_spacing: f64,
}

impl SurfaceSampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonParams {
    /// Stop after this many rejected darts in a row.
    pub max_consecutive_rejections: usize,
    /// Hard cap on accepted samples.
    pub max_samples: usize,
}

impl Default for PoissonParams {
    fn default() -> Self {
        PoissonParams {
            max_consecutive_rejections: 500,
            max_samples: 200_000,
        }
    }
}

/// Poisson-disk sampling: a uniformly drawn surface point is accepted only if
/// it is farther than `min_spacing` from every accepted point.
pub fn poisson_disk_sample(
    mesh: &Mesh,
    min_spacing: f64,
    seed: u64,
    params: PoissonParams,
) -> SurfaceSampleSet {
    assert!(min_spacing > 0.0, "min_spacing must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut cdf = Vec::with_capacity(mesh.triangle_count());
    let mut total = 0.0;
    for t in 0..mesh.triangle_count() {
        total += mesh.triangle_area(t);
        cdf.push(total);
    }

    let single = min_spacing > mesh.bounds().diagonal();
    if single {
        log::warn!(
            "sample spacing {min_spacing} exceeds the mesh diagonal {}; returning a single sample",
            mesh.bounds().diagonal()
        );
    }

    let cell = min_spacing;
    let key = |p: Vec3| {
        (
            floor(p.x / cell) as i64,
            floor(p.y / cell) as i64,
            floor(p.z / cell) as i64,
        )
    };
    let mut grid: BTreeMap<(i64, i64, i64), Vec<usize>> = BTreeMap::new();
    let mut points: Vec<Vec3> = Vec::new();
    let mut triangles = Vec::new();
    let mut rejections = 0;
    let c2 = min_spacing * min_spacing;

    while rejections < params.max_consecutive_rejections && points.len() < params.max_samples {
        let t = if total > 0.0 {
            let x = rng.random::<f64>() * total;
            cdf.partition_point(|&c| c <= x).min(cdf.len() - 1)
        } else {
            rng.random_range(0..mesh.triangle_count())
        };
        let [a, b, c] = mesh.triangle(t);
        let p = sample_triangle_point(a, b, c, rng.random::<f64>(), rng.random::<f64>());

        let (kx, ky, kz) = key(p);
        let mut ok = true;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = grid.get(&(kx + dx, ky + dy, kz + dz)) {
                        if ids.iter().any(|&i| points[i].distance_squared(p) <= c2) {
                            ok = false;
                            break 'search;
                        }
                    }
                }
            }
        }
        if ok {
            grid.entry((kx, ky, kz)).or_default().push(points.len());
            points.push(p);
            triangles.push(t);
            rejections = 0;
            if single {
                break;
            }
        } else {
            rejections += 1;
        }
    }
    SurfaceSampleSet {
        points,
        triangles,
        min_spacing,
    }
}

/// Uniform random subset of `count` indices out of `0..n`, sorted ascending.
///
/// Used for particle-cloud drivers, which have no surface to sample.
pub fn random_subset(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, count.min(n)).into_vec();
    picked.sort_unstable();
    picked
}

#[cfg(test)]
mod tests {
    use super::super::shapes;
    use super::*;
    use proptest::prelude::*;

    fn tri() -> (Vec3, Vec3, Vec3) {
        (Vec3::ZERO, Vec3::X, Vec3::Y)
    }

    #[test]
    fn corner_cases_hit_vertices() {
        let (a, b, c) = tri();
        assert_eq!(sample_triangle_point(a, b, c, 0.0, 0.7), a);
        assert_eq!(sample_triangle_point(a, b, c, 1.0, 0.0), b);
        assert_eq!(sample_triangle_point(a, b, c, 1.0, 1.0), c);
    }

    proptest! {
        #[test]
        fn barycentric_coordinates_are_valid(r1 in 0.0f64..=1.0, r2 in 0.0f64..=1.0,
            ax in -5.0f64..5.0, ay in -5.0f64..5.0, az in -5.0f64..5.0) {
            let a = Vec3::new(ax, ay, az);
            let b = a + Vec3::new(1.3, 0.2, -0.4);
            let c = a + Vec3::new(-0.5, 2.0, 0.7);
            let p = sample_triangle_point(a, b, c, r1, r2);
            // reconstruct barycentrics by solving the 2x2 normal equations
            let (e0, e1, d) = (b - a, c - a, p - a);
            let (d00, d01, d11) = (e0.dot(e0), e0.dot(e1), e1.dot(e1));
            let (d20, d21) = (d.dot(e0), d.dot(e1));
            let den = d00 * d11 - d01 * d01;
            let v = (d11 * d20 - d01 * d21) / den;
            let w = (d00 * d21 - d01 * d20) / den;
            let u = 1.0 - v - w;
            prop_assert!(u >= -1e-9 && v >= -1e-9 && w >= -1e-9);
            prop_assert!((u + v + w - 1.0).abs() < 1e-12);
            prop_assert!((a * u + b * v + c * w).distance(p) < 1e-9);
        }
    }

    #[test]
    fn spacing_is_respected_on_cube() {
        let m = shapes::cube(Vec3::ZERO, 1.0);
        let s = poisson_disk_sample(&m, 0.1, 3, PoissonParams::default());
        assert!(s.len() > 100, "{}", s.len());
        for i in 0..s.len() {
            for j in 0..i {
                assert!(s.points[i].distance(s.points[j]) > 0.1);
            }
        }
    }

    #[test]
    fn points_lie_on_source_triangles() {
        let m = shapes::icosphere(Vec3::ZERO, 1.0, 2);
        let s = poisson_disk_sample(&m, 0.2, 11, PoissonParams::default());
        for (p, &t) in s.points.iter().zip(&s.triangles) {
            let [a, b, c] = m.triangle(t);
            let cp = super::super::closest_point_on_triangle(*p, a, b, c).0;
            assert!(cp.distance(*p) < 1e-6);
        }
    }

    #[test]
    fn huge_spacing_gives_one_sample() {
        let m = shapes::cube(Vec3::ZERO, 1.0);
        let s = poisson_disk_sample(&m, 10.0, 1, PoissonParams::default());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn deterministic_given_seed() {
        let m = shapes::cube(Vec3::ZERO, 1.0);
        let a = poisson_disk_sample(&m, 0.1, 42, PoissonParams::default());
        let b = poisson_disk_sample(&m, 0.1, 42, PoissonParams::default());
        assert_eq!(a, b);
        let c = poisson_disk_sample(&m, 0.1, 43, PoissonParams::default());
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn subset_is_sorted_and_unique() {
        let s = random_subset(100, 30, 5);
        assert_eq!(s.len(), 30);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(random_subset(5, 30, 5), (0..5).collect::<Vec<_>>());
    }
}
