//! Procedural meshes for tests, demos and synthetic corpora.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::Mesh;
use crate::math::{cos, sin, Vec3};

/// Axis-aligned cube with its min corner at `origin`: 8 vertices, 12 triangles.
pub fn cube(origin: Vec3, size: f64) -> Mesh {
    let v: Vec<Vec3> = (0..8)
        .map(|i| {
            origin
                + Vec3::new(
                    (i & 1) as f64 * size,
                    ((i >> 1) & 1) as f64 * size,
                    ((i >> 2) & 1) as f64 * size,
                )
        })
        .collect();
    // outward winding
    let t = alloc::vec![
        [0, 2, 1], [1, 2, 3], // z = 0
        [4, 5, 6], [5, 7, 6], // z = 1
        [0, 1, 4], [1, 5, 4], // y = 0
        [2, 6, 3], [3, 6, 7], // y = 1
        [0, 4, 2], [2, 4, 6], // x = 0
        [1, 3, 5], [3, 7, 5], // x = 1
    ];
    Mesh::new(v, t).expect("valid cube")
}

/// Square `[0,size]²` grid in the z = 0 plane with `n × n` quads.
pub fn plane(size: f64, n: usize) -> Mesh {
    let n = n.max(1);
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push(Vec3::new(i as f64 * size / n as f64, j as f64 * size / n as f64, 0.0));
        }
    }
    let mut t = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = j * (n + 1) + i;
            t.push([a, a + 1, a + n + 2]);
            t.push([a, a + n + 2, a + n + 1]);
        }
    }
    Mesh::new(v, t).expect("valid plane")
}

/// Icosahedron refined `subdivisions` times and projected onto the sphere.
pub fn icosphere(center: Vec3, radius: f64, subdivisions: u32) -> Mesh {
    let p = (1.0 + crate::math::sqrt(5.0)) / 2.0;
    let mut v: Vec<Vec3> = [
        (-1.0, p, 0.0),
        (1.0, p, 0.0),
        (-1.0, -p, 0.0),
        (1.0, -p, 0.0),
        (0.0, -1.0, p),
        (0.0, 1.0, p),
        (0.0, -1.0, -p),
        (0.0, 1.0, -p),
        (p, 0.0, -1.0),
        (p, 0.0, 1.0),
        (-p, 0.0, -1.0),
        (-p, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).try_normalize().unwrap())
    .collect();
    let mut t: Vec<[usize; 3]> = alloc::vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(t.len() * 4);
        let mut mid = |i: usize, j: usize, v: &mut Vec<Vec3>| -> usize {
            *mids.entry((i.min(j), i.max(j))).or_insert_with(|| {
                v.push(((v[i] + v[j]) * 0.5).try_normalize().unwrap());
                v.len() - 1
            })
        };
        for &[a, b, c] in &t {
            let ab = mid(a, b, &mut v);
            let bc = mid(b, c, &mut v);
            let ca = mid(c, a, &mut v);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        t = next;
    }
    let v = v.into_iter().map(|d| center + d * radius).collect();
    Mesh::new(v, t).expect("valid icosphere")
}

/// Surface of revolution about the z axis. `profile` is a list of
/// `(radius, z)` pairs; zero-radius endpoints collapse to a single pole.
pub fn revolve(profile: &[(f64, f64)], segments: usize) -> Mesh {
    let segments = segments.max(3);
    let mut v = Vec::new();
    let mut rings: Vec<Vec<usize>> = Vec::with_capacity(profile.len());
    for &(r, z) in profile {
        if r.abs() < 1e-12 {
            v.push(Vec3::new(0.0, 0.0, z));
            rings.push(alloc::vec![v.len() - 1; segments]);
        } else {
            let ring = (0..segments)
                .map(|s| {
                    let a = core::f64::consts::TAU * s as f64 / segments as f64;
                    v.push(Vec3::new(r * cos(a), r * sin(a), z));
                    v.len() - 1
                })
                .collect();
            rings.push(ring);
        }
    }
    let mut t = Vec::new();
    for w in rings.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        for s in 0..segments {
            let s1 = (s + 1) % segments;
            let (a, b, c, d) = (lo[s], lo[s1], hi[s1], hi[s]);
            if a != b {
                t.push([a, b, c]);
            }
            if c != d {
                t.push([a, c, d]);
            }
        }
    }
    Mesh::new(v, t).expect("valid surface of revolution")
}

fn arc(
    out: &mut Vec<(f64, f64)>,
    radius: f64,
    z_center: f64,
    from: f64,
    to: f64,
    steps: usize,
) {
    for i in 0..=steps {
        let a = from + (to - from) * i as f64 / steps as f64;
        out.push((radius * sin(a), z_center - radius * cos(a)));
    }
}

/// Capsule along z: cylinder of `radius` with spine length `length`
/// (between hemisphere centers), centered at the origin.
pub fn capsule(radius: f64, length: f64, segments: usize, body_rings: usize) -> Mesh {
    let mut profile = Vec::new();
    let cap_steps = (segments / 4).max(3);
    let h = length / 2.0;
    arc(&mut profile, radius, -h, 0.0, core::f64::consts::FRAC_PI_2, cap_steps);
    for i in 1..body_rings {
        profile.push((radius, -h + length * i as f64 / body_rings as f64));
    }
    let mut top = Vec::new();
    arc(&mut top, radius, h, core::f64::consts::FRAC_PI_2, core::f64::consts::PI, cap_steps);
    profile.extend(top);
    revolve(&profile, segments)
}

/// Two spheres of radius `ball_radius` centered at z = ±`half_span`, joined
/// by a thin neck of radius `neck_radius`.
pub fn dumbbell(ball_radius: f64, neck_radius: f64, half_span: f64, segments: usize) -> Mesh {
    let steps = (segments / 2).max(6);
    let theta0 = libm::asin((neck_radius / ball_radius).min(1.0));
    let mut profile = Vec::new();
    // lower ball from its south pole up to the neck junction
    arc(&mut profile, ball_radius, -half_span, 0.0, core::f64::consts::PI - theta0, steps);
    let z0 = profile.last().unwrap().1;
    let neck_len = -2.0 * z0;
    let neck_steps = ((neck_len / (core::f64::consts::TAU * neck_radius / segments as f64)) as usize).max(2);
    for i in 1..neck_steps {
        profile.push((neck_radius, z0 + neck_len * i as f64 / neck_steps as f64));
    }
    let mut upper = Vec::new();
    arc(&mut upper, ball_radius, half_span, theta0, core::f64::consts::PI, steps);
    profile.extend(upper);
    revolve(&profile, segments)
}

/// Open-top cup: flat bottom at z = 0 and a single wall up to `height`.
pub fn cup(radius: f64, height: f64, segments: usize, wall_rings: usize) -> Mesh {
    let mut profile = alloc::vec![(0.0, 0.0), (radius * 0.5, 0.0), (radius, 0.0)];
    for i in 1..=wall_rings.max(1) {
        profile.push((radius, height * i as f64 / wall_rings.max(1) as f64));
    }
    revolve(&profile, segments)
}
