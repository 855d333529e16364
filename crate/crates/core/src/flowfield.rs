//! Per-sensor vector fields and their first-order flow attributes.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Mesh, TriangleBvh};
use crate::math::{floor, sqrt, Aabb, Mat3, Vec3};
use crate::sensor::Sensor;

pub const DEFAULT_RESOLUTION: usize = 8;
pub const SUPPORTED_RESOLUTIONS: [usize; 3] = [4, 8, 16];

/// Normalization factor `F` applied to the summed cell velocities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormMode {
    /// `F` = sample count; keeps speed.
    Average,
    /// `F` = length of the summed vector; keeps direction only.
    #[default]
    Direction,
}

impl NormMode {
    pub fn name(self) -> &'static str {
        match self {
            NormMode::Average => "average",
            NormMode::Direction => "direction",
        }
    }

    pub fn parse(s: &str) -> Option<NormMode> {
        match s {
            "average" => Some(NormMode::Average),
            "direction" => Some(NormMode::Direction),
            _ => None,
        }
    }
}

/// The six attributes, in descriptor order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttributeKind {
    /// Tensor magnitude.
    Mt,
    /// Dilatation magnitude.
    Md,
    /// Shear strain rate magnitude.
    Ms,
    /// Vorticity magnitude.
    Mw,
    /// Vector magnitude.
    M,
    /// Orientation against the closest surface normal, remapped to `[0,1]`.
    O,
}

impl AttributeKind {
    pub const ALL: [AttributeKind; 6] = [
        AttributeKind::Mt,
        AttributeKind::Md,
        AttributeKind::Ms,
        AttributeKind::Mw,
        AttributeKind::M,
        AttributeKind::O,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AttributeKind::Mt => "Mt",
            AttributeKind::Md => "Md",
            AttributeKind::Ms => "Ms",
            AttributeKind::Mw => "Mw",
            AttributeKind::M => "M",
            AttributeKind::O => "O",
        }
    }

    pub fn parse(s: &str) -> Option<AttributeKind> {
        AttributeKind::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// Regular `n³` grid over one sensor box. Cell `(i, j, k)` is stored at
/// `i + n·(j + n·k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub sensor_id: usize,
    pub origin: Vec3,
    pub size: f64,
    pub resolution: usize,
    pub mode: NormMode,
    pub vectors: Vec<Vec3>,
    pub counts: Vec<u32>,
}

fn check_resolution(n: usize) -> Result<()> {
    if SUPPORTED_RESOLUTIONS.contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!(
            "resolution must be 4, 8 or 16, got {n}"
        )))
    }
}

impl VectorField {
    /// Averages the velocities falling into each cell. Samples are accumulated
    /// in the given order.
    pub fn bin_samples<I>(sensor: &Sensor, samples: I, resolution: usize, mode: NormMode) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec3, Vec3)>,
    {
        check_resolution(resolution)?;
        let n = resolution;
        let bounds = sensor.bounds();
        let mut f = VectorField {
            sensor_id: sensor.id,
            origin: sensor.min,
            size: sensor.size,
            resolution: n,
            mode,
            vectors: alloc::vec![Vec3::ZERO; n * n * n],
            counts: alloc::vec![0; n * n * n],
        };
        for (p, v) in samples {
            if !bounds.contains(p) {
                return Err(Error::SampleOutsideSensor { sensor: sensor.id, point: p });
            }
            let [i, j, k] = f.cell_of(p);
            let c = f.index(i, j, k);
            f.vectors[c] += v;
            f.counts[c] += 1;
        }
        for (u, &count) in f.vectors.iter_mut().zip(&f.counts) {
            if count == 0 {
                continue;
            }
            *u = match mode {
                NormMode::Average => *u / count as f64,
                NormMode::Direction => u.try_normalize().unwrap_or(Vec3::ZERO),
            };
        }
        Ok(f)
    }

    /// Field sampled from `v` at every cell center; all cells count as occupied.
    pub fn from_fn(origin: Vec3, size: f64, resolution: usize, v: impl Fn(Vec3) -> Vec3) -> Result<Self> {
        check_resolution(resolution)?;
        let n = resolution;
        let mut f = VectorField {
            sensor_id: 0,
            origin,
            size,
            resolution: n,
            mode: NormMode::Average,
            vectors: Vec::with_capacity(n * n * n),
            counts: alloc::vec![1; n * n * n],
        };
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let c = f.cell_center(i, j, k);
                    f.vectors.push(v(c));
                }
            }
        }
        Ok(f)
    }

    #[inline]
    pub fn cell_size(&self) -> f64 {
        self.size / self.resolution as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.resolution * (j + self.resolution * k)
    }

    #[inline]
    pub fn coords(&self, c: usize) -> [usize; 3] {
        let n = self.resolution;
        [c % n, (c / n) % n, c / (n * n)]
    }

    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let h = self.cell_size();
        self.origin + Vec3::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h)
    }

    pub fn cell_of(&self, p: Vec3) -> [usize; 3] {
        let h = self.cell_size();
        let d = p - self.origin;
        let last = (self.resolution - 1) as f64;
        let c = |x: f64| floor(x / h).clamp(0.0, last) as usize;
        [c(d.x), c(d.y), c(d.z)]
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(self.origin, self.origin + Vec3::splat(self.size))
    }

    #[inline]
    pub fn occupied(&self, c: usize) -> bool {
        self.counts[c] > 0
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.counts.len()).filter(|&c| self.counts[c] > 0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Trilinear blend of the eight cell-center vectors around `q`, clamped at
    /// the outer half cells.
    pub fn interpolate(&self, q: Vec3) -> Result<Vec3> {
        if !self.bounds().contains(q) {
            return Err(Error::QueryOutsideSensor(q));
        }
        let n = self.resolution;
        let h = self.cell_size();
        let g = (q - self.origin) / h;
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let x = (g[a] - 0.5).clamp(0.0, (n - 1) as f64);
            let i0 = (floor(x) as usize).min(n - 2);
            base[a] = i0;
            frac[a] = x - i0 as f64;
        }
        let mut out = Vec3::ZERO;
        for corner in 0..8 {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for a in 0..3 {
                let hi = (corner >> a) & 1 == 1;
                idx[a] = base[a] + hi as usize;
                w *= if hi { frac[a] } else { 1.0 - frac[a] };
            }
            if w != 0.0 {
                out += self.vectors[self.index(idx[0], idx[1], idx[2])] * w;
            }
        }
        Ok(out)
    }

    /// Velocity gradient `T[r][c] = ∂V_r/∂x_c` at a cell. Central differences
    /// when both neighbours along an axis are occupied, one-sided when only one
    /// is, zero when neither is.
    pub fn gradient(&self, i: usize, j: usize, k: usize) -> Mat3 {
        let n = self.resolution;
        let h = self.cell_size();
        let at = [i, j, k];
        let u0 = self.vectors[self.index(i, j, k)];
        let mut t = Mat3::ZERO;
        for axis in 0..3 {
            let neighbour = |delta: isize| -> Option<Vec3> {
                let x = at[axis] as isize + delta;
                if x < 0 || x >= n as isize {
                    return None;
                }
                let mut c = at;
                c[axis] = x as usize;
                let idx = self.index(c[0], c[1], c[2]);
                self.occupied(idx).then(|| self.vectors[idx])
            };
            let d = match (neighbour(-1), neighbour(1)) {
                (Some(lo), Some(hi)) => (hi - lo) / (2.0 * h),
                (None, Some(hi)) => (hi - u0) / h,
                (Some(lo), None) => (u0 - lo) / h,
                (None, None) => Vec3::ZERO,
            };
            for r in 0..3 {
                t.0[r][axis] = d[r];
            }
        }
        t
    }
}

/// Split of a gradient tensor into dilatation, shear and rotation parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorDecomposition {
    pub eps: [f64; 3],
    pub theta: [f64; 3],
    pub omega: [f64; 3],
}

impl TensorDecomposition {
    pub fn new(t: &Mat3) -> Self {
        let m = &t.0;
        TensorDecomposition {
            eps: [m[0][0], m[1][1], m[2][2]],
            theta: [m[2][1] + m[1][2], m[0][2] + m[2][0], m[1][0] + m[0][1]],
            omega: [
                0.5 * (m[2][1] - m[1][2]),
                0.5 * (m[0][2] - m[2][0]),
                0.5 * (m[1][0] - m[0][1]),
            ],
        }
    }

    pub fn symmetric(&self) -> Mat3 {
        let [e1, e2, e3] = self.eps;
        let [t1, t2, t3] = self.theta;
        Mat3([
            [e1, 0.5 * t3, 0.5 * t2],
            [0.5 * t3, e2, 0.5 * t1],
            [0.5 * t2, 0.5 * t1, e3],
        ])
    }

    pub fn antisymmetric(&self) -> Mat3 {
        let [w1, w2, w3] = self.omega;
        Mat3([[0.0, -w3, w2], [w3, 0.0, -w1], [-w2, w1, 0.0]])
    }

    pub fn dilatation(&self) -> f64 {
        norm3(self.eps)
    }

    pub fn shear(&self) -> f64 {
        norm3(self.theta)
    }

    pub fn vorticity(&self) -> f64 {
        norm3(self.omega)
    }
}

fn norm3(a: [f64; 3]) -> f64 {
    sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
}

pub fn tensor_magnitude(t: &Mat3) -> f64 {
    sqrt(0.5 * t.frobenius_squared())
}

/// Vorticity magnitude as half the curl length.
pub fn vorticity_from_curl(t: &Mat3) -> f64 {
    let m = &t.0;
    0.5 * Vec3::new(m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]).norm()
}

/// Closest surface point and normal seen from a cell center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSurface {
    pub point: Vec3,
    pub normal: Vec3,
    pub distance: f64,
}

/// Closest-point probes for the occupied cells of `field` (`None` elsewhere).
pub fn probe_surface(field: &VectorField, mesh: &Mesh, bvh: &TriangleBvh) -> Vec<Option<CellSurface>> {
    (0..field.counts.len())
        .map(|c| {
            field.occupied(c).then(|| {
                let [i, j, k] = field.coords(c);
                let cp = bvh.closest_point(mesh, field.cell_center(i, j, k));
                CellSurface {
                    point: cp.point,
                    normal: cp.normal,
                    distance: cp.distance,
                }
            })
        })
        .collect()
}

/// Per-cell values of all six attributes for one field.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributeGrids {
    pub values: [Vec<f64>; 6],
}

impl AttributeGrids {
    pub fn get(&self, a: AttributeKind) -> &[f64] {
        &self.values[a.index()]
    }
}

/// Attribute grids for `field`. Empty cells get 0, except `O` = 0.5. Cells
/// without a surface probe also get `O` = 0.5.
pub fn compute_attributes(field: &VectorField, surface: &[Option<CellSurface>]) -> AttributeGrids {
    let len = field.vectors.len();
    let mut values: [Vec<f64>; 6] = core::array::from_fn(|_| alloc::vec![0.0; len]);
    values[AttributeKind::O.index()].iter_mut().for_each(|v| *v = 0.5);
    for c in field.occupied_cells() {
        let [i, j, k] = field.coords(c);
        let t = field.gradient(i, j, k);
        let d = TensorDecomposition::new(&t);
        let u = field.vectors[c];
        values[0][c] = tensor_magnitude(&t);
        values[1][c] = d.dilatation();
        values[2][c] = d.shear();
        values[3][c] = d.vorticity();
        values[4][c] = u.norm();
        values[5][c] = orientation(u, surface.get(c).copied().flatten().map(|s| s.normal));
    }
    AttributeGrids { values }
}

/// `(û·n̂ + 1)/2`, or 0.5 when either vector is missing or zero.
pub fn orientation(u: Vec3, normal: Option<Vec3>) -> f64 {
    match (u.try_normalize(), normal.and_then(|n| n.try_normalize())) {
        (Some(u), Some(n)) => ((u.dot(n) + 1.0) * 0.5).clamp(0.0, 1.0),
        _ => 0.5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sensor() -> Sensor {
        Sensor { id: 3, min: Vec3::ZERO, size: 1.0, depth: 0 }
    }

    #[test]
    fn averaging_and_direction() {
        let s = vec![(Vec3::splat(0.01), Vec3::X), (Vec3::splat(0.02), Vec3::Y)];
        let a = VectorField::bin_samples(&sensor(), s.clone(), 8, NormMode::Average).unwrap();
        assert_eq!(a.vectors[0], Vec3::new(0.5, 0.5, 0.0));
        assert_eq!(a.counts[0], 2);
        let d = VectorField::bin_samples(&sensor(), s, 8, NormMode::Direction).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((d.vectors[0] - Vec3::new(h, h, 0.0)).norm() < 1e-15);
        let opp = vec![(Vec3::splat(0.01), Vec3::X), (Vec3::splat(0.02), -Vec3::X)];
        let z = VectorField::bin_samples(&sensor(), opp, 8, NormMode::Direction).unwrap();
        assert_eq!(z.vectors[0], Vec3::ZERO);
        assert_eq!(z.counts[0], 2);
    }

    #[test]
    fn binning_errors() {
        let out = vec![(Vec3::splat(2.0), Vec3::X)];
        assert!(matches!(
            VectorField::bin_samples(&sensor(), out, 8, NormMode::Average),
            Err(Error::SampleOutsideSensor { sensor: 3, .. })
        ));
        assert!(VectorField::bin_samples(&sensor(), vec![], 5, NormMode::Average).is_err());
    }

    #[test]
    fn max_face_sample_goes_to_last_cell() {
        let f = VectorField::bin_samples(&sensor(), vec![(Vec3::splat(1.0), Vec3::X)], 4, NormMode::Average).unwrap();
        assert_eq!(f.counts[f.index(3, 3, 3)], 1);
    }

    #[test]
    fn interpolation_reproduces_nodes_and_linear_fields() {
        let a = Mat3([[0.3, -1.0, 2.0], [0.5, 0.1, -0.7], [1.2, 0.0, 0.4]]);
        let b = Vec3::new(0.2, -0.1, 0.05);
        let lin = |x: Vec3| a.mul_vec(x) + b;
        let f = VectorField::from_fn(Vec3::new(-1.0, 0.5, 2.0), 2.0, 8, lin).unwrap();
        let c = f.cell_center(2, 5, 7);
        assert_eq!(f.interpolate(c).unwrap(), f.vectors[f.index(2, 5, 7)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = f.cell_size();
        for _ in 0..500 {
            let q = f.origin
                + Vec3::new(
                    rng.random_range(0.5 * h..2.0 - 0.5 * h),
                    rng.random_range(0.5 * h..2.0 - 0.5 * h),
                    rng.random_range(0.5 * h..2.0 - 0.5 * h),
                );
            assert!((f.interpolate(q).unwrap() - lin(q)).norm() < 1e-9);
        }
        let k = VectorField::from_fn(Vec3::ZERO, 1.0, 4, |_| Vec3::new(1.0, 2.0, 3.0)).unwrap();
        assert!((k.interpolate(Vec3::new(0.99, 0.0, 0.37)).unwrap() - Vec3::new(1.0, 2.0, 3.0)).norm() < 1e-12);
        assert!(k.interpolate(Vec3::splat(1.5)).is_err());
    }

    fn interior(f: &VectorField) -> impl Iterator<Item = [usize; 3]> + '_ {
        let n = f.resolution;
        (1..n - 1).flat_map(move |k| (1..n - 1).flat_map(move |j| (1..n - 1).map(move |i| [i, j, k])))
    }

    #[test]
    fn jacobians_of_analytic_fields() {
        let swirl = VectorField::from_fn(Vec3::splat(-1.0), 2.0, 8, |x| Vec3::new(-x.y, x.x, 0.0)).unwrap();
        let want = Mat3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        for [i, j, k] in interior(&swirl) {
            assert!(swirl.gradient(i, j, k).max_abs_diff(&want) < 1e-6);
        }
        let source = VectorField::from_fn(Vec3::splat(-1.0), 2.0, 8, |x| x).unwrap();
        for [i, j, k] in interior(&source) {
            assert!(source.gradient(i, j, k).max_abs_diff(&Mat3::IDENTITY) < 1e-6);
        }
        let c = VectorField::from_fn(Vec3::ZERO, 1.0, 8, |_| Vec3::X).unwrap();
        assert_eq!(c.gradient(0, 3, 7), Mat3::ZERO);
    }

    #[test]
    fn swirl_and_source_attributes() {
        let swirl = VectorField::from_fn(Vec3::splat(-1.0), 2.0, 8, |x| Vec3::new(-x.y, x.x, 0.0)).unwrap();
        let g = compute_attributes(&swirl, &[]);
        for [i, j, k] in interior(&swirl) {
            let c = swirl.index(i, j, k);
            assert!((g.get(AttributeKind::Mt)[c] - 1.0).abs() < 1e-6);
            assert!(g.get(AttributeKind::Md)[c].abs() < 1e-6);
            assert!(g.get(AttributeKind::Ms)[c].abs() < 1e-6);
            assert!((g.get(AttributeKind::Mw)[c] - 1.0).abs() < 1e-6);
        }
        let src = VectorField::from_fn(Vec3::splat(-1.0), 2.0, 8, |x| x).unwrap();
        let g = compute_attributes(&src, &[]);
        for [i, j, k] in interior(&src) {
            let c = src.index(i, j, k);
            assert!((g.get(AttributeKind::Mt)[c] - sqrt(1.5)).abs() < 1e-6);
            assert!((g.get(AttributeKind::Md)[c] - sqrt(3.0)).abs() < 1e-6);
            assert!(g.get(AttributeKind::Ms)[c].abs() < 1e-6);
            assert!(g.get(AttributeKind::Mw)[c].abs() < 1e-6);
        }
    }

    #[test]
    fn zero_field_attributes() {
        let f = VectorField::from_fn(Vec3::ZERO, 1.0, 4, |_| Vec3::ZERO).unwrap();
        let g = compute_attributes(&f, &[]);
        for a in AttributeKind::ALL {
            let want = if a == AttributeKind::O { 0.5 } else { 0.0 };
            assert!(g.get(a).iter().all(|&v| v == want));
        }
    }

    #[test]
    fn decomposition_reconstructs_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let mut t = Mat3::ZERO;
            for r in 0..3 {
                for c in 0..3 {
                    t.0[r][c] = rng.random_range(-10.0..10.0);
                }
            }
            let d = TensorDecomposition::new(&t);
            assert!((d.symmetric() + d.antisymmetric()).max_abs_diff(&t) < 1e-12);
            assert!((d.vorticity() - vorticity_from_curl(&t)).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_neighbours_are_skipped() {
        // occupied cells at i = 2, 3 only; the gradient at 3 is one-sided
        let s = vec![
            (Vec3::new(2.5 / 8.0, 0.01, 0.01), Vec3::new(1.0, 0.0, 0.0)),
            (Vec3::new(3.5 / 8.0, 0.01, 0.01), Vec3::new(2.0, 0.0, 0.0)),
        ];
        let f = VectorField::bin_samples(&sensor(), s, 8, NormMode::Average).unwrap();
        assert!((f.gradient(3, 0, 0).0[0][0] - 8.0).abs() < 1e-12);
        assert!((f.gradient(2, 0, 0).0[0][0] - 8.0).abs() < 1e-12);
        assert_eq!(f.gradient(6, 0, 0), Mat3::ZERO);
    }

    #[test]
    fn orientation_against_surface() {
        let m = shapes::plane(1.0, 1);
        let bvh = TriangleBvh::new(&m);
        let s = Sensor { id: 0, min: Vec3::new(0.0, 0.0, 0.0), size: 1.0, depth: 0 };
        let samples = vec![(Vec3::new(0.1, 0.1, 0.5), Vec3::Z), (Vec3::new(0.9, 0.9, 0.5), -Vec3::Z)];
        let f = VectorField::bin_samples(&s, samples, 4, NormMode::Direction).unwrap();
        let probe = probe_surface(&f, &m, &bvh);
        let g = compute_attributes(&f, &probe);
        let up = f.index(0, 0, 2);
        let down = f.index(3, 3, 2);
        assert!((g.get(AttributeKind::O)[up] - 1.0).abs() < 1e-12);
        assert!(g.get(AttributeKind::O)[down].abs() < 1e-12);
        assert_eq!(probe.iter().flatten().count(), 2);
        assert!((probe[up].unwrap().distance - f.cell_center(0, 0, 2).z).abs() < 1e-12);
    }

    #[test]
    fn velocity_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let samples: Vec<(Vec3, Vec3)> = (0..3000)
            .map(|_| {
                let p = Vec3::new(rng.random(), rng.random(), rng.random());
                (p, Vec3::new(-p.y, p.x + p.z * p.z, 0.3 * p.x))
            })
            .collect();
        let lambda = 2.5;
        let scaled: Vec<(Vec3, Vec3)> = samples.iter().map(|&(p, v)| (p, v * lambda)).collect();
        for mode in [NormMode::Average, NormMode::Direction] {
            let a = compute_attributes(&VectorField::bin_samples(&sensor(), samples.clone(), 8, mode).unwrap(), &[]);
            let b = compute_attributes(&VectorField::bin_samples(&sensor(), scaled.clone(), 8, mode).unwrap(), &[]);
            for attr in AttributeKind::ALL {
                let k = if mode == NormMode::Average && attr != AttributeKind::O { lambda } else { 1.0 };
                for (x, y) in a.get(attr).iter().zip(b.get(attr)) {
                    assert!((x * k - y).abs() <= 1e-9 * (1.0 + y.abs()), "{attr:?} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn finer_grid_is_not_worse() {
        let v = |x: Vec3| Vec3::new(crate::math::sin(x.y), x.x * x.z, crate::math::cos(x.x));
        let dv = |x: Vec3| {
            Mat3([
                [0.0, crate::math::cos(x.y), 0.0],
                [x.z, 0.0, x.x],
                [-crate::math::sin(x.x), 0.0, 0.0],
            ])
        };
        let err = |n: usize| {
            let f = VectorField::from_fn(Vec3::ZERO, 1.0, n, v).unwrap();
            let mut e: f64 = 0.0;
            for [i, j, k] in interior(&f) {
                let c = f.cell_center(i, j, k);
                let (g, w) = (f.gradient(i, j, k), dv(c));
                e = e.max((tensor_magnitude(&g) - tensor_magnitude(&w)).abs());
                e = e.max((vorticity_from_curl(&g) - vorticity_from_curl(&w)).abs());
            }
            e
        };
        assert!(err(16) <= err(8));
    }
}
