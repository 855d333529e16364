use alloc::string::String;

use crate::math::Vec3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mesh has zero triangles")]
    ZeroTriangles,
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteVertex { vertex: usize },
    #[error("triangle {triangle} references vertex {index}, but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("domain size {domain} is smaller than the mesh extent {required}; the object must lie inside the interaction space")]
    DomainTooSmall { domain: f64, required: f64 },
    #[error("max_depth {0} is outside 1..=12")]
    InvalidDepth(u32),
    #[error("surface sample {index} at {point:?} lies outside the interaction space")]
    SampleOutsideSpace { index: usize, point: Vec3 },
    #[error("particle {particle}: gap at t={t} is {gap}, expected {expected} (1% tolerance)")]
    InconsistentTimeStep {
        particle: u64,
        t: f64,
        gap: f64,
        expected: f64,
    },
    #[error("particle {particle}: non-finite value at t={t}")]
    NonFiniteSample { particle: u64, t: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample at {point:?} lies outside sensor {sensor}")]
    SampleOutsideSensor { sensor: usize, point: Vec3 },
    #[error("query point {0:?} lies outside the sensor box")]
    QueryOutsideSensor(Vec3),
    #[error("no interaction captured")]
    NoInteraction,
    #[error("histograms have different bin counts ({left} vs {right})")]
    BinMismatch { left: usize, right: usize },
    #[error("descriptors are not comparable: `{field}` differs")]
    Incomparable { field: &'static str },
    #[error("matrix is not symmetric")]
    NonSymmetric,
    #[error("need at least {required} entries, got {actual}")]
    NotEnoughEntries { required: usize, actual: usize },
    #[error("database entry `{0}` has no label")]
    Unlabeled(String),
    #[error("segment {k} is out of range 1..={max}")]
    SegmentOutOfRange { k: usize, max: usize },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("preset `{0}` needs a target mesh")]
    MissingMesh(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
