//! Interaction-landscape descriptors.
//!
//! A moving particle set (the *motion driver*) is observed by an octree of
//! sensors placed around a static mesh. Each sensor turns the trajectory
//! samples it sees into a small vector field, first-order flow attributes are
//! computed on that field, and the attributes are quantized into histograms
//! that are averaged into a global descriptor. Descriptors are compared with
//! a weighted Bhattacharyya distance and feed retrieval, saliency,
//! correspondence and progressive prediction.
//!
//! The crate is `no_std` (with `alloc`) when built without default features.
//! The `parallel` feature evaluates per-sensor work on a rayon pool; results
//! are bit-identical either way.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

extern crate alloc;

pub mod analysis;
pub mod descriptor;
pub mod encode;
mod error;
pub mod flowfield;
pub mod geometry;
pub mod math;
mod par;
pub mod sensor;
pub mod trajectory;

pub use error::{Error, Result};
pub use math::{Aabb, Axis, Mat3, Vec3};
