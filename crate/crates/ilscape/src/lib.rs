//! File formats, IO and the command-line front end for
//! [`ilscape_core`] interaction descriptors.
//!
//! Formats:
//! - meshes: Wavefront OBJ (`v`, `f`; optional vertex colors);
//! - trajectories: CSV `particle_id,t,x,y,z[,vx,vy,vz]`;
//! - descriptors: `.ild` TOML files;
//! - scenes: TOML configs, see [`config::SceneConfig`].

pub mod cli;
pub mod config;
pub mod corpus;
pub mod db;
pub mod error;
pub mod export;
pub mod ild;
pub mod obj;
pub mod svg;
pub mod trajectory_csv;

pub use error::{Error, Result};
pub use ilscape_core as core;
