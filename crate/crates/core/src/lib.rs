//! Manufacturability indexes for 3-axis machining and powder-bed additive
//! processes, computed over an adaptive octree of a triangle mesh.
//!
//! The usual flow is [`mesh::load_mesh`], then [`analysis::analyze_part`]
//! (or [`analysis::analyze_assembly`] for modular designs), then
//! [`aggregation::compare`] and the writers in [`reporting`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod additive;
pub mod analysis;
pub mod aggregation;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod geometry;
mod hash;
pub mod indexes;
pub mod machining;
pub mod mesh;
pub mod profile;
pub mod reporting;
pub mod spatial;

pub use error::{Error, Result};
