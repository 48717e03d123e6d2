//! Error type shared by every analysis stage.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("mesh has no triangles after cleanup")]
    EmptyMesh,

    #[error("mesh is not watertight ({open_edges} unmatched edges)")]
    NotWatertight { open_edges: usize },

    #[error("octree depth {0} outside 1..=10")]
    DepthOutOfRange(u32),

    #[error("volume sampling resolution {0} must be at least 2")]
    SamplingOutOfRange(u32),

    #[error("octree was not built from this mesh")]
    MeshMismatch,

    #[error("unknown material `{0}`")]
    UnknownMaterial(String),

    #[error("required roughness must be positive, got {0}")]
    NonPositiveRoughness(f64),

    #[error("local field is empty")]
    EmptyField,

    #[error("total leaf volume is zero")]
    ZeroTotalVolume,

    #[error("module volume must be positive, got {0}")]
    NonPositiveVolume(f64),

    #[error("length mismatch: {left} values vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("weights sum to {0}, expected 1")]
    BadWeights(f64),

    #[error("no input values")]
    EmptyInput,

    #[error("reports share no index ids")]
    NoSharedIndexes,

    #[error("field has {field} values but octree has {leaves} grey leaves")]
    FieldMismatch { field: usize, leaves: usize },

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("schema mismatch: expected `{expected}`, found `{found}`")]
    SchemaMismatch { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
