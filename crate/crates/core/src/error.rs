use std::path::PathBuf;

/// Errors produced by the parameterization and remeshing pipeline.
#[derive(Debug, thiserror::Error)]
pub enum FsqcError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("non-triangular face at line {line} ({arity} vertices)")]
    NonTriangularFace { line: usize, arity: usize },

    #[error("face {face} references vertex {index}, but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },

    #[error("mesh is not a genus-0 closed surface: {0}")]
    NotGenusZero(String),

    #[error("degenerate face {face}")]
    DegenerateFace { face: usize },

    #[error("degenerate triangle: the three points are collinear or coincident")]
    DegenerateTriangle,

    #[error("north pole maps to infinity")]
    NorthPole,

    #[error("cannot rotate a zero vector")]
    ZeroVector,

    #[error("face {face}: |mu| = {modulus} is not below 1")]
    InvalidBeltrami { face: usize, modulus: f64 },

    #[error("face {face}: K must be >= 1 (got {value})")]
    InvalidDilation { face: usize, value: f64 },

    #[error("face {face}: degenerate conformal derivative")]
    DegenerateDerivative { face: usize },

    #[error("empty field")]
    EmptyField,

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("coincident points")]
    CoincidentPoints,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("linear solve failed: {message} (relative residual {residual:e})")]
    Solver { message: String, residual: f64 },

    #[error("degenerate point set: {0}")]
    DegenerateHull(String),

    #[error("induced mesh is not a closed manifold: {0}")]
    NonManifold(String),

    #[error("{count} flipped faces in spherical map")]
    Flipped { count: usize },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<FsqcError>,
    },
}

pub type Result<T, E = FsqcError> = std::result::Result<T, E>;

impl FsqcError {
    /// The innermost error, unwrapping stage annotations.
    pub fn root(&self) -> &FsqcError {
        match self {
            FsqcError::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// Name of the outermost pipeline stage, if the error carries one.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            FsqcError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| FsqcError::Stage {
            stage,
            source: Box::new(source),
        })
    }
}
