use thiserror::Error;

/// Errors reported by geometry construction and covariogram operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite coordinate encountered in {0}")]
    NonFinite(&'static str),

    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("polygon is not strictly convex / counterclockwise at vertex {index}")]
    NotStrictlyConvex { index: usize },

    #[error("polygon has (near-)zero area")]
    DegenerateArea,

    #[error("support function violates h + h'' > 0 (min {min:.3e} at angle {angle:.6})")]
    NotConvexBody { min: f64, angle: f64 },

    #[error("support function must be positive (min {min:.3e})")]
    NonPositiveSupport { min: f64 },

    #[error("polygonization needs n >= 16, got {0}")]
    PolygonizeTooCoarse(usize),

    #[error("point ({0:.6}, {1:.6}) is not on the body boundary (distance {2:.3e})")]
    NotOnBoundary(f64, f64, f64),

    #[error("lag vector lies outside the admissible domain (interior of the covariogram support minus the origin, with margin)")]
    OutsideDomain,

    #[error("finite-difference stencil leaves the covariogram support")]
    StencilOutsideDomain,

    #[error("boundary crossing search failed: {0}")]
    CrossingSearch(String),

    #[error("projection directions are (near-)parallel: |det| = {0:.3e}")]
    ParallelDirections(f64),

    #[error("cyclic order of normals and probe direction violated")]
    CyclicOrder,

    #[error("covariogram grid is malformed: {0}")]
    BadGrid(String),

    #[error("operation requires n >= {min}, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("determinant of the covariogram Hessian is too close to -1 (1 + det G = {0:.3e}); conjugate machinery undefined")]
    DegenerateHessianDet(f64),

    #[error("conjugate search failed: {0}")]
    ConjugateSearch(String),

    #[error("eigenvalues of the conjugate-pair matrix coincide within tolerance (gap {0:.3e})")]
    EigenGapTooSmall(f64),

    #[error("parallelograms do not share a diagonal (vertex mismatch {0:.3e})")]
    DiagonalNotShared(f64),

    #[error("convex hull of the parallelogram pair has {0} vertices, expected 6")]
    HexagonDegenerate(usize),

    #[error("hexagon is not centrally symmetric (defect {0:.3e})")]
    HexagonNotSymmetric(f64),

    #[error("covariogram is not centrally symmetric; symmetric reconstruction refused (max |det G + 1| = {0:.3e})")]
    NotSymmetric(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
