//! Covariogram calculus for planar convex bodies.
//!
//! The covariogram of a convex body K maps each lag vector x to the area of
//! K ∩ (K + x). This crate evaluates it exactly for polygons and numerically
//! for strictly convex support-series bodies, exposes the inscribed-
//! parallelogram representation of its gradient and Hessian, machine-checks
//! the determinant and orthogonality identities those carry, decides central
//! symmetry through the Monge-Ampère condition det G ≡ -1, tests hexagon
//! inscription, and reconstructs boundary data (normal pairs, boundary arcs,
//! symmetric bodies) from covariogram values alone.
//!
//! Everything is a pure function over immutable values; all public types are
//! `Send + Sync` and safe to share across threads.

pub mod error;
pub mod geom;

pub mod cov;
pub mod identities;
pub mod parallelogram;
pub mod reconstruct;
pub mod sampling;
pub mod symmetry;

pub use error::{Error, Result};
pub use geom::{
    convex_intersection, det2, difference_body, is_affine_diameter, polygon_area, reflect_about,
    rot90, rot90_inv, wrap_angle, BodyJson, BoundaryArc, ConvexBody, ConvexPolygon, Mat2,
    SupportBody, Vec2,
};

pub use cov::chord::{chord_length_cdf, ChordLengthDistribution};
pub use cov::grid::{covariogram_grid, CovariogramGrid};
pub use cov::oracle::{fd_gradient, fd_hessian, CovariogramOracle};
pub use cov::spectral::{convolution_check, ConvolutionReport};
pub use cov::{covariogram_value, cross_covariogram};
pub use identities::{
    det_relations, hessian_analytic, orthogonality_residual, plucker, DetRelations, HessianReport,
};
pub use parallelogram::{
    gradient_analytic, inscribed_parallelogram, oblique_project, quadrilateral_q,
    InscribedParallelogram, NormalFanQuadrilateral,
};
pub use reconstruct::{
    compare_bodies, conjugate_geometric, equality_harness, find_conjugate, grid_oracle,
    normal_pair, normal_pair_ground_truth, reconstruct_symmetric, trace_arc, ArcTrace,
    BodyComparison, NormalPair, ReconstructionReport, TraceStatus,
};
pub use symmetry::{
    affine_diameter_diagonals, central_symmetry_test, hexagon_from_parallelograms,
    hexagon_inscription_test, HexagonTest, SymmetricHexagon, SymmetrySource, SymmetryVerdict,
};
