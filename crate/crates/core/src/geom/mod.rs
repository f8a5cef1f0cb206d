//! Exact 2-D primitives, convex body representations, convex clipping,
//! difference bodies, and affine-diameter tests.

pub mod body;
pub mod polygon;
pub mod support;
pub mod vec;

pub use body::{
    difference_body, is_affine_diameter, reflect_about, BodyJson, BoundaryArc, ConvexBody,
};
pub use polygon::{convex_intersection, polygon_area, ConvexPolygon};
pub use support::{wrap_angle, SupportBody};
pub use vec::{det2, rot90, rot90_inv, Mat2, Vec2};
