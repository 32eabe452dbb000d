//! Chart-based differential geometry engine for metric "siblings": a
//! Riemannian metric g and the Lorentzian metric g_L = g - 2 T# ⊗ T#
//! built from a unit-length field T that is geodesic with symmetrized
//! covariant differential.
//!
//! The crate parses closed-form metric components, differentiates them
//! exactly with second-order Taylor jets, computes the full curvature stack
//! (Christoffel, Riemann, Ricci, sectional), and verifies the identities
//! tying the two siblings together over deterministic sample sets. A small
//! gallery of worked geometries and a CLI sit on top.

pub mod config;
pub mod error;
pub mod expr;
pub mod gallery;
pub mod geometry;
pub mod identities;
pub mod jet;
pub mod linalg;
pub mod par;
pub mod sample;
pub mod sibling;
pub mod tensor;

pub use error::{EvalError, GalleryError, GeometryError, ParseError, SiblingError, TensorError};
pub use expr::Expr;
pub use geometry::{Chart, MetricField, Signature, VectorFieldSpec};
pub use sibling::SiblingPair;
