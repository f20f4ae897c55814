//! Mathieu functions of integer order, their radial counterparts through a
//! Bessel-product series and a WKB/Airy approximation, and Green functions for
//! a slit in a screen and for a strip.

pub mod angular;
pub mod error;
pub mod evaluator;
pub mod quad;
pub mod radial;
pub mod scattering;
pub mod special;
pub mod tridiag;
pub mod wkb;

pub use angular::{angular_eval, angular_pair, build_tables, build_tables_cached, CoefficientTable, SymmetryClass};
pub use error::{MathieuError, Result};
pub use evaluator::{Branch, Evaluator, EvaluatorConfig, RadialValue, ResidualReport};
pub use num_complex::Complex64;
pub use scattering::{
    far_field, fraunhofer, green_slit, green_strip, half_plane_identity, to_cartesian, to_elliptic, BoundaryCondition, EllipticPoint, FarField, FieldGrid, FieldValue,
    Geometry, GreenProblem, GreenSolver,
};
pub use wkb::{demo_cosh_well, DemoRegime, WkbDemoProblem};
