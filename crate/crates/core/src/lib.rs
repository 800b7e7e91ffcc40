//! Geometry of the Siegel–Jacobi space: the Jacobi group action, its
//! invariant metric, closed-form inverses of the metric, and the
//! Levi-Civita connection.

pub mod connection;
pub mod error;
pub mod group;
pub mod inverse;
pub mod matlib;
pub mod metric;
pub mod verify;

pub use error::{Error, Result, SchurBlock};
pub use group::{JacobiGroupElement, JacobiPoint, SiegelPoint};
pub use inverse::CrossConvention;
pub use matlib::{Mat, SymMat};
pub use metric::{Chart, ChartVector, MetricParams};
