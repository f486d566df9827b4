pub mod curvature;
pub mod error;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod isoperimetry;
pub mod linalg;
pub mod maxflow;
pub mod metric;
pub mod operators;
pub mod report;
pub mod semigroup;
pub mod spectral;
pub mod suite;

pub use error::{Error, Result};
