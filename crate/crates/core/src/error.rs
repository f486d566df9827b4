use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("edge weights are not symmetric between {u} and {v}: {w_uv} vs {w_vu}")]
    Asymmetry {
        u: String,
        v: String,
        w_uv: f64,
        w_vu: f64,
    },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("vertex {vertex} has nonpositive measure {value}")]
    NonpositiveMeasure { vertex: String, value: f64 },
    #[error("graph would have {requested} vertices, cap is {cap}")]
    SizeCapExceeded { requested: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("subset is empty")]
    EmptySubset,
    #[error("function vanishes identically")]
    ZeroFunction,
    #[error("function is not supported inside the given subset")]
    SupportViolation,
    #[error("S2 block at vertex {vertex} has eigenvalue {eigenvalue:e} < 0; dimension too small?")]
    IndefiniteElimination { vertex: usize, eigenvalue: f64 },
    #[error("enumeration over {size} vertices exceeds the cap of {cap}; use the sweep bound")]
    EnumerationCapExceeded { size: usize, cap: usize },
    #[error("curvature {0} is not positive")]
    NonpositiveCurvature(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("iteration did not converge: {0}")]
    Nonconvergence(String),
    #[error("construction violates the intrinsic condition at vertex {vertex} (slack {slack:e})")]
    IntrinsicViolation { vertex: usize, slack: f64 },
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
