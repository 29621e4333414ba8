use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point lies on the branch core where the map is undefined")]
    BranchCore,
    #[error("degenerate tangent frame (Gram determinant {0:e})")]
    DegenerateFrame(f64),
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}, error {error:e})")]
    Quadrature { tol: f64, estimate: f64, error: f64 },
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("no region of the table matches (c1={c1}, c2={c2}, m={m})")]
    NoRegion { c1: f64, c2: f64, m: u32 },
    #[error("config error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },
    #[error("invalid configuration:\n{0}")]
    ConfigInvalid(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
