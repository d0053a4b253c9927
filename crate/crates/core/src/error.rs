use thiserror::Error;

/// Failures raised by the library.
///
/// Variants map one-to-one onto the failure modes callers are expected to
/// distinguish; [`Error::is_numerical`] separates input problems from
/// failures of the computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("aliasing: {nodes} DFT nodes cannot resolve a coefficient window of length {window}")]
    Alias { nodes: usize, window: usize },

    #[error("matrix is numerically singular at DFT node {node}")]
    SingularNode { node: usize },

    #[error("singular matrix: pivot {pivot:.3e} in column {column} below threshold")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("density sample {index} is non-positive ({value:.3e}) and flooring is disabled")]
    NonPositiveSample { index: usize, value: f64 },

    #[error("iteration diverged at step {iteration} (residual {residual:.3e})")]
    Divergence { iteration: usize, residual: f64 },

    #[error("denominator vanishes on the unit circle (min modulus {modulus:.3e})")]
    PoleOnCircle { modulus: f64 },

    #[error("V(0) is ill-conditioned (rcond {rcond:.3e}); increase N")]
    IllConditionedV0 { rcond: f64 },

    #[error("negative squared modulus {value:.3e} at node {node}")]
    NegativePower { node: usize, value: f64 },

    #[error("linear system is singular or ill-conditioned at every DFT node")]
    AllNodesSingular,

    #[error("SingularDelta: the JLE-3 system is singular ({reason})")]
    SingularDelta { reason: String },

    #[error(
        "IllConditionedDelta: the JLE-3 system has rcond {rcond:.3e}; det S likely has zeros near the unit circle"
    )]
    IllConditionedDelta { rcond: f64 },

    #[error("factor is singular at the origin")]
    SingularAtZero,

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("cannot read or write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed coefficient file: {0}")]
    Schema(String),

    #[error("{algorithm} failed at m={m} ({step}): {source}")]
    AtStep {
        algorithm: &'static str,
        m: usize,
        step: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_step(self, algorithm: &'static str, m: usize, step: &'static str) -> Error {
        match self {
            e @ Error::AtStep { .. } => e,
            other => Error::AtStep { algorithm, m, step, source: Box::new(other) },
        }
    }

    /// True for failures of the computation itself, as opposed to bad
    /// input files, parameters or names.
    pub fn is_numerical(&self) -> bool {
        !matches!(self.root(), Error::Io { .. } | Error::Schema(_) | Error::UnknownFixture(_) | Error::InvalidParams(_))
    }

    /// The innermost error, skipping step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
