//! Certified eigenvalue bounds for the Dirichlet problem
//! `-y'' - lambda rho y = 0`, `y(0) = y(1) = 0`, where the weight `rho` is
//! the distributional derivative of a self-similar function given by a
//! finite parameter set.
//!
//! The certification path is exact rational arithmetic end to end: pencil
//! assembly, inertia counts and the bisection driver never touch floating
//! point. Floats appear only in reporting and in the [`oracle`] module,
//! which exists to catch implementation bugs, not to prove anything.

pub mod certify;
pub mod inertia;
pub mod oracle;
pub mod pencil;
pub mod scalar;
pub mod selfsim;

pub use certify::{
    bracket_eigenvalue, counting_bounds, negative_eigenvalues, test_side, BracketStatus,
    CountingBounds, EigenvalueBracket, TestRecord, Verdict,
};
pub use inertia::{index_of, inertia, InertiaResult};
pub use oracle::{approx_eigenvalues, OracleEstimate};
pub use pencil::{assemble, TridiagonalSymmetric};
pub use scalar::{parse_scalar, Rational};
pub use selfsim::{MomentData, ParameterDoc, SampledFunction, SimilaritySet, StepFunction};

/// Errors across the whole pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed scalar literal: {0:?}")]
    MalformedScalar(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid parameter set: {0}")]
    Validation(String),
    #[error("refinement produces {pieces} pieces, exceeding the cap of {cap}")]
    SizeCapExceeded { pieces: usize, cap: usize },
    #[error("degenerate moment denominator: {0}")]
    DegenerateMoments(String),
}
