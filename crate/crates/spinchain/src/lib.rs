//! Exact computational engine for rational `gl(N)` spin chains.
//!
//! The crate builds finite dimensional `gl(N)` representations, fused rational
//! R-matrices, transfer matrices and their difference or differential operator
//! pencils, Bethe vectors for XXX-type chains, weight functions and quadratic
//! Hamiltonians for Gaudin models, Shapovalov-type bilinear forms, a damped
//! Newton solver for Bethe equations, and scaling-limit expansions connecting
//! the XXX and Gaudin families.
//!
//! Almost everything is computed in exact rational arithmetic; floating point
//! enters only through the root solver and a few numerically checked limits.

pub mod scalars;
pub mod linalg;
pub mod reps;
pub mod rmatrix;
pub mod yangian;
pub mod diffop;
pub mod bethe_xxx;
pub mod gaudin;
pub mod forms;
pub mod solver;
pub mod limits;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Wedge power or transfer index outside `0..=N`.
    #[error("rank {rank} is not valid for gl({n_gl})")]
    InvalidRank { n_gl: usize, rank: usize },
    /// Modules over different `gl(N)` were combined.
    #[error("modules built over gl({left}) and gl({right}) cannot be combined")]
    MismatchedN { left: usize, right: usize },
    /// No singular vector exists for the requested weight.
    #[error("no highest weight vector for weight {0}")]
    NoHighestWeightVector(String),
    /// A spectral parameter collided with an inhomogeneity (possibly shifted).
    #[error("evaluation point {point} hits a pole (inhomogeneity shifted by {shift})")]
    PoleAtEvaluationPoint { point: String, shift: i64 },
    /// A requested sample point sits on a pole of the expression.
    #[error("sample point {0} is a pole of the expression")]
    PoleAtSample(String),
    /// An operator expected to preserve a subspace failed to do so.
    #[error("operator does not preserve the expected subspace ({0})")]
    NotInvariant(String),
    /// Held-out samples are inconsistent with the declared degree bound.
    #[error("interpolation exceeded the declared degree bound {bound}")]
    DegreeBoundExceeded { bound: usize },
    /// Bethe root configuration with a vanishing structural denominator.
    #[error("coincident Bethe roots: {0}")]
    CoincidentRoots(String),
    /// Roots fail the off-diagonality requirement.
    #[error("root configuration is not off-diagonal: {0}")]
    NotOffDiagonal(String),
    /// The constructed Bethe vector is identically zero.
    #[error("Bethe vector vanishes for this configuration")]
    ZeroBetheVector,
    /// A twist matrix fails a required non-degeneracy condition.
    #[error("degenerate twist: {0}")]
    DegenerateTwist(String),
    /// Evaluation points required to be distinct coincide.
    #[error("coincident evaluation points: {0}")]
    CoincidentEvaluationPoints(String),
    /// The intertwiner does not exist or is not unique at this argument.
    #[error("intertwiner degenerates at u = {at}: {detail}")]
    DegenerateAt { at: String, detail: String },
    /// A form or solution space expected to be one dimensional was not.
    #[error("solution space has dimension {0}, expected 1")]
    NonUnique(usize),
    /// The Newton iteration found no root from any start.
    #[error("no start converged within {max_iter} iterations (best residual {best:e})")]
    NoConvergence { max_iter: usize, best: f64 },
    /// Incompatible dimensions in user supplied data.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
