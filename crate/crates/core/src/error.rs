//! Error types shared across the library.

use thiserror::Error;

/// Errors raised while parsing an expression string.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negative exponent at byte {pos}")]
    NegativeExponent { pos: usize },
    #[error("fractional exponent only allowed on x, at byte {pos}")]
    FractionalExponent { pos: usize },
    #[error("series(...) needs an explicit order here (none configured), at byte {pos}")]
    MissingSeriesOrder { pos: usize },
    #[error("exponent out of range at byte {pos}")]
    ExponentOverflow { pos: usize },
}

/// Errors raised by polynomial algebra and the resolution pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("operation requires integer exponents (scale M = 1), got M = {scale}")]
    FractionalInput { scale: u64 },
    #[error("exponent arithmetic overflowed u64 range")]
    ExponentOverflow,
    #[error("negative exponent produced by substitution")]
    NegativeExponent,
    #[error("substitution of f(x) requires f free of y")]
    NotUnivariateInX,
    #[error("edge index {index} out of range ({count} compact edges)")]
    NoSuchEdge { index: usize, count: usize },
    #[error("projection triple is degenerate: {which}")]
    DegenerateProjection { which: String },
}

/// Typed failures of the resolution engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolveError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("polynomial is identically zero")]
    IdenticallyZero,
    #[error("irrational edge root in exact mode at path {path}: r isolated in [{lo}, {hi}]")]
    IrrationalBranch {
        path: String,
        lo: String,
        hi: String,
    },
    #[error("truncation budget {budget} exhausted without stabilization certificate at path {path}")]
    TruncationExhausted { path: String, budget: u64 },
    #[error("maximum recursion depth {depth} exceeded at path {path}")]
    DepthExceeded { depth: u64, path: String },
    #[error("stabilization invariant violated at path {path}: {msg}")]
    StabilizationFailed { path: String, msg: String },
}

/// Failures of the numerical verification harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("quadrature did not converge within the panel budget (estimate {estimate})")]
    NoConvergence { estimate: f64 },
    #[error("phase bound check failed: max |lambda S| = {max_phase} > {bound} on the witness box")]
    PhaseBound { max_phase: f64, bound: f64 },
    #[error("witness requires a nondegenerate phase (mult_pi finite)")]
    DegeneratePhase,
    #[error("slope fit needs at least {min} points with distinct abscissae, got {got}")]
    BadFitInput { min: usize, got: usize },
    #[error("point ({x}, {y}) lies within tolerance of a region boundary")]
    BoundaryProximity { x: f64, y: f64 },
    #[error("point ({x}, {y}) matched {count} leaves")]
    AmbiguousMembership { x: f64, y: f64, count: usize },
}
