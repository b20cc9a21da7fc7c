//! Exact decision procedures for intersective polynomial families.
//!
//! The crate covers four layers:
//!
//! * [`poly`]: exact rational polynomials, the input grammar, integrality
//!   tests and one-variable GCD with Bezout cofactors.
//! * [`intersect`] and [`cert`]: solvability modulo `k`, joint
//!   intersectivity scans, Hensel certificates and a standalone checker.
//! * [`lattice`] and [`torus`]: finite-index affine lattices, divisibility
//!   refinements and exact closures of polynomial orbits on tori.
//! * [`recurrence`]: finite-window density scans on explicit sets and circle
//!   rotations.
//!
//! The [`cli`] module wires these into the `intersective` binary.

pub mod arith;
pub mod cert;
pub mod cli;
pub mod intersect;
pub mod lattice;
pub mod linalg;
pub mod numeric;
pub mod poly;
pub mod recurrence;
pub mod torus;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] poly::ParseError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("family is empty or identically zero")]
    EmptyFamily,
    #[error("expected a one-variable polynomial, got {0} variables")]
    NotUnivariate(usize),
    #[error("polynomial is not integer-valued on its domain: {0}")]
    NotIntegral(String),
    #[error("polynomial must have integer coefficients")]
    NotIntegerCoefficients,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("lattice is not contained in the enclosing lattice")]
    NotSublattice,
    #[error("search budget exceeded (verified through {last_verified_bound})")]
    BudgetExceeded { last_verified_bound: u64 },
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("irrational label '{0}' appears more than once")]
    DuplicateLabel(String),
    #[error("irrational label '{0}' was not declared")]
    UndeclaredLabel(String),
    #[error("label '{0}' has no numeric value")]
    MissingNumericValue(String),
    #[error("degenerate set: {0}")]
    DegenerateSet(String),
    #[error("invalid number: {0}")]
    InvalidNumber(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SingularMatrix => "singular_matrix",
            Error::EmptyFamily => "empty_family",
            Error::NotUnivariate(_) => "not_univariate",
            Error::NotIntegral(_) => "not_integral",
            Error::NotIntegerCoefficients => "not_integer_coefficients",
            Error::NotPrime(_) => "not_prime",
            Error::InvalidModulus(_) => "invalid_modulus",
            Error::InvalidLattice(_) => "invalid_lattice",
            Error::NotSublattice => "not_sublattice",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Inconsistent(_) => "inconsistent",
            Error::PreconditionViolated(_) => "precondition_violated",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::UndeclaredLabel(_) => "undeclared_label",
            Error::MissingNumericValue(_) => "missing_numeric_value",
            Error::DegenerateSet(_) => "degenerate_set",
            Error::InvalidNumber(_) => "invalid_number",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
