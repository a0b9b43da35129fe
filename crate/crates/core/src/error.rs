use thiserror::Error;

/// Errors produced by the lattice, covering and state machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RvbError {
    #[error("site {site} out of range for a lattice of {site_count} sites")]
    SiteOutOfRange { site: usize, site_count: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid covering: {0}")]
    InvalidCovering(String),

    #[error("no nearest-neighbour perfect matching exists on this lattice")]
    NoPerfectMatching,

    #[error("{what} exceeds the configured cap ({value} > {cap})")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("ensemble amplitudes cancel to a zero-norm state")]
    DegenerateEnsemble,

    #[error("state is not normalized (norm^2 = {0})")]
    Unnormalized(f64),

    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("parameter {name} = {value} outside its domain")]
    OutOfDomain { name: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, RvbError>;
