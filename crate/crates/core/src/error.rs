use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names double as the diagnostic names printed by the CLI, so they
/// are kept stable.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {0} lies outside the open domain")]
    DomainViolation(Complex64),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("weight has a pole at {0}")]
    PoleAtPoint(Complex64),
    #[error("radial exponent {0} must exceed -2")]
    AlphaOutOfRange(f64),
    #[error("automorphism parameter |a| = {0} must be below 1")]
    InvalidAutomorphism(f64),
    #[error("series tail bound {tail_bound:e} exceeds the requested accuracy {requested:e}")]
    TruncationTooSmall { tail_bound: f64, requested: f64 },
    #[error("factor center {0} lies in the closed domain; use zero augmentation")]
    HolomorphyViolation(Complex64),
    #[error("diagonal value {diag:e} at center {center} is degenerate{}", term_label(.term))]
    DegenerateCenter {
        center: Complex64,
        diag: f64,
        term: Option<(usize, usize)>,
    },
    #[error("polynomial degree {0} exceeds the cap")]
    DegreeCap(usize),
    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),
    #[error("moment integral diverges: {0}")]
    DivergentMoment(String),
    #[error("Gram matrix condition estimate {0:e} exceeds the limit")]
    IllConditioned(f64),
    #[error("Newton iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("Newton iteration stalled linearly near {0}; multiple zero suspected")]
    MultipleZeroSuspected(Complex64),
    #[error("cell touches the domain boundary within the safety margin")]
    BoundaryTooClose,
    #[error("argument increment is not an integer multiple of 2*pi (winding {0})")]
    NonIntegralWinding(f64),
    #[error("winding count {winding} disagrees with derivative count {derivative}")]
    InconsistentOrder { winding: usize, derivative: usize },
    #[error("slice function does not vanish at {0}")]
    NotAZero(Complex64),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("tracking failed at index {index}: {reason}")]
    TrackingFailed { index: usize, reason: String },
}

fn term_label(term: &Option<(usize, usize)>) -> String {
    match term {
        Some((j, k)) => format!(" (term j={j}, k={k})"),
        None => String::new(),
    }
}

impl Error {
    /// Stable variant name for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DomainViolation(_) => "DomainViolation",
            Error::InvalidDomain(_) => "InvalidDomain",
            Error::InvalidWeight(_) => "InvalidWeight",
            Error::PoleAtPoint(_) => "PoleAtPoint",
            Error::AlphaOutOfRange(_) => "AlphaOutOfRange",
            Error::InvalidAutomorphism(_) => "InvalidAutomorphism",
            Error::TruncationTooSmall { .. } => "TruncationTooSmall",
            Error::HolomorphyViolation(_) => "HolomorphyViolation",
            Error::DegenerateCenter { .. } => "DegenerateCenter",
            Error::DegreeCap(_) => "DegreeCap",
            Error::UnsupportedWeight(_) => "UnsupportedWeight",
            Error::DivergentMoment(_) => "DivergentMoment",
            Error::IllConditioned(_) => "IllConditioned",
            Error::NoConvergence(_) => "NoConvergence",
            Error::MultipleZeroSuspected(_) => "MultipleZeroSuspected",
            Error::BoundaryTooClose => "BoundaryTooClose",
            Error::NonIntegralWinding(_) => "NonIntegralWinding",
            Error::InconsistentOrder { .. } => "InconsistentOrder",
            Error::NotAZero(_) => "NotAZero",
            Error::HypothesisUnmet(_) => "HypothesisUnmet",
            Error::TrackingFailed { .. } => "TrackingFailed",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
