use thiserror::Error;

/// Errors raised by constructions in this crate.
///
/// Verification failures are never errors; they are entries in a
/// [`crate::report::VerificationReport`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("tridiagonal matrix is not symmetrizable: off-diagonal product at index {index} is not positive")]
    NonSymmetrizable { index: usize },

    #[error("operator maps basis element {column} to degree {degree}, outside the basis span")]
    SpaceNotPreserved { column: usize, degree: usize },

    #[error("recurrence coefficient has a vanishing denominator at index {index}")]
    ParameterPole { index: i64 },

    #[error("tau2 = -tau1 gives a first-order operator")]
    DegenerateTau,

    #[error("tau1 + tau2 = {sum}, expected 1")]
    NotNormalized { sum: String },

    #[error("operator is not Heun shaped: {0}")]
    NotHeunShaped(String),

    #[error("no affine normalization achieves tau1 + tau2 = 1")]
    NotNormalizable,

    #[error("operation not available for the {0} case")]
    UnsupportedCase(&'static str),

    #[error("truncation fails: {0}")]
    Truncation(String),

    #[error("Wilson parameters are underdetermined")]
    UnderdeterminedParameters,

    #[error("Wilson parameters are irrational (discriminant {discriminant} is not a rational square)")]
    IrrationalParameters { discriminant: String },

    #[error("no quadratic-algebra relation fits: {relation} violated at coefficient {coefficient}")]
    FitInconsistent { relation: String, coefficient: String },

    #[error("structure constants are not determined by the realization (rank {rank} of 8)")]
    FitUnderdetermined { rank: usize },

    #[error("degenerate spectrum: eigenvalue of multiplicity {multiplicity}")]
    DegenerateSpectrum { multiplicity: usize },

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable variant name for machine-readable error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSymmetrizable { .. } => "NonSymmetrizable",
            Error::SpaceNotPreserved { .. } => "SpaceNotPreserved",
            Error::ParameterPole { .. } => "ParameterPole",
            Error::DegenerateTau => "DegenerateTau",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NotHeunShaped(_) => "NotHeunShaped",
            Error::NotNormalizable => "NotNormalizable",
            Error::UnsupportedCase(_) => "UnsupportedCase",
            Error::Truncation(_) => "Truncation",
            Error::UnderdeterminedParameters => "UnderdeterminedParameters",
            Error::IrrationalParameters { .. } => "IrrationalParameters",
            Error::FitInconsistent { .. } => "FitInconsistent",
            Error::FitUnderdetermined { .. } => "FitUnderdetermined",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::ParseRational(_) => "ParseRational",
            Error::Dimension(_) => "Dimension",
        }
    }
}
