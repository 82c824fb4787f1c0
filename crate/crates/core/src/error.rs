use thiserror::Error;

/// Errors raised by the tomography, phase-space and protocol routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {0} is not supported (expected 2 or 4)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix is not Hermitian (max |m - m^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("rotation axis must be a unit vector (norm {0})")]
    BadAxis(f64),

    #[error("Bloch vector has length {0} > 1")]
    UnphysicalBloch(f64),

    #[error("probabilities are not normalized (sum {0})")]
    NotNormalized(f64),

    #[error("probability table has a negative entry {0}")]
    NegativeProbability(f64),

    #[error("state is not physical (min eigenvalue {0:e})")]
    NonPhysicalState(f64),

    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("shot count must be at least 1")]
    InvalidShots,

    #[error("Wigner distribution indexing mismatch: expected {expected:?}, found {found:?}")]
    IndexingMismatch {
        expected: crate::wigner::Indexing,
        found: crate::wigner::Indexing,
    },

    #[error("no valid striation structure exists for this operator set")]
    NoValidStriation,

    #[error("transcript carries no announcements")]
    MissingAnnouncements,
}

pub type Result<T> = std::result::Result<T, Error>;
