use thiserror::Error;

/// Errors surfaced by the simulation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("collapse rate must be nonnegative, got {0}")]
    NegativeRate(f64),

    #[error("density matrix violates {property} (defect {defect:.3e})")]
    InvalidDensityMatrix { property: &'static str, defect: f64 },

    #[error("steady-state solve failed: {0}")]
    SingularSteadyState(String),

    #[error("adaptive step size underflow at t = {t:.6e}; problem too stiff for the tolerance")]
    StepSizeUnderflow { t: f64 },

    #[error("truncated level holds population {population:.3e}; raise the Fock cutoff")]
    TruncationLeakage { population: f64 },

    #[error("undefined on a vacuum state: {0}")]
    VacuumState(&'static str),

    #[error("effective rate {name} is negative ({value:.6e}); parameter set is outside the model's validity range")]
    UnphysicalRate { name: &'static str, value: f64 },

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("curve extraction failed: {0}")]
    Extraction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
