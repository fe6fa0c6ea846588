//! A Hilbert-space backend in dimensions 2 and 4. Measurement by the Born
//! rule yields domains; density operators, phase identification and the
//! Schmidt decomposition decide which sequent a state supports.

mod assertion;
mod measure;
mod state;

pub use assertion::{emit_assertion, schmidt, Assertion, AssertionInput, SchmidtData};
pub use measure::{
    density_of, focusing_status, measure, measure_as, phase_equiv, purity, rationalize, DensityOp, IdentificationMode,
};
pub use state::{Basis, BasisJson, QState};

use crate::syntax::DomainError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("unsupported dimension {0}; only 2 and 4 are supported")]
    UnsupportedDimension(usize),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("basis is not orthonormal: {0}")]
    NotOrthonormal(String),
    #[error("degenerate measurement: {0}")]
    Degenerate(String),
    #[error("unknown state label {0}")]
    UnknownLabel(String),
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("cannot read {what}: {msg}")]
    Parse { what: &'static str, msg: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
}
