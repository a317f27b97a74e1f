use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DickeError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("X = {x} is not a stationary point (|dE/dX| = {derivative:e})")]
    NotStationary { x: f64, derivative: f64 },

    #[error("cannot expand around an unstable maximum at X = {x}")]
    UnstableOrigin { x: f64 },

    #[error("imaginary mode: nu_minus^2 = {nu_minus_sq:e}")]
    ImaginaryMode { nu_minus_sq: f64 },

    #[error("dynamical instability: eigenvalue real part {real_part:e}")]
    DynamicalInstability { real_part: f64 },

    #[error("no metastable state: coupling {coupling} is not above the critical value {critical}")]
    NotSuperradiant { coupling: f64, critical: f64 },

    #[error("number of qubits is required for this quantity")]
    MissingQubitCount,

    #[error("finite-difference extrapolation did not converge: {0}")]
    NonConvergence(String),

    #[error("matrix dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("Fock cutoff not converged: eigenvalue shift {shift:e} >= tolerance {tol:e}")]
    CutoffNotConverged { shift: f64, tol: f64 },
}

pub type Result<T, E = DickeError> = std::result::Result<T, E>;
