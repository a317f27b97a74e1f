//! Scalar abstraction shared by the mean-field and normal-mode code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the model is generic over (`f32` or `f64`).
///
/// The tolerance constants are the thresholds the classifiers use. They are
/// tied to the precision of the type: a bisection in `f32` cannot reach the
/// residuals an `f64` one does, so a single hard-coded cutoff would reject
/// every `f32` stationary point.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// `|dE/dX|` above this means the point is not stationary.
    const STATIONARY_TOL: f64;
    /// `|d²E/dX²|` below this means the point is degenerate.
    const DEGENERATE_TOL: f64;
    /// Linear terms of the expansion must vanish below this.
    const LINEAR_TERM_TOL: f64;
    /// Negative squared frequencies above `-ZERO_MODE_TOL` are clamped to 0.
    const ZERO_MODE_TOL: f64;
    /// Base step of one-sided finite differences in ε.
    const FD_STEP: f64;

    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const STATIONARY_TOL: f64 = 1e-8;
    const DEGENERATE_TOL: f64 = 1e-8;
    const LINEAR_TERM_TOL: f64 = 1e-9;
    const ZERO_MODE_TOL: f64 = 1e-12;
    const FD_STEP: f64 = 1e-6;
}

impl Real for f32 {
    const STATIONARY_TOL: f64 = 1e-4;
    const DEGENERATE_TOL: f64 = 1e-4;
    const LINEAR_TERM_TOL: f64 = 1e-4;
    const ZERO_MODE_TOL: f64 = 1e-5;
    const FD_STEP: f64 = 1e-2;
}
