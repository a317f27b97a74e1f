pub mod ed;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod modes;
pub mod phase;
pub mod quartic;
pub mod roots;
pub mod scalar;
pub mod verify;

pub use ed::{EdConfig, EdSpectrum, GapMode, HpConvergenceReport};
pub use ensemble::{EnsembleFixedPoint, EnsembleSpec, Qubit, Visibility};
pub use error::{DickeError, Result};
pub use model::{BranchSet, ModelParams, Stability, StationaryPoint};
pub use modes::{BranchSpectrum, ModeFrequencies, TwoModeQuadraticForm};
pub use phase::{DecayEstimate, Phase, PhaseVerdict};
pub use quartic::{CriticalPoint, QuarticWell};
pub use scalar::Real;
pub use verify::{run_verification, CheckResult, Fault, VerifyOptions, VerifyReport};

pub type ModelParamsF64 = ModelParams<f64>;
pub type ModelParamsF32 = ModelParams<f32>;
pub type StationaryPointF64 = StationaryPoint<f64>;
pub type StationaryPointF32 = StationaryPoint<f32>;
pub type BranchSetF64 = BranchSet<f64>;
pub type BranchSetF32 = BranchSet<f32>;
pub type ModeFrequenciesF64 = ModeFrequencies<f64>;
pub type ModeFrequenciesF32 = ModeFrequencies<f32>;
pub type BranchSpectrumF64 = BranchSpectrum<f64>;
pub type BranchSpectrumF32 = BranchSpectrum<f32>;
pub type QuarticWellF64 = QuarticWell<f64>;
pub type QuarticWellF32 = QuarticWell<f32>;
pub type EnsembleSpecF64 = EnsembleSpec<f64>;
pub type EnsembleSpecF32 = EnsembleSpec<f32>;
