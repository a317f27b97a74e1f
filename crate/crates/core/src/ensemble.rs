//! Mean field of an inhomogeneous qubit ensemble.
//!
//! Each qubit sits in its ground state with respect to its own effective
//! bias `εᵢ + 4gᵢx`, and the oscillator displacement (unscaled, `x`) feels
//! the summed force of all qubits:
//!
//! ```text
//! x = Σᵢ gᵢ (εᵢ + 4gᵢx) / √(Δᵢ² + (εᵢ + 4gᵢx)²)
//! ```

use serde::Serialize;

use crate::error::{DickeError, Result};
use crate::model::Stability;
use crate::roots::scan_roots;
use crate::scalar::Real;

const SCAN_SAMPLES: usize = 4096;

/// Visibility thresholds on `g_eff/δε`, the quantitative reading of `≫`.
pub const RESOLVABLE_RATIO: f64 = 10.0;
pub const UNRESOLVABLE_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Qubit<T = f64> {
    pub delta: T,
    pub epsilon: T,
    /// Single-qubit coupling `gᵢ`.
    pub g: T,
}

/// Per-qubit parameters. Summary statistics are computed on demand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSpec<T = f64> {
    qubits: Vec<Qubit<T>>,
}

impl<T: Real> EnsembleSpec<T> {
    pub fn new(qubits: Vec<Qubit<T>>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(DickeError::InvalidParams("ensemble has no qubits".into()));
        }
        for (i, q) in qubits.iter().enumerate() {
            if !(q.delta > T::zero()) || !q.delta.is_finite() {
                return Err(DickeError::InvalidParams(format!(
                    "qubit {i}: delta must be > 0, got {}",
                    q.delta
                )));
            }
            if !q.epsilon.is_finite() || !q.g.is_finite() {
                return Err(DickeError::InvalidParams(format!("qubit {i}: non-finite parameter")));
            }
        }
        Ok(Self { qubits })
    }

    /// `n` identical qubits.
    pub fn homogeneous(n: usize, delta: T, epsilon: T, g: T) -> Result<Self> {
        Self::new(vec![Qubit { delta, epsilon, g }; n])
    }

    pub fn qubits(&self) -> &[Qubit<T>] {
        &self.qubits
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    fn mean(&self, field: impl Fn(&Qubit<T>) -> T) -> T {
        let sum = self.qubits.iter().fold(T::zero(), |acc, q| acc + field(q));
        sum / T::from_usize(self.len()).unwrap()
    }

    pub fn delta_bar(&self) -> T {
        self.mean(|q| q.delta)
    }

    pub fn epsilon_bar(&self) -> T {
        self.mean(|q| q.epsilon)
    }

    pub fn g_bar(&self) -> T {
        self.mean(|q| q.g)
    }

    /// Population standard deviation of the biases, `δε`.
    pub fn epsilon_spread(&self) -> T {
        let mean = self.epsilon_bar();
        self.mean(|q| (q.epsilon - mean) * (q.epsilon - mean)).sqrt()
    }

    /// The same ensemble with every bias negated.
    pub fn mirrored(&self) -> Self {
        Self {
            qubits: self
                .qubits
                .iter()
                .map(|q| Qubit {
                    epsilon: -q.epsilon,
                    ..*q
                })
                .collect(),
        }
    }

    /// `x − Σᵢ gᵢuᵢ/√(Δᵢ² + uᵢ²)`.
    pub fn residual(&self, x: T) -> T {
        let four = T::lit(4.0);
        let force = self.qubits.iter().fold(T::zero(), |acc, q| {
            let u = q.epsilon + four * q.g * x;
            acc + q.g * u / q.delta.hypot(u)
        });
        x - force
    }

    /// `d(residual)/dx = 1 − Σᵢ 4gᵢ²Δᵢ²/(Δᵢ² + uᵢ²)^{3/2}`; half the curvature
    /// of the summed effective energy.
    pub fn residual_slope(&self, x: T) -> T {
        let four = T::lit(4.0);
        let stiffness = self.qubits.iter().fold(T::zero(), |acc, q| {
            let u = q.epsilon + four * q.g * x;
            let s = q.delta.hypot(u);
            acc + four * q.g * q.g * q.delta * (q.delta / (s * s * s))
        });
        T::one() - stiffness
    }

    /// `E(x) = x² − ½ Σᵢ √(Δᵢ² + uᵢ²)`.
    pub fn effective_energy(&self, x: T) -> T {
        let four = T::lit(4.0);
        let spins = self.qubits.iter().fold(T::zero(), |acc, q| {
            acc + q.delta.hypot(q.epsilon + four * q.g * x)
        });
        x * x - spins / T::lit(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleFixedPoint<T = f64> {
    /// Oscillator displacement `x` (not scaled by `√N`).
    pub x: T,
    pub stability: Stability,
}

impl<T> EnsembleFixedPoint<T> {
    pub fn is_stable(&self) -> bool {
        self.stability == Stability::StableMinimum
    }
}

/// All real fixed points, ascending in `x`.
///
/// Dense scan of the residual over `|x| ≤ Σᵢ|gᵢ| + 0.1` with 4096 samples,
/// bisection on sign changes, and tangency detection inside cells.
pub fn ensemble_fixed_points<T: Real>(spec: &EnsembleSpec<T>) -> Vec<EnsembleFixedPoint<T>> {
    let bound = spec.qubits.iter().fold(T::zero(), |acc, q| acc + q.g.abs()) + T::lit(0.1);
    let tangent_tol = T::lit(64.0) * T::epsilon() * (T::one() + bound);
    let degenerate_tol = T::lit(T::DEGENERATE_TOL);
    scan_roots(
        |x| spec.residual(x),
        |x| spec.residual_slope(x),
        -bound,
        bound,
        SCAN_SAMPLES,
        tangent_tol,
    )
    .into_iter()
    .map(|root| {
        let curvature = T::lit(2.0) * spec.residual_slope(root.x);
        let stability = if root.tangent || curvature.abs() <= degenerate_tol {
            Stability::Degenerate
        } else if curvature > T::zero() {
            Stability::StableMinimum
        } else {
            Stability::UnstableMaximum
        };
        EnsembleFixedPoint { x: root.x, stability }
    })
    .collect()
}

/// `g_eff = √N ḡ Δ̄/√(Δ̄² + ε̄²)`, the minimum gap of the qubit–oscillator
/// avoided crossing.
pub fn effective_coupling<T: Real>(spec: &EnsembleSpec<T>) -> T {
    let n = T::from_usize(spec.len()).unwrap();
    let delta = spec.delta_bar();
    n.sqrt() * spec.g_bar() * delta / delta.hypot(spec.epsilon_bar())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Visibility {
    Resolvable,
    Marginal,
    Unresolvable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingVisibility<T = f64> {
    /// `g_eff/δε`; infinite when the biases have no spread.
    pub ratio: T,
    pub verdict: Visibility,
}

/// Resolvable above `g_eff/δε = 10`, unresolvable below `0.1`.
pub fn classify_visibility<T: Real>(g_eff: T, spread: T) -> CrossingVisibility<T> {
    if spread == T::zero() {
        return CrossingVisibility {
            ratio: T::infinity(),
            verdict: Visibility::Resolvable,
        };
    }
    let ratio = g_eff / spread;
    let verdict = if ratio > T::lit(RESOLVABLE_RATIO) {
        Visibility::Resolvable
    } else if ratio < T::lit(UNRESOLVABLE_RATIO) {
        Visibility::Unresolvable
    } else {
        Visibility::Marginal
    };
    CrossingVisibility { ratio, verdict }
}

pub fn avoided_crossing_observable<T: Real>(spec: &EnsembleSpec<T>) -> CrossingVisibility<T> {
    classify_visibility(effective_coupling(spec), spec.epsilon_spread())
}
