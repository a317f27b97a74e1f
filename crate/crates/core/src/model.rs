//! Classical (mean-field) stationary states of the biased Dicke model.
//!
//! Units: ħ = ω = 1, every energy is in units of ħω. With the collective
//! coupling `G = √N g` and the scaled displacement `X = x/√N` the problem is
//! independent of `N`. Minimizing the collective-spin Hamiltonian over the
//! spin direction at fixed `X` leaves the one-dimensional energy
//!
//! ```text
//! E(X)/N = X² − ½ √(Δ² + (ε + 4GX)²)
//! ```
//!
//! whose stationary points satisfy the self-consistency condition
//! `X = G (ε + 4GX) / √(Δ² + (ε + 4GX)²)`.

use serde::Serialize;

use crate::error::{DickeError, Result};
use crate::roots::bisect;
use crate::scalar::Real;

/// Dimensionless model parameters. The oscillator frequency is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams<T = f64> {
    delta: T,
    epsilon: T,
    coupling: T,
    n_qubits: Option<u32>,
}

impl<T: Real> ModelParams<T> {
    /// `delta` is the qubit gap Δ, `epsilon` the bias ε and `coupling` the
    /// collective coupling G.
    pub fn new(delta: T, epsilon: T, coupling: T) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(DickeError::InvalidParams(format!("delta must be > 0, got {delta}")));
        }
        if !epsilon.is_finite() {
            return Err(DickeError::InvalidParams(format!("epsilon must be finite, got {epsilon}")));
        }
        if !(coupling >= T::zero()) || !coupling.is_finite() {
            return Err(DickeError::InvalidParams(format!(
                "coupling must be >= 0, got {coupling}"
            )));
        }
        Ok(Self {
            delta,
            epsilon,
            coupling,
            n_qubits: None,
        })
    }

    pub fn with_n_qubits(mut self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(DickeError::InvalidParams("n_qubits must be >= 1".into()));
        }
        self.n_qubits = Some(n);
        Ok(self)
    }

    /// Same parameters at a different bias.
    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn coupling(&self) -> T {
        self.coupling
    }

    pub fn n_qubits(&self) -> Option<u32> {
        self.n_qubits
    }

    /// Single-qubit coupling `g = G/√N`, when `N` is known.
    pub fn single_qubit_coupling(&self) -> Option<T> {
        self.n_qubits
            .map(|n| self.coupling / T::from_u32(n).unwrap().sqrt())
    }

    /// Effective bias `ε + 4GX` felt by each qubit at displacement `X`.
    pub fn effective_bias(&self, x_scaled: T) -> T {
        self.epsilon + T::lit(4.0) * self.coupling * x_scaled
    }

    fn qubit_splitting(&self, x_scaled: T) -> T {
        self.delta.hypot(self.effective_bias(x_scaled))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stability {
    StableMinimum,
    UnstableMaximum,
    Degenerate,
}

impl Stability {
    pub fn is_stable(self) -> bool {
        self == Stability::StableMinimum
    }

    fn from_curvature<T: Real>(curvature: T) -> Self {
        let tol = T::lit(T::DEGENERATE_TOL);
        if curvature > tol {
            Stability::StableMinimum
        } else if curvature < -tol {
            Stability::UnstableMaximum
        } else {
            Stability::Degenerate
        }
    }
}

/// A solution of the self-consistency equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPoint<T = f64> {
    /// `X = x/√N`.
    pub x_scaled: T,
    /// Spin rotation angle, `atan2(ε + 4GX, Δ)`.
    pub theta: T,
    pub energy_per_qubit: T,
    pub stability: Stability,
}

impl<T: Real> StationaryPoint<T> {
    fn at(x_scaled: T, params: &ModelParams<T>, stability: Stability) -> Self {
        Self {
            x_scaled,
            theta: params.effective_bias(x_scaled).atan2(params.delta),
            energy_per_qubit: effective_energy(x_scaled, params),
            stability,
        }
    }
}

/// Stationary points split into ground, metastable and unstable branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSet<T = f64> {
    pub ground: StationaryPoint<T>,
    pub metastable: Option<StationaryPoint<T>>,
    pub unstable: Option<StationaryPoint<T>>,
    /// A degenerate (saddle-node) point that is not the ground state.
    pub degenerate: Option<StationaryPoint<T>>,
}

/// `E/N = X² − ½√(Δ² + (ε+4GX)²)`.
pub fn effective_energy<T: Real>(x_scaled: T, params: &ModelParams<T>) -> T {
    x_scaled * x_scaled - params.qubit_splitting(x_scaled) / T::lit(2.0)
}

/// `d(E/N)/dX`.
pub fn energy_slope<T: Real>(x_scaled: T, params: &ModelParams<T>) -> T {
    T::lit(2.0) * self_consistency_residual(x_scaled, params)
}

/// `d²(E/N)/dX² = 2 − 8G²Δ² / (Δ² + (ε+4GX)²)^{3/2}`.
pub fn energy_curvature<T: Real>(x_scaled: T, params: &ModelParams<T>) -> T {
    let s = params.qubit_splitting(x_scaled);
    let g = params.coupling;
    let d = params.delta;
    T::lit(2.0) - T::lit(8.0) * g * g * d * (d / (s * s * s))
}

/// `f(X) = X − G u/√(Δ² + u²)` with `u = ε + 4GX`; zero at stationary points.
pub fn self_consistency_residual<T: Real>(x_scaled: T, params: &ModelParams<T>) -> T {
    let u = params.effective_bias(x_scaled);
    x_scaled - params.coupling * u / params.delta.hypot(u)
}

fn residual_slope<T: Real>(x_scaled: T, params: &ModelParams<T>) -> T {
    energy_curvature(x_scaled, params) / T::lit(2.0)
}

/// Sign classification of the curvature at a stationary point.
pub fn classify_stability<T: Real>(x_scaled: T, params: &ModelParams<T>) -> Result<Stability> {
    let slope = energy_slope(x_scaled, params);
    if !(slope.abs() <= T::lit(T::STATIONARY_TOL)) {
        return Err(DickeError::NotStationary {
            x: x_scaled.to_f64_lossy(),
            derivative: slope.to_f64_lossy(),
        });
    }
    Ok(Stability::from_curvature(energy_curvature(x_scaled, params)))
}

/// All real stationary points, ascending in `X`.
///
/// `f(X) = X − G u/√(Δ²+u²)` has slope `1 − 4G²Δ²/(Δ²+u²)^{3/2}`, which is
/// smallest at `u = 0` and increasing in `|u|`. So `f` is either monotone or
/// increasing–decreasing–increasing around two turning points, and each
/// monotone piece holds at most one root. The turning points are located by
/// bisection and every piece is bisected for its root. A turning point where
/// `f` vanishes to rounding is a double root and is reported once, as
/// `Degenerate`.
///
/// Negative biases are solved as `|ε|` and mirrored, so the `ε → −ε`
/// symmetry `X → −X`, `θ → −θ` holds bit for bit.
pub fn stationary_points<T: Real>(params: &ModelParams<T>) -> Vec<StationaryPoint<T>> {
    if params.epsilon < T::zero() {
        let mirrored = params.with_epsilon(-params.epsilon);
        return stationary_points(&mirrored)
            .into_iter()
            .rev()
            .map(|p| StationaryPoint {
                x_scaled: -p.x_scaled,
                theta: -p.theta,
                ..p
            })
            .collect();
    }
    let g = params.coupling;
    let margin = T::lit(0.1);
    let lo = -g - margin;
    let hi = g + margin;
    let f = |x: T| self_consistency_residual(x, params);
    let classify = |x: T| {
        StationaryPoint::at(x, params, Stability::from_curvature(energy_curvature(x, params)))
    };

    // f(lo) ≤ −margin < 0 < margin ≤ f(hi): every root lies in [−G, G].
    let turning = turning_points(params);
    let Some((xa, xb)) = turning else {
        return vec![classify(bisect(f, lo, hi))];
    };

    let tol = T::lit(64.0) * T::epsilon() * (T::one() + g);
    let (fa, fb) = (f(xa), f(xb));
    let near_a = fa.abs() <= tol;
    let near_b = fb.abs() <= tol;
    let degenerate = |x: T| StationaryPoint::at(x, params, Stability::Degenerate);

    if near_a && near_b {
        // Triple root (critical coupling at the symmetry point).
        let mid = if fa.signum() != fb.signum() { bisect(f, xa, xb) } else { (xa + xb) / T::lit(2.0) };
        return vec![degenerate(mid)];
    }

    let mut points = Vec::with_capacity(3);
    if fa > tol {
        points.push(classify(bisect(f, lo.min(xa), xa)));
    }
    if near_a {
        points.push(degenerate(xa));
    }
    if fa > tol && fb < -tol {
        points.push(classify(bisect(f, xa, xb)));
    }
    if near_b {
        points.push(degenerate(xb));
    }
    if fb < -tol {
        points.push(classify(bisect(f, xb, hi.max(xb))));
    }
    points
}

/// Turning points `X_a < X_b` of the self-consistency residual, if any.
fn turning_points<T: Real>(params: &ModelParams<T>) -> Option<(T, T)> {
    let g = params.coupling;
    if g == T::zero() {
        return None;
    }
    let df = |x: T| residual_slope(x, params);
    let four_g = T::lit(4.0) * g;
    // u = 0 at the centre.
    let centre = -params.epsilon / four_g;
    if df(centre) >= T::zero() {
        return None;
    }
    let mut width = params.delta / four_g;
    while df(centre - width) < T::zero() {
        width = width * T::lit(2.0);
    }
    let xa = bisect(df, centre - width, centre);
    let mut width = params.delta / four_g;
    while df(centre + width) < T::zero() {
        width = width * T::lit(2.0);
    }
    let xb = bisect(df, centre, centre + width);
    Some((xa, xb))
}

/// Partition of the stationary points into ground and metastable states.
///
/// The ground state is the stable point of lowest energy. At exactly ε = 0
/// the two superradiant wells are degenerate; the `X > 0` one is labelled
/// ground.
pub fn branch_states<T: Real>(params: &ModelParams<T>) -> BranchSet<T> {
    let points = stationary_points(params);
    let stable: Vec<_> = points.iter().copied().filter(|p| p.stability.is_stable()).collect();
    let unstable = points
        .iter()
        .copied()
        .find(|p| p.stability == Stability::UnstableMaximum);
    let mut degenerate: Vec<_> = points
        .iter()
        .copied()
        .filter(|p| p.stability == Stability::Degenerate)
        .collect();

    let (ground, metastable) = match stable.as_slice() {
        [] => {
            // Only reachable at a degenerate point (e.g. G = G_c, ε = 0).
            let idx = lowest_energy(&degenerate);
            (degenerate.remove(idx), None)
        }
        [only] => (*only, None),
        [a, b, ..] => {
            let a_is_ground = if params.epsilon == T::zero() || a.energy_per_qubit == b.energy_per_qubit {
                a.x_scaled > b.x_scaled
            } else {
                a.energy_per_qubit < b.energy_per_qubit
            };
            if a_is_ground {
                (*a, Some(*b))
            } else {
                (*b, Some(*a))
            }
        }
    };

    BranchSet {
        ground,
        metastable,
        unstable,
        degenerate: degenerate.first().copied(),
    }
}

fn lowest_energy<T: Real>(points: &[StationaryPoint<T>]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.energy_per_qubit < points[best].energy_per_qubit {
            best = i;
        }
    }
    best
}
