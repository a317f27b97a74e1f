//! Phase-diagram quantities derived from the mean-field branches.

use serde::Serialize;

use crate::error::{DickeError, Result};
use crate::model::{stationary_points, ModelParams};
use crate::modes::{branch_spectrum, ModeFrequencies};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    Normal,
    Superradiant,
}

/// The superradiant phase is the region with two stable states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseVerdict {
    pub phase: Phase,
    pub n_stable: usize,
}

/// `G_c = √(Δω)/2`.
pub fn critical_coupling<T: Real>(delta: T) -> T {
    delta.sqrt() / T::lit(2.0)
}

pub fn phase_at<T: Real>(params: &ModelParams<T>) -> PhaseVerdict {
    let n_stable = stationary_points(params)
        .iter()
        .filter(|p| p.stability.is_stable())
        .count();
    PhaseVerdict {
        phase: if n_stable == 2 { Phase::Superradiant } else { Phase::Normal },
        n_stable,
    }
}

fn three_roots<T: Real>(delta: T, epsilon: T, coupling: T) -> bool {
    ModelParams::new(delta, epsilon, coupling)
        .map(|p| stationary_points(&p).len() == 3)
        .unwrap_or(false)
}

/// Largest `|ε|` with a metastable state; 0 unless `G > G_c`.
///
/// Bisects on the number of stationary points (3 below the boundary, 1
/// above) until the bracket stops shrinking.
pub fn bistability_epsilon_max<T: Real>(delta: T, coupling: T) -> T {
    if !(coupling > critical_coupling(delta)) || !three_roots(delta, T::zero(), coupling) {
        return T::zero();
    }
    let two = T::lit(2.0);
    let mut lo = T::zero();
    let mut hi = T::lit(4.0) * coupling * coupling + delta;
    while three_roots(delta, hi, coupling) {
        lo = hi;
        hi = hi * two;
    }
    loop {
        let mid = lo + (hi - lo) / two;
        if mid == lo || mid == hi {
            return lo;
        }
        if three_roots(delta, mid, coupling) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `(dν−/dε, dν+/dε)` at ε → 0⁺ along the ground branch, the one that
/// continues to ε → ∞.
///
/// One-sided forward differences at steps `h, h/2, h/4` combined by two
/// Richardson levels. In the normal phase the ground branch is even in ε
/// and the slopes are exactly zero.
pub fn slope_at_symmetry<T: Real>(delta: T, coupling: T) -> Result<(T, T)> {
    let critical = critical_coupling(delta);
    if coupling < critical {
        return Ok((T::zero(), T::zero()));
    }
    if coupling == critical {
        return Err(DickeError::NonConvergence("slope of nu_minus diverges at G_c".into()));
    }
    let h = T::lit(T::FD_STEP);
    let eps_max = bistability_epsilon_max(delta, coupling);
    if !(eps_max > T::lit(10.0) * h) {
        return Err(DickeError::NonConvergence(format!(
            "bistable window {eps_max} too narrow for step {h}"
        )));
    }

    let base = ModelParams::new(delta, T::zero(), coupling)?;
    let modes = |eps: T| branch_spectrum(&base.with_epsilon(eps)).map(|s| s.ground_modes);
    let m0 = modes(T::zero())?;
    let steps = [h, h / T::lit(2.0), h / T::lit(4.0)];
    let mut minus = [T::zero(); 3];
    let mut plus = [T::zero(); 3];
    for (i, &step) in steps.iter().enumerate() {
        let m = modes(step)?;
        minus[i] = (m.nu_minus - m0.nu_minus) / step;
        plus[i] = (m.nu_plus - m0.nu_plus) / step;
    }
    Ok((richardson(minus)?, richardson(plus)?))
}

/// Two Richardson levels over forward differences at `h, h/2, h/4`.
fn richardson<T: Real>(d: [T; 3]) -> Result<T> {
    let two = T::lit(2.0);
    let first_coarse = two * d[1] - d[0];
    let first_fine = two * d[2] - d[1];
    let second = (T::lit(4.0) * first_fine - first_coarse) / T::lit(3.0);
    let spread = (second - first_fine).abs();
    let tol = T::lit(1e-4) * second.abs() + T::lit(1e-6);
    if !(spread <= tol) {
        return Err(DickeError::NonConvergence(format!(
            "Richardson levels disagree by {spread}"
        )));
    }
    Ok(second)
}

/// `ν+(ground) − ν+(metastable)` just inside the bistable window.
///
/// Evaluated at `ε* − min(10⁻⁸, ε*/2)`; the metastable branch vanishes at
/// ε* itself. Negative values mean the metastable ν+ line lies above the
/// ground one at the edge of the window (W-shaped lines).
pub fn max_line_separation<T: Real>(delta: T, coupling: T) -> Result<T> {
    let critical = critical_coupling(delta);
    let eps_max = bistability_epsilon_max(delta, coupling);
    if !(eps_max > T::zero()) {
        return Err(DickeError::NotSuperradiant {
            coupling: coupling.to_f64_lossy(),
            critical: critical.to_f64_lossy(),
        });
    }
    let floor = T::lit(1e3) * T::epsilon() * eps_max;
    let mut offset = T::lit(1e-8).max(floor).min(eps_max / T::lit(2.0));
    let base = ModelParams::new(delta, T::zero(), coupling)?;
    for _ in 0..60 {
        let spectrum = branch_spectrum(&base.with_epsilon(eps_max - offset))?;
        if let Some(meta) = spectrum.metastable_modes {
            return Ok(spectrum.ground_modes.nu_plus - meta.nu_plus);
        }
        offset = offset * T::lit(2.0);
    }
    Err(DickeError::NonConvergence(
        "no metastable branch found below the bistability boundary".into(),
    ))
}

/// `ν±` at ε = 0 on the ground branch.
pub fn symmetry_point_frequencies<T: Real>(delta: T, coupling: T) -> Result<ModeFrequencies<T>> {
    let params = ModelParams::new(delta, T::zero(), coupling)?;
    Ok(branch_spectrum(&params)?.ground_modes)
}

/// Order-of-magnitude decay rate of the metastable state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayEstimate<T = f64> {
    /// `log₁₀(rate/Δ)`.
    pub log10_rate_over_delta: T,
    /// The estimate is a rough one. This flag is additionally raised when
    /// the rate comes out above Δ, where the estimate has lost its meaning.
    pub exceeds_gap: bool,
}

/// `Δ [ωΔ/(Ng)²]^N exp(−2Ng²/ω)` with `g = G/√N`, evaluated in log domain:
///
/// ```text
/// log₁₀(rate/Δ) = N log₁₀(ωΔ/(N G²)) − 2G²/(ω ln 10)
/// ```
pub fn metastable_decay_estimate<T: Real>(params: &ModelParams<T>) -> Result<DecayEstimate<T>> {
    let n = params.n_qubits().ok_or(DickeError::MissingQubitCount)?;
    let critical = critical_coupling(params.delta());
    let g = params.coupling();
    if !(g > critical) {
        return Err(DickeError::NotSuperradiant {
            coupling: g.to_f64_lossy(),
            critical: critical.to_f64_lossy(),
        });
    }
    let n = T::from_u32(n).unwrap();
    let barrier_ratio = params.delta() / (n * g * g);
    let log10_rate = n * barrier_ratio.log10() - T::lit(2.0) * g * g / T::LN_10();
    Ok(DecayEstimate {
        log10_rate_over_delta: log10_rate,
        exceeds_gap: log10_rate > T::zero(),
    })
}
