//! Normal modes around a stable (or metastable) mean-field state.
//!
//! Rotating the spin frame onto the classical spin direction, shifting the
//! oscillator by its classical displacement and bosonizing the spin
//! fluctuations to leading order leaves two bilinearly coupled oscillators
//!
//! ```text
//! H ≈ γ (ỹ² + p̃_y²) + ω (x̃² + p̃_x²) + c x̃ ỹ,
//! γ = Δ cosθ + (ε + 4GX₀) sinθ,   c = 4G cosθ,
//! ```
//!
//! with quadratures normalised as `x = (a + a†)/2`. Its two frequencies are
//!
//! ```text
//! ν±² = ½ (γ² + ω² ± √((γ² − ω²)² + c² γ ω)).
//! ```

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{DickeError, Result};
use crate::model::{branch_states, BranchSet, ModelParams, Stability, StationaryPoint};
use crate::scalar::Real;

/// Coefficients of the reduced two-oscillator Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeQuadraticForm<T = f64> {
    /// Frequency of the spin-fluctuation mode.
    pub gamma: T,
    /// Oscillator frequency, 1 in internal units.
    pub omega: T,
    /// Coefficient of `x̃ ỹ`.
    pub coupling_xy: T,
    /// The point the Hamiltonian was expanded around, if any.
    pub origin: Option<StationaryPoint<T>>,
    /// The origin was a degenerate (saddle-node) point; the soft mode is
    /// exactly zero there and the expansion is only marginally valid.
    pub degenerate_origin: bool,
}

impl<T: Real> TwoModeQuadraticForm<T> {
    /// A form given directly by its coefficients.
    pub fn from_coefficients(gamma: T, omega: T, coupling_xy: T) -> Self {
        Self {
            gamma,
            omega,
            coupling_xy,
            origin: None,
            degenerate_origin: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeFrequencies<T = f64> {
    pub nu_minus: T,
    pub nu_plus: T,
}

/// Mode frequencies of the ground and (when present) metastable branch at
/// one bias value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSpectrum<T = f64> {
    pub epsilon: T,
    pub ground_modes: ModeFrequencies<T>,
    pub metastable_modes: Option<ModeFrequencies<T>>,
    pub branches: BranchSet<T>,
}

impl<T: Real> BranchSpectrum<T> {
    /// Number of spectral lines, 2 or 4.
    pub fn line_count(&self) -> usize {
        if self.metastable_modes.is_some() {
            4
        } else {
            2
        }
    }
}

/// Expands the Hamiltonian to second order around `point`.
pub fn quadratic_form<T: Real>(
    point: &StationaryPoint<T>,
    params: &ModelParams<T>,
) -> Result<TwoModeQuadraticForm<T>> {
    if point.stability == Stability::UnstableMaximum {
        return Err(DickeError::UnstableOrigin {
            x: point.x_scaled.to_f64_lossy(),
        });
    }
    let two = T::lit(2.0);
    let (sin, cos) = point.theta.sin_cos();
    let u = params.effective_bias(point.x_scaled);
    let g = params.coupling();

    // Both first-order terms vanish at a stationary point.
    let spin_linear = u * cos - params.delta() * sin;
    let field_linear = two * point.x_scaled - two * g * sin;
    let tol = T::lit(T::LINEAR_TERM_TOL);
    for linear in [spin_linear, field_linear] {
        if !(linear.abs() < tol) {
            return Err(DickeError::NotStationary {
                x: point.x_scaled.to_f64_lossy(),
                derivative: linear.to_f64_lossy(),
            });
        }
    }

    Ok(TwoModeQuadraticForm {
        gamma: params.delta() * cos + u * sin,
        omega: T::one(),
        coupling_xy: T::lit(4.0) * g * cos,
        origin: Some(*point),
        degenerate_origin: point.stability == Stability::Degenerate,
    })
}

/// Closed-form normal-mode frequencies.
///
/// `ν−²` is taken from the determinant `ν−²ν+² = γ²ω² − c²γω/4` rather than
/// from the difference of the two large terms, which keeps the soft mode
/// accurate near a bifurcation.
pub fn mode_frequencies<T: Real>(form: &TwoModeQuadraticForm<T>) -> Result<ModeFrequencies<T>> {
    frequencies_from_invariants(form, T::one())
}

/// Shared body of [`mode_frequencies`]; `sign` multiplies the coupling term
/// under the square root (1 for the physical formula).
pub(crate) fn frequencies_from_invariants<T: Real>(
    form: &TwoModeQuadraticForm<T>,
    sign: T,
) -> Result<ModeFrequencies<T>> {
    let two = T::lit(2.0);
    let TwoModeQuadraticForm {
        gamma: g,
        omega: w,
        coupling_xy: c,
        ..
    } = *form;
    let split = g * g - w * w;
    let disc = (split * split + sign * c * c * g * w).max(T::zero()).sqrt();
    let plus_sq = (g * g + w * w + disc) / two;
    let det = g * g * w * w - sign * c * c * g * w / T::lit(4.0);
    let minus_sq = if plus_sq > T::zero() { det / plus_sq } else { T::zero() };

    if minus_sq < -T::lit(T::ZERO_MODE_TOL) {
        return Err(DickeError::ImaginaryMode {
            nu_minus_sq: minus_sq.to_f64_lossy(),
        });
    }
    Ok(ModeFrequencies {
        nu_minus: minus_sq.max(T::zero()).sqrt(),
        nu_plus: plus_sq.sqrt(),
    })
}

/// Frequencies from the eigenvalues of the linear equations of motion.
///
/// With `[x̃, p̃_x] = [ỹ, p̃_y] = i/2` the Heisenberg equations for
/// `(x̃, p̃_x, ỹ, p̃_y)` are `ż = M z` with
///
/// ```text
///     ⎡  0    ω    0    0 ⎤
/// M = ⎢ −ω    0  −c/2   0 ⎥
///     ⎢  0    0    0    γ ⎥
///     ⎣−c/2   0   −γ    0 ⎦
/// ```
///
/// whose eigenvalues come in pairs `±iν`. The eigenproblem is solved in
/// `f64` through a real Schur decomposition.
pub fn symplectic_frequencies<T: Real>(form: &TwoModeQuadraticForm<T>) -> Result<ModeFrequencies<T>> {
    let g = form.gamma.to_f64_lossy();
    let w = form.omega.to_f64_lossy();
    let half_c = form.coupling_xy.to_f64_lossy() / 2.0;
    #[rustfmt::skip]
    let motion = Matrix4::new(
        0.0,     w,   0.0,     0.0,
        -w,      0.0, -half_c, 0.0,
        0.0,     0.0, 0.0,     g,
        -half_c, 0.0, -g,      0.0,
    );
    let eigenvalues = motion.complex_eigenvalues();
    let scale = 1.0 + g.abs().max(w.abs());
    let mut freqs = [0.0f64; 4];
    for (slot, lambda) in freqs.iter_mut().zip(eigenvalues.iter()) {
        if lambda.re.abs() > 1e-10 * scale {
            return Err(DickeError::DynamicalInstability { real_part: lambda.re });
        }
        *slot = lambda.im.abs();
    }
    freqs.sort_by(f64::total_cmp);
    Ok(ModeFrequencies {
        nu_minus: T::lit((freqs[0] + freqs[1]) / 2.0),
        nu_plus: T::lit((freqs[2] + freqs[3]) / 2.0),
    })
}

/// Mode frequencies of every stable branch at the parameters' bias.
pub fn branch_spectrum<T: Real>(params: &ModelParams<T>) -> Result<BranchSpectrum<T>> {
    let branches = branch_states(params);
    let ground_modes = mode_frequencies(&quadratic_form(&branches.ground, params)?)?;
    let metastable_modes = branches
        .metastable
        .map(|m| quadratic_form(&m, params).and_then(|f| mode_frequencies(&f)))
        .transpose()?;
    Ok(BranchSpectrum {
        epsilon: params.epsilon(),
        ground_modes,
        metastable_modes,
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::stationary_points;
    use approx::assert_relative_eq;

    fn params(delta: f64, epsilon: f64, coupling: f64) -> ModelParams {
        ModelParams::new(delta, epsilon, coupling).unwrap()
    }

    #[test]
    fn normal_phase_form_at_symmetry_point() {
        let p = params(1.0, 0.0, 0.2);
        let b = branch_states(&p);
        let form = quadratic_form(&b.ground, &p).unwrap();
        assert_eq!(form.gamma, 1.0);
        assert_relative_eq!(form.coupling_xy, 0.8, epsilon = 1e-15);
        assert!(!form.degenerate_origin);
    }

    #[test]
    fn superradiant_form() {
        let p = params(1.0, 0.0, 0.6);
        let form = quadratic_form(&branch_states(&p).ground, &p).unwrap();
        let cos = form.origin.unwrap().theta.cos();
        assert_relative_eq!(cos, 1.0 / 1.44, epsilon = 1e-12);
        assert_relative_eq!(form.gamma, 1.44, epsilon = 1e-12);
    }

    #[test]
    fn weak_coupling_form_is_bare_qubit() {
        let p = params(1.0, 0.5, 1e-9);
        let form = quadratic_form(&branch_states(&p).ground, &p).unwrap();
        assert_relative_eq!(form.gamma, 1.25f64.sqrt(), epsilon = 1e-9);
        assert!(form.coupling_xy.abs() < 1e-8);
    }

    #[test]
    fn rejects_unstable_origin_and_non_stationary_points() {
        let p = params(1.0, 0.0, 0.6);
        let pts = stationary_points(&p);
        assert!(matches!(
            quadratic_form(&pts[1], &p),
            Err(DickeError::UnstableOrigin { .. })
        ));
        let mut off = pts[2];
        off.x_scaled += 1e-3;
        assert!(matches!(quadratic_form(&off, &p), Err(DickeError::NotStationary { .. })));
    }

    #[test]
    fn closed_form_examples() {
        let m = mode_frequencies(&TwoModeQuadraticForm::from_coefficients(1.0, 1.0, 0.8)).unwrap();
        assert_relative_eq!(m.nu_plus, 1.4f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(m.nu_minus, 0.6f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(m.nu_plus, 1.183_215_956_619_923, epsilon = 1e-14);
        assert_relative_eq!(m.nu_minus, 0.774_596_669_241_483, epsilon = 1e-14);

        let m = mode_frequencies(&TwoModeQuadraticForm::from_coefficients(1.44, 1.0, 4.0 * 0.6 / 1.44))
            .unwrap();
        assert_relative_eq!(m.nu_plus, 1.634_554_626_730_403, epsilon = 1e-13);
        assert_relative_eq!(m.nu_minus, 0.633_901_547_745_572_8, epsilon = 1e-13);

        let m = mode_frequencies(&TwoModeQuadraticForm::from_coefficients(2.0, 1.0, 0.0)).unwrap();
        assert_eq!((m.nu_minus, m.nu_plus), (1.0, 2.0));
    }

    #[test]
    fn imaginary_mode_is_flagged() {
        // det = 1 − c²/4 < 0 for c > 2.
        let form = TwoModeQuadraticForm::from_coefficients(1.0, 1.0, 2.5);
        assert!(matches!(mode_frequencies(&form), Err(DickeError::ImaginaryMode { .. })));
        assert!(matches!(
            symplectic_frequencies(&form),
            Err(DickeError::DynamicalInstability { .. })
        ));
        // Exactly marginal: clamped to zero.
        let m = mode_frequencies(&TwoModeQuadraticForm::from_coefficients(1.0, 1.0, 2.0)).unwrap();
        assert_eq!(m.nu_minus, 0.0);
    }

    #[test]
    fn symplectic_examples() {
        for (g, w, c) in [(1.0f64, 1.0, 0.8), (1.44, 1.0, 4.0 * 0.6 / 1.44), (0.3, 1.0, 0.5)] {
            let form = TwoModeQuadraticForm::from_coefficients(g, w, c);
            let a = mode_frequencies(&form).unwrap();
            let b = symplectic_frequencies(&form).unwrap();
            assert!((a.nu_minus - b.nu_minus).abs() < 1e-10);
            assert!((a.nu_plus - b.nu_plus).abs() < 1e-10);
        }
        let b = symplectic_frequencies(&TwoModeQuadraticForm::from_coefficients(2.0f64, 1.0, 0.0)).unwrap();
        assert!((b.nu_minus - 1.0).abs() < 1e-12 && (b.nu_plus - 2.0).abs() < 1e-12);
    }

    #[test]
    fn line_counts() {
        assert_eq!(branch_spectrum(&params(1.0, 0.3, 0.2)).unwrap().line_count(), 2);
        assert_eq!(branch_spectrum(&params(1.0, 0.05, 0.6)).unwrap().line_count(), 4);
        let s = branch_spectrum(&params(1.0, 0.0, 0.6)).unwrap();
        assert_eq!(s.line_count(), 4);
        let m = s.metastable_modes.unwrap();
        assert!((m.nu_minus - s.ground_modes.nu_minus).abs() < 1e-10);
        assert!((m.nu_plus - s.ground_modes.nu_plus).abs() < 1e-10);
    }

    #[test]
    fn decoupled_limit() {
        for eps in [-1.3, -0.2, 0.0, 0.4, 2.0] {
            let s = branch_spectrum(&params(0.8, eps, 1e-7)).unwrap();
            let mut want = [1.0, (0.64f64 + eps * eps).sqrt()];
            want.sort_by(f64::total_cmp);
            assert!((s.ground_modes.nu_minus - want[0]).abs() < 1e-6);
            assert!((s.ground_modes.nu_plus - want[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn generic_single_precision() {
        let p = ModelParams::<f32>::new(1.0, 0.0, 0.6).unwrap();
        let s = branch_spectrum(&p).unwrap();
        assert!((s.ground_modes.nu_plus - 1.634_554_6).abs() < 1e-4);
        assert!((s.ground_modes.nu_minus - 0.633_901_5).abs() < 1e-4);
    }
}
