//! Independent oracles and the verification suite built on them.
//!
//! Each check compares a production routine with something computed another
//! way: closed forms, brute-force grid minimization, the symplectic
//! eigenproblem, and exact diagonalization.

use serde::Serialize;

use crate::ed::{hp_convergence_scan, GapMode};
use crate::error::Result;
use crate::model::{branch_states, effective_energy, stationary_points, ModelParams, Stability};
use crate::modes::{frequencies_from_invariants, quadratic_form, symplectic_frequencies};
use crate::phase::{bistability_epsilon_max, critical_coupling};

/// Outer roots `±(Δ/4G)√((4G²/Δ)² − 1)` at `ε = 0`; `None` in the normal
/// phase.
pub fn superradiant_displacement(delta: f64, coupling: f64) -> Option<f64> {
    let r = 4.0 * coupling * coupling / delta;
    (r > 1.0).then(|| delta / (4.0 * coupling) * (r * r - 1.0).sqrt())
}

/// Saddle-node bias from the tangency conditions: the effective bias `u`
/// satisfies `Δ² + u² = (4G²Δ²)^{2/3}` and `ε* = |u − 4G²u/√(Δ² + u²)|`.
pub fn saddle_node_epsilon(delta: f64, coupling: f64) -> Option<f64> {
    let s2 = (4.0 * coupling * coupling * delta * delta).powf(2.0 / 3.0);
    let u2 = s2 - delta * delta;
    if u2 <= 0.0 {
        return None;
    }
    let u = u2.sqrt();
    Some((u - 4.0 * coupling * coupling * u / s2.sqrt()).abs())
}

/// Global minimum of `E(X)` on a uniform grid over `[−G − 0.1, G + 0.1]`,
/// returned as `(X, E)`.
pub fn grid_minimum(params: &ModelParams, points: usize) -> (f64, f64) {
    let bound = params.coupling() + 0.1;
    let step = 2.0 * bound / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let x = -bound + step * i as f64;
            (x, effective_energy(x, params))
        })
        .fold((0.0, f64::INFINITY), |best, p| if p.1 < best.1 { p } else { best })
}

/// Deliberate faults for checking that the suite can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign of the coupling term in the closed-form frequencies.
    FlipModeCouplingSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub include_ed: bool,
    pub fault: Fault,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            include_ed: true,
            fault: Fault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// The measured quantity compared against `tolerance`.
    pub metric: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, metric: f64, tolerance: f64, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            metric,
            tolerance,
            detail,
        }
    }

    fn below(name: &str, metric: f64, tolerance: f64, detail: String) -> Self {
        Self::new(name, metric, tolerance, metric < tolerance, detail)
    }

    fn failed(name: &str, tolerance: f64, detail: String) -> Self {
        Self::new(name, f64::NAN, tolerance, false, detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Linear grid of `n` points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Largest `|Δν|` between the closed-form and symplectic frequencies over
/// all stable branches of the `ε × G × Δ` grid.
pub fn symplectic_agreement(
    epsilons: &[f64],
    couplings: &[f64],
    deltas: &[f64],
    fault: Fault,
) -> Result<(f64, usize)> {
    let sign = match fault {
        Fault::None => 1.0,
        Fault::FlipModeCouplingSign => -1.0,
    };
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for &delta in deltas {
        for &coupling in couplings {
            for &eps in epsilons {
                let params = ModelParams::new(delta, eps, coupling)?;
                for point in stationary_points(&params) {
                    if point.stability != Stability::StableMinimum {
                        continue;
                    }
                    let form = quadratic_form(&point, &params)?;
                    let closed = match frequencies_from_invariants(&form, sign) {
                        Ok(f) => f,
                        Err(_) => return Ok((f64::INFINITY, compared)),
                    };
                    let sym = symplectic_frequencies(&form)?;
                    worst = worst
                        .max((closed.nu_minus - sym.nu_minus).abs())
                        .max((closed.nu_plus - sym.nu_plus).abs());
                    compared += 1;
                }
            }
        }
    }
    Ok((worst, compared))
}

fn check_displacement() -> CheckResult {
    let name = "closed_form_displacement";
    let tol = 1e-9;
    let mut worst: f64 = 0.0;
    for (delta, coupling) in [(1.0, 0.6), (1.0, 0.51), (0.2, 0.3), (2.0, 1.5), (0.5, 2.0)] {
        let params = ModelParams::new(delta, 0.0, coupling).unwrap();
        let Some(x0) = superradiant_displacement(delta, coupling) else {
            return CheckResult::failed(name, tol, format!("({delta}, {coupling}) not superradiant"));
        };
        let roots = stationary_points(&params);
        if roots.len() != 3 || roots[1].stability != Stability::UnstableMaximum {
            return CheckResult::failed(
                name,
                tol,
                format!("({delta}, {coupling}): expected three roots with X = 0 unstable"),
            );
        }
        worst = worst
            .max((roots[0].x_scaled + x0).abs() / x0)
            .max((roots[2].x_scaled - x0).abs() / x0);
    }
    CheckResult::below(name, worst, tol, "max relative deviation of the outer roots".into())
}

fn check_grid_minimum() -> CheckResult {
    let name = "grid_minimization";
    let points = 100_001;
    let mut worst: f64 = 0.0;
    let mut worst_step: f64 = 0.0;
    for (delta, eps, coupling) in [
        (1.0, 0.0, 0.4),
        (1.0, 0.5, 0.2),
        (1.0, 0.05, 0.6),
        (1.0, -0.1, 0.6),
        (0.2, 0.3, 0.3),
        (1.0, 1.2, 1.0),
    ] {
        let params = ModelParams::new(delta, eps, coupling).unwrap();
        let (xg, _) = grid_minimum(&params, points);
        let ground = branch_states(&params).ground;
        let step = 2.0 * (coupling + 0.1) / (points - 1) as f64;
        // Relative to the grid spacing.
        let off = (ground.x_scaled - xg).abs() / step;
        if off > worst {
            worst = off;
            worst_step = step;
        }
    }
    CheckResult::below(
        name,
        worst,
        1.0,
        format!("ground state within {worst:.3} grid steps of the grid minimum (step {worst_step:.2e})"),
    )
}

fn check_symplectic(fault: Fault) -> CheckResult {
    let name = "symplectic_agreement";
    let tol = 1e-10;
    let result = symplectic_agreement(
        &linspace(-1.5, 1.5, 50),
        &linspace(0.02, 1.5, 50),
        &[0.2, 0.5, 1.0, 2.0],
        fault,
    );
    match result {
        Ok((worst, n)) => CheckResult::below(name, worst, tol, format!("max |Δν| over {n} stable branches")),
        Err(e) => CheckResult::failed(name, tol, e.to_string()),
    }
}

fn check_saddle_node() -> CheckResult {
    let name = "saddle_node_boundary";
    let tol = 1e-8;
    let mut worst: f64 = 0.0;
    for (delta, coupling) in [(1.0, 0.6), (0.2, 0.3), (1.0, 1.0), (0.8, 0.7), (1.0, 0.51)] {
        let Some(closed) = saddle_node_epsilon(delta, coupling) else {
            return CheckResult::failed(name, tol, format!("({delta}, {coupling}) not superradiant"));
        };
        worst = worst.max((bistability_epsilon_max(delta, coupling) - closed).abs());
    }
    CheckResult::below(name, worst, tol, "bisected boundary vs tangency closed form".into())
}

fn check_critical_coupling() -> CheckResult {
    let worst = (critical_coupling(1.0f64) - 0.5).abs().max((critical_coupling(0.25f64) - 0.25).abs());
    CheckResult::below("critical_coupling", worst, 1e-12, "G_c = √Δ/2".into())
}

fn check_ed_normal() -> CheckResult {
    let name = "ed_hp_normal_phase";
    let tol = 0.05;
    let params = ModelParams::new(1.0, 0.0, 0.2).unwrap();
    match hp_convergence_scan(&params, &[8, 16, 32], 2, GapMode::Levels) {
        Ok(report) => {
            let errs: Vec<f64> = report.rows.iter().map(|r| r.max_rel_error).collect();
            let strictly = errs.windows(2).all(|w| w[1] < w[0]);
            let last = *errs.last().unwrap();
            CheckResult::new(
                name,
                last,
                tol,
                strictly && last < tol,
                format!("relative errors at N = 8, 16, 32: {errs:.4?}"),
            )
        }
        Err(e) => CheckResult::failed(name, tol, e.to_string()),
    }
}

fn check_ed_superradiant() -> CheckResult {
    let name = "ed_hp_superradiant";
    let tol = 0.10;
    let params = ModelParams::new(1.0, 0.05, 0.6).unwrap();
    match hp_convergence_scan(&params, &[8, 16, 32], 1, GapMode::Levels) {
        Ok(report) => {
            let errs: Vec<f64> = report.rows.iter().map(|r| r.max_rel_error).collect();
            let last = *errs.last().unwrap();
            CheckResult::new(
                name,
                last,
                tol,
                report.monotone && last < tol,
                format!("lowest gap vs ν− of the ground branch at N = 8, 16, 32: {errs:.4?}"),
            )
        }
        Err(e) => CheckResult::failed(name, tol, e.to_string()),
    }
}

pub fn run_verification(options: VerifyOptions) -> VerifyReport {
    let mut checks = vec![
        check_critical_coupling(),
        check_displacement(),
        check_grid_minimum(),
        check_saddle_node(),
        check_symplectic(options.fault),
    ];
    if options.include_ed {
        checks.push(check_ed_normal());
        checks.push(check_ed_superradiant());
    }
    VerifyReport { checks }
}
