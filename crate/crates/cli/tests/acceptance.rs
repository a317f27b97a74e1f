//! Exit criteria. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};

use dicke_core::ed::{build_hamiltonian, excitation_spectrum, EdConfig};
use dicke_core::model::{effective_energy, stationary_points};
use dicke_core::modes::branch_spectrum;
use dicke_core::phase::{
    bistability_epsilon_max, critical_coupling, max_line_separation, metastable_decay_estimate,
    slope_at_symmetry,
};
use dicke_core::quartic::{quartic_saddle_node_tilt, quartic_stationary_points};
use dicke_core::verify::{grid_minimum, linspace, saddle_node_epsilon, superradiant_displacement, symplectic_agreement, Fault};
use dicke_core::{ModelParams, Stability};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn dicke(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_dicke"))
        .args(args)
        .output()
        .expect("run dicke");
    assert!(out.status.success(), "dicke {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn critical_coupling_values() -> Outcome {
    let a: f64 = critical_coupling(1.0);
    let b: f64 = critical_coupling(0.2);
    ensure(
        (a - 0.5).abs() <= 1e-12 && (b - 0.224).abs() <= 1e-3,
        format!("G_c(1) = {a}, G_c(0.2) = {b:.6}"),
    )
}

fn superradiant_displacement_roots() -> Outcome {
    let params = ModelParams::new(1.0, 0.0, 0.6).unwrap();
    let x0 = superradiant_displacement(1.0, 0.6).unwrap();
    let roots = stationary_points(&params);
    if roots.len() != 3 {
        return Err(format!("{} roots", roots.len()));
    }
    let rel = ((roots[0].x_scaled + x0).abs() / x0).max((roots[2].x_scaled - x0).abs() / x0);
    let origin_unstable = roots[1].x_scaled == 0.0 && roots[1].stability == Stability::UnstableMaximum;
    let (xg, eg) = grid_minimum(&params, 100_001);
    let grid_ok = (xg.abs() - x0).abs() < 2.0 * 1.4 / 100_000.0
        && eg <= effective_energy(0.0, &params);
    ensure(
        rel < 1e-9 && origin_unstable && grid_ok,
        format!("X = ±{x0:.5}, max relative deviation {rel:.2e}, X = 0 unstable: {origin_unstable}, grid minimum at {xg:.6}"),
    )
}

fn symplectic_grid() -> Outcome {
    let (worst, n) = symplectic_agreement(
        &linspace(-1.5, 1.5, 50),
        &linspace(0.02, 1.5, 50),
        &[0.2, 0.5, 1.0, 2.0],
        Fault::None,
    )
    .map_err(|e| e.to_string())?;
    ensure(worst < 1e-10, format!("max |Δν| = {worst:.2e} over {n} stable branches"))
}

fn line_count_signature() -> Outcome {
    let csv = dicke(&[
        "epsilon-sweep",
        "--delta",
        "1",
        "--coupling",
        "0.6",
        "--epsilon-range",
        "-1.5:1.5:301",
    ]);
    let text = String::from_utf8(csv).unwrap();
    let mut counts: Vec<(f64, usize)> = Vec::new();
    for line in text.lines().skip(1) {
        let mut fields = line.split(',');
        let eps: f64 = fields.next().unwrap().parse().unwrap();
        // Each branch row carries two frequencies.
        let lines = 2;
        match counts.last_mut() {
            Some((e, c)) if *e == eps => *c += lines,
            _ => counts.push((eps, lines)),
        }
    }
    let boundary = 0.14435;
    let step = 0.01;
    let mut bad = Vec::new();
    for &(eps, c) in &counts {
        if eps.abs() < boundary - step && c != 4 || eps.abs() > boundary + step && c != 2 {
            bad.push(eps);
        }
    }
    let bisected: f64 = bistability_epsilon_max(1.0, 0.6);
    let closed = saddle_node_epsilon(1.0, 0.6).unwrap();
    let diff = (bisected - closed).abs();
    ensure(
        counts.len() == 301 && bad.is_empty() && diff < 1e-8,
        format!(
            "{} grid points, misclassified {:?}, ε* bisected {bisected:.10} vs closed form {closed:.10} (|Δ| = {diff:.1e})",
            counts.len(),
            bad
        ),
    )
}

fn soft_mode_at_boundary() -> Outcome {
    let deltas = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let mut report = Vec::new();
    let mut ok = true;
    // Resonant superradiant couplings.
    for coupling in [0.6, 0.8] {
        let eps_star: f64 = bistability_epsilon_max(1.0, coupling);
        let mut nus = Vec::new();
        for d in deltas {
            let params = ModelParams::new(1.0, eps_star - d, coupling).unwrap();
            let s = branch_spectrum(&params).map_err(|e| e.to_string())?;
            let Some(m) = s.metastable_modes else {
                return Err(format!("no metastable branch at G = {coupling}, δ = {d:e}"));
            };
            nus.push(m.nu_minus);
        }
        let monotone = nus.windows(2).all(|w| w[1] < w[0]);
        let last = *nus.last().unwrap();
        ok &= monotone && last < 0.02;
        report.push(format!(
            "G = {coupling}: ν− = {} (monotone: {monotone})",
            nus.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ")
        ));
    }
    ensure(ok, format!("δ = 1e-2..1e-6, {}; need < 0.02 at δ = 1e-6", report.join("; ")))
}

fn slope_divergence() -> Outcome {
    let gc: f64 = critical_coupling(1.0);
    let ratios = linspace(1.01, 1.1, 10);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in &ratios {
        let g = r * gc;
        let (slope, _) = slope_at_symmetry(1.0, g).map_err(|e| e.to_string())?;
        xs.push((g - gc).ln());
        ys.push(slope.abs().ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    ensure((exponent + 1.0).abs() <= 0.1, format!("fitted exponent {exponent:.4}"))
}

fn upper_slope_plateau() -> Outcome {
    let gc: f64 = critical_coupling(1.0);
    let (_, above) = slope_at_symmetry(1.0, 2.0 * gc).map_err(|e| e.to_string())?;
    let (below_minus, below_plus) = slope_at_symmetry(1.0, 0.8 * gc).map_err(|e| e.to_string())?;
    ensure(
        (above - 1.0).abs() <= 0.05 && below_minus.abs() < 1e-6 && below_plus.abs() < 1e-6,
        format!("dν+/dε = {above:.5} at 2 G_c; ({below_minus}, {below_plus}) at 0.8 G_c"),
    )
}

fn w_shape_sign() -> Outcome {
    let small = max_line_separation(0.2, 1.05 * critical_coupling(0.2f64)).map_err(|e| e.to_string())?;
    let resonant = max_line_separation(1.0, 1.05 * critical_coupling(1.0f64)).map_err(|e| e.to_string())?;
    ensure(
        small < 0.0 && resonant >= 0.0,
        format!("Δ = 0.2: {small:.3e}, Δ = 1: {resonant:.3e}"),
    )
}

fn ed_hp_convergence() -> Outcome {
    let normal = ModelParams::new(1.0, 0.0, 0.2).unwrap();
    let hp = branch_spectrum(&normal).unwrap().ground_modes;
    let targets = [hp.nu_minus, hp.nu_plus];
    let mut errors = Vec::new();
    for n in [8u32, 16, 32] {
        let cfg = EdConfig::auto(&normal, n, 6).map_err(|e| e.to_string())?;
        let s = excitation_spectrum(&normal, &cfg).map_err(|e| e.to_string())?;
        let gaps = s.distinct_gaps(1e-9);
        let err = gaps
            .iter()
            .zip(&targets)
            .map(|(g, t)| (g - t).abs() / t)
            .fold(0.0, f64::max);
        errors.push(err);
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);

    let broken = ModelParams::new(1.0, 0.05, 0.6).unwrap();
    let nu_minus = branch_spectrum(&broken).unwrap().ground_modes.nu_minus;
    let cfg = EdConfig::auto(&broken, 32, 4).map_err(|e| e.to_string())?;
    let gap = excitation_spectrum(&broken, &cfg).map_err(|e| e.to_string())?.gaps()[0];
    let sr_err = (gap - nu_minus).abs() / nu_minus;

    ensure(
        monotone && errors[2] < 0.05 && sr_err < 0.10,
        format!(
            "normal phase errors at N = 8, 16, 32: {:.4}, {:.4}, {:.4}; ε = 0.05, G = 0.6: gap {gap:.4} vs ν− {nu_minus:.4} ({:.1}%)",
            errors[0],
            errors[1],
            errors[2],
            100.0 * sr_err
        ),
    )
}

fn bias_reversal_symmetry() -> Outcome {
    let cfg = EdConfig::new(8, 40, 2).unwrap();
    let mut worst: f64 = 0.0;
    for eps in [0.1, 0.3, 0.7] {
        let eig = |e: f64| {
            let h = build_hamiltonian(&ModelParams::new(1.0, e, 0.4).unwrap(), &cfg).unwrap();
            let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let (a, b) = (eig(eps), eig(-eps));
        worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
    }

    let mut mismatches = 0;
    let mut swapped = 0;
    for coupling in [0.2, 0.6, 0.8] {
        for eps in linspace(0.01, 0.5, 50) {
            let a = branch_spectrum(&ModelParams::new(1.0, eps, coupling).unwrap()).unwrap();
            let b = branch_spectrum(&ModelParams::new(1.0, -eps, coupling).unwrap()).unwrap();
            let same = a.ground_modes == b.ground_modes
                && a.metastable_modes == b.metastable_modes
                && a.branches.ground.x_scaled == -b.branches.ground.x_scaled
                && a.branches.metastable.map(|p| -p.x_scaled) == b.branches.metastable.map(|p| p.x_scaled);
            if !same {
                mismatches += 1;
            }
            if a.metastable_modes.is_some() {
                swapped += 1;
            }
        }
    }
    ensure(
        worst <= 1e-10 && mismatches == 0,
        format!("ED max eigenvalue shift {worst:.2e}; {mismatches} mean-field mismatches ({swapped} bistable points)"),
    )
}

fn quartic_regimes() -> Outcome {
    let shape = |eta: f64, tilt: f64| {
        let w = quartic_stationary_points(eta, tilt);
        (w.minima.len(), w.maxima.len())
    };
    let regimes = [shape(1.0, 0.0), shape(-1.0, 0.0), shape(-1.0, -0.3), shape(-1.0, -0.6)];
    let tilted = quartic_stationary_points(-1.0, -0.3);
    let (deep, shallow) = if tilted.minima[0].potential < tilted.minima[1].potential {
        (tilted.minima[0], tilted.minima[1])
    } else {
        (tilted.minima[1], tilted.minima[0])
    };
    let tilt: f64 = quartic_saddle_node_tilt(-1.0);
    let want = 4.0 / (3.0 * 6f64.sqrt());
    ensure(
        regimes == [(1, 0), (2, 1), (2, 1), (1, 0)]
            && shallow.curvature < deep.curvature
            && (tilt - want).abs() <= 1e-10,
        format!("(minima, maxima) = {regimes:?}, saddle-node tilt {tilt:.12}"),
    )
}

fn decay_estimate() -> Outcome {
    let at = |n: u32| {
        let p = ModelParams::new(1.0, 0.0, 0.75).unwrap().with_n_qubits(n).unwrap();
        metastable_decay_estimate(&p).unwrap().log10_rate_over_delta
    };
    let ten = at(10);
    let series: Vec<f64> = [5, 10, 20, 40].iter().map(|&n| at(n)).collect();
    let decreasing = series.windows(2).all(|w| w[1] < w[0]);
    ensure(
        (ten + 7.99).abs() <= 0.01 && decreasing,
        format!("log10(rate/Δ) at N = 10: {ten:.4}; N = 5, 10, 20, 40: {series:.3?}"),
    )
}

fn determinism() -> Outcome {
    let runs = [
        vec!["epsilon-sweep", "--delta", "1", "--coupling", "0.6"],
        vec!["coupling-sweep", "--delta", "0.2"],
    ];
    for args in &runs {
        let a = dicke(args);
        let b = dicke(args);
        let single = Command::new(env!("CARGO_BIN_EXE_dicke"))
            .args(args)
            .env("DICKE_THREADS", "1")
            .output()
            .unwrap()
            .stdout;
        if a != b || a != single {
            return Err(format!("`dicke {}` output differs between runs", args.join(" ")));
        }
    }
    Ok("epsilon-sweep and coupling-sweep byte-identical across runs and thread counts".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("critical coupling", critical_coupling_values),
        ("superradiant displacement", superradiant_displacement_roots),
        ("closed form vs symplectic frequencies", symplectic_grid),
        ("line-count signature", line_count_signature),
        ("soft mode at the bistability boundary", soft_mode_at_boundary),
        ("slope divergence exponent", slope_divergence),
        ("upper-mode slope plateau", upper_slope_plateau),
        ("W-shape sign", w_shape_sign),
        ("ED convergence to normal modes", ed_hp_convergence),
        ("bias-reversal symmetry", bias_reversal_symmetry),
        ("quartic well regimes", quartic_regimes),
        ("decay estimate", decay_estimate),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
