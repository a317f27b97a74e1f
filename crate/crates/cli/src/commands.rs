//! One table builder per subcommand.

use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use dicke_core::ensemble::{avoided_crossing_observable, effective_coupling, ensemble_fixed_points};
use dicke_core::model::branch_states;
use dicke_core::modes::branch_spectrum;
use dicke_core::phase::{
    bistability_epsilon_max, critical_coupling, max_line_separation, metastable_decay_estimate,
    phase_at, slope_at_symmetry, symmetry_point_frequencies, Phase,
};
use dicke_core::quartic::{quartic_stationary_points, CriticalPoint};
use dicke_core::verify::{run_verification, Fault, VerifyOptions};
use dicke_core::{EnsembleSpec, ModelParams, Qubit, Stability, StationaryPoint, Visibility};

use crate::error::CliError;
use crate::settings::Settings;
use crate::table::{Cell, Table};

pub const SPECTRUM_COLUMNS: &[&str] = &[
    "epsilon",
    "branch",
    "nu_minus",
    "nu_plus",
    "x_scaled",
    "theta",
    "energy_per_qubit",
    "stable",
];

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::StableMinimum => "stable_minimum",
        Stability::UnstableMaximum => "unstable_maximum",
        Stability::Degenerate => "degenerate",
    }
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::Normal => "normal",
        Phase::Superradiant => "superradiant",
    }
}

fn spectrum_row(eps: f64, branch: &str, nu: Option<(f64, f64)>, p: &StationaryPoint) -> Vec<Cell> {
    vec![
        eps.into(),
        branch.into(),
        nu.map(|n| n.0).into(),
        nu.map(|n| n.1).into(),
        p.x_scaled.into(),
        p.theta.into(),
        p.energy_per_qubit.into(),
        p.stability.is_stable().into(),
    ]
}

/// Rows for one bias value: the ground row, and a metastable row where the
/// metastable branch exists.
fn spectrum_rows(delta: f64, coupling: f64, eps: f64) -> Result<Vec<Vec<Cell>>, CliError> {
    let params = ModelParams::new(delta, eps, coupling)?;
    let mut rows = Vec::with_capacity(2);
    match branch_spectrum(&params) {
        Ok(s) => {
            let g = s.ground_modes;
            rows.push(spectrum_row(eps, "ground", Some((g.nu_minus, g.nu_plus)), &s.branches.ground));
            if let (Some(m), Some(p)) = (s.metastable_modes, s.branches.metastable) {
                rows.push(spectrum_row(eps, "metastable", Some((m.nu_minus, m.nu_plus)), &p));
            }
        }
        // Frequencies are left empty where the expansion fails, e.g. exactly
        // at a bifurcation.
        Err(_) => {
            let b = branch_states(&params);
            rows.push(spectrum_row(eps, "ground", None, &b.ground));
            if let Some(p) = b.metastable {
                rows.push(spectrum_row(eps, "metastable", None, &p));
            }
        }
    }
    Ok(rows)
}

fn collect_rows<F>(points: &[f64], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(f64) -> Result<Vec<Vec<Cell>>, CliError> + Sync,
{
    // Indexed parallel collect keeps grid order.
    let chunks: Vec<Result<Vec<Vec<Cell>>, CliError>> = points.par_iter().map(|&x| f(x)).collect();
    let mut rows = Vec::new();
    for chunk in chunks {
        rows.extend(chunk?);
    }
    Ok(rows)
}

pub fn epsilon_sweep(s: &Settings) -> Result<Table, CliError> {
    let (delta, coupling) = (s.delta()?, s.coupling()?);
    let grid = s.epsilon_range()?.points();
    let mut table = Table::new(SPECTRUM_COLUMNS);
    table.rows = collect_rows(&grid, |eps| spectrum_rows(delta, coupling, eps))?;
    Ok(table)
}

fn ok_or_empty<T>(r: dicke_core::Result<T>, f: impl FnOnce(T) -> f64) -> Cell {
    r.map(f).ok().into()
}

pub fn coupling_sweep(s: &Settings) -> Result<Table, CliError> {
    let delta = s.delta()?;
    ModelParams::new(delta, 0.0, 0.0)?;
    let gc = critical_coupling(delta);
    let grid = s.coupling_range()?.points();
    let mut table = Table::new(&[
        "g_over_gc",
        "slope_minus",
        "slope_plus",
        "eps_max",
        "max_sep",
        "nu_minus_sym",
        "nu_plus_sym",
    ]);
    table.rows = collect_rows(&grid, |ratio| {
        let coupling = ratio * gc;
        if coupling < 0.0 {
            return Err(CliError::Config("coupling range must be non-negative".into()));
        }
        let slopes = slope_at_symmetry(delta, coupling);
        let nu = symmetry_point_frequencies(delta, coupling);
        let eps_max = bistability_epsilon_max(delta, coupling);
        let sep = if eps_max > 0.0 {
            max_line_separation(delta, coupling).ok().into()
        } else {
            Cell::Empty
        };
        Ok(vec![vec![
            ratio.into(),
            slopes.as_ref().ok().map(|s| s.0).into(),
            slopes.as_ref().ok().map(|s| s.1).into(),
            eps_max.into(),
            sep,
            nu.as_ref().ok().map(|n| n.nu_minus).into(),
            ok_or_empty(nu, |n| n.nu_plus),
        ]])
    })?;
    Ok(table)
}

pub fn phase_diagram(s: &Settings) -> Result<Table, CliError> {
    let delta = s.delta()?;
    ModelParams::new(delta, 0.0, 0.0)?;
    let gc = critical_coupling(delta);
    let ratios = s.coupling_range()?.points();
    let epsilons = s.epsilon_range()?.points();
    let mut table = Table::new(&["g_over_gc", "epsilon", "phase", "n_stable", "line_count", "eps_max"]);
    table.rows = collect_rows(&ratios, |ratio| {
        let coupling = ratio * gc;
        let eps_max = bistability_epsilon_max(delta, coupling);
        epsilons
            .iter()
            .map(|&eps| {
                let params = ModelParams::new(delta, eps, coupling)?;
                let verdict = phase_at(&params);
                let lines = if verdict.n_stable >= 2 { 4usize } else { 2 };
                Ok(vec![
                    ratio.into(),
                    eps.into(),
                    phase_name(verdict.phase).into(),
                    verdict.n_stable.into(),
                    lines.into(),
                    eps_max.into(),
                ])
            })
            .collect()
    })?;
    Ok(table)
}

pub fn symmetry_tables(s: &Settings) -> Result<Table, CliError> {
    let delta = s.delta()?;
    let eps = s.epsilon();
    ModelParams::new(delta, eps, 0.0)?;
    let gc = critical_coupling(delta);
    let grid = s.coupling_range()?.points();
    let mut table = Table::new(&[
        "g_over_gc",
        "coupling",
        "epsilon",
        "phase",
        "branch",
        "x_scaled",
        "theta",
        "energy_per_qubit",
        "nu_minus",
        "nu_plus",
    ]);
    table.rows = collect_rows(&grid, |ratio| {
        let coupling = ratio * gc;
        let phase = phase_name(phase_at(&ModelParams::new(delta, eps, coupling)?).phase);
        Ok(spectrum_rows(delta, coupling, eps)?
            .into_iter()
            .map(|r| {
                // Reorder the spectrum row: epsilon, branch, ν−, ν+, X, θ, E, stable.
                let mut it = r.into_iter();
                let (e, branch, nm, np, x, th, en) = (
                    it.next().unwrap(),
                    it.next().unwrap(),
                    it.next().unwrap(),
                    it.next().unwrap(),
                    it.next().unwrap(),
                    it.next().unwrap(),
                    it.next().unwrap(),
                );
                vec![ratio.into(), coupling.into(), e, phase.into(), branch, x, th, en, nm, np]
            })
            .collect())
    })?;
    Ok(table)
}

/// The four regimes of the double-well illustration.
pub const QUARTIC_CASES: [(f64, f64); 4] = [(1.0, 0.0), (-1.0, 0.0), (-1.0, -0.3), (-1.0, -0.6)];

pub fn quartic_demo(s: &Settings) -> Result<Table, CliError> {
    let cases: Vec<(f64, f64)> = match s.quartic_case() {
        Some(c) => vec![c],
        None => QUARTIC_CASES.to_vec(),
    };
    let samples = s.samples();
    let xs: Vec<f64> = if samples >= 2 {
        (0..samples)
            .map(|i| -1.5 + 3.0 * i as f64 / (samples - 1) as f64)
            .collect()
    } else {
        Vec::new()
    };
    let mut table = Table::new(&["eta", "tilt", "regime", "kind", "x", "potential", "curvature"]);
    for (eta, tilt) in cases {
        if !eta.is_finite() || !tilt.is_finite() {
            return Err(CliError::Config("quartic parameters must be finite".into()));
        }
        let w = quartic_stationary_points(eta, tilt);
        let regime = match (w.minima.len(), w.maxima.len()) {
            (1, 0) => "single_well",
            (2, 1) if tilt == 0.0 => "symmetric_double_well",
            (2, 1) => "tilted_double_well",
            _ => "saddle_node",
        };
        let mut critical: Vec<(&str, CriticalPoint)> = w
            .minima
            .iter()
            .map(|p| ("minimum", *p))
            .chain(w.maxima.iter().map(|p| ("maximum", *p)))
            .chain(w.inflections.iter().map(|p| ("inflection", *p)))
            .collect();
        critical.sort_by(|a, b| a.1.x.total_cmp(&b.1.x));
        for (kind, p) in critical {
            table.push(vec![
                eta.into(),
                tilt.into(),
                regime.into(),
                kind.into(),
                p.x.into(),
                p.potential.into(),
                p.curvature.into(),
            ]);
        }
        for &x in &xs {
            table.push(vec![
                eta.into(),
                tilt.into(),
                regime.into(),
                "profile".into(),
                x.into(),
                w.potential(x).into(),
                (12.0 * x * x + 2.0 * eta).into(),
            ]);
        }
    }
    Ok(table)
}

#[derive(Debug, Deserialize)]
struct QubitRow {
    delta: f64,
    epsilon: f64,
    g: f64,
}

pub fn read_ensemble(path: &Path) -> Result<EnsembleSpec, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["delta", "epsilon", "g"] {
        return Err(CliError::Config(format!(
            "{}: header must be `delta,epsilon,g`",
            path.display()
        )));
    }
    let mut qubits = Vec::new();
    for (i, row) in reader.deserialize::<QubitRow>().enumerate() {
        let row = row.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io(format!("{}: {e}", path.display())),
            _ => CliError::Config(format!("{}: row {}: {e}", path.display(), i + 1)),
        })?;
        qubits.push(Qubit {
            delta: row.delta,
            epsilon: row.epsilon,
            g: row.g,
        });
    }
    Ok(EnsembleSpec::new(qubits)?)
}

pub fn ensemble(s: &Settings) -> Result<Table, CliError> {
    let spec = read_ensemble(s.ensemble_csv()?)?;
    let n = spec.len();
    let visibility = avoided_crossing_observable(&spec);
    let verdict = match visibility.verdict {
        Visibility::Resolvable => "resolvable",
        Visibility::Marginal => "marginal",
        Visibility::Unresolvable => "unresolvable",
    };
    let g_eff = effective_coupling(&spec);
    let mut table = Table::new(&[
        "n_qubits",
        "delta_bar",
        "epsilon_bar",
        "epsilon_spread",
        "g_eff",
        "ratio",
        "verdict",
        "x",
        "x_scaled",
        "stability",
        "stable",
    ]);
    let root_n = (n as f64).sqrt();
    for p in ensemble_fixed_points(&spec) {
        table.push(vec![
            n.into(),
            spec.delta_bar().into(),
            spec.epsilon_bar().into(),
            spec.epsilon_spread().into(),
            g_eff.into(),
            visibility.ratio.into(),
            verdict.into(),
            p.x.into(),
            (p.x / root_n).into(),
            stability_name(p.stability).into(),
            p.is_stable().into(),
        ]);
    }
    Ok(table)
}

/// The report table and whether every check passed.
pub fn verify(s: &Settings) -> Result<(Table, bool), CliError> {
    let fault = match s.inject_fault() {
        None => Fault::None,
        Some("flip-mode-coupling-sign") => Fault::FlipModeCouplingSign,
        Some(other) => return Err(CliError::Config(format!("unknown fault `{other}`"))),
    };
    let report = run_verification(VerifyOptions {
        include_ed: !s.skip_ed(),
        fault,
    });
    let mut table = Table::new(&["check", "passed", "metric", "tolerance", "detail"]);
    for c in &report.checks {
        table.push(vec![
            c.name.clone().into(),
            c.passed.into(),
            if c.metric.is_nan() { Cell::Empty } else { c.metric.into() },
            c.tolerance.into(),
            c.detail.clone().into(),
        ]);
    }
    Ok((table, report.passed()))
}

pub fn decay(s: &Settings) -> Result<Table, CliError> {
    let (delta, coupling) = (s.delta()?, s.coupling()?);
    let eps = s.epsilon();
    let mut table = Table::new(&["n_qubits", "log10_rate_over_delta", "exceeds_gap"]);
    for n in s.n_qubits_list()? {
        let params = ModelParams::new(delta, eps, coupling)?.with_n_qubits(n)?;
        let d = metastable_decay_estimate(&params)?;
        table.push(vec![n.into(), d.log10_rate_over_delta.into(), d.exceeds_gap.into()]);
    }
    Ok(table)
}
