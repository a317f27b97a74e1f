//! Exact diagonalization of the collective-spin Hamiltonian
//!
//! ```text
//! H = Δ Ŝz + ε Ŝx + ω(a†a + ½) + 2g Ŝx (a + a†),    g = G/√N
//! ```
//!
//! in the maximal-spin sector `S = N/2` times a Fock space truncated at
//! `n_max` photons. Basis states are `|k, n⟩` with `m = k − S`, stored at
//! index `k (n_max + 1) + n`.
//!
//! Small problems are diagonalized densely. Larger ones use Lanczos with full
//! reorthogonalization on the sparse matrix–vector product. Lanczos resolves
//! each eigenvalue once; copies of an exactly degenerate level can be
//! missing from its output.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{DickeError, Result};
use crate::model::{branch_states, ModelParams};
use crate::modes::branch_spectrum;

pub const DEFAULT_MAX_DIM: usize = 200_000;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-8;
/// Largest dimension diagonalized densely by [`lowest_eigenvalues`].
pub const DENSE_MAX_DIM: usize = 600;
/// Cutoff increment used by the adequacy check.
pub const CUTOFF_STEP: usize = 10;

const MAX_LANCZOS_STEPS: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdConfig {
    pub n_qubits: u32,
    pub fock_cutoff: usize,
    pub n_eigenvalues: usize,
    pub convergence_tol: f64,
    pub max_dim: usize,
}

impl EdConfig {
    pub fn new(n_qubits: u32, fock_cutoff: usize, n_eigenvalues: usize) -> Result<Self> {
        let cfg = Self {
            n_qubits,
            fock_cutoff,
            n_eigenvalues,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            max_dim: DEFAULT_MAX_DIM,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cutoff chosen from the mean-field photon number `N X²` of the stable
    /// branches, with a margin of eight standard deviations plus twenty.
    pub fn auto(params: &ModelParams, n_qubits: u32, n_eigenvalues: usize) -> Result<Self> {
        let branches = branch_states(params);
        let x_max = std::iter::once(&branches.ground)
            .chain(&branches.metastable)
            .map(|p| p.x_scaled.abs())
            .fold(0.0, f64::max);
        let photons = n_qubits as f64 * x_max * x_max;
        let cutoff = (photons + 8.0 * (photons + 1.0).sqrt()).ceil() as usize + 20;
        Self::new(n_qubits, cutoff, n_eigenvalues)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        self.convergence_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Result<Self> {
        self.max_dim = max_dim;
        self.validate()?;
        Ok(self)
    }

    pub fn with_cutoff(mut self, fock_cutoff: usize) -> Result<Self> {
        self.fock_cutoff = fock_cutoff;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        (self.n_qubits as usize + 1) * (self.fock_cutoff + 1)
    }

    fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(DickeError::InvalidParams("n_qubits must be positive".into()));
        }
        if self.n_eigenvalues < 2 {
            return Err(DickeError::InvalidParams("need at least two eigenvalues".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(DickeError::InvalidParams("convergence_tol must be > 0".into()));
        }
        let dim = self.dim();
        if dim > self.max_dim {
            return Err(DickeError::DimensionCap { dim, cap: self.max_dim });
        }
        if self.n_eigenvalues > dim {
            return Err(DickeError::InvalidParams(format!(
                "requested {} eigenvalues from a {dim}-dimensional space",
                self.n_eigenvalues
            )));
        }
        Ok(())
    }
}

/// Sparse form of the truncated Hamiltonian.
#[derive(Debug, Clone)]
pub struct DickeHamiltonian {
    n_qubits: usize,
    cutoff: usize,
    delta: f64,
    epsilon: f64,
    g: f64,
}

impl DickeHamiltonian {
    pub fn dim(&self) -> usize {
        (self.n_qubits + 1) * (self.cutoff + 1)
    }

    fn index(&self, k: usize, n: usize) -> usize {
        k * (self.cutoff + 1) + n
    }

    /// `⟨k+1|S₊|k⟩ = √((k+1)(N−k))`.
    fn spin_raise(&self, k: usize) -> f64 {
        (((k + 1) * (self.n_qubits - k)) as f64).sqrt()
    }

    fn diagonal(&self, k: usize, n: usize) -> f64 {
        let m = k as f64 - self.n_qubits as f64 / 2.0;
        self.delta * m + n as f64 + 0.5
    }

    /// Calls `visit(row, col, value)` for the diagonal and the upper triangle.
    fn for_each_upper(&self, mut visit: impl FnMut(usize, usize, f64)) {
        let nmax = self.cutoff;
        for k in 0..=self.n_qubits {
            for n in 0..=nmax {
                let i = self.index(k, n);
                visit(i, i, self.diagonal(k, n));
                if k == self.n_qubits {
                    continue;
                }
                let s = self.spin_raise(k);
                if self.epsilon != 0.0 {
                    visit(i, self.index(k + 1, n), 0.5 * self.epsilon * s);
                }
                if self.g != 0.0 {
                    if n < nmax {
                        visit(i, self.index(k + 1, n + 1), self.g * s * ((n + 1) as f64).sqrt());
                    }
                    if n > 0 {
                        visit(i, self.index(k + 1, n - 1), self.g * s * (n as f64).sqrt());
                    }
                }
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        self.for_each_upper(|i, j, v| {
            h[(i, j)] = v;
            h[(j, i)] = v;
        });
        h
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        self.for_each_upper(|i, j, h| {
            out[i] += h * v[j];
            if i != j {
                out[j] += h * v[i];
            }
        });
    }

    /// Eigenvalues of the parity operator `exp{iπ(Ŝz + S + a†a)}` on the basis,
    /// `(−1)^(k+n)`.
    pub fn parity_diagonal(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.dim());
        for k in 0..=self.n_qubits {
            for n in 0..=self.cutoff {
                p.push(if (k + n) % 2 == 0 { 1.0 } else { -1.0 });
            }
        }
        p
    }
}

fn resolve_n_qubits(params: &ModelParams, cfg: &EdConfig) -> Result<()> {
    match params.n_qubits() {
        Some(n) if n != cfg.n_qubits => Err(DickeError::InvalidParams(format!(
            "params carry N = {n} but the ED configuration has N = {}",
            cfg.n_qubits
        ))),
        _ => Ok(()),
    }
}

/// Sparse Hamiltonian for `params` at the configured size.
pub fn hamiltonian(params: &ModelParams, cfg: &EdConfig) -> Result<DickeHamiltonian> {
    cfg.validate()?;
    resolve_n_qubits(params, cfg)?;
    Ok(DickeHamiltonian {
        n_qubits: cfg.n_qubits as usize,
        cutoff: cfg.fock_cutoff,
        delta: params.delta(),
        epsilon: params.epsilon(),
        g: params.coupling() / (cfg.n_qubits as f64).sqrt(),
    })
}

/// Dense symmetric matrix of the Hamiltonian.
pub fn build_hamiltonian(params: &ModelParams, cfg: &EdConfig) -> Result<DMatrix<f64>> {
    Ok(hamiltonian(params, cfg)?.to_dense())
}

fn sorted_eigen(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// The `k` lowest eigenvalues, ascending.
pub fn lowest_eigenvalues(h: &DickeHamiltonian, k: usize) -> Result<Vec<f64>> {
    if h.dim() <= DENSE_MAX_DIM {
        let mut values: Vec<f64> = h.to_dense().symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values.truncate(k);
        Ok(values)
    } else {
        lanczos_lowest(h, k)
    }
}

/// The `k` lowest eigenpairs by dense diagonalization; eigenvectors are the
/// matrix columns.
pub fn lowest_eigenpairs(h: &DickeHamiltonian, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let (mut values, vectors) = sorted_eigen(h.to_dense());
    values.truncate(k);
    let k = values.len();
    (values, vectors.columns(0, k).into_owned())
}

/// `⟨v|P|v⟩` for the parity operator.
pub fn parity_expectation(h: &DickeHamiltonian, v: &[f64]) -> f64 {
    let p = h.parity_diagonal();
    let norm: f64 = v.iter().map(|x| x * x).sum();
    v.iter().zip(&p).map(|(x, s)| s * x * x).sum::<f64>() / norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    // Twice is enough for orthogonality to working precision.
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
}

fn start_vector(dim: usize, seed: usize) -> Vec<f64> {
    (0..dim)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * (0.618_033_988_749_895 + seed as f64)).sin())
        .collect()
}

fn lanczos_lowest(h: &DickeHamiltonian, k: usize) -> Result<Vec<f64>> {
    let dim = h.dim();
    let max_steps = MAX_LANCZOS_STEPS.min(dim);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut seed = 0;

    let mut v = start_vector(dim, seed);
    normalize(&mut v);
    let mut w = vec![0.0; dim];
    let mut scale: f64 = 0.0;

    for step in 0..max_steps {
        h.apply(&v, &mut w);
        let a = dot(&v, &w);
        alpha.push(a);
        basis.push(v.clone());
        orthogonalize(&mut w, &basis);
        let b = dot(&w, &w).sqrt();
        scale = scale.max(a.abs()).max(b);
        let breakdown = b <= 1e-13 * scale.max(1.0);

        let size = step + 1;
        if size >= k && (size % 10 == 0 || breakdown || size == max_steps) {
            let t = tridiagonal(&alpha, &beta);
            let (ritz, vecs) = sorted_eigen(t);
            let tol = 1e-10 * ritz.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            let converged = size == dim
                || (0..k).all(|i| (b * vecs[(size - 1, i)]).abs() <= tol);
            if converged {
                return Ok(ritz.into_iter().take(k).collect());
            }
        }
        if size == max_steps {
            break;
        }
        if breakdown {
            // Invariant subspace: continue from a fresh direction.
            seed += 1;
            w = start_vector(dim, seed);
            orthogonalize(&mut w, &basis);
            normalize(&mut w);
            beta.push(0.0);
        } else {
            w.iter_mut().for_each(|x| *x /= b);
            beta.push(b);
        }
        std::mem::swap(&mut v, &mut w);
    }
    Err(DickeError::NonConvergence(format!(
        "Lanczos did not resolve {k} eigenvalues in {max_steps} steps (dim {dim})"
    )))
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdSpectrum {
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Cutoff at which the adequacy check passed.
    pub fock_cutoff: usize,
    /// Largest eigenvalue shift when the cutoff was raised by [`CUTOFF_STEP`].
    pub cutoff_shift: f64,
}

impl EdSpectrum {
    /// `Eᵢ − E₀` for `i ≥ 1`.
    pub fn gaps(&self) -> Vec<f64> {
        let e0 = self.eigenvalues[0];
        self.eigenvalues[1..].iter().map(|e| e - e0).collect()
    }

    /// Gaps between distinct levels; eigenvalues closer than `tol` are merged.
    pub fn distinct_gaps(&self, tol: f64) -> Vec<f64> {
        let levels = distinct_levels(&self.eigenvalues, tol);
        levels[1..].iter().map(|e| e - levels[0]).collect()
    }

    /// Gaps between centroids of consecutive eigenvalue pairs, for tunneling
    /// doublets.
    pub fn centroid_gaps(&self) -> Vec<f64> {
        let c = doublet_centroids(&self.eigenvalues);
        c.iter().skip(1).map(|e| e - c[0]).collect()
    }

    /// `E₁ − E₀`.
    pub fn ground_splitting(&self) -> f64 {
        self.eigenvalues[1] - self.eigenvalues[0]
    }
}

/// Means of clusters of sorted values whose neighbours are within `tol`.
pub fn distinct_levels(sorted: &[f64], tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            let cluster = &sorted[start..i];
            out.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
            start = i;
        }
    }
    out
}

/// Averages of `(E₀,E₁), (E₂,E₃), …`; a trailing unpaired value is dropped.
pub fn doublet_centroids(sorted: &[f64]) -> Vec<f64> {
    sorted.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Lowest `n_eigenvalues` levels with the cutoff raised in steps of
/// [`CUTOFF_STEP`] until the shift is below `convergence_tol`.
pub fn excitation_spectrum(params: &ModelParams, cfg: &EdConfig) -> Result<EdSpectrum> {
    let k = cfg.n_eigenvalues;
    let mut current = *cfg;
    let mut values = lowest_eigenvalues(&hamiltonian(params, &current)?, k)?;
    loop {
        let next = EdConfig {
            fock_cutoff: current.fock_cutoff + CUTOFF_STEP,
            ..current
        };
        if next.dim() > next.max_dim {
            let shift = f64::INFINITY;
            return Err(DickeError::CutoffNotConverged {
                shift,
                tol: cfg.convergence_tol,
            });
        }
        let raised = lowest_eigenvalues(&hamiltonian(params, &next)?, k)?;
        let shift = values
            .iter()
            .zip(&raised)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if shift < cfg.convergence_tol {
            return Ok(EdSpectrum {
                eigenvalues: values,
                fock_cutoff: current.fock_cutoff,
                cutoff_shift: shift,
            });
        }
        current = next;
        values = raised;
    }
}

/// The `K − 1` gaps above the ground state, cutoff-checked.
pub fn excitation_gaps(params: &ModelParams, cfg: &EdConfig) -> Result<Vec<f64>> {
    Ok(excitation_spectrum(params, cfg)?.gaps())
}

/// How ED gaps are matched to the normal-mode frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapMode {
    /// Lowest gaps with multiplicity.
    Levels,
    /// Gaps between tunneling-doublet centroids.
    DoubletCentroids,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HpConvergenceRow {
    pub n_qubits: u32,
    pub gaps: Vec<f64>,
    pub hp_frequencies: Vec<f64>,
    /// `|gap − ν|/ν` per mode.
    pub rel_errors: Vec<f64>,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HpConvergenceReport {
    pub coupling: f64,
    /// Rows sorted by `n_qubits`.
    pub rows: Vec<HpConvergenceRow>,
    /// Maximum error non-increasing along the rows.
    pub monotone: bool,
}

/// Compares the lowest ED gaps at each `N` with the normal-mode frequencies
/// `hp_frequencies`, mode by mode.
pub fn hp_convergence_report(
    params: &ModelParams,
    ed_gaps: &[(u32, Vec<f64>)],
    hp_frequencies: &[f64],
) -> HpConvergenceReport {
    let mut rows: Vec<HpConvergenceRow> = ed_gaps
        .iter()
        .map(|(n, gaps)| {
            let m = gaps.len().min(hp_frequencies.len());
            let rel_errors: Vec<f64> = gaps[..m]
                .iter()
                .zip(&hp_frequencies[..m])
                .map(|(g, nu)| (g - nu).abs() / nu)
                .collect();
            HpConvergenceRow {
                n_qubits: *n,
                gaps: gaps[..m].to_vec(),
                hp_frequencies: hp_frequencies[..m].to_vec(),
                max_rel_error: rel_errors.iter().copied().fold(0.0, f64::max),
                rel_errors,
            }
        })
        .collect();
    rows.sort_by_key(|r| r.n_qubits);
    let monotone = rows
        .windows(2)
        .all(|w| w[1].max_rel_error <= w[0].max_rel_error);
    HpConvergenceReport {
        coupling: params.coupling(),
        rows,
        monotone,
    }
}

/// Runs ED at each `N` and compares the lowest `modes` gaps with the
/// ground-branch frequencies `(ν−, ν+)`.
pub fn hp_convergence_scan(
    params: &ModelParams,
    ns: &[u32],
    modes: usize,
    mode: GapMode,
) -> Result<HpConvergenceReport> {
    let spectrum = branch_spectrum(params)?;
    let nu = spectrum.ground_modes;
    let hp = [nu.nu_minus, nu.nu_plus];
    let hp = &hp[..modes.min(2)];
    let mut runs = Vec::with_capacity(ns.len());
    for &n in ns {
        let k = match mode {
            GapMode::Levels => modes + 1,
            GapMode::DoubletCentroids => 2 * (modes + 1),
        };
        let cfg = EdConfig::auto(params, n, k.max(2))?;
        let spec = excitation_spectrum(params, &cfg)?;
        let gaps = match mode {
            GapMode::Levels => spec.gaps(),
            GapMode::DoubletCentroids => spec.centroid_gaps(),
        };
        runs.push((n, gaps));
    }
    Ok(hp_convergence_report(params, &runs, hp))
}

/// Dense eigenvector helper for callers that need `DVector`s.
pub fn column(m: &DMatrix<f64>, j: usize) -> DVector<f64> {
    m.column(j).into_owned()
}
