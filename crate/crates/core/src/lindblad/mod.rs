//! Master-equation model of one three-level atom in a driven cavity.
//!
//! The basis is `|n⟩ ⊗ |level⟩` with the photon number `n` as the slow index,
//! so basis index `3n + level`. Operators are stored dense for inspection;
//! the time stepper and Liouvillian assembly use a sparse copy.

pub mod integrator;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{effective_coupling, CavityParams, DetuningGrid, DriveConfig, EnsembleConfig};
use crate::transmission::{snapshot, Configuration, Spectrum, SpectrumMeta};
use integrator::{integrate_adaptive, IntegrationStats, StepControl};

pub const TRACE_TOLERANCE: f64 = 1e-6;
pub const HERMITICITY_TOLERANCE: f64 = 1e-8;
pub const LEAKAGE_TOLERANCE: f64 = 1e-6;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

/// Largest Fock truncation tried by the automatic leakage check.
pub const MAX_AUTO_FOCK: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    /// Probe-coupled ground state.
    F1 = 0,
    /// Spectator ground state.
    F2 = 1,
    Excited = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HilbertConfig {
    n_fock: usize,
}

impl HilbertConfig {
    pub fn new(n_fock: usize) -> Result<Self> {
        if n_fock < 2 {
            return Err(Error::invalid(format!("n_fock must be >= 2, got {n_fock}")));
        }
        Ok(Self { n_fock })
    }

    pub fn n_fock(&self) -> usize {
        self.n_fock
    }

    pub fn dim(&self) -> usize {
        3 * (self.n_fock + 1)
    }

    pub fn index(&self, photons: usize, level: Level) -> usize {
        3 * photons + level as usize
    }

    /// Cavity annihilation operator `a ⊗ 1`.
    pub fn destroy(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut a = DMatrix::zeros(d, d);
        for n in 1..=self.n_fock {
            for l in 0..3 {
                a[(3 * (n - 1) + l, 3 * n + l)] = Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
        a
    }

    /// Atomic operator `1 ⊗ |i⟩⟨j|`.
    pub fn transition(&self, i: Level, j: Level) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for n in 0..=self.n_fock {
            m[(self.index(n, i), self.index(n, j))] = ONE;
        }
        m
    }

    /// Pure state `|photons⟩ ⊗ |level⟩` as a density matrix.
    pub fn basis_state(&self, photons: usize, level: Level) -> Result<DMatrix<Complex64>> {
        if photons > self.n_fock {
            return Err(Error::invalid(format!(
                "{photons} photons exceed the truncation n_fock = {}",
                self.n_fock
            )));
        }
        let d = self.dim();
        let mut rho = DMatrix::zeros(d, d);
        let i = self.index(photons, level);
        rho[(i, i)] = ONE;
        Ok(rho)
    }

    /// Atom in `F1`, cavity empty.
    pub fn ground_state(&self) -> DMatrix<Complex64> {
        self.basis_state(0, Level::F1).expect("vacuum is always in range")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOp {
    pub name: String,
    /// Jump rate; the applied jump operator is `√rate · operator`.
    pub rate: f64,
    pub operator: DMatrix<Complex64>,
}

impl CollapseOp {
    pub fn new(name: impl Into<String>, rate: f64, operator: DMatrix<Complex64>) -> Self {
        Self {
            name: name.into(),
            rate,
            operator,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct SparseOp {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }
}

/// Maximum absolute entry of `m − m†`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct LindbladSystem {
    hilbert: HilbertConfig,
    hamiltonian: DMatrix<Complex64>,
    collapse: Vec<CollapseOp>,
    eta: f64,
    kappa: f64,
    h_eff: SparseOp,
    jumps: Vec<SparseOp>,
    photon_weights: Vec<f64>,
}

impl LindbladSystem {
    /// Assemble a system from explicit operators. `eta` and `kappa` only set
    /// the transmission normalization `η²/κ²`.
    pub fn new(
        hilbert: HilbertConfig,
        hamiltonian: DMatrix<Complex64>,
        collapse: Vec<CollapseOp>,
        eta: f64,
        kappa: f64,
    ) -> Result<Self> {
        let d = hilbert.dim();
        if hamiltonian.shape() != (d, d) {
            return Err(Error::invalid(format!(
                "hamiltonian is {:?}, expected {d}x{d}",
                hamiltonian.shape()
            )));
        }
        if hamiltonian.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("hamiltonian has non-finite entries"));
        }
        let scale = hamiltonian.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = hermiticity_defect(&hamiltonian);
        if defect > 1e-12 * scale {
            return Err(Error::invalid(format!("hamiltonian is not Hermitian (defect {defect:e})")));
        }
        for c in &collapse {
            if !(c.rate >= 0.0 && c.rate.is_finite()) {
                return Err(Error::invalid(format!("collapse rate '{}' = {} is invalid", c.name, c.rate)));
            }
            if c.operator.shape() != (d, d) {
                return Err(Error::invalid(format!("collapse operator '{}' has the wrong shape", c.name)));
            }
        }
        if !(eta.is_finite() && kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid("eta must be finite and kappa > 0"));
        }

        let mut decay = DMatrix::<Complex64>::zeros(d, d);
        let mut jumps = Vec::with_capacity(collapse.len());
        for c in &collapse {
            if c.rate == 0.0 {
                continue;
            }
            let l = &c.operator * Complex64::new(c.rate.sqrt(), 0.0);
            decay += l.adjoint() * &l;
            jumps.push(SparseOp::from_dense(&l));
        }
        let h_eff = &hamiltonian - decay * Complex64::new(0.0, 0.5);
        let photon_weights = (0..d).map(|i| (i / 3) as f64).collect();

        Ok(Self {
            hilbert,
            hamiltonian,
            collapse,
            eta,
            kappa,
            h_eff: SparseOp::from_dense(&h_eff),
            jumps,
            photon_weights,
        })
    }

    /// Driven Jaynes–Cummings Λ system at probe detuning `delta` (rad/s).
    /// Requires a single atom with an explicit coupling.
    pub fn build(
        hilbert: HilbertConfig,
        cavity: &CavityParams,
        ensemble: &EnsembleConfig,
        drive: &DriveConfig,
        delta: f64,
    ) -> Result<Self> {
        Self::for_configuration(hilbert, cavity, ensemble, drive, delta, Configuration::CavityEit)
    }

    /// As [`LindbladSystem::build`], with the atom removed (`Empty`) or the
    /// control field off (`TwoLevel`) as requested.
    pub fn for_configuration(
        hilbert: HilbertConfig,
        cavity: &CavityParams,
        ensemble: &EnsembleConfig,
        drive: &DriveConfig,
        delta: f64,
        configuration: Configuration,
    ) -> Result<Self> {
        if ensemble.n_atoms() != 1 {
            return Err(Error::Unsupported(format!(
                "master equation supports exactly one atom, got N = {}",
                ensemble.n_atoms()
            )));
        }
        if !delta.is_finite() {
            return Err(Error::invalid("detuning must be finite"));
        }
        let g = match configuration {
            Configuration::Empty => 0.0,
            _ => effective_coupling(ensemble)?,
        };
        let omega_c = match configuration {
            Configuration::CavityEit => drive.omega_c(),
            _ => 0.0,
        };
        let kappa = cavity.kappa();
        let gamma = cavity.gamma();
        let beta = ensemble.branching_to_f1();
        let eta = kappa * drive.probe_photon_target().sqrt();
        let delta_a = cavity.atomic_detuning(delta);
        let delta_2 = drive.two_photon_detuning(delta);

        let h = &hilbert;
        let c = |x: f64| Complex64::new(x, 0.0);
        let a = h.destroy();
        let ad = a.adjoint();
        let s31 = h.transition(Level::Excited, Level::F1);
        let s32 = h.transition(Level::Excited, Level::F2);
        let hamiltonian = &ad * &a * c(-delta)
            + h.transition(Level::Excited, Level::Excited) * c(-delta_a)
            + h.transition(Level::F2, Level::F2) * c(-delta_2)
            + (&a * &s31 + &ad * s31.adjoint()) * c(g)
            + (&s32 + s32.adjoint()) * c(0.5 * omega_c)
            + (&a + &ad) * c(eta);

        let collapse = vec![
            CollapseOp::new("cavity", 2.0 * kappa, a),
            CollapseOp::new("decay-f1", 2.0 * gamma * beta, h.transition(Level::F1, Level::Excited)),
            CollapseOp::new("decay-f2", 2.0 * gamma * (1.0 - beta), h.transition(Level::F2, Level::Excited)),
            CollapseOp::new("dephasing", 2.0 * ensemble.gamma_gs(), h.transition(Level::F2, Level::F2)),
        ];
        Self::new(hilbert, hamiltonian, collapse, eta, kappa)
    }

    pub fn hilbert(&self) -> HilbertConfig {
        self.hilbert
    }

    pub fn dim(&self) -> usize {
        self.hilbert.dim()
    }

    pub fn hamiltonian(&self) -> &DMatrix<Complex64> {
        &self.hamiltonian
    }

    pub fn collapse_ops(&self) -> &[CollapseOp] {
        &self.collapse
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Empty-cavity resonant photon number `η²/κ²`.
    pub fn reference_photon_number(&self) -> f64 {
        (self.eta / self.kappa).powi(2)
    }

    /// `dρ/dt` for a row-major flattened `ρ`.
    pub fn rhs(&self, rho: &[Complex64], drho: &mut [Complex64]) {
        let d = self.dim();
        drho[..d * d].fill(ZERO);
        let minus_i = Complex64::new(0.0, -1.0);
        // −i H_eff ρ
        for &(i, k, h) in &self.h_eff.entries {
            let f = minus_i * h;
            let (src, dst) = (k * d, i * d);
            for j in 0..d {
                drho[dst + j] += f * rho[src + j];
            }
        }
        // +i ρ H_eff†
        for &(j, k, h) in &self.h_eff.entries {
            let f = Complex64::new(0.0, 1.0) * h.conj();
            for i in 0..d {
                drho[i * d + j] += f * rho[i * d + k];
            }
        }
        for jump in &self.jumps {
            for &(i, k, v) in &jump.entries {
                for &(j, l, w) in &jump.entries {
                    drho[i * d + j] += v * w.conj() * rho[k * d + l];
                }
            }
        }
    }

    /// Dense Liouvillian acting on row-major `vec(ρ)`.
    pub fn liouvillian(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let n = d * d;
        let mut l = DMatrix::zeros(n, n);
        let mut basis = vec![ZERO; n];
        let mut col = vec![ZERO; n];
        for c in 0..n {
            basis[c] = ONE;
            self.rhs(&basis, &mut col);
            basis[c] = ZERO;
            for r in 0..n {
                l[(r, c)] = col[r];
            }
        }
        l
    }

    pub fn photon_number(&self, rho: &DMatrix<Complex64>) -> f64 {
        (0..self.dim()).map(|i| self.photon_weights[i] * rho[(i, i)].re).sum()
    }

    fn photon_number_flat(&self, rho: &[Complex64]) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.photon_weights[i] * rho[i * d + i].re).sum()
    }

    /// `⟨a⟩ = tr(aρ)`.
    pub fn field_amplitude(&self, rho: &DMatrix<Complex64>) -> Complex64 {
        let h = self.hilbert;
        let mut sum = ZERO;
        for n in 0..h.n_fock {
            for l in 0..3 {
                sum += rho[(3 * (n + 1) + l, 3 * n + l)] * ((n + 1) as f64).sqrt();
            }
        }
        sum
    }

    pub fn level_population(&self, rho: &DMatrix<Complex64>, level: Level) -> f64 {
        (0..=self.hilbert.n_fock)
            .map(|n| rho[(self.hilbert.index(n, level), self.hilbert.index(n, level))].re)
            .sum()
    }

    pub fn top_fock_population(&self, rho: &DMatrix<Complex64>) -> f64 {
        let top = 3 * self.hilbert.n_fock;
        (0..3).map(|l| rho[(top + l, top + l)].re).sum()
    }
}

/// Build a master-equation system for a single atom at probe detuning `delta`.
pub fn build_system(
    hilbert: HilbertConfig,
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
    delta: f64,
) -> Result<LindbladSystem> {
    LindbladSystem::build(hilbert, cavity, ensemble, drive, delta)
}

/// Worst-case health figures over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HealthReport {
    pub max_trace_drift: f64,
    pub max_hermiticity_defect: f64,
    pub max_top_fock_population: f64,
    pub min_eigenvalue: f64,
}

impl Default for HealthReport {
    fn default() -> Self {
        Self {
            max_trace_drift: 0.0,
            max_hermiticity_defect: 0.0,
            max_top_fock_population: 0.0,
            min_eigenvalue: f64::INFINITY,
        }
    }
}

impl HealthReport {
    pub fn observe(&mut self, system: &LindbladSystem, rho: &DMatrix<Complex64>) {
        let trace: Complex64 = rho.diagonal().iter().sum();
        self.max_trace_drift = self.max_trace_drift.max((trace - ONE).norm());
        self.max_hermiticity_defect = self.max_hermiticity_defect.max(hermiticity_defect(rho));
        self.max_top_fock_population = self
            .max_top_fock_population
            .max(system.top_fock_population(rho));
        self.min_eigenvalue = self.min_eigenvalue.min(min_eigenvalue(rho));
    }

    pub fn leakage_ok(&self) -> bool {
        self.max_top_fock_population < LEAKAGE_TOLERANCE
    }

    pub fn check(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.max_trace_drift < TRACE_TOLERANCE) {
            problems.push(format!("trace drift {:.3e}", self.max_trace_drift));
        }
        if !(self.max_hermiticity_defect < HERMITICITY_TOLERANCE) {
            problems.push(format!("hermiticity defect {:.3e}", self.max_hermiticity_defect));
        }
        if !self.leakage_ok() {
            problems.push(format!(
                "top Fock population {:.3e}; raise n_fock",
                self.max_top_fock_population
            ));
        }
        if !(self.min_eigenvalue >= -POSITIVITY_TOLERANCE) {
            problems.push(format!("negative eigenvalue {:.3e}", self.min_eigenvalue));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Health(problems.join(", ")))
        }
    }
}

fn min_eigenvalue(rho: &DMatrix<Complex64>) -> f64 {
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues.min()
}

/// Check that `rho` is a density matrix for `hilbert`.
pub fn validate_density(hilbert: HilbertConfig, rho: &DMatrix<Complex64>) -> Result<()> {
    let d = hilbert.dim();
    if rho.shape() != (d, d) {
        return Err(Error::invalid(format!("density matrix is {:?}, expected {d}x{d}", rho.shape())));
    }
    let trace: Complex64 = rho.diagonal().iter().sum();
    if (trace - ONE).norm() > 1e-10 {
        return Err(Error::invalid(format!("density matrix trace is {trace}")));
    }
    if hermiticity_defect(rho) > 1e-10 {
        return Err(Error::invalid("density matrix is not Hermitian"));
    }
    let lowest = min_eigenvalue(rho);
    if lowest < -POSITIVITY_TOLERANCE {
        return Err(Error::invalid(format!("density matrix has eigenvalue {lowest:e}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DMatrix<Complex64>>,
    /// `⟨a†a⟩` at each sample time.
    pub photon_number: Vec<f64>,
    /// `(1/duration)∫⟨a†a⟩dt` over the whole interval.
    pub mean_photon_number: f64,
    pub health: HealthReport,
    pub stats: IntegrationStats,
}

fn default_control(system: &LindbladSystem) -> StepControl {
    let rate = system
        .h_eff
        .entries
        .iter()
        .map(|e| e.2.norm())
        .fold(system.kappa, f64::max);
    StepControl {
        rtol: 1e-8,
        atol: 1e-11,
        h_init: 0.1 / rate,
        h_min: 1e-6 / rate,
        h_max: f64::INFINITY,
        error_len: Some(system.dim() * system.dim()),
    }
}

/// Evenly spaced sample times `0, duration/n, …, duration`.
pub fn uniform_samples(duration: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|k| duration * k as f64 / n as f64).collect()
}

/// Integrate the master equation from `initial` over `[0, duration]`,
/// recording the state at each of `sample_times`.
pub fn propagate(
    system: &LindbladSystem,
    initial: &DMatrix<Complex64>,
    duration: f64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    propagate_with(system, initial, duration, sample_times, &default_control(system))
}

pub fn propagate_with(
    system: &LindbladSystem,
    initial: &DMatrix<Complex64>,
    duration: f64,
    sample_times: &[f64],
    control: &StepControl,
) -> Result<Trajectory> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::invalid(format!("duration must be > 0, got {duration}")));
    }
    validate_density(system.hilbert, initial)?;
    let d = system.dim();
    let dd = d * d;

    let mut y0 = Vec::with_capacity(dd + 1);
    for i in 0..d {
        for j in 0..d {
            y0.push(initial[(i, j)]);
        }
    }
    y0.push(ZERO);

    let rhs = |_t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        system.rhs(&y[..dd], &mut dy[..dd]);
        dy[dd] = Complex64::new(system.photon_number_flat(&y[..dd]), 0.0);
    };

    let mut control = *control;
    control.error_len = Some(dd);
    let mut times = Vec::with_capacity(sample_times.len());
    let mut states = Vec::with_capacity(sample_times.len());
    let mut photons = Vec::with_capacity(sample_times.len());
    let mut health = HealthReport::default();
    health.observe(system, initial);

    let (y, stats) = integrate_adaptive(&rhs, &y0, 0.0, duration, sample_times, &control, |t, y| {
        let rho = DMatrix::from_row_slice(d, d, &y[..dd]);
        health.observe(system, &rho);
        times.push(t);
        photons.push(system.photon_number(&rho));
        states.push(rho);
        Ok(())
    })?;
    let last = DMatrix::from_row_slice(d, d, &y[..dd]);
    health.observe(system, &last);

    Ok(Trajectory {
        times,
        states,
        photon_number: photons,
        mean_photon_number: y[dd].re / duration,
        health,
        stats,
    })
}

/// Number of health samples taken along a finite-probe run.
pub const FINITE_PROBE_SAMPLES: usize = 50;

/// Time-averaged transmission over a probe of length `duration`, starting
/// from the atom in `F1` and an empty cavity. Fails if the run is unhealthy.
pub fn finite_probe_transmission(system: &LindbladSystem, duration: f64) -> Result<f64> {
    finite_probe_run(system, duration).map(|(t, _)| t)
}

pub fn finite_probe_run(system: &LindbladSystem, duration: f64) -> Result<(f64, Trajectory)> {
    let traj = propagate(
        system,
        &system.hilbert.ground_state(),
        duration,
        &uniform_samples(duration, FINITE_PROBE_SAMPLES),
    )?;
    traj.health.check()?;
    Ok((traj.mean_photon_number / system.reference_photon_number(), traj))
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DMatrix<Complex64>,
    /// `⟨a†a⟩ / (η²/κ²)`.
    pub transmission: f64,
    /// `|⟨a⟩|² / (η²/κ²)`.
    pub coherent_transmission: f64,
    pub health: HealthReport,
}

/// Stationary state from a direct solve of `L vec(ρ) = 0` with the trace
/// constraint replacing the first equation.
pub fn steady_state(system: &LindbladSystem) -> Result<SteadyState> {
    let d = system.dim();
    let mut l = system.liouvillian();
    let n = d * d;
    for c in 0..n {
        l[(0, c)] = ZERO;
    }
    for i in 0..d {
        l[(0, i * d + i)] = ONE;
    }
    let mut b = DVector::zeros(n);
    b[0] = ONE;
    let x = l
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Health("Liouvillian is singular; steady state is not unique".into()))?;
    let rho = DMatrix::from_row_slice(d, d, x.as_slice());
    let mut health = HealthReport::default();
    health.observe(system, &rho);
    let reference = system.reference_photon_number();
    Ok(SteadyState {
        transmission: system.photon_number(&rho) / reference,
        coherent_transmission: system.field_amplitude(&rho).norm_sqr() / reference,
        rho,
        health,
    })
}

/// Run `solve` with growing Fock truncation until the top-level population
/// passes the leakage check, starting from `start`.
pub fn with_leakage_check<T>(
    start: usize,
    mut solve: impl FnMut(HilbertConfig) -> Result<(T, HealthReport)>,
) -> Result<(T, HealthReport, HilbertConfig)> {
    let mut last = None;
    for n_fock in start.max(2)..=MAX_AUTO_FOCK {
        let hilbert = HilbertConfig::new(n_fock)?;
        let (value, health) = solve(hilbert)?;
        if health.leakage_ok() {
            return Ok((value, health, hilbert));
        }
        last = Some(health);
    }
    Err(Error::Health(format!(
        "top Fock population still {:.3e} at n_fock = {MAX_AUTO_FOCK}",
        last.map_or(f64::NAN, |h| h.max_top_fock_population)
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MasterMode {
    SteadyState,
    FiniteProbe,
}

/// Per-point master-equation transmission with automatic Fock truncation.
pub fn master_transmission(
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
    configuration: Configuration,
    delta: f64,
    mode: MasterMode,
) -> Result<(f64, HealthReport, HilbertConfig)> {
    with_leakage_check(2, |hilbert| {
        let system =
            LindbladSystem::for_configuration(hilbert, cavity, ensemble, drive, delta, configuration)?;
        match mode {
            MasterMode::SteadyState => {
                let ss = steady_state(&system)?;
                Ok((ss.transmission, ss.health))
            }
            MasterMode::FiniteProbe => {
                let traj = propagate(
                    &system,
                    &hilbert.ground_state(),
                    drive.probe_duration(),
                    &uniform_samples(drive.probe_duration(), FINITE_PROBE_SAMPLES),
                )?;
                Ok((traj.mean_photon_number / system.reference_photon_number(), traj.health))
            }
        }
    })
    .and_then(|(t, health, hilbert)| {
        health.check()?;
        Ok((t, health, hilbert))
    })
    .map_err(|e| e.at_detuning(delta))
}

/// Master-equation spectrum over `grid`, plus the worst health seen.
pub fn master_sweep(
    grid: &DetuningGrid,
    configuration: Configuration,
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
    mode: MasterMode,
) -> Result<(Spectrum, HealthReport)> {
    let deltas = grid.points();
    let mut values = Vec::with_capacity(deltas.len());
    let mut worst = HealthReport::default();
    for &delta in &deltas {
        let (t, h, _) = master_transmission(cavity, ensemble, drive, configuration, delta, mode)?;
        worst.max_trace_drift = worst.max_trace_drift.max(h.max_trace_drift);
        worst.max_hermiticity_defect = worst.max_hermiticity_defect.max(h.max_hermiticity_defect);
        worst.max_top_fock_population = worst.max_top_fock_population.max(h.max_top_fock_population);
        worst.min_eigenvalue = worst.min_eigenvalue.min(h.min_eigenvalue);
        values.push(t);
    }
    let mut meta = SpectrumMeta::model("master-equation");
    meta.configuration = Some(configuration);
    let mut params = snapshot(cavity, ensemble, drive);
    params["master_mode"] = serde_json::to_value(mode)?;
    meta.params = params;
    Ok((Spectrum::from_columns(&deltas, &values, meta)?, worst))
}
