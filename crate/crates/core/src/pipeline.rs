//! Engine dispatch and parameter sweeps over a resolved run.

use serde::Serialize;

use crate::config::{Engine, Resolved, SweepParam};
use crate::disorder::{averaged_from_draws, CouplingDistribution, DisorderEnsemble};
use crate::error::{Error, Result};
use crate::lindblad::{master_sweep, HealthReport};
use crate::metrics::MetricsReport;
use crate::model::{hz_to_rad, EnsembleConfig};
use crate::transmission::{sweep, Configuration, Spectrum, SpectrumTriple};

/// Spectra for the requested configurations, in request order.
#[derive(Debug, Clone, PartialEq)]
pub struct Computed {
    pub spectra: Vec<Spectrum>,
    /// Worst health over all master-equation points, when that engine ran.
    pub health: Option<HealthReport>,
}

impl Computed {
    pub fn get(&self, configuration: Configuration) -> Option<&Spectrum> {
        self.spectra
            .iter()
            .find(|s| s.meta().configuration == Some(configuration))
    }

    /// The three spectra as a triple, if all three were computed.
    pub fn triple(&self) -> Option<SpectrumTriple> {
        Some(SpectrumTriple {
            empty: self.get(Configuration::Empty)?.clone(),
            two_level: self.get(Configuration::TwoLevel)?.clone(),
            eit: self.get(Configuration::CavityEit)?.clone(),
        })
    }
}

fn merge_health(acc: Option<HealthReport>, h: HealthReport) -> HealthReport {
    match acc {
        None => h,
        Some(a) => HealthReport {
            max_trace_drift: a.max_trace_drift.max(h.max_trace_drift),
            max_hermiticity_defect: a.max_hermiticity_defect.max(h.max_hermiticity_defect),
            max_top_fock_population: a.max_top_fock_population.max(h.max_top_fock_population),
            min_eigenvalue: a.min_eigenvalue.min(h.min_eigenvalue),
        },
    }
}

/// Compute the configured spectra. The averaged engine draws its disorder
/// once and reuses the draws for every configuration.
pub fn compute(run: &Resolved, configurations: &[Configuration]) -> Result<Computed> {
    let (grid, cavity, ensemble, drive) = (&run.grid, &run.cavity, &run.ensemble, &run.drive);
    let mut spectra = Vec::with_capacity(configurations.len());
    let mut health = None;
    match run.engine {
        Engine::Eq1 => {
            for &cfg in configurations {
                spectra.push(sweep(grid, cfg, cavity, ensemble, drive)?);
            }
        }
        Engine::Eq1Averaged => {
            let draws = DisorderEnsemble::draw(cavity, ensemble, &run.disorder)?;
            for &cfg in configurations {
                spectra.push(averaged_from_draws(grid, cfg, cavity, ensemble, drive, &draws)?.spectrum);
            }
        }
        Engine::MasterEquation => {
            for &cfg in configurations {
                let (s, h) = master_sweep(grid, cfg, cavity, ensemble, drive, run.master_mode)?;
                health = Some(merge_health(health, h));
                spectra.push(s);
            }
        }
    }
    Ok(Computed { spectra, health })
}

/// All three configurations.
pub fn compute_triple(run: &Resolved) -> Result<(SpectrumTriple, Option<HealthReport>)> {
    let c = compute(run, &Configuration::ALL)?;
    let triple = c.triple().expect("all configurations computed");
    Ok((triple, c.health))
}

/// Detuning at which the two-photon condition holds.
pub fn eit_center(run: &Resolved) -> f64 {
    -run.drive.two_photon_detuning_offset()
}

/// A copy of `run` with one parameter replaced.
pub fn with_param(run: &Resolved, param: SweepParam, value: f64) -> Result<Resolved> {
    let mut r = run.clone();
    match param {
        SweepParam::NAtoms => {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!("n_atoms must be a whole number, got {value}")));
            }
            r.ensemble = r.ensemble.with_atoms(value as usize)?;
            if r.engine == Engine::MasterEquation && r.ensemble.n_atoms() != 1 {
                return Err(Error::Config("engine master-equation requires n_atoms = 1".into()));
            }
        }
        SweepParam::OmegaCKappa => r.drive = r.drive.with_omega_c(value * r.cavity.kappa())?,
        SweepParam::ControlPowerUw => {
            let omega_c = crate::model::rabi_from_power(value * 1e-6, r.calibration_per_sqrt_watt)?;
            r.drive = r.drive.with_omega_c(omega_c)?;
        }
        SweepParam::GammaGsHz => r.ensemble = r.ensemble.with_gamma_gs(hz_to_rad(value))?,
        SweepParam::CouplingFraction => {
            let e = &r.ensemble;
            r.ensemble = EnsembleConfig::uniform(
                e.n_atoms(),
                value * r.cavity.g0(),
                e.gamma_gs(),
                e.branching_to_f1(),
            )?;
            r.ensemble.check_against(&r.cavity)?;
            let dist = match r.disorder.coupling_dist {
                None => None,
                Some(CouplingDistribution::Delta(_)) => Some(CouplingDistribution::Delta(value)),
                Some(CouplingDistribution::TruncatedNormal { sigma, .. }) => {
                    Some(CouplingDistribution::TruncatedNormal { mean: value, sigma })
                }
                Some(CouplingDistribution::Uniform { .. }) => {
                    return Err(Error::Config(
                        "coupling_fraction cannot be swept with a uniform coupling distribution".into(),
                    ))
                }
            };
            r.disorder = r.disorder.with_coupling(dist)?;
        }
        SweepParam::ProbePhotonTarget => r.drive = r.drive.with_photon_target(value)?,
    }
    Ok(r)
}

/// One sweep value with its spectra and figures of merit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub triple: SpectrumTriple,
    pub metrics: MetricsReport,
    pub health: Option<HealthReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub transparency: f64,
    pub contrast: f64,
    pub fwhm_hz: Option<f64>,
}

impl SweepPoint {
    pub fn row(&self) -> SweepRow {
        SweepRow {
            value: self.value,
            transparency: self.metrics.transparency,
            contrast: self.metrics.contrast,
            fwhm_hz: self.metrics.fwhm_hz,
        }
    }
}

/// Compute the triple and metrics for every value of `param`.
pub fn run_sweep(run: &Resolved, param: SweepParam, values: &[f64]) -> Result<Vec<SweepPoint>> {
    values
        .iter()
        .map(|&value| {
            let r = with_param(run, param, value)?;
            let (triple, health) = compute_triple(&r)?;
            let metrics = MetricsReport::from_triple(&triple, eit_center(&r))?;
            Ok(SweepPoint {
                value,
                triple,
                metrics,
                health,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Overrides, RunConfig};

    fn run(text: &str) -> Resolved {
        Resolved::resolve(&RunConfig::parse(text).unwrap(), &Overrides::default()).unwrap()
    }

    #[test]
    fn empty_cavity_peaks_at_resonance() {
        let r = run("configurations = \"empty\"\n[grid]\nstart_hz = -5e6\nstop_hz = 5e6\nn_points = 101\n");
        let c = compute(&r, &r.configurations).unwrap();
        let (i, t) = c.spectra[0].max().unwrap();
        assert_eq!(c.spectra[0].points()[i].delta, 0.0);
        assert_eq!(t, 1.0);
        assert!(c.triple().is_none());
    }

    #[test]
    fn averaged_engine_is_seeded() {
        let text = "engine = \"eq1-averaged\"\nseed = 7\n[disorder]\nn_samples = 50\n[grid]\nn_points = 21\n";
        let a = compute_triple(&run(text)).unwrap().0;
        let b = compute_triple(&run(text)).unwrap().0;
        assert_eq!(a, b);
        assert_eq!(a.eit.meta().seed, Some(7));
    }

    #[test]
    fn sweep_over_atom_number() {
        let r = run("[grid]\nn_points = 301\n");
        let pts = run_sweep(&r, SweepParam::NAtoms, &[1.0, 2.0]).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[1].metrics.contrast > pts[0].metrics.contrast);
        assert!(with_param(&r, SweepParam::NAtoms, 1.5).is_err());
    }

    #[test]
    fn control_power_uses_the_calibration() {
        let r = run("");
        let k = r.cavity.kappa();
        let r1 = with_param(&r, SweepParam::ControlPowerUw, 1.0).unwrap();
        assert!((r1.drive.omega_c() - 0.45 * k).abs() < 1e-9 * k);
    }
}
