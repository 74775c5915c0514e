//! Run configuration files.
//!
//! A config is a TOML document restricted to scalar values in a fixed set of
//! sections. Every key is optional; anything left out comes from the preset.
//! Frequencies are given in Hz. Unknown keys are errors.
//!
//! ```toml
//! preset = "paper2010"
//! engine = "eq1-averaged"          # eq1 | eq1-averaged | master-equation
//! configurations = "empty,two-level,eit"
//! seed = 42
//! out_dir = "out"
//!
//! [cavity]
//! g0_hz = 4.5e6
//! kappa_hz = 2.9e6
//! gamma_hz = 3.0e6
//! delta_ac_hz = 0.0
//! stark_shift_mean_hz = 0.0
//!
//! [ensemble]
//! n_atoms = 1
//! coupling_fraction = 0.4          # or coupling_hz
//! gamma_gs_hz = 65e3
//! branching_to_f1 = 0.5
//!
//! [drive]
//! omega_c_kappa = 0.78             # or omega_c_hz, or control_power_uw
//! probe_photon_target = 0.02
//! probe_duration_us = 50.0
//! two_photon_offset_hz = 0.0
//!
//! [grid]
//! start_hz = -15e6
//! stop_hz = 15e6
//! n_points = 601
//!
//! [disorder]
//! coupling = "truncated-normal"    # none | delta | uniform | truncated-normal
//! coupling_mean = 0.4
//! coupling_sigma = 0.1
//! stark = "uniform"                # none | uniform | truncated-normal
//! stark_width_hz = 5e6
//! n_samples = 2000
//!
//! [master]
//! mode = "finite-probe"            # finite-probe | steady-state
//!
//! [sweep]
//! parameter = "n_atoms"
//! values = "1,2,3,4,5,6,7"
//!
//! [fit]
//! data = "fig2a.csv"
//! free = "g,omega_c,gamma_gs"
//! budget = 4000
//!
//! [fit.bounds]
//! g = "0.2e6:5e6"
//! omega_c = "0.2e6:6e6"
//! gamma_gs = "0:500e3"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::disorder::{CouplingDistribution, DisorderSpec, StarkJitter};
use crate::error::{Error, Result};
use crate::fitting::Param;
use crate::lindblad::MasterMode;
use crate::model::{hz_to_rad, CavityParams, DetuningGrid, DriveConfig, EnsembleConfig, Preset};
use crate::transmission::Configuration;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CAVITY_EIT_OUT";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Eq1,
    Eq1Averaged,
    MasterEquation,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Eq1 => "eq1",
            Engine::Eq1Averaged => "eq1-averaged",
            Engine::MasterEquation => "master-equation",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Engine::Eq1, Engine::Eq1Averaged, Engine::MasterEquation]
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown engine '{s}' (expected eq1, eq1-averaged or master-equation)"
                ))
            })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub g0_hz: Option<f64>,
    pub kappa_hz: Option<f64>,
    pub gamma_hz: Option<f64>,
    pub delta_ac_hz: Option<f64>,
    pub stark_shift_mean_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n_atoms: Option<usize>,
    pub coupling_fraction: Option<f64>,
    pub coupling_hz: Option<f64>,
    pub gamma_gs_hz: Option<f64>,
    pub branching_to_f1: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub omega_c_kappa: Option<f64>,
    pub omega_c_hz: Option<f64>,
    pub control_power_uw: Option<f64>,
    pub probe_photon_target: Option<f64>,
    pub probe_duration_us: Option<f64>,
    pub two_photon_offset_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub start_hz: Option<f64>,
    pub stop_hz: Option<f64>,
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSection {
    pub coupling: Option<String>,
    pub coupling_mean: Option<f64>,
    pub coupling_sigma: Option<f64>,
    pub coupling_lo: Option<f64>,
    pub coupling_hi: Option<f64>,
    pub stark: Option<String>,
    pub stark_width_hz: Option<f64>,
    pub n_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MasterSection {
    pub mode: Option<MasterMode>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: Option<String>,
    pub values: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub data: Option<PathBuf>,
    pub free: Option<String>,
    pub budget: Option<usize>,
    #[serde(default)]
    pub bounds: std::collections::BTreeMap<String, String>,
}

/// The raw contents of a config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub engine: Option<String>,
    pub configurations: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub cavity: CavitySection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub disorder: DisorderSection,
    #[serde(default)]
    pub master: MasterSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub fit: FitSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            let msg = e.message().trim().to_string();
            match line {
                Some(l) => Error::Config(format!("line {l}: {msg}")),
                None => Error::Config(msg),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<String>,
    pub engine: Option<Engine>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    /// `(start_hz, stop_hz, n_points)`.
    pub grid: Option<(f64, f64, usize)>,
}

/// Parse `start:stop:n` (Hz).
pub fn parse_grid(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("grid '{s}' must look like start_hz:stop_hz:n_points"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let stop = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    let n = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
    Ok((start, stop, n))
}

/// Parse `lo:hi`.
fn parse_bounds(key: &str, s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config(format!("fit.bounds.{key} = '{s}' must look like lo:hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        lo.trim().parse::<f64>().map_err(|_| bad())?,
        hi.trim().parse::<f64>().map_err(|_| bad())?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    NAtoms,
    OmegaCKappa,
    ControlPowerUw,
    GammaGsHz,
    CouplingFraction,
    ProbePhotonTarget,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::NAtoms,
        SweepParam::OmegaCKappa,
        SweepParam::ControlPowerUw,
        SweepParam::GammaGsHz,
        SweepParam::CouplingFraction,
        SweepParam::ProbePhotonTarget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::NAtoms => "n_atoms",
            SweepParam::OmegaCKappa => "omega_c_kappa",
            SweepParam::ControlPowerUw => "control_power_uw",
            SweepParam::GammaGsHz => "gamma_gs_hz",
            SweepParam::CouplingFraction => "coupling_fraction",
            SweepParam::ProbePhotonTarget => "probe_photon_target",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let known: Vec<_> = SweepParam::ALL.iter().map(|p| p.name()).collect();
            Error::Config(format!("unknown sweep parameter '{s}' (known: {})", known.join(", ")))
        })
    }
}

/// Parse a comma-separated list of numbers.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("sweep value '{}' is not a number", v.trim())))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSpec {
    pub data: Option<PathBuf>,
    /// `(parameter, lower, upper)` in file units (Hz, or a fraction).
    pub free: Vec<(Param, f64, f64)>,
    pub budget: usize,
}

/// A fully resolved run: every value concrete, units internal (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub preset: String,
    pub engine: Engine,
    pub configurations: Vec<Configuration>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub cavity: CavityParams,
    pub ensemble: EnsembleConfig,
    pub drive: DriveConfig,
    pub grid: DetuningGrid,
    pub disorder: DisorderSpec,
    pub master_mode: MasterMode,
    pub calibration_per_sqrt_watt: f64,
    pub sweep: Option<(SweepParam, Vec<f64>)>,
    pub fit: Option<FitSpec>,
}

/// Default detuning window when neither the config nor the CLI gives one.
pub fn default_grid() -> DetuningGrid {
    DetuningGrid::from_hz(-15e6, 15e6, 601).expect("valid default grid")
}

fn cfg_err(e: Error) -> Error {
    match e {
        Error::InvalidInput(m) => Error::Config(m),
        other => other,
    }
}

impl Resolved {
    pub fn resolve(config: &RunConfig, overrides: &Overrides) -> Result<Self> {
        Self::resolve_inner(config, overrides).map_err(cfg_err)
    }

    fn resolve_inner(config: &RunConfig, overrides: &Overrides) -> Result<Self> {
        let preset_name = overrides
            .preset
            .clone()
            .or_else(|| config.preset.clone())
            .unwrap_or_else(|| Preset::CANONICAL.into());
        let preset = Preset::by_name(&preset_name)?;

        let engine = match (overrides.engine, &config.engine) {
            (Some(e), _) => e,
            (None, Some(s)) => s.parse()?,
            (None, None) => Engine::Eq1,
        };
        let configurations = match &config.configurations {
            Some(s) => {
                let mut v = Vec::new();
                for name in s.split(',') {
                    let c: Configuration = name.trim().parse()?;
                    if !v.contains(&c) {
                        v.push(c);
                    }
                }
                if v.is_empty() {
                    return Err(Error::Config("configurations must name at least one".into()));
                }
                v
            }
            None => Configuration::ALL.to_vec(),
        };

        let c = &config.cavity;
        let p = &preset.cavity;
        let hz = |v: Option<f64>, default: f64| v.map(hz_to_rad).unwrap_or(default);
        let cavity = CavityParams::new(
            hz(c.g0_hz, p.g0()),
            hz(c.kappa_hz, p.kappa()),
            hz(c.gamma_hz, p.gamma()),
        )?
        .with_detunings(
            hz(c.delta_ac_hz, p.delta_ac()),
            hz(c.stark_shift_mean_hz, p.stark_shift_mean()),
        )?;

        let e = &config.ensemble;
        let pe = &preset.ensemble;
        let n_atoms = e.n_atoms.unwrap_or(pe.n_atoms());
        let g = match (e.coupling_fraction, e.coupling_hz) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "ensemble: give coupling_fraction or coupling_hz, not both".into(),
                ))
            }
            (Some(f), None) => f * cavity.g0(),
            (None, Some(h)) => hz_to_rad(h),
            (None, None) => {
                let g_pre = crate::model::effective_coupling(pe)?;
                g_pre / preset.cavity.g0() * cavity.g0()
            }
        };
        let ensemble = EnsembleConfig::uniform(
            n_atoms,
            g,
            hz(e.gamma_gs_hz, pe.gamma_gs()),
            e.branching_to_f1.unwrap_or(pe.branching_to_f1()),
        )?;
        ensemble.check_against(&cavity)?;

        let d = &config.drive;
        let pd = &preset.drive;
        let omega_c = match (d.omega_c_kappa, d.omega_c_hz, d.control_power_uw) {
            (Some(k), None, None) => k * cavity.kappa(),
            (None, Some(h), None) => hz_to_rad(h),
            (None, None, Some(uw)) => preset.calibration.rabi(uw * 1e-6)?,
            (None, None, None) => pd.omega_c() / preset.cavity.kappa() * cavity.kappa(),
            _ => {
                return Err(Error::Config(
                    "drive: give only one of omega_c_kappa, omega_c_hz, control_power_uw".into(),
                ))
            }
        };
        let drive = DriveConfig::new(
            omega_c,
            d.probe_photon_target.unwrap_or(pd.probe_photon_target()),
            d.probe_duration_us.map(|us| us * 1e-6).unwrap_or(pd.probe_duration()),
        )?
        .with_two_photon_offset(hz(d.two_photon_offset_hz, pd.two_photon_detuning_offset()));

        let grid = match overrides.grid {
            Some((a, b, n)) => DetuningGrid::from_hz(a, b, n)?,
            None => {
                let gs = &config.grid;
                if gs == &GridSection::default() {
                    default_grid()
                } else {
                    let def = default_grid();
                    DetuningGrid::new(
                        hz(gs.start_hz, def.start()),
                        hz(gs.stop_hz, def.stop()),
                        gs.n_points.unwrap_or(def.n_points()),
                    )?
                }
            }
        };

        let seed = overrides.seed.or(config.seed).unwrap_or(preset.disorder.seed);
        let disorder = resolve_disorder(&config.disorder, &preset.disorder)?.with_seed(seed);

        if engine == Engine::MasterEquation && ensemble.n_atoms() != 1 {
            return Err(Error::Config(format!(
                "engine master-equation requires n_atoms = 1, got {}",
                ensemble.n_atoms()
            )));
        }

        let out_dir = overrides
            .out_dir
            .clone()
            .or_else(|| config.out_dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

        let sweep = match (&config.sweep.parameter, &config.sweep.values) {
            (Some(p), Some(v)) => Some((p.parse()?, parse_values(v)?)),
            (None, None) => None,
            _ => return Err(Error::Config("sweep needs both parameter and values".into())),
        };

        let fit = resolve_fit(&config.fit)?;

        Ok(Self {
            preset: preset_name,
            engine,
            configurations,
            seed,
            out_dir,
            cavity,
            ensemble,
            drive,
            grid,
            disorder,
            master_mode: config.master.mode.unwrap_or(MasterMode::FiniteProbe),
            calibration_per_sqrt_watt: preset.calibration.per_sqrt_watt,
            sweep,
            fit,
        })
    }
}

fn resolve_disorder(d: &DisorderSection, base: &DisorderSpec) -> Result<DisorderSpec> {
    let coupling = match d.coupling.as_deref() {
        None => match (base.coupling_dist, d.coupling_mean, d.coupling_sigma) {
            (Some(CouplingDistribution::TruncatedNormal { mean, sigma }), m, s) => {
                Some(CouplingDistribution::TruncatedNormal {
                    mean: m.unwrap_or(mean),
                    sigma: s.unwrap_or(sigma),
                })
            }
            (other, None, None) => other,
            _ => {
                return Err(Error::Config(
                    "disorder: coupling_mean/coupling_sigma need coupling = \"truncated-normal\"".into(),
                ))
            }
        },
        Some("none") => None,
        Some("delta") => Some(CouplingDistribution::Delta(d.coupling_mean.ok_or_else(|| {
            Error::Config("disorder: coupling = \"delta\" needs coupling_mean".into())
        })?)),
        Some("uniform") => Some(CouplingDistribution::Uniform {
            lo: d.coupling_lo.unwrap_or(0.0),
            hi: d.coupling_hi.unwrap_or(1.0),
        }),
        Some("truncated-normal") => Some(CouplingDistribution::TruncatedNormal {
            mean: d.coupling_mean.unwrap_or(0.4),
            sigma: d.coupling_sigma.unwrap_or(0.1),
        }),
        Some(other) => {
            return Err(Error::Config(format!(
                "disorder: unknown coupling distribution '{other}' (none, delta, uniform, truncated-normal)"
            )))
        }
    };
    let width = d.stark_width_hz.map(hz_to_rad);
    let stark = match d.stark.as_deref() {
        None => match (base.stark_jitter, width) {
            (StarkJitter::Uniform { .. }, Some(w)) => StarkJitter::Uniform { half_width: w },
            (StarkJitter::TruncatedNormal { .. }, Some(w)) => StarkJitter::TruncatedNormal { sigma: w },
            (j, _) => j,
        },
        Some("none") => StarkJitter::None,
        Some("uniform") => StarkJitter::Uniform {
            half_width: width.unwrap_or(hz_to_rad(5e6)),
        },
        Some("truncated-normal") => StarkJitter::TruncatedNormal {
            sigma: width.unwrap_or(hz_to_rad(2.5e6)),
        },
        Some(other) => {
            return Err(Error::Config(format!(
                "disorder: unknown stark jitter '{other}' (none, uniform, truncated-normal)"
            )))
        }
    };
    DisorderSpec::new(coupling, stark, d.n_samples.unwrap_or(base.n_samples), base.seed)
}

fn resolve_fit(f: &FitSection) -> Result<Option<FitSpec>> {
    if f == &FitSection::default() {
        return Ok(None);
    }
    let names = f.free.as_deref().unwrap_or("g,omega_c,gamma_gs");
    let mut free = Vec::new();
    for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let param: Param = name.parse()?;
        let bounds = f.bounds.get(name).ok_or_else(|| {
            Error::Config(format!("fit.bounds.{name} is required for a free parameter"))
        })?;
        let (lo, hi) = parse_bounds(name, bounds)?;
        free.push((param, lo, hi));
    }
    if let Some(extra) = f.bounds.keys().find(|k| !names.split(',').any(|n| n.trim() == k.as_str())) {
        return Err(Error::Config(format!("fit.bounds.{extra} names a parameter that is not free")));
    }
    Ok(Some(FitSpec {
        data: f.data.clone(),
        free,
        budget: f.budget.unwrap_or(4000),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_preset() {
        let r = Resolved::resolve(&RunConfig::parse("").unwrap(), &Overrides::default()).unwrap();
        let p = Preset::canonical();
        assert_eq!(r.cavity, p.cavity);
        assert_eq!(r.ensemble, p.ensemble);
        assert_eq!(r.drive, p.drive);
        assert_eq!(r.disorder, p.disorder);
        assert_eq!(r.engine, Engine::Eq1);
        assert_eq!(r.configurations, Configuration::ALL.to_vec());
    }

    #[test]
    fn unknown_keys_are_named_with_their_line() {
        let err = RunConfig::parse("seed = 1\n[cavity]\nkappa_hz = 1e6\nkapa_hz = 2e6\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("kapa_hz"), "{msg}");
        assert!(msg.contains("line 4"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn overrides_beat_the_file() {
        let cfg = RunConfig::parse("seed = 1\nengine = \"eq1\"\n[grid]\nn_points = 11\n").unwrap();
        let r = Resolved::resolve(
            &cfg,
            &Overrides {
                seed: Some(9),
                engine: Some(Engine::Eq1Averaged),
                grid: Some((-1e6, 1e6, 5)),
                ..Overrides::default()
            },
        )
        .unwrap();
        assert_eq!(r.seed, 9);
        assert_eq!(r.disorder.seed, 9);
        assert_eq!(r.engine, Engine::Eq1Averaged);
        assert_eq!(r.grid.n_points(), 5);
    }

    #[test]
    fn master_engine_needs_one_atom() {
        let cfg = RunConfig::parse("engine = \"master-equation\"\n[ensemble]\nn_atoms = 2\n").unwrap();
        let err = Resolved::resolve(&cfg, &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn control_from_power_uses_calibration() {
        let cfg = RunConfig::parse("[drive]\ncontrol_power_uw = 4.0\n").unwrap();
        let r = Resolved::resolve(&cfg, &Overrides::default()).unwrap();
        let k = r.cavity.kappa();
        assert!((r.drive.omega_c() - 0.9 * k).abs() < 1e-9 * k);
        let both = RunConfig::parse("[drive]\ncontrol_power_uw = 4.0\nomega_c_kappa = 1.0\n").unwrap();
        assert!(Resolved::resolve(&both, &Overrides::default()).is_err());
    }

    #[test]
    fn fit_section_resolves_bounds() {
        let cfg = RunConfig::parse(
            "[fit]\nfree = \"g,omega_c\"\n[fit.bounds]\ng = \"1e5:5e6\"\nomega_c = \"1e5:6e6\"\n",
        )
        .unwrap();
        let r = Resolved::resolve(&cfg, &Overrides::default()).unwrap();
        let fit = r.fit.unwrap();
        assert_eq!(fit.free, vec![(Param::G, 1e5, 5e6), (Param::OmegaC, 1e5, 6e6)]);
        let missing = RunConfig::parse("[fit]\nfree = \"g\"\n").unwrap();
        assert!(Resolved::resolve(&missing, &Overrides::default()).is_err());
    }

    #[test]
    fn grid_and_sweep_strings() {
        assert_eq!(parse_grid("-1e6:1e6:11").unwrap(), (-1e6, 1e6, 11));
        assert!(parse_grid("1:2").is_err());
        assert_eq!(parse_values("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!("n_atom".parse::<SweepParam>().is_err());
    }
}
