//! Normalized steady-state cavity transmission
//!
//! ```text
//! T(Δ) = κ² / |(Δ + iκ) − g²Nχ(Δa, δ, Ωc)|²
//! ```
//!
//! for the empty cavity (N = 0), two-level atoms (Ωc = 0) and cavity EIT.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{effective_coupling, CavityParams, DetuningGrid, DriveConfig, EnsembleConfig};
use crate::susceptibility::{chi_unchecked, SusceptibilityInput};

/// The three physical conditions probed in one experimental cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Configuration {
    #[serde(rename = "empty")]
    Empty,
    #[serde(rename = "two-level")]
    TwoLevel,
    #[serde(rename = "eit")]
    CavityEit,
}

impl Configuration {
    pub const ALL: [Configuration; 3] = [
        Configuration::Empty,
        Configuration::TwoLevel,
        Configuration::CavityEit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Configuration::Empty => "empty",
            Configuration::TwoLevel => "two-level",
            Configuration::CavityEit => "eit",
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "empty" => Ok(Configuration::Empty),
            "two-level" | "2level" | "two_level" => Ok(Configuration::TwoLevel),
            "eit" | "cavity-eit" => Ok(Configuration::CavityEit),
            other => Err(Error::Config(format!(
                "unknown configuration '{other}' (expected empty, two-level or eit)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    /// Probe-cavity detuning Δ, rad/s.
    pub delta: f64,
    pub transmission: f64,
}

/// Where a spectrum came from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<Configuration>,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
}

impl SpectrumMeta {
    pub fn model(model: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    points: Vec<SpectrumPoint>,
    meta: SpectrumMeta,
}

impl Spectrum {
    /// Detunings must be finite and strictly increasing, transmissions finite
    /// and nonnegative.
    pub fn new(points: Vec<SpectrumPoint>, meta: SpectrumMeta) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.delta.is_finite() {
                return Err(Error::invalid(format!("point {i}: detuning is not finite")));
            }
            if !(p.transmission.is_finite() && p.transmission >= 0.0) {
                return Err(Error::invalid(format!(
                    "point {i}: transmission {} is not a finite nonnegative number",
                    p.transmission
                )));
            }
            if i > 0 && p.delta <= points[i - 1].delta {
                return Err(Error::invalid(format!(
                    "point {i}: detunings must be strictly increasing"
                )));
            }
        }
        Ok(Self { points, meta })
    }

    pub fn from_columns(deltas: &[f64], transmissions: &[f64], meta: SpectrumMeta) -> Result<Self> {
        if deltas.len() != transmissions.len() {
            return Err(Error::invalid("column lengths differ"));
        }
        let points = deltas
            .iter()
            .zip(transmissions)
            .map(|(&delta, &transmission)| SpectrumPoint {
                delta,
                transmission,
            })
            .collect();
        Self::new(points, meta)
    }

    pub fn points(&self) -> &[SpectrumPoint] {
        &self.points
    }
    pub fn meta(&self) -> &SpectrumMeta {
        &self.meta
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.delta).collect()
    }

    pub fn transmissions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.transmission).collect()
    }

    /// Transmission at a grid node equal to `delta` within `tol` rad/s.
    pub fn value_at(&self, delta: f64, tol: f64) -> Option<f64> {
        let idx = self
            .points
            .partition_point(|p| p.delta < delta - tol);
        self.points
            .get(idx)
            .filter(|p| (p.delta - delta).abs() <= tol)
            .map(|p| p.transmission)
    }

    /// Index and value of the largest transmission.
    pub fn max(&self) -> Option<(usize, f64)> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.transmission))
            .fold(None, |best, (i, t)| match best {
                Some((_, bt)) if bt >= t => best,
                _ => Some((i, t)),
            })
    }
}

/// Empty, two-level and EIT spectra on one detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTriple {
    pub empty: Spectrum,
    pub two_level: Spectrum,
    pub eit: Spectrum,
}

impl SpectrumTriple {
    pub fn get(&self, configuration: Configuration) -> &Spectrum {
        match configuration {
            Configuration::Empty => &self.empty,
            Configuration::TwoLevel => &self.two_level,
            Configuration::CavityEit => &self.eit,
        }
    }
}

/// Steady-state transmission as a callable curve, with all parameters folded in for one
/// configuration. `g2n` is `g²N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eq1Curve {
    pub(crate) kappa: f64,
    pub(crate) gamma: f64,
    pub(crate) gamma_gs: f64,
    pub(crate) omega_c: f64,
    pub(crate) g2n: f64,
    pub(crate) atomic_shift: f64,
    pub(crate) two_photon_offset: f64,
}

impl Eq1Curve {
    pub fn new(
        cavity: &CavityParams,
        ensemble: &EnsembleConfig,
        drive: &DriveConfig,
        configuration: Configuration,
    ) -> Result<Self> {
        ensemble.check_against(cavity)?;
        let n = ensemble.n_atoms();
        let g2n = match configuration {
            Configuration::Empty => 0.0,
            _ if n == 0 => 0.0,
            _ => {
                let g = effective_coupling(ensemble)?;
                g * g * n as f64
            }
        };
        Ok(Self::template(cavity, ensemble, drive, configuration).with_g2n(g2n))
    }

    /// Curve with `g²N = 0`; callers fill in the coupling per sample.
    pub(crate) fn template(
        cavity: &CavityParams,
        ensemble: &EnsembleConfig,
        drive: &DriveConfig,
        configuration: Configuration,
    ) -> Self {
        let omega_c = match configuration {
            Configuration::CavityEit => drive.omega_c(),
            _ => 0.0,
        };
        Self {
            kappa: cavity.kappa(),
            gamma: cavity.gamma(),
            gamma_gs: ensemble.gamma_gs(),
            omega_c,
            g2n: 0.0,
            atomic_shift: cavity.delta_ac() + cavity.stark_shift_mean(),
            two_photon_offset: drive.two_photon_detuning_offset(),
        }
    }

    pub(crate) fn with_g2n(mut self, g2n: f64) -> Self {
        self.g2n = g2n;
        self
    }

    pub fn transmission(&self, delta: f64) -> f64 {
        self.eval(delta, 0.0)
    }

    /// Raw transmission; `extra_shift` is added to the probe-atom detuning only.
    pub(crate) fn eval(&self, delta: f64, extra_shift: f64) -> f64 {
        let kappa = self.kappa;
        if self.g2n == 0.0 {
            return kappa * kappa / (delta * delta + kappa * kappa);
        }
        let chi = chi_unchecked(&SusceptibilityInput {
            delta_a: delta + self.atomic_shift + extra_shift,
            delta_2: delta + self.two_photon_offset,
            omega_c: self.omega_c,
            gamma: self.gamma,
            gamma_gs: self.gamma_gs,
        });
        let denom = Complex64::new(delta, kappa) - chi * self.g2n;
        kappa * kappa / denom.norm_sqr()
    }
}

pub(crate) fn snapshot(cavity: &CavityParams, ensemble: &EnsembleConfig, drive: &DriveConfig) -> serde_json::Value {
    serde_json::json!({
        "cavity": cavity,
        "ensemble": ensemble,
        "drive": drive,
    })
}

/// Steady-state transmission for the cavity-EIT configuration. Use [`sweep`] with
/// [`Configuration::TwoLevel`] or an Ωc = 0 drive for the two-level case.
pub fn transmission_eq1(
    delta: f64,
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
) -> Result<f64> {
    if !delta.is_finite() {
        return Err(Error::invalid("probe detuning must be finite"));
    }
    let model = Eq1Curve::new(cavity, ensemble, drive, Configuration::CavityEit)?;
    let t = model.eval(delta, 0.0);
    if !t.is_finite() {
        return Err(Error::Singular {
            delta_a: cavity.atomic_detuning(delta),
            delta: drive.two_photon_detuning(delta),
            omega_c: drive.omega_c(),
            gamma: cavity.gamma(),
            gamma_gs: ensemble.gamma_gs(),
        }
        .at_detuning(delta));
    }
    Ok(t)
}

/// Steady-state transmission over a grid for one configuration. `Empty` forces N = 0 and
/// `TwoLevel` forces Ωc = 0.
pub fn sweep(
    grid: &DetuningGrid,
    configuration: Configuration,
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
) -> Result<Spectrum> {
    let model = Eq1Curve::new(cavity, ensemble, drive, configuration)?;
    let points = grid
        .points()
        .into_iter()
        .map(|delta| {
            let transmission = model.eval(delta, 0.0);
            if transmission.is_finite() {
                Ok(SpectrumPoint {
                    delta,
                    transmission,
                })
            } else {
                Err(Error::Singular {
                    delta_a: cavity.atomic_detuning(delta),
                    delta: drive.two_photon_detuning(delta),
                    omega_c: model.omega_c,
                    gamma: cavity.gamma(),
                    gamma_gs: ensemble.gamma_gs(),
                }
                .at_detuning(delta))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = SpectrumMeta {
        model: "eq1".into(),
        configuration: Some(configuration),
        params: snapshot(cavity, ensemble, drive),
        ..SpectrumMeta::default()
    };
    Spectrum::new(points, meta)
}

pub fn sweep_triple(
    grid: &DetuningGrid,
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
) -> Result<SpectrumTriple> {
    Ok(SpectrumTriple {
        empty: sweep(grid, Configuration::Empty, cavity, ensemble, drive)?,
        two_level: sweep(grid, Configuration::TwoLevel, cavity, ensemble, drive)?,
        eit: sweep(grid, Configuration::CavityEit, cavity, ensemble, drive)?,
    })
}
