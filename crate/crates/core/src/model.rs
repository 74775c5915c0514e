//! Physical parameter types shared by every engine.
//!
//! All frequencies are stored as angular frequencies (rad/s). Constructors
//! named `*_hz` take ordinary frequencies and multiply by 2π; getters named
//! `*_hz` convert back.

use serde::{Deserialize, Serialize};

use crate::disorder::{CouplingDistribution, DisorderSpec, StarkJitter};
use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[inline]
pub fn hz_to_rad(hz: f64) -> f64 {
    TWO_PI * hz
}

#[inline]
pub fn rad_to_hz(rad: f64) -> f64 {
    rad / TWO_PI
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}

/// Cavity and atomic-transition constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    g0: f64,
    kappa: f64,
    gamma: f64,
    delta_ac: f64,
    stark_shift_mean: f64,
}

impl CavityParams {
    /// Rates in rad/s; detunings default to zero.
    pub fn new(g0: f64, kappa: f64, gamma: f64) -> Result<Self> {
        require(g0 > 0.0 && g0.is_finite(), || format!("g0 must be > 0, got {g0}"))?;
        require(kappa > 0.0 && kappa.is_finite(), || {
            format!("kappa must be > 0, got {kappa}")
        })?;
        require(gamma > 0.0 && gamma.is_finite(), || {
            format!("gamma must be > 0, got {gamma}")
        })?;
        Ok(Self {
            g0,
            kappa,
            gamma,
            delta_ac: 0.0,
            stark_shift_mean: 0.0,
        })
    }

    pub fn from_hz(g0_hz: f64, kappa_hz: f64, gamma_hz: f64) -> Result<Self> {
        Self::new(hz_to_rad(g0_hz), hz_to_rad(kappa_hz), hz_to_rad(gamma_hz))
    }

    /// Cavity-minus-atom detuning and mean AC-Stark shift, both rad/s. They
    /// add to the probe-atom detuning: `Δa = Δ + delta_ac + stark_shift_mean`.
    pub fn with_detunings(mut self, delta_ac: f64, stark_shift_mean: f64) -> Result<Self> {
        require(delta_ac.is_finite() && stark_shift_mean.is_finite(), || {
            "detunings must be finite".into()
        })?;
        self.delta_ac = delta_ac;
        self.stark_shift_mean = stark_shift_mean;
        Ok(self)
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta_ac(&self) -> f64 {
        self.delta_ac
    }
    pub fn stark_shift_mean(&self) -> f64 {
        self.stark_shift_mean
    }

    /// Probe-atom detuning for a probe-cavity detuning `delta`.
    pub fn atomic_detuning(&self, delta: f64) -> f64 {
        delta + self.delta_ac + self.stark_shift_mean
    }

    /// Single-atom cooperativity `g²/(κγ)` for coupling `g`.
    pub fn cooperativity(&self, g: f64) -> f64 {
        g * g / (self.kappa * self.gamma)
    }
}

/// Per-atom couplings, either listed or described statistically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Couplings {
    PerAtom(Vec<f64>),
    Distribution {
        n_atoms: usize,
        dist: CouplingDistribution,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    couplings: Couplings,
    gamma_gs: f64,
    branching_to_f1: f64,
}

impl EnsembleConfig {
    /// Explicit per-atom couplings (rad/s). An empty list is the empty cavity.
    pub fn new(couplings: Vec<f64>, gamma_gs: f64, branching_to_f1: f64) -> Result<Self> {
        for (i, &g) in couplings.iter().enumerate() {
            require(g >= 0.0 && g.is_finite(), || {
                format!("coupling of atom {i} must be >= 0, got {g}")
            })?;
        }
        Self::checked(Couplings::PerAtom(couplings), gamma_gs, branching_to_f1)
    }

    /// `n_atoms` atoms all coupled with strength `g`.
    pub fn uniform(n_atoms: usize, g: f64, gamma_gs: f64, branching_to_f1: f64) -> Result<Self> {
        Self::new(vec![g; n_atoms], gamma_gs, branching_to_f1)
    }

    pub fn distributed(
        n_atoms: usize,
        dist: CouplingDistribution,
        gamma_gs: f64,
        branching_to_f1: f64,
    ) -> Result<Self> {
        dist.validate()?;
        Self::checked(
            Couplings::Distribution { n_atoms, dist },
            gamma_gs,
            branching_to_f1,
        )
    }

    fn checked(couplings: Couplings, gamma_gs: f64, branching_to_f1: f64) -> Result<Self> {
        require(gamma_gs >= 0.0 && gamma_gs.is_finite(), || {
            format!("gamma_gs must be >= 0, got {gamma_gs}")
        })?;
        require((0.0..=1.0).contains(&branching_to_f1), || {
            format!("branching_to_f1 must lie in [0,1], got {branching_to_f1}")
        })?;
        Ok(Self {
            couplings,
            gamma_gs,
            branching_to_f1,
        })
    }

    pub fn n_atoms(&self) -> usize {
        match &self.couplings {
            Couplings::PerAtom(g) => g.len(),
            Couplings::Distribution { n_atoms, .. } => *n_atoms,
        }
    }
    pub fn couplings(&self) -> &Couplings {
        &self.couplings
    }
    pub fn gamma_gs(&self) -> f64 {
        self.gamma_gs
    }
    pub fn branching_to_f1(&self) -> f64 {
        self.branching_to_f1
    }

    /// Same ensemble with `n` atoms at the current effective coupling.
    pub fn with_atoms(&self, n: usize) -> Result<Self> {
        match &self.couplings {
            Couplings::PerAtom(_) => {
                let g = if self.n_atoms() == 0 {
                    0.0
                } else {
                    effective_coupling(self)?
                };
                Self::uniform(n, g, self.gamma_gs, self.branching_to_f1)
            }
            Couplings::Distribution { dist, .. } => {
                Self::distributed(n, *dist, self.gamma_gs, self.branching_to_f1)
            }
        }
    }

    pub fn with_gamma_gs(&self, gamma_gs: f64) -> Result<Self> {
        Self::checked(self.couplings.clone(), gamma_gs, self.branching_to_f1)
    }

    pub fn with_branching(&self, branching_to_f1: f64) -> Result<Self> {
        Self::checked(self.couplings.clone(), self.gamma_gs, branching_to_f1)
    }

    /// Checks per-atom couplings against the antinode value `g0`.
    pub fn check_against(&self, cavity: &CavityParams) -> Result<()> {
        if let Couplings::PerAtom(gs) = &self.couplings {
            // relative slack for couplings built as fractions of g0
            let limit = cavity.g0() * (1.0 + 1e-12);
            for (i, &g) in gs.iter().enumerate() {
                require(g <= limit, || {
                    format!("coupling of atom {i} ({g}) exceeds g0 ({})", cavity.g0())
                })?;
            }
        }
        Ok(())
    }
}

/// Quadratic-mean coupling `sqrt(Σ gᵢ² / N)`.
pub fn effective_coupling(ensemble: &EnsembleConfig) -> Result<f64> {
    match ensemble.couplings() {
        Couplings::PerAtom(gs) if gs.is_empty() => {
            Err(Error::invalid("effective coupling of an empty coupling list"))
        }
        Couplings::PerAtom(gs) => {
            let sum_sq: f64 = gs.iter().map(|g| g * g).sum();
            Ok((sum_sq / gs.len() as f64).sqrt())
        }
        Couplings::Distribution { .. } => Err(Error::invalid(
            "ensemble couplings are a distribution; draw samples via disorder averaging",
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    omega_c: f64,
    probe_photon_target: f64,
    probe_duration: f64,
    two_photon_detuning_offset: f64,
}

impl DriveConfig {
    pub fn new(omega_c: f64, probe_photon_target: f64, probe_duration: f64) -> Result<Self> {
        require(omega_c >= 0.0 && omega_c.is_finite(), || {
            format!("omega_c must be >= 0, got {omega_c}")
        })?;
        require(probe_photon_target > 0.0 && probe_photon_target.is_finite(), || {
            format!("probe_photon_target must be > 0, got {probe_photon_target}")
        })?;
        require(probe_duration > 0.0 && probe_duration.is_finite(), || {
            format!("probe_duration must be > 0, got {probe_duration}")
        })?;
        Ok(Self {
            omega_c,
            probe_photon_target,
            probe_duration,
            two_photon_detuning_offset: 0.0,
        })
    }

    pub fn with_omega_c(mut self, omega_c: f64) -> Result<Self> {
        require(omega_c >= 0.0 && omega_c.is_finite(), || {
            format!("omega_c must be >= 0, got {omega_c}")
        })?;
        self.omega_c = omega_c;
        Ok(self)
    }

    pub fn with_photon_target(self, target: f64) -> Result<Self> {
        Self::new(self.omega_c, target, self.probe_duration)
            .map(|d| d.with_two_photon_offset(self.two_photon_detuning_offset))
    }

    pub fn with_duration(self, duration: f64) -> Result<Self> {
        Self::new(self.omega_c, self.probe_photon_target, duration)
            .map(|d| d.with_two_photon_offset(self.two_photon_detuning_offset))
    }

    /// Offset of the two-photon detuning from the probe-cavity detuning.
    pub fn with_two_photon_offset(mut self, offset: f64) -> Self {
        self.two_photon_detuning_offset = offset;
        self
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn probe_photon_target(&self) -> f64 {
        self.probe_photon_target
    }
    pub fn probe_duration(&self) -> f64 {
        self.probe_duration
    }
    pub fn two_photon_detuning_offset(&self) -> f64 {
        self.two_photon_detuning_offset
    }

    /// Two-photon detuning δ for a probe-cavity detuning `delta`.
    pub fn two_photon_detuning(&self, delta: f64) -> f64 {
        delta + self.two_photon_detuning_offset
    }
}

/// Evenly spaced probe-cavity detunings, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningGrid {
    start: f64,
    stop: f64,
    n_points: usize,
}

impl DetuningGrid {
    pub fn new(start: f64, stop: f64, n_points: usize) -> Result<Self> {
        require(start.is_finite() && stop.is_finite() && start < stop, || {
            format!("grid needs start < stop, got {start}..{stop}")
        })?;
        require(n_points >= 2, || format!("grid needs >= 2 points, got {n_points}"))?;
        Ok(Self {
            start,
            stop,
            n_points,
        })
    }

    pub fn from_hz(start_hz: f64, stop_hz: f64, n_points: usize) -> Result<Self> {
        Self::new(hz_to_rad(start_hz), hz_to_rad(stop_hz), n_points)
    }

    /// `[-half_width, +half_width]`; odd `n_points` puts a node at zero.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn start(&self) -> f64 {
        self.start
    }
    pub fn stop(&self) -> f64 {
        self.stop
    }
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            return self.stop;
        }
        let x = self.start + self.step() * i as f64;
        // an exact zero keeps symmetric grids exactly mirrored
        if (2 * i + 1 == self.n_points) && self.start == -self.stop {
            0.0
        } else {
            x
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }
}

/// Maps control-laser power to Rabi frequency, `Ωc = c·√P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiCalibration {
    /// rad/s per √W
    pub per_sqrt_watt: f64,
}

impl RabiCalibration {
    pub fn new(per_sqrt_watt: f64) -> Result<Self> {
        require(per_sqrt_watt > 0.0 && per_sqrt_watt.is_finite(), || {
            format!("calibration must be > 0, got {per_sqrt_watt}")
        })?;
        Ok(Self { per_sqrt_watt })
    }

    /// Calibration fixed by one reference point.
    pub fn from_reference(power: f64, omega_c: f64) -> Result<Self> {
        require(power > 0.0, || format!("reference power must be > 0, got {power}"))?;
        Self::new(omega_c / power.sqrt())
    }

    pub fn rabi(&self, power: f64) -> Result<f64> {
        rabi_from_power(power, self.per_sqrt_watt)
    }
}

pub fn rabi_from_power(power: f64, calibration: f64) -> Result<f64> {
    require(power >= 0.0 && power.is_finite(), || {
        format!("control power must be >= 0, got {power}")
    })?;
    require(calibration > 0.0 && calibration.is_finite(), || {
        format!("calibration must be > 0, got {calibration}")
    })?;
    Ok(calibration * power.sqrt())
}

/// A named bundle of parameters every pipeline can start from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub cavity: CavityParams,
    pub ensemble: EnsembleConfig,
    pub drive: DriveConfig,
    pub disorder: DisorderSpec,
    pub calibration: RabiCalibration,
}

impl Preset {
    pub const CANONICAL: &'static str = "paper2010";

    /// Single-atom cavity EIT apparatus: (g₀, κ, γ) = 2π×(4.5, 2.9, 3.0) MHz,
    /// γ_gs = 2π×65 kHz, effective coupling 0.4 g₀, Ωc = 0.78 κ, probe target
    /// 0.02 photons for 50 µs. The control calibration is pinned at
    /// 1 µW ↦ 0.45 κ.
    pub fn canonical() -> Self {
        let cavity = CavityParams::from_hz(4.5e6, 2.9e6, 3.0e6).expect("valid preset");
        let kappa = cavity.kappa();
        let ensemble = EnsembleConfig::uniform(1, 0.4 * cavity.g0(), hz_to_rad(65e3), 0.5)
            .expect("valid preset");
        let drive = DriveConfig::new(0.78 * kappa, 0.02, 50e-6).expect("valid preset");
        let disorder = DisorderSpec::new(
            Some(CouplingDistribution::TruncatedNormal {
                mean: 0.4,
                sigma: 0.1,
            }),
            StarkJitter::Uniform {
                half_width: hz_to_rad(5e6),
            },
            2000,
            2010,
        )
        .expect("valid preset");
        let calibration = RabiCalibration::from_reference(1e-6, 0.45 * kappa).expect("valid preset");
        Self {
            name: Self::CANONICAL.into(),
            cavity,
            ensemble,
            drive,
            disorder,
            calibration,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            Self::CANONICAL => Ok(Self::canonical()),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (known: {})",
                Self::CANONICAL
            ))),
        }
    }

    /// Control Rabi frequency expressed in units of κ.
    pub fn omega_c_kappa(&self, x: f64) -> f64 {
        x * self.cavity.kappa()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_coupling_examples() {
        let g0 = hz_to_rad(4.5e6);
        let single = EnsembleConfig::new(vec![g0], 0.0, 0.5).unwrap();
        assert_eq!(effective_coupling(&single).unwrap(), g0);

        let pair = EnsembleConfig::new(vec![g0, 0.0], 0.0, 0.5).unwrap();
        let got = effective_coupling(&pair).unwrap();
        assert!((got - g0 / 2f64.sqrt()).abs() < 1e-9 * g0);

        let reduced = EnsembleConfig::new(vec![hz_to_rad(1.8e6)], 0.0, 0.5).unwrap();
        let ratio = effective_coupling(&reduced).unwrap() / g0;
        assert!((ratio - 0.4).abs() < 1e-12);
    }

    #[test]
    fn effective_coupling_rejects_empty_and_distributions() {
        let empty = EnsembleConfig::new(vec![], 0.0, 0.5).unwrap();
        assert!(matches!(
            effective_coupling(&empty),
            Err(Error::InvalidInput(_))
        ));
        let dist = EnsembleConfig::distributed(3, CouplingDistribution::Delta(0.4), 0.0, 0.5)
            .unwrap();
        assert!(effective_coupling(&dist).is_err());
    }

    #[test]
    fn rabi_calibration_examples() {
        let p = Preset::canonical();
        let kappa = p.cavity.kappa();
        let at_1uw = p.calibration.rabi(1e-6).unwrap();
        assert!((at_1uw / kappa - 0.45).abs() < 1e-12);
        assert_eq!(p.calibration.rabi(0.0).unwrap(), 0.0);
        let at_9uw = p.calibration.rabi(9e-6).unwrap() / kappa;
        assert!((at_9uw - 1.35).abs() < 1e-12);
        assert!((at_9uw - 1.3).abs() / 1.3 < 0.05);
        assert!(matches!(
            rabi_from_power(-1e-6, 1.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn fig2_power_points_follow_sqrt_law() {
        // (1, 2, 3) µW quoted as (0.45, 0.63, 0.78) κ
        let p = Preset::canonical();
        let kappa = p.cavity.kappa();
        for (power, quoted) in [(1e-6, 0.45), (2e-6, 0.63), (3e-6, 0.78)] {
            let got = p.calibration.rabi(power).unwrap() / kappa;
            // quoted to two digits
            assert!((got - quoted).abs() / quoted < 0.02, "{power}: {got}");
        }
    }

    #[test]
    fn constructors_enforce_invariants() {
        assert!(CavityParams::new(0.0, 1.0, 1.0).is_err());
        assert!(CavityParams::new(1.0, -1.0, 1.0).is_err());
        assert!(EnsembleConfig::new(vec![-1.0], 0.0, 0.5).is_err());
        assert!(EnsembleConfig::new(vec![1.0], -1.0, 0.5).is_err());
        assert!(EnsembleConfig::new(vec![1.0], 0.0, 1.5).is_err());
        assert!(DriveConfig::new(-1.0, 0.02, 1e-6).is_err());
        assert!(DriveConfig::new(1.0, 0.0, 1e-6).is_err());
        assert!(DriveConfig::new(1.0, 0.02, 0.0).is_err());
        assert!(DetuningGrid::new(1.0, 1.0, 10).is_err());
        assert!(DetuningGrid::new(0.0, 1.0, 1).is_err());

        let cavity = CavityParams::from_hz(4.5e6, 2.9e6, 3.0e6).unwrap();
        let too_strong = EnsembleConfig::new(vec![2.0 * cavity.g0()], 0.0, 0.5).unwrap();
        assert!(too_strong.check_against(&cavity).is_err());
    }

    #[test]
    fn grid_points_are_even_and_increasing() {
        let grid = DetuningGrid::symmetric(3.0, 7).unwrap();
        let pts = grid.points();
        assert_eq!(pts.len(), 7);
        assert_eq!(pts[0], -3.0);
        assert_eq!(pts[3], 0.0);
        assert_eq!(pts[6], 3.0);
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
        for w in pts.windows(2) {
            assert!((w[1] - w[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hz_round_trip() {
        let c = CavityParams::from_hz(4.5e6, 2.9e6, 3.0e6).unwrap();
        for (rad, hz) in [(c.g0(), 4.5e6), (c.kappa(), 2.9e6), (c.gamma(), 3.0e6)] {
            assert!((rad_to_hz(rad) - hz).abs() <= 4.0 * f64::EPSILON * hz);
        }
    }
}
