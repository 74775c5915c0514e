//! Monte Carlo averaging of the steady-state transmission over coupling and Stark-shift disorder.
//!
//! Every sample `i` draws from its own ChaCha8 stream (`seed`, stream `i`),
//! so a spectrum depends only on the disorder spec and grid, never on evaluation
//! order. Ground-state decoherence is not sampled; it enters χ as the static
//! rate γ_gs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{hz_to_rad, CavityParams, Couplings, DetuningGrid, DriveConfig, EnsembleConfig};
use crate::transmission::{snapshot, Configuration, Eq1Curve, Spectrum, SpectrumMeta, SpectrumPoint};

/// Name of the sample stream algorithm, recorded in spectrum metadata.
pub const RNG_NAME: &str = "chacha8 (rand_chacha 0.9), seed_from_u64(seed), stream = sample index";

/// Largest AC-Stark excursion of the atomic transition, rad/s.
pub fn stark_bound() -> f64 {
    hz_to_rad(5e6)
}

/// Distribution of g/g₀, supported on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CouplingDistribution {
    Delta(f64),
    Uniform { lo: f64, hi: f64 },
    /// Normal(mean, sigma) conditioned on [0, 1].
    TruncatedNormal { mean: f64, sigma: f64 },
}

impl CouplingDistribution {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let ok = match *self {
            CouplingDistribution::Delta(x) => unit(x),
            CouplingDistribution::Uniform { lo, hi } => unit(lo) && unit(hi) && lo <= hi,
            CouplingDistribution::TruncatedNormal { mean, sigma } => {
                unit(mean) && sigma > 0.0 && sigma.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "coupling distribution {self:?} must be supported on [0, 1]"
            )))
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            CouplingDistribution::Delta(x) => x,
            CouplingDistribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            CouplingDistribution::TruncatedNormal { mean, sigma } => {
                truncated_normal(rng, mean, sigma, 0.0, 1.0)
            }
        }
    }

    /// ⟨(g/g₀)²⟩ where it has a simple closed form.
    pub fn mean_square(&self) -> Option<f64> {
        match *self {
            CouplingDistribution::Delta(x) => Some(x * x),
            CouplingDistribution::Uniform { lo, hi } => {
                Some((hi * hi + hi * lo + lo * lo) / 3.0)
            }
            CouplingDistribution::TruncatedNormal { .. } => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match *self {
            CouplingDistribution::Delta(_) => true,
            CouplingDistribution::Uniform { lo, hi } => lo == hi,
            CouplingDistribution::TruncatedNormal { .. } => false,
        }
    }
}

/// Shot-to-shot offset of the probe-atom detuning, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StarkJitter {
    None,
    Uniform { half_width: f64 },
    /// Normal(0, sigma) conditioned on ±[`stark_bound`].
    TruncatedNormal { sigma: f64 },
}

impl StarkJitter {
    pub fn validate(&self) -> Result<()> {
        let bound = stark_bound() * (1.0 + 1e-12);
        let ok = match *self {
            StarkJitter::None => true,
            StarkJitter::Uniform { half_width } => (0.0..=bound).contains(&half_width),
            StarkJitter::TruncatedNormal { sigma } => sigma > 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "Stark jitter {self:?} must stay within ±2π·5 MHz"
            )))
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            StarkJitter::None => 0.0,
            StarkJitter::Uniform { half_width } => half_width * (2.0 * rng.random::<f64>() - 1.0),
            StarkJitter::TruncatedNormal { sigma } => {
                let b = stark_bound();
                truncated_normal(rng, 0.0, sigma, -b, b)
            }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, StarkJitter::None | StarkJitter::Uniform { half_width: 0.0 })
    }
}

fn truncated_normal<R: Rng>(rng: &mut R, mean: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    let normal = Normal::new(mean, sigma).expect("validated sigma");
    // the mean lies inside [lo, hi], so acceptance is at least ~1/2 per bound
    loop {
        let x = normal.sample(rng);
        if (lo..=hi).contains(&x) {
            return x;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    /// Overrides the ensemble's couplings when present.
    pub coupling_dist: Option<CouplingDistribution>,
    pub stark_jitter: StarkJitter,
    pub n_samples: usize,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn new(
        coupling_dist: Option<CouplingDistribution>,
        stark_jitter: StarkJitter,
        n_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let spec = Self {
            coupling_dist,
            stark_jitter,
            n_samples,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = &self.coupling_dist {
            d.validate()?;
        }
        self.stark_jitter.validate()?;
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples must be >= 1"));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, n_samples: usize) -> Result<Self> {
        self.n_samples = n_samples;
        self.validate()?;
        Ok(self)
    }

    pub fn with_coupling(mut self, dist: Option<CouplingDistribution>) -> Result<Self> {
        self.coupling_dist = dist;
        self.validate()?;
        Ok(self)
    }

    pub fn with_jitter(mut self, jitter: StarkJitter) -> Result<Self> {
        self.stark_jitter = jitter;
        self.validate()?;
        Ok(self)
    }
}

/// One draw of the disordered parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSample {
    /// Per-atom couplings, rad/s.
    pub couplings: Vec<f64>,
    /// Extra probe-atom detuning, rad/s.
    pub stark_offset: f64,
}

impl DisorderSample {
    /// `Σ gᵢ²`, i.e. `g²N` for this draw.
    pub fn g2n(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }
}

/// Pre-drawn disorder samples. Evaluating several configurations against
/// the same ensemble uses common random numbers.
#[derive(Debug, Clone)]
pub struct DisorderEnsemble {
    samples: Vec<DisorderSample>,
    spec: DisorderSpec,
}

impl DisorderEnsemble {
    pub fn draw(cavity: &CavityParams, ensemble: &EnsembleConfig, spec: &DisorderSpec) -> Result<Self> {
        spec.validate()?;
        ensemble.check_against(cavity)?;
        let n_atoms = ensemble.n_atoms();
        let dist = match (spec.coupling_dist, ensemble.couplings()) {
            (Some(d), _) => Some(d),
            (None, Couplings::Distribution { dist, .. }) => Some(*dist),
            (None, Couplings::PerAtom(_)) => None,
        };
        let samples = (0..spec.n_samples)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                rng.set_stream(i as u64);
                let couplings = match (&dist, ensemble.couplings()) {
                    (Some(d), _) => (0..n_atoms).map(|_| d.sample(&mut rng) * cavity.g0()).collect(),
                    (None, Couplings::PerAtom(gs)) => gs.clone(),
                    (None, Couplings::Distribution { .. }) => unreachable!(),
                };
                let stark_offset = spec.stark_jitter.sample(&mut rng);
                DisorderSample {
                    couplings,
                    stark_offset,
                }
            })
            .collect();
        Ok(Self {
            samples,
            spec: *spec,
        })
    }

    pub fn samples(&self) -> &[DisorderSample] {
        &self.samples
    }

    pub fn spec(&self) -> &DisorderSpec {
        &self.spec
    }

    /// Averaged transmission curve for one configuration.
    pub fn curve(
        &self,
        cavity: &CavityParams,
        ensemble: &EnsembleConfig,
        drive: &DriveConfig,
        configuration: Configuration,
    ) -> Result<AveragedCurve<'_>> {
        ensemble.check_against(cavity)?;
        Ok(AveragedCurve {
            ensemble: self,
            template: Eq1Curve::template(cavity, ensemble, drive, configuration),
            configuration,
        })
    }
}

/// Sample mean of the steady-state transmission over a [`DisorderEnsemble`].
#[derive(Debug, Clone, Copy)]
pub struct AveragedCurve<'a> {
    ensemble: &'a DisorderEnsemble,
    template: Eq1Curve,
    configuration: Configuration,
}

impl AveragedCurve<'_> {
    fn sample_value(&self, index: usize, delta: f64) -> Result<f64> {
        let s = &self.ensemble.samples[index];
        let g2n = match self.configuration {
            Configuration::Empty => 0.0,
            _ => s.g2n(),
        };
        let t = self.template.with_g2n(g2n).eval(delta, s.stark_offset);
        if t.is_finite() {
            Ok(t)
        } else {
            Err(Error::AtSample {
                index,
                source: Box::new(Error::Singular {
                    delta_a: delta + self.template.atomic_shift + s.stark_offset,
                    delta: delta + self.template.two_photon_offset,
                    omega_c: self.template.omega_c,
                    gamma: self.template.gamma,
                    gamma_gs: self.template.gamma_gs,
                }),
            })
        }
    }

    pub fn transmission(&self, delta: f64) -> Result<f64> {
        Ok(self.mean_and_error(delta)?.0)
    }

    /// Sample mean and its standard error at `delta`.
    pub fn mean_and_error(&self, delta: f64) -> Result<(f64, f64)> {
        // Welford update: identical samples average to themselves exactly.
        let n = self.ensemble.samples.len();
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for i in 0..n {
            let t = self.sample_value(i, delta)?;
            let d = t - mean;
            mean += d / (i + 1) as f64;
            m2 += d * (t - mean);
        }
        let err = if n > 1 {
            (m2.max(0.0) / (n as f64 - 1.0) / n as f64).sqrt()
        } else {
            0.0
        };
        Ok((mean, err))
    }

    /// Smallest and largest per-sample value at `delta`.
    pub fn sample_range(&self, delta: f64) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.ensemble.samples.len() {
            let t = self.sample_value(i, delta)?;
            lo = lo.min(t);
            hi = hi.max(t);
        }
        Ok((lo, hi))
    }
}

/// An averaged spectrum together with the per-point standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedSpectrum {
    pub spectrum: Spectrum,
    pub std_error: Vec<f64>,
}

pub fn averaged_spectrum_with_errors(
    grid: &DetuningGrid,
    configuration: Configuration,
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
    disorder: &DisorderSpec,
) -> Result<AveragedSpectrum> {
    let draws = DisorderEnsemble::draw(cavity, ensemble, disorder)?;
    averaged_from_draws(grid, configuration, cavity, ensemble, drive, &draws)
}

/// Like [`averaged_spectrum_with_errors`] but over samples already drawn.
pub fn averaged_from_draws(
    grid: &DetuningGrid,
    configuration: Configuration,
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
    draws: &DisorderEnsemble,
) -> Result<AveragedSpectrum> {
    let curve = draws.curve(cavity, ensemble, drive, configuration)?;
    let mut points = Vec::with_capacity(grid.n_points());
    let mut std_error = Vec::with_capacity(grid.n_points());
    for delta in grid.points() {
        let (mean, err) = curve
            .mean_and_error(delta)
            .map_err(|e| e.at_detuning(delta))?;
        points.push(SpectrumPoint {
            delta,
            transmission: mean,
        });
        std_error.push(err);
    }
    let spec = draws.spec();
    let mut params = snapshot(cavity, ensemble, drive);
    params["disorder"] = serde_json::to_value(spec)?;
    let meta = SpectrumMeta {
        model: "eq1-averaged".into(),
        configuration: Some(configuration),
        params,
        seed: Some(spec.seed),
        rng: Some(RNG_NAME.into()),
        n_samples: Some(spec.n_samples),
    };
    Ok(AveragedSpectrum {
        spectrum: Spectrum::new(points, meta)?,
        std_error,
    })
}

/// Pointwise mean of the steady-state transmission over `disorder.n_samples` independent draws.
pub fn averaged_spectrum(
    grid: &DetuningGrid,
    configuration: Configuration,
    cavity: &CavityParams,
    ensemble: &EnsembleConfig,
    drive: &DriveConfig,
    disorder: &DisorderSpec,
) -> Result<Spectrum> {
    averaged_spectrum_with_errors(grid, configuration, cavity, ensemble, drive, disorder)
        .map(|a| a.spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{effective_coupling, Preset};
    use crate::transmission::sweep;

    #[test]
    fn degenerate_distribution_is_identity() {
        let p = Preset::canonical();
        let grid = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 61).unwrap();
        let spec = DisorderSpec::new(Some(CouplingDistribution::Delta(0.4)), StarkJitter::None, 7, 1)
            .unwrap();
        for cfg in Configuration::ALL {
            let avg = averaged_spectrum(&grid, cfg, &p.cavity, &p.ensemble, &p.drive, &spec).unwrap();
            let plain = sweep(&grid, cfg, &p.cavity, &p.ensemble, &p.drive).unwrap();
            for (a, b) in avg.points().iter().zip(plain.points()) {
                assert!((a.transmission - b.transmission).abs() <= 1e-15, "{cfg}");
            }
        }
    }

    #[test]
    fn same_seed_same_spectrum() {
        let p = Preset::canonical();
        let grid = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 31).unwrap();
        let spec = p.disorder.with_samples(200).unwrap();
        let a = averaged_spectrum(&grid, Configuration::CavityEit, &p.cavity, &p.ensemble, &p.drive, &spec)
            .unwrap();
        let b = averaged_spectrum(&grid, Configuration::CavityEit, &p.cavity, &p.ensemble, &p.drive, &spec)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.meta().seed, Some(spec.seed));
        assert_eq!(a.meta().n_samples, Some(200));
        assert_eq!(a.meta().rng.as_deref(), Some(RNG_NAME));
        let c = averaged_spectrum(
            &grid,
            Configuration::CavityEit,
            &p.cavity,
            &p.ensemble,
            &p.drive,
            &spec.with_seed(spec.seed + 1),
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn samples_depend_only_on_index() {
        // growing the sample count leaves the earlier draws untouched
        let p = Preset::canonical();
        let small = DisorderEnsemble::draw(&p.cavity, &p.ensemble.with_atoms(3).unwrap(), &p.disorder.with_samples(10).unwrap())
            .unwrap();
        let large = DisorderEnsemble::draw(&p.cavity, &p.ensemble.with_atoms(3).unwrap(), &p.disorder.with_samples(50).unwrap())
            .unwrap();
        assert_eq!(small.samples(), &large.samples()[..10]);
    }

    #[test]
    fn draws_respect_bounds() {
        let p = Preset::canonical();
        let draws = DisorderEnsemble::draw(&p.cavity, &p.ensemble.with_atoms(4).unwrap(), &p.disorder.with_samples(500).unwrap())
            .unwrap();
        for s in draws.samples() {
            assert_eq!(s.couplings.len(), 4);
            assert!(s.couplings.iter().all(|&g| (0.0..=p.cavity.g0()).contains(&g)));
            assert!(s.stark_offset.abs() <= stark_bound());
        }
    }

    #[test]
    fn uniform_coupling_moment_matches_monte_carlo() {
        // ⟨(g/g₀)²⟩ for U[0, 0.8] is 0.64/3; RMS coupling 0.8/√3 ≈ 0.462 g₀
        let p = Preset::canonical();
        let dist = CouplingDistribution::Uniform { lo: 0.0, hi: 0.8 };
        let analytic = dist.mean_square().unwrap();
        assert!((analytic.sqrt() - 0.8 / 3f64.sqrt()).abs() < 1e-15);
        let spec = DisorderSpec::new(Some(dist), StarkJitter::None, 20_000, 7).unwrap();
        let draws = DisorderEnsemble::draw(&p.cavity, &p.ensemble, &spec).unwrap();
        let g0 = p.cavity.g0();
        let xs: Vec<f64> = draws.samples().iter().map(|s| s.g2n() / (g0 * g0)).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!((mean - analytic).abs() < 3.0 * se, "{mean} vs {analytic} ± {se}");
    }

    #[test]
    fn averaging_stays_within_sample_range() {
        let p = Preset::canonical();
        let spec = p.disorder.with_samples(300).unwrap();
        let draws = DisorderEnsemble::draw(&p.cavity, &p.ensemble, &spec).unwrap();
        let curve = draws.curve(&p.cavity, &p.ensemble, &p.drive, Configuration::CavityEit).unwrap();
        for k in -10..=10 {
            let d = 0.3 * p.cavity.kappa() * k as f64;
            let (lo, hi) = curve.sample_range(d).unwrap();
            let m = curve.transmission(d).unwrap();
            assert!(lo <= m && m <= hi);
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(DisorderSpec::new(None, StarkJitter::None, 0, 1).is_err());
        assert!(DisorderSpec::new(
            Some(CouplingDistribution::Uniform { lo: 0.5, hi: 1.2 }),
            StarkJitter::None,
            1,
            1
        )
        .is_err());
        assert!(DisorderSpec::new(
            None,
            StarkJitter::Uniform {
                half_width: hz_to_rad(6e6)
            },
            1,
            1
        )
        .is_err());
    }

    #[test]
    fn explicit_couplings_kept_without_distribution() {
        let p = Preset::canonical();
        let spec = DisorderSpec::new(None, StarkJitter::None, 3, 0).unwrap();
        let draws = DisorderEnsemble::draw(&p.cavity, &p.ensemble, &spec).unwrap();
        let g = effective_coupling(&p.ensemble).unwrap();
        for s in draws.samples() {
            assert_eq!(s.couplings, vec![g]);
        }
    }
}
