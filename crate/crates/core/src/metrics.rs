//! Figures of merit extracted from transmission spectra: transparency,
//! contrast, the cavity-EIT linewidth, vacuum-Rabi peak positions and
//! power-law scaling fits.

use serde::Serialize;

use crate::disorder::AveragedCurve;
use crate::error::{Error, Result};
use crate::model::rad_to_hz;
use crate::transmission::{Eq1Curve, Spectrum, SpectrumTriple};

/// Relative tolerance on the half-crossing detuning.
pub const FWHM_RTOL: f64 = 1e-6;

/// Geometric scan used for unbounded curves: first probe, last probe (rad/s)
/// and ratio between successive probes.
const SCAN_START: f64 = 1e2;
const SCAN_STOP: f64 = 1e11;
const SCAN_RATIO: f64 = 1.02;

/// Anything that yields a transmission at a probe detuning (rad/s).
pub trait TransmissionCurve {
    fn transmission_at(&self, delta: f64) -> Result<f64>;

    /// Closed detuning interval on which the curve is defined, if bounded.
    fn domain(&self) -> Option<(f64, f64)> {
        None
    }

    /// Detunings where the curve changes piecewise, for bracketing.
    fn knots(&self) -> Option<&[f64]> {
        None
    }
}

impl TransmissionCurve for Eq1Curve {
    fn transmission_at(&self, delta: f64) -> Result<f64> {
        Ok(self.transmission(delta))
    }
}

impl TransmissionCurve for AveragedCurve<'_> {
    fn transmission_at(&self, delta: f64) -> Result<f64> {
        self.transmission(delta)
    }
}

impl<F: Fn(f64) -> f64> TransmissionCurve for F {
    fn transmission_at(&self, delta: f64) -> Result<f64> {
        Ok(self(delta))
    }
}

/// Fritsch–Carlson monotone cubic interpolant through sampled points.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::invalid("interpolation needs at least two matching samples"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("interpolation abscissae must be strictly increasing"));
        }
        let n = x.len();
        let secant: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = secant[0];
        m[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            m[i] = if secant[i - 1] * secant[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secant[i - 1] + secant[i])
            };
        }
        for i in 0..n - 1 {
            if secant[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            let a = m[i] / secant[i];
            let b = m[i + 1] / secant[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[i] = tau * a * secant[i];
                m[i + 1] = tau * b * secant[i];
            }
        }
        Ok(Self { x, y, slopes: m })
    }

    pub fn from_spectrum(spectrum: &Spectrum) -> Result<Self> {
        Self::new(spectrum.deltas(), spectrum.transmissions())
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        let n = self.x.len();
        if !(x >= self.x[0] && x <= self.x[n - 1]) {
            return None;
        }
        let i = match self.x.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * self.y[i]
                + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
                + (-2.0 * t3 + 3.0 * t2) * self.y[i + 1]
                + (t3 - t2) * h * self.slopes[i + 1],
        )
    }
}

impl TransmissionCurve for MonotoneCubic {
    fn transmission_at(&self, delta: f64) -> Result<f64> {
        self.eval(delta).ok_or_else(|| {
            Error::invalid(format!(
                "detuning {delta} outside the sampled range [{}, {}]",
                self.x[0],
                self.x[self.x.len() - 1]
            ))
        })
    }

    fn domain(&self) -> Option<(f64, f64)> {
        Some((self.x[0], self.x[self.x.len() - 1]))
    }

    fn knots(&self) -> Option<&[f64]> {
        Some(&self.x)
    }
}

/// Cavity-EIT linewidth `2Δc`, where `Δc > 0` is the smallest offset from
/// `center` at which the EIT curve falls to the midpoint between its value at
/// `center` and the two-level value there.
pub fn fwhm_ceit<E, R>(eit: &E, two_level: &R, center: f64) -> Result<f64>
where
    E: TransmissionCurve + ?Sized,
    R: TransmissionCurve + ?Sized,
{
    let peak = eit.transmission_at(center)?;
    let floor = two_level.transmission_at(center)?;
    if !(peak > floor) {
        return Err(Error::NoTransparency {
            t_eit: peak,
            t_two_level: floor,
        });
    }
    let level = 0.5 * (peak + floor);
    let above = |d: f64| -> Result<bool> { Ok(eit.transmission_at(center + d)? > level) };

    let probes: Vec<f64> = match (eit.knots(), eit.domain()) {
        (Some(knots), _) => knots.iter().map(|&k| k - center).filter(|&d| d > 0.0).collect(),
        (None, Some((_, hi))) => geometric_scan().filter(|&d| center + d <= hi).collect(),
        (None, None) => geometric_scan().collect(),
    };

    let mut lo = 0.0;
    for d in probes {
        if !above(d)? {
            return bisect(lo, d, above).map(|dc| 2.0 * dc);
        }
        lo = d;
    }
    Err(Error::UndefinedLinewidth(format!(
        "transmission never falls to the half level {level:.6} within {:.6e} rad/s of the resonance",
        lo
    )))
}

fn geometric_scan() -> impl Iterator<Item = f64> {
    std::iter::successors(Some(SCAN_START), |&d| Some(d * SCAN_RATIO)).take_while(|&d| d <= SCAN_STOP)
}

/// Shrink `[lo, hi]` (above at `lo`, not above at `hi`) to `FWHM_RTOL`.
fn bisect(mut lo: f64, mut hi: f64, above: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    while hi - lo > FWHM_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// FWHM of sampled spectra through monotone cubic interpolation.
pub fn fwhm_ceit_sampled(eit: &Spectrum, two_level: &Spectrum, center: f64) -> Result<f64> {
    let e = MonotoneCubic::from_spectrum(eit)?;
    let r = MonotoneCubic::from_spectrum(two_level)?;
    fwhm_ceit(&e, &r, center)
}

/// `(T_EIT(center), T_EIT(center) − T_2level(center))`.
pub fn transparency_and_contrast<E, R>(eit: &E, two_level: &R, center: f64) -> Result<(f64, f64)>
where
    E: TransmissionCurve + ?Sized,
    R: TransmissionCurve + ?Sized,
{
    let t = eit.transmission_at(center)?;
    Ok((t, t - two_level.transmission_at(center)?))
}

/// As [`transparency_and_contrast`] on sampled spectra; both grids must
/// contain `center`.
pub fn transparency_and_contrast_sampled(
    eit: &Spectrum,
    two_level: &Spectrum,
    center: f64,
) -> Result<(f64, f64)> {
    let lookup = |s: &Spectrum, which: &str| {
        let tol = grid_tolerance(s);
        s.value_at(center, tol).ok_or_else(|| {
            Error::invalid(format!("{which} spectrum has no sample at the resonance {center} rad/s"))
        })
    };
    let t = lookup(eit, "EIT")?;
    Ok((t, t - lookup(two_level, "two-level")?))
}

fn grid_tolerance(s: &Spectrum) -> f64 {
    let d = s.deltas();
    let span = d.last().copied().unwrap_or(0.0) - d.first().copied().unwrap_or(0.0);
    1e-9 * span.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RabiPeaks {
    Resolved { lower: f64, upper: f64 },
    Unresolved,
}

impl RabiPeaks {
    pub fn splitting(&self) -> Option<f64> {
        match *self {
            RabiPeaks::Resolved { lower, upper } => Some(upper - lower),
            RabiPeaks::Unresolved => None,
        }
    }
}

/// Positions of the two strongest local maxima of a two-level spectrum,
/// refined by a parabola through each maximum and its neighbours.
pub fn rabi_peaks(two_level: &Spectrum) -> RabiPeaks {
    let x = two_level.deltas();
    let y = two_level.transmissions();
    let mut maxima: Vec<(usize, f64)> = (1..y.len().saturating_sub(1))
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .map(|i| (i, y[i]))
        .collect();
    if maxima.len() < 2 {
        return RabiPeaks::Unresolved;
    }
    maxima.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut peaks = [refine(&x, &y, maxima[0].0), refine(&x, &y, maxima[1].0)];
    peaks.sort_by(f64::total_cmp);
    RabiPeaks::Resolved {
        lower: peaks[0],
        upper: peaks[1],
    }
}

fn refine(x: &[f64], y: &[f64], i: usize) -> f64 {
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        x1
    } else {
        (x1 - 0.5 * num / den).clamp(x0, x2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// Euclidean norm of the log-space residuals.
    pub residual_norm: f64,
}

/// Least-squares fit of `y = c·x^p` in log–log space.
pub fn scaling_fit(family: &[(f64, f64)]) -> Result<ScalingFit> {
    if family.len() < 3 {
        return Err(Error::invalid(format!(
            "scaling fit needs at least 3 points, got {}",
            family.len()
        )));
    }
    if let Some(&(x, y)) = family.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::invalid(format!("scaling fit needs positive values, got ({x}, {y})")));
    }
    let n = family.len() as f64;
    let lx: Vec<f64> = family.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = family.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("scaling fit needs at least two distinct x values"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let p = sxy / sxx;
    let intercept = my - p * mx;
    let residual_norm = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - p * a).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(ScalingFit {
        exponent: p,
        coefficient: intercept.exp(),
        residual_norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub transparency: f64,
    pub contrast: f64,
    pub fwhm_hz: Option<f64>,
    /// Why the linewidth is undefined, when it is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm_error: Option<String>,
    pub rabi_peaks_hz: RabiPeaks,
    pub inputs: serde_json::Value,
}

impl MetricsReport {
    /// Metrics of a sampled triple. Linewidth failures are recorded, not
    /// propagated; a missing resonance sample is an error.
    pub fn from_triple(triple: &SpectrumTriple, center: f64) -> Result<Self> {
        let (transparency, contrast) =
            transparency_and_contrast_sampled(&triple.eit, &triple.two_level, center)?;
        let (fwhm_hz, fwhm_error) = match fwhm_ceit_sampled(&triple.eit, &triple.two_level, center) {
            Ok(w) => (Some(rad_to_hz(w)), None),
            Err(e @ (Error::UndefinedLinewidth(_) | Error::NoTransparency { .. })) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
        let rabi = match rabi_peaks(&triple.two_level) {
            RabiPeaks::Resolved { lower, upper } => RabiPeaks::Resolved {
                lower: rad_to_hz(lower),
                upper: rad_to_hz(upper),
            },
            RabiPeaks::Unresolved => RabiPeaks::Unresolved,
        };
        Ok(Self {
            transparency,
            contrast,
            fwhm_hz,
            fwhm_error,
            rabi_peaks_hz: rabi,
            inputs: triple.eit.meta().params.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{hz_to_rad, CavityParams, DetuningGrid, DriveConfig, EnsembleConfig, Preset};
    use crate::transmission::{sweep_triple, Configuration, SpectrumMeta};

    fn triangle(height: f64, half_base: f64) -> impl Fn(f64) -> f64 {
        move |d: f64| (height * (1.0 - d.abs() / half_base)).max(0.0)
    }

    #[test]
    fn triangle_half_crossing_is_exact() {
        // peak 0.9 over flat 0.1: level 0.5 reached at 0.9(1 − d/w) = 0.5
        let w = 1.0e6;
        let eit = triangle(0.9, w);
        let floor = |_d: f64| 0.1;
        let fwhm = fwhm_ceit(&eit, &floor, 0.0).unwrap();
        let expected = 2.0 * w * (1.0 - 0.5 / 0.9);
        assert!((fwhm - expected).abs() <= 2e-6 * expected, "{fwhm} vs {expected}");
    }

    #[test]
    fn sampled_triangle_matches_analytic_width() {
        let w = 1.0e6;
        let f = triangle(0.9, w);
        let xs: Vec<f64> = (-200..=200).map(|k| k as f64 * 1e4).collect();
        let eit = Spectrum::from_columns(&xs, &xs.iter().map(|&x| f(x)).collect::<Vec<_>>(), SpectrumMeta::model("test"))
            .unwrap();
        let floor = Spectrum::from_columns(&xs, &vec![0.1; xs.len()], SpectrumMeta::model("test")).unwrap();
        let fwhm = fwhm_ceit_sampled(&eit, &floor, 0.0).unwrap();
        let expected = 2.0 * w * (1.0 - 0.5 / 0.9);
        assert!((fwhm - expected).abs() <= 1e-5 * expected);
    }

    #[test]
    fn no_transparency_and_undefined_width() {
        let flat = |_d: f64| 0.5;
        assert!(matches!(fwhm_ceit(&flat, &flat, 0.0), Err(Error::NoTransparency { .. })));
        let high = |_d: f64| 0.9;
        assert!(matches!(fwhm_ceit(&high, &flat, 0.0), Err(Error::UndefinedLinewidth(_))));
    }

    #[test]
    fn monotone_interpolant_does_not_overshoot() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 1.0, 1.0, 1.0];
        let m = MonotoneCubic::new(x, y).unwrap();
        for k in 0..=400 {
            let v = m.eval(k as f64 * 0.01).unwrap();
            assert!((0.0..=1.0).contains(&v), "{v}");
        }
        assert_eq!(m.eval(2.0), Some(1.0));
        assert!(m.eval(4.5).is_none());
    }

    #[test]
    fn scaling_fit_recovers_power_law() {
        let family: Vec<_> = [1.0, 2.0, 3.0, 5.0].iter().map(|&x| (x, 2.0 * x)).collect();
        let fit = scaling_fit(&family).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-12);
        assert!((fit.coefficient - 2.0).abs() < 1e-12);
        assert!(fit.residual_norm < 1e-12);
        assert!(scaling_fit(&family[..2]).is_err());
        assert!(scaling_fit(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn contrast_of_identical_spectra_is_zero() {
        let f = |d: f64| 1.0 / (1.0 + d * d);
        assert_eq!(transparency_and_contrast(&f, &f, 0.0).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn dark_state_transparency_is_one() {
        let p = Preset::canonical();
        let ens = p.ensemble.with_gamma_gs(0.0).unwrap();
        for n in [1, 3, 7] {
            let e = ens.with_atoms(n).unwrap();
            let eit = Eq1Curve::new(&p.cavity, &e, &p.drive, Configuration::CavityEit).unwrap();
            let two = Eq1Curve::new(&p.cavity, &e, &p.drive, Configuration::TwoLevel).unwrap();
            let (t, c) = transparency_and_contrast(&eit, &two, 0.0).unwrap();
            assert_eq!(t, 1.0);
            assert!(c > 0.0);
        }
    }

    #[test]
    fn sampled_metrics_need_the_resonance_point() {
        let p = Preset::canonical();
        let even = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 40).unwrap();
        let triple = sweep_triple(&even, &p.cavity, &p.ensemble, &p.drive).unwrap();
        assert!(MetricsReport::from_triple(&triple, 0.0).is_err());
        let odd = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 41).unwrap();
        let triple = sweep_triple(&odd, &p.cavity, &p.ensemble, &p.drive).unwrap();
        let report = MetricsReport::from_triple(&triple, 0.0).unwrap();
        assert!(report.transparency > report.contrast);
    }

    #[test]
    fn model_and_dense_sampled_widths_agree() {
        let p = Preset::canonical();
        let eit = Eq1Curve::new(&p.cavity, &p.ensemble, &p.drive, Configuration::CavityEit).unwrap();
        let two = Eq1Curve::new(&p.cavity, &p.ensemble, &p.drive, Configuration::TwoLevel).unwrap();
        let direct = fwhm_ceit(&eit, &two, 0.0).unwrap();
        let grid = DetuningGrid::symmetric(hz_to_rad(4e6), 4001).unwrap();
        let triple = sweep_triple(&grid, &p.cavity, &p.ensemble, &p.drive).unwrap();
        let sampled = fwhm_ceit_sampled(&triple.eit, &triple.two_level, 0.0).unwrap();
        assert!((sampled - direct).abs() < 1e-3 * direct, "{sampled} vs {direct}");
    }

    #[test]
    fn rabi_doublet_is_resolved_for_strong_coupling() {
        let cavity = CavityParams::from_hz(4.5e6, 2.9e6, 3.0e6).unwrap();
        let ens = EnsembleConfig::uniform(16, cavity.g0(), 0.0, 0.5).unwrap();
        let drive = DriveConfig::new(0.0, 0.02, 50e-6).unwrap();
        let grid = DetuningGrid::symmetric(hz_to_rad(60e6), 2401).unwrap();
        let triple = sweep_triple(&grid, &cavity, &ens, &drive).unwrap();
        let peaks = rabi_peaks(&triple.two_level);
        let split = peaks.splitting().unwrap();
        // normal-mode splitting close to 2g√N
        let expected = 2.0 * cavity.g0() * 4.0;
        assert!((split - expected).abs() < 0.05 * expected, "{split} vs {expected}");

        assert_eq!(rabi_peaks(&triple.empty), RabiPeaks::Unresolved);
    }
}
