//! Linear-response susceptibility of a Λ-type EIT medium.
//!
//! ```text
//! χ = (δ + iγ_gs) / [ (Δa + iγ)(δ + iγ_gs) − Ωc²/4 ]
//! ```
//!
//! χ carries units of 1/(rad/s) so that `g²Nχ` is a frequency. With this sign
//! convention an absorbing medium has `Im χ ≤ 0`; the control-off limit is
//! the two-level response `1/(Δa + iγ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityInput {
    /// Probe-atom detuning Δa, rad/s.
    pub delta_a: f64,
    /// Two-photon detuning δ, rad/s.
    pub delta_2: f64,
    pub omega_c: f64,
    pub gamma: f64,
    pub gamma_gs: f64,
}

impl SusceptibilityInput {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::invalid(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.gamma_gs >= 0.0) {
            return Err(Error::invalid(format!(
                "gamma_gs must be >= 0, got {}",
                self.gamma_gs
            )));
        }
        if !(self.omega_c >= 0.0) {
            return Err(Error::invalid(format!(
                "omega_c must be >= 0, got {}",
                self.omega_c
            )));
        }
        if !(self.delta_a.is_finite() && self.delta_2.is_finite()) {
            return Err(Error::invalid("detunings must be finite"));
        }
        Ok(())
    }
}

pub fn chi(input: &SusceptibilityInput) -> Result<Complex64> {
    input.validate()?;
    let z = chi_unchecked(input);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Singular {
            delta_a: input.delta_a,
            delta: input.delta_2,
            omega_c: input.omega_c,
            gamma: input.gamma,
            gamma_gs: input.gamma_gs,
        });
    }
    Ok(z)
}

/// [`chi`] without the input validation, for hot loops over inputs that were
/// validated once up front.
///
/// Evaluated as `1 / [(Δa + iγ) − (Ωc²/4)/(δ + iγ_gs)]`, which equals the
/// closed form wherever that is defined and stays finite at the removable
/// point Ωc = δ = γ_gs = 0.
pub(crate) fn chi_unchecked(input: &SusceptibilityInput) -> Complex64 {
    let optical = Complex64::new(input.delta_a, input.gamma);
    if input.omega_c == 0.0 {
        return optical.inv();
    }
    let raman = Complex64::new(input.delta_2, input.gamma_gs);
    if raman == Complex64::new(0.0, 0.0) {
        // perfect dark state
        return Complex64::new(0.0, 0.0);
    }
    let dressing = 0.25 * input.omega_c * input.omega_c;
    let denom = optical - raman.inv() * dressing;
    // Im(denom) ≥ γ > 0 for any δ, so this cannot vanish
    denom.inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hz_to_rad;

    const GAMMA: f64 = 2.0 * std::f64::consts::PI * 3.0e6;

    fn input(delta_a: f64, delta_2: f64, omega_c: f64, gamma_gs: f64) -> SusceptibilityInput {
        SusceptibilityInput {
            delta_a,
            delta_2,
            omega_c,
            gamma: GAMMA,
            gamma_gs,
        }
    }

    fn closed_form(i: &SusceptibilityInput) -> Complex64 {
        let num = Complex64::new(i.delta_2, i.gamma_gs);
        let den = Complex64::new(i.delta_a, i.gamma) * num
            - Complex64::new(0.25 * i.omega_c * i.omega_c, 0.0);
        num / den
    }

    #[test]
    fn control_off_is_two_level() {
        for k in -20..=20 {
            let d = 0.5 * GAMMA * k as f64;
            let got = chi(&input(d, d, 0.0, hz_to_rad(65e3))).unwrap();
            let expected = Complex64::new(d, GAMMA).inv();
            assert!((got - expected).norm() <= 1e-15 * expected.norm());
        }
        // removable point of the product form
        let at_zero = chi(&input(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!((at_zero - Complex64::new(0.0, -1.0 / GAMMA)).norm() < 1e-20);
    }

    #[test]
    fn dark_state_is_exactly_transparent() {
        let z = chi(&input(0.0, 0.0, 0.78 * hz_to_rad(2.9e6), 0.0)).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn preset_point_matches_independent_closed_form() {
        // Δa = δ = 0, Ωc = 0.78κ, γ_gs = 2π·65 kHz. Closed form in MHz units
        // (exact rationals): χ·2π·1MHz = i·0.065 / (−3·0.065 − (0.78·2.9)²/4)
        //                 = −0.0440929... i
        let oc = 0.78 * hz_to_rad(2.9e6);
        let got = chi(&input(0.0, 0.0, oc, hz_to_rad(65e3))).unwrap();
        let denom_mhz: f64 = -3.0 * 0.065 - (0.78f64 * 2.9).powi(2) / 4.0;
        let expected_im = 0.065 / denom_mhz / hz_to_rad(1e6);
        assert!(got.re.abs() < 1e-22);
        assert!((got.im - expected_im).abs() < 1e-12 * expected_im.abs());
        // frozen from a 30-digit mpmath evaluation, 1/(rad/s)
        assert!((got.im - -7.017_599_367_350_782e-9).abs() < 1e-20, "{}", got.im);
    }

    #[test]
    fn matches_product_form_off_singular_points() {
        let oc = hz_to_rad(2.0e6);
        for &(da, d) in &[(1e6, 2e6), (-3e7, 5e5), (0.0, 1e3), (4e7, -4e7)] {
            let i = input(da, d, oc, hz_to_rad(65e3));
            let got = chi(&i).unwrap();
            let expected = closed_form(&i);
            assert!((got - expected).norm() <= 1e-13 * expected.norm());
        }
    }

    #[test]
    fn rejects_invalid_rates() {
        let mut i = input(0.0, 0.0, 1.0, 0.0);
        i.gamma = 0.0;
        assert!(chi(&i).is_err());
        let i = input(0.0, 0.0, -1.0, 0.0);
        assert!(chi(&i).is_err());
    }
}
