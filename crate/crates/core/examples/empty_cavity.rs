//! Bare-cavity transmission: a Lorentzian of half width κ.
//!
//! cargo run --example empty_cavity

use cavity_eit::metrics::fwhm_ceit;
use cavity_eit::{rad_to_hz, Configuration, Eq1Curve, Preset, Result};

fn main() -> Result<()> {
    let p = Preset::canonical();
    let empty = p.ensemble.with_atoms(0)?;
    let curve = Eq1Curve::new(&p.cavity, &empty, &p.drive, Configuration::Empty)?;
    let kappa = p.cavity.kappa();
    for k in [-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0] {
        let delta = k * kappa;
        println!("Δ = {:>5.1} κ   T = {:.6}", k, curve.transmission(delta));
    }
    // The empty curve compared against a zero reference has its half-maximum
    // crossings at ±κ.
    let zero = |_: f64| 0.0;
    let width = fwhm_ceit(&curve, &zero, 0.0)?;
    println!("FWHM = {:.4} MHz (2κ = {:.4} MHz)", rad_to_hz(width) * 1e-6, rad_to_hz(2.0 * kappa) * 1e-6);
    Ok(())
}
