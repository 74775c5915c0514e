//! The Λ-system susceptibility: two-level response, EIT dip and the dark
//! state at two-photon resonance.
//!
//! cargo run --example susceptibility

use cavity_eit::{chi, hz_to_rad, Result, SusceptibilityInput};

fn main() -> Result<()> {
    let gamma = hz_to_rad(3.0e6);
    for (label, omega_c, gamma_gs) in [
        ("two-level", 0.0, 0.0),
        ("EIT", hz_to_rad(2.26e6), hz_to_rad(65e3)),
        ("EIT, no ground dephasing", hz_to_rad(2.26e6), 0.0),
    ] {
        println!("{label}");
        for mhz in [-4.0, -1.0, -0.2, 0.0, 0.2, 1.0, 4.0] {
            let d = hz_to_rad(mhz * 1e6);
            let x = chi(&SusceptibilityInput {
                delta_a: d,
                delta_2: d,
                omega_c,
                gamma,
                gamma_gs,
            })?;
            println!("  Δ = {mhz:>5.1} MHz   γχ = {:>9.5} {:+.5}i", gamma * x.re, gamma * x.im);
        }
    }
    Ok(())
}
