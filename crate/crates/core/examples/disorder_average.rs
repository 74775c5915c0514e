//! Averaging the transmission over random couplings and Stark shifts, with
//! the Monte-Carlo standard error.
//!
//! cargo run --example disorder_average

use cavity_eit::disorder::averaged_spectrum_with_errors;
use cavity_eit::{rad_to_hz, Configuration, DetuningGrid, Preset, Result};

fn main() -> Result<()> {
    let p = Preset::canonical();
    let grid = DetuningGrid::from_hz(-3e6, 3e6, 13)?;
    println!("{} draws, seed {}", p.disorder.n_samples, p.disorder.seed);
    for cfg in [Configuration::TwoLevel, Configuration::CavityEit] {
        let avg = averaged_spectrum_with_errors(&grid, cfg, &p.cavity, &p.ensemble, &p.drive, &p.disorder)?;
        println!("{}", cfg.name());
        for (pt, se) in avg.spectrum.points().iter().zip(&avg.std_error) {
            println!("  {:>6.2} MHz  {:.4} ± {:.4}", rad_to_hz(pt.delta) * 1e-6, pt.transmission, se);
        }
    }
    let n = [100, 400, 1600];
    println!("standard error at resonance vs draws:");
    for samples in n {
        let spec = p.disorder.with_samples(samples)?;
        let avg = averaged_spectrum_with_errors(&grid, Configuration::CavityEit, &p.cavity, &p.ensemble, &p.drive, &spec)?;
        println!("  n = {samples:>5}  se = {:.5}", avg.std_error[6]);
    }
    Ok(())
}
