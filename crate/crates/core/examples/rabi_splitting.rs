//! Vacuum-Rabi splitting of the two-level spectrum and its √N growth.
//!
//! cargo run --example rabi_splitting

use cavity_eit::{rabi_peaks, rad_to_hz, scaling_fit, sweep, Configuration, DetuningGrid, EnsembleConfig, Preset, Result};

fn main() -> Result<()> {
    let p = Preset::canonical();
    let g0 = p.cavity.g0();
    let mut points = Vec::new();
    for n in [4usize, 9, 16, 25, 36, 64] {
        let ens = EnsembleConfig::uniform(n, g0, p.ensemble.gamma_gs(), 0.5)?;
        let half = 2.5 * g0 * (n as f64).sqrt();
        let grid = DetuningGrid::symmetric(half, 4001)?;
        let s = sweep(&grid, Configuration::TwoLevel, &p.cavity, &ens, &p.drive)?;
        match rabi_peaks(&s).splitting() {
            Some(split) => {
                println!("N = {n:>2}  splitting {:.2} MHz  2g√N = {:.2} MHz", rad_to_hz(split) * 1e-6, rad_to_hz(2.0 * g0 * (n as f64).sqrt()) * 1e-6);
                points.push((n as f64, split));
            }
            None => println!("N = {n:>2}  unresolved"),
        }
    }
    let fit = scaling_fit(&points)?;
    println!("splitting ∝ N^{:.4}", fit.exponent);
    Ok(())
}
