//! Figures of merit as the atom number grows.
//!
//! cargo run --release --example sweep_atoms

use cavity_eit::config::{Engine, Overrides, Resolved, RunConfig, SweepParam};
use cavity_eit::pipeline::run_sweep;
use cavity_eit::Result;

fn main() -> Result<()> {
    let overrides = Overrides {
        engine: Some(Engine::Eq1Averaged),
        ..Overrides::default()
    };
    let run = Resolved::resolve(&RunConfig::default(), &overrides)?;
    let values: Vec<f64> = (1..=7).map(f64::from).collect();
    println!("  N  transparency  contrast  FWHM (kHz)");
    for p in run_sweep(&run, SweepParam::NAtoms, &values)? {
        let r = p.row();
        println!(
            "{:>3}  {:>12.4}  {:>8.4}  {:>10.1}",
            r.value,
            r.transparency,
            r.contrast,
            r.fwhm_hz.map_or(f64::NAN, |w| w * 1e-3)
        );
    }
    Ok(())
}
