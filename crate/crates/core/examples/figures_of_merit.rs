//! Transparency, contrast and EIT linewidth from model curves and from
//! sampled spectra.
//!
//! cargo run --example figures_of_merit

use cavity_eit::metrics::MetricsReport;
use cavity_eit::{
    fwhm_ceit, rad_to_hz, sweep_triple, transparency_and_contrast, Configuration, DetuningGrid, Eq1Curve, Preset,
    Result,
};

fn main() -> Result<()> {
    let p = Preset::canonical();
    let eit = Eq1Curve::new(&p.cavity, &p.ensemble, &p.drive, Configuration::CavityEit)?;
    let two = Eq1Curve::new(&p.cavity, &p.ensemble, &p.drive, Configuration::TwoLevel)?;
    let (transparency, contrast) = transparency_and_contrast(&eit, &two, 0.0)?;
    let width = fwhm_ceit(&eit, &two, 0.0)?;
    println!("model:   transparency {transparency:.4}  contrast {contrast:.4}  FWHM {:.1} kHz", rad_to_hz(width) * 1e-3);

    let grid = DetuningGrid::from_hz(-15e6, 15e6, 601)?;
    let triple = sweep_triple(&grid, &p.cavity, &p.ensemble, &p.drive)?;
    let report = MetricsReport::from_triple(&triple, 0.0)?;
    println!("sampled: {}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
