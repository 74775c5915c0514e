//! Empty-cavity, two-level and EIT spectra on one grid, written as a CSV
//! triple and an SVG plot.
//!
//! cargo run --example spectrum_triple -- [out_dir]

use std::path::PathBuf;

use cavity_eit::formats::csv::write_triple_csv;
use cavity_eit::formats::svg::{Plot, Series, Style};
use cavity_eit::{rad_to_hz, sweep_triple, Configuration, DetuningGrid, Preset, Result};

fn main() -> Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/examples".into()));
    std::fs::create_dir_all(&out)?;
    let p = Preset::canonical();
    let grid = DetuningGrid::from_hz(-15e6, 15e6, 601)?;
    let triple = sweep_triple(&grid, &p.cavity, &p.ensemble, &p.drive)?;
    write_triple_csv(&triple, &out.join("triple.csv"))?;

    let mut plot = Plot::new("single atom", "probe detuning (MHz)", "transmission");
    for (cfg, color) in Configuration::ALL.into_iter().zip(["gray", "steelblue", "firebrick"]) {
        let s = triple.get(cfg);
        let x = s.deltas().iter().map(|&d| rad_to_hz(d) * 1e-6).collect();
        plot = plot.with_series(Series::new(cfg.name(), x, s.transmissions(), color, Style::Solid));
    }
    plot.write(&out.join("triple.svg"))?;

    let mid = grid.n_points() / 2;
    for cfg in Configuration::ALL {
        println!("{:<10} T(0) = {:.4}", cfg.name(), triple.get(cfg).points()[mid].transmission);
    }
    println!("wrote {}", out.display());
    Ok(())
}
