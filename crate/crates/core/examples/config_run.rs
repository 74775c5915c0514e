//! Drive the toolkit from a TOML run configuration, as the CLI does.
//!
//! cargo run --example config_run

use cavity_eit::config::{Overrides, Resolved, RunConfig};
use cavity_eit::metrics::MetricsReport;
use cavity_eit::pipeline::{compute_triple, eit_center};
use cavity_eit::Result;

const CONFIG: &str = r#"
engine = "eq1-averaged"
seed = 7

[ensemble]
n_atoms = 3

[drive]
control_power_uw = 3.0

[grid]
start_hz = -10e6
stop_hz = 10e6
n_points = 401

[disorder]
n_samples = 500
"#;

fn main() -> Result<()> {
    let run = Resolved::resolve(&RunConfig::parse(CONFIG)?, &Overrides::default())?;
    println!("{}", serde_json::to_string_pretty(&run)?);
    let (triple, _) = compute_triple(&run)?;
    let report = MetricsReport::from_triple(&triple, eit_center(&run))?;
    println!(
        "transparency {:.4}  contrast {:.4}  FWHM {:?} Hz",
        report.transparency, report.contrast, report.fwhm_hz
    );
    Ok(())
}
