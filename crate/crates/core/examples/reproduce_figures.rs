//! Regenerate every canonical figure into a directory.
//!
//! cargo run --release --example reproduce_figures -- [out_dir]

use std::path::PathBuf;

use cavity_eit::config::{Overrides, Resolved, RunConfig};
use cavity_eit::reproduce::{reproduce, Figure};
use cavity_eit::Result;

fn main() -> Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/figures".into()));
    let base = Resolved::resolve(&RunConfig::default(), &Overrides::default())?;
    for figure in Figure::ALL {
        let outputs = reproduce(figure, &base, &out)?;
        for f in &outputs.files {
            println!("{figure}: {}", f.display());
        }
    }
    Ok(())
}
