//! Free decay of one cavity photon, checked against exp(−2κt), with the
//! integrator's health figures.
//!
//! cargo run --example pure_decay

use cavity_eit::lindblad::{propagate, uniform_samples, CollapseOp, HilbertConfig, Level, LindbladSystem};
use cavity_eit::{hz_to_rad, Result};
use nalgebra::DMatrix;

fn main() -> Result<()> {
    let h = HilbertConfig::new(2)?;
    let kappa = hz_to_rad(2.9e6);
    let system = LindbladSystem::new(
        h,
        DMatrix::zeros(h.dim(), h.dim()),
        vec![CollapseOp::new("cavity", 2.0 * kappa, h.destroy())],
        0.0,
        kappa,
    )?;
    let duration = 1e-6;
    let traj = propagate(&system, &h.basis_state(1, Level::F1)?, duration, &uniform_samples(duration, 10))?;
    for (t, n) in traj.times.iter().zip(&traj.photon_number) {
        let exact = (-2.0 * kappa * t).exp();
        println!("t = {:>5.0} ns  ⟨n⟩ = {n:.9}  exact {exact:.9}  diff {:.1e}", t * 1e9, n - exact);
    }
    println!("{:?}", traj.health);
    println!("steps accepted {} rejected {}", traj.stats.accepted, traj.stats.rejected);
    Ok(())
}
