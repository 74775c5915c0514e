//! Single-atom master equation: weak-drive steady state against the
//! semiclassical formula, and the finite-probe transmission.
//!
//! cargo run --release --example master_equation

use cavity_eit::lindblad::{master_transmission, MasterMode};
use cavity_eit::{Configuration, Eq1Curve, Preset, Result};

fn main() -> Result<()> {
    let p = Preset::canonical();
    let kappa = p.cavity.kappa();

    let weak = p.drive.with_photon_target(0.001)?;
    let ens = p.ensemble.with_branching(1.0)?.with_gamma_gs(0.0)?;
    let curve = Eq1Curve::new(&p.cavity, &ens, &weak, Configuration::CavityEit)?;
    println!("EIT, weak drive, closed Λ system");
    for k in [-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0] {
        let delta = k * kappa;
        let (t, health, hilbert) =
            master_transmission(&p.cavity, &ens, &weak, Configuration::CavityEit, delta, MasterMode::SteadyState)?;
        println!(
            "  Δ = {k:>4.1} κ  master {t:.5}  formula {:.5}  n_fock {}  leakage {:.1e}",
            curve.transmission(delta),
            hilbert.n_fock(),
            health.max_top_fock_population
        );
    }

    println!("two-level at resonance, 50 µs probe");
    let eq1 = Eq1Curve::new(&p.cavity, &p.ensemble, &p.drive, Configuration::TwoLevel)?.transmission(0.0);
    for target in [0.005, 0.01, 0.02] {
        let drive = p.drive.with_photon_target(target)?;
        let (t, _, _) =
            master_transmission(&p.cavity, &p.ensemble, &drive, Configuration::TwoLevel, 0.0, MasterMode::FiniteProbe)?;
        println!("  target {target:<5}  finite probe {t:.4}  steady formula {eq1:.4}");
    }
    Ok(())
}
