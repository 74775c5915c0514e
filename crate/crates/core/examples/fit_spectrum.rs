//! Recover g, Ωc and γ_gs from a noisy synthetic spectrum triple.
//!
//! cargo run --release --example fit_spectrum

use cavity_eit::fitting::{fit, FitProblem, Param};
use cavity_eit::{hz_to_rad, sweep_triple, Configuration, DetuningGrid, EnsembleConfig, Preset, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<()> {
    let p = Preset::canonical();
    let (g, omega_c, gamma_gs) = (0.4 * p.cavity.g0(), p.omega_c_kappa(0.78), hz_to_rad(65e3));
    let ens = EnsembleConfig::uniform(1, g, gamma_gs, 0.5)?;
    let drive = p.drive.with_omega_c(omega_c)?;
    let grid = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 1201)?;
    let truth = sweep_triple(&grid, &p.cavity, &ens, &drive)?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise = Normal::new(0.0, 0.02).expect("valid sigma");
    let mut problem = FitProblem::new(p.cavity, p.ensemble.clone(), p.drive);
    for cfg in Configuration::ALL {
        let s = truth.get(cfg);
        let noisy = s.transmissions().iter().map(|t| t + noise.sample(&mut rng)).collect();
        problem = problem.with_data(cfg, s.deltas(), noisy)?;
    }
    let problem = problem
        .free(Param::G, 0.1 * g, 3.0 * g)?
        .free(Param::OmegaC, 0.2 * omega_c, 2.0 * omega_c)?
        .free(Param::GammaGs, 0.0, 5.0 * gamma_gs)?;
    let result = fit(&problem, 4000, 1)?;

    for (e, t) in result.estimates.iter().zip([g, omega_c, gamma_gs]) {
        println!(
            "{:<9} fit {:.4e}  truth {:.4e}  ± {:.2e}  interval {:?}",
            e.param.name(),
            e.value,
            t,
            e.std_error.unwrap_or(f64::NAN),
            e.interval
        );
    }
    println!("residual {:.4e} after {} evaluations", result.residual_norm, result.n_evaluations);
    Ok(())
}
