use cavity_eit::disorder::{averaged_spectrum, averaged_spectrum_with_errors, CouplingDistribution, DisorderEnsemble, DisorderSpec, StarkJitter};
use cavity_eit::fitting::{fit, FitProblem, Param, Units};
use cavity_eit::formats::csv::{parse_spectrum_csv, spectrum_to_csv};
use cavity_eit::{
    chi, effective_coupling, fwhm_ceit, hz_to_rad, rabi_from_power, rad_to_hz, scaling_fit, sweep,
    transparency_and_contrast, CavityParams, Configuration, DetuningGrid, DriveConfig, Eq1Curve, EnsembleConfig,
    Preset, Spectrum, SpectrumMeta, SusceptibilityInput,
};
use num_complex::Complex64;
use proptest::prelude::*;

const MHZ: f64 = 2.0 * std::f64::consts::PI * 1e6;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone)]
struct Setup {
    cavity: CavityParams,
    ensemble: EnsembleConfig,
    drive: DriveConfig,
}

fn setup() -> impl Strategy<Value = Setup> {
    (
        0.5f64..10.0,
        0.5f64..10.0,
        0.5f64..10.0,
        0.05f64..1.0,
        1usize..20,
        0.1f64..10.0,
        0.0f64..0.2,
    )
        .prop_map(|(g0, kappa, gamma, frac, n, omega_c, gamma_gs)| {
            let cavity = CavityParams::new(g0 * MHZ, kappa * MHZ, gamma * MHZ).unwrap();
            let ensemble = EnsembleConfig::uniform(n, frac * g0 * MHZ, gamma_gs * MHZ, 0.5).unwrap();
            let drive = DriveConfig::new(omega_c * MHZ, 0.02, 50e-6).unwrap();
            Setup { cavity, ensemble, drive }
        })
}

fn curve(s: &Setup, cfg: Configuration) -> Eq1Curve {
    Eq1Curve::new(&s.cavity, &s.ensemble, &s.drive, cfg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn coupling_is_permutation_invariant_and_homogeneous(
        gs in prop::collection::vec(0.0f64..3e7, 1..12),
        c in 0.0f64..5.0,
        rot in 0usize..12,
    ) {
        let base = effective_coupling(&EnsembleConfig::new(gs.clone(), 0.0, 0.5).unwrap()).unwrap();
        let mut permuted = gs.clone();
        permuted.reverse();
        let k = rot % permuted.len();
        permuted.rotate_left(k);
        let p = effective_coupling(&EnsembleConfig::new(permuted, 0.0, 0.5).unwrap()).unwrap();
        prop_assert!(close(p, base, 1e-14));
        let scaled: Vec<f64> = gs.iter().map(|g| c * g).collect();
        let s = effective_coupling(&EnsembleConfig::new(scaled, 0.0, 0.5).unwrap()).unwrap();
        prop_assert!((s - c * base).abs() <= 1e-14 * (c * base).max(1.0));
    }

    #[test]
    fn rabi_follows_square_root_of_power(p in 1e-9f64..1e-2, cal in 1e6f64..1e11) {
        let a = rabi_from_power(p, cal).unwrap();
        let b = rabi_from_power(4.0 * p, cal).unwrap();
        prop_assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn hz_round_trip(g0 in 1e3f64..1e9, kappa in 1e3f64..1e9, gamma in 1e3f64..1e9) {
        let c = CavityParams::from_hz(g0, kappa, gamma).unwrap();
        prop_assert!(close(rad_to_hz(c.g0()), g0, 2.0 * f64::EPSILON));
        prop_assert!(close(rad_to_hz(c.kappa()), kappa, 2.0 * f64::EPSILON));
        prop_assert!(close(rad_to_hz(c.gamma()), gamma, 2.0 * f64::EPSILON));
    }

    #[test]
    fn susceptibility_conjugation_and_absorption(
        da in -60.0f64..60.0,
        d2 in -60.0f64..60.0,
        omega_c in 0.0f64..20.0,
        gamma in 0.5f64..10.0,
        gamma_gs in 0.0f64..0.5,
    ) {
        let input = SusceptibilityInput {
            delta_a: da * MHZ,
            delta_2: d2 * MHZ,
            omega_c: omega_c * MHZ,
            gamma: gamma * MHZ,
            gamma_gs: gamma_gs * MHZ,
        };
        let Ok(x) = chi(&input) else { return Ok(()) };
        let mirrored = chi(&SusceptibilityInput { delta_a: -input.delta_a, delta_2: -input.delta_2, ..input }).unwrap();
        prop_assert!((mirrored + x.conj()).norm() <= 1e-12 * x.norm().max(1e-300));
        // Absorption appears as a non-positive imaginary part in this sign convention.
        prop_assert!(x.im <= 1e-15 * x.norm());
    }

    #[test]
    fn two_level_limit_of_susceptibility(da in -60.0f64..60.0, gamma in 0.5f64..10.0) {
        let input = SusceptibilityInput {
            delta_a: da * MHZ,
            delta_2: da * MHZ,
            omega_c: 0.0,
            gamma: gamma * MHZ,
            gamma_gs: 0.01 * MHZ,
        };
        let expected = Complex64::new(1.0, 0.0) / Complex64::new(input.delta_a, input.gamma);
        prop_assert!((chi(&input).unwrap() - expected).norm() <= 1e-14 * expected.norm());
    }

    #[test]
    fn susceptibility_shrinks_with_control_at_two_photon_resonance(
        da in -30.0f64..30.0,
        gamma in 0.5f64..10.0,
        gamma_gs in 0.001f64..0.5,
    ) {
        let mut last = f64::INFINITY;
        for k in 0..=40 {
            let x = chi(&SusceptibilityInput {
                delta_a: da * MHZ,
                delta_2: 0.0,
                omega_c: 0.25 * k as f64 * MHZ,
                gamma: gamma * MHZ,
                gamma_gs: gamma_gs * MHZ,
            })
            .unwrap()
            .norm();
            prop_assert!(x <= last * (1.0 + 1e-12));
            last = x;
        }
    }

    #[test]
    fn transmission_never_exceeds_one(s in setup(), delta in -60.0f64..60.0) {
        for cfg in Configuration::ALL {
            let t = curve(&s, cfg).transmission(delta * MHZ);
            prop_assert!((0.0..=1.0 + 1e-9).contains(&t), "{cfg}: {t}");
        }
    }

    #[test]
    fn spectra_are_mirror_symmetric(s in setup(), delta in 0.0f64..60.0) {
        for cfg in Configuration::ALL {
            let c = curve(&s, cfg);
            let (a, b) = (c.transmission(delta * MHZ), c.transmission(-delta * MHZ));
            prop_assert!((a - b).abs() <= 1e-12, "{cfg}: {a} vs {b}");
        }
    }

    #[test]
    fn two_level_resonance_matches_cooperativity(s in setup()) {
        let g = effective_coupling(&s.ensemble).unwrap();
        let c = s.ensemble.n_atoms() as f64 * g * g / (s.cavity.kappa() * s.cavity.gamma());
        let t = curve(&s, Configuration::TwoLevel).transmission(0.0);
        prop_assert!(close(t, 1.0 / ((1.0 + c) * (1.0 + c)), 1e-12));
    }

    #[test]
    fn eit_beats_two_level_on_resonance(s in setup()) {
        let eit = curve(&s, Configuration::CavityEit).transmission(0.0);
        let two = curve(&s, Configuration::TwoLevel).transmission(0.0);
        prop_assert!(eit >= two);
    }

    #[test]
    fn dark_state_is_fully_transparent(s in setup()) {
        let ensemble = s.ensemble.with_gamma_gs(0.0).unwrap();
        let c = Eq1Curve::new(&s.cavity, &ensemble, &s.drive, Configuration::CavityEit).unwrap();
        prop_assert!((c.transmission(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linewidth_ignores_common_transmission_scale(scale in 0.05f64..1.0) {
        let p = Preset::canonical();
        let eit = Eq1Curve::new(&p.cavity, &p.ensemble, &p.drive, Configuration::CavityEit).unwrap();
        let two = Eq1Curve::new(&p.cavity, &p.ensemble, &p.drive, Configuration::TwoLevel).unwrap();
        let base = fwhm_ceit(&eit, &two, 0.0).unwrap();
        let e = |d: f64| scale * eit.transmission(d);
        let t = |d: f64| scale * two.transmission(d);
        let scaled = fwhm_ceit(&e, &t, 0.0).unwrap();
        prop_assert!(close(scaled, base, 1e-5), "{scaled} vs {base}");
    }

    #[test]
    fn contrast_flips_sign_when_spectra_swap(s in setup(), center in -5.0f64..5.0) {
        let eit = curve(&s, Configuration::CavityEit);
        let two = curve(&s, Configuration::TwoLevel);
        let (_, c1) = transparency_and_contrast(&eit, &two, center * MHZ).unwrap();
        let (_, c2) = transparency_and_contrast(&two, &eit, center * MHZ).unwrap();
        prop_assert_eq!(c1, -c2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(
        steps in prop::collection::vec(1e-3f64..1e6, 1..60),
        start in -5e7f64..0.0,
        values in prop::collection::vec(0.0f64..1.2, 60),
    ) {
        let mut d = hz_to_rad(start);
        let mut deltas = Vec::new();
        for s in &steps {
            deltas.push(d);
            d += hz_to_rad(*s);
        }
        let t = &values[..deltas.len()];
        let mut meta = SpectrumMeta::model("eq1");
        meta.configuration = Some(Configuration::TwoLevel);
        let spectrum = Spectrum::from_columns(&deltas, t, meta).unwrap();
        let text = spectrum_to_csv(&spectrum).unwrap();
        let back = parse_spectrum_csv(&text).unwrap().into_single().unwrap();
        prop_assert_eq!(back.transmissions(), spectrum.transmissions());
        prop_assert_eq!(back.meta(), spectrum.meta());
        for (a, b) in back.deltas().iter().zip(spectrum.deltas()) {
            prop_assert!(*a == b || a.next_up() == b || a.next_down() == b);
        }
        prop_assert_eq!(spectrum_to_csv(&back).unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fit_history_never_increases(seed in 0u64..1000, frac in 0.2f64..0.6) {
        let p = Preset::canonical();
        let g = frac * p.cavity.g0();
        let ens = EnsembleConfig::uniform(1, g, p.ensemble.gamma_gs(), 0.5).unwrap();
        let grid = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 101).unwrap();
        let data = sweep(&grid, Configuration::TwoLevel, &p.cavity, &ens, &p.drive).unwrap();
        let problem = FitProblem::new(p.cavity, p.ensemble.clone(), p.drive)
            .with_spectrum(&data)
            .unwrap()
            .free(Param::G, 0.05 * p.cavity.g0(), p.cavity.g0())
            .unwrap()
            .free(Param::GammaGs, 0.0, hz_to_rad(500e3))
            .unwrap();
        let r = fit(&problem, 600, seed).unwrap();
        prop_assert!(!r.history.is_empty());
        for w in r.history.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }
}

#[test]
fn fit_is_unit_invariant() {
    let p = Preset::canonical();
    let grid = DetuningGrid::symmetric(3.0 * p.cavity.kappa(), 121).unwrap();
    let data = sweep(&grid, Configuration::CavityEit, &p.cavity, &p.ensemble, &p.drive).unwrap();
    let g = 0.4 * p.cavity.g0();
    let run = |units: Units, k: f64| {
        let problem = FitProblem::new(p.cavity, p.ensemble.clone(), p.drive)
            .with_units(units)
            .with_spectrum(&data)
            .unwrap()
            .free(Param::G, 0.5 * g * k, 1.5 * g * k)
            .unwrap();
        fit(&problem, 800, 3).unwrap().estimates[0].value
    };
    let rad = run(Units::RadPerSecond, 1.0);
    let hz = run(Units::Hertz, 1.0 / (2.0 * std::f64::consts::PI));
    assert!(close(hz_to_rad(hz), rad, 1e-6), "{hz} Hz vs {rad} rad/s");
}

#[test]
fn averaging_is_deterministic_and_bounded() {
    let p = Preset::canonical();
    let grid = DetuningGrid::from_hz(-5e6, 5e6, 21).unwrap();
    let spec = p.disorder.with_samples(300).unwrap();
    let a = averaged_spectrum(&grid, Configuration::CavityEit, &p.cavity, &p.ensemble, &p.drive, &spec).unwrap();
    let b = averaged_spectrum(&grid, Configuration::CavityEit, &p.cavity, &p.ensemble, &p.drive, &spec).unwrap();
    assert_eq!(a, b);

    let draws = DisorderEnsemble::draw(&p.cavity, &p.ensemble, &spec).unwrap();
    let curve = draws.curve(&p.cavity, &p.ensemble, &p.drive, Configuration::CavityEit).unwrap();
    for pt in a.points() {
        let (lo, hi) = curve.sample_range(pt.delta).unwrap();
        assert!(lo <= pt.transmission && pt.transmission <= hi);
    }
}

#[test]
fn zero_width_disorder_is_the_identity() {
    let p = Preset::canonical();
    let grid = DetuningGrid::from_hz(-8e6, 8e6, 41).unwrap();
    let spec = DisorderSpec::new(Some(CouplingDistribution::Delta(0.4)), StarkJitter::None, 5, 1).unwrap();
    for cfg in Configuration::ALL {
        let avg = averaged_spectrum(&grid, cfg, &p.cavity, &p.ensemble, &p.drive, &spec).unwrap();
        let direct = sweep(&grid, cfg, &p.cavity, &p.ensemble, &p.drive).unwrap();
        assert_eq!(avg.transmissions(), direct.transmissions(), "{cfg}");
    }
}

#[test]
fn monte_carlo_error_falls_as_inverse_square_root() {
    let p = Preset::canonical();
    let grid = DetuningGrid::from_hz(-1e6, 1e6, 3).unwrap();
    let mut points = Vec::new();
    for n in [100usize, 1_000, 10_000] {
        let spec = p.disorder.with_samples(n).unwrap();
        let avg = averaged_spectrum_with_errors(&grid, Configuration::TwoLevel, &p.cavity, &p.ensemble, &p.drive, &spec)
            .unwrap();
        points.push((n as f64, avg.std_error[1]));
    }
    let slope = scaling_fit(&points).unwrap().exponent;
    assert!((slope + 0.5).abs() <= 0.1, "exponent {slope}");
}

#[test]
fn empty_cavity_peak_is_exactly_one() {
    let p = Preset::canonical();
    let empty = p.ensemble.with_atoms(0).unwrap();
    for n in [3, 11, 101, 1001] {
        let grid = DetuningGrid::from_hz(-20e6, 20e6, n).unwrap();
        let s = sweep(&grid, Configuration::Empty, &p.cavity, &empty, &p.drive).unwrap();
        assert_eq!(s.max().unwrap().1, 1.0);
    }
}
