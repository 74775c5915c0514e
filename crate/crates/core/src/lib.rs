//! Cavity electromagnetically induced transparency with a countable number
//! of atoms.
//!
//! The crate evaluates the semiclassical steady-state transmission of a
//! cavity containing N Λ-type atoms, averages it over experimental disorder,
//! propagates the full single-atom master equation over a finite probe
//! window, extracts transparency/contrast/linewidth figures of merit and
//! fits model parameters to measured or synthetic spectra.
//!
//! Frequencies are angular (rad/s) everywhere in the API; files use Hz.

pub mod disorder;
pub mod error;
pub mod cli;
pub mod config;
pub mod fitting;
pub mod formats;
pub mod lindblad;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod reproduce;
pub mod susceptibility;
pub mod transmission;

pub use error::{Error, Result};
pub use model::{
    effective_coupling, hz_to_rad, rabi_from_power, rad_to_hz, CavityParams, Couplings,
    DetuningGrid, DriveConfig, EnsembleConfig, Preset, RabiCalibration, TWO_PI,
};
pub use susceptibility::{chi, SusceptibilityInput};
pub use transmission::{
    sweep, sweep_triple, transmission_eq1, Configuration, Eq1Curve, Spectrum, SpectrumMeta,
    SpectrumPoint, SpectrumTriple,
};
pub use lindblad::{
    build_system, finite_probe_transmission, propagate, steady_state, HilbertConfig,
    LindbladSystem, MasterMode,
};
pub use metrics::{
    fwhm_ceit, fwhm_ceit_sampled, rabi_peaks, scaling_fit, transparency_and_contrast,
    MetricsReport, RabiPeaks, ScalingFit, TransmissionCurve,
};
pub use fitting::{fit, FitProblem, FitResult, Param};
