//! Canonical figure pipelines. Each writes CSV, SVG and a metrics JSON into
//! an output directory; identical inputs give byte-identical files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Engine, Resolved, SweepParam};
use crate::error::{Error, Result};
use crate::formats::csv::{write_spectrum_csv, write_table_csv, write_triple_csv};
use crate::formats::svg::{Plot, Series, Style};
use crate::lindblad::{master_sweep, HealthReport, MasterMode};
use crate::metrics::{scaling_fit, MetricsReport};
use crate::model::{rad_to_hz, DetuningGrid};
use crate::pipeline::{compute_triple, eit_center, run_sweep, with_param};
use crate::transmission::{Configuration, Spectrum, SpectrumTriple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1d,
    Fig2,
    Fig3,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1d, Figure::Fig2, Figure::Fig3, Figure::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1d => "fig1d",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure '{s}' (fig1d, fig2, fig3, fig4)")))
    }
}

/// Control powers in µW.
pub const FIG2_POWERS_UW: [f64; 3] = [1.0, 2.0, 3.0];
pub const FIG1D_ATOMS: usize = 15;
pub const FIG1D_OMEGA_C_KAPPA: f64 = 1.3;
pub const FIG2_OMEGA_C_KAPPA: f64 = 0.78;
pub const FIG3_ATOMS: [usize; 4] = [2, 3, 4, 5];
pub const FIG4_ATOMS: [usize; 7] = [1, 2, 3, 4, 5, 6, 7];
/// Detuning points of the master-equation overlay.
pub const MASTER_OVERLAY_POINTS: usize = 61;

/// What a pipeline wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outputs {
    pub figure: Figure,
    pub files: Vec<PathBuf>,
    pub metrics: Value,
}

const COLORS: [&str; 7] = ["#444444", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn mhz(s: &Spectrum) -> Vec<f64> {
    s.deltas().into_iter().map(|d| rad_to_hz(d) * 1e-6).collect()
}

fn triple_plot(title: &str, triple: &SpectrumTriple, meta: Value) -> Plot {
    let mut plot = Plot::new(title, "probe detuning (MHz)", "transmission").with_meta(meta);
    for (cfg, color, style) in [
        (Configuration::Empty, COLORS[0], Style::Dashed),
        (Configuration::TwoLevel, COLORS[1], Style::Solid),
        (Configuration::CavityEit, COLORS[2], Style::Solid),
    ] {
        let s = triple.get(cfg);
        plot = plot.with_series(Series::new(cfg.name(), mhz(s), s.transmissions(), color, style));
    }
    plot
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Create `dir`, reporting an unusable directory as a configuration error.
pub fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("output directory {} is not writable: {e}", dir.display())))
}

/// The run with the figure's canonical engine, atom number and control.
fn figure_run(base: &Resolved, n_atoms: usize, omega_c_kappa: f64, grid: DetuningGrid) -> Result<Resolved> {
    let mut r = with_param(base, SweepParam::NAtoms, n_atoms as f64)?;
    r = with_param(&r, SweepParam::OmegaCKappa, omega_c_kappa)?;
    r.engine = Engine::Eq1Averaged;
    r.grid = grid;
    Ok(r)
}

fn params_meta(r: &Resolved) -> Value {
    json!({
        "preset": r.preset,
        "engine": r.engine,
        "seed": r.seed,
        "n_atoms": r.ensemble.n_atoms(),
        "omega_c_hz": rad_to_hz(r.drive.omega_c()),
        "disorder": r.disorder,
    })
}

pub fn reproduce(figure: Figure, base: &Resolved, out_dir: &Path) -> Result<Outputs> {
    prepare_out_dir(out_dir)?;
    let base = {
        let mut b = base.clone();
        if b.engine == Engine::MasterEquation {
            b.engine = Engine::Eq1Averaged;
        }
        b
    };
    match figure {
        Figure::Fig1d => fig1d(&base, out_dir),
        Figure::Fig2 => fig2(&base, out_dir),
        Figure::Fig3 => fig3(&base, out_dir),
        Figure::Fig4 => fig4(&base, out_dir),
    }
}

fn fig1d(base: &Resolved, out: &Path) -> Result<Outputs> {
    let r = figure_run(
        base,
        FIG1D_ATOMS,
        FIG1D_OMEGA_C_KAPPA,
        DetuningGrid::from_hz(-25e6, 25e6, 1001)?,
    )?;
    let (triple, _) = compute_triple(&r)?;
    let metrics = MetricsReport::from_triple(&triple, eit_center(&r))?;
    let files = vec![out.join("fig1d.csv"), out.join("fig1d.svg"), out.join("fig1d_metrics.json")];
    write_triple_csv(&triple, &files[0])?;
    triple_plot("N = 15, Ωc = 1.3 κ", &triple, params_meta(&r)).write(&files[1])?;
    let metrics = serde_json::to_value(&metrics)?;
    write_json(&files[2], &metrics)?;
    Ok(Outputs {
        figure: Figure::Fig1d,
        files,
        metrics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct PowerRow {
    control_power_uw: f64,
    omega_c_hz: f64,
    omega_c_sq_hz2: f64,
    transparency: f64,
    contrast: f64,
    fwhm_hz: Option<f64>,
}

fn fig2(base: &Resolved, out: &Path) -> Result<Outputs> {
    let grid = DetuningGrid::from_hz(-15e6, 15e6, 601)?;
    let r = figure_run(base, 1, FIG2_OMEGA_C_KAPPA, grid)?;
    let (triple, _) = compute_triple(&r)?;
    let report = MetricsReport::from_triple(&triple, eit_center(&r))?;

    // Single-atom finite-probe propagation of the two-level configuration at
    // the mean coupling, no disorder.
    let me_grid = DetuningGrid::new(grid.start(), grid.stop(), MASTER_OVERLAY_POINTS)?;
    let (master, health): (Spectrum, HealthReport) = master_sweep(
        &me_grid,
        Configuration::TwoLevel,
        &r.cavity,
        &r.ensemble,
        &r.drive,
        MasterMode::FiniteProbe,
    )?;

    let mut powers = Vec::new();
    let mut eit_curves = Vec::new();
    for &p in &FIG2_POWERS_UW {
        let rp = with_param(&r, SweepParam::ControlPowerUw, p)?;
        let (t, _) = compute_triple(&rp)?;
        let m = MetricsReport::from_triple(&t, eit_center(&rp))?;
        let omega_hz = rad_to_hz(rp.drive.omega_c());
        powers.push(PowerRow {
            control_power_uw: p,
            omega_c_hz: omega_hz,
            omega_c_sq_hz2: omega_hz * omega_hz,
            transparency: m.transparency,
            contrast: m.contrast,
            fwhm_hz: m.fwhm_hz,
        });
        eit_curves.push(t.eit);
    }
    let widths: Vec<(f64, f64)> = powers
        .iter()
        .filter_map(|p| p.fwhm_hz.map(|w| (p.omega_c_sq_hz2, w)))
        .collect();
    let scaling = if widths.len() >= 2 { Some(scaling_fit(&widths)?) } else { None };

    let files = vec![
        out.join("fig2a.csv"),
        out.join("fig2a_master.csv"),
        out.join("fig2bc.csv"),
        out.join("fig2a.svg"),
        out.join("fig2b.svg"),
        out.join("fig2c.svg"),
        out.join("fig2_metrics.json"),
    ];
    write_triple_csv(&triple, &files[0])?;
    write_spectrum_csv(&master, &files[1])?;
    let rows: Vec<Vec<f64>> = powers
        .iter()
        .map(|p| {
            vec![
                p.control_power_uw,
                p.omega_c_hz,
                p.transparency,
                p.contrast,
                p.fwhm_hz.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    write_table_csv(
        &files[2],
        &params_meta(&r),
        &["control_power_uw", "omega_c_hz", "transparency", "contrast", "fwhm_hz"],
        &rows,
    )?;

    triple_plot("N = 1, Ωc = 0.78 κ", &triple, params_meta(&r))
        .with_series(Series::new(
            "two-level, finite probe",
            mhz(&master),
            master.transmissions(),
            COLORS[3],
            Style::Markers,
        ))
        .write(&files[3])?;

    let mut b = Plot::new("EIT vs control power", "probe detuning (MHz)", "transmission")
        .with_meta(json!({ "powers_uw": FIG2_POWERS_UW }));
    for (k, (s, p)) in eit_curves.iter().zip(&FIG2_POWERS_UW).enumerate() {
        b = b.with_series(Series::new(format!("{p} µW"), mhz(s), s.transmissions(), COLORS[k + 1], Style::Solid));
    }
    b.write(&files[4])?;

    let (x, y): (Vec<f64>, Vec<f64>) = widths.iter().map(|&(o2, w)| (o2 * 1e-12, w * 1e-3)).unzip();
    Plot::new("linewidth vs Ωc²", "Ωc² / (2π)² (MHz²)", "FWHM (kHz)")
        .with_meta(json!({ "scaling": scaling }))
        .with_series(Series::new("FWHM", x, y, COLORS[2], Style::Markers))
        .write(&files[5])?;

    let metrics = json!({
        "fig2a": report,
        "master_two_level_health": health,
        "control_power": powers,
        "fwhm_vs_omega_c_sq": scaling,
    });
    write_json(&files[6], &metrics)?;
    Ok(Outputs {
        figure: Figure::Fig2,
        files,
        metrics,
    })
}

fn fig3(base: &Resolved, out: &Path) -> Result<Outputs> {
    let grid = DetuningGrid::from_hz(-15e6, 15e6, 601)?;
    let r = figure_run(base, 1, FIG2_OMEGA_C_KAPPA, grid)?;
    let values: Vec<f64> = FIG3_ATOMS.iter().map(|&n| n as f64).collect();
    let points = run_sweep(&r, SweepParam::NAtoms, &values)?;
    let mut files = Vec::new();
    let mut plot = Plot::new("EIT with N atoms", "probe detuning (MHz)", "transmission")
        .with_meta(params_meta(&r));
    let mut reports = Vec::new();
    for (k, p) in points.iter().enumerate() {
        let n = p.value as usize;
        let path = out.join(format!("fig3_n{n}.csv"));
        write_triple_csv(&p.triple, &path)?;
        files.push(path);
        plot = plot
            .with_series(Series::new(
                format!("N = {n}, two-level"),
                mhz(&p.triple.two_level),
                p.triple.two_level.transmissions(),
                COLORS[k + 1],
                Style::Dashed,
            ))
            .with_series(Series::new(
                format!("N = {n}, EIT"),
                mhz(&p.triple.eit),
                p.triple.eit.transmissions(),
                COLORS[k + 1],
                Style::Solid,
            ));
        reports.push(json!({ "n_atoms": n, "metrics": p.metrics }));
    }
    let svg = out.join("fig3.svg");
    plot.write(&svg)?;
    files.push(svg);
    let metrics = Value::Array(reports);
    let js = out.join("fig3_metrics.json");
    write_json(&js, &metrics)?;
    files.push(js);
    Ok(Outputs {
        figure: Figure::Fig3,
        files,
        metrics,
    })
}

fn fig4(base: &Resolved, out: &Path) -> Result<Outputs> {
    let grid = DetuningGrid::from_hz(-15e6, 15e6, 601)?;
    let r = figure_run(base, 1, FIG2_OMEGA_C_KAPPA, grid)?;
    let values: Vec<f64> = FIG4_ATOMS.iter().map(|&n| n as f64).collect();
    let points = run_sweep(&r, SweepParam::NAtoms, &values)?;
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            vec![
                p.value,
                p.metrics.transparency,
                p.metrics.contrast,
                p.metrics.fwhm_hz.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    let files = vec![out.join("fig4.csv"), out.join("fig4.svg"), out.join("fig4_metrics.json")];
    write_table_csv(
        &files[0],
        &params_meta(&r),
        &["n_atoms", "transparency", "contrast", "fwhm_hz"],
        &rows,
    )?;
    Plot::new("figures of merit vs N", "N", "fraction")
        .with_meta(params_meta(&r))
        .with_series(Series::new(
            "transparency",
            values.clone(),
            points.iter().map(|p| p.metrics.transparency).collect(),
            COLORS[2],
            Style::Solid,
        ))
        .with_series(Series::new(
            "contrast",
            values.clone(),
            points.iter().map(|p| p.metrics.contrast).collect(),
            COLORS[1],
            Style::Solid,
        ))
        .write(&files[1])?;
    let metrics = serde_json::to_value(points.iter().map(|p| p.row()).collect::<Vec<_>>())?;
    write_json(&files[2], &metrics)?;
    Ok(Outputs {
        figure: Figure::Fig4,
        files,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Overrides, RunConfig};
    use crate::formats::csv::{read_spectrum_csv, TRIPLE_HEADER};

    #[test]
    fn fig1d_writes_a_triple() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::parse("[disorder]\nn_samples = 40\n").unwrap();
        let base = Resolved::resolve(&cfg, &Overrides::default()).unwrap();
        let out = reproduce(Figure::Fig1d, &base, dir.path()).unwrap();
        let text = fs::read_to_string(&out.files[0]).unwrap();
        assert!(text.lines().any(|l| l == TRIPLE_HEADER));
        let t = read_spectrum_csv(&out.files[0]).unwrap().into_triple().unwrap();
        assert_eq!(t.eit.len(), 1001);
        assert_eq!(t.eit.meta().n_samples, Some(40));
        assert!(out.files.iter().all(|f| f.exists()));
    }

    #[test]
    fn figure_names() {
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert!("fig5".parse::<Figure>().is_err());
    }
}
