//! Command-line front end. Results go to files and a JSON summary on
//! stdout; failures go to stderr as a JSON record and set the exit status.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{parse_grid, parse_values, Engine, Overrides, Resolved, RunConfig, SweepParam, OUT_DIR_ENV};
use crate::error::{Error, Result};
use crate::fitting::{fit, FitProblem, Param, Units};
use crate::formats::csv::{read_spectrum_csv, write_spectrum_csv, write_table_csv, write_triple_csv, SpectrumFile};
use crate::formats::svg::{Plot, Series, Style};
use crate::metrics::MetricsReport;
use crate::model::rad_to_hz;
use crate::pipeline::{compute, compute_triple, eit_center, run_sweep};
use crate::reproduce::{prepare_out_dir, reproduce, Figure};
use crate::transmission::{Configuration, Spectrum};

#[derive(Debug, Parser)]
#[command(name = "cavity-eit", version, about = "Cavity EIT transmission spectra, figures of merit and fits")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// eq1 | eq1-averaged | master-equation
    #[arg(long, global = true)]
    pub engine: Option<String>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// Detuning grid in Hz as start:stop:n.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Print the resolved parameters and exit.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the configured spectra.
    Spectrum,
    /// Vary one parameter over a list of values.
    Sweep {
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values.
        #[arg(long)]
        values: Option<String>,
    },
    /// Figures of merit from a triple CSV, or from the configured model.
    Metrics {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Fit model parameters to a spectrum file.
    Fit {
        #[arg(long)]
        data: Option<PathBuf>,
        /// name=lo:hi, frequencies in Hz. Repeatable.
        #[arg(long = "free", allow_hyphen_values = true)]
        free: Vec<String>,
        #[arg(long)]
        budget: Option<usize>,
        /// Configuration of a bare single-spectrum file.
        #[arg(long)]
        configuration: Option<String>,
    },
    /// Regenerate one of the canonical figures.
    Reproduce { figure: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Sweep { .. } => "sweep",
            Command::Metrics { .. } => "metrics",
            Command::Fit { .. } => "fit",
            Command::Reproduce { .. } => "reproduce",
        }
    }
}

/// Machine-readable form of an error.
pub fn error_record(e: &Error) -> Value {
    json!({
        "error": {
            "kind": e.kind(),
            "module": e.module(),
            "message": e.to_string(),
            "exit_code": e.exit_code(),
        }
    })
}

fn resolve(global: &GlobalArgs) -> Result<Resolved> {
    let config = match &global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        preset: global.preset.clone(),
        engine: global.engine.as_deref().map(str::parse::<Engine>).transpose()?,
        seed: global.seed,
        out_dir: global.out.clone(),
        grid: global.grid.as_deref().map(parse_grid).transpose()?,
    };
    Resolved::resolve(&config, &overrides)
}

fn display(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

/// Run a parsed command line and return the stdout summary.
pub fn execute(cli: &Cli) -> Result<Value> {
    let run = resolve(&cli.global)?;
    if let Command::Reproduce { figure } = &cli.command {
        figure.parse::<Figure>()?;
    }
    if cli.global.dry_run {
        return Ok(json!({ "command": cli.command.name(), "dry_run": true, "resolved": run }));
    }
    let out = run.out_dir.clone();
    match &cli.command {
        Command::Spectrum => spectrum(&run, &out),
        Command::Sweep { param, values } => {
            let (p, v) = match (param, values, &run.sweep) {
                (Some(p), Some(v), _) => (p.parse()?, parse_values(v)?),
                (None, None, Some((p, v))) => (*p, v.clone()),
                (Some(p), None, Some((_, v))) => (p.parse()?, v.clone()),
                (None, Some(v), Some((p, _))) => (*p, parse_values(v)?),
                _ => return Err(Error::Config("sweep needs --param and --values or a [sweep] section".into())),
            };
            sweep_cmd(&run, p, &v, &out)
        }
        Command::Metrics { input } => metrics_cmd(&run, input.as_deref(), &out),
        Command::Fit {
            data,
            free,
            budget,
            configuration,
        } => fit_cmd(&run, data.as_deref(), free, *budget, configuration.as_deref(), &out),
        Command::Reproduce { figure } => {
            let f: Figure = figure.parse()?;
            let outputs = reproduce(f, &run, &out)?;
            Ok(json!({ "figure": f, "files": display(&outputs.files), "metrics": outputs.metrics }))
        }
    }
}

fn spectrum(run: &Resolved, out: &Path) -> Result<Value> {
    prepare_out_dir(out)?;
    let computed = compute(run, &run.configurations)?;
    let mut files = Vec::new();
    if let Some(triple) = computed.triple() {
        let path = out.join("spectrum.csv");
        write_triple_csv(&triple, &path)?;
        files.push(path);
    } else {
        for s in &computed.spectra {
            let cfg = s.meta().configuration.expect("computed spectra name their configuration");
            let path = out.join(format!("spectrum_{}.csv", cfg.name()));
            write_spectrum_csv(s, &path)?;
            files.push(path);
        }
    }
    let mut plot = Plot::new("transmission", "probe detuning (MHz)", "transmission")
        .with_meta(json!({ "engine": run.engine, "seed": run.seed }));
    for (k, s) in computed.spectra.iter().enumerate() {
        let label = s.meta().configuration.map_or("spectrum", |c| c.name());
        let x = s.deltas().into_iter().map(|d| rad_to_hz(d) * 1e-6).collect();
        let colors = ["#444444", "#1f77b4", "#d62728"];
        plot = plot.with_series(Series::new(label, x, s.transmissions(), colors[k % 3], Style::Solid));
    }
    let svg = out.join("spectrum.svg");
    plot.write(&svg)?;
    files.push(svg);
    Ok(json!({ "files": display(&files), "health": computed.health }))
}

fn sweep_cmd(run: &Resolved, param: SweepParam, values: &[f64], out: &Path) -> Result<Value> {
    prepare_out_dir(out)?;
    let points = run_sweep(run, param, values)?;
    let mut files = Vec::new();
    let mut plot = Plot::new(format!("sweep over {}", param.name()), "probe detuning (MHz)", "transmission")
        .with_meta(json!({ "parameter": param.name(), "values": values, "engine": run.engine }));
    for (i, p) in points.iter().enumerate() {
        let path = out.join(format!("sweep_{}_{i:02}.csv", param.name()));
        write_triple_csv(&p.triple, &path)?;
        files.push(path);
        let x = p.triple.eit.deltas().into_iter().map(|d| rad_to_hz(d) * 1e-6).collect();
        let shade = format!("hsl({}, 70%, 40%)", (i * 360) / points.len().max(1));
        plot = plot.with_series(Series::new(
            format!("{} = {}", param.name(), p.value),
            x,
            p.triple.eit.transmissions(),
            &shade,
            Style::Solid,
        ));
    }
    let table = out.join("sweep.csv");
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let r = p.row();
            vec![r.value, r.transparency, r.contrast, r.fwhm_hz.unwrap_or(f64::NAN)]
        })
        .collect();
    write_table_csv(
        &table,
        &json!({ "parameter": param.name(), "engine": run.engine, "seed": run.seed }),
        &[param.name(), "transparency", "contrast", "fwhm_hz"],
        &rows,
    )?;
    files.push(table);
    let svg = out.join("sweep.svg");
    plot.write(&svg)?;
    files.push(svg);
    let rows: Vec<_> = points.iter().map(|p| p.row()).collect();
    Ok(json!({ "parameter": param.name(), "rows": rows, "files": display(&files) }))
}

fn metrics_cmd(run: &Resolved, input: Option<&Path>, out: &Path) -> Result<Value> {
    let triple = match input {
        Some(p) => read_spectrum_csv(p)?.into_triple().map_err(|_| {
            Error::Config(format!("{} is not a triple spectrum file", p.display()))
        })?,
        None => compute_triple(run)?.0,
    };
    let report = MetricsReport::from_triple(&triple, eit_center(run))?;
    let value = serde_json::to_value(&report)?;
    prepare_out_dir(out)?;
    let path = out.join("metrics.json");
    std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")?;
    Ok(value)
}

fn parse_free(s: &str) -> Result<(Param, f64, f64)> {
    let bad = || Error::Config(format!("--free '{s}' must look like name=lo:hi"));
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
    Ok((
        name.trim().parse()?,
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn fit_cmd(
    run: &Resolved,
    data: Option<&Path>,
    free: &[String],
    budget: Option<usize>,
    configuration: Option<&str>,
    out: &Path,
) -> Result<Value> {
    let spec = run.fit.as_ref();
    let data = data
        .map(Path::to_path_buf)
        .or_else(|| spec.and_then(|s| s.data.clone()))
        .ok_or_else(|| Error::Config("fit needs --data or fit.data".into()))?;
    let free: Vec<(Param, f64, f64)> = if free.is_empty() {
        spec.map(|s| s.free.clone()).unwrap_or_default()
    } else {
        free.iter().map(|s| parse_free(s)).collect::<Result<_>>()?
    };
    let budget = budget.or(spec.map(|s| s.budget)).unwrap_or(4000);

    let mut problem = FitProblem::new(run.cavity, run.ensemble.clone(), run.drive).with_units(Units::Hertz);
    match run.engine {
        Engine::Eq1 => {}
        Engine::Eq1Averaged => problem = problem.with_disorder(run.disorder),
        Engine::MasterEquation => {
            return Err(Error::Config("fit supports the eq1 and eq1-averaged engines".into()))
        }
    }
    let spectra: Vec<Spectrum> = match read_spectrum_csv(&data)? {
        SpectrumFile::Triple(t) => Configuration::ALL.iter().map(|&c| t.get(c).clone()).collect(),
        SpectrumFile::Single(s) => {
            let cfg = match configuration {
                Some(c) => Some(c.parse::<Configuration>()?),
                None => s.meta().configuration,
            }
            .ok_or_else(|| Error::Config("spectrum file does not name its configuration; pass --configuration".into()))?;
            let mut meta = s.meta().clone();
            meta.configuration = Some(cfg);
            vec![Spectrum::new(s.points().to_vec(), meta)?]
        }
    };
    for s in &spectra {
        problem = problem.with_spectrum(s).map_err(cfg_err)?;
    }
    for (param, lo, hi) in free {
        problem = problem.free(param, lo, hi).map_err(cfg_err)?;
    }
    let result = fit(&problem, budget, run.seed)?;
    let value = serde_json::to_value(&result)?;
    prepare_out_dir(out)?;
    std::fs::write(out.join("fit.json"), serde_json::to_string_pretty(&value)? + "\n")?;
    Ok(value)
}

fn cfg_err(e: Error) -> Error {
    match e {
        Error::InvalidInput(m) => Error::Config(m),
        other => other,
    }
}

/// Entry point of the `cavity-eit` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            // A closed stdout (e.g. piped into `head`) is not a failure.
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", error_record(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("cavity-eit").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn dry_run_prints_resolved_parameters() {
        let v = execute(&cli(&["spectrum", "--dry-run", "--seed", "3", "--grid", "-1e6:1e6:5"])).unwrap();
        assert_eq!(v["resolved"]["seed"], 3);
        assert_eq!(v["resolved"]["grid"]["n_points"], 5);
    }

    #[test]
    fn empty_cavity_spectrum_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(&cfg, "configurations = \"empty\"\n[ensemble]\nn_atoms = 0\n").unwrap();
        let out = dir.path().join("out");
        execute(&cli(&[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--grid",
            "-5e6:5e6:11",
        ]))
        .unwrap();
        let s = read_spectrum_csv(&out.join("spectrum_empty.csv")).unwrap().into_single().unwrap();
        let (i, t) = s.max().unwrap();
        assert_eq!(s.points()[i].delta, 0.0);
        assert_eq!(t, 1.0);
    }

    #[test]
    fn config_errors_exit_with_two() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.toml");
        std::fs::write(&cfg, "[cavity]\nkappa = 1\n").unwrap();
        let e = execute(&cli(&["spectrum", "--config", cfg.to_str().unwrap()])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let rec = error_record(&e);
        assert_eq!(rec["error"]["kind"], "config");
        assert!(rec["error"]["message"].as_str().unwrap().contains("kappa"));
        assert_eq!(execute(&cli(&["reproduce", "fig9", "--dry-run"])).unwrap_err().exit_code(), 2);
    }
}
