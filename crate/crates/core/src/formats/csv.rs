//! Spectrum CSV files.
//!
//! ```text
//! # cavity-eit spectrum
//! # meta {"model":"eq1",...}
//! delta_hz,transmission
//! -1.0000000000000000e7,4.5454545454545453e-2
//! ```
//!
//! Triples use the header `delta_hz,t_empty,t_2level,t_eit` and one
//! `# meta.<configuration> {json}` line per column. Detunings are stored in
//! Hz, values with 17 significant digits, LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{hz_to_rad, rad_to_hz};
use crate::transmission::{Configuration, Spectrum, SpectrumMeta, SpectrumTriple};

pub const SINGLE_HEADER: &str = "delta_hz,transmission";
pub const TRIPLE_HEADER: &str = "delta_hz,t_empty,t_2level,t_eit";
const MAGIC: &str = "# cavity-eit spectrum";

/// Shortest format that round-trips an `f64`: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// The Hz value written for an angular detuning: among the doubles nearest
/// `x / 2π`, one that converts back to exactly `x` when there is one.
pub fn detuning_hz(x: f64) -> f64 {
    let h0 = rad_to_hz(x);
    let (mut down, mut up) = (h0, h0);
    for _ in 0..8 {
        if hz_to_rad(down) == x {
            return down;
        }
        if hz_to_rad(up) == x {
            return up;
        }
        down = down.next_down();
        up = up.next_up();
    }
    h0
}

/// A parsed spectrum file.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumFile {
    Single(Spectrum),
    Triple(SpectrumTriple),
}

impl SpectrumFile {
    pub fn into_triple(self) -> Result<SpectrumTriple> {
        match self {
            SpectrumFile::Triple(t) => Ok(t),
            SpectrumFile::Single(_) => Err(Error::invalid("expected a spectrum triple file")),
        }
    }

    pub fn into_single(self) -> Result<Spectrum> {
        match self {
            SpectrumFile::Single(s) => Ok(s),
            SpectrumFile::Triple(_) => Err(Error::invalid("expected a single-spectrum file")),
        }
    }
}

fn meta_line(out: &mut String, key: &str, meta: &SpectrumMeta) -> Result<()> {
    let json = serde_json::to_string(meta)?;
    writeln!(out, "# {key} {json}").expect("writing to a String");
    Ok(())
}

pub fn spectrum_to_csv(spectrum: &Spectrum) -> Result<String> {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    meta_line(&mut out, "meta", spectrum.meta())?;
    out.push_str(SINGLE_HEADER);
    out.push('\n');
    for p in spectrum.points() {
        writeln!(out, "{},{}", fmt_f64(detuning_hz(p.delta)), fmt_f64(p.transmission)).expect("String");
    }
    Ok(out)
}

pub fn triple_to_csv(triple: &SpectrumTriple) -> Result<String> {
    let grid = triple.empty.deltas();
    if triple.two_level.deltas() != grid || triple.eit.deltas() != grid {
        return Err(Error::invalid("triple spectra must share one detuning grid"));
    }
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    for cfg in Configuration::ALL {
        meta_line(&mut out, &format!("meta.{}", cfg.name()), triple.get(cfg).meta())?;
    }
    out.push_str(TRIPLE_HEADER);
    out.push('\n');
    let (e, t, c) = (
        triple.empty.transmissions(),
        triple.two_level.transmissions(),
        triple.eit.transmissions(),
    );
    for i in 0..grid.len() {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(detuning_hz(grid[i])),
            fmt_f64(e[i]),
            fmt_f64(t[i]),
            fmt_f64(c[i])
        )
        .expect("String");
    }
    Ok(out)
}

pub fn write_spectrum_csv(spectrum: &Spectrum, path: &Path) -> Result<()> {
    fs::write(path, spectrum_to_csv(spectrum)?)?;
    Ok(())
}

pub fn write_triple_csv(triple: &SpectrumTriple, path: &Path) -> Result<()> {
    fs::write(path, triple_to_csv(triple)?)?;
    Ok(())
}

pub fn read_spectrum_csv(path: &Path) -> Result<SpectrumFile> {
    parse_spectrum_csv(&fs::read_to_string(path)?)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(field: &str, line: usize, column: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("column {column}: '{field}' is not a number")))
}

/// Parse either file layout. Files without metadata lines are accepted; the
/// spectra then carry `model = "data"` and, for triples, their column's
/// configuration.
pub fn parse_spectrum_csv(text: &str) -> Result<SpectrumFile> {
    let mut metas: Vec<(String, SpectrumMeta)> = Vec::new();
    let mut header: Option<(usize, Vec<String>)> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("meta") {
                let (key, json) = rest.split_once(' ').unwrap_or((rest, ""));
                let meta: SpectrumMeta = serde_json::from_str(json.trim())
                    .map_err(|e| parse_err(line_no, format!("bad metadata: {e}")))?;
                metas.push((key.trim_start_matches('.').to_string(), meta));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match &header {
            None => {
                let cols: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
                let joined = cols.join(",");
                if joined != SINGLE_HEADER && joined != TRIPLE_HEADER {
                    return Err(parse_err(
                        line_no,
                        format!("unexpected header '{line}'; expected '{SINGLE_HEADER}' or '{TRIPLE_HEADER}'"),
                    ));
                }
                header = Some((line_no, cols));
            }
            Some((_, cols)) => {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != cols.len() {
                    return Err(parse_err(
                        line_no,
                        format!("expected {} fields, found {}", cols.len(), fields.len()),
                    ));
                }
                let mut values = Vec::with_capacity(fields.len());
                for (f, c) in fields.iter().zip(cols) {
                    let v = parse_number(f, line_no, c)?;
                    if !v.is_finite() {
                        return Err(parse_err(line_no, format!("column {c}: value must be finite")));
                    }
                    if c != "delta_hz" && v < 0.0 {
                        return Err(parse_err(line_no, format!("column {c}: transmission {v} is negative")));
                    }
                    values.push(v);
                }
                if let Some((prev_line, prev)) = rows.last() {
                    if !(values[0] > prev[0]) {
                        return Err(parse_err(
                            line_no,
                            format!(
                                "detuning {} does not increase past {} (line {prev_line})",
                                values[0], prev[0]
                            ),
                        ));
                    }
                }
                rows.push((line_no, values));
            }
        }
    }

    let (_, cols) = header.ok_or_else(|| parse_err(1, "missing header line"))?;
    if rows.is_empty() {
        return Err(parse_err(1, "file has no data rows"));
    }
    let deltas: Vec<f64> = rows.iter().map(|(_, v)| hz_to_rad(v[0])).collect();
    let column = |k: usize| -> Vec<f64> { rows.iter().map(|(_, v)| v[k]).collect() };
    let find_meta = |key: &str, cfg: Option<Configuration>| -> SpectrumMeta {
        metas
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| {
                let mut m = SpectrumMeta::model("data");
                m.configuration = cfg;
                m.params = Value::Null;
                m
            })
    };

    if cols.len() == 2 {
        let spectrum = Spectrum::from_columns(&deltas, &column(1), find_meta("", None))?;
        Ok(SpectrumFile::Single(spectrum))
    } else {
        let build = |cfg: Configuration, k: usize| {
            Spectrum::from_columns(&deltas, &column(k), find_meta(cfg.name(), Some(cfg)))
        };
        Ok(SpectrumFile::Triple(SpectrumTriple {
            empty: build(Configuration::Empty, 1)?,
            two_level: build(Configuration::TwoLevel, 2)?,
            eit: build(Configuration::CavityEit, 3)?,
        }))
    }
}

/// Write a plain numeric table with a metadata comment.
pub fn write_table_csv(
    path: &Path,
    meta: &Value,
    header: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "# cavity-eit table").expect("String");
    writeln!(out, "# meta {}", serde_json::to_string(meta)?).expect("String");
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::invalid("table row width does not match the header"));
        }
        let fields: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DetuningGrid, Preset};
    use crate::transmission::sweep_triple;

    fn triple() -> SpectrumTriple {
        let p = Preset::canonical();
        let grid = DetuningGrid::from_hz(-10e6, 10e6, 41).unwrap();
        sweep_triple(&grid, &p.cavity, &p.ensemble, &p.drive).unwrap()
    }

    #[test]
    fn triple_round_trip_is_stable() {
        let t = triple();
        let text = triple_to_csv(&t).unwrap();
        assert!(text.lines().any(|l| l == TRIPLE_HEADER));
        let back = parse_spectrum_csv(&text).unwrap().into_triple().unwrap();
        assert_eq!(triple_to_csv(&back).unwrap(), text);
        for cfg in Configuration::ALL {
            assert_eq!(back.get(cfg).transmissions(), t.get(cfg).transmissions());
            assert_eq!(back.get(cfg).transmissions(), t.get(cfg).transmissions());
            assert_eq!(back.get(cfg).meta(), t.get(cfg).meta());
            for (a, b) in back.get(cfg).deltas().iter().zip(t.get(cfg).deltas()) {
                assert!(*a == b || a.next_up() == b || a.next_down() == b);
            }
        }
    }

    #[test]
    fn detunings_convert_back_within_one_ulp() {
        for i in 0..20_000 {
            let x = hz_to_rad(-25e6 + 2.5e3 * i as f64) * (1.0 + 1e-13 * i as f64);
            let back = hz_to_rad(detuning_hz(x));
            assert!(back == x || back.next_up() == x || back.next_down() == x, "{x}");
            assert_eq!(hz_to_rad(detuning_hz(back)), back);
        }
    }

    #[test]
    fn decreasing_detuning_names_the_row() {
        let text = "delta_hz,transmission\n1.0,0.5\n2.0,0.5\n1.5,0.5\n";
        match parse_spectrum_csv(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_values_are_rejected_with_row() {
        for (text, row) in [
            ("delta_hz,transmission\n1.0,0.5\n2.0,NaN\n", 3),
            ("delta_hz,transmission\n1.0,-0.1\n", 2),
            ("delta_hz,transmission\n1.0,abc\n", 2),
            ("delta_hz,transmission\n1.0\n", 2),
            ("freq,t\n1.0,0.5\n", 1),
        ] {
            match parse_spectrum_csv(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, row, "{text}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn bare_data_files_are_accepted() {
        let f = parse_spectrum_csv("delta_hz,transmission\n-1e6,0.5\n0,1\n1e6,0.5\n").unwrap();
        let s = f.into_single().unwrap();
        assert_eq!(s.meta().model, "data");
        assert_eq!(s.transmissions(), vec![0.5, 1.0, 0.5]);
    }
}
