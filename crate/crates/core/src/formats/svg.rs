//! Static line plots as self-describing SVG: the plotted numbers are embedded
//! as JSON in a `<metadata>` element.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Style {
    Solid,
    Dashed,
    Markers,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub color: String,
    pub style: Style,
}

impl Series {
    pub fn new(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>, color: &str, style: Style) -> Self {
        Self {
            label: label.into(),
            x,
            y,
            color: color.into(),
            style,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub meta: Value,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            meta: Value::Null,
        }
    }

    pub fn with_series(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn with_meta(mut self, meta: Value) -> Self {
        self.meta = meta;
        self
    }

    fn bounds(&self) -> Result<(f64, f64, f64, f64)> {
        let mut xs = self.series.iter().flat_map(|s| s.x.iter().copied()).filter(|v| v.is_finite());
        let first = xs.next().ok_or_else(|| Error::invalid("plot has no finite data"))?;
        let (mut x0, mut x1) = (first, first);
        for v in xs {
            x0 = x0.min(v);
            x1 = x1.max(v);
        }
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in self.series.iter().flat_map(|s| s.y.iter().copied()).filter(|v| v.is_finite()) {
            y0 = y0.min(v);
            y1 = y1.max(v);
        }
        if x1 == x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        y0 = y0.min(0.0);
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        Ok((x0, x1, y0, y1 * 1.05))
    }

    pub fn to_svg(&self) -> Result<String> {
        for s in &self.series {
            if s.x.len() != s.y.len() {
                return Err(Error::invalid(format!("series '{}' has mismatched columns", s.label)));
            }
        }
        let (x0, x1, y0, y1) = self.bounds()?;
        let pw = WIDTH - MARGIN_L - MARGIN_R;
        let ph = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut out = String::new();
        let w = &mut out;
        writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        let data = json!({
            "meta": self.meta,
            "x_label": self.x_label,
            "y_label": self.y_label,
            "series": self.series,
        });
        let payload = serde_json::to_string(&data)?.replace("]]>", "]]]]><![CDATA[>");
        writeln!(w, "<metadata><![CDATA[{payload}]]></metadata>").unwrap();
        writeln!(w, r#"<title>{}</title>"#, escape(&self.title)).unwrap();
        writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(
            w,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        )
        .unwrap();
        writeln!(
            w,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        )
        .unwrap();

        let xs = nice_step(x1 - x0);
        let mut t = (x0 / xs).ceil() * xs;
        while t <= x1 + 1e-9 * xs {
            let px = sx(t);
            writeln!(
                w,
                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                MARGIN_T + ph,
                MARGIN_T + ph + 5.0,
                MARGIN_T + ph + 18.0,
                fmt_tick(t)
            )
            .unwrap();
            t += xs;
        }
        let ys = nice_step(y1 - y0);
        let mut t = (y0 / ys).ceil() * ys;
        while t <= y1 + 1e-9 * ys {
            let py = sy(t);
            writeln!(
                w,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_L}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_L - 5.0,
                MARGIN_L - 8.0,
                py + 4.0,
                fmt_tick(t)
            )
            .unwrap();
            t += ys;
        }
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            MARGIN_T + ph / 2.0,
            MARGIN_T + ph / 2.0,
            escape(&self.y_label)
        )
        .unwrap();

        for (k, s) in self.series.iter().enumerate() {
            let pts: Vec<String> = s
                .x
                .iter()
                .zip(&s.y)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            match s.style {
                Style::Markers => {
                    for p in &pts {
                        let (cx, cy) = p.split_once(',').unwrap();
                        writeln!(w, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{}"/>"#, s.color).unwrap();
                    }
                }
                style => {
                    let dash = if style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    writeln!(
                        w,
                        r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
                        s.color,
                        pts.join(" ")
                    )
                    .unwrap();
                }
            }
            let ly = MARGIN_T + 14.0 + 16.0 * k as f64;
            let lx = MARGIN_L + pw - 150.0;
            writeln!(
                w,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
                ly - 4.0,
                lx + 20.0,
                ly - 4.0,
                s.color,
                lx + 26.0,
                escape(&s.label)
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_svg()?)?;
        Ok(())
    }
}

/// Extract the JSON embedded by [`Plot::to_svg`].
pub fn embedded_data(svg: &str) -> Result<Value> {
    let start = svg
        .find("<metadata><![CDATA[")
        .ok_or_else(|| Error::invalid("SVG has no embedded data"))?
        + "<metadata><![CDATA[".len();
    let end = svg[start..]
        .find("]]></metadata>")
        .ok_or_else(|| Error::invalid("SVG metadata is not terminated"))?;
    let payload = svg[start..start + end].replace("]]]]><![CDATA[>", "]]>");
    Ok(serde_json::from_str(&payload)?)
}
