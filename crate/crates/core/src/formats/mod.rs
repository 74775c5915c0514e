//! File formats: spectrum CSV and SVG plots.

pub mod csv;
pub mod svg;
