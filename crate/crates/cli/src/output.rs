//! Rendering and writing of command output.
//!
//! JSON floats use the shortest representation that parses back to the
//! same double; CSV floats are written with 17 significant digits.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use ptpara::PhysicalParams;

use crate::Failure;

#[derive(Serialize)]
pub struct ParamsOut {
    pub m: f64,
    pub hbar: f64,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// The only place the crate version appears in output.
#[derive(Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub params: ParamsOut,
}

impl Metadata {
    pub fn new(p: &PhysicalParams) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            params: ParamsOut {
                m: p.m(),
                hbar: p.hbar(),
                alpha: p.alpha(),
                b: p.b(),
                c: p.c(),
            },
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numerical(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Header line plus one line per row.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    let result = match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| Failure::Config(format!("cannot write output: {e}")))
}
