//! Result rows and their CSV / JSONL persistence. See `docs/csv-columns.md`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::number::float17;

pub const SCHEMA_VERSION: u32 = 1;

/// One `(x, y, ρ, bound)` record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRow {
    pub schema_version: u32,
    pub x: u64,
    pub y: u64,
    /// Exact `K` as given, or the derived `ln y / ln ln x` (flagged `k_derived`).
    pub k: String,
    #[serde(with = "float17")]
    pub alpha: f64,
    pub psi: u64,
    pub rho: String,
    #[serde(with = "float17")]
    pub moment: f64,
    /// Exact integer moment, empty unless `method` is `EXACT_CONVOLUTION`.
    pub moment_exact: String,
    pub method: String,
    pub grid_n: u64,
    #[serde(with = "float17")]
    pub error_estimate: f64,
    /// `ln I / ln x`.
    #[serde(with = "float17")]
    pub x_exponent: f64,
    /// `ln I / ln Ψ`.
    #[serde(with = "float17")]
    pub psi_exponent: f64,
    pub bound_id: String,
    #[serde(with = "float17")]
    pub bound_total: f64,
    #[serde(with = "float17")]
    pub bound_x_exponent: f64,
    /// `moment / bound_total`.
    #[serde(with = "float17")]
    pub ratio: f64,
    pub valid: bool,
    pub nontrivial: Option<bool>,
    pub flags: String,
    #[serde(with = "float17")]
    pub timing_ms: f64,
}

/// One arc decomposition of a cell's moment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcRow {
    pub schema_version: u32,
    pub x: u64,
    pub y: u64,
    pub k: String,
    pub psi: u64,
    pub rho: String,
    pub split: String,
    #[serde(with = "float17")]
    pub big_q: f64,
    #[serde(with = "float17")]
    pub split_q: f64,
    pub grid_n: u64,
    #[serde(with = "float17")]
    pub total: f64,
    #[serde(with = "float17")]
    pub part1: f64,
    #[serde(with = "float17")]
    pub part2: f64,
    #[serde(with = "float17")]
    pub sharp_part: f64,
    #[serde(with = "float17")]
    pub flat_part: f64,
    pub arcs: u64,
    /// Arc with the largest contribution.
    pub top_a: u64,
    pub top_q: u64,
    #[serde(with = "float17")]
    pub top_share: f64,
    pub flags: String,
}

/// One pointwise skeleton evaluated at a sampled `θ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkeletonRow {
    pub schema_version: u32,
    pub x: u64,
    pub y: u64,
    pub k: String,
    pub psi: u64,
    pub sample: u64,
    #[serde(with = "float17")]
    pub theta: f64,
    pub a: i64,
    pub q: u64,
    #[serde(with = "float17")]
    pub big_q: f64,
    #[serde(with = "float17")]
    pub l: f64,
    pub lemma: String,
    #[serde(with = "float17")]
    pub value: f64,
    #[serde(with = "float17")]
    pub modulus: f64,
    #[serde(with = "float17")]
    pub ratio: f64,
    pub valid: bool,
    pub out_of_theory: bool,
    pub flags: String,
}

/// Flags joined with `;`.
#[derive(Clone, Debug, Default)]
pub(crate) struct Flags(Vec<String>);

impl Flags {
    pub fn push(&mut self, flag: impl Into<String>) {
        let flag: String = flag.into().replace([';', '\n'], ",");
        if !self.0.contains(&flag) {
            self.0.push(flag);
        }
    }

    /// Flags every non-finite value as `nonfinite:<name>`.
    pub fn nonfinite(&mut self, fields: &[(&str, f64)]) {
        for (name, v) in fields {
            if !v.is_finite() {
                self.push(format!("nonfinite:{name}"));
            }
        }
    }

    pub fn join(&self) -> String {
        self.0.join(";")
    }
}

impl ResultRow {
    pub(crate) fn finish(&mut self, mut flags: Flags) {
        flags.nonfinite(&[
            ("alpha", self.alpha),
            ("moment", self.moment),
            ("error_estimate", self.error_estimate),
            ("x_exponent", self.x_exponent),
            ("psi_exponent", self.psi_exponent),
            ("bound_total", self.bound_total),
            ("bound_x_exponent", self.bound_x_exponent),
            ("ratio", self.ratio),
        ]);
        self.flags = flags.join();
    }

    /// Whether `flags` lists `flag` exactly.
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.split(';').any(|f| f == flag)
    }
}

/// Serializes rows as CSV with a header, in field order.
pub fn to_csv<R: Serialize>(rows: &[R], out: impl Write) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_jsonl<R: Serialize>(rows: &[R], mut out: impl Write) -> std::io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_csv<R: Serialize>(rows: &[R], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    to_csv(rows, BufWriter::new(file)).map_err(|source| HarnessError::Csv {
        path: path.into(),
        source,
    })
}

pub fn write_jsonl<R: Serialize>(rows: &[R], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    to_jsonl(rows, BufWriter::new(file)).map_err(|e| HarnessError::io(path, e))
}

pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    let csv_err = |source| HarnessError::Csv {
        path: path.into(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err)
}

pub fn read_jsonl<R: DeserializeOwned>(path: &Path) -> Result<Vec<R>> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|source| HarnessError::Json {
            path: path.into(),
            line: i + 1,
            source,
        })?);
    }
    Ok(rows)
}

/// Reads result rows from a `.jsonl` file, or CSV otherwise.
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    if path.extension().is_some_and(|e| e == "jsonl") {
        read_jsonl(path)
    } else {
        read_csv(path)
    }
}
