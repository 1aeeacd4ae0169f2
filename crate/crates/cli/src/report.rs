//! Report documents and their CSV and JSON encodings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use specprod_core::experiments::{ExperimentGrid, FitResult, RatioSample};

use crate::config::{ExperimentConfig, OutputFormat, Study};

/// Abscissa of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitVariable {
    MinDegree,
    MaxDegree,
    FirstDegree,
    SecondDegree,
    /// Product of the two smallest degrees (trilinear samples).
    TwoSmallestProduct,
    /// Not a sample coordinate: the fit is over values listed in the report.
    Listed,
}

impl FitVariable {
    /// Coordinate of `s` on this axis; `None` for [`FitVariable::Listed`].
    pub fn of(self, s: &RatioSample) -> Option<f64> {
        let mut d = s.degrees.clone();
        let value = match self {
            FitVariable::MinDegree => s.min_degree(),
            FitVariable::MaxDegree => d.iter().copied().max().unwrap_or(0),
            FitVariable::FirstDegree => d[0],
            FitVariable::SecondDegree => *d.get(1)?,
            FitVariable::TwoSmallestProduct => {
                d.sort_unstable();
                d.iter().take(2).product()
            }
            FitVariable::Listed => return None,
        };
        Some(f64::from(value))
    }

    pub fn label(self) -> &'static str {
        match self {
            FitVariable::MinDegree => "min degree",
            FitVariable::MaxDegree => "max degree",
            FitVariable::FirstDegree => "first degree",
            FitVariable::SecondDegree => "second degree",
            FitVariable::TwoSmallestProduct => "product of two smallest degrees",
            FitVariable::Listed => "degree",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub label: String,
    pub variable: FitVariable,
    pub fit: FitResult,
    /// Exponent predicted by the growth factor, when the family is sharp.
    pub expected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub label: String,
    pub value: f64,
}

/// A numerical invariant checked after the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuntimeMetadata {
    pub version: String,
    /// Seconds since the Unix epoch at the start of the run.
    pub started_unix: Option<u64>,
    pub elapsed_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: ExperimentConfig,
    pub grid: ExperimentGrid,
    /// The first fit is the one drawn in plots.
    pub fits: Vec<NamedFit>,
    pub constants: Vec<NamedValue>,
    pub checks: Vec<InvariantCheck>,
    pub runtime: RuntimeMetadata,
}

impl ReportDocument {
    pub fn study(&self) -> Study {
        self.config.study
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// The document with clock readings removed, for reproducibility checks.
    pub fn without_timestamps(&self) -> Self {
        let mut doc = self.clone();
        doc.grid.timestamp = None;
        doc.runtime.started_unix = None;
        doc.runtime.elapsed_seconds = None;
        doc
    }
}

/// CSV header of [`emit_report`].
pub const CSV_COLUMNS: [&str; 12] =
    ["study", "d", "family_f", "family_g", "family_h", "p", "q", "k", "lebesgue_r", "ratio", "bound", "ratio_over_bound"];

/// Encodes the report. CSV holds one row per grid sample; JSON holds the
/// whole document.
pub fn emit_report(doc: &ReportDocument, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(doc).expect("reports contain only serialisable values");
            bytes.push(b'\n');
            bytes
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_COLUMNS).expect("in-memory write");
            for s in &doc.grid.samples {
                let family = |i: usize| s.families.get(i).map_or(String::new(), |f| f.to_string());
                let degree = |i: usize| s.degrees.get(i).map_or(String::new(), u32::to_string);
                let r = if s.lebesgue_r.is_infinite() { "inf".to_owned() } else { format!("{}", s.lebesgue_r) };
                w.write_record([
                    doc.study().tag().to_owned(),
                    s.d.to_string(),
                    family(0),
                    family(1),
                    family(2),
                    degree(0),
                    degree(1),
                    degree(2),
                    r,
                    significant(s.ratio),
                    significant(s.bound),
                    significant(s.ratio / s.bound),
                ])
                .expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
    }
}

/// Parses a JSON report produced by [`emit_report`].
pub fn parse_json_report(bytes: &[u8]) -> serde_json::Result<ReportDocument> {
    serde_json::from_slice(bytes)
}

/// Decimal rendering with 12 significant digits.
pub fn significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let mut s = String::new();
    write!(s, "{x:.decimals$}").expect("string write");
    s
}
