//! JSON matrix files and JSON-lines condition reports.
//!
//! Matrix file layout:
//!
//! ```json
//! { "n": 4, "p": 2, "basis_order": "slater-lex-0based",
//!   "entries": [[re, im], ...],            // row-major, C(n,p)^2 pairs
//!   "metadata": { ... } }                  // optional
//! ```
//!
//! All floats written by this module use 17 significant digits, so a file
//! read back reproduces the matrix bit for bit.

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::basis::enumerate_basis;
use crate::conditions::ConditionReport;
use crate::operators::{DensityOperator, DensityTolerance, HermitianOperator};
use crate::{binomial, Error, Result};

pub const BASIS_ORDER: &str = "slater-lex-0based";
pub const REPORT_SCHEMA: u32 = 1;
/// Tolerance for Hermiticity, trace and PSD checks on loaded files.
pub const LOAD_TOLERANCE: f64 = 1e-8;

/// `x` formatted with 17 significant digits as a JSON number.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn sig17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format_f64(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Serialize)]
struct Sig17(#[serde(serialize_with = "sig17")] f64);

fn sig17_pairs<S: Serializer>(entries: &[[f64; 2]], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(entries.len()))?;
    for [re, im] in entries {
        seq.serialize_element(&[Sig17(*re), Sig17(*im)])?;
    }
    seq.end()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub p: usize,
    pub basis_order: String,
    #[serde(serialize_with = "sig17_pairs")]
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

impl MatrixFile {
    pub fn from_operator(op: &HermitianOperator, metadata: Option<serde_json::Value>) -> Self {
        let m = op.matrix();
        let mut entries = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                entries.push([m[(r, c)].re, m[(r, c)].im]);
            }
        }
        Self {
            n: op.n(),
            p: op.p(),
            basis_order: BASIS_ORDER.to_string(),
            entries,
            metadata,
        }
    }

    /// Validate layout and Hermiticity.
    pub fn to_operator(&self) -> Result<HermitianOperator> {
        if self.basis_order != BASIS_ORDER {
            return Err(Error::Format(format!(
                "basis_order {:?}, expected {BASIS_ORDER:?}",
                self.basis_order
            )));
        }
        if self.p > self.n {
            return Err(Error::Format(format!("p = {} exceeds n = {}", self.p, self.n)));
        }
        let dim = binomial(self.n, self.p);
        if self.entries.len() != dim * dim {
            return Err(Error::Format(format!(
                "{} entries, expected C({},{})^2 = {}",
                self.entries.len(),
                self.n,
                self.p,
                dim * dim
            )));
        }
        if self.entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Format("non-finite entry".into()));
        }
        let matrix = DMatrix::from_fn(dim, dim, |r, c| {
            let [re, im] = self.entries[r * dim + c];
            Complex64::new(re, im)
        });
        let basis = Arc::new(enumerate_basis(self.n, self.p)?);
        HermitianOperator::with_tolerance(basis, matrix, LOAD_TOLERANCE)
            .map_err(|e| Error::Format(e.to_string()))
    }

    /// Validate as a density operator (PSD, unit trace).
    pub fn to_density(&self) -> Result<DensityOperator> {
        let op = self.to_operator()?;
        DensityOperator::new(
            op,
            DensityTolerance {
                psd: LOAD_TOLERANCE,
                trace: LOAD_TOLERANCE,
            },
        )
        .map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

#[derive(Serialize)]
struct ReportLine<'a> {
    schema: u32,
    condition: &'a str,
    #[serde(serialize_with = "sig17")]
    value: f64,
    #[serde(serialize_with = "sig17")]
    bound: f64,
    #[serde(serialize_with = "sig17")]
    margin: f64,
    passed: bool,
    #[serde(serialize_with = "sig17")]
    tol: f64,
    probe: &'a str,
}

/// One JSON object per report, schema version [`REPORT_SCHEMA`].
pub fn report_json_line(report: &ConditionReport) -> Result<String> {
    Ok(serde_json::to_string(&ReportLine {
        schema: REPORT_SCHEMA,
        condition: report.condition.name(),
        value: report.value,
        bound: report.bound,
        margin: report.margin,
        passed: report.passed,
        tol: report.tol,
        probe: &report.probe,
    })?)
}
