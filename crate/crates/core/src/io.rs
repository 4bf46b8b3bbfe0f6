//! Case files and CSV output.
//!
//! A case is JSON, either one document
//!
//! ```json
//! {"schema_version": 1, "n": 2, "edges": [{"i": 0, "j": 1, "w": 1.0}],
//!  "omega": [0.5, -0.5], "convention": "scaled_injection"}
//! ```
//!
//! or the same content split over lines, one object per line. In the
//! line-delimited form the objects are merged key by key, `edges` arrays
//! are concatenated and a bare `{"i":..,"j":..,"w":..}` line appends one edge.
//!
//! CSV files start with `#` comment lines echoing the schema and the run
//! configuration, followed by a header row. Floats carry 17 significant
//! digits; an empty cell means the value could not be computed.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::experiments::{ErrorCurve, SweepConfig, SweepRecord, TimingRow};
use crate::graph::{center, check_centered, NodeVector, WeightedGraph};
use crate::sync_tests::{CouplingConvention, ScanResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFile {
    pub schema_version: u32,
    pub n: usize,
    pub edges: Vec<EdgeRecord>,
    pub omega: Vec<f64>,
    #[serde(default)]
    pub convention: CouplingConvention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// A validated case.
#[derive(Debug, Clone)]
pub struct Case {
    pub graph: WeightedGraph,
    pub omega: NodeVector,
    pub convention: CouplingConvention,
    pub name: Option<String>,
}

impl CaseFile {
    pub fn from_parts(graph: &WeightedGraph, omega: &NodeVector, convention: CouplingConvention) -> Self {
        CaseFile {
            schema_version: SCHEMA_VERSION,
            n: graph.n(),
            edges: graph.edges().iter().map(|e| EdgeRecord { i: e.i, j: e.j, w: e.w }).collect(),
            omega: omega.iter().copied().collect(),
            convention,
            name: None,
            source: None,
        }
    }

    /// Builds the graph and checks the frequencies. With `auto_center`
    /// the frequencies are shifted to mean zero instead of rejected.
    pub fn validate(&self, auto_center: bool) -> Result<Case> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::UnsupportedSchema(self.schema_version));
        }
        let graph = WeightedGraph::new(self.n, self.edges.iter().map(|e| (e.i, e.j, e.w)))?;
        if self.omega.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: self.omega.len() });
        }
        let mut omega = NodeVector::from_vec(self.omega.clone());
        if auto_center {
            omega = center(&omega);
        } else {
            check_centered(&omega)?;
        }
        Ok(Case { graph, omega, convention: self.convention, name: self.name.clone() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case serializes") + "\n"
    }
}

fn json_error(line_offset: usize, e: &serde_json::Error) -> Error {
    Error::ParseError {
        location: format!("line {}, column {}", e.line() + line_offset, e.column()),
        message: e.to_string(),
    }
}

fn merge_lines(text: &str) -> Result<Value> {
    let mut merged = Map::new();
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line).map_err(|e| json_error(idx, &e))?;
        let Value::Object(obj) = value else {
            return Err(Error::ParseError { location: format!("line {}", idx + 1), message: "expected a JSON object".into() });
        };
        if obj.contains_key("i") && obj.contains_key("j") {
            edges.push(Value::Object(obj));
            continue;
        }
        for (k, v) in obj {
            match (k.as_str(), v) {
                ("edges", Value::Array(es)) => edges.extend(es),
                (_, v) => {
                    merged.insert(k, v);
                }
            }
        }
    }
    merged.insert("edges".into(), Value::Array(edges));
    Ok(Value::Object(merged))
}

fn field_error(e: serde_json::Error) -> Error {
    Error::ParseError { location: "document".into(), message: e.to_string() }
}

pub fn parse_case_str(text: &str, auto_center: bool) -> Result<Case> {
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) if e.is_syntax() || e.is_eof() => {
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
            if serde_json::from_str::<Map<String, Value>>(first).is_ok() {
                merge_lines(text)?
            } else {
                return Err(json_error(0, &e));
            }
        }
        Err(e) => return Err(json_error(0, &e)),
    };
    if let Some(v) = value.get("schema_version") {
        match v.as_u64() {
            Some(1) => {}
            Some(other) => return Err(Error::UnsupportedSchema(other as u32)),
            None => return Err(Error::ParseError { location: "schema_version".into(), message: "expected an integer".into() }),
        }
    }
    let case: CaseFile = serde_json::from_value(value).map_err(field_error)?;
    case.validate(auto_center)
}

pub fn parse_case(path: impl AsRef<Path>, auto_center: bool) -> Result<Case> {
    let text = std::fs::read_to_string(path)?;
    parse_case_str(&text, auto_center)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn atomic_write(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn write_case(path: impl AsRef<Path>, case: &CaseFile) -> Result<()> {
    atomic_write(path, case.to_json().as_bytes())
}

/// 17 significant digits; `inf`/`-inf`/`nan` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Assembles a CSV document: comment lines, header, rows.
pub struct CsvDoc {
    comments: Vec<String>,
    writer: csv::Writer<Vec<u8>>,
}

impl CsvDoc {
    pub fn new(schema: &str, header: &[String]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        CsvDoc { comments: vec![format!("schema={schema}")], writer }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let body = self.writer.into_inner().expect("in-memory flush");
        out + &String::from_utf8(body).expect("csv is utf-8")
    }
}

pub const SWEEP_SCHEMA: &str = "ksync-sweep/1";
pub const SCAN_SCHEMA: &str = "ksync-scan/1";
pub const ERROR_CURVE_SCHEMA: &str = "ksync-error-curve/1";
pub const TIMING_SCHEMA: &str = "ksync-timing/1";

/// Sweep CSV. Columns: model,p,dist,trial,seed,n,m,K_C, one `K_<test>`
/// per test, then `KC_over_KT_<test>` and `KT_over_KC_<test>`, then status.
pub fn sweep_csv(cfg: &SweepConfig, records: &[SweepRecord]) -> String {
    let tests = cfg.tests();
    let mut header: Vec<String> = ["model", "p", "dist", "trial", "seed", "n", "m", "K_C"].map(String::from).to_vec();
    header.extend(tests.iter().map(|t| format!("K_{t}")));
    header.extend(tests.iter().map(|t| format!("KC_over_KT_{t}")));
    header.extend(tests.iter().map(|t| format!("KT_over_KC_{t}")));
    header.push("status".into());
    let mut doc = CsvDoc::new(SWEEP_SCHEMA, &header);
    doc.comment(format!("config={}", serde_json::to_string(cfg).expect("config serializes")));
    for r in records {
        let mut row = vec![
            r.model.to_string(),
            fmt_f64(r.p),
            r.dist.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            fmt_f64(r.k_c),
        ];
        row.extend(tests.iter().map(|&t| fmt_opt(r.k_t(t))));
        row.extend(tests.iter().map(|&t| fmt_opt(r.ratio_kc_kt(t))));
        row.extend(tests.iter().map(|&t| fmt_opt(r.ratio_kt_kc(t))));
        row.push(r.status.clone().unwrap_or_else(|| "ok".into()));
        doc.row(row);
    }
    doc.finish()
}

pub fn scan_csv(scan: &ScanResult, config_echo: &str) -> String {
    let header = ["test", "K_T", "K_C", "KC_over_KT", "KT_over_KC", "status"].map(String::from);
    let mut doc = CsvDoc::new(SCAN_SCHEMA, &header);
    doc.comment(format!("config={config_echo}"));
    for th in &scan.thresholds {
        let (kt, status) = match &th.k_t {
            Ok(k) => (Some(*k), "ok".to_string()),
            Err(e) => (None, e.reason().to_string()),
        };
        doc.row([
            th.test.to_string(),
            fmt_opt(kt),
            fmt_f64(scan.k_c),
            fmt_opt(kt.map(|k| scan.k_c / k)),
            fmt_opt(kt.map(|k| k / scan.k_c)),
            status,
        ]);
    }
    doc.finish()
}

pub fn error_curve_csv(curve: &ErrorCurve, config_echo: &str) -> String {
    let header = ["order", "S_k"].map(String::from);
    let mut doc = CsvDoc::new(ERROR_CURVE_SCHEMA, &header);
    doc.comment(format!("config={config_echo}"));
    doc.comment(format!("reference={} residual={}", curve.reference, fmt_f64(curve.reference_residual)));
    for (k, s) in curve.orders.iter().zip(&curve.s_k) {
        doc.row([k.to_string(), fmt_f64(*s)]);
    }
    doc.finish()
}

pub fn timing_csv(rows: &[TimingRow], config_echo: &str) -> String {
    let header = ["instance", "method", "median_seconds", "repeats", "residual", "status"].map(String::from);
    let mut doc = CsvDoc::new(TIMING_SCHEMA, &header);
    doc.comment(format!("config={config_echo}"));
    for r in rows {
        doc.row([
            r.instance.to_string(),
            r.method.clone(),
            fmt_f64(r.median_seconds),
            r.repeats.to_string(),
            fmt_f64(r.residual),
            r.failed.clone().unwrap_or_else(|| "ok".into()),
        ]);
    }
    doc.finish()
}
