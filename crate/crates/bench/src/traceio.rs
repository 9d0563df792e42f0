//! Trace files. CSV carries the scalar columns only; JSON keeps every field
//! including `x` and the run status.

use std::io::Write;
use std::path::Path;

use optlab::{Status, Trace64, TraceRow, Vector64};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

pub const CSV_HEADER: [&str; 7] = [
    "iter",
    "f_value",
    "f_gap",
    "dist_to_opt",
    "grad_norm",
    "step_size",
    "oracle_calls",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Csv,
    Json,
}

impl TraceFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => TraceFormat::Json,
            _ => TraceFormat::Csv,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trace_to_csv(trace: &Trace64) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| BenchError::Format(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(fmt_f).unwrap_or_default();
    for r in &trace.rows {
        w.write_record([
            r.iter.to_string(),
            fmt_f(r.f_value),
            opt(r.f_gap),
            opt(r.dist_to_opt),
            opt(r.grad_norm),
            fmt_f(r.step_size),
            r.oracle_calls.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| BenchError::Format(e.to_string()))
}

/// Rows from CSV text. Fields absent from CSV (`x`, `dist_from_start`) are left
/// empty/zero and the status is `budget_exhausted`.
pub fn trace_from_csv(text: &str) -> Result<Trace64> {
    let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let bad = |m: String| BenchError::Format(m);
    let headers = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(bad(format!(
            "unexpected CSV header `{}`, expected `{}`",
            headers.iter().collect::<Vec<_>>().join(","),
            CSV_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i).parse().map_err(|_| {
                bad(format!("row {}: column `{}`: bad number `{}`", line + 1, CSV_HEADER[i], field(i)))
            })
        };
        let opt = |i: usize| -> Result<Option<f64>> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let int = |i: usize| -> Result<u64> {
            field(i).parse().map_err(|_| {
                bad(format!("row {}: column `{}`: bad integer `{}`", line + 1, CSV_HEADER[i], field(i)))
            })
        };
        rows.push(TraceRow {
            iter: int(0)? as usize,
            x: None,
            f_value: num(1)?,
            f_gap: opt(2)?,
            dist_to_opt: opt(3)?,
            grad_norm: opt(4)?,
            step_size: num(5)?,
            oracle_calls: int(6)?,
            dist_from_start: 0.0,
        });
    }
    Ok(optlab::Trace {
        rows,
        status: Status::BudgetExhausted,
    })
}

/// A float that survives JSON when it is not finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonF64 {
    Num(f64),
    Text(SpecialF64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
enum SpecialF64 {
    #[serde(rename = "NaN")]
    Nan,
    #[serde(rename = "inf")]
    Inf,
    #[serde(rename = "-inf")]
    NegInf,
}

impl From<f64> for JsonF64 {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            JsonF64::Num(v)
        } else if v.is_nan() {
            JsonF64::Text(SpecialF64::Nan)
        } else if v > 0.0 {
            JsonF64::Text(SpecialF64::Inf)
        } else {
            JsonF64::Text(SpecialF64::NegInf)
        }
    }
}

impl From<JsonF64> for f64 {
    fn from(v: JsonF64) -> f64 {
        match v {
            JsonF64::Num(x) => x,
            JsonF64::Text(SpecialF64::Nan) => f64::NAN,
            JsonF64::Text(SpecialF64::Inf) => f64::INFINITY,
            JsonF64::Text(SpecialF64::NegInf) => f64::NEG_INFINITY,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRow {
    iter: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<Vec<JsonF64>>,
    f_value: JsonF64,
    f_gap: Option<JsonF64>,
    dist_to_opt: Option<JsonF64>,
    grad_norm: Option<JsonF64>,
    step_size: JsonF64,
    oracle_calls: u64,
    dist_from_start: JsonF64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTrace {
    status: String,
    rows: Vec<JsonRow>,
}

pub fn trace_to_json(trace: &Trace64) -> Result<Vec<u8>> {
    let doc = JsonTrace {
        status: trace.status.as_str().to_string(),
        rows: trace
            .rows
            .iter()
            .map(|r| JsonRow {
                iter: r.iter,
                x: r.x.as_ref().map(|x| x.iter().map(|&v| v.into()).collect()),
                f_value: r.f_value.into(),
                f_gap: r.f_gap.map(Into::into),
                dist_to_opt: r.dist_to_opt.map(Into::into),
                grad_norm: r.grad_norm.map(Into::into),
                step_size: r.step_size.into(),
                oracle_calls: r.oracle_calls,
                dist_from_start: r.dist_from_start.into(),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| BenchError::Format(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn trace_from_json(text: &str) -> Result<Trace64> {
    let doc: JsonTrace = serde_json::from_str(text).map_err(|e| BenchError::Format(e.to_string()))?;
    let status = Status::parse(&doc.status)
        .ok_or_else(|| BenchError::Format(format!("unknown status `{}`", doc.status)))?;
    let rows = doc
        .rows
        .into_iter()
        .map(|r| TraceRow {
            iter: r.iter,
            x: r.x.map(|v| Vector64::from_f64(&v.into_iter().map(f64::from).collect::<Vec<_>>())),
            f_value: r.f_value.into(),
            f_gap: r.f_gap.map(Into::into),
            dist_to_opt: r.dist_to_opt.map(Into::into),
            grad_norm: r.grad_norm.map(Into::into),
            step_size: r.step_size.into(),
            oracle_calls: r.oracle_calls,
            dist_from_start: r.dist_from_start.into(),
        })
        .collect();
    Ok(optlab::Trace { rows, status })
}

/// Writes atomically: a temporary file in the target directory is renamed over `path`.
pub fn write_trace(trace: &Trace64, path: &Path, format: Option<TraceFormat>) -> Result<()> {
    let bytes = match format.unwrap_or_else(|| TraceFormat::from_path(path)) {
        TraceFormat::Csv => trace_to_csv(trace)?,
        TraceFormat::Json => trace_to_json(trace)?,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(&bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    log::debug!("wrote {} rows to {}", trace.rows.len(), path.display());
    Ok(())
}

pub fn read_trace(path: &Path, format: Option<TraceFormat>) -> Result<Trace64> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    match format.unwrap_or_else(|| TraceFormat::from_path(path)) {
        TraceFormat::Csv => trace_from_csv(&text),
        TraceFormat::Json => trace_from_json(&text),
    }
}
