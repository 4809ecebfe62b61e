//! Result rows and their CSV/JSON encodings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::OutputFormat;

pub const CSV_HEADER: &str = "experiment,condition,repetition,metric,value,n,sd";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("no rows to write")]
    EmptyInput,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: malformed results: {message}", path.display())]
    Malformed { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub experiment: String,
    pub condition: String,
    pub repetition: u32,
    pub metric: String,
    pub value: f64,
    pub n: usize,
    pub sd: f64,
}

fn fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    // Keep "-0.000000" out of the output.
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn rounded(v: f64) -> f64 {
    fixed(v).parse().unwrap_or(v)
}

/// Encodes rows in `format`. The bytes depend only on the rows.
pub fn encode_rows(rows: &[OutputRow], format: OutputFormat) -> Result<Vec<u8>, OutputError> {
    if rows.is_empty() {
        return Err(OutputError::EmptyInput);
    }
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .has_headers(false)
                .from_writer(Vec::new());
            let header: Vec<&str> = CSV_HEADER.split(',').collect();
            let encode = |e: csv::Error| OutputError::Malformed {
                path: PathBuf::new(),
                message: e.to_string(),
            };
            w.write_record(&header).map_err(encode)?;
            for r in rows {
                w.write_record([
                    r.experiment.as_str(),
                    r.condition.as_str(),
                    &r.repetition.to_string(),
                    r.metric.as_str(),
                    &fixed(r.value),
                    &r.n.to_string(),
                    &fixed(r.sd),
                ])
                .map_err(encode)?;
            }
            w.into_inner().map_err(|e| OutputError::Malformed {
                path: PathBuf::new(),
                message: e.to_string(),
            })
        }
        OutputFormat::Json => {
            let rounded_rows: Vec<OutputRow> = rows
                .iter()
                .map(|r| OutputRow {
                    value: rounded(r.value),
                    sd: rounded(r.sd),
                    ..r.clone()
                })
                .collect();
            let mut bytes =
                serde_json::to_vec_pretty(&rounded_rows).map_err(|e| OutputError::Malformed {
                    path: PathBuf::new(),
                    message: e.to_string(),
                })?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes rows to `path` via a temporary file in the same directory, so
/// readers never see a partial file.
pub fn write_results(
    rows: &[OutputRow],
    path: &Path,
    format: OutputFormat,
) -> Result<(), OutputError> {
    let bytes = encode_rows(rows, format)?;
    let io_err = |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    tmp.write_all(&bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Reads rows written by [`write_results`].
pub fn read_results(path: &Path, format: OutputFormat) -> Result<Vec<OutputRow>, OutputError> {
    let bytes = fs::read(path).map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let malformed = |message: String| OutputError::Malformed {
        path: path.to_path_buf(),
        message,
    };
    match format {
        OutputFormat::Csv => csv::Reader::from_reader(bytes.as_slice())
            .deserialize()
            .collect::<Result<Vec<OutputRow>, _>>()
            .map_err(|e| malformed(e.to_string())),
        OutputFormat::Json => serde_json::from_slice(&bytes).map_err(|e| malformed(e.to_string())),
    }
}
