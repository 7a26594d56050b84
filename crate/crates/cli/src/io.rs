//! Chain and landmark file formats, and atomic output writes.
//!
//! Chains are CSV (`x,y` per row, optional header) or JSON (an array of
//! `[x, y]` pairs). Landmark files are CSV with header `vertex,gamma`,
//! 1-based vertex numbers and 0/1 indicators.

use std::fs;
use std::path::{Path, PathBuf};

use lasa_core::{LandmarkIndicator, Point2, PolygonalChain};
use log::warn;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainFormat {
    Csv,
    Json,
}

impl ChainFormat {
    /// Format from the file extension; anything other than `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ChainFormat::Json,
            _ => ChainFormat::Csv,
        }
    }
}

/// A chain read from disk together with the clean-up notes emitted while
/// reading it.
#[derive(Debug, Clone)]
pub struct LoadedChain {
    pub path: PathBuf,
    pub chain: PolygonalChain,
    pub warnings: Vec<String>,
}

impl LoadedChain {
    pub fn stem(&self) -> String {
        file_stem(&self.path)
    }
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "chain".to_string())
}

pub fn read_chain(path: &Path) -> Result<LoadedChain> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let raw = match ChainFormat::from_path(path) {
        ChainFormat::Csv => parse_chain_csv(path, &text)?,
        ChainFormat::Json => parse_chain_json(path, &text)?,
    };
    let (vertices, warnings) = clean_vertices(raw);
    for w in &warnings {
        warn!("{}: {w}", path.display());
    }
    let chain = PolygonalChain::new(vertices).map_err(|e| CliError::data(path, e.to_string()))?;
    Ok(LoadedChain {
        path: path.to_path_buf(),
        chain,
        warnings,
    })
}

fn parse_chain_csv(path: &Path, text: &str) -> Result<Vec<Point2>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Parse {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.len() != 2 {
            return Err(err(format!("expected 2 columns, found {}", record.len())));
        }
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
        match (parsed[0], parsed[1]) {
            (Some(x), Some(y)) => {
                if !x.is_finite() || !y.is_finite() {
                    return Err(err("coordinates must be finite".to_string()));
                }
                out.push(Point2::new(x, y));
            }
            _ if idx == 0 && parsed.iter().all(Option::is_none) => {}
            _ => {
                return Err(err(format!(
                    "cannot parse coordinates {:?}",
                    record.iter().collect::<Vec<_>>()
                )))
            }
        }
    }
    Ok(out)
}

fn parse_chain_json(path: &Path, text: &str) -> Result<Vec<Point2>> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    if let Some(i) = pairs.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(CliError::data(path, format!("vertex {} is not finite", i + 1)));
    }
    Ok(pairs.into_iter().map(|[x, y]| Point2::new(x, y)).collect())
}

/// Drops consecutive repeats and closing copies of the first vertex.
pub fn clean_vertices(raw: Vec<Point2>) -> (Vec<Point2>, Vec<String>) {
    let mut warnings = Vec::new();
    let mut out: Vec<Point2> = Vec::with_capacity(raw.len());
    let mut repeats = 0;
    for v in raw {
        if out.last() == Some(&v) {
            repeats += 1;
        } else {
            out.push(v);
        }
    }
    if repeats > 0 {
        warnings.push(format!("dropped {repeats} consecutive duplicate vertices"));
    }
    let mut closing = 0;
    while out.len() > 1 && out.last() == out.first() {
        out.pop();
        closing += 1;
    }
    if closing > 0 {
        warnings.push("dropped closing vertex equal to the first vertex".to_string());
    }
    (out, warnings)
}

/// Reads a landmark file. With `expected = Some(m)` the file must cover
/// exactly vertices `1..=m`; otherwise its row count sets the length.
pub fn read_gamma(path: &Path, expected: Option<usize>) -> Result<LandmarkIndicator> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.len() != 2 {
            return Err(err(format!("expected 2 columns, found {}", record.len())));
        }
        let vertex: usize = record[0]
            .parse()
            .map_err(|_| err(format!("bad vertex number {:?}", &record[0])))?;
        let flag = match &record[1] {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("indicator must be 0 or 1, got {other:?}"))),
        };
        rows.push((line, vertex, flag));
    }
    let m = expected.unwrap_or(rows.len());
    let mut gamma: Vec<Option<bool>> = vec![None; m];
    for (line, vertex, flag) in rows {
        let err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if vertex == 0 || vertex > m {
            return Err(err(format!("vertex {vertex} outside 1..={m}")));
        }
        if gamma[vertex - 1].replace(flag).is_some() {
            return Err(err(format!("vertex {vertex} listed twice")));
        }
    }
    let missing = gamma.iter().filter(|g| g.is_none()).count();
    if missing > 0 {
        return Err(CliError::data(
            path,
            format!("{missing} of {m} vertices have no indicator"),
        ));
    }
    Ok(LandmarkIndicator::new(
        gamma.into_iter().map(Option::unwrap_or_default).collect(),
    ))
}

pub fn gamma_csv(gamma: &LandmarkIndicator) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["vertex", "gamma"]).map_err(internal)?;
    for (i, &g) in gamma.as_slice().iter().enumerate() {
        w.write_record([(i + 1).to_string(), u8::from(g).to_string()])
            .map_err(internal)?;
    }
    w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
}

pub fn chain_csv(chain: &PolygonalChain) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y"]).map_err(internal)?;
    for v in chain.vertices() {
        w.write_record([v.x.to_string(), v.y.to_string()]).map_err(internal)?;
    }
    w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
}

/// CSV table with `NA` for missing values.
pub fn table_csv(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(internal)?;
    for r in rows {
        w.write_record(r).map_err(internal)?;
    }
    w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
}

pub fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => x.to_string(),
        _ => "NA".to_string(),
    }
}

fn internal(e: csv::Error) -> CliError {
    CliError::Internal(e.to_string())
}

/// Writes through a sibling temporary file and renames it into place, so a
/// crash never leaves a truncated output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}
