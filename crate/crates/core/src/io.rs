//! File formats shared by the CLI, the exhaustive search and the solver:
//! front CSV, path-set JSON and metadata JSON, plus their readers.
//!
//! A front is stored as `<basename>.front.csv` with header `f1,f2,f3,f4,f5`
//! and one objective vector per row, the companion `<basename>.set.json`
//! holds one node-id array per CSV row (same order), and
//! `<basename>.meta.json` records provenance. Objective values are written
//! with 17 significant digits so re-importing reproduces the exact doubles.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeId;
use crate::pareto::ParetoArchive;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Format { path: path.to_path_buf(), message: message.into() }
}

/// Formats one objective value for CSV output: round-trip exact and at
/// least 12 significant digits.
pub fn format_objective(value: f64) -> String {
    format!("{value:.16e}")
}

/// Renders a front as CSV text, header `f1,..,f5`, rows in the given order.
pub fn front_csv(rows: &[Vec<f64>]) -> String {
    let mut text = String::from("f1,f2,f3,f4,f5\n");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| format_objective(v)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text
}

/// Parses a front CSV produced by [`front_csv`] (any column count works as
/// long as the header matches the rows).
pub fn read_front_csv(path: &Path) -> Result<Vec<Vec<f64>>, IoError> {
    let text = fs::read_to_string(path).map_err(file_err(path))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| format_err(path, "empty front file"))?;
    let dim = header.split(',').count();
    let mut rows = Vec::new();
    for (number, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| cell.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format_err(path, format!("row {}: {e}", number + 2)))?;
        if row.len() != dim {
            return Err(format_err(path, format!("row {} has {} columns, expected {dim}", number + 2, row.len())));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Renders the path set aligned with a front CSV: a JSON list of node-id
/// arrays.
pub fn path_set_json(paths: &[Vec<NodeId>]) -> String {
    let raw: Vec<Vec<u32>> = paths
        .iter()
        .map(|p| p.iter().map(|n| n.0).collect())
        .collect();
    serde_json::to_string(&raw).expect("path set serialization cannot fail")
}

pub fn read_path_set_json(path: &Path) -> Result<Vec<Vec<NodeId>>, IoError> {
    let text = fs::read_to_string(path).map_err(file_err(path))?;
    let raw: Vec<Vec<u32>> =
        serde_json::from_str(&text).map_err(|e| format_err(path, e.to_string()))?;
    Ok(raw
        .into_iter()
        .map(|p| p.into_iter().map(NodeId).collect())
        .collect())
}

/// Provenance attached to an exported front.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FrontMeta {
    /// Canonical instance name or graph file label.
    pub instance: String,
    /// Complete paths visited by the sweep, decimal (can exceed u64).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths_visited: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub aborted: bool,
    /// Solver evaluations, present on solver exports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<u64>,
}

/// Writes `<basename>.front.csv`, `<basename>.set.json` and
/// `<basename>.meta.json` for an archive, rows sorted lexicographically by
/// objective vector so identical archives always serialize identically.
pub fn export_front(
    archive: &ParetoArchive<Vec<NodeId>>,
    meta: &FrontMeta,
    basename: &Path,
) -> Result<(), IoError> {
    let order = archive.sorted_indices();
    let rows: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| archive.objectives_at(i).to_vec())
        .collect();
    let paths: Vec<Vec<NodeId>> = order.iter().map(|&i| archive.payload_at(i).clone()).collect();

    if let Some(dir) = basename.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(file_err(dir))?;
        }
    }
    write_text(&with_suffix(basename, ".front.csv"), &front_csv(&rows))?;
    write_text(&with_suffix(basename, ".set.json"), &path_set_json(&paths))?;
    let meta_text =
        serde_json::to_string_pretty(meta).expect("meta serialization cannot fail");
    write_text(&with_suffix(basename, ".meta.json"), &format!("{meta_text}\n"))?;
    Ok(())
}

/// Reads a front exported by [`export_front`] back into an archive.
pub fn import_front(basename: &Path) -> Result<ParetoArchive<Vec<NodeId>>, IoError> {
    let front_path = with_suffix(basename, ".front.csv");
    let rows = read_front_csv(&front_path)?;
    let paths = read_path_set_json(&with_suffix(basename, ".set.json"))?;
    if rows.len() != paths.len() {
        return Err(format_err(
            &front_path,
            format!("front has {} rows but the path set has {}", rows.len(), paths.len()),
        ));
    }
    let mut archive = ParetoArchive::new();
    for (row, path) in rows.into_iter().zip(paths) {
        archive.insert(row, path);
    }
    Ok(archive)
}

pub fn with_suffix(basename: &Path, suffix: &str) -> PathBuf {
    let mut name = basename.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let mut file = fs::File::create(path).map_err(file_err(path))?;
    file.write_all(text.as_bytes()).map_err(file_err(path))?;
    Ok(())
}
