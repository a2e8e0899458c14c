//! CSV tables, their readers, and the JSON run manifest.
//!
//! Numbers are written with the shortest text that parses back to the same
//! `f64`, so every table round-trips exactly through its reader.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const PROFILES_FILE: &str = "profiles.csv";
pub const SERIES_FILE: &str = "series.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const PROFILES_HEADER: [&str; 4] = ["time", "p", "observable", "value"];
pub const SERIES_HEADER: [&str; 4] = ["time", "site_or_bond", "observable", "value"];
pub const AGGREGATE_HEADER: [&str; 5] = ["gamma_or_mu", "xi", "j_star", "beta", "cc0"];

/// Shortest round-trip representation.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub time: f64,
    pub p: usize,
    pub observable: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub time: f64,
    pub index: usize,
    pub observable: String,
    pub value: f64,
}

/// One sweep point. Missing quantities are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub gamma_or_mu: f64,
    pub xi: f64,
    pub j_star: f64,
    pub beta: f64,
    pub cc0: f64,
}

impl AggregateRow {
    /// Compares bit patterns so NaN gaps count as equal.
    pub fn same_bits(&self, other: &Self) -> bool {
        let a = [self.gamma_or_mu, self.xi, self.j_star, self.beta, self.cc0];
        let b = [other.gamma_or_mu, other.xi, other.j_star, other.beta, other.cc0];
        a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
    }
}

fn writer(path: &Path) -> io::Result<csv::Writer<fs::File>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(fs::File::create(path)?))
}

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn write_profiles(path: &Path, rows: &[ProfileRow]) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record(PROFILES_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            format_f64(r.time),
            r.p.to_string(),
            r.observable.clone(),
            format_f64(r.value),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_series(path: &Path, rows: &[SeriesRow]) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record(SERIES_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            format_f64(r.time),
            r.index.to_string(),
            r.observable.clone(),
            format_f64(r.value),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record(AGGREGATE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.gamma_or_mu, r.xi, r.j_star, r.beta, r.cc0].map(format_f64))
            .map_err(csv_err)?;
    }
    w.flush()
}

fn records(path: &Path, header: &[&str]) -> io::Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let found = r.headers().map_err(csv_err)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{}: unexpected header {found:?}", path.display()),
        ));
    }
    r.records().collect::<Result<_, _>>().map_err(csv_err)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> io::Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, format!("bad field {i} in {rec:?}")))
}

pub fn read_profiles(path: &Path) -> io::Result<Vec<ProfileRow>> {
    records(path, &PROFILES_HEADER)?
        .iter()
        .map(|r| {
            Ok(ProfileRow {
                time: field(r, 0)?,
                p: field(r, 1)?,
                observable: field(r, 2)?,
                value: field(r, 3)?,
            })
        })
        .collect()
}

pub fn read_series(path: &Path) -> io::Result<Vec<SeriesRow>> {
    records(path, &SERIES_HEADER)?
        .iter()
        .map(|r| {
            Ok(SeriesRow {
                time: field(r, 0)?,
                index: field(r, 1)?,
                observable: field(r, 2)?,
                value: field(r, 3)?,
            })
        })
        .collect()
}

pub fn read_aggregate(path: &Path) -> io::Result<Vec<AggregateRow>> {
    records(path, &AGGREGATE_HEADER)?
        .iter()
        .map(|r| {
            Ok(AggregateRow {
                gamma_or_mu: field(r, 0)?,
                xi: field(r, 1)?,
                j_star: field(r, 2)?,
                beta: field(r, 3)?,
                cc0: field(r, 4)?,
            })
        })
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub value: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub mode: String,
    /// SHA-256 of the configuration file bytes; absent when run without one.
    pub config_digest: Option<String>,
    pub threads: usize,
    pub wall_seconds: f64,
    pub files: Vec<FileEntry>,
    pub failures: Vec<PointFailure>,
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn new(mode: &str, config_digest: Option<String>, threads: usize) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            mode: mode.to_string(),
            config_digest,
            threads,
            wall_seconds: 0.0,
            files: Vec::new(),
            failures: Vec::new(),
            summary: serde_json::Value::Null,
        }
    }

    /// Hashes `root/relative` and lists it.
    pub fn record(&mut self, root: &Path, relative: impl Into<PathBuf>) -> io::Result<()> {
        let relative = relative.into();
        let bytes = fs::read(root.join(&relative))?;
        self.files.push(FileEntry {
            path: relative.to_string_lossy().replace('\\', "/"),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join(MANIFEST_FILE), text + "\n")
    }

    pub fn read(dir: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}
