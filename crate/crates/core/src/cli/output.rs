//! Trajectory files and verification reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::DriftReport;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckedReport {
    pub quantity: String,
    pub initial: f64,
    pub max_abs_dev: f64,
    pub rel_dev: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckedReport {
    /// Compares `rel_dev` (when `relative`) or `max_abs_dev` with `threshold`, unless `overrides`
    /// names the quantity.
    pub fn check(report: DriftReport, threshold: f64, relative: bool, overrides: &BTreeMap<String, f64>) -> Self {
        let threshold = overrides.get(&report.quantity).copied().unwrap_or(threshold);
        let measured = if relative { report.rel_dev } else { report.max_abs_dev };
        Self {
            pass: measured <= threshold,
            quantity: report.quantity,
            initial: report.initial,
            max_abs_dev: report.max_abs_dev,
            rel_dev: report.rel_dev,
            threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub command: String,
    pub experiment: String,
    pub system: String,
    pub epsilon: Option<f64>,
    pub config_sha256: String,
    pub versions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub metadata: Metadata,
    pub reports: Vec<CheckedReport>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([(env!("CARGO_PKG_NAME").to_string(), env!("CARGO_PKG_VERSION").to_string())])
}

fn header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|i| format!("q_{i}")));
    h.extend((1..=n).map(|i| format!("qdot_{i}")));
    h
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header row and 17 significant digits per value.
pub fn trajectory_csv(traj: &Trajectory) -> std::io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(traj.dim()))?;
    for k in 0..traj.len() {
        let mut row = vec![sci(traj.times()[k])];
        row.extend(traj.positions()[k].iter().map(|v| sci(*v)));
        row.extend(traj.velocities()[k].iter().map(|v| sci(*v)));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    columns: Vec<String>,
    t: &'a [f64],
    q: Vec<&'a [f64]>,
    qdot: Vec<&'a [f64]>,
}

pub fn trajectory_json(traj: &Trajectory) -> serde_json::Result<Vec<u8>> {
    serde_json::to_vec_pretty(&TrajectoryJson {
        columns: header(traj.dim()),
        t: traj.times(),
        q: traj.positions().iter().map(|v| v.as_slice()).collect(),
        qdot: traj.velocities().iter().map(|v| v.as_slice()).collect(),
    })
}

/// Writes `<stem>.csv` or `<stem>.json` into `dir`.
pub fn write_trajectory(dir: &Path, stem: &str, traj: &Trajectory, format: Format) -> std::io::Result<()> {
    let (bytes, ext) = match format {
        Format::Csv => (trajectory_csv(traj)?, "csv"),
        Format::Json => (trajectory_json(traj).map_err(std::io::Error::other)?, "json"),
    };
    fs::write(dir.join(format!("{stem}.{ext}")), bytes)
}

pub fn write_report(dir: &Path, stem: &str, report: &ReportFile) -> std::io::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(report).map_err(std::io::Error::other)?;
    bytes.push(b'\n');
    fs::write(dir.join(format!("{stem}.report.json")), bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn tiny() -> Trajectory {
        let p = |x: f64, y: f64| DVector::from_column_slice(&[x, y]);
        Trajectory::from_nodes(
            vec![0.0, 0.1],
            vec![p(1.0, 0.0), p(0.1f64.cos(), 0.1f64.sin())],
            vec![p(0.0, 1.0), p(-(0.1f64.sin()), 0.1f64.cos())],
            vec![p(-1.0, 0.0), p(-(0.1f64.cos()), -(0.1f64.sin()))],
            true,
        )
        .unwrap()
    }

    #[test]
    fn csv_has_header_and_round_trips_exactly() {
        let traj = tiny();
        let text = String::from_utf8(trajectory_csv(&traj).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,q_1,q_2,qdot_1,qdot_2");
        let row: Vec<f64> = lines.nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row[0], 0.1);
        assert_eq!(row[1], 0.1f64.cos());
        assert_eq!(row[4], 0.1f64.cos());
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn json_trajectory_shape() {
        let v: serde_json::Value = serde_json::from_slice(&trajectory_json(&tiny()).unwrap()).unwrap();
        assert_eq!(v["t"].as_array().unwrap().len(), 2);
        assert_eq!(v["q"][1][0].as_f64().unwrap(), 0.1f64.cos());
    }

    #[test]
    fn check_uses_relative_or_absolute_and_overrides() {
        let r = DriftReport::from_values("e", [2.0, 2.0 + 1e-9]);
        assert!(CheckedReport::check(r.clone(), 1e-9, true, &BTreeMap::new()).pass);
        assert!(!CheckedReport::check(r.clone(), 1e-9 / 4.0, false, &BTreeMap::new()).pass);
        let over = BTreeMap::from([("e".to_string(), 1e-12)]);
        let c = CheckedReport::check(r, 1.0, true, &over);
        assert_eq!(c.threshold, 1e-12);
        assert!(!c.pass);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
