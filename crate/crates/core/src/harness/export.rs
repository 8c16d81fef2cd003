//! Writing sweep reports to disk.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::sweep::{ExperimentReport, SweepConfig};
use crate::error::{Error, Result};

/// SHA-256 of the compact JSON form of the configuration, hex encoded.
pub fn config_hash(cfg: &SweepConfig) -> Result<String> {
    let bytes = serde_json::to_vec(cfg)?;
    Ok(hex(&Sha256::digest(&bytes)))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct CsvRow {
    m: u32,
    eps: f64,
    #[serde(rename = "sup_R_B012")]
    sup_r: f64,
    #[serde(rename = "L2_gradh_R")]
    gradh_r: f64,
    uapp_Linf: f64,
    uapp_L2_B112: f64,
    d3uapp_L1_B112: f64,
    K_partition: usize,
}

/// Writes `sweep.csv` (one row per ε) and `report.json` (rows, slope
/// summary, config, hash and seed) into `dir`, creating it if needed.
/// Returns the two paths.
pub fn export_report(report: &ExperimentReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    if report.rows.is_empty() {
        return Err(Error::Empty("experiment report has no rows"));
    }
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("sweep.csv");
    let json_path = dir.join("report.json");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for r in &report.rows {
        w.serialize(CsvRow {
            m: r.m,
            eps: r.eps,
            sup_r: r.sup_r_b0_half,
            gradh_r: r.l2_gradh_r,
            uapp_Linf: r.uapp.linf_b0_half,
            uapp_L2_B112: r.uapp.l2_b1_half,
            d3uapp_L1_B112: r.uapp.d3_l1_b1_half,
            K_partition: r.partition.k(),
        })?;
    }
    w.flush()?;
    fs::write(&json_path, serde_json::to_string_pretty(report)?)?;
    Ok((csv_path, json_path))
}
