//! Report schemas. JSON reports carry `schema_version`; the CSV column
//! orders are part of the external contract and never reordered.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// One (team, case) metric evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRecord {
    pub team: String,
    pub case: String,
    pub dsc: Option<f64>,
    pub hd_mm: Option<f64>,
    pub volume_ml_pred: Option<f64>,
    pub volume_ml_gt: Option<f64>,
    /// "none", "empty_prediction", or "empty_reference".
    pub degenerate_flag: String,
    pub wall_time_s: f64,
    /// Set when the case failed outright (unreadable file, geometry
    /// mismatch); metric fields are then absent.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub records: Vec<CaseRecord>,
}

impl EvaluationReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "team",
            "case",
            "dsc",
            "hd_mm",
            "volume_ml_pred",
            "volume_ml_gt",
            "degenerate_flag",
            "wall_time_s",
            "error",
        ])?;
        for r in &self.records {
            w.write_record([
                r.team.clone(),
                r.case.clone(),
                opt_num(r.dsc),
                opt_num(r.hd_mm),
                opt_num(r.volume_ml_pred),
                opt_num(r.volume_ml_gt),
                r.degenerate_flag.clone(),
                num(r.wall_time_s),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sobol' indices of one output (DSC or HD) for one team.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputIndices {
    pub output: String,
    pub degenerate: bool,
    pub factors: Vec<FactorIndices>,
    pub p_var: f64,
    pub p_inter: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorIndices {
    pub factor: String,
    pub s1: f64,
    pub st: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TeamSensitivity {
    pub team: String,
    pub outputs: Vec<OutputIndices>,
    /// Mean of the DSC- and HD-derived values; the ranking input.
    pub p_var: f64,
    pub p_inter: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub schema_version: u32,
    pub n_base: usize,
    pub m_factors: usize,
    pub seed: u64,
    pub teams: Vec<TeamSensitivity>,
}

impl SensitivityReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

/// Leaderboard entry as serialized; rank fields are absent for NR teams.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub team: String,
    pub p_dsc: Option<f64>,
    pub r_dsc: Option<f64>,
    pub p_hd: Option<f64>,
    pub r_hd: Option<f64>,
    pub p_var: Option<f64>,
    pub r_var: Option<f64>,
    pub p_inter: Option<f64>,
    pub r_inter: Option<f64>,
    pub p_fin: Option<f64>,
    pub r_fin: usize,
    pub nr: bool,
    pub mean_runtime_s: f64,
    pub dsc_values: Vec<f64>,
    pub hd_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeaderboardReport {
    pub schema_version: u32,
    pub entries: Vec<LeaderboardRow>,
}

impl LeaderboardReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "team", "p_dsc", "r_dsc", "p_hd", "r_hd", "p_var", "r_var", "p_inter", "r_inter",
            "p_fin", "r_fin",
        ])?;
        for r in &self.entries {
            // NR columns print "NR", mirroring the published tables
            let rank = |v: Option<f64>| if r.nr { "NR".to_string() } else { opt_num(v) };
            w.write_record([
                r.team.clone(),
                opt_num(r.p_dsc),
                rank(r.r_dsc),
                opt_num(r.p_hd),
                rank(r.r_hd),
                opt_num(r.p_var),
                rank(r.r_var),
                opt_num(r.p_inter),
                rank(r.r_inter),
                opt_num(r.p_fin),
                r.r_fin.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Per-mesh quality block of the subtask report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshCaseReport {
    pub case: String,
    pub median: f64,
    pub variance: f64,
    pub skewness: f64,
    pub invalid_count: usize,
    pub element_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshTeamReport {
    pub team: String,
    pub nr: bool,
    pub error: Option<String>,
    pub meshes: Vec<MeshCaseReport>,
    /// Statistics over all elements the team submitted.
    pub median: Option<f64>,
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
    /// Invalid elements averaged across the team's meshes.
    pub invalid_avg: Option<f64>,
    pub p_j: Option<f64>,
    pub r_j: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshQcReport {
    pub schema_version: u32,
    pub teams: Vec<MeshTeamReport>,
}

impl MeshQcReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "team",
            "median_sj",
            "variance_sj",
            "skewness_sj",
            "invalid_avg",
            "p_j",
            "r_j",
        ])?;
        for t in &self.teams {
            w.write_record([
                t.team.clone(),
                opt_num(t.median),
                opt_num(t.variance),
                opt_num(t.skewness),
                opt_num(t.invalid_avg),
                opt_num(t.p_j),
                t.r_j.map(|r| r.to_string()).unwrap_or_else(|| "NR".into()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::DomainError(format!("serialize {}: {e}", path.display())))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::CorruptFile(format!("{}: {e}", path.display())))
}
