//! Pipeline orchestration: generate augmented test sets, evaluate
//! submission masks against ground truth, run the sensitivity analysis, and
//! emit leaderboards and reports.
//!
//! Everything is deterministic in the configured seed: parallel work is
//! collected and sorted before any aggregation or serialization, so reports
//! are byte-identical regardless of worker count.

mod augment_cmd;
mod evaluate_cmd;
mod leaderboard_cmd;
mod meshqc_cmd;
mod report;
mod sensitivity_cmd;
mod svg;

pub use augment_cmd::{run_augment, AugmentSummary};
pub use evaluate_cmd::{run_evaluate, EvaluateSummary};
pub use leaderboard_cmd::{run_leaderboard, LeaderboardSummary};
pub use meshqc_cmd::{run_meshqc, MeshQcSummary};
pub use report::{
    CaseRecord, EvaluationReport, LeaderboardReport, MeshQcReport, SensitivityReport,
    SCHEMA_VERSION,
};
pub use sensitivity_cmd::{run_sensitivity, SensitivitySummary};

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Names of the four augmentation factors, in design-column order.
pub const FACTOR_NAMES: [&str; 4] = ["alpha", "d", "beta", "sigma"];

/// Shared configuration for the pipeline commands.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationConfig {
    /// Base cases for `augment`; ground-truth masks for `evaluate`.
    pub ground_truth_dir: PathBuf,
    /// One subdirectory per team.
    pub submissions_dir: PathBuf,
    /// Where reports and generated data are written.
    pub output_dir: PathBuf,
    /// Saltelli base sample count N; the design has N·(M+2) rows.
    pub n_base: usize,
    pub seed: u64,
    /// Worker threads; None lets the runtime decide.
    pub thread_count: Option<usize>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            ground_truth_dir: PathBuf::from("."),
            submissions_dir: PathBuf::from("."),
            output_dir: PathBuf::from("."),
            n_base: 25,
            seed: 0,
            thread_count: None,
        }
    }
}

impl EvaluationConfig {
    /// Parse a `key = value` config file (`#` starts a comment).
    /// Unknown keys are rejected.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::DomainError(format!("config line {}: expected key = value", lineno + 1))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Set one configuration key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::DomainError(format!("config key {key}: bad {what} `{value}`"));
        match key {
            "ground_truth_dir" => self.ground_truth_dir = PathBuf::from(value),
            "submissions_dir" => self.submissions_dir = PathBuf::from(value),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "n_base" => self.n_base = value.parse().map_err(|_| bad("integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("integer"))?,
            "threads" => {
                self.thread_count = Some(value.parse().map_err(|_| bad("integer"))?);
            }
            _ => {
                return Err(Error::DomainError(format!("unknown config key `{key}`")));
            }
        }
        Ok(())
    }

    /// Run `f` under this config's thread count (scoped pool when set).
    pub fn with_threads<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.thread_count {
            None => f(),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool")
                .install(f),
        }
    }
}

/// Case ids found in a directory: every `<case>.seg.nrrd`, sorted; a
/// `cases.txt` manifest (one id per line) overrides discovery.
pub fn discover_cases(dir: &Path) -> Result<Vec<String>> {
    let manifest = dir.join("cases.txt");
    if manifest.is_file() {
        let text = std::fs::read_to_string(&manifest)?;
        let mut cases: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect();
        cases.sort();
        return Ok(cases);
    }
    let mut cases = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(stem) = name.strip_suffix(".seg.nrrd") {
            cases.push(stem.to_string());
        }
    }
    cases.sort();
    Ok(cases)
}

/// Team ids: the sorted subdirectory names of the submissions directory.
pub fn discover_teams(dir: &Path) -> Result<Vec<String>> {
    let mut teams = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            teams.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    teams.sort();
    Ok(teams)
}

/// FNV-1a over a string, for mixing case ids into noise seeds.
pub(crate) fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

pub(crate) fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

/// Noise seed for one (case, design row): a stable mix of the run seed, the
/// case id, and the row index.
pub(crate) fn noise_seed_for(seed: u64, case_id: &str, row: usize) -> u64 {
    mix64(mix64(seed ^ fnv1a(case_id)) ^ row as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# pipeline settings\nground_truth_dir = /data/gt\nn_base = 8\nseed = 41\nthreads = 2\n",
        )
        .unwrap();
        let config = EvaluationConfig::from_file(&path).unwrap();
        assert_eq!(config.ground_truth_dir, PathBuf::from("/data/gt"));
        assert_eq!(config.n_base, 8);
        assert_eq!(config.seed, 41);
        assert_eq!(config.thread_count, Some(2));
    }

    #[test]
    fn unknown_config_key_rejected() {
        let mut config = EvaluationConfig::default();
        assert!(config.set("n_bass", "8").is_err());
    }

    #[test]
    fn malformed_config_line_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, "seed 41\n").unwrap();
        assert!(EvaluationConfig::from_file(&path).is_err());
    }

    #[test]
    fn cases_manifest_overrides_discovery() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("x.seg.nrrd"), "").unwrap();
        std::fs::write(dir.path().join("y.seg.nrrd"), "").unwrap();
        std::fs::write(dir.path().join("cases.txt"), "# picked\ny\n").unwrap();
        assert_eq!(discover_cases(dir.path()).unwrap(), vec!["y".to_string()]);
    }

    #[test]
    fn noise_seed_is_stable_and_distinct() {
        let a = noise_seed_for(1, "case01", 0);
        assert_eq!(a, noise_seed_for(1, "case01", 0));
        assert_ne!(a, noise_seed_for(1, "case01", 1));
        assert_ne!(a, noise_seed_for(1, "case02", 0));
        assert_ne!(a, noise_seed_for(2, "case01", 0));
    }
}
