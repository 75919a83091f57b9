//! `evaluate`: score every (team, case) pair against the ground-truth
//! masks and write the per-case metric report.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::report::{CaseRecord, EvaluationReport, SCHEMA_VERSION};
use crate::harness::{discover_cases, discover_teams, EvaluationConfig};
use crate::metrics::{evaluate_pair, DegenerateFlag};
use crate::nrrd::read_mask;

#[derive(Debug, Clone)]
pub struct EvaluateSummary {
    pub report: EvaluationReport,
    pub teams: Vec<String>,
    pub cases: Vec<String>,
    /// (team, case) pairs that failed outright.
    pub failures: usize,
}

/// Evaluate all teams in `submissions_dir` against the `<case>.seg.nrrd`
/// masks in `ground_truth_dir`. A missing prediction counts as an empty
/// (null) output and takes the penalized metric path; unreadable files and
/// geometry mismatches become per-case error records. One bad case never
/// aborts the rest.
///
/// Team runtimes are declared inputs (`runtime_s.txt` in the team
/// directory, a single number): the harness scores already-produced masks,
/// so there is no algorithm execution to time. Absent files read as 0.
pub fn run_evaluate(config: &EvaluationConfig) -> Result<EvaluateSummary> {
    let cases = discover_cases(&config.ground_truth_dir)?;
    if cases.is_empty() {
        return Err(Error::DomainError(format!(
            "no ground-truth masks (`<case>.seg.nrrd`) in {}",
            config.ground_truth_dir.display()
        )));
    }
    let teams = discover_teams(&config.submissions_dir)?;
    if teams.is_empty() {
        return Err(Error::EmptyField);
    }
    std::fs::create_dir_all(&config.output_dir)?;

    let runtimes: Vec<f64> = teams
        .iter()
        .map(|team| read_runtime(&config.submissions_dir.join(team)))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..teams.len())
        .flat_map(|t| (0..cases.len()).map(move |c| (t, c)))
        .collect();

    let mut records: Vec<CaseRecord> = config.with_threads(|| {
        jobs.par_iter()
            .map(|&(t, c)| evaluate_one(config, &teams[t], &cases[c], runtimes[t]))
            .collect()
    });
    // deterministic report order regardless of scheduling
    records.sort_by(|a, b| a.team.cmp(&b.team).then(a.case.cmp(&b.case)));

    let failures = records.iter().filter(|r| r.error.is_some()).count();
    let report = EvaluationReport {
        schema_version: SCHEMA_VERSION,
        records,
    };
    report.write_csv(&config.output_dir.join("evaluation.csv"))?;
    report.write_json(&config.output_dir.join("evaluation.json"))?;

    Ok(EvaluateSummary {
        report,
        teams,
        cases,
        failures,
    })
}

fn evaluate_one(config: &EvaluationConfig, team: &str, case: &str, runtime: f64) -> CaseRecord {
    let mut record = CaseRecord {
        team: team.to_string(),
        case: case.to_string(),
        dsc: None,
        hd_mm: None,
        volume_ml_pred: None,
        volume_ml_gt: None,
        degenerate_flag: DegenerateFlag::None.as_str().to_string(),
        wall_time_s: runtime,
        error: None,
    };
    match score_pair(config, team, case) {
        Ok(result) => {
            record.dsc = Some(result.dsc);
            record.hd_mm = Some(result.hd_mm);
            record.volume_ml_pred = Some(result.volume_ml_pred);
            record.volume_ml_gt = Some(result.volume_ml_gt);
            record.degenerate_flag = result.degenerate_flag.as_str().to_string();
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

fn score_pair(
    config: &EvaluationConfig,
    team: &str,
    case: &str,
) -> Result<crate::metrics::MetricResult> {
    let gt = read_mask(&config.ground_truth_dir.join(format!("{case}.seg.nrrd")))?;
    let pred = match prediction_path(&config.submissions_dir.join(team), case) {
        Some(path) => read_mask(&path)?,
        None => {
            // missing prediction = null output: empty mask on the gt grid
            crate::grid::LabelMask::new(gt.geometry().clone(), vec![0; gt.values().len()])?
        }
    };
    evaluate_pair(&pred, &gt)
}

/// Filename-stem matching: `<case>.seg.nrrd` preferred, `<case>.nrrd`
/// accepted.
fn prediction_path(team_dir: &Path, case: &str) -> Option<PathBuf> {
    for name in [format!("{case}.seg.nrrd"), format!("{case}.nrrd")] {
        let path = team_dir.join(name);
        if path.is_file() {
            return Some(path);
        }
    }
    None
}

fn read_runtime(team_dir: &Path) -> Result<f64> {
    let path = team_dir.join("runtime_s.txt");
    if !path.is_file() {
        return Ok(0.0);
    }
    let text = std::fs::read_to_string(&path)?;
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::CorruptFile(format!("{}: not a number", path.display())))?;
    if value.is_nan() || value <= 0.0 {
        return Err(Error::DomainError(format!(
            "{}: runtime must be positive",
            path.display()
        )));
    }
    Ok(value)
}
