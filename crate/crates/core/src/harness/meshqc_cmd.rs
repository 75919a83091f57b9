//! `meshqc`: score per-team tetrahedral meshes by scaled-Jacobian
//! statistics and rank them with the four-term weighted combination.

use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::report::{MeshCaseReport, MeshQcReport, MeshTeamReport, SCHEMA_VERSION};
use crate::harness::EvaluationConfig;
use crate::mesh::{read_tetmesh, tet_quality_report};
use crate::ranking::{p_jacobian, rank_values, robust_stats, Direction};

#[derive(Debug, Clone)]
pub struct MeshQcSummary {
    pub report: MeshQcReport,
    pub failures: usize,
}

/// Score every `<case>.node`/`<case>.ele` pair under each team directory.
/// Median/variance/skewness are computed over all elements a team
/// submitted; the invalid-element count is averaged across its meshes. An
/// unreadable mesh makes the team NR without stopping the others.
pub fn run_meshqc(config: &EvaluationConfig) -> Result<MeshQcSummary> {
    let teams = crate::harness::discover_teams(&config.submissions_dir)?;
    if teams.is_empty() {
        return Err(Error::EmptyField);
    }
    std::fs::create_dir_all(&config.output_dir)?;

    let mut team_reports: Vec<MeshTeamReport> = Vec::new();
    for team in &teams {
        team_reports.push(score_team(&config.submissions_dir.join(team), team));
    }

    let scored: Vec<usize> = (0..team_reports.len())
        .filter(|&i| !team_reports[i].nr)
        .collect();
    if !scored.is_empty() {
        let medians: Vec<f64> = scored.iter().map(|&i| team_reports[i].median.unwrap()).collect();
        let variances: Vec<f64> = scored
            .iter()
            .map(|&i| team_reports[i].variance.unwrap())
            .collect();
        let skews: Vec<f64> = scored
            .iter()
            .map(|&i| team_reports[i].skewness.unwrap().abs())
            .collect();
        let invalids: Vec<f64> = scored
            .iter()
            .map(|&i| team_reports[i].invalid_avg.unwrap())
            .collect();
        let r_m = rank_values(&medians, Direction::HigherBetter);
        let r_v = rank_values(&variances, Direction::LowerBetter);
        let r_s = rank_values(&skews, Direction::LowerBetter);
        let r_n = rank_values(&invalids, Direction::LowerBetter);
        let p_j: Vec<f64> = (0..scored.len())
            .map(|k| p_jacobian(r_m[k], r_v[k], r_s[k], r_n[k]))
            .collect();
        for (k, &i) in scored.iter().enumerate() {
            team_reports[i].p_j = Some(p_j[k]);
        }
    }

    // final order: ranked teams by score (ties by id), NR teams after
    team_reports.sort_by(|a, b| {
        a.nr.cmp(&b.nr)
            .then(match (a.p_j, b.p_j) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                _ => std::cmp::Ordering::Equal,
            })
            .then(a.team.cmp(&b.team))
    });
    let mut position = 0usize;
    for report in &mut team_reports {
        position += 1;
        if !report.nr {
            report.r_j = Some(position);
        } else {
            report.r_j = None;
        }
    }

    let failures = team_reports.iter().filter(|t| t.nr).count();
    let report = MeshQcReport {
        schema_version: SCHEMA_VERSION,
        teams: team_reports,
    };
    report.write_csv(&config.output_dir.join("meshqc.csv"))?;
    report.write_json(&config.output_dir.join("meshqc.json"))?;
    Ok(MeshQcSummary { report, failures })
}

fn score_team(team_dir: &Path, team: &str) -> MeshTeamReport {
    let mut report = MeshTeamReport {
        team: team.to_string(),
        nr: false,
        error: None,
        meshes: Vec::new(),
        median: None,
        variance: None,
        skewness: None,
        invalid_avg: None,
        p_j: None,
        r_j: None,
    };
    match score_team_inner(team_dir, &mut report) {
        Ok(()) => {}
        Err(e) => {
            report.nr = true;
            report.error = Some(e.to_string());
        }
    }
    report
}

fn score_team_inner(team_dir: &Path, report: &mut MeshTeamReport) -> Result<()> {
    let mut cases: Vec<String> = Vec::new();
    for entry in std::fs::read_dir(team_dir)? {
        let name = entry?.file_name();
        let name = name.to_string_lossy();
        if let Some(stem) = name.strip_suffix(".ele") {
            cases.push(stem.to_string());
        }
    }
    cases.sort();
    if cases.is_empty() {
        return Err(Error::DomainError(format!(
            "no .ele meshes in {}",
            team_dir.display()
        )));
    }

    let mut all_sj: Vec<f64> = Vec::new();
    let mut invalid_total = 0usize;
    for case in &cases {
        let mesh = read_tetmesh(
            &team_dir.join(format!("{case}.node")),
            &team_dir.join(format!("{case}.ele")),
        )?;
        let quality = tet_quality_report(&mesh)?;
        report.meshes.push(MeshCaseReport {
            case: case.clone(),
            median: quality.median,
            variance: quality.variance,
            skewness: quality.skewness,
            invalid_count: quality.invalid_count,
            element_count: quality.element_count,
        });
        invalid_total += quality.invalid_count;
        all_sj.extend(quality.scaled_jacobians);
    }

    let stats = robust_stats(&all_sj)?;
    report.median = Some(stats.median);
    report.variance = Some(stats.variance);
    report.skewness = Some(stats.skewness);
    report.invalid_avg = Some(invalid_total as f64 / cases.len() as f64);
    Ok(())
}
