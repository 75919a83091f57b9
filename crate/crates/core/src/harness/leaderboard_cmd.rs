//! `leaderboard`: merge the evaluation and sensitivity reports into the
//! final ranking, with CSV/JSON output and SVG summary plots.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harness::report::{
    EvaluationReport, LeaderboardReport, LeaderboardRow, SensitivityReport, SCHEMA_VERSION,
};
use crate::harness::{svg, EvaluationConfig};
use crate::ranking::{compute_leaderboard, RankingConfig, TeamRecord};

#[derive(Debug, Clone)]
pub struct LeaderboardSummary {
    pub report: LeaderboardReport,
}

/// Build the leaderboard from `evaluation.json` and `sensitivity.json` in
/// `output_dir`. A team is NR when any of its cases failed or produced a
/// null (degenerate) output; NR teams keep their scores where computable
/// but rank after every ranked team.
pub fn run_leaderboard(config: &EvaluationConfig) -> Result<LeaderboardSummary> {
    let evaluation = EvaluationReport::read_json(&config.output_dir.join("evaluation.json"))?;
    let sensitivity = SensitivityReport::read_json(&config.output_dir.join("sensitivity.json"))?;
    let report = leaderboard_from_reports(&evaluation, &sensitivity)?;

    report.write_csv(&config.output_dir.join("leaderboard.csv"))?;
    report.write_json(&config.output_dir.join("leaderboard.json"))?;
    svg::write_metric_histograms(
        &report,
        &config.output_dir.join("dsc_histograms.svg"),
        &config.output_dir.join("hd_histograms.svg"),
    )?;
    svg::write_sobol_chart(&sensitivity, &config.output_dir.join("sobol_indices.svg"))?;

    Ok(LeaderboardSummary { report })
}

pub(crate) fn leaderboard_from_reports(
    evaluation: &EvaluationReport,
    sensitivity: &SensitivityReport,
) -> Result<LeaderboardReport> {
    struct Gather {
        dsc: Vec<f64>,
        hd: Vec<f64>,
        runtimes: Vec<f64>,
        nr: bool,
    }
    let mut teams: BTreeMap<String, Gather> = BTreeMap::new();
    // records are case-sorted per team, so value arrays are deterministic
    for r in &evaluation.records {
        let g = teams.entry(r.team.clone()).or_insert(Gather {
            dsc: Vec::new(),
            hd: Vec::new(),
            runtimes: Vec::new(),
            nr: false,
        });
        g.runtimes.push(r.wall_time_s);
        if r.error.is_some() {
            g.nr = true;
            continue;
        }
        if r.degenerate_flag != "none" {
            g.nr = true; // null output: penalized values still recorded
        }
        if let (Some(dsc), Some(hd)) = (r.dsc, r.hd_mm) {
            g.dsc.push(dsc);
            g.hd.push(hd);
        }
    }
    if teams.is_empty() {
        return Err(Error::EmptyField);
    }

    let scores: BTreeMap<&str, (f64, f64)> = sensitivity
        .teams
        .iter()
        .map(|t| (t.team.as_str(), (t.p_var, t.p_inter)))
        .collect();

    let mut records = Vec::new();
    for (team, g) in &teams {
        let (p_var, p_inter) = scores.get(team.as_str()).copied().unwrap_or((f64::NAN, f64::NAN));
        let nr = g.nr || !scores.contains_key(team.as_str()) || g.dsc.is_empty();
        let mean_runtime_s = if g.runtimes.is_empty() {
            0.0
        } else {
            g.runtimes.iter().sum::<f64>() / g.runtimes.len() as f64
        };
        records.push(TeamRecord {
            team_id: team.clone(),
            dsc_values: g.dsc.clone(),
            hd_values: g.hd.clone(),
            p_var,
            p_inter,
            mean_runtime_s,
            nr_flag: nr,
        });
    }

    let board = compute_leaderboard(&records, RankingConfig::default())?;
    let by_team: BTreeMap<&str, &TeamRecord> =
        records.iter().map(|r| (r.team_id.as_str(), r)).collect();

    let entries = board
        .entries
        .iter()
        .map(|e| {
            let record = by_team[e.team_id.as_str()];
            LeaderboardRow {
                team: e.team_id.clone(),
                p_dsc: e.p_dsc,
                r_dsc: e.r_dsc,
                p_hd: e.p_hd,
                r_hd: e.r_hd,
                p_var: e.p_var.filter(|v| v.is_finite()),
                r_var: e.r_var,
                p_inter: e.p_inter.filter(|v| v.is_finite()),
                r_inter: e.r_inter,
                p_fin: e.p_fin,
                r_fin: e.r_fin,
                nr: e.nr_flag,
                mean_runtime_s: record.mean_runtime_s,
                dsc_values: record.dsc_values.clone(),
                hd_values: record.hd_values.clone(),
            }
        })
        .collect();

    Ok(LeaderboardReport {
        schema_version: SCHEMA_VERSION,
        entries,
    })
}
