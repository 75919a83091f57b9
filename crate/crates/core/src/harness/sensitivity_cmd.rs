//! `sensitivity`: turn per-row metric outputs over an augmented design into
//! Sobol' indices and robustness scores per team.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harness::augment_cmd::split_augmented_id;
use crate::harness::report::{
    EvaluationReport, FactorIndices, OutputIndices, SensitivityReport, TeamSensitivity,
    SCHEMA_VERSION,
};
use crate::harness::{EvaluationConfig, FACTOR_NAMES};
use crate::sensitivity::{
    build_saltelli_design, estimate_sobol, robustness_scores, ModelOutputs, RowKind,
    SaltelliDesign,
};

#[derive(Debug, Clone)]
pub struct SensitivitySummary {
    pub report: SensitivityReport,
    /// Teams left out because hard per-case errors broke their vectors.
    pub excluded: Vec<(String, String)>,
}

/// Compute indices from the `evaluation.json` report in `output_dir`. Case
/// ids must be augmented ids (`<base>_r<row>`); every design row must be
/// covered for every base case. Metric values from degenerate (null-output)
/// cases enter as their penalized finite values, which keeps the design
/// balanced.
pub fn run_sensitivity(config: &EvaluationConfig) -> Result<SensitivitySummary> {
    let evaluation = EvaluationReport::read_json(&config.output_dir.join("evaluation.json"))?;
    let design = build_saltelli_design(config.n_base, FACTOR_NAMES.len(), config.seed)?;
    let report = sensitivity_from_records(&evaluation, &design, config.seed)?;
    report
        .report
        .write_json(&config.output_dir.join("sensitivity.json"))?;
    Ok(report)
}

/// The analysis itself, separated from file I/O.
pub(crate) fn sensitivity_from_records(
    evaluation: &EvaluationReport,
    design: &SaltelliDesign,
    seed: u64,
) -> Result<SensitivitySummary> {
    let n_rows = design.len();

    // (team -> base -> row -> (dsc, hd)); BTreeMaps keep every later
    // iteration deterministic
    type PerTeam = BTreeMap<String, BTreeMap<usize, (Option<f64>, Option<f64>)>>;
    let mut teams: BTreeMap<String, PerTeam> = BTreeMap::new();
    for record in &evaluation.records {
        let (base, row) = split_augmented_id(&record.case).ok_or_else(|| {
            Error::DomainError(format!(
                "case id `{}` is not an augmented id (<base>_r<row>)",
                record.case
            ))
        })?;
        if row >= n_rows {
            return Err(Error::DomainError(format!(
                "case `{}` names row {row}, but the design has {n_rows} rows",
                record.case
            )));
        }
        teams
            .entry(record.team.clone())
            .or_default()
            .entry(base.to_string())
            .or_default()
            .insert(row, (record.dsc, record.hd_mm));
    }
    if teams.is_empty() {
        return Err(Error::EmptyField);
    }

    // coverage check: every base case must carry the whole design
    for (team, bases) in &teams {
        for (base, rows) in bases {
            let missing: Vec<usize> = (0..n_rows).filter(|r| !rows.contains_key(r)).collect();
            if !missing.is_empty() {
                return Err(Error::IncompleteDesign(format!(
                    "team {team}, base case {base}: missing rows {missing:?}"
                )));
            }
        }
    }

    let mut out_teams = Vec::new();
    let mut excluded = Vec::new();
    'team: for (team, bases) in &teams {
        // per-row model outputs, averaged across base cases
        let mut dsc_rows = vec![0.0f64; n_rows];
        let mut hd_rows = vec![0.0f64; n_rows];
        let n_bases = bases.len() as f64;
        for (base, rows) in bases {
            for (&row, &(dsc, hd)) in rows {
                match (dsc, hd) {
                    (Some(d), Some(h)) => {
                        dsc_rows[row] += d / n_bases;
                        hd_rows[row] += h / n_bases;
                    }
                    _ => {
                        excluded.push((
                            team.clone(),
                            format!("base {base} row {row} failed evaluation"),
                        ));
                        continue 'team;
                    }
                }
            }
        }

        let mut outputs = Vec::new();
        for (name, values) in [("DSC", &dsc_rows), ("HD", &hd_rows)] {
            let model = split_by_kind(design, values);
            let mut indices = estimate_sobol(&model)?;
            indices.output_name = name.to_string();
            let scores = robustness_scores(&indices);
            outputs.push(OutputIndices {
                output: name.to_string(),
                degenerate: indices.degenerate,
                factors: FACTOR_NAMES
                    .iter()
                    .enumerate()
                    .map(|(i, &factor)| FactorIndices {
                        factor: factor.to_string(),
                        s1: indices.s1[i],
                        st: indices.st[i],
                    })
                    .collect(),
                p_var: scores.p_var,
                p_inter: scores.p_inter,
            });
        }
        // the ranking input merges both outputs symmetrically
        let p_var = (outputs[0].p_var + outputs[1].p_var) / 2.0;
        let p_inter = (outputs[0].p_inter + outputs[1].p_inter) / 2.0;
        out_teams.push(TeamSensitivity {
            team: team.clone(),
            outputs,
            p_var,
            p_inter,
        });
    }

    Ok(SensitivitySummary {
        report: SensitivityReport {
            schema_version: SCHEMA_VERSION,
            n_base: design.n_base(),
            m_factors: design.m_factors(),
            seed,
            teams: out_teams,
        },
        excluded,
    })
}

/// Distribute flat per-row values into the estimator's A/B/AB blocks using
/// the design's own row kinds.
fn split_by_kind(design: &SaltelliDesign, values: &[f64]) -> ModelOutputs {
    let n = design.n_base();
    let m = design.m_factors();
    let mut out = ModelOutputs {
        y_a: vec![0.0; n],
        y_b: vec![0.0; n],
        y_ab: vec![vec![0.0; n]; m],
    };
    for (row, design_row) in design.rows().iter().enumerate() {
        let y = values[row];
        match design_row.kind {
            RowKind::A => out.y_a[design_row.base_index] = y,
            RowKind::B => out.y_b[design_row.base_index] = y,
            RowKind::CrossAB { factor } => out.y_ab[factor][design_row.base_index] = y,
        }
    }
    out
}
