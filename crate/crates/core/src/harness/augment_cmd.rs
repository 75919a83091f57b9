//! `augment`: expand each base case into the full Saltelli design of
//! augmented image/mask pairs plus a per-case design manifest.

use std::io::Write as _;

use rayon::prelude::*;

use crate::augment::{augment_case, sample_params, FACTOR_COUNT};
use crate::error::{Error, Result};
use crate::harness::{discover_cases, noise_seed_for, EvaluationConfig};
use crate::nrrd::{read_mask, read_nrrd, write_mask, write_nrrd, Encoding};
use crate::sensitivity::build_saltelli_design;

#[derive(Debug, Clone)]
pub struct AugmentSummary {
    /// Augmented pairs written per successful base case.
    pub rows_per_case: usize,
    pub cases_done: Vec<String>,
    pub failures: Vec<(String, String)>,
}

/// Augment every base case found in `ground_truth_dir` (pairs of
/// `<case>.nrrd` + `<case>.seg.nrrd`) into `output_dir` as
/// `<case>_r<row>.nrrd` / `<case>_r<row>.seg.nrrd`, with a
/// `<case>.design.csv` manifest. A failing base case is recorded and does
/// not abort the others.
pub fn run_augment(config: &EvaluationConfig) -> Result<AugmentSummary> {
    let design = build_saltelli_design(config.n_base, FACTOR_COUNT, config.seed)?;
    let cases = discover_cases(&config.ground_truth_dir)?;
    if cases.is_empty() {
        return Err(Error::DomainError(format!(
            "no base cases (`<case>.seg.nrrd`) found in {}",
            config.ground_truth_dir.display()
        )));
    }
    std::fs::create_dir_all(&config.output_dir)?;

    let mut summary = AugmentSummary {
        rows_per_case: design.len(),
        cases_done: Vec::new(),
        failures: Vec::new(),
    };

    for case in &cases {
        match config.with_threads(|| augment_one_case(config, &design, case)) {
            Ok(()) => summary.cases_done.push(case.clone()),
            Err(e) => summary.failures.push((case.clone(), e.to_string())),
        }
    }
    Ok(summary)
}

fn augment_one_case(
    config: &EvaluationConfig,
    design: &crate::sensitivity::SaltelliDesign,
    case: &str,
) -> Result<()> {
    let image = read_nrrd(&config.ground_truth_dir.join(format!("{case}.nrrd")))?;
    let mask = read_mask(&config.ground_truth_dir.join(format!("{case}.seg.nrrd")))?;
    if !image.geometry().same_lattice(mask.geometry()) {
        return Err(Error::GeometryMismatch(format!(
            "case {case}: image and mask grids differ"
        )));
    }

    // rows are independent; results land on disk under row-unique names
    let results: Vec<Result<()>> = design
        .rows()
        .par_iter()
        .enumerate()
        .map(|(row, design_row)| {
            let unit: [f64; 4] = design_row.point.clone().try_into().map_err(|_| {
                Error::DomainError("design row is not 4-dimensional".into())
            })?;
            let params = sample_params(unit, noise_seed_for(config.seed, case, row))?;
            let augmented = augment_case(&image, &mask, &params, case, row)?;
            write_nrrd(
                &augmented.image,
                &config.output_dir.join(format!("{case}_r{row}.nrrd")),
                Encoding::Gzip,
            )?;
            write_mask(
                &augmented.mask,
                &config.output_dir.join(format!("{case}_r{row}.seg.nrrd")),
                Encoding::Gzip,
            )?;
            Ok(())
        })
        .collect();
    for r in results {
        r?;
    }

    write_manifest(config, design, case)
}

/// The design manifest: one row per augmented sample with its hypercube
/// point, realized parameters, and noise seed.
fn write_manifest(
    config: &EvaluationConfig,
    design: &crate::sensitivity::SaltelliDesign,
    case: &str,
) -> Result<()> {
    let path = config.output_dir.join(format!("{case}.design.csv"));
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "row,u1,u2,u3,u4,alpha,d,beta,sigma,noise_seed")?;
    for (row, design_row) in design.rows().iter().enumerate() {
        let u = &design_row.point;
        let seed = noise_seed_for(config.seed, case, row);
        let p = sample_params([u[0], u[1], u[2], u[3]], seed)?;
        writeln!(
            out,
            "{row},{},{},{},{},{},{},{},{},{seed}",
            u[0], u[1], u[2], u[3], p.alpha_deg, p.d_mm, p.beta, p.sigma
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Split an augmented case id `<case>_r<row>` back into its parts.
pub(crate) fn split_augmented_id(id: &str) -> Option<(&str, usize)> {
    let pos = id.rfind("_r")?;
    let row: usize = id[pos + 2..].parse().ok()?;
    Some((&id[..pos], row))
}
