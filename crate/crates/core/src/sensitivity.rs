//! Variance-based sensitivity analysis: Saltelli A/B/AB_i experimental
//! designs over an Owen-scrambled Sobol' sequence, first-order (Saltelli
//! 2010) and total-order (Jansen) index estimators, and the derived
//! robustness scores.
//!
//! Raw index estimates may be slightly negative; they are reported and fed
//! into the robustness scores unclamped, since clamping would silently
//! change rankings.

use crate::error::{Error, Result};

/// Maximum base sample count: the sequence generator guarantees its
/// stratification up to 2^16 points.
pub const MAX_N_BASE: usize = 1 << 16;

/// Role of one design row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Row j of the A matrix.
    A,
    /// Row j of the B matrix.
    B,
    /// Row j of A with coordinate `factor` replaced by B's.
    CrossAB { factor: usize },
}

/// One evaluation point of the design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignRow {
    pub kind: RowKind,
    /// Index j within the block (0..n_base).
    pub base_index: usize,
    pub point: Vec<f64>,
}

/// A Saltelli design of `n_base · (m_factors + 2)` rows, ordered as the full
/// A block, then the full B block, then one AB block per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SaltelliDesign {
    n_base: usize,
    m_factors: usize,
    seed: u64,
    rows: Vec<DesignRow>,
}

/// Build the design. A and B are the two M-column halves of a 2M-dimensional
/// Owen-scrambled Sobol' sequence; AB_i rows substitute column i. The whole
/// construction is deterministic in `seed`.
pub fn build_saltelli_design(
    n_base: usize,
    m_factors: usize,
    seed: u64,
) -> Result<SaltelliDesign> {
    if n_base < 2 {
        return Err(Error::DomainError(format!(
            "n_base must be at least 2, got {n_base}"
        )));
    }
    if n_base > MAX_N_BASE {
        return Err(Error::DomainError(format!(
            "n_base {n_base} exceeds the sequence limit {MAX_N_BASE}"
        )));
    }
    if m_factors == 0 || 2 * m_factors > 256 {
        return Err(Error::DomainError(format!(
            "m_factors must be in 1..=128, got {m_factors}"
        )));
    }

    let scramble = fold_seed(seed);
    let coord = |j: usize, dim: usize| -> f64 {
        f64::from(sobol_burley::sample(j as u32, dim as u32, scramble))
    };

    let mut rows = Vec::with_capacity(n_base * (m_factors + 2));
    let a_row = |j: usize| -> Vec<f64> { (0..m_factors).map(|d| coord(j, d)).collect() };
    let b_row =
        |j: usize| -> Vec<f64> { (0..m_factors).map(|d| coord(j, m_factors + d)).collect() };

    for j in 0..n_base {
        rows.push(DesignRow {
            kind: RowKind::A,
            base_index: j,
            point: a_row(j),
        });
    }
    for j in 0..n_base {
        rows.push(DesignRow {
            kind: RowKind::B,
            base_index: j,
            point: b_row(j),
        });
    }
    for factor in 0..m_factors {
        for j in 0..n_base {
            let mut point = a_row(j);
            point[factor] = b_row(j)[factor];
            rows.push(DesignRow {
                kind: RowKind::CrossAB { factor },
                base_index: j,
                point,
            });
        }
    }

    Ok(SaltelliDesign {
        n_base,
        m_factors,
        seed,
        rows,
    })
}

fn fold_seed(seed: u64) -> u32 {
    let mut x = seed;
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    (x & 0xffff_ffff) as u32 ^ (x >> 32) as u32
}

impl SaltelliDesign {
    pub fn n_base(&self) -> usize {
        self.n_base
    }

    pub fn m_factors(&self) -> usize {
        self.m_factors
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rows(&self) -> &[DesignRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Evaluate a model over every row and split the outputs into the
    /// estimator inputs (y_A, y_B, y_AB per factor).
    pub fn evaluate<F: Fn(&[f64]) -> f64>(&self, f: F) -> ModelOutputs {
        let n = self.n_base;
        let mut y_a = vec![0.0; n];
        let mut y_b = vec![0.0; n];
        let mut y_ab = vec![vec![0.0; n]; self.m_factors];
        for row in &self.rows {
            let y = f(&row.point);
            match row.kind {
                RowKind::A => y_a[row.base_index] = y,
                RowKind::B => y_b[row.base_index] = y,
                RowKind::CrossAB { factor } => y_ab[factor][row.base_index] = y,
            }
        }
        ModelOutputs { y_a, y_b, y_ab }
    }
}

/// Model outputs arranged for [`estimate_sobol`].
#[derive(Debug, Clone)]
pub struct ModelOutputs {
    pub y_a: Vec<f64>,
    pub y_b: Vec<f64>,
    pub y_ab: Vec<Vec<f64>>,
}

/// First- and total-order Sobol' indices for one model output.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolIndices {
    /// Which output these indices describe (e.g. "DSC", "HD").
    pub output_name: String,
    /// First-order index per factor.
    pub s1: Vec<f64>,
    /// Total-order index per factor.
    pub st: Vec<f64>,
    pub n_base: usize,
    /// Set when the output had zero variance; all indices are reported 0.
    pub degenerate: bool,
}

/// Estimate first-order indices with the Saltelli-2010 estimator
/// `S_i = mean(y_B·(y_AB_i − y_A)) / V` and total-order indices with the
/// Jansen estimator `S_Ti = mean((y_A − y_AB_i)²) / (2V)`, where `V` is the
/// sample variance of the pooled A∪B outputs.
///
/// Outputs are centered by the pooled mean before the first-order product:
/// the expectation is identical, but without centering the finite-sample
/// term `mean(Y)·mean(y_AB_i − y_A)` swamps `V` whenever the output has a
/// large mean and a small variance (e.g. overlap scores hovering near one
/// value).
pub fn estimate_sobol(outputs: &ModelOutputs) -> Result<SobolIndices> {
    let n = outputs.y_a.len();
    if n < 2 || outputs.y_b.len() != n {
        return Err(Error::DomainError(format!(
            "y_A and y_B must both have length n_base ≥ 2, got {} and {}",
            n,
            outputs.y_b.len()
        )));
    }
    for (i, y) in outputs.y_ab.iter().enumerate() {
        if y.len() != n {
            return Err(Error::DomainError(format!(
                "y_AB[{i}] has length {}, expected {n}",
                y.len()
            )));
        }
    }
    let m = outputs.y_ab.len();

    let pooled = outputs.y_a.iter().chain(&outputs.y_b);
    let mean = pooled.clone().sum::<f64>() / (2 * n) as f64;
    let var = pooled.map(|&y| (y - mean) * (y - mean)).sum::<f64>() / (2 * n - 1) as f64;

    if var <= 0.0 {
        return Ok(SobolIndices {
            output_name: String::new(),
            s1: vec![0.0; m],
            st: vec![0.0; m],
            n_base: n,
            degenerate: true,
        });
    }

    let mut s1 = Vec::with_capacity(m);
    let mut st = Vec::with_capacity(m);
    for y_abi in &outputs.y_ab {
        let mut first = 0.0;
        let mut total = 0.0;
        for j in 0..n {
            first += (outputs.y_b[j] - mean) * (y_abi[j] - outputs.y_a[j]);
            let d = outputs.y_a[j] - y_abi[j];
            total += d * d;
        }
        s1.push(first / n as f64 / var);
        st.push(total / (2.0 * n as f64) / var);
    }

    Ok(SobolIndices {
        output_name: String::new(),
        s1,
        st,
        n_base: n,
        degenerate: false,
    })
}

/// The two robustness scores derived from Sobol' indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessScores {
    /// `1 − Σ|S_i¹ − 1/M|`: 1 when first-order influence is spread uniformly
    /// over the factors, lower when any factor dominates.
    pub p_var: f64,
    /// `Σ(S_iᵀ − S_i¹)`: total interaction strength, ideally near 0.
    pub p_inter: f64,
}

/// Evaluate both robustness formulas exactly, with no clamping.
pub fn robustness_scores(indices: &SobolIndices) -> RobustnessScores {
    let m = indices.s1.len() as f64;
    let p_var = 1.0
        - indices
            .s1
            .iter()
            .map(|&s| (s - 1.0 / m).abs())
            .sum::<f64>();
    let p_inter = indices
        .s1
        .iter()
        .zip(&indices.st)
        .map(|(&s1, &st)| st - s1)
        .sum::<f64>();
    RobustnessScores { p_var, p_inter }
}
