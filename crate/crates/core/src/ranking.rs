//! Rank aggregation: robust distribution statistics per team, fractional
//! ranking with average-rank ties, the weighted rank-combination scores, and
//! the final leaderboard with its runtime tiebreak.
//!
//! Teams flagged NR (non-ranked: the pipeline produced a null output on some
//! case) are excluded from every ranking and placed after all ranked teams.

use crate::error::{Error, Result};

/// Median, unbiased variance, and bias-corrected skewness of a metric
/// distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustStats {
    pub median: f64,
    pub variance: f64,
    pub skewness: f64,
}

/// Compute the robust statistics of a nonempty value vector.
///
/// The median interpolates the two middle order statistics for even lengths;
/// the variance is the unbiased sample variance (0 for a single value); the
/// skewness is the adjusted Fisher–Pearson estimator
/// `G1 = g1 · √(n(n−1)) / (n−2)`, defined as 0 for fewer than three values
/// or a constant sample.
pub fn robust_stats(values: &[f64]) -> Result<RobustStats> {
    let n = values.len();
    if n == 0 {
        return Err(Error::DomainError("robust_stats of empty vector".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };

    let mean = values.iter().sum::<f64>() / n as f64;
    let variance = if n < 2 {
        0.0
    } else {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    };

    let skewness = if n < 3 {
        0.0
    } else {
        let m2 = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n as f64;
        if m2 == 0.0 {
            0.0
        } else {
            let g1 = m3 / m2.powf(1.5);
            g1 * ((n * (n - 1)) as f64).sqrt() / (n - 2) as f64
        }
    };

    Ok(RobustStats {
        median,
        variance,
        skewness,
    })
}

/// Whether smaller or larger values should rank first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LowerBetter,
    HigherBetter,
}

/// Fractional ranks: the best value gets rank 1 and exact ties receive the
/// average of the ranks they span.
pub fn rank_values(values: &[f64], direction: Direction) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| match direction {
        Direction::LowerBetter => values[a].total_cmp(&values[b]),
        Direction::HigherBetter => values[b].total_cmp(&values[a]),
    });
    let mut ranks = vec![0.0; n];
    let mut pos = 0usize;
    while pos < n {
        let mut end = pos + 1;
        while end < n && values[order[end]] == values[order[pos]] {
            end += 1;
        }
        // positions pos..end are 1-based ranks pos+1..=end
        let avg = (pos + 1 + end) as f64 / 2.0;
        for &i in &order[pos..end] {
            ranks[i] = avg;
        }
        pos = end;
    }
    ranks
}

/// Weighted combination of the median/variance/skewness ranks used for both
/// overlap and surface-distance metrics: `0.6·r_m + 0.25·r_σ² + 0.15·r_μ₃`.
pub fn p_metric(rank_median: f64, rank_variance: f64, rank_skewness: f64) -> f64 {
    0.6 * rank_median + 0.25 * rank_variance + 0.15 * rank_skewness
}

/// Weighted combination for tetrahedral mesh quality:
/// `0.3·r_m + 0.25·r_σ² + 0.15·r_μ₃ + 0.3·r_n` with `r_n` the rank of the
/// average invalid-element count.
pub fn p_jacobian(
    rank_median: f64,
    rank_variance: f64,
    rank_skewness: f64,
    rank_invalid: f64,
) -> f64 {
    0.3 * rank_median + 0.25 * rank_variance + 0.15 * rank_skewness + 0.3 * rank_invalid
}

/// How skewness ranks are ordered. The challenge never fixes a convention,
/// so it is explicit and configurable here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewRanking {
    /// Less asymmetry is better: rank |skewness| ascending.
    AbsoluteAscending,
    /// More negative is better: rank signed skewness ascending (a heavy
    /// right tail is worse).
    SignedAscending,
}

/// Rank-direction conventions for the metric statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankingConfig {
    pub dsc_skew: SkewRanking,
    pub hd_skew: SkewRanking,
}

impl Default for RankingConfig {
    fn default() -> Self {
        Self {
            dsc_skew: SkewRanking::AbsoluteAscending,
            hd_skew: SkewRanking::SignedAscending,
        }
    }
}

fn skew_key(skew: f64, convention: SkewRanking) -> f64 {
    match convention {
        SkewRanking::AbsoluteAscending => skew.abs(),
        SkewRanking::SignedAscending => skew,
    }
}

/// Per-team metric distributions and robustness scores feeding the
/// leaderboard.
#[derive(Debug, Clone)]
pub struct TeamRecord {
    pub team_id: String,
    /// One value per evaluated case.
    pub dsc_values: Vec<f64>,
    pub hd_values: Vec<f64>,
    /// Robustness scores from the sensitivity analysis.
    pub p_var: f64,
    pub p_inter: f64,
    /// Tiebreaker: mean wall-clock execution time.
    pub mean_runtime_s: f64,
    /// Non-ranked: some case produced a null output.
    pub nr_flag: bool,
}

/// One team's scores and ranks, ready for the final weighted average.
#[derive(Debug, Clone)]
pub struct RankedTeam {
    pub team_id: String,
    pub p_dsc: Option<f64>,
    pub r_dsc: Option<f64>,
    pub p_hd: Option<f64>,
    pub r_hd: Option<f64>,
    pub p_var: Option<f64>,
    pub r_var: Option<f64>,
    pub p_inter: Option<f64>,
    pub r_inter: Option<f64>,
    pub mean_runtime_s: f64,
    pub nr_flag: bool,
}

/// Final leaderboard entry.
#[derive(Debug, Clone)]
pub struct LeaderboardEntry {
    pub team_id: String,
    pub p_dsc: Option<f64>,
    pub r_dsc: Option<f64>,
    pub p_hd: Option<f64>,
    pub r_hd: Option<f64>,
    pub p_var: Option<f64>,
    pub r_var: Option<f64>,
    pub p_inter: Option<f64>,
    pub r_inter: Option<f64>,
    /// The final weighted-average score; absent for NR teams.
    pub p_fin: Option<f64>,
    /// Final position, 1-based; NR teams follow all ranked teams.
    pub r_fin: usize,
    pub nr_flag: bool,
}

/// Ordered leaderboard.
#[derive(Debug, Clone)]
pub struct Leaderboard {
    pub entries: Vec<LeaderboardEntry>,
}

/// Apply the final weighted average
/// `p_fin = (r_DSC + r_HD)/6 + (r_var + r_inter)/3`, order teams by it
/// ascending with exact ties broken by lowest mean runtime, and append NR
/// teams (ordered by id) after all ranked teams.
pub fn final_ranking(teams: &[RankedTeam]) -> Result<Leaderboard> {
    if teams.is_empty() {
        return Err(Error::EmptyField);
    }
    let mut ranked: Vec<(f64, &RankedTeam)> = Vec::new();
    let mut non_ranked: Vec<&RankedTeam> = Vec::new();
    for team in teams {
        if team.nr_flag {
            non_ranked.push(team);
            continue;
        }
        let take = |v: Option<f64>, what: &str| -> Result<f64> {
            v.ok_or_else(|| {
                Error::IncompleteRecord(format!("team {} missing {what}", team.team_id))
            })
        };
        let r_dsc = take(team.r_dsc, "r_dsc")?;
        let r_hd = take(team.r_hd, "r_hd")?;
        let r_var = take(team.r_var, "r_var")?;
        let r_inter = take(team.r_inter, "r_inter")?;
        let p_fin = (r_dsc + r_hd) / 6.0 + (r_var + r_inter) / 3.0;
        ranked.push((p_fin, team));
    }

    ranked.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.mean_runtime_s.total_cmp(&b.1.mean_runtime_s))
            .then(a.1.team_id.cmp(&b.1.team_id))
    });
    non_ranked.sort_by(|a, b| a.team_id.cmp(&b.team_id));

    let mut entries = Vec::with_capacity(teams.len());
    for (pos, (p_fin, team)) in ranked.iter().enumerate() {
        entries.push(entry_from(team, Some(*p_fin), pos + 1));
    }
    let offset = ranked.len();
    for (pos, team) in non_ranked.iter().enumerate() {
        entries.push(entry_from(team, None, offset + pos + 1));
    }
    Ok(Leaderboard { entries })
}

fn entry_from(team: &RankedTeam, p_fin: Option<f64>, r_fin: usize) -> LeaderboardEntry {
    LeaderboardEntry {
        team_id: team.team_id.clone(),
        p_dsc: team.p_dsc,
        r_dsc: team.r_dsc,
        p_hd: team.p_hd,
        r_hd: team.r_hd,
        p_var: team.p_var,
        r_var: team.r_var,
        p_inter: team.p_inter,
        r_inter: team.r_inter,
        p_fin,
        r_fin,
        nr_flag: team.nr_flag,
    }
}

/// Full aggregation: robust statistics of each team's DSC and HD
/// distributions, statistic ranks under the configured directions, the
/// weighted p-scores, intermediate ranks, and the final leaderboard.
///
/// Directions: median DSC higher-better, median HD lower-better, variances
/// lower-better, skewness per [`RankingConfig`]; `p_var` higher-better
/// (1 is the uniform ideal) and `p_inter` lower-better (0 means no
/// interactions).
pub fn compute_leaderboard(records: &[TeamRecord], config: RankingConfig) -> Result<Leaderboard> {
    if records.is_empty() {
        return Err(Error::EmptyField);
    }
    let eligible: Vec<&TeamRecord> = records.iter().filter(|r| !r.nr_flag).collect();

    let mut scored: Vec<RankedTeam> = Vec::with_capacity(records.len());
    if !eligible.is_empty() {
        for team in &eligible {
            if team.dsc_values.is_empty() || team.hd_values.is_empty() {
                return Err(Error::IncompleteRecord(format!(
                    "team {} has no metric values but is not flagged NR",
                    team.team_id
                )));
            }
        }
        let dsc_stats: Vec<RobustStats> = eligible
            .iter()
            .map(|t| robust_stats(&t.dsc_values))
            .collect::<Result<_>>()?;
        let hd_stats: Vec<RobustStats> = eligible
            .iter()
            .map(|t| robust_stats(&t.hd_values))
            .collect::<Result<_>>()?;

        let collect = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
            (0..eligible.len()).map(f).collect()
        };
        let r_m_dsc = rank_values(
            &collect(&|i| dsc_stats[i].median),
            Direction::HigherBetter,
        );
        let r_v_dsc = rank_values(&collect(&|i| dsc_stats[i].variance), Direction::LowerBetter);
        let r_s_dsc = rank_values(
            &collect(&|i| skew_key(dsc_stats[i].skewness, config.dsc_skew)),
            Direction::LowerBetter,
        );
        let r_m_hd = rank_values(&collect(&|i| hd_stats[i].median), Direction::LowerBetter);
        let r_v_hd = rank_values(&collect(&|i| hd_stats[i].variance), Direction::LowerBetter);
        let r_s_hd = rank_values(
            &collect(&|i| skew_key(hd_stats[i].skewness, config.hd_skew)),
            Direction::LowerBetter,
        );

        let p_dsc: Vec<f64> = (0..eligible.len())
            .map(|i| p_metric(r_m_dsc[i], r_v_dsc[i], r_s_dsc[i]))
            .collect();
        let p_hd: Vec<f64> = (0..eligible.len())
            .map(|i| p_metric(r_m_hd[i], r_v_hd[i], r_s_hd[i]))
            .collect();
        let p_var: Vec<f64> = eligible.iter().map(|t| t.p_var).collect();
        let p_inter: Vec<f64> = eligible.iter().map(|t| t.p_inter).collect();

        let r_dsc = rank_values(&p_dsc, Direction::LowerBetter);
        let r_hd = rank_values(&p_hd, Direction::LowerBetter);
        let r_var = rank_values(&p_var, Direction::HigherBetter);
        let r_inter = rank_values(&p_inter, Direction::LowerBetter);

        for (i, team) in eligible.iter().enumerate() {
            scored.push(RankedTeam {
                team_id: team.team_id.clone(),
                p_dsc: Some(p_dsc[i]),
                r_dsc: Some(r_dsc[i]),
                p_hd: Some(p_hd[i]),
                r_hd: Some(r_hd[i]),
                p_var: Some(p_var[i]),
                r_var: Some(r_var[i]),
                p_inter: Some(p_inter[i]),
                r_inter: Some(r_inter[i]),
                mean_runtime_s: team.mean_runtime_s,
                nr_flag: false,
            });
        }
    }
    for team in records.iter().filter(|r| r.nr_flag) {
        scored.push(RankedTeam {
            team_id: team.team_id.clone(),
            p_dsc: None,
            r_dsc: None,
            p_hd: None,
            r_hd: None,
            p_var: Some(team.p_var),
            r_var: None,
            p_inter: Some(team.p_inter),
            r_inter: None,
            mean_runtime_s: team.mean_runtime_s,
            nr_flag: true,
        });
    }

    final_ranking(&scored)
}
