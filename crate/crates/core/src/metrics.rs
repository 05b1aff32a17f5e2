//! Quality indicators and run statistics: the IGD+ indicator, the two-sided
//! Mann-Whitney U test and median/IQR aggregation with a Table-style
//! significance report.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("reference and approximation sets must be non-empty")]
    EmptySet,
    #[error("objective vectors have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("samples must be non-empty")]
    EmptySample,
}

/// Distance of approximation point `a` from reference point `z` counting
/// only the components where `a` is worse (minimization).
#[inline]
pub fn dplus(z: &[f64], a: &[f64]) -> f64 {
    z.iter()
        .zip(a)
        .map(|(&zi, &ai)| (ai - zi).max(0.0).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// IGD+ indicator: mean over the reference front of the smallest `dplus`
/// distance to the approximation set. Zero means the reference is fully
/// matched.
pub fn igd_plus(reference: &[Vec<f64>], approx: &[Vec<f64>]) -> Result<f64, MetricsError> {
    if reference.is_empty() || approx.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let dim = reference[0].len();
    for v in reference.iter().chain(approx) {
        if v.len() != dim {
            return Err(MetricsError::DimensionMismatch(dim, v.len()));
        }
    }
    let total: f64 = reference
        .iter()
        .map(|z| {
            approx
                .iter()
                .map(|a| dplus(z, a))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference.len() as f64)
}

/// Two-sided Mann-Whitney U test.
///
/// Returns `(u, p)` where `u` is the U statistic of the first sample
/// computed from midrank sums. Small samples (`min(n1, n2) < 8`) get the
/// exact permutation distribution; larger ones the normal approximation
/// with tie and continuity corrections. If every pooled value is identical
/// the test is degenerate and `p = 1`.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<(f64, f64), MetricsError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let n1 = a.len();
    let n2 = b.len();
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("samples must not contain NaN"));

    // Midranks, doubled so they stay integers under ties.
    let n = pooled.len();
    let mut double_ranks = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // ranks i+1 ..= j, midrank = (i+1 + j) / 2
        let doubled = (i + 1 + j) as u64;
        for r in i..j {
            double_ranks[r] = doubled;
        }
        tie_sizes.push(j - i);
        i = j;
    }

    let double_rank_sum_a: u64 = pooled
        .iter()
        .zip(&double_ranks)
        .filter(|((_, from_a), _)| *from_a)
        .map(|(_, &dr)| dr)
        .sum();
    let r1 = double_rank_sum_a as f64 / 2.0;
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;

    if tie_sizes.len() == 1 {
        // Every value identical: distributions overlap perfectly.
        return Ok((u, 1.0));
    }

    let p = if n1.min(n2) < 8 {
        exact_two_sided_p(&double_ranks, n1, double_rank_sum_a)
    } else {
        normal_two_sided_p(n1, n2, u, &tie_sizes)
    };
    Ok((u, p.min(1.0)))
}

/// Exact two-sided p by the doubled one-sided convention: twice the smaller
/// tail of the permutation distribution of the first sample's rank sum.
fn exact_two_sided_p(double_ranks: &[u64], n1: usize, observed: u64) -> f64 {
    // Tail counts over all n-choose-n1 subsets via rank-sum counting DP.
    let max_sum: usize = double_ranks.iter().map(|&r| r as usize).sum();
    // counts[k][s] = number of k-subsets with doubled rank sum s
    let mut counts = vec![vec![0f64; max_sum + 1]; n1 + 1];
    counts[0][0] = 1.0;
    for &r in double_ranks {
        let r = r as usize;
        for k in (0..n1).rev() {
            for s in (0..=max_sum.saturating_sub(r)).rev() {
                if counts[k][s] > 0.0 {
                    counts[k + 1][s + r] += counts[k][s];
                }
            }
        }
    }
    let dist = &counts[n1];
    let total: f64 = dist.iter().sum();
    let observed = (observed as usize).min(max_sum);
    let lower: f64 = dist[..=observed].iter().sum();
    let upper: f64 = dist[observed..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// Normal approximation with tie correction and a 0.5 continuity correction.
fn normal_two_sided_p(n1: usize, n2: usize, u: f64, tie_sizes: &[usize]) -> f64 {
    let n = (n1 + n2) as f64;
    let mean = (n1 * n2) as f64 / 2.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = (n1 * n2) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    2.0 * (1.0 - standard_normal_cdf(z))
}

fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Median and interquartile range of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatSummary {
    pub median: f64,
    pub iqr: f64,
    pub n: usize,
}

/// Median (midpoint convention) and IQR from Tukey hinges: the quartiles
/// are the medians of the lower and upper halves, with the middle element
/// included in both halves for odd sample sizes.
pub fn summarize(sample: &[f64]) -> Result<StatSummary, MetricsError> {
    if sample.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("samples must not contain NaN"));
    let n = sorted.len();
    let half = n.div_ceil(2);
    let q1 = median_of(&sorted[..half]);
    let q3 = median_of(&sorted[n - half..]);
    Ok(StatSummary { median: median_of(&sorted), iqr: q3 - q1, n })
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// One row of a comparison table.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub name: String,
    pub summary: StatSummary,
    /// p value of the pairwise test against the best row; `None` on the
    /// best row itself.
    pub p_vs_best: Option<f64>,
    pub significant: bool,
}

/// Comparison of per-configuration result samples in the style of a
/// median-(IQR) results table.
#[derive(Debug, Clone)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub best: usize,
    pub alpha: f64,
}

/// Ranks configurations by median, marks the best one, and flags every
/// other configuration whose pairwise two-sided Mann-Whitney p value
/// against the best is below `alpha`.
pub fn significance_table(
    samples: &[(String, Vec<f64>)],
    alpha: f64,
) -> Result<ComparisonTable, MetricsError> {
    if samples.len() < 2 {
        return Err(MetricsError::EmptySample);
    }
    let summaries: Vec<StatSummary> = samples
        .iter()
        .map(|(_, s)| summarize(s))
        .collect::<Result<_, _>>()?;
    let best = summaries
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.median.partial_cmp(&b.median).expect("no NaN"))
        .map(|(i, _)| i)
        .expect("at least two rows");
    let mut rows = Vec::with_capacity(samples.len());
    for (i, ((name, sample), summary)) in samples.iter().zip(&summaries).enumerate() {
        let p_vs_best = if i == best {
            None
        } else {
            Some(mann_whitney_u(sample, &samples[best].1)?.1)
        };
        rows.push(ComparisonRow {
            name: name.clone(),
            summary: *summary,
            p_vs_best,
            significant: p_vs_best.is_some_and(|p| p < alpha),
        });
    }
    Ok(ComparisonTable { rows, best, alpha })
}

/// Formats `value` with `digits` significant digits in plain decimal
/// notation, e.g. `format_significant(0.0721884, 5) == "0.072188"`.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

impl ComparisonTable {
    /// Cell text for row `i`: `median (IQR)` at five significant digits,
    /// a trailing `*` marking significance against the best row.
    pub fn cell(&self, i: usize) -> String {
        let row = &self.rows[i];
        let mut cell = format!(
            "{} ({})",
            format_significant(row.summary.median, 5),
            format_significant(row.summary.iqr, 5)
        );
        if row.significant {
            cell.push('*');
        }
        cell
    }

    /// Aligned plain-text rendering: one header line, one cell line.
    pub fn to_text(&self) -> String {
        let cells: Vec<String> = (0..self.rows.len()).map(|i| self.cell(i)).collect();
        let widths: Vec<usize> = self
            .rows
            .iter()
            .zip(&cells)
            .map(|(r, c)| r.name.len().max(c.len()))
            .collect();
        let mut text = String::new();
        for (row, w) in self.rows.iter().zip(&widths) {
            let _ = write!(text, "{:>w$}  ", row.name, w = w);
        }
        text.push('\n');
        for (cell, w) in cells.iter().zip(&widths) {
            let _ = write!(text, "{cell:>w$}  ");
        }
        text.push('\n');
        text
    }

    /// CSV rendering: `config,median,iqr,n,p_vs_best,significant`.
    pub fn to_csv(&self) -> String {
        let mut text = String::from("config,median,iqr,n,p_vs_best,significant\n");
        for row in &self.rows {
            let p = row
                .p_vs_best
                .map_or(String::new(), |p| format_significant(p, 6));
            let _ = writeln!(
                text,
                "{},{},{},{},{},{}",
                row.name,
                format_significant(row.summary.median, 12),
                format_significant(row.summary.iqr, 12),
                row.summary.n,
                p,
                row.significant
            );
        }
        text
    }
}
