//! Comparison battery for per-project metric vectors: Wilcoxon signed-rank
//! test, Benjamini-Hochberg adjustment, Cliff's delta, change rates.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest number of non-zero differences for which the exact null
/// distribution is used.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    #[default]
    TwoSided,
    /// `a` tends to be smaller than `b`.
    Less,
    /// `a` tends to be larger than `b`.
    Greater,
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "less" => Ok(Alternative::Less),
            "greater" => Ok(Alternative::Greater),
            other => Err(Error::config(format!("unknown alternative `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonTest {
    /// Sum of the ranks of the positive differences.
    pub statistic: f64,
    /// Number of non-zero differences.
    pub n: usize,
    pub p_value: f64,
    pub exact: bool,
}

/// Average ranks of `values` (ascending), doubled so they stay integral.
/// Values closer than a relative 1e-12 count as tied.
fn doubled_ranks(values: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0u64; values.len()];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        let v = values[order[start]];
        while end + 1 < order.len() {
            let w = values[order[end + 1]];
            if (w - v).abs() <= 1e-12 * v.abs().max(1.0) {
                end += 1;
            } else {
                break;
            }
        }
        // 1-based positions start+1..=end+1; doubled average = (start+1)+(end+1)
        let doubled = (start + end + 2) as u64;
        for &i in &order[start..=end] {
            ranks[i] = doubled;
        }
        tie_sizes.push(end - start + 1);
        start = end + 1;
    }
    (ranks, tie_sizes)
}

/// Paired signed-rank test. Zero differences are dropped, tied absolute
/// differences get average ranks. Exact null distribution for up to
/// [`EXACT_MAX_N`] non-zero differences, otherwise a normal approximation
/// with continuity correction and tie-corrected variance.
pub fn wilcoxon_signed_rank_test(a: &[f64], b: &[f64], alternative: Alternative) -> Result<WilcoxonTest> {
    if a.len() != b.len() {
        return Err(Error::input(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::input("paired samples are empty"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::input("paired samples contain a non-finite value"));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonTest {
            statistic: 0.0,
            n: 0,
            p_value: 1.0,
            exact: true,
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = doubled_ranks(&magnitudes);
    let w_doubled: u64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let statistic = w_doubled as f64 / 2.0;

    if n <= EXACT_MAX_N {
        // counts[s] = number of sign assignments with doubled W+ = s
        let total: u64 = ranks.iter().sum();
        let mut counts = vec![0u64; total as usize + 1];
        counts[0] = 1;
        let mut reach = 0usize;
        for &r in &ranks {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] > 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let all = (1u64 << n) as f64;
        let w = w_doubled as usize;
        let lower = counts[..=w].iter().sum::<u64>() as f64 / all;
        let upper = counts[w..].iter().sum::<u64>() as f64 / all;
        let p_value = match alternative {
            Alternative::TwoSided => (2.0 * lower.min(upper)).min(1.0),
            Alternative::Less => lower,
            Alternative::Greater => upper,
        };
        return Ok(WilcoxonTest {
            statistic,
            n,
            p_value,
            exact: true,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let sd = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term).sqrt();
    let normal = Normal::standard();
    let p_value = match alternative {
        Alternative::TwoSided => {
            let z = ((statistic - mean).abs() - 0.5).max(0.0) / sd;
            (2.0 * normal.sf(z)).min(1.0)
        }
        Alternative::Greater => normal.sf((statistic - mean - 0.5) / sd),
        Alternative::Less => normal.cdf((statistic - mean + 0.5) / sd),
    };
    Ok(WilcoxonTest {
        statistic,
        n,
        p_value,
        exact: false,
    })
}

/// Two-sided p-value of the paired signed-rank test.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(wilcoxon_signed_rank_test(a, b, Alternative::TwoSided)?.p_value)
}

/// Step-up adjustment: sorted ascending, `adj(i) = min_{j>=i} p(j) * m / j`,
/// capped at 1, returned in input order.
pub fn benjamini_hochberg(pvals: &[f64]) -> Result<Vec<f64>> {
    if let Some(p) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::input(format!("p-value {p} outside [0, 1]")));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pvals[i].total_cmp(&pvals[j]));
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (pos, &i) in order.iter().enumerate().rev() {
        // m/j >= 1 first, so rounding can never push the result below p.
        let scaled = pvals[i] * (m as f64 / (pos + 1) as f64);
        running = running.min(scaled);
        adjusted[i] = running;
    }
    Ok(adjusted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn of(delta: f64) -> Magnitude {
        let d = delta.abs();
        if d <= 0.147 {
            Magnitude::Negligible
        } else if d <= 0.33 {
            Magnitude::Small
        } else if d <= 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Magnitude::Negligible => "negligible",
            Magnitude::Small => "small",
            Magnitude::Medium => "medium",
            Magnitude::Large => "large",
        })
    }
}

/// Dominance counts `(#{a_i > b_j}, #{a_i < b_j})`, via binary search over a sorted copy of `b`.
fn dominance(a: &[f64], b: &[f64]) -> (u64, u64) {
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    a.iter().fold((0, 0), |(gt, lt), &x| {
        let below = sorted.partition_point(|&y| y < x);
        let not_above = sorted.partition_point(|&y| y <= x);
        (gt + below as u64, lt + (sorted.len() - not_above) as u64)
    })
}

/// `δ = (#{a_i > b_j} − #{a_i < b_j}) / (|a|·|b|)` with its magnitude label.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<(f64, Magnitude)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::input("Cliff's delta needs two non-empty samples"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::input("Cliff's delta sample contains NaN"));
    }
    let (gt, lt) = dominance(a, b);
    let delta = (gt as f64 - lt as f64) / (a.len() as f64 * b.len() as f64);
    Ok((delta, Magnitude::of(delta)))
}

/// Renders a delta as in a Table-4 cell: `-0.364(medium)`; negligible values carry no label.
pub fn format_delta(delta: f64) -> String {
    match Magnitude::of(delta) {
        Magnitude::Negligible => format!("{delta:.3}"),
        m => format!("{delta:.3}({m})"),
    }
}

/// Parses a plain decimal such as `0.889` or `-12.5` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::input(format!("not a decimal number: `{s}`"));
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let denom = num::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Signed integer percentage of relative change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeRate {
    pub percent: i64,
}

impl fmt::Display for ChangeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.percent < 0 {
            write!(f, "{}%", self.percent)
        } else {
            write!(f, "+{}%", self.percent)
        }
    }
}

/// `(op_alt − op_real) / op_real` as a percentage rounded half away from zero.
pub fn change_rate(op_alt: &BigRational, op_real: &BigRational) -> Result<ChangeRate> {
    if !op_real.is_positive() {
        return Err(Error::input("change rate undefined for a non-positive baseline"));
    }
    let pct = (op_alt - op_real) / op_real * BigRational::from_integer(BigInt::from(100));
    let percent = pct
        .round()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::input("change rate out of range"))?;
    Ok(ChangeRate { percent })
}

/// Pairwise comparison of several metrics' per-project vectors, laid out like
/// Table 4: adjusted p-values above the diagonal, Cliff's delta below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub metrics: Vec<String>,
    pub samples: Vec<Vec<f64>>,
    /// `p_values[i][j]` for `i < j`, after adjustment; `None` elsewhere.
    pub p_values: Vec<Vec<Option<f64>>>,
    /// `deltas[i][j] = δ(metric i, metric j)` for `i > j`; `None` elsewhere.
    pub deltas: Vec<Vec<Option<f64>>>,
    pub test: String,
    pub alternative: Alternative,
    pub adjustment: String,
}

pub fn compare_metrics(metrics: &[String], samples: &[Vec<f64>], alternative: Alternative) -> Result<StatsReport> {
    if metrics.len() != samples.len() {
        return Err(Error::input("one sample per metric required"));
    }
    let k = metrics.len();
    let mut raw = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            raw.push(wilcoxon_signed_rank_test(&samples[i], &samples[j], alternative)?.p_value);
        }
    }
    let adjusted = benjamini_hochberg(&raw)?;
    let mut p_values = vec![vec![None; k]; k];
    let mut deltas = vec![vec![None; k]; k];
    let mut next = adjusted.into_iter();
    for i in 0..k {
        for j in i + 1..k {
            p_values[i][j] = next.next();
            deltas[j][i] = Some(cliffs_delta(&samples[j], &samples[i])?.0);
        }
    }
    Ok(StatsReport {
        metrics: metrics.to_vec(),
        samples: samples.to_vec(),
        p_values,
        deltas,
        test: "wilcoxon-signed-rank".into(),
        alternative,
        adjustment: "benjamini-hochberg".into(),
    })
}
