//! Rank-based tests: Kruskal-Wallis, Wilcoxon rank-sum, Bonferroni.
//!
//! Tail probabilities come from a local regularized incomplete gamma
//! evaluation (series below `a + 1`, Lentz continued fraction above),
//! accurate to about 1e-13 absolute over the ranges used here.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rank-sum enumeration is used up to this combined sample size when
/// there are no ties.
pub const EXACT_MAX_N: usize = 12;

const EPS: f64 = 1e-15;
const MAX_ITER: usize = 10_000;

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "gamma_q needs a > 0");
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // Series for P(a, x).
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        (1.0 - sum * log_prefix.exp()).clamp(0.0, 1.0)
    } else {
        // Continued fraction for Q(a, x), modified Lentz.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        (log_prefix.exp() * h).clamp(0.0, 1.0)
    }
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    gamma_q(df / 2.0, x / 2.0)
}

/// Upper tail of the standard normal distribution.
pub fn normal_sf(z: f64) -> f64 {
    if z >= 0.0 {
        0.5 * gamma_q(0.5, z * z / 2.0)
    } else {
        1.0 - normal_sf(-z)
    }
}

/// Midranks (1-based) of `values` and the sizes of every tie block.
pub fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

fn tie_sum(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum()
}

fn check_sample(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidInput(format!("{name} is empty")));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidInput(format!("{name} contains NaN")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    pub h: f64,
    pub p: f64,
    pub df: usize,
}

/// Tie-corrected Kruskal-Wallis H with a chi-square(k - 1) p-value.
///
/// When every observation is identical, H = 0 and p = 1.
pub fn kruskal_wallis<S: AsRef<[f64]>>(groups: &[S]) -> Result<KruskalWallis> {
    if groups.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "Kruskal-Wallis needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    for (i, g) in groups.iter().enumerate() {
        check_sample(&format!("group {i}"), g.as_ref())?;
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.as_ref().iter().copied()).collect();
    let n = pooled.len() as f64;
    let (ranks, ties) = midranks(&pooled);
    let df = groups.len() - 1;

    let correction = 1.0 - tie_sum(&ties) / (n * n * n - n);
    if correction <= 0.0 {
        return Ok(KruskalWallis { h: 0.0, p: 1.0, df });
    }
    let mut offset = 0;
    let mut between = 0.0;
    for g in groups {
        let len = g.as_ref().len();
        let rank_sum: f64 = ranks[offset..offset + len].iter().sum();
        between += rank_sum * rank_sum / len as f64;
        offset += len;
    }
    let h = ((12.0 / (n * (n + 1.0))) * between - 3.0 * (n + 1.0)).max(0.0) / correction;
    Ok(KruskalWallis {
        h,
        p: chi_square_sf(h, df as f64),
        df,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    #[default]
    TwoSided,
    /// First sample tends to be smaller.
    Less,
    /// First sample tends to be larger.
    Greater,
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Less => "less",
            Alternative::Greater => "greater",
        })
    }
}

impl std::str::FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "less" => Ok(Alternative::Less),
            "greater" => Ok(Alternative::Greater),
            other => Err(Error::InvalidInput(format!("unknown alternative `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankSumMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSum {
    /// Mann-Whitney U of the first sample: pairs where it is larger, ties count half.
    pub u: f64,
    pub p: f64,
    pub method: RankSumMethod,
}

/// Counts of each U value (0..=na*nb) over all rank assignments without ties.
pub fn rank_sum_null_counts(na: usize, nb: usize) -> Vec<u64> {
    // counts[i][u]: ways for i elements of `a` among the ranks seen so far.
    let max_u = na * nb;
    let mut table = vec![vec![0u64; max_u + 1]; na + 1];
    table[0][0] = 1;
    // Insert ranks one at a time; placing a rank in `a` when j elements of
    // `b` are already below it adds j to U.
    for placed in 0..na + nb {
        let mut next = vec![vec![0u64; max_u + 1]; na + 1];
        for i in 0..=na.min(placed) {
            let j = placed - i;
            if j > nb {
                continue;
            }
            for u in 0..=max_u {
                let c = table[i][u];
                if c == 0 {
                    continue;
                }
                if i < na && u + j <= max_u {
                    next[i + 1][u + j] += c;
                }
                if j < nb {
                    next[i][u] += c;
                }
            }
        }
        table = next;
    }
    table[na].clone()
}

/// Exact p-value for an observed U with no ties.
pub fn rank_sum_exact_p(u: f64, na: usize, nb: usize, alt: Alternative) -> f64 {
    let counts = rank_sum_null_counts(na, nb);
    let total: u64 = counts.iter().sum();
    let u = u.round() as usize;
    let le: u64 = counts[..=u].iter().sum();
    let ge: u64 = counts[u..].iter().sum();
    let (le, ge) = (le as f64 / total as f64, ge as f64 / total as f64);
    match alt {
        Alternative::TwoSided => (2.0 * le.min(ge)).min(1.0),
        Alternative::Less => le,
        Alternative::Greater => ge,
    }
}

/// Normal approximation with continuity and tie correction.
///
/// `tie_term` is the sum of `t^3 - t` over tie blocks of the pooled sample.
pub fn rank_sum_normal_p(u: f64, na: usize, nb: usize, tie_term: f64, alt: Alternative) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    let n = na + nb;
    let mean = na * nb / 2.0;
    let var = if n > 1.0 {
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    if var <= 0.0 {
        return 1.0;
    }
    let sd = var.sqrt();
    let p = match alt {
        Alternative::TwoSided => 2.0 * normal_sf(((u - mean).abs() - 0.5).max(0.0) / sd),
        Alternative::Less => 1.0 - normal_sf((u - mean + 0.5) / sd),
        Alternative::Greater => normal_sf((u - mean - 0.5) / sd),
    };
    p.clamp(0.0, 1.0)
}

pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSum> {
    wilcoxon_rank_sum_with(a, b, Alternative::TwoSided)
}

/// Wilcoxon rank-sum test. Exact when `a.len() + b.len() <= 12` and there
/// are no ties, otherwise the normal approximation.
pub fn wilcoxon_rank_sum_with(a: &[f64], b: &[f64], alt: Alternative) -> Result<RankSum> {
    check_sample("first sample", a)?;
    check_sample("second sample", b)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let (na, nb) = (a.len(), b.len());
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let u = rank_sum_a - (na * (na + 1)) as f64 / 2.0;

    if na + nb <= EXACT_MAX_N && ties.is_empty() {
        Ok(RankSum {
            u,
            p: rank_sum_exact_p(u, na, nb, alt),
            method: RankSumMethod::Exact,
        })
    } else {
        Ok(RankSum {
            u,
            p: rank_sum_normal_p(u, na, nb, tie_sum(&ties), alt),
            method: RankSumMethod::Normal,
        })
    }
}

/// Multiply each p by the number of comparisons, clamped to 1.
pub fn bonferroni(raw: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = raw.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidInput(format!("p-value {bad} outside [0, 1]")));
    }
    let k = raw.len() as f64;
    Ok(raw.iter().map(|p| (p * k).min(1.0)).collect())
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub n: usize,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub group_a: String,
    pub group_b: String,
    pub u_statistic: f64,
    pub raw_p: f64,
    pub adjusted_p: f64,
    pub significant: bool,
    pub method: RankSumMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub metric: String,
    pub groups: Vec<GroupSummary>,
    pub kruskal_h: f64,
    pub kruskal_p: f64,
    pub alpha: f64,
    pub alternative: Alternative,
    pub pairwise: Vec<PairwiseComparison>,
}

impl StatReport {
    pub fn omnibus_significant(&self) -> bool {
        self.kruskal_p < self.alpha
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairwiseComparison> {
        self.pairwise
            .iter()
            .find(|c| (c.group_a == a && c.group_b == b) || (c.group_a == b && c.group_b == a))
    }

    pub fn group(&self, label: &str) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.label == label)
    }
}

/// Kruskal-Wallis over all groups, then every pairwise rank-sum test with a
/// Bonferroni adjustment across the pairs.
pub fn compare_groups(
    metric: &str,
    groups: &[(String, Vec<f64>)],
    alpha: f64,
    alternative: Alternative,
) -> Result<StatReport> {
    let samples: Vec<&[f64]> = groups.iter().map(|(_, v)| v.as_slice()).collect();
    let kw = kruskal_wallis(&samples)?;

    let mut pairs = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let rs = wilcoxon_rank_sum_with(&groups[i].1, &groups[j].1, alternative)?;
            pairs.push((i, j, rs));
        }
    }
    let raw: Vec<f64> = pairs.iter().map(|(_, _, rs)| rs.p).collect();
    let adjusted = bonferroni(&raw)?;
    let pairwise = pairs
        .into_iter()
        .zip(adjusted)
        .map(|((i, j, rs), adj)| PairwiseComparison {
            group_a: groups[i].0.clone(),
            group_b: groups[j].0.clone(),
            u_statistic: rs.u,
            raw_p: rs.p,
            adjusted_p: adj,
            significant: adj < alpha,
            method: rs.method,
        })
        .collect();

    Ok(StatReport {
        metric: metric.to_string(),
        groups: groups
            .iter()
            .map(|(label, v)| GroupSummary {
                label: label.clone(),
                n: v.len(),
                median: median(v),
                min: v.iter().copied().fold(f64::INFINITY, f64::min),
                max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
            .collect(),
        kruskal_h: kw.h,
        kruskal_p: kw.p,
        alpha,
        alternative,
        pairwise,
    })
}

impl fmt::Display for StatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(s, "metric: {}", self.metric)?;
        writeln!(s, "{:<16} {:>5} {:>14} {:>14} {:>14}", "group", "n", "median", "min", "max")?;
        for g in &self.groups {
            writeln!(s, "{:<16} {:>5} {:>14.6} {:>14.6} {:>14.6}", g.label, g.n, g.median, g.min, g.max)?;
        }
        writeln!(
            s,
            "Kruskal-Wallis: H = {:.6}, p = {:.6e} ({})",
            self.kruskal_h,
            self.kruskal_p,
            if self.omnibus_significant() { "significant" } else { "not significant" }
        )?;
        writeln!(
            s,
            "{:<16} {:<16} {:>10} {:>12} {:>12} {:>4}",
            "group a", "group b", "U", "raw p", "adjusted p", "sig"
        )?;
        for c in &self.pairwise {
            writeln!(
                s,
                "{:<16} {:<16} {:>10.1} {:>12.4e} {:>12.4e} {:>4}",
                c.group_a,
                c.group_b,
                c.u_statistic,
                c.raw_p,
                c.adjusted_p,
                if c.significant { "*" } else { "" }
            )?;
        }
        write!(s, "alpha = {}, alternative = {}", self.alpha, self.alternative)?;
        f.write_str(&s)
    }
}
