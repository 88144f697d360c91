use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::StatsError;
use crate::stats::special::{normal_two_sided_p, student_t_two_sided_p};

fn check_pair(x: &[f64], y: &[f64], min_len: usize) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < min_len {
        return Err(StatsError::TooFewSamples {
            needed: min_len,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 3)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn cmp_f64(a: &f64, b: &f64) -> Ordering {
    a.partial_cmp(b).expect("inputs are finite")
}

/// 1-based ranks, ties receiving the average of the ranks they span.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| cmp_f64(&values[i], &values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of the mid-ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 3)?;
    pearson(&midranks(x), &midranks(y))
}

/// Pairs tied within each run of equal values of an already-sorted key.
fn tied_pairs<T: PartialEq>(sorted: impl Iterator<Item = T>) -> i64 {
    let mut total = 0;
    let mut run = 0i64;
    let mut prev: Option<T> = None;
    for v in sorted {
        if prev.as_ref() == Some(&v) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
        prev = Some(v);
    }
    total + run * (run - 1) / 2
}

/// Merge sort by y, returning how many inversions were removed.
fn sort_counting_swaps(items: &mut [f64], buf: &mut Vec<f64>) -> i64 {
    let n = items.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut items[..mid], buf);
    swaps += sort_counting_swaps(&mut items[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if items[j] < items[i] {
            buf.push(items[j]);
            swaps += (mid - i) as i64;
            j += 1;
        } else {
            buf.push(items[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&items[i..mid]);
    buf.extend_from_slice(&items[j..n]);
    items.copy_from_slice(buf);
    swaps
}

/// Combine pair counts into tau-b. Shared with nothing else so that the
/// formula is the only thing two counting strategies need to agree on.
pub fn tau_b_from_counts(concordant_minus_discordant: i64, untied_x: i64, untied_y: i64) -> f64 {
    concordant_minus_discordant as f64 / ((untied_x * untied_y) as f64).sqrt()
}

/// Kendall's tau-b, by Knight's O(n log n) sort-and-merge method.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 3)?;
    let n = x.len() as i64;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| cmp_f64(&a.0, &b.0).then(cmp_f64(&a.1, &b.1)));

    let total = n * (n - 1) / 2;
    let ties_x = tied_pairs(pairs.iter().map(|p| p.0));
    let ties_xy = tied_pairs(pairs.iter().copied());

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = Vec::with_capacity(ys.len());
    let swaps = sort_counting_swaps(&mut ys, &mut buf);
    let ties_y = tied_pairs(ys.iter().copied());

    let untied_x = total - ties_x;
    let untied_y = total - ties_y;
    if untied_x == 0 || untied_y == 0 {
        return Err(StatsError::ConstantInput);
    }
    let numerator = total - ties_x - ties_y + ties_xy - 2 * swaps;
    Ok(tau_b_from_counts(numerator, untied_x, untied_y).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Pearson,
    Kendall,
    Spearman,
}

impl CorrelationKind {
    pub const ALL: [CorrelationKind; 3] = [
        CorrelationKind::Pearson,
        CorrelationKind::Kendall,
        CorrelationKind::Spearman,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationKind::Pearson => "pearson",
            CorrelationKind::Kendall => "kendall",
            CorrelationKind::Spearman => "spearman",
        }
    }

    pub fn coefficient(self, x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
        match self {
            CorrelationKind::Pearson => pearson(x, y),
            CorrelationKind::Kendall => kendall_tau(x, y),
            CorrelationKind::Spearman => spearman(x, y),
        }
    }
}

impl fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorrelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CorrelationKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown correlation kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationTest {
    pub kind: CorrelationKind,
    pub coefficient: f64,
    pub n: usize,
    /// t statistic (Pearson, Spearman) or z score (Kendall).
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub significant: bool,
    /// `|r| = 1`: the p-value is reported as exactly 0.
    pub exact: bool,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), StatsError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(StatsError::InvalidAlpha(alpha))
    }
}

/// Two-sided test of zero correlation. Pearson and Spearman use the t
/// statistic with `n - 2` degrees of freedom; Kendall uses the normal
/// approximation to the null distribution of tau.
pub fn correlation_significance(
    r: f64,
    n: usize,
    kind: CorrelationKind,
    alpha: f64,
) -> Result<CorrelationTest, StatsError> {
    check_alpha(alpha)?;
    if n < 4 {
        return Err(StatsError::TooFewSamples { needed: 4, got: n });
    }
    if !r.is_finite() || r.abs() > 1.0 {
        return Err(StatsError::InvalidCoefficient(r));
    }
    let nf = n as f64;
    if r.abs() == 1.0 {
        return Ok(CorrelationTest {
            kind,
            coefficient: r,
            n,
            statistic: r * f64::INFINITY,
            p_value: 0.0,
            alpha,
            significant: true,
            exact: true,
        });
    }
    let (statistic, p_value) = match kind {
        CorrelationKind::Pearson | CorrelationKind::Spearman => {
            let df = nf - 2.0;
            let t = r * (df / (1.0 - r * r)).sqrt();
            (t, student_t_two_sided_p(t, df))
        }
        CorrelationKind::Kendall => {
            let z = 3.0 * r * (nf * (nf - 1.0)).sqrt() / (2.0 * (2.0 * nf + 5.0)).sqrt();
            (z, normal_two_sided_p(z))
        }
    };
    Ok(CorrelationTest {
        kind,
        coefficient: r,
        n,
        statistic,
        p_value,
        alpha,
        significant: p_value < alpha,
        exact: false,
    })
}
