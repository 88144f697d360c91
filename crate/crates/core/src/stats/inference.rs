use crate::error::StatsError;
use crate::model::SplitComparison;
use crate::stats::correlation::check_alpha;
use crate::stats::descriptive::{mean, sample_variance};
use crate::stats::special::student_t_two_sided_p;

/// Two-sided Welch two-sample t test (unequal variances, Welch–Satterthwaite
/// degrees of freedom).
///
/// The result carries generic group labels `"a"`/`"b"` and no metric name;
/// callers relabel it with [`SplitComparison::labelled`].
pub fn welch_test(a: &[f64], b: &[f64], alpha: f64) -> Result<SplitComparison, StatsError> {
    check_alpha(alpha)?;
    for group in [a, b] {
        if group.len() < 2 {
            return Err(StatsError::TooFewSamples {
                needed: 2,
                got: group.len(),
            });
        }
        if group.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mean_a, mean_b) = (mean(a)?, mean(b)?);
    let se_a = sample_variance(a)? / na;
    let se_b = sample_variance(b)? / nb;
    let se2 = se_a + se_b;

    let (t_stat, df, p_value, degenerate) = if se2 == 0.0 {
        let df = na + nb - 2.0;
        if mean_a == mean_b {
            (0.0, df, 1.0, false)
        } else {
            let t = if mean_a > mean_b {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            (t, df, 0.0, true)
        }
    } else {
        let t = (mean_a - mean_b) / se2.sqrt();
        let df = se2 * se2 / (se_a * se_a / (na - 1.0) + se_b * se_b / (nb - 1.0));
        (t, df, student_t_two_sided_p(t, df), false)
    };

    Ok(SplitComparison {
        metric_name: String::new(),
        group_a_label: "a".into(),
        group_b_label: "b".into(),
        n_a: a.len(),
        n_b: b.len(),
        mean_a,
        mean_b,
        t_stat,
        df,
        p_value,
        alpha,
        significant: p_value < alpha,
        degenerate,
    })
}

impl SplitComparison {
    pub fn labelled(mut self, metric: &str, group_a: &str, group_b: &str) -> Self {
        self.metric_name = metric.to_string();
        self.group_a_label = group_a.to_string();
        self.group_b_label = group_b.to_string();
        self
    }
}
