//! Descriptive statistics, regularity, correlation and two-sample inference.

pub mod correlation;
pub mod descriptive;
pub mod inference;
pub mod special;

pub use correlation::{
    correlation_significance, kendall_tau, midranks, pearson, spearman, CorrelationKind,
    CorrelationTest,
};
pub use descriptive::{
    comparable_means, mean, sample_variance, summarize, summarize_values, Regularity,
    SeriesSummary, DEFAULT_COMPARABLE_TOLERANCE,
};
pub use inference::welch_test;
