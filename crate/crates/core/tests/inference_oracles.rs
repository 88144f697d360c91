use std::f64::consts::{FRAC_PI_2, PI};

use courtside_core::stats::special::{normal_two_sided_p, student_t_two_sided_p};
use courtside_core::stats::{
    correlation_significance, kendall_tau, pearson, spearman, welch_test, CorrelationKind,
};
use proptest::prelude::*;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Two-sided Student t tail by quadrature. With x = sqrt(df) tan(theta) the
/// density is proportional to cos(theta)^(df - 1) on (-pi/2, pi/2).
fn t_tail_oracle(t: f64, df: f64) -> f64 {
    let g = |th: f64| th.cos().powf(df - 1.0);
    let theta = (t.abs() / df.sqrt()).atan();
    simpson(g, theta, FRAC_PI_2, 200_000) / simpson(g, 0.0, FRAC_PI_2, 200_000)
}

fn normal_tail_oracle(z: f64) -> f64 {
    let phi = |x: f64| (-x * x / 2.0).exp() / (2.0 * PI).sqrt();
    1.0 - 2.0 * simpson(phi, 0.0, z.abs(), 200_000)
}

#[test]
fn pearson_p_at_half_correlation_ten_players() {
    let test = correlation_significance(0.5, 10, CorrelationKind::Pearson, 0.05).unwrap();
    let t = 0.5 * (8.0f64 / 0.75).sqrt();
    assert!((test.statistic - t).abs() < 1e-12);
    let oracle = t_tail_oracle(t, 8.0);
    assert!((test.p_value - oracle).abs() < 1e-9, "{} vs {oracle}", test.p_value);
    assert!(!test.significant);
}

#[test]
fn t_tail_matches_quadrature() {
    for &(t, df) in &[(0.3, 1.0), (1.0, 2.0), (2.0, 5.0), (2.5, 7.3), (-3.1, 12.0), (4.0, 28.6), (1.7, 150.0)] {
        let p = student_t_two_sided_p(t, df);
        let oracle = t_tail_oracle(t, df);
        assert!((p - oracle).abs() < 1e-8, "t={t} df={df}: {p} vs {oracle}");
    }
}

#[test]
fn kendall_normal_tail_matches_quadrature() {
    for z in [0.1, 0.8, 1.96, 2.7, -3.3] {
        let p = normal_two_sided_p(z);
        assert!((p - normal_tail_oracle(z)).abs() < 1e-10, "z={z}");
    }
    let test = correlation_significance(0.4, 20, CorrelationKind::Kendall, 0.05).unwrap();
    let z = 3.0 * 0.4 * (20.0f64 * 19.0).sqrt() / (2.0f64 * 45.0).sqrt();
    assert!((test.statistic - z).abs() < 1e-12);
    assert!((test.p_value - normal_tail_oracle(z)).abs() < 1e-10);
}

#[test]
fn welch_matches_hand_computation_and_quadrature() {
    let a = [0.52, 0.47, 0.61, 0.44, 0.58, 0.49];
    let b = [0.71, 0.64, 0.69, 0.75];
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
    };
    let (sa, sb) = (var(&a) / 6.0, var(&b) / 4.0);
    let t = (mean(&a) - mean(&b)) / (sa + sb).sqrt();
    let df = (sa + sb).powi(2) / (sa * sa / 5.0 + sb * sb / 3.0);
    let r = welch_test(&a, &b, 0.05).unwrap();
    assert!((r.t_stat - t).abs() < 1e-12);
    assert!((r.df - df).abs() < 1e-9);
    assert!((r.p_value - t_tail_oracle(t, df)).abs() < 1e-8);
    assert!(r.significant);
}

fn group() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, 2..20)
}

proptest! {
    #[test]
    fn welch_swap_and_affine(a in group(), b in group(), scale in 0.01..100.0f64, shift in -100.0..100.0f64) {
        let Ok(ab) = welch_test(&a, &b, 0.05) else { return Ok(()) };
        let ba = welch_test(&b, &a, 0.05).unwrap();
        prop_assert!((ab.p_value - ba.p_value).abs() <= 1e-12);
        prop_assert_eq!(ab.t_stat, -ba.t_stat);
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
        if !ab.degenerate && ab.t_stat.abs() < 1e6 {
            let f = |v: &[f64]| v.iter().map(|x| x * scale + shift).collect::<Vec<_>>();
            let moved = welch_test(&f(&a), &f(&b), 0.05).unwrap();
            prop_assert!((moved.t_stat - ab.t_stat).abs() <= 1e-6 * ab.t_stat.abs().max(1.0));
            prop_assert!((moved.p_value - ab.p_value).abs() <= 1e-6);
        }
    }

    #[test]
    fn coefficients_bounded(pairs in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 4..40)) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        for r in [pearson(&x, &y), spearman(&x, &y), kendall_tau(&x, &y)].into_iter().flatten() {
            prop_assert!((-1.0..=1.0).contains(&r));
            let test = correlation_significance(r, x.len(), CorrelationKind::Pearson, 0.05).unwrap();
            prop_assert!((0.0..=1.0).contains(&test.p_value));
        }
    }

    #[test]
    fn kendall_symmetric_and_antisymmetric(v in prop::collection::vec((0..6u8, 0..6u8), 3..30)) {
        let x: Vec<f64> = v.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = v.iter().map(|p| f64::from(p.1)).collect();
        if let Ok(t) = kendall_tau(&x, &y) {
            prop_assert_eq!(t, kendall_tau(&y, &x).unwrap());
            let neg: Vec<f64> = y.iter().map(|a| -a).collect();
            prop_assert_eq!(-t, kendall_tau(&x, &neg).unwrap());
        }
    }
}
