use num_rational::Ratio;
use proptest::prelude::*;
use tourmine::measures::{compute_measures, measure_rules, measure_table, Measure};
use tourmine::rules::SequentialRule;

type Q = Ratio<i128>;

fn rule(x: &str, y: &str, r: u64, cx: u64, cy: u64, n: u64) -> SequentialRule {
    SequentialRule {
        antecedent: x.into(),
        consequent: y.into(),
        rule_count: r,
        antecedent_count: cx,
        consequent_count: cy,
        n_sequences: n,
    }
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn hand_computed_vectors() {
    let m = compute_measures(&rule("a", "b", 5, 20, 25, 100));
    assert_eq!(m.confidence, 0.25);
    assert_eq!(m.added_value, 0.0);
    assert_eq!(m.klosgen, 0.0);
    assert_eq!(m.lift, 1.0);

    let m = compute_measures(&rule("a", "b", 1, 2, 1, 4));
    assert_eq!((m.support_rel, m.confidence, m.added_value), (0.25, 0.5, 0.25));
    assert_eq!(m.klosgen, 0.125);

    let m = compute_measures(&rule("a", "b", 2, 2, 2, 10));
    assert_eq!(m.confidence, 1.0);
    assert!((m.added_value - 0.8).abs() < 1e-15);
    assert!((m.klosgen - 0.2f64.sqrt() * 0.8).abs() < 1e-15);
    assert!((m.klosgen - 0.3578).abs() < 1e-4);
    assert_eq!(m.certainty_factor, 1.0);
}

#[test]
fn direction_matters() {
    let forward = compute_measures(&rule("a", "b", 10, 20, 60, 100));
    let backward = compute_measures(&rule("b", "a", 10, 60, 20, 100));
    assert_ne!(forward.klosgen, backward.klosgen);
}

#[test]
fn mirrored_correlation_flips_sign() {
    // P(XY) reflected around P(X)P(Y) with the margins held fixed
    let n = 100;
    let mut checked = 0;
    for x in (10..=90).step_by(10) {
        for y in (10..=90).step_by(10) {
            let mirror = 2 * x * y / n;
            for r in 1..mirror {
                if r > x.min(y) || mirror - r > x.min(y) {
                    continue;
                }
                let m1 = compute_measures(&rule("a", "b", r, x, y, n));
                let m2 = compute_measures(&rule("a", "b", mirror - r, x, y, n));
                assert!((m1.added_value + m2.added_value).abs() <= 1e-12);
                assert!(m1.klosgen * m2.klosgen <= 0.0);
                assert_eq!(m1.added_value > 0.0, m2.added_value < 0.0);
                checked += 1;
            }
        }
    }
    assert!(checked > 1_000);
}

fn arb_counts() -> impl Strategy<Value = (u64, u64, u64, u64)> {
    (1..1_000_000u64)
        .prop_flat_map(|n| (Just(n), 1..=n, 1..=n))
        .prop_flat_map(|(n, x, y)| (1..=x.min(y), Just(x), Just(y), Just(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn identities_hold_against_rationals((r, x, y, n) in arb_counts()) {
        let m = compute_measures(&rule("a", "b", r, x, y, n));
        let (qr, qx, qy, qn) = (Q::from(r as i128), Q::from(x as i128), Q::from(y as i128), Q::from(n as i128));
        let conf = qr / qx;
        let av = conf - qy / qn;
        prop_assert_eq!(m.confidence, to_f64(conf));
        prop_assert_eq!(m.support_rel, to_f64(qr / qn));
        prop_assert!(close(m.added_value, to_f64(av), 1e-14));
        prop_assert!(close(m.klosgen, to_f64(qr / qn).sqrt() * to_f64(av), 1e-14));
        prop_assert!(close(m.lift, to_f64(conf / (qy / qn)), 1e-14));
        prop_assert!(m.klosgen.abs() <= m.support_rel.sqrt() + 1e-15);
        prop_assert!(m.klosgen.abs() <= 1.0);
        if av == Q::from(0) {
            prop_assert!(m.klosgen.abs() <= 1e-12);
        }
    }

    #[test]
    fn scaling_all_counts_keeps_klosgen((r, x, y, n) in arb_counts(), k in 2..50u64) {
        let a = compute_measures(&rule("a", "b", r, x, y, n)).klosgen;
        let b = compute_measures(&rule("a", "b", k * r, k * x, k * y, k * n)).klosgen;
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300) || a == b);
    }

    #[test]
    fn table_order_matches_full_sort(
        rows in prop::collection::vec((0..6u8, 0..6u8, 1..20u64, 0..20u64, 0..20u64), 1..50),
        by in prop::sample::select(Measure::ALL.to_vec()),
        k in 0..60usize,
    ) {
        let mut rules: Vec<SequentialRule> = rows
            .into_iter()
            .filter(|(a, b, ..)| a != b)
            .map(|(a, b, r, ex, ey)| rule(&format!("l{a}"), &format!("l{b}"), r, r + ex, r + ey, r + ex + ey + 5))
            .collect();
        rules.sort();
        rules.dedup_by(|p, q| p.antecedent == q.antecedent && p.consequent == q.consequent);
        let measured = measure_rules(&rules);
        let mut oracle = measured.clone();
        let key = |m: &tourmine::measures::MeasuredRule| match by {
            Measure::Support => m.rule.rule_count as f64,
            other => m.measures.get(other),
        };
        oracle.sort_by(|p, q| {
            key(q).total_cmp(&key(p))
                .then_with(|| (&p.rule.antecedent, &p.rule.consequent).cmp(&(&q.rule.antecedent, &q.rule.consequent)))
        });
        oracle.truncate(k);
        prop_assert_eq!(measure_table(&measured, by, k), oracle);
    }
}
