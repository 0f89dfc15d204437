use std::collections::BTreeSet;

use proptest::prelude::*;
use tourmine::rules::{brute_force_rules, mine_rules, read_rules_csv, write_rules_csv, ORACLE_LIMIT};
use tourmine::trips::SequenceDataset;
use tourmine::Error;

fn dataset(seqs: &[&[&str]]) -> SequenceDataset {
    SequenceDataset::new(
        seqs.iter()
            .map(|s| s.iter().map(|x| x.to_string()).collect())
            .collect(),
    )
}

fn counts(ds: &SequenceDataset) -> Vec<(String, String, u64, u64, u64, u64)> {
    mine_rules(ds, 1)
        .into_iter()
        .map(|r| (r.antecedent, r.consequent, r.rule_count, r.antecedent_count, r.consequent_count, r.n_sequences))
        .collect()
}

#[test]
fn documented_cases() {
    assert_eq!(
        counts(&dataset(&[&["A", "B"]])),
        [("A".into(), "B".into(), 1, 1, 1, 1)]
    );
    assert!(mine_rules(&dataset(&[&["A"]]), 1).is_empty());
    assert!(mine_rules(&SequenceDataset::default(), 1).is_empty());
    assert_eq!(
        counts(&dataset(&[&["A", "B", "A", "B"]])),
        [("A".into(), "B".into(), 1, 1, 1, 1), ("B".into(), "A".into(), 1, 1, 1, 1)]
    );
    let both = counts(&dataset(&[&["A", "B"], &["B", "A"]]));
    assert_eq!(both, [("A".into(), "B".into(), 1, 2, 2, 2), ("B".into(), "A".into(), 1, 2, 2, 2)]);
    // repeated location never yields a self rule
    assert!(mine_rules(&dataset(&[&["A", "A"]]), 1).is_empty());
}

#[test]
fn oracle_refuses_large_inputs() {
    let big = SequenceDataset::new(vec![vec!["a".to_string()]; ORACLE_LIMIT + 1]);
    assert!(matches!(brute_force_rules(&big), Err(Error::OracleGuard { .. })));
}

fn arb_dataset(max_seqs: usize, symbols: u8) -> impl Strategy<Value = SequenceDataset> {
    prop::collection::vec(prop::collection::vec(0..symbols, 0..12), 0..max_seqs).prop_map(|seqs| {
        SequenceDataset::new(
            seqs.into_iter()
                .map(|s| s.into_iter().map(|c| format!("s{c}")).collect())
                .collect(),
        )
    })
}

proptest! {
    #[test]
    fn equals_brute_force(ds in arb_dataset(200, 12)) {
        prop_assert_eq!(mine_rules(&ds, 1), brute_force_rules(&ds).unwrap());
    }

    #[test]
    fn every_adjacent_pair_is_a_rule(ds in arb_dataset(100, 8)) {
        let rules: BTreeSet<(String, String)> = mine_rules(&ds, 1)
            .into_iter()
            .map(|r| (r.antecedent, r.consequent))
            .collect();
        for seq in ds.sequences() {
            for w in seq.windows(2) {
                if w[0] != w[1] {
                    prop_assert!(rules.contains(&(w[0].clone(), w[1].clone())));
                }
            }
        }
    }

    #[test]
    fn counts_are_bounded_and_threshold_filters(ds in arb_dataset(100, 8), min in 1..6u64) {
        let all = mine_rules(&ds, 1);
        for r in &all {
            prop_assert!(r.is_consistent());
            prop_assert_eq!(r.n_sequences as usize, ds.count());
        }
        let kept: Vec<_> = all.iter().filter(|r| r.rule_count >= min).cloned().collect();
        prop_assert_eq!(mine_rules(&ds, min), kept);
    }

    #[test]
    fn rules_csv_round_trip(ds in arb_dataset(60, 8)) {
        let rules = mine_rules(&ds, 1);
        let mut buf = Vec::new();
        write_rules_csv(&rules, &mut buf).unwrap();
        prop_assert_eq!(read_rules_csv(buf.as_slice()).unwrap(), rules);
    }
}
