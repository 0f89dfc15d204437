//! Direct-follow sequential rules `X -> Y`.
//!
//! A rule holds when location `X` is immediately followed by location `Y`
//! somewhere in a sequence. All counts are sequence-level: a sequence
//! contributes at most once to each count however often the pattern repeats.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trips::SequenceDataset;

/// Largest dataset the brute-force oracle accepts.
pub const ORACLE_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SequentialRule {
    pub antecedent: String,
    pub consequent: String,
    /// Sequences in which the antecedent is directly followed by the consequent.
    pub rule_count: u64,
    /// Sequences containing the antecedent.
    pub antecedent_count: u64,
    /// Sequences containing the consequent.
    pub consequent_count: u64,
    pub n_sequences: u64,
}

impl SequentialRule {
    /// Checks `0 < rule <= min(X, Y) <= n` and `X != Y`.
    pub fn is_consistent(&self) -> bool {
        self.antecedent != self.consequent
            && self.rule_count > 0
            && self.rule_count <= self.antecedent_count.min(self.consequent_count)
            && self.antecedent_count.max(self.consequent_count) <= self.n_sequences
    }
}

/// Mines every rule supported by at least `min_support_count` sequences.
/// The result is sorted by `(antecedent, consequent)`.
pub fn mine_rules(dataset: &SequenceDataset, min_support_count: u64) -> Vec<SequentialRule> {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let mut names: Vec<&str> = Vec::new();
    let mut encoded: Vec<Vec<u32>> = Vec::with_capacity(dataset.count());
    for seq in dataset.sequences() {
        encoded.push(
            seq.iter()
                .map(|loc| {
                    *ids.entry(loc.as_str()).or_insert_with(|| {
                        names.push(loc.as_str());
                        (names.len() - 1) as u32
                    })
                })
                .collect(),
        );
    }

    // Item counts use a "last sequence seen" stamp; pair counts dedup inside
    // each sequence by sorting the handful of adjacent pairs.
    let mut item_count = vec![0u64; names.len()];
    let mut stamp = vec![usize::MAX; names.len()];
    let mut pair_count: HashMap<(u32, u32), u64> = HashMap::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (s, seq) in encoded.iter().enumerate() {
        for &item in seq {
            if stamp[item as usize] != s {
                stamp[item as usize] = s;
                item_count[item as usize] += 1;
            }
        }
        pairs.clear();
        pairs.extend(
            seq.windows(2)
                .filter(|w| w[0] != w[1])
                .map(|w| (w[0], w[1])),
        );
        pairs.sort_unstable();
        pairs.dedup();
        for &pair in &pairs {
            *pair_count.entry(pair).or_insert(0) += 1;
        }
    }

    let n = dataset.count() as u64;
    let mut rules: Vec<SequentialRule> = pair_count
        .into_iter()
        .filter(|&(_, count)| count >= min_support_count.max(1))
        .map(|((x, y), count)| SequentialRule {
            antecedent: names[x as usize].to_string(),
            consequent: names[y as usize].to_string(),
            rule_count: count,
            antecedent_count: item_count[x as usize],
            consequent_count: item_count[y as usize],
            n_sequences: n,
        })
        .collect();
    rules.sort_unstable_by(|a, b| {
        (&a.antecedent, &a.consequent).cmp(&(&b.antecedent, &b.consequent))
    });
    rules
}

/// Definitional rule extraction used to cross-check [`mine_rules`].
pub fn brute_force_rules(dataset: &SequenceDataset) -> Result<Vec<SequentialRule>> {
    if dataset.count() > ORACLE_LIMIT {
        return Err(Error::OracleGuard {
            n: dataset.count(),
            limit: ORACLE_LIMIT,
        });
    }
    let mut item_seqs: BTreeMap<&str, u64> = BTreeMap::new();
    let mut pair_seqs: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for seq in dataset.sequences() {
        let items: BTreeSet<&str> = seq.iter().map(String::as_str).collect();
        let mut pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
        for i in 1..seq.len() {
            if seq[i - 1] != seq[i] {
                pairs.insert((&seq[i - 1], &seq[i]));
            }
        }
        for item in items {
            *item_seqs.entry(item).or_default() += 1;
        }
        for pair in pairs {
            *pair_seqs.entry(pair).or_default() += 1;
        }
    }
    let n = dataset.count() as u64;
    Ok(pair_seqs
        .into_iter()
        .map(|((x, y), count)| SequentialRule {
            antecedent: x.to_string(),
            consequent: y.to_string(),
            rule_count: count,
            antecedent_count: item_seqs[x],
            consequent_count: item_seqs[y],
            n_sequences: n,
        })
        .collect())
}

const RULES_HEADER: [&str; 6] = [
    "X",
    "Y",
    "seq_count_rule",
    "seq_count_X",
    "seq_count_Y",
    "n_sequences",
];

#[derive(Deserialize)]
struct RuleRow {
    #[serde(rename = "X")]
    x: String,
    #[serde(rename = "Y")]
    y: String,
    seq_count_rule: u64,
    #[serde(rename = "seq_count_X")]
    seq_count_x: u64,
    #[serde(rename = "seq_count_Y")]
    seq_count_y: u64,
    n_sequences: u64,
}

pub fn write_rules_csv<W: Write>(rules: &[SequentialRule], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(RULES_HEADER)?;
    for r in rules {
        w.write_record([
            r.antecedent.clone(),
            r.consequent.clone(),
            r.rule_count.to_string(),
            r.antecedent_count.to_string(),
            r.consequent_count.to_string(),
            r.n_sequences.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rules_csv<R: Read>(source: R) -> Result<Vec<SequentialRule>> {
    let mut reader = csv::Reader::from_reader(source);
    let mut rules = Vec::new();
    for (idx, row) in reader.deserialize::<RuleRow>().enumerate() {
        let row = row?;
        let rule = SequentialRule {
            antecedent: row.x,
            consequent: row.y,
            rule_count: row.seq_count_rule,
            antecedent_count: row.seq_count_x,
            consequent_count: row.seq_count_y,
            n_sequences: row.n_sequences,
        };
        if !rule.is_consistent() {
            return Err(Error::Format {
                format: "rules CSV",
                line: idx + 2,
                reason: "counts violate rule bounds".into(),
            });
        }
        rules.push(rule);
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(seqs: &[&[&str]]) -> SequenceDataset {
        SequenceDataset::new(
            seqs.iter()
                .map(|s| s.iter().map(|x| x.to_string()).collect())
                .collect(),
        )
    }

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

    #[test]
    fn single_pair() {
        let d = ds(&[&["A", "B"]]);
        let expected = vec![rule("A", "B", 1, 1, 1, 1)];
        assert_eq!(mine_rules(&d, 1), expected);
        assert_eq!(brute_force_rules(&d).unwrap(), expected);
    }

    #[test]
    fn single_item_has_no_rules() {
        let d = ds(&[&["A"]]);
        assert!(mine_rules(&d, 1).is_empty());
        assert!(brute_force_rules(&d).unwrap().is_empty());
    }

    #[test]
    fn empty_dataset_has_no_rules() {
        let d = ds(&[]);
        assert!(mine_rules(&d, 1).is_empty());
        assert!(brute_force_rules(&d).unwrap().is_empty());
    }

    #[test]
    fn repeats_count_once_per_sequence() {
        let d = ds(&[&["A", "B", "A", "B"]]);
        let expected = vec![rule("A", "B", 1, 1, 1, 1), rule("B", "A", 1, 1, 1, 1)];
        assert_eq!(mine_rules(&d, 1), expected);
        assert_eq!(brute_force_rules(&d).unwrap(), expected);
    }

    #[test]
    fn direction_matters() {
        let d = ds(&[&["A", "B"], &["B", "A"]]);
        let expected = vec![rule("A", "B", 1, 2, 2, 2), rule("B", "A", 1, 2, 2, 2)];
        assert_eq!(mine_rules(&d, 1), expected);
        assert_eq!(brute_force_rules(&d).unwrap(), expected);
    }

    #[test]
    fn self_follow_excluded() {
        let d = ds(&[&["A", "A", "B"]]);
        assert_eq!(mine_rules(&d, 1), vec![rule("A", "B", 1, 1, 1, 1)]);
    }

    #[test]
    fn min_support_filters() {
        let d = ds(&[&["A", "B"], &["A", "B", "C"], &["C", "A"]]);
        let rules = mine_rules(&d, 2);
        assert_eq!(rules, vec![rule("A", "B", 2, 3, 2, 3)]);
    }

    #[test]
    fn oracle_guard() {
        let d = SequenceDataset::new(vec![vec!["A".into()]; ORACLE_LIMIT + 1]);
        assert!(matches!(
            brute_force_rules(&d),
            Err(Error::OracleGuard { .. })
        ));
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let d = ds(&[&["A", "B", "C"], &["B", "C"]]);
        let rules = mine_rules(&d, 1);
        let mut buf = Vec::new();
        write_rules_csv(&rules, &mut buf).unwrap();
        assert!(buf.starts_with(b"X,Y,seq_count_rule,seq_count_X,seq_count_Y,n_sequences\n"));
        assert_eq!(read_rules_csv(buf.as_slice()).unwrap(), rules);

        let bad = "X,Y,seq_count_rule,seq_count_X,seq_count_Y,n_sequences\nA,B,3,1,1,5\n";
        assert!(read_rules_csv(bad.as_bytes()).is_err());
    }
}
