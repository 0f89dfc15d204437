//! Mines direct-follow rules from a handful of sequences and checks them
//! against the brute-force enumeration.
//!
//! ```text
//! cargo run --example mine_rules
//! ```

use std::error::Error;

use tourmine::rules::{brute_force_rules, mine_rules, write_rules_csv};
use tourmine::trips::SequenceDataset;

fn main() -> Result<(), Box<dyn Error>> {
    let sequences = [
        "eiffel louvre orsay notre_dame",
        "louvre notre_dame eiffel champs",
        "eiffel champs arc louvre",
        "louvre eiffel champs arc",
        "notre_dame louvre louvre eiffel",
    ];
    let dataset = SequenceDataset::new(
        sequences
            .iter()
            .map(|s| s.split(' ').map(String::from).collect())
            .collect(),
    );

    let rules = mine_rules(&dataset, 2);
    println!("rules seen in at least two sequences:");
    for r in &rules {
        println!(
            "  {} -> {}: {} of {} sequences ({} contain {})",
            r.antecedent, r.consequent, r.rule_count, r.n_sequences, r.antecedent_count, r.antecedent
        );
    }

    let all = mine_rules(&dataset, 1);
    assert_eq!(all, brute_force_rules(&dataset)?);
    println!("{} rules in total, identical to brute force", all.len());

    write_rules_csv(&all, std::io::stdout().lock())?;
    Ok(())
}
