//! Computes every interest measure for a few rules and ranks them by support
//! and by Klosgen.
//!
//! ```text
//! cargo run --example interest_measures
//! ```

use std::error::Error;

use tourmine::measures::{compute_measures, measure_rules, measure_table, write_measures_csv, Measure};
use tourmine::rules::SequentialRule;

fn rule(x: &str, y: &str, both: u64, with_x: u64, with_y: u64, n: u64) -> SequentialRule {
    SequentialRule {
        antecedent: x.into(),
        consequent: y.into(),
        rule_count: both,
        antecedent_count: with_x,
        consequent_count: with_y,
        n_sequences: n,
    }
}

fn main() -> Result<(), Box<dyn Error>> {
    let rules = vec![
        rule("eiffel", "louvre", 480, 2_600, 1_900, 10_000),
        rule("louvre", "eiffel", 310, 1_900, 2_600, 10_000),
        rule("bataclan", "republique", 40, 60, 120, 10_000),
        rule("plaza_athenee", "george_v", 35, 50, 90, 10_000),
        rule("notre_dame", "eiffel", 260, 1_000, 2_600, 10_000),
    ];

    let independent = compute_measures(&rule("a", "b", 5, 20, 25, 100));
    println!(
        "independent counts: lift {}, added value {}, klosgen {}",
        independent.lift, independent.added_value, independent.klosgen
    );

    let measured = measure_rules(&rules);
    for by in [Measure::Support, Measure::Klosgen] {
        println!("top 3 by {by}:");
        for m in measure_table(&measured, by, 3) {
            println!(
                "  {} -> {}  supp {}  conf {:.3}  lift {:.2}  klosgen {:.4}",
                m.rule.antecedent,
                m.rule.consequent,
                m.rule.rule_count,
                m.measures.confidence,
                m.measures.lift,
                m.measures.klosgen
            );
        }
    }

    write_measures_csv(&measured, std::io::stdout().lock())?;
    Ok(())
}
