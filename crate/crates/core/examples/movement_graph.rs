//! Builds the Klosgen-weighted movement graph from a sequence dataset,
//! picks the mainstream locations at the elbow of the support curve and
//! prints the thresholded graph as DOT.
//!
//! ```text
//! cargo run --example movement_graph
//! ```

use std::collections::HashMap;
use std::error::Error;

use tourmine::graph::{build_graph, node_supports, select_mainstream, write_dot};
use tourmine::measures::{measure_rules, Measure};
use tourmine::rules::mine_rules;
use tourmine::trips::SequenceDataset;

fn main() -> Result<(), Box<dyn Error>> {
    let sequences = [
        "eiffel louvre notre_dame champs",
        "louvre eiffel champs arc",
        "eiffel champs arc louvre",
        "louvre notre_dame eiffel orsay",
        "eiffel louvre orsay champs",
        "bataclan republique louvre eiffel",
        "eiffel champs louvre notre_dame",
    ];
    let dataset = SequenceDataset::new(
        sequences
            .iter()
            .map(|s| s.split(' ').map(String::from).collect())
            .collect(),
    );

    let rules = measure_rules(&mine_rules(&dataset, 1));
    let names: HashMap<String, String> = [("eiffel", "Tour Eiffel"), ("louvre", "Musée du Louvre")]
        .into_iter()
        .map(|(id, name)| (id.to_string(), name.to_string()))
        .collect();
    let graph = build_graph(&rules, Measure::Klosgen, &node_supports(&dataset), &names)?;
    println!("{} nodes, {} arcs", graph.node_count(), graph.arc_count());

    let selection = select_mainstream(&graph, None);
    println!(
        "mainstream at the elbow: {} ({:.0}% of all visits)",
        selection.mainstream.join(", "),
        100.0 * selection.coverage_fraction
    );

    let pruned = graph.threshold_subgraph(0.1);
    println!("{} arcs weigh more than 0.1", pruned.arc_count());
    write_dot(&pruned, Some(&selection), std::io::stdout().lock())?;
    Ok(())
}
