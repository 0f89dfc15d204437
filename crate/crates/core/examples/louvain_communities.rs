//! Clusters two loosely joined cliques with Louvain, then drops communities
//! below a minimum size.
//!
//! ```text
//! cargo run --example louvain_communities -- [seed]
//! ```

use std::error::Error;

use tourmine::community::{filter_clusters, louvain_best_of, WeightedGraph};

fn main() -> Result<(), Box<dyn Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(42);

    let labels: Vec<String> = ["eiffel", "champs", "arc", "trocadero", "louvre", "orsay", "notre_dame", "lone"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut edges = Vec::new();
    for block in [0..4, 4..7] {
        for i in block.clone() {
            for j in i + 1..block.end {
                edges.push((i, j, 0.8));
            }
        }
    }
    edges.push((3, 4, 0.05));
    let graph = WeightedGraph { labels, edges };

    let assignment = louvain_best_of(&graph, 1.0, seed, 8);
    println!("modularity {:.4}", assignment.modularity);
    let kept = filter_clusters(assignment, 3);
    for (i, c) in kept.communities.iter().enumerate() {
        println!("community {i}: {}", c.join(" "));
    }
    for d in &kept.dropped {
        println!("dropped: {}", d.join(" "));
    }
    Ok(())
}
