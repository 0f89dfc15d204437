//! Loads a small Paris movement graph, keeps the arcs above 0.6 and compares
//! the spheres of influence of its two mainstream places.
//!
//! ```text
//! cargo run --example spheres_of_influence
//! ```

use std::error::Error;

use tourmine::graph::read_dot;
use tourmine::influence::{similarity_matrix, spheres_of_influence};

const PARIS: &str = include_str!("../fixtures/paris.dot");

fn main() -> Result<(), Box<dyn Error>> {
    let imported = read_dot(PARIS.as_bytes())?;
    let graph = imported.graph.threshold_subgraph(0.6);
    let name = |id: &str| graph.node(id).map_or(id.to_string(), |n| n.name.clone());

    let spheres = spheres_of_influence(&graph, &imported.mainstream, 2)?;
    for s in &spheres {
        let members: Vec<String> = s.members.iter().map(|m| name(m)).collect();
        println!("{} reaches {}", name(&s.center), members.join(", "));
    }

    let m = similarity_matrix(&spheres);
    for (i, from) in m.order().iter().enumerate() {
        for (j, to) in m.order().iter().enumerate() {
            if i != j {
                println!("M({}, {}) = {:.4}", name(from), name(to), m.get(i, j));
            }
        }
    }
    m.write_csv(std::io::stdout().lock())?;
    Ok(())
}
