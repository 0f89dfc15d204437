//! Plants location communities in a synthetic review corpus, runs the full
//! pipeline and scores how well the detected clusters match the plant.
//!
//! ```text
//! cargo run --release --example planted_recovery -- [communities] [locations] [users] [seed]
//! ```

use std::error::Error;

use tourmine::pipeline::synth::{generate, SynthConfig};
use tourmine::pipeline::{run_pipeline, PipelineConfig, CLUSTERS};

fn main() -> Result<(), Box<dyn Error>> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let arg = |i: usize, default: u64| args.get(i).copied().unwrap_or(default);
    let synth = SynthConfig {
        communities: arg(0, 3) as usize,
        locations: arg(1, 30) as usize,
        users: arg(2, 2_000) as usize,
        seed: arg(3, 42),
        ..SynthConfig::default()
    };
    let dataset = generate(&synth)?;

    let dir = std::env::temp_dir().join(format!("tourmine-planted-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("reviews.in.csv");
    std::fs::write(&input, dataset.to_csv()?)?;

    let mut config = PipelineConfig {
        input: Some(input),
        output_dir: dir.clone(),
        ..PipelineConfig::default()
    };
    // Supports are nearly uniform by construction, so every location is mainstream.
    config.k_mainstream = Some(synth.locations);
    let manifest = run_pipeline(&config)?;
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join(CLUSTERS))?)?;

    let found: Vec<Vec<String>> = report["clusters"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|c| {
            c["members"]
                .as_array()
                .into_iter()
                .flatten()
                .filter_map(|m| m["id"].as_str().map(String::from))
                .collect()
        })
        .collect();

    let s = &manifest.stats;
    println!(
        "{} reviews, {} sequences (mean length {:.2}), {} rules",
        s.reviews, s.sequences, s.avg_sequence_length, s.rules
    );
    println!(
        "{} arcs above threshold, sphere radius {}, {} empty spheres",
        s.arcs_above_threshold, s.sphere_distance, s.empty_spheres
    );
    for (i, members) in found.iter().enumerate() {
        println!("cluster {i}: {}", members.join(" "));
    }
    println!("modularity {:.4}", s.modularity);
    println!(
        "planted {} communities, found {}; adjusted Rand index {:.4}",
        synth.communities,
        found.len(),
        dataset.recovery_score(&found)
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
