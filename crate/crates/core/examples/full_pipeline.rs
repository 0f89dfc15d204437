//! Runs every stage on a review file, or on a generated corpus when no file
//! is given, and prints the run statistics and discovered communities.
//!
//! ```text
//! cargo run --release --example full_pipeline -- [reviews.csv] [output-dir]
//! ```

use std::error::Error;
use std::path::PathBuf;

use tourmine::pipeline::synth::{generate, SynthConfig};
use tourmine::pipeline::{run_pipeline, PipelineConfig, CLUSTERS};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let input = args.next().map(PathBuf::from);
    let output_dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tourmine-full-pipeline"));
    std::fs::create_dir_all(&output_dir)?;

    let mut config = PipelineConfig {
        output_dir: output_dir.clone(),
        ..PipelineConfig::default()
    };
    match input {
        Some(path) => config.input = Some(path),
        None => {
            let synth = SynthConfig { users: 1_500, locations: 40, ..SynthConfig::default() };
            let path = output_dir.join("generated.csv");
            std::fs::write(&path, generate(&synth)?.to_csv()?)?;
            config.input = Some(path);
            config.k_mainstream = Some(synth.locations);
        }
    }

    let manifest = run_pipeline(&config)?;
    println!("{}", serde_json::to_string_pretty(&manifest.stats)?);
    for t in &manifest.timings {
        println!("{:>10} {:>8.1} ms", t.stage.name(), t.millis);
    }

    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(output_dir.join(CLUSTERS))?)?;
    for cluster in report["clusters"].as_array().into_iter().flatten() {
        let members: Vec<&str> = cluster["members"]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(|m| m["id"].as_str())
            .collect();
        println!("cluster {}: {}", cluster["cluster"], members.join(" "));
    }
    println!("artifacts in {}", output_dir.display());
    Ok(())
}
