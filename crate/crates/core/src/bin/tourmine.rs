use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tourmine::pipeline::synth::{generate, SynthConfig};
use tourmine::pipeline::{run_from, run_pipeline, run_stages, PipelineConfig, Stage};
use tourmine::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "tourmine", version, about = "Tourist movement mining from review logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate reviews; write normalised reviews and locations.
    Ingest(Settings),
    /// Segment and merge trips; write the sequence dataset.
    Trips(Settings),
    /// Mine direct-follow rules from the sequences.
    Mine(Settings),
    /// Score every rule with all interest measures.
    Measure(Settings),
    /// Build the movement graph and flag mainstream locations.
    Graph(Settings),
    /// Compute spheres of influence of the mainstream locations.
    Spheres(Settings),
    /// Write the sphere similarity matrix.
    Similarity(Settings),
    /// Detect communities of mainstream locations.
    Cluster(Settings),
    /// Run every stage, or every stage from `--from` on.
    Run {
        #[command(flatten)]
        settings: Settings,
        /// First stage to run; earlier artifacts are read from the output directory.
        #[arg(long, value_name = "STAGE")]
        from: Option<Stage>,
    },
    /// Generate a synthetic review CSV with planted communities.
    Synth(SynthArgs),
}

/// Pipeline settings. Flags override the config file, which overrides defaults.
#[derive(Args)]
struct Settings {
    /// Config file, flat key = value or JSON; flags override it.
    #[arg(long, short, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Review file.
    #[arg(long, short)]
    input: Option<String>,
    /// Input format: csv or jsonl [default: csv].
    #[arg(long)]
    format: Option<String>,
    /// Output directory for all artifacts [default: out].
    #[arg(long, short)]
    out: Option<String>,
    /// Largest tolerated share of malformed records [default: 0.5].
    #[arg(long)]
    max_bad_fraction: Option<String>,
    /// Longest break, in days, that can join two trips [default: 7].
    #[arg(long)]
    max_gap_days: Option<String>,
    /// Fewest reviews a sequence must keep [default: 4].
    #[arg(long)]
    min_trip_len: Option<String>,
    /// Collapse immediate repeats of a location [default: false].
    #[arg(long)]
    dedup_consecutive: Option<String>,
    /// Fewest sequences a rule must occur in [default: 1].
    #[arg(long)]
    min_support_count: Option<String>,
    /// Arc weight: klosgen, support, confidence, lift, ... [default: klosgen].
    #[arg(long)]
    weight_measure: Option<String>,
    /// Keep arcs weighing strictly more than this [default: 0.1].
    #[arg(long)]
    klosgen_threshold: Option<String>,
    /// Number of mainstream locations, or auto for the elbow [default: auto].
    #[arg(long, value_name = "N|auto")]
    k_mainstream: Option<String>,
    /// Hop radius of spheres, or auto from mean sequence length [default: auto].
    #[arg(long, value_name = "D|auto")]
    sphere_distance: Option<String>,
    /// Matrix symmetrization: mean, max or min [default: mean].
    #[arg(long)]
    symmetrize: Option<String>,
    /// Modularity resolution [default: 1.0].
    #[arg(long)]
    resolution: Option<String>,
    /// Seed for the Louvain node order [default: 42].
    #[arg(long)]
    seed: Option<String>,
    /// Smallest community reported as a cluster [default: 3].
    #[arg(long)]
    min_cluster_size: Option<String>,
    /// Louvain runs to keep the best of [default: 1].
    #[arg(long)]
    best_of_n: Option<String>,
}

impl Settings {
    fn resolve(&self) -> Result<PipelineConfig, Error> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        let overrides = [
            ("input", &self.input),
            ("format", &self.format),
            ("output_dir", &self.out),
            ("max_bad_fraction", &self.max_bad_fraction),
            ("max_gap_days", &self.max_gap_days),
            ("min_trip_len", &self.min_trip_len),
            ("dedup_consecutive", &self.dedup_consecutive),
            ("min_support_count", &self.min_support_count),
            ("weight_measure", &self.weight_measure),
            ("klosgen_threshold", &self.klosgen_threshold),
            ("k_mainstream", &self.k_mainstream),
            ("sphere_distance", &self.sphere_distance),
            ("symmetrize", &self.symmetrize),
            ("resolution", &self.resolution),
            ("seed", &self.seed),
            ("min_cluster_size", &self.min_cluster_size),
            ("best_of_n", &self.best_of_n),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                config.set(key, value)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1_000)]
    users: usize,
    #[arg(long, default_value_t = 100)]
    locations: usize,
    #[arg(long, default_value_t = 4)]
    communities: usize,
    #[arg(long, default_value_t = 20.0)]
    intra_odds: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn execute(command: Command) -> Result<(), Error> {
    let stage = |stage: Stage, settings: Settings| -> Result<(), Error> {
        run_stages(&settings.resolve()?, &[stage]).map(drop)
    };
    match command {
        Command::Ingest(s) => stage(Stage::Ingest, s),
        Command::Trips(s) => stage(Stage::Trips, s),
        Command::Mine(s) => stage(Stage::Mine, s),
        Command::Measure(s) => stage(Stage::Measure, s),
        Command::Graph(s) => stage(Stage::Graph, s),
        Command::Spheres(s) => stage(Stage::Spheres, s),
        Command::Similarity(s) => stage(Stage::Similarity, s),
        Command::Cluster(s) => stage(Stage::Cluster, s),
        Command::Run { settings, from } => {
            let config = settings.resolve()?;
            let manifest = match from {
                Some(first) => run_from(&config, first)?,
                None => run_pipeline(&config)?,
            };
            println!("{}", serde_json::to_string_pretty(&manifest.stats)?);
            Ok(())
        }
        Command::Synth(args) => {
            let dataset = generate(&SynthConfig {
                users: args.users,
                locations: args.locations,
                communities: args.communities,
                intra_odds: args.intra_odds,
                seed: args.seed,
                ..SynthConfig::default()
            })?;
            let csv = dataset.to_csv()?;
            match args.out {
                Some(path) => std::fs::write(&path, csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Internal => 3,
            })
        }
    }
}
