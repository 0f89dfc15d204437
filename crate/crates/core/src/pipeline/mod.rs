//! End-to-end runs over a working directory of stage artifacts.
//!
//! Every stage reads its inputs from and writes its outputs to
//! [`PipelineConfig::output_dir`], so a run can be resumed from any stage.

mod config;
pub mod synth;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{PipelineConfig, DEFAULT_KLOSGEN_THRESHOLD};

use crate::community::{
    filter_clusters, louvain_best_of, matrix_to_weighted_graph, profile_report, ClusterReport,
};
use crate::error::{Error, Result};
use crate::graph::{
    build_graph, node_supports, read_dot, select_mainstream, write_dot, write_edge_csv,
    write_graphml, ImportedGraph,
};
use crate::influence::{
    read_spheres_json, similarity_matrix, sphere_distance, spheres_of_influence,
    write_spheres_json, SimilarityMatrix, SphereOfInfluence,
};
use crate::ingest::{build_timelines, parse_reviews, write_reviews_csv, InputFormat, Review};
use crate::measures::{measure_rules, write_measures_csv};
use crate::rules::{mine_rules, read_rules_csv, write_rules_csv};
use crate::trips::{build_sequence_dataset, merge_trips, segment_trips, SequenceDataset};

pub const REVIEWS: &str = "reviews.csv";
pub const RECORD_ERRORS: &str = "record_errors.csv";
pub const LOCATIONS: &str = "locations.csv";
pub const SEQUENCES: &str = "sequences.tsv";
pub const RULES: &str = "rules.csv";
pub const MEASURES: &str = "measures.csv";
pub const GRAPH_DOT: &str = "graph.dot";
pub const GRAPH_GRAPHML: &str = "graph.graphml";
pub const EDGES: &str = "edges.csv";
pub const SPHERES: &str = "spheres.json";
pub const SIMILARITY: &str = "similarity.csv";
pub const CLUSTERS: &str = "clusters.json";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Trips,
    Mine,
    Measure,
    Graph,
    Spheres,
    Similarity,
    Cluster,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Trips,
        Stage::Mine,
        Stage::Measure,
        Stage::Graph,
        Stage::Spheres,
        Stage::Similarity,
        Stage::Cluster,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Trips => "trips",
            Stage::Mine => "mine",
            Stage::Measure => "measure",
            Stage::Graph => "graph",
            Stage::Spheres => "spheres",
            Stage::Similarity => "similarity",
            Stage::Cluster => "cluster",
        }
    }

    /// Files this stage writes into the working directory.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &[REVIEWS, RECORD_ERRORS, LOCATIONS],
            Stage::Trips => &[SEQUENCES],
            Stage::Mine => &[RULES],
            Stage::Measure => &[MEASURES],
            Stage::Graph => &[GRAPH_DOT, GRAPH_GRAPHML, EDGES],
            Stage::Spheres => &[SPHERES],
            Stage::Similarity => &[SIMILARITY],
            Stage::Cluster => &[CLUSTERS],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown stage `{s}`")))
    }
}

/// Counts gathered along a run. Stages that did not run leave zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub reviews: usize,
    pub record_errors: usize,
    pub users: usize,
    pub locations: usize,
    pub trips: usize,
    pub sequences: usize,
    pub avg_sequence_length: f64,
    pub rules: usize,
    pub graph_nodes: usize,
    pub graph_arcs: usize,
    pub mainstream_nodes: usize,
    pub mainstream_coverage: f64,
    pub arcs_above_threshold: usize,
    pub sphere_distance: usize,
    pub empty_spheres: usize,
    pub communities: usize,
    pub dropped_communities: usize,
    pub modularity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    pub stages: Vec<Stage>,
    pub stats: RunStats,
    pub timings: Vec<StageTiming>,
}

fn path(config: &PipelineConfig, file: &str) -> PathBuf {
    config.output_dir.join(file)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::file(path, e))
}

/// Writes to a sibling temporary file, then renames it into place so that a
/// failed stage never leaves a truncated artifact behind.
fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let tmp = path.with_extension("partial");
    let file = File::create(&tmp).map_err(|e| Error::file(&tmp, e))?;
    let mut sink = BufWriter::new(file);
    body(&mut sink)?;
    sink.flush().map_err(|e| Error::file(&tmp, e))?;
    drop(sink);
    fs::rename(&tmp, path).map_err(|e| Error::file(path, e))
}

fn read_sequences(config: &PipelineConfig) -> Result<SequenceDataset> {
    SequenceDataset::read_tsv(open(&path(config, SEQUENCES))?)
}

fn read_graph(config: &PipelineConfig) -> Result<ImportedGraph> {
    read_dot(open(&path(config, GRAPH_DOT))?)
}

fn read_location_names(config: &PipelineConfig) -> Result<HashMap<String, String>> {
    let file = path(config, LOCATIONS);
    if !file.exists() {
        return Ok(HashMap::new());
    }
    let mut reader = csv::Reader::from_reader(open(&file)?);
    let mut names = HashMap::new();
    for record in reader.records() {
        let record = record?;
        if let (Some(id), Some(name)) = (record.get(0), record.get(1)) {
            names.insert(id.to_string(), name.to_string());
        }
    }
    Ok(names)
}

fn write_locations<W: Write>(reviews: &[Review], sink: W) -> Result<()> {
    let mut first: BTreeMap<&str, &Review> = BTreeMap::new();
    for r in reviews {
        first.entry(&r.location_id).or_insert(r);
    }
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["location_id", "location_name", "category", "latitude", "longitude"])?;
    for (id, r) in first {
        w.write_record([
            id,
            &r.location_name,
            r.category.as_str(),
            &r.latitude.to_string(),
            &r.longitude.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn ingest(config: &PipelineConfig, stats: &mut RunStats) -> Result<()> {
    let input = config
        .input
        .as_deref()
        .ok_or_else(|| Error::Config("no input file given".into()))?;
    let parsed = parse_reviews(open(input)?, config.format, config.max_bad_fraction)?;
    for e in &parsed.errors {
        log::warn!("{}: line {}: {}", input.display(), e.line, e.reason);
    }
    stats.record_errors = parsed.errors.len();
    stats.reviews = parsed.reviews.len();
    write_file(&path(config, RECORD_ERRORS), |sink| {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["line", "reason"])?;
        for e in &parsed.errors {
            w.write_record([e.line.to_string(), e.reason.clone()])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let timelines = build_timelines(parsed.reviews);
    stats.users = timelines.len();
    let ordered: Vec<Review> = timelines.into_iter().flat_map(|t| t.reviews).collect();
    stats.locations = ordered
        .iter()
        .map(|r| r.location_id.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    write_file(&path(config, REVIEWS), |sink| write_reviews_csv(&ordered, sink))?;
    write_file(&path(config, LOCATIONS), |sink| write_locations(&ordered, sink))
}

fn trips(config: &PipelineConfig, stats: &mut RunStats) -> Result<()> {
    let parsed = parse_reviews(open(&path(config, REVIEWS))?, InputFormat::Csv, 0.0)?;
    let timelines = build_timelines(parsed.reviews);
    let trips: Vec<_> = timelines
        .iter()
        .flat_map(|t| merge_trips(segment_trips(t), config.max_gap_days))
        .collect();
    let dataset = build_sequence_dataset(&trips, config.min_trip_len, config.dedup_consecutive);
    stats.users = timelines.len();
    stats.trips = trips.len();
    stats.sequences = dataset.count();
    stats.avg_sequence_length = dataset.avg_length();
    write_file(&path(config, SEQUENCES), |sink| dataset.write_tsv(sink))
}

fn mine(config: &PipelineConfig, stats: &mut RunStats) -> Result<()> {
    let dataset = read_sequences(config)?;
    let rules = mine_rules(&dataset, config.min_support_count);
    stats.sequences = dataset.count();
    stats.rules = rules.len();
    write_file(&path(config, RULES), |sink| write_rules_csv(&rules, sink))
}

fn measure(config: &PipelineConfig, stats: &mut RunStats) -> Result<()> {
    let rules = read_rules_csv(open(&path(config, RULES))?)?;
    stats.rules = rules.len();
    let measured = measure_rules(&rules);
    write_file(&path(config, MEASURES), |sink| write_measures_csv(&measured, sink))
}

fn graph(config: &PipelineConfig, stats: &mut RunStats) -> Result<()> {
    let rules = read_rules_csv(open(&path(config, RULES))?)?;
    let supports = node_supports(&read_sequences(config)?);
    let names = read_location_names(config)?;
    let graph = build_graph(&measure_rules(&rules), config.weight_measure, &supports, &names)?;
    let selection = select_mainstream(&graph, config.k_mainstream);
    stats.graph_nodes = graph.node_count();
    stats.graph_arcs = graph.arc_count();
    stats.mainstream_nodes = selection.k;
    stats.mainstream_coverage = selection.coverage_fraction;
    log::info!(
        "graph: {} nodes, {} arcs, {} mainstream covering {:.3}",
        graph.node_count(),
        graph.arc_count(),
        selection.k,
        selection.coverage_fraction
    );
    write_file(&path(config, GRAPH_DOT), |sink| {
        write_dot(&graph, Some(&selection), sink)
    })?;
    write_file(&path(config, GRAPH_GRAPHML), |sink| {
        write_graphml(&graph, Some(&selection), sink)
    })?;
    write_file(&path(config, EDGES), |sink| write_edge_csv(&graph, sink))
}

fn resolve_distance(config: &PipelineConfig) -> Result<usize> {
    if let Some(d) = config.sphere_distance {
        return Ok(d);
    }
    match sphere_distance(&read_sequences(config)?) {
        Err(Error::EmptyDataset) => {
            log::warn!("no sequences to derive the sphere radius from; using 1");
            Ok(1)
        }
        other => other,
    }
}

fn coverage(imported: &ImportedGraph) -> f64 {
    let total: u64 = imported.graph.nodes().iter().map(|n| n.support).sum();
    let covered: u64 = imported
        .mainstream
        .iter()
        .filter_map(|id| imported.graph.node(id))
        .map(|n| n.support)
        .sum();
    if total == 0 {
        0.0
    } else {
        covered as f64 / total as f64
    }
}

fn spheres(config: &PipelineConfig, stats: &mut RunStats) -> Result<()> {
    let imported = read_graph(config)?;
    let pruned = imported.graph.threshold_subgraph(config.klosgen_threshold);
    let distance = if imported.mainstream.is_empty() {
        0
    } else {
        resolve_distance(config)?
    };
    let spheres = spheres_of_influence(&pruned, &imported.mainstream, distance)?;
    stats.graph_nodes = imported.graph.node_count();
    stats.graph_arcs = imported.graph.arc_count();
    stats.mainstream_nodes = imported.mainstream.len();
    stats.mainstream_coverage = coverage(&imported);
    stats.arcs_above_threshold = pruned.arc_count();
    stats.sphere_distance = distance;
    stats.empty_spheres = spheres.iter().filter(|s| s.is_empty()).count();
    if stats.empty_spheres > 0 {
        log::warn!(
            "{} of {} mainstream nodes have an empty sphere of influence",
            stats.empty_spheres,
            spheres.len()
        );
    }
    write_file(&path(config, SPHERES), |sink| write_spheres_json(&spheres, sink))
}

fn read_spheres(config: &PipelineConfig) -> Result<Vec<SphereOfInfluence>> {
    read_spheres_json(open(&path(config, SPHERES))?)
}

fn similarity(config: &PipelineConfig, _stats: &mut RunStats) -> Result<()> {
    let matrix = similarity_matrix(&read_spheres(config)?);
    write_file(&path(config, SIMILARITY), |sink| matrix.write_csv(sink))
}

/// Clusters the similarity matrix of the spheres and profiles the result.
pub fn cluster_report(
    matrix: &SimilarityMatrix,
    graph: &ImportedGraph,
    config: &PipelineConfig,
) -> ClusterReport {
    let weighted = matrix_to_weighted_graph(matrix, config.symmetrize);
    let assignment = louvain_best_of(&weighted, config.resolution, config.seed, config.best_of_n);
    let assignment = filter_clusters(assignment, config.min_cluster_size);
    profile_report(&assignment, matrix, &graph.graph)
}

fn cluster(config: &PipelineConfig, stats: &mut RunStats) -> Result<()> {
    let matrix = similarity_matrix(&read_spheres(config)?);
    let report = cluster_report(&matrix, &read_graph(config)?, config);
    stats.communities = report.clusters.len();
    stats.dropped_communities = report.dropped.len();
    stats.modularity = report.modularity;
    write_file(&path(config, CLUSTERS), |sink| {
        serde_json::to_writer_pretty(&mut *sink, &report)?;
        writeln!(sink)?;
        Ok(())
    })
}

/// Runs a single stage against the working directory.
pub fn run_stage(stage: Stage, config: &PipelineConfig, stats: &mut RunStats) -> Result<()> {
    fs::create_dir_all(&config.output_dir).map_err(|e| Error::file(&config.output_dir, e))?;
    let result = match stage {
        Stage::Ingest => ingest(config, stats),
        Stage::Trips => trips(config, stats),
        Stage::Mine => mine(config, stats),
        Stage::Measure => measure(config, stats),
        Stage::Graph => graph(config, stats),
        Stage::Spheres => spheres(config, stats),
        Stage::Similarity => similarity(config, stats),
        Stage::Cluster => cluster(config, stats),
    };
    result.map_err(|e| e.in_stage(stage.name()))
}

/// Runs `stages` in order and writes `manifest.json`.
pub fn run_stages(config: &PipelineConfig, stages: &[Stage]) -> Result<RunManifest> {
    config.validate()?;
    let mut stats = RunStats::default();
    let mut timings = Vec::with_capacity(stages.len());
    for &stage in stages {
        let started = Instant::now();
        log::info!("running stage {stage}");
        run_stage(stage, config, &mut stats)?;
        timings.push(StageTiming {
            stage,
            millis: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        stages: stages.to_vec(),
        stats,
        timings,
    };
    write_file(&path(config, MANIFEST), |sink| {
        serde_json::to_writer_pretty(&mut *sink, &manifest)?;
        writeln!(sink)?;
        Ok(())
    })?;
    Ok(manifest)
}

/// Runs every stage from ingestion to clustering.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunManifest> {
    run_stages(config, &Stage::ALL)
}

/// Runs `first` and every later stage, reusing artifacts already present.
pub fn run_from(config: &PipelineConfig, first: Stage) -> Result<RunManifest> {
    let stages: Vec<Stage> = Stage::ALL.into_iter().filter(|&s| s >= first).collect();
    run_stages(config, &stages)
}
