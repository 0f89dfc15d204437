use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::community::{Symmetrize, DEFAULT_MIN_CLUSTER_SIZE, DEFAULT_RESOLUTION, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::ingest::{InputFormat, DEFAULT_MAX_BAD_FRACTION};
use crate::measures::Measure;
use crate::trips::{DEFAULT_MAX_GAP_DAYS, DEFAULT_MIN_TRIP_LEN};

pub const DEFAULT_KLOSGEN_THRESHOLD: f64 = 0.1;

/// `None` means "derive from the data", written as `auto`.
mod auto_or_number {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<usize>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(n) => s.serialize_u64(*n as u64),
            None => s.serialize_str("auto"),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(usize),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<usize>, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Number(n) => Ok(Some(n)),
            Raw::Text(t) => super::parse_auto(&t).map_err(serde::de::Error::custom),
        }
    }
}

fn parse_auto(text: &str) -> Result<Option<usize>> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    t.parse()
        .map(Some)
        .map_err(|_| Error::Config(format!("expected `auto` or a count, got `{t}`")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub format: InputFormat,
    pub max_bad_fraction: f64,
    pub max_gap_days: i64,
    pub min_trip_len: usize,
    pub dedup_consecutive: bool,
    pub min_support_count: u64,
    pub weight_measure: Measure,
    pub klosgen_threshold: f64,
    #[serde(with = "auto_or_number")]
    pub k_mainstream: Option<usize>,
    #[serde(with = "auto_or_number")]
    pub sphere_distance: Option<usize>,
    pub symmetrize: Symmetrize,
    pub resolution: f64,
    pub seed: u64,
    pub min_cluster_size: usize,
    pub best_of_n: usize,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            format: InputFormat::Csv,
            max_bad_fraction: DEFAULT_MAX_BAD_FRACTION,
            max_gap_days: DEFAULT_MAX_GAP_DAYS,
            min_trip_len: DEFAULT_MIN_TRIP_LEN,
            dedup_consecutive: false,
            min_support_count: 1,
            weight_measure: Measure::Klosgen,
            klosgen_threshold: DEFAULT_KLOSGEN_THRESHOLD,
            k_mainstream: None,
            sphere_distance: None,
            symmetrize: Symmetrize::Mean,
            resolution: DEFAULT_RESOLUTION,
            seed: DEFAULT_SEED,
            min_cluster_size: DEFAULT_MIN_CLUSTER_SIZE,
            best_of_n: 1,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

impl PipelineConfig {
    /// Sets one field by name. Dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "input" => self.input = Some(PathBuf::from(value.trim())),
            "format" => self.format = value.parse()?,
            "max_bad_fraction" => self.max_bad_fraction = parse(&key, value)?,
            "max_gap_days" => self.max_gap_days = parse(&key, value)?,
            "min_trip_len" => self.min_trip_len = parse(&key, value)?,
            "dedup_consecutive" => self.dedup_consecutive = parse(&key, value)?,
            "min_support_count" => self.min_support_count = parse(&key, value)?,
            "weight_measure" => self.weight_measure = value.parse()?,
            "klosgen_threshold" => self.klosgen_threshold = parse(&key, value)?,
            "k_mainstream" => self.k_mainstream = parse_auto(value)?,
            "sphere_distance" => self.sphere_distance = parse_auto(value)?,
            "symmetrize" => self.symmetrize = value.parse()?,
            "resolution" => self.resolution = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "min_cluster_size" => self.min_cluster_size = parse(&key, value)?,
            "best_of_n" => self.best_of_n = parse(&key, value)?,
            "output_dir" | "out" => self.output_dir = PathBuf::from(value.trim()),
            other => return Err(Error::Config(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    /// Applies a configuration document on top of `self`: either a JSON
    /// object with field names, or flat `key = value` lines (`#` comments).
    pub fn apply_document(&mut self, text: &str) -> Result<()> {
        if text.trim_start().starts_with('{') {
            let doc: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text)?;
            for (key, value) in doc {
                let value = match value {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                self.set(&key, &value)?;
            }
            return Ok(());
        }
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", no + 1))
            })?;
            self.set(key, value.trim().trim_matches('"'))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut config = PipelineConfig::default();
        config.apply_document(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(0.0..=1.0).contains(&self.max_bad_fraction) {
            return fail("max_bad_fraction must lie in [0, 1]");
        }
        if self.max_gap_days < 0 {
            return fail("max_gap_days must be non-negative");
        }
        if self.min_trip_len == 0 {
            return fail("min_trip_len must be at least 1");
        }
        if self.min_support_count == 0 {
            return fail("min_support_count must be at least 1");
        }
        if !self.klosgen_threshold.is_finite() {
            return fail("klosgen_threshold must be finite");
        }
        if self.k_mainstream == Some(0) {
            return fail("k_mainstream must be at least 1");
        }
        if self.sphere_distance == Some(0) {
            return fail("sphere_distance must be at least 1");
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return fail("resolution must be positive");
        }
        if self.min_cluster_size == 0 {
            return fail("min_cluster_size must be at least 1");
        }
        if self.best_of_n == 0 {
            return fail("best_of_n must be at least 1");
        }
        Ok(())
    }
}
