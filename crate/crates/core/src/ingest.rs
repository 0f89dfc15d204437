//! Review parsing and per-user timelines.
//!
//! Input is either CSV with the header
//! `user_id,location_id,location_name,latitude,longitude,category,rating,date,country`
//! or JSON lines carrying the same field names. Malformed records are collected
//! with their line number instead of aborting the run, unless too many of them
//! are bad for the dataset to be trusted.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default share of malformed records above which a dataset is rejected.
pub const DEFAULT_MAX_BAD_FRACTION: f64 = 0.5;

pub const CSV_HEADER: [&str; 9] = [
    "user_id",
    "location_id",
    "location_name",
    "latitude",
    "longitude",
    "category",
    "rating",
    "date",
    "country",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Hotel,
    Restaurant,
    Attraction,
    Other,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Hotel => "hotel",
            Category::Restaurant => "restaurant",
            Category::Attraction => "attraction",
            Category::Other => "other",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hotel" => Ok(Category::Hotel),
            "restaurant" => Ok(Category::Restaurant),
            "attraction" => Ok(Category::Attraction),
            "other" | "" => Ok(Category::Other),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

/// One user's review of one location on one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub user_id: String,
    pub location_id: String,
    pub location_name: String,
    pub latitude: f64,
    pub longitude: f64,
    pub category: Category,
    pub rating: Option<f64>,
    pub date: NaiveDate,
    pub country: String,
    /// Pass-through user attributes; accepted but not used downstream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nationality: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Jsonl,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(InputFormat::Csv),
            "jsonl" | "ndjson" => Ok(InputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown input format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedReviews {
    pub reviews: Vec<Review>,
    pub errors: Vec<RecordError>,
}

/// Raw field values before validation. Every field is optional so that a
/// missing column is reported as a record error rather than a parse failure.
#[derive(Debug, Default, Deserialize)]
struct RawRecord {
    user_id: Option<String>,
    location_id: Option<String>,
    location_name: Option<String>,
    latitude: Option<RawValue>,
    longitude: Option<RawValue>,
    category: Option<String>,
    rating: Option<RawValue>,
    date: Option<String>,
    country: Option<String>,
    nationality: Option<String>,
    age: Option<RawValue>,
}

/// JSON sources may carry numbers as numbers or strings.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawValue {
    Number(f64),
    Text(String),
}

impl RawValue {
    fn as_f64(&self, field: &str) -> Result<Option<f64>, String> {
        match self {
            RawValue::Number(x) => Ok(Some(*x)),
            RawValue::Text(s) if s.trim().is_empty() => Ok(None),
            RawValue::Text(s) => s
                .trim()
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("{field}: `{s}` is not a number")),
        }
    }
}

fn required<'a>(value: &'a Option<String>, field: &str) -> Result<&'a str, String> {
    match value.as_deref().map(str::trim) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(format!("missing {field}")),
    }
}

fn identifier(value: &Option<String>, field: &str) -> Result<String, String> {
    let v = required(value, field)?;
    if v.contains(['\t', '\n', '\r']) {
        return Err(format!("{field} contains a control separator"));
    }
    Ok(v.to_string())
}

fn number(value: &Option<RawValue>, field: &str) -> Result<Option<f64>, String> {
    match value {
        None => Ok(None),
        Some(raw) => raw.as_f64(field),
    }
}

/// Parses a calendar date, dropping any time-of-day component.
pub fn parse_day(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    let day = match raw.char_indices().nth(10) {
        Some((i, c)) if c == 'T' || c == ' ' => &raw[..i],
        _ => raw,
    };
    NaiveDate::parse_from_str(day, "%Y-%m-%d").ok()
}

impl RawRecord {
    fn validate(self) -> Result<Review, String> {
        let user_id = identifier(&self.user_id, "user_id")?;
        let location_id = identifier(&self.location_id, "location_id")?;
        let location_name = self
            .location_name
            .as_deref()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .unwrap_or(&location_id)
            .to_string();
        let latitude = number(&self.latitude, "latitude")?.ok_or("missing latitude")?;
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(format!("latitude {latitude} out of range"));
        }
        let longitude = number(&self.longitude, "longitude")?.ok_or("missing longitude")?;
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(format!("longitude {longitude} out of range"));
        }
        let category = self
            .category
            .as_deref()
            .unwrap_or("")
            .parse::<Category>()?;
        let rating = number(&self.rating, "rating")?;
        if let Some(r) = rating {
            if !(1.0..=5.0).contains(&r) {
                return Err(format!("rating {r} out of range"));
            }
        }
        let raw_date = required(&self.date, "date")?;
        let date = parse_day(raw_date).ok_or_else(|| format!("unparseable date `{raw_date}`"))?;
        let country = required(&self.country, "country")?.to_ascii_uppercase();
        let nationality = self.nationality.filter(|s| !s.trim().is_empty());
        let age = match number(&self.age, "age")? {
            Some(a) if a >= 0.0 && a.fract() == 0.0 => Some(a as u32),
            Some(a) => return Err(format!("age {a} is not a whole number")),
            None => None,
        };
        Ok(Review {
            user_id,
            location_id,
            location_name,
            latitude,
            longitude,
            category,
            rating,
            date,
            country,
            nationality,
            age,
        })
    }
}

/// Parses a review dataset. Each malformed record becomes a [`RecordError`]
/// carrying its physical line number (the CSV header is line 1).
///
/// Fails only on unreadable input, or when the share of malformed records
/// exceeds `max_bad_fraction`.
pub fn parse_reviews<R: Read>(
    source: R,
    format: InputFormat,
    max_bad_fraction: f64,
) -> Result<ParsedReviews> {
    let parsed = match format {
        InputFormat::Csv => parse_csv(source)?,
        InputFormat::Jsonl => parse_jsonl(source)?,
    };
    let bad = parsed.errors.len();
    let total = bad + parsed.reviews.len();
    if total > 0 && bad as f64 > max_bad_fraction * total as f64 {
        return Err(Error::CorruptDataset {
            bad,
            total,
            max_fraction: max_bad_fraction,
        });
    }
    Ok(parsed)
}

fn parse_csv<R: Read>(source: R) -> Result<ParsedReviews> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::Fields)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let mut out = ParsedReviews::default();
    if headers.is_empty() {
        return Ok(out);
    }
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line() as usize;
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(line, |p| p.line() as usize);
                if record.iter().all(str::is_empty) {
                    continue;
                }
                let validated = record
                    .deserialize::<RawRecord>(Some(&headers))
                    .map_err(|e| e.to_string())
                    .and_then(RawRecord::validate);
                match validated {
                    Ok(review) => out.reviews.push(review),
                    Err(reason) => out.errors.push(RecordError { line, reason }),
                }
            }
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => {
                let line = e.position().map_or(line, |p| p.line() as usize);
                out.errors.push(RecordError {
                    line,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

fn parse_jsonl<R: Read>(source: R) -> Result<ParsedReviews> {
    let mut out = ParsedReviews::default();
    for (idx, line) in BufReader::new(source).lines().enumerate() {
        let line_no = idx + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        let validated = serde_json::from_str::<RawRecord>(&text)
            .map_err(|e| e.to_string())
            .and_then(RawRecord::validate);
        match validated {
            Ok(review) => out.reviews.push(review),
            Err(reason) => out.errors.push(RecordError {
                line: line_no,
                reason,
            }),
        }
    }
    Ok(out)
}

/// Writes reviews in the canonical CSV layout accepted by [`parse_reviews`].
pub fn write_reviews_csv<W: std::io::Write>(reviews: &[Review], sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(CSV_HEADER)?;
    for r in reviews {
        let rating = r.rating.map(|x| x.to_string()).unwrap_or_default();
        writer.write_record([
            r.user_id.as_str(),
            r.location_id.as_str(),
            r.location_name.as_str(),
            &r.latitude.to_string(),
            &r.longitude.to_string(),
            r.category.as_str(),
            &rating,
            &r.date.format("%Y-%m-%d").to_string(),
            r.country.as_str(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserTimeline {
    pub user_id: String,
    pub reviews: Vec<Review>,
}

/// Groups reviews by user, sorted by user id; within a user reviews are sorted
/// by date with ties kept in input order.
pub fn build_timelines(reviews: Vec<Review>) -> Vec<UserTimeline> {
    let mut by_user: BTreeMap<String, Vec<Review>> = BTreeMap::new();
    for review in reviews {
        by_user
            .entry(review.user_id.clone())
            .or_default()
            .push(review);
    }
    by_user
        .into_iter()
        .map(|(user_id, mut reviews)| {
            reviews.sort_by_key(|r| r.date);
            UserTimeline { user_id, reviews }
        })
        .collect()
}
