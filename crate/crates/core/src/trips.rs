//! Trip segmentation, merging across short breaks, and the sequence dataset.

use std::io::{BufRead, Write};

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::UserTimeline;

pub const DEFAULT_MAX_GAP_DAYS: i64 = 7;
/// Trips must have more than three reviews.
pub const DEFAULT_MIN_TRIP_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Visit {
    pub location_id: String,
    pub date: NaiveDate,
    pub country: String,
}

/// A run of reviews by one user. Never empty; dates are non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trip {
    pub user_id: String,
    visits: Vec<Visit>,
}

impl Trip {
    /// Returns `None` for an empty visit list or out-of-order dates.
    pub fn new(user_id: impl Into<String>, visits: Vec<Visit>) -> Option<Trip> {
        if visits.is_empty() || visits.windows(2).any(|w| w[0].date > w[1].date) {
            return None;
        }
        Some(Trip {
            user_id: user_id.into(),
            visits,
        })
    }

    pub fn visits(&self) -> &[Visit] {
        &self.visits
    }

    pub fn into_visits(self) -> Vec<Visit> {
        self.visits
    }

    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start_date(&self) -> NaiveDate {
        self.visits[0].date
    }

    pub fn end_date(&self) -> NaiveDate {
        self.visits[self.visits.len() - 1].date
    }

    /// Duration in days, counting both ends.
    pub fn duration_days(&self) -> i64 {
        (self.end_date() - self.start_date()).num_days() + 1
    }

    pub fn first_country(&self) -> &str {
        &self.visits[0].country
    }

    pub fn last_country(&self) -> &str {
        &self.visits[self.visits.len() - 1].country
    }

    pub fn countries(&self) -> impl Iterator<Item = &str> {
        self.visits.iter().map(|v| v.country.as_str())
    }

    pub fn location_ids(&self) -> impl Iterator<Item = &str> {
        self.visits.iter().map(|v| v.location_id.as_str())
    }
}

/// Number of whole days strictly between the end of `earlier` and the start of `later`.
pub fn break_days(earlier: &Trip, later: &Trip) -> i64 {
    (later.start_date() - earlier.end_date()).num_days() - 1
}

/// Splits a date-sorted timeline into trips; a day without any review breaks the trip.
pub fn segment_trips(timeline: &UserTimeline) -> Vec<Trip> {
    let mut trips = Vec::new();
    let mut current: Vec<Visit> = Vec::new();
    for review in &timeline.reviews {
        if let Some(last) = current.last() {
            if (review.date - last.date).num_days() >= 2 {
                trips.push(Trip {
                    user_id: timeline.user_id.clone(),
                    visits: std::mem::take(&mut current),
                });
            }
        }
        current.push(Visit {
            location_id: review.location_id.clone(),
            date: review.date,
            country: review.country.clone(),
        });
    }
    if !current.is_empty() {
        trips.push(Trip {
            user_id: timeline.user_id.clone(),
            visits: current,
        });
    }
    trips
}

/// Whether the break between two consecutive trips may be cancelled.
pub fn can_merge(earlier: &Trip, later: &Trip, max_gap_days: i64) -> bool {
    let gap = break_days(earlier, later);
    gap <= max_gap_days
        && gap <= earlier.duration_days()
        && gap <= later.duration_days()
        && earlier.last_country() == later.first_country()
}

/// Merges consecutive trips of one user until no further merge applies.
///
/// A merge only lengthens trips and never changes the countries at the outer
/// ends, so a merge that is legal stays legal: repeated left-to-right passes
/// reach the unique fixed point.
pub fn merge_trips(trips: Vec<Trip>, max_gap_days: i64) -> Vec<Trip> {
    let mut trips = trips;
    loop {
        let before = trips.len();
        let mut merged: Vec<Trip> = Vec::with_capacity(trips.len());
        for trip in trips {
            match merged.last_mut() {
                Some(acc) if can_merge(acc, &trip, max_gap_days) => acc.visits.extend(trip.visits),
                _ => merged.push(trip),
            }
        }
        trips = merged;
        if trips.len() == before {
            return trips;
        }
    }
}

/// Location sequences, one per kept trip, in visit order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SequenceDataset {
    sequences: Vec<Vec<String>>,
}

impl SequenceDataset {
    pub fn new(sequences: Vec<Vec<String>>) -> Self {
        SequenceDataset { sequences }
    }

    pub fn sequences(&self) -> &[Vec<String>] {
        &self.sequences
    }

    pub fn count(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn total_items(&self) -> usize {
        self.sequences.iter().map(Vec::len).sum()
    }

    /// Mean sequence length, zero for an empty dataset.
    pub fn avg_length(&self) -> f64 {
        if self.sequences.is_empty() {
            0.0
        } else {
            self.total_items() as f64 / self.sequences.len() as f64
        }
    }

    /// One sequence per line, location ids separated by tabs.
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> Result<()> {
        for seq in &self.sequences {
            writeln!(sink, "{}", seq.join("\t"))?;
        }
        sink.flush()?;
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(source: R) -> Result<Self> {
        let mut sequences = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let seq: Vec<String> = line.split('\t').map(str::to_string).collect();
            if seq.iter().any(String::is_empty) {
                return Err(Error::Format {
                    format: "sequence dump",
                    line: idx + 1,
                    reason: "empty location id".into(),
                });
            }
            sequences.push(seq);
        }
        Ok(SequenceDataset { sequences })
    }
}

/// Turns finalized trips into the sequence dataset, optionally collapsing
/// immediate repeats, then drops sequences shorter than `min_trip_len`.
pub fn build_sequence_dataset(
    trips: &[Trip],
    min_trip_len: usize,
    dedup_consecutive: bool,
) -> SequenceDataset {
    let sequences = trips
        .iter()
        .map(|trip| {
            let mut seq: Vec<String> = trip.location_ids().map(str::to_string).collect();
            if dedup_consecutive {
                seq.dedup();
            }
            seq
        })
        .filter(|seq| seq.len() >= min_trip_len)
        .collect();
    SequenceDataset { sequences }
}
