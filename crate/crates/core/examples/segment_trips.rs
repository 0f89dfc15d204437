//! Cuts one user's review timeline into trips, merges trips separated by a
//! short break, and keeps the sequences long enough to mine.
//!
//! ```text
//! cargo run --example segment_trips
//! ```

use chrono::NaiveDate;
use tourmine::ingest::{Category, Review, UserTimeline};
use tourmine::trips::{
    break_days, build_sequence_dataset, can_merge, merge_trips, segment_trips,
    DEFAULT_MAX_GAP_DAYS, DEFAULT_MIN_TRIP_LEN,
};

fn review(day: &str, location: &str, country: &str) -> Review {
    Review {
        user_id: "ana".into(),
        location_id: location.into(),
        location_name: location.into(),
        latitude: 48.85,
        longitude: 2.35,
        category: Category::Attraction,
        rating: None,
        date: NaiveDate::parse_from_str(day, "%Y-%m-%d").expect("valid date"),
        country: country.into(),
        nationality: None,
        age: None,
    }
}

fn main() {
    let timeline = UserTimeline {
        user_id: "ana".into(),
        reviews: vec![
            review("2016-05-01", "eiffel", "FR"),
            review("2016-05-02", "louvre", "FR"),
            review("2016-05-03", "orsay", "FR"),
            // two quiet days, then the same stay goes on
            review("2016-05-06", "notre_dame", "FR"),
            review("2016-05-07", "montmartre", "FR"),
            review("2016-05-08", "sacre_coeur", "FR"),
            // a month later, a separate trip that starts abroad
            review("2016-06-10", "sagrada", "ES"),
            review("2016-06-11", "louvre", "FR"),
        ],
    };

    let trips = segment_trips(&timeline);
    println!("{} trips after segmentation", trips.len());
    for pair in trips.windows(2) {
        println!(
            "break of {} days, mergeable: {}",
            break_days(&pair[0], &pair[1]),
            can_merge(&pair[0], &pair[1], DEFAULT_MAX_GAP_DAYS)
        );
    }

    let merged = merge_trips(trips, DEFAULT_MAX_GAP_DAYS);
    for trip in &merged {
        let path: Vec<&str> = trip.location_ids().collect();
        println!("{} .. {}: {}", trip.start_date(), trip.end_date(), path.join(" -> "));
    }

    let dataset = build_sequence_dataset(&merged, DEFAULT_MIN_TRIP_LEN, false);
    println!(
        "{} of {} trips reach {} reviews",
        dataset.count(),
        merged.len(),
        DEFAULT_MIN_TRIP_LEN
    );
}
