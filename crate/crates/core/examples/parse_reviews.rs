//! Parses a small review log, reports the malformed records by line number
//! and groups the rest into per-user timelines.
//!
//! ```text
//! cargo run --example parse_reviews
//! ```

use std::error::Error;

use tourmine::ingest::{build_timelines, parse_reviews, InputFormat};

const LOG: &str = "\
user_id,location_id,location_name,latitude,longitude,category,rating,date,country
ana,louvre,Musée du Louvre,48.8606,2.3376,attraction,5,2016-05-02,FR
ana,eiffel,Tour Eiffel,48.8584,2.2945,attraction,4,2016-05-01,FR
ben,bistrot,Le Petit Bistrot,48.85,2.35,restaurant,,2016-05-03T19:30:00,FR
ben,ritz,Hôtel Ritz,48.8682,2.3290,hotel,5,someday,FR
ana,orsay,Musée d'Orsay,48.86,2.3266,museum,4,2016-05-03,FR
ben,eiffel,Tour Eiffel,48.8584,2.2945,attraction,3,2016-05-04,FR
";

fn main() -> Result<(), Box<dyn Error>> {
    let parsed = parse_reviews(LOG.as_bytes(), InputFormat::Csv, 0.5)?;
    println!("{} reviews parsed", parsed.reviews.len());
    for e in &parsed.errors {
        println!("line {}: {}", e.line, e.reason);
    }
    for timeline in build_timelines(parsed.reviews) {
        let days: Vec<String> = timeline
            .reviews
            .iter()
            .map(|r| format!("{} {}", r.date, r.location_id))
            .collect();
        println!("{}: {}", timeline.user_id, days.join(", "));
    }
    Ok(())
}
