//! Synthetic review corpora with planted communities of locations.
//!
//! Each community is a ring of locations. A simulated trip starts at a random
//! location and mostly steps to the next location on its ring, sometimes to
//! another location of the same community, and rarely to a location of a
//! different community.

use chrono::{Days, NaiveDate};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::community::adjusted_rand_index;
use crate::error::{Error, Result};
use crate::ingest::{write_reviews_csv, Category, Review};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub users: usize,
    pub locations: usize,
    pub communities: usize,
    /// Odds of an intra-community step against a jump to another community.
    pub intra_odds: f64,
    /// Within a community, probability of stepping to the ring successor.
    pub successor_prob: f64,
    pub min_trips_per_user: usize,
    pub max_trips_per_user: usize,
    pub min_trip_days: usize,
    pub max_trip_days: usize,
    /// Idle days between two trips of the same user.
    pub days_between_trips: u64,
    pub start: NaiveDate,
    pub country: String,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            users: 1_000,
            locations: 100,
            communities: 4,
            intra_odds: 20.0,
            successor_prob: 0.8,
            min_trips_per_user: 1,
            max_trips_per_user: 3,
            min_trip_days: 4,
            max_trip_days: 7,
            days_between_trips: 30,
            start: NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid date"),
            country: "FR".to_string(),
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub reviews: Vec<Review>,
    /// Location ids of every planted community, in ring order.
    pub planted: Vec<Vec<String>>,
}

impl SyntheticDataset {
    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        write_reviews_csv(&self.reviews, &mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV writer emits UTF-8"))
    }

    /// Planted community index of a location id.
    pub fn community_of(&self, location_id: &str) -> Option<usize> {
        self.planted
            .iter()
            .position(|c| c.iter().any(|l| l == location_id))
    }

    /// Adjusted Rand index between the planted communities and `found`,
    /// over all planted locations. A location missing from `found` counts
    /// as a singleton cluster of its own.
    pub fn recovery_score(&self, found: &[Vec<String>]) -> f64 {
        let mut truth = Vec::new();
        let mut predicted = Vec::new();
        let mut next_singleton = found.len();
        for (c, ring) in self.planted.iter().enumerate() {
            for id in ring {
                truth.push(c);
                let label = found.iter().position(|f| f.contains(id)).unwrap_or_else(|| {
                    next_singleton += 1;
                    next_singleton - 1
                });
                predicted.push(label);
            }
        }
        adjusted_rand_index(&truth, &predicted)
    }
}

pub fn location_id(community: usize, index: usize) -> String {
    format!("c{community}-l{index:03}")
}

struct Place {
    id: String,
    name: String,
    community: usize,
    ring_pos: usize,
    latitude: f64,
    longitude: f64,
}

fn validate(config: &SynthConfig) -> Result<()> {
    let fail = |msg: &str| Err(Error::Config(msg.to_string()));
    if config.communities == 0 || config.locations < config.communities * 2 {
        return fail("need at least one community and two locations per community");
    }
    if config.intra_odds.is_nan() || config.intra_odds <= 0.0 || !(0.0..=1.0).contains(&config.successor_prob) {
        return fail("intra_odds must be positive and successor_prob a probability");
    }
    if config.min_trips_per_user == 0 || config.min_trips_per_user > config.max_trips_per_user {
        return fail("trips per user must form a non-empty range starting at 1 or more");
    }
    if config.min_trip_days == 0 || config.min_trip_days > config.max_trip_days {
        return fail("trip days must form a non-empty range starting at 1 or more");
    }
    Ok(())
}

/// Generates a corpus deterministically from `config.seed`.
///
/// Locations are split into `communities` contiguous blocks of nearly equal
/// size. Every trip covers consecutive days with one review per day.
pub fn generate(config: &SynthConfig) -> Result<SyntheticDataset> {
    validate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let c = config.communities;
    let mut planted: Vec<Vec<usize>> = vec![Vec::new(); c];
    let mut places = Vec::with_capacity(config.locations);
    for i in 0..config.locations {
        let community = i * c / config.locations;
        let ring_pos = planted[community].len();
        planted[community].push(i);
        let center = (48.80 + 0.03 * community as f64, 2.25 + 0.03 * community as f64);
        places.push(Place {
            id: location_id(community, ring_pos),
            name: format!("Site {community}.{ring_pos}"),
            community,
            ring_pos,
            latitude: center.0 + rng.random_range(-0.01..0.01),
            longitude: center.1 + rng.random_range(-0.01..0.01),
        });
    }
    let p_intra = if c == 1 {
        1.0
    } else {
        config.intra_odds / (config.intra_odds + 1.0)
    };

    let next_place = |rng: &mut ChaCha8Rng, current: usize| -> usize {
        let here = &places[current];
        let ring = &planted[here.community];
        if rng.random_bool(p_intra) {
            if rng.random_bool(config.successor_prob) {
                return ring[(here.ring_pos + 1) % ring.len()];
            }
            loop {
                let pick = *ring.choose(rng).expect("non-empty ring");
                if pick != current {
                    return pick;
                }
            }
        }
        loop {
            let pick = rng.random_range(0..places.len());
            if places[pick].community != here.community {
                return pick;
            }
        }
    };

    let mut reviews = Vec::new();
    for u in 0..config.users {
        let user_id = format!("u{u:06}");
        let trips = rng.random_range(config.min_trips_per_user..=config.max_trips_per_user);
        let mut day = config.start + Days::new(rng.random_range(0..365));
        for _ in 0..trips {
            let days = rng.random_range(config.min_trip_days..=config.max_trip_days);
            let mut at = rng.random_range(0..places.len());
            for step in 0..days {
                if step > 0 {
                    at = next_place(&mut rng, at);
                }
                let p = &places[at];
                reviews.push(Review {
                    user_id: user_id.clone(),
                    location_id: p.id.clone(),
                    location_name: p.name.clone(),
                    latitude: p.latitude,
                    longitude: p.longitude,
                    category: Category::Attraction,
                    rating: Some(f64::from(rng.random_range(1..=5u8))),
                    date: day,
                    country: config.country.clone(),
                    nationality: None,
                    age: None,
                });
                day = day + Days::new(1);
            }
            day = day + Days::new(config.days_between_trips);
        }
    }
    Ok(SyntheticDataset {
        reviews,
        planted: planted
            .into_iter()
            .map(|ring| ring.into_iter().map(|i| places[i].id.clone()).collect())
            .collect(),
    })
}
