//! Mining tourist movement patterns from dated location reviews.
//!
//! Reviews are grouped into per-user trips, trips become location sequences,
//! direct-follow rules between locations are mined and scored with interest
//! measures, and the scored rules form a weighted movement graph. Spheres of
//! influence around the most visited locations are compared and clustered
//! into communities with Louvain.

pub mod community;
pub mod error;
pub mod graph;
pub mod influence;
pub mod ingest;
pub mod measures;
pub mod pipeline;
pub mod rules;
pub mod trips;

pub use error::{Error, ErrorKind, Result};
