//! Spheres of influence around mainstream nodes and their overlap matrix.

use std::collections::{BTreeSet, VecDeque};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MovementGraph;
use crate::trips::SequenceDataset;

/// Hop radius derived from the data: the rounded mean sequence length minus
/// one, never below one.
pub fn sphere_distance(dataset: &SequenceDataset) -> Result<usize> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let rounded = dataset.avg_length().round() as usize;
    Ok(rounded.saturating_sub(1).max(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereOfInfluence {
    pub center: String,
    #[serde(rename = "D")]
    pub distance: usize,
    /// Nodes reachable from the center in 1..=distance directed hops.
    pub members: BTreeSet<String>,
}

impl SphereOfInfluence {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Breadth-first search along arc direction, at most `distance` hops.
/// The center itself is never a member, even when a cycle returns to it.
pub fn sphere_of_influence(
    graph: &MovementGraph,
    center: &str,
    distance: usize,
) -> Result<SphereOfInfluence> {
    let start = graph
        .index_of(center)
        .ok_or_else(|| Error::UnknownNode(center.to_string()))?;
    let mut depth = vec![usize::MAX; graph.node_count()];
    depth[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut members = BTreeSet::new();
    while let Some(u) = queue.pop_front() {
        if depth[u] == distance {
            continue;
        }
        for &v in graph.successors(u) {
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                members.insert(graph.nodes()[v].id.clone());
                queue.push_back(v);
            }
        }
    }
    Ok(SphereOfInfluence {
        center: center.to_string(),
        distance,
        members,
    })
}

pub fn spheres_of_influence(
    graph: &MovementGraph,
    centers: &[String],
    distance: usize,
) -> Result<Vec<SphereOfInfluence>> {
    centers
        .iter()
        .map(|c| sphere_of_influence(graph, c, distance))
        .collect()
}

pub fn write_spheres_json<W: Write>(spheres: &[SphereOfInfluence], mut sink: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut sink, spheres)?;
    writeln!(sink)?;
    Ok(())
}

pub fn read_spheres_json<R: Read>(source: R) -> Result<Vec<SphereOfInfluence>> {
    Ok(serde_json::from_reader(source)?)
}

/// Row-normalised sphere overlap: `M(i, j) = |S_i ∩ S_j| / |S_i|`.
///
/// Not symmetric. Rows of empty spheres are zero; the diagonal holds 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    order: Vec<String>,
    entries: Vec<f64>,
    overlaps: Vec<usize>,
    sizes: Vec<usize>,
}

impl SimilarityMatrix {
    pub fn order(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order.len() + j]
    }

    /// The entry as an exact fraction `(overlap, sphere size)`; `None` for empty rows.
    pub fn fraction(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        let n = self.order.len();
        (self.sizes[i] > 0).then(|| (self.overlaps[i * n + j], self.sizes[i]))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.order.iter().position(|o| o == id)
    }

    /// Entry by center ids.
    pub fn entry(&self, from: &str, to: &str) -> Option<f64> {
        Some(self.get(self.index_of(from)?, self.index_of(to)?))
    }

    /// Centers whose sphere is empty.
    pub fn empty_rows(&self) -> Vec<&str> {
        self.order
            .iter()
            .zip(&self.sizes)
            .filter(|(_, &s)| s == 0)
            .map(|(o, _)| o.as_str())
            .collect()
    }

    /// Header row and column of center ids, entries with six decimals.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header = vec![String::new()];
        header.extend(self.order.iter().cloned());
        w.write_record(&header)?;
        for (i, id) in self.order.iter().enumerate() {
            let mut row = vec![id.clone()];
            row.extend((0..self.len()).map(|j| format!("{:.6}", self.get(i, j))));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn similarity_matrix(spheres: &[SphereOfInfluence]) -> SimilarityMatrix {
    let n = spheres.len();
    let mut entries = vec![0.0; n * n];
    let mut overlaps = vec![0; n * n];
    let sizes: Vec<usize> = spheres.iter().map(SphereOfInfluence::len).collect();
    for (i, si) in spheres.iter().enumerate() {
        for (j, sj) in spheres.iter().enumerate() {
            let overlap = si.members.intersection(&sj.members).count();
            overlaps[i * n + j] = overlap;
            entries[i * n + j] = if i == j {
                1.0
            } else if sizes[i] == 0 {
                0.0
            } else {
                overlap as f64 / sizes[i] as f64
            };
        }
    }
    SimilarityMatrix {
        order: spheres.iter().map(|s| s.center.clone()).collect(),
        entries,
        overlaps,
        sizes,
    }
}
