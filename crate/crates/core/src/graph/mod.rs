//! Directed weighted movement graph.
//!
//! Nodes are locations carrying their occurrence count over the sequence
//! dataset; arcs are rules weighted by an interest measure.

mod elbow;
mod export;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{Measure, MeasuredRule};
use crate::trips::SequenceDataset;

pub use elbow::elbow_index;
pub use export::{
    read_dot, read_edge_csv, read_graphml, write_dot, write_edge_csv, write_graphml, ImportedGraph,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: String,
    pub name: String,
    pub support: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Nodes sorted by id; arcs sorted by `(source, target)` index.
#[derive(Debug, Clone, PartialEq)]
pub struct MovementGraph {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl MovementGraph {
    /// Builds a graph from nodes and `(source id, target id, weight)` arcs,
    /// rejecting duplicate nodes, self-arcs, parallel arcs and dangling endpoints.
    pub fn new(
        mut nodes: Vec<Node>,
        arcs: impl IntoIterator<Item = (String, String, f64)>,
    ) -> Result<Self> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidGraph(format!("duplicate node `{}`", w[0].id)));
        }
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::InvalidGraph(format!("arc endpoint `{id}` is not a node")))
        };
        let mut resolved = Vec::new();
        for (s, t, weight) in arcs {
            let (source, target) = (lookup(&s)?, lookup(&t)?);
            if source == target {
                return Err(Error::InvalidGraph(format!("self-arc on `{s}`")));
            }
            if !weight.is_finite() {
                return Err(Error::InvalidGraph(format!("non-finite weight on `{s}` -> `{t}`")));
            }
            resolved.push(Arc {
                source,
                target,
                weight,
            });
        }
        resolved.sort_by_key(|a| (a.source, a.target));
        if let Some(w) = resolved
            .windows(2)
            .find(|w| (w[0].source, w[0].target) == (w[1].source, w[1].target))
        {
            return Err(Error::InvalidGraph(format!(
                "parallel arcs `{}` -> `{}`",
                nodes[w[0].source].id, nodes[w[0].target].id
            )));
        }
        Ok(Self::from_parts(nodes, index, resolved))
    }

    fn from_parts(nodes: Vec<Node>, index: HashMap<String, usize>, arcs: Vec<Arc>) -> Self {
        let mut out = vec![Vec::new(); nodes.len()];
        for a in &arcs {
            out[a.source].push(a.target);
        }
        MovementGraph {
            nodes,
            index,
            arcs,
            out,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    /// Out-neighbour indices of node `i`, ascending.
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn weight(&self, source: &str, target: &str) -> Option<f64> {
        let (s, t) = (self.index_of(source)?, self.index_of(target)?);
        self.arcs
            .binary_search_by_key(&(s, t), |a| (a.source, a.target))
            .ok()
            .map(|i| self.arcs[i].weight)
    }

    /// Arcs as `(source id, target id, weight)`.
    pub fn arc_triples(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.arcs.iter().map(|a| {
            (
                self.nodes[a.source].id.as_str(),
                self.nodes[a.target].id.as_str(),
                a.weight,
            )
        })
    }

    /// Keeps every node and only arcs with weight strictly above `threshold`.
    pub fn threshold_subgraph(&self, threshold: f64) -> MovementGraph {
        let arcs = self
            .arcs
            .iter()
            .filter(|a| a.weight > threshold)
            .copied()
            .collect();
        Self::from_parts(self.nodes.clone(), self.index.clone(), arcs)
    }
}

/// Occurrence count of every location over all sequences (repeats included).
pub fn node_supports(dataset: &SequenceDataset) -> BTreeMap<String, u64> {
    let mut supports = BTreeMap::new();
    for seq in dataset.sequences() {
        for loc in seq {
            *supports.entry(loc.clone()).or_insert(0) += 1;
        }
    }
    supports
}

/// One node per location mentioned by a rule, one arc per rule weighted by
/// `weight_measure`. Names default to the location id.
pub fn build_graph(
    rules: &[MeasuredRule],
    weight_measure: Measure,
    supports: &BTreeMap<String, u64>,
    names: &HashMap<String, String>,
) -> Result<MovementGraph> {
    let mut ids: BTreeMap<&str, ()> = BTreeMap::new();
    for r in rules {
        ids.insert(&r.rule.antecedent, ());
        ids.insert(&r.rule.consequent, ());
    }
    let nodes = ids
        .into_keys()
        .map(|id| Node {
            id: id.to_string(),
            name: names.get(id).cloned().unwrap_or_else(|| id.to_string()),
            support: supports.get(id).copied().unwrap_or(0),
        })
        .collect();
    let arcs = rules.iter().map(|r| {
        (
            r.rule.antecedent.clone(),
            r.rule.consequent.clone(),
            r.measures.get(weight_measure),
        )
    });
    MovementGraph::new(nodes, arcs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MainstreamSelection {
    /// Highest-support locations, by support descending then id ascending.
    pub mainstream: Vec<String>,
    pub secondary: Vec<String>,
    pub k: usize,
    /// Share of all node occurrences covered by the mainstream nodes.
    pub coverage_fraction: f64,
}

impl MainstreamSelection {
    pub fn is_mainstream(&self, id: &str) -> bool {
        self.mainstream.iter().any(|m| m == id)
    }
}

/// Picks the `k` highest-support nodes, or the elbow of the cumulative
/// support curve when `k` is `None`. A `k` above the node count is clamped.
pub fn select_mainstream(graph: &MovementGraph, k: Option<usize>) -> MainstreamSelection {
    let mut ranked: Vec<&Node> = graph.nodes().iter().collect();
    ranked.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.id.cmp(&b.id)));
    let k = match k {
        Some(k) if k > ranked.len() => {
            log::warn!(
                "requested {k} mainstream nodes but the graph has {}; clamping",
                ranked.len()
            );
            ranked.len()
        }
        Some(k) => k,
        None => {
            let supports: Vec<f64> = ranked.iter().map(|n| n.support as f64).collect();
            elbow_index(&supports)
        }
    };
    let total: u64 = ranked.iter().map(|n| n.support).sum();
    let covered: u64 = ranked[..k].iter().map(|n| n.support).sum();
    let mut secondary: Vec<String> = ranked[k..].iter().map(|n| n.id.clone()).collect();
    secondary.sort();
    MainstreamSelection {
        mainstream: ranked[..k].iter().map(|n| n.id.clone()).collect(),
        secondary,
        k,
        coverage_fraction: if total == 0 {
            0.0
        } else {
            covered as f64 / total as f64
        },
    }
}
