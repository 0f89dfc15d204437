//! Louvain community detection over the sphere similarity matrix.
//!
//! The asymmetric matrix is first folded into an undirected weighted graph.
//! Louvain then alternates local node moves (in a seeded random order) with
//! aggregation of communities into super-nodes until no move improves the
//! weighted modularity
//!
//! ```text
//! Q = 1/(2m) * sum_ij [ w_ij - r * k_i * k_j / (2m) ] * [c_i == c_j]
//! ```

use std::collections::HashMap;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::MovementGraph;
use crate::influence::SimilarityMatrix;

pub const DEFAULT_RESOLUTION: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MIN_CLUSTER_SIZE: usize = 3;

const MAX_PASSES: usize = 1_000;

/// How the two directed entries `M(i,j)` and `M(j,i)` become one edge weight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetrize {
    #[default]
    Mean,
    Max,
    Min,
}

impl FromStr for Symmetrize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Symmetrize::Mean),
            "max" => Ok(Symmetrize::Max),
            "min" => Ok(Symmetrize::Min),
            other => Err(Error::Config(format!("unknown symmetrization `{other}`"))),
        }
    }
}

/// Undirected graph with positive edge weights, each edge stored once with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }
}

pub fn matrix_to_weighted_graph(matrix: &SimilarityMatrix, mode: Symmetrize) -> WeightedGraph {
    let n = matrix.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (matrix.get(i, j), matrix.get(j, i));
            let w = match mode {
                Symmetrize::Mean => (a + b) / 2.0,
                Symmetrize::Max => a.max(b),
                Symmetrize::Min => a.min(b),
            };
            if w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    WeightedGraph {
        labels: matrix.order().to_vec(),
        edges,
    }
}

/// Weighted modularity of a node-to-community assignment. Zero for an edgeless graph.
pub fn modularity(graph: &WeightedGraph, membership: &[usize], resolution: f64) -> f64 {
    let m = graph.total_weight();
    if m == 0.0 {
        return 0.0;
    }
    let communities = membership.iter().max().map_or(0, |&c| c + 1);
    let mut degree_sum = vec![0.0; communities];
    let mut internal = 0.0;
    for &(i, j, w) in &graph.edges {
        degree_sum[membership[i]] += w;
        degree_sum[membership[j]] += w;
        if membership[i] == membership[j] {
            internal += 2.0 * w;
        }
    }
    let two_m = 2.0 * m;
    internal / two_m - resolution * degree_sum.iter().map(|d| (d / two_m).powi(2)).sum::<f64>()
}

/// One aggregation level: symmetric adjacency without self-loops, plus the
/// self-loop weight of every node.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl Level {
    fn from_graph(graph: &WeightedGraph) -> Self {
        let n = graph.node_count();
        let mut adj = vec![Vec::new(); n];
        for &(i, j, w) in &graph.edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        for list in &mut adj {
            list.sort_by_key(|e| e.0);
        }
        Level {
            adj,
            self_loops: vec![0.0; n],
        }
    }

    fn degrees(&self) -> Vec<f64> {
        self.adj
            .iter()
            .zip(&self.self_loops)
            .map(|(list, s)| list.iter().map(|e| e.1).sum::<f64>() + 2.0 * s)
            .collect()
    }

    /// Moves single nodes between communities, starting from `start` (or
    /// singletons), until no move improves modularity. A node may also leave
    /// for an empty community of its own. Returns compact labels and whether
    /// anything moved.
    fn local_moves(
        &self,
        start: Option<Vec<usize>>,
        resolution: f64,
        rng: &mut ChaCha8Rng,
    ) -> (Vec<usize>, bool) {
        let n = self.adj.len();
        let k = self.degrees();
        let two_m: f64 = k.iter().sum();
        let mut comm: Vec<usize> = start.unwrap_or_else(|| (0..n).collect());
        if two_m == 0.0 {
            return (compact(&comm), false);
        }
        let mut tot = vec![0.0; n];
        let mut size = vec![0usize; n];
        for (i, &c) in comm.iter().enumerate() {
            tot[c] += k[i];
            size[c] += 1;
        }
        let mut empty: Vec<usize> = (0..n).filter(|&c| size[c] == 0).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let tolerance = 1e-12 * two_m;
        let mut moved = false;
        for _ in 0..MAX_PASSES {
            let mut improved = false;
            for &i in &order {
                let home = comm[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[home] -= k[i];
                size[home] -= 1;
                let gain = |c: usize, link: &[f64]| link[c] - resolution * tot[c] * k[i] / two_m;
                let mut best = home;
                let mut best_gain = gain(home, &link);
                for &c in &touched {
                    let g = gain(c, &link);
                    if g > best_gain + tolerance {
                        best = c;
                        best_gain = g;
                    }
                }
                if size[home] > 0 && best_gain < -tolerance {
                    best = empty.pop().expect("a label is free while home is shared");
                }
                if size[home] == 0 && best != home {
                    empty.push(home);
                }
                tot[best] += k[i];
                size[best] += 1;
                if best != home {
                    comm[i] = best;
                    improved = true;
                    moved = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            if !improved {
                break;
            }
        }
        (compact(&comm), moved)
    }

    /// Kernighan-Lin sweeps: every node moves exactly once per sweep, each
    /// time taking the best available move even when it lowers modularity;
    /// the sweep then rolls back to the best partition it passed through.
    /// Sweeps repeat while they improve modularity.
    fn refine(&self, mut comm: Vec<usize>, resolution: f64) -> Vec<usize> {
        let n = self.adj.len();
        let k = self.degrees();
        let two_m: f64 = k.iter().sum();
        if two_m == 0.0 || n < 2 {
            return comm;
        }
        let tolerance = 1e-12 * two_m;
        let mut link = vec![0.0; n];
        for _ in 0..MAX_PASSES {
            let mut tot = vec![0.0; n];
            let mut size = vec![0usize; n];
            for (i, &c) in comm.iter().enumerate() {
                tot[c] += k[i];
                size[c] += 1;
            }
            let mut state = comm.clone();
            let mut locked = vec![false; n];
            let (mut score, mut best_score) = (0.0, 0.0);
            let mut best_state = comm.clone();
            for _ in 0..n {
                // (gain, node, target)
                let mut best_move: Option<(f64, usize, usize)> = None;
                for i in (0..n).filter(|&i| !locked[i]) {
                    let home = state[i];
                    let mut touched = Vec::new();
                    for &(j, w) in &self.adj[i] {
                        let c = state[j];
                        if link[c] == 0.0 {
                            touched.push(c);
                        }
                        link[c] += w;
                    }
                    let stay = link[home] - resolution * (tot[home] - k[i]) * k[i] / two_m;
                    let mut consider = |c: usize, value: f64| {
                        let delta = value - stay;
                        if best_move.is_none_or(|b| delta > b.0 + tolerance) {
                            best_move = Some((delta, i, c));
                        }
                    };
                    for &c in &touched {
                        if c != home {
                            consider(c, link[c] - resolution * tot[c] * k[i] / two_m);
                        }
                    }
                    if size[home] > 1 {
                        if let Some(free) = size.iter().position(|&s| s == 0) {
                            consider(free, 0.0);
                        }
                    }
                    for c in touched {
                        link[c] = 0.0;
                    }
                }
                let Some((delta, i, target)) = best_move else { break };
                let home = state[i];
                tot[home] -= k[i];
                size[home] -= 1;
                tot[target] += k[i];
                size[target] += 1;
                state[i] = target;
                locked[i] = true;
                score += delta;
                if score > best_score + tolerance {
                    best_score = score;
                    best_state.clone_from(&state);
                }
            }
            if best_score <= tolerance {
                break;
            }
            comm = best_state;
        }
        comm
    }

    fn aggregate(&self, comm: &[usize]) -> Level {
        let n = comm.iter().max().map_or(0, |&c| c + 1);
        let mut weights: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        let mut self_loops = vec![0.0; n];
        for (i, list) in self.adj.iter().enumerate() {
            self_loops[comm[i]] += self.self_loops[i];
            for &(j, w) in list {
                if j <= i {
                    continue;
                }
                let (ci, cj) = (comm[i], comm[j]);
                if ci == cj {
                    self_loops[ci] += w;
                } else {
                    *weights[ci].entry(cj).or_insert(0.0) += w;
                    *weights[cj].entry(ci).or_insert(0.0) += w;
                }
            }
        }
        let adj = weights
            .into_iter()
            .map(|m| {
                let mut list: Vec<(usize, f64)> = m.into_iter().collect();
                list.sort_by_key(|e| e.0);
                list
            })
            .collect();
        Level { adj, self_loops }
    }
}

/// Relabels communities 0.. in order of first appearance.
fn compact(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Node-to-community labels found by Louvain.
///
/// Levels are coarsened until local moves stop improving modularity; the
/// final partition is then projected back down, re-running local moves at
/// every level so that nodes merged too early can still change community.
pub fn louvain_membership(graph: &WeightedGraph, resolution: f64, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = vec![Level::from_graph(graph)];
    let mut mappings: Vec<Vec<usize>> = Vec::new();
    loop {
        let top = levels.last().expect("at least one level");
        let (comm, moved) = top.local_moves(None, resolution, &mut rng);
        if !moved {
            break;
        }
        let next = top.aggregate(&comm);
        mappings.push(comm);
        levels.push(next);
    }
    let top = levels.len() - 1;
    let mut partition: Vec<usize> = (0..levels[top].adj.len()).collect();
    for l in (0..top).rev() {
        let projected = mappings[l].iter().map(|&c| partition[c]).collect();
        partition = levels[l].local_moves(Some(projected), resolution, &mut rng).0;
    }
    compact(&levels[0].refine(partition, resolution))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterParams {
    pub resolution: f64,
    pub seed: u64,
    pub min_cluster_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterAssignment {
    /// Kept communities, largest first; members sorted.
    pub communities: Vec<Vec<String>>,
    /// Communities smaller than `min_cluster_size`.
    pub dropped: Vec<Vec<String>>,
    /// Modularity of the full partition, dropped communities included.
    pub modularity: f64,
    pub parameters: ClusterParams,
}

impl ClusterAssignment {
    fn from_membership(
        graph: &WeightedGraph,
        membership: &[usize],
        resolution: f64,
        seed: u64,
    ) -> Self {
        let count = membership.iter().max().map_or(0, |&c| c + 1);
        let mut communities = vec![Vec::new(); count];
        for (node, &c) in membership.iter().enumerate() {
            communities[c].push(graph.labels[node].clone());
        }
        for c in &mut communities {
            c.sort();
        }
        communities.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        ClusterAssignment {
            communities,
            dropped: Vec::new(),
            modularity: modularity(graph, membership, resolution),
            parameters: ClusterParams {
                resolution,
                seed,
                min_cluster_size: 1,
            },
        }
    }

    /// Community index of every labelled node, kept and dropped alike.
    pub fn labels(&self) -> HashMap<&str, usize> {
        self.communities
            .iter()
            .chain(&self.dropped)
            .enumerate()
            .flat_map(|(c, members)| members.iter().map(move |m| (m.as_str(), c)))
            .collect()
    }
}

/// Runs Louvain once. An edgeless graph yields singletons with `Q = 0`.
pub fn louvain(graph: &WeightedGraph, resolution: f64, seed: u64) -> ClusterAssignment {
    let membership = louvain_membership(graph, resolution, seed);
    ClusterAssignment::from_membership(graph, &membership, resolution, seed)
}

/// Runs Louvain with seeds `seed..seed + runs` in parallel and keeps the
/// highest modularity (lowest seed on ties).
pub fn louvain_best_of(
    graph: &WeightedGraph,
    resolution: f64,
    seed: u64,
    runs: usize,
) -> ClusterAssignment {
    let runs = runs.max(1) as u64;
    let results: Vec<ClusterAssignment> = std::thread::scope(|scope| {
        let handles: Vec<_> = (seed..seed + runs)
            .map(|s| scope.spawn(move || louvain(graph, resolution, s)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("louvain worker panicked"))
            .collect()
    });
    results
        .into_iter()
        .reduce(|best, next| {
            if next.modularity > best.modularity {
                next
            } else {
                best
            }
        })
        .expect("at least one run")
}

/// Moves communities with fewer than `min_cluster_size` members to `dropped`.
pub fn filter_clusters(assignment: ClusterAssignment, min_cluster_size: usize) -> ClusterAssignment {
    let (communities, mut small): (Vec<_>, Vec<_>) = assignment
        .communities
        .into_iter()
        .partition(|c| c.len() >= min_cluster_size);
    let mut dropped = assignment.dropped;
    dropped.append(&mut small);
    dropped.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    ClusterAssignment {
        communities,
        dropped,
        modularity: assignment.modularity,
        parameters: ClusterParams {
            min_cluster_size,
            ..assignment.parameters
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberProfile {
    pub id: String,
    pub name: String,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossSimilarity {
    pub cluster: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    pub cluster: usize,
    pub size: usize,
    pub members: Vec<MemberProfile>,
    /// Mean of `M(i, j)` over ordered member pairs `i != j`; absent for singletons.
    pub mean_intra_similarity: Option<f64>,
    /// Mean of `M(i, j)` for `i` in this cluster and `j` in each other cluster.
    pub mean_similarity_to: Vec<CrossSimilarity>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub modularity: f64,
    pub parameters: ClusterParams,
    pub clusters: Vec<ClusterProfile>,
    pub dropped: Vec<Vec<String>>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Per-cluster members with names and supports, plus intra- and
/// inter-cluster similarity statistics read from the matrix.
pub fn profile_report(
    assignment: &ClusterAssignment,
    matrix: &SimilarityMatrix,
    graph: &MovementGraph,
) -> ClusterReport {
    let indices: Vec<Vec<usize>> = assignment
        .communities
        .iter()
        .map(|c| c.iter().filter_map(|id| matrix.index_of(id)).collect())
        .collect();
    let clusters = assignment
        .communities
        .iter()
        .enumerate()
        .map(|(ci, members)| {
            let own = &indices[ci];
            let intra = mean(
                own.iter()
                    .flat_map(|&i| own.iter().filter(move |&&j| j != i).map(move |&j| (i, j)))
                    .map(|(i, j)| matrix.get(i, j)),
            );
            let cross = indices
                .iter()
                .enumerate()
                .filter(|(cj, _)| *cj != ci)
                .map(|(cj, other)| CrossSimilarity {
                    cluster: cj,
                    mean: mean(
                        own.iter()
                            .flat_map(|&i| other.iter().map(move |&j| matrix.get(i, j))),
                    )
                    .unwrap_or(0.0),
                })
                .collect();
            ClusterProfile {
                cluster: ci,
                size: members.len(),
                members: members
                    .iter()
                    .map(|id| {
                        let node = graph.node(id);
                        MemberProfile {
                            id: id.clone(),
                            name: node.map_or_else(|| id.clone(), |n| n.name.clone()),
                            support: node.map_or(0, |n| n.support),
                        }
                    })
                    .collect(),
                mean_intra_similarity: intra,
                mean_similarity_to: cross,
            }
        })
        .collect();
    ClusterReport {
        modularity: assignment.modularity,
        parameters: assignment.parameters,
        clusters,
        dropped: assignment.dropped.clone(),
    }
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings differ in length");
    let pairs = |x: u64| x * x.saturating_sub(1) / 2;
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&v| pairs(v) as f64).sum();
    let sum_a: f64 = rows.values().map(|&v| pairs(v) as f64).sum();
    let sum_b: f64 = cols.values().map(|&v| pairs(v) as f64).sum();
    let total = pairs(a.len() as u64) as f64;
    if total == 0.0 {
        return 1.0;
    }
    let expected = sum_a * sum_b / total;
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return if index == expected { 1.0 } else { 0.0 };
    }
    (index - expected) / (max - expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::influence::{similarity_matrix, SphereOfInfluence};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    fn two_cliques() -> WeightedGraph {
        let mut edges = Vec::new();
        for block in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((block + i, block + j, 1.0));
                }
            }
        }
        edges.push((3, 4, 0.01));
        WeightedGraph {
            labels: labels(8),
            edges,
        }
    }

    #[test]
    fn recovers_two_cliques() {
        let g = two_cliques();
        for seed in 0..10 {
            let a = louvain(&g, 1.0, seed);
            assert_eq!(
                a.communities,
                vec![
                    vec!["n0", "n1", "n2", "n3"],
                    vec!["n4", "n5", "n6", "n7"]
                ]
            );
        }
    }

    #[test]
    fn single_node_and_edgeless() {
        let g = WeightedGraph {
            labels: labels(1),
            edges: vec![],
        };
        let a = louvain(&g, 1.0, 1);
        assert_eq!(a.communities, vec![vec!["n0"]]);
        assert_eq!(a.modularity, 0.0);

        let g = WeightedGraph {
            labels: labels(3),
            edges: vec![],
        };
        let a = louvain(&g, 1.0, 1);
        assert_eq!(a.communities.len(), 3);
        assert_eq!(a.modularity, 0.0);

        let g = WeightedGraph {
            labels: vec![],
            edges: vec![],
        };
        assert!(louvain(&g, 1.0, 1).communities.is_empty());
    }

    #[test]
    fn worked_matrix_becomes_one_edge() {
        let sphere = |c: &str, m: &[&str]| SphereOfInfluence {
            center: c.into(),
            distance: 2,
            members: m.iter().map(|s| s.to_string()).collect(),
        };
        let m = similarity_matrix(&[
            sphere("louvre", &["eiffel", "notre-dame", "champs"]),
            sphere("eiffel", &["champs", "notre-dame"]),
        ]);
        let g = matrix_to_weighted_graph(&m, Symmetrize::Mean);
        assert_eq!(g.edges.len(), 1);
        assert!((g.edges[0].2 - 5.0 / 6.0).abs() < 1e-15);
        let g = matrix_to_weighted_graph(&m, Symmetrize::Max);
        assert_eq!(g.edges[0].2, 1.0);
        let g = matrix_to_weighted_graph(&m, Symmetrize::Min);
        assert_eq!(g.edges[0].2, 2.0 / 3.0);
    }

    #[test]
    fn zero_matrix_has_no_edges() {
        let sphere = |c: &str| SphereOfInfluence {
            center: c.into(),
            distance: 1,
            members: Default::default(),
        };
        let m = similarity_matrix(&[sphere("a"), sphere("b")]);
        assert!(matrix_to_weighted_graph(&m, Symmetrize::Mean).edges.is_empty());
    }

    #[test]
    fn filtering_by_size() {
        let sized = |sizes: &[usize]| ClusterAssignment {
            communities: sizes
                .iter()
                .enumerate()
                .map(|(c, &n)| (0..n).map(|i| format!("c{c}-{i}")).collect())
                .collect(),
            dropped: vec![],
            modularity: 0.5,
            parameters: ClusterParams {
                resolution: 1.0,
                seed: 0,
                min_cluster_size: 1,
            },
        };
        let f = filter_clusters(sized(&[20, 22, 2, 1]), 3);
        let kept: Vec<usize> = f.communities.iter().map(Vec::len).collect();
        let dropped: Vec<usize> = f.dropped.iter().map(Vec::len).collect();
        assert_eq!(kept, [20, 22]);
        assert_eq!(dropped, [2, 1]);
        assert_eq!(f.parameters.min_cluster_size, 3);
        assert!(filter_clusters(sized(&[3, 4]), 3).dropped.is_empty());
        assert_eq!(filter_clusters(sized(&[3, 1]), 1).communities.len(), 2);
    }

    #[test]
    fn best_of_is_deterministic() {
        let g = two_cliques();
        let a = louvain_best_of(&g, 1.0, 7, 4);
        let b = louvain_best_of(&g, 1.0, 7, 4);
        assert_eq!(a, b);
        assert!(a.modularity >= louvain(&g, 1.0, 7).modularity);
    }

    #[test]
    fn ari_basics() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[5, 5, 9, 9]), 1.0);
        assert!(adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]) < 0.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 0], &[1, 1, 1]), 1.0);
        // sklearn reference value
        let ari = adjusted_rand_index(&[0, 0, 1, 1], &[0, 0, 1, 2]);
        assert!((ari - 0.571_428_571_428_571_4).abs() < 1e-12);
    }
}
