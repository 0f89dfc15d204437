//! Independent oracles shared by several test targets.

#![allow(dead_code)]

use tourmine::community::WeightedGraph;

/// Modularity from the dense adjacency matrix, straight from the definition.
pub fn dense_modularity(g: &WeightedGraph, membership: &[usize], resolution: f64) -> f64 {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in &g.edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if membership[i] == membership[j] {
                q += a[i][j] - resolution * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// All set partitions of `0..n` as restricted growth strings.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0; n];
    fn recurse(i: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == current.len() {
            out.push(current.clone());
            return;
        }
        for c in 0..=max + 1 {
            current[i] = c;
            recurse(i + 1, max.max(c), current, out);
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        recurse(1, 0, &mut current, &mut out);
    }
    out
}

pub fn exhaustive_optimum(g: &WeightedGraph) -> f64 {
    partitions(g.node_count())
        .iter()
        .map(|p| dense_modularity(g, p, 1.0))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Adjusted Rand index by counting agreeing pairs one pair at a time.
pub fn pairwise_ari(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut only_a, mut only_b, mut neither) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => both += 1.0,
                (true, false) => only_a += 1.0,
                (false, true) => only_b += 1.0,
                (false, false) => neither += 1.0,
            }
        }
    }
    let pairs: f64 = both + only_a + only_b + neither;
    let expected = (both + only_a) * (both + only_b) / pairs;
    let max = ((both + only_a) + (both + only_b)) / 2.0;
    if max == expected {
        return 1.0;
    }
    (both - expected) / (max - expected)
}
