use std::collections::{BTreeMap, BTreeSet, HashMap};

use proptest::prelude::*;
use tourmine::graph::{
    build_graph, node_supports, read_dot, read_edge_csv, read_graphml, select_mainstream,
    write_dot, write_edge_csv, write_graphml, MovementGraph, Node,
};
use tourmine::measures::{measure_rules, Measure};
use tourmine::rules::SequentialRule;
use tourmine::trips::SequenceDataset;

const PARIS: &str = include_str!("../fixtures/paris.dot");

fn paris() -> MovementGraph {
    read_dot(PARIS.as_bytes()).unwrap().graph
}

fn arb_graph() -> impl Strategy<Value = MovementGraph> {
    (1..15usize)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1..10_000u64, n),
                prop::collection::btree_map((0..n, 0..n), -1.0..1.0f64, 0..n * n),
            )
        })
        .prop_map(|(supports, arcs)| {
            let nodes = supports
                .iter()
                .enumerate()
                .map(|(i, &s)| Node {
                    id: format!("n{i:02}"),
                    name: format!("Node \"{i}\" <&>"),
                    support: s,
                })
                .collect();
            let arcs = arcs
                .into_iter()
                .filter(|((s, t), _)| s != t)
                .map(|((s, t), w)| (format!("n{s:02}"), format!("n{t:02}"), w));
            MovementGraph::new(nodes, arcs).unwrap()
        })
}

fn arc_set(g: &MovementGraph) -> BTreeSet<(String, String)> {
    g.arc_triples()
        .map(|(s, t, _)| (s.to_string(), t.to_string()))
        .collect()
}

#[test]
fn fixture_mainstream_pair() {
    let g = paris();
    let sel = select_mainstream(&g, Some(2));
    assert_eq!(sel.mainstream, ["tour_eiffel", "musee_du_louvre"]);
    let supports: Vec<u64> = sel.mainstream.iter().map(|id| g.node(id).unwrap().support).collect();
    assert_eq!(supports, [356_000, 280_000]);
    assert_eq!(g.node("musee_du_louvre").unwrap().name, "Musée du Louvre");
    assert!(select_mainstream(&g, Some(g.node_count())).secondary.is_empty());
    // the file's own flags agree with k = 2
    assert_eq!(read_dot(PARIS.as_bytes()).unwrap().mainstream, sel.mainstream);
}

#[test]
fn fixture_round_trips_through_every_format() {
    let g = paris();
    let sel = select_mainstream(&g, Some(2));
    let mut dot = Vec::new();
    write_dot(&g, Some(&sel), &mut dot).unwrap();
    let back = read_dot(dot.as_slice()).unwrap();
    assert_eq!(back.graph, g);
    assert_eq!(back.mainstream, sel.mainstream);
    let mut xml = Vec::new();
    write_graphml(&g, Some(&sel), &mut xml).unwrap();
    let back = read_graphml(xml.as_slice()).unwrap();
    assert_eq!(back.graph, g);
    assert_eq!(back.mainstream, sel.mainstream);
    let mut csv = Vec::new();
    write_edge_csv(&g, &mut csv).unwrap();
    assert_eq!(arc_set(&read_edge_csv(csv.as_slice()).unwrap()), arc_set(&g));
}

#[test]
fn fixture_threshold_keeps_arcs_strictly_above() {
    let g = paris();
    let pruned = g.threshold_subgraph(0.6);
    assert_eq!(pruned.arc_count(), 5);
    assert_eq!(pruned.weight("musee_du_louvre", "tour_eiffel"), Some(0.66));
    assert_eq!(pruned.weight("tour_eiffel", "notre_dame"), None);
    // an arc weighted exactly at the threshold is dropped
    assert_eq!(pruned.weight("notre_dame", "arc_de_triomphe"), None);
    assert_eq!(pruned.node_count(), g.node_count());
    assert_eq!(g.threshold_subgraph(-1.0), g);
}

#[test]
fn pair_of_arcs_around_the_threshold() {
    let nodes = ["a", "b"]
        .iter()
        .map(|id| Node { id: id.to_string(), name: id.to_string(), support: 1 })
        .collect();
    let g = MovementGraph::new(
        nodes,
        [("a".to_string(), "b".to_string(), 0.57), ("b".to_string(), "a".to_string(), 0.66)],
    )
    .unwrap();
    let kept: Vec<_> = g.threshold_subgraph(0.6).arc_triples().map(|(s, t, w)| (s.to_string(), t.to_string(), w)).collect();
    assert_eq!(kept, [("b".to_string(), "a".to_string(), 0.66)]);
}

#[test]
fn occurrence_support() {
    let ds = SequenceDataset::new(vec![vec!["A".into(), "B".into(), "A".into()]]);
    let s = node_supports(&ds);
    assert_eq!(s, BTreeMap::from([("A".to_string(), 2), ("B".to_string(), 1)]));
    assert!(node_supports(&SequenceDataset::default()).is_empty());
}

#[test]
fn elbow_on_plateau_then_tail() {
    let nodes: Vec<Node> = (0..100)
        .map(|i| Node { id: format!("n{i:03}"), name: String::new(), support: if i < 5 { 1000 } else { 10 } })
        .collect();
    let g = MovementGraph::new(nodes, std::iter::empty()).unwrap();
    let sel = select_mainstream(&g, None);
    assert_eq!(sel.k, 5);
    assert!((sel.coverage_fraction - 5000.0 / 5950.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn supports_match_flat_scan(seqs in prop::collection::vec(prop::collection::vec(0..30u8, 0..10), 0..1000)) {
        let ds = SequenceDataset::new(seqs.iter().map(|s| s.iter().map(|c| format!("l{c}")).collect()).collect());
        let mut oracle: BTreeMap<String, u64> = BTreeMap::new();
        for s in ds.sequences() {
            for item in s {
                *oracle.entry(item.clone()).or_default() += 1;
            }
        }
        prop_assert_eq!(node_supports(&ds), oracle);
    }

    #[test]
    fn one_arc_per_rule(pairs in prop::collection::btree_set((0..12u8, 0..12u8), 0..30)) {
        let rules: Vec<SequentialRule> = pairs
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| SequentialRule {
                antecedent: format!("l{a}"),
                consequent: format!("l{b}"),
                rule_count: 1,
                antecedent_count: 2,
                consequent_count: 2,
                n_sequences: 4,
            })
            .collect();
        let endpoints: BTreeSet<&str> = rules
            .iter()
            .flat_map(|r| [r.antecedent.as_str(), r.consequent.as_str()])
            .collect();
        let g = build_graph(&measure_rules(&rules), Measure::Klosgen, &BTreeMap::new(), &HashMap::new()).unwrap();
        prop_assert_eq!(g.arc_count(), rules.len());
        prop_assert_eq!(g.node_count(), endpoints.len());
    }

    #[test]
    fn thresholds_are_monotone(g in arb_graph(), t1 in -1.0..1.0f64, t2 in -1.0..1.0f64) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(arc_set(&g.threshold_subgraph(hi)).is_subset(&arc_set(&g.threshold_subgraph(lo))));
        let max = g.arcs().iter().map(|a| a.weight).fold(f64::NEG_INFINITY, f64::max);
        if max.is_finite() {
            prop_assert_eq!(g.threshold_subgraph(max).arc_count(), 0);
        }
    }

    #[test]
    fn mainstream_ignores_support_scale(g in arb_graph(), factor in 2..1000u64, k in 1..15usize) {
        let scaled = MovementGraph::new(
            g.nodes().iter().map(|n| Node { support: n.support * factor, ..n.clone() }).collect(),
            g.arc_triples().map(|(s, t, w)| (s.to_string(), t.to_string(), w)),
        ).unwrap();
        prop_assert_eq!(select_mainstream(&g, Some(k)).mainstream, select_mainstream(&scaled, Some(k)).mainstream);
    }

    #[test]
    fn coverage_grows_with_k(g in arb_graph()) {
        let coverage: Vec<f64> = (1..=g.node_count()).map(|k| select_mainstream(&g, Some(k)).coverage_fraction).collect();
        prop_assert!(coverage.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((coverage.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exports_round_trip(g in arb_graph(), k in 0..15usize) {
        let sel = select_mainstream(&g, Some(k));
        let mut dot = Vec::new();
        write_dot(&g, Some(&sel), &mut dot).unwrap();
        let from_dot = read_dot(dot.as_slice()).unwrap();
        let mut xml = Vec::new();
        write_graphml(&g, Some(&sel), &mut xml).unwrap();
        let from_xml = read_graphml(xml.as_slice()).unwrap();
        for back in [from_dot, from_xml] {
            prop_assert_eq!(back.graph.nodes(), g.nodes());
            for ((s1, t1, w1), (s2, t2, w2)) in back.graph.arc_triples().zip(g.arc_triples()) {
                prop_assert_eq!((s1, t1), (s2, t2));
                prop_assert!((w1 - w2).abs() <= 1e-9);
            }
            prop_assert_eq!(back.graph.arc_count(), g.arc_count());
            prop_assert_eq!(&back.mainstream, &sel.mainstream);
        }
    }
}
