use std::collections::BTreeSet;

use proptest::prelude::*;
use tourmine::graph::{read_dot, MovementGraph, Node};
use tourmine::influence::{similarity_matrix, sphere_of_influence, spheres_of_influence};

const PARIS: &str = include_str!("../fixtures/paris.dot");

fn names(g: &MovementGraph, ids: &BTreeSet<String>) -> BTreeSet<String> {
    ids.iter().map(|id| g.node(id).unwrap().name.clone()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn fixture_spheres_and_matrix() {
    let imported = read_dot(PARIS.as_bytes()).unwrap();
    let g = imported.graph.threshold_subgraph(0.6);
    let louvre = sphere_of_influence(&g, "musee_du_louvre", 2).unwrap();
    assert_eq!(
        names(&g, &louvre.members),
        set(&["Tour Eiffel", "Cathédrale Notre-Dame", "Champs Elysées"])
    );
    // the second hop adds nothing to the Louvre sphere
    assert_eq!(sphere_of_influence(&g, "musee_du_louvre", 1).unwrap(), { let mut s = louvre.clone(); s.distance = 1; s });
    let eiffel = sphere_of_influence(&g, "tour_eiffel", 2).unwrap();
    assert_eq!(names(&g, &eiffel.members), set(&["Champs Elysées", "Cathédrale Notre-Dame"]));
    assert_eq!(
        names(&g, &sphere_of_influence(&g, "tour_eiffel", 1).unwrap().members),
        set(&["Champs Elysées"])
    );

    let spheres = spheres_of_influence(&g, &imported.mainstream, 2).unwrap();
    let m = similarity_matrix(&spheres);
    assert!((m.entry("musee_du_louvre", "tour_eiffel").unwrap() - 2.0 / 3.0).abs() <= 1e-9);
    assert_eq!(m.entry("tour_eiffel", "musee_du_louvre"), Some(1.0));
    let (i, j) = (m.index_of("musee_du_louvre").unwrap(), m.index_of("tour_eiffel").unwrap());
    assert_eq!(m.fraction(i, j), Some((2, 3)));
}

fn arb_graph() -> impl Strategy<Value = (MovementGraph, Vec<Vec<bool>>)> {
    (1..=50usize)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(prop::bool::weighted(0.08), n * n)))
        .prop_map(|(n, bits)| {
            let adj: Vec<Vec<bool>> = (0..n)
                .map(|i| (0..n).map(|j| i != j && bits[i * n + j]).collect())
                .collect();
            let nodes = (0..n)
                .map(|i| Node { id: format!("v{i:02}"), name: String::new(), support: 1 })
                .collect();
            let mut arcs = Vec::new();
            for (i, row) in adj.iter().enumerate() {
                for (j, &on) in row.iter().enumerate() {
                    if on {
                        arcs.push((format!("v{i:02}"), format!("v{j:02}"), 1.0));
                    }
                }
            }
            (MovementGraph::new(nodes, arcs).unwrap(), adj)
        })
}

fn bool_product(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

/// Nodes reachable in 1..=d steps: union of the first d boolean adjacency powers.
fn reach_oracle(adj: &[Vec<bool>], center: usize, d: usize) -> BTreeSet<String> {
    let mut power = adj.to_vec();
    let mut reached = vec![false; adj.len()];
    for step in 1..=d {
        if step > 1 {
            power = bool_product(&power, adj);
        }
        for (j, r) in reached.iter_mut().enumerate() {
            *r |= power[center][j];
        }
    }
    reached[center] = false;
    (0..adj.len()).filter(|&j| reached[j]).map(|j| format!("v{j:02}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn bfs_equals_adjacency_powers((g, adj) in arb_graph(), center in 0..50usize) {
        let center = center % adj.len();
        let id = format!("v{center:02}");
        let mut previous = BTreeSet::new();
        for d in 1..=4 {
            let sphere = sphere_of_influence(&g, &id, d).unwrap();
            prop_assert_eq!(&sphere.members, &reach_oracle(&adj, center, d));
            prop_assert!(!sphere.members.contains(&id));
            prop_assert!(previous.is_subset(&sphere.members));
            previous = sphere.members;
        }
    }

    #[test]
    fn matrix_laws(spheres in prop::collection::vec(prop::collection::btree_set(0..12u8, 0..8), 1..8)) {
        let spheres: Vec<_> = spheres
            .into_iter()
            .enumerate()
            .map(|(i, s)| tourmine::influence::SphereOfInfluence {
                center: format!("c{i}"),
                distance: 1,
                members: s.into_iter().map(|x| format!("m{x}")).collect(),
            })
            .collect();
        let m = similarity_matrix(&spheres);
        for (i, si) in spheres.iter().enumerate() {
            for (j, sj) in spheres.iter().enumerate() {
                let v = m.get(i, j);
                prop_assert!((0.0..=1.0).contains(&v));
                if i == j || si.members.is_empty() {
                    continue;
                }
                prop_assert_eq!(si.members.is_subset(&sj.members), v == 1.0);
                prop_assert_eq!(si.members.is_disjoint(&sj.members), v == 0.0);
                let overlap = si.members.intersection(&sj.members).count();
                prop_assert_eq!(m.fraction(i, j), Some((overlap, si.members.len())));
            }
        }
    }
}
