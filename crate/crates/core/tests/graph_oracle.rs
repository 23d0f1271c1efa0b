//! Range graph queries against a brute-force flood fill over an all-pairs
//! adjacency matrix.

use bridgenet_core::{NodeId, Position, Prng, RangeGraph};
use proptest::prelude::*;

/// Edge slack of the f64 graph: sqrt of machine epsilon.
const SLACK: f64 = 1.4901161193847656e-8;

struct Oracle {
    adj: Vec<Vec<bool>>,
}

impl Oracle {
    fn new(points: &[(f64, f64)], r: f64) -> Self {
        let n = points.len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
                adj[i][j] = i != j && (dx * dx + dy * dy).sqrt() <= r + SLACK;
            }
        }
        Oracle { adj }
    }

    fn reachable(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for (v, &edge) in self.adj[u].iter().enumerate() {
                if edge && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn largest(&self) -> usize {
        (0..self.adj.len()).map(|i| self.reachable(i).iter().filter(|&&b| b).count()).max().unwrap()
    }
}

/// Node ids are scrambled (`3 * i + 1`) so index and id never coincide.
fn build(points: &[(f64, f64)], r: f64) -> RangeGraph {
    let nodes = points.iter().enumerate().map(|(i, &(x, y))| (NodeId(3 * i as u32 + 1), Position::new(x, y))).collect();
    RangeGraph::build(nodes, r).unwrap()
}

fn id(i: usize) -> NodeId {
    NodeId(3 * i as u32 + 1)
}

fn check(points: &[(f64, f64)], r: f64) -> usize {
    let g = build(points, r);
    let oracle = Oracle::new(points, r);
    let mut mismatches = 0;
    for i in 0..points.len() {
        for j in 0..points.len() {
            if g.has_edge(id(i), id(j)) != oracle.adj[i][j] {
                mismatches += 1;
            }
        }
    }
    if g.largest_component_size().unwrap() != oracle.largest() {
        mismatches += 1;
    }
    for i in 0..points.len() {
        let reach = oracle.reachable(i);
        for (j, &expected) in reach.iter().enumerate() {
            if g.path_exists(id(i), id(j)).unwrap() != expected {
                mismatches += 1;
            }
        }
    }
    mismatches
}

#[test]
fn thousand_random_graphs_match_oracle() {
    let mut rng = Prng::new(2024);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = 1 + rng.next_below(12) as usize;
        let r = 0.05 + 0.4 * rng.next_unit();
        let points: Vec<_> = (0..n).map(|_| (rng.next_unit(), rng.next_unit())).collect();
        mismatches += check(&points, r);
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn twelve_nodes_edge_set_is_all_pairs() {
    let mut rng = Prng::new(12);
    let points: Vec<_> = (0..12).map(|_| (rng.next_unit(), rng.next_unit())).collect();
    let g = build(&points, 0.3);
    let oracle = Oracle::new(&points, 0.3);
    let mut expected = Vec::new();
    for i in 0..12 {
        for j in (i + 1)..12 {
            if oracle.adj[i][j] {
                expected.push((id(i), id(j)));
            }
        }
    }
    expected.sort();
    assert_eq!(g.edges(), expected.as_slice());
}

fn points_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1..=12)
}

proptest! {
    #[test]
    fn matches_oracle(points in points_strategy(), r in 0.01..0.6f64) {
        prop_assert_eq!(check(&points, r), 0);
    }

    #[test]
    fn edges_symmetric_and_loop_free(points in points_strategy(), r in 0.01..0.6f64) {
        let g = build(&points, r);
        for &(a, b) in g.edges() {
            prop_assert!(a < b);
            prop_assert!(g.has_edge(b, a));
        }
        prop_assert_eq!(g.clone(), build(&points, r));
    }

    #[test]
    fn growing_range_only_adds_edges(points in points_strategy(), r in 0.01..0.4f64, extra in 0.0..0.4f64) {
        let small = build(&points, r);
        let large = build(&points, r + extra);
        for &(a, b) in small.edges() {
            prop_assert!(large.has_edge(a, b));
        }
        prop_assert!(large.largest_component_size().unwrap() >= small.largest_component_size().unwrap());
    }

    #[test]
    fn one_hop_matches_filter(points in points_strategy(), r in 0.01..0.6f64, pick in 0usize..12) {
        let g = build(&points, r);
        let ego = id(pick % points.len());
        let sub = g.one_hop_subgraph(ego).unwrap();
        prop_assert_eq!(sub.nodes[0], ego);
        prop_assert!(sub.nodes[1..].windows(2).all(|w| w[0] < w[1]));
        let members: Vec<NodeId> = sub.nodes.clone();
        let expected: Vec<_> = g.edges().iter().copied()
            .filter(|(a, b)| members.contains(a) && members.contains(b)).collect();
        prop_assert_eq!(&sub.edges, &expected);
        for n in &sub.nodes[1..] {
            prop_assert!(g.has_edge(ego, *n));
        }
    }

    #[test]
    fn connected_pair_implies_component_of_two(points in prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 2..=12), r in 0.01..0.6f64) {
        let g = build(&points, r);
        if g.path_exists(id(0), id(1)).unwrap() {
            prop_assert!(g.largest_component_size().unwrap() >= 2);
        }
    }
}
