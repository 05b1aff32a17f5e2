//! Variation operators on variable-length path genomes: random
//! initialization, intersection crossover, loop repair and the perimeter
//! mutation.

use rand::Rng;

use crate::graph::{NodeId, RoutingGraph, SpatialIndex};
use crate::objectives::PathGenome;

/// Samples a valid random start-to-end path.
///
/// Directed (forward-only) graphs use a randomized depth-first walk that
/// backtracks out of dead ends; undirected graphs use a self-avoiding random
/// walk that restarts when it runs out of moves or exceeds `4 * |V|` steps.
/// Returns `None` when the end is unreachable.
pub fn random_path(graph: &RoutingGraph, rng: &mut impl Rng) -> Option<PathGenome> {
    if graph.is_directed() {
        random_path_directed(graph, rng)
    } else {
        random_path_undirected(graph, rng)
    }
}

fn random_path_directed(graph: &RoutingGraph, rng: &mut impl Rng) -> Option<PathGenome> {
    let end = graph.end();
    // (node, successors in random order, next choice)
    let mut stack = vec![(graph.start(), shuffled(graph.successors(graph.start()), rng), 0usize)];
    loop {
        let Some((node, succ, cursor)) = stack.last_mut() else {
            return None; // exhausted every branch: end unreachable
        };
        if *node == end {
            let nodes = stack.iter().map(|(n, _, _)| *n).collect();
            return Some(PathGenome::from_validated(nodes));
        }
        if *cursor == succ.len() {
            stack.pop();
            continue;
        }
        let next = succ[*cursor];
        *cursor += 1;
        let order = shuffled(graph.successors(next), rng);
        stack.push((next, order, 0));
    }
}

fn random_path_undirected(graph: &RoutingGraph, rng: &mut impl Rng) -> Option<PathGenome> {
    let end = graph.end();
    let budget = 4 * graph.node_count();
    // The walk succeeds with positive probability whenever the end is
    // reachable, so a bounded number of restarts suffices in practice; the
    // deterministic fallback keeps the operator total regardless.
    for _ in 0..10_000 {
        let mut visited = vec![false; graph.node_count()];
        let mut path = vec![graph.start()];
        visited[graph.start().index()] = true;
        for _ in 0..budget {
            let here = *path.last().unwrap();
            if here == end {
                break;
            }
            let choices: Vec<NodeId> = graph
                .successors(here)
                .iter()
                .copied()
                .filter(|n| !visited[n.index()])
                .collect();
            if choices.is_empty() {
                break;
            }
            let next = choices[rng.random_range(0..choices.len())];
            visited[next.index()] = true;
            path.push(next);
        }
        if *path.last().unwrap() == end {
            return Some(PathGenome::from_validated(path));
        }
    }
    bfs_path(graph)
}

/// Deterministic shortest-hop path, the fallback when random restarts fail.
fn bfs_path(graph: &RoutingGraph) -> Option<PathGenome> {
    let mut parent: Vec<Option<NodeId>> = vec![None; graph.node_count()];
    let mut queue = std::collections::VecDeque::from([graph.start()]);
    let mut seen = vec![false; graph.node_count()];
    seen[graph.start().index()] = true;
    while let Some(u) = queue.pop_front() {
        if u == graph.end() {
            let mut nodes = vec![u];
            let mut cur = u;
            while let Some(p) = parent[cur.index()] {
                nodes.push(p);
                cur = p;
            }
            nodes.reverse();
            return Some(PathGenome::from_validated(nodes));
        }
        for &v in graph.successors(u) {
            if !seen[v.index()] {
                seen[v.index()] = true;
                parent[v.index()] = Some(u);
                queue.push_back(v);
            }
        }
    }
    None
}

fn shuffled(nodes: &[NodeId], rng: &mut impl Rng) -> Vec<NodeId> {
    let mut order = nodes.to_vec();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    order
}

/// Intersection crossover: shared interior nodes are the cut points.
///
/// Two or more shared nodes give a two-point exchange of the middle
/// segments, exactly one gives a one-point tail swap, and disjoint parents
/// are returned unchanged. Offspring are loop-repaired and validated;
/// a child that fails validation is replaced by its primary parent.
pub fn crossover(
    a: &PathGenome,
    b: &PathGenome,
    graph: &RoutingGraph,
    rng: &mut impl Rng,
) -> (PathGenome, PathGenome) {
    let shared = shared_interior(a, b, graph);
    if shared.is_empty() {
        return (a.clone(), b.clone());
    }
    let (raw1, raw2) = if shared.len() == 1 {
        let (ia, ib) = shared[0];
        let one = |head: &[NodeId], tail: &[NodeId]| {
            let mut nodes = head.to_vec();
            nodes.extend_from_slice(tail);
            nodes
        };
        (
            one(&a.nodes()[..=ia], &b.nodes()[ib + 1..]),
            one(&b.nodes()[..=ib], &a.nodes()[ia + 1..]),
        )
    } else {
        let first = rng.random_range(0..shared.len());
        let mut second = rng.random_range(0..shared.len() - 1);
        if second >= first {
            second += 1;
        }
        let (mut u, mut v) = (shared[first.min(second)], shared[first.max(second)]);
        if u.0 > v.0 {
            std::mem::swap(&mut u, &mut v);
        }
        (
            splice_middle(a.nodes(), u.0, v.0, b.nodes(), u.1, v.1),
            splice_middle(b.nodes(), u.1, v.1, a.nodes(), u.0, v.0),
        )
    };
    let child = |raw: Vec<NodeId>, fallback: &PathGenome| {
        let repaired = repair_loops(raw);
        PathGenome::new(repaired, graph).unwrap_or_else(|_| fallback.clone())
    };
    (child(raw1, a), child(raw2, b))
}

/// Interior nodes common to both paths as `(index in a, index in b)`,
/// ordered by position in `a`.
fn shared_interior(a: &PathGenome, b: &PathGenome, graph: &RoutingGraph) -> Vec<(usize, usize)> {
    let mut pos_in_b: Vec<Option<usize>> = vec![None; graph.node_count()];
    for (i, n) in b.nodes().iter().enumerate() {
        pos_in_b[n.index()] = Some(i);
    }
    a.nodes()
        .iter()
        .enumerate()
        .skip(1)
        .take(a.len().saturating_sub(2))
        .filter(|(_, n)| **n != graph.start() && **n != graph.end())
        .filter_map(|(i, n)| {
            let j = pos_in_b[n.index()]?;
            (j != 0 && j != b.len() - 1).then_some((i, j))
        })
        .collect()
}

/// Head of `base` up to `from`, the `other` segment between the same two
/// nodes, then the tail of `base` from `to`. The donor segment is reversed
/// when the shared nodes occur in the opposite order, which only happens on
/// undirected graphs where reversal keeps adjacency intact.
fn splice_middle(
    base: &[NodeId],
    from: usize,
    to: usize,
    other: &[NodeId],
    other_from: usize,
    other_to: usize,
) -> Vec<NodeId> {
    let mut nodes = base[..from].to_vec();
    if other_from <= other_to {
        nodes.extend_from_slice(&other[other_from..=other_to]);
    } else {
        nodes.extend(other[other_to..=other_from].iter().rev());
    }
    nodes.extend_from_slice(&base[to + 1..]);
    nodes
}

/// Removes every cycle from a node sequence by splicing out the part
/// between repeated occurrences of a node; the result visits each node at
/// most once and keeps consecutive adjacency.
pub fn repair_loops(nodes: Vec<NodeId>) -> Vec<NodeId> {
    let mut position: std::collections::HashMap<NodeId, usize> =
        std::collections::HashMap::with_capacity(nodes.len());
    let mut out: Vec<NodeId> = Vec::with_capacity(nodes.len());
    for n in nodes {
        if let Some(&at) = position.get(&n) {
            for dropped in out.drain(at + 1..) {
                position.remove(&dropped);
            }
        } else {
            position.insert(n, out.len());
            out.push(n);
        }
    }
    out
}

/// Perimeter mutation: two genome positions at most half the genome apart
/// are rewired through a random node drawn within `r_max` of their
/// Euclidean midpoint, using budgeted random walks that honor the graph's
/// movement rules. Any failure (no candidate node, walk budget exhausted,
/// invalid result) returns the input unchanged.
pub fn perimeter_mutation(
    genome: &PathGenome,
    graph: &RoutingGraph,
    index: &SpatialIndex,
    rng: &mut impl Rng,
    r_max: f64,
) -> PathGenome {
    let k = genome.len();
    if r_max <= 0.0 || k < 3 {
        return genome.clone();
    }
    let i = rng.random_range(0..k - 1);
    let span = (k / 2).clamp(1, k - 1 - i);
    let j = i + rng.random_range(1..=span);

    let ni = genome.nodes()[i];
    let nj = genome.nodes()[j];
    let mid = (
        (graph.node(ni).x + graph.node(nj).x) / 2.0,
        (graph.node(ni).y + graph.node(nj).y) / 2.0,
    );
    let candidates = index.nodes_within(mid, r_max);
    if candidates.is_empty() {
        return genome.clone();
    }
    let via = candidates[rng.random_range(0..candidates.len())];

    let budget = walk_budget(graph);
    let Some(leg1) = directed_walk(graph, ni, via, budget, rng) else {
        return genome.clone();
    };
    let Some(leg2) = directed_walk(graph, via, nj, budget, rng) else {
        return genome.clone();
    };

    let mut nodes = genome.nodes()[..i].to_vec();
    nodes.extend_from_slice(&leg1);
    nodes.extend_from_slice(&leg2[1..]);
    nodes.extend_from_slice(&genome.nodes()[j + 1..]);
    let repaired = repair_loops(nodes);
    PathGenome::new(repaired, graph).unwrap_or_else(|_| genome.clone())
}

/// Walk step budget: four times the bounding-box circumference in cells,
/// which is `4 * (size_x + size_y)` on generated lattices.
fn walk_budget(graph: &RoutingGraph) -> usize {
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for n in graph.nodes() {
        min_x = min_x.min(n.x);
        min_y = min_y.min(n.y);
        max_x = max_x.max(n.x);
        max_y = max_y.max(n.y);
    }
    let w = (max_x - min_x).max(0.0) + 1.0;
    let h = (max_y - min_y).max(0.0) + 1.0;
    (4.0 * (w + h)).ceil() as usize
}

/// Random local search from `from` to `to` along graph edges. On directed
/// graphs only moves keeping `to` ahead (inside the rectangle spanned
/// towards it) are taken, so the walk either reaches `to` or fails fast;
/// undirected graphs walk self-avoidingly. `None` on failure.
fn directed_walk(
    graph: &RoutingGraph,
    from: NodeId,
    to: NodeId,
    budget: usize,
    rng: &mut impl Rng,
) -> Option<Vec<NodeId>> {
    if from == to {
        return Some(vec![from]);
    }
    let target = graph.node(to);
    let directed = graph.is_directed();
    if directed {
        let here = graph.node(from);
        if here.x > target.x || here.y > target.y {
            return None;
        }
    }
    let mut visited = vec![false; graph.node_count()];
    visited[from.index()] = true;
    let mut path = vec![from];
    let mut scratch = Vec::new();
    for _ in 0..budget {
        let here = *path.last().unwrap();
        if here == to {
            return Some(path);
        }
        scratch.clear();
        for &n in graph.successors(here) {
            if visited[n.index()] {
                continue;
            }
            if directed {
                let p = graph.node(n);
                if p.x > target.x || p.y > target.y {
                    continue;
                }
            }
            scratch.push(n);
        }
        if scratch.is_empty() {
            return None;
        }
        let next = scratch[rng.random_range(0..scratch.len())];
        visited[next.index()] = true;
        path.push(next);
    }
    (*path.last().unwrap() == to).then_some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn graph(name: &str) -> RoutingGraph {
        RoutingGraph::from_world(&InstanceSpec::parse(name).unwrap().build_world())
    }

    #[test]
    fn random_paths_cover_the_whole_tiny_search_space() {
        let g = graph("ASLETISMAC_NO_X3_Y3_PM_K2_BF");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut support: HashSet<Vec<NodeId>> = HashSet::new();
        for _ in 0..10_000 {
            let p = random_path(&g, &mut rng).unwrap();
            PathGenome::new(p.nodes().to_vec(), &g).expect("sampled genomes are valid");
            support.insert(p.into_nodes());
        }
        assert_eq!(support.len(), 6, "all C(4,2) monotone paths show up");
    }

    #[test]
    fn random_paths_are_valid_on_obstacle_and_backtracking_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for name in [
            "ASLETISMAC_CH_X8_Y8_PM_K2_BF",
            "ASLETISMAC_LA_X10_Y10_P1_K3_BF",
            "ASLETISMAC_CH_X6_Y6_P2_K3_BT",
        ] {
            let g = graph(name);
            for _ in 0..300 {
                let p = random_path(&g, &mut rng).unwrap();
                PathGenome::new(p.into_nodes(), &g).expect("valid genome");
            }
        }
    }

    #[test]
    fn random_path_is_seed_deterministic() {
        let g = graph("ASLETISMAC_NO_X6_Y6_PM_K3_BF");
        let sample = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| random_path(&g, &mut rng).unwrap().into_nodes())
                .collect::<Vec<_>>()
        };
        assert_eq!(sample(7), sample(7));
        assert_ne!(sample(7), sample(8));
    }

    #[test]
    fn random_path_fails_on_unreachable_graphs() {
        let mut spec = InstanceSpec::parse("ASLETISMAC_LA_X10_Y10_PM_K2_BF").unwrap();
        spec.lake_radius_ratio = 0.6;
        let g = RoutingGraph::from_world(&spec.build_world());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_path(&g, &mut rng).is_none());
    }

    #[test]
    fn crossover_with_identical_parents_is_identity() {
        let g = graph("ASLETISMAC_NO_X5_Y5_PM_K2_BF");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_path(&g, &mut rng).unwrap();
        for _ in 0..50 {
            let (c1, c2) = crossover(&p, &p, &g, &mut rng);
            assert_eq!(c1, p);
            assert_eq!(c2, p);
        }
    }

    #[test]
    fn crossover_with_disjoint_interiors_returns_parents() {
        let g = graph("ASLETISMAC_NO_X3_Y3_PM_K2_BF");
        let at = |x: f64, y: f64| {
            NodeId(g.nodes().iter().position(|n| n.x == x && n.y == y).unwrap() as u32)
        };
        // along the top then down vs down then along the bottom
        let a = PathGenome::new(
            vec![at(0.0, 0.0), at(1.0, 0.0), at(2.0, 0.0), at(2.0, 1.0), at(2.0, 2.0)],
            &g,
        )
        .unwrap();
        let b = PathGenome::new(
            vec![at(0.0, 0.0), at(0.0, 1.0), at(0.0, 2.0), at(1.0, 2.0), at(2.0, 2.0)],
            &g,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (c1, c2) = crossover(&a, &b, &g, &mut rng);
        assert_eq!(c1, a);
        assert_eq!(c2, b);
    }

    #[test]
    fn crossover_through_a_single_shared_node_recombines_tails() {
        let g = graph("ASLETISMAC_NO_X5_Y5_PM_K2_BF");
        let at = |x: u32, y: u32| {
            NodeId(
                g.nodes()
                    .iter()
                    .position(|n| n.x == f64::from(x) && n.y == f64::from(y))
                    .unwrap() as u32,
            )
        };
        let path = |cells: &[(u32, u32)]| {
            PathGenome::new(cells.iter().map(|&(x, y)| at(x, y)).collect(), &g).unwrap()
        };
        // both pass through (2,2) and share nothing else
        let a = path(&[(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (2, 3), (2, 4), (3, 4), (4, 4)]);
        let b = path(&[(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (3, 2), (4, 2), (4, 3), (4, 4)]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (c1, c2) = crossover(&a, &b, &g, &mut rng);
        let expect1 = path(&[(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (3, 2), (4, 2), (4, 3), (4, 4)]);
        let expect2 = path(&[(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 3), (2, 4), (3, 4), (4, 4)]);
        assert_eq!(c1, expect1);
        assert_eq!(c2, expect2);
    }

    #[test]
    fn crossover_offspring_stay_valid_under_stress() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for name in ["ASLETISMAC_CH_X8_Y8_PM_K3_BF", "ASLETISMAC_NO_X5_Y5_PM_K2_BT"] {
            let g = graph(name);
            for _ in 0..500 {
                let a = random_path(&g, &mut rng).unwrap();
                let b = random_path(&g, &mut rng).unwrap();
                let (c1, c2) = crossover(&a, &b, &g, &mut rng);
                PathGenome::new(c1.into_nodes(), &g).expect("child 1 valid");
                PathGenome::new(c2.into_nodes(), &g).expect("child 2 valid");
            }
        }
    }

    #[test]
    fn repair_splices_out_cycles() {
        let n = |i: u32| NodeId(i);
        assert_eq!(
            repair_loops(vec![n(0), n(1), n(2), n(1), n(3)]),
            vec![n(0), n(1), n(3)]
        );
        assert_eq!(
            repair_loops(vec![n(0), n(1), n(2)]),
            vec![n(0), n(1), n(2)],
            "already simple"
        );
        // nested repeats collapse to a simple sequence
        let messy = vec![n(0), n(1), n(2), n(3), n(2), n(4), n(1), n(5)];
        let fixed = repair_loops(messy);
        let unique: HashSet<_> = fixed.iter().collect();
        assert_eq!(unique.len(), fixed.len());
        assert_eq!(fixed, vec![n(0), n(1), n(5)]);
    }

    #[test]
    fn mutation_keeps_genomes_valid_and_monotone() {
        let g = graph("ASLETISMAC_NO_X8_Y8_PM_K2_BF");
        let index = SpatialIndex::build(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut changed = 0u32;
        for _ in 0..10_000 {
            let p = random_path(&g, &mut rng).unwrap();
            let m = perimeter_mutation(&p, &g, &index, &mut rng, 2.0);
            let m = PathGenome::new(m.into_nodes(), &g).expect("mutant valid");
            for w in m.nodes().windows(2) {
                let (a, b) = (g.node(w[0]), g.node(w[1]));
                assert!(b.x >= a.x && b.y >= a.y, "monotone moves only");
            }
            if m != p {
                changed += 1;
            }
        }
        assert!(changed > 2_000, "mutation changes paths often enough ({changed})");
    }

    #[test]
    fn mutation_with_zero_radius_is_identity() {
        let g = graph("ASLETISMAC_NO_X6_Y6_PM_K3_BF");
        let index = SpatialIndex::build(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = random_path(&g, &mut rng).unwrap();
            assert_eq!(perimeter_mutation(&p, &g, &index, &mut rng, 0.0), p);
        }
    }

    #[test]
    fn mutation_works_on_undirected_graphs() {
        let g = graph("ASLETISMAC_NO_X6_Y6_PM_K3_BT");
        let index = SpatialIndex::build(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..2_000 {
            let p = random_path(&g, &mut rng).unwrap();
            let m = perimeter_mutation(&p, &g, &index, &mut rng, 3.0);
            PathGenome::new(m.into_nodes(), &g).expect("mutant valid");
        }
    }

    #[test]
    fn directed_walk_targets_must_lie_ahead() {
        let g = graph("ASLETISMAC_NO_X6_Y6_PM_K2_BF");
        let at = |x: f64, y: f64| {
            NodeId(g.nodes().iter().position(|n| n.x == x && n.y == y).unwrap() as u32)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // target north-west of the origin: infeasible on a forward graph
        assert!(directed_walk(&g, at(3.0, 3.0), at(1.0, 1.0), 100, &mut rng).is_none());
        for _ in 0..50 {
            let walk = directed_walk(&g, at(1.0, 1.0), at(4.0, 2.0), 100, &mut rng).unwrap();
            assert_eq!(*walk.first().unwrap(), at(1.0, 1.0));
            assert_eq!(*walk.last().unwrap(), at(4.0, 2.0));
            for w in walk.windows(2) {
                assert!(g.has_edge(w[0], w[1]));
            }
        }
    }
}
