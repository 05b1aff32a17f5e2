//! Exhaustive path enumeration: a depth-first sweep over every simple
//! start-to-end path with incremental objective evaluation, used to compute
//! exact (true) Pareto fronts of benchmark instances.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{DelayModel, NodeId, RoutingGraph};
use crate::objectives::{self, ObjectiveVector};
use crate::pareto::ParetoArchive;

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("end node is not reachable from the start node")]
    Unreachable,
}

/// Outcome of one enumeration sweep.
#[derive(Debug, Clone)]
pub struct EnumerationReport {
    /// Complete start-to-end paths visited.
    pub paths_visited: BigUint,
    /// Non-dominated set over all visited paths, payloads are the paths.
    pub archive: ParetoArchive<Vec<NodeId>>,
    pub wall_time: Duration,
    /// True when a path budget stopped the sweep before exhaustion.
    pub aborted: bool,
}

/// Incremental objective accumulator for a growing/shrinking path. Pushing
/// a node costs O(1). Each push snapshots the previous totals and popping
/// restores the snapshot, so the running sums are bit-identical to a fresh
/// left-to-right evaluation of the current path (subtracting the delta
/// instead would drift by rounding and flip near-tie dominance decisions).
struct RunningObjectives<'g> {
    graph: &'g RoutingGraph,
    totals: [f64; 5],
    snapshots: Vec<[f64; 5]>,
}

impl<'g> RunningObjectives<'g> {
    fn new(graph: &'g RoutingGraph) -> Self {
        RunningObjectives { graph, totals: [0.0; 5], snapshots: Vec::new() }
    }

    /// Extends the path `(..., prev2?, prev) -> next`.
    fn push(&mut self, prev2: Option<NodeId>, prev: NodeId, next: NodeId) {
        let g = self.graph;
        self.snapshots.push(self.totals);
        let delta = [
            g.distance(prev, next),
            match g.delay_model() {
                DelayModel::RoadClass => objectives::edge_delay(g, prev, next),
                DelayModel::NodeWeights => g.node(next).delay_weight,
            },
            (g.node(next).elevation - g.node(prev).elevation).max(0.0),
            2.0 * g.distance(prev, next) / (g.node(prev).velocity + g.node(next).velocity),
            prev2.map_or(0.0, |a| objectives::turn_angle(g, a, prev, next)),
        ];
        for (total, d) in self.totals.iter_mut().zip(delta) {
            *total += d;
        }
    }

    fn pop(&mut self) {
        self.totals = self.snapshots.pop().expect("pop matches a push");
    }

    fn current(&self) -> ObjectiveVector {
        ObjectiveVector::from_array(self.totals)
    }
}

/// Enumerates every distinct simple start-to-end path in depth-first order,
/// successors in ascending id order, calling `visitor` once per complete
/// path with the node sequence and its objective vector.
///
/// `budget` caps the number of visited paths; hitting it sets the returned
/// report's `aborted` flag (the flag stays clear when the budget exactly
/// covers the path count). The report's archive is left empty; use
/// [`true_front`] to collect the non-dominated set.
pub fn enumerate_paths<F>(
    graph: &RoutingGraph,
    budget: Option<u64>,
    mut visitor: F,
) -> Result<EnumerationReport, EnumerateError>
where
    F: FnMut(&[NodeId], &ObjectiveVector),
{
    if !graph.is_reachable() {
        return Err(EnumerateError::Unreachable);
    }
    let started = Instant::now();
    let mut visited: u64 = 0;
    let mut aborted = false;

    let start = graph.start();
    let end = graph.end();
    let mut path = vec![start];
    let mut on_path = vec![false; graph.node_count()];
    on_path[start.index()] = true;
    // Per-level iterator state: index of the next successor to try.
    let mut cursor = vec![0usize];
    let mut running = RunningObjectives::new(graph);

    if start == end {
        visitor(&path, &running.current());
        visited = 1;
    } else {
        'dfs: while let Some(level) = cursor.len().checked_sub(1) {
            let here = path[level];
            let succ = graph.successors(here);
            let mut advanced = false;
            while cursor[level] < succ.len() {
                let next = succ[cursor[level]];
                cursor[level] += 1;
                if on_path[next.index()] {
                    continue;
                }
                if next == end {
                    if budget == Some(visited) {
                        aborted = true;
                        break 'dfs;
                    }
                    let prev2 = level.checked_sub(1).map(|i| path[i]);
                    running.push(prev2, here, next);
                    path.push(next);
                    visitor(&path, &running.current());
                    visited += 1;
                    path.pop();
                    running.pop();
                    // paths never extend past the end node
                    continue;
                }
                let prev2 = level.checked_sub(1).map(|i| path[i]);
                running.push(prev2, here, next);
                path.push(next);
                on_path[next.index()] = true;
                cursor.push(0);
                advanced = true;
                break;
            }
            if !advanced && cursor.len() == level + 1 {
                cursor.pop();
                if level > 0 {
                    let done = path.pop().expect("path aligns with cursor");
                    on_path[done.index()] = false;
                    running.pop();
                }
            }
        }
    }

    Ok(EnumerationReport {
        paths_visited: BigUint::from(visited),
        archive: ParetoArchive::new(),
        wall_time: started.elapsed(),
        aborted,
    })
}

/// Enumerates all paths and keeps the non-dominated set; the true Pareto
/// front when the sweep runs unbudgeted to exhaustion.
pub fn true_front(
    graph: &RoutingGraph,
    budget: Option<u64>,
) -> Result<EnumerationReport, EnumerateError> {
    let started = Instant::now();
    let mut archive = ParetoArchive::new();
    let mut report = enumerate_paths(graph, budget, |nodes, objectives| {
        archive.insert(objectives.to_vec(), nodes.to_vec());
    })?;
    report.archive = archive;
    report.wall_time = started.elapsed();
    Ok(report)
}

/// [`true_front`] with the first-level subtrees enumerated in parallel and
/// the per-worker archives folded together. Only exhaustive sweeps can be
/// split this way, so there is no budget parameter.
pub fn true_front_parallel(graph: &RoutingGraph) -> Result<EnumerationReport, EnumerateError> {
    use rayon::prelude::*;

    if !graph.is_reachable() {
        return Err(EnumerateError::Unreachable);
    }
    let started = Instant::now();
    let start = graph.start();
    let end = graph.end();
    if start == end || graph.successors(start).len() < 2 {
        return true_front(graph, None);
    }

    let subtrees: Vec<(BigUint, ParetoArchive<Vec<NodeId>>)> = graph
        .successors(start)
        .par_iter()
        .map(|&first| {
            let mut archive = ParetoArchive::new();
            let mut count = BigUint::from(0u32);
            if first == end {
                let genome = crate::objectives::PathGenome::from_validated(vec![start, end]);
                let v = objectives::evaluate(&genome, graph);
                archive.insert(v.to_vec(), vec![start, end]);
                count += 1u32;
            } else {
                let sub = SubtreeWalk::run(graph, first, &mut archive);
                count = sub;
            }
            (count, archive)
        })
        .collect();

    let mut archive = ParetoArchive::new();
    let mut total = BigUint::from(0u32);
    for (count, part) in subtrees {
        total += count;
        archive.merge(part);
    }
    Ok(EnumerationReport {
        paths_visited: total,
        archive,
        wall_time: started.elapsed(),
        aborted: false,
    })
}

/// Sequential DFS over one first-level subtree, used by the parallel front.
struct SubtreeWalk;

impl SubtreeWalk {
    fn run(
        graph: &RoutingGraph,
        first: NodeId,
        archive: &mut ParetoArchive<Vec<NodeId>>,
    ) -> BigUint {
        let start = graph.start();
        let end = graph.end();
        let mut visited: u64 = 0;
        let mut path = vec![start, first];
        let mut on_path = vec![false; graph.node_count()];
        on_path[start.index()] = true;
        on_path[first.index()] = true;
        let mut cursor = vec![0usize];
        let mut running = RunningObjectives::new(graph);
        running.push(None, start, first);

        while let Some(level) = cursor.len().checked_sub(1) {
            let here = path[level + 1];
            let succ = graph.successors(here);
            let mut advanced = false;
            while cursor[level] < succ.len() {
                let next = succ[cursor[level]];
                cursor[level] += 1;
                if on_path[next.index()] {
                    continue;
                }
                let prev2 = path[level];
                if next == end {
                    running.push(Some(prev2), here, next);
                    path.push(next);
                    archive.insert(running.current().to_vec(), path.clone());
                    visited += 1;
                    path.pop();
                    running.pop();
                    continue;
                }
                running.push(Some(prev2), here, next);
                path.push(next);
                on_path[next.index()] = true;
                cursor.push(0);
                advanced = true;
                break;
            }
            if !advanced && cursor.len() == level + 1 {
                cursor.pop();
                let done = path.pop().expect("path aligns with cursor");
                if done != first {
                    on_path[done.index()] = false;
                    running.pop();
                }
            }
        }
        BigUint::from(visited)
    }
}
