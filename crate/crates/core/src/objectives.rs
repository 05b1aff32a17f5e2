//! Path evaluation under the five minimization objectives: Euclidean length,
//! delay, aggregated ascent, traveling time and smoothness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DelayModel, NodeId, RoutingGraph};

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("road classes are only defined for positive velocities, got {0}")]
    NonPositiveVelocity(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum GenomeError {
    #[error("a path needs at least one node")]
    Empty,
    #[error("path must begin at the graph start node")]
    WrongStart,
    #[error("path must finish at the graph end node")]
    WrongEnd,
    #[error("nodes at positions {0} and {1} are not connected")]
    NotAdjacent(usize, usize),
    #[error("node {0:?} appears more than once")]
    RepeatedNode(NodeId),
}

/// A candidate solution: a simple start-to-end path as a node list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathGenome {
    nodes: Vec<NodeId>,
}

impl PathGenome {
    /// Validates the full genome contract: starts at the graph start, ends
    /// at the graph end, every hop is an edge, no node repeats.
    pub fn new(nodes: Vec<NodeId>, graph: &RoutingGraph) -> Result<Self, GenomeError> {
        if nodes.is_empty() {
            return Err(GenomeError::Empty);
        }
        if nodes[0] != graph.start() {
            return Err(GenomeError::WrongStart);
        }
        if *nodes.last().unwrap() != graph.end() {
            return Err(GenomeError::WrongEnd);
        }
        for (i, pair) in nodes.windows(2).enumerate() {
            if !graph.has_edge(pair[0], pair[1]) {
                return Err(GenomeError::NotAdjacent(i, i + 1));
            }
        }
        let mut seen = vec![false; graph.node_count()];
        for &n in &nodes {
            if std::mem::replace(&mut seen[n.index()], true) {
                return Err(GenomeError::RepeatedNode(n));
            }
        }
        Ok(PathGenome { nodes })
    }

    /// Wraps a node list that is valid by construction.
    pub(crate) fn from_validated(nodes: Vec<NodeId>) -> Self {
        PathGenome { nodes }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn into_nodes(self) -> Vec<NodeId> {
        self.nodes
    }
}

/// The five objective values of one path, all minimized.
///
/// Component order is fixed: length, delay, ascent, time, smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub length: f64,
    pub delay: f64,
    pub ascent: f64,
    pub time: f64,
    pub smoothness: f64,
}

impl ObjectiveVector {
    pub const DIM: usize = 5;
    pub const NAMES: [&'static str; 5] = ["f1", "f2", "f3", "f4", "f5"];

    pub fn as_array(&self) -> [f64; 5] {
        [self.length, self.delay, self.ascent, self.time, self.smoothness]
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.as_array().to_vec()
    }

    pub fn from_array(values: [f64; 5]) -> Self {
        ObjectiveVector {
            length: values[0],
            delay: values[1],
            ascent: values[2],
            time: values[3],
            smoothness: values[4],
        }
    }
}

/// Road classes behind the delay objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoadClass {
    City,
    Country,
    Highway,
}

/// Maps a velocity to its road class: 50 city, 100 country, 130 highway;
/// other positive velocities snap to the nearest tier, ties upward.
pub fn road_class(velocity: f64) -> Result<RoadClass, ObjectiveError> {
    if !(velocity > 0.0) {
        return Err(ObjectiveError::NonPositiveVelocity(velocity));
    }
    let mut best = (f64::INFINITY, RoadClass::City);
    for (speed, class) in [
        (crate::instance::VELOCITY_CITY, RoadClass::City),
        (crate::instance::VELOCITY_COUNTRY, RoadClass::Country),
        (crate::instance::VELOCITY_HIGHWAY, RoadClass::Highway),
    ] {
        let gap = (velocity - speed).abs();
        if gap <= best.0 {
            best = (gap, class); // ties resolve upward: later tiers win
        }
    }
    Ok(best.1)
}

#[inline]
fn class_of(graph: &RoutingGraph, id: NodeId) -> RoadClass {
    road_class(graph.node(id).velocity).expect("graph nodes always have positive velocity")
}

/// Delay contribution of one edge under the road-class model. Mixed classes
/// score first, then city/city, country/country and highway/highway.
#[inline]
pub(crate) fn edge_delay(graph: &RoutingGraph, u: NodeId, v: NodeId) -> f64 {
    let a = class_of(graph, u);
    let b = class_of(graph, v);
    if a != b {
        2.0
    } else {
        match a {
            RoadClass::City => 3.0,
            RoadClass::Country => 1.0,
            RoadClass::Highway => 0.2,
        }
    }
}

/// f1: sum of Euclidean hop distances.
pub fn length(path: &PathGenome, graph: &RoutingGraph) -> f64 {
    path.nodes().windows(2).map(|w| graph.distance(w[0], w[1])).sum()
}

/// f2: accumulated delay. Generated lattice graphs derive it from the road
/// classes of each hop's endpoints; imported graphs sum the per-node delay
/// weights of every node after the start (each arrival counts once).
pub fn delay(path: &PathGenome, graph: &RoutingGraph) -> f64 {
    match graph.delay_model() {
        DelayModel::RoadClass => path
            .nodes()
            .windows(2)
            .map(|w| edge_delay(graph, w[0], w[1]))
            .sum(),
        DelayModel::NodeWeights => path.nodes()[1..]
            .iter()
            .map(|&n| graph.node(n).delay_weight)
            .sum(),
    }
}

/// f3: aggregated ascent; only climbs count, descents contribute nothing.
pub fn ascent(path: &PathGenome, graph: &RoutingGraph) -> f64 {
    path.nodes()
        .windows(2)
        .map(|w| (graph.node(w[1]).elevation - graph.node(w[0]).elevation).max(0.0))
        .sum()
}

/// f4: traveling time in hours, each hop at the mean of its endpoint
/// velocities.
pub fn travel_time(path: &PathGenome, graph: &RoutingGraph) -> f64 {
    path.nodes()
        .windows(2)
        .map(|w| {
            2.0 * graph.distance(w[0], w[1])
                / (graph.node(w[0]).velocity + graph.node(w[1]).velocity)
        })
        .sum()
}

/// Turn angle at `b` between segments `a -> b` and `b -> c`, in radians.
///
/// Equals the clamped arccos of the normalized direction dot product, but is
/// evaluated through atan2 of the cross and dot products: that form is exact
/// on collinear integer-lattice segments, where dividing by the product of
/// norms loses about 1e-8 under arccos.
#[inline]
pub(crate) fn turn_angle(graph: &RoutingGraph, a: NodeId, b: NodeId, c: NodeId) -> f64 {
    let (pa, pb, pc) = (graph.node(a), graph.node(b), graph.node(c));
    let (ux, uy) = (pb.x - pa.x, pb.y - pa.y);
    let (vx, vy) = (pc.x - pb.x, pc.y - pb.y);
    if (ux == 0.0 && uy == 0.0) || (vx == 0.0 && vy == 0.0) {
        // Coincident points can occur in imported data; a zero-length
        // segment has no direction, so it contributes no turn.
        return 0.0;
    }
    let cross = ux * vy - uy * vx;
    let dot = ux * vx + uy * vy;
    cross.abs().atan2(dot)
}

/// f5: smoothness, the summed turn angles along the path; 0 for two-node
/// paths.
pub fn smoothness(path: &PathGenome, graph: &RoutingGraph) -> f64 {
    let nodes = path.nodes();
    (1..nodes.len().saturating_sub(1))
        .map(|i| turn_angle(graph, nodes[i - 1], nodes[i], nodes[i + 1]))
        .sum()
}

/// Evaluates all five objectives in their fixed order.
pub fn evaluate(path: &PathGenome, graph: &RoutingGraph) -> ObjectiveVector {
    ObjectiveVector {
        length: length(path, graph),
        delay: delay(path, graph),
        ascent: ascent(path, graph),
        time: travel_time(path, graph),
        smoothness: smoothness(path, graph),
    }
}
