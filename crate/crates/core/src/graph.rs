//! Routing graphs: lattice graphs built from instance worlds, attributed
//! graphs imported from JSON, reachability, exact path counting and spatial
//! radius queries.

use std::collections::VecDeque;
use std::io;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::LatticeWorld;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph document parse error: {0}")]
    Parse(String),
    #[error("node {id} lacks required attribute {attribute}")]
    MissingAttribute { id: u64, attribute: &'static str },
    #[error("reference to undeclared node id {0}")]
    UnknownNodeRef(u64),
    #[error("node {id} has invalid {attribute}: {value}")]
    InvalidAttribute { id: u64, attribute: &'static str, value: f64 },
    #[error("duplicate node id {0}")]
    DuplicateNode(u64),
    #[error("path counting requires an acyclic graph")]
    CyclicGraph,
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Dense node index within one [`RoutingGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// How the delay objective is evaluated on this graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayModel {
    /// Edge delays derived from the road classes of both endpoints
    /// (generated lattice instances).
    RoadClass,
    /// Per-node delay weights summed over visited nodes (imported graphs,
    /// where weights carry e.g. mapped accident counts).
    NodeWeights,
}

/// Attributes of a single routing node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeAttrs {
    pub x: f64,
    pub y: f64,
    /// Maximum velocity in km/h, always positive: obstacle cells are not
    /// part of the graph at all.
    pub velocity: f64,
    pub elevation: f64,
    pub delay_weight: f64,
}

/// Immutable attributed routing graph.
///
/// Adjacency lists hold successor ids in ascending order with no duplicates
/// or self-loops. Undirected graphs store each edge in both endpoint lists.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingGraph {
    nodes: Vec<NodeAttrs>,
    adjacency: Vec<Vec<NodeId>>,
    directed: bool,
    start: NodeId,
    end: NodeId,
    delay_model: DelayModel,
    label: Option<String>,
}

impl RoutingGraph {
    /// Builds the lattice graph of a materialized instance: one node per
    /// passable cell, edges per the instance's neighbourhood and
    /// backtracking rules.
    ///
    /// Without backtracking only east, south (and south-east for K3) moves
    /// exist and the graph is a DAG; with backtracking the graph is
    /// undirected.
    pub fn from_world(world: &LatticeWorld) -> Self {
        let (sx, sy) = (world.size_x(), world.size_y());
        let mut cell_ids = vec![None; sx as usize * sy as usize];
        let mut nodes = Vec::new();
        for y in 0..sy {
            for x in 0..sx {
                if world.is_obstacle(x, y) {
                    continue;
                }
                cell_ids[(y * sx + x) as usize] = Some(NodeId(nodes.len() as u32));
                nodes.push(NodeAttrs {
                    x: f64::from(x),
                    y: f64::from(y),
                    velocity: world.velocity.get(x, y),
                    elevation: world.elevation.get(x, y),
                    delay_weight: 0.0,
                });
            }
        }

        let diagonal = world.spec.neighbourhood.k() == 3;
        let backtracking = world.spec.backtracking;
        let steps: &[(i64, i64)] = if backtracking {
            if diagonal {
                &[(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
            } else {
                &[(1, 0), (0, 1), (-1, 0), (0, -1)]
            }
        } else if diagonal {
            &[(1, 0), (0, 1), (1, 1)]
        } else {
            &[(1, 0), (0, 1)]
        };

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for y in 0..sy {
            for x in 0..sx {
                let Some(from) = cell_ids[(y * sx + x) as usize] else { continue };
                for &(dx, dy) in steps {
                    let (nx, ny) = (i64::from(x) + dx, i64::from(y) + dy);
                    if nx < 0 || ny < 0 || nx >= i64::from(sx) || ny >= i64::from(sy) {
                        continue;
                    }
                    if let Some(to) = cell_ids[(ny as u32 * sx + nx as u32) as usize] {
                        adjacency[from.index()].push(to);
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let start = cell_ids[(world.start.1 * sx + world.start.0) as usize]
            .expect("start cell is never an obstacle");
        let end = cell_ids[(world.end.1 * sx + world.end.0) as usize]
            .expect("end cell is never an obstacle");
        RoutingGraph {
            nodes,
            adjacency,
            directed: !backtracking,
            start,
            end,
            delay_model: DelayModel::RoadClass,
            label: Some(world.spec.name()),
        }
    }

    /// Parses the JSON graph interchange format.
    pub fn from_json_str(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn from_json_reader(reader: impl io::Read) -> Result<Self, GraphError> {
        let doc: GraphDoc =
            serde_json::from_reader(reader).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::from_doc(doc)
    }

    fn from_doc(doc: GraphDoc) -> Result<Self, GraphError> {
        // Dense internal ids follow document order.
        let mut dense = std::collections::HashMap::with_capacity(doc.nodes.len());
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for n in &doc.nodes {
            let attr = |value: Option<f64>, attribute: &'static str| {
                value.ok_or(GraphError::MissingAttribute { id: n.id, attribute })
            };
            let velocity = attr(n.maxspeed, "maxspeed")?;
            if !velocity.is_finite() || velocity <= 0.0 {
                return Err(GraphError::InvalidAttribute {
                    id: n.id,
                    attribute: "maxspeed",
                    value: velocity,
                });
            }
            if dense.insert(n.id, NodeId(nodes.len() as u32)).is_some() {
                return Err(GraphError::DuplicateNode(n.id));
            }
            nodes.push(NodeAttrs {
                x: attr(n.x, "x")?,
                y: attr(n.y, "y")?,
                velocity,
                elevation: attr(n.elevation, "elevation")?,
                delay_weight: n.delay,
            });
        }
        let lookup =
            |id: u64| -> Result<NodeId, GraphError> { dense.get(&id).copied().ok_or(GraphError::UnknownNodeRef(id)) };

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &doc.edges {
            let u = lookup(e.u)?;
            let v = lookup(e.v)?;
            if u == v {
                continue; // self-loops carry no information for routing
            }
            adjacency[u.index()].push(v);
            if !doc.directed {
                adjacency[v.index()].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }

        Ok(RoutingGraph {
            nodes,
            adjacency,
            directed: doc.directed,
            start: lookup(doc.start)?,
            end: lookup(doc.end)?,
            delay_model: DelayModel::NodeWeights,
            label: None,
        })
    }

    /// Serializes to the JSON graph interchange format. Undirected edges are
    /// written once with `u < v`.
    pub fn to_json_string(&self) -> String {
        let mut edges = Vec::new();
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                if self.directed || u as u64 <= u64::from(v.0) {
                    edges.push(EdgeDoc { u: u as u64, v: u64::from(v.0) });
                }
            }
        }
        let doc = GraphDoc {
            directed: self.directed,
            start: u64::from(self.start.0),
            end: u64::from(self.end.0),
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeDoc {
                    id: id as u64,
                    x: Some(n.x),
                    y: Some(n.y),
                    elevation: Some(n.elevation),
                    maxspeed: Some(n.velocity),
                    delay: n.delay_weight,
                })
                .collect(),
            edges,
        };
        serde_json::to_string(&doc).expect("graph serialization cannot fail")
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of edges; undirected edges count once.
    pub fn edge_count(&self) -> usize {
        let arcs: usize = self.adjacency.iter().map(Vec::len).sum();
        if self.directed {
            arcs
        } else {
            arcs / 2
        }
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &NodeAttrs {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[NodeAttrs] {
        &self.nodes
    }

    /// Successors of `id`, ascending, never containing `id` itself.
    #[inline]
    pub fn successors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id.index()]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u.index()].binary_search(&v).is_ok()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn end(&self) -> NodeId {
        self.end
    }

    pub fn delay_model(&self) -> DelayModel {
        self.delay_model
    }

    /// Overrides the delay semantics; imported graphs default to
    /// [`DelayModel::NodeWeights`], generated ones to [`DelayModel::RoadClass`].
    pub fn set_delay_model(&mut self, model: DelayModel) {
        self.delay_model = model;
    }

    /// Canonical instance name for generated graphs.
    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = Some(label.into());
    }

    #[inline]
    pub fn distance(&self, u: NodeId, v: NodeId) -> f64 {
        let a = self.node(u);
        let b = self.node(v);
        ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
    }

    /// Breadth-first reachability of the end node from the start node.
    pub fn is_reachable(&self) -> bool {
        if self.start == self.end {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        seen[self.start.index()] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(u) = queue.pop_front() {
            for &v in self.successors(u) {
                if v == self.end {
                    return true;
                }
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    }

    /// Exact number of distinct start-to-end paths, by dynamic programming
    /// over a topological order. Fails on cyclic (backtracking) graphs.
    pub fn count_paths(&self) -> Result<BigUint, GraphError> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        for list in &self.adjacency {
            for &v in list {
                indegree[v.index()] += 1;
            }
        }
        let mut queue: VecDeque<NodeId> = (0..n)
            .filter(|&i| indegree[i] == 0)
            .map(|i| NodeId(i as u32))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in self.successors(u) {
                indegree[v.index()] -= 1;
                if indegree[v.index()] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if order.len() != n {
            return Err(GraphError::CyclicGraph);
        }

        let zero = BigUint::from(0u32);
        let mut ways = vec![zero; n];
        ways[self.start.index()] = BigUint::from(1u32);
        for u in order {
            if ways[u.index()] == BigUint::from(0u32) {
                continue;
            }
            let from = ways[u.index()].clone();
            for &v in self.successors(u) {
                ways[v.index()] += &from;
            }
        }
        Ok(ways[self.end.index()].clone())
    }
}

// --- JSON interchange format --------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    directed: bool,
    start: u64,
    end: u64,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: u64,
    x: Option<f64>,
    y: Option<f64>,
    elevation: Option<f64>,
    maxspeed: Option<f64>,
    #[serde(default)]
    delay: f64,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    u: u64,
    v: u64,
}

// --- Spatial index --------------------------------------------------------

/// Uniform-bucket point index answering exact Euclidean radius queries over
/// graph nodes.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    cell: f64,
    min_x: f64,
    min_y: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<NodeId>>,
    points: Vec<(f64, f64)>,
}

impl SpatialIndex {
    pub fn build(graph: &RoutingGraph) -> Self {
        let points: Vec<(f64, f64)> = graph.nodes().iter().map(|n| (n.x, n.y)).collect();
        let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
        let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &points {
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        if points.is_empty() {
            (min_x, min_y, max_x, max_y) = (0.0, 0.0, 0.0, 0.0);
        }
        let extent = (max_x - min_x).max(max_y - min_y);
        // Aim for O(1) points per bucket on uniformly spread data.
        let cell = if extent > 0.0 {
            (extent / (points.len() as f64).sqrt().max(1.0)).max(extent * 1e-9)
        } else {
            1.0
        };
        let cols = if extent > 0.0 { ((max_x - min_x) / cell) as usize + 1 } else { 1 };
        let rows = if extent > 0.0 { ((max_y - min_y) / cell) as usize + 1 } else { 1 };
        let mut buckets = vec![Vec::new(); cols * rows];
        for (i, &(x, y)) in points.iter().enumerate() {
            let c = (((x - min_x) / cell) as usize).min(cols - 1);
            let r = (((y - min_y) / cell) as usize).min(rows - 1);
            buckets[r * cols + c].push(NodeId(i as u32));
        }
        SpatialIndex { cell, min_x, min_y, cols, rows, buckets, points }
    }

    /// All nodes with Euclidean distance `<= radius` from `center`,
    /// ascending by id.
    pub fn nodes_within(&self, center: (f64, f64), radius: f64) -> Vec<NodeId> {
        if radius < 0.0 || self.points.is_empty() {
            return Vec::new();
        }
        let col_range = |x: f64| ((x - self.min_x) / self.cell).floor();
        let clamp = |v: f64, hi: usize| (v.max(0.0) as usize).min(hi - 1);
        let c0 = clamp(col_range(center.0 - radius), self.cols);
        let c1 = clamp(col_range(center.0 + radius), self.cols);
        let r0 = clamp(((center.1 - radius - self.min_y) / self.cell).floor(), self.rows);
        let r1 = clamp(((center.1 + radius - self.min_y) / self.cell).floor(), self.rows);
        let rr = radius * radius;
        let mut out = Vec::new();
        for r in r0..=r1 {
            for c in c0..=c1 {
                for &id in &self.buckets[r * self.cols + c] {
                    let (x, y) = self.points[id.index()];
                    let d2 = (x - center.0).powi(2) + (y - center.1).powi(2);
                    if d2 <= rr {
                        out.push(id);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}
