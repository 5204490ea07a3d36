//! Finite directed graphs and their free semigroupoids.
//!
//! A [`Path`] is either a vertex (a unit of the semigroupoid) or a nonempty
//! admissible edge word `e_1 e_2 ... e_k` with `r(e_i) = s(e_{i+1})`. Paths
//! carry their own source and range, so path arithmetic never needs the graph
//! once a path has been built.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a vertex in its graph's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of an edge in its graph's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("inadmissible product: range {left:?} does not match source {right:?}")]
    Inadmissible { left: VertexId, right: VertexId },
    #[error("malformed graph document: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub src: VertexId,
    pub rng: VertexId,
}

/// A finite directed graph with named vertices and edges.
///
/// Vertex and edge names share one namespace so that the textual path syntax
/// (`v1` for a vertex, `e1.e2` for an edge word) is unambiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
}

/// JSON document shape: `{"vertices": [...], "edges": [{"id","src","rng"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub id: String,
    pub src: String,
    pub rng: String,
}

impl DirectedGraph {
    /// Builds and validates a graph. `edges` are `(id, source, range)` triples.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        if vertices.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), VertexId(i)).is_some() {
                return Err(GraphError::DuplicateId(v.clone()));
            }
        }
        let mut edge_list = Vec::new();
        let mut edge_index = HashMap::new();
        for (i, (name, src, rng)) in edges.into_iter().enumerate() {
            if vertex_index.contains_key(&name) || edge_index.contains_key(&name) {
                return Err(GraphError::DuplicateId(name));
            }
            let lookup = |v: &String| {
                vertex_index.get(v).copied().ok_or_else(|| GraphError::DanglingEndpoint {
                    edge: name.clone(),
                    vertex: v.clone(),
                })
            };
            let (s, r) = (lookup(&src)?, lookup(&rng)?);
            edge_index.insert(name.clone(), EdgeId(i));
            edge_list.push(Edge { name, src: s, rng: r });
        }
        Ok(Self {
            vertices,
            edges: edge_list,
            vertex_index,
            edge_index,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_parts(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self, GraphError> {
        Self::new(
            vertices.iter().copied(),
            edges
                .iter()
                .map(|(e, s, r)| (e.to_string(), s.to_string(), r.to_string())),
        )
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self, GraphError> {
        Self::new(doc.vertices, doc.edges.into_iter().map(|e| (e.id, e.src, e.rng)))
    }

    /// Parses the JSON graph file format.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    id: e.name.clone(),
                    src: self.vertices[e.src.0].clone(),
                    rng: self.vertices[e.rng.0].clone(),
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn vertex_name(&self, id: VertexId) -> &str {
        &self.vertices[id.0]
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, GraphError> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId, GraphError> {
        self.edge_index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))
    }

    /// The single-edge path `e`.
    pub fn edge_path(&self, id: EdgeId) -> Path {
        let e = self.edge(id);
        Path {
            src: e.src,
            rng: e.rng,
            edges: vec![id],
        }
    }

    /// Parses `v` (vertex) or `e1.e2...` (edge word).
    pub fn parse_path(&self, text: &str) -> Result<Path, GraphError> {
        let text = text.trim();
        if let Some(&v) = self.vertex_index.get(text) {
            return Ok(Path::vertex(v));
        }
        let mut parts = text.split('.');
        let first = parts.next().unwrap_or_default();
        let mut path = self.edge_path(self.edge_id(first)?);
        for name in parts {
            let next = self.edge_path(self.edge_id(name)?);
            path = path.concat(&next)?;
        }
        Ok(path)
    }

    /// Textual form accepted by [`DirectedGraph::parse_path`].
    pub fn path_name(&self, path: &Path) -> String {
        if path.is_vertex() {
            self.vertex_name(path.src).to_string()
        } else {
            path.edges
                .iter()
                .map(|e| self.edges[e.0].name.as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.0 < self.vertices.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(format!("#{}", v.0)))
        }
    }

    /// All elements of the free semigroupoid of length at most `max_len`:
    /// vertices first (declaration order), then paths by length and then
    /// lexicographically by edge index.
    pub fn enumerate_semigroupoid(&self, max_len: usize) -> Vec<Path> {
        let mut out: Vec<Path> = self.vertex_ids().map(Path::vertex).collect();
        let mut frontier: Vec<Path> = self.edge_ids().map(|e| self.edge_path(e)).collect();
        let mut len = 1;
        while len <= max_len && !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                for e in self.edge_ids() {
                    if self.edge(e).src == p.rng {
                        let mut q = p.clone();
                        q.edges.push(e);
                        q.rng = self.edge(e).rng;
                        next.push(q);
                    }
                }
            }
            out.append(&mut frontier);
            frontier = next;
            len += 1;
        }
        out
    }

    /// Loops `w` with `s(w) = r(w) = v`, `1 <= |w| <= max_len`.
    pub fn loops_at(&self, v: VertexId, max_len: usize) -> Result<Vec<Path>, GraphError> {
        self.paths_from_to(v, v, max_len)
    }

    /// Finite paths `w = v1 w v2` with `1 <= |w| <= max_len`.
    pub fn paths_from_to(&self, v1: VertexId, v2: VertexId, max_len: usize) -> Result<Vec<Path>, GraphError> {
        self.check_vertex(v1)?;
        self.check_vertex(v2)?;
        Ok(self
            .enumerate_semigroupoid(max_len)
            .into_iter()
            .filter(|p| !p.is_vertex() && p.src == v1 && p.rng == v2)
            .collect())
    }

    /// Disjoint union; vertex and edge names of `other` must not clash.
    pub fn disjoint_union(&self, other: &DirectedGraph) -> Result<DirectedGraph, GraphError> {
        let mut doc = self.to_document();
        let odoc = other.to_document();
        doc.vertices.extend(odoc.vertices);
        doc.edges.extend(odoc.edges);
        Self::from_document(doc)
    }
}

/// An element of the free semigroupoid: a vertex or an admissible edge word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    src: VertexId,
    rng: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn vertex(v: VertexId) -> Self {
        Self {
            src: v,
            rng: v,
            edges: Vec::new(),
        }
    }

    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> VertexId {
        self.src
    }

    pub fn range(&self) -> VertexId {
        self.rng
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Loop in the sense `w = v w v` with `|w| >= 1`.
    pub fn is_loop(&self) -> bool {
        !self.is_vertex() && self.src == self.rng
    }

    /// `p·q`, defined iff `r(p) = s(q)`; vertices act as identities.
    pub fn concat(&self, other: &Path) -> Result<Path, GraphError> {
        if self.rng != other.src {
            return Err(GraphError::Inadmissible {
                left: self.rng,
                right: other.src,
            });
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Path {
            src: self.src,
            rng: other.rng,
            edges,
        })
    }

    /// Returns `h` with `self = prefix·h`, if any.
    pub fn strip_prefix(&self, prefix: &Path) -> Option<Path> {
        if prefix.src != self.src || !self.edges.starts_with(&prefix.edges) {
            return None;
        }
        let rest = self.edges[prefix.edges.len()..].to_vec();
        Some(Path {
            src: prefix.rng,
            rng: self.rng,
            edges: rest,
        })
    }

    /// Visited vertex set and traversed edge set, without multiplicity.
    pub fn diagram(&self, graph: &DirectedGraph) -> Diagram {
        let mut vertices = BTreeSet::from([self.src]);
        let mut edges = BTreeSet::new();
        for &e in &self.edges {
            edges.insert(e);
            vertices.insert(graph.edge(e).rng);
        }
        Diagram { vertices, edges }
    }

    /// The display helper needs the graph for names.
    pub fn display<'a>(&'a self, graph: &'a DirectedGraph) -> PathDisplay<'a> {
        PathDisplay { path: self, graph }
    }

    fn order_key(&self) -> (usize, &[EdgeId], VertexId) {
        (self.edges.len(), &self.edges, self.src)
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    graph: &'a DirectedGraph,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.graph.path_name(self.path))
    }
}

/// The subgraph traced by a path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagram {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

pub fn diagram_distinct(graph: &DirectedGraph, w1: &Path, w2: &Path) -> bool {
    w1.diagram(graph) != w2.diagram(graph)
}

/// Every pair drawn from `xs × ys` is diagram-distinct.
pub fn sets_diagram_distinct<'a, I, J>(graph: &DirectedGraph, xs: I, ys: J) -> bool
where
    I: IntoIterator<Item = &'a Path>,
    J: IntoIterator<Item = &'a Path> + Clone,
{
    xs.into_iter()
        .all(|x| ys.clone().into_iter().all(|y| diagram_distinct(graph, x, y)))
}

/// Small named graphs used throughout tests and examples.
pub mod fixtures {
    use super::DirectedGraph;

    /// One vertex `v` with one loop `l`.
    pub fn g1() -> DirectedGraph {
        DirectedGraph::from_parts(&["v"], &[("l", "v", "v")]).unwrap()
    }

    /// `v1 --e--> v2`.
    pub fn g2() -> DirectedGraph {
        DirectedGraph::from_parts(&["v1", "v2"], &[("e", "v1", "v2")]).unwrap()
    }

    /// One vertex `v` with loops `l1`, `l2`.
    pub fn two_loops() -> DirectedGraph {
        DirectedGraph::from_parts(&["v"], &[("l1", "v", "v"), ("l2", "v", "v")]).unwrap()
    }

    /// Vertex `u` with loops `l1`, `l2` and an edge `f: u -> w`.
    pub fn two_loops_plus_edge() -> DirectedGraph {
        DirectedGraph::from_parts(
            &["u", "w"],
            &[("l1", "u", "u"), ("l2", "u", "u"), ("f", "u", "w")],
        )
        .unwrap()
    }

    /// Disjoint union of a renamed copy of [`g1`] and [`g2`].
    pub fn g1_plus_g2() -> DirectedGraph {
        DirectedGraph::from_parts(
            &["v", "v1", "v2"],
            &[("l", "v", "v"), ("e", "v1", "v2")],
        )
        .unwrap()
    }
}
