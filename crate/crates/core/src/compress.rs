//! Diagonal, off-diagonal and projection compressions, and sufficient
//! conditions for freeness over the diagonal subalgebra.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cumulant::{CumulantEngine, CumulantError, DiagonalSamples, MomentArgs};
use crate::expr::{DiagonalElement, FourierExpr};
use crate::graph::{diagram_distinct, DirectedGraph, GraphError, Path, VertexId};
use crate::word::Model;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompressError {
    #[error("off-diagonal compression needs two distinct vertices; use the diagonal compression instead")]
    SameVertex,
    #[error("vertex set is empty")]
    EmptyVertexSet,
    #[error("vertex `{0}` listed twice")]
    DuplicateVertex(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A nonempty ordered set of distinct vertices `{v_1, ..., v_N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    vertices: Vec<VertexId>,
}

impl VertexSet {
    pub fn new(graph: &DirectedGraph, vertices: Vec<VertexId>) -> Result<Self, CompressError> {
        if vertices.is_empty() {
            return Err(CompressError::EmptyVertexSet);
        }
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            if v.0 >= graph.vertex_count() {
                return Err(GraphError::UnknownVertex(format!("#{}", v.0)).into());
            }
            if !seen.insert(v) {
                return Err(CompressError::DuplicateVertex(graph.vertex_name(v).to_string()));
            }
        }
        Ok(Self { vertices })
    }

    pub fn from_names(graph: &DirectedGraph, names: &[&str]) -> Result<Self, CompressError> {
        let ids = names
            .iter()
            .map(|n| graph.vertex(n))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(graph, ids)
    }

    pub fn all(graph: &DirectedGraph) -> Self {
        Self {
            vertices: graph.vertex_ids().collect(),
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// `P = L_{v_1} + ... + L_{v_N}`.
    pub fn projection(&self) -> DiagonalElement {
        DiagonalElement::from_pairs(self.vertices.iter().map(|&v| (v, crate::scalar::Scalar::int(1))))
    }

    pub fn display<'a>(&'a self, graph: &'a DirectedGraph) -> impl fmt::Display + 'a {
        struct D<'a>(&'a VertexSet, &'a DirectedGraph);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let names: Vec<&str> = self.0.vertices.iter().map(|&v| self.1.vertex_name(v)).collect();
                write!(f, "{{{}}}", names.join(", "))
            }
        }
        D(self, graph)
    }
}

/// `P_V(a) = Σ_j L_{v_j} a L_{v_j}`: vertex terms in `V` and loops based in `V`.
pub fn diagonal_compress(a: &FourierExpr, vs: &VertexSet) -> FourierExpr {
    a.filter(|l| {
        let p = l.path();
        (p.is_vertex() || p.is_loop()) && vs.contains(p.source())
    })
}

/// `L_{v1} a L_{v2}`: creation terms `w = v1 w v2` and annihilation terms
/// `w' = v2 w' v1`.
pub fn off_diagonal_compress(a: &FourierExpr, v1: VertexId, v2: VertexId) -> Result<FourierExpr, CompressError> {
    if v1 == v2 {
        return Err(CompressError::SameVertex);
    }
    Ok(a.filter(|l| l.left_vertex() == v1 && l.right_vertex() == v2))
}

/// `PaP` with its split into `P_V(a)` and `P_V^c(a) = Σ_{i≠j} L_{v_i} a L_{v_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionCompression {
    pub full: FourierExpr,
    pub diag: FourierExpr,
    pub offdiag: FourierExpr,
}

pub fn projection_compress(a: &FourierExpr, vs: &VertexSet) -> ProjectionCompression {
    let diag = diagonal_compress(a, vs);
    let mut offdiag = FourierExpr::zero();
    for &vi in vs.vertices() {
        for &vj in vs.vertices() {
            if vi != vj {
                offdiag = offdiag.add(&off_diagonal_compress(a, vi, vj).expect("distinct vertices"));
            }
        }
    }
    ProjectionCompression {
        full: diag.add(&offdiag),
        diag,
        offdiag,
    }
}

/// `P a P` computed as a product; agrees with the term filter.
pub fn projection_compress_by_product(a: &FourierExpr, vs: &VertexSet, model: Model) -> Option<FourierExpr> {
    let p = vs.projection().to_expr();
    crate::expr::multiply(&p, a, model).times_expr(&p, model).as_fourier()
}

/// Every `E` and `k_n` (`n ≤ n_max`, every sample tuple) of the off-diagonal
/// compression vanishes.
pub fn check_offdiag_vanishing(
    graph: &DirectedGraph,
    a: &FourierExpr,
    v1: VertexId,
    v2: VertexId,
    n_max: usize,
    samples: &DiagonalSamples,
    model: Model,
) -> Result<bool, CumulantError> {
    let x = match off_diagonal_compress(a, v1, v2) {
        Ok(x) => x,
        Err(_) => return Ok(false),
    };
    let eng = CumulantEngine::new(graph, model);
    for n in 1..=n_max {
        for s in 0..samples.tuples().len() {
            let args = samples.args(s, &x, n);
            if !eng.moment(&args).is_zero() || !eng.cumulant(&args)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// What [`freeness_sufficient`] is asked about.
#[derive(Debug, Clone)]
pub enum FreenessQuery<'a> {
    /// `a` and `b` themselves.
    Elements { a: &'a FourierExpr, b: &'a FourierExpr },
    /// `P_V(a)` and `P_V(b)`.
    DiagonalCompressions {
        a: &'a FourierExpr,
        b: &'a FourierExpr,
        vs: &'a VertexSet,
    },
    /// `P_{V1}(a)` and `P_{V2}(a)`.
    DiagonalCompressionsOfOne {
        a: &'a FourierExpr,
        v1: &'a VertexSet,
        v2: &'a VertexSet,
    },
    /// `PaP` and `PbP`.
    ProjectionCompressions {
        a: &'a FourierExpr,
        b: &'a FourierExpr,
        vs: &'a VertexSet,
    },
    /// `PaP` and `QaQ`.
    ProjectionCompressionsOfOne {
        a: &'a FourierExpr,
        v1: &'a VertexSet,
        v2: &'a VertexSet,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FreenessVerdict {
    Free { reason: String },
    Unknown { reason: String },
}

impl FreenessVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, FreenessVerdict::Free { .. })
    }

    pub fn reason(&self) -> &str {
        match self {
            FreenessVerdict::Free { reason } | FreenessVerdict::Unknown { reason } => reason,
        }
    }
}

impl fmt::Display for FreenessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreenessVerdict::Free { reason } => write!(f, "free ({reason})"),
            FreenessVerdict::Unknown { reason } => write!(f, "unknown ({reason})"),
        }
    }
}

fn first_diagram_clash(graph: &DirectedGraph, xs: &BTreeSet<Path>, ys: &BTreeSet<Path>) -> Option<(Path, Path)> {
    xs.iter()
        .flat_map(|x| ys.iter().map(move |y| (x, y)))
        .find(|(x, y)| !diagram_distinct(graph, x, y))
        .map(|(x, y)| (x.clone(), y.clone()))
}

fn vertices_in(a: &FourierExpr, vs: &VertexSet) -> BTreeSet<VertexId> {
    a.support().vertices.into_iter().filter(|v| vs.contains(*v)).collect()
}

fn loops_in(a: &FourierExpr, vs: &VertexSet) -> BTreeSet<Path> {
    vs.vertices().iter().flat_map(|&v| a.support().loops_at(v)).collect()
}

/// Checks the vertex and loop emptiness conditions shared by the compressed
/// variants; `None` when they hold.
fn compressed_conditions(
    graph: &DirectedGraph,
    a: &FourierExpr,
    va: &VertexSet,
    b: &FourierExpr,
    vb: &VertexSet,
) -> Option<String> {
    let shared: Vec<&str> = vertices_in(a, va)
        .intersection(&vertices_in(b, vb))
        .map(|&v| graph.vertex_name(v))
        .collect();
    if !shared.is_empty() {
        return Some(format!("shared vertex terms {}", shared.join(", ")));
    }
    let shared: Vec<String> = loops_in(a, va)
        .intersection(&loops_in(b, vb))
        .map(|p| graph.path_name(p))
        .collect();
    if !shared.is_empty() {
        return Some(format!("shared loops {}", shared.join(", ")));
    }
    None
}

/// Sound but incomplete: `Free` only when one of the known sufficient
/// support conditions holds.
pub fn freeness_sufficient(graph: &DirectedGraph, query: FreenessQuery<'_>) -> FreenessVerdict {
    let unknown = |reason: String| FreenessVerdict::Unknown { reason };
    match query {
        FreenessQuery::Elements { a, b } => {
            match first_diagram_clash(graph, &a.support().finite_paths(), &b.support().finite_paths()) {
                None => FreenessVerdict::Free {
                    reason: "finite-path supports are pairwise diagram-distinct".into(),
                },
                Some((x, y)) => unknown(format!(
                    "{} and {} have the same diagram",
                    graph.path_name(&x),
                    graph.path_name(&y)
                )),
            }
        }
        FreenessQuery::DiagonalCompressions { a, b, vs } => {
            if compressed_conditions(graph, a, vs, b, vs).is_none() {
                return FreenessVerdict::Free {
                    reason: "no shared vertex terms or loops inside V".into(),
                };
            }
            let (ca, cb) = (diagonal_compress(a, vs), diagonal_compress(b, vs));
            match freeness_sufficient(graph, FreenessQuery::Elements { a: &ca, b: &cb }) {
                FreenessVerdict::Free { .. } => FreenessVerdict::Free {
                    reason: "compressions have diagram-distinct supports".into(),
                },
                FreenessVerdict::Unknown { .. } => {
                    unknown(compressed_conditions(graph, a, vs, b, vs).unwrap_or_default())
                }
            }
        }
        FreenessQuery::DiagonalCompressionsOfOne { a, v1, v2 } => {
            let shared: Vec<String> = loops_in(a, v1)
                .intersection(&loops_in(a, v2))
                .map(|p| graph.path_name(p))
                .collect();
            if shared.is_empty() {
                FreenessVerdict::Free {
                    reason: "no loop of a is based in both vertex sets".into(),
                }
            } else {
                unknown(format!("shared loops {}", shared.join(", ")))
            }
        }
        FreenessQuery::ProjectionCompressions { a, b, vs } => {
            if let Some(r) = compressed_conditions(graph, a, vs, b, vs) {
                return unknown(r);
            }
            let na = a.support().non_loops();
            let nb = b.support().non_loops();
            let shared: Vec<String> = na.intersection(&nb).map(|p| graph.path_name(p)).collect();
            if shared.is_empty() {
                FreenessVerdict::Free {
                    reason: "no shared vertex terms or loops inside V, no shared non-loop paths".into(),
                }
            } else {
                unknown(format!("shared non-loop paths {}", shared.join(", ")))
            }
        }
        FreenessQuery::ProjectionCompressionsOfOne { a, v1, v2 } => match compressed_conditions(graph, a, v1, a, v2) {
            None => FreenessVerdict::Free {
                reason: "vertex sets share no vertex term or loop of a".into(),
            },
            Some(r) => unknown(r),
        },
    }
}

/// `k_1(d PaP) = Σ_{v ∈ V ∩ V(G:d) ∩ V(G:a)} q_v p_v L_v`.
pub fn first_cumulant_closed_form(a: &FourierExpr, d: &DiagonalElement, vs: &VertexSet) -> DiagonalElement {
    let p = a.expectation();
    DiagonalElement::from_pairs(
        vs.vertices()
            .iter()
            .map(|&v| (v, &d.coeff(v) * &p.coeff(v))),
    )
}

/// A pair of unequal cumulants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityWitness {
    pub n: usize,
    pub sample: usize,
    /// `k_n(d·PaP, ...)`.
    pub compressed: DiagonalElement,
    /// `k_n(d·P_V(a), ...)`, or the closed form when `n = 1`.
    pub expected: DiagonalElement,
}

/// Compares `k_n(d·PaP, ...)` with `k_n(d·P_V(a), ...)` for `n ≤ n_max`,
/// and `k_1(d·PaP)` with its closed form.
pub fn cumulant_equality_check(
    graph: &DirectedGraph,
    a: &FourierExpr,
    vs: &VertexSet,
    n_max: usize,
    samples: &DiagonalSamples,
    model: Model,
) -> Result<Option<EqualityWitness>, CumulantError> {
    let pc = projection_compress(a, vs);
    let eng = CumulantEngine::new(graph, model);
    for (s, tuple) in samples.tuples().iter().enumerate() {
        let full: MomentArgs = vec![(tuple[0].clone(), pc.full.clone())];
        let k1 = eng.cumulant(&full)?;
        let closed = first_cumulant_closed_form(a, &tuple[0], vs);
        if k1 != closed {
            return Ok(Some(EqualityWitness {
                n: 1,
                sample: s,
                compressed: k1,
                expected: closed,
            }));
        }
    }
    for n in 1..=n_max {
        for s in 0..samples.tuples().len() {
            let lhs = eng.cumulant(&samples.args(s, &pc.full, n))?;
            let rhs = eng.cumulant(&samples.args(s, &pc.diag, n))?;
            if lhs != rhs {
                return Ok(Some(EqualityWitness {
                    n,
                    sample: s,
                    compressed: lhs,
                    expected: rhs,
                }));
            }
        }
    }
    Ok(None)
}
