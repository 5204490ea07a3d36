//! Seeded generators for graphs, elements and diagonal coefficients.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{DiagonalElement, FourierExpr};
use crate::graph::DirectedGraph;
use crate::scalar::Scalar;
use crate::word::Letter;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A graph on `vertices` vertices `x0, x1, ...` with `edges` edges
/// `f0, f1, ...` whose endpoints are uniform (loops and parallel edges allowed).
pub fn graph(rng: &mut TestRng, vertices: usize, edges: usize) -> DirectedGraph {
    let vs: Vec<String> = (0..vertices).map(|i| format!("x{i}")).collect();
    let es: Vec<(String, String, String)> = (0..edges)
        .map(|i| {
            let s = rng.gen_range(0..vertices);
            let r = rng.gen_range(0..vertices);
            (format!("f{i}"), vs[s].clone(), vs[r].clone())
        })
        .collect();
    DirectedGraph::new(vs.clone(), es).expect("generated graph is well formed")
}

/// Nonzero integer in `-3..=3`.
fn coefficient(rng: &mut TestRng) -> Scalar {
    let k = rng.gen_range(1..=3);
    Scalar::int(if rng.gen_bool(0.5) { k } else { -k })
}

/// Up to `max_terms` letters over paths of length `≤ max_len`, with small
/// nonzero integer coefficients.
pub fn element(graph: &DirectedGraph, rng: &mut TestRng, max_terms: usize, max_len: usize) -> FourierExpr {
    let paths = graph.enumerate_semigroupoid(max_len);
    let count = rng.gen_range(1..=max_terms);
    FourierExpr::from_terms((0..count).map(|_| {
        let p = paths.choose(rng).expect("graphs have vertices").clone();
        let star = !p.is_vertex() && rng.gen_bool(0.5);
        (Letter::new(p, star), coefficient(rng))
    }))
}

/// Random combination of vertex projections; some coefficients may be zero.
pub fn diagonal(graph: &DirectedGraph, rng: &mut TestRng) -> DiagonalElement {
    DiagonalElement::from_pairs(
        graph
            .vertex_ids()
            .map(|v| (v, Scalar::int(rng.gen_range(-2..=3))))
            .collect::<Vec<_>>(),
    )
}

/// A random nonempty subset of the vertices, in random order.
pub fn vertex_subset(graph: &DirectedGraph, rng: &mut TestRng) -> Vec<crate::graph::VertexId> {
    let mut vs: Vec<_> = graph.vertex_ids().collect();
    vs.shuffle(rng);
    let k = rng.gen_range(1..=vs.len());
    vs.truncate(k);
    vs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let g1 = graph(&mut rng(7), 4, 6);
        let g2 = graph(&mut rng(7), 4, 6);
        assert_eq!(g1.to_document(), g2.to_document());
        assert_eq!((g1.vertex_count(), g1.edge_count()), (4, 6));
        let a = element(&g1, &mut rng(3), 5, 2);
        assert_eq!(a, element(&g1, &mut rng(3), 5, 2));
        assert!(!a.is_zero() && a.len() <= 5);
        assert!(a.terms().all(|(l, _)| l.path().len() <= 2));
    }
}
