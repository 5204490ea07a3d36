//! Fourier expansions, diagonal elements, the conditional expectation and
//! exact products.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError, Path, VertexId};
use crate::scalar::{format_rational, Scalar, ScalarParseError};
use crate::word::{Letter, Model, NormalForm, Word};

fn add_into<K: Ord>(map: &mut BTreeMap<K, Scalar>, key: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Element of the diagonal subalgebra: `Σ_v q_v L_v`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct DiagonalElement {
    coeffs: BTreeMap<VertexId, Scalar>,
}

impl DiagonalElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `1 = Σ_v L_v`.
    pub fn identity(graph: &DirectedGraph) -> Self {
        Self::from_pairs(graph.vertex_ids().map(|v| (v, Scalar::int(1))))
    }

    pub fn projection(v: VertexId) -> Self {
        Self::from_pairs([(v, Scalar::int(1))])
    }

    pub fn from_pairs<I: IntoIterator<Item = (VertexId, Scalar)>>(pairs: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (v, c) in pairs {
            add_into(&mut coeffs, v, c);
        }
        Self { coeffs }
    }

    pub fn coeff(&self, v: VertexId) -> Scalar {
        self.coeffs.get(&v).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> BTreeSet<VertexId> {
        self.coeffs.keys().copied().collect()
    }

    pub fn add(&self, other: &DiagonalElement) -> DiagonalElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &DiagonalElement) {
        for (v, c) in &other.coeffs {
            add_into(&mut self.coeffs, *v, c.clone());
        }
    }

    pub fn scale(&self, s: &Scalar) -> DiagonalElement {
        Self::from_pairs(self.coeffs.iter().map(|(v, c)| (*v, c * s)))
    }

    /// Pointwise product (the diagonal algebra is commutative).
    pub fn mul(&self, other: &DiagonalElement) -> DiagonalElement {
        Self::from_pairs(
            self.coeffs
                .iter()
                .filter_map(|(v, c)| other.coeffs.get(v).map(|d| (*v, c * d))),
        )
    }

    pub fn to_expr(&self) -> FourierExpr {
        FourierExpr::from_terms(
            self.coeffs
                .iter()
                .map(|(v, c)| (Letter::creation(Path::vertex(*v)), c.clone())),
        )
    }

    pub fn display<'a>(&'a self, graph: &'a DirectedGraph) -> impl fmt::Display + 'a {
        DiagonalDisplay { d: self, graph }
    }
}

struct DiagonalDisplay<'a> {
    d: &'a DiagonalElement,
    graph: &'a DirectedGraph,
}

impl fmt::Display for DiagonalDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(
            f,
            self.d
                .coeffs
                .iter()
                .map(|(v, c)| (c, format!("L[{}]", self.graph.vertex_name(*v)))),
        )
    }
}

fn write_sum<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (&'a Scalar, String)>,
{
    let mut any = false;
    for (c, name) in terms {
        let negative = c.im.is_zero() && c.re.is_negative();
        let c = if negative { -c.clone() } else { c.clone() };
        match (any, negative) {
            (false, false) => {}
            (false, true) => f.write_str("-")?,
            (true, false) => f.write_str(" + ")?,
            (true, true) => f.write_str(" - ")?,
        }
        any = true;
        if c == Scalar::int(1) {
            f.write_str(&name)?;
        } else {
            write!(f, "{c}{name}")?;
        }
    }
    if !any {
        f.write_str("0")?;
    }
    Ok(())
}

/// The three-way split of a support into vertices, paths appearing with both
/// `L_w` and `L_w*`, and paths appearing with only one of them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Support {
    pub vertices: BTreeSet<VertexId>,
    pub star_paths: BTreeSet<Path>,
    pub non_star_paths: BTreeSet<Path>,
}

impl Support {
    /// All finite paths of the support.
    pub fn finite_paths(&self) -> BTreeSet<Path> {
        self.star_paths.union(&self.non_star_paths).cloned().collect()
    }

    /// Loops `l = v l v` in the support.
    pub fn loops_at(&self, v: VertexId) -> BTreeSet<Path> {
        self.finite_paths()
            .into_iter()
            .filter(|p| p.is_loop() && p.source() == v)
            .collect()
    }

    /// Non-loop finite paths in the support.
    pub fn non_loops(&self) -> BTreeSet<Path> {
        self.finite_paths().into_iter().filter(|p| !p.is_loop()).collect()
    }
}

/// Finite linear combination `Σ p_w L_w^{u_w}` with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct FourierExpr {
    terms: BTreeMap<Letter, Scalar>,
}

impl FourierExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Letter, Scalar)>>(terms: I) -> Self {
        let mut out = BTreeMap::new();
        for (l, c) in terms {
            add_into(&mut out, l, c);
        }
        Self { terms: out }
    }

    pub fn letter(letter: Letter) -> Self {
        Self::from_terms([(letter, Scalar::int(1))])
    }

    /// `L_w + L_w*`.
    pub fn symmetric(path: &Path) -> Self {
        Self::from_terms([
            (Letter::creation(path.clone()), Scalar::int(1)),
            (Letter::annihilation(path.clone()), Scalar::int(1)),
        ])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Letter, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, letter: &Letter) -> Scalar {
        self.terms.get(letter).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &FourierExpr) -> FourierExpr {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(l, c)| (l.clone(), c.clone())),
        )
    }

    pub fn scale(&self, s: &Scalar) -> FourierExpr {
        Self::from_terms(self.terms.iter().map(|(l, c)| (l.clone(), c * s)))
    }

    /// `a*`: conjugate coefficients, swap `L_w` and `L_w*`.
    pub fn adjoint(&self) -> FourierExpr {
        Self::from_terms(self.terms.iter().map(|(l, c)| (l.adjoint(), c.conj())))
    }

    /// Keeps the terms whose letter satisfies `keep`.
    pub fn filter<F: Fn(&Letter) -> bool>(&self, keep: F) -> FourierExpr {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(l, _)| keep(l))
                .map(|(l, c)| (l.clone(), c.clone())),
        )
    }

    /// `d · a`.
    pub fn left_mul_diag(&self, d: &DiagonalElement) -> FourierExpr {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(l, c)| (l.clone(), &d.coeff(l.left_vertex()) * c)),
        )
    }

    /// `a · d`.
    pub fn right_mul_diag(&self, d: &DiagonalElement) -> FourierExpr {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(l, c)| (l.clone(), c * &d.coeff(l.right_vertex()))),
        )
    }

    pub fn support(&self) -> Support {
        let mut s = Support::default();
        for l in self.terms.keys() {
            let p = l.path();
            if p.is_vertex() {
                s.vertices.insert(p.source());
                continue;
            }
            let both = self.terms.contains_key(&l.adjoint());
            if both {
                s.star_paths.insert(p.clone());
            } else {
                s.non_star_paths.insert(p.clone());
            }
        }
        s
    }

    /// `E(a) = Σ_{v ∈ V(G:a)} p_v L_v`.
    pub fn expectation(&self) -> DiagonalElement {
        DiagonalElement::from_pairs(
            self.terms
                .iter()
                .filter(|(l, _)| l.is_vertex())
                .map(|(l, c)| (l.path().source(), c.clone())),
        )
    }

    /// Diagonal part `a_d`.
    pub fn diagonal_part(&self) -> FourierExpr {
        self.filter(Letter::is_vertex)
    }

    pub fn display<'a>(&'a self, graph: &'a DirectedGraph) -> impl fmt::Display + 'a {
        ExprDisplay { a: self, graph }
    }

    pub fn to_document(&self, graph: &DirectedGraph) -> ElementDocument {
        ElementDocument {
            terms: self
                .terms
                .iter()
                .map(|(l, c)| TermDocument {
                    path: graph.path_name(l.path()),
                    star: l.is_star(),
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                })
                .collect(),
        }
    }

    pub fn from_document(graph: &DirectedGraph, doc: &ElementDocument) -> Result<Self, ElementError> {
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in &doc.terms {
            let path = graph.parse_path(&t.path)?;
            let c = Scalar::parse_parts(&t.re, &t.im)?;
            terms.push((Letter::new(path, t.star), c));
        }
        Ok(Self::from_terms(terms))
    }

    pub fn to_json(&self, graph: &DirectedGraph) -> String {
        serde_json::to_string_pretty(&self.to_document(graph)).expect("serializable")
    }

    pub fn from_json(graph: &DirectedGraph, text: &str) -> Result<Self, ElementError> {
        let doc: ElementDocument =
            serde_json::from_str(text).map_err(|e| ElementError::Malformed(e.to_string()))?;
        Self::from_document(graph, &doc)
    }
}

struct ExprDisplay<'a> {
    a: &'a FourierExpr,
    graph: &'a DirectedGraph,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(
            f,
            self.a
                .terms
                .iter()
                .map(|(l, c)| (c, l.display(self.graph).to_string())),
        )
    }
}

/// Element file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDocument {
    pub terms: Vec<TermDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDocument {
    pub path: String,
    #[serde(default)]
    pub star: bool,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".to_string()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ElementError {
    #[error("malformed element document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Scalar(#[from] ScalarParseError),
}

/// A general product: linear combination of normal forms `L_α L_β*`.
///
/// Products of Fourier expansions leave this type (e.g. `L_w L_w*` in the
/// Toeplitz model); the conditional expectation sends every non-vertex
/// normal form to zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Evaluated {
    terms: BTreeMap<NormalForm, Scalar>,
}

impl Evaluated {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(graph: &DirectedGraph) -> Self {
        Self::from_diag(&DiagonalElement::identity(graph))
    }

    pub fn from_expr(a: &FourierExpr) -> Self {
        let mut terms = BTreeMap::new();
        for (l, c) in a.terms() {
            add_into(&mut terms, NormalForm::of_letter(l), c.clone());
        }
        Self { terms }
    }

    pub fn from_diag(d: &DiagonalElement) -> Self {
        let mut terms = BTreeMap::new();
        for (v, c) in d.iter() {
            add_into(&mut terms, NormalForm::projection(*v), c.clone());
        }
        Self { terms }
    }

    pub fn from_word(word: &Word, model: Model) -> Self {
        let mut terms = BTreeMap::new();
        add_into(&mut terms, crate::word::reduce(word, model), Scalar::int(1));
        terms.remove(&NormalForm::Zero);
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NormalForm, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, nf: &NormalForm) -> Scalar {
        self.terms.get(nf).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Evaluated) -> Evaluated {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            add_into(&mut terms, k.clone(), c.clone());
        }
        Self { terms }
    }

    /// Right-multiplies by a linear combination of letters.
    pub fn times_expr(&self, a: &FourierExpr, model: Model) -> Evaluated {
        let mut terms = BTreeMap::new();
        for (nf, c) in &self.terms {
            for (l, p) in a.terms() {
                let next = nf.append(l, model);
                if !next.is_zero() {
                    add_into(&mut terms, next, c * p);
                }
            }
        }
        Self { terms }
    }

    pub fn times_diag(&self, d: &DiagonalElement, model: Model) -> Evaluated {
        self.times_expr(&d.to_expr(), model)
    }

    /// Right-multiplies by another product, letter by letter.
    pub fn times(&self, other: &Evaluated, model: Model) -> Evaluated {
        let mut out = Evaluated::zero();
        for (nf, c) in &other.terms {
            let word = nf.to_word().expect("zero terms are never stored");
            let mut acc = self.clone();
            for l in word.letters() {
                acc = acc.times_expr(&FourierExpr::letter(l.clone()), model);
            }
            out = out.add(&acc.scaled(c));
        }
        out
    }

    pub fn scaled(&self, s: &Scalar) -> Evaluated {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            add_into(&mut terms, k.clone(), c * s);
        }
        Self { terms }
    }

    pub fn expectation(&self) -> DiagonalElement {
        DiagonalElement::from_pairs(
            self.terms
                .iter()
                .filter_map(|(nf, c)| nf.as_vertex().map(|v| (v, c.clone()))),
        )
    }

    /// The product as a Fourier expansion, if every term is a single letter.
    pub fn as_fourier(&self) -> Option<FourierExpr> {
        let mut out = Vec::new();
        for (nf, c) in &self.terms {
            let w = nf.to_word()?;
            match w.letters() {
                [l] => out.push((l.clone(), c.clone())),
                _ => return None,
            }
        }
        Some(FourierExpr::from_terms(out))
    }

    pub fn display<'a>(&'a self, graph: &'a DirectedGraph) -> impl fmt::Display + 'a {
        EvaluatedDisplay { e: self, graph }
    }
}

struct EvaluatedDisplay<'a> {
    e: &'a Evaluated,
    graph: &'a DirectedGraph,
}

impl fmt::Display for EvaluatedDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(
            f,
            self.e
                .terms
                .iter()
                .map(|(nf, c)| (c, nf.display(self.graph).to_string())),
        )
    }
}

/// `x · y`, bilinear in both factors.
pub fn multiply(x: &FourierExpr, y: &FourierExpr, model: Model) -> Evaluated {
    Evaluated::from_expr(x).times_expr(y, model)
}

/// `E(d_1 a_1 d_2 a_2 ... d_n a_n)`.
///
/// Evaluated left to right over a map of reduced states, which sums the
/// reductions of all expanded words without enumerating them.
pub fn expectation_of_product(factors: &[(DiagonalElement, FourierExpr)], model: Model) -> DiagonalElement {
    let Some(((d0, a0), rest)) = factors.split_first() else {
        return DiagonalElement::zero();
    };
    let mut state = Evaluated::from_diag(d0).times_expr(a0, model);
    for (d, a) in rest {
        if state.is_zero() {
            break;
        }
        state = state.times_diag(d, model).times_expr(a, model);
    }
    state.expectation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{g1, g2};
    use crate::word::parse_word;

    fn letter(g: &DirectedGraph, s: &str) -> Letter {
        parse_word(g, s).unwrap().0.remove(0)
    }

    fn expr(g: &DirectedGraph, terms: &[(&str, i64)]) -> FourierExpr {
        FourierExpr::from_terms(terms.iter().map(|(s, c)| (letter(g, s), Scalar::int(*c))))
    }

    #[test]
    fn support_examples() {
        let g = g1();
        let v = g.vertex("v").unwrap();
        let l = g.parse_path("l").unwrap();
        let s = expr(&g, &[("L[v]", 3), ("L[l]", 2)]).support();
        assert_eq!(s.vertices, BTreeSet::from([v]));
        assert!(s.star_paths.is_empty());
        assert_eq!(s.non_star_paths, BTreeSet::from([l.clone()]));
        let s = expr(&g, &[("L[l]", 1), ("L*[l]", 1)]).support();
        assert!(s.vertices.is_empty() && s.non_star_paths.is_empty());
        assert_eq!(s.star_paths, BTreeSet::from([l]));
        assert_eq!(FourierExpr::zero().support(), Support::default());
    }

    #[test]
    fn expectation_examples() {
        let g = g1();
        let v = g.vertex("v").unwrap();
        let a = expr(&g, &[("L[v]", 3), ("L[l]", 2)]);
        assert_eq!(a.expectation(), DiagonalElement::from_pairs([(v, Scalar::int(3))]));
        let g = g2();
        assert!(expr(&g, &[("L[e]", 1), ("L*[e]", 1)]).expectation().is_zero());
        let one = DiagonalElement::identity(&g);
        assert_eq!(one.to_expr().expectation(), one);
    }

    #[test]
    fn multiply_examples() {
        let g = g1();
        let a = expr(&g, &[("L[l]", 1), ("L*[l]", 1)]);
        let ck = multiply(&a, &a, Model::CK);
        assert_eq!(
            ck.as_fourier().unwrap(),
            expr(&g, &[("L[l.l]", 1), ("L[v]", 2), ("L*[l.l]", 1)])
        );
        let tp = multiply(&a, &a, Model::Toeplitz);
        assert!(tp.as_fourier().is_none());
        let ll = NormalForm::pair(g.parse_path("l").unwrap(), g.parse_path("l").unwrap());
        assert_eq!(tp.coeff(&ll), Scalar::int(1));
        assert_eq!(tp.expectation(), DiagonalElement::projection(g.vertex("v").unwrap()));
        assert_eq!(tp.display(&g).to_string(), "L[v] + L*[l.l] + L[l] L*[l] + L[l.l]");

        let one = Evaluated::identity(&g);
        assert_eq!(one.times_expr(&a, Model::CK), Evaluated::from_expr(&a));
    }

    #[test]
    fn moments_of_symmetric_loop() {
        let g = g1();
        let v = g.vertex("v").unwrap();
        let a = expr(&g, &[("L[l]", 1), ("L*[l]", 1)]);
        let one = DiagonalElement::identity(&g);
        let args = |n| vec![(one.clone(), a.clone()); n];
        let at = |k| DiagonalElement::from_pairs([(v, Scalar::int(k))]);
        assert_eq!(expectation_of_product(&args(2), Model::CK), at(2));
        assert_eq!(expectation_of_product(&args(4), Model::CK), at(6));
        assert_eq!(expectation_of_product(&args(4), Model::Toeplitz), at(2));
        assert_eq!(expectation_of_product(&args(1), Model::CK), a.expectation());
    }

    #[test]
    fn diagonal_multiplication() {
        let g = g2();
        let (v1, v2) = (g.vertex("v1").unwrap(), g.vertex("v2").unwrap());
        let a = expr(&g, &[("L[e]", 1), ("L*[e]", 5), ("L[v2]", 7)]);
        let p1 = DiagonalElement::projection(v1);
        let p2 = DiagonalElement::projection(v2);
        assert_eq!(a.left_mul_diag(&p1), expr(&g, &[("L[e]", 1)]));
        assert_eq!(a.right_mul_diag(&p1), expr(&g, &[("L*[e]", 5)]));
        assert_eq!(a.left_mul_diag(&p2), expr(&g, &[("L*[e]", 5), ("L[v2]", 7)]));
        // agrees with the product route
        for m in Model::ALL {
            let prod = Evaluated::from_expr(&a).times_diag(&p1, m).as_fourier().unwrap();
            assert_eq!(prod, a.right_mul_diag(&p1));
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let g = g2();
        let a = FourierExpr::from_terms([
            (letter(&g, "L[e]"), Scalar::ratio(3, 2)),
            (letter(&g, "L*[e]"), Scalar::parse_parts("0", "-1").unwrap()),
            (letter(&g, "L[v1]"), Scalar::int(2)),
        ]);
        let text = a.to_json(&g);
        assert_eq!(FourierExpr::from_json(&g, &text).unwrap(), a);
        let parsed = FourierExpr::from_json(&g, r#"{"terms":[{"path":"e","star":false,"re":"1","im":"0"}]}"#).unwrap();
        assert_eq!(parsed, expr(&g, &[("L[e]", 1)]));
        assert!(matches!(
            FourierExpr::from_json(&g, r#"{"terms":[{"path":"x","re":"1"}]}"#),
            Err(ElementError::Graph(_))
        ));
        assert!(matches!(
            FourierExpr::from_json(&g, r#"{"terms":[{"path":"e","re":"1/0"}]}"#),
            Err(ElementError::Scalar(_))
        ));
        assert!(matches!(FourierExpr::from_json(&g, "[]"), Err(ElementError::Malformed(_))));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let g = g1();
        let a = expr(&g, &[("L[l]", 1), ("L[l]", -1), ("L[v]", 0)]);
        assert!(a.is_zero());
        assert_eq!(a.display(&g).to_string(), "0");
    }
}
