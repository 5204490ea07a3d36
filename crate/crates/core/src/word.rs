//! Words in the creation and annihilation generators and their normal forms.
//!
//! Every nonzero product of generators reduces to `L_α L_β*` with
//! `r(α) = r(β)` (vertices included). [`NormalForm::append`] is the
//! left-to-right state machine; [`reduce`] folds it over a word.

use std::fmt;

use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError, Path, VertexId};

/// Which product rule is imposed on `L_w L_w*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    /// `L_w L_w* = L_{s(w)}` is imposed as an algebraic relation.
    CK,
    /// `L_w L_w*` stays a proper range projection, as on the Fock space.
    Toeplitz,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::CK, Model::Toeplitz];

    pub fn name(self) -> &'static str {
        match self {
            Model::CK => "ck",
            Model::Toeplitz => "toeplitz",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single generator `L_w` (`star = false`) or `L_w*` (`star = true`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    path: Path,
    star: bool,
}

impl Letter {
    /// Vertex letters are self-adjoint, so their star flag is dropped.
    pub fn new(path: Path, star: bool) -> Self {
        let star = star && !path.is_vertex();
        Self { path, star }
    }

    pub fn creation(path: Path) -> Self {
        Self::new(path, false)
    }

    pub fn annihilation(path: Path) -> Self {
        Self::new(path, true)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn is_star(&self) -> bool {
        self.star
    }

    pub fn is_vertex(&self) -> bool {
        self.path.is_vertex()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.path.clone(), !self.star)
    }

    /// `v` with `L_v · letter = letter`.
    pub fn left_vertex(&self) -> VertexId {
        if self.star {
            self.path.range()
        } else {
            self.path.source()
        }
    }

    /// `v` with `letter · L_v = letter`.
    pub fn right_vertex(&self) -> VertexId {
        if self.star {
            self.path.source()
        } else {
            self.path.range()
        }
    }

    /// Signed lattice step: `+|w|`, `-|w|`, or `0` for vertices.
    pub fn step(&self) -> i64 {
        let len = self.path.len() as i64;
        if self.star {
            -len
        } else {
            len
        }
    }

    pub fn display<'a>(&'a self, graph: &'a DirectedGraph) -> impl fmt::Display + 'a {
        LetterDisplay { letter: self, graph }
    }
}

struct LetterDisplay<'a> {
    letter: &'a Letter,
    graph: &'a DirectedGraph,
}

impl fmt::Display for LetterDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let star = if self.letter.star { "*" } else { "" };
        write!(f, "L{star}[{}]", self.graph.path_name(&self.letter.path))
    }
}

/// A finite product of letters; the empty word is the unit `Σ_v L_v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reverse the word and take the adjoint of every letter.
    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::adjoint).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn display<'a>(&'a self, graph: &'a DirectedGraph) -> impl fmt::Display + 'a {
        WordDisplay { word: self, graph }
    }
}

struct WordDisplay<'a> {
    word: &'a Word,
    graph: &'a DirectedGraph,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.word.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", l.display(self.graph))?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordParseError {
    #[error("malformed letter `{0}`; expected L[path] or L*[path]")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parses whitespace-separated letters `L[e1.e2]`, `L*[e1.e2]`, `L[v]`.
pub fn parse_word(graph: &DirectedGraph, text: &str) -> Result<Word, WordParseError> {
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        let (star, rest) = if let Some(r) = token.strip_prefix("L*[") {
            (true, r)
        } else if let Some(r) = token.strip_prefix("L[") {
            (false, r)
        } else {
            return Err(WordParseError::Malformed(token.to_string()));
        };
        let inner = rest
            .strip_suffix(']')
            .ok_or_else(|| WordParseError::Malformed(token.to_string()))?;
        letters.push(Letter::new(graph.parse_path(inner)?, star));
    }
    Ok(Word(letters))
}

/// Reduced value of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormalForm {
    Zero,
    /// The empty product `Σ_v L_v`.
    Unit,
    /// `L_left L_right*` with `r(left) = r(right)`. Two equal vertices encode
    /// the projection `L_v`.
    Pair { left: Path, right: Path },
}

impl NormalForm {
    pub fn pair(left: Path, right: Path) -> Self {
        debug_assert_eq!(left.range(), right.range());
        NormalForm::Pair { left, right }
    }

    pub fn projection(v: VertexId) -> Self {
        NormalForm::Pair {
            left: Path::vertex(v),
            right: Path::vertex(v),
        }
    }

    /// Normal form of a single letter.
    pub fn of_letter(letter: &Letter) -> Self {
        let p = letter.path();
        if letter.is_star() {
            Self::pair(Path::vertex(p.range()), p.clone())
        } else {
            Self::pair(p.clone(), Path::vertex(p.range()))
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NormalForm::Zero)
    }

    /// `Some(v)` iff this is the vertex projection `L_v`.
    pub fn as_vertex(&self) -> Option<VertexId> {
        match self {
            NormalForm::Pair { left, right } if left.is_vertex() && right.is_vertex() => {
                Some(left.source())
            }
            _ => None,
        }
    }

    /// `self · letter` under `model`.
    pub fn append(&self, letter: &Letter, model: Model) -> NormalForm {
        let (alpha, beta) = match self {
            NormalForm::Zero => return NormalForm::Zero,
            NormalForm::Unit => return Self::of_letter(letter),
            NormalForm::Pair { left, right } => (left, right),
        };
        let q = letter.path();
        let next = if letter.is_star() {
            if q.range() != beta.source() {
                return NormalForm::Zero;
            }
            let qb = q.concat(beta).expect("checked admissibility");
            Self::pair(alpha.clone(), qb)
        } else if beta.is_vertex() {
            match alpha.concat(q) {
                Ok(aq) => {
                    let r = Path::vertex(aq.range());
                    Self::pair(aq, r)
                }
                Err(_) => return NormalForm::Zero,
            }
        } else if let Some(rest) = q.strip_prefix(beta) {
            // L_β* L_{β h} = L_h
            let a = alpha.concat(&rest).expect("r(α) = r(β) = s(h)");
            let r = Path::vertex(a.range());
            Self::pair(a, r)
        } else if let Some(rest) = beta.strip_prefix(q) {
            // L_{q h}* L_q = L_h*
            Self::pair(alpha.clone(), rest)
        } else {
            return NormalForm::Zero;
        };
        match (model, &next) {
            (Model::CK, NormalForm::Pair { left, right }) if left == right && !left.is_vertex() => {
                Self::projection(left.source())
            }
            _ => next,
        }
    }

    /// `L_α L_β* ↦ L_β L_α*`.
    pub fn adjoint(&self) -> NormalForm {
        match self {
            NormalForm::Pair { left, right } => NormalForm::Pair {
                left: right.clone(),
                right: left.clone(),
            },
            other => other.clone(),
        }
    }

    /// A shortest word reducing to `self`; `None` for zero.
    pub fn to_word(&self) -> Option<Word> {
        match self {
            NormalForm::Zero => None,
            NormalForm::Unit => Some(Word::default()),
            NormalForm::Pair { left, right } => {
                let mut letters = Vec::with_capacity(2);
                if !left.is_vertex() || right.is_vertex() {
                    letters.push(Letter::creation(left.clone()));
                }
                if !right.is_vertex() {
                    letters.push(Letter::annihilation(right.clone()));
                }
                Some(Word(letters))
            }
        }
    }

    pub fn display<'a>(&'a self, graph: &'a DirectedGraph) -> impl fmt::Display + 'a {
        NormalFormDisplay { nf: self, graph }
    }
}

struct NormalFormDisplay<'a> {
    nf: &'a NormalForm,
    graph: &'a DirectedGraph,
}

impl fmt::Display for NormalFormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.nf.to_word() {
            None => f.write_str("0"),
            Some(w) => write!(f, "{}", w.display(self.graph)),
        }
    }
}

pub fn reduce(word: &Word, model: Model) -> NormalForm {
    word.letters()
        .iter()
        .fold(NormalForm::Unit, |nf, l| nf.append(l, model))
}

/// Lattice path of a word: one signed step per letter.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LatticePath {
    pub steps: Vec<i64>,
}

impl LatticePath {
    /// Running heights after each step.
    pub fn heights(&self) -> Vec<i64> {
        self.steps
            .iter()
            .scan(0, |h, s| {
                *h += s;
                Some(*h)
            })
            .collect()
    }

    pub fn final_height(&self) -> i64 {
        self.steps.iter().sum()
    }

    /// Highest point of the path read left to right, starting at 0.
    pub fn max_height(&self) -> i64 {
        self.heights().into_iter().fold(0, i64::max)
    }

    /// Highest partial sum of the path read right to left, starting at 0.
    /// This is the longest intermediate vector when the word acts on a
    /// vertex vector of the Fock space.
    pub fn max_suffix_height(&self) -> i64 {
        let mut h = 0;
        let mut best = 0;
        for s in self.steps.iter().rev() {
            h += s;
            best = best.max(h);
        }
        best
    }
}

pub fn lattice_path(word: &Word) -> LatticePath {
    LatticePath {
        steps: word.letters().iter().map(Letter::step).collect(),
    }
}

/// The word reduces to a vertex projection (or is empty).
pub fn has_star_axis_property(word: &Word, model: Model) -> bool {
    match reduce(word, model) {
        NormalForm::Unit => true,
        nf => nf.as_vertex().is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{g1, g2, two_loops};

    fn w(g: &DirectedGraph, s: &str) -> Word {
        parse_word(g, s).unwrap()
    }

    fn nf(g: &DirectedGraph, s: &str) -> NormalForm {
        let word = w(g, s);
        match word.letters() {
            [a] => NormalForm::of_letter(a),
            [a, b] => NormalForm::pair(a.path().clone(), b.path().clone()),
            _ => panic!("expected one or two letters"),
        }
    }

    #[test]
    fn reduce_examples() {
        let g = g2();
        let v1 = NormalForm::projection(g.vertex("v1").unwrap());
        let v2 = NormalForm::projection(g.vertex("v2").unwrap());
        assert_eq!(reduce(&w(&g, "L*[e] L[e]"), Model::CK), v2);
        assert_eq!(reduce(&w(&g, "L*[e] L[e]"), Model::Toeplitz), v2);
        assert_eq!(reduce(&w(&g, "L[e] L*[e]"), Model::CK), v1);
        assert_eq!(reduce(&w(&g, "L[e] L*[e]"), Model::Toeplitz), nf(&g, "L[e] L*[e]"));

        let g = g1();
        let expect = nf(&g, "L[l.l] L*[l]");
        for m in Model::ALL {
            assert_eq!(reduce(&w(&g, "L[l] L[l] L*[l]"), m), expect);
        }
    }

    #[test]
    fn zero_is_absorbing_and_inadmissible_is_zero() {
        let g = g2();
        assert!(reduce(&w(&g, "L[e] L[e]"), Model::CK).is_zero());
        assert!(reduce(&w(&g, "L[e] L[e] L*[e] L*[e]"), Model::CK).is_zero());
        assert!(reduce(&w(&g, "L[v2] L[e]"), Model::CK).is_zero());
        assert!(reduce(&w(&g, "L*[e] L[v1]"), Model::CK).as_vertex().is_none());
        assert_eq!(reduce(&w(&g, "L*[e] L[v1]"), Model::CK), nf(&g, "L*[e]"));
        assert!(reduce(&w(&g, "L*[e] L[v2]"), Model::CK).is_zero());
    }

    #[test]
    fn vertex_letters_are_projections() {
        let g = g1();
        let v = NormalForm::projection(g.vertex("v").unwrap());
        for m in Model::ALL {
            assert_eq!(reduce(&w(&g, "L[v] L[v]"), m), v);
            assert_eq!(reduce(&w(&g, "L*[v]"), m), v);
        }
        assert!(!Letter::annihilation(g.parse_path("v").unwrap()).is_star());
    }

    #[test]
    fn empty_word_is_unit() {
        assert_eq!(reduce(&Word::default(), Model::CK), NormalForm::Unit);
        assert!(has_star_axis_property(&Word::default(), Model::CK));
        assert_eq!(NormalForm::Unit.to_word(), Some(Word::default()));
    }

    #[test]
    fn distinct_loops_do_not_collapse() {
        let g = two_loops();
        let r = reduce(&w(&g, "L[l1] L*[l2]"), Model::CK);
        assert_eq!(r, nf(&g, "L[l1] L*[l2]"));
        assert!(!has_star_axis_property(&w(&g, "L[l1] L*[l2]"), Model::CK));
        assert_eq!(lattice_path(&w(&g, "L[l1] L*[l2]")).final_height(), 0);
    }

    #[test]
    fn lattice_examples() {
        let g = g2();
        let p = lattice_path(&w(&g, "L[e] L*[e]"));
        assert_eq!((p.steps.clone(), p.final_height()), (vec![1, -1], 0));
        let p = lattice_path(&w(&g, "L[v1]"));
        assert_eq!((p.steps.clone(), p.final_height()), (vec![0], 0));
        let g = g1();
        let p = lattice_path(&w(&g, "L[l.l] L*[l]"));
        assert_eq!((p.steps.clone(), p.final_height()), (vec![2, -1], 1));
        let p = lattice_path(&w(&g, "L[l] L[l] L*[l] L*[l]"));
        assert_eq!((p.max_height(), p.max_suffix_height()), (2, 0));
        let p = lattice_path(&w(&g, "L*[l] L*[l] L[l] L[l]"));
        assert_eq!((p.max_height(), p.max_suffix_height()), (0, 2));
        assert_eq!(lattice_path(&Word::default()), LatticePath::default());
    }

    #[test]
    fn star_axis_examples() {
        let g = g2();
        assert!(has_star_axis_property(&w(&g, "L*[e] L[e]"), Model::CK));
        assert!(!has_star_axis_property(&w(&g, "L[e] L[e]"), Model::CK));
        let g = g1();
        assert!(!has_star_axis_property(&w(&g, "L[l] L[l] L*[l]"), Model::CK));
    }

    #[test]
    fn parse_errors() {
        let g = g1();
        assert!(matches!(parse_word(&g, "X[l]"), Err(WordParseError::Malformed(_))));
        assert!(matches!(parse_word(&g, "L[l"), Err(WordParseError::Malformed(_))));
        assert!(matches!(parse_word(&g, "L[q]"), Err(WordParseError::Graph(_))));
        assert_eq!(w(&g, "L*[l.l]").display(&g).to_string(), "L*[l.l]");
        assert_eq!(Word::default().display(&g).to_string(), "1");
    }

    #[test]
    fn normal_form_display() {
        let g = g1();
        let r = reduce(&w(&g, "L[l] L[l] L*[l]"), Model::Toeplitz);
        assert_eq!(r.display(&g).to_string(), "L[l.l] L*[l]");
        assert_eq!(NormalForm::Zero.display(&g).to_string(), "0");
    }
}
