//! Truncated Fock space `l²(F⁺(G))` with creation and annihilation operators
//! as exact sparse matrices. Serves as an independent check of the Toeplitz
//! model.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use thiserror::Error;

use crate::expr::DiagonalElement;
use crate::graph::{DirectedGraph, Path};
use crate::scalar::Scalar;
use crate::word::{lattice_path, Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FockError {
    #[error("letter of length {len} does not fit in depth {depth}")]
    DepthExceeded { len: usize, depth: usize },
    #[error("word needs depth {required} but the basis has depth {depth}")]
    TruncationRisk { required: usize, depth: usize },
}

/// Basis vectors `ξ_w` for `|w| ≤ depth`, in semigroupoid enumeration order.
#[derive(Debug, Clone)]
pub struct FockBasis {
    depth: usize,
    paths: Vec<Path>,
    index: HashMap<Path, usize>,
}

impl FockBasis {
    pub fn new(graph: &DirectedGraph, depth: usize) -> Self {
        let paths = graph.enumerate_semigroupoid(depth);
        let index = paths.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        Self { depth, paths, index }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn index_of(&self, p: &Path) -> Option<usize> {
        self.index.get(p).copied()
    }
}

/// Sparse matrix over a [`FockBasis`], stored as `(row, col) → entry`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseOperator {
    size: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseOperator {
    pub fn zero(size: usize) -> Self {
        Self {
            size,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(size: usize) -> Self {
        Self {
            size,
            entries: (0..size).map(|i| ((i, i), Scalar::int(1))).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, row: usize, col: usize) -> Scalar {
        self.entries.get(&(row, col)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            size: self.size,
            entries: self.entries.iter().map(|(&(r, c), x)| ((c, r), x.conj())).collect(),
        }
    }

    pub fn mul(&self, other: &SparseOperator) -> SparseOperator {
        let mut by_row: HashMap<usize, Vec<(usize, &Scalar)>> = HashMap::new();
        for (&(r, c), x) in &other.entries {
            by_row.entry(r).or_default().push((c, x));
        }
        let mut entries: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (&(r, k), x) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, y) in row {
                    *entries.entry((r, c)).or_default() += &(x * y);
                }
            }
        }
        entries.retain(|_, x| !x.is_zero());
        SparseOperator { size: self.size, entries }
    }

    /// Applies the operator to a sparse column vector.
    pub fn apply(&self, v: &BTreeMap<usize, Scalar>) -> BTreeMap<usize, Scalar> {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (&(r, c), x) in &self.entries {
            if let Some(y) = v.get(&c) {
                *out.entry(r).or_default() += &(x * y);
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }
}

/// `L_w: ξ_h ↦ ξ_{wh}` (zero when inadmissible or beyond the depth) and
/// `L_w*: ξ_{wh} ↦ ξ_h`.
pub fn build_generator(letter: &Letter, basis: &FockBasis) -> Result<SparseOperator, FockError> {
    let w = letter.path();
    if w.len() > basis.depth {
        return Err(FockError::DepthExceeded {
            len: w.len(),
            depth: basis.depth,
        });
    }
    let mut op = SparseOperator::zero(basis.len());
    for (col, h) in basis.paths.iter().enumerate() {
        let image = if letter.is_star() {
            h.strip_prefix(w)
        } else {
            w.concat(h).ok()
        };
        if let Some(row) = image.and_then(|p| basis.index_of(&p)) {
            op.entries.insert((row, col), Scalar::int(1));
        }
    }
    Ok(op)
}

/// The depth a word needs so that no intermediate vector is truncated:
/// the larger of its left-to-right and right-to-left height maxima.
pub fn required_depth(word: &Word) -> usize {
    let lp = lattice_path(word);
    lp.max_height().max(lp.max_suffix_height()) as usize
}

/// `E(word) = Σ_v ⟨word ξ_v, ξ_v⟩ L_v` on the truncated space.
pub fn oracle_expectation(graph: &DirectedGraph, word: &Word, depth: usize) -> Result<DiagonalElement, FockError> {
    let required = required_depth(word);
    if required > depth {
        return Err(FockError::TruncationRisk { required, depth });
    }
    let basis = FockBasis::new(graph, depth);
    let ops = word
        .letters()
        .iter()
        .map(|l| build_generator(l, &basis))
        .collect::<Result<Vec<_>, _>>()?;
    let mut coeffs = Vec::new();
    for v in graph.vertex_ids() {
        let i = basis.index_of(&Path::vertex(v)).expect("vertices are in every basis");
        let mut vec = BTreeMap::from([(i, Scalar::int(1))]);
        for op in ops.iter().rev() {
            vec = op.apply(&vec);
            if vec.is_empty() {
                break;
            }
        }
        coeffs.push((v, vec.remove(&i).unwrap_or_default()));
    }
    Ok(DiagonalElement::from_pairs(coeffs))
}

/// Oracle with the basis and generator columns built once, for evaluating
/// many words at one depth.
#[derive(Debug, Clone)]
pub struct FockOracle<'g> {
    graph: &'g DirectedGraph,
    basis: FockBasis,
    columns: HashMap<Letter, Vec<Vec<(usize, Scalar)>>>,
}

impl<'g> FockOracle<'g> {
    pub fn new(graph: &'g DirectedGraph, depth: usize) -> Self {
        Self {
            graph,
            basis: FockBasis::new(graph, depth),
            columns: HashMap::new(),
        }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    fn columns(&mut self, letter: &Letter) -> Result<&Vec<Vec<(usize, Scalar)>>, FockError> {
        if !self.columns.contains_key(letter) {
            let op = build_generator(letter, &self.basis)?;
            let mut cols = vec![Vec::new(); self.basis.len()];
            for (&(r, c), x) in op.entries() {
                cols[c].push((r, x.clone()));
            }
            self.columns.insert(letter.clone(), cols);
        }
        Ok(&self.columns[letter])
    }

    /// Same value and guard as [`oracle_expectation`].
    pub fn expectation(&mut self, word: &Word) -> Result<DiagonalElement, FockError> {
        let required = required_depth(word);
        if required > self.basis.depth {
            return Err(FockError::TruncationRisk {
                required,
                depth: self.basis.depth,
            });
        }
        let mut coeffs = Vec::new();
        for v in self.graph.vertex_ids() {
            let i = self.basis.index_of(&Path::vertex(v)).expect("vertices are in every basis");
            let mut vec: BTreeMap<usize, Scalar> = BTreeMap::from([(i, Scalar::int(1))]);
            for l in word.letters().iter().rev() {
                let cols = self.columns(l)?;
                let mut next: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (c, y) in &vec {
                    for (r, x) in &cols[*c] {
                        *next.entry(*r).or_default() += &(x * y);
                    }
                }
                next.retain(|_, x| !x.is_zero());
                vec = next;
                if vec.is_empty() {
                    break;
                }
            }
            coeffs.push((v, vec.remove(&i).unwrap_or_default()));
        }
        Ok(DiagonalElement::from_pairs(coeffs))
    }
}

/// The product of a word's generators as one matrix.
pub fn word_operator(word: &Word, basis: &FockBasis) -> Result<SparseOperator, FockError> {
    let mut acc = SparseOperator::identity(basis.len());
    for l in word.letters() {
        acc = acc.mul(&build_generator(l, basis)?);
    }
    Ok(acc)
}
