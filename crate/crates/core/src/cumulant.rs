//! Nested moment functionals, D_G-valued cumulants by Möbius inversion over
//! `NC(n)`, the word-level cumulant formula and bounded freeness testing.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{expectation_of_product, DiagonalElement, FourierExpr};
use crate::graph::DirectedGraph;
use crate::nc::{enumerate_nc, moebius_to_top, NcError, NoncrossingPartition, MAX_NC_SIZE};
use crate::scalar::Scalar;
use crate::word::{Letter, Model, Word};

/// `(d_i, a_i)` pairs standing for the product `d_1 a_1 d_2 a_2 ... d_n a_n`.
pub type MomentArgs = Vec<(DiagonalElement, FourierExpr)>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CumulantError {
    #[error("partition has {partition} points but {args} arguments were given")]
    SizeMismatch { partition: usize, args: usize },
    #[error("at least one argument is required")]
    NoArguments,
    #[error(transparent)]
    Nc(#[from] NcError),
}

type MoebiusFn = dyn Fn(&NoncrossingPartition) -> i64 + Send + Sync;

type NcTable = Vec<(NoncrossingPartition, i64)>;

/// `NC(n)` with Möbius values, built once per `n`.
fn nc_table(n: usize) -> Result<&'static [(NoncrossingPartition, i64)], NcError> {
    static TABLES: OnceLock<Vec<OnceLock<NcTable>>> = OnceLock::new();
    if n == 0 || n > MAX_NC_SIZE {
        return Err(NcError::SizeOutOfRange { n, max: MAX_NC_SIZE });
    }
    let tables = TABLES.get_or_init(|| (0..=MAX_NC_SIZE).map(|_| OnceLock::new()).collect());
    Ok(tables[n].get_or_init(|| {
        enumerate_nc(n)
            .expect("size checked")
            .into_iter()
            .map(|p| {
                let mu = moebius_to_top(&p);
                (p, mu)
            })
            .collect()
    }))
}

/// Computes moments and cumulants over one graph in one model.
#[derive(Clone)]
pub struct CumulantEngine<'g> {
    graph: &'g DirectedGraph,
    model: Model,
    moebius_override: Option<Arc<MoebiusFn>>,
}

impl fmt::Debug for CumulantEngine<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulantEngine")
            .field("model", &self.model)
            .field("custom_moebius", &self.moebius_override.is_some())
            .finish()
    }
}

/// Outcome of [`CumulantEngine::word_cumulant`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCumulant {
    /// Partitions with nonvanishing nested moment.
    pub connected: Vec<NoncrossingPartition>,
    /// `Σ_{π ∈ C} μ(π, 1_n)`.
    pub mu: i64,
    /// `E` of the word itself.
    pub expectation: DiagonalElement,
    /// `mu · E(word)`.
    pub value: DiagonalElement,
}

impl<'g> CumulantEngine<'g> {
    pub fn new(graph: &'g DirectedGraph, model: Model) -> Self {
        Self {
            graph,
            model,
            moebius_override: None,
        }
    }

    /// Replaces `μ(π, 1_n)`; used to exercise the verification suite
    /// against a deliberately wrong table.
    pub fn with_moebius<F>(mut self, f: F) -> Self
    where
        F: Fn(&NoncrossingPartition) -> i64 + Send + Sync + 'static,
    {
        self.moebius_override = Some(Arc::new(f));
        self
    }

    pub fn graph(&self) -> &'g DirectedGraph {
        self.graph
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn moebius(&self, pi: &NoncrossingPartition) -> i64 {
        match &self.moebius_override {
            Some(f) => f(pi),
            None => moebius_to_top(pi),
        }
    }

    /// `(1, a), ..., (1, a)`.
    pub fn plain_args(&self, a: &FourierExpr, n: usize) -> MomentArgs {
        vec![(DiagonalElement::identity(self.graph), a.clone()); n]
    }

    /// `(1, x_1), ..., (1, x_n)`.
    pub fn args_of<'a, I: IntoIterator<Item = &'a FourierExpr>>(&self, xs: I) -> MomentArgs {
        let one = DiagonalElement::identity(self.graph);
        xs.into_iter().map(|x| (one.clone(), x.clone())).collect()
    }

    /// `E(d_1 a_1 ... d_n a_n)`.
    pub fn moment(&self, args: &[(DiagonalElement, FourierExpr)]) -> DiagonalElement {
        expectation_of_product(args, self.model)
    }

    /// Evaluates a multiplicative family along `pi` by repeatedly removing an
    /// interval block `B = {p..q}`, evaluating `block(args[p..=q])`, and
    /// folding the result into `a_{p-1}` from the right (or multiplying the
    /// remainder from the left when `p` is the first point).
    pub fn nested<F>(
        &self,
        pi: &NoncrossingPartition,
        args: &[(DiagonalElement, FourierExpr)],
        block: &F,
    ) -> Result<DiagonalElement, CumulantError>
    where
        F: Fn(&[(DiagonalElement, FourierExpr)]) -> DiagonalElement,
    {
        if pi.size() != args.len() {
            return Err(CumulantError::SizeMismatch {
                partition: pi.size(),
                args: args.len(),
            });
        }
        Ok(self.nested_unchecked(pi, args.to_vec(), block))
    }

    fn nested_unchecked<F>(&self, pi: &NoncrossingPartition, mut args: MomentArgs, block: &F) -> DiagonalElement
    where
        F: Fn(&[(DiagonalElement, FourierExpr)]) -> DiagonalElement,
    {
        if pi.is_top() {
            return block(&args);
        }
        let k = pi.interval_block();
        let b = &pi.blocks()[k];
        let (p, q) = (b[0], b[b.len() - 1]);
        let value = block(&args[p..=q]);
        if value.is_zero() {
            return DiagonalElement::zero();
        }
        let rest_pi = pi.remove_block(k);
        args.drain(p..=q);
        if p > 0 {
            let prev = &mut args[p - 1].1;
            *prev = prev.right_mul_diag(&value);
            self.nested_unchecked(&rest_pi, args, block)
        } else {
            value.mul(&self.nested_unchecked(&rest_pi, args, block))
        }
    }

    /// `Ê(π)[d_1 a_1, ..., d_n a_n]`.
    pub fn nested_expectation(
        &self,
        pi: &NoncrossingPartition,
        args: &[(DiagonalElement, FourierExpr)],
    ) -> Result<DiagonalElement, CumulantError> {
        self.nested(pi, args, &|sub| self.moment(sub))
    }

    /// `k_n(d_1 a_1, ..., d_n a_n) = Σ_{π ∈ NC(n)} Ê(π)[...] μ(π, 1_n)`.
    pub fn cumulant(&self, args: &[(DiagonalElement, FourierExpr)]) -> Result<DiagonalElement, CumulantError> {
        let n = args.len();
        if n == 0 {
            return Err(CumulantError::NoArguments);
        }
        if n == 1 {
            return Ok(self.moment(args));
        }
        let table = nc_table(n)?;
        Ok(table
            .par_iter()
            .map(|(pi, mu)| {
                let mu = match &self.moebius_override {
                    Some(_) => self.moebius(pi),
                    None => *mu,
                };
                if mu == 0 {
                    return DiagonalElement::zero();
                }
                self.nested_unchecked(pi, args.to_vec(), &|sub| self.moment(sub))
                    .scale(&Scalar::int(mu))
            })
            .reduce(DiagonalElement::zero, |a, b| a.add(&b)))
    }

    /// `k_π`: cumulants nested along `π`.
    pub fn nested_cumulant(
        &self,
        pi: &NoncrossingPartition,
        args: &[(DiagonalElement, FourierExpr)],
    ) -> Result<DiagonalElement, CumulantError> {
        self.nested(pi, args, &|sub| self.cumulant(sub).expect("nonempty block"))
    }

    /// `Σ_{π ∈ NC(n)} k_π`, which must equal the moment.
    pub fn moment_from_cumulants(&self, args: &[(DiagonalElement, FourierExpr)]) -> Result<DiagonalElement, CumulantError> {
        let table = nc_table(args.len())?;
        let mut total = DiagonalElement::zero();
        for (pi, _) in table {
            total.add_assign(&self.nested_cumulant(pi, args)?);
        }
        Ok(total)
    }

    /// The word-level cumulant `μ_word · E(word)` for single-letter arguments.
    pub fn word_cumulant(&self, letters: &[Letter]) -> Result<WordCumulant, CumulantError> {
        let n = letters.len();
        if n == 0 {
            return Err(CumulantError::NoArguments);
        }
        let args = self.args_of(&letters.iter().map(|l| FourierExpr::letter(l.clone())).collect::<Vec<_>>());
        let mut connected = Vec::new();
        let mut mu = 0;
        for (pi, m) in nc_table(n)? {
            if !self.nested_expectation(pi, &args)?.is_zero() {
                connected.push(pi.clone());
                mu += match &self.moebius_override {
                    Some(_) => self.moebius(pi),
                    None => *m,
                };
            }
        }
        let expectation = self.moment(&args);
        let value = expectation.scale(&Scalar::int(mu));
        Ok(WordCumulant {
            connected,
            mu,
            expectation,
            value,
        })
    }

    /// `E(a^n)` for `n = 1..=n_max`.
    pub fn moment_table(&self, a: &FourierExpr, n_max: usize) -> Vec<DiagonalElement> {
        (1..=n_max).map(|n| self.moment(&self.plain_args(a, n))).collect()
    }

    /// `k_n(a, ..., a)` for `n = 1..=n_max`.
    pub fn cumulant_table(&self, a: &FourierExpr, n_max: usize) -> Result<Vec<DiagonalElement>, CumulantError> {
        (1..=n_max).map(|n| self.cumulant(&self.plain_args(a, n))).collect()
    }

    /// Searches for a nonvanishing mixed cumulant of `a` and `b`.
    ///
    /// Every argument position takes one of `a, a*, b, b*` (or `a, b` for
    /// [`Alphabet::Plain`]) and at least one position comes from each
    /// variable. Position `i` is multiplied on the left by `sample[i]`.
    pub fn mixed_cumulants_vanish(
        &self,
        a: &FourierExpr,
        b: &FourierExpr,
        n_max: usize,
        samples: &DiagonalSamples,
        alphabet: Alphabet,
    ) -> Result<MixedCumulantReport, CumulantError> {
        let operands = alphabet.operands();
        let values: Vec<FourierExpr> = operands
            .iter()
            .map(|op| match op {
                Operand::A => a.clone(),
                Operand::AStar => a.adjoint(),
                Operand::B => b.clone(),
                Operand::BStar => b.adjoint(),
            })
            .collect();
        let mut checked = 0;
        for n in 2..=n_max {
            for pattern in patterns(operands.len(), n) {
                let ops: Vec<Operand> = pattern.iter().map(|&i| operands[i]).collect();
                let has_a = ops.iter().any(|o| o.is_a());
                let has_b = ops.iter().any(|o| !o.is_a());
                if !(has_a && has_b) {
                    continue;
                }
                for (s, tuple) in samples.tuples().iter().enumerate() {
                    let args: MomentArgs = pattern
                        .iter()
                        .enumerate()
                        .map(|(i, &k)| (tuple[i].clone(), values[k].clone()))
                        .collect();
                    let value = self.cumulant(&args)?;
                    checked += 1;
                    if !value.is_zero() {
                        return Ok(MixedCumulantReport {
                            vanish: false,
                            checked,
                            witness: Some(MixedWitness {
                                n,
                                pattern: ops,
                                sample: s,
                                value,
                            }),
                        });
                    }
                }
            }
        }
        Ok(MixedCumulantReport {
            vanish: true,
            checked,
            witness: None,
        })
    }
}

fn patterns(alphabet: usize, n: usize) -> Vec<Vec<usize>> {
    let total = alphabet.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut p = vec![0; n];
            for slot in p.iter_mut().rev() {
                *slot = code % alphabet;
                code /= alphabet;
            }
            p
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    /// Positions take `a` or `b`.
    Plain,
    /// Positions take `a`, `a*`, `b` or `b*`.
    WithAdjoints,
}

impl Alphabet {
    fn operands(self) -> &'static [Operand] {
        match self {
            Alphabet::Plain => &[Operand::A, Operand::B],
            Alphabet::WithAdjoints => &[Operand::A, Operand::AStar, Operand::B, Operand::BStar],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    A,
    AStar,
    B,
    BStar,
}

impl Operand {
    fn is_a(self) -> bool {
        matches!(self, Operand::A | Operand::AStar)
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operand::A => "a",
            Operand::AStar => "a*",
            Operand::B => "b",
            Operand::BStar => "b*",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedWitness {
    pub n: usize,
    pub pattern: Vec<Operand>,
    /// Index into [`DiagonalSamples::tuples`].
    pub sample: usize,
    pub value: DiagonalElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedCumulantReport {
    pub vanish: bool,
    /// Number of cumulants evaluated.
    pub checked: usize,
    pub witness: Option<MixedWitness>,
}

/// Tuples `(d_1, ..., d_{n_max})` of diagonal coefficients; a cumulant of
/// order `n` uses the first `n` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalSamples {
    n_max: usize,
    tuples: Vec<Vec<DiagonalElement>>,
}

impl DiagonalSamples {
    /// Only the all-identity tuple.
    pub fn identity(graph: &DirectedGraph, n_max: usize) -> Self {
        Self {
            n_max,
            tuples: vec![vec![DiagonalElement::identity(graph); n_max]],
        }
    }

    /// The identity tuple plus one constant tuple `(L_v, ..., L_v)` per vertex.
    pub fn standard(graph: &DirectedGraph, n_max: usize) -> Self {
        let mut s = Self::identity(graph, n_max);
        for v in graph.vertex_ids() {
            s.tuples.push(vec![DiagonalElement::projection(v); n_max]);
        }
        s
    }

    /// [`DiagonalSamples::standard`] plus `count` seeded random tuples whose
    /// entries are small random integer combinations of vertex projections.
    pub fn with_random(graph: &DirectedGraph, n_max: usize, count: usize, seed: u64) -> Self {
        let mut s = Self::standard(graph, n_max);
        let mut rng = crate::random::rng(seed);
        for _ in 0..count {
            s.tuples
                .push((0..n_max).map(|_| crate::random::diagonal(graph, &mut rng)).collect());
        }
        s
    }

    pub fn push(&mut self, tuple: Vec<DiagonalElement>) {
        assert_eq!(tuple.len(), self.n_max, "sample tuples must have n_max entries");
        self.tuples.push(tuple);
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tuples(&self) -> &[Vec<DiagonalElement>] {
        &self.tuples
    }

    /// Arguments `(d_i, x)` for order `n` with sample `s`.
    pub fn args(&self, s: usize, x: &FourierExpr, n: usize) -> MomentArgs {
        self.tuples[s][..n].iter().map(|d| (d.clone(), x.clone())).collect()
    }
}

/// Convenience: moments of a single word as a [`Word`].
pub fn word_expectation(engine: &CumulantEngine<'_>, word: &Word) -> DiagonalElement {
    let args = engine.args_of(
        &word
            .letters()
            .iter()
            .map(|l| FourierExpr::letter(l.clone()))
            .collect::<Vec<_>>(),
    );
    engine.moment(&args)
}
