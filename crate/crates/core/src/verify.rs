//! Exact self-checks over a set of graphs, as run by `graphfp verify`.
//!
//! Checks come in two kinds. Consistency checks (relations, Möbius
//! inversion, off-diagonal vanishing, the first-cumulant formula, the Fock
//! oracle) must always pass; a failure means the engine is wrong. Claims
//! (cumulant equality under projection compression, soundness of the
//! support-based freeness criterion) are reported as `REFUTED` with a
//! witness when a counterexample turns up, without failing the run.

use std::fmt;
use std::sync::Arc;

use crate::compress::{
    check_offdiag_vanishing, cumulant_equality_check, first_cumulant_closed_form, freeness_sufficient,
    projection_compress, FreenessQuery, VertexSet,
};
use crate::cumulant::{Alphabet, CumulantEngine, DiagonalSamples};
use crate::expr::{DiagonalElement, Evaluated, FourierExpr};
use crate::fock::{oracle_expectation, required_depth};
use crate::graph::{DirectedGraph, Path};
use crate::nc::{moebius_by_recursion, NoncrossingPartition};
use crate::random;
use crate::word::{reduce, Letter, Model, NormalForm, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Refuted,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Refuted => "REFUTED",
            Status::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub check: &'static str,
    pub graph: String,
    pub model: Option<Model>,
    pub status: Status,
    pub detail: String,
}

impl CheckResult {
    fn write_padded(&self, f: &mut fmt::Formatter<'_>, graph_width: usize) -> fmt::Result {
        let model = self.model.map(|m| m.name()).unwrap_or("-");
        let line = format!(
            "{:<8} {:<22} {:<graph_width$} {:<9} {}",
            self.status.to_string(),
            self.check,
            self.graph,
            model,
            self.detail
        );
        f.write_str(line.trim_end())
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_padded(f, self.graph.len())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub results: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failed(&self) -> bool {
        self.results.iter().any(|r| r.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.results.iter().filter(|r| r.status == status).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.results.iter().map(|r| r.graph.len()).max().unwrap_or(0).max(5);
        for r in &self.results {
            r.write_padded(f, width)?;
            writeln!(f)?;
        }
        write!(
            f,
            "{} passed, {} failed, {} refuted, {} info",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Refuted),
            self.count(Status::Info)
        )
    }
}

type MoebiusFn = Arc<dyn Fn(&NoncrossingPartition) -> i64 + Send + Sync>;

#[derive(Clone)]
pub struct VerifyConfig {
    pub n_max: usize,
    /// Random elements per graph and model.
    pub elements: usize,
    /// Longest path in the relation and freeness checks.
    pub path_len: usize,
    /// Longest word compared against the Fock oracle.
    pub word_len: usize,
    pub seed: u64,
    pub moebius: Option<MoebiusFn>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_max: 4,
            elements: 5,
            path_len: 2,
            word_len: 4,
            seed: 0x5eed,
            moebius: None,
        }
    }
}

impl fmt::Debug for VerifyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerifyConfig")
            .field("n_max", &self.n_max)
            .field("elements", &self.elements)
            .field("path_len", &self.path_len)
            .field("word_len", &self.word_len)
            .field("seed", &self.seed)
            .field("custom_moebius", &self.moebius.is_some())
            .finish()
    }
}

impl VerifyConfig {
    fn engine<'g>(&self, graph: &'g DirectedGraph, model: Model) -> CumulantEngine<'g> {
        let eng = CumulantEngine::new(graph, model);
        match &self.moebius {
            Some(f) => {
                let f = Arc::clone(f);
                eng.with_moebius(move |p| f(p))
            }
            None => eng,
        }
    }
}

/// Built-in graphs always included in a run.
pub fn builtin_graphs() -> Vec<(String, DirectedGraph)> {
    use crate::graph::fixtures;
    vec![
        ("loop".to_string(), fixtures::g1()),
        ("edge".to_string(), fixtures::g2()),
        ("two-loops+edge".to_string(), fixtures::two_loops_plus_edge()),
    ]
}

pub fn run_suite(graphs: &[(String, DirectedGraph)], models: &[Model], config: &VerifyConfig) -> VerifyReport {
    let mut report = VerifyReport::default();
    report.results.push(moebius_table(config));
    for (name, g) in graphs {
        for &m in models {
            let mut push = |check: &'static str, outcome: Outcome| {
                report.results.push(CheckResult {
                    check,
                    graph: name.clone(),
                    model: Some(m),
                    status: outcome.0,
                    detail: outcome.1,
                });
            };
            push("relations", relations(g, m, config));
            push("moment-cumulant", round_trip(g, m, config));
            push("offdiag-vanishing", offdiag(g, m, config));
            push("first-cumulant", first_cumulant(g, m, config));
            if m == Model::Toeplitz {
                push("fock-oracle", oracle(g, config));
            }
            push("compression-equality", compression_equality(g, m, config));
            push("freeness-soundness", freeness_soundness(g, m, config));
        }
        if models.contains(&Model::CK) && models.contains(&Model::Toeplitz) {
            if let Some(detail) = divergence(g) {
                report.results.push(CheckResult {
                    check: "model-divergence",
                    graph: name.clone(),
                    model: None,
                    status: Status::Info,
                    detail,
                });
            }
        }
    }
    report
}

type Outcome = (Status, String);

fn pass() -> Outcome {
    (Status::Pass, String::new())
}

fn moebius_table(config: &VerifyConfig) -> CheckResult {
    let mut outcome = pass();
    'outer: for n in 1..=config.n_max.max(1) {
        for (p, mu) in moebius_by_recursion(n).expect("n within range") {
            let got = match &config.moebius {
                Some(f) => f(&p),
                None => crate::nc::moebius_to_top(&p),
            };
            if got != mu {
                outcome = (Status::Fail, format!("mu({p}, 1_{n}) = {got}, recursion gives {mu}"));
                break 'outer;
            }
        }
    }
    CheckResult {
        check: "moebius-table",
        graph: "-".into(),
        model: None,
        status: outcome.0,
        detail: outcome.1,
    }
}

fn relations(g: &DirectedGraph, m: Model, config: &VerifyConfig) -> Outcome {
    let single = |l: Letter| NormalForm::of_letter(&l);
    for w in g.enumerate_semigroupoid(config.path_len) {
        let lw = Letter::creation(w.clone());
        let ls = Letter::annihilation(w.clone());
        let mut cases = vec![
            (
                "L_w* L_w",
                Word::new(vec![ls.clone(), lw.clone()]),
                NormalForm::projection(w.range()),
            ),
            (
                "L_w L_w* L_w",
                Word::new(vec![lw.clone(), ls.clone(), lw.clone()]),
                single(lw.clone()),
            ),
        ];
        if m == Model::CK {
            cases.push((
                "L_w L_w*",
                Word::new(vec![lw.clone(), ls.clone()]),
                NormalForm::projection(w.source()),
            ));
        }
        for (what, word, expected) in cases {
            let got = reduce(&word, m);
            if got != expected {
                return (
                    Status::Fail,
                    format!(
                        "{what} for w = {}: {} instead of {}",
                        g.path_name(&w),
                        got.display(g),
                        expected.display(g)
                    ),
                );
            }
        }
    }
    pass()
}

fn elements(g: &DirectedGraph, m: Model, config: &VerifyConfig, salt: u64) -> Vec<FourierExpr> {
    let mut rng = random::rng(config.seed ^ salt ^ (m as u64) << 32);
    (0..config.elements).map(|_| random::element(g, &mut rng, 5, 2)).collect()
}

fn round_trip(g: &DirectedGraph, m: Model, config: &VerifyConfig) -> Outcome {
    let eng = config.engine(g, m);
    for a in elements(g, m, config, 1) {
        for n in 1..=config.n_max {
            let args = eng.plain_args(&a, n);
            let direct = eng.moment(&args);
            let rebuilt = eng.moment_from_cumulants(&args).expect("n within range");
            if direct != rebuilt {
                return (
                    Status::Fail,
                    format!(
                        "n = {n}, a = {}: E = {}, sum of k_pi = {}",
                        a.display(g),
                        direct.display(g),
                        rebuilt.display(g)
                    ),
                );
            }
        }
    }
    pass()
}

fn offdiag(g: &DirectedGraph, m: Model, config: &VerifyConfig) -> Outcome {
    let samples = DiagonalSamples::standard(g, config.n_max);
    for a in elements(g, m, config, 2) {
        for v1 in g.vertex_ids() {
            for v2 in g.vertex_ids().filter(|&v| v != v1) {
                let ok = check_offdiag_vanishing(g, &a, v1, v2, config.n_max, &samples, m).expect("n within range");
                if !ok {
                    return (
                        Status::Fail,
                        format!(
                            "a = {}, ({}, {})",
                            a.display(g),
                            g.vertex_name(v1),
                            g.vertex_name(v2)
                        ),
                    );
                }
            }
        }
    }
    pass()
}

fn first_cumulant(g: &DirectedGraph, m: Model, config: &VerifyConfig) -> Outcome {
    let eng = config.engine(g, m);
    let mut rng = random::rng(config.seed ^ 3);
    for a in elements(g, m, config, 3) {
        let vs = VertexSet::new(g, random::vertex_subset(g, &mut rng)).expect("nonempty subset");
        let d = random::diagonal(g, &mut rng);
        let pc = projection_compress(&a, &vs);
        let k1 = eng.cumulant(&[(d.clone(), pc.full)]).expect("one argument");
        let closed = first_cumulant_closed_form(&a, &d, &vs);
        if k1 != closed {
            return (
                Status::Fail,
                format!("a = {}: k_1 = {}, closed form {}", a.display(g), k1.display(g), closed.display(g)),
            );
        }
    }
    pass()
}

/// Words over the creation and annihilation letters of paths of length 1.
fn small_words(g: &DirectedGraph, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = g
        .edge_ids()
        .map(|e| g.edge_path(e))
        .flat_map(|p| [Letter::creation(p.clone()), Letter::annihilation(p)])
        .chain(g.vertex_ids().map(|v| Letter::creation(Path::vertex(v))))
        .collect();
    let mut out = Vec::new();
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in &letters {
                let mut x: Vec<Letter> = w.clone();
                x.push(l.clone());
                next.push(x);
            }
        }
        out.extend(next.iter().cloned().map(Word::new));
        layer = next;
    }
    out
}

fn oracle(g: &DirectedGraph, config: &VerifyConfig) -> Outcome {
    for w in small_words(g, config.word_len) {
        let symbolic = Evaluated::from_word(&w, Model::Toeplitz).expectation();
        let depth = required_depth(&w).max(1);
        let fock = oracle_expectation(g, &w, depth).expect("depth satisfies the guard");
        if symbolic != fock {
            return (
                Status::Fail,
                format!(
                    "{}: symbolic {}, oracle {}",
                    w.display(g),
                    symbolic.display(g),
                    fock.display(g)
                ),
            );
        }
    }
    pass()
}

fn compression_equality(g: &DirectedGraph, m: Model, config: &VerifyConfig) -> Outcome {
    let mut rng = random::rng(config.seed ^ 4);
    for a in elements(g, m, config, 4) {
        let vs = VertexSet::new(g, random::vertex_subset(g, &mut rng)).expect("nonempty subset");
        let samples = DiagonalSamples::standard(g, config.n_max);
        if let Some(w) = cumulant_equality_check(g, &a, &vs, config.n_max, &samples, m).expect("n within range") {
            return (
                Status::Refuted,
                format!(
                    "a = {}, V = {}, n = {}: k_n(PaP) = {}, k_n(P_V(a)) = {}",
                    a.display(g),
                    vs.display(g),
                    w.n,
                    w.compressed.display(g),
                    w.expected.display(g)
                ),
            );
        }
    }
    pass()
}

fn freeness_soundness(g: &DirectedGraph, m: Model, config: &VerifyConfig) -> Outcome {
    let eng = config.engine(g, m);
    let paths: Vec<Path> = g
        .enumerate_semigroupoid(config.path_len)
        .into_iter()
        .filter(|p| !p.is_vertex())
        .collect();
    let samples = DiagonalSamples::standard(g, config.n_max);
    let mut checked = 0;
    for (i, p) in paths.iter().enumerate() {
        for q in &paths[i + 1..] {
            let a = FourierExpr::letter(Letter::creation(p.clone()));
            let b = FourierExpr::letter(Letter::creation(q.clone()));
            if !freeness_sufficient(g, FreenessQuery::Elements { a: &a, b: &b }).is_free() {
                continue;
            }
            checked += 1;
            let r = eng
                .mixed_cumulants_vanish(&a, &b, config.n_max, &samples, Alphabet::WithAdjoints)
                .expect("n within range");
            if let Some(w) = r.witness {
                let pattern: Vec<String> = w.pattern.iter().map(|o| o.to_string()).collect();
                return (
                    Status::Refuted,
                    format!(
                        "a = L[{}], b = L[{}]: k_{}({}) = {}",
                        g.path_name(p),
                        g.path_name(q),
                        w.n,
                        pattern.join(", "),
                        w.value.display(g)
                    ),
                );
            }
        }
    }
    (Status::Pass, format!("{checked} pairs"))
}

/// Cumulants of `L_l + L_l*` for the first loop edge, in both models.
fn divergence(g: &DirectedGraph) -> Option<String> {
    let l = g.edge_ids().map(|e| g.edge_path(e)).find(Path::is_loop)?;
    let a = FourierExpr::symmetric(&l);
    let show = |m: Model| -> String {
        let eng = CumulantEngine::new(g, m);
        let ks: Vec<DiagonalElement> = eng.cumulant_table(&a, 4).expect("n within range");
        let parts: Vec<String> = ks.iter().map(|k| k.display(g).to_string()).collect();
        format!("{}: [{}]", m.name(), parts.join(", "))
    };
    Some(format!(
        "cumulants of L[{0}] + L*[{0}]: {1}; {2}",
        g.path_name(&l),
        show(Model::Toeplitz),
        show(Model::CK)
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig {
            n_max: 3,
            elements: 2,
            path_len: 1,
            word_len: 3,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn builtin_suite_has_no_failures() {
        let report = run_suite(&builtin_graphs(), &Model::ALL, &quick());
        assert!(!report.failed(), "{report}");
        assert!(report.count(Status::Info) >= 1);
    }

    #[test]
    fn corrupted_moebius_is_caught() {
        let config = VerifyConfig {
            moebius: Some(Arc::new(|p: &NoncrossingPartition| {
                let mu = crate::nc::moebius_to_top(p);
                if p.block_count() == 2 {
                    mu + 1
                } else {
                    mu
                }
            })),
            ..quick()
        };
        let report = run_suite(&builtin_graphs()[..1], &[Model::CK], &config);
        assert!(report.failed());
        let fails: Vec<&CheckResult> = report.results.iter().filter(|r| r.status == Status::Fail).collect();
        assert!(fails.iter().any(|r| r.check == "moebius-table"));
        assert!(fails.iter().any(|r| r.check == "moment-cumulant" && !r.detail.is_empty()));
    }
}
