//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any criterion fails. All comparisons are exact.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use graphfp::compress::{
    check_offdiag_vanishing, cumulant_equality_check, first_cumulant_closed_form, projection_compress, VertexSet,
};
use graphfp::cumulant::{Alphabet, CumulantEngine, DiagonalSamples};
use graphfp::expr::{DiagonalElement, Evaluated, FourierExpr};
use graphfp::fock::{required_depth, FockOracle};
use graphfp::graph::{diagram_distinct, fixtures, DirectedGraph, Path};
use graphfp::random;
use graphfp::scalar::Scalar;
use graphfp::word::{lattice_path, reduce, Letter, Model, NormalForm, Word};

const SEED: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_4_6() -> DirectedGraph {
    random::graph(&mut random::rng(SEED), 4, 6)
}

fn random_3_4() -> DirectedGraph {
    random::graph(&mut random::rng(SEED + 1), 3, 4)
}

fn test_graphs() -> Vec<(&'static str, DirectedGraph)> {
    vec![
        ("G1", fixtures::g1()),
        ("G2", fixtures::g2()),
        ("random 4v/6e", random_4_6()),
        ("random 3v/4e", random_3_4()),
    ]
}

/// Words of length `1..=max_len` over `letters`.
fn all_words(letters: &[Letter], max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for l in letters {
                let mut x = w.clone();
                x.push(l.clone());
                next.push(x);
            }
        }
        out.extend(next.iter().cloned().map(Word::new));
        layer = next;
    }
    out
}

fn letters_up_to(g: &DirectedGraph, max_len: usize) -> Vec<Letter> {
    g.enumerate_semigroupoid(max_len)
        .into_iter()
        .flat_map(|p| {
            if p.is_vertex() {
                vec![Letter::creation(p)]
            } else {
                vec![Letter::creation(p.clone()), Letter::annihilation(p)]
            }
        })
        .collect()
}

fn relations() -> Outcome {
    let graphs = [fixtures::g1(), fixtures::g2(), random_4_6()];
    let mut cases = 0;
    for g in &graphs {
        for w in g.enumerate_semigroupoid(3) {
            let lw = Letter::creation(w.clone());
            let ls = Letter::annihilation(w.clone());
            for m in Model::ALL {
                let mut checks = vec![
                    (
                        Word::new(vec![ls.clone(), lw.clone()]),
                        NormalForm::projection(w.range()),
                    ),
                    (
                        Word::new(vec![lw.clone(), ls.clone(), lw.clone()]),
                        NormalForm::of_letter(&lw),
                    ),
                ];
                if m == Model::CK {
                    checks.push((
                        Word::new(vec![lw.clone(), ls.clone()]),
                        NormalForm::projection(w.source()),
                    ));
                }
                if w.is_vertex() {
                    checks.push((Word::new(vec![lw.clone(), lw.clone()]), NormalForm::of_letter(&lw)));
                    if ls != lw {
                        return outcome(false, format!("L_v* differs from L_v for {}", g.path_name(&w)));
                    }
                }
                for (word, expected) in checks {
                    cases += 1;
                    let got = reduce(&word, m);
                    if got != expected {
                        return outcome(
                            false,
                            format!("{} in {m}: {} instead of {}", word.display(g), got.display(g), expected.display(g)),
                        );
                    }
                }
            }
        }
    }
    outcome(true, format!("{cases} identities"))
}

fn star_axis() -> Outcome {
    let g1 = fixtures::g1();
    let g2 = fixtures::g2();
    let mut words = 0;
    for (g, letters) in [(&g1, letters_up_to(&g1, 2)), (&g2, letters_up_to(&g2, 1))] {
        for w in all_words(&letters, 4) {
            words += 1;
            let args: Vec<(DiagonalElement, FourierExpr)> = w
                .letters()
                .iter()
                .map(|l| (DiagonalElement::identity(g), FourierExpr::letter(l.clone())))
                .collect();
            let e = graphfp::expr::expectation_of_product(&args, Model::CK);
            let nonzero = reduce(&w, Model::CK) != NormalForm::Zero;
            let axis = nonzero && lattice_path(&w).final_height() == 0;
            if e.is_zero() == axis {
                return outcome(false, format!("{}: E = {}", w.display(g), e.display(g)));
            }
        }
    }
    outcome(true, format!("{words} words, no counterexample"))
}

fn round_trip() -> Outcome {
    let mut checked = 0;
    for (gi, (name, g)) in test_graphs().into_iter().enumerate() {
        for m in Model::ALL {
            let eng = CumulantEngine::new(&g, m);
            let mut rng = random::rng(SEED ^ (gi as u64) << 8 ^ m as u64);
            for _ in 0..50 {
                let a = random::element(&g, &mut rng, 5, 2);
                for n in 1..=5 {
                    let args = eng.plain_args(&a, n);
                    let direct = eng.moment(&args);
                    let rebuilt = eng.moment_from_cumulants(&args).unwrap();
                    checked += 1;
                    if direct != rebuilt {
                        return outcome(
                            false,
                            format!("{name} {m} n={n} a={}: {} vs {}", a.display(&g), direct.display(&g), rebuilt.display(&g)),
                        );
                    }
                }
            }
        }
    }
    outcome(true, format!("{checked} moments rebuilt"))
}

fn samples(g: &DirectedGraph, seed: u64) -> DiagonalSamples {
    DiagonalSamples::with_random(g, 5, 2, seed)
}

fn offdiag_vanishing() -> Outcome {
    let mut checked = 0;
    for (gi, (name, g)) in test_graphs().into_iter().enumerate() {
        let s = samples(&g, SEED + gi as u64);
        let mut rng = random::rng(SEED ^ 0x0ff ^ gi as u64);
        let elements: Vec<FourierExpr> = (0..100).map(|_| random::element(&g, &mut rng, 5, 2)).collect();
        for m in Model::ALL {
            for a in &elements {
                for v1 in g.vertex_ids() {
                    for v2 in g.vertex_ids().filter(|&v| v != v1) {
                        checked += 1;
                        if !check_offdiag_vanishing(&g, a, v1, v2, 5, &s, m).unwrap() {
                            return outcome(
                                false,
                                format!(
                                    "{name} {m} a={} ({}, {})",
                                    a.display(&g),
                                    g.vertex_name(v1),
                                    g.vertex_name(v2)
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    outcome(true, format!("{checked} compressions, all moments and cumulants zero"))
}

fn compression_equality() -> Outcome {
    let composite = fixtures::g1_plus_g2();
    let mut graphs = vec![("G1+G2", composite)];
    graphs.extend(test_graphs().into_iter().skip(2));
    let mut total = 0;
    let mut closed_form_failures = 0;
    let mut failures = 0;
    let mut first: Option<String> = None;
    for (gi, (name, g)) in graphs.iter().enumerate() {
        let s = samples(g, SEED + 10 + gi as u64);
        let mut rng = random::rng(SEED ^ 0x515 ^ gi as u64);
        for _ in 0..100 {
            let a = random::element(g, &mut rng, 5, 2);
            let vs = VertexSet::new(g, random::vertex_subset(g, &mut rng)).unwrap();
            for m in Model::ALL {
                total += 1;
                let pc = projection_compress(&a, &vs);
                let eng = CumulantEngine::new(g, m);
                for tuple in s.tuples() {
                    let k1 = eng.cumulant(&[(tuple[0].clone(), pc.full.clone())]).unwrap();
                    if k1 != first_cumulant_closed_form(&a, &tuple[0], &vs) {
                        closed_form_failures += 1;
                    }
                }
                if let Some(w) = cumulant_equality_check(g, &a, &vs, 5, &s, m).unwrap() {
                    failures += 1;
                    first.get_or_insert_with(|| {
                        format!(
                            "{name} {m} a={} V={} n={}: k_n(PaP)={} k_n(P_V(a))={}",
                            a.display(g),
                            vs.display(g),
                            w.n,
                            w.compressed.display(g),
                            w.expected.display(g)
                        )
                    });
                }
            }
        }
    }
    let detail = format!(
        "{failures}/{total} cases differ, k_1 closed-form mismatches {closed_form_failures}{}",
        first.map(|f| format!("; first: {f}")).unwrap_or_default()
    );
    outcome(failures == 0 && closed_form_failures == 0, detail)
}

fn generator_freeness() -> Outcome {
    let g = fixtures::two_loops_plus_edge();
    let paths: Vec<Path> = g
        .enumerate_semigroupoid(2)
        .into_iter()
        .filter(|p| !p.is_vertex())
        .collect();
    let s = DiagonalSamples::standard(&g, 4);
    let mut pass = true;
    let mut parts = Vec::new();
    for m in Model::ALL {
        let eng = CumulantEngine::new(&g, m);
        let (mut distinct, mut distinct_not_free, mut same, mut witnessed) = (0, 0, 0, 0);
        let mut example = None;
        for (i, p) in paths.iter().enumerate() {
            for q in &paths[i + 1..] {
                let a = FourierExpr::letter(Letter::creation(p.clone()));
                let b = FourierExpr::letter(Letter::creation(q.clone()));
                let r = eng.mixed_cumulants_vanish(&a, &b, 4, &s, Alphabet::WithAdjoints).unwrap();
                if diagram_distinct(&g, p, q) {
                    distinct += 1;
                    if !r.vanish {
                        distinct_not_free += 1;
                        example.get_or_insert_with(|| format!("{} vs {}", g.path_name(p), g.path_name(q)));
                    }
                } else {
                    same += 1;
                    if !r.vanish {
                        witnessed += 1;
                    }
                }
            }
        }
        let ok = distinct_not_free == 0 && witnessed >= 3;
        pass &= ok;
        parts.push(format!(
            "{m}: {distinct_not_free}/{distinct} diagram-distinct pairs not free{}, witnesses for {witnessed}/{same} equal-diagram pairs",
            example.map(|e| format!(" (e.g. {e})")).unwrap_or_default()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn oracle_equivalence() -> Outcome {
    let mut words = 0;
    for (name, g) in test_graphs() {
        let max_path = if g.vertex_count() <= 2 { 2 } else { 1 };
        let mut oracles: HashMap<usize, FockOracle> = HashMap::new();
        for w in all_words(&letters_up_to(&g, max_path), 5) {
            let longest = w.letters().iter().map(|l| l.path().len()).max().unwrap_or(0);
            let depth = required_depth(&w).max(longest).max(1);
            let oracle = oracles.entry(depth).or_insert_with(|| FockOracle::new(&g, depth));
            let fock = oracle.expectation(&w).unwrap();
            let symbolic = Evaluated::from_word(&w, Model::Toeplitz).expectation();
            words += 1;
            if fock != symbolic {
                return outcome(
                    false,
                    format!("{name} {}: symbolic {} oracle {}", w.display(&g), symbolic.display(&g), fock.display(&g)),
                );
            }
        }
    }
    outcome(true, format!("{words} words bit-exact"))
}

fn semicircular_pin() -> Outcome {
    let g = fixtures::g1();
    let v = g.vertex("v").unwrap();
    let at = |k: i64| DiagonalElement::from_pairs([(v, Scalar::int(k))]);
    let a = FourierExpr::symmetric(&g.parse_path("l").unwrap());
    let toeplitz = CumulantEngine::new(&g, Model::Toeplitz).cumulant_table(&a, 6).unwrap();
    let ck = CumulantEngine::new(&g, Model::CK);
    let ck_cumulants = ck.cumulant_table(&a, 4).unwrap();
    let ck_moments = ck.moment_table(&a, 4);
    let expected_toeplitz = vec![at(0), at(1), at(0), at(0), at(0), at(0)];
    let expected_ck = vec![at(0), at(2), at(0), at(-2)];
    let expected_ck_moments = vec![at(0), at(2), at(0), at(6)];
    let show = |xs: &[DiagonalElement]| {
        xs.iter()
            .map(|x| x.display(&g).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let pass = toeplitz == expected_toeplitz && ck_cumulants == expected_ck && ck_moments == expected_ck_moments;
    outcome(
        pass,
        format!(
            "toeplitz k = [{}]; ck k = [{}]; ck E = [{}]",
            show(&toeplitz),
            show(&ck_cumulants),
            show(&ck_moments)
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 relations", relations),
        ("2 star-axis (ck)", star_axis),
        ("3 moebius round trip", round_trip),
        ("4 off-diagonal vanishing", offdiag_vanishing),
        ("5 compression equality", compression_equality),
        ("6 generator freeness", generator_freeness),
        ("7 fock oracle", oracle_equivalence),
        ("8 semicircular pin", semicircular_pin),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {name:<26} [{:.1}s] {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
