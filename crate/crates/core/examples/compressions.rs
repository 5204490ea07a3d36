//! Compressions of an element on `v1 --e--> v2` plus a loop, and the
//! freeness checks that go with them.

use graphfp::compress::{cumulant_equality_check, freeness_sufficient, projection_compress, FreenessQuery};
use graphfp::cumulant::{Alphabet, DiagonalSamples};
use graphfp::graph::fixtures;
use graphfp::{diagonal_compress, off_diagonal_compress, CumulantEngine, FourierExpr, Model, VertexSet};

fn main() {
    let g = fixtures::g1_plus_g2();
    let a = FourierExpr::from_json(
        &g,
        r#"{"terms":[{"path":"v","re":"-1"},{"path":"l","re":"1"},{"path":"e","re":"-3"},{"path":"e","star":true,"re":"2"}]}"#,
    )
    .unwrap();
    let vs = VertexSet::from_names(&g, &["v", "v1", "v2"]).unwrap();
    let (v1, v2) = (g.vertex("v1").unwrap(), g.vertex("v2").unwrap());

    println!("a            {}", a.display(&g));
    println!("diag         {}", diagonal_compress(&a, &vs).display(&g));
    println!("offdiag v1v2 {}", off_diagonal_compress(&a, v1, v2).unwrap().display(&g));
    let pc = projection_compress(&a, &vs);
    println!("P a P        {}", pc.full.display(&g));

    let verdict = freeness_sufficient(&g, FreenessQuery::Elements { a: &pc.diag, b: &pc.offdiag });
    println!("diag vs offdiag: {verdict}");

    let samples = DiagonalSamples::standard(&g, 3);
    for m in Model::ALL {
        let r = CumulantEngine::new(&g, m)
            .mixed_cumulants_vanish(&pc.diag, &pc.offdiag, 3, &samples, Alphabet::WithAdjoints)
            .unwrap();
        println!("{m}: {} mixed cumulants checked, vanish = {}", r.checked, r.vanish);
        match cumulant_equality_check(&g, &a, &vs, 3, &samples, m).unwrap() {
            None => println!("{m}: k_n(PaP) = k_n(diag) for n <= 3"),
            Some(w) => println!(
                "{m}: k_{}(PaP) = {} but k_{}(diag) = {}",
                w.n,
                w.compressed.display(&g),
                w.n,
                w.expected.display(&g)
            ),
        }
    }
}
