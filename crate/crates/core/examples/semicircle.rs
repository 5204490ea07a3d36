//! Moments and cumulants of `L_l + L_l*` on a single loop, in both models.

use graphfp::graph::fixtures;
use graphfp::{CumulantEngine, FourierExpr, Model};

fn main() {
    let g = fixtures::g1();
    let l = g.parse_path("l").unwrap();
    let s = FourierExpr::symmetric(&l);
    println!("a = {}", s.display(&g));
    for m in Model::ALL {
        let eng = CumulantEngine::new(&g, m);
        let moments = eng.moment_table(&s, 6);
        let cumulants = eng.cumulant_table(&s, 6).unwrap();
        println!("{m}");
        for (n, (e, k)) in moments.iter().zip(&cumulants).enumerate() {
            println!("  n={}  E = {:<8} k = {}", n + 1, e.display(&g).to_string(), k.display(&g));
        }
    }
}
