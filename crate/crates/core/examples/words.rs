//! Reduce a few words, show their lattice paths and compare against the
//! truncated Fock space.

use graphfp::fock::{required_depth, FockOracle};
use graphfp::graph::fixtures;
use graphfp::word::{lattice_path, parse_word, reduce};
use graphfp::{Evaluated, Model};

fn main() {
    let g = fixtures::two_loops_plus_edge();
    let words = ["L*[l1] L[l1]", "L[l1] L*[l1]", "L*[l1] L*[l2] L[l2] L[l1]", "L*[f] L[l1.f]", "L*[l1.f] L[l1] L[f]"];
    let mut oracle = FockOracle::new(&g, 4);
    for text in words {
        let w = parse_word(&g, text).unwrap();
        println!("{text}");
        println!("  heights {:?}  depth needed {}", lattice_path(&w).heights(), required_depth(&w));
        for m in Model::ALL {
            let e = Evaluated::from_word(&w, m).expectation();
            println!("  {:<9}{}  E = {}", m.name(), reduce(&w, m).display(&g), e.display(&g));
        }
        println!("  fock     E = {}", oracle.expectation(&w).unwrap().display(&g));
    }
}
