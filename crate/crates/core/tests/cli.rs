use std::fs;
use std::path::PathBuf;

use graphfp::cli::{run, EXIT_OK, EXIT_USAGE};
use graphfp::graph::fixtures;
use graphfp::FourierExpr;
use tempfile::TempDir;

const G1: &str = r#"{"vertices":["v"],"edges":[{"id":"l","src":"v","rng":"v"}]}"#;
const G2: &str = r#"{"vertices":["v1","v2"],"edges":[{"id":"e","src":"v1","rng":"v2"}]}"#;
const SEMICIRCLE: &str = r#"{"terms":[{"path":"l","re":"1"},{"path":"l","star":true,"re":"1"}]}"#;
const EDGE_ELEMENT: &str =
    r#"{"terms":[{"path":"v1","re":"2"},{"path":"e","re":"1"},{"path":"e","star":true,"re":"1/2"}]}"#;

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        let f = Files {
            dir: TempDir::new().unwrap(),
        };
        f.write("g1.json", G1);
        f.write("g2.json", G2);
        f.write("s.json", SEMICIRCLE);
        f.write("a.json", EDGE_ELEMENT);
        f
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn run(&self, args: &[&str]) -> (i32, String, String) {
        let mut full = vec!["graphfp".to_string()];
        for a in args {
            full.push(match a.strip_prefix('@') {
                Some(name) => self.arg(name),
                None => a.to_string(),
            });
        }
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }
}

#[test]
fn offdiag_writes_element_json() {
    let f = Files::new();
    let (code, out, _) = f.run(&["compress", "offdiag", "-g", "@g2.json", "-a", "@a.json", "v1", "v2"]);
    assert_eq!(code, EXIT_OK);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(
        doc,
        serde_json::json!({"terms": [{"path": "e", "star": false, "re": "1", "im": "0"}]})
    );
}

#[test]
fn compressed_output_parses_as_element() {
    let f = Files::new();
    let (code, out, _) = f.run(&["compress", "diag", "-g", "@g2.json", "-a", "@a.json", "v1", "v2"]);
    assert_eq!(code, EXIT_OK);
    let g = fixtures::g2();
    let parsed = FourierExpr::from_json(&g, &out).unwrap();
    assert_eq!(parsed, FourierExpr::from_json(&g, r#"{"terms":[{"path":"v1","re":"2"}]}"#).unwrap());
}

#[test]
fn projection_onto_one_vertex() {
    let f = Files::new();
    let (code, out, _) = f.run(&[
        "compress", "proj", "-g", "@g2.json", "-a", "@a.json", "--format", "text", "v1",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "full     2L[v1]\ndiag     2L[v1]\noffdiag  0\n");
}

#[test]
fn semicircle_cumulants_in_both_models() {
    let f = Files::new();
    let (code, out, _) = f.run(&["cumulants", "-g", "@g1.json", "-a", "@s.json", "--model", "both"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out,
        "# cumulants (ck)\n  1  0\n  2  2L[v]\n  3  0\n  4  -2L[v]\n\
         # cumulants (toeplitz)\n  1  0\n  2  L[v]\n  3  0\n  4  0\n"
    );
}

#[test]
fn moments_as_json() {
    let f = Files::new();
    let (code, out, _) = f.run(&[
        "moments", "-g", "@g1.json", "-a", "@s.json", "--model", "toeplitz", "-n", "4", "--format", "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let values = &doc[0]["values"];
    assert_eq!(values[1]["v"]["re"], "1");
    assert_eq!(values[3]["v"]["re"], "2");
    assert_eq!(values[0], serde_json::json!({}));
}

#[test]
fn reduce_compares_models_and_fock_space() {
    let f = Files::new();
    let (code, out, _) = f.run(&["reduce", "-g", "@g2.json", "L[e] L*[e]", "--model", "both", "--depth", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("ck       L[v1]  E = L[v1]"), "{out}");
    assert!(out.contains("toeplitz L[e] L*[e]  E = 0"), "{out}");
    assert!(out.contains("fock     E = 0"), "{out}");
}

#[test]
fn free_reports_a_witness() {
    let f = Files::new();
    let (code, out, _) = f.run(&["free", "-g", "@g1.json", "-a", "@s.json", "-a", "@s.json", "--model", "toeplitz"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("support criterion: unknown"), "{out}");
    assert!(out.contains("toeplitz: not free, k_2(a, b) = L[v]"), "{out}");
}

#[test]
fn verify_with_user_graph_exits_zero() {
    let f = Files::new();
    let (code, out, _) = f.run(&["verify", "-g", "@g2.json"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(!out.contains("FAIL"), "{out}");
}

#[test]
fn verify_both_models_reports_divergence() {
    let f = Files::new();
    let (code, out, _) = f.run(&["verify", "--model", "both", "-n", "3"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("INFO"), "{out}");
}

#[test]
fn missing_file_is_a_usage_error() {
    let f = Files::new();
    let (code, _, err) = f.run(&["moments", "-g", "@nope.json", "-a", "@s.json"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("cannot read"), "{err}");
}

#[test]
fn unknown_vertex_is_a_usage_error() {
    let f = Files::new();
    let (code, _, err) = f.run(&["compress", "diag", "-g", "@g2.json", "-a", "@a.json", "v9"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("v9"), "{err}");
}

#[test]
fn order_above_limit_is_rejected() {
    let f = Files::new();
    let (code, _, err) = f.run(&["moments", "-g", "@g1.json", "-a", "@s.json", "-n", "11"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--n-max"), "{err}");
}

#[test]
fn malformed_element_is_a_usage_error() {
    let f = Files::new();
    f.write("bad.json", r#"{"terms":[{"path":"zz","re":"1"}]}"#);
    let (code, _, err) = f.run(&["moments", "-g", "@g1.json", "-a", "@bad.json"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bad.json"), "{err}");
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let f = Files::new();
    let (code, _, err) = f.run(&[]);
    assert_eq!(code, EXIT_USAGE);
    assert!(!err.is_empty());
}
