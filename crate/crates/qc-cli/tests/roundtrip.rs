use std::path::PathBuf;

use qc_cli::source::load;
use qc_cli::{parse_chor, parse_chor_type};
use qc_core::conformance::corpus;

fn programs() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn generated_terms_round_trip() {
    let (cases, _) = corpus(21, 400);
    for c in &cases {
        let u = c.universe();
        let names: Vec<&str> = u.iter().map(|s| s.as_str()).collect();
        let text = c.chor.to_string();
        let back = parse_chor(&text, &names).unwrap_or_else(|d| panic!("{d}\n{text}"));
        assert_eq!(back, c.chor, "{text}");
        let ty = c.ty.to_string();
        assert_eq!(parse_chor_type(&ty, &names).unwrap(), c.ty, "{ty}");
    }
}

#[test]
fn example_programs_round_trip() {
    let files = programs();
    assert!(files.len() >= 5);
    for f in files {
        let p = load(&f).unwrap_or_else(|e| panic!("{e}"));
        let locs = p.locations();
        let text = p.file.main.to_string();
        assert_eq!(parse_chor(&text, &locs).unwrap(), p.file.main, "{text}");
        assert_eq!(parse_chor_type(&p.ty.to_string(), &locs).unwrap(), p.ty);
    }
}
