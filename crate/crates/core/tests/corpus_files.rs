use std::path::PathBuf;

use compmatch::io::{market_to_json, parse_market};
use compmatch::{corpus, BigFractional, Fractional, TechnologyTree};

fn read(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn market_files_match_the_built_in_corpus() {
    for (name, m) in corpus::markets() {
        let text = read(&format!("{name}.market"));
        let parsed = parse_market(&text).unwrap();
        assert_eq!(parsed, m, "{name}");
        assert_eq!(market_to_json(&parsed), text, "{name} is not in canonical form");
        assert_eq!(parse_market(&market_to_json(&parsed)).unwrap(), parsed, "{name}");
    }
}

#[test]
fn tree_files_match_the_built_in_corpus() {
    for (name, t) in corpus::trees() {
        let text = read(&format!("{name}.tree"));
        let parsed = TechnologyTree::parse(&text).unwrap();
        assert_eq!(parsed, t, "{name}");
        assert_eq!(TechnologyTree::parse(&parsed.to_outline()).unwrap(), parsed, "{name}");
        assert_eq!(TechnologyTree::parse(&parsed.to_json()).unwrap(), parsed, "{name}");
    }
}

#[test]
fn fractional_file_matches_the_built_in_corpus() {
    let m = corpus::three_set_firm_split();
    let text = read("half_integral.frac");
    let fm = Fractional::parse(&text, &m).unwrap();
    assert_eq!(fm, corpus::half_integral());
    assert_eq!(Fractional::parse(&fm.render(&m), &m).unwrap(), fm);
    let big = BigFractional::parse(&text, &m).unwrap();
    assert_eq!(big.render(&m), fm.render(&m));
}
