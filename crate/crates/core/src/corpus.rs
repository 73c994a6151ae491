//! The worked example markets, trees and fractional matching, as
//! constructors. The same data ships as files under `corpus/`.
//!
//! Profiles that come without worker preferences are built with empty
//! worker lists.

use num_rational::Rational64;

use crate::model::Market;
use crate::solver::FractionalMatching;
use crate::techtree::TechnologyTree;

const W3: [&str; 3] = ["w1", "w2", "w3"];
const W4: [&str; 4] = ["w1", "w2", "w3", "w4"];

/// Three firms each wanting a pair of workers in a triangle; no stable
/// matching exists.
pub fn triangle() -> Market {
    Market::builder()
        .workers(W3)
        .firm("f1", &[&["w1", "w2"]])
        .firm("f2", &[&["w2", "w3"]])
        .firm("f3", &[&["w1", "w3"]])
        .prefs("w1", &["f1", "f3"])
        .prefs("w2", &["f2", "f1"])
        .prefs("w3", &["f3", "f2"])
        .build()
        .expect("triangle")
}

/// Complementary profile whose only odd cycle is covered by a large set.
pub fn covered_odd_cycle() -> Market {
    Market::builder()
        .workers(["w1", "w2", "w3", "w4", "w5", "w6"])
        .firm("f1", &[&["w1", "w2", "w3"]])
        .firm("f2", &[&["w1", "w2"][..], &["w1"]])
        .firm("f3", &[&["w2", "w3"][..], &["w2"]])
        .firm("f4", &[&["w3", "w4"][..], &["w3"]])
        .firm("f5", &[&["w4", "w5", "w6"]])
        .build()
        .expect("covered_odd_cycle")
}

/// Acceptable sets are totally unimodular but the demand type is not.
pub fn unimodular_sets() -> Market {
    Market::builder()
        .workers(W3)
        .firm("f1", &[&["w1", "w2", "w3"][..], &["w3"]])
        .firm("f2", &[&["w1", "w3"]])
        .firm("f3", &[&["w2", "w3"]])
        .build()
        .expect("unimodular_sets")
}

/// Balanced but not totally unimodular acceptable sets.
pub fn balanced_not_unimodular() -> Market {
    Market::builder()
        .workers(W4)
        .firm("f1", &[&["w1", "w2", "w3", "w4"][..], &["w1", "w2"]])
        .firm("f2", &[&["w1", "w3"][..], &["w3"]])
        .firm("f3", &[&["w1", "w4"][..], &["w4"]])
        .build()
        .expect("balanced_not_unimodular")
}

/// Market used to illustrate decomposition by acceptable sets.
pub fn three_set_firm() -> Market {
    Market::builder()
        .workers(W4)
        .firm("f1", &[&["w1", "w2", "w3"][..], &["w1"], &["w2", "w3"]])
        .firm("f2", &[&["w2", "w3", "w4"]])
        .prefs("w1", &["f1"])
        .prefs("w2", &["f1", "f2"])
        .prefs("w3", &["f2", "f1"])
        .prefs("w4", &["f2"])
        .build()
        .expect("three_set_firm")
}

/// The decomposed form of [`three_set_firm`].
pub fn three_set_firm_split() -> Market {
    Market::builder()
        .workers(W4)
        .firm("f1#1", &[&["w1", "w2", "w3"]])
        .firm("f1#2", &[&["w1"]])
        .firm("f1#3", &[&["w2", "w3"]])
        .firm("f2", &[&["w2", "w3", "w4"]])
        .prefs("w1", &["f1#1", "f1#2", "f1#3"])
        .prefs("w2", &["f1#1", "f1#2", "f1#3", "f2"])
        .prefs("w3", &["f2", "f1#1", "f1#2", "f1#3"])
        .prefs("w4", &["f2"])
        .build()
        .expect("three_set_firm_split")
}

/// [`triangle`] with `f1` no longer treating its two workers as complements.
pub fn relaxed_triangle() -> Market {
    Market::builder()
        .workers(W3)
        .firm("f1", &[&["w1", "w2"][..], &["w1"], &["w2"]])
        .firm("f2", &[&["w2", "w3"]])
        .firm("f3", &[&["w1", "w3"]])
        .prefs("w1", &["f1", "f3"])
        .prefs("w2", &["f2", "f1"])
        .prefs("w3", &["f3", "f2"])
        .build()
        .expect("relaxed_triangle")
}

/// Two firms illustrating complementarity graphs and primitive sets.
pub fn primitive_sets() -> Market {
    Market::builder()
        .workers(W3)
        .firm("f1", &[&["w1", "w2", "w3"][..], &["w1", "w2"], &["w3"]])
        .firm("f2", &[&["w1", "w2", "w3"][..], &["w1", "w2"], &["w1"], &["w2"]])
        .build()
        .expect("primitive_sets")
}

/// Additive but not complementary preferences.
pub fn additive_overlap() -> Market {
    Market::builder()
        .workers(W4)
        .firm("f1", &[&["w1", "w2"][..], &["w2", "w3"]])
        .firm("f2", &[&["w1", "w2", "w3", "w4"][..], &["w1", "w2"], &["w2", "w3"], &["w3", "w4"]])
        .build()
        .expect("additive_overlap")
}

/// Profile whose primitive sets come from [`nested_tree`].
pub fn tree_profile() -> Market {
    Market::builder()
        .workers(["w1", "w2", "w3", "w4", "w5"])
        .firm("f1", &[&["w1", "w2", "w3", "w4"][..], &["w1", "w2"], &["w3", "w4"]])
        .firm("f2", &[&["w3", "w4", "w5"][..], &["w3", "w4"]])
        .build()
        .expect("tree_profile")
}

/// Two firms, two workers, an unbalanced firm-worker hypergraph and no
/// stable matching.
pub fn firm_worker_cycle() -> Market {
    Market::builder()
        .workers(["w1", "w2"])
        .firm("f1", &[&["w1", "w2"]])
        .firm("f2", &[&["w1"][..], &["w2"]])
        .prefs("w1", &["f1", "f2"])
        .prefs("w2", &["f2", "f1"])
        .build()
        .expect("firm_worker_cycle")
}

/// Every corpus market with its file stem.
pub fn markets() -> Vec<(&'static str, Market)> {
    vec![
        ("triangle", triangle()),
        ("covered_odd_cycle", covered_odd_cycle()),
        ("unimodular_sets", unimodular_sets()),
        ("balanced_not_unimodular", balanced_not_unimodular()),
        ("three_set_firm", three_set_firm()),
        ("three_set_firm_split", three_set_firm_split()),
        ("relaxed_triangle", relaxed_triangle()),
        ("primitive_sets", primitive_sets()),
        ("additive_overlap", additive_overlap()),
        ("tree_profile", tree_profile()),
        ("firm_worker_cycle", firm_worker_cycle()),
    ]
}

/// Tree with children `{w1,w2}`, `{w2,w3}`, `{w3,w4}` under the root and
/// `{w3,w4,w5}` under the third.
pub fn nested_tree() -> TechnologyTree {
    TechnologyTree::parse_outline(
        "v0: {}\n  v1: {w1, w2}\n  v2: {w2, w3}\n  v3: {w3, w4}\n    v5: {w3, w4, w5}\n",
    )
    .expect("nested tree")
}

/// Star tree inducing [`triangle`]; violates the neighbour condition.
pub fn triangle_tree() -> TechnologyTree {
    TechnologyTree::parse_outline("v0: {}\n  v1: {w1, w2}\n  v2: {w2, w3}\n  v3: {w1, w3}\n")
        .expect("triangle tree")
}

/// Tree inducing [`unimodular_sets`].
pub fn unimodular_tree() -> TechnologyTree {
    TechnologyTree::parse_outline(
        "workers: w1 w2 w3\nv0: {}\n  v1: {w3}\n    v2: {w1, w3}\n    v3: {w1, w2, w3}\n    v4: {w2, w3}\n",
    )
    .expect("unimodular_sets tree")
}

pub fn trees() -> Vec<(&'static str, TechnologyTree)> {
    vec![("nested", nested_tree()), ("triangle", triangle_tree()), ("unimodular_sets", unimodular_tree())]
}

/// The half-integral stable fractional matching on [`three_set_firm_split`].
pub fn half_integral() -> FractionalMatching<Rational64> {
    let half = Rational64::new(1, 2);
    let zero = Rational64::from_integer(0);
    FractionalMatching::new(vec![half, half, zero, half], vec![zero, zero, zero, half])
}
