//! Hypergraph views of a market and the odd-cycle condition.
//!
//! A cycle `(v1, E1, v2, E2, ..., vk, Ek, v1)` uses distinct vertices and
//! distinct edges with `vi, vi+1 ∈ Ei`. The hypergraph is balanced when
//! every odd cycle has an edge holding at least three of its vertices, so a
//! violation is an odd cycle whose edges each meet the cycle in exactly two
//! vertices.

use serde::Serialize;

use crate::balance::matrix::ZeroOneMatrix;
use crate::bitset::{IndexSet, MAX_AGENTS};
use crate::error::{Error, Result};
use crate::model::Market;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: Vec<String>,
    edges: Vec<(String, IndexSet)>,
}

impl Hypergraph {
    /// Builds a hypergraph; edges with identical vertex sets are merged
    /// (the first label wins).
    pub fn new(vertices: Vec<String>, edges: Vec<(String, IndexSet)>) -> Result<Self> {
        if vertices.len() > MAX_AGENTS {
            return Err(Error::TooManyAgents(vertices.len()));
        }
        let all = IndexSet::full(vertices.len());
        let mut kept: Vec<(String, IndexSet)> = Vec::new();
        for (label, e) in edges {
            if !e.is_subset(all) {
                return Err(Error::InvalidArgument(format!("edge `{label}` has unknown vertices")));
            }
            if !kept.iter().any(|(_, k)| *k == e) {
                kept.push((label, e));
            }
        }
        Ok(Hypergraph { vertices, edges: kept })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(String, IndexSet)] {
        &self.edges
    }

    pub fn format_edge(&self, e: IndexSet) -> String {
        let names: Vec<&str> = e.iter().map(|i| self.vertices[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Vertex-by-edge incidence matrix.
    pub fn incidence_matrix(&self) -> ZeroOneMatrix {
        let sets: Vec<IndexSet> = self.edges.iter().map(|(_, e)| *e).collect();
        let labels = self.edges.iter().map(|(l, _)| l.clone()).collect();
        ZeroOneMatrix::from_sets(&sets, labels, &self.vertices).expect("edges lie in the vertex set")
    }
}

/// Workers as vertices, every acceptable set of size at least two as an
/// edge.
pub fn acceptable_set_hypergraph(m: &Market) -> Hypergraph {
    let mut edges = Vec::new();
    for f in m.firm_ids() {
        for s in m.firm_pref(f).acceptable_sets() {
            if s.len() >= 2 {
                edges.push((m.format_set(s), s));
            }
        }
    }
    Hypergraph::new(m.workers().to_vec(), edges).expect("market sets are valid")
}

/// Firms and workers as vertices; each acceptable set `S` of `f`
/// contributes the edge `{f} ∪ S`. Firm vertices come first.
pub fn firm_worker_hypergraph(m: &Market) -> Result<Hypergraph> {
    let nf = m.num_firms();
    let mut vertices: Vec<String> = m.firms().to_vec();
    vertices.extend(m.workers().iter().cloned());
    if vertices.len() > MAX_AGENTS {
        return Err(Error::TooManyAgents(vertices.len()));
    }
    let mut edges = Vec::new();
    for f in m.firm_ids() {
        for s in m.firm_pref(f).acceptable_sets() {
            let e = IndexSet::from_bits(s.bits() << nf).with(f.0);
            edges.push((format!("{}:{}", m.firm_name(f), m.format_set(s)), e));
        }
    }
    Hypergraph::new(vertices, edges)
}

/// `vertices[i], vertices[i+1] ∈ edges[i]`, indices wrapping around.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperCycle {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl HyperCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_set(&self) -> IndexSet {
        self.vertices.iter().copied().collect()
    }

    /// Checks the cycle conditions against `h`, and that every edge meets
    /// the cycle in exactly two vertices.
    pub fn is_tight_cycle_of(&self, h: &Hypergraph) -> bool {
        let k = self.vertices.len();
        if k < 2 || self.edges.len() != k {
            return false;
        }
        let vs = self.vertex_set();
        if vs.len() != k || self.edges.iter().any(|&e| e >= h.edges.len()) {
            return false;
        }
        let mut seen = self.edges.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != k {
            return false;
        }
        (0..k).all(|i| {
            let e = h.edges[self.edges[i]].1;
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % k]);
            e.contains(a) && e.contains(b) && (e & vs).len() == 2
        })
    }

    pub fn render(&self, h: &Hypergraph) -> String {
        let mut parts = Vec::new();
        for (v, e) in self.vertices.iter().zip(&self.edges) {
            parts.push(h.vertices[*v].clone());
            parts.push(h.format_edge(h.edges[*e].1));
        }
        parts.push(h.vertices[self.vertices[0]].clone());
        format!("({})", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CycleCertificate {
    Holds,
    Violated(HyperCycle),
}

impl CycleCertificate {
    pub fn holds(&self) -> bool {
        matches!(self, CycleCertificate::Holds)
    }
}

/// First odd cycle (by smallest starting vertex, then edge order) whose
/// edges each contain exactly two cycle vertices.
pub fn find_tight_odd_cycle(h: &Hypergraph) -> Option<HyperCycle> {
    for start in 0..h.vertices.len() {
        let mut path = Search {
            h,
            start,
            vertices: vec![start],
            edges: Vec::new(),
            on_path: IndexSet::singleton(start),
            covered: IndexSet::EMPTY,
        };
        if let Some(c) = path.extend() {
            return Some(c);
        }
    }
    None
}

struct Search<'a> {
    h: &'a Hypergraph,
    start: usize,
    vertices: Vec<usize>,
    edges: Vec<usize>,
    on_path: IndexSet,
    // union of the edges used so far
    covered: IndexSet,
}

impl Search<'_> {
    fn extend(&mut self) -> Option<HyperCycle> {
        let last = *self.vertices.last().expect("path is nonempty");
        for (ei, &(_, e)) in self.h.edges.iter().enumerate() {
            if !e.contains(last) || self.edges.contains(&ei) {
                continue;
            }
            let meets = e & self.on_path;
            // closing edge: touches exactly the two path ends
            let k = self.vertices.len();
            if k >= 3 && k % 2 == 1 && meets == IndexSet::singleton(last).with(self.start) {
                let mut edges = self.edges.clone();
                edges.push(ei);
                return Some(HyperCycle { vertices: self.vertices.clone(), edges });
            }
            if meets != IndexSet::singleton(last) {
                continue;
            }
            // next vertex: larger than the start (canonical rotation) and in
            // no earlier edge, so earlier edges keep exactly two cycle vertices
            for next in (e - self.on_path - self.covered).iter() {
                if next <= self.start {
                    continue;
                }
                self.vertices.push(next);
                self.edges.push(ei);
                self.on_path.insert(next);
                let saved = self.covered;
                self.covered = self.covered | e;
                let found = self.extend();
                self.covered = saved;
                self.on_path.remove(next);
                self.edges.pop();
                self.vertices.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
}

/// Every odd cycle of the hypergraph has an edge containing at least three
/// of its vertices.
pub fn check_odd_cycle_condition(h: &Hypergraph) -> CycleCertificate {
    match find_tight_odd_cycle(h) {
        Some(c) => CycleCertificate::Violated(c),
        None => CycleCertificate::Holds,
    }
}

/// Balance of an arbitrary hypergraph, e.g. the firm-worker hypergraph.
pub fn check_hypergraph_balanced(h: &Hypergraph) -> CycleCertificate {
    check_odd_cycle_condition(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::matrix::{is_balanced, DEFAULT_CAP};
    use crate::corpus;
    use proptest::prelude::*;

    fn names(h: &Hypergraph, c: &HyperCycle) -> Vec<String> {
        c.vertices.iter().map(|&v| h.vertices()[v].clone()).collect()
    }

    #[test]
    fn triangle_market_fails_with_its_triangle() {
        let h = acceptable_set_hypergraph(&corpus::triangle());
        assert_eq!(h.edges().len(), 3);
        match check_odd_cycle_condition(&h) {
            CycleCertificate::Violated(c) => {
                assert_eq!(names(&h, &c), ["w1", "w2", "w3"]);
                assert!(c.is_tight_cycle_of(&h));
            }
            CycleCertificate::Holds => panic!("expected a witness"),
        }
    }

    #[test]
    fn covered_odd_cycle_passes() {
        let h = acceptable_set_hypergraph(&corpus::covered_odd_cycle());
        assert_eq!(h.edges().len(), 5);
        assert!(check_odd_cycle_condition(&h).holds());
        let h8 = acceptable_set_hypergraph(&corpus::balanced_not_unimodular());
        assert!(check_odd_cycle_condition(&h8).holds());
        let h14 = acceptable_set_hypergraph(&corpus::additive_overlap());
        assert_eq!(h14.edges().len(), 4);
    }

    #[test]
    fn firm_worker_hypergraph_of_two_firm_market() {
        let h = firm_worker_hypergraph(&corpus::firm_worker_cycle()).unwrap();
        let edges: Vec<String> = h.edges().iter().map(|(_, e)| h.format_edge(*e)).collect();
        assert_eq!(edges, ["{f1,w1,w2}", "{f2,w1}", "{f2,w2}"]);
        match check_hypergraph_balanced(&h) {
            CycleCertificate::Violated(c) => {
                assert_eq!(c.len(), 3);
                assert!(c.is_tight_cycle_of(&h));
            }
            CycleCertificate::Holds => panic!("expected a witness"),
        }
        let h3 = firm_worker_hypergraph(&corpus::triangle()).unwrap();
        assert!(h3.edges().iter().all(|(_, e)| e.len() == 3));
    }

    #[test]
    fn edgeless_and_singletons() {
        let h = Hypergraph::new(vec!["a".into()], vec![]).unwrap();
        assert!(check_hypergraph_balanced(&h).holds());
        let m = Market::builder().workers(["w1", "w2"]).firm("f", &[&["w1"][..], &["w2"]]).build().unwrap();
        assert!(acceptable_set_hypergraph(&m).edges().is_empty());
    }

    #[test]
    fn edges_deduplicate_by_content() {
        let s = IndexSet::from_bits(0b11);
        let h =
            Hypergraph::new(vec!["a".into(), "b".into()], vec![("x".into(), s), ("y".into(), s)]).unwrap();
        assert_eq!(h.edges().len(), 1);
    }

    fn small_hypergraph() -> impl Strategy<Value = Hypergraph> {
        (2usize..6).prop_flat_map(|n| {
            proptest::collection::vec(1u64..(1 << n), 0..6).prop_map(move |es| {
                let vs = (0..n).map(|i| format!("v{i}")).collect();
                let edges = es
                    .into_iter()
                    .enumerate()
                    .map(|(i, b)| (format!("e{i}"), IndexSet::from_bits(b)))
                    .collect();
                Hypergraph::new(vs, edges).unwrap()
            })
        })
    }

    proptest! {
        // the hypergraph is balanced exactly when its incidence matrix is
        #[test]
        fn agrees_with_incidence_matrix(h in small_hypergraph()) {
            let by_cycles = check_hypergraph_balanced(&h);
            let by_matrix = is_balanced(&h.incidence_matrix(), DEFAULT_CAP);
            prop_assert_eq!(by_cycles.holds(), by_matrix.holds());
            if let CycleCertificate::Violated(c) = by_cycles {
                prop_assert!(c.is_tight_cycle_of(&h));
                prop_assert!(c.len() % 2 == 1);
            }
        }
    }
}
