//! Balanced, totally unimodular and totally balanced certificates for 0-1
//! matrices, and the hypergraph views of a market.

pub mod hypergraph;
pub mod matrix;

pub use hypergraph::{
    acceptable_set_hypergraph, check_hypergraph_balanced, check_odd_cycle_condition, find_tight_odd_cycle,
    firm_worker_hypergraph, CycleCertificate, HyperCycle, Hypergraph,
};
pub use matrix::{
    is_balanced, is_totally_balanced, is_totally_unimodular, render_certificate, Certificate, Witness,
    ZeroOneMatrix, DEFAULT_CAP,
};

use crate::bitset::WorkerSet;
use crate::error::Result;
use crate::model::Market;
use crate::prefs::primitive_acceptable_sets;

/// Matrix whose columns are the indicator vectors of `sets` over `ground`.
pub fn matrix_of_sets(sets: &[WorkerSet], ground: &[String]) -> Result<ZeroOneMatrix> {
    let labels = sets.iter().map(|s| format_over(*s, ground)).collect();
    ZeroOneMatrix::from_sets(sets, labels, ground)
}

fn format_over(s: WorkerSet, ground: &[String]) -> String {
    let names: Vec<&str> = s.iter().map(|i| ground.get(i).map_or("?", String::as_str)).collect();
    format!("{{{}}}", names.join(","))
}

fn dedup(sets: impl IntoIterator<Item = WorkerSet>) -> Vec<WorkerSet> {
    let mut out: Vec<WorkerSet> = Vec::new();
    for s in sets {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// Every firm's acceptable sets, deduplicated, firms in market order.
pub fn acceptable_sets_of(m: &Market) -> Vec<WorkerSet> {
    dedup(m.firm_ids().flat_map(|f| m.firm_pref(f).acceptable_sets()))
}

/// Every firm's primitive acceptable sets, deduplicated.
pub fn primitive_sets_of(m: &Market) -> Result<Vec<WorkerSet>> {
    let mut all = Vec::new();
    for f in m.firm_ids() {
        all.extend(primitive_acceptable_sets(m, f)?);
    }
    Ok(dedup(all))
}

pub fn acceptable_set_matrix(m: &Market) -> ZeroOneMatrix {
    matrix_of_sets(&acceptable_sets_of(m), m.workers()).expect("market sets are valid")
}

pub fn primitive_set_matrix(m: &Market) -> Result<ZeroOneMatrix> {
    matrix_of_sets(&primitive_sets_of(m)?, m.workers())
}

/// Rows are firms then workers; one column `{f} ∪ S` per acceptable set.
pub fn firm_worker_matrix(m: &Market) -> Result<ZeroOneMatrix> {
    firm_worker_hypergraph(m).map(|h| h.incidence_matrix())
}
