//! Complete backtracking search for a stable matching.
//!
//! Every stable matching gives each firm one of its acceptable sets or
//! nothing, so the search assigns firms in market order to one acceptable
//! set (best first) or to nothing (last), keeping the sets pairwise
//! disjoint. This is exactly one active sibling per firm of the
//! decomposition by acceptable sets. Stability is judged in the market
//! itself, so the search is complete for every preference class.

use crate::bitset::WorkerSet;
use crate::error::Result;
use crate::model::{Employer, FirmId, Market, Matching, WorkerId};

/// The first stable matching in search order, or `None` when the market
/// has no stable matching.
pub fn find_stable_matching(m: &Market) -> Result<Option<Matching>> {
    let options: Vec<Vec<WorkerSet>> = m
        .firm_ids()
        .map(|f| {
            m.firm_pref(f)
                .acceptable_sets()
                .into_iter()
                .filter(|s| s.iter().all(|w| m.finds_acceptable(WorkerId(w), f)))
                .collect()
        })
        .collect();
    let mut search = Search {
        m,
        options: &options,
        held: vec![WorkerSet::EMPTY; m.num_firms()],
        assignment: vec![Employer::Null; m.num_workers()],
        taken: WorkerSet::EMPTY,
    };
    match search.run(0) {
        Some(mu) => {
            debug_assert!(m.is_stable(&mu)?);
            Ok(Some(mu))
        }
        None => Ok(None),
    }
}

struct Search<'a> {
    m: &'a Market,
    options: &'a [Vec<WorkerSet>],
    held: Vec<WorkerSet>,
    assignment: Vec<Employer>,
    taken: WorkerSet,
}

impl Search<'_> {
    fn run(&mut self, i: usize) -> Option<Matching> {
        if i == self.options.len() {
            let mu = Matching::from_assignment(self.assignment.clone());
            return self.m.is_stable(&mu).ok()?.then_some(mu);
        }
        let choices = self.options[i]
            .iter()
            .copied()
            .filter(|s| s.is_disjoint(self.taken))
            .map(Some)
            .chain(std::iter::once(None));
        for choice in choices.collect::<Vec<_>>() {
            if let Some(s) = choice {
                self.take(i, s);
            }
            if !self.certainly_blocked(i) {
                if let Some(mu) = self.run(i + 1) {
                    return Some(mu);
                }
            }
            if let Some(s) = choice {
                self.release(i, s);
            }
        }
        None
    }

    fn take(&mut self, f: usize, s: WorkerSet) {
        self.held[f] = s;
        self.taken = self.taken | s;
        for w in s.iter() {
            self.assignment[w] = Employer::Firm(FirmId(f));
        }
    }

    fn release(&mut self, f: usize, s: WorkerSet) {
        self.held[f] = WorkerSet::EMPTY;
        self.taken = self.taken - s;
        for w in s.iter() {
            self.assignment[w] = Employer::Null;
        }
    }

    /// Some decided firm `g ≤ i` has an option it prefers to its current
    /// holding whose workers will join it however firms after `i` are
    /// decided: assigned workers already weakly prefer `g`, unassigned ones
    /// prefer `g` to the null firm and to every later firm that could
    /// still hire them.
    fn certainly_blocked(&self, i: usize) -> bool {
        let m = self.m;
        (0..=i).any(|g| {
            let pref = m.firm_pref(FirmId(g));
            let gf = Employer::Firm(FirmId(g));
            self.options[g].iter().take_while(|a| pref.prefers(**a, self.held[g])).any(|a| {
                a.iter().all(|w| {
                    let wid = WorkerId(w);
                    match self.assignment[w] {
                        Employer::Firm(h) if h.0 <= i => m.prefers_weakly(wid, gf, Employer::Firm(h)),
                        _ => (i + 1..self.options.len()).all(|h| {
                            !self.options[h].iter().any(|s| s.contains(w))
                                || m.prefers(wid, gf, Employer::Firm(FirmId(h)))
                        }),
                    }
                })
            })
        })
    }
}
