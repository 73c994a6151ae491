//! Brute-force ground truth: every stable matching of a market, and sweeps
//! over worker preference profiles.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bitset::WorkerSet;
use crate::error::{Error, Result};
use crate::model::{Employer, FirmId, Market, Matching, WorkerId};
use crate::prefs::{decompose_by_components, lift_matching};
use crate::solver::find_stable_matching;

pub const MAX_ORACLE_WORKERS: usize = 10;
pub const MAX_ORACLE_FIRMS: usize = 8;
/// Profiles enumerated exhaustively before a sweep must sample.
pub const MAX_SWEEP_PROFILES: u64 = 10_000_000;

/// Every stable matching, in canonical order: workers in order, each tried
/// at their acceptable firms in market order and at the null firm last.
pub fn all_stable_matchings(m: &Market) -> Result<Vec<Matching>> {
    if m.num_workers() > MAX_ORACLE_WORKERS || m.num_firms() > MAX_ORACLE_FIRMS {
        return Err(Error::BudgetExceeded(format!(
            "oracle handles at most {MAX_ORACLE_WORKERS} workers and {MAX_ORACLE_FIRMS} firms, got {} and {}",
            m.num_workers(),
            m.num_firms()
        )));
    }
    let choices: Vec<Vec<Employer>> = m
        .worker_ids()
        .map(|w| {
            m.firm_ids()
                .filter(|&f| m.finds_acceptable(w, f))
                .map(Employer::Firm)
                .chain(std::iter::once(Employer::Null))
                .collect()
        })
        .collect();
    // a firm's partial holding must stay inside one of its acceptable sets
    let acceptable: Vec<Vec<WorkerSet>> = m.firm_ids().map(|f| m.firm_pref(f).acceptable_sets()).collect();
    let mut out = Vec::new();
    let mut assignment = vec![Employer::Null; m.num_workers()];
    let mut held = vec![WorkerSet::EMPTY; m.num_firms()];
    enumerate(m, &choices, &acceptable, 0, &mut assignment, &mut held, &mut out)?;
    Ok(out)
}

fn enumerate(
    m: &Market,
    choices: &[Vec<Employer>],
    acceptable: &[Vec<WorkerSet>],
    w: usize,
    assignment: &mut Vec<Employer>,
    held: &mut Vec<WorkerSet>,
    out: &mut Vec<Matching>,
) -> Result<()> {
    if w == choices.len() {
        let mu = Matching::from_assignment(assignment.clone());
        if m.is_stable(&mu)? {
            out.push(mu);
        }
        return Ok(());
    }
    for &e in &choices[w] {
        if let Employer::Firm(f) = e {
            let next = held[f.0].with(w);
            if !acceptable[f.0].iter().any(|s| next.is_subset(*s)) {
                continue;
            }
            held[f.0] = next;
        }
        assignment[w] = e;
        enumerate(m, choices, acceptable, w + 1, assignment, held, out)?;
        if let Employer::Firm(f) = e {
            held[f.0].remove(w);
        }
    }
    assignment[w] = Employer::Null;
    Ok(())
}

/// Firms that can ever employ `w`: those with an acceptable set containing
/// `w`. How `w` ranks any other firm cannot affect stability.
pub fn relevant_firms(m: &Market, w: WorkerId) -> Vec<FirmId> {
    m.firm_ids().filter(|&f| m.firm_pref(f).acceptable_sets().iter().any(|s| s.contains(w.0))).collect()
}

/// All strict lists over `firms`: every ordered selection, the empty list
/// included when `truncations` is set, otherwise only full rankings.
pub fn preference_lists(firms: &[FirmId], truncations: bool) -> Vec<Vec<FirmId>> {
    use itertools::Itertools;
    let lengths: Vec<usize> = if truncations { (0..=firms.len()).collect() } else { vec![firms.len()] };
    lengths.into_iter().flat_map(|k| firms.iter().copied().permutations(k)).collect()
}

fn with_worker_prefs(m: &Market, prefs: Vec<Vec<FirmId>>) -> Result<Market> {
    Market::new(m.workers().to_vec(), m.firms().to_vec(), prefs, m.firm_prefs().to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepSolver {
    /// Direct search on the market itself.
    Direct,
    /// Search the decomposition by complementarity components and lift;
    /// a profile counts only if the decomposed market has a stable
    /// matching whose lift is stable.
    Components,
    /// The brute-force oracle.
    Oracle,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub truncations: bool,
    pub solver: SweepSolver,
    /// Sample this many profiles (with the seed) when the space exceeds
    /// `max_profiles`; without it an oversized space is an error.
    pub sample: Option<(u64, u64)>,
    pub max_profiles: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            truncations: true,
            solver: SweepSolver::Direct,
            sample: None,
            max_profiles: MAX_SWEEP_PROFILES,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub total_profiles: u128,
    pub checked: u64,
    pub exhaustive: bool,
    /// Worker lists (by firm name) of the first profile without a stable
    /// matching.
    pub counterexample: Option<Vec<(String, Vec<String>)>>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Size of the worker-preference space of `m`'s firm profile.
pub fn profile_space(m: &Market, truncations: bool) -> u128 {
    m.worker_ids().map(|w| preference_lists(&relevant_firms(m, w), truncations).len() as u128).product()
}

/// Checks that a stable matching exists for every worker preference
/// profile over the firms' profile in `m` (its worker lists are ignored).
pub fn exists_for_all_worker_prefs(m: &Market, opts: &SweepOptions) -> Result<SweepReport> {
    let lists: Vec<Vec<Vec<FirmId>>> =
        m.worker_ids().map(|w| preference_lists(&relevant_firms(m, w), opts.truncations)).collect();
    let total: u128 = lists.iter().map(|l| l.len() as u128).product();
    let has_stable = |prefs: Vec<Vec<FirmId>>| -> Result<bool> {
        let market = with_worker_prefs(m, prefs)?;
        Ok(match opts.solver {
            SweepSolver::Direct => match find_stable_matching(&market)? {
                Some(mu) => market.is_stable(&mu)?,
                None => false,
            },
            SweepSolver::Components => {
                let d = decompose_by_components(&market)?;
                match find_stable_matching(&d.market)? {
                    Some(mu) => market.is_stable(&lift_matching(&mu, &d)?)?,
                    None => false,
                }
            }
            SweepSolver::Oracle => !all_stable_matchings(&market)?.is_empty(),
        })
    };
    let counterexample = |prefs: &[Vec<FirmId>]| -> Vec<(String, Vec<String>)> {
        m.worker_ids()
            .map(|w| {
                (
                    m.worker_name(w).to_string(),
                    prefs[w.0].iter().map(|f| m.firm_name(*f).to_string()).collect(),
                )
            })
            .collect()
    };
    if total <= opts.max_profiles as u128 {
        let mut idx = vec![0usize; lists.len()];
        let mut checked = 0u64;
        loop {
            let prefs: Vec<Vec<FirmId>> = idx.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect();
            checked += 1;
            if !has_stable(prefs.clone())? {
                return Ok(SweepReport {
                    total_profiles: total,
                    checked,
                    exhaustive: true,
                    counterexample: Some(counterexample(&prefs)),
                });
            }
            // odometer, last worker fastest
            let mut k = lists.len();
            loop {
                if k == 0 {
                    return Ok(SweepReport {
                        total_profiles: total,
                        checked,
                        exhaustive: true,
                        counterexample: None,
                    });
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < lists[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    let Some((count, seed)) = opts.sample else {
        return Err(Error::BudgetExceeded(format!(
            "{total} worker preference profiles exceed {} and sampling is off",
            opts.max_profiles
        )));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let prefs: Vec<Vec<FirmId>> =
            lists.iter().map(|l| l.choose(&mut rng).cloned().unwrap_or_default()).collect();
        if !has_stable(prefs.clone())? {
            return Ok(SweepReport {
                total_profiles: total,
                checked: i + 1,
                exhaustive: false,
                counterexample: Some(counterexample(&prefs)),
            });
        }
    }
    Ok(SweepReport { total_profiles: total, checked: count, exhaustive: false, counterexample: None })
}

/// `n` firms and workers; firm `fi` wants exactly `{wi, wi+1}` (indices
/// mod `n`) and worker `wi` ranks `fi` above `fi-1`.
pub fn cyclic_market(n: usize) -> Result<Market> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("cyclic markets need n >= 3, got {n}")));
    }
    let w = |i: usize| format!("w{}", i % n + 1);
    let f = |i: usize| format!("f{}", i % n + 1);
    let mut b = Market::builder().workers((0..n).map(w));
    for i in 0..n {
        b = b.firm_owned(f(i), vec![vec![w(i), w(i + 1)]]);
    }
    for i in 0..n {
        b = b.prefs_owned(w(i), vec![f(i), f(i + n - 1)]);
    }
    b.build()
}

/// Uniformly random worker lists over relevant firms.
pub fn random_worker_prefs<R: Rng>(m: &Market, rng: &mut R) -> Result<Market> {
    let prefs = m
        .worker_ids()
        .map(|w| {
            let mut firms = relevant_firms(m, w);
            firms.shuffle(rng);
            let keep = rng.gen_range(0..=firms.len());
            firms.truncate(keep);
            firms
        })
        .collect();
    with_worker_prefs(m, prefs)
}
