//! Preference classification and firm decomposition.
//!
//! All enumerations run over `W_f`, the workers appearing in some
//! acceptable set of `f`. A choice is always an acceptable set or empty,
//! so `Ch_f(S) = Ch_f(S ∩ W_f)` and nothing outside `W_f` can change an
//! answer.

use std::collections::BTreeSet;

use crate::bitset::WorkerSet;
use crate::error::{Error, Result};
use crate::model::{Employer, FirmId, FirmPreference, Market, Matching, WorkerId};

fn pref_of(m: &Market, f: FirmId) -> Result<&FirmPreference> {
    if f.0 < m.num_firms() {
        Ok(m.firm_pref(f))
    } else {
        Err(Error::UnknownFirm(format!("#{}", f.0)))
    }
}

/// Any worker chosen from `S` is still chosen from every superset.
pub fn is_complementary(m: &Market, f: FirmId) -> Result<bool> {
    let pref = pref_of(m, f)?;
    Ok(pref_is_complementary(pref))
}

pub(crate) fn pref_is_complementary(pref: &FirmPreference) -> bool {
    let ground = pref.potential_employees();
    // Every S ⊂ S' is reached by single additions, so checking one-step
    // extensions is enough.
    ground.subsets().all(|s| {
        let chosen = pref.choose(s);
        (ground - s).iter().all(|w| chosen.is_subset(pref.choose(s.with(w))))
    })
}

/// Any worker chosen from `S` is still chosen from every subset containing
/// that worker.
pub fn is_substitutable(m: &Market, f: FirmId) -> Result<bool> {
    let pref = pref_of(m, f)?;
    let ground = pref.potential_employees();
    Ok(ground.subsets().all(|s| {
        let chosen = pref.choose(s);
        s.iter().all(|w| {
            let smaller = s - WorkerSet::singleton(w);
            (chosen & smaller).is_subset(pref.choose(smaller))
        })
    }))
}

/// The union of two disjoint acceptable sets is acceptable.
pub fn is_additive(m: &Market, f: FirmId) -> Result<bool> {
    let pref = pref_of(m, f)?;
    Ok(pref_is_additive(pref))
}

pub(crate) fn pref_is_additive(pref: &FirmPreference) -> bool {
    let acc = pref.acceptable_sets();
    acc.iter()
        .enumerate()
        .all(|(i, a)| acc[i + 1..].iter().all(|b| !a.is_disjoint(*b) || acc.contains(&(*a | *b))))
}

/// Distinct nonzero vectors `χ(Ch(S')) − χ(Ch(S))` over `S ⊂ S' ⊆ W_f`,
/// indexed by all workers of the market.
pub fn demand_type(m: &Market, f: FirmId) -> Result<BTreeSet<Vec<i8>>> {
    let pref = pref_of(m, f)?;
    let ground = pref.potential_employees();
    let n = m.num_workers();
    let mut out = BTreeSet::new();
    for big in ground.subsets() {
        let big_choice = pref.choose(big);
        for small in big.subsets() {
            if small == big {
                continue;
            }
            let small_choice = pref.choose(small);
            if small_choice == big_choice {
                continue;
            }
            let v: Vec<i8> =
                (0..n).map(|w| big_choice.contains(w) as i8 - small_choice.contains(w) as i8).collect();
            out.insert(v);
        }
    }
    Ok(out)
}

/// Complementarity structure of a single firm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementarityGraph {
    pub firm: FirmId,
    pub vertices: WorkerSet,
    /// Unordered pairs stored as `(smaller, larger)`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl ComplementarityGraph {
    pub fn neighbours(&self, w: usize) -> WorkerSet {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == w {
                    Some(b)
                } else if b == w {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Connected components, ordered by their smallest worker.
    pub fn components(&self) -> Vec<WorkerSet> {
        let mut seen = WorkerSet::EMPTY;
        let mut out = Vec::new();
        for start in self.vertices.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = WorkerSet::singleton(start);
            let mut frontier = vec![start];
            while let Some(v) = frontier.pop() {
                for u in self.neighbours(v).iter() {
                    if !comp.contains(u) {
                        comp.insert(u);
                        frontier.push(u);
                    }
                }
            }
            seen = seen | comp;
            out.push(comp);
        }
        out
    }

    /// Whether `s` lies inside one component.
    pub fn connects(&self, s: WorkerSet) -> bool {
        s.is_subset(self.vertices) && self.components().iter().any(|c| s.is_subset(*c))
    }
}

pub fn complementarity_graph(m: &Market, f: FirmId) -> Result<ComplementarityGraph> {
    let pref = pref_of(m, f)?;
    Ok(graph_of(f, pref))
}

fn graph_of(f: FirmId, pref: &FirmPreference) -> ComplementarityGraph {
    let ground = pref.potential_employees();
    let mut edges = BTreeSet::new();
    for s in ground.subsets() {
        let base = pref.choose(s);
        for added in (ground - s).iter() {
            let grown = pref.choose(s.with(added));
            // workers newly chosen once `added` arrives are its complements
            for w in (grown - base).iter() {
                if w != added {
                    edges.insert((w.min(added), w.max(added)));
                }
            }
        }
    }
    ComplementarityGraph { firm: f, vertices: ground, edges }
}

/// Acceptable sets lying within one component of the complementarity graph.
pub fn primitive_acceptable_sets(m: &Market, f: FirmId) -> Result<Vec<WorkerSet>> {
    let pref = pref_of(m, f)?;
    let g = graph_of(f, pref);
    let comps = g.components();
    Ok(pref.acceptable_sets().into_iter().filter(|s| comps.iter().any(|c| s.is_subset(*c))).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionKind {
    /// One new firm per acceptable set.
    BySets,
    /// One new firm per component of the complementarity graph.
    ByComponents,
}

/// A market whose firms were split from an original market's firms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposedMarket {
    pub market: Market,
    /// For each new firm, the original firm and 1-based sibling index.
    pub origin: Vec<(FirmId, usize)>,
    pub kind: DecompositionKind,
    pub original_firms: usize,
}

impl DecomposedMarket {
    /// New firms split from `f`, in sibling order.
    pub fn siblings(&self, f: FirmId) -> Vec<FirmId> {
        self.origin.iter().enumerate().filter(|(_, (o, _))| *o == f).map(|(i, _)| FirmId(i)).collect()
    }
}

/// How to treat firms with no acceptable set during decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmptyFirms {
    Reject,
    /// The firm gets no siblings; it can never hire anyone anyway.
    Drop,
}

/// Splits every firm into one firm per acceptable set. Siblings take the
/// original firm's place in each worker list, in chain order.
pub fn decompose_by_sets(m: &Market) -> Result<DecomposedMarket> {
    decompose_by_sets_with(m, EmptyFirms::Reject)
}

pub fn decompose_by_sets_with(m: &Market, empty: EmptyFirms) -> Result<DecomposedMarket> {
    let mut parts = Vec::with_capacity(m.num_firms());
    for f in m.firm_ids() {
        let acc = m.firm_pref(f).acceptable_sets();
        if acc.is_empty() && empty == EmptyFirms::Reject {
            return Err(Error::NoAcceptableSet(m.firm_name(f).to_string()));
        }
        parts.push(acc.into_iter().map(|s| vec![s]).collect());
    }
    assemble(m, parts, DecompositionKind::BySets)
}

/// Splits every complementary firm along the components of its
/// complementarity graph. Each part keeps the acceptable sets of the
/// restricted choice `Ch_f(S) ∩ W^part`, in the original order.
pub fn decompose_by_components(m: &Market) -> Result<DecomposedMarket> {
    let mut parts = Vec::with_capacity(m.num_firms());
    for f in m.firm_ids() {
        let pref = m.firm_pref(f);
        if !pref_is_complementary(pref) {
            return Err(Error::NotComplementary(m.firm_name(f).to_string()));
        }
        let g = graph_of(f, pref);
        let chains: Vec<Vec<WorkerSet>> = g
            .components()
            .into_iter()
            .map(|comp| {
                let restricted: Vec<WorkerSet> =
                    comp.subsets().filter(|s| !s.is_empty() && pref.choose(*s) & comp == *s).collect();
                let mut chain = restricted;
                chain.sort_by_key(|s| pref.rank(*s));
                chain
            })
            .collect();
        parts.push(chains);
    }
    assemble(m, parts, DecompositionKind::ByComponents)
}

fn assemble(
    m: &Market,
    parts: Vec<Vec<Vec<WorkerSet>>>,
    kind: DecompositionKind,
) -> Result<DecomposedMarket> {
    let mut names = Vec::new();
    let mut prefs = Vec::new();
    let mut origin = Vec::new();
    let mut first_new: Vec<Vec<FirmId>> = Vec::with_capacity(parts.len());
    for (f, chains) in parts.into_iter().enumerate() {
        let base = m.firm_name(FirmId(f));
        let single = chains.len() == 1;
        let mut ids = Vec::with_capacity(chains.len());
        for (k, chain) in chains.into_iter().enumerate() {
            ids.push(FirmId(names.len()));
            names.push(if single { base.to_string() } else { format!("{base}#{}", k + 1) });
            prefs.push(FirmPreference::new(chain).expect("restricted chain is valid"));
            origin.push((FirmId(f), k + 1));
        }
        first_new.push(ids);
    }
    let worker_prefs: Vec<Vec<FirmId>> = m
        .worker_ids()
        .map(|w| m.worker_prefs(w).iter().flat_map(|f| first_new[f.0].iter().copied()).collect())
        .collect();
    let market = Market::new(m.workers().to_vec(), names, worker_prefs, prefs)?;
    Ok(DecomposedMarket { market, origin, kind, original_firms: m.num_firms() })
}

/// Undoes the `base#k` naming of [`decompose_by_sets`]: siblings are merged
/// into one firm whose chain lists their sets in sibling order. Returns the
/// merged market with its decomposition, or `None` when
/// the merged market does not decompose back into `m` exactly.
pub fn recompose_by_sets(m: &Market) -> Option<(Market, DecomposedMarket)> {
    fn base(name: &str) -> (&str, Option<usize>) {
        match name.rsplit_once('#') {
            Some((b, k)) if !b.is_empty() => match k.parse::<usize>() {
                Ok(k) => (b, Some(k)),
                Err(_) => (name, None),
            },
            _ => (name, None),
        }
    }
    let mut groups: Vec<(&str, Vec<(usize, FirmId)>)> = Vec::new();
    for f in m.firm_ids() {
        let (b, k) = base(m.firm_name(f));
        match groups.iter_mut().find(|(g, _)| *g == b) {
            Some((_, members)) => members.push((k?, f)),
            None => groups.push((b, vec![(k.unwrap_or(1), f)])),
        }
    }
    let mut builder = Market::builder().workers(m.workers().iter().cloned());
    let mut group_of = vec![0; m.num_firms()];
    for (gi, (b, members)) in groups.iter_mut().enumerate() {
        members.sort();
        let mut chain = Vec::new();
        for &(_, f) in members.iter() {
            group_of[f.0] = gi;
            chain.extend(
                m.firm_pref(f)
                    .chain()
                    .iter()
                    .map(|s| m.set_names(*s).into_iter().map(String::from).collect::<Vec<_>>()),
            );
        }
        builder = builder.firm_owned(b.to_string(), chain);
    }
    for w in m.worker_ids() {
        let mut list: Vec<usize> = Vec::new();
        for f in m.worker_prefs(w) {
            let g = group_of[f.0];
            if list.last() != Some(&g) {
                list.push(g);
            }
        }
        let names = list.iter().map(|&g| groups[g].0.to_string()).collect();
        builder = builder.prefs_owned(m.worker_name(w).to_string(), names);
    }
    let original = builder.build().ok()?;
    let d = decompose_by_sets(&original).ok()?;
    (d.market == *m).then_some((original, d))
}

/// Maps a matching of the decomposed market back to the original market by
/// sending each worker to the origin of their employer.
pub fn lift_matching(mu: &Matching, d: &DecomposedMarket) -> Result<Matching> {
    mu.validate(&d.market)?;
    let assignment = mu
        .assignment()
        .iter()
        .map(|e| match e {
            Employer::Firm(f) => Employer::Firm(d.origin[f.0].0),
            Employer::Null => Employer::Null,
        })
        .collect();
    Ok(Matching::from_assignment(assignment))
}

/// Inverse of [`lift_matching`] for decomposition by sets: each firm's
/// employees go to the sibling whose set they form. Fails when a firm's
/// employees are not exactly one acceptable set.
pub fn split_matching(mu: &Matching, original: &Market, d: &DecomposedMarket) -> Result<Matching> {
    mu.validate(original)?;
    let mut out = Matching::empty(original.num_workers());
    for f in original.firm_ids() {
        let held = mu.employees(f);
        if held.is_empty() {
            continue;
        }
        let target =
            d.siblings(f).into_iter().find(|g| d.market.firm_pref(*g).chain() == [held]).ok_or_else(
                || {
                    Error::MalformedMatching(format!(
                        "{} holds {} which is not one of its acceptable sets",
                        original.firm_name(f),
                        original.format_set(held)
                    ))
                },
            )?;
        for w in held.iter() {
            out.assign(WorkerId(w), Employer::Firm(target));
        }
    }
    Ok(out)
}
