//! Markets, choice functions, matchings and discrete stability.

use std::collections::HashMap;
use std::fmt;

use crate::bitset::{IndexSet, WorkerSet, MAX_AGENTS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FirmId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorkerId(pub usize);

/// A firm or the null firm (being unmatched).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Employer {
    Firm(FirmId),
    Null,
}

impl Employer {
    pub fn firm(self) -> Option<FirmId> {
        match self {
            Employer::Firm(f) => Some(f),
            Employer::Null => None,
        }
    }
}

/// A firm's strict preference, stored as the chain of its desirable
/// worker sets, best first. Sets not on the chain rank below the empty set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FirmPreference {
    chain: Vec<WorkerSet>,
}

impl FirmPreference {
    pub fn new(chain: Vec<WorkerSet>) -> std::result::Result<Self, ChainError> {
        for (i, s) in chain.iter().enumerate() {
            if s.is_empty() {
                return Err(ChainError::EmptySet);
            }
            if chain[..i].contains(s) {
                return Err(ChainError::Duplicate(*s));
            }
        }
        Ok(FirmPreference { chain })
    }

    pub fn chain(&self) -> &[WorkerSet] {
        &self.chain
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Position of `s` in the total order: chain sets by index, then the
    /// empty set, then everything unlisted (tied).
    pub fn rank(&self, s: WorkerSet) -> usize {
        if s.is_empty() {
            return self.chain.len();
        }
        self.chain.iter().position(|&c| c == s).unwrap_or(self.chain.len() + 1)
    }

    /// `s ≻ t` under this preference.
    pub fn prefers(&self, s: WorkerSet, t: WorkerSet) -> bool {
        s != t && self.rank(s) < self.rank(t)
    }

    /// The best chain set contained in `available`, or the empty set.
    pub fn choose(&self, available: WorkerSet) -> WorkerSet {
        self.chain.iter().copied().find(|c| c.is_subset(available)).unwrap_or(WorkerSet::EMPTY)
    }

    /// Chain sets that are their own choice, in chain order.
    pub fn acceptable_sets(&self) -> Vec<WorkerSet> {
        self.chain
            .iter()
            .enumerate()
            .filter(|(i, s)| !self.chain[..*i].iter().any(|e| e.is_subset(**s)))
            .map(|(_, s)| *s)
            .collect()
    }

    /// Union of all acceptable sets.
    pub fn potential_employees(&self) -> WorkerSet {
        self.acceptable_sets().into_iter().fold(WorkerSet::EMPTY, |a, b| a | b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainError {
    EmptySet,
    Duplicate(WorkerSet),
}

/// A many-to-one matching market.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    workers: Vec<String>,
    firms: Vec<String>,
    worker_prefs: Vec<Vec<FirmId>>,
    firm_prefs: Vec<FirmPreference>,
    // rank[w][f] = position of f in w's list
    rank: Vec<Vec<Option<usize>>>,
}

impl Market {
    /// Builds a market from index-level data, checking every invariant.
    pub fn new(
        workers: Vec<String>,
        firms: Vec<String>,
        worker_prefs: Vec<Vec<FirmId>>,
        firm_prefs: Vec<FirmPreference>,
    ) -> Result<Self> {
        if workers.len() > MAX_AGENTS {
            return Err(Error::TooManyAgents(workers.len()));
        }
        check_unique(&workers)?;
        check_unique(&firms)?;
        if let Some(w) = workers.iter().find(|w| firms.contains(w)) {
            return Err(Error::DuplicateId(w.clone()));
        }
        if worker_prefs.len() != workers.len() || firm_prefs.len() != firms.len() {
            return Err(Error::InvalidArgument("preference lists do not match the agent lists".into()));
        }
        let all = IndexSet::full(workers.len());
        for (f, pref) in firm_prefs.iter().enumerate() {
            if let Some(bad) = pref.chain.iter().find(|s| !s.is_subset(all)) {
                let idx = (*bad - all).first().unwrap_or(0);
                return Err(Error::UnknownWorker(format!("#{idx} (in firm `{}`)", firms[f])));
            }
        }
        let mut rank = vec![vec![None; firms.len()]; workers.len()];
        for (w, list) in worker_prefs.iter().enumerate() {
            for (pos, f) in list.iter().enumerate() {
                if f.0 >= firms.len() {
                    return Err(Error::UnknownFirm(format!("#{}", f.0)));
                }
                if rank[w][f.0].is_some() {
                    return Err(Error::DuplicatePreference {
                        worker: workers[w].clone(),
                        firm: firms[f.0].clone(),
                    });
                }
                rank[w][f.0] = Some(pos);
            }
        }
        Ok(Market { workers, firms, worker_prefs, firm_prefs, rank })
    }

    pub fn builder() -> MarketBuilder {
        MarketBuilder::default()
    }

    pub fn workers(&self) -> &[String] {
        &self.workers
    }

    pub fn firms(&self) -> &[String] {
        &self.firms
    }

    pub fn num_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn num_firms(&self) -> usize {
        self.firms.len()
    }

    pub fn all_workers(&self) -> WorkerSet {
        IndexSet::full(self.workers.len())
    }

    pub fn firm_ids(&self) -> impl Iterator<Item = FirmId> {
        (0..self.firms.len()).map(FirmId)
    }

    pub fn worker_ids(&self) -> impl Iterator<Item = WorkerId> {
        (0..self.workers.len()).map(WorkerId)
    }

    pub fn worker_prefs(&self, w: WorkerId) -> &[FirmId] {
        &self.worker_prefs[w.0]
    }

    pub fn firm_pref(&self, f: FirmId) -> &FirmPreference {
        &self.firm_prefs[f.0]
    }

    pub fn firm_prefs(&self) -> &[FirmPreference] {
        &self.firm_prefs
    }

    pub fn all_worker_prefs(&self) -> &[Vec<FirmId>] {
        &self.worker_prefs
    }

    pub fn firm_name(&self, f: FirmId) -> &str {
        &self.firms[f.0]
    }

    pub fn worker_name(&self, w: WorkerId) -> &str {
        &self.workers[w.0]
    }

    pub fn employer_name(&self, e: Employer) -> &str {
        match e {
            Employer::Firm(f) => self.firm_name(f),
            Employer::Null => "ø",
        }
    }

    pub fn firm_id(&self, name: &str) -> Result<FirmId> {
        self.firms
            .iter()
            .position(|f| f == name)
            .map(FirmId)
            .ok_or_else(|| Error::UnknownFirm(name.to_string()))
    }

    pub fn worker_id(&self, name: &str) -> Result<WorkerId> {
        self.workers
            .iter()
            .position(|w| w == name)
            .map(WorkerId)
            .ok_or_else(|| Error::UnknownWorker(name.to_string()))
    }

    /// Resolves worker names into a set.
    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<WorkerSet> {
        names.iter().map(|n| self.worker_id(n.as_ref()).map(|w| w.0)).collect()
    }

    pub fn set_names(&self, s: WorkerSet) -> Vec<&str> {
        s.iter().map(|i| self.workers[i].as_str()).collect()
    }

    /// `{w1,w2}` style rendering.
    pub fn format_set(&self, s: WorkerSet) -> String {
        format!("{{{}}}", self.set_names(s).join(","))
    }

    fn check_firm(&self, f: FirmId) -> Result<()> {
        if f.0 < self.firms.len() {
            Ok(())
        } else {
            Err(Error::UnknownFirm(format!("#{}", f.0)))
        }
    }

    fn check_set(&self, s: WorkerSet) -> Result<()> {
        match (s - self.all_workers()).first() {
            None => Ok(()),
            Some(i) => Err(Error::UnknownWorker(format!("#{i}"))),
        }
    }

    /// Position of `f` in `w`'s list; `None` if `f` is unacceptable.
    pub fn worker_rank(&self, w: WorkerId, f: FirmId) -> Option<usize> {
        self.rank[w.0][f.0]
    }

    pub fn finds_acceptable(&self, w: WorkerId, f: FirmId) -> bool {
        self.rank[w.0][f.0].is_some()
    }

    fn employer_rank(&self, w: WorkerId, e: Employer) -> usize {
        match e {
            Employer::Null => self.worker_prefs[w.0].len(),
            Employer::Firm(f) => self.rank[w.0][f.0].unwrap_or(usize::MAX),
        }
    }

    /// `a ⪰_w b`.
    pub fn prefers_weakly(&self, w: WorkerId, a: Employer, b: Employer) -> bool {
        a == b || self.employer_rank(w, a) < self.employer_rank(w, b)
    }

    /// `a ≻_w b`.
    pub fn prefers(&self, w: WorkerId, a: Employer, b: Employer) -> bool {
        a != b && self.employer_rank(w, a) < self.employer_rank(w, b)
    }

    /// Choice of `e` from `available`; the null firm takes everything.
    pub fn choose(&self, e: Employer, available: WorkerSet) -> Result<WorkerSet> {
        self.check_set(available)?;
        match e {
            Employer::Null => Ok(available),
            Employer::Firm(f) => {
                self.check_firm(f)?;
                Ok(self.firm_prefs[f.0].choose(available))
            }
        }
    }

    pub fn is_acceptable_set(&self, f: FirmId, s: WorkerSet) -> Result<bool> {
        Ok(!s.is_empty() && self.choose(Employer::Firm(f), s)? == s)
    }

    pub fn acceptable_sets(&self, f: FirmId) -> Result<Vec<WorkerSet>> {
        self.check_firm(f)?;
        Ok(self.firm_prefs[f.0].acceptable_sets())
    }

    pub fn is_individually_rational(&self, m: &Matching) -> bool {
        self.individual_rationality_violations(m).is_empty()
    }

    fn individual_rationality_violations(&self, m: &Matching) -> Vec<IrViolation> {
        let mut out = Vec::new();
        for w in self.worker_ids() {
            if let Employer::Firm(f) = m.employer(w) {
                if !self.finds_acceptable(w, f) {
                    out.push(IrViolation::UnacceptableEmployer { worker: w, firm: f });
                }
            }
        }
        for f in self.firm_ids() {
            let held = m.employees(f);
            let chosen = self.firm_prefs[f.0].choose(held);
            if chosen != held {
                out.push(IrViolation::WouldDrop { firm: f, held, chosen });
            }
        }
        out
    }

    /// Reports individual-rationality violations or else the first blocking
    /// coalition (firms in market order, acceptable sets best first).
    pub fn find_block(&self, m: &Matching) -> Result<BlockReport> {
        m.validate(self)?;
        let ir_violations = self.individual_rationality_violations(m);
        if !ir_violations.is_empty() {
            return Ok(BlockReport { blocking: None, ir_violations });
        }
        for f in self.firm_ids() {
            let pref = &self.firm_prefs[f.0];
            let held = m.employees(f);
            for a in pref.acceptable_sets() {
                if !pref.prefers(a, held) {
                    break;
                }
                let join = a
                    .iter()
                    .all(|w| self.prefers_weakly(WorkerId(w), Employer::Firm(f), m.employer(WorkerId(w))));
                if join {
                    return Ok(BlockReport { blocking: Some((f, a)), ir_violations });
                }
            }
        }
        Ok(BlockReport::default())
    }

    pub fn is_stable(&self, m: &Matching) -> Result<bool> {
        Ok(self.find_block(m)?.is_empty())
    }

    /// Definition-level test: does `(f, s)` block `m`?
    pub fn blocks(&self, m: &Matching, f: FirmId, s: WorkerSet) -> bool {
        self.firm_prefs[f.0].prefers(s, m.employees(f))
            && s.iter().all(|w| self.prefers_weakly(WorkerId(w), Employer::Firm(f), m.employer(WorkerId(w))))
    }

    /// Display a matching in two-row layout: firms (and ø) over their
    /// assigned workers.
    pub fn render_matching(&self, m: &Matching) -> String {
        let mut cols: Vec<(String, String)> = self
            .firm_ids()
            .map(|f| (self.firm_name(f).to_string(), self.set_names(m.employees(f)).join(",")))
            .collect();
        cols.push(("ø".into(), self.set_names(m.unmatched()).join(",")));
        let widths: Vec<usize> = cols.iter().map(|(a, b)| a.chars().count().max(b.chars().count())).collect();
        let mut top = String::new();
        let mut bottom = String::new();
        for ((a, b), w) in cols.iter().zip(&widths) {
            top.push_str(&format!("{a:<w$}  ", w = w));
            bottom.push_str(&format!("{b:<w$}  ", w = w));
        }
        format!("{}\n{}", top.trim_end(), bottom.trim_end())
    }
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = HashMap::new();
    for n in names {
        if seen.insert(n.as_str(), ()).is_some() {
            return Err(Error::DuplicateId(n.clone()));
        }
    }
    Ok(())
}

/// Name-based market construction.
#[derive(Default, Debug, Clone)]
pub struct MarketBuilder {
    workers: Vec<String>,
    firms: Vec<(String, Vec<Vec<String>>)>,
    prefs: Vec<(String, Vec<String>)>,
}

impl MarketBuilder {
    pub fn workers<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.workers.extend(names.into_iter().map(Into::into));
        self
    }

    /// Adds a firm with its chain of worker sets, best first.
    pub fn firm<S: AsRef<str>>(mut self, name: &str, chain: &[&[S]]) -> Self {
        let chain = chain.iter().map(|s| s.iter().map(|w| w.as_ref().to_string()).collect()).collect();
        self.firms.push((name.to_string(), chain));
        self
    }

    pub fn firm_owned(mut self, name: String, chain: Vec<Vec<String>>) -> Self {
        self.firms.push((name, chain));
        self
    }

    /// Sets a worker's list of acceptable firms, best first.
    pub fn prefs<S: AsRef<str>>(mut self, worker: &str, firms: &[S]) -> Self {
        self.prefs.push((worker.to_string(), firms.iter().map(|f| f.as_ref().to_string()).collect()));
        self
    }

    pub fn prefs_owned(mut self, worker: String, firms: Vec<String>) -> Self {
        self.prefs.push((worker, firms));
        self
    }

    pub fn build(self) -> Result<Market> {
        check_unique(&self.workers)?;
        let worker_idx: HashMap<&str, usize> =
            self.workers.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let firm_names: Vec<String> = self.firms.iter().map(|(n, _)| n.clone()).collect();
        check_unique(&firm_names)?;
        if self.workers.len() > MAX_AGENTS {
            return Err(Error::TooManyAgents(self.workers.len()));
        }
        let mut firm_prefs = Vec::with_capacity(self.firms.len());
        for (name, chain) in &self.firms {
            let mut sets = Vec::with_capacity(chain.len());
            for set in chain {
                let mut s = WorkerSet::EMPTY;
                for w in set {
                    let i = *worker_idx.get(w.as_str()).ok_or_else(|| Error::UnknownWorker(w.clone()))?;
                    s.insert(i);
                }
                sets.push(s);
            }
            let pref = FirmPreference::new(sets).map_err(|e| match e {
                ChainError::EmptySet => Error::EmptySetInChain(name.clone()),
                ChainError::Duplicate(s) => Error::DuplicateSet {
                    firm: name.clone(),
                    set: format!(
                        "{{{}}}",
                        s.iter().map(|i| self.workers[i].as_str()).collect::<Vec<_>>().join(",")
                    ),
                },
            })?;
            firm_prefs.push(pref);
        }
        let mut worker_prefs = vec![Vec::new(); self.workers.len()];
        let mut assigned = vec![false; self.workers.len()];
        for (w, list) in &self.prefs {
            let wi = *worker_idx.get(w.as_str()).ok_or_else(|| Error::UnknownWorker(w.clone()))?;
            if assigned[wi] {
                return Err(Error::DuplicateId(w.clone()));
            }
            assigned[wi] = true;
            let mut ids = Vec::with_capacity(list.len());
            for f in list {
                let fi =
                    firm_names.iter().position(|n| n == f).ok_or_else(|| Error::UnknownFirm(f.clone()))?;
                ids.push(FirmId(fi));
            }
            worker_prefs[wi] = ids;
        }
        Market::new(self.workers, firm_names, worker_prefs, firm_prefs)
    }
}

/// Assignment of every worker to a firm or to the null firm.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    assignment: Vec<Employer>,
}

impl Matching {
    /// Everyone unmatched.
    pub fn empty(num_workers: usize) -> Self {
        Matching { assignment: vec![Employer::Null; num_workers] }
    }

    pub fn from_assignment(assignment: Vec<Employer>) -> Self {
        Matching { assignment }
    }

    /// Builds a matching from firm-side sets; sets must be pairwise disjoint.
    pub fn from_firm_sets(num_workers: usize, sets: &[(FirmId, WorkerSet)]) -> Result<Self> {
        let mut m = Matching::empty(num_workers);
        for &(f, s) in sets {
            for w in s.iter() {
                if w >= num_workers {
                    return Err(Error::MalformedMatching(format!("worker #{w} out of range")));
                }
                if m.assignment[w] != Employer::Null {
                    return Err(Error::MalformedMatching(format!("worker #{w} assigned to two firms")));
                }
                m.assignment[w] = Employer::Firm(f);
            }
        }
        Ok(m)
    }

    /// Name-based convenience constructor.
    pub fn from_names<S: AsRef<str>>(market: &Market, sets: &[(&str, &[S])]) -> Result<Self> {
        let mut resolved = Vec::with_capacity(sets.len());
        for (f, ws) in sets {
            resolved.push((market.firm_id(f)?, market.set_of(ws)?));
        }
        Matching::from_firm_sets(market.num_workers(), &resolved)
    }

    pub fn assignment(&self) -> &[Employer] {
        &self.assignment
    }

    pub fn employer(&self, w: WorkerId) -> Employer {
        self.assignment[w.0]
    }

    pub fn assign(&mut self, w: WorkerId, e: Employer) {
        self.assignment[w.0] = e;
    }

    /// `µ(f)`.
    pub fn employees(&self, f: FirmId) -> WorkerSet {
        self.assignment.iter().enumerate().filter(|(_, e)| **e == Employer::Firm(f)).map(|(w, _)| w).collect()
    }

    pub fn unmatched(&self) -> WorkerSet {
        self.assignment.iter().enumerate().filter(|(_, e)| **e == Employer::Null).map(|(w, _)| w).collect()
    }

    pub fn validate(&self, market: &Market) -> Result<()> {
        if self.assignment.len() != market.num_workers() {
            return Err(Error::MalformedMatching(format!(
                "{} assignments for {} workers",
                self.assignment.len(),
                market.num_workers()
            )));
        }
        for e in &self.assignment {
            if let Employer::Firm(f) = e {
                market.check_firm(*f)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrViolation {
    /// A worker is matched to a firm missing from their list.
    UnacceptableEmployer { worker: WorkerId, firm: FirmId },
    /// A firm would rather keep only `chosen` out of `held`.
    WouldDrop { firm: FirmId, held: WorkerSet, chosen: WorkerSet },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockReport {
    pub blocking: Option<(FirmId, WorkerSet)>,
    pub ir_violations: Vec<IrViolation>,
}

impl BlockReport {
    pub fn is_empty(&self) -> bool {
        self.blocking.is_none() && self.ir_violations.is_empty()
    }

    pub fn describe(&self, market: &Market) -> String {
        if let Some((f, s)) = self.blocking {
            return format!("blocked by {} with {}", market.firm_name(f), market.format_set(s));
        }
        let parts: Vec<String> = self
            .ir_violations
            .iter()
            .map(|v| match *v {
                IrViolation::UnacceptableEmployer { worker, firm } => {
                    format!("{} finds {} unacceptable", market.worker_name(worker), market.firm_name(firm))
                }
                IrViolation::WouldDrop { firm, held, chosen } => format!(
                    "{} holds {} but chooses {}",
                    market.firm_name(firm),
                    market.format_set(held),
                    market.format_set(chosen)
                ),
            })
            .collect();
        if parts.is_empty() {
            "stable".into()
        } else {
            parts.join("; ")
        }
    }
}

impl fmt::Display for Employer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Employer::Firm(id) => write!(f, "firm#{}", id.0),
            Employer::Null => write!(f, "ø"),
        }
    }
}
