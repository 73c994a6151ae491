//! Technology trees: rooted ordered trees whose vertices carry nested
//! worker sets. An edge is an upgrade, identified by its child vertex, and
//! the workers it needs are `W^child \ W^parent`.

use std::fmt::Write as _;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::balance::ZeroOneMatrix;
use crate::bitset::{IndexSet, WorkerSet, MAX_AGENTS};
use crate::error::{Error, Result};
use crate::model::{FirmId, Market};
use crate::prefs::primitive_acceptable_sets;

/// Children per vertex beyond which the reordering search gives up.
pub const PERMUTATION_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub workers: WorkerSet,
    pub parent: Option<usize>,
    /// Left to right.
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TechnologyTree {
    workers: Vec<String>,
    vertices: Vec<Vertex>,
}

/// An upgrade, named by the vertex it leads to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge(pub usize);

#[derive(Serialize, Deserialize)]
struct JsonVertex {
    name: String,
    workers: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<JsonVertex>,
}

#[derive(Serialize, Deserialize)]
struct JsonTree {
    #[serde(default)]
    workers: Vec<String>,
    root: JsonVertex,
}

impl TechnologyTree {
    /// Checks the tree invariants: a root with no workers, a parent and
    /// child lists that agree, and strictly growing worker sets.
    pub fn new(workers: Vec<String>, vertices: Vec<Vertex>) -> Result<Self> {
        if workers.len() > MAX_AGENTS {
            return Err(Error::TooManyAgents(workers.len()));
        }
        let bad = |msg: String| Err(Error::InvalidTree(msg));
        if vertices.is_empty() {
            return bad("a tree needs a root".into());
        }
        if vertices[0].parent.is_some() || !vertices[0].workers.is_empty() {
            return bad("the root comes first, has no parent and needs no workers".into());
        }
        let all = IndexSet::full(workers.len());
        for (i, v) in vertices.iter().enumerate() {
            if !v.workers.is_subset(all) {
                return bad(format!("{} uses unknown workers", v.name));
            }
            if vertices[..i].iter().any(|u| u.name == v.name) || workers.contains(&v.name) {
                return bad(format!("duplicate name {}", v.name));
            }
            if i > 0 {
                let Some(p) = v.parent.filter(|&p| p < vertices.len()) else {
                    return bad(format!("{} has no parent", v.name));
                };
                if vertices[p].children.iter().filter(|&&c| c == i).count() != 1 {
                    return bad(format!("{} is not listed once among its parent's children", v.name));
                }
                let pw = vertices[p].workers;
                if !(pw.is_subset(v.workers) && pw != v.workers) {
                    return bad(format!(
                        "{} must need strictly more workers than its parent {}",
                        v.name, vertices[p].name
                    ));
                }
            }
            for &c in &v.children {
                if c >= vertices.len() || vertices[c].parent != Some(i) {
                    return bad(format!("child list of {} is inconsistent", v.name));
                }
            }
        }
        // every vertex reachable from the root
        let mut seen = vec![false; vertices.len()];
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                return bad("cycle in the tree".into());
            }
            stack.extend(&vertices[v].children);
        }
        if seen.iter().any(|s| !s) {
            return bad("tree is not connected".into());
        }
        Ok(TechnologyTree { workers, vertices })
    }

    /// Parses an indented outline, one vertex per line as
    /// `name: {w1, w2}`, children indented deeper than their parent in
    /// left-to-right order. An optional leading `workers: a b c` line fixes
    /// the worker order; otherwise workers are numbered by first use.
    pub fn parse_outline(text: &str) -> Result<Self> {
        let mut workers: Vec<String> = Vec::new();
        let mut vertices: Vec<Vertex> = Vec::new();
        // (indent, vertex) along the current root path
        let mut path: Vec<(usize, usize)> = Vec::new();
        for (lno, raw) in text.lines().enumerate() {
            let lno = lno + 1;
            let line = raw.trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let indent = line.len() - line.trim_start().len();
            let body = line.trim_start();
            if let Some(rest) = body.strip_prefix("workers:") {
                if !vertices.is_empty() || !workers.is_empty() {
                    return Err(parse_err(lno, indent + 1, "`workers:` must be the first line"));
                }
                for w in rest.split([' ', ',', '\t']).filter(|s| !s.is_empty()) {
                    if workers.iter().any(|x| x == w) {
                        return Err(parse_err(lno, indent + 1, &format!("worker `{w}` repeated")));
                    }
                    workers.push(w.to_string());
                }
                continue;
            }
            let (name, set) = body
                .split_once(':')
                .ok_or_else(|| parse_err(lno, indent + 1, "expected `name: {workers}`"))?;
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(parse_err(lno, indent + 1, "vertex names are single words"));
            }
            let set_col = indent + body.find(':').unwrap_or(0) + 2;
            let set = set.trim();
            let inner = set
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| parse_err(lno, set_col, "worker set must be written `{a, b}`"))?;
            let mut ws = WorkerSet::EMPTY;
            for w in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let i = match workers.iter().position(|x| x == w) {
                    Some(i) => i,
                    None => {
                        workers.push(w.to_string());
                        workers.len() - 1
                    }
                };
                if i >= MAX_AGENTS {
                    return Err(Error::TooManyAgents(i + 1));
                }
                ws.insert(i);
            }
            while path.last().is_some_and(|&(d, _)| d >= indent) {
                path.pop();
            }
            let id = vertices.len();
            let parent = match (path.last(), id) {
                (None, 0) => None,
                (None, _) => return Err(parse_err(lno, indent + 1, "only one root is allowed")),
                (Some(&(_, p)), _) => Some(p),
            };
            if let Some(p) = parent {
                vertices[p].children.push(id);
            }
            vertices.push(Vertex { name: name.to_string(), workers: ws, parent, children: Vec::new() });
            path.push((indent, id));
        }
        TechnologyTree::new(workers, vertices)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: JsonTree = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut workers = j.workers;
        let mut vertices = Vec::new();
        fn walk(
            v: JsonVertex,
            parent: Option<usize>,
            workers: &mut Vec<String>,
            out: &mut Vec<Vertex>,
        ) -> Result<usize> {
            let mut ws = WorkerSet::EMPTY;
            for w in v.workers {
                let i = match workers.iter().position(|x| *x == w) {
                    Some(i) => i,
                    None => {
                        workers.push(w);
                        workers.len() - 1
                    }
                };
                if i >= MAX_AGENTS {
                    return Err(Error::TooManyAgents(i + 1));
                }
                ws.insert(i);
            }
            let id = out.len();
            out.push(Vertex { name: v.name, workers: ws, parent, children: Vec::new() });
            for c in v.children {
                let cid = walk(c, Some(id), workers, out)?;
                out[id].children.push(cid);
            }
            Ok(id)
        }
        walk(j.root, None, &mut workers, &mut vertices)?;
        TechnologyTree::new(workers, vertices)
    }

    /// Either format, chosen by the first non-blank character.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::parse_outline(text)
        }
    }

    pub fn to_outline(&self) -> String {
        let mut out = format!("workers: {}\n", self.workers.join(" "));
        self.walk_outline(0, 0, &mut out);
        out
    }

    fn walk_outline(&self, v: usize, depth: usize, out: &mut String) {
        let _ = writeln!(
            out,
            "{}{}: {}",
            "  ".repeat(depth),
            self.vertices[v].name,
            self.format_set(self.vertices[v].workers).replace(',', ", ")
        );
        for &c in &self.vertices[v].children {
            self.walk_outline(c, depth + 1, out);
        }
    }

    pub fn to_json(&self) -> String {
        fn build(t: &TechnologyTree, v: usize) -> JsonVertex {
            JsonVertex {
                name: t.vertices[v].name.clone(),
                workers: t.vertices[v].workers.iter().map(|i| t.workers[i].clone()).collect(),
                children: t.vertices[v].children.iter().map(|&c| build(t, c)).collect(),
            }
        }
        let j = JsonTree { workers: self.workers.clone(), root: build(self, 0) };
        serde_json::to_string_pretty(&j).expect("tree serializes")
    }

    pub fn workers(&self) -> &[String] {
        &self.workers
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (1..self.vertices.len()).map(Edge)
    }

    pub fn source(&self, e: Edge) -> usize {
        self.vertices[e.0].parent.expect("edges lead to non-root vertices")
    }

    pub fn edge_name(&self, e: Edge) -> String {
        format!("{}{}", self.vertices[self.source(e)].name, self.vertices[e.0].name)
    }

    /// Edge into the vertex named `child`.
    pub fn edge(&self, child: &str) -> Result<Edge> {
        match self.vertex(child)? {
            0 => Err(Error::UnknownVertex(format!("{child} is the root; no edge leads to it"))),
            v => Ok(Edge(v)),
        }
    }

    pub fn format_set(&self, s: WorkerSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.workers[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// `W^e`, the workers the upgrade adds.
    pub fn upgrade_workers(&self, e: Edge) -> Result<WorkerSet> {
        if e.0 == 0 || e.0 >= self.vertices.len() {
            return Err(Error::UnknownVertex(format!("edge #{}", e.0)));
        }
        Ok(self.vertices[e.0].workers - self.vertices[self.source(e)].workers)
    }

    /// Upgrades the named worker engages in, in vertex order.
    pub fn engagement(&self, worker: &str) -> Vec<Edge> {
        match self.workers.iter().position(|w| w == worker) {
            Some(w) => self.engagement_of(w),
            None => Vec::new(),
        }
    }

    fn engagement_of(&self, w: usize) -> Vec<Edge> {
        self.edges().filter(|&e| self.upgrade_workers(e).is_ok_and(|s| s.contains(w))).collect()
    }

    /// `v ◁ v′`: the root path of `v′` passes through `v` (inclusive).
    pub fn precedes(&self, v: usize, v2: usize) -> bool {
        let mut cur = Some(v2);
        while let Some(c) = cur {
            if c == v {
                return true;
            }
            cur = self.vertices[c].parent;
        }
        false
    }

    /// One row per worker listing the upgrades they engage in.
    pub fn engagement_table(&self) -> String {
        let width = self.workers.iter().map(|w| w.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (w, name) in self.workers.iter().enumerate() {
            let edges: Vec<String> = self.engagement_of(w).into_iter().map(|e| self.edge_name(e)).collect();
            let _ = writeln!(out, "{name:width$}  {}", edges.join(" "));
        }
        out
    }

    /// Columns are the distinct nonempty `W^v` in vertex order, rows all
    /// workers.
    pub fn worker_set_matrix(&self) -> ZeroOneMatrix {
        let mut sets = Vec::new();
        let mut labels = Vec::new();
        for v in &self.vertices {
            if !v.workers.is_empty() && !sets.contains(&v.workers) {
                sets.push(v.workers);
                labels.push(v.name.clone());
            }
        }
        ZeroOneMatrix::from_sets(&sets, labels, &self.workers).expect("tree sets are valid")
    }

    fn with_orders(&self, orders: &[(usize, Vec<usize>)]) -> TechnologyTree {
        let mut t = self.clone();
        for (v, order) in orders {
            t.vertices[*v].children = order.clone();
        }
        t
    }
}

fn parse_err(line: usize, column: usize, message: &str) -> Error {
    Error::Parse { line, column, message: message.to_string() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NeighbourViolation {
    /// The worker engages in upgrades leaving two different vertices.
    TwoSources { worker: usize, first: Edge, second: Edge },
    /// `inner` separates two upgrades of the worker in the child order.
    Gap { worker: usize, left: Edge, inner: Edge, right: Edge },
}

impl NeighbourViolation {
    pub fn worker(&self) -> usize {
        match self {
            NeighbourViolation::TwoSources { worker, .. } | NeighbourViolation::Gap { worker, .. } => *worker,
        }
    }

    pub fn describe(&self, t: &TechnologyTree) -> String {
        match *self {
            NeighbourViolation::TwoSources { worker, first, second } => format!(
                "{} engages in {} and {}, which leave different vertices",
                t.workers[worker],
                t.edge_name(first),
                t.edge_name(second)
            ),
            NeighbourViolation::Gap { worker, left, inner, right } => format!(
                "{} engages in {} and {} but not in {} between them",
                t.workers[worker],
                t.edge_name(left),
                t.edge_name(right),
                t.edge_name(inner)
            ),
        }
    }
}

/// First violation, workers in order; `None` when every worker engages in a
/// neighbour of upgrades (one source vertex, contiguous in its child order).
pub fn check_neighbour_condition(t: &TechnologyTree) -> Option<NeighbourViolation> {
    (0..t.workers.len()).find_map(|w| worker_violation(t, w))
}

fn worker_violation(t: &TechnologyTree, w: usize) -> Option<NeighbourViolation> {
    let edges = t.engagement_of(w);
    let first = *edges.first()?;
    let src = t.source(first);
    if let Some(&second) = edges.iter().find(|&&e| t.source(e) != src) {
        return Some(NeighbourViolation::TwoSources { worker: w, first, second });
    }
    let order = &t.vertices[src].children;
    let positions: Vec<usize> =
        order.iter().enumerate().filter(|(_, c)| edges.contains(&Edge(**c))).map(|(i, _)| i).collect();
    for pair in positions.windows(2) {
        if pair[1] > pair[0] + 1 {
            return Some(NeighbourViolation::Gap {
                worker: w,
                left: Edge(order[pair[0]]),
                inner: Edge(order[pair[0] + 1]),
                right: Edge(order[pair[1]]),
            });
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reordering {
    /// The given child order already passes.
    Unchanged,
    /// A child order that passes; the tree is returned reordered.
    Found(TechnologyTree),
    /// No child order passes.
    Impossible(NeighbourViolation),
    /// Some vertex has more children than the search handles.
    TooManyChildren { vertex: usize, children: usize },
}

/// Searches child orders vertex by vertex for one that satisfies the
/// neighbour condition. Only the order at a worker's source vertex affects
/// that worker, so vertices are independent.
pub fn search_child_orders(t: &TechnologyTree) -> Reordering {
    let Some(first) = check_neighbour_condition(t) else {
        return Reordering::Unchanged;
    };
    // a worker engaged at two sources fails under every order
    if let Some(v) = (0..t.workers.len())
        .filter_map(|w| worker_violation(t, w))
        .find(|v| matches!(v, NeighbourViolation::TwoSources { .. }))
    {
        return Reordering::Impossible(v);
    }
    let mut orders = Vec::new();
    for (v, vert) in t.vertices.iter().enumerate() {
        let children = &vert.children;
        let involved: Vec<usize> = (0..t.workers.len())
            .filter(|&w| {
                worker_violation(t, w)
                    .is_some_and(|x| matches!(x, NeighbourViolation::Gap { left, .. } if t.source(left) == v))
            })
            .collect();
        if involved.is_empty() {
            continue;
        }
        if children.len() > PERMUTATION_CAP {
            return Reordering::TooManyChildren { vertex: v, children: children.len() };
        }
        let engaged: Vec<Vec<usize>> = (0..t.workers.len())
            .map(|w| {
                children
                    .iter()
                    .copied()
                    .filter(|&c| t.upgrade_workers(Edge(c)).is_ok_and(|s| s.contains(w)))
                    .collect()
            })
            .collect();
        let found = children.iter().copied().permutations(children.len()).find(|perm| {
            engaged.iter().all(|cs| {
                let pos: Vec<usize> =
                    perm.iter().enumerate().filter(|(_, c)| cs.contains(c)).map(|(i, _)| i).collect();
                pos.windows(2).all(|p| p[1] == p[0] + 1)
            })
        });
        match found {
            Some(perm) => orders.push((v, perm)),
            None => {
                let witness = involved.first().and_then(|&w| worker_violation(t, w)).unwrap_or(first);
                return Reordering::Impossible(witness);
            }
        }
    }
    let reordered = t.with_orders(&orders);
    debug_assert!(check_neighbour_condition(&reordered).is_none());
    Reordering::Found(reordered)
}

/// Each firm's chain as a list of vertex groups; a group stands for the
/// union of its vertices' worker sets.
pub type FirmSpec<'a> = (&'a str, Vec<Vec<&'a str>>);

/// A market over the tree's workers whose chains are built from vertex
/// sets. Worker preference lists are left empty.
pub fn profile_from_tree(specs: &[FirmSpec<'_>], t: &TechnologyTree) -> Result<Market> {
    let mut b = Market::builder().workers(t.workers.iter().cloned());
    for (firm, chain) in specs {
        let mut sets = Vec::with_capacity(chain.len());
        for group in chain {
            let mut s = WorkerSet::EMPTY;
            for v in group {
                s = s | t.vertices[t.vertex(v)?].workers;
            }
            sets.push(s.iter().map(|i| t.workers[i].clone()).collect());
        }
        b = b.firm_owned(firm.to_string(), sets);
    }
    b.build()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeSetMode {
    /// Every primitive acceptable set is some `W^v`.
    Primitive,
    /// Every acceptable set is some `W^v`.
    All,
    /// Every primitive acceptable set with at least two workers is some
    /// `W^v`.
    NonSingleton,
}

/// Whether firm `f`'s sets (per `mode`) all come from the tree. Sets are
/// compared by worker names.
pub fn sets_from_tree(m: &Market, f: FirmId, t: &TechnologyTree, mode: TreeSetMode) -> Result<bool> {
    let sets = match mode {
        TreeSetMode::All => m.acceptable_sets(f)?,
        TreeSetMode::Primitive => primitive_acceptable_sets(m, f)?,
        TreeSetMode::NonSingleton => {
            primitive_acceptable_sets(m, f)?.into_iter().filter(|s| s.len() >= 2).collect()
        }
    };
    let tree_sets: Vec<Vec<&str>> = t
        .vertices
        .iter()
        .map(|v| {
            let mut names: Vec<&str> = v.workers.iter().map(|i| t.workers[i].as_str()).collect();
            names.sort_unstable();
            names
        })
        .collect();
    Ok(sets.into_iter().all(|s| {
        let mut names = m.set_names(s);
        names.sort_unstable();
        tree_sets.contains(&names)
    }))
}

/// [`sets_from_tree`] for every firm of the market.
pub fn market_sets_from_tree(m: &Market, t: &TechnologyTree, mode: TreeSetMode) -> Result<bool> {
    for f in m.firm_ids() {
        if !sets_from_tree(m, f, t, mode)? {
            return Ok(false);
        }
    }
    Ok(true)
}
