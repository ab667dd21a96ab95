//! Exact search for non-repetitive k-colourings.
//!
//! Backtracking over a fixed vertex order. After each assignment only the
//! simple paths through the newly coloured vertex (inside the coloured part
//! of the graph) can carry a new square, so that is all that gets checked.
//! Colours are introduced in first-use order: renaming colours preserves
//! non-repetitiveness, so any solution can be renamed into that form.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{find_repetitive_path, is_nonrepetitive_forest, Colour, Graph, Vertex, VertexColouring};
use crate::words::is_square;

const UNCOLOURED: Colour = Colour::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("number of colours must be between 1 and 254, got {0}")]
    BadColourCount(usize),
    #[error("search budget exhausted before a verdict was reached")]
    Indeterminate,
    #[error("graph is not a forest")]
    NotAForest,
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexOrder {
    /// Each vertex after the first of its component is adjacent to an
    /// earlier one; ties broken by larger degree, then smaller index.
    #[default]
    Connected,
    /// Breadth-first from the smallest vertex of each component.
    ForestBfs,
    /// Plain index order.
    Natural,
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub node_budget: Option<u64>,
    pub order: VertexOrder,
    pub parallel: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Colour assignments tried.
    pub nodes: u64,
    /// Assignments rejected by the incremental square check.
    pub prunes: u64,
    #[serde(with = "millis")]
    pub elapsed: Duration,
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(VertexColouring),
    Unsat,
    /// The node budget ran out; says nothing about colourability.
    Indeterminate,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Indeterminate => "INDETERMINATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: SolveStats,
}

/// Decides whether `g` has a non-repetitive colouring with `k` colours.
///
/// A SAT colouring is re-verified with the independent path verifier
/// before it is returned.
pub fn solve(g: &Graph, k: usize, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    if k == 0 || k >= UNCOLOURED as usize {
        return Err(SolveError::BadColourCount(k));
    }
    let started = Instant::now();
    let order = vertex_order(g, opts.order);
    let nodes = AtomicU64::new(0);
    let prunes = AtomicU64::new(0);
    let ctx = Context { g, k, order: &order, budget: opts.node_budget, nodes: &nodes, prunes: &prunes };

    let outcome = if opts.parallel && g.n() > 1 {
        ctx.search_parallel()
    } else {
        let mut st = State::new(g.n());
        ctx.search(&mut st, 0)
    };
    let stats = SolveStats {
        nodes: nodes.load(Ordering::Relaxed),
        prunes: prunes.load(Ordering::Relaxed),
        elapsed: started.elapsed(),
    };
    let verdict = match outcome {
        Outcome::Found(colours) => {
            let c = VertexColouring::new(colours, k).map_err(|e| SolveError::Internal(e.to_string()))?;
            match find_repetitive_path(g, &c) {
                Ok(None) => Verdict::Sat(c),
                Ok(Some(w)) => {
                    return Err(SolveError::Internal(format!("search produced a repetitive colouring, witness {:?}", w.vertices)))
                }
                Err(e) => return Err(SolveError::Internal(e.to_string())),
            }
        }
        Outcome::Exhausted => Verdict::Unsat,
        Outcome::OutOfBudget => Verdict::Indeterminate,
    };
    log::debug!("solve k={k} n={}: {} after {} nodes", g.n(), verdict.name(), stats.nodes);
    Ok(SolveResult { verdict, stats })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThueNumber {
    Exactly { k: usize, colouring: VertexColouring },
    /// No non-repetitive colouring with at most `k_max` colours.
    GreaterThan(usize),
}

/// Smallest `k <= k_max` admitting a non-repetitive colouring.
pub fn thue_number(g: &Graph, k_max: usize, opts: &SolveOptions) -> Result<ThueNumber, SolveError> {
    if k_max == 0 {
        return Err(SolveError::BadColourCount(0));
    }
    for k in 1..=k_max {
        match solve(g, k, opts)?.verdict {
            Verdict::Sat(colouring) => return Ok(ThueNumber::Exactly { k, colouring }),
            Verdict::Unsat => continue,
            Verdict::Indeterminate => return Err(SolveError::Indeterminate),
        }
    }
    Ok(ThueNumber::GreaterThan(k_max))
}

/// Non-repetitive colouring of a forest with at most four colours.
///
/// Trees are known to need at most four colours, so an exhausted 4-colour
/// search here means a bug and is reported as an internal error.
pub fn colour_forest(g: &Graph) -> Result<VertexColouring, SolveError> {
    if !g.is_forest() {
        return Err(SolveError::NotAForest);
    }
    let opts = SolveOptions { order: VertexOrder::ForestBfs, ..SolveOptions::default() };
    match solve(g, 4, &opts)?.verdict {
        Verdict::Sat(c) => {
            if is_nonrepetitive_forest(g, &c).map_err(|e| SolveError::Internal(e.to_string()))? {
                Ok(c)
            } else {
                Err(SolveError::Internal("forest colouring failed the pairwise path check".into()))
            }
        }
        Verdict::Unsat => Err(SolveError::Internal("forest without a non-repetitive 4-colouring".into())),
        Verdict::Indeterminate => Err(SolveError::Indeterminate),
    }
}

pub fn vertex_order(g: &Graph, kind: VertexOrder) -> Vec<Vertex> {
    let n = g.n();
    match kind {
        VertexOrder::Natural => (0..n).collect(),
        VertexOrder::ForestBfs => {
            let mut seen = vec![false; n];
            let mut order = Vec::with_capacity(n);
            for root in 0..n {
                if seen[root] {
                    continue;
                }
                seen[root] = true;
                let mut queue = VecDeque::from([root]);
                while let Some(v) = queue.pop_front() {
                    order.push(v);
                    for &u in g.neighbours(v) {
                        if !seen[u] {
                            seen[u] = true;
                            queue.push_back(u);
                        }
                    }
                }
            }
            order
        }
        VertexOrder::Connected => {
            let mut placed = vec![false; n];
            let mut frontier = vec![false; n];
            let mut order = Vec::with_capacity(n);
            let better = |a: Vertex, b: Vertex| (g.degree(a), std::cmp::Reverse(a)) > (g.degree(b), std::cmp::Reverse(b));
            while order.len() < n {
                let pick = (0..n)
                    .filter(|&v| !placed[v] && frontier[v])
                    .reduce(|a, b| if better(b, a) { b } else { a })
                    .or_else(|| (0..n).filter(|&v| !placed[v]).reduce(|a, b| if better(b, a) { b } else { a }))
                    .expect("unplaced vertex exists");
                placed[pick] = true;
                order.push(pick);
                for &u in g.neighbours(pick) {
                    frontier[u] = true;
                }
            }
            order
        }
    }
}

enum Outcome {
    Found(Vec<Colour>),
    Exhausted,
    OutOfBudget,
}

#[derive(Clone)]
struct State {
    colours: Vec<Colour>,
    /// Number of distinct colours used so far (colours are `0..used`).
    used: usize,
}

impl State {
    fn new(n: usize) -> Self {
        State { colours: vec![UNCOLOURED; n], used: 0 }
    }
}

struct Context<'a> {
    g: &'a Graph,
    k: usize,
    order: &'a [Vertex],
    budget: Option<u64>,
    nodes: &'a AtomicU64,
    prunes: &'a AtomicU64,
}

impl Context<'_> {
    fn over_budget(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        matches!(self.budget, Some(b) if n > b)
    }

    fn search(&self, st: &mut State, depth: usize) -> Outcome {
        let Some(&v) = self.order.get(depth) else {
            return Outcome::Found(st.colours.clone());
        };
        let limit = (st.used + 1).min(self.k);
        for c in 0..limit as Colour {
            if self.over_budget() {
                return Outcome::OutOfBudget;
            }
            st.colours[v] = c;
            if !self.legal(&st.colours, v) {
                self.prunes.fetch_add(1, Ordering::Relaxed);
                continue;
            }
            let prev = st.used;
            st.used = st.used.max(c as usize + 1);
            match self.search(st, depth + 1) {
                Outcome::Exhausted => {}
                other => {
                    st.colours[v] = UNCOLOURED;
                    st.used = prev;
                    return other;
                }
            }
            st.used = prev;
        }
        st.colours[v] = UNCOLOURED;
        Outcome::Exhausted
    }

    /// Expands the first levels sequentially, then searches the resulting
    /// subtrees on the rayon pool. Subtrees are taken in sequential DFS
    /// order and the first success wins, so the answer matches the
    /// sequential search.
    fn search_parallel(&self) -> Outcome {
        let target = 8 * rayon::current_num_threads().max(1);
        let mut frontier = vec![(State::new(self.g.n()), 0usize)];
        loop {
            if frontier.len() >= target || frontier.iter().all(|(_, d)| *d >= self.order.len()) {
                break;
            }
            let mut next = Vec::new();
            for (st, depth) in frontier {
                let Some(&v) = self.order.get(depth) else {
                    next.push((st, depth));
                    continue;
                };
                let limit = (st.used + 1).min(self.k);
                for c in 0..limit as Colour {
                    if self.over_budget() {
                        return Outcome::OutOfBudget;
                    }
                    let mut child = st.clone();
                    child.colours[v] = c;
                    if !self.legal(&child.colours, v) {
                        self.prunes.fetch_add(1, Ordering::Relaxed);
                        continue;
                    }
                    child.used = child.used.max(c as usize + 1);
                    next.push((child, depth + 1));
                }
            }
            if next.is_empty() {
                return Outcome::Exhausted;
            }
            frontier = next;
        }
        frontier
            .into_par_iter()
            .map(|(mut st, depth)| self.search(&mut st, depth))
            .find_map_first(|o| match o {
                Outcome::Exhausted => None,
                other => Some(other),
            })
            .unwrap_or(Outcome::Exhausted)
    }

    /// True when no simple path through `v` inside the coloured subgraph has
    /// a square colour word.
    fn legal(&self, colours: &[Colour], v: Vertex) -> bool {
        let cv = colours[v];
        if self.g.neighbours(v).iter().any(|&u| colours[u] == cv) {
            return false;
        }
        let mut probe = Probe {
            g: self.g,
            colours,
            centre: v,
            on_path: vec![false; self.g.n()],
            left: Vec::new(),
            word: Vec::new(),
        };
        probe.on_path[v] = true;
        !probe.left_arms(v)
    }
}

/// Enumerates paths `left⁻¹ · v · right` through a fixed centre vertex.
struct Probe<'a> {
    g: &'a Graph,
    colours: &'a [Colour],
    centre: Vertex,
    on_path: Vec<bool>,
    /// Colours of the left arm, nearest the centre first.
    left: Vec<Colour>,
    word: Vec<Colour>,
}

impl Probe<'_> {
    fn left_arms(&mut self, tip: Vertex) -> bool {
        if self.right_arms_for_current_left() {
            return true;
        }
        for &u in self.g.neighbours(tip) {
            if self.on_path[u] || self.colours[u] == UNCOLOURED {
                continue;
            }
            self.on_path[u] = true;
            self.left.push(self.colours[u]);
            let found = self.left_arms(u);
            self.left.pop();
            self.on_path[u] = false;
            if found {
                return true;
            }
        }
        false
    }

    fn right_arms_for_current_left(&mut self) -> bool {
        self.word.clear();
        self.word.extend(self.left.iter().rev());
        self.word.push(self.colours[self.centre]);
        if !self.left.is_empty() && is_square(&self.word) {
            return true;
        }
        self.right_arms(self.centre)
    }

    fn right_arms(&mut self, tip: Vertex) -> bool {
        for &u in self.g.neighbours(tip) {
            if self.on_path[u] || self.colours[u] == UNCOLOURED {
                continue;
            }
            self.word.push(self.colours[u]);
            if is_square(&self.word) {
                return true;
            }
            self.on_path[u] = true;
            let found = self.right_arms(u);
            self.on_path[u] = false;
            self.word.pop();
            if found {
                return true;
            }
        }
        false
    }
}
