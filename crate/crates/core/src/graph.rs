//! Simple undirected graphs, vertex colourings and the non-repetitive
//! colouring verifier.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{is_square, Symbol, Word};

pub type Vertex = usize;
pub type Colour = Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    OutOfRange(Vertex, Vertex, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {0} out of range")]
    NoSuchVertex(Vertex),
    #[error("graph contains a cycle")]
    HasCycle,
    #[error("vertices {0} and {1} lie in different components")]
    Disconnected(Vertex, Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("colouring has {got} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColouringError {
    #[error("colour {colour} at vertex {vertex} is not below k = {k}")]
    ColourOutOfRange { vertex: Vertex, colour: Colour, k: usize },
    #[error("k = {0} exceeds the supported maximum of 255 colours")]
    TooManyColours(usize),
}

/// A finite simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicate edges and endpoints `>= n`.
    /// Edges are stored normalized as `(min, max)` in sorted order.
    pub fn new(n: usize, edge_list: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for (u, v) in edge_list {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.components().len() == self.n
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is
    /// `vertices[i]` of `self`.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Graph::new(vertices.len(), edges).expect("induced subgraph of a simple graph is simple")
    }

    /// Components of the graph left after deleting `removed`, each returned
    /// with its vertex list in the original numbering.
    pub fn components_without(&self, removed: &[Vertex]) -> Vec<(Graph, Vec<Vertex>)> {
        let keep: Vec<Vertex> = (0..self.n).filter(|v| !removed.contains(v)).collect();
        let sub = self.induced_subgraph(&keep);
        sub.components()
            .into_iter()
            .map(|comp| {
                let original: Vec<Vertex> = comp.iter().map(|&i| keep[i]).collect();
                (self.induced_subgraph(&original), original)
            })
            .collect()
    }

    /// Backtracking isomorphism search; returns `map` with `map[v]` the image
    /// in `other` of vertex `v` of `self`.
    pub fn find_isomorphism(&self, other: &Graph) -> Option<Vec<Vertex>> {
        if self.n != other.n || self.edges.len() != other.edges.len() {
            return None;
        }
        let mut da = self.degrees();
        let mut db = other.degrees();
        da.sort_unstable();
        db.sort_unstable();
        if da != db {
            return None;
        }
        // BFS order so that every vertex after the first of its component has
        // an already-mapped neighbour.
        let mut order = Vec::with_capacity(self.n);
        for comp in self.components() {
            let root = *comp.iter().max_by_key(|&&v| (self.degree(v), std::cmp::Reverse(v))).unwrap();
            let mut seen = vec![false; self.n];
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        let mut map = vec![usize::MAX; self.n];
        let mut used = vec![false; other.n];
        if self.extend_isomorphism(other, &order, 0, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    fn extend_isomorphism(&self, other: &Graph, order: &[Vertex], depth: usize, map: &mut [Vertex], used: &mut [bool]) -> bool {
        let Some(&v) = order.get(depth) else {
            return true;
        };
        for cand in 0..other.n {
            if used[cand] || other.degree(cand) != self.degree(v) {
                continue;
            }
            let consistent = order[..depth].iter().all(|&w| self.has_edge(v, w) == other.has_edge(cand, map[w]));
            if !consistent {
                continue;
            }
            map[v] = cand;
            used[cand] = true;
            if self.extend_isomorphism(other, order, depth + 1, map, used) {
                return true;
            }
            used[cand] = false;
            map[v] = usize::MAX;
        }
        false
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        self.find_isomorphism(other).is_some()
    }
}

/// A total colouring of the vertices with colours drawn from `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexColouring {
    colours: Vec<Colour>,
    k: usize,
}

impl VertexColouring {
    pub fn new(colours: Vec<Colour>, k: usize) -> Result<Self, ColouringError> {
        if k > 255 {
            return Err(ColouringError::TooManyColours(k));
        }
        if let Some((vertex, &colour)) = colours.iter().enumerate().find(|(_, &c)| c as usize >= k) {
            return Err(ColouringError::ColourOutOfRange { vertex, colour, k });
        }
        Ok(VertexColouring { colours, k })
    }

    /// Colouring with `k` set to one more than the largest colour present.
    pub fn from_colours(colours: Vec<Colour>) -> Self {
        let k = colours.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        VertexColouring { colours, k }
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn colour(&self, v: Vertex) -> Colour {
        self.colours[v]
    }

    /// Number of distinct colours actually used.
    pub fn colours_used(&self) -> usize {
        let mut seen = [false; 256];
        for &c in &self.colours {
            seen[c as usize] = true;
        }
        seen.iter().filter(|&&b| b).count()
    }

    pub fn word_of(&self, path: &[Vertex]) -> Word {
        path.iter().map(|&v| self.colours[v]).collect()
    }
}

/// A simple path whose colour word is a square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathWitness {
    pub vertices: Vec<Vertex>,
}

impl PathWitness {
    pub fn colour_word(&self, c: &VertexColouring) -> Word {
        c.word_of(&self.vertices)
    }

    /// Checks the witness without searching: distinct vertices, consecutive
    /// ones adjacent, and a square colour word.
    pub fn is_valid(&self, g: &Graph, c: &VertexColouring) -> bool {
        let vs = &self.vertices;
        if vs.iter().any(|&v| v >= g.n() || v >= c.len()) {
            return false;
        }
        let mut seen = vec![false; g.n()];
        for &v in vs {
            if std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        vs.windows(2).all(|w| g.has_edge(w[0], w[1])) && is_square(&self.colour_word(c))
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Maximum number of path extensions before giving up.
    pub node_budget: Option<u64>,
    /// Search different start vertices on the rayon pool.
    pub parallel: bool,
}

/// Searches for a simple path whose colour word is a square.
///
/// Every factor of a path's colour word is the word of a subpath, so the
/// search only needs whole-word squares. Paths are enumerated depth-first
/// from their smaller endpoint; the witness reported is the first one found
/// from the lowest start vertex, independent of `parallel`.
pub fn find_repetitive_path(g: &Graph, c: &VertexColouring) -> Result<Option<PathWitness>, VerifyError> {
    find_repetitive_path_with(g, c, &VerifyOptions::default())
}

pub fn find_repetitive_path_with(
    g: &Graph,
    c: &VertexColouring,
    opts: &VerifyOptions,
) -> Result<Option<PathWitness>, VerifyError> {
    if c.len() != g.n() {
        return Err(VerifyError::LengthMismatch { expected: g.n(), got: c.len() });
    }
    let counter = AtomicU64::new(0);
    let search = |s: Vertex| {
        let mut dfs = PathSearch {
            g,
            colours: c.colours(),
            start: s,
            on_path: vec![false; g.n()],
            path: Vec::new(),
            word: Vec::new(),
            counter: &counter,
            budget: opts.node_budget,
            local: 0,
        };
        dfs.run()
    };
    if opts.parallel {
        (0..g.n())
            .into_par_iter()
            .map(search)
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            })
            .unwrap_or(Ok(None))
    } else {
        for s in 0..g.n() {
            if let Some(w) = search(s)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

pub fn is_nonrepetitive(g: &Graph, c: &VertexColouring) -> Result<bool, VerifyError> {
    Ok(find_repetitive_path(g, c)?.is_none())
}

struct PathSearch<'a> {
    g: &'a Graph,
    colours: &'a [Colour],
    start: Vertex,
    on_path: Vec<bool>,
    path: Vec<Vertex>,
    word: Vec<Colour>,
    counter: &'a AtomicU64,
    budget: Option<u64>,
    local: u64,
}

impl PathSearch<'_> {
    const FLUSH: u64 = 256;

    fn run(&mut self) -> Result<Option<PathWitness>, VerifyError> {
        let s = self.start;
        self.on_path[s] = true;
        self.path.push(s);
        self.word.push(self.colours[s]);
        let r = self.extend(s)?;
        self.flush()?;
        Ok(r)
    }

    fn flush(&mut self) -> Result<(), VerifyError> {
        let total = self.counter.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        match self.budget {
            Some(b) if total > b => Err(VerifyError::BudgetExhausted(b)),
            _ => Ok(()),
        }
    }

    fn tick(&mut self) -> Result<(), VerifyError> {
        self.local += 1;
        if self.local == Self::FLUSH {
            self.flush()?;
        }
        Ok(())
    }

    fn extend(&mut self, v: Vertex) -> Result<Option<PathWitness>, VerifyError> {
        let g = self.g;
        for &u in g.neighbours(v) {
            if self.on_path[u] {
                continue;
            }
            self.tick()?;
            self.path.push(u);
            self.word.push(self.colours[u]);
            // paths ending below the start are checked from the other end
            if u > self.start && is_square(&self.word) {
                return Ok(Some(PathWitness { vertices: self.path.clone() }));
            }
            self.on_path[u] = true;
            let found = self.extend(u)?;
            self.on_path[u] = false;
            if found.is_some() {
                return Ok(found);
            }
            self.path.pop();
            self.word.pop();
        }
        Ok(None)
    }
}

/// Colour word along the unique `u`–`v` path of a forest.
pub fn tree_path_word(g: &Graph, c: &VertexColouring, u: Vertex, v: Vertex) -> Result<Word, GraphError> {
    if u >= g.n() {
        return Err(GraphError::NoSuchVertex(u));
    }
    if v >= g.n() {
        return Err(GraphError::NoSuchVertex(v));
    }
    if !g.is_forest() {
        return Err(GraphError::HasCycle);
    }
    let mut parent = vec![usize::MAX; g.n()];
    parent[u] = u;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            break;
        }
        for &y in g.neighbours(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    if parent[v] == usize::MAX {
        return Err(GraphError::Disconnected(u, v));
    }
    let mut path = vec![v];
    let mut x = v;
    while x != u {
        x = parent[x];
        path.push(x);
    }
    path.reverse();
    Ok(c.word_of(&path))
}

/// Forest-specific verifier: every pair of vertices in a common tree has a
/// square-free path word.
pub fn is_nonrepetitive_forest(g: &Graph, c: &VertexColouring) -> Result<bool, GraphError> {
    if !g.is_forest() {
        return Err(GraphError::HasCycle);
    }
    for comp in g.components() {
        for (i, &u) in comp.iter().enumerate() {
            for &v in &comp[i + 1..] {
                if !tree_path_word(g, c, u, v)?.is_square_free() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
