//! Planar maps given as rotation systems, their faces, duals and weak duals,
//! and the five-colour non-repetitive face colouring of outerplanar maps.
//!
//! Faces are traced with the rule: after arriving at `v` along `u -> v`,
//! leave along `v -> w` where `w` follows `u` in the cyclic rotation of `v`.
//! With counter-clockwise rotations each face lies to the right of its darts,
//! so bounded faces wind clockwise and the outer face counter-clockwise.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{find_repetitive_path, Colour, Graph, Vertex, VertexColouring};
use crate::solver::{colour_forest, SolveError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("vertex {0} lists neighbour {1}, which is out of range")]
    NeighbourOutOfRange(Vertex, Vertex),
    #[error("vertex {0} lists itself as a neighbour")]
    SelfLoop(Vertex),
    #[error("vertex {0} lists neighbour {1} more than once")]
    DuplicateNeighbour(Vertex, Vertex),
    #[error("rotation is not symmetric: {0} lists {1} but not vice versa")]
    Asymmetric(Vertex, Vertex),
    #[error("map must have at least one edge")]
    NoEdges,
    #[error("underlying graph is disconnected")]
    Disconnected,
    #[error("Euler check failed: V - E + F = {v} - {e} + {f} != 2")]
    EulerViolation { v: usize, e: usize, f: usize },
    #[error("outer face walk {0:?} matches no traced face")]
    OuterFaceNotFound(Vec<Vertex>),
    #[error("face index {0} out of range")]
    NoSuchFace(usize),
    #[error("map is not outerplanar: vertices {0:?} miss the outer face")]
    NotOuterplanar(Vec<Vertex>),
    #[error("weak dual of an outerplanar map contains a cycle")]
    WeakDualCyclic,
    #[error("polygon needs at least 3 vertices, got {0}")]
    PolygonTooSmall(usize),
    #[error("coordinates given for {got} vertices, graph has {expected}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<SolveError> for MapError {
    fn from(e: SolveError) -> Self {
        MapError::Internal(e.to_string())
    }
}

/// A validated rotation system: for every vertex, the cyclic order of its
/// neighbours. The underlying graph is simple and connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSystem {
    rotation: Vec<Vec<Vertex>>,
    graph: Graph,
    /// `offset[v]` is the dart id of `v -> rotation[v][0]`.
    offset: Vec<usize>,
    /// `twin[d]` is the reverse dart of `d`.
    twin: Vec<usize>,
    tail: Vec<Vertex>,
}

impl RotationSystem {
    pub fn new(rotation: Vec<Vec<Vertex>>) -> Result<Self, MapError> {
        let n = rotation.len();
        let mut edges = Vec::new();
        for (v, nbrs) in rotation.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &u in nbrs {
                if u >= n {
                    return Err(MapError::NeighbourOutOfRange(v, u));
                }
                if u == v {
                    return Err(MapError::SelfLoop(v));
                }
                if !seen.insert(u) {
                    return Err(MapError::DuplicateNeighbour(v, u));
                }
                if !rotation[u].contains(&v) {
                    return Err(MapError::Asymmetric(v, u));
                }
                if v < u {
                    edges.push((v, u));
                }
            }
        }
        if edges.is_empty() {
            return Err(MapError::NoEdges);
        }
        let graph = Graph::new(n, edges).map_err(|e| MapError::Internal(e.to_string()))?;
        if !graph.is_connected() {
            return Err(MapError::Disconnected);
        }
        let mut offset = Vec::with_capacity(n);
        let mut tail = Vec::new();
        for (v, nbrs) in rotation.iter().enumerate() {
            offset.push(tail.len());
            tail.extend(std::iter::repeat_n(v, nbrs.len()));
        }
        let mut index: HashMap<(Vertex, Vertex), usize> = HashMap::with_capacity(tail.len());
        for (v, nbrs) in rotation.iter().enumerate() {
            for (i, &u) in nbrs.iter().enumerate() {
                index.insert((v, u), offset[v] + i);
            }
        }
        let mut twin = vec![0; tail.len()];
        for (v, nbrs) in rotation.iter().enumerate() {
            for (i, &u) in nbrs.iter().enumerate() {
                twin[offset[v] + i] = index[&(u, v)];
            }
        }
        Ok(RotationSystem { rotation, graph, offset, twin, tail })
    }

    /// Rotation system of a straight-line drawing: neighbours sorted
    /// counter-clockwise by angle.
    pub fn from_coordinates(g: &Graph, coords: &[(f64, f64)]) -> Result<Self, MapError> {
        if coords.len() != g.n() {
            return Err(MapError::CoordinateCount { expected: g.n(), got: coords.len() });
        }
        let rotation = (0..g.n())
            .map(|v| {
                let (x, y) = coords[v];
                let mut nbrs = g.neighbours(v).to_vec();
                nbrs.sort_by(|&a, &b| {
                    let ta = (coords[a].1 - y).atan2(coords[a].0 - x);
                    let tb = (coords[b].1 - y).atan2(coords[b].0 - x);
                    ta.total_cmp(&tb)
                });
                nbrs
            })
            .collect();
        RotationSystem::new(rotation)
    }

    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn rotation(&self) -> &[Vec<Vertex>] {
        &self.rotation
    }

    fn dart_count(&self) -> usize {
        self.tail.len()
    }

    fn head(&self, d: usize) -> Vertex {
        self.tail[self.twin[d]]
    }

    fn next_in_face(&self, d: usize) -> usize {
        let t = self.twin[d];
        let v = self.tail[t];
        let i = t - self.offset[v];
        self.offset[v] + (i + 1) % self.rotation[v].len()
    }

    /// Traces all faces and checks Euler's formula for the sphere.
    pub fn trace_faces(&self) -> Result<FaceSet, MapError> {
        let mut dart_face = vec![usize::MAX; self.dart_count()];
        let mut faces = Vec::new();
        for start in 0..self.dart_count() {
            if dart_face[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                if dart_face[d] != usize::MAX {
                    return Err(MapError::Internal("dart reached twice while tracing".into()));
                }
                dart_face[d] = id;
                walk.push((self.tail[d], self.head(d)));
                d = self.next_in_face(d);
                if d == start {
                    break;
                }
            }
            faces.push(walk);
        }
        let (v, e, f) = (self.n(), self.graph.edge_count(), faces.len());
        if v + f != e + 2 {
            return Err(MapError::EulerViolation { v, e, f });
        }
        let mut dart_index = HashMap::with_capacity(self.dart_count());
        for d in 0..self.dart_count() {
            dart_index.insert((self.tail[d], self.head(d)), d);
        }
        Ok(FaceSet { faces, dart_face, dart_index })
    }
}

/// Faces of a map as closed walks of directed edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    faces: Vec<Vec<(Vertex, Vertex)>>,
    dart_face: Vec<usize>,
    dart_index: HashMap<(Vertex, Vertex), usize>,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn faces(&self) -> &[Vec<(Vertex, Vertex)>] {
        &self.faces
    }

    /// The face's boundary as the sequence of dart tails.
    pub fn vertex_walk(&self, f: usize) -> Vec<Vertex> {
        self.faces[f].iter().map(|&(u, _)| u).collect()
    }

    /// Face containing the directed edge `u -> v`.
    pub fn face_of_dart(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.dart_index.get(&(u, v)).map(|&d| self.dart_face[d])
    }

    /// The faces on the two sides of edge `{u, v}` (equal for a bridge).
    pub fn faces_of_edge(&self, u: Vertex, v: Vertex) -> Option<(usize, usize)> {
        Some((self.face_of_dart(u, v)?, self.face_of_dart(v, u)?))
    }

    /// Index of the face whose vertex walk equals `walk` up to cyclic
    /// rotation, falling back to reflection. Orientation-exact matches win.
    pub fn find_walk(&self, walk: &[Vertex]) -> Option<usize> {
        let walks: Vec<Vec<Vertex>> = (0..self.len()).map(|f| self.vertex_walk(f)).collect();
        walks.iter().position(|w| cyclic_eq(w, walk)).or_else(|| {
            let rev: Vec<Vertex> = walk.iter().rev().copied().collect();
            walks.iter().position(|w| cyclic_eq(w, &rev))
        })
    }
}

fn cyclic_eq(a: &[Vertex], b: &[Vertex]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|s| (0..a.len()).all(|i| a[(s + i) % a.len()] == b[i]))
}

/// A connected plane map: rotation system plus a designated outer face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarMap {
    rotation: RotationSystem,
    outer_face: usize,
}

impl PlanarMap {
    /// Builds a map whose outer face has boundary `outer_walk` (up to
    /// rotation or reflection of the walk).
    pub fn new(rotation: Vec<Vec<Vertex>>, outer_walk: &[Vertex]) -> Result<Self, MapError> {
        let rotation = RotationSystem::new(rotation)?;
        let fs = rotation.trace_faces()?;
        let outer_face = fs.find_walk(outer_walk).ok_or_else(|| MapError::OuterFaceNotFound(outer_walk.to_vec()))?;
        Ok(PlanarMap { rotation, outer_face })
    }

    pub fn with_outer_face(rotation: RotationSystem, outer_face: usize) -> Result<Self, MapError> {
        let fs = rotation.trace_faces()?;
        if outer_face >= fs.len() {
            return Err(MapError::NoSuchFace(outer_face));
        }
        Ok(PlanarMap { rotation, outer_face })
    }

    /// Map of a straight-line plane drawing; the outer face is the one with
    /// the largest signed area.
    pub fn from_drawing(g: &Graph, coords: &[(f64, f64)]) -> Result<Self, MapError> {
        let rotation = RotationSystem::from_coordinates(g, coords)?;
        let fs = rotation.trace_faces()?;
        let area = |f: usize| {
            fs.faces()[f]
                .iter()
                .map(|&(u, v)| coords[u].0 * coords[v].1 - coords[v].0 * coords[u].1)
                .sum::<f64>()
        };
        let outer_face = (0..fs.len())
            .max_by(|&a, &b| area(a).total_cmp(&area(b)))
            .expect("a map with an edge has a face");
        Ok(PlanarMap { rotation, outer_face })
    }

    pub fn n(&self) -> usize {
        self.rotation.n()
    }

    pub fn graph(&self) -> &Graph {
        self.rotation.graph()
    }

    pub fn rotation(&self) -> &[Vec<Vertex>] {
        self.rotation.rotation()
    }

    pub fn rotation_system(&self) -> &RotationSystem {
        &self.rotation
    }

    pub fn outer_face(&self) -> usize {
        self.outer_face
    }

    /// Vertex walk of the outer face.
    pub fn outer_walk(&self) -> Vec<Vertex> {
        trace_faces(self).map(|fs| fs.vertex_walk(self.outer_face)).unwrap_or_default()
    }
}

pub fn trace_faces(m: &PlanarMap) -> Result<FaceSet, MapError> {
    m.rotation.trace_faces()
}

/// The dual as a simple graph: dual vertex `f` is face `f`, and two faces
/// are adjacent iff they share at least one edge. Bridges add nothing.
pub fn dual_graph(m: &PlanarMap, fs: &FaceSet) -> Graph {
    let mut edges = BTreeSet::new();
    for &(u, v) in m.graph().edges() {
        let (a, b) = fs.faces_of_edge(u, v).expect("every edge has two darts");
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    Graph::new(fs.len(), edges).expect("dual edges are normalized and distinct")
}

/// The dual with the outer face removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakDual {
    pub graph: Graph,
    /// `faces[i]` is the face represented by weak-dual vertex `i`.
    pub faces: Vec<usize>,
}

pub fn weak_dual(m: &PlanarMap, fs: &FaceSet) -> WeakDual {
    let dual = dual_graph(m, fs);
    let faces: Vec<usize> = (0..fs.len()).filter(|&f| f != m.outer_face).collect();
    WeakDual { graph: dual.induced_subgraph(&faces), faces }
}

/// True iff every vertex lies on the outer face.
pub fn check_outerplanar(m: &PlanarMap, fs: &FaceSet) -> bool {
    missing_from_outer_face(m, fs).is_empty()
}

fn missing_from_outer_face(m: &PlanarMap, fs: &FaceSet) -> Vec<Vertex> {
    let mut on = vec![false; m.n()];
    for &(u, _) in &fs.faces()[m.outer_face] {
        on[u] = true;
    }
    (0..m.n()).filter(|&v| !on[v]).collect()
}

/// A colouring of the faces of a map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceColouring {
    pub colours: Vec<Colour>,
    pub k: usize,
    pub outer_face: usize,
}

impl FaceColouring {
    pub fn colours_used(&self) -> usize {
        VertexColouring::from_colours(self.colours.clone()).colours_used()
    }

    /// Colouring of the dual's vertices induced by this face colouring.
    pub fn as_dual_colouring(&self) -> VertexColouring {
        VertexColouring::new(self.colours.clone(), self.k).expect("face colours are below k")
    }
}

/// Colour used for the outer face.
pub const OUTER_FACE_COLOUR: Colour = 4;

/// Non-repetitive face colouring of an outerplanar map with at most five
/// colours: the weak dual is a forest and gets at most four colours, and the
/// outer face gets a fifth one of its own.
///
/// The result is checked against the general path verifier on the full dual
/// before being returned.
pub fn colour_faces_outerplanar(m: &PlanarMap) -> Result<FaceColouring, MapError> {
    let fs = trace_faces(m)?;
    let missing = missing_from_outer_face(m, &fs);
    if !missing.is_empty() {
        return Err(MapError::NotOuterplanar(missing));
    }
    let weak = weak_dual(m, &fs);
    if !weak.graph.is_forest() {
        return Err(MapError::WeakDualCyclic);
    }
    let forest_colouring = colour_forest(&weak.graph)?;
    let mut colours = vec![OUTER_FACE_COLOUR; fs.len()];
    for (i, &f) in weak.faces.iter().enumerate() {
        colours[f] = forest_colouring.colour(i);
    }
    let fc = FaceColouring { colours, k: 5, outer_face: m.outer_face };
    let dual = dual_graph(m, &fs);
    match find_repetitive_path(&dual, &fc.as_dual_colouring()) {
        Ok(None) => Ok(fc),
        Ok(Some(w)) => Err(MapError::Internal(format!("face colouring is repetitive along dual path {:?}", w.vertices))),
        Err(e) => Err(MapError::Internal(e.to_string())),
    }
}

/// Random outerplanar map: an `n`-gon `0..n` with a random set of
/// non-crossing chords.
///
/// A random triangulation is drawn first (each step picks the apex of the
/// triangle on the current base edge uniformly), then every chord is kept
/// independently with probability `density`. The outer face is the walk
/// `0, 1, ..., n-1`.
pub fn random_outerplanar_map(n: usize, density: f64, seed: u64) -> Result<PlanarMap, MapError> {
    if n < 3 {
        return Err(MapError::PolygonTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chords = Vec::new();
    let mut stack = vec![(0usize, n - 1)];
    while let Some((i, j)) = stack.pop() {
        if j - i < 2 {
            continue;
        }
        let apex = rng.gen_range(i + 1..j);
        for (a, b) in [(i, apex), (apex, j)] {
            if b - a >= 2 {
                chords.push((a, b));
                stack.push((a, b));
            }
        }
    }
    chords.shuffle(&mut rng);
    let mut edges: Vec<(Vertex, Vertex)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
    edges.extend(chords.into_iter().filter(|_| rng.gen_bool(density.clamp(0.0, 1.0))));
    let g = Graph::new(n, edges).map_err(|e| MapError::Internal(e.to_string()))?;
    let rotation = (0..n)
        .map(|v| {
            let mut nbrs = g.neighbours(v).to_vec();
            nbrs.sort_by_key(|&u| (u + n - v) % n);
            nbrs
        })
        .collect();
    let outer: Vec<Vertex> = (0..n).collect();
    PlanarMap::new(rotation, &outer)
}
