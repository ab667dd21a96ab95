//! Deterministic generators for paths, fans and the two lower-bound
//! constructions, with named distinguished vertices and plane embeddings.
//!
//! Numbering is fixed: fans come first (each fan's path vertices, then its
//! rivet), then diamond centres, then `r`, then `s`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::graph::{Graph, Vertex};
use crate::planarmap::PlanarMap;

/// Diamonds in the planar construction.
pub const DIAMONDS: usize = 7;
/// Fans hanging off the centre of the outerplanar construction.
pub const FANS_PER_DIAMOND: usize = 5;
/// Path length of each fan.
pub const FAN_PATH: usize = 4;
/// Vertices in one fan (path plus rivet).
pub const FAN_SIZE: usize = FAN_PATH + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Gadget {
    pub name: String,
    pub graph: Graph,
    pub roles: BTreeMap<String, Vertex>,
    pub embedding: Option<PlanarMap>,
    /// Straight-line drawing the embedding was derived from.
    pub coordinates: Option<Vec<(f64, f64)>>,
}

impl Gadget {
    fn from_drawing(name: impl Into<String>, graph: Graph, roles: BTreeMap<String, Vertex>, coords: Vec<(f64, f64)>) -> Self {
        // single vertices have no faces to speak of
        let embedding = if graph.edge_count() > 0 {
            Some(PlanarMap::from_drawing(&graph, &coords).expect("gadget drawings are plane"))
        } else {
            None
        };
        Gadget { name: name.into(), graph, roles, embedding, coordinates: Some(coords) }
    }

    pub fn role(&self, name: &str) -> Option<Vertex> {
        self.roles.get(name).copied()
    }
}

fn roles<const N: usize>(pairs: [(&str, Vertex); N]) -> BTreeMap<String, Vertex> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// The path `P_n` on vertices `0..n`.
///
/// # Panics
/// If `n == 0`.
pub fn path_graph(n: usize) -> Gadget {
    assert!(n >= 1, "path needs at least one vertex");
    let g = Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path edges are simple");
    let coords = (0..n).map(|i| (i as f64, 0.0)).collect();
    Gadget::from_drawing(format!("path-{n}"), g, roles([("end0", 0), ("end1", n - 1)]), coords)
}

fn fan_edges(base: Vertex, n: usize) -> impl Iterator<Item = (Vertex, Vertex)> {
    let rivet = base + n;
    (1..n).map(move |i| (base + i - 1, base + i)).chain((0..n).map(move |i| (base + i, rivet)))
}

/// The fan `F_n`: path `0..n` plus the rivet `n` adjacent to every path
/// vertex.
///
/// # Panics
/// If `n == 0`.
pub fn fan(n: usize) -> Gadget {
    assert!(n >= 1, "fan needs at least one path vertex");
    let g = Graph::new(n + 1, fan_edges(0, n)).expect("fan edges are simple");
    let mut coords: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, 0.0)).collect();
    coords.push(((n - 1) as f64 / 2.0, 1.0));
    Gadget::from_drawing(format!("fan-{n}"), g, roles([("rivet", n), ("end0", 0), ("end1", n - 1)]), coords)
}

/// Coordinates for the fans of one diamond: fan `f` points along
/// `angles[f]` from `centre`, rivet near the centre, path across the tip.
fn diamond_fan_coords(centre: (f64, f64), angles: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(angles.len() * FAN_SIZE);
    for &theta in angles {
        let (dx, dy) = (theta.cos(), theta.sin());
        let (px, py) = (-dy, dx);
        for i in 0..FAN_PATH {
            let t = i as f64 - (FAN_PATH - 1) as f64 / 2.0;
            out.push((centre.0 + 10.0 * dx + t * px, centre.1 + 10.0 * dy + t * py));
        }
        out.push((centre.0 + 2.0 * dx, centre.1 + 2.0 * dy));
    }
    out
}

/// Five disjoint copies of `F_4` plus a vertex `r` joined to every rivet.
/// 26 vertices, 40 edges; `r` is vertex 25.
pub fn theorem2_graph() -> Gadget {
    let centre = FANS_PER_DIAMOND * FAN_SIZE;
    let mut edges = Vec::new();
    for f in 0..FANS_PER_DIAMOND {
        let base = f * FAN_SIZE;
        edges.extend(fan_edges(base, FAN_PATH));
        edges.push((base + FAN_PATH, centre));
    }
    let g = Graph::new(centre + 1, edges).expect("gadget edges are simple");
    let mut rl = roles([("r", centre)]);
    for f in 0..FANS_PER_DIAMOND {
        rl.insert(format!("rivet{f}"), f * FAN_SIZE + FAN_PATH);
    }
    let angles: Vec<f64> = (0..FANS_PER_DIAMOND).map(|f| 2.0 * PI * f as f64 / FANS_PER_DIAMOND as f64).collect();
    let mut coords = diamond_fan_coords((0.0, 0.0), &angles);
    coords.push((0.0, 0.0));
    Gadget::from_drawing("theorem2", g, rl, coords)
}

/// Seven copies of the outerplanar construction (diamonds) whose centres are
/// all joined to two further vertices `r` and `s`, plus the edge `rs`.
///
/// Fans `0..35` come first (diamond `d` owns fans `5d..5d+5`), then centres
/// `175..182`, then `r = 182`, `s = 183`.
pub fn theorem3_graph() -> Gadget {
    let fans = DIAMONDS * FANS_PER_DIAMOND;
    let centre0 = fans * FAN_SIZE;
    let r = centre0 + DIAMONDS;
    let s = r + 1;
    let mut edges = Vec::new();
    for d in 0..DIAMONDS {
        let centre = centre0 + d;
        for f in 0..FANS_PER_DIAMOND {
            let base = (d * FANS_PER_DIAMOND + f) * FAN_SIZE;
            edges.extend(fan_edges(base, FAN_PATH));
            edges.push((base + FAN_PATH, centre));
        }
        edges.push((centre, r));
        edges.push((centre, s));
    }
    edges.push((r, s));
    let g = Graph::new(s + 1, edges).expect("gadget edges are simple");
    let mut rl = roles([("r", r), ("s", s)]);
    for d in 0..DIAMONDS {
        rl.insert(format!("centre{d}"), centre0 + d);
    }

    // centres on the x-axis, r above and s below to their left; each
    // diamond's fans point rightwards into the gap before the next centre
    let angles: Vec<f64> = (0..FANS_PER_DIAMOND).map(|f| (-50.0 + 25.0 * f as f64).to_radians()).collect();
    let centre_at = |d: usize| (30.0 * (d + 1) as f64, 0.0);
    let mut coords = Vec::with_capacity(s + 1);
    for d in 0..DIAMONDS {
        coords.extend(diamond_fan_coords(centre_at(d), &angles));
    }
    coords.extend((0..DIAMONDS).map(centre_at));
    coords.push((0.0, 100.0));
    coords.push((0.0, -100.0));
    Gadget::from_drawing("theorem3", g, rl, coords)
}

/// Looks up a gadget by name: `theorem2`, `theorem3`, `path-N`, `fan-N`.
pub fn by_name(name: &str) -> Option<Gadget> {
    match name {
        "theorem2" => Some(theorem2_graph()),
        "theorem3" => Some(theorem3_graph()),
        _ => {
            let (kind, size) = name.split_once('-')?;
            let size: usize = size.parse().ok().filter(|&s| s >= 1)?;
            match kind {
                "path" => Some(path_graph(size)),
                "fan" => Some(fan(size)),
                _ => None,
            }
        }
    }
}
