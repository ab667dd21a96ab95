//! JSON artifacts read and written by the CLI.
//!
//! Readers are lenient about where a graph or colouring sits inside a file,
//! so every artifact the CLI writes can be fed back to it: a face colouring
//! file doubles as a graph file (its dual) and a colouring file, and a SAT
//! certificate doubles as a colouring file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nonrep::certify::Certificate;
use nonrep::gadgets::Gadget;
use nonrep::planarmap::{FaceColouring, FaceSet, PlanarMap};
use nonrep::{Colour, Graph, Vertex, VertexColouring};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<BTreeMap<String, Vertex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingFile>,
}

impl GraphFile {
    pub fn from_graph(g: &Graph) -> Self {
        GraphFile { n: g.n(), edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(), names: None, embedding: None }
    }

    pub fn from_gadget(g: &Gadget) -> Self {
        GraphFile {
            names: Some(g.roles.clone()),
            embedding: g.embedding.as_ref().map(EmbeddingFile::from_map),
            ..GraphFile::from_graph(&g.graph)
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        Ok(Graph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub n: usize,
    /// Neighbours of each vertex in counter-clockwise order.
    pub rotation: Vec<Vec<Vertex>>,
    /// Vertex walk of the outer face.
    pub outer_face: Vec<Vertex>,
}

impl EmbeddingFile {
    pub fn from_map(m: &PlanarMap) -> Self {
        EmbeddingFile { n: m.n(), rotation: m.rotation().to_vec(), outer_face: m.outer_walk() }
    }

    pub fn to_map(&self) -> Result<PlanarMap> {
        if self.rotation.len() != self.n {
            bail!("embedding has n = {} but {} rotation lists", self.n, self.rotation.len());
        }
        Ok(PlanarMap::new(self.rotation.clone(), &self.outer_face)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringFile {
    pub k: usize,
    pub colours: Vec<Colour>,
}

impl ColouringFile {
    pub fn from_colouring(c: &VertexColouring) -> Self {
        ColouringFile { k: c.k(), colours: c.colours().to_vec() }
    }

    pub fn to_colouring(&self) -> Result<VertexColouring> {
        Ok(VertexColouring::new(self.colours.clone(), self.k)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceEntry {
    pub walk: Vec<Vertex>,
    pub colour: Colour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceColouringFile {
    pub k: usize,
    /// Colour of face `i`, matching `faces[i]`.
    pub colours: Vec<Colour>,
    pub outer_face: usize,
    pub colours_used: usize,
    pub verified: bool,
    pub faces: Vec<FaceEntry>,
    pub dual: GraphFile,
    pub embedding: EmbeddingFile,
}

impl FaceColouringFile {
    pub fn new(m: &PlanarMap, fs: &FaceSet, dual: &Graph, fc: &FaceColouring, verified: bool) -> Self {
        FaceColouringFile {
            k: fc.k,
            colours: fc.colours.clone(),
            outer_face: fc.outer_face,
            colours_used: fc.colours_used(),
            verified,
            faces: (0..fs.len()).map(|f| FaceEntry { walk: fs.vertex_walk(f), colour: fc.colours[f] }).collect(),
            dual: GraphFile::from_graph(dual),
            embedding: EmbeddingFile::from_map(m),
        }
    }
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value, what: &str, path: &Path) -> Result<T> {
    T::deserialize(v).with_context(|| format!("{} is not a valid {what} file", path.display()))
}

/// A graph file, or the dual stored in a face colouring file.
pub fn read_graph(path: &Path) -> Result<GraphFile> {
    let v = read_json(path)?;
    let inner = if v.get("edges").is_none() { v.get("dual").unwrap_or(&v) } else { &v };
    parse(inner, "graph", path)
}

/// A colouring file, a face colouring file, or a SAT certificate.
pub fn read_colouring(path: &Path) -> Result<ColouringFile> {
    let v = read_json(path)?;
    if v.get("claim").is_some() {
        let cert: Certificate = parse(&v, "certificate", path)?;
        let colours = cert.witness.ok_or_else(|| anyhow!("{} is a certificate without a witness", path.display()))?;
        return Ok(ColouringFile { k: cert.claim.k, colours });
    }
    parse(&v, "colouring", path)
}

/// An embedding file, or the embedding inside a graph or face colouring file.
pub fn read_embedding(path: &Path) -> Result<EmbeddingFile> {
    let v = read_json(path)?;
    let inner = if v.get("rotation").is_none() { v.get("embedding").unwrap_or(&v) } else { &v };
    parse(inner, "embedding", path)
}

/// Parses a word given as digits (`0102`) or separated numbers (`0 1 0 2`,
/// `0,1,0,2`).
pub fn parse_word(s: &str) -> Result<Vec<Colour>> {
    let s = s.trim();
    let parts: Vec<&str> = if s.contains([' ', ',']) {
        s.split([' ', ',']).filter(|p| !p.is_empty()).collect()
    } else {
        s.split("").filter(|p| !p.is_empty()).collect()
    };
    parts.iter().map(|p| p.parse::<Colour>().map_err(|_| anyhow!("bad symbol {p:?} in word"))).collect()
}
