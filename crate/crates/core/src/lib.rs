//! Non-repetitive (Thue) colourings of graphs and planar maps.
//!
//! * [`words`]: square detection and square-free words.
//! * [`graph`]: graphs, colourings and the path verifier.
//! * [`solver`]: exact k-colourability search and forest colouring.
//! * [`planarmap`]: rotation systems, faces, duals and the outerplanar
//!   five-colour face colouring.
//! * [`gadgets`]: paths, fans and the two lower-bound constructions.
//! * [`certify`]: lower-bound certification by composing boundary profiles
//!   across cut vertices.

pub mod certify;
pub mod gadgets;
pub mod graph;
pub mod planarmap;
pub mod solver;
pub mod words;

pub use graph::{find_repetitive_path, is_nonrepetitive, Colour, Graph, PathWitness, Vertex, VertexColouring};
pub use solver::{solve, SolveOptions, SolveResult, Verdict};
pub use words::{find_square, thue_word, Word};
