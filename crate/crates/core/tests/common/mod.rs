//! Brute-force oracles and random instance generators shared by the
//! integration tests. Nothing here calls the library's verifier or solver.

#![allow(dead_code)]

use nonrep::{Colour, Graph, Vertex};
use rand::seq::SliceRandom;
use rand::Rng;

/// True iff some factor of `w` is a square, by trying every start and half
/// length.
pub fn naive_has_square(w: &[Colour]) -> bool {
    for start in 0..w.len() {
        for h in 1..=(w.len() - start) / 2 {
            if w[start..start + h] == w[start + h..start + 2 * h] {
                return true;
            }
        }
    }
    false
}

/// Every simple path of `g` (as vertex sequences, both orientations).
pub fn all_simple_paths(g: &Graph) -> Vec<Vec<Vertex>> {
    fn go(g: &Graph, path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        out.push(path.clone());
        let last = *path.last().unwrap();
        for u in 0..g.n() {
            if g.has_edge(last, u) && !path.contains(&u) {
                path.push(u);
                go(g, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for v in 0..g.n() {
        go(g, &mut vec![v], &mut out);
    }
    out
}

pub fn brute_nonrepetitive_paths(paths: &[Vec<Vertex>], colours: &[Colour]) -> bool {
    paths.iter().all(|p| {
        let w: Vec<Colour> = p.iter().map(|&v| colours[v]).collect();
        !naive_has_square(&w)
    })
}

pub fn brute_nonrepetitive(g: &Graph, colours: &[Colour]) -> bool {
    brute_nonrepetitive_paths(&all_simple_paths(g), colours)
}

/// Calls `f` on every colouring of `n` vertices with colours `0..k` until
/// it returns true.
pub fn any_colouring(n: usize, k: usize, mut f: impl FnMut(&[Colour]) -> bool) -> bool {
    let mut c = vec![0 as Colour; n];
    loop {
        if f(&c) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            c[i] += 1;
            if (c[i] as usize) < k {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

pub fn brute_colourable(g: &Graph, k: usize) -> bool {
    if k == 0 {
        return g.n() == 0;
    }
    let paths = all_simple_paths(g);
    any_colouring(g.n(), k, |c| brute_nonrepetitive_paths(&paths, c))
}

/// Graph on `n` vertices whose edges are the set bits of `mask` over the
/// pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Random labelled tree: each vertex after the first hangs off a uniformly
/// chosen earlier one, then labels are shuffled.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Graph {
    let mut labels: Vec<Vertex> = (0..n).collect();
    labels.shuffle(rng);
    let edges: Vec<(Vertex, Vertex)> = (1..n).map(|v| (labels[rng.gen_range(0..v)], labels[v])).collect();
    Graph::new(n, edges).unwrap()
}

pub fn random_colours(rng: &mut impl Rng, n: usize, k: usize) -> Vec<Colour> {
    (0..n).map(|_| rng.gen_range(0..k) as Colour).collect()
}
