mod common;

use common::*;
use nonrep::certify::{certify, compose_star, profile_of, CertVerdict, CertifyOptions, GadgetId};
use nonrep::gadgets;
use nonrep::{solve, Graph, SolveOptions, Verdict, Vertex, VertexColouring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected graph on `n` vertices: a random tree plus extra edges.
fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let t = random_tree(rng, n);
    let mut edges = t.edges().to_vec();
    for i in 0..n {
        for j in i + 1..n {
            if !t.has_edge(i, j) && rng.gen_bool(0.3) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

#[test]
fn star_composition_matches_glued_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (mut present, mut absent) = (0, 0);
    for case in 0..1500 {
        let k = rng.gen_range(3..=4);
        let children = rng.gen_range(1..=3);
        let mut sizes = Vec::new();
        let mut budget = 9;
        for _ in 0..children {
            let s = rng.gen_range(1..=budget.min(4));
            sizes.push(s);
            budget -= s;
            if budget == 0 {
                break;
            }
        }
        // glued graph: children side by side, then the centre
        let mut edges = Vec::new();
        let mut offset = 0;
        let mut parts = Vec::new();
        for &s in &sizes {
            let g = random_connected(&mut rng, s);
            let root: Vertex = rng.gen_range(0..s);
            edges.extend(g.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
            parts.push((g, root, offset));
            offset += s;
        }
        let centre = offset;
        for (_, root, off) in &parts {
            edges.push((root + off, centre));
        }
        let glued = Graph::new(centre + 1, edges).unwrap();
        let colours = random_colours(&mut rng, centre + 1, k);

        // a child that is repetitive on its own has no profile
        let profiles: Option<Vec<_>> = parts
            .iter()
            .map(|(g, root, off)| {
                let c = VertexColouring::new(colours[*off..off + g.n()].to_vec(), k).unwrap();
                profile_of(g, *root, &c).unwrap()
            })
            .collect();
        let composed = profiles.and_then(|ps| compose_star(colours[centre], &ps));
        let direct = brute_nonrepetitive(&glued, &colours);
        assert_eq!(composed.is_some(), direct, "case {case}: {:?} {:?}", glued.edges(), colours);
        if let Some(p) = composed {
            let c = VertexColouring::new(colours, k).unwrap();
            assert_eq!(profile_of(&glued, centre, &c).unwrap(), Some(p));
            present += 1;
        } else {
            absent += 1;
        }
    }
    assert!(present > 100 && absent > 100, "{present} present, {absent} absent");
}

#[test]
fn outerplanar_gadget_certifier_agrees_with_solver() {
    let g = gadgets::theorem2_graph().graph;
    for k in 3..=5 {
        let cert = certify(GadgetId::Theorem2, k, &CertifyOptions::default()).unwrap();
        let flat = solve(&g, k, &SolveOptions::default()).unwrap();
        match (&flat.verdict, cert.verdict()) {
            (Verdict::Sat(_), CertVerdict::Sat) | (Verdict::Unsat, CertVerdict::Unsat) => {}
            (v, c) => panic!("k={k}: solver {} vs certifier {c:?}", v.name()),
        }
    }
}

#[test]
fn dedup_off_gives_identical_verdicts() {
    for (id, k) in [(GadgetId::Theorem2, 3), (GadgetId::Theorem2, 4), (GadgetId::Theorem2, 5), (GadgetId::Theorem3, 4)] {
        let on = certify(id, k, &CertifyOptions::default()).unwrap();
        let off = certify(id, k, &CertifyOptions { dedup: false, ..CertifyOptions::default() }).unwrap();
        assert_eq!(on.verdict(), off.verdict(), "{id:?} k={k}");
        assert_eq!(on.witness, off.witness);
    }
}

#[test]
fn sat_certificates_carry_verified_witnesses() {
    for (id, k) in [(GadgetId::Theorem2, 5), (GadgetId::Theorem2, 6), (GadgetId::Theorem3, 5)] {
        let cert = certify(id, k, &CertifyOptions::default()).unwrap();
        assert_eq!(cert.verdict(), CertVerdict::Sat);
        let g = id.gadget().graph;
        let w = cert.witness.clone().unwrap();
        assert!(w.iter().all(|&c| (c as usize) < k));
        assert!(suffix_dfs_nonrepetitive(&g, &w));
        assert!(cert.cross_checks.iter().any(|c| c.name == "witness_verified" && c.passed));
    }
}

/// Exhaustive path enumeration on the 184-vertex gadget visits a few
/// million paths, so use the suffix-square DFS instead of materializing
/// them.
fn suffix_dfs_nonrepetitive(g: &Graph, colours: &[u8]) -> bool {
    fn go(g: &Graph, colours: &[u8], v: Vertex, on: &mut [bool], w: &mut Vec<u8>) -> bool {
        for &u in g.neighbours(v) {
            if on[u] {
                continue;
            }
            w.push(colours[u]);
            let l = w.len();
            let square = (1..=l / 2).any(|h| w[l - 2 * h..l - h] == w[l - h..]);
            on[u] = true;
            let ok = !square && go(g, colours, u, on, w);
            on[u] = false;
            w.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut on = vec![false; g.n()];
    (0..g.n()).all(|s| {
        on[s] = true;
        let ok = go(g, colours, s, &mut on, &mut vec![colours[s]]);
        on[s] = false;
        ok
    })
}

#[test]
fn certificates_serialize() {
    let cert = certify(GadgetId::Theorem2, 4, &CertifyOptions::default()).unwrap();
    let json = serde_json::to_value(&cert).unwrap();
    assert_eq!(json["claim"]["verdict"], "UNSAT");
    assert_eq!(json["claim"]["graph"], "theorem2");
    assert!(json["counts"]["fan_profiles"].as_u64().unwrap() > 0);
}
