//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use nonrep::certify::{certify, CertVerdict, CertifyOptions, GadgetId};
use nonrep::gadgets;
use nonrep::planarmap::{colour_faces_outerplanar, dual_graph, random_outerplanar_map, trace_faces, weak_dual, OUTER_FACE_COLOUR};
use nonrep::solver::colour_forest;
use nonrep::words::is_square;
use nonrep::{find_repetitive_path, find_square, solve, thue_word, Graph, SolveOptions, Verdict, VertexColouring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed <= limit, format!("{what} took {elapsed:.2?}, limit {limit:?}"))
}

fn binary_words() -> Outcome {
    for bits in 0u8..16 {
        let w: Vec<u8> = (0..4).map(|i| bits >> i & 1).collect();
        ensure(find_square(&w).is_some(), format!("{w:?} reported square-free"))?;
        ensure(naive_has_square(&w), format!("oracle disagrees on {w:?}"))?;
    }
    Ok("all 16 words contain a square".into())
}

fn long_thue_word() -> Outcome {
    let start = Instant::now();
    let w = thue_word(10_000);
    let found = find_square(&w);
    let elapsed = start.elapsed();
    ensure(w.len() == 10_000 && w.fits_alphabet(3), "wrong length or alphabet")?;
    ensure(found.is_none(), format!("square found: {found:?}"))?;
    within(elapsed, Duration::from_secs(1), "generation and scan")?;
    Ok(format!("square-free, {elapsed:.2?}"))
}

fn verified_sat(g: &Graph, k: usize) -> Result<u64, String> {
    let r = solve(g, k, &SolveOptions::default()).map_err(|e| e.to_string())?;
    match r.verdict {
        Verdict::Sat(c) => {
            ensure(brute_nonrepetitive(g, c.colours()), "witness fails the brute-force oracle")?;
            Ok(r.stats.nodes)
        }
        v => Err(format!("expected SAT at k={k}, got {}", v.name())),
    }
}

fn unsat_nodes(g: &Graph, k: usize) -> Result<u64, String> {
    let r = solve(g, k, &SolveOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.verdict.is_unsat(), format!("expected UNSAT at k={k}, got {}", r.verdict.name()))?;
    Ok(r.stats.nodes)
}

fn path_needs_three() -> Outcome {
    let p4 = gadgets::path_graph(4).graph;
    unsat_nodes(&p4, 2)?;
    verified_sat(&p4, 3)?;
    Ok("P4: UNSAT at 2, verified SAT at 3".into())
}

fn fan_needs_four() -> Outcome {
    let f4 = gadgets::fan(4).graph;
    let nodes = unsat_nodes(&f4, 3)?;
    ensure(nodes <= 243, format!("{nodes} assignments at k=3"))?;
    verified_sat(&f4, 4)?;
    Ok(format!("F4: UNSAT at 3 after {nodes} assignments, verified SAT at 4"))
}

fn outerplanar_gadget() -> Outcome {
    let g = gadgets::theorem2_graph().graph;
    let start = Instant::now();
    let flat_nodes = unsat_nodes(&g, 4)?;
    within(start.elapsed(), Duration::from_secs(600), "flat solver")?;

    let start = Instant::now();
    let four = certify(GadgetId::Theorem2, 4, &CertifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(four.verdict() == CertVerdict::Unsat, format!("certifier says {:?} at k=4", four.verdict()))?;
    let five = certify(GadgetId::Theorem2, 5, &CertifyOptions::default()).map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(60), "certifier")?;
    ensure(five.verdict() == CertVerdict::Sat, format!("certifier says {:?} at k=5", five.verdict()))?;
    let w = five.witness.ok_or("SAT without witness")?;
    ensure(brute_nonrepetitive(&g, &w), "k=5 witness fails the brute-force oracle")?;
    Ok(format!("k=4 UNSAT by solver ({flat_nodes} nodes) and certifier; k=5 SAT, witness verified"))
}

fn planar_gadget() -> Outcome {
    let start = Instant::now();
    let cert = certify(GadgetId::Theorem3, 6, &CertifyOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1800), "certifier")?;
    match cert.verdict() {
        CertVerdict::Unsat => Ok(format!("UNSAT in {elapsed:.2?}")),
        CertVerdict::Indeterminate => Err(format!("INDETERMINATE after {elapsed:.2?}: {:?}", cert.note)),
        CertVerdict::Sat => {
            let g = gadgets::theorem3_graph().graph;
            let w = cert.witness.clone().ok_or("SAT without witness")?;
            let c = VertexColouring::new(w.clone(), 6).map_err(|e| e.to_string())?;
            let flat_ok = find_repetitive_path(&g, &c).map_err(|e| e.to_string())?.is_none();
            let used = c.colours_used();
            let five = certify(GadgetId::Theorem3, 5, &CertifyOptions::default()).map_err(|e| e.to_string())?;
            Err(format!(
                "expected UNSAT, got SAT: a {used}-colour witness that the path verifier {} (centres {:?}, r {}, s {}); k=5 gives {:?}",
                if flat_ok { "accepts" } else { "rejects" },
                &w[175..182],
                w[182],
                w[183],
                five.verdict()
            ))
        }
    }
}

fn random_face_colourings() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut most = 0;
    for seed in 0..100 {
        let n = rng.gen_range(3..=12);
        let density = rng.gen_range(0.0..=1.0);
        let m = random_outerplanar_map(n, density, seed).map_err(|e| e.to_string())?;
        let fs = trace_faces(&m).map_err(|e| e.to_string())?;
        let weak = weak_dual(&m, &fs);
        ensure(weak.graph.edge_count() + weak.graph.components().len() == weak.graph.n(), format!("seed {seed}: weak dual has a cycle"))?;
        let fc = colour_faces_outerplanar(&m).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(fc.colours_used() <= 5, format!("seed {seed}: {} colours", fc.colours_used()))?;
        let unique = fc.colours.iter().enumerate().all(|(f, &c)| (c == OUTER_FACE_COLOUR) == (f == m.outer_face()));
        ensure(unique, format!("seed {seed}: outer face colour shared"))?;
        ensure(brute_nonrepetitive(&dual_graph(&m, &fs), &fc.colours), format!("seed {seed}: dual colouring repetitive"))?;
        most = most.max(fc.colours_used());
    }
    within(start.elapsed(), Duration::from_secs(10), "100 maps")?;
    Ok(format!("100 maps verified, at most {most} colours, {:.2?}", start.elapsed()))
}

fn abstraction_soundness() -> Outcome {
    use nonrep::certify::{compose_star, profile_of};
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases = 0;
    while cases < 1000 {
        let k = rng.gen_range(3..=4);
        let children = rng.gen_range(1..=3);
        let mut edges = Vec::new();
        let mut parts = Vec::new();
        let mut offset = 0;
        for _ in 0..children {
            let s = rng.gen_range(1..=3);
            let g = random_tree(&mut rng, s);
            let root = rng.gen_range(0..s);
            edges.extend(g.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
            parts.push((g, root, offset));
            offset += s;
        }
        let centre = offset;
        edges.extend(parts.iter().map(|(_, r, off)| (r + off, centre)));
        let glued = Graph::new(centre + 1, edges).map_err(|e| e.to_string())?;
        let colours = random_colours(&mut rng, centre + 1, k);
        let profiles: Option<Vec<_>> = parts
            .iter()
            .map(|(g, root, off)| profile_of(g, *root, &VertexColouring::new(colours[*off..off + g.n()].to_vec(), k).unwrap()).unwrap())
            .collect();
        let composed = profiles.and_then(|ps| compose_star(colours[centre], &ps)).is_some();
        ensure(composed == brute_nonrepetitive(&glued, &colours), format!("disagreement on {:?} {:?}", glued.edges(), colours))?;
        cases += 1;
    }
    let g = gadgets::theorem2_graph().graph;
    for k in 3..=5 {
        let cert = certify(GadgetId::Theorem2, k, &CertifyOptions::default()).map_err(|e| e.to_string())?;
        let flat = solve(&g, k, &SolveOptions::default()).map_err(|e| e.to_string())?;
        let same = matches!((&flat.verdict, cert.verdict()), (Verdict::Sat(_), CertVerdict::Sat) | (Verdict::Unsat, CertVerdict::Unsat));
        ensure(same, format!("k={k}: solver {} vs certifier {:?}", flat.verdict.name(), cert.verdict()))?;
    }
    Ok(format!("{cases} glued stars agree; certifier matches solver for k = 3, 4, 5"))
}

fn verifier_oracle() -> Outcome {
    let mut checked = 0u64;
    for n in 1..=5 {
        for mask in 0..1u64 << (n * (n - 1) / 2) {
            let g = graph_from_mask(n, mask);
            let paths = all_simple_paths(&g);
            for k in 1..=3 {
                let mut bad = None;
                any_colouring(n, k, |c| {
                    checked += 1;
                    let fast = find_repetitive_path(&g, &VertexColouring::new(c.to_vec(), k).unwrap()).unwrap().is_none();
                    if fast != brute_nonrepetitive_paths(&paths, c) {
                        bad = Some(c.to_vec());
                    }
                    bad.is_some()
                });
                if let Some(c) = bad {
                    return Err(format!("n={n} mask={mask} colours {c:?}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=7);
        let k = rng.gen_range(1..=3);
        let p = rng.gen_range(0.1..0.9);
        let g = random_graph(&mut rng, n, p);
        let c = random_colours(&mut rng, n, k);
        let w = find_repetitive_path(&g, &VertexColouring::new(c.clone(), k).unwrap()).unwrap();
        ensure(w.is_none() == brute_nonrepetitive(&g, &c), format!("random case {:?} {c:?}", g.edges()))?;
        if let Some(w) = w {
            let word: Vec<u8> = w.vertices.iter().map(|&v| c[v]).collect();
            ensure(is_square(&word), "witness word is not a square")?;
        }
        checked += 1;
    }
    Ok(format!("{checked} graph/colouring pairs, zero disagreements"))
}

fn planar_gadget_structure() -> Outcome {
    let t3 = gadgets::theorem3_graph();
    let g = &t3.graph;
    ensure(g.n() == 184 && g.edge_count() == 295, format!("{} vertices, {} edges", g.n(), g.edge_count()))?;
    let deg = g.degrees();
    let eights: Vec<usize> = (0..g.n()).filter(|&v| deg[v] == 8).collect();
    let sevens = deg.iter().filter(|&&d| d == 7).count();
    ensure(eights.len() == 2 && sevens == 7, format!("{} degree-8 and {sevens} degree-7 vertices", eights.len()))?;
    ensure(g.has_edge(eights[0], eights[1]), "degree-8 vertices not adjacent")?;
    let t2 = gadgets::theorem2_graph().graph;
    let parts = g.components_without(&eights);
    ensure(parts.len() == 7, format!("{} components", parts.len()))?;
    ensure(parts.iter().all(|(c, _)| c.is_isomorphic(&t2)), "a component is not a copy of the outerplanar gadget")?;
    let m = t3.embedding.as_ref().ok_or("no embedding")?;
    let f = trace_faces(m).map_err(|e| e.to_string())?.len() as i64;
    ensure(184 - 295 + f == 2, format!("V - E + F = {}", 184 - 295 + f))?;
    Ok(format!("184/295, degrees ok, 7 diamonds isomorphic, F = {f}"))
}

fn forest_colouring() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..50 {
        let n = rng.gen_range(1..=40);
        let t = random_tree(&mut rng, n);
        let c = colour_forest(&t).map_err(|e| format!("tree {i}: {e}"))?;
        ensure(c.colours_used() <= 4, format!("tree {i}: {} colours", c.colours_used()))?;
        let ok = find_repetitive_path(&t, &c).map_err(|e| e.to_string())?.is_none();
        ensure(ok, format!("tree {i}: colouring is repetitive"))?;
    }
    within(start.elapsed(), Duration::from_secs(30), "50 trees")?;
    Ok(format!("50 trees, all within 4 colours, {:.2?}", start.elapsed()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("binary words of length 4 all contain a square", binary_words),
        ("thue_word(10000) is square-free", long_thue_word),
        ("P4 needs exactly three colours", path_needs_three),
        ("F4 needs exactly four colours", fan_needs_four),
        ("outerplanar gadget needs five colours", outerplanar_gadget),
        ("planar gadget has no 6-colouring", planar_gadget),
        ("random outerplanar maps take five face colours", random_face_colourings),
        ("profile composition is sound", abstraction_soundness),
        ("path verifier matches brute force", verifier_oracle),
        ("planar gadget structure", planar_gadget_structure),
        ("random trees take four colours", forest_colouring),
    ];
    // criteria report their own failures; keep the default hook quiet
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
