use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use nonrep::certify::{self as cert, CertVerdict, CertifyOptions, GadgetId};
use nonrep::graph::{find_repetitive_path_with, VerifyError, VerifyOptions};
use nonrep::planarmap::{self, MapError, PlanarMap};
use nonrep::solver::{self, SolveError, ThueNumber, VertexOrder};
use nonrep::{find_repetitive_path, find_square, gadgets, thue_word, SolveOptions, Verdict};
use serde::Serialize;
use serde_json::json;

use crate::files::{self, ColouringFile, FaceColouringFile, GraphFile};
use crate::{Format, Status};

pub struct Context {
    pub format: Format,
    pub parallel: bool,
}

impl Context {
    /// Prints `value` as JSON or `text` as is, depending on `--format`.
    fn report<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<()> {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
            Format::Text => println!("{}", text()),
        }
        Ok(())
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn write_artifact<T: Serialize>(output: Option<&Path>, value: &T) -> Result<()> {
    match output {
        Some(path) => files::write_json(path, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

pub fn check(ctx: &Context, graph: &Path, colouring: &Path, budget: Option<u64>) -> Result<Status> {
    let g = files::read_graph(graph)?.to_graph()?;
    let c = files::read_colouring(colouring)?.to_colouring()?;
    let opts = VerifyOptions { node_budget: budget, parallel: ctx.parallel };
    match find_repetitive_path_with(&g, &c, &opts) {
        Ok(None) => {
            ctx.report(&json!({ "valid": true }), || "VALID".into())?;
            Ok(Status::Ok)
        }
        Ok(Some(w)) => {
            let word = w.colour_word(&c);
            ctx.report(&json!({ "valid": false, "path": w.vertices, "word": word }), || {
                format!("REPETITIVE\npath: {}\nword: {}", join(&w.vertices), word)
            })?;
            Ok(Status::Falsified)
        }
        Err(VerifyError::BudgetExhausted(n)) => {
            ctx.report(&json!({ "valid": null, "budget_exhausted": n }), || format!("INDETERMINATE (budget of {n} nodes exhausted)"))?;
            Ok(Status::Budget)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn solve(ctx: &Context, graph: &Path, k: usize, budget: Option<u64>, order: VertexOrder, output: Option<&Path>) -> Result<Status> {
    let g = files::read_graph(graph)?.to_graph()?;
    let opts = SolveOptions { node_budget: budget, order, parallel: ctx.parallel };
    let r = solver::solve(&g, k, &opts)?;
    let (status, colours) = match &r.verdict {
        Verdict::Sat(c) => (Status::Ok, Some(c.colours().to_vec())),
        Verdict::Unsat => (Status::Falsified, None),
        Verdict::Indeterminate => (Status::Budget, None),
    };
    if let (Some(path), Verdict::Sat(c)) = (output, &r.verdict) {
        files::write_json(path, &ColouringFile::from_colouring(c))?;
    }
    let value = json!({ "verdict": r.verdict.name(), "k": k, "colours": colours, "stats": r.stats });
    ctx.report(&value, || {
        let mut s = format!("{} with {k} colours ({} nodes, {} prunes, {:?})", r.verdict.name(), r.stats.nodes, r.stats.prunes, r.stats.elapsed);
        if let Some(cs) = &colours {
            s.push_str(&format!("\ncolours: {}", join(cs)));
        }
        s
    })?;
    Ok(status)
}

pub fn thue_number(ctx: &Context, graph: &Path, max_colours: usize, budget: Option<u64>, output: Option<&Path>) -> Result<Status> {
    let g = files::read_graph(graph)?.to_graph()?;
    let opts = SolveOptions { node_budget: budget, parallel: ctx.parallel, ..SolveOptions::default() };
    match solver::thue_number(&g, max_colours, &opts) {
        Ok(ThueNumber::Exactly { k, colouring }) => {
            if let Some(path) = output {
                files::write_json(path, &ColouringFile::from_colouring(&colouring))?;
            }
            ctx.report(&json!({ "thue_number": k, "colours": colouring.colours() }), || {
                format!("thue number {k}\ncolours: {}", join(colouring.colours()))
            })?;
            Ok(Status::Ok)
        }
        Ok(ThueNumber::GreaterThan(k)) => {
            ctx.report(&json!({ "thue_number": null, "greater_than": k }), || format!("thue number > {k}"))?;
            Ok(Status::Falsified)
        }
        Err(SolveError::Indeterminate) => {
            ctx.report(&json!({ "thue_number": null, "budget_exhausted": true }), || "INDETERMINATE (budget exhausted)".into())?;
            Ok(Status::Budget)
        }
        Err(e) => Err(e.into()),
    }
}

pub enum MapSource {
    File(PathBuf),
    Random { n: usize, density: f64, seed: u64 },
}

pub fn faces(ctx: &Context, source: MapSource, output: Option<&Path>) -> Result<Status> {
    let m: PlanarMap = match source {
        MapSource::File(path) => files::read_embedding(&path)?.to_map()?,
        MapSource::Random { n, density, seed } => planarmap::random_outerplanar_map(n, density, seed)?,
    };
    let fs = planarmap::trace_faces(&m)?;
    let fc = match planarmap::colour_faces_outerplanar(&m) {
        Ok(fc) => fc,
        Err(MapError::NotOuterplanar(missing)) => {
            return Err(anyhow!("map is not outerplanar: vertices {} are not on the outer face", join(&missing)));
        }
        Err(e) => return Err(e.into()),
    };
    let dual = planarmap::dual_graph(&m, &fs);
    let verified = find_repetitive_path(&dual, &fc.as_dual_colouring())?.is_none();
    let file = FaceColouringFile::new(&m, &fs, &dual, &fc, verified);
    if let Some(path) = output {
        files::write_json(path, &file)?;
    }
    ctx.report(&file, || {
        let mut s = String::new();
        for (i, f) in file.faces.iter().enumerate() {
            let outer = if i == file.outer_face { " (outer)" } else { "" };
            s.push_str(&format!("face {i}: colour {} walk {}{outer}\n", f.colour, join(&f.walk)));
        }
        s.push_str(&format!("{} faces, {} colours, {}", file.faces.len(), file.colours_used, if verified { "verified" } else { "NOT verified" }));
        s
    })?;
    Ok(if verified { Status::Ok } else { Status::Falsified })
}

pub fn gadget(ctx: &Context, name: &str, output: Option<&Path>) -> Result<Status> {
    let g = gadgets::by_name(name).ok_or_else(|| anyhow!("unknown gadget {name:?}; try theorem2, theorem3, path-N or fan-N"))?;
    let file = GraphFile::from_gadget(&g);
    write_artifact(output, &file)?;
    if output.is_some() && ctx.format == Format::Text {
        println!("{}: {} vertices, {} edges", g.name, g.graph.n(), g.graph.edge_count());
    }
    Ok(Status::Ok)
}

pub fn certify(
    ctx: &Context,
    name: &str,
    k: usize,
    budget: Option<u64>,
    dedup: bool,
    cross_check: bool,
    output: Option<&Path>,
) -> Result<Status> {
    let id: GadgetId = name.parse()?;
    let defaults = CertifyOptions::default();
    let opts = CertifyOptions {
        node_budget: budget.or(defaults.node_budget),
        dedup,
        parallel: ctx.parallel,
        solver_cross_check: cross_check,
        ..defaults
    };
    let c = cert::certify(id, k, &opts)?;
    if let Some(path) = output {
        files::write_json(path, &c)?;
    }
    ctx.report(&c, || {
        let mut s = format!("{} with {k} colours: {:?}", id.name(), c.verdict());
        s.push_str(&format!(
            "\nfan profiles {}, candidates {}, nodes {}, word checks {}, deduplicated {}, {} ms",
            c.counts.fan_profiles, c.counts.candidate_profiles, c.counts.nodes, c.counts.word_checks, c.counts.states_deduplicated, c.wall_time_ms
        ));
        for x in &c.cross_checks {
            s.push_str(&format!("\n{}: {} ({})", x.name, if x.passed { "passed" } else { "FAILED" }, x.detail));
        }
        if let Some(note) = &c.note {
            s.push_str(&format!("\n{note}"));
        }
        s
    })?;
    Ok(match c.verdict() {
        CertVerdict::Sat => Status::Ok,
        CertVerdict::Unsat => Status::Falsified,
        CertVerdict::Indeterminate => Status::Budget,
    })
}

pub fn words_thue(ctx: &Context, length: usize) -> Result<Status> {
    let w = thue_word(length);
    let square_free = find_square(&w).is_none();
    ctx.report(&json!({ "length": length, "word": w, "square_free": square_free }), || {
        w.iter().map(|d| char::from(b'0' + d)).collect()
    })?;
    Ok(Status::Ok)
}

pub fn words_square(ctx: &Context, word: &str) -> Result<Status> {
    let w = files::parse_word(word)?;
    match find_square(&w) {
        None => {
            ctx.report(&json!({ "square": null }), || "square-free".into())?;
            Ok(Status::Ok)
        }
        Some(sq) => {
            let half = &w[sq.start..sq.start + sq.half_len];
            ctx.report(&json!({ "square": { "start": sq.start, "half_len": sq.half_len, "half": half } }), || {
                format!("square at {} with half length {}: ({}) ({})", sq.start, sq.half_len, join(half), join(half))
            })?;
            Ok(Status::Falsified)
        }
    }
}
