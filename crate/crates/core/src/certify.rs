//! Lower-bound certification for the gadget graphs by composing boundary
//! profiles across cut vertices.
//!
//! A [`BoundaryProfile`] records, for a coloured component hanging off an
//! attachment vertex, the colour words of every simple path that starts at
//! the attachment vertex and stays inside the component. When components
//! are glued at a cut vertex, every simple path of the result either stays
//! in one component or crosses the cut vertex once, so the profiles carry
//! exactly the information needed to decide non-repetitiveness of the
//! glued colouring.
//!
//! Profiles are prefix-closed. Compatibility checks only look at the
//! *maximal* words: if `u` is a prefix of `u'` then `rev(u)·x·v` is a factor
//! of `rev(u')·x·v`, so any square in the former shows up in the latter.
//!
//! The outerplanar gadget is a star of five fans, decided by a depth-first
//! search over partial stars. In the planar gadget each diamond is reduced
//! to its centre colour and exit words (the maximal words read from the
//! centre's neighbours into its fans); only diamonds whose exits are minimal
//! under the prefix order are kept, and seven of them are then matched
//! across the kernel `r`, `s`.
//!
//! Colour symmetry is broken by fixing the centre of the outerplanar gadget
//! to `0`, and `r`, `s` to `0`, `1` with diamond centres introduced in
//! first-use order from `2`. Fans within a star and diamonds within the
//! planar gadget are taken in non-decreasing index order. Both are sound
//! because renaming colours and permuting isomorphic branches preserve
//! non-repetitiveness.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gadgets::{self, DIAMONDS, FANS_PER_DIAMOND, FAN_PATH, FAN_SIZE};
use crate::graph::{find_repetitive_path, find_repetitive_path_with, Colour, Graph, Vertex, VertexColouring, VerifyError, VerifyOptions};
use crate::solver::{self, SolveOptions};
use crate::words::{find_square, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("root vertex {0} is not in the component")]
    NoSuchRoot(Vertex),
    #[error("profile word {0} does not start with the root colour")]
    WrongRoot(Word),
    #[error("profile word {0} contains a square")]
    RepetitiveWord(Word),
    #[error("exhaustive enumeration needs {needed} colourings, guard is {guard}")]
    SizeGuard { needed: u128, guard: u64 },
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("unknown gadget {0:?}")]
    UnknownGadget(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// The set of colour words read along simple paths leaving a component
/// through its attachment vertex (including the one-vertex path).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryProfile {
    root_colour: Colour,
    words: Vec<Word>,
    maximal: Vec<Word>,
}

impl BoundaryProfile {
    /// Builds a profile from words that all start with `root_colour`. The
    /// set is closed under prefixes and always contains `(root_colour)`.
    pub fn new(root_colour: Colour, words: impl IntoIterator<Item = Word>) -> Result<Self, CertifyError> {
        let mut all = std::collections::BTreeSet::new();
        all.insert(Word::new(vec![root_colour]));
        for w in words {
            if w.first() != Some(&root_colour) {
                return Err(CertifyError::WrongRoot(w));
            }
            if !w.is_square_free() {
                return Err(CertifyError::RepetitiveWord(w));
            }
            for len in 1..=w.len() {
                all.insert(Word::from(&w[..len]));
            }
        }
        Ok(Self::from_closed(root_colour, all.into_iter().collect()))
    }

    /// `words` must be sorted, deduplicated and prefix-closed.
    fn from_closed(root_colour: Colour, words: Vec<Word>) -> Self {
        let maximal = maximal_words(&words);
        BoundaryProfile { root_colour, words, maximal }
    }

    pub fn root_colour(&self) -> Colour {
        self.root_colour
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Words that are not a proper prefix of another word of the profile.
    pub fn maximal_words(&self) -> &[Word] {
        &self.maximal
    }

    pub fn contains(&self, w: &[Colour]) -> bool {
        self.words.binary_search_by(|x| x.as_slice().cmp(w)).is_ok()
    }

    /// Colours appearing right after the root, i.e. on the attachment
    /// vertex's neighbours inside the component.
    pub fn neighbour_colours(&self) -> Vec<Colour> {
        let mut cs: Vec<Colour> = self.words.iter().filter(|w| w.len() == 2).map(|w| w[1]).collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }
}

impl fmt::Display for BoundaryProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root {} {{", self.root_colour)?;
        for (i, w) in self.maximal.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({w})")?;
        }
        f.write_str("}")
    }
}

/// Maximal elements of a sorted word list under the prefix order. In sorted
/// order a word's extensions follow it directly, so only the successor
/// needs checking.
fn maximal_words(sorted: &[Word]) -> Vec<Word> {
    sorted
        .iter()
        .enumerate()
        .filter(|&(i, w)| sorted.get(i + 1).is_none_or(|next| !next.starts_with(w)))
        .map(|(_, w)| w.clone())
        .collect()
}

fn maximal_of_union(a: &[Word], b: &[Word]) -> Vec<Word> {
    let mut all: Vec<Word> = a.iter().chain(b).cloned().collect();
    all.sort_unstable();
    all.dedup();
    maximal_words(&all)
}

/// Reusable buffer for `rev(left) · mid · right` square tests.
#[derive(Default)]
struct Joiner {
    buf: Vec<Colour>,
    checks: u64,
}

impl Joiner {
    fn has_square(&mut self, left: &[Colour], mid: &[Colour], right: &[Colour]) -> bool {
        self.checks += 1;
        self.buf.clear();
        self.buf.extend(left.iter().rev());
        self.buf.extend_from_slice(mid);
        self.buf.extend_from_slice(right);
        find_square(&self.buf).is_some()
    }
}

/// Profile of `component` at `root` under colouring `c`, or `None` when `c`
/// is already repetitive inside the component.
pub fn profile_of(component: &Graph, root: Vertex, c: &VertexColouring) -> Result<Option<BoundaryProfile>, CertifyError> {
    if root >= component.n() {
        return Err(CertifyError::NoSuchRoot(root));
    }
    if find_repetitive_path(component, c)?.is_some() {
        return Ok(None);
    }
    let mut words = Vec::new();
    let mut on_path = vec![false; component.n()];
    let mut word = vec![c.colour(root)];
    on_path[root] = true;
    collect_path_words(component, c, root, &mut on_path, &mut word, &mut words);
    words.sort_unstable();
    words.dedup();
    Ok(Some(BoundaryProfile::from_closed(c.colour(root), words)))
}

fn collect_path_words(g: &Graph, c: &VertexColouring, v: Vertex, on_path: &mut [bool], word: &mut Vec<Colour>, out: &mut Vec<Word>) {
    out.push(Word::from(word.as_slice()));
    for &u in g.neighbours(v) {
        if on_path[u] {
            continue;
        }
        on_path[u] = true;
        word.push(c.colour(u));
        collect_path_words(g, c, u, on_path, word, out);
        word.pop();
        on_path[u] = false;
    }
}

/// A profile together with one colouring of the component realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileEntry {
    pub profile: BoundaryProfile,
    pub witness: VertexColouring,
}

/// Default cap on the number of colourings [`enumerate_profiles`] may visit.
pub const DEFAULT_PROFILE_GUARD: u64 = 50_000_000;

/// All distinct profiles of `component` at `root` over every non-repetitive
/// colouring with colours `0..k`, sorted. Each entry keeps the first
/// colouring (in odometer order) that produced it.
pub fn enumerate_profiles(component: &Graph, root: Vertex, k: usize, guard: u64) -> Result<Vec<ProfileEntry>, CertifyError> {
    if root >= component.n() {
        return Err(CertifyError::NoSuchRoot(root));
    }
    let n = component.n();
    let needed = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > guard as u128 || k > 255 {
        return Err(CertifyError::SizeGuard { needed, guard });
    }
    let mut seen: BTreeMap<BoundaryProfile, VertexColouring> = BTreeMap::new();
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut colours = vec![0 as Colour; n];
    loop {
        let c = VertexColouring::new(colours.clone(), k).map_err(|e| CertifyError::Internal(e.to_string()))?;
        if let Some(p) = profile_of(component, root, &c)? {
            seen.entry(p).or_insert(c);
        }
        // odometer, least significant digit first
        let mut i = 0;
        loop {
            if i == n {
                return Ok(seen.into_iter().map(|(profile, witness)| ProfileEntry { profile, witness }).collect());
            }
            colours[i] += 1;
            if (colours[i] as usize) < k {
                break;
            }
            colours[i] = 0;
            i += 1;
        }
    }
}

/// A partially built star: a centre vertex with some children attached.
/// Keeps the maximal words (as read from each child's root) over all
/// attached children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Star {
    centre: Colour,
    child_words: Vec<Word>,
}

impl Star {
    fn new(centre: Colour) -> Self {
        Star { centre, child_words: Vec::new() }
    }

    /// Attaches a child, or `None` if some path through the centre becomes
    /// repetitive.
    fn attach(&self, child: &BoundaryProfile, j: &mut Joiner) -> Option<Star> {
        let centre = [self.centre];
        for v in child.maximal_words() {
            if j.has_square(&[], &centre, v) {
                return None;
            }
            for u in &self.child_words {
                if j.has_square(u, &centre, v) {
                    return None;
                }
            }
        }
        Some(Star { centre: self.centre, child_words: maximal_of_union(&self.child_words, child.maximal_words()) })
    }

    fn into_profile(self) -> BoundaryProfile {
        let mut words: Vec<Word> = vec![Word::new(vec![self.centre])];
        for w in &self.child_words {
            for len in 1..=w.len() {
                let mut x = Vec::with_capacity(len + 1);
                x.push(self.centre);
                x.extend_from_slice(&w[..len]);
                words.push(Word::new(x));
            }
        }
        words.sort_unstable();
        words.dedup();
        BoundaryProfile::from_closed(self.centre, words)
    }
}

/// Profile of a new centre vertex coloured `centre_colour` joined to the
/// root of each child, or `None` if the glued colouring is repetitive.
///
/// The centre is a cut vertex, so a path of the glued component either
/// stays in one child, or reads `centre · v`, or `rev(u) · centre · v` with
/// `u` and `v` from two different children.
pub fn compose_star(centre_colour: Colour, children: &[BoundaryProfile]) -> Option<BoundaryProfile> {
    let mut j = Joiner::default();
    let mut star = Star::new(centre_colour);
    for child in children {
        star = star.attach(child, &mut j)?;
    }
    Some(star.into_profile())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetId {
    Theorem2,
    Theorem3,
}

impl GadgetId {
    pub fn name(self) -> &'static str {
        match self {
            GadgetId::Theorem2 => "theorem2",
            GadgetId::Theorem3 => "theorem3",
        }
    }

    pub fn gadget(self) -> gadgets::Gadget {
        match self {
            GadgetId::Theorem2 => gadgets::theorem2_graph(),
            GadgetId::Theorem3 => gadgets::theorem3_graph(),
        }
    }
}

impl std::str::FromStr for GadgetId {
    type Err = CertifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theorem2" => Ok(GadgetId::Theorem2),
            "theorem3" => Ok(GadgetId::Theorem3),
            other => Err(CertifyError::UnknownGadget(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CertVerdict {
    Sat,
    Unsat,
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Cap on search nodes (profile attachment attempts).
    pub node_budget: Option<u64>,
    /// Cap on colourings visited while enumerating fan profiles.
    pub profile_guard: u64,
    /// Remember failed partial stars (outerplanar gadget only).
    pub dedup: bool,
    /// Use the rayon pool for per-colour enumeration and witness checks.
    pub parallel: bool,
    /// Also run the flat solver and record whether it agrees.
    pub solver_cross_check: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            node_budget: Some(2_000_000_000),
            profile_guard: DEFAULT_PROFILE_GUARD,
            dedup: true,
            parallel: false,
            solver_cross_check: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertCounts {
    pub fan_colourings: u64,
    pub fan_profiles: u64,
    /// Fan profiles that take part in at least one usable star.
    pub candidate_profiles: u64,
    /// Attempts to attach a fan or place a diamond.
    pub nodes: u64,
    /// Concatenated words tested for squares.
    pub word_checks: u64,
    /// Partial stars skipped as already seen, plus diamonds dropped as
    /// dominated.
    pub states_deduplicated: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub graph: String,
    pub k: usize,
    pub verdict: CertVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub claim: Claim,
    pub method: String,
    pub counts: CertCounts,
    pub cross_checks: Vec<CrossCheck>,
    /// Full colouring of the gadget for SAT verdicts.
    pub witness: Option<Vec<Colour>>,
    pub wall_time_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Certificate {
    pub fn verdict(&self) -> CertVerdict {
        self.claim.verdict
    }

    /// True when every recorded cross-check passed.
    pub fn cross_checks_passed(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }
}

struct OutOfBudget;

struct Budget {
    limit: Option<u64>,
    used: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<(), OutOfBudget> {
        self.used += 1;
        match self.limit {
            Some(l) if self.used > l => Err(OutOfBudget),
            _ => Ok(()),
        }
    }
}

/// Decides whether the named gadget has a non-repetitive `k`-colouring.
///
/// SAT verdicts carry a full colouring that has been re-checked with the
/// flat path verifier. UNSAT means the symmetry-reduced profile space was
/// exhausted. Running out of budget or hitting the enumeration guard gives
/// INDETERMINATE.
pub fn certify(id: GadgetId, k: usize, opts: &CertifyOptions) -> Result<Certificate, CertifyError> {
    let started = Instant::now();
    let mut counts = CertCounts::default();
    let mut cross_checks = Vec::new();
    let gadget = id.gadget();

    let fan = gadgets::fan(FAN_PATH);
    let rivet = fan.role("rivet").expect("fan has a rivet");
    let (verdict, witness, note) = match enumerate_profiles(&fan.graph, rivet, k, opts.profile_guard) {
        Err(CertifyError::SizeGuard { needed, guard }) => {
            (CertVerdict::Indeterminate, None, Some(format!("fan enumeration needs {needed} colourings, guard {guard}")))
        }
        Err(e) => return Err(e),
        Ok(fans) => {
            counts.fan_colourings = (k as u64).pow(FAN_SIZE as u32);
            counts.fan_profiles = fans.len() as u64;
            let mut budget = Budget { limit: opts.node_budget, used: 0 };
            let mut joiner = Joiner::default();
            let found = match id {
                GadgetId::Theorem2 => certify_star(&fans, k, opts, &mut budget, &mut joiner, &mut counts),
                GadgetId::Theorem3 => certify_kernel(&fans, k, opts.parallel, &mut budget, &mut joiner, &mut counts),
            };
            counts.nodes = budget.used;
            counts.word_checks = joiner.checks;
            match found {
                Err(OutOfBudget) => (CertVerdict::Indeterminate, None, Some(format!("node budget {:?} exhausted", opts.node_budget))),
                Ok(None) => (CertVerdict::Unsat, None, None),
                Ok(Some(colours)) => (CertVerdict::Sat, Some(colours), None),
            }
        }
    };

    if let Some(colours) = &witness {
        let c = VertexColouring::new(colours.clone(), k).map_err(|e| CertifyError::Internal(e.to_string()))?;
        let vopts = VerifyOptions { node_budget: None, parallel: opts.parallel };
        let passed = find_repetitive_path_with(&gadget.graph, &c, &vopts)?.is_none();
        cross_checks.push(CrossCheck {
            name: "witness_verified".into(),
            passed,
            detail: format!("path verifier on the full {}-vertex gadget", gadget.graph.n()),
        });
        if !passed {
            return Err(CertifyError::Internal("reconstructed witness is repetitive".into()));
        }
    }
    if opts.solver_cross_check && verdict != CertVerdict::Indeterminate {
        let sopts = SolveOptions { parallel: opts.parallel, ..SolveOptions::default() };
        let r = solver::solve(&gadget.graph, k, &sopts).map_err(|e| CertifyError::Internal(e.to_string()))?;
        let agrees = matches!(
            (&r.verdict, verdict),
            (solver::Verdict::Sat(_), CertVerdict::Sat) | (solver::Verdict::Unsat, CertVerdict::Unsat)
        );
        cross_checks.push(CrossCheck {
            name: "flat_solver_agrees".into(),
            passed: agrees,
            detail: format!("solver verdict {} after {} nodes", r.verdict.name(), r.stats.nodes),
        });
    }

    log::info!("certify {} k={k}: {:?} ({} nodes)", id.name(), verdict, counts.nodes);
    Ok(Certificate {
        claim: Claim { graph: id.name().into(), k, verdict },
        method: "profile-composition".into(),
        counts,
        cross_checks,
        witness,
        wall_time_ms: started.elapsed().as_millis() as u64,
        note,
    })
}

/// Writes the fan witnesses into a colouring of the full gadget. `slots[i]`
/// is the profile index used for global fan `i`.
fn place_fans(colours: &mut [Colour], fans: &[ProfileEntry], slots: &[usize]) {
    for (i, &p) in slots.iter().enumerate() {
        let base = i * FAN_SIZE;
        colours[base..base + FAN_SIZE].copy_from_slice(fans[p].witness.colours());
    }
}

/// Outerplanar gadget: a centre coloured 0 with five fans attached at their
/// rivets. Depth-first over non-decreasing fan indices; failed partial stars
/// are remembered when `opts.dedup` is set.
fn certify_star(
    fans: &[ProfileEntry],
    k: usize,
    opts: &CertifyOptions,
    budget: &mut Budget,
    j: &mut Joiner,
    counts: &mut CertCounts,
) -> Result<Option<Vec<Colour>>, OutOfBudget> {
    if k == 0 {
        return Ok(None);
    }
    let root = Star::new(0);
    let candidates: Vec<usize> = (0..fans.len()).filter(|&i| root.attach(&fans[i].profile, j).is_some()).collect();
    counts.candidate_profiles = candidates.len() as u64;

    struct Search<'a> {
        fans: &'a [ProfileEntry],
        candidates: &'a [usize],
        dedup: bool,
        failed: HashSet<(Star, usize, usize)>,
        chosen: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, star: &Star, from: usize, budget: &mut Budget, j: &mut Joiner, counts: &mut CertCounts) -> Result<bool, OutOfBudget> {
            let remaining = FANS_PER_DIAMOND - self.chosen.len();
            if remaining == 0 {
                return Ok(true);
            }
            if self.dedup && self.failed.contains(&(star.clone(), from, remaining)) {
                counts.states_deduplicated += 1;
                return Ok(false);
            }
            for ci in from..self.candidates.len() {
                budget.tick()?;
                let Some(next) = star.attach(&self.fans[self.candidates[ci]].profile, j) else {
                    continue;
                };
                self.chosen.push(self.candidates[ci]);
                if self.run(&next, ci, budget, j, counts)? {
                    return Ok(true);
                }
                self.chosen.pop();
            }
            if self.dedup {
                self.failed.insert((star.clone(), from, remaining));
            }
            Ok(false)
        }
    }

    let mut search = Search { fans, candidates: &candidates, dedup: opts.dedup, failed: HashSet::new(), chosen: Vec::new() };
    if !search.run(&root, 0, budget, j, counts)? {
        return Ok(None);
    }
    let mut colours = vec![0; FANS_PER_DIAMOND * FAN_SIZE + 1];
    place_fans(&mut colours, fans, &search.chosen);
    colours[FANS_PER_DIAMOND * FAN_SIZE] = 0;
    Ok(Some(colours))
}

const R_COLOUR: Colour = 0;
const S_COLOUR: Colour = 1;

/// A way to complete one diamond of the planar gadget: a centre colour, the
/// fans hanging off it, and the maximal words read from the centre's
/// neighbours into those fans.
#[derive(Debug, Clone)]
struct DiamondItem {
    centre: Colour,
    fans: Vec<usize>,
    exits: Vec<Word>,
    /// All prefixes of `exits`, sorted.
    closure: Vec<Word>,
}

impl DiamondItem {
    fn new(centre: Colour, fans: Vec<usize>, exits: Vec<Word>) -> Self {
        let mut closure: Vec<Word> = exits.iter().flat_map(|w| (1..=w.len()).map(move |l| Word::from(&w[..l]))).collect();
        closure.sort_unstable();
        closure.dedup();
        DiamondItem { centre, fans, exits, closure }
    }

    /// Every exit word of `self` is a prefix of an exit word of `other`.
    /// Then any check `other` passes, `self` passes too.
    fn dominates(&self, other: &DiamondItem) -> bool {
        self.centre == other.centre && self.exits.iter().all(|w| other.closure.binary_search(w).is_ok())
    }
}

/// Diamonds with centre colour `x` made of five copies of one fan, plus the
/// fans that cannot sit next to a copy of themselves. Only fans that survive
/// the paths to `r` and `s` are considered.
///
/// Any diamond using a self-compatible fan has a superset of that fan's
/// exits, so it is dominated by the five-copy diamond. Diamonds built only
/// from the returned self-incompatible fans are the rest.
fn single_items(fans: &[ProfileEntry], x: Colour, j: &mut Joiner) -> (Vec<DiamondItem>, Vec<usize>) {
    let star = Star::new(x);
    let tails: [&[Colour]; 4] = [&[x, R_COLOUR], &[x, S_COLOUR], &[x, R_COLOUR, S_COLOUR], &[x, S_COLOUR, R_COLOUR]];
    let mut items = Vec::new();
    let mut loners = Vec::new();
    for (i, fan) in fans.iter().enumerate() {
        let p = &fan.profile;
        let Some(once) = star.attach(p, j) else {
            continue;
        };
        if p.maximal_words().iter().any(|u| tails.iter().any(|t| j.has_square(u, t, &[]))) {
            continue;
        }
        if once.attach(p, j).is_some() {
            items.push(DiamondItem::new(x, vec![i; FANS_PER_DIAMOND], p.maximal_words().to_vec()));
        } else {
            loners.push(i);
        }
    }
    (items, loners)
}

/// Drops items whose exits are dominated by another item's.
fn undominated(items: Vec<DiamondItem>, counts: &mut CertCounts) -> Vec<DiamondItem> {
    let mut kept: Vec<DiamondItem> = Vec::new();
    for item in items {
        if kept.iter().any(|k| k.dominates(&item)) {
            counts.states_deduplicated += 1;
            continue;
        }
        let before = kept.len();
        kept.retain(|k| !item.dominates(k));
        counts.states_deduplicated += (before - kept.len()) as u64;
        kept.push(item);
    }
    kept
}

/// Collects every complete star over `pool` (non-decreasing indices).
#[allow(clippy::too_many_arguments)]
fn complete_stars(
    fans: &[ProfileEntry],
    pool: &[usize],
    star: &Star,
    from: usize,
    chosen: &mut Vec<usize>,
    seen: &mut HashSet<(Star, usize, usize)>,
    out: &mut Vec<DiamondItem>,
    budget: &mut Budget,
    j: &mut Joiner,
    counts: &mut CertCounts,
) -> Result<(), OutOfBudget> {
    let remaining = FANS_PER_DIAMOND - chosen.len();
    if remaining == 0 {
        out.push(DiamondItem::new(star.centre, chosen.clone(), star.child_words.clone()));
        return Ok(());
    }
    // a second visit would only rediscover the same exit sets
    if !seen.insert((star.clone(), from, remaining)) {
        counts.states_deduplicated += 1;
        return Ok(());
    }
    for pi in from..pool.len() {
        budget.tick()?;
        if let Some(next) = star.attach(&fans[pool[pi]].profile, j) {
            chosen.push(pool[pi]);
            complete_stars(fans, pool, &next, pi, chosen, seen, out, budget, j, counts)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// Memoized compatibility of diamond items across the kernel `r`, `s`.
///
/// Every centre sees only its own rivets, `r` and `s`, so a path of the
/// gadget meets at most three centres and crosses the kernel in one of the
/// shapes below (read from one diamond's exits to another's).
struct KernelChecks<'a> {
    items: &'a [DiamondItem],
    j: &'a mut Joiner,
    via: std::collections::HashMap<(usize, Colour), bool>,
    pair: std::collections::HashMap<(usize, usize), bool>,
    triple: std::collections::HashMap<(usize, usize, Colour), bool>,
}

impl KernelChecks<'_> {
    fn words_ok(&mut self, a: usize, mids: &[&[Colour]], b: Option<usize>) -> bool {
        let empty = [Word::empty()];
        let left = &self.items[a].exits;
        let right: &[Word] = match b {
            Some(b) => &self.items[b].exits,
            None => &empty,
        };
        for mid in mids {
            for u in left {
                for v in right {
                    if self.j.has_square(u, mid, v) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// From diamond `a` through `r` (or `s`), a centre coloured `y`, and on
    /// to `s` (or `r`).
    fn via(&mut self, a: usize, y: Colour) -> bool {
        if let Some(&r) = self.via.get(&(a, y)) {
            return r;
        }
        let x = self.items[a].centre;
        let r = self.words_ok(a, &[&[x, R_COLOUR, y, S_COLOUR], &[x, S_COLOUR, y, R_COLOUR]], None);
        self.via.insert((a, y), r);
        r
    }

    /// Between two diamonds through `r`, `s`, or the edge `rs`.
    fn pair(&mut self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.pair.get(&key) {
            return r;
        }
        let (x, z) = (self.items[key.0].centre, self.items[key.1].centre);
        let mids: [&[Colour]; 4] = [&[x, R_COLOUR, z], &[x, S_COLOUR, z], &[x, R_COLOUR, S_COLOUR, z], &[x, S_COLOUR, R_COLOUR, z]];
        let r = self.words_ok(key.0, &mids, Some(key.1));
        self.pair.insert(key, r);
        r
    }

    /// Between two diamonds through `r`, a third centre coloured `y`, and `s`.
    fn triple(&mut self, a: usize, b: usize, y: Colour) -> bool {
        let key = (a.min(b), a.max(b), y);
        if let Some(&r) = self.triple.get(&key) {
            return r;
        }
        let (x, z) = (self.items[key.0].centre, self.items[key.1].centre);
        let mids: [&[Colour]; 2] = [&[x, R_COLOUR, y, S_COLOUR, z], &[x, S_COLOUR, y, R_COLOUR, z]];
        let r = self.words_ok(key.0, &mids, Some(key.1));
        self.triple.insert(key, r);
        r
    }

    /// Whether item `c` can join the diamonds already holding `placed`.
    fn fits(&mut self, placed: &[usize], c: usize) -> bool {
        let y = self.items[c].centre;
        for (i, &a) in placed.iter().enumerate() {
            if !self.pair(a, c) || !self.via(a, y) || !self.via(c, self.items[a].centre) {
                return false;
            }
            for (l, &b) in placed.iter().enumerate() {
                if l != i && (!self.triple(a, c, self.items[b].centre) || (l > i && !self.triple(a, b, y))) {
                    return false;
                }
            }
        }
        true
    }
}

/// Planar gadget: seven diamonds (each a centre with five fans) whose
/// centres all see `r` and `s`, with `r` adjacent to `s`.
///
/// Diamonds are interchangeable and colours other than those of `r` and
/// `s` may be renamed, so the diamonds are placed in non-decreasing item
/// order with centre colours introduced in first-use order from `2`.
fn certify_kernel(
    fans: &[ProfileEntry],
    k: usize,
    parallel: bool,
    budget: &mut Budget,
    j: &mut Joiner,
    counts: &mut CertCounts,
) -> Result<Option<Vec<Colour>>, OutOfBudget> {
    // r and s are adjacent and centres see both, so three colours at least
    if k < 3 {
        return Ok(None);
    }
    let split = |x: usize| {
        let mut local = Joiner::default();
        let (singles, loners) = single_items(fans, x as Colour, &mut local);
        (singles, loners, local.checks)
    };
    let per_colour: Vec<_> = if parallel { (2..k).into_par_iter().map(split).collect() } else { (2..k).map(split).collect() };
    let mut by_colour = Vec::new();
    for (singles, loners, checks) in per_colour {
        j.checks += checks;
        by_colour.push((singles, loners));
    }

    // single-fan diamonds first: a colouring found among them is a real
    // witness, and only an exhaustive answer needs the rest
    let singles: Vec<Vec<DiamondItem>> = by_colour.iter().map(|(s, _)| s.clone()).collect();
    if let Some(found) = place_diamonds(fans, &singles, k, budget, j, counts)? {
        return Ok(Some(found));
    }
    if by_colour.iter().all(|(_, l)| l.is_empty()) {
        return Ok(None);
    }
    let mut full = Vec::new();
    for (x, (singles, loners)) in (2..k).zip(by_colour) {
        let mut items = singles;
        let mut seen = HashSet::new();
        complete_stars(fans, &loners, &Star::new(x as Colour), 0, &mut Vec::new(), &mut seen, &mut items, budget, j, counts)?;
        full.push(undominated(items, counts));
    }
    place_diamonds(fans, &full, k, budget, j, counts)
}

/// Searches for seven mutually compatible diamonds; `by_colour[x - 2]` holds
/// the items with centre colour `x`.
fn place_diamonds(
    fans: &[ProfileEntry],
    by_colour: &[Vec<DiamondItem>],
    k: usize,
    budget: &mut Budget,
    j: &mut Joiner,
    counts: &mut CertCounts,
) -> Result<Option<Vec<Colour>>, OutOfBudget> {
    let mut items = Vec::new();
    let mut first_of_colour = vec![0; k + 1];
    for x in 2..k {
        first_of_colour[x] = items.len();
        items.extend(by_colour[x - 2].iter().cloned());
    }
    first_of_colour[k] = items.len();
    let distinct: HashSet<usize> = items.iter().flat_map(|i| i.fans.iter().copied()).collect();
    counts.candidate_profiles = counts.candidate_profiles.max(distinct.len() as u64);
    log::debug!("{} diamond items over {} fan profiles", items.len(), distinct.len());

    let mut checks = KernelChecks {
        items: &items,
        j,
        via: Default::default(),
        pair: Default::default(),
        triple: Default::default(),
    };

    fn place(
        d: usize,
        placed: &mut Vec<usize>,
        first_of_colour: &[usize],
        k: usize,
        checks: &mut KernelChecks<'_>,
        budget: &mut Budget,
    ) -> Result<bool, OutOfBudget> {
        if d == DIAMONDS {
            return Ok(true);
        }
        let (lo, hi) = match placed.last() {
            None => (first_of_colour[2], first_of_colour[3]),
            Some(&prev) => {
                let x = checks.items[prev].centre as usize;
                (prev, first_of_colour[(x + 2).min(k)])
            }
        };
        for c in lo..hi {
            budget.tick()?;
            if checks.fits(placed, c) {
                placed.push(c);
                if place(d + 1, placed, first_of_colour, k, checks, budget)? {
                    return Ok(true);
                }
                placed.pop();
            }
        }
        Ok(false)
    }

    let mut placed = Vec::new();
    if !place(0, &mut placed, &first_of_colour, k, &mut checks, budget)? {
        return Ok(None);
    }

    let n_fans = DIAMONDS * FANS_PER_DIAMOND;
    let centre0 = n_fans * FAN_SIZE;
    let mut colours = vec![0; centre0 + DIAMONDS + 2];
    let slots: Vec<usize> = placed.iter().flat_map(|&c| items[c].fans.iter().copied()).collect();
    place_fans(&mut colours, fans, &slots);
    for (d, &c) in placed.iter().enumerate() {
        colours[centre0 + d] = items[c].centre;
    }
    colours[centre0 + DIAMONDS] = R_COLOUR;
    colours[centre0 + DIAMONDS + 1] = S_COLOUR;
    Ok(Some(colours))
}
