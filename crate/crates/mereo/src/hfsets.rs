//! Hereditarily finite set laboratory.
//!
//! Verifies, over the universe of sets of bounded rank, that the pointwise
//! image `τ` of the swap `θ : z ↔ {z}` is a ⊆-automorphism whose deformed
//! membership `a ∈* b  ⟺  τ(a) ∈ τ(b)` differs from `∈` yet induces the
//! same inclusion relation; that the singleton-extraction map `η` exists
//! and is unique, with the star recursion `b* = { η⁻¹(a*) | a ∈ b }`
//! transporting membership; and that `x ∈ y ⟺ {x} ⊆ y`.
//!
//! All universal statements are checked over `RankUniverse(N)` only; an
//! operation that would leave the universe is reported as partial, never
//! silently extended.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Feasibility cap: the universe of rank 5 would have 2^65536 sets.
pub const MAX_RANK: u32 = 4;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HfError {
    #[error("universe of max rank {max_rank} is too small for z of rank {z_rank}: need rank(z) + 2 <= max rank")]
    UniverseTooSmall { z_rank: u32, max_rank: u32 },
    #[error("max rank {0} exceeds the feasibility cap of {MAX_RANK}")]
    RankTooLarge(u32),
    #[error("set notation error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
}

/// Handle to an interned hereditarily finite set. Equal handles denote
/// equal sets within their universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hf(u32);

impl Hf {
    fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Interning arena. Children are stored sorted and duplicate-free, so
/// structural equality is handle equality (extensionality).
#[derive(Debug, Default)]
pub struct HfUniverse {
    children: Vec<Box<[Hf]>>,
    ranks: Vec<u32>,
    index: HashMap<Box<[Hf]>, Hf>,
}

impl HfUniverse {
    pub fn new() -> Self {
        let mut u = HfUniverse::default();
        u.intern(Vec::new());
        u
    }

    fn intern(&mut self, mut kids: Vec<Hf>) -> Hf {
        kids.sort_unstable();
        kids.dedup();
        let key: Box<[Hf]> = kids.into_boxed_slice();
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let rank = key.iter().map(|k| self.ranks[k.idx()] + 1).max().unwrap_or(0);
        let id = Hf(u32::try_from(self.children.len()).expect("universe fits in u32"));
        self.children.push(key.clone());
        self.ranks.push(rank);
        self.index.insert(key, id);
        id
    }

    /// Number of interned sets. At least one: the empty set.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn empty(&self) -> Hf {
        Hf(0)
    }

    pub fn from_children(&mut self, kids: Vec<Hf>) -> Hf {
        self.intern(kids)
    }

    pub fn children(&self, a: Hf) -> &[Hf] {
        &self.children[a.idx()]
    }

    /// rank(∅) = 0, rank(b) = 1 + max rank of the children.
    pub fn rank(&self, a: Hf) -> u32 {
        self.ranks[a.idx()]
    }

    pub fn mem(&self, a: Hf, b: Hf) -> bool {
        self.children[b.idx()].binary_search(&a).is_ok()
    }

    pub fn subset(&self, u: Hf, v: Hf) -> bool {
        self.children[u.idx()].iter().all(|c| self.mem(*c, v))
    }

    pub fn singleton(&mut self, a: Hf) -> Hf {
        self.intern(vec![a])
    }

    /// The permutation swapping `z` and `{z}`, fixing everything else.
    pub fn theta(&mut self, a: Hf, z: Hf) -> Hf {
        let sz = self.singleton(z);
        if a == z {
            sz
        } else if a == sz {
            z
        } else {
            a
        }
    }

    /// Pointwise image of `θ`: `τ(u) = { θ(a) | a ∈ u }`.
    pub fn tau(&mut self, u: Hf, z: Hf) -> Hf {
        let kids: Vec<Hf> = self.children(u).to_vec();
        let mapped: Vec<Hf> = kids.into_iter().map(|a| self.theta(a, z)).collect();
        self.intern(mapped)
    }

    /// Deformed membership: `a ∈* b  ⟺  τ(a) ∈ τ(b)`.
    pub fn mem_star(&mut self, a: Hf, b: Hf, z: Hf) -> bool {
        let ta = self.tau(a, z);
        let tb = self.tau(b, z);
        self.mem(ta, tb)
    }

    /// Brace notation, children in canonical stored order.
    pub fn render(&self, a: Hf) -> String {
        let mut out = String::new();
        self.render_into(a, &mut out);
        out
    }

    fn render_into(&self, a: Hf, out: &mut String) {
        out.push('{');
        for (i, c) in self.children(a).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.render_into(*c, out);
        }
        out.push('}');
    }

    /// Parses brace notation such as `{{},{{}}}`. Whitespace-insensitive.
    pub fn parse(&mut self, text: &str) -> Result<Hf, HfError> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let set = self.parse_at(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(HfError::Parse { pos, message: "trailing input".to_string() });
        }
        Ok(set)
    }

    fn parse_at(&mut self, bytes: &[u8], pos: &mut usize) -> Result<Hf, HfError> {
        skip_ws(bytes, pos);
        if bytes.get(*pos) != Some(&b'{') {
            return Err(HfError::Parse { pos: *pos, message: "expected '{'".to_string() });
        }
        *pos += 1;
        let mut kids = Vec::new();
        skip_ws(bytes, pos);
        if bytes.get(*pos) == Some(&b'}') {
            *pos += 1;
            return Ok(self.intern(kids));
        }
        loop {
            kids.push(self.parse_at(bytes, pos)?);
            skip_ws(bytes, pos);
            match bytes.get(*pos) {
                Some(b',') => {
                    *pos += 1;
                }
                Some(b'}') => {
                    *pos += 1;
                    return Ok(self.intern(kids));
                }
                _ => {
                    return Err(HfError::Parse {
                        pos: *pos,
                        message: "expected ',' or '}'".to_string(),
                    })
                }
            }
        }
    }

    /// All sets of rank at most `max_rank`, i.e. the elements of
    /// `V_{max_rank + 1}`: sizes 1, 2, 4, 16, 65536 for ranks 0..4.
    pub fn rank_universe(&mut self, max_rank: u32) -> Result<RankUniverse, HfError> {
        if max_rank > MAX_RANK {
            return Err(HfError::RankTooLarge(max_rank));
        }
        let mut sets = vec![self.empty()];
        for _ in 0..max_rank {
            let prev = sets;
            let mut next = Vec::with_capacity(1usize << prev.len());
            for mask in 0u64..(1u64 << prev.len()) {
                let kids: Vec<Hf> = prev
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, s)| *s)
                    .collect();
                next.push(self.intern(kids));
            }
            sets = next;
        }
        Ok(RankUniverse { max_rank, sets })
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while matches!(bytes.get(*pos), Some(b' ' | b'\t' | b'\n' | b'\r')) {
        *pos += 1;
    }
}

/// The sets of rank at most `max_rank`.
#[derive(Debug, Clone)]
pub struct RankUniverse {
    pub max_rank: u32,
    pub sets: Vec<Hf>,
}

/// Outcome of one verification sweep, serializable as
/// `{check, universe_rank, z, pairs_checked, verdict, counterexample?, witnesses?}`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: String,
    pub universe_rank: u32,
    pub z: Option<String>,
    pub pairs_checked: u64,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<String>>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    fn new(check: &str, universe_rank: u32, z: Option<String>) -> Self {
        Report {
            check: check.to_string(),
            universe_rank,
            z,
            pairs_checked: 0,
            verdict: "pass".to_string(),
            counterexample: None,
            witnesses: None,
        }
    }

    fn fail(&mut self, counterexample: String) {
        self.verdict = "fail".to_string();
        if self.counterexample.is_none() {
            self.counterexample = Some(counterexample);
        }
    }
}

fn require_headroom(u: &HfUniverse, z: Hf, max_rank: u32) -> Result<(), HfError> {
    let z_rank = u.rank(z);
    if z_rank + 2 > max_rank {
        Err(HfError::UniverseTooSmall { z_rank, max_rank })
    } else {
        Ok(())
    }
}

/// Walks every pair when the square fits in `max_pairs`, otherwise a seeded
/// random sample of `max_pairs` pairs. Returns (pairs checked, first
/// failing pair).
fn sweep_pairs(
    n: usize,
    max_pairs: u64,
    seed: u64,
    mut check: impl FnMut(usize, usize) -> bool,
) -> (u64, Option<(usize, usize)>) {
    let square = (n as u64).saturating_mul(n as u64);
    if square <= max_pairs {
        for i in 0..n {
            for j in 0..n {
                if !check(i, j) {
                    return ((i * n + j) as u64 + 1, Some((i, j)));
                }
            }
        }
        (square, None)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..max_pairs {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if !check(i, j) {
                return (k + 1, Some((i, j)));
            }
        }
        (max_pairs, None)
    }
}

/// Precomputed `τ` over the universe, with its preimage lists.
struct TauTables {
    tau: Vec<Hf>,
    /// Preimage lists: `inv[w]` holds every universe member mapping to `w`.
    inv: Vec<Vec<Hf>>,
    /// `star_children[u]` lists exactly the `a` with `a ∈* u`, sorted.
    star_children: Vec<Vec<Hf>>,
}

fn tau_tables(u: &mut HfUniverse, ru: &RankUniverse, z: Hf) -> TauTables {
    let size = u.len();
    let mut tau = vec![Hf(0); size];
    for &s in &ru.sets {
        let t = u.tau(s, z);
        assert!(t.idx() < size, "tau leaves the universe; the rank headroom check is broken");
        tau[s.idx()] = t;
    }
    // Preimages of tau restricted to the universe.
    let mut inv: Vec<Vec<Hf>> = vec![Vec::new(); size];
    for &s in &ru.sets {
        inv[tau[s.idx()].idx()].push(s);
    }
    // a ∈* u  ⟺  τ(a) ∈ children(τ(u))  ⟺  a ∈ ⋃ inv[w] over those children.
    let mut star_children: Vec<Vec<Hf>> = vec![Vec::new(); size];
    for &s in &ru.sets {
        let mut members = Vec::new();
        for w in u.children(tau[s.idx()]) {
            members.extend_from_slice(&inv[w.idx()]);
        }
        members.sort_unstable();
        members.dedup();
        star_children[s.idx()] = members;
    }
    TauTables { tau, inv, star_children }
}

fn sorted_subset(a: &[Hf], b: &[Hf]) -> bool {
    let mut it = b.iter();
    'outer: for x in a {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Checks that the inclusion induced by `∈*` coincides with `⊆` on the
/// whole universe, and that `∈*` itself differs from `∈` (witness:
/// `z ∈ {z}` but not `z ∈* {z}`).
pub fn verify_same_inclusion(
    u: &mut HfUniverse,
    ru: &RankUniverse,
    z: Hf,
    max_pairs: u64,
    seed: u64,
) -> Result<Report, HfError> {
    require_headroom(u, z, ru.max_rank)?;
    let tables = tau_tables(u, ru, z);
    let mut report = Report::new("same-inclusion", ru.max_rank, Some(u.render(z)));

    let sets = &ru.sets;
    let (pairs, bad) = sweep_pairs(sets.len(), max_pairs, seed, |i, j| {
        let (s, t) = (sets[i], sets[j]);
        let star_incl = sorted_subset(
            &tables.star_children[s.idx()],
            &tables.star_children[t.idx()],
        );
        star_incl == u.subset(s, t)
    });
    report.pairs_checked = pairs;
    if let Some((i, j)) = bad {
        report.fail(format!(
            "inclusion mismatch for u = {}, v = {}",
            u.render(sets[i]),
            u.render(sets[j])
        ));
    }

    // Mandatory discrepancy witness: z ∈ {z} holds, z ∈* {z} fails.
    let sz = u.singleton(z);
    let mem_plain = u.mem(z, sz);
    let mem_star = u.mem_star(z, sz, z);
    if mem_plain && !mem_star {
        report.witnesses = Some(vec![format!(
            "{} ∈ {} but not ∈*: the relations differ",
            u.render(z),
            u.render(sz)
        )]);
    } else {
        report.fail(format!(
            "expected membership discrepancy at ({}, {}) but mem = {mem_plain}, mem* = {mem_star}",
            u.render(z),
            u.render(sz)
        ));
    }
    Ok(report)
}

/// Checks that `τ` permutes the universe, preserves `⊆` in both directions,
/// is not the identity, and does not preserve `∈`.
pub fn verify_automorphism(
    u: &mut HfUniverse,
    ru: &RankUniverse,
    z: Hf,
    max_pairs: u64,
    seed: u64,
) -> Result<Report, HfError> {
    require_headroom(u, z, ru.max_rank)?;
    let tables = tau_tables(u, ru, z);
    let mut report = Report::new("automorphism", ru.max_rank, Some(u.render(z)));
    let mut witnesses = Vec::new();

    // Bijectivity onto the universe.
    let mut seen = vec![false; u.len()];
    let mut bijective = true;
    for &s in &ru.sets {
        let t = tables.tau[s.idx()];
        if seen[t.idx()] {
            bijective = false;
            report.fail(format!("tau is not injective at {}", u.render(s)));
            break;
        }
        seen[t.idx()] = true;
    }
    if bijective && ru.sets.iter().any(|s| !seen[s.idx()]) {
        report.fail("tau is not surjective onto the universe".to_string());
    }

    // Order preservation both ways.
    let sets = &ru.sets;
    let (pairs, bad) = sweep_pairs(sets.len(), max_pairs, seed, |i, j| {
        let (s, t) = (sets[i], sets[j]);
        u.subset(s, t) == u.subset(tables.tau[s.idx()], tables.tau[t.idx()])
    });
    report.pairs_checked = pairs;
    if let Some((i, j)) = bad {
        report.fail(format!(
            "tau does not preserve inclusion at u = {}, v = {}",
            u.render(sets[i]),
            u.render(sets[j])
        ));
    }

    // Nontriviality: tau({z}) = {{z}} ≠ {z}.
    let sz = u.singleton(z);
    let tsz = tables.tau[sz.idx()];
    if tsz == sz {
        report.fail(format!("tau fixes {}; expected a nontrivial automorphism", u.render(sz)));
    } else {
        witnesses.push(format!("tau({}) = {}", u.render(sz), u.render(tsz)));
    }

    // Non-preservation of membership (the non-definability content).
    let m = u.mem(z, sz);
    let tm = u.mem(tables.tau[z.idx()], tsz);
    if m && !tm {
        witnesses.push(format!(
            "{} ∈ {} but tau images are not ∈-related",
            u.render(z),
            u.render(sz)
        ));
    } else {
        report.fail("tau unexpectedly preserves membership on the witness pair".to_string());
    }

    if !witnesses.is_empty() {
        report.witnesses = Some(witnesses);
    }
    Ok(report)
}

/// The `η` map and the star recursion extracted from a bounded universe.
#[derive(Debug)]
pub struct EtaExtraction {
    /// `η(a)` for each universe member with exactly one witness
    /// `x ∈* {a}`, in universe order.
    pub eta: HashMap<Hf, Hf>,
    /// Members whose witness count differed from one (count recorded).
    pub eta_failures: Vec<(Hf, usize)>,
    /// `b* = { η⁻¹(a*) | a ∈ b }`, where every piece stays inside the
    /// universe.
    pub star: HashMap<Hf, Hf>,
    /// Members whose star image would leave the universe.
    pub star_undefined: Vec<Hf>,
}

/// Finds, for every `a` in the universe, the witnesses `x` with
/// `x ∈* {a}`, keeping `η(a)` when the witness is unique, then runs the
/// star recursion in rank order.
pub fn extract_eta(u: &mut HfUniverse, ru: &RankUniverse, z: Hf) -> Result<EtaExtraction, HfError> {
    require_headroom(u, z, ru.max_rank)?;
    let tables = tau_tables(u, ru, z);

    let mut eta = HashMap::new();
    let mut eta_failures = Vec::new();
    for &a in &ru.sets {
        // Exhaustive witness search, factored through the tau preimage
        // table: x ∈* {a} ⟺ τ(x) ∈ τ({a}) = {θ(a)} ⟺ τ(x) = θ(a).
        let ta = u.theta(a, z);
        let witnesses = &tables.inv[ta.idx()];
        if witnesses.len() == 1 {
            eta.insert(a, witnesses[0]);
        } else {
            eta_failures.push((a, witnesses.len()));
        }
    }

    let mut eta_inverse: HashMap<Hf, Hf> = HashMap::new();
    for (&a, &x) in &eta {
        // A collision would mean eta is not injective; record as failure.
        if let Some(prev) = eta_inverse.insert(x, a) {
            eta_failures.push((prev, 2));
        }
    }

    // Star recursion in rank order, so children are resolved first.
    let mut by_rank: Vec<Hf> = ru.sets.clone();
    by_rank.sort_by_key(|s| (u.rank(*s), *s));
    let mut star: HashMap<Hf, Hf> = HashMap::new();
    let mut star_undefined = Vec::new();
    for b in by_rank {
        let kids: Vec<Hf> = u.children(b).to_vec();
        let mut mapped = Vec::with_capacity(kids.len());
        let mut ok = true;
        for a in kids {
            let piece = star.get(&a).and_then(|astar| eta_inverse.get(astar));
            match piece {
                Some(&p) => mapped.push(p),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            star_undefined.push(b);
            continue;
        }
        let image = u.from_children(mapped);
        if u.rank(image) > ru.max_rank {
            star_undefined.push(b);
        } else {
            star.insert(b, image);
        }
    }

    Ok(EtaExtraction { eta, eta_failures, star, star_undefined })
}

/// Report form of [`extract_eta`]: uniqueness of `η`, membership transport
/// `a ∈ b ⟺ a* ∈* b*` over the pairs where both stars are defined, and
/// injectivity of the star map on its domain.
pub fn verify_eta_star(
    u: &mut HfUniverse,
    ru: &RankUniverse,
    z: Hf,
    max_pairs: u64,
    seed: u64,
) -> Result<Report, HfError> {
    let extraction = extract_eta(u, ru, z)?;
    let mut report = Report::new("eta-star", ru.max_rank, Some(u.render(z)));
    let mut witnesses = Vec::new();

    if let Some((a, count)) = extraction.eta_failures.first() {
        report.fail(format!(
            "eta witness count for {} is {count}, expected exactly one",
            u.render(*a)
        ));
    } else {
        let empty = u.empty();
        witnesses.push(format!("eta({}) = {}", u.render(empty), u.render(extraction.eta[&empty])));
    }

    // Injectivity of the star map on its domain.
    let mut inverse: HashMap<Hf, Hf> = HashMap::new();
    for (&b, &image) in &extraction.star {
        if let Some(prev) = inverse.insert(image, b) {
            report.fail(format!(
                "star map collides: {} and {} share an image",
                u.render(prev),
                u.render(b)
            ));
            break;
        }
    }

    // Membership transport over the defined domain.
    let domain: Vec<Hf> = {
        let mut d: Vec<Hf> =
            ru.sets.iter().copied().filter(|s| extraction.star.contains_key(s)).collect();
        d.sort_unstable();
        d
    };
    let (pairs, bad) = sweep_pairs(domain.len(), max_pairs, seed, |i, j| {
        let (a, b) = (domain[i], domain[j]);
        let plain = u.mem(a, b);
        let starred = u.mem_star(extraction.star[&a], extraction.star[&b], z);
        plain == starred
    });
    report.pairs_checked = pairs;
    if let Some((i, j)) = bad {
        report.fail(format!(
            "membership transport fails at a = {}, b = {}",
            u.render(domain[i]),
            u.render(domain[j])
        ));
    }
    if !extraction.star_undefined.is_empty() {
        witnesses.push(format!(
            "star map partial at the rank boundary for {} of {} sets",
            extraction.star_undefined.len(),
            ru.sets.len()
        ));
    }

    if !witnesses.is_empty() {
        report.witnesses = Some(witnesses);
    }
    Ok(report)
}

/// Checks `x ∈ y ⟺ {x} ⊆ y` over the universe.
pub fn verify_singleton_interdef(
    u: &mut HfUniverse,
    ru: &RankUniverse,
    max_pairs: u64,
    seed: u64,
) -> Report {
    let mut report = Report::new("singleton-interdefinability", ru.max_rank, None);
    let singles: Vec<Hf> = ru.sets.iter().map(|&s| u.singleton(s)).collect();
    let sets = &ru.sets;
    let (pairs, bad) = sweep_pairs(sets.len(), max_pairs, seed, |i, j| {
        u.mem(sets[i], sets[j]) == u.subset(singles[i], sets[j])
    });
    report.pairs_checked = pairs;
    if let Some((i, j)) = bad {
        report.fail(format!(
            "singleton law fails at x = {}, y = {}",
            u.render(sets[i]),
            u.render(sets[j])
        ));
    }
    report
}

#[cfg(test)]
mod tests;
