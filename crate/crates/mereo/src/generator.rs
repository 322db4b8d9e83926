//! Seeded random formula generation for the corpus suites and the CLI
//! oracle comparison.
//!
//! Profiles bound the shape of the formulas (quantifier depth, constants,
//! variables) and, for the semantic corpora, also their cost: a candidate
//! is discarded and redrawn when the worst case of the bounded model
//! search would be too large or when a probe elimination does not fit in a
//! reduced node budget. Rejection is purely cost-based and deterministic
//! per seed, so a corpus is reproducible from (seed, count, profile).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{self, witness_bound, EngineConfig};
use crate::finmodel::MAX_SUPPORT;
use crate::formula::{Formula, Term};

#[derive(Debug, Clone)]
pub struct GeneratorProfile {
    pub max_connective_depth: u32,
    pub max_quantifier_depth: u32,
    pub max_constant: u64,
    pub variable_pool: Vec<String>,
    /// Number of variables left free (unquantified) in the candidate.
    pub min_free: usize,
    pub max_free: usize,
    pub require_sentence: bool,
    /// Assumed size of the union of assigned sets when estimating the
    /// bounded-search cost.
    pub assignment_universe: u64,
    /// Cap on log2 of the worst-case bounded-search step count.
    pub max_search_log2: Option<u64>,
    /// Elimination probe: the candidate (and its negation, for sentences)
    /// must eliminate within this node budget.
    pub probe_budget: Option<u64>,
}

/// Sentences for the decide/oracle agreement suites: constants <= 4,
/// quantifier depth <= 3, at most 3 variables.
pub fn sentence_profile() -> GeneratorProfile {
    GeneratorProfile {
        max_connective_depth: 3,
        max_quantifier_depth: 3,
        max_constant: 4,
        variable_pool: vec!["x".into(), "y".into(), "z".into()],
        min_free: 0,
        max_free: 0,
        require_sentence: true,
        assignment_universe: 0,
        max_search_log2: Some(22),
        probe_budget: Some(400_000),
    }
}

/// Open formulas for the elimination/oracle equivalence suite.
pub fn open_formula_profile() -> GeneratorProfile {
    GeneratorProfile {
        max_connective_depth: 3,
        max_quantifier_depth: 3,
        max_constant: 4,
        variable_pool: vec!["x".into(), "y".into(), "z".into()],
        min_free: 1,
        max_free: 2,
        require_sentence: false,
        assignment_universe: 8,
        max_search_log2: Some(22),
        probe_budget: Some(400_000),
    }
}

/// Purely syntactic corpus for parser round-trip checks; no cost caps.
pub fn syntactic_profile() -> GeneratorProfile {
    GeneratorProfile {
        max_connective_depth: 5,
        max_quantifier_depth: 4,
        max_constant: 12,
        variable_pool: vec!["x".into(), "y".into(), "z".into()],
        min_free: 0,
        max_free: 3,
        require_sentence: false,
        assignment_universe: 0,
        max_search_log2: None,
        probe_budget: None,
    }
}

/// Draws `count` formulas satisfying the profile, deterministically from
/// the seed.
pub fn generate_corpus(seed: u64, count: usize, profile: &GeneratorProfile) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts: u64 = 0;
    let attempt_cap = (count as u64).saturating_mul(10_000).max(10_000);
    while out.len() < count {
        attempts += 1;
        assert!(attempts <= attempt_cap, "generator profile rejects nearly everything");
        let candidate = draw(&mut rng, profile);
        if accept(&candidate, profile) {
            out.push(candidate);
        }
    }
    out
}

fn draw(rng: &mut ChaCha8Rng, profile: &GeneratorProfile) -> Formula {
    let free_count = if profile.max_free == 0 {
        0
    } else {
        rng.gen_range(profile.min_free..=profile.max_free)
    };
    let mut scope: Vec<String> =
        profile.variable_pool.iter().take(free_count).cloned().collect();
    gen_formula(
        rng,
        profile,
        profile.max_connective_depth,
        profile.max_quantifier_depth,
        &mut scope,
    )
}

fn gen_formula(
    rng: &mut ChaCha8Rng,
    profile: &GeneratorProfile,
    depth: u32,
    q_left: u32,
    scope: &mut Vec<String>,
) -> Formula {
    let unbound: Vec<&String> =
        profile.variable_pool.iter().filter(|v| !scope.contains(v)).collect();
    let roll = rng.gen_range(0u32..100);
    if q_left > 0 && !unbound.is_empty() && roll < 30 {
        let var = unbound[rng.gen_range(0..unbound.len())].clone();
        scope.push(var.clone());
        let body = gen_formula(rng, profile, depth, q_left - 1, scope);
        scope.pop();
        return if rng.gen_bool(0.5) {
            Formula::exists(var, body)
        } else {
            Formula::forall(var, body)
        };
    }
    if depth > 0 && roll < 70 {
        return match rng.gen_range(0u32..100) {
            0..=29 => Formula::and(
                gen_formula(rng, profile, depth - 1, q_left, scope),
                gen_formula(rng, profile, depth - 1, q_left, scope),
            ),
            30..=54 => Formula::or(
                gen_formula(rng, profile, depth - 1, q_left, scope),
                gen_formula(rng, profile, depth - 1, q_left, scope),
            ),
            55..=74 => Formula::implies(
                gen_formula(rng, profile, depth - 1, q_left, scope),
                gen_formula(rng, profile, depth - 1, q_left, scope),
            ),
            75..=84 => Formula::iff(
                gen_formula(rng, profile, depth - 1, q_left, scope),
                gen_formula(rng, profile, depth - 1, q_left, scope),
            ),
            _ => Formula::not(gen_formula(rng, profile, depth - 1, q_left, scope)),
        };
    }
    gen_atom(rng, profile, scope)
}

fn gen_atom(rng: &mut ChaCha8Rng, profile: &GeneratorProfile, scope: &[String]) -> Formula {
    let n = gen_constant(rng, profile.max_constant);
    match rng.gen_range(0u32..100) {
        0..=29 => Formula::Sub(gen_term(rng, scope, 2), gen_term(rng, scope, 2)),
        30..=44 => Formula::Eq(gen_term(rng, scope, 2), gen_term(rng, scope, 2)),
        45..=74 => Formula::CardEq(gen_term(rng, scope, 2), n),
        _ => Formula::CardGeq(gen_term(rng, scope, 2), n),
    }
}

fn gen_constant(rng: &mut ChaCha8Rng, max: u64) -> u64 {
    // Geometric-ish skew toward small constants.
    let mut n = 0;
    while n < max && rng.gen_bool(0.45) {
        n += 1;
    }
    n
}

fn gen_term(rng: &mut ChaCha8Rng, scope: &[String], depth: u32) -> Term {
    if depth == 0 || rng.gen_bool(0.45) {
        if scope.is_empty() || rng.gen_bool(0.1) {
            return Term::Zero;
        }
        return Term::var(scope[rng.gen_range(0..scope.len())].clone());
    }
    let l = gen_term(rng, scope, depth - 1);
    let r = gen_term(rng, scope, depth - 1);
    match rng.gen_range(0u32..3) {
        0 => Term::meet(l, r),
        1 => Term::join(l, r),
        _ => Term::diff(l, r),
    }
}

fn accept(f: &Formula, profile: &GeneratorProfile) -> bool {
    let free = f.free_variables();
    if profile.require_sentence && !free.is_empty() {
        return false;
    }
    if profile.min_free > 0 && free.len() < profile.min_free {
        return false;
    }
    if let Some(cap) = profile.max_search_log2 {
        let fb = witness_bound(f);
        if search_cost_log2(f, profile.assignment_universe, fb) > cap {
            return false;
        }
    }
    if let Some(nodes) = profile.probe_budget {
        let cfg = EngineConfig { max_nodes: nodes };
        if engine::eliminate(f, &cfg).is_err() {
            return false;
        }
        if profile.require_sentence && engine::eliminate(&Formula::not(f.clone()), &cfg).is_err() {
            return false;
        }
    }
    true
}

/// log2 of the worst-case step count of the bounded model search: each
/// quantifier scans the subsets of its support, and the support can grow
/// by the fresh budget per nesting level.
fn search_cost_log2(f: &Formula, support: u64, fresh: u64) -> u64 {
    match f {
        Formula::Sub(..) | Formula::Eq(..) | Formula::CardEq(..) | Formula::CardGeq(..) => 0,
        Formula::Not(g) => search_cost_log2(g, support, fresh),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            search_cost_log2(l, support, fresh).max(search_cost_log2(r, support, fresh))
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => {
            let grown = support.saturating_add(fresh).min(MAX_SUPPORT as u64);
            grown + search_cost_log2(b, grown, fresh)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_are_deterministic_per_seed() {
        let a = generate_corpus(42, 20, &sentence_profile());
        let b = generate_corpus(42, 20, &sentence_profile());
        assert_eq!(a, b);
        let c = generate_corpus(43, 20, &sentence_profile());
        assert_ne!(a, c);
    }

    #[test]
    fn sentence_profile_yields_sentences_within_bounds() {
        for f in generate_corpus(7, 50, &sentence_profile()) {
            assert!(f.free_variables().is_empty(), "not a sentence: {f}");
            assert!(f.quantifier_depth() <= 3);
        }
    }

    #[test]
    fn open_profile_yields_free_variables() {
        for f in generate_corpus(7, 50, &open_formula_profile()) {
            assert!(!f.free_variables().is_empty(), "no free variable: {f}");
            assert!(f.free_variables().len() <= 3);
        }
    }
}
