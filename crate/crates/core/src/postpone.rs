//! Postponement of ⊥-conversions: whenever `r >⊥ s >R t` with `R` a
//! detour or permutation step, some `k` satisfies `r >R+ k` and `k >⊥* t`.
//! Joins are found by bounded breadth-first search and compared up to α.

use std::collections::{HashSet, VecDeque};

use crate::context::Context;
use crate::formula::Formula;
use crate::rewrite::{step_in, successors, Family, RuleKind};
use crate::term::{self, alpha_eq, Path, Side, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostponeLimits {
    /// Longest `R` sequence tried from `r`.
    pub max_steps: usize,
    /// Terms visited per breadth-first search.
    pub max_terms: usize,
}

impl Default for PostponeLimits {
    fn default() -> Self {
        PostponeLimits {
            max_steps: 6,
            max_terms: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejoin {
    pub k: Term,
    pub r_steps: usize,
    pub bot_steps: usize,
}

/// A peak `r >⊥ s >R t`.
#[derive(Debug, Clone)]
pub struct Peak {
    pub r: Term,
    pub s: Term,
    pub t: Term,
    pub family: Family,
    pub bot_rule: RuleKind,
    pub r_rule: RuleKind,
}

/// Every peak starting at `r`.
pub fn peaks(ctx: &Context, r: &Term) -> Vec<Peak> {
    let mut out = Vec::new();
    for (_, bot_rule, s) in successors(ctx, r, Family::Bot) {
        for family in [Family::D, Family::P] {
            for (_, r_rule, t) in successors(ctx, &s, family) {
                out.push(Peak {
                    r: r.clone(),
                    s: s.clone(),
                    t,
                    family,
                    bot_rule,
                    r_rule,
                });
            }
        }
    }
    out
}

/// Number of ⊥-steps from `k` to `t`, if found within the limits.
fn bot_distance(ctx: &Context, k: &Term, t: &Term, limits: PostponeLimits) -> Option<usize> {
    let target = t.canonical();
    let mut seen = HashSet::from([k.canonical()]);
    let mut queue = VecDeque::from([(k.clone(), 0)]);
    while let Some((u, d)) = queue.pop_front() {
        if u.canonical() == target {
            return Some(d);
        }
        for (_, _, v) in successors(ctx, &u, Family::Bot) {
            if seen.len() >= limits.max_terms {
                break;
            }
            if seen.insert(v.canonical()) {
                queue.push_back((v, d + 1));
            }
        }
    }
    None
}

/// Searches `k` with `r >R+ k >⊥* t`, nearest `k` first.
pub fn find_rejoin(ctx: &Context, r: &Term, t: &Term, family: Family, limits: PostponeLimits) -> Option<Rejoin> {
    let mut seen = HashSet::from([r.canonical()]);
    let mut frontier = vec![r.clone()];
    for depth in 1..=limits.max_steps {
        let mut next = Vec::new();
        for u in &frontier {
            for (_, _, k) in successors(ctx, u, family) {
                if seen.len() >= limits.max_terms || !seen.insert(k.canonical()) {
                    continue;
                }
                if let Some(bot_steps) = bot_distance(ctx, &k, t, limits) {
                    return Some(Rejoin {
                        k,
                        r_steps: depth,
                        bot_steps,
                    });
                }
                next.push(k);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    None
}

pub fn rejoin_peak(ctx: &Context, peak: &Peak, limits: PostponeLimits) -> Option<Rejoin> {
    find_rejoin(ctx, &peak.r, &peak.t, peak.family, limits)
}

/// The overlap of ex falso, case and belief:
/// `bel z = efq (case d of {x => f x | y => g y}) in p1 z`
/// with `d : p ∨ r`, `f : p → ⊥`, `g : r → ⊥`, `z : p ∧ r`.
pub fn critical_pair() -> (Context, Term) {
    let p = Formula::atom("p");
    let r = Formula::atom("r");
    let pr = Formula::and(p.clone(), r.clone());
    let ctx: Context = [
        ("d".to_string(), Formula::or(p.clone(), r.clone())),
        ("f".to_string(), Formula::not(p)),
        ("g".to_string(), Formula::not(r)),
    ]
    .into_iter()
    .collect();
    let c = term::case(
        term::var("d"),
        "x",
        term::app(term::var("f"), term::var("x")),
        "y",
        term::app(term::var("g"), term::var("y")),
    );
    let t = term::bel(
        vec![("z", pr.clone())],
        vec![term::efq(Formula::boxed(pr), c)],
        term::proj(Side::Left, term::var("z")),
    );
    (ctx, t)
}

#[derive(Debug, Clone)]
pub struct CriticalPairReport {
    /// `r >⊥ E(C(...)) >P C(t1, E t2, E t3)`.
    pub peak_end: Term,
    /// The terms of the joining sequence `r >P >P >⊥ >⊥`.
    pub join: Vec<Term>,
    pub joined: bool,
}

/// Replays both sides of the critical pair step by step.
pub fn replay_critical_pair() -> CriticalPairReport {
    let (ctx, r) = critical_pair();
    let go = |t: &Term, path: Path, kind: RuleKind| step_in(&ctx, t, &path, kind).expect("displayed step applies");
    let s = go(&r, vec![0], RuleKind::B5);
    let peak_end = go(&s, vec![], RuleKind::PBot);
    let k1 = go(&r, vec![0], RuleKind::PBot);
    let k2 = go(&k1, vec![0], RuleKind::P4);
    let k3 = go(&k2, vec![1, 0], RuleKind::B5);
    let k4 = go(&k3, vec![2, 0], RuleKind::B5);
    let joined = alpha_eq(&k4, &peak_end);
    CriticalPairReport {
        peak_end,
        join: vec![r, k1, k2, k3, k4],
        joined,
    }
}
