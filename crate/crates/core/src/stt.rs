//! Implicational simple type theory with a distinguished answer type `q`:
//! typing, βη-reduction and bounded reachability.
//!
//! Reduction runs on a de Bruijn form ([`Db`]) in which α-equivalent terms
//! are identical. Reachability is a best-first search that prefers terms
//! sharing the most subterms with the target.

use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::term::Name;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    /// The answer type `q`, distinct from every source atom.
    Answer,
    Atom(Arc<str>),
    Arrow(Arc<SimpleType>, Arc<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Arrow(Arc::new(a), Arc::new(b))
    }

    /// `∼a`, that is `a → q`.
    pub fn neg(a: SimpleType) -> SimpleType {
        SimpleType::arrow(a, SimpleType::Answer)
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Answer => f.write_str("q"),
            SimpleType::Atom(a) => f.write_str(a),
            SimpleType::Arrow(a, b) => {
                if matches!(**a, SimpleType::Arrow(..)) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SttTerm {
    Var(Name),
    Lam(Name, SimpleType, Box<SttTerm>),
    App(Box<SttTerm>, Box<SttTerm>),
}

impl SttTerm {
    pub fn var(x: &str) -> SttTerm {
        SttTerm::Var(x.to_string())
    }

    pub fn lam(x: &str, ty: SimpleType, body: SttTerm) -> SttTerm {
        SttTerm::Lam(x.to_string(), ty, Box::new(body))
    }

    pub fn app(f: SttTerm, a: SttTerm) -> SttTerm {
        SttTerm::App(Box::new(f), Box::new(a))
    }

    pub fn size(&self) -> usize {
        match self {
            SttTerm::Var(_) => 1,
            SttTerm::Lam(_, _, b) => 1 + b.size(),
            SttTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut HashSet<Name>) {
        match self {
            SttTerm::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            SttTerm::Lam(x, _, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            SttTerm::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
        }
    }

    /// Capture-avoiding substitution `self[x := s]`.
    pub fn subst(&self, x: &str, s: &SttTerm) -> SttTerm {
        let mut interner = Interner::default();
        let mut frees = Vec::new();
        let db = Db::from_term(self, &mut interner, &mut frees);
        let sd = Db::from_term(s, &mut interner, &mut frees);
        let Some(id) = frees.iter().position(|f| f == x) else {
            return self.clone();
        };
        db.subst_free(id as u32, &sd, 0).to_term(&interner, &frees)
    }
}

fn write_stt(t: &SttTerm, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = match t {
        SttTerm::Lam(..) => 0,
        SttTerm::App(..) => 1,
        SttTerm::Var(_) => 2,
    };
    if level < min {
        f.write_str("(")?;
        write_stt(t, 0, f)?;
        return f.write_str(")");
    }
    match t {
        SttTerm::Var(x) => f.write_str(x),
        SttTerm::Lam(x, ty, b) => {
            write!(f, "\\{x}:{ty}. ")?;
            write_stt(b, 0, f)
        }
        SttTerm::App(g, a) => {
            write_stt(g, 1, f)?;
            f.write_str(" ")?;
            write_stt(a, 2, f)
        }
    }
}

impl fmt::Display for SttTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_stt(self, 0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SttTypeError {
    #[error("unbound variable {0}")]
    Unbound(Name),
    #[error("{0} is applied but is not a function")]
    NotAFunction(String),
    #[error("argument has type {found}, expected {expected}")]
    Mismatch { expected: SimpleType, found: SimpleType },
}

pub type SttContext = BTreeMap<Name, SimpleType>;

pub fn stt_infer(ctx: &SttContext, m: &SttTerm) -> Result<SimpleType, SttTypeError> {
    fn go<'a>(
        ctx: &'a SttContext,
        scope: &mut Vec<(&'a str, &'a SimpleType)>,
        m: &'a SttTerm,
    ) -> Result<SimpleType, SttTypeError> {
        match m {
            SttTerm::Var(x) => scope
                .iter()
                .rev()
                .find(|(y, _)| *y == x)
                .map(|(_, t)| (*t).clone())
                .or_else(|| ctx.get(x).cloned())
                .ok_or_else(|| SttTypeError::Unbound(x.clone())),
            SttTerm::Lam(x, ty, b) => {
                scope.push((x, ty));
                let bt = go(ctx, scope, b);
                scope.pop();
                Ok(SimpleType::arrow(ty.clone(), bt?))
            }
            SttTerm::App(f, a) => {
                let ft = go(ctx, scope, f)?;
                let at = go(ctx, scope, a)?;
                match ft {
                    SimpleType::Arrow(dom, cod) => {
                        if *dom == at {
                            Ok((*cod).clone())
                        } else {
                            Err(SttTypeError::Mismatch {
                                expected: (*dom).clone(),
                                found: at,
                            })
                        }
                    }
                    _ => Err(SttTypeError::NotAFunction(f.to_string())),
                }
            }
        }
    }
    go(ctx, &mut Vec::new(), m)
}

/// α-equivalence, including binder annotations.
pub fn stt_alpha_eq(m: &SttTerm, n: &SttTerm) -> bool {
    let mut interner = Interner::default();
    let mut frees = Vec::new();
    Db::from_term(m, &mut interner, &mut frees) == Db::from_term(n, &mut interner, &mut frees)
}

#[derive(Default)]
struct Interner {
    types: Vec<SimpleType>,
    ids: HashMap<SimpleType, u32>,
}

impl Interner {
    fn id(&mut self, t: &SimpleType) -> u32 {
        if let Some(&i) = self.ids.get(t) {
            return i;
        }
        let i = self.types.len() as u32;
        self.types.push(t.clone());
        self.ids.insert(t.clone(), i);
        i
    }
}

/// De Bruijn form: bound variables are indices, free variables are ids into
/// a name table, binder annotations are ids into a type table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Db {
    Bound(u32),
    Free(u32),
    Lam(u32, Box<Db>),
    App(Box<Db>, Box<Db>),
}

impl Db {
    fn from_term(t: &SttTerm, interner: &mut Interner, frees: &mut Vec<Name>) -> Db {
        fn go(t: &SttTerm, env: &mut Vec<Name>, interner: &mut Interner, frees: &mut Vec<Name>) -> Db {
            match t {
                SttTerm::Var(x) => match env.iter().rev().position(|y| y == x) {
                    Some(i) => Db::Bound(i as u32),
                    None => {
                        let id = frees.iter().position(|f| f == x).unwrap_or_else(|| {
                            frees.push(x.clone());
                            frees.len() - 1
                        });
                        Db::Free(id as u32)
                    }
                },
                SttTerm::Lam(x, ty, b) => {
                    let ty = interner.id(ty);
                    env.push(x.clone());
                    let b = go(b, env, interner, frees);
                    env.pop();
                    Db::Lam(ty, Box::new(b))
                }
                SttTerm::App(f, a) => Db::App(
                    Box::new(go(f, env, interner, frees)),
                    Box::new(go(a, env, interner, frees)),
                ),
            }
        }
        go(t, &mut Vec::new(), interner, frees)
    }

    fn to_term(&self, interner: &Interner, frees: &[Name]) -> SttTerm {
        fn go(d: &Db, depth: usize, interner: &Interner, frees: &[Name]) -> SttTerm {
            match d {
                Db::Bound(i) => SttTerm::Var(format!("_v{}", depth - 1 - *i as usize)),
                Db::Free(id) => SttTerm::Var(frees[*id as usize].clone()),
                Db::Lam(ty, b) => SttTerm::Lam(
                    format!("_v{depth}"),
                    interner.types[*ty as usize].clone(),
                    Box::new(go(b, depth + 1, interner, frees)),
                ),
                Db::App(f, a) => SttTerm::App(
                    Box::new(go(f, depth, interner, frees)),
                    Box::new(go(a, depth, interner, frees)),
                ),
            }
        }
        go(self, 0, interner, frees)
    }

    fn size(&self) -> usize {
        match self {
            Db::Bound(_) | Db::Free(_) => 1,
            Db::Lam(_, b) => 1 + b.size(),
            Db::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    /// Adds `by` to every index at or above `cutoff`.
    fn shift(&self, by: i64, cutoff: u32) -> Db {
        match self {
            Db::Bound(i) if *i >= cutoff => Db::Bound((*i as i64 + by) as u32),
            Db::Bound(_) | Db::Free(_) => self.clone(),
            Db::Lam(ty, b) => Db::Lam(*ty, Box::new(b.shift(by, cutoff + 1))),
            Db::App(f, a) => Db::App(Box::new(f.shift(by, cutoff)), Box::new(a.shift(by, cutoff))),
        }
    }

    /// Replaces index `j` with `s` and lowers the indices above it.
    fn subst_bound(&self, j: u32, s: &Db) -> Db {
        match self {
            Db::Bound(i) if *i == j => s.shift(j as i64, 0),
            Db::Bound(i) if *i > j => Db::Bound(i - 1),
            Db::Bound(_) | Db::Free(_) => self.clone(),
            Db::Lam(ty, b) => Db::Lam(*ty, Box::new(b.subst_bound(j + 1, s))),
            Db::App(f, a) => Db::App(Box::new(f.subst_bound(j, s)), Box::new(a.subst_bound(j, s))),
        }
    }

    fn subst_free(&self, id: u32, s: &Db, depth: u32) -> Db {
        match self {
            Db::Free(i) if *i == id => s.shift(depth as i64, 0),
            Db::Bound(_) | Db::Free(_) => self.clone(),
            Db::Lam(ty, b) => Db::Lam(*ty, Box::new(b.subst_free(id, s, depth + 1))),
            Db::App(f, a) => Db::App(
                Box::new(f.subst_free(id, s, depth)),
                Box::new(a.subst_free(id, s, depth)),
            ),
        }
    }

    fn has_index(&self, j: u32) -> bool {
        match self {
            Db::Bound(i) => *i == j,
            Db::Free(_) => false,
            Db::Lam(_, b) => b.has_index(j + 1),
            Db::App(f, a) => f.has_index(j) || a.has_index(j),
        }
    }

    /// The contractum if this node is a β- or η-redex.
    fn contract(&self) -> Option<Db> {
        match self {
            Db::App(f, a) => match &**f {
                Db::Lam(_, body) => Some(body.subst_bound(0, a)),
                _ => None,
            },
            Db::Lam(_, body) => match &**body {
                Db::App(g, x) if **x == Db::Bound(0) && !g.has_index(0) => Some(g.shift(-1, 0)),
                _ => None,
            },
            _ => None,
        }
    }

    /// All one-step βη-reducts, outermost and leftmost first.
    fn successors(&self, out: &mut Vec<Db>) {
        if let Some(c) = self.contract() {
            out.push(c);
        }
        match self {
            Db::Lam(ty, b) => {
                let start = out.len();
                b.successors(out);
                for s in &mut out[start..] {
                    *s = Db::Lam(*ty, Box::new(std::mem::replace(s, Db::Bound(0))));
                }
            }
            Db::App(f, a) => {
                let start = out.len();
                f.successors(out);
                for s in &mut out[start..] {
                    *s = Db::App(Box::new(std::mem::replace(s, Db::Bound(0))), a.clone());
                }
                let start = out.len();
                a.successors(out);
                for s in &mut out[start..] {
                    *s = Db::App(f.clone(), Box::new(std::mem::replace(s, Db::Bound(0))));
                }
            }
            _ => {}
        }
    }

    /// Leftmost-outermost single step.
    fn step_leftmost(&self) -> Option<Db> {
        if let Some(c) = self.contract() {
            return Some(c);
        }
        match self {
            Db::Lam(ty, b) => b.step_leftmost().map(|b| Db::Lam(*ty, Box::new(b))),
            Db::App(f, a) => match f.step_leftmost() {
                Some(f) => Some(Db::App(Box::new(f), a.clone())),
                None => a.step_leftmost().map(|a| Db::App(f.clone(), Box::new(a))),
            },
            _ => None,
        }
    }

    /// Structural hashes of every subterm, children first; returns the
    /// hash of `self`.
    fn subterm_hashes(&self, out: &mut Vec<u64>) -> u64 {
        let mut h = DefaultHasher::new();
        match self {
            Db::Bound(i) => (0u8, i).hash(&mut h),
            Db::Free(i) => (1u8, i).hash(&mut h),
            Db::Lam(ty, b) => (2u8, ty, b.subterm_hashes(out)).hash(&mut h),
            Db::App(f, a) => (3u8, f.subterm_hashes(out), a.subterm_hashes(out)).hash(&mut h),
        }
        let v = h.finish();
        out.push(v);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("βη-normalization ran out of fuel after {0} steps")]
pub struct SttFuelExhausted(pub u64);

/// βη-normal form by leftmost-outermost reduction. Bound variables of the
/// result are renamed to `_v<depth>`.
pub fn stt_normalize_beta_eta(m: &SttTerm, fuel: u64) -> Result<SttTerm, SttFuelExhausted> {
    let mut interner = Interner::default();
    let mut frees = Vec::new();
    let mut cur = Db::from_term(m, &mut interner, &mut frees);
    let mut used = 0;
    while let Some(next) = cur.step_leftmost() {
        if used >= fuel {
            return Err(SttFuelExhausted(fuel));
        }
        used += 1;
        cur = next;
    }
    Ok(cur.to_term(&interner, &frees))
}

/// All one-step βη-reducts of `m`.
pub fn stt_successors(m: &SttTerm) -> Vec<SttTerm> {
    let mut interner = Interner::default();
    let mut frees = Vec::new();
    let d = Db::from_term(m, &mut interner, &mut frees);
    let mut out = Vec::new();
    d.successors(&mut out);
    out.iter().map(|s| s.to_term(&interner, &frees)).collect()
}

/// Limits for [`stt_reaches`].
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Longest reduction sequence considered.
    pub max_steps: usize,
    /// Most terms expanded before giving up.
    pub max_expansions: usize,
}

impl SearchLimits {
    pub fn steps(max_steps: usize) -> Self {
        SearchLimits {
            max_steps,
            max_expansions: 200_000,
        }
    }
}

/// Outcome of a reachability search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reach {
    /// Length of the sequence found, if any.
    pub steps: Option<usize>,
    pub expanded: usize,
}

/// Searches for a βη-reduction sequence from `m` to a term α-equivalent to
/// `n` with at most `limits.max_steps` steps (and at least one when
/// `nonempty`).
///
/// A goal-directed search that matches shared structure part by part
/// comes first, then the full best-first search within `limits`.
pub fn stt_reaches(m: &SttTerm, n: &SttTerm, limits: SearchLimits, nonempty: bool) -> Reach {
    let mut interner = Interner::default();
    let mut frees = Vec::new();
    let start = Db::from_term(m, &mut interner, &mut frees);
    let goal = Db::from_term(n, &mut interner, &mut frees);
    let mut expanded = 0;
    if start != goal {
        let mut calls = GUIDED_CALLS;
        if let Some(k) = guided(&start, &goal, limits.max_steps, &mut calls, &mut expanded) {
            return Reach {
                steps: Some(k),
                expanded,
            };
        }
    }
    let last = search(&start, &goal, limits, nonempty);
    Reach {
        steps: last.steps,
        expanded: expanded + last.expanded,
    }
}

const GUIDED_CALLS: usize = 20_000;
const LEAF_EXPANSIONS: usize = 500;

/// Goal-directed search: matching parts first, then a redex at the root,
/// then head reduction of the operator until it exposes one, and a small
/// best-first search at the leaves.
fn guided(m: &Db, n: &Db, steps: usize, calls: &mut usize, expanded: &mut usize) -> Option<usize> {
    if m == n {
        return Some(0);
    }
    if steps == 0 || *calls == 0 {
        return None;
    }
    *calls -= 1;
    match (m, n) {
        (Db::Lam(t1, b1), Db::Lam(t2, b2)) if t1 == t2 => {
            if let Some(k) = guided(b1, b2, steps, calls, expanded) {
                return Some(k);
            }
        }
        (Db::App(f1, a1), Db::App(f2, a2)) => {
            if let Some(f) = guided(f1, f2, steps, calls, expanded) {
                if let Some(a) = guided(a1, a2, steps - f, calls, expanded) {
                    return Some(f + a);
                }
            }
        }
        _ => {}
    }
    if let Some(c) = m.contract() {
        if let Some(k) = guided(&c, n, steps - 1, calls, expanded) {
            return Some(k + 1);
        }
    }
    if let Db::App(f, a) = m {
        if !matches!(**f, Db::Lam(..)) {
            let mut head = (**f).clone();
            let mut used = 0;
            while used + 1 < steps {
                match head.step_leftmost() {
                    Some(h) => head = h,
                    None => break,
                }
                used += 1;
                if let Db::Lam(_, body) = &head {
                    let c = body.subst_bound(0, a);
                    if let Some(k) = guided(&c, n, steps - used - 1, calls, expanded) {
                        return Some(k + used + 1);
                    }
                    break;
                }
            }
        }
    }
    let leaf = SearchLimits {
        max_steps: steps,
        max_expansions: LEAF_EXPANSIONS,
    };
    let r = search(m, n, leaf, false);
    *expanded += r.expanded;
    r.steps
}

fn search(start: &Db, goal: &Db, limits: SearchLimits, nonempty: bool) -> Reach {
    let mut goal_hashes = Vec::new();
    goal.subterm_hashes(&mut goal_hashes);
    let goal_set: HashSet<u64> = goal_hashes.into_iter().collect();
    let goal_size = goal.size();
    let score = |d: &Db| {
        let mut hs = Vec::new();
        d.subterm_hashes(&mut hs);
        let unmatched = hs.iter().filter(|h| !goal_set.contains(h)).count();
        unmatched + d.size().abs_diff(goal_size)
    };

    if !nonempty && start == goal {
        return Reach {
            steps: Some(0),
            expanded: 0,
        };
    }
    let mut best: HashMap<Db, usize> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut arena: Vec<Db> = Vec::new();
    heap.push(Reverse((score(start), 0usize, 0usize)));
    best.insert(start.clone(), 0);
    arena.push(start.clone());
    let mut expanded = 0;
    let mut buf = Vec::new();
    while let Some(Reverse((_, depth, idx))) = heap.pop() {
        if expanded >= limits.max_expansions {
            break;
        }
        if depth >= limits.max_steps {
            continue;
        }
        let cur = arena[idx].clone();
        if best.get(&cur).is_some_and(|&d| d < depth) {
            continue;
        }
        expanded += 1;
        buf.clear();
        cur.successors(&mut buf);
        for s in buf.drain(..) {
            let d = depth + 1;
            if s == *goal {
                return Reach {
                    steps: Some(d),
                    expanded,
                };
            }
            if best.get(&s).is_some_and(|&old| old <= d) {
                continue;
            }
            best.insert(s.clone(), d);
            heap.push(Reverse((score(&s), d, arena.len())));
            arena.push(s);
        }
    }
    Reach { steps: None, expanded }
}

/// Whether `n` is reachable from `m` in at most `bound` βη-steps.
pub fn stt_reduces_to(m: &SttTerm, n: &SttTerm, bound: usize) -> bool {
    stt_reaches(m, n, SearchLimits::steps(bound), false).steps.is_some()
}

/// Whether `n` is reachable from `m` in between one and `bound` βη-steps.
pub fn stt_reduces_to_plus(m: &SttTerm, n: &SttTerm, bound: usize) -> bool {
    stt_reaches(m, n, SearchLimits::steps(bound), true).steps.is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> SimpleType {
        SimpleType::Atom(Arc::from("p"))
    }

    fn v(x: &str) -> SttTerm {
        SttTerm::var(x)
    }

    #[test]
    fn inference_examples() {
        let ctx: SttContext = [("x".to_string(), p())].into_iter().collect();
        assert_eq!(stt_infer(&ctx, &v("x")).unwrap(), p());
        let id = SttTerm::lam("x", p(), v("x"));
        assert_eq!(stt_infer(&SttContext::new(), &id).unwrap(), SimpleType::arrow(p(), p()));
        assert!(stt_infer(&SttContext::new(), &SttTerm::app(v("x"), v("x"))).is_err());
    }

    #[test]
    fn beta_and_eta() {
        let t = SttTerm::app(SttTerm::lam("x", p(), v("x")), v("y"));
        assert_eq!(stt_normalize_beta_eta(&t, 10).unwrap(), v("y"));
        let t = SttTerm::lam("x", p(), SttTerm::app(v("f"), v("x")));
        assert_eq!(stt_normalize_beta_eta(&t, 10).unwrap(), v("f"));
        // x occurs in the function part: not an η-redex
        let t = SttTerm::lam("x", p(), SttTerm::app(v("x"), v("x")));
        assert!(stt_alpha_eq(&stt_normalize_beta_eta(&t, 10).unwrap(), &t));
    }

    #[test]
    fn fuel_is_reported() {
        let t = SttTerm::app(SttTerm::lam("x", p(), v("x")), v("y"));
        assert_eq!(stt_normalize_beta_eta(&t, 0), Err(SttFuelExhausted(0)));
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = SttTerm::lam("y", p(), SttTerm::app(v("x"), v("y")));
        let out = t.subst("x", &v("y"));
        let SttTerm::Lam(b, _, body) = &out else { panic!() };
        assert_ne!(b, "y");
        assert_eq!(**body, SttTerm::app(v("y"), v(b)));
    }

    #[test]
    fn reachability() {
        let id = SttTerm::lam("x", p(), v("x"));
        let t = SttTerm::app(id.clone(), SttTerm::app(id.clone(), v("y")));
        assert!(stt_reduces_to(&t, &v("y"), 2));
        assert!(!stt_reduces_to(&t, &v("y"), 1));
        assert!(stt_reduces_to(&t, &SttTerm::app(id, v("y")), 1));
        assert!(stt_reduces_to(&v("y"), &v("y"), 0));
        assert!(!stt_reduces_to_plus(&v("y"), &v("y"), 5));
        assert!(stt_alpha_eq(
            &SttTerm::lam("a", p(), v("a")),
            &SttTerm::lam("b", p(), v("b"))
        ));
    }
}
