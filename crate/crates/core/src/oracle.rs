//! Bounded proof search by enumerating normal terms.
//!
//! Independent of the saturation procedure: it looks for an actual term of
//! size at most `bound` and accepts it only after the type checker agrees.
//! Normal terms are generated in the usual canonical/neutral alternation:
//! an introduction matching the goal, a spine `x e1 ... ek` built from
//! applications and projections, a case split or ex falso on a spine, or a
//! belief introduction whose arguments are spines of boxed type. The body
//! of a belief introduction sees the ambient hypotheses as well.
//!
//! `⊤` is proved by `unit x` for some hypothesis `x`, or by `unit (λh:⊤. h)`
//! when there is none. Every other formula in a generated term is a
//! subformula of the goal or of a hypothesis.
//!
//! Search results are memoized per hypothesis set and goal. Hypotheses are
//! a set, so the memo is valid across queries.

use std::collections::HashMap;

use crate::context::Context;
use crate::formula::Formula;
use crate::term::{self, Name, Side, Term};
use crate::typing::check;

type Id = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Atom(u32),
    Bot,
    Top,
    Impl(Id, Id),
    Conj(Id, Id),
    Disj(Id, Id),
    Box(Id),
}

#[derive(Default)]
struct Table {
    nodes: Vec<Node>,
    formulas: Vec<Formula>,
    /// Types reachable from a hypothesis by applications and projections.
    targets: Vec<Vec<Id>>,
    ids: HashMap<Node, Id>,
    atoms: HashMap<String, u32>,
}

impl Table {
    fn intern(&mut self, f: &Formula) -> Id {
        let node = match f {
            Formula::Atom(a) => {
                let next = self.atoms.len() as u32;
                Node::Atom(*self.atoms.entry(a.to_string()).or_insert(next))
            }
            Formula::Bot => Node::Bot,
            Formula::Top => Node::Top,
            Formula::Impl(a, b) => Node::Impl(self.intern(a), self.intern(b)),
            Formula::Conj(a, b) => Node::Conj(self.intern(a), self.intern(b)),
            Formula::Disj(a, b) => Node::Disj(self.intern(a), self.intern(b)),
            Formula::Box(a) => Node::Box(self.intern(a)),
        };
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Id;
        let mut targets = vec![id];
        match node {
            Node::Impl(_, b) => targets.extend(self.targets[b as usize].iter().copied()),
            Node::Conj(a, b) => {
                for t in self.targets[a as usize].iter().chain(&self.targets[b as usize]) {
                    if !targets.contains(t) {
                        targets.push(*t);
                    }
                }
            }
            _ => {}
        }
        self.nodes.push(node);
        self.formulas.push(f.clone());
        self.targets.push(targets);
        self.ids.insert(node, id);
        id
    }

    fn node(&self, id: Id) -> Node {
        self.nodes[id as usize]
    }

    fn reaches(&self, from: Id, to: Id) -> bool {
        self.targets[from as usize].contains(&to)
    }
}

#[derive(Debug, Clone)]
enum Choice {
    Spine,
    Top,
    Lam,
    Pair,
    Inj(Side),
    Belief(Vec<Id>),
    Case(Id),
    Efq,
}

#[derive(Debug, Clone)]
enum Memo {
    Found(u32, Choice),
    /// No proof of size at most this.
    Above(u32),
}

fn with(h: &[Id], extra: impl IntoIterator<Item = Id>) -> Vec<Id> {
    let mut v = h.to_vec();
    v.extend(extra);
    v.sort_unstable();
    v.dedup();
    v
}

/// Memoizing searcher; reuse one instance across many queries.
pub struct Oracle {
    table: Table,
    memo: HashMap<(Vec<Id>, Id), Memo>,
    memo_limit: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::new()
    }
}

impl Oracle {
    pub fn new() -> Oracle {
        Oracle {
            table: Table::default(),
            memo: HashMap::new(),
            memo_limit: 4_000_000,
        }
    }

    fn hyp_set(&mut self, hyps: &[Formula]) -> Vec<Id> {
        let ids: Vec<Id> = hyps.iter().map(|f| self.table.intern(f)).collect();
        with(&ids, [])
    }

    /// Size of a smallest normal proof, if one has size at most `bound`.
    pub fn min_proof_size(&mut self, hyps: &[Formula], goal: &Formula, bound: u32) -> Option<u32> {
        if self.memo.len() > self.memo_limit {
            self.memo.clear();
        }
        let h = self.hyp_set(hyps);
        let g = self.table.intern(goal);
        self.prove(&h, g, bound)
    }

    /// A smallest normal proof of size at most `bound`, in the context
    /// naming hypothesis `i` as `h<i>`.
    pub fn proof(&mut self, hyps: &[Formula], goal: &Formula, bound: u32) -> Option<(Context, Term)> {
        let size = self.min_proof_size(hyps, goal, bound)?;
        let ctx: Context = hyps
            .iter()
            .enumerate()
            .map(|(i, f)| (format!("h{i}"), f.clone()))
            .collect();
        let mut names: Vec<(Name, Id)> = hyps
            .iter()
            .enumerate()
            .map(|(i, f)| (format!("h{i}"), self.table.intern(f)))
            .collect();
        let g = self.table.intern(goal);
        let mut counter = hyps.len();
        let t = self.build(&mut names, &mut counter, g, size);
        Some((ctx, t))
    }

    /// Whether a proof of size at most `bound` exists and type-checks.
    pub fn provable(&mut self, hyps: &[Formula], goal: &Formula, bound: u32) -> bool {
        match self.proof(hyps, goal, bound) {
            Some((ctx, t)) => check(&ctx, &t, goal),
            None => false,
        }
    }

    fn prove(&mut self, h: &[Id], g: Id, b: u32) -> Option<u32> {
        if b == 0 {
            return None;
        }
        let key = (h.to_vec(), g);
        match self.memo.get(&key) {
            Some(Memo::Found(m, _)) => return (*m <= b).then_some(*m),
            Some(Memo::Above(a)) if b <= *a => return None,
            _ => {}
        }
        let mut best: Option<(u32, Choice)> = None;
        let lim = |best: &Option<(u32, Choice)>| best.as_ref().map_or(b, |(s, _)| s - 1);
        let offer = |best: &mut Option<(u32, Choice)>, size: u32, c: Choice| {
            if best.as_ref().is_none_or(|(s, _)| size < *s) {
                *best = Some((size, c));
            }
        };

        if let Some(s) = self.spine(h, g, b) {
            offer(&mut best, s, Choice::Spine);
        }
        match self.table.node(g) {
            Node::Top => {
                let s = if h.is_empty() { 3 } else { 2 };
                if s <= lim(&best) {
                    offer(&mut best, s, Choice::Top);
                }
            }
            Node::Impl(a, c) => {
                let l = lim(&best);
                if l >= 2 {
                    if let Some(s) = self.prove(&with(h, [a]), c, l - 1) {
                        offer(&mut best, 1 + s, Choice::Lam);
                    }
                }
            }
            Node::Conj(a, c) => {
                let l = lim(&best);
                if l >= 3 {
                    if let Some(sa) = self.prove(h, a, l - 2) {
                        if let Some(sc) = self.prove(h, c, l - 1 - sa) {
                            offer(&mut best, 1 + sa + sc, Choice::Pair);
                        }
                    }
                }
            }
            Node::Disj(a, c) => {
                for (side, x) in [(Side::Left, a), (Side::Right, c)] {
                    let l = lim(&best);
                    if l >= 2 {
                        if let Some(s) = self.prove(h, x, l - 1) {
                            offer(&mut best, 1 + s, Choice::Inj(side));
                        }
                    }
                }
            }
            Node::Box(c) => self.try_belief(h, c, &mut best, b),
            _ => {}
        }
        for t in self.reachable(h) {
            match self.table.node(t) {
                Node::Disj(a, c) => {
                    let l = lim(&best);
                    if l < 4 {
                        continue;
                    }
                    let Some(st) = self.spine(h, t, l - 3) else {
                        continue;
                    };
                    let Some(sl) = self.prove(&with(h, [a]), g, l - 2 - st) else {
                        continue;
                    };
                    if let Some(sr) = self.prove(&with(h, [c]), g, l - 1 - st - sl) {
                        offer(&mut best, 1 + st + sl + sr, Choice::Case(t));
                    }
                }
                Node::Bot if g != t => {
                    let l = lim(&best);
                    if l >= 2 {
                        if let Some(st) = self.spine(h, t, l - 1) {
                            offer(&mut best, 1 + st, Choice::Efq);
                        }
                    }
                }
                _ => {}
            }
        }

        let result = best.as_ref().map(|(s, _)| *s);
        let entry = match best {
            Some((s, c)) => Memo::Found(s, c),
            None => Memo::Above(b),
        };
        self.memo.insert(key, entry);
        result
    }

    fn try_belief(&mut self, h: &[Id], c: Id, best: &mut Option<(u32, Choice)>, b: u32) {
        let boxed: Vec<Id> = self
            .reachable(h)
            .into_iter()
            .filter(|&t| matches!(self.table.node(t), Node::Box(_)))
            .collect();
        let costs: Vec<Option<u32>> = boxed
            .iter()
            .map(|&t| if b >= 3 { self.spine(h, t, b - 2) } else { None })
            .collect();
        for mask in 0u32..(1 << boxed.len()) {
            let l = best.as_ref().map_or(b, |(s, _)| s - 1);
            let chosen: Vec<usize> = (0..boxed.len()).filter(|i| mask & (1 << i) != 0).collect();
            let Some(args) = chosen.iter().map(|&i| costs[i]).sum::<Option<u32>>() else {
                continue;
            };
            if l < args + 2 {
                continue;
            }
            let unboxed = chosen.iter().map(|&i| match self.table.node(boxed[i]) {
                Node::Box(a) => a,
                _ => unreachable!(),
            });
            let inner = with(h, unboxed);
            if let Some(s) = self.prove(&inner, c, l - 1 - args) {
                let size = 1 + args + s;
                if best.as_ref().is_none_or(|(bs, _)| size < *bs) {
                    *best = Some((size, Choice::Belief(chosen.iter().map(|&i| boxed[i]).collect())));
                }
            }
        }
    }

    /// Every type some spine over `h` can end in.
    fn reachable(&self, h: &[Id]) -> Vec<Id> {
        let mut out: Vec<Id> = Vec::new();
        for &f in h {
            for &t in &self.table.targets[f as usize] {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Smallest spine of type `t`, if at most `cap`.
    fn spine(&mut self, h: &[Id], t: Id, cap: u32) -> Option<u32> {
        let mut best: Option<u32> = None;
        for &f in h {
            if !self.table.reaches(f, t) {
                continue;
            }
            let l = best.map_or(cap, |s| s - 1);
            if l == 0 {
                break;
            }
            if let Some(e) = self.elim(h, f, t, l - 1) {
                best = Some(1 + e);
            }
        }
        best
    }

    /// Smallest cost of eliminations taking `f` to `t`, if at most `cap`.
    fn elim(&mut self, h: &[Id], f: Id, t: Id, cap: u32) -> Option<u32> {
        if f == t {
            return Some(0);
        }
        let mut best: Option<u32> = None;
        match self.table.node(f) {
            Node::Impl(a, b) if self.table.reaches(b, t) && cap >= 2 => {
                if let Some(sa) = self.prove(h, a, cap - 1) {
                    if let Some(eb) = self.elim(h, b, t, cap - 1 - sa) {
                        best = Some(1 + sa + eb);
                    }
                }
            }
            Node::Conj(a, b) => {
                for x in [a, b] {
                    let l = best.map_or(cap, |s| s - 1);
                    if self.table.reaches(x, t) && l >= 1 {
                        if let Some(e) = self.elim(h, x, t, l - 1) {
                            best = Some(1 + e);
                        }
                    }
                }
            }
            _ => {}
        }
        best
    }

    fn ids_of(names: &[(Name, Id)]) -> Vec<Id> {
        let ids: Vec<Id> = names.iter().map(|(_, i)| *i).collect();
        with(&ids, [])
    }

    fn fresh(counter: &mut usize) -> Name {
        let n = format!("h{counter}");
        *counter += 1;
        n
    }

    /// Rebuilds a proof of `g` of exactly `size` from the memo.
    fn build(&mut self, names: &mut Vec<(Name, Id)>, counter: &mut usize, g: Id, size: u32) -> Term {
        let h = Self::ids_of(names);
        assert_eq!(self.prove(&h, g, size), Some(size));
        let Some(Memo::Found(_, choice)) = self.memo.get(&(h.clone(), g)).cloned() else {
            unreachable!("memo entry for a found proof");
        };
        let goal = self.table.formulas[g as usize].clone();
        match (choice, self.table.node(g)) {
            (Choice::Spine, _) => self.build_spine(names, counter, g, size),
            (Choice::Top, _) => match names.first() {
                Some((x, _)) => term::unit(term::var(x)),
                None => term::unit(term::lam("h", Formula::Top, term::var("h"))),
            },
            (Choice::Lam, Node::Impl(a, c)) => {
                let x = Self::fresh(counter);
                names.push((x.clone(), a));
                let body = self.build(names, counter, c, size - 1);
                names.pop();
                term::lam(&x, self.table.formulas[a as usize].clone(), body)
            }
            (Choice::Pair, Node::Conj(a, c)) => {
                let sa = self.prove(&h, a, size).unwrap();
                let l = self.build(names, counter, a, sa);
                let r = self.build(names, counter, c, size - 1 - sa);
                term::pair(l, r)
            }
            (Choice::Inj(side), Node::Disj(a, c)) => {
                let x = if side == Side::Left { a } else { c };
                term::inj(side, goal, self.build(names, counter, x, size - 1))
            }
            (Choice::Belief(boxes), Node::Box(c)) => {
                let mut binders = Vec::new();
                let mut args = Vec::new();
                let mut used = 0;
                for &bx in &boxes {
                    let s = self.spine(&h, bx, size).unwrap();
                    used += s;
                    args.push(self.build_spine(names, counter, bx, s));
                    let Node::Box(a) = self.table.node(bx) else {
                        unreachable!()
                    };
                    binders.push((Self::fresh(counter), a));
                }
                let depth = names.len();
                names.extend(binders.iter().cloned());
                let body = self.build(names, counter, c, size - 1 - used);
                names.truncate(depth);
                let binders = binders
                    .into_iter()
                    .map(|(x, a)| (x, self.table.formulas[a as usize].clone()))
                    .collect();
                Term::BoxIntro {
                    binders,
                    args,
                    body: Box::new(body),
                }
            }
            (Choice::Case(t), _) => {
                let Node::Disj(a, c) = self.table.node(t) else {
                    unreachable!()
                };
                let st = self.spine(&h, t, size).unwrap();
                let scrut = self.build_spine(names, counter, t, st);
                let sl = self.prove(&with(&h, [a]), g, size).unwrap();
                let x = Self::fresh(counter);
                names.push((x.clone(), a));
                let left = self.build(names, counter, g, sl);
                names.pop();
                let y = Self::fresh(counter);
                names.push((y.clone(), c));
                let right = self.build(names, counter, g, size - 1 - st - sl);
                names.pop();
                term::case(scrut, &x, left, &y, right)
            }
            (Choice::Efq, _) => {
                let bot = self.table.intern(&Formula::Bot);
                let scrut = self.build_spine(names, counter, bot, size - 1);
                term::efq(goal, scrut)
            }
            (c, n) => unreachable!("choice {c:?} for {n:?}"),
        }
    }

    fn build_spine(&mut self, names: &mut Vec<(Name, Id)>, counter: &mut usize, t: Id, size: u32) -> Term {
        let h = Self::ids_of(names);
        for i in (0..names.len()).rev() {
            let (x, f) = names[i].clone();
            if !self.table.reaches(f, t) {
                continue;
            }
            if self.elim(&h, f, t, size - 1) == Some(size - 1) {
                return self.build_elim(names, counter, term::var(&x), f, t, size - 1);
            }
        }
        unreachable!("spine of the recorded size")
    }

    fn build_elim(
        &mut self,
        names: &mut Vec<(Name, Id)>,
        counter: &mut usize,
        head: Term,
        f: Id,
        t: Id,
        cost: u32,
    ) -> Term {
        if f == t && cost == 0 {
            return head;
        }
        let h = Self::ids_of(names);
        match self.table.node(f) {
            Node::Impl(a, b) => {
                let sa = self.prove(&h, a, cost).unwrap();
                let arg = self.build(names, counter, a, sa);
                self.build_elim(names, counter, term::app(head, arg), b, t, cost - 1 - sa)
            }
            Node::Conj(a, b) => {
                for (side, x) in [(Side::Left, a), (Side::Right, b)] {
                    if self.table.reaches(x, t) && self.elim(&h, x, t, cost - 1) == Some(cost - 1) {
                        return self.build_elim(names, counter, term::proj(side, head), x, t, cost - 1);
                    }
                }
                unreachable!("projection of the recorded cost")
            }
            n => unreachable!("elimination from {n:?}"),
        }
    }
}

/// Whether a normal proof of size at most `bound` exists (fresh memo).
pub fn oracle_provable(hyps: &[Formula], goal: &Formula, bound: u32) -> bool {
    Oracle::new().provable(hyps, goal, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::subformula_violations;
    use crate::rewrite::is_normal;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn smallest(goal: &str) -> Option<u32> {
        Oracle::new().min_proof_size(&[], &f(goal), 12)
    }

    #[test]
    fn finds_small_proofs() {
        assert!(oracle_provable(&[], &f("p -> [] p"), 3));
        assert!(oracle_provable(&[], &f("[] (p -> r) -> [] p -> [] r"), 12));
        assert_eq!(smallest("p -> p"), Some(2));
        assert_eq!(smallest("p -> [] p"), Some(3));
        assert_eq!(smallest("p \\/ r -> r \\/ p"), Some(7));
        assert_eq!(smallest("top"), Some(3));
    }

    #[test]
    fn bound_is_respected() {
        assert!(!oracle_provable(&[], &f("p -> [] p"), 2));
        assert!(!oracle_provable(&[], &f("((p \\/ (p -> bot)) -> bot) -> bot"), 8));
        assert!(oracle_provable(&[], &f("((p \\/ (p -> bot)) -> bot) -> bot"), 9));
    }

    #[test]
    fn rejects_non_theorems() {
        for s in ["[] p -> p", "((p -> r) -> p) -> p", "bot", "[] bot", "p \\/ (p -> bot)"] {
            assert!(!oracle_provable(&[], &f(s), 12), "{s}");
        }
    }

    #[test]
    fn proofs_are_normal_and_stay_in_the_universe() {
        let mut o = Oracle::new();
        for s in [
            "[] (p -> r) -> [] p -> [] r",
            "p \\/ r -> r \\/ p",
            "[] p /\\ [] r -> [] (p /\\ r)",
            "bot -> [] p",
            "(p -> bot) -> p -> r",
            "[] (p /\\ r) -> [] r",
        ] {
            let goal = f(s);
            let (ctx, t) = o.proof(&[], &goal, 12).unwrap();
            assert!(check(&ctx, &t, &goal), "{s}: {t}");
            assert!(is_normal(&t), "{s}: {t}");
            assert!(subformula_violations(&ctx, &t, &goal).unwrap().is_empty(), "{s}: {t}");
        }
    }

    #[test]
    fn hypotheses_are_named() {
        let mut o = Oracle::new();
        let (ctx, t) = o.proof(&[f("p"), f("p -> r")], &f("r"), 5).unwrap();
        assert_eq!(t, term::app(term::var("h1"), term::var("h0")));
        assert_eq!(ctx.len(), 2);
    }
}
