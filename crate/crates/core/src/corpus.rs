//! Seeded random term generators.
//!
//! The typed generator works goal-first: it builds a term of a requested
//! formula, choosing among introductions, eliminations of context
//! variables and deliberately planted redexes of every rule. Binder names
//! come from a small pool so shadowing and capture situations are common.
//! Leaves of random formulas are configurable; with inhabited leaves and an
//! empty context every generated term is closed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::context::Context;
use crate::formula::Formula;
use crate::term::{self, Name, Side, Term};

const POOL: [&str; 4] = ["x", "y", "w", "v"];

#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Upper bound on term size; larger draws are discarded.
    pub max_size: usize,
    /// Rough node budget handed to the root.
    pub budget: usize,
    /// Whether ex falso and `⊥` may appear.
    pub bot: bool,
    /// Percentage of choices that plant a redex.
    pub redex_percent: u32,
    pub leaves: Vec<Formula>,
    pub context: Context,
    /// Whether binders may reuse names already in scope.
    pub shadow: bool,
}

impl GenConfig {
    /// Open terms over `a:p, b:r, f:p→r, d:p∨r, c:p∧r, u:□p`, plus
    /// `z:⊥, n:p→⊥` when `bot` is set.
    pub fn open(bot: bool) -> GenConfig {
        let p = Formula::atom("p");
        let r = Formula::atom("r");
        let mut ctx: Context = [
            ("a", p.clone()),
            ("b", r.clone()),
            ("f", Formula::implies(p.clone(), r.clone())),
            ("d", Formula::or(p.clone(), r.clone())),
            ("c", Formula::and(p.clone(), r.clone())),
            ("u", Formula::boxed(p.clone())),
        ]
        .into_iter()
        .map(|(x, a)| (x.to_string(), a))
        .collect();
        let mut leaves = vec![p.clone(), r];
        if bot {
            ctx.insert("z", Formula::Bot);
            ctx.insert("n", Formula::not(p));
            leaves.push(Formula::Bot);
        }
        GenConfig {
            max_size: 24,
            budget: 14,
            bot,
            redex_percent: 45,
            leaves,
            context: ctx,
            shadow: true,
        }
    }

    /// Closed terms; leaves are `p → p` and `□(r → r)`.
    pub fn closed() -> GenConfig {
        let p = Formula::atom("p");
        let r = Formula::atom("r");
        GenConfig {
            max_size: 30,
            budget: 14,
            bot: false,
            redex_percent: 50,
            leaves: vec![
                Formula::implies(p.clone(), p),
                Formula::boxed(Formula::implies(r.clone(), r)),
            ],
            context: Context::new(),
            shadow: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TypedSample {
    pub ctx: Context,
    pub term: Term,
    pub ty: Formula,
}

pub struct TermGenerator {
    rng: ChaCha8Rng,
    cfg: GenConfig,
}

impl TermGenerator {
    pub fn new(seed: u64, cfg: GenConfig) -> TermGenerator {
        TermGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
        }
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_ratio(1, 3) {
            return self.cfg.leaves.choose(&mut self.rng).unwrap().clone();
        }
        match self.rng.gen_range(0..4) {
            0 => Formula::implies(self.formula(depth - 1), self.formula(depth - 1)),
            1 => Formula::and(self.formula(depth - 1), self.formula(depth - 1)),
            2 => Formula::or(self.formula(depth - 1), self.formula(depth - 1)),
            _ => Formula::boxed(self.formula(depth - 1)),
        }
    }

    /// A random ⊥-free formula for the goal (⊥ only inside when enabled).
    fn goal(&mut self) -> Formula {
        loop {
            let f = self.formula(2);
            if f != Formula::Bot {
                return f;
            }
        }
    }

    pub fn sample(&mut self) -> TypedSample {
        loop {
            let ty = self.goal();
            let ctx = self.cfg.context.clone();
            let budget = self.rng.gen_range(3..=self.cfg.budget) as i32;
            let term = self.gen(&ctx, &ty, budget);
            if term.size() <= self.cfg.max_size {
                return TypedSample { ctx, term, ty };
            }
        }
    }

    fn binder(&mut self, ctx: &Context) -> Name {
        self.distinct_binders(ctx, 1).pop().unwrap()
    }

    /// `n` distinct names; bound names of `ctx` are avoided unless
    /// shadowing is enabled.
    fn distinct_binders(&mut self, ctx: &Context, n: usize) -> Vec<Name> {
        let mut pool: Vec<Name> = POOL.iter().map(|x| x.to_string()).collect();
        if !self.cfg.shadow {
            pool.retain(|x| !ctx.contains(x));
            let mut i = 1;
            while pool.len() < n {
                let x = format!("x{i}");
                if !ctx.contains(&x) {
                    pool.push(x);
                }
                i += 1;
            }
        }
        pool.shuffle(&mut self.rng);
        pool.truncate(n);
        pool
    }

    /// A term of `goal` in `ctx`, of roughly `budget` nodes.
    pub fn gen(&mut self, ctx: &Context, goal: &Formula, budget: i32) -> Term {
        if budget <= 1 {
            return self.small(ctx, goal);
        }
        let roll = self.rng.gen_range(0..100);
        if roll < self.cfg.redex_percent {
            if let Some(t) = self.redex(ctx, goal, budget) {
                return t;
            }
        }
        if self.rng.gen_ratio(1, 3) {
            if let Some(t) = self.neutral(ctx, goal, budget) {
                return t;
            }
        }
        self.intro(ctx, goal, budget)
    }

    /// A smallest-effort term: a matching variable or minimal introductions.
    fn small(&mut self, ctx: &Context, goal: &Formula) -> Term {
        let vars: Vec<&Name> = ctx.iter().filter(|(_, a)| *a == goal).map(|(x, _)| x).collect();
        if let Some(x) = vars.choose(&mut self.rng) {
            return term::var(x);
        }
        match goal {
            Formula::Impl(a, b) => {
                let x = self.binder(ctx);
                let inner = ctx.clone().with(x.clone(), (**a).clone());
                term::lam(&x, (**a).clone(), self.small(&inner, b))
            }
            Formula::Conj(a, b) => term::pair(self.small(ctx, a), self.small(ctx, b)),
            Formula::Disj(a, _) => term::inj(Side::Left, goal.clone(), self.small(ctx, a)),
            Formula::Box(b) => term::bel(vec![], vec![], self.small(ctx, b)),
            Formula::Top => term::unit(term::lam("x", Formula::Top, term::var("x"))),
            Formula::Bot => match ctx.iter().find(|(_, a)| **a == Formula::Bot) {
                Some((x, _)) => term::var(x),
                None => panic!("no inhabitant of bot in the generator context"),
            },
            Formula::Atom(_) => panic!("no inhabitant of {goal} in the generator context"),
        }
    }

    fn intro(&mut self, ctx: &Context, goal: &Formula, budget: i32) -> Term {
        match goal {
            Formula::Impl(a, b) => {
                let x = self.binder(ctx);
                let inner = ctx.clone().with(x.clone(), (**a).clone());
                term::lam(&x, (**a).clone(), self.gen(&inner, b, budget - 1))
            }
            Formula::Conj(a, b) => {
                let (l, r) = self.split(budget - 1);
                term::pair(self.gen(ctx, a, l), self.gen(ctx, b, r))
            }
            Formula::Disj(a, b) => {
                if self.rng.gen_bool(0.5) {
                    term::inj(Side::Left, goal.clone(), self.gen(ctx, a, budget - 1))
                } else {
                    term::inj(Side::Right, goal.clone(), self.gen(ctx, b, budget - 1))
                }
            }
            Formula::Box(b) => {
                let n = self.rng.gen_range(0..=2);
                self.belief(ctx, b, budget, n, |_, _, _, _| None)
            }
            _ => self.neutral(ctx, goal, budget).unwrap_or_else(|| self.small(ctx, goal)),
        }
    }

    /// `bel x1 = t1, ..., xn = tn in s : □goal`; `arg` may supply argument
    /// `i` of type `□A`.
    fn belief(
        &mut self,
        ctx: &Context,
        goal: &Formula,
        budget: i32,
        n: usize,
        mut arg: impl FnMut(&mut Self, &Context, &Formula, i32) -> Option<Term>,
    ) -> Term {
        let names = self.distinct_binders(ctx, n);
        let share = (budget - 1) / (n as i32 + 1);
        let mut binders = Vec::new();
        let mut args = Vec::new();
        let mut inner = ctx.clone();
        for x in names {
            let a = self.formula(1);
            let boxed = Formula::boxed(a.clone());
            let t = match arg(self, ctx, &boxed, share) {
                Some(t) => t,
                None => self.gen(ctx, &boxed, share),
            };
            args.push(t);
            inner.insert(x.clone(), a.clone());
            binders.push((x, a));
        }
        let body = self.gen(&inner, goal, share);
        Term::BoxIntro {
            binders,
            args,
            body: Box::new(body),
        }
    }

    fn split(&mut self, budget: i32) -> (i32, i32) {
        let l = self.rng.gen_range(0..=budget.max(0));
        (l, budget - l)
    }

    /// An elimination whose major premise is a context variable.
    fn neutral(&mut self, ctx: &Context, goal: &Formula, budget: i32) -> Option<Term> {
        let mut options: Vec<Term> = Vec::new();
        let entries: Vec<(Name, Formula)> = ctx.iter().map(|(x, a)| (x.clone(), a.clone())).collect();
        for (x, a) in entries {
            match &a {
                Formula::Impl(dom, cod) if **cod == *goal => {
                    options.push(term::app(term::var(&x), self.gen(ctx, dom, budget - 2)));
                }
                Formula::Conj(l, _) if **l == *goal => options.push(term::proj(Side::Left, term::var(&x))),
                Formula::Conj(_, r) if **r == *goal => options.push(term::proj(Side::Right, term::var(&x))),
                Formula::Disj(l, r) if options.is_empty() && self.rng.gen_ratio(1, 2) => {
                    let t = self.case_on(ctx, term::var(&x), l, r, goal, budget - 2);
                    options.push(t);
                }
                Formula::Bot if *goal != Formula::Bot => options.push(term::efq(goal.clone(), term::var(&x))),
                _ => {}
            }
        }
        options.choose(&mut self.rng).cloned()
    }

    fn case_on(&mut self, ctx: &Context, scrut: Term, l: &Formula, r: &Formula, goal: &Formula, budget: i32) -> Term {
        let (x, y) = (self.binder(ctx), self.binder(ctx));
        let (bl, br) = self.split(budget);
        let left = self.gen(&ctx.clone().with(x.clone(), l.clone()), goal, bl);
        let right = self.gen(&ctx.clone().with(y.clone(), r.clone()), goal, br);
        term::case(scrut, &x, left, &y, right)
    }

    /// A term of `goal` whose root is a redex of a randomly chosen rule.
    fn redex(&mut self, ctx: &Context, goal: &Formula, budget: i32) -> Option<Term> {
        let boxed_goal = goal.as_box().cloned();
        let mut kinds = vec!["D1", "D2", "D3", "P1", "P2", "P3"];
        if boxed_goal.is_some() {
            kinds.extend(["D4", "D5", "P4"]);
        }
        if self.cfg.bot {
            kinds.extend(["B1", "B2", "B3", "B4", "PBot"]);
            if boxed_goal.is_some() {
                kinds.push("B5");
            }
        }
        let kind = *kinds.choose(&mut self.rng).unwrap();
        let b = budget - 1;
        let half = b / 2;
        let t = match kind {
            "D1" => {
                let a = self.formula(1);
                let x = self.binder(ctx);
                let body = self.gen(&ctx.clone().with(x.clone(), a.clone()), goal, half);
                term::app(term::lam(&x, a.clone(), body), self.gen(ctx, &a, b - half))
            }
            "D2" => {
                let other = self.formula(1);
                let g = self.gen(ctx, goal, half);
                let o = self.gen(ctx, &other, b - half);
                if self.rng.gen_bool(0.5) {
                    term::proj(Side::Left, term::pair(g, o))
                } else {
                    term::proj(Side::Right, term::pair(o, g))
                }
            }
            "D3" => {
                let (a, c) = (self.formula(1), self.formula(1));
                let side = if self.rng.gen_bool(0.5) {
                    Side::Left
                } else {
                    Side::Right
                };
                let inner = if side == Side::Left { &a } else { &c };
                let scrut = term::inj(side, Formula::or(a.clone(), c.clone()), self.gen(ctx, inner, b / 3));
                self.case_on(ctx, scrut, &a, &c, goal, b - b / 3)
            }
            "D4" => {
                let body = boxed_goal.unwrap();
                let n = self.rng.gen_range(1..=2);
                let which = self.rng.gen_range(0..n);
                let mut i = 0;
                self.belief(ctx, &body, budget, n, |g, ctx, boxed, share| {
                    let hit = i == which;
                    i += 1;
                    let inner = boxed.as_box().unwrap().clone();
                    let m = g.rng.gen_range(0..=2);
                    hit.then(|| g.belief(ctx, &inner, share, m, |_, _, _, _| None))
                })
            }
            "D5" => {
                let x = self.binder(ctx);
                let arg = self.gen(ctx, goal, b);
                let body = boxed_goal.unwrap();
                term::bel(vec![(&x, body)], vec![arg], term::var(&x))
            }
            "P1" => {
                let a = self.formula(1);
                let scrut = self.disjunction(ctx, b / 3);
                let (l, r) = (scrut.1.clone(), scrut.2.clone());
                let f = Formula::implies(a.clone(), goal.clone());
                let c = self.case_on(ctx, scrut.0, &l, &r, &f, b / 3);
                term::app(c, self.gen(ctx, &a, b / 3))
            }
            "P2" => {
                let other = self.formula(1);
                let side = if self.rng.gen_bool(0.5) {
                    Side::Left
                } else {
                    Side::Right
                };
                let conj = match side {
                    Side::Left => Formula::and(goal.clone(), other),
                    Side::Right => Formula::and(other, goal.clone()),
                };
                let (s, l, r) = self.disjunction(ctx, b / 3);
                term::proj(side, self.case_on(ctx, s, &l, &r, &conj, b - b / 3))
            }
            "P3" => {
                let (s, l, r) = self.disjunction(ctx, b / 4);
                let (a, c) = (self.formula(1), self.formula(1));
                let mid = Formula::or(a.clone(), c.clone());
                let inner = self.case_on(ctx, s, &l, &r, &mid, b / 3);
                self.case_on(ctx, inner, &a, &c, goal, b - b / 4 - b / 3)
            }
            "P4" => {
                let body = boxed_goal.unwrap();
                let n = self.rng.gen_range(1..=2);
                let which = self.rng.gen_range(0..n);
                let mut i = 0;
                self.belief(ctx, &body, budget, n, |g, ctx, boxed, share| {
                    let hit = i == which;
                    i += 1;
                    hit.then(|| {
                        let (s, l, r) = g.disjunction(ctx, share / 3);
                        g.case_on(ctx, s, &l, &r, boxed, share - share / 3)
                    })
                })
            }
            "PBot" => {
                let (s, l, r) = self.disjunction(ctx, b / 3);
                term::efq(goal.clone(), self.case_on(ctx, s, &l, &r, &Formula::Bot, b - b / 3))
            }
            "B1" => {
                let a = self.formula(1);
                let e = term::efq(
                    Formula::implies(a.clone(), goal.clone()),
                    self.gen(ctx, &Formula::Bot, half),
                );
                term::app(e, self.gen(ctx, &a, b - half))
            }
            "B2" => {
                let other = self.formula(1);
                let (side, conj) = if self.rng.gen_bool(0.5) {
                    (Side::Left, Formula::and(goal.clone(), other))
                } else {
                    (Side::Right, Formula::and(other, goal.clone()))
                };
                term::proj(side, term::efq(conj, self.gen(ctx, &Formula::Bot, b)))
            }
            "B3" => {
                let (a, c) = (self.formula(1), self.formula(1));
                let e = term::efq(Formula::or(a.clone(), c.clone()), self.gen(ctx, &Formula::Bot, b / 3));
                self.case_on(ctx, e, &a, &c, goal, b - b / 3)
            }
            "B4" => term::efq(goal.clone(), term::efq(Formula::Bot, self.gen(ctx, &Formula::Bot, b))),
            "B5" => {
                let body = boxed_goal.unwrap();
                let n = self.rng.gen_range(1..=2);
                let which = self.rng.gen_range(0..n);
                let mut i = 0;
                self.belief(ctx, &body, budget, n, |g, ctx, boxed, share| {
                    let hit = i == which;
                    i += 1;
                    hit.then(|| term::efq(boxed.clone(), g.gen(ctx, &Formula::Bot, share)))
                })
            }
            _ => return None,
        };
        Some(t)
    }

    /// A scrutinee: a disjunction term and its two sides.
    fn disjunction(&mut self, ctx: &Context, budget: i32) -> (Term, Formula, Formula) {
        let (a, c) = (self.formula(1), self.formula(1));
        let f = Formula::or(a.clone(), c.clone());
        (self.gen(ctx, &f, budget), a, c)
    }
}

/// `n` typed samples from `seed`.
pub fn typed_corpus(seed: u64, n: usize, cfg: GenConfig) -> Vec<TypedSample> {
    let mut g = TermGenerator::new(seed, cfg);
    (0..n).map(|_| g.sample()).collect()
}

/// Untyped terms without ex falso or `unit`, rich in permutation redexes.
pub struct UntypedGenerator {
    rng: ChaCha8Rng,
    max_size: usize,
}

impl UntypedGenerator {
    pub fn new(seed: u64, max_size: usize) -> UntypedGenerator {
        UntypedGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_size,
        }
    }

    pub fn sample(&mut self) -> Term {
        loop {
            let budget = self.rng.gen_range(2..=self.max_size as i32);
            let t = self.gen(budget);
            if t.size() <= self.max_size {
                return t;
            }
        }
    }

    fn name(&mut self) -> Name {
        ["x", "y", "z", "w"].choose(&mut self.rng).unwrap().to_string()
    }

    fn case(&mut self, budget: i32) -> Term {
        let b = budget - 1;
        let (x, y) = (self.name(), self.name());
        let s = self.gen(b / 3);
        let l = self.gen(b / 3);
        let r = self.gen(b - 2 * (b / 3));
        term::case(s, &x, l, &y, r)
    }

    pub fn gen(&mut self, budget: i32) -> Term {
        let p = Formula::atom("p");
        if budget <= 1 {
            let x = self.name();
            return term::var(&x);
        }
        let b = budget - 1;
        match self.rng.gen_range(0..12) {
            0 => {
                let x = self.name();
                term::lam(&x, p, self.gen(b))
            }
            1 => term::app(self.gen(b / 2), self.gen(b - b / 2)),
            2 => term::pair(self.gen(b / 2), self.gen(b - b / 2)),
            3 => term::proj(Side::Left, self.gen(b)),
            4 => term::inj(Side::Right, Formula::or(p.clone(), p), self.gen(b)),
            5 => self.case(budget),
            6 => term::app(self.case(b / 2 + 1), self.gen(b - b / 2 - 1)),
            7 => term::proj(Side::Right, self.case(b)),
            8 => {
                let (x, y) = (self.name(), self.name());
                let inner = self.case(b / 2);
                let l = self.gen(b / 4);
                let r = self.gen(b - b / 2 - b / 4);
                term::case(inner, &x, l, &y, r)
            }
            _ => {
                let n = self.rng.gen_range(0..=3usize);
                let mut names: Vec<&str> = vec!["u", "v", "s"];
                names.shuffle(&mut self.rng);
                let share = b / (n as i32 + 1);
                let args = (0..n)
                    .map(|_| {
                        if self.rng.gen_bool(0.5) {
                            self.case(share)
                        } else {
                            self.gen(share)
                        }
                    })
                    .collect();
                let binders = names[..n].iter().map(|x| (*x, p.clone())).collect();
                term::bel(binders, args, self.gen(share))
            }
        }
    }
}

pub fn untyped_corpus(seed: u64, n: usize, max_size: usize) -> Vec<Term> {
    let mut g = UntypedGenerator::new(seed, max_size);
    (0..n).map(|_| g.sample()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::infer;

    #[test]
    fn typed_samples_have_their_type() {
        for bot in [false, true] {
            for s in typed_corpus(7, 300, GenConfig::open(bot)) {
                assert_eq!(infer(&s.ctx, &s.term).as_ref(), Ok(&s.ty), "{}", s.term);
                assert!(s.term.size() <= 24);
                if !bot {
                    assert!(!s.term.contains_efq_or_unit());
                }
            }
        }
    }

    #[test]
    fn closed_samples_are_closed() {
        for s in typed_corpus(3, 300, GenConfig::closed()) {
            assert!(s.term.free_vars().is_empty(), "{}", s.term);
            assert_eq!(infer(&s.ctx, &s.term).as_ref(), Ok(&s.ty));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a: Vec<Term> = typed_corpus(11, 50, GenConfig::open(true))
            .into_iter()
            .map(|s| s.term)
            .collect();
        let b: Vec<Term> = typed_corpus(11, 50, GenConfig::open(true))
            .into_iter()
            .map(|s| s.term)
            .collect();
        assert_eq!(a, b);
        assert_eq!(untyped_corpus(5, 50, 25), untyped_corpus(5, 50, 25));
    }

    #[test]
    fn untyped_samples_avoid_efq_and_unit() {
        for t in untyped_corpus(1, 500, 25) {
            assert!(t.size() <= 25);
            assert!(!t.contains_efq_or_unit());
        }
    }
}
