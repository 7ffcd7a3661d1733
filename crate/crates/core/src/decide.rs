//! Derivability by saturation over the subformula universe.
//!
//! `closure(H)` is the set of universe formulas derivable from `H`. It is
//! the least set containing `H` (and `⊤` when present) that is closed under
//! the introduction rules and under the elimination rules whose major
//! premise is already derived. Rules that discharge hypotheses recurse on
//! a strictly larger hypothesis set, so the recursion is well founded.
//! The belief rule takes every derived `□A` at once: the body is searched
//! from the derived set extended with each such `A`.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::formula::{collect_subformulas, Formula};

/// Every subformula of the goal and of the hypotheses.
pub fn universe<'a>(goal: &Formula, hyps: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_subformulas(goal, &mut out);
    for h in hyps {
        collect_subformulas(h, &mut out);
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Leaf,
    Bot,
    Top,
    Impl(usize, usize),
    Conj(usize, usize),
    Disj(usize, usize),
    Box(usize),
}

/// Saturation engine for one universe; memoizes closures.
pub struct Saturator {
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    shapes: Vec<Shape>,
    top: Option<usize>,
    memo: HashMap<FixedBitSet, FixedBitSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub provable: bool,
    pub universe_size: usize,
    /// Hypothesis sets whose closure was computed.
    pub sequents: usize,
}

impl Saturator {
    pub fn new(universe: BTreeSet<Formula>) -> Saturator {
        let formulas: Vec<Formula> = universe.into_iter().collect();
        let index: HashMap<Formula, usize> = formulas.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let shapes = formulas
            .iter()
            .map(|f| match f {
                Formula::Atom(_) => Shape::Leaf,
                Formula::Bot => Shape::Bot,
                Formula::Top => Shape::Top,
                Formula::Impl(a, b) => Shape::Impl(index[&**a], index[&**b]),
                Formula::Conj(a, b) => Shape::Conj(index[&**a], index[&**b]),
                Formula::Disj(a, b) => Shape::Disj(index[&**a], index[&**b]),
                Formula::Box(a) => Shape::Box(index[&**a]),
            })
            .collect();
        let top = index.get(&Formula::Top).copied();
        Saturator {
            formulas,
            index,
            shapes,
            top,
            memo: HashMap::new(),
        }
    }

    pub fn universe_size(&self) -> usize {
        self.formulas.len()
    }

    pub fn sequents(&self) -> usize {
        self.memo.len()
    }

    fn set_of<'a>(&self, fs: impl IntoIterator<Item = &'a Formula>) -> Option<FixedBitSet> {
        let mut s = FixedBitSet::with_capacity(self.formulas.len());
        for f in fs {
            s.insert(*self.index.get(f)?);
        }
        Some(s)
    }

    /// Whether `goal` follows from `hyps`; both must lie in the universe.
    pub fn derives<'a>(&mut self, hyps: impl IntoIterator<Item = &'a Formula>, goal: &Formula) -> bool {
        let (Some(h), Some(&g)) = (self.set_of(hyps), self.index.get(goal)) else {
            panic!("formula outside the universe");
        };
        self.closure(h).contains(g)
    }

    /// The derivable universe formulas, as formulas.
    pub fn derivable<'a>(&mut self, hyps: impl IntoIterator<Item = &'a Formula>) -> Vec<Formula> {
        let h = self.set_of(hyps).expect("hypotheses inside the universe");
        let d = self.closure(h);
        d.ones().map(|i| self.formulas[i].clone()).collect()
    }

    fn with(&self, d: &FixedBitSet, extra: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut s = d.clone();
        s.extend(extra);
        s
    }

    /// Adds everything reachable by the rules that need no recursion.
    fn close_cheap(&self, d: &mut FixedBitSet) {
        loop {
            let mut changed = false;
            for (i, shape) in self.shapes.iter().enumerate() {
                let mut extra: Vec<usize> = Vec::new();
                if d.contains(i) {
                    match *shape {
                        Shape::Impl(a, b) if d.contains(a) => extra.push(b),
                        Shape::Conj(a, b) => {
                            extra.push(a);
                            extra.push(b);
                        }
                        Shape::Bot => extra.extend(0..self.formulas.len()),
                        _ => {}
                    }
                } else {
                    let intro = match *shape {
                        Shape::Top => true,
                        Shape::Conj(a, b) => d.contains(a) && d.contains(b),
                        Shape::Disj(a, b) => d.contains(a) || d.contains(b),
                        Shape::Impl(_, b) => d.contains(b),
                        Shape::Box(b) => d.contains(b),
                        _ => false,
                    };
                    if intro {
                        extra.push(i);
                    }
                }
                for j in extra {
                    if !d.contains(j) {
                        d.insert(j);
                        changed = true;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// Derivable universe formulas from the hypothesis set `h`.
    pub(crate) fn closure(&mut self, h: FixedBitSet) -> FixedBitSet {
        if let Some(d) = self.memo.get(&h) {
            return d.clone();
        }
        let mut d = h.clone();
        if let Some(t) = self.top {
            d.insert(t);
        }
        loop {
            self.close_cheap(&mut d);
            if !self.close_discharging(&mut d) {
                break;
            }
        }
        self.memo.insert(h, d.clone());
        self.memo.insert(d.clone(), d.clone());
        d
    }

    /// Tries the rules that discharge hypotheses; returns whether anything
    /// was added.
    fn close_discharging(&mut self, d: &mut FixedBitSet) -> bool {
        let mut changed = false;
        for i in 0..self.shapes.len() {
            match self.shapes[i] {
                Shape::Impl(a, b) if !d.contains(i) && !d.contains(a) => {
                    let c = self.closure(self.with(d, [a]));
                    if c.contains(b) {
                        d.insert(i);
                        changed = true;
                    }
                }
                Shape::Box(b) if !d.contains(i) => {
                    let unboxed: Vec<usize> = d
                        .ones()
                        .filter_map(|j| match self.shapes[j] {
                            Shape::Box(a) if !d.contains(a) => Some(a),
                            _ => None,
                        })
                        .collect();
                    if unboxed.is_empty() {
                        continue;
                    }
                    let c = self.closure(self.with(d, unboxed));
                    if c.contains(b) {
                        d.insert(i);
                        changed = true;
                    }
                }
                Shape::Disj(a, b) if d.contains(i) && !d.contains(a) && !d.contains(b) => {
                    let mut both = self.closure(self.with(d, [a]));
                    both.intersect_with(&self.closure(self.with(d, [b])));
                    if !both.is_subset(d) {
                        d.union_with(&both);
                        changed = true;
                    }
                }
                _ => {}
            }
        }
        changed
    }
}

/// Decides `hyps ⊢ goal`.
pub fn decide(hyps: &[Formula], goal: &Formula) -> bool {
    decide_with_stats(hyps, goal).provable
}

pub fn decide_with_stats(hyps: &[Formula], goal: &Formula) -> Decision {
    let mut sat = Saturator::new(universe(goal, hyps));
    let provable = sat.derives(hyps, goal);
    Decision {
        provable,
        universe_size: sat.universe_size(),
        sequents: sat.sequents(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn provable(s: &str) -> bool {
        decide(&[], &f(s))
    }

    #[test]
    fn universe_examples() {
        assert_eq!(universe(&f("[] p"), []), [f("[] p"), f("p")].into_iter().collect());
        assert_eq!(universe(&f("p -> [] p"), []).len(), 3);
        assert_eq!(universe(&Formula::Bot, []), [Formula::Bot].into_iter().collect());
    }

    #[test]
    fn theorems() {
        assert!(provable("p -> [] p"));
        assert!(provable("[] (p -> r) -> [] p -> [] r"));
        assert!(provable("p -> p"));
        assert!(provable("top"));
        assert!(provable("p \\/ r -> r \\/ p"));
        assert!(provable("((p \\/ (p -> bot)) -> bot) -> bot"));
        assert!(provable("[] p /\\ [] r -> [] (p /\\ r)"));
        assert!(!provable("[] [] p -> [] p"));
        assert!(provable("[] p -> [] [] p"));
        assert!(provable("([] p -> p) -> p -> p"));
    }

    #[test]
    fn non_theorems() {
        assert!(!provable("[] p -> p"));
        assert!(!provable("((p -> r) -> p) -> p"));
        assert!(!provable("p \\/ (p -> bot)"));
        assert!(!provable("bot"));
        assert!(!provable("p"));
        assert!(!provable("[] bot"));
        assert!(!provable("[] (p \\/ r) -> [] p \\/ [] r"));
    }

    #[test]
    fn hypotheses_are_used() {
        assert!(decide(&[f("p"), f("p -> r")], &f("r")));
        assert!(decide(&[f("bot")], &f("[] p -> p")));
        assert!(decide(&[f("[] p"), f("p -> r")], &f("[] r")));
        assert!(!decide(&[f("[] p")], &f("p")));
    }

    #[test]
    fn stats_are_reported() {
        let d = decide_with_stats(&[], &f("p -> [] p"));
        assert!(d.provable);
        assert_eq!(d.universe_size, 3);
        assert!(d.sequents >= 1);
    }
}
