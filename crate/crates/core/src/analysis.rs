//! Structure of normal terms: neutrality, the last rule of a deduction and
//! the subformula property.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::context::Context;
use crate::formula::{collect_subformulas, Formula};
use crate::rewrite::is_normal;
use crate::term::Term;
use crate::typing::{infer, infer_visiting, TypeError};

/// Natural-deduction rule ending a deduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleName {
    Hypothesis,
    ImplIntro,
    ImplElim,
    ConjIntro,
    ConjElim,
    DisjIntro,
    DisjElim,
    BotElim,
    TopIntro,
    BoxIntro,
}

impl RuleName {
    pub fn is_introduction(self) -> bool {
        matches!(
            self,
            RuleName::ImplIntro | RuleName::ConjIntro | RuleName::DisjIntro | RuleName::TopIntro | RuleName::BoxIntro
        )
    }

    /// The introduction rule for the main connective of `f`, if any.
    pub fn introducing(f: &Formula) -> Option<RuleName> {
        match f {
            Formula::Impl(..) => Some(RuleName::ImplIntro),
            Formula::Conj(..) => Some(RuleName::ConjIntro),
            Formula::Disj(..) => Some(RuleName::DisjIntro),
            Formula::Box(_) => Some(RuleName::BoxIntro),
            Formula::Top => Some(RuleName::TopIntro),
            Formula::Atom(_) | Formula::Bot => None,
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleName::Hypothesis => "hypothesis",
            RuleName::ImplIntro => "->-intro",
            RuleName::ImplElim => "->-elim",
            RuleName::ConjIntro => "/\\-intro",
            RuleName::ConjElim => "/\\-elim",
            RuleName::DisjIntro => "\\/-intro",
            RuleName::DisjElim => "\\/-elim",
            RuleName::BotElim => "bot-elim",
            RuleName::TopIntro => "top-intro",
            RuleName::BoxIntro => "[]-intro",
        })
    }
}

pub fn last_rule(t: &Term) -> RuleName {
    match t {
        Term::Var(_) => RuleName::Hypothesis,
        Term::Lam(..) => RuleName::ImplIntro,
        Term::App(..) => RuleName::ImplElim,
        Term::Pair(..) => RuleName::ConjIntro,
        Term::Proj(..) => RuleName::ConjElim,
        Term::Inj(..) => RuleName::DisjIntro,
        Term::Case { .. } => RuleName::DisjElim,
        Term::Efq(..) => RuleName::BotElim,
        Term::Unit(_) => RuleName::TopIntro,
        Term::BoxIntro { .. } => RuleName::BoxIntro,
    }
}

/// An assumption, or a deduction ending in an elimination.
pub fn is_neutral(t: &Term) -> bool {
    matches!(
        t,
        Term::Var(_) | Term::App(..) | Term::Proj(..) | Term::Case { .. } | Term::Efq(..)
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("term is not normal")]
    NotNormal,
    #[error("term is ill-typed: {0}")]
    IllTyped(TypeError),
    #[error("term proves {found}, not {expected}")]
    GoalMismatch { expected: Formula, found: Formula },
}

/// Formulas allowed in a normal deduction of `goal` from `ctx`.
pub fn subformula_universe(ctx: &Context, goal: &Formula) -> BTreeSet<Formula> {
    let mut allowed = BTreeSet::new();
    collect_subformulas(goal, &mut allowed);
    for f in ctx.formulas() {
        collect_subformulas(f, &mut allowed);
    }
    allowed
}

/// Whether every formula in the deduction `t` of `goal` from `ctx` is a
/// subformula of `goal` or of a formula of `ctx`. `t` must be normal and
/// prove `goal`.
pub fn check_subformula_property(ctx: &Context, t: &Term, goal: &Formula) -> Result<bool, AnalysisError> {
    if !is_normal(t) {
        return Err(AnalysisError::NotNormal);
    }
    let allowed = subformula_universe(ctx, goal);
    let mut ok = true;
    let found = infer_visiting(ctx, t, &mut |_, f| ok &= allowed.contains(f)).map_err(AnalysisError::IllTyped)?;
    if found != *goal {
        return Err(AnalysisError::GoalMismatch {
            expected: goal.clone(),
            found,
        });
    }
    Ok(ok)
}

/// Paths and formulas of the derivation nodes that leave the subformula
/// universe; empty exactly when the property holds.
pub fn subformula_violations(ctx: &Context, t: &Term, goal: &Formula) -> Result<Vec<(Vec<usize>, Formula)>, TypeError> {
    let allowed = subformula_universe(ctx, goal);
    let mut out = Vec::new();
    infer_visiting(ctx, t, &mut |path, f| {
        if !allowed.contains(f) {
            out.push((path.to_vec(), f.clone()));
        }
    })?;
    Ok(out)
}

/// Whether a closed term ends with the introduction rule of its type's main
/// connective.
pub fn is_canonical(t: &Term) -> bool {
    match infer(&Context::new(), t) {
        Ok(f) => RuleName::introducing(&f) == Some(last_rule(t)),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn neutrality_and_last_rule() {
        assert!(is_neutral(&var("x")));
        assert!(!is_neutral(&lam("x", p(), var("x"))));
        assert!(is_neutral(&proj(Side::Left, var("t"))));
        assert_eq!(last_rule(&pair(var("a"), var("b"))), RuleName::ConjIntro);
        assert_eq!(last_rule(&bel(vec![], vec![], var("x"))), RuleName::BoxIntro);
        assert_eq!(last_rule(&app(var("f"), var("a"))), RuleName::ImplElim);
    }

    #[test]
    fn normality_examples() {
        assert!(is_normal(&var("x")));
        assert!(!is_normal(&app(lam("x", p(), var("x")), var("y"))));
        let t = proj(Side::Left, case(var("s"), "x", var("a"), "y", var("b")));
        assert!(!is_normal(&t));
    }

    #[test]
    fn subformula_property_examples() {
        let co = lam("x", p(), bel(vec![], vec![], var("x")));
        let goal = Formula::implies(p(), Formula::boxed(p()));
        assert_eq!(check_subformula_property(&Context::new(), &co, &goal), Ok(true));

        let ctx = Context::new().with("x", Formula::and(p(), r()));
        let t = proj(Side::Left, var("x"));
        assert_eq!(check_subformula_property(&ctx, &t, &p()), Ok(true));
    }

    #[test]
    fn subformula_property_preconditions() {
        let t = app(lam("x", p(), var("x")), var("y"));
        let ctx = Context::new().with("y", p());
        assert_eq!(check_subformula_property(&ctx, &t, &p()), Err(AnalysisError::NotNormal));
        assert!(matches!(
            check_subformula_property(&ctx, &var("y"), &r()),
            Err(AnalysisError::GoalMismatch { .. })
        ));
    }

    #[test]
    fn top_introduction_leaves_the_subformula_universe() {
        // unit discharges nothing yet may mention any formula
        let t = unit(lam("h", p(), var("h")));
        assert_eq!(check_subformula_property(&Context::new(), &t, &Formula::Top), Ok(false));
        let bad = subformula_violations(&Context::new(), &t, &Formula::Top).unwrap();
        assert_eq!(bad.len(), 2);
    }

    #[test]
    fn canonicity() {
        assert!(is_canonical(&lam("x", p(), var("x"))));
        assert!(!is_canonical(&var("x")));
    }
}
