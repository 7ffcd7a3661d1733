//! Propositional formulas with the belief modality.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A formula of intuitionistic propositional logic extended with `□`.
///
/// Children are shared through `Arc`, so cloning is cheap and large
/// enumerations can reuse subformulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Arc<str>),
    Bot,
    Top,
    Impl(Arc<Formula>, Arc<Formula>),
    Conj(Arc<Formula>, Arc<Formula>),
    Disj(Arc<Formula>, Arc<Formula>),
    Box(Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Impl(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Conj(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Disj(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn boxed(body: Formula) -> Formula {
        Formula::Box(Arc::new(body))
    }

    pub fn not(body: Formula) -> Formula {
        Formula::implies(body, Formula::Bot)
    }

    /// Number of connectives (`→`, `∧`, `∨`, `□`); atoms and constants count zero.
    pub fn connectives(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bot | Formula::Top => 0,
            Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => 1 + a.connectives() + b.connectives(),
            Formula::Box(a) => 1 + a.connectives(),
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Bot | Formula::Top => Vec::new(),
            Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => vec![a, b],
            Formula::Box(a) => vec![a],
        }
    }

    pub fn contains_bot_or_top(&self) -> bool {
        match self {
            Formula::Bot | Formula::Top => true,
            Formula::Atom(_) => false,
            _ => self.children().into_iter().any(Formula::contains_bot_or_top),
        }
    }

    pub fn as_impl(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Impl(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_conj(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Conj(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_disj(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Disj(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_box(&self) -> Option<&Formula> {
        match self {
            Formula::Box(a) => Some(a),
            _ => None,
        }
    }
}

/// All subformulas of `f`, including `f` itself.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_subformulas(f, &mut out);
    out
}

pub(crate) fn collect_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    if out.insert(f.clone()) {
        for c in f.children() {
            collect_subformulas(c, out);
        }
    }
}

// Binding strength used by the printer: higher binds tighter.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Impl(..) => 0,
        Formula::Disj(..) => 1,
        Formula::Conj(..) => 2,
        Formula::Box(_) => 3,
        Formula::Atom(_) | Formula::Bot | Formula::Top => 4,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_at(f, 0, out)?;
        return out.write_str(")");
    }
    match f {
        Formula::Atom(name) => out.write_str(name),
        Formula::Bot => out.write_str("bot"),
        Formula::Top => out.write_str("top"),
        // all binary connectives associate to the right
        Formula::Impl(a, b) => {
            write_at(a, 1, out)?;
            out.write_str(" -> ")?;
            write_at(b, 0, out)
        }
        Formula::Disj(a, b) => {
            write_at(a, 2, out)?;
            out.write_str(" \\/ ")?;
            write_at(b, 1, out)
        }
        Formula::Conj(a, b) => {
            write_at(a, 3, out)?;
            out.write_str(" /\\ ")?;
            write_at(b, 2, out)
        }
        Formula::Box(a) => {
            out.write_str("[] ")?;
            write_at(a, 3, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q1() -> Formula {
        Formula::atom("q1")
    }

    #[test]
    fn subformulas_of_box() {
        let f = Formula::boxed(p());
        let expected: BTreeSet<_> = [f.clone(), p()].into_iter().collect();
        assert_eq!(subformulas(&f), expected);
    }

    #[test]
    fn subformulas_of_implication() {
        let conj = Formula::and(q1(), p());
        let f = Formula::implies(p(), conj.clone());
        let expected: BTreeSet<_> = [f.clone(), p(), conj, q1()].into_iter().collect();
        assert_eq!(subformulas(&f), expected);
    }

    #[test]
    fn subformulas_of_bot() {
        assert_eq!(subformulas(&Formula::Bot).len(), 1);
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        let f = Formula::implies(p(), Formula::boxed(p()));
        assert_eq!(f.to_string(), "p -> [] p");
        let g = Formula::implies(Formula::implies(p(), q1()), p());
        assert_eq!(g.to_string(), "(p -> q1) -> p");
        let h = Formula::boxed(Formula::or(p(), q1()));
        assert_eq!(h.to_string(), "[] (p \\/ q1)");
        let k = Formula::and(Formula::or(p(), q1()), p());
        assert_eq!(k.to_string(), "(p \\/ q1) /\\ p");
    }
}
