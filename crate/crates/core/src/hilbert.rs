//! Hilbert-style proofs and their translation into natural-deduction terms.
//!
//! The axiom catalogue:
//!
//! | id            | scheme                                   |
//! |---------------|------------------------------------------|
//! | `then-1`      | `A -> B -> A`                            |
//! | `then-2`      | `(A -> B -> C) -> (A -> B) -> A -> C`    |
//! | `and-intro`   | `A -> B -> A /\ B`                       |
//! | `and-elim-1`  | `A /\ B -> A`                            |
//! | `and-elim-2`  | `A /\ B -> B`                            |
//! | `or-intro-1`  | `A -> A \/ B`                            |
//! | `or-intro-2`  | `B -> A \/ B`                            |
//! | `or-elim`     | `(A -> C) -> (B -> C) -> A \/ B -> C`    |
//! | `efq`         | `bot -> A`                               |
//! | `k-box`       | `[] (A -> B) -> [] A -> [] B`            |
//! | `coreflection`| `A -> [] A`                              |
//!
//! Modus ponens is the only inference rule.

use thiserror::Error;

use crate::context::Context;
use crate::formula::Formula;
use crate::term::{app, bel, case, efq, inj, lam, pair, proj, var, Name, Side, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Then1,
    Then2,
    AndIntro,
    AndElim1,
    AndElim2,
    OrIntro1,
    OrIntro2,
    OrElim,
    Efq,
    KBox,
    Coreflection,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbertError {
    #[error("unknown axiom scheme `{0}`")]
    UnknownScheme(String),
    #[error("scheme {scheme} takes {expected} formulas, got {found}")]
    Arity {
        scheme: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: modus ponens refers to line {reference}, which is not earlier")]
    BadReference { line: usize, reference: usize },
    #[error("line {line}: {reason}")]
    Mismatch { line: usize, reason: String },
    #[error("the proof has no lines")]
    Empty,
}

impl Scheme {
    pub const ALL: [Scheme; 11] = [
        Scheme::Then1,
        Scheme::Then2,
        Scheme::AndIntro,
        Scheme::AndElim1,
        Scheme::AndElim2,
        Scheme::OrIntro1,
        Scheme::OrIntro2,
        Scheme::OrElim,
        Scheme::Efq,
        Scheme::KBox,
        Scheme::Coreflection,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scheme::Then1 => "then-1",
            Scheme::Then2 => "then-2",
            Scheme::AndIntro => "and-intro",
            Scheme::AndElim1 => "and-elim-1",
            Scheme::AndElim2 => "and-elim-2",
            Scheme::OrIntro1 => "or-intro-1",
            Scheme::OrIntro2 => "or-intro-2",
            Scheme::OrElim => "or-elim",
            Scheme::Efq => "efq",
            Scheme::KBox => "k-box",
            Scheme::Coreflection => "coreflection",
        }
    }

    pub fn from_id(id: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|s| s.id().eq_ignore_ascii_case(id))
    }

    /// Number of metavariables.
    pub fn arity(self) -> usize {
        match self {
            Scheme::Efq | Scheme::Coreflection => 1,
            Scheme::Then2 | Scheme::OrElim => 3,
            _ => 2,
        }
    }

    fn check_arity(self, parts: &[Formula]) -> Result<(), HilbertError> {
        if parts.len() == self.arity() {
            Ok(())
        } else {
            Err(HilbertError::Arity {
                scheme: self.id(),
                expected: self.arity(),
                found: parts.len(),
            })
        }
    }

    /// The axiom instance for `parts`.
    pub fn instance(self, parts: &[Formula]) -> Result<Formula, HilbertError> {
        self.check_arity(parts)?;
        let g = |i: usize| parts[i].clone();
        let imp = Formula::implies;
        Ok(match self {
            Scheme::Then1 => imp(g(0), imp(g(1), g(0))),
            Scheme::Then2 => imp(imp(g(0), imp(g(1), g(2))), imp(imp(g(0), g(1)), imp(g(0), g(2)))),
            Scheme::AndIntro => imp(g(0), imp(g(1), Formula::and(g(0), g(1)))),
            Scheme::AndElim1 => imp(Formula::and(g(0), g(1)), g(0)),
            Scheme::AndElim2 => imp(Formula::and(g(0), g(1)), g(1)),
            Scheme::OrIntro1 => imp(g(0), Formula::or(g(0), g(1))),
            Scheme::OrIntro2 => imp(g(1), Formula::or(g(0), g(1))),
            Scheme::OrElim => imp(
                imp(g(0), g(2)),
                imp(imp(g(1), g(2)), imp(Formula::or(g(0), g(1)), g(2))),
            ),
            Scheme::Efq => imp(Formula::Bot, g(0)),
            Scheme::KBox => imp(
                Formula::boxed(imp(g(0), g(1))),
                imp(Formula::boxed(g(0)), Formula::boxed(g(1))),
            ),
            Scheme::Coreflection => imp(g(0), Formula::boxed(g(0))),
        })
    }

    /// A closed proof term of the instance for `parts`.
    pub fn term(self, parts: &[Formula]) -> Result<Term, HilbertError> {
        self.check_arity(parts)?;
        let g = |i: usize| parts[i].clone();
        let imp = Formula::implies;
        Ok(match self {
            Scheme::Then1 => lam("a", g(0), lam("b", g(1), var("a"))),
            Scheme::Then2 => lam(
                "f",
                imp(g(0), imp(g(1), g(2))),
                lam(
                    "g",
                    imp(g(0), g(1)),
                    lam("a", g(0), app(app(var("f"), var("a")), app(var("g"), var("a")))),
                ),
            ),
            Scheme::AndIntro => lam("a", g(0), lam("b", g(1), pair(var("a"), var("b")))),
            Scheme::AndElim1 => lam("c", Formula::and(g(0), g(1)), proj(Side::Left, var("c"))),
            Scheme::AndElim2 => lam("c", Formula::and(g(0), g(1)), proj(Side::Right, var("c"))),
            Scheme::OrIntro1 => lam("a", g(0), inj(Side::Left, Formula::or(g(0), g(1)), var("a"))),
            Scheme::OrIntro2 => lam("b", g(1), inj(Side::Right, Formula::or(g(0), g(1)), var("b"))),
            Scheme::OrElim => lam(
                "f",
                imp(g(0), g(2)),
                lam(
                    "g",
                    imp(g(1), g(2)),
                    lam(
                        "d",
                        Formula::or(g(0), g(1)),
                        case(var("d"), "x", app(var("f"), var("x")), "y", app(var("g"), var("y"))),
                    ),
                ),
            ),
            Scheme::Efq => lam("b", Formula::Bot, efq(g(0), var("b"))),
            Scheme::KBox => lam(
                "f",
                Formula::boxed(imp(g(0), g(1))),
                lam(
                    "a",
                    Formula::boxed(g(0)),
                    bel(
                        vec![("g", imp(g(0), g(1))), ("u", g(0))],
                        vec![var("f"), var("a")],
                        app(var("g"), var("u")),
                    ),
                ),
            ),
            Scheme::Coreflection => lam("x", g(0), bel(vec![], vec![], var("x"))),
        })
    }
}

/// Proof term for an axiom instance named by its catalogue id.
pub fn ipc_axiom_term(scheme: &str, parts: &[Formula]) -> Result<Term, HilbertError> {
    Scheme::from_id(scheme)
        .ok_or_else(|| HilbertError::UnknownScheme(scheme.to_string()))?
        .term(parts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom {
        scheme: Scheme,
        parts: Vec<Formula>,
    },
    /// `major` proves `minor`'s formula implying this line's formula.
    ModusPonens {
        major: usize,
        minor: usize,
    },
    /// An open hypothesis, named by the term variable standing for it.
    Hyp(Name),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertLine {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HilbertProof {
    pub lines: Vec<HilbertLine>,
}

impl HilbertProof {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a line and returns its index.
    pub fn push(&mut self, formula: Formula, justification: Justification) -> usize {
        self.lines.push(HilbertLine { formula, justification });
        self.lines.len() - 1
    }

    pub fn axiom(&mut self, scheme: Scheme, parts: Vec<Formula>) -> Result<usize, HilbertError> {
        let formula = scheme.instance(&parts)?;
        Ok(self.push(formula, Justification::Axiom { scheme, parts }))
    }

    pub fn hyp(&mut self, name: &str, formula: Formula) -> usize {
        self.push(formula, Justification::Hyp(name.to_string()))
    }

    /// Applies modus ponens to two earlier lines.
    pub fn mp(&mut self, major: usize, minor: usize) -> Result<usize, HilbertError> {
        let line = self.lines.len();
        for reference in [major, minor] {
            if reference >= line {
                return Err(HilbertError::BadReference { line, reference });
            }
        }
        let Some((a, b)) = self.lines[major].formula.as_impl() else {
            return Err(HilbertError::Mismatch {
                line,
                reason: format!("line {major} is not an implication"),
            });
        };
        if *a != self.lines[minor].formula {
            return Err(HilbertError::Mismatch {
                line,
                reason: format!("line {minor} does not prove {a}"),
            });
        }
        let b = b.clone();
        Ok(self.push(b, Justification::ModusPonens { major, minor }))
    }

    /// Hypotheses used by the proof.
    pub fn context(&self) -> Context {
        self.lines
            .iter()
            .filter_map(|l| match &l.justification {
                Justification::Hyp(x) => Some((x.clone(), l.formula.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

/// Translates a Hilbert proof into a term proving its last line from its
/// hypotheses: axioms become their catalogue terms and modus ponens becomes
/// application.
pub fn hilbert_to_nd(proof: &HilbertProof) -> Result<Term, HilbertError> {
    if proof.lines.is_empty() {
        return Err(HilbertError::Empty);
    }
    let mut hyps: Vec<(&Name, &Formula)> = Vec::new();
    let mut terms: Vec<Term> = Vec::with_capacity(proof.lines.len());
    for (line, l) in proof.lines.iter().enumerate() {
        let t = match &l.justification {
            Justification::Axiom { scheme, parts } => {
                let instance = scheme.instance(parts)?;
                if instance != l.formula {
                    return Err(HilbertError::Mismatch {
                        line,
                        reason: format!("{} at these parts gives {instance}", scheme.id()),
                    });
                }
                scheme.term(parts)?
            }
            Justification::Hyp(x) => {
                if let Some((_, f)) = hyps.iter().find(|(y, _)| *y == x) {
                    if *f != &l.formula {
                        return Err(HilbertError::Mismatch {
                            line,
                            reason: format!("hypothesis {x} already stands for {f}"),
                        });
                    }
                }
                hyps.push((x, &l.formula));
                var(x)
            }
            Justification::ModusPonens { major, minor } => {
                for &reference in [major, minor] {
                    if reference >= line {
                        return Err(HilbertError::BadReference { line, reference });
                    }
                }
                let expected = Formula::implies(proof.lines[*minor].formula.clone(), l.formula.clone());
                if proof.lines[*major].formula != expected {
                    return Err(HilbertError::Mismatch {
                        line,
                        reason: format!("line {major} does not prove {expected}"),
                    });
                }
                app(terms[*major].clone(), terms[*minor].clone())
            }
        };
        terms.push(t);
    }
    Ok(terms.pop().expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::{check, infer};

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn catalogue_examples() {
        let t = ipc_axiom_term("then-1", &[p(), r()]).unwrap();
        assert_eq!(t, lam("a", p(), lam("b", r(), var("a"))));
        let f = Formula::implies(p(), Formula::implies(r(), p()));
        assert!(check(&Context::new(), &t, &f));

        let k = ipc_axiom_term("K-box", &[p(), r()]).unwrap();
        let want = Formula::implies(
            Formula::boxed(Formula::implies(p(), r())),
            Formula::implies(Formula::boxed(p()), Formula::boxed(r())),
        );
        assert_eq!(infer(&Context::new(), &k).unwrap(), want);

        let c = ipc_axiom_term("coreflection", &[p()]).unwrap();
        assert_eq!(c, lam("x", p(), bel(vec![], vec![], var("x"))));
    }

    #[test]
    fn catalogue_errors() {
        assert_eq!(
            ipc_axiom_term("peirce", &[p()]),
            Err(HilbertError::UnknownScheme("peirce".into()))
        );
        assert!(matches!(
            ipc_axiom_term("then-2", &[p()]),
            Err(HilbertError::Arity {
                expected: 3,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn every_scheme_term_proves_its_instance() {
        let atoms = [p(), r()];
        for s in Scheme::ALL {
            let mut parts = vec![atoms[0].clone(); s.arity()];
            for mask in 0..(1usize << s.arity()) {
                for (i, part) in parts.iter_mut().enumerate() {
                    *part = atoms[(mask >> i) & 1].clone();
                }
                let t = s.term(&parts).unwrap();
                assert_eq!(
                    infer(&Context::new(), &t).unwrap(),
                    s.instance(&parts).unwrap(),
                    "{}",
                    s.id()
                );
            }
        }
    }

    #[test]
    fn single_axiom_line() {
        let mut proof = HilbertProof::new();
        proof.axiom(Scheme::Coreflection, vec![p()]).unwrap();
        assert_eq!(
            hilbert_to_nd(&proof).unwrap(),
            lam("x", p(), bel(vec![], vec![], var("x")))
        );
    }

    #[test]
    fn modus_ponens_on_a_hypothesis() {
        let mut proof = HilbertProof::new();
        let ax = proof.axiom(Scheme::Coreflection, vec![p()]).unwrap();
        let h = proof.hyp("x", p());
        proof.mp(ax, h).unwrap();
        let t = hilbert_to_nd(&proof).unwrap();
        assert_eq!(infer(&proof.context(), &t).unwrap(), Formula::boxed(p()));
    }

    #[test]
    fn chained_proof_of_boxed_modus_ponens() {
        // (p -> r) -> [] p -> [] r from K and co-reflection
        let pr = Formula::implies(p(), r());
        let goal_tail = Formula::implies(Formula::boxed(p()), Formula::boxed(r()));
        let mut proof = HilbertProof::new();
        let k = proof.axiom(Scheme::KBox, vec![p(), r()]).unwrap();
        let co = proof.axiom(Scheme::Coreflection, vec![pr.clone()]).unwrap();
        // then-1: ([](p->r) -> tail) -> (p->r) -> ([](p->r) -> tail)
        let k_impl = proof.lines[k].formula.clone();
        let w = proof.axiom(Scheme::Then1, vec![k_impl, pr.clone()]).unwrap();
        let wk = proof.mp(w, k).unwrap();
        // then-2 at (p->r, [](p->r), tail)
        let s = proof
            .axiom(
                Scheme::Then2,
                vec![pr.clone(), Formula::boxed(pr.clone()), goal_tail.clone()],
            )
            .unwrap();
        let s1 = proof.mp(s, wk).unwrap();
        proof.mp(s1, co).unwrap();
        let t = hilbert_to_nd(&proof).unwrap();
        assert_eq!(infer(&Context::new(), &t).unwrap(), Formula::implies(pr, goal_tail));
    }

    #[test]
    fn malformed_proofs_are_rejected() {
        let mut proof = HilbertProof::new();
        proof.hyp("x", p());
        proof.push(r(), Justification::ModusPonens { major: 0, minor: 3 });
        assert_eq!(
            hilbert_to_nd(&proof),
            Err(HilbertError::BadReference { line: 1, reference: 3 })
        );
        let mut proof = HilbertProof::new();
        proof.hyp("x", p());
        proof.hyp("y", p());
        assert!(proof.mp(0, 1).is_err());
        proof.push(r(), Justification::ModusPonens { major: 0, minor: 1 });
        assert!(matches!(
            hilbert_to_nd(&proof),
            Err(HilbertError::Mismatch { line: 2, .. })
        ));
        assert_eq!(hilbert_to_nd(&HilbertProof::new()), Err(HilbertError::Empty));
    }
}
