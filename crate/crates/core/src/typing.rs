//! Syntax-directed type inference for proof terms.
//!
//! The rules are the natural-deduction rules of the calculus read as typing
//! rules. The belief rule checks each argument against `□Aᵢ` and the body in
//! the ambient context extended with `xᵢ : Aᵢ`, so the body may also use any
//! hypothesis of the surrounding context.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::context::Context;
use crate::formula::Formula;
use crate::term::{Name, Path, Side, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unbound variable {0}")]
    Unbound(Name),
    #[error("expected {expected}, found {found}")]
    Mismatch { expected: Formula, found: Formula },
    #[error("expected {expected}, found {found}")]
    WrongShape { expected: &'static str, found: Formula },
    #[error("branches disagree: {left} vs {right}")]
    BranchMismatch { left: Formula, right: Formula },
    #[error("malformed belief term: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct TypeError {
    pub path: Path,
    pub kind: TypeErrorKind,
}

pub fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        return "/".to_string();
    }
    path.iter().map(|i| format!("/{i}")).collect()
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", render_path(&self.path), self.kind)
    }
}

/// Machine-readable form of a [`TypeError`].
#[derive(Debug, Clone, Serialize)]
pub struct TypeErrorReport {
    pub path: Vec<usize>,
    pub expected: Option<String>,
    pub found: Option<String>,
    pub message: String,
}

impl TypeError {
    pub fn report(&self) -> TypeErrorReport {
        let (expected, found) = match &self.kind {
            TypeErrorKind::Mismatch { expected, found } => (Some(expected.to_string()), Some(found.to_string())),
            TypeErrorKind::WrongShape { expected, found } => (Some(expected.to_string()), Some(found.to_string())),
            TypeErrorKind::BranchMismatch { left, right } => (Some(left.to_string()), Some(right.to_string())),
            TypeErrorKind::Unbound(_) | TypeErrorKind::Malformed(_) => (None, None),
        };
        TypeErrorReport {
            path: self.path.clone(),
            expected,
            found,
            message: self.kind.to_string(),
        }
    }
}

/// Local scope: the caller's context plus binders passed on the way down.
enum Scope<'a> {
    Root(&'a Context),
    Bind(&'a Scope<'a>, &'a str, &'a Formula),
}

impl Scope<'_> {
    fn lookup(&self, x: &str) -> Option<&Formula> {
        match self {
            Scope::Root(ctx) => ctx.lookup(x),
            Scope::Bind(parent, y, f) => {
                if *y == x {
                    Some(f)
                } else {
                    parent.lookup(x)
                }
            }
        }
    }
}

struct Checker<'v> {
    path: Path,
    visit: Option<&'v mut dyn FnMut(&[usize], &Formula)>,
}

impl Checker<'_> {
    fn err(&self, kind: TypeErrorKind) -> TypeError {
        TypeError {
            path: self.path.clone(),
            kind,
        }
    }

    fn child(&mut self, i: usize, scope: &Scope<'_>, t: &Term) -> Result<Formula, TypeError> {
        self.path.push(i);
        let r = self.infer(scope, t);
        self.path.pop();
        r
    }

    fn expect(&self, i: usize, expected: &Formula, found: Formula) -> Result<(), TypeError> {
        if *expected == found {
            Ok(())
        } else {
            let mut path = self.path.clone();
            path.push(i);
            Err(TypeError {
                path,
                kind: TypeErrorKind::Mismatch {
                    expected: expected.clone(),
                    found,
                },
            })
        }
    }

    fn shape_err(&self, i: usize, expected: &'static str, found: Formula) -> TypeError {
        let mut path = self.path.clone();
        path.push(i);
        TypeError {
            path,
            kind: TypeErrorKind::WrongShape { expected, found },
        }
    }

    fn infer(&mut self, scope: &Scope<'_>, t: &Term) -> Result<Formula, TypeError> {
        let ty = self.infer_node(scope, t)?;
        if let Some(visit) = self.visit.as_mut() {
            visit(&self.path, &ty);
        }
        Ok(ty)
    }

    fn infer_node(&mut self, scope: &Scope<'_>, t: &Term) -> Result<Formula, TypeError> {
        match t {
            Term::Var(x) => scope
                .lookup(x)
                .cloned()
                .ok_or_else(|| self.err(TypeErrorKind::Unbound(x.clone()))),
            Term::Lam(x, ann, body) => {
                let inner = Scope::Bind(scope, x, ann);
                let b = self.child(0, &inner, body)?;
                Ok(Formula::implies(ann.clone(), b))
            }
            Term::App(f, a) => {
                let ft = self.child(0, scope, f)?;
                let at = self.child(1, scope, a)?;
                match ft {
                    Formula::Impl(dom, cod) => {
                        self.expect(1, &dom, at)?;
                        Ok((*cod).clone())
                    }
                    other => Err(self.shape_err(0, "an implication", other)),
                }
            }
            Term::Pair(a, b) => {
                let at = self.child(0, scope, a)?;
                let bt = self.child(1, scope, b)?;
                Ok(Formula::and(at, bt))
            }
            Term::Proj(side, a) => match self.child(0, scope, a)? {
                Formula::Conj(l, r) => Ok(match side {
                    Side::Left => (*l).clone(),
                    Side::Right => (*r).clone(),
                }),
                other => Err(self.shape_err(0, "a conjunction", other)),
            },
            Term::Inj(side, ann, a) => {
                let at = self.child(0, scope, a)?;
                let Some((l, r)) = ann.as_disj() else {
                    return Err(self.err(TypeErrorKind::WrongShape {
                        expected: "a disjunction annotation",
                        found: ann.clone(),
                    }));
                };
                let want = match side {
                    Side::Left => l,
                    Side::Right => r,
                };
                self.expect(0, want, at)?;
                Ok(ann.clone())
            }
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => {
                let st = self.child(0, scope, scrut)?;
                let Formula::Disj(a, b) = st else {
                    return Err(self.shape_err(0, "a disjunction", st));
                };
                let lt = self.child(1, &Scope::Bind(scope, left_var, &a), left)?;
                let rt = self.child(2, &Scope::Bind(scope, right_var, &b), right)?;
                if lt != rt {
                    return Err(self.err(TypeErrorKind::BranchMismatch { left: lt, right: rt }));
                }
                Ok(lt)
            }
            Term::Efq(ann, a) => {
                let at = self.child(0, scope, a)?;
                self.expect(0, &Formula::Bot, at)?;
                Ok(ann.clone())
            }
            Term::Unit(a) => {
                self.child(0, scope, a)?;
                Ok(Formula::Top)
            }
            Term::BoxIntro { binders, args, body } => {
                if binders.len() != args.len() {
                    return Err(self.err(TypeErrorKind::Malformed(format!(
                        "{} binders for {} arguments",
                        binders.len(),
                        args.len()
                    ))));
                }
                for (i, (x, _)) in binders.iter().enumerate() {
                    if binders[..i].iter().any(|(y, _)| y == x) {
                        return Err(self.err(TypeErrorKind::Malformed(format!("duplicate binder {x}"))));
                    }
                }
                for (i, ((_, ann), arg)) in binders.iter().zip(args).enumerate() {
                    let at = self.child(i, scope, arg)?;
                    self.expect(i, &Formula::boxed(ann.clone()), at)?;
                }
                let bt = self.body_in(scope, binders, body, args.len())?;
                Ok(Formula::boxed(bt))
            }
        }
    }

    fn body_in(
        &mut self,
        scope: &Scope<'_>,
        binders: &[(Name, Formula)],
        body: &Term,
        index: usize,
    ) -> Result<Formula, TypeError> {
        match binders.split_first() {
            None => self.child(index, scope, body),
            Some(((x, a), rest)) => self.body_in(&Scope::Bind(scope, x, a), rest, body, index),
        }
    }
}

/// Infers the unique formula `A` with `ctx ⊢ t : A`.
pub fn infer(ctx: &Context, t: &Term) -> Result<Formula, TypeError> {
    Checker {
        path: Vec::new(),
        visit: None,
    }
    .infer(&Scope::Root(ctx), t)
}

/// Infers like [`infer`], calling `visit` with the path and formula of every
/// node of the derivation (children before parents).
pub fn infer_visiting(
    ctx: &Context,
    t: &Term,
    visit: &mut dyn FnMut(&[usize], &Formula),
) -> Result<Formula, TypeError> {
    Checker {
        path: Vec::new(),
        visit: Some(visit),
    }
    .infer(&Scope::Root(ctx), t)
}

pub fn check(ctx: &Context, t: &Term, f: &Formula) -> bool {
    infer(ctx, t).is_ok_and(|g| g == *f)
}

/// Typing context in force at `path` inside `t`: `ctx` extended with every
/// binder passed on the way down. Case binders whose scrutinee does not
/// type-check are left unbound.
pub fn context_at(ctx: &Context, t: &Term, path: &[usize]) -> Context {
    let mut local = ctx.clone();
    let mut cur = t;
    for &i in path {
        match cur {
            Term::Lam(x, a, _) => local.insert(x.clone(), a.clone()),
            Term::Case {
                scrut,
                left_var,
                right_var,
                ..
            } if i > 0 => {
                let x = if i == 1 { left_var } else { right_var };
                match infer(&local, scrut) {
                    Ok(Formula::Disj(a, b)) => {
                        local.insert(x.clone(), if i == 1 { (*a).clone() } else { (*b).clone() })
                    }
                    _ => {
                        local.remove(x);
                    }
                }
            }
            Term::BoxIntro { binders, args, .. } if i == args.len() => {
                for (x, a) in binders {
                    local.insert(x.clone(), a.clone());
                }
            }
            _ => {}
        }
        match cur.children().get(i) {
            Some(c) => cur = c,
            None => break,
        }
    }
    local
}
