//! Continuation-passing translations of ⊥-free proof terms into simple type
//! theory.
//!
//! Types: `Ā = ∼∼A°` with `p° = p`, `(A→B)° = Ā→B̄`, `(A∧B)° = ∼(Ā→∼B̄)`,
//! `(A∨B)° = ∼Ā→∼∼B̄` and `(□A)° = ∼∼A°`, so that a belief `□A` is
//! translated to `∼∼Ā`.
//!
//! [`cps`] is the plain translation; [`cps_mod`] is the modified one built
//! from the colon operator [`colon`], which contracts the administrative
//! redexes of the plain translation on the fly. Continuation variables are
//! named `_k1`, `_m2`, ... and never clash with source names. Source
//! binders that would capture a free variable of the continuation, or of a
//! later belief argument, are renamed.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::context::Context;
use crate::formula::Formula;
use crate::rewrite::{redexes, successors, Family, RuleKind};
use crate::stt::{stt_alpha_eq, stt_infer, stt_reduces_to, stt_reduces_to_plus, SimpleType, SttContext, SttTerm};
use crate::term::{fresh_name, Name, Side, Term};
use crate::typing::{context_at, infer, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpsError {
    #[error("the translation does not cover {0}")]
    Unsupported(&'static str),
    #[error("the translation does not cover formulas with bot or top: {0}")]
    BotOrTop(Formula),
    #[error(transparent)]
    IllTyped(#[from] TypeError),
}

fn neg(t: SimpleType) -> SimpleType {
    SimpleType::neg(t)
}

/// `A°`.
pub fn circ_type(f: &Formula) -> Result<SimpleType, CpsError> {
    Ok(match f {
        Formula::Atom(a) => SimpleType::Atom(a.clone()),
        Formula::Bot | Formula::Top => return Err(CpsError::BotOrTop(f.clone())),
        Formula::Impl(a, b) => SimpleType::arrow(neg_type(a)?, neg_type(b)?),
        Formula::Conj(a, b) => neg(SimpleType::arrow(neg_type(a)?, neg(neg_type(b)?))),
        Formula::Disj(a, b) => SimpleType::arrow(neg(neg_type(a)?), neg(neg(neg_type(b)?))),
        Formula::Box(a) => neg(neg(circ_type(a)?)),
    })
}

/// `Ā = ∼∼A°`.
pub fn neg_type(f: &Formula) -> Result<SimpleType, CpsError> {
    Ok(neg(neg(circ_type(f)?)))
}

/// Pointwise translation `x : Ā` of a context.
pub fn translate_context(ctx: &Context) -> Result<SttContext, CpsError> {
    ctx.iter().map(|(x, f)| Ok((x.clone(), neg_type(f)?))).collect()
}

fn v(x: &str) -> SttTerm {
    SttTerm::var(x)
}

fn ap(f: SttTerm, a: SttTerm) -> SttTerm {
    SttTerm::app(f, a)
}

fn lm(x: &str, ty: SimpleType, body: SttTerm) -> SttTerm {
    SttTerm::lam(x, ty, body)
}

/// Translation state: the counter for continuation variables.
#[derive(Debug, Default)]
pub struct Translator {
    counter: usize,
}

impl Translator {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self, base: &str) -> Name {
        self.counter += 1;
        format!("_{base}{}", self.counter)
    }

    fn type_of(&self, ctx: &Context, t: &Term) -> Result<Formula, CpsError> {
        Ok(infer(ctx, t)?)
    }

    /// The plain translation `t̄`.
    pub fn cps(&mut self, ctx: &Context, t: &Term) -> Result<SttTerm, CpsError> {
        let ty = self.type_of(ctx, t)?;
        let k = self.fresh("k");
        let kt = neg(circ_type(&ty)?);
        let body = match t {
            Term::Var(x) => ap(v(x), v(&k)),
            Term::Lam(x, a, b) => {
                let inner = ctx.clone().with(x.clone(), a.clone());
                let bb = self.cps(&inner, b)?;
                ap(v(&k), lm(x, neg_type(a)?, bb))
            }
            Term::App(f, a) => {
                let ft = self.type_of(ctx, f)?;
                let m = self.fresh("m");
                let fb = self.cps(ctx, f)?;
                let ab = self.cps(ctx, a)?;
                ap(fb, lm(&m, circ_type(&ft)?, ap(ap(v(&m), ab), v(&k))))
            }
            Term::Pair(a, b) => {
                let (at, bt) = (self.type_of(ctx, a)?, self.type_of(ctx, b)?);
                let u = self.fresh("u");
                let ut = SimpleType::arrow(neg_type(&at)?, neg(neg_type(&bt)?));
                let ab = self.cps(ctx, a)?;
                let bb = self.cps(ctx, b)?;
                ap(v(&k), lm(&u, ut, ap(ap(v(&u), ab), bb)))
            }
            Term::Proj(side, a) => {
                let at = self.type_of(ctx, a)?;
                let (l, r) = at.as_conj().expect("typed projection");
                let (u, i, j) = (self.fresh("u"), self.fresh("i"), self.fresh("j"));
                let pick = match side {
                    Side::Left => &i,
                    Side::Right => &j,
                };
                let sel = lm(&i, neg_type(l)?, lm(&j, neg_type(r)?, ap(v(pick), v(&k))));
                let ab = self.cps(ctx, a)?;
                ap(ab, lm(&u, circ_type(&at)?, ap(v(&u), sel)))
            }
            Term::Inj(side, ann, a) => {
                let (l, r) = ann.as_disj().expect("typed injection");
                let (i, j) = (self.fresh("i"), self.fresh("j"));
                let pick = match side {
                    Side::Left => &i,
                    Side::Right => &j,
                };
                let ab = self.cps(ctx, a)?;
                let inj = lm(&i, neg(neg_type(l)?), lm(&j, neg(neg_type(r)?), ap(v(pick), ab)));
                ap(v(&k), inj)
            }
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => {
                let st = self.type_of(ctx, scrut)?;
                let (a, b) = st.as_disj().expect("typed case");
                let m = self.fresh("m");
                let sb = self.cps(ctx, scrut)?;
                let lctx = ctx.clone().with(left_var.clone(), a.clone());
                let rctx = ctx.clone().with(right_var.clone(), b.clone());
                let lb = self.cps(&lctx, left)?;
                let rb = self.cps(&rctx, right)?;
                let branches = ap(
                    ap(v(&m), lm(left_var, neg_type(a)?, ap(lb, v(&k)))),
                    lm(right_var, neg_type(b)?, ap(rb, v(&k))),
                );
                ap(sb, lm(&m, circ_type(&st)?, branches))
            }
            Term::BoxIntro { binders, args, body } => {
                let (binders, body) = separate_binders(ctx, binders, args, body, &BTreeSet::new());
                let mut inner = ctx.clone();
                for (x, a) in &binders {
                    inner.insert(x.clone(), a.clone());
                }
                let mut acc = ap(v(&k), self.cps(&inner, &body)?);
                let translated: Vec<SttTerm> = args.iter().map(|a| self.cps(ctx, a)).collect::<Result<_, _>>()?;
                for ((x, a), tb) in binders.iter().zip(translated).rev() {
                    acc = ap(tb, lm(x, neg_type(a)?, acc));
                }
                acc
            }
            Term::Efq(..) => return Err(CpsError::Unsupported("ex falso")),
            Term::Unit(_) => return Err(CpsError::Unsupported("unit")),
        };
        Ok(lm(&k, kt, body))
    }

    /// The modified translation `λk. (t : k)`.
    pub fn cps_mod(&mut self, ctx: &Context, t: &Term) -> Result<SttTerm, CpsError> {
        let ty = self.type_of(ctx, t)?;
        let k = self.fresh("k");
        let body = self.colon(ctx, t, &v(&k))?;
        Ok(lm(&k, neg(circ_type(&ty)?), body))
    }

    /// The colon operator `t : r`.
    pub fn colon(&mut self, ctx: &Context, t: &Term, r: &SttTerm) -> Result<SttTerm, CpsError> {
        Ok(match t {
            Term::Var(x) => ap(v(x), r.clone()),
            Term::Lam(x, a, b) => {
                let inner = ctx.clone().with(x.clone(), a.clone());
                let bb = self.cps_mod(&inner, b)?;
                ap(r.clone(), lm(x, neg_type(a)?, bb))
            }
            Term::App(f, a) => {
                let ft = self.type_of(ctx, f)?;
                let m = self.fresh("m");
                let ab = self.cps_mod(ctx, a)?;
                let cont = lm(&m, circ_type(&ft)?, ap(ap(v(&m), ab), r.clone()));
                self.colon(ctx, f, &cont)?
            }
            Term::Pair(a, b) => {
                let (at, bt) = (self.type_of(ctx, a)?, self.type_of(ctx, b)?);
                let u = self.fresh("u");
                let ut = SimpleType::arrow(neg_type(&at)?, neg(neg_type(&bt)?));
                let ab = self.cps_mod(ctx, a)?;
                let bb = self.cps_mod(ctx, b)?;
                ap(r.clone(), lm(&u, ut, ap(ap(v(&u), ab), bb)))
            }
            Term::Proj(side, a) => {
                let at = self.type_of(ctx, a)?;
                let (l, rt) = at.as_conj().expect("typed projection");
                let (u, i, j) = (self.fresh("u"), self.fresh("i"), self.fresh("j"));
                let pick = match side {
                    Side::Left => &i,
                    Side::Right => &j,
                };
                let sel = lm(&i, neg_type(l)?, lm(&j, neg_type(rt)?, ap(v(pick), r.clone())));
                let cont = lm(&u, circ_type(&at)?, ap(v(&u), sel));
                self.colon(ctx, a, &cont)?
            }
            Term::Inj(side, ann, a) => {
                let (l, rt) = ann.as_disj().expect("typed injection");
                let (i, j) = (self.fresh("i"), self.fresh("j"));
                let pick = match side {
                    Side::Left => &i,
                    Side::Right => &j,
                };
                let ab = self.cps_mod(ctx, a)?;
                let inj = lm(&i, neg(neg_type(l)?), lm(&j, neg(neg_type(rt)?), ap(v(pick), ab)));
                ap(r.clone(), inj)
            }
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => {
                let st = self.type_of(ctx, scrut)?;
                let (a, b) = st.as_disj().expect("typed case");
                let avoid: BTreeSet<Name> = r.free_vars().into_iter().collect();
                let (x, left) = rebind(ctx, left_var, left, &avoid);
                let (y, right) = rebind(ctx, right_var, right, &avoid);
                let m = self.fresh("m");
                let lctx = ctx.clone().with(x.clone(), a.clone());
                let rctx = ctx.clone().with(y.clone(), b.clone());
                let lb = self.colon(&lctx, &left, r)?;
                let rb = self.colon(&rctx, &right, r)?;
                let cont = lm(
                    &m,
                    circ_type(&st)?,
                    ap(ap(v(&m), lm(&x, neg_type(a)?, lb)), lm(&y, neg_type(b)?, rb)),
                );
                self.colon(ctx, scrut, &cont)?
            }
            Term::BoxIntro { binders, args, body } => {
                let avoid: BTreeSet<Name> = r.free_vars().into_iter().collect();
                let (binders, body) = separate_binders(ctx, binders, args, body, &avoid);
                let mut inner = ctx.clone();
                for (x, a) in &binders {
                    inner.insert(x.clone(), a.clone());
                }
                let mut acc = ap(r.clone(), self.cps_mod(&inner, &body)?);
                for ((x, a), arg) in binders.iter().zip(args).rev() {
                    let cont = lm(x, neg_type(a)?, acc);
                    acc = self.colon(ctx, arg, &cont)?;
                }
                acc
            }
            Term::Efq(..) => return Err(CpsError::Unsupported("ex falso")),
            Term::Unit(_) => return Err(CpsError::Unsupported("unit")),
        })
    }
}

/// Renames `x`, bound over `scope`, away from `avoid`.
fn rebind(ctx: &Context, x: &Name, scope: &Term, avoid: &BTreeSet<Name>) -> (Name, Term) {
    if !avoid.contains(x) {
        return (x.clone(), scope.clone());
    }
    let names = scope.all_names();
    let y = fresh_name(x, |n| avoid.contains(n) || names.contains(n) || ctx.contains(n));
    (y.clone(), scope.rename_free(x, &y))
}

/// Renames belief binders so that none is free in `avoid` or in a later
/// argument, since the translation scopes binder `i` over arguments
/// `i+1..n`.
fn separate_binders(
    ctx: &Context,
    binders: &[(Name, Formula)],
    args: &[Term],
    body: &Term,
    avoid: &BTreeSet<Name>,
) -> (Vec<(Name, Formula)>, Term) {
    let mut body = body.clone();
    let mut out: Vec<(Name, Formula)> = binders.to_vec();
    let mut taken: BTreeSet<Name> = avoid.clone();
    taken.extend(body.all_names());
    taken.extend(binders.iter().map(|(x, _)| x.clone()));
    for a in args {
        taken.extend(a.all_names());
    }
    for i in 0..out.len() {
        let x = out[i].0.clone();
        let clash = avoid.contains(&x) || args[i + 1..].iter().any(|a| a.occurs_free(&x));
        if clash {
            let y = fresh_name(&x, |n| taken.contains(n) || ctx.contains(n));
            taken.insert(y.clone());
            body = body.rename_free(&x, &y);
            out[i].0 = y;
        }
    }
    (out, body)
}

/// `t̄` for `t` typed in `ctx`, with a fresh counter.
pub fn cps(ctx: &Context, t: &Term) -> Result<SttTerm, CpsError> {
    Translator::new().cps(ctx, t)
}

/// `t̿ = λk. (t : k)` for `t` typed in `ctx`, with a fresh counter.
pub fn cps_mod(ctx: &Context, t: &Term) -> Result<SttTerm, CpsError> {
    Translator::new().cps_mod(ctx, t)
}

/// `t : r` for `t` typed in `ctx`, with a fresh counter.
pub fn colon(ctx: &Context, t: &Term, r: &SttTerm) -> Result<SttTerm, CpsError> {
    Translator::new().colon(ctx, t, r)
}

/// One instance of a translation lemma checked on a concrete term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub lemma: &'static str,
    /// The step or redex the instance is about, empty for the term itself.
    pub at: String,
    pub holds: bool,
}

/// Checks typing of both translations, `cps(t) ≫ cps_mod(t)`, substitution
/// at every β-redex, simulation of every detour step and invariance under
/// every permutation step.
pub fn check_lemmas(ctx: &Context, t: &Term) -> Result<Vec<LemmaCheck>, CpsError> {
    let ty = infer(ctx, t)?;
    let want = neg_type(&ty)?;
    let sctx = translate_context(ctx)?;
    let plain = cps(ctx, t)?;
    let modified = cps_mod(ctx, t)?;
    let mut out = Vec::new();
    let mut push = |lemma, at: String, holds| out.push(LemmaCheck { lemma, at, holds });
    push(
        "typing",
        String::new(),
        stt_infer(&sctx, &plain).ok() == Some(want.clone()),
    );
    push(
        "typing-modified",
        String::new(),
        stt_infer(&sctx, &modified).ok() == Some(want),
    );
    push(
        "redex-deletion",
        String::new(),
        stt_reduces_to(&plain, &modified, 4 * plain.size()),
    );
    for (path, kind) in redexes(t) {
        if kind != RuleKind::D1 {
            continue;
        }
        let Some(Term::App(f, s)) = t.subterm(&path) else {
            continue;
        };
        let Term::Lam(x, a, body) = &**f else { continue };
        let inner = context_at(ctx, t, &path).with(x.clone(), a.clone());
        let outer = context_at(ctx, t, &path);
        let lhs = cps_mod(&inner, body)?.subst(x, &cps_mod(&outer, s)?);
        let rhs = cps_mod(&outer, &body.subst(x, s))?;
        push(
            "substitution",
            format!("{path:?}"),
            stt_reduces_to(&lhs, &rhs, 4 * lhs.size()),
        );
    }
    for (path, kind, u) in successors(ctx, t, Family::D) {
        let mu = cps_mod(ctx, &u)?;
        let holds = stt_reduces_to_plus(&modified, &mu, 4 * modified.size());
        push("detour-simulation", format!("{kind} {path:?}"), holds);
    }
    for (path, kind, u) in successors(ctx, t, Family::P) {
        let holds = stt_alpha_eq(&modified, &cps_mod(ctx, &u)?);
        push("permutation-invariance", format!("{kind} {path:?}"), holds);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stt::{stt_alpha_eq, stt_infer, stt_normalize_beta_eta, stt_reduces_to};
    use crate::term::*;
    use std::sync::Arc;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn r() -> Formula {
        Formula::atom("r")
    }

    fn sp() -> SimpleType {
        SimpleType::Atom(Arc::from("p"))
    }

    #[test]
    fn type_translation_examples() {
        let pbar = neg(neg(sp()));
        assert_eq!(neg_type(&p()).unwrap(), pbar);
        assert_eq!(neg_type(&Formula::boxed(p())).unwrap(), neg(neg(pbar.clone())));
        assert_eq!(
            neg_type(&Formula::implies(p(), p())).unwrap(),
            neg(neg(SimpleType::arrow(pbar.clone(), pbar)))
        );
        assert!(matches!(neg_type(&Formula::Bot), Err(CpsError::BotOrTop(_))));
    }

    #[test]
    fn term_translation_examples() {
        let ctx = Context::new()
            .with("x", p())
            .with("y", r())
            .with("z", Formula::boxed(p()));
        let t = cps(&ctx, &var("x")).unwrap();
        assert!(stt_alpha_eq(
            &t,
            &SttTerm::lam("k", neg(sp()), SttTerm::app(v("x"), v("k")))
        ));
        assert!(stt_alpha_eq(&cps_mod(&ctx, &var("x")).unwrap(), &t));
        let c = colon(&ctx, &var("x"), &v("r0")).unwrap();
        assert_eq!(c, SttTerm::app(v("x"), v("r0")));

        // the pair clause: λk. k (λu. u x̄ ȳ)
        let t = cps(&ctx, &pair(var("x"), var("y"))).unwrap();
        let SttTerm::Lam(k, _, body) = &t else { panic!() };
        let SttTerm::App(kk, inner) = &**body else { panic!() };
        assert_eq!(**kk, v(k));
        assert!(matches!(&**inner, SttTerm::Lam(..)));

        // bel x = z in x under the colon: z (λx. r x̿)
        let b = bel(vec![("w", p())], vec![var("z")], var("w"));
        let c = colon(&ctx, &b, &v("r0")).unwrap();
        let SttTerm::App(head, cont) = &c else { panic!() };
        assert_eq!(**head, v("z"));
        let SttTerm::Lam(w, _, cb) = &**cont else { panic!() };
        assert_eq!(w, "w");
        let SttTerm::App(rr, _) = &**cb else { panic!() };
        assert_eq!(**rr, v("r0"));
    }

    #[test]
    fn translations_preserve_types() {
        let k = lam(
            "f",
            Formula::boxed(Formula::implies(p(), r())),
            lam(
                "a",
                Formula::boxed(p()),
                bel(
                    vec![("g", Formula::implies(p(), r())), ("u", p())],
                    vec![var("f"), var("a")],
                    app(var("g"), var("u")),
                ),
            ),
        );
        let ty = infer(&Context::new(), &k).unwrap();
        let want = neg_type(&ty).unwrap();
        for m in [cps(&Context::new(), &k).unwrap(), cps_mod(&Context::new(), &k).unwrap()] {
            assert_eq!(stt_infer(&SttContext::new(), &m).unwrap(), want);
        }
    }

    #[test]
    fn plain_and_modified_agree_on_a_variable() {
        let ctx = Context::new().with("z", p());
        let a = stt_normalize_beta_eta(&cps(&ctx, &var("z")).unwrap(), 100).unwrap();
        let b = stt_normalize_beta_eta(&cps_mod(&ctx, &var("z")).unwrap(), 100).unwrap();
        assert!(stt_alpha_eq(&a, &b));
    }

    #[test]
    fn plain_reduces_to_modified() {
        let ctx = Context::new().with("x", p()).with("f", Formula::implies(p(), r()));
        let t = app(lam("y", p(), app(var("f"), var("y"))), var("x"));
        let plain = cps(&ctx, &t).unwrap();
        let modified = cps_mod(&ctx, &t).unwrap();
        assert!(stt_reduces_to(&plain, &modified, 4 * plain.size()));
    }

    #[test]
    fn case_binders_avoid_the_continuation() {
        // (case d of {x => f | y => f}) x : the branch binder x must not
        // capture the argument x
        let ctx = Context::new()
            .with("d", Formula::or(p(), p()))
            .with("f", Formula::implies(p(), r()))
            .with("x", p());
        let t = app(case(var("d"), "x", var("f"), "y", var("f")), var("x"));
        let m = cps_mod(&ctx, &t).unwrap();
        let sctx = translate_context(&ctx).unwrap();
        assert_eq!(stt_infer(&sctx, &m).unwrap(), neg_type(&r()).unwrap());
        assert!(!format!("{m}").contains("\\x:"));
    }

    #[test]
    fn ex_falso_is_not_translated() {
        let ctx = Context::new().with("z", Formula::Bot);
        assert!(cps(&ctx, &efq(p(), var("z"))).is_err());
        assert!(cps_mod(&ctx, &unit(var("z"))).is_err());
    }

    #[test]
    fn box_permutation_collapses_only_at_the_first_argument() {
        use crate::rewrite::{step_in, RuleKind};
        use crate::syntax::parse_term_in;
        let ctx = Context::new()
            .with("u", Formula::boxed(p()))
            .with("d", Formula::or(p(), p()))
            .with("a", Formula::boxed(r()));
        let first = parse_term_in(&ctx, "bel x:p = case d of {y => u | w => u}, z:r = a in x").unwrap();
        let s = step_in(&ctx, &first, &[0], RuleKind::P4).unwrap();
        assert!(stt_alpha_eq(
            &cps_mod(&ctx, &first).unwrap(),
            &cps_mod(&ctx, &s).unwrap()
        ));

        // the case moves ahead of the first argument's continuation chain
        let later = parse_term_in(&ctx, "bel z:r = a, x:p = case d of {y => u | w => u} in x").unwrap();
        let s = step_in(&ctx, &later, &[1], RuleKind::P4).unwrap();
        let (m, n) = (cps_mod(&ctx, &later).unwrap(), cps_mod(&ctx, &s).unwrap());
        assert!(!stt_alpha_eq(&m, &n));
        let m = stt_normalize_beta_eta(&m, 1000).unwrap();
        let n = stt_normalize_beta_eta(&n, 1000).unwrap();
        assert!(!stt_alpha_eq(&m, &n));
    }

    #[test]
    fn lemma_checks_on_a_beta_redex() {
        let ctx = Context::new().with("y", p()).with("f", Formula::implies(p(), r()));
        let t = app(lam("x", p(), app(var("f"), var("x"))), var("y"));
        let checks = check_lemmas(&ctx, &t).unwrap();
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");
        let names: Vec<_> = checks.iter().map(|c| c.lemma).collect();
        assert_eq!(
            names,
            [
                "typing",
                "typing-modified",
                "redex-deletion",
                "substitution",
                "detour-simulation"
            ]
        );
    }

    fn v(x: &str) -> SttTerm {
        SttTerm::var(x)
    }
}
