//! Detour, permutation and ⊥-conversions: redex search, single steps,
//! one-step successor sets and normalization with traces.
//!
//! Redexes are addressed by the path of the node they rewrite, except for
//! the three rules that act on one argument of a belief box (`D4`, `P4`,
//! `B5`): those are addressed by the path of the argument, so the last
//! index selects which argument fires.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::context::Context;
use crate::formula::Formula;
use crate::syntax::print_term;
use crate::term::{fresh_name, Name, Path, Side, Term};
use crate::typing::{context_at, infer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    D1,
    D2,
    D3,
    D4,
    D5,
    P1,
    P2,
    P3,
    P4,
    PBot,
    B1,
    B2,
    B3,
    B4,
    B5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    D,
    P,
    Bot,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    #[default]
    LeftmostOutermost,
    LeftmostInnermost,
}

impl RuleKind {
    pub const ALL: [RuleKind; 15] = [
        RuleKind::D1,
        RuleKind::D2,
        RuleKind::D3,
        RuleKind::D4,
        RuleKind::D5,
        RuleKind::P1,
        RuleKind::P2,
        RuleKind::P3,
        RuleKind::P4,
        RuleKind::PBot,
        RuleKind::B1,
        RuleKind::B2,
        RuleKind::B3,
        RuleKind::B4,
        RuleKind::B5,
    ];

    pub fn family(self) -> Family {
        use RuleKind::*;
        match self {
            D1 | D2 | D3 | D4 | D5 => Family::D,
            P1 | P2 | P3 | P4 | PBot => Family::P,
            B1 | B2 | B3 | B4 | B5 => Family::Bot,
        }
    }

    pub fn name(self) -> &'static str {
        use RuleKind::*;
        match self {
            D1 => "D1",
            D2 => "D2",
            D3 => "D3",
            D4 => "D4",
            D5 => "D5",
            P1 => "P1",
            P2 => "P2",
            P3 => "P3",
            P4 => "P4",
            PBot => "PBot",
            B1 => "B1",
            B2 => "B2",
            B3 => "B3",
            B4 => "B4",
            B5 => "B5",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleKind> {
        RuleKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Rules acting on an argument of a belief box.
    pub fn targets_box_argument(self) -> bool {
        matches!(self, RuleKind::D4 | RuleKind::P4 | RuleKind::B5)
    }

    // lower fires first at a shared path: ⊥ before P before D
    fn priority(self) -> (u8, RuleKind) {
        let rank = match self.family() {
            Family::Bot => 0,
            Family::P => 1,
            _ => 2,
        };
        (rank, self)
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Family {
    pub fn includes(self, kind: RuleKind) -> bool {
        self == Family::All || kind.family() == self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub kind: RuleKind,
    pub path: Path,
    pub before: Term,
    pub after: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<ReductionStep>,
    pub result: Term,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStepReport {
    pub rule: String,
    pub path: Path,
    pub term: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub start: String,
    pub steps: Vec<TraceStepReport>,
    pub result: String,
}

impl Trace {
    pub fn report(&self) -> TraceReport {
        TraceReport {
            start: print_term(&self.start),
            steps: self
                .steps
                .iter()
                .map(|s| TraceStepReport {
                    rule: s.kind.name().to_string(),
                    path: s.path.clone(),
                    term: print_term(&s.after),
                })
                .collect(),
            result: print_term(&self.result),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("no subterm at path {0:?}")]
    InvalidPath(Path),
    #[error("rule {kind} does not match at path {path:?}")]
    Mismatch { kind: RuleKind, path: Path },
    #[error("fuel of {fuel} steps exhausted before reaching a normal form")]
    FuelExhausted { fuel: u64, trace: Box<Trace> },
}

/// Rules whose left-hand side matches at the root of `t`, excluding the
/// box-argument rules.
fn root_kinds(t: &Term, out: &mut Vec<RuleKind>) {
    use RuleKind::*;
    match t {
        Term::App(f, _) => match **f {
            Term::Lam(..) => out.push(D1),
            Term::Case { .. } => out.push(P1),
            Term::Efq(..) => out.push(B1),
            _ => {}
        },
        Term::Proj(_, a) => match **a {
            Term::Pair(..) => out.push(D2),
            Term::Case { .. } => out.push(P2),
            Term::Efq(..) => out.push(B2),
            _ => {}
        },
        Term::Case { scrut, .. } => match **scrut {
            Term::Inj(..) => out.push(D3),
            Term::Case { .. } => out.push(P3),
            Term::Efq(..) => out.push(B3),
            _ => {}
        },
        Term::Efq(_, a) => match **a {
            Term::Case { .. } => out.push(PBot),
            Term::Efq(..) => out.push(B4),
            _ => {}
        },
        Term::BoxIntro { binders, args, body }
            if args.len() == 1 && matches!(&**body, Term::Var(x) if *x == binders[0].0) =>
        {
            out.push(D5);
        }
        _ => {}
    }
}

fn box_argument_kind(arg: &Term) -> Option<RuleKind> {
    match arg {
        Term::BoxIntro { .. } => Some(RuleKind::D4),
        Term::Case { .. } => Some(RuleKind::P4),
        Term::Efq(..) => Some(RuleKind::B5),
        _ => None,
    }
}

fn collect(t: &Term, path: &mut Path, from_parent: Option<RuleKind>, postorder: bool, out: &mut Vec<(Path, RuleKind)>) {
    let mut here = Vec::new();
    root_kinds(t, &mut here);
    here.extend(from_parent);
    here.sort_by_key(|k| k.priority());
    if !postorder {
        out.extend(here.iter().map(|k| (path.clone(), *k)));
    }
    let is_box = matches!(t, Term::BoxIntro { .. });
    let n = t.children().len();
    for (i, c) in t.children().into_iter().enumerate() {
        let arg_kind = if is_box && i + 1 < n {
            box_argument_kind(c)
        } else {
            None
        };
        path.push(i);
        collect(c, path, arg_kind, postorder, out);
        path.pop();
    }
    if postorder {
        out.extend(here.iter().map(|k| (path.clone(), *k)));
    }
}

/// All redexes in leftmost-outermost order (preorder; at a shared path
/// ⊥-rules precede permutations, which precede detours).
pub fn redexes(t: &Term) -> Vec<(Path, RuleKind)> {
    let mut out = Vec::new();
    collect(t, &mut Vec::new(), None, false, &mut out);
    out
}

/// All redexes in leftmost-innermost order (postorder).
pub fn redexes_innermost(t: &Term) -> Vec<(Path, RuleKind)> {
    let mut out = Vec::new();
    collect(t, &mut Vec::new(), None, true, &mut out);
    out
}

pub fn is_normal(t: &Term) -> bool {
    redexes(t).is_empty()
}

/// Renames `x` (bound over `scope`) when it belongs to `avoid`.
fn rebind(x: &Name, scope: &Term, avoid: &BTreeSet<Name>) -> (Name, Term) {
    if !avoid.contains(x) {
        return (x.clone(), scope.clone());
    }
    let names = scope.all_names();
    let y = fresh_name(x, |n| avoid.contains(n) || names.contains(n));
    (y.clone(), scope.rename_free(x, &y))
}

fn case_node(scrut: Term, x: Name, left: Term, y: Name, right: Term) -> Term {
    Term::Case {
        scrut: Box::new(scrut),
        left_var: x,
        left: Box::new(left),
        right_var: y,
        right: Box::new(right),
    }
}

fn mismatch(kind: RuleKind, path: &[usize]) -> RewriteError {
    RewriteError::Mismatch {
        kind,
        path: path.to_vec(),
    }
}

/// Contracts a redex rooted at `t`. `local` types the free variables of
/// `t` and is only consulted to retype ex falso annotations.
fn contract_root(local: &dyn Fn() -> Context, t: &Term, kind: RuleKind, path: &[usize]) -> Result<Term, RewriteError> {
    use RuleKind::*;
    let fail = || mismatch(kind, path);
    match (kind, t) {
        (D1, Term::App(f, s)) => match &**f {
            Term::Lam(x, _, body) => Ok(body.subst(x, s)),
            _ => Err(fail()),
        },
        (D2, Term::Proj(side, a)) => match &**a {
            Term::Pair(l, r) => Ok(match side {
                Side::Left => (**l).clone(),
                Side::Right => (**r).clone(),
            }),
            _ => Err(fail()),
        },
        (
            D3,
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            },
        ) => match &**scrut {
            Term::Inj(Side::Left, _, u) => Ok(left.subst(left_var, u)),
            Term::Inj(Side::Right, _, u) => Ok(right.subst(right_var, u)),
            _ => Err(fail()),
        },
        (D5, Term::BoxIntro { binders, args, body })
            if args.len() == 1 && matches!(&**body, Term::Var(x) if *x == binders[0].0) =>
        {
            Ok(args[0].clone())
        }
        (P1, Term::App(f, s)) => match &**f {
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => {
                let avoid = s.free_vars();
                let (x, l) = rebind(left_var, left, &avoid);
                let (y, r) = rebind(right_var, right, &avoid);
                Ok(case_node(
                    (**scrut).clone(),
                    x,
                    Term::App(Box::new(l), s.clone()),
                    y,
                    Term::App(Box::new(r), s.clone()),
                ))
            }
            _ => Err(fail()),
        },
        (P2, Term::Proj(side, a)) => match &**a {
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => Ok(case_node(
                (**scrut).clone(),
                left_var.clone(),
                Term::Proj(*side, left.clone()),
                right_var.clone(),
                Term::Proj(*side, right.clone()),
            )),
            _ => Err(fail()),
        },
        (
            P3,
            Term::Case {
                scrut,
                left_var: u,
                left: s1,
                right_var: v,
                right: s2,
            },
        ) => match &**scrut {
            Term::Case {
                scrut: t0,
                left_var,
                left: t1,
                right_var,
                right: t2,
            } => {
                let mut avoid = s1.free_vars();
                avoid.remove(u);
                let mut fv2 = s2.free_vars();
                fv2.remove(v);
                avoid.extend(fv2);
                let (x, t1) = rebind(left_var, t1, &avoid);
                let (y, t2) = rebind(right_var, t2, &avoid);
                let inner = |ti: Term| case_node(ti, u.clone(), (**s1).clone(), v.clone(), (**s2).clone());
                Ok(case_node((**t0).clone(), x, inner(t1), y, inner(t2)))
            }
            _ => Err(fail()),
        },
        (PBot, Term::Efq(ann, a)) => match &**a {
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => Ok(case_node(
                (**scrut).clone(),
                left_var.clone(),
                Term::Efq(ann.clone(), left.clone()),
                right_var.clone(),
                Term::Efq(ann.clone(), right.clone()),
            )),
            _ => Err(fail()),
        },
        (B1, Term::App(f, _)) => match &**f {
            Term::Efq(ann, inner) => {
                let ann = ann.as_impl().map_or_else(|| ann.clone(), |(_, b)| b.clone());
                Ok(Term::Efq(ann, inner.clone()))
            }
            _ => Err(fail()),
        },
        (B2, Term::Proj(side, a)) => match &**a {
            Term::Efq(ann, inner) => {
                let ann = match (ann.as_conj(), side) {
                    (Some((l, _)), Side::Left) => l.clone(),
                    (Some((_, r)), Side::Right) => r.clone(),
                    (None, _) => ann.clone(),
                };
                Ok(Term::Efq(ann, inner.clone()))
            }
            _ => Err(fail()),
        },
        (
            B3,
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            },
        ) => match &**scrut {
            Term::Efq(ann, inner) => {
                let ann = match ann.as_disj() {
                    Some((a, b)) => {
                        let ctx = local();
                        infer(&ctx.clone().with(left_var.clone(), a.clone()), left)
                            .or_else(|_| infer(&ctx.with(right_var.clone(), b.clone()), right))
                            .unwrap_or_else(|_| ann.clone())
                    }
                    None => ann.clone(),
                };
                Ok(Term::Efq(ann, inner.clone()))
            }
            _ => Err(fail()),
        },
        (B4, Term::Efq(ann, a)) => match &**a {
            Term::Efq(_, inner) => Ok(Term::Efq(ann.clone(), inner.clone())),
            _ => Err(fail()),
        },
        _ => Err(fail()),
    }
}

/// Contracts a box-argument redex: `t` is the box, `i` the argument.
fn contract_box_argument(
    local: &dyn Fn() -> Context,
    t: &Term,
    i: usize,
    kind: RuleKind,
    path: &[usize],
) -> Result<Term, RewriteError> {
    let fail = || mismatch(kind, path);
    let Term::BoxIntro { binders, args, body } = t else {
        return Err(fail());
    };
    if i >= args.len() {
        return Err(fail());
    }
    match (kind, &args[i]) {
        (
            RuleKind::D4,
            Term::BoxIntro {
                binders: inner_binders,
                args: inner_args,
                body: inner_body,
            },
        ) => {
            let mut inner_body = (**inner_body).clone();
            let mut body = (**body).clone();
            let mut outer: Vec<(Name, Formula)> = binders.clone();
            // inner binders must not collide with the surviving outer
            // binders nor capture free variables of the outer body
            let mut taken: BTreeSet<Name> = t.all_names();
            taken.extend(t.free_vars());
            let mut ys = Vec::with_capacity(inner_binders.len());
            for (y, a) in inner_binders {
                let clash = outer.iter().enumerate().any(|(j, (x, _))| j != i && x == y)
                    || (body.occurs_free(y) && *y != binders[i].0);
                if clash {
                    let y2 = fresh_name(y, |n| taken.contains(n));
                    taken.insert(y2.clone());
                    inner_body = inner_body.rename_free(y, &y2);
                    ys.push((y2, a.clone()));
                } else {
                    ys.push((y.clone(), a.clone()));
                }
            }
            // outer binders must not capture free variables of the inner body
            let inner_fv = inner_body.free_vars();
            let y_names: BTreeSet<&Name> = ys.iter().map(|(y, _)| y).collect();
            for (j, (x, _)) in outer.iter_mut().enumerate() {
                if j != i && (inner_fv.contains(x) && !y_names.contains(x)) {
                    let x2 = fresh_name(x, |n| taken.contains(n));
                    taken.insert(x2.clone());
                    body = body.rename_free(x, &x2);
                    *x = x2;
                }
            }
            let body = body.subst(&binders[i].0, &inner_body);
            let mut new_binders = Vec::new();
            let mut new_args = Vec::new();
            for (j, (b, a)) in outer.into_iter().enumerate() {
                if j == i {
                    new_binders.extend(ys.iter().cloned());
                    new_args.extend(inner_args.iter().cloned());
                } else {
                    new_binders.push((b, a));
                    new_args.push(args[j].clone());
                }
            }
            Ok(Term::BoxIntro {
                binders: new_binders,
                args: new_args,
                body: Box::new(body),
            })
        }
        (
            RuleKind::P4,
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            },
        ) => {
            let mut avoid: BTreeSet<Name> = body.free_vars();
            for (b, _) in binders {
                avoid.remove(b);
            }
            for (j, a) in args.iter().enumerate() {
                if j != i {
                    avoid.extend(a.free_vars());
                }
            }
            let (x, l) = rebind(left_var, left, &avoid);
            let (y, r) = rebind(right_var, right, &avoid);
            let with_arg = |a: Term| {
                let mut args = args.clone();
                args[i] = a;
                Term::BoxIntro {
                    binders: binders.clone(),
                    args,
                    body: body.clone(),
                }
            };
            Ok(case_node((**scrut).clone(), x, with_arg(l), y, with_arg(r)))
        }
        (RuleKind::B5, Term::Efq(inner_ann, inner)) => {
            let mut ctx = local();
            for (b, a) in binders {
                ctx.insert(b.clone(), a.clone());
            }
            let ann = infer(&ctx, body)
                .map(Formula::boxed)
                .unwrap_or_else(|_| inner_ann.clone());
            Ok(Term::Efq(ann, inner.clone()))
        }
        _ => Err(fail()),
    }
}

/// Applies `kind` at `path` in `t`, whose free variables are typed by `ctx`.
pub fn step_in(ctx: &Context, t: &Term, path: &[usize], kind: RuleKind) -> Result<Term, RewriteError> {
    if kind.targets_box_argument() {
        let Some((&i, parent_path)) = path.split_last() else {
            return Err(mismatch(kind, path));
        };
        let parent = t
            .subterm(parent_path)
            .ok_or_else(|| RewriteError::InvalidPath(path.to_vec()))?;
        let local = || context_at(ctx, t, parent_path);
        let new = contract_box_argument(&local, parent, i, kind, path)?;
        t.replace_at(parent_path, new)
            .ok_or_else(|| RewriteError::InvalidPath(path.to_vec()))
    } else {
        let node = t
            .subterm(path)
            .ok_or_else(|| RewriteError::InvalidPath(path.to_vec()))?;
        let local = || context_at(ctx, t, path);
        let new = contract_root(&local, node, kind, path)?;
        t.replace_at(path, new)
            .ok_or_else(|| RewriteError::InvalidPath(path.to_vec()))
    }
}

/// [`step_in`] with an empty context.
pub fn step(t: &Term, path: &[usize], kind: RuleKind) -> Result<Term, RewriteError> {
    step_in(&Context::new(), t, path, kind)
}

/// All one-step successors under `family`, without α-duplicates, in
/// redex order.
pub fn step_relation(ctx: &Context, t: &Term, family: Family) -> Vec<Term> {
    successors(ctx, t, family).into_iter().map(|(_, _, s)| s).collect()
}

/// Like [`step_relation`], keeping the redex that produced each successor.
pub fn successors(ctx: &Context, t: &Term, family: Family) -> Vec<(Path, RuleKind, Term)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (path, kind) in redexes(t) {
        if !family.includes(kind) {
            continue;
        }
        let s = step_in(ctx, t, &path, kind).expect("listed redexes contract");
        if seen.insert(s.canonical()) {
            out.push((path, kind, s));
        }
    }
    out
}

/// The first redex under `strategy`, if any.
pub fn next_redex(t: &Term, strategy: Strategy) -> Option<(Path, RuleKind)> {
    match strategy {
        Strategy::LeftmostOutermost => redexes(t).into_iter().next(),
        Strategy::LeftmostInnermost => redexes_innermost(t).into_iter().next(),
    }
}

/// Reduces `t` to normal form, failing once more than `fuel` steps would
/// be needed.
pub fn normalize(ctx: &Context, t: &Term, strategy: Strategy, fuel: u64) -> Result<Trace, RewriteError> {
    let mut steps = Vec::new();
    let mut cur = t.clone();
    while let Some((path, kind)) = next_redex(&cur, strategy) {
        if steps.len() as u64 >= fuel {
            return Err(RewriteError::FuelExhausted {
                fuel,
                trace: Box::new(Trace {
                    start: t.clone(),
                    steps,
                    result: cur,
                }),
            });
        }
        let next = step_in(ctx, &cur, &path, kind).expect("listed redexes contract");
        steps.push(ReductionStep {
            kind,
            path,
            before: cur,
            after: next.clone(),
        });
        cur = next;
    }
    Ok(Trace {
        start: t.clone(),
        steps,
        result: cur,
    })
}

/// Normal form and step count without recording intermediate terms.
pub fn normal_form(ctx: &Context, t: &Term, strategy: Strategy, fuel: u64) -> Result<(Term, u64), RewriteError> {
    let mut cur = t.clone();
    let mut n = 0;
    while let Some((path, kind)) = next_redex(&cur, strategy) {
        if n >= fuel {
            return Err(RewriteError::FuelExhausted {
                fuel,
                trace: Box::new(Trace {
                    start: t.clone(),
                    steps: Vec::new(),
                    result: cur,
                }),
            });
        }
        cur = step_in(ctx, &cur, &path, kind).expect("listed redexes contract");
        n += 1;
    }
    Ok((cur, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term_in;
    use crate::term::*;
    use crate::typing::infer;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn redex_listing_examples() {
        let t = app(lam("x", p(), var("x")), var("y"));
        assert_eq!(redexes(&t), vec![(vec![], RuleKind::D1)]);
        let t = bel(vec![("u", p())], vec![var("t")], var("u"));
        assert_eq!(redexes(&t), vec![(vec![], RuleKind::D5)]);
        let t = proj(Side::Left, case(var("s"), "x", var("a"), "y", var("b")));
        assert_eq!(redexes(&t), vec![(vec![], RuleKind::P2)]);
        assert!(redexes(&var("x")).is_empty());
    }

    #[test]
    fn box_argument_redexes_address_the_argument() {
        let e = efq(Formula::boxed(p()), var("z"));
        let c = case(var("s"), "x", var("a"), "y", var("b"));
        let t = bel(vec![("u", p()), ("w", p())], vec![c, e], pair(var("u"), var("w")));
        assert_eq!(redexes(&t), vec![(vec![0], RuleKind::P4), (vec![1], RuleKind::B5)]);
    }

    #[test]
    fn priority_at_a_shared_path() {
        let inner = efq(Formula::boxed(p()), case(var("s"), "x", var("a"), "y", var("b")));
        let t = bel(vec![("u", p())], vec![inner], pair(var("u"), var("u")));
        assert_eq!(redexes(&t), vec![(vec![0], RuleKind::B5), (vec![0], RuleKind::PBot)]);
    }

    #[test]
    fn step_examples() {
        let t = app(lam("x", p(), var("x")), var("y"));
        assert_eq!(step(&t, &[], RuleKind::D1).unwrap(), var("y"));
        let pr = Formula::or(p(), r());
        let t = case(inj(Side::Left, pr, var("a")), "x", var("x"), "y", var("y"));
        assert_eq!(step(&t, &[], RuleKind::D3).unwrap(), var("a"));
        let t = app(efq(Formula::implies(p(), r()), var("t")), var("s"));
        assert_eq!(step(&t, &[], RuleKind::B1).unwrap(), efq(r(), var("t")));
        assert!(matches!(
            step(&t, &[], RuleKind::D1),
            Err(RewriteError::Mismatch { .. })
        ));
        assert!(matches!(
            step(&t, &[3], RuleKind::D1),
            Err(RewriteError::InvalidPath(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        let co = lam("x", p(), bel(vec![], vec![], var("x")));
        let tr = normalize(&Context::new(), &co, Strategy::LeftmostOutermost, 10).unwrap();
        assert!(tr.steps.is_empty());
        assert_eq!(tr.result, co);

        let t = app(co, var("y"));
        let tr = normalize(&Context::new(), &t, Strategy::LeftmostOutermost, 10).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.steps[0].kind, RuleKind::D1);
        assert_eq!(tr.result, bel(vec![], vec![], var("y")));
    }

    #[test]
    fn box_in_box_merges_binders() {
        let s1 = app(var("f"), var("w"));
        let inner = bel(vec![("w", p())], vec![var("t")], s1.clone());
        let t = bel(vec![("u", r())], vec![inner], pair(var("u"), var("u")));
        let out = step(&t, &[0], RuleKind::D4).unwrap();
        let expected = bel(vec![("w", p())], vec![var("t")], pair(s1.clone(), s1));
        assert!(alpha_eq(&out, &expected), "{out}");
    }

    #[test]
    fn box_in_box_avoids_capture() {
        // the inner body mentions an ambient `v` that is also an outer binder
        let inner = bel(vec![("w", p())], vec![var("t")], app(var("v"), var("w")));
        let t = bel(
            vec![("u", r()), ("v", p())],
            vec![inner, var("a")],
            pair(var("u"), var("v")),
        );
        let out = step(&t, &[0], RuleKind::D4).unwrap();
        let Term::BoxIntro { binders, body, .. } = &out else {
            panic!("expected a box")
        };
        assert_eq!(binders.len(), 2);
        let v2 = &binders[1].0;
        assert_ne!(v2, "v");
        assert_eq!(**body, pair(app(var("v"), var("w")), var(v2)));
    }

    #[test]
    fn permutation_into_application_renames_branch_binders() {
        let t = app(case(var("s"), "x", var("f"), "y", var("g")), var("x"));
        let out = step(&t, &[], RuleKind::P1).unwrap();
        let Term::Case { left_var, left, .. } = &out else {
            panic!("expected a case")
        };
        assert_ne!(left_var, "x");
        assert_eq!(**left, app(var("f"), var("x")));
    }

    #[test]
    fn efq_annotations_follow_the_erased_elimination() {
        let ctx = Context::new().with("z", Formula::Bot).with("s", Formula::boxed(p()));
        let t = parse_term_in(&ctx, "case efq[p \\/ r] z of {x => <x, x> | y => efq[p /\\ p] z}").unwrap();
        let out = step_in(&ctx, &t, &[], RuleKind::B3).unwrap();
        assert_eq!(out, efq(Formula::and(p(), p()), var("z")));

        let t = parse_term_in(&ctx, "bel u:p = efq[[] p] z in <u, u>").unwrap();
        let out = step_in(&ctx, &t, &[0], RuleKind::B5).unwrap();
        assert_eq!(out, efq(Formula::boxed(Formula::and(p(), p())), var("z")));
        assert_eq!(infer(&ctx, &out), infer(&ctx, &t));
    }

    #[test]
    fn step_relation_examples() {
        assert!(step_relation(&Context::new(), &var("x"), Family::All).is_empty());
        let t = app(lam("x", p(), var("x")), proj(Side::Left, pair(var("a"), var("b"))));
        assert_eq!(step_relation(&Context::new(), &t, Family::D).len(), 2);
        let c = case(var("t1"), "x", var("t2"), "y", var("t3"));
        let t = bel(vec![("z", p())], vec![efq(Formula::boxed(p()), c)], var("s1"));
        let succ = successors(&Context::new(), &t, Family::All);
        let kinds: Vec<_> = succ.iter().map(|(_, k, _)| *k).collect();
        assert_eq!(kinds, vec![RuleKind::B5, RuleKind::PBot]);
    }

    #[test]
    fn fuel_exhaustion_carries_partial_trace() {
        let t = app(lam("x", p(), var("x")), app(lam("y", p(), var("y")), var("a")));
        match normalize(&Context::new(), &t, Strategy::LeftmostOutermost, 1) {
            Err(RewriteError::FuelExhausted { fuel, trace }) => {
                assert_eq!(fuel, 1);
                assert_eq!(trace.steps.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strategies_differ_in_order() {
        let t = app(lam("x", p(), var("x")), app(lam("y", p(), var("y")), var("a")));
        assert_eq!(
            next_redex(&t, Strategy::LeftmostOutermost),
            Some((vec![], RuleKind::D1))
        );
        assert_eq!(
            next_redex(&t, Strategy::LeftmostInnermost),
            Some((vec![1], RuleKind::D1))
        );
    }
}
