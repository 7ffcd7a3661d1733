//! Proof terms and the binding discipline: free variables, capture-avoiding
//! substitution, α-equivalence and positional access.
//!
//! Terms use named binders. α-equivalence is decided by comparing
//! canonical forms in which every bound name is replaced by its binding
//! depth, so `alpha_eq` and hashing of canonical terms are structural.
//!
//! Child indices, used by paths throughout the crate:
//!
//! | node       | children                              |
//! |------------|---------------------------------------|
//! | `Lam`      | 0 = body                              |
//! | `App`      | 0 = function, 1 = argument            |
//! | `Pair`     | 0 = first, 1 = second                 |
//! | `Proj`, `Inj`, `Efq`, `Unit` | 0 = argument        |
//! | `Case`     | 0 = scrutinee, 1 = left, 2 = right    |
//! | `BoxIntro` | 0..n = arguments, n = body            |

use std::collections::BTreeSet;

use crate::formula::Formula;

pub type Name = String;

/// Position of a projection or injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Lam(Name, Formula, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj(Side, Box<Term>),
    /// Injection annotated with the full disjunction.
    Inj(Side, Formula, Box<Term>),
    Case {
        scrut: Box<Term>,
        left_var: Name,
        left: Box<Term>,
        right_var: Name,
        right: Box<Term>,
    },
    /// Ex falso, annotated with its target formula.
    Efq(Formula, Box<Term>),
    Unit(Box<Term>),
    /// `bel x1=t1, ..., xn=tn in body`; the binders scope over `body` only.
    BoxIntro {
        binders: Vec<(Name, Formula)>,
        args: Vec<Term>,
        body: Box<Term>,
    },
}

/// A path from the root: a sequence of child indices.
pub type Path = Vec<usize>;

pub fn var(x: &str) -> Term {
    Term::Var(x.to_string())
}

pub fn lam(x: &str, ann: Formula, body: Term) -> Term {
    Term::Lam(x.to_string(), ann, Box::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

pub fn pair(a: Term, b: Term) -> Term {
    Term::Pair(Box::new(a), Box::new(b))
}

pub fn proj(side: Side, t: Term) -> Term {
    Term::Proj(side, Box::new(t))
}

pub fn inj(side: Side, ann: Formula, t: Term) -> Term {
    Term::Inj(side, ann, Box::new(t))
}

pub fn case(scrut: Term, x: &str, left: Term, y: &str, right: Term) -> Term {
    Term::Case {
        scrut: Box::new(scrut),
        left_var: x.to_string(),
        left: Box::new(left),
        right_var: y.to_string(),
        right: Box::new(right),
    }
}

pub fn efq(ann: Formula, t: Term) -> Term {
    Term::Efq(ann, Box::new(t))
}

pub fn unit(t: Term) -> Term {
    Term::Unit(Box::new(t))
}

pub fn bel(binders: Vec<(&str, Formula)>, args: Vec<Term>, body: Term) -> Term {
    Term::BoxIntro {
        binders: binders.into_iter().map(|(x, a)| (x.to_string(), a)).collect(),
        args,
        body: Box::new(body),
    }
}

/// Picks a name derived from `base` for which `taken` is false.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !taken(n))
        .expect("unbounded name supply")
}

impl Term {
    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) => Vec::new(),
            Term::Lam(_, _, b) => vec![b],
            Term::App(f, a) | Term::Pair(f, a) => vec![f, a],
            Term::Proj(_, t) | Term::Inj(_, _, t) | Term::Efq(_, t) | Term::Unit(t) => vec![t],
            Term::Case { scrut, left, right, .. } => vec![scrut, left, right],
            Term::BoxIntro { args, body, .. } => {
                let mut v: Vec<&Term> = args.iter().collect();
                v.push(body);
                v
            }
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut Term> {
        match (self, i) {
            (Term::Lam(_, _, b), 0) => Some(b),
            (Term::App(f, _), 0) | (Term::Pair(f, _), 0) => Some(f),
            (Term::App(_, a), 1) | (Term::Pair(_, a), 1) => Some(a),
            (Term::Proj(_, t), 0) | (Term::Inj(_, _, t), 0) | (Term::Efq(_, t), 0) | (Term::Unit(t), 0) => Some(t),
            (Term::Case { scrut, .. }, 0) => Some(scrut),
            (Term::Case { left, .. }, 1) => Some(left),
            (Term::Case { right, .. }, 2) => Some(right),
            (Term::BoxIntro { args, body, .. }, i) => {
                if i < args.len() {
                    Some(&mut args[i])
                } else if i == args.len() {
                    Some(body)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Returns a copy of `self` with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &[usize], replacement: Term) -> Option<Term> {
        let mut out = self.clone();
        let mut cur = &mut out;
        for &i in path {
            cur = cur.child_mut(i)?;
        }
        *cur = replacement;
        Some(out)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Term::Lam(x, _, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => {
                scrut.collect_free(bound, out);
                bound.push(left_var);
                left.collect_free(bound, out);
                bound.pop();
                bound.push(right_var);
                right.collect_free(bound, out);
                bound.pop();
            }
            Term::BoxIntro { binders, args, body } => {
                for a in args {
                    a.collect_free(bound, out);
                }
                let mark = bound.len();
                bound.extend(binders.iter().map(|(x, _)| x.as_str()));
                body.collect_free(bound, out);
                bound.truncate(mark);
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::Lam(y, _, b) => y != x && b.occurs_free(x),
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => {
                scrut.occurs_free(x)
                    || (left_var != x && left.occurs_free(x))
                    || (right_var != x && right.occurs_free(x))
            }
            Term::BoxIntro { binders, args, body } => {
                args.iter().any(|a| a.occurs_free(x)) || (binders.iter().all(|(b, _)| b != x) && body.occurs_free(x))
            }
            _ => self.children().iter().any(|c| c.occurs_free(x)),
        }
    }

    /// Every name occurring in the term, bound or free.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) | Term::Lam(x, _, _) => {
                out.insert(x.clone());
            }
            Term::Case {
                left_var, right_var, ..
            } => {
                out.insert(left_var.clone());
                out.insert(right_var.clone());
            }
            Term::BoxIntro { binders, .. } => {
                out.extend(binders.iter().map(|(x, _)| x.clone()));
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_names(out);
        }
    }

    /// Capture-avoiding substitution `self[x := s]`.
    pub fn subst(&self, x: &str, s: &Term) -> Term {
        let fv = s.free_vars();
        self.subst_in(x, s, &fv)
    }

    /// Renames the free occurrences of `x` to `y`.
    pub fn rename_free(&self, x: &str, y: &str) -> Term {
        self.subst(x, &Term::Var(y.to_string()))
    }

    fn subst_in(&self, x: &str, s: &Term, fv_s: &BTreeSet<Name>) -> Term {
        if !self.occurs_free(x) {
            return self.clone();
        }
        match self {
            Term::Var(_) => s.clone(),
            Term::Lam(y, ann, body) => {
                let (y, body) = freshen(y, body, x, fv_s, &[]);
                Term::Lam(y, ann.clone(), Box::new(body.subst_in(x, s, fv_s)))
            }
            Term::App(f, a) => Term::App(Box::new(f.subst_in(x, s, fv_s)), Box::new(a.subst_in(x, s, fv_s))),
            Term::Pair(a, b) => Term::Pair(Box::new(a.subst_in(x, s, fv_s)), Box::new(b.subst_in(x, s, fv_s))),
            Term::Proj(i, t) => Term::Proj(*i, Box::new(t.subst_in(x, s, fv_s))),
            Term::Inj(i, ann, t) => Term::Inj(*i, ann.clone(), Box::new(t.subst_in(x, s, fv_s))),
            Term::Efq(ann, t) => Term::Efq(ann.clone(), Box::new(t.subst_in(x, s, fv_s))),
            Term::Unit(t) => Term::Unit(Box::new(t.subst_in(x, s, fv_s))),
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => {
                let (lv, l) = if left_var == x {
                    (left_var.clone(), (**left).clone())
                } else {
                    let (lv, l) = freshen(left_var, left, x, fv_s, &[]);
                    (lv, l.subst_in(x, s, fv_s))
                };
                let (rv, r) = if right_var == x {
                    (right_var.clone(), (**right).clone())
                } else {
                    let (rv, r) = freshen(right_var, right, x, fv_s, &[]);
                    (rv, r.subst_in(x, s, fv_s))
                };
                Term::Case {
                    scrut: Box::new(scrut.subst_in(x, s, fv_s)),
                    left_var: lv,
                    left: Box::new(l),
                    right_var: rv,
                    right: Box::new(r),
                }
            }
            Term::BoxIntro { binders, args, body } => {
                let args = args.iter().map(|a| a.subst_in(x, s, fv_s)).collect();
                if binders.iter().any(|(b, _)| b == x) {
                    return Term::BoxIntro {
                        binders: binders.clone(),
                        args,
                        body: body.clone(),
                    };
                }
                let mut binders = binders.clone();
                let mut body = (**body).clone();
                for i in 0..binders.len() {
                    let others: Vec<&str> = binders
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, (b, _))| b.as_str())
                        .collect();
                    let (nb, nbody) = freshen(&binders[i].0, &body, x, fv_s, &others);
                    binders[i].0 = nb;
                    body = nbody;
                }
                Term::BoxIntro {
                    binders,
                    args,
                    body: Box::new(body.subst_in(x, s, fv_s)),
                }
            }
        }
    }

    /// α-canonical form: bound names become `%<depth>`, which no parsed
    /// name can collide with.
    pub fn canonical(&self) -> Term {
        self.canon(&mut Vec::new())
    }

    fn canon(&self, env: &mut Vec<(String, String)>) -> Term {
        let depth = env.len();
        let level = |k: usize| format!("%{}", depth + k);
        match self {
            Term::Var(x) => {
                let found = env.iter().rev().find(|(orig, _)| orig == x);
                Term::Var(found.map_or_else(|| x.clone(), |(_, c)| c.clone()))
            }
            Term::Lam(x, ann, b) => {
                env.push((x.clone(), level(0)));
                let b = b.canon(env);
                env.pop();
                Term::Lam(level(0), ann.clone(), Box::new(b))
            }
            Term::App(f, a) => Term::App(Box::new(f.canon(env)), Box::new(a.canon(env))),
            Term::Pair(a, b) => Term::Pair(Box::new(a.canon(env)), Box::new(b.canon(env))),
            Term::Proj(i, t) => Term::Proj(*i, Box::new(t.canon(env))),
            Term::Inj(i, ann, t) => Term::Inj(*i, ann.clone(), Box::new(t.canon(env))),
            Term::Efq(ann, t) => Term::Efq(ann.clone(), Box::new(t.canon(env))),
            Term::Unit(t) => Term::Unit(Box::new(t.canon(env))),
            Term::Case {
                scrut,
                left_var,
                left,
                right_var,
                right,
            } => {
                let scrut = scrut.canon(env);
                env.push((left_var.clone(), level(0)));
                let l = left.canon(env);
                env.pop();
                env.push((right_var.clone(), level(0)));
                let r = right.canon(env);
                env.pop();
                Term::Case {
                    scrut: Box::new(scrut),
                    left_var: level(0),
                    left: Box::new(l),
                    right_var: level(0),
                    right: Box::new(r),
                }
            }
            Term::BoxIntro { binders, args, body } => {
                let args = args.iter().map(|a| a.canon(env)).collect();
                let new_binders: Vec<(String, Formula)> = binders
                    .iter()
                    .enumerate()
                    .map(|(k, (_, ann))| (level(k), ann.clone()))
                    .collect();
                for (k, (b, _)) in binders.iter().enumerate() {
                    env.push((b.clone(), level(k)));
                }
                let body = body.canon(env);
                env.truncate(depth);
                Term::BoxIntro {
                    binders: new_binders,
                    args,
                    body: Box::new(body),
                }
            }
        }
    }

    pub fn contains_efq_or_unit(&self) -> bool {
        matches!(self, Term::Efq(..) | Term::Unit(_)) || self.children().iter().any(|c| c.contains_efq_or_unit())
    }

    pub fn contains_unit(&self) -> bool {
        matches!(self, Term::Unit(_)) || self.children().iter().any(|c| c.contains_unit())
    }
}

/// Renames binder `y` of `body` when it would capture a free variable of the
/// substituted term, i.e. when `y ∈ fv_s` and `x` occurs free in `body`.
fn freshen(y: &str, body: &Term, x: &str, fv_s: &BTreeSet<Name>, siblings: &[&str]) -> (Name, Term) {
    if !fv_s.contains(y) || !body.occurs_free(x) {
        return (y.to_string(), body.clone());
    }
    let body_fv = body.free_vars();
    let fresh = fresh_name(y, |n| {
        fv_s.contains(n) || body_fv.contains(n) || n == x || siblings.contains(&n)
    });
    let renamed = body.rename_free(y, &fresh);
    (fresh, renamed)
}

pub fn alpha_eq(t: &Term, s: &Term) -> bool {
    t.canonical() == s.canonical()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(alpha_eq(&lam("x", p(), var("x")), &lam("y", p(), var("y"))));
        assert!(!alpha_eq(&lam("x", p(), var("x")), &lam("x", p(), var("z"))));
        let a = Formula::atom("a");
        let t = var("t");
        assert!(alpha_eq(
            &bel(vec![("u", a.clone())], vec![t.clone()], var("u")),
            &bel(vec![("w", a)], vec![t], var("w")),
        ));
    }

    #[test]
    fn subst_examples() {
        let yz = pair(var("y"), var("z"));
        assert_eq!(var("x").subst("x", &yz), yz);

        let t = lam("y", p(), app(var("x"), var("y")));
        let got = t.subst("x", &var("y"));
        let expected = lam("y1", p(), app(var("y"), var("y1")));
        assert!(alpha_eq(&got, &expected));
        // the free y must not be captured
        assert!(got.free_vars().contains("y"));

        let a = Formula::atom("a");
        let b = bel(vec![("u", a.clone())], vec![var("x")], var("u"));
        let got = b.subst("x", &var("t"));
        assert_eq!(got, bel(vec![("u", a)], vec![var("t")], var("u")));
    }

    #[test]
    fn subst_into_box_body_renames_capturing_binder() {
        let a = Formula::atom("a");
        // bel u=c in <u, x>   with x := u
        let b = bel(vec![("u", a.clone())], vec![var("c")], pair(var("u"), var("x")));
        let got = b.subst("x", &var("u"));
        assert!(alpha_eq(
            &got,
            &bel(vec![("w", a)], vec![var("c")], pair(var("w"), var("u")))
        ));
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(var("x").free_vars(), ["x".to_string()].into_iter().collect());
        assert!(lam("x", p(), var("x")).free_vars().is_empty());
        let b = bel(vec![("u", p())], vec![var("z")], var("u"));
        assert_eq!(b.free_vars(), ["z".to_string()].into_iter().collect());
    }

    #[test]
    fn case_binders_scope_over_their_branch_only() {
        let t = case(var("s"), "x", var("x"), "y", var("x"));
        let fv = t.free_vars();
        assert!(fv.contains("x") && fv.contains("s") && !fv.contains("y"));
    }

    #[test]
    fn paths_address_subterms() {
        let t = bel(vec![("u", p())], vec![var("a")], app(var("u"), var("b")));
        assert_eq!(t.subterm(&[0]), Some(&var("a")));
        assert_eq!(t.subterm(&[1, 1]), Some(&var("b")));
        assert_eq!(t.subterm(&[2]), None);
        let r = t.replace_at(&[1, 1], var("c")).unwrap();
        assert_eq!(r.subterm(&[1, 1]), Some(&var("c")));
    }
}
