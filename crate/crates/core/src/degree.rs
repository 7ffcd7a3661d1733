//! The permutation degree: two norms `|t|` (bar) and `#t` (hash) on terms
//! without ex falso or `unit`. Every permutation step keeps `#` fixed and
//! makes `|·|` strictly smaller. Values grow multiplicatively with box
//! nesting, so they are arbitrary-precision integers.

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::term::{Path, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the permutation degree is undefined on {node} (at {path:?})")]
pub struct DegreeError {
    pub node: &'static str,
    pub path: Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub bar: BigUint,
    pub hash: BigUint,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeReportJson {
    pub bar: String,
    pub hash: String,
}

impl DegreeReport {
    pub fn json(&self) -> DegreeReportJson {
        DegreeReportJson {
            bar: self.bar.to_string(),
            hash: self.hash.to_string(),
        }
    }
}

/// Both norms in one pass.
pub fn degree(t: &Term) -> Result<DegreeReport, DegreeError> {
    let (bar, hash) = norms(t, &mut Vec::new())?;
    Ok(DegreeReport { bar, hash })
}

pub fn bar_norm(t: &Term) -> Result<BigUint, DegreeError> {
    degree(t).map(|d| d.bar)
}

pub fn hash_norm(t: &Term) -> Result<BigUint, DegreeError> {
    degree(t).map(|d| d.hash)
}

fn at(i: usize, t: &Term, path: &mut Path) -> Result<(BigUint, BigUint), DegreeError> {
    path.push(i);
    let r = norms(t, path);
    path.pop();
    r
}

fn norms(t: &Term, path: &mut Path) -> Result<(BigUint, BigUint), DegreeError> {
    let one = || BigUint::from(1u32);
    Ok(match t {
        Term::Var(_) => (one(), one()),
        Term::Lam(_, _, body) => (at(0, body, path)?.0, one()),
        Term::App(f, a) => {
            let (fb, fh) = at(0, f, path)?;
            let (ab, _) = at(1, a, path)?;
            (fb + &fh * ab, fh)
        }
        Term::Pair(a, b) => {
            let (ab, _) = at(0, a, path)?;
            let (bb, _) = at(1, b, path)?;
            (ab + bb, one())
        }
        Term::Proj(_, a) => {
            let (ab, ah) = at(0, a, path)?;
            (ab + &ah, ah)
        }
        Term::Inj(_, _, a) => (at(0, a, path)?.0, one()),
        Term::Case { scrut, left, right, .. } => {
            let (sb, sh) = at(0, scrut, path)?;
            let (lb, lh) = at(1, left, path)?;
            let (rb, rh) = at(2, right, path)?;
            (sb + &sh * (lb + rb), BigUint::from(2u32) * sh * (lh + rh))
        }
        Term::BoxIntro { args, body, .. } => {
            let mut bar_prod = one();
            let mut hash_prod = one();
            for (i, a) in args.iter().enumerate() {
                let (ab, ah) = at(i, a, path)?;
                bar_prod *= ab;
                hash_prod *= ah;
            }
            let (bb, bh) = at(args.len(), body, path)?;
            (bb * bar_prod + &hash_prod, bh * hash_prod)
        }
        Term::Efq(..) => {
            return Err(DegreeError {
                node: "ex falso",
                path: path.clone(),
            })
        }
        Term::Unit(_) => {
            return Err(DegreeError {
                node: "unit",
                path: path.clone(),
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::term::*;

    fn n(v: u32) -> BigUint {
        BigUint::from(v)
    }

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn bar_examples() {
        assert_eq!(bar_norm(&var("x")).unwrap(), n(1));
        assert_eq!(bar_norm(&app(var("x"), var("y"))).unwrap(), n(2));
        let c = case(var("z"), "x", var("u"), "y", var("v"));
        assert_eq!(bar_norm(&proj(Side::Left, c)).unwrap(), n(7));
    }

    #[test]
    fn hash_examples() {
        assert_eq!(hash_norm(&pair(var("t"), var("s"))).unwrap(), n(1));
        let c = case(var("z"), "x", var("u"), "y", var("v"));
        assert_eq!(hash_norm(&c).unwrap(), n(4));
        let b = bel(vec![("u", p())], vec![var("a")], var("u"));
        assert_eq!(hash_norm(&b).unwrap(), n(1));
    }

    #[test]
    fn empty_box_uses_empty_products() {
        let b = bel(vec![], vec![], var("x"));
        assert_eq!(degree(&b).unwrap(), DegreeReport { bar: n(2), hash: n(1) });
    }

    #[test]
    fn box_permutation_example() {
        let c = case(var("t"), "x", var("s1"), "y", var("s2"));
        let before = bel(vec![("z", p())], vec![c], var("s"));
        let after = case(
            var("t"),
            "x",
            bel(vec![("z", p())], vec![var("s1")], var("s")),
            "y",
            bel(vec![("z", p())], vec![var("s2")], var("s")),
        );
        let (db, da) = (degree(&before).unwrap(), degree(&after).unwrap());
        assert_eq!(db.hash, da.hash);
        assert!(db.bar > da.bar);
    }

    #[test]
    fn ex_falso_and_unit_are_rejected() {
        let t = app(var("f"), efq(p(), var("z")));
        assert_eq!(
            degree(&t),
            Err(DegreeError {
                node: "ex falso",
                path: vec![1]
            })
        );
        assert!(degree(&unit(var("x"))).is_err());
    }
}
