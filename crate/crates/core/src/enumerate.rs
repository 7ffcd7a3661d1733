//! Exhaustive formula enumeration by connective count.
//!
//! Layer `n` holds the formulas with exactly `n` connectives. Layer 0 is the
//! atoms followed by `⊥` and `⊤`; layer `n` lists `□` over layer `n-1`, then
//! `→`, `∧`, `∨` over every split `i + j = n - 1`. The order is fixed, so runs
//! are reproducible. Only the lower layers are kept in memory; the last one
//! is streamed.

use crate::formula::Formula;

/// Formulas with exactly `n` connectives over `k` atoms (plus `⊥`, `⊤`).
pub fn count_formulas(atoms: usize, n: usize) -> u128 {
    let mut layers: Vec<u128> = vec![atoms as u128 + 2];
    for m in 1..=n {
        let mut c = layers[m - 1];
        for i in 0..m {
            c += 3 * layers[i] * layers[m - 1 - i];
        }
        layers.push(c);
    }
    layers[n]
}

fn layer(lower: &[Vec<Formula>], n: usize) -> impl Iterator<Item = Formula> + '_ {
    let boxes = lower[n - 1].iter().map(|a| Formula::boxed(a.clone()));
    let ctors: [fn(Formula, Formula) -> Formula; 3] = [Formula::implies, Formula::and, Formula::or];
    let binaries = ctors.into_iter().flat_map(move |ctor| {
        (0..n).flat_map(move |i| {
            lower[i]
                .iter()
                .flat_map(move |a| lower[n - 1 - i].iter().map(move |b| ctor(a.clone(), b.clone())))
        })
    });
    boxes.chain(binaries)
}

/// All formulas over `atoms` with at most `max` connectives, smallest first.
pub struct FormulaEnumeration {
    lower: Vec<Vec<Formula>>,
    max: usize,
}

impl FormulaEnumeration {
    pub fn new(atoms: &[&str], max: usize) -> FormulaEnumeration {
        let mut base: Vec<Formula> = atoms.iter().map(|a| Formula::atom(a)).collect();
        base.push(Formula::Bot);
        base.push(Formula::Top);
        let mut lower = vec![base];
        for n in 1..max {
            let next: Vec<Formula> = layer(&lower, n).collect();
            lower.push(next);
        }
        FormulaEnumeration { lower, max }
    }

    pub fn iter(&self) -> impl Iterator<Item = Formula> + '_ {
        let kept = self.lower.iter().take(self.max + 1).flatten().cloned();
        let top = (self.max > 0)
            .then(|| layer(&self.lower, self.max))
            .into_iter()
            .flatten();
        kept.chain(top)
    }
}

/// Convenience wrapper collecting the whole enumeration.
pub fn enumerate_formulas(atoms: &[&str], max: usize) -> Vec<Formula> {
    FormulaEnumeration::new(atoms, max).iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_closed_form() {
        let expected = [4u128, 52, 1300, 40612, 1420900];
        for (n, e) in expected.iter().enumerate() {
            assert_eq!(count_formulas(2, n), *e);
        }
    }

    #[test]
    fn enumeration_is_complete_and_distinct() {
        let all = enumerate_formulas(&["p", "r"], 3);
        assert_eq!(all.len() as u128, (0..=3).map(|n| count_formulas(2, n)).sum::<u128>());
        let set: HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|f| f.connectives() <= 3));
    }

    #[test]
    fn order_is_stable() {
        let a = enumerate_formulas(&["p"], 2);
        let b = enumerate_formulas(&["p"], 2);
        assert_eq!(a, b);
        assert_eq!(a[0], Formula::atom("p"));
        assert_eq!(a[1], Formula::Bot);
        assert_eq!(a[2], Formula::Top);
        assert_eq!(a[3], Formula::boxed(Formula::atom("p")));
    }

    #[test]
    fn zero_connectives() {
        assert_eq!(enumerate_formulas(&["p", "r"], 0).len(), 4);
    }
}
