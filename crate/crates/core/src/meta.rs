//! Exhaustive checks of the admissible-rule corollaries.
//!
//! Two ranges are supported. `Scope::Instances` walks every enumerated
//! formula of the relevant shape (`A ∨ B`, `□A`, `□A ∨ □B`, `□(A ∨ B)`), so
//! `max_size` bounds the formula being decided. `Scope::Components` lets `A`
//! and `B` range independently over the enumeration, so `max_size` bounds
//! each of them; pairs where the conclusion already holds are skipped
//! without deciding the premise.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::decide::decide;
use crate::enumerate::FormulaEnumeration;
use crate::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Disjunction,
    WeakDisjunction,
    BoxPrimality,
    Reflection,
    Consistency,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::Disjunction,
        Property::WeakDisjunction,
        Property::BoxPrimality,
        Property::Reflection,
        Property::Consistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Disjunction => "disjunction",
            Property::WeakDisjunction => "weak-disjunction",
            Property::BoxPrimality => "box-primality",
            Property::Reflection => "reflection",
            Property::Consistency => "consistency",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    #[default]
    Instances,
    Components,
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "instances" => Ok(Scope::Instances),
            "components" => Ok(Scope::Components),
            _ => Err(format!("unknown scope {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetaReport {
    pub property: Property,
    pub atoms: Vec<String>,
    pub max_size: usize,
    pub scope: Scope,
    pub checked: usize,
    /// The provable formula whose conclusion failed.
    pub counterexamples: Vec<String>,
}

impl MetaReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Default)]
struct Cache(HashMap<Formula, bool>);

impl Cache {
    fn provable(&mut self, f: &Formula) -> bool {
        if let Some(&b) = self.0.get(f) {
            return b;
        }
        let b = decide(&[], f);
        self.0.insert(f.clone(), b);
        b
    }
}

/// The premise to decide and the candidates, one of which must be provable.
fn obligation(property: Property, a: &Formula, b: &Formula) -> (Formula, [Formula; 2]) {
    let bx = |f: &Formula| Formula::boxed(f.clone());
    match property {
        Property::Disjunction => (Formula::or(a.clone(), b.clone()), [a.clone(), b.clone()]),
        Property::BoxPrimality => (Formula::or(bx(a), bx(b)), [a.clone(), b.clone()]),
        Property::WeakDisjunction => (bx(&Formula::or(a.clone(), b.clone())), [bx(a), bx(b)]),
        Property::Reflection => (bx(a), [a.clone(), a.clone()]),
        Property::Consistency => unreachable!(),
    }
}

/// Splits an enumerated formula into the components of `property`'s premise.
fn components(property: Property, f: &Formula) -> Option<(Formula, Formula)> {
    match (property, f) {
        (Property::Disjunction, Formula::Disj(a, b)) => Some(((**a).clone(), (**b).clone())),
        (Property::Reflection, Formula::Box(a)) => Some(((**a).clone(), (**a).clone())),
        (Property::BoxPrimality, Formula::Disj(a, b)) => match (&**a, &**b) {
            (Formula::Box(a), Formula::Box(b)) => Some(((**a).clone(), (**b).clone())),
            _ => None,
        },
        (Property::WeakDisjunction, Formula::Box(d)) => match &**d {
            Formula::Disj(a, b) => Some(((**a).clone(), (**b).clone())),
            _ => None,
        },
        _ => None,
    }
}

pub fn check_metatheory(property: Property, atoms: &[&str], max_size: usize) -> MetaReport {
    check_metatheory_in(property, atoms, max_size, Scope::Instances)
}

pub fn check_metatheory_in(property: Property, atoms: &[&str], max_size: usize, scope: Scope) -> MetaReport {
    let mut report = MetaReport {
        property,
        atoms: atoms.iter().map(|a| a.to_string()).collect(),
        max_size,
        scope,
        checked: 0,
        counterexamples: Vec::new(),
    };
    if property == Property::Consistency {
        report.checked = 1;
        if decide(&[], &Formula::Bot) {
            report.counterexamples.push(Formula::Bot.to_string());
        }
        return report;
    }
    let mut cache = Cache::default();
    let mut test = |a: &Formula, b: &Formula, report: &mut MetaReport| {
        report.checked += 1;
        let (premise, [c1, c2]) = obligation(property, a, b);
        if !cache.provable(&c1) && !cache.provable(&c2) && cache.provable(&premise) {
            report.counterexamples.push(premise.to_string());
        }
    };
    let enumeration = FormulaEnumeration::new(atoms, max_size);
    match scope {
        Scope::Instances => {
            for f in enumeration.iter() {
                if let Some((a, b)) = components(property, &f) {
                    test(&a, &b, &mut report);
                }
            }
        }
        Scope::Components => {
            let all: Vec<Formula> = enumeration.iter().collect();
            if property == Property::Reflection {
                for a in &all {
                    test(a, a, &mut report);
                }
            } else {
                for a in &all {
                    for b in &all {
                        test(a, b, &mut report);
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spaces_have_no_counterexamples() {
        let r = check_metatheory(Property::Reflection, &["p"], 2);
        assert!(r.holds());
        assert!(r.checked > 0);
        let r = check_metatheory(Property::Disjunction, &["p", "r"], 2);
        assert!(r.holds());
        assert_eq!(r.checked, 16 + 2 * 4 * 52);
    }

    #[test]
    fn components_scope() {
        let r = check_metatheory_in(Property::Reflection, &["p"], 2, Scope::Components);
        assert!(r.holds());
        assert_eq!(r.checked, 3 + 30 + 570);
        let r = check_metatheory_in(Property::WeakDisjunction, &["p"], 1, Scope::Components);
        assert!(r.holds());
        assert_eq!(r.checked, 33 * 33);
    }

    #[test]
    fn consistency() {
        let r = check_metatheory(Property::Consistency, &[], 0);
        assert_eq!(r.checked, 1);
        assert!(r.holds());
    }

    #[test]
    fn instance_shapes() {
        let r = check_metatheory(Property::BoxPrimality, &["p", "r"], 3);
        assert_eq!(r.checked, 16);
        let r = check_metatheory(Property::WeakDisjunction, &["p", "r"], 2);
        assert_eq!(r.checked, 16);
    }

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>(), Ok(p));
        }
    }
}
