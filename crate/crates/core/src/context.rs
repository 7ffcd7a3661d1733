use std::collections::BTreeMap;
use std::fmt;

use crate::formula::Formula;
use crate::term::Name;

/// Typing hypotheses: a finite map from variables to formulas.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Context {
    bindings: BTreeMap<Name, Formula>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, x: &str) -> Option<&Formula> {
        self.bindings.get(x)
    }

    /// Adds or replaces the binding for `x`.
    pub fn insert(&mut self, x: impl Into<Name>, f: Formula) {
        self.bindings.insert(x.into(), f);
    }

    pub fn remove(&mut self, x: &str) -> Option<Formula> {
        self.bindings.remove(x)
    }

    pub fn with(mut self, x: impl Into<Name>, f: Formula) -> Self {
        self.insert(x, f);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.bindings.contains_key(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Formula)> {
        self.bindings.iter()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.bindings.values()
    }

    /// Union; bindings from `other` win on clashes.
    pub fn union(&self, other: &Context) -> Context {
        let mut out = self.clone();
        for (x, f) in other.iter() {
            out.insert(x.clone(), f.clone());
        }
        out
    }
}

impl FromIterator<(Name, Formula)> for Context {
    fn from_iter<I: IntoIterator<Item = (Name, Formula)>>(iter: I) -> Self {
        Context {
            bindings: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (x, a) in &self.bindings {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{x}:{a}")?;
        }
        Ok(())
    }
}
