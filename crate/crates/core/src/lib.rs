//! Proof terms, normalization, continuation-passing translations and a
//! decision procedure for intuitionistic belief logic.

pub mod analysis;
pub mod context;
pub mod corpus;
pub mod cps;
pub mod decide;
pub mod degree;
pub mod enumerate;
pub mod formula;
pub mod hilbert;
pub mod meta;
pub mod oracle;
pub mod postpone;
pub mod rewrite;
pub mod selftest;
pub mod stt;
pub mod syntax;
pub mod term;
pub mod typing;

pub use context::Context;
pub use formula::Formula;
pub use syntax::{parse_formula, parse_term, parse_term_in, ParseError};
pub use term::{alpha_eq, Name, Path, Side, Term};
pub use typing::{check, infer, TypeError};
