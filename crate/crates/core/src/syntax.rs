//! Concrete syntax: lexer, parsers and printers for formulas and terms.
//!
//! Formulas, loosest to tightest: `A -> B` (right associative), `A \/ B`,
//! `A /\ B` (both right associative), `[] A`, atoms, `bot`, `top`.
//!
//! Terms: `x`, `\x:A. t`, juxtaposition, `<t, s>`, `p1 t`, `p2 t`,
//! `i1[A] t`, `i2[A] t`, `case t of {x => t1 | y => t2}`, `efq[A] t`,
//! `unit t` and `bel x1=t1, ..., xn=tn in s`. Belief binders may carry an
//! annotation (`bel u:A = t in s`); when it is missing it is recovered from
//! the type `[] A` of the argument.

use std::fmt;

use thiserror::Error;

use crate::context::Context;
use crate::formula::Formula;
use crate::term::{Name, Side, Term};
use crate::typing::infer;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownOperator,
    Annotation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Colon,
    Dot,
    LParen,
    RParen,
    Lt,
    Gt,
    Comma,
    LBrack,
    RBrack,
    BoxOp,
    LBrace,
    RBrace,
    Bar,
    FatArrow,
    Eq,
    Arrow,
    And,
    Or,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "`{x}`"),
            Tok::Lambda => "`\\`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Comma => "`,`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::BoxOp => "`[]`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Bar => "`|`",
            Tok::FatArrow => "`=>`",
            Tok::Eq => "`=`",
            Tok::Arrow => "`->`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

const KEYWORDS: &[&str] = &[
    "bot", "top", "bel", "in", "case", "of", "efq", "unit", "p1", "p2", "i1", "i2",
];

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                column += 1;
                i += 1;
                continue;
            }
            '\\' if next == Some('/') => (Tok::Or, 2),
            '\\' => (Tok::Lambda, 1),
            '/' if next == Some('\\') => (Tok::And, 2),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '=' if next == Some('>') => (Tok::FatArrow, 2),
            '[' if next == Some(']') => (Tok::BoxOp, 2),
            '=' => (Tok::Eq, 1),
            ':' => (Tok::Colon, 1),
            '.' => (Tok::Dot, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '<' => (Tok::Lt, 1),
            '>' => (Tok::Gt, 1),
            ',' => (Tok::Comma, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '|' => (Tok::Bar, 1),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                (Tok::Ident(word), j - start)
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownOperator,
                    line,
                    column,
                    message: format!("unknown operator `{other}`"),
                })
            }
        };
        out.push((tok, pos));
        i += width;
        column += width;
    }
    out.push((Tok::End, Pos { line, column }));
    Ok(out)
}

/// Term syntax before belief-binder annotations are resolved.
enum Raw {
    Var(Name),
    Lam(Name, Formula, Box<Raw>),
    App(Box<Raw>, Box<Raw>),
    Pair(Box<Raw>, Box<Raw>),
    Proj(Side, Box<Raw>),
    Inj(Side, Formula, Box<Raw>),
    Case(Box<Raw>, Name, Box<Raw>, Name, Box<Raw>),
    Efq(Formula, Box<Raw>),
    Unit(Box<Raw>),
    Bel(Vec<(Name, Option<Formula>, Pos)>, Vec<Raw>, Box<Raw>),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        let Pos { line, column } = self.pos();
        ParseError {
            kind: ParseErrorKind::Syntax,
            line,
            column,
            message,
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek() {
            Tok::Ident(w) if valid_name(w) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    // formulas

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            Ok(Formula::implies(lhs, self.formula()?))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.conj()?;
        if self.eat(&Tok::Or) {
            Ok(Formula::or(lhs, self.disj()?))
        } else {
            Ok(lhs)
        }
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::And) {
            Ok(Formula::and(lhs, self.conj()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::BoxOp => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(w) if w == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(w) if w == "top" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(w) if valid_name(&w) => {
                self.bump();
                Ok(Formula::atom(&w))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    // terms

    fn term(&mut self) -> Result<Raw, ParseError> {
        if self.eat(&Tok::Lambda) {
            let x = self.name()?;
            self.expect(Tok::Colon)?;
            let ann = self.formula()?;
            self.expect(Tok::Dot)?;
            let body = self.term()?;
            return Ok(Raw::Lam(x, ann, Box::new(body)));
        }
        if self.is_keyword("bel") {
            self.bump();
            let mut binders = Vec::new();
            let mut args = Vec::new();
            if !self.is_keyword("in") {
                loop {
                    let pos = self.pos();
                    let x = self.name()?;
                    if binders.iter().any(|(y, _, _)| *y == x) {
                        return Err(self.error(format!("duplicate belief binder `{x}`")));
                    }
                    let ann = if self.eat(&Tok::Colon) {
                        Some(self.formula()?)
                    } else {
                        None
                    };
                    self.expect(Tok::Eq)?;
                    args.push(self.term()?);
                    binders.push((x, ann, pos));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect_keyword("in")?;
            let body = self.term()?;
            return Ok(Raw::Bel(binders, args, Box::new(body)));
        }
        self.application()
    }

    fn application(&mut self) -> Result<Raw, ParseError> {
        let mut head = self.head()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            head = Raw::App(Box::new(head), Box::new(arg));
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Lt | Tok::LParen => true,
            Tok::Ident(w) => w == "case" || valid_name(w),
            _ => false,
        }
    }

    fn bracketed_formula(&mut self) -> Result<Formula, ParseError> {
        self.expect(Tok::LBrack)?;
        let f = self.formula()?;
        self.expect(Tok::RBrack)?;
        Ok(f)
    }

    fn head(&mut self) -> Result<Raw, ParseError> {
        let Tok::Ident(w) = self.peek().clone() else {
            return self.atom();
        };
        match w.as_str() {
            "p1" | "p2" => {
                self.bump();
                let side = if w == "p1" { Side::Left } else { Side::Right };
                Ok(Raw::Proj(side, Box::new(self.atom()?)))
            }
            "i1" | "i2" => {
                self.bump();
                let side = if w == "i1" { Side::Left } else { Side::Right };
                let ann = self.bracketed_formula()?;
                Ok(Raw::Inj(side, ann, Box::new(self.atom()?)))
            }
            "efq" => {
                self.bump();
                let ann = self.bracketed_formula()?;
                Ok(Raw::Efq(ann, Box::new(self.atom()?)))
            }
            "unit" => {
                self.bump();
                Ok(Raw::Unit(Box::new(self.atom()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Raw, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Lt => {
                self.bump();
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::Gt)?;
                Ok(Raw::Pair(Box::new(a), Box::new(b)))
            }
            Tok::Ident(w) if w == "case" => {
                self.bump();
                let scrut = self.term()?;
                self.expect_keyword("of")?;
                self.expect(Tok::LBrace)?;
                let x = self.name()?;
                self.expect(Tok::FatArrow)?;
                let left = self.term()?;
                self.expect(Tok::Bar)?;
                let y = self.name()?;
                self.expect(Tok::FatArrow)?;
                let right = self.term()?;
                self.expect(Tok::RBrace)?;
                Ok(Raw::Case(Box::new(scrut), x, Box::new(left), y, Box::new(right)))
            }
            Tok::Ident(w) if valid_name(&w) => {
                self.bump();
                Ok(Raw::Var(w))
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

fn valid_name(w: &str) -> bool {
    w.starts_with(|c: char| c.is_ascii_lowercase()) && !KEYWORDS.contains(&w)
}

fn elaborate(ctx: &Context, raw: Raw) -> Result<Term, ParseError> {
    Ok(match raw {
        Raw::Var(x) => Term::Var(x),
        Raw::Lam(x, ann, body) => {
            let inner = ctx.clone().with(x.clone(), ann.clone());
            Term::Lam(x, ann, Box::new(elaborate(&inner, *body)?))
        }
        Raw::App(f, a) => Term::App(Box::new(elaborate(ctx, *f)?), Box::new(elaborate(ctx, *a)?)),
        Raw::Pair(a, b) => Term::Pair(Box::new(elaborate(ctx, *a)?), Box::new(elaborate(ctx, *b)?)),
        Raw::Proj(i, a) => Term::Proj(i, Box::new(elaborate(ctx, *a)?)),
        Raw::Inj(i, ann, a) => Term::Inj(i, ann, Box::new(elaborate(ctx, *a)?)),
        Raw::Efq(ann, a) => Term::Efq(ann, Box::new(elaborate(ctx, *a)?)),
        Raw::Unit(a) => Term::Unit(Box::new(elaborate(ctx, *a)?)),
        Raw::Case(scrut, x, l, y, r) => {
            let scrut = elaborate(ctx, *scrut)?;
            let (mut lctx, mut rctx) = (ctx.clone(), ctx.clone());
            lctx.remove(&x);
            rctx.remove(&y);
            if let Ok(Formula::Disj(a, b)) = infer(ctx, &scrut) {
                lctx.insert(x.clone(), (*a).clone());
                rctx.insert(y.clone(), (*b).clone());
            }
            Term::Case {
                scrut: Box::new(scrut),
                left_var: x,
                left: Box::new(elaborate(&lctx, *l)?),
                right_var: y,
                right: Box::new(elaborate(&rctx, *r)?),
            }
        }
        Raw::Bel(binders, args, body) => {
            let args: Vec<Term> = args.into_iter().map(|a| elaborate(ctx, a)).collect::<Result<_, _>>()?;
            let mut resolved = Vec::with_capacity(binders.len());
            for ((x, ann, pos), arg) in binders.into_iter().zip(&args) {
                let ann = match ann {
                    Some(a) => a,
                    None => match infer(ctx, arg) {
                        Ok(Formula::Box(a)) => (*a).clone(),
                        Ok(other) => {
                            return Err(annotation_error(
                                pos,
                                format!("argument for `{x}` has type {other}, not a belief"),
                            ))
                        }
                        Err(e) => {
                            return Err(annotation_error(
                                pos,
                                format!("cannot infer the annotation of `{x}` ({e}); write `{x}:A = ...`"),
                            ))
                        }
                    },
                };
                resolved.push((x, ann));
            }
            let mut inner = ctx.clone();
            for (x, a) in &resolved {
                inner.insert(x.clone(), a.clone());
            }
            Term::BoxIntro {
                binders: resolved,
                args,
                body: Box::new(elaborate(&inner, *body)?),
            }
        }
    })
}

fn annotation_error(pos: Pos, message: String) -> ParseError {
    ParseError {
        kind: ParseErrorKind::Annotation,
        line: pos.line,
        column: pos.column,
        message,
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_term_in(&Context::new(), text)
}

/// Parses a term whose free variables may be typed by `ctx`; the types are
/// used to resolve unannotated belief binders.
pub fn parse_term_in(ctx: &Context, text: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let raw = p.term()?;
    p.finish()?;
    elaborate(ctx, raw)
}

/// Parses a hypothesis of the form `x : A`.
pub fn parse_hypothesis(text: &str) -> Result<(Name, Formula), ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let x = p.name()?;
    p.expect(Tok::Colon)?;
    let f = p.formula()?;
    p.finish()?;
    Ok((x, f))
}

pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

// Term printing levels: 0 = binder forms extending to the right,
// 1 = application spine, 2 = atomic.
fn term_level(t: &Term) -> u8 {
    match t {
        Term::Lam(..) | Term::BoxIntro { .. } => 0,
        Term::App(..) | Term::Proj(..) | Term::Inj(..) | Term::Efq(..) | Term::Unit(_) => 1,
        Term::Var(_) | Term::Pair(..) | Term::Case { .. } => 2,
    }
}

fn write_term(t: &Term, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if term_level(t) < min {
        out.write_str("(")?;
        write_term(t, 0, out)?;
        return out.write_str(")");
    }
    match t {
        Term::Var(x) => out.write_str(x),
        Term::Lam(x, ann, body) => {
            write!(out, "\\{x}:{ann}. ")?;
            write_term(body, 0, out)
        }
        Term::App(f, a) => {
            write_term(f, 1, out)?;
            out.write_str(" ")?;
            write_term(a, 2, out)
        }
        Term::Pair(a, b) => {
            out.write_str("<")?;
            write_term(a, 0, out)?;
            out.write_str(", ")?;
            write_term(b, 0, out)?;
            out.write_str(">")
        }
        Term::Proj(side, a) => {
            write!(out, "p{} ", side.index())?;
            write_term(a, 2, out)
        }
        Term::Inj(side, ann, a) => {
            write!(out, "i{}[{ann}] ", side.index())?;
            write_term(a, 2, out)
        }
        Term::Efq(ann, a) => {
            write!(out, "efq[{ann}] ")?;
            write_term(a, 2, out)
        }
        Term::Unit(a) => {
            out.write_str("unit ")?;
            write_term(a, 2, out)
        }
        Term::Case {
            scrut,
            left_var,
            left,
            right_var,
            right,
        } => {
            out.write_str("case ")?;
            write_term(scrut, 0, out)?;
            write!(out, " of {{{left_var} => ")?;
            write_term(left, 0, out)?;
            write!(out, " | {right_var} => ")?;
            write_term(right, 0, out)?;
            out.write_str("}")
        }
        Term::BoxIntro { binders, args, body } => {
            out.write_str("bel ")?;
            for (i, ((x, ann), arg)) in binders.iter().zip(args).enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write!(out, "{x}:{ann} = ")?;
                write_term(arg, 0, out)?;
            }
            if !binders.is_empty() {
                out.write_str(" ")?;
            }
            out.write_str("in ")?;
            write_term(body, 0, out)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q1() -> Formula {
        Formula::atom("q1")
    }

    #[test]
    fn formula_examples() {
        assert_eq!(
            parse_formula("p -> [] p").unwrap(),
            Formula::implies(p(), Formula::boxed(p()))
        );
        assert_eq!(
            parse_formula("[] (p \\/ q1)").unwrap(),
            Formula::boxed(Formula::or(p(), q1()))
        );
        assert_eq!(
            parse_formula("p -> q1 -> p").unwrap(),
            Formula::implies(p(), Formula::implies(q1(), p()))
        );
        assert_eq!(
            parse_formula("[] p /\\ q1 \\/ bot").unwrap(),
            Formula::or(Formula::and(Formula::boxed(p()), q1()), Formula::Bot)
        );
    }

    #[test]
    fn formula_errors_carry_positions() {
        let err = parse_formula("p ->\n  & q").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert_eq!(err.kind, ParseErrorKind::UnknownOperator);
        let err = parse_formula("p -> ").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!((err.line, err.column), (1, 6));
        assert!(parse_formula("P").is_err());
        assert!(parse_formula("(p").is_err());
        assert!(parse_formula("p q").is_err());
    }

    #[test]
    fn term_examples() {
        assert_eq!(
            parse_term("\\x:p. bel in x").unwrap(),
            lam("x", p(), bel(vec![], vec![], var("x")))
        );
        let ctx = Context::new().with("t", Formula::boxed(p()));
        assert_eq!(
            parse_term_in(&ctx, "bel u=t in u").unwrap(),
            bel(vec![("u", p())], vec![var("t")], var("u"))
        );
        assert_eq!(
            parse_term("case s of {x => i1[p \\/ q1] x | y => i2[p \\/ q1] y}").unwrap(),
            case(
                var("s"),
                "x",
                inj(Side::Left, Formula::or(p(), q1()), var("x")),
                "y",
                inj(Side::Right, Formula::or(p(), q1()), var("y")),
            )
        );
        assert_eq!(parse_term("f a b").unwrap(), app(app(var("f"), var("a")), var("b")));
        assert_eq!(parse_term("p1 x y").unwrap(), app(proj(Side::Left, var("x")), var("y")));
    }

    #[test]
    fn annotation_resolution_uses_enclosing_binders() {
        let t = parse_term("\\a:[] p. bel u = a in <u, u>").unwrap();
        assert_eq!(
            t,
            lam(
                "a",
                Formula::boxed(p()),
                bel(vec![("u", p())], vec![var("a")], pair(var("u"), var("u")))
            )
        );
        let err = parse_term("bel u = a in u").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Annotation);
        assert_eq!((err.line, err.column), (1, 5));
    }

    #[test]
    fn printing_examples() {
        let t = Formula::implies(p(), Formula::boxed(p()));
        assert_eq!(print_formula(&t), "p -> [] p");
        assert_eq!(print_term(&bel(vec![], vec![], var("x"))), "bel in x");
        assert_eq!(print_term(&proj(Side::Left, pair(var("x"), var("y")))), "p1 <x, y>");
        let t = app(lam("x", p(), var("x")), app(var("f"), var("y")));
        assert_eq!(print_term(&t), "(\\x:p. x) (f y)");
        let t = bel(vec![("u", p())], vec![var("t")], var("u"));
        assert_eq!(print_term(&t), "bel u:p = t in u");
    }

    #[test]
    fn printed_terms_reparse() {
        let srcs = [
            "\\f:[] (p -> r). \\a:[] p. bel g:p -> r = f, u:p = a in g u",
            "case s of {x => p1 x | y => efq[p] (y z)}",
            "unit (\\x:top. x)",
            "(\\x:p. bel in x) y",
            "p2 (case z of {x => u | y => v})",
        ];
        for s in srcs {
            let t = parse_term(s).unwrap();
            let again = parse_term(&print_term(&t)).unwrap();
            assert_eq!(t, again, "{s}");
        }
    }
}
