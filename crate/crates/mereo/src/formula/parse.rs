//! Recursive-descent parser for the surface syntax.
//!
//! ```text
//! formula := "E" ident "." formula | "A" ident "." formula | iff
//! iff     := imp ("<->" imp)*        (right-associative)
//! imp     := disj ("->" disj)*       (right-associative)
//! disj    := conj ("|" conj)*        (left-associative)
//! conj    := neg ("&" neg)*          (left-associative)
//! neg     := "!" neg | atomf
//! atomf   := "sub(" term "," term ")" | "eq(" term "," term ")"
//!          | "card(" term ")" ("=" | ">=") nat | "atom(" term ")"
//!          | "(" formula ")"
//! term    := factor ("+" factor)*
//! factor  := base (("*" | "-") base)*
//! base    := ident | "0" | "(" term ")"
//! ```
//!
//! `atom(t)` is sugar for `card(t) = 1`.

use std::fmt;

use thiserror::Error;

use super::{Formula, Term};

/// Words with grammatical meaning; rejected as variable names.
pub const RESERVED: &[&str] = &["E", "A", "sub", "eq", "card", "atom"];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: expected {}, found {found}", expected_list(.expected))]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
}

fn expected_list(expected: &[String]) -> String {
    match expected.len() {
        0 => "nothing".to_string(),
        1 => expected[0].clone(),
        _ => {
            let head = expected[..expected.len() - 1].join(", ");
            format!("{head} or {}", expected[expected.len() - 1])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    EqSym,
    GeqSym,
    Plus,
    Star,
    Minus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Nat(n) => write!(f, "number '{n}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Bang => write!(f, "'!'"),
            Tok::Amp => write!(f, "'&'"),
            Tok::Pipe => write!(f, "'|'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::DArrow => write!(f, "'<->'"),
            Tok::EqSym => write!(f, "'='"),
            Tok::GeqSym => write!(f, "'>='"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($tok:expr, $l:expr, $c:expr) => {
            toks.push(Spanned { tok: $tok, line: $l, col: $c })
        };
    }

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '(' => { chars.next(); col += 1; push!(Tok::LParen, tl, tc); }
            ')' => { chars.next(); col += 1; push!(Tok::RParen, tl, tc); }
            ',' => { chars.next(); col += 1; push!(Tok::Comma, tl, tc); }
            '.' => { chars.next(); col += 1; push!(Tok::Dot, tl, tc); }
            '!' => { chars.next(); col += 1; push!(Tok::Bang, tl, tc); }
            '&' => { chars.next(); col += 1; push!(Tok::Amp, tl, tc); }
            '|' => { chars.next(); col += 1; push!(Tok::Pipe, tl, tc); }
            '+' => { chars.next(); col += 1; push!(Tok::Plus, tl, tc); }
            '*' => { chars.next(); col += 1; push!(Tok::Star, tl, tc); }
            '=' => { chars.next(); col += 1; push!(Tok::EqSym, tl, tc); }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    push!(Tok::Arrow, tl, tc);
                } else {
                    push!(Tok::Minus, tl, tc);
                }
            }
            '>' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::GeqSym, tl, tc);
                } else {
                    return Err(ParseError {
                        line: tl,
                        col: tc,
                        expected: vec!["'>='".to_string()],
                        found: "'>'".to_string(),
                    });
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    chars.next();
                    col += 1;
                    if chars.peek() == Some(&'>') {
                        chars.next();
                        col += 1;
                        push!(Tok::DArrow, tl, tc);
                        continue;
                    }
                }
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    expected: vec!["'<->'".to_string()],
                    found: "'<'".to_string(),
                });
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let n: u64 = digits.parse().map_err(|_| ParseError {
                    line: tl,
                    col: tc,
                    expected: vec!["a cardinality constant that fits in 64 bits".to_string()],
                    found: format!("'{digits}'"),
                })?;
                push!(Tok::Nat(n), tl, tc);
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(name), tl, tc);
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    expected: vec!["a token".to_string()],
                    found: format!("'{other}'"),
                });
            }
        }
    }
    push!(Tok::Eof, line, col);
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let here = self.peek();
        ParseError {
            line: here.line,
            col: here.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[expected]))
        }
    }

    fn expect_var(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(name) if !RESERVED.contains(&name.as_str()) => {
                let name = name.clone();
                self.bump();
                Ok(name)
            }
            Tok::Ident(_) => Err(self.error(&["a variable name (not a reserved word)"])),
            _ => Err(self.error(&["a variable name"])),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Ident(name) = &self.peek().tok {
            if name == "E" || name == "A" {
                let quant = name.clone();
                self.bump();
                let var = self.expect_var()?;
                self.expect(Tok::Dot, "'.'")?;
                let body = self.formula()?;
                return Ok(if quant == "E" {
                    Formula::exists(var, body)
                } else {
                    Formula::forall(var, body)
                });
            }
        }
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.imp()?];
        while self.peek().tok == Tok::DArrow {
            self.bump();
            parts.push(self.imp()?);
        }
        Ok(fold_right(parts, Formula::iff))
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.disj()?];
        while self.peek().tok == Tok::Arrow {
            self.bump();
            parts.push(self.disj()?);
        }
        Ok(fold_right(parts, Formula::implies))
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        while self.peek().tok == Tok::Pipe {
            self.bump();
            acc = Formula::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.neg()?;
        while self.peek().tok == Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.neg()?);
        }
        Ok(acc)
    }

    fn neg(&mut self) -> Result<Formula, ParseError> {
        if self.peek().tok == Tok::Bang {
            self.bump();
            Ok(Formula::not(self.neg()?))
        } else {
            self.atomf()
        }
    }

    fn atomf(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => match name.as_str() {
                "sub" | "eq" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let s = self.term()?;
                    self.expect(Tok::Comma, "','")?;
                    let t = self.term()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(if name == "sub" {
                        Formula::Sub(s, t)
                    } else {
                        Formula::Eq(s, t)
                    })
                }
                "card" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let t = self.term()?;
                    self.expect(Tok::RParen, "')'")?;
                    let geq = match self.peek().tok {
                        Tok::EqSym => false,
                        Tok::GeqSym => true,
                        _ => return Err(self.error(&["'='", "'>='"])),
                    };
                    self.bump();
                    let n = match self.peek().tok {
                        Tok::Nat(n) => n,
                        _ => return Err(self.error(&["a natural number"])),
                    };
                    self.bump();
                    Ok(if geq {
                        Formula::CardGeq(t, n)
                    } else {
                        Formula::CardEq(t, n)
                    })
                }
                "atom" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let t = self.term()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Formula::CardEq(t, 1))
                }
                _ => Err(self.error(&["'sub'", "'eq'", "'card'", "'atom'", "'E'", "'A'", "'!'", "'('"])),
            },
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            _ => Err(self.error(&["'sub'", "'eq'", "'card'", "'atom'", "'E'", "'A'", "'!'", "'('"])),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.factor()?;
        while self.peek().tok == Tok::Plus {
            self.bump();
            acc = Term::join(acc, self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.base()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    acc = Term::meet(acc, self.base()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = Term::diff(acc, self.base()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn base(&mut self) -> Result<Term, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => {
                if RESERVED.contains(&name.as_str()) {
                    return Err(self.error(&["a variable name (not a reserved word)"]));
                }
                self.bump();
                Ok(Term::Var(name))
            }
            Tok::Nat(0) => {
                self.bump();
                Ok(Term::Zero)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Err(self.error(&["a variable name", "'0'", "'('"])),
        }
    }
}

fn fold_right<T>(mut parts: Vec<T>, f: impl Fn(T, T) -> T) -> T {
    let last = parts.pop().expect("nonempty");
    parts.into_iter().rev().fold(last, |acc, p| f(p, acc))
}

/// Parses a formula from the surface syntax.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(f)
}

/// Parses a bare term (used by tests and tooling).
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.term()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(t)
}
