//! Parser for the canonical s-expression syntax produced by `Display`.
//!
//! ```text
//! term    := "1" | IDENT | "(inv " term ")" | "(* " term " " term ")"
//! formula := "(= " term " " term ")" | "(not " f ")" | "(and " f " " f ")"
//!          | "(or " f " " f ")" | "(imp " f " " f ")"
//!          | "(all " IDENT " " f ")" | "(ex " IDENT " " f ")"
//! ```
//! Any run of whitespace is accepted between tokens.

use thiserror::Error;

use crate::formula::{Formula, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<(usize, Tok<'a>)> {
        let save = self.pos;
        let t = self.next();
        self.pos = save;
        t
    }

    fn next(&mut self) -> Option<(usize, Tok<'a>)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let c = rest.chars().next()?;
        match c {
            '(' => {
                self.pos += 1;
                Some((start, Tok::Open))
            }
            ')' => {
                self.pos += 1;
                Some((start, Tok::Close))
            }
            _ => {
                let len = rest
                    .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                    .unwrap_or(rest.len());
                self.pos += len;
                Some((start, Tok::Atom(&rest[..len])))
            }
        }
    }
}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        message: message.into(),
    })
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser<'a> {
    lex: Lexer<'a>,
}

impl<'a> Parser<'a> {
    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.lex.next() {
            Some((_, Tok::Close)) => Ok(()),
            Some((p, t)) => err(p, format!("expected ')', found {t:?}")),
            None => err(self.lex.src.len(), "expected ')', found end of input"),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.lex.next() {
            Some((_, Tok::Atom(a))) if is_ident(a) => Ok(a.to_string()),
            Some((p, t)) => err(p, format!("expected identifier, found {t:?}")),
            None => err(self.lex.src.len(), "expected identifier, found end of input"),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.lex.next() {
            Some((_, Tok::Atom("1"))) => Ok(Term::One),
            Some((p, Tok::Atom(a))) => {
                if is_ident(a) {
                    Ok(Term::Var(a.to_string()))
                } else {
                    err(p, format!("invalid term {a:?}"))
                }
            }
            Some((_, Tok::Open)) => match self.lex.next() {
                Some((_, Tok::Atom("inv"))) => {
                    let t = self.term()?;
                    self.expect_close()?;
                    Ok(Term::inv(t))
                }
                Some((_, Tok::Atom("*"))) => {
                    let a = self.term()?;
                    let b = self.term()?;
                    self.expect_close()?;
                    Ok(Term::mul(a, b))
                }
                Some((p, t)) => err(p, format!("expected 'inv' or '*', found {t:?}")),
                None => err(self.lex.src.len(), "unexpected end of input"),
            },
            Some((p, Tok::Close)) => err(p, "unexpected ')'"),
            None => err(self.lex.src.len(), "expected term, found end of input"),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.lex.next() {
            Some((_, Tok::Open)) => {}
            Some((p, t)) => return err(p, format!("expected '(', found {t:?}")),
            None => return err(self.lex.src.len(), "expected formula, found end of input"),
        }
        let (p, head) = match self.lex.next() {
            Some((p, Tok::Atom(a))) => (p, a),
            Some((p, t)) => return err(p, format!("expected connective, found {t:?}")),
            None => return err(self.lex.src.len(), "unexpected end of input"),
        };
        let f = match head {
            "=" => {
                let a = self.term()?;
                let b = self.term()?;
                Formula::Eq(a, b)
            }
            "not" => Formula::not(self.formula()?),
            "and" | "or" | "imp" => {
                let a = self.formula()?;
                let b = self.formula()?;
                match head {
                    "and" => Formula::and(a, b),
                    "or" => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
            "all" | "ex" => {
                let v = self.ident()?;
                let body = self.formula()?;
                if head == "all" {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
            other => return err(p, format!("unknown connective {other:?}")),
        };
        self.expect_close()?;
        Ok(f)
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        lex: Lexer { src: text, pos: 0 },
    };
    let f = p.formula()?;
    if let Some((pos, t)) = p.lex.peek() {
        return err(pos, format!("trailing input {t:?}"));
    }
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        lex: Lexer { src: text, pos: 0 },
    };
    let t = p.term()?;
    if let Some((pos, tok)) = p.lex.peek() {
        return err(pos, format!("trailing input {tok:?}"));
    }
    Ok(t)
}

/// Canonical text form; identical to `f.to_string()`.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn parses_examples() {
        let f = parse_formula("(ex y (= (* x y) 1))").unwrap();
        assert_eq!(f.free_vars(), BTreeSet::from(["x".to_string()]));
        assert_eq!(print_formula(&parse_formula("(= x 1)").unwrap()), "(= x 1)");
        let messy = parse_formula("  (all x\n\t(imp (= x  1) (not (= (inv x) y_2))))").unwrap();
        assert_eq!(messy.to_string(), "(all x (imp (= x 1) (not (= (inv x) y_2))))");
    }

    #[test]
    fn reports_positions() {
        assert_eq!(parse_formula("(= x 1").unwrap_err().pos, 6);
        assert_eq!(parse_formula("(foo x 1)").unwrap_err().pos, 1);
        assert_eq!(parse_formula("(= 2x 1)").unwrap_err().pos, 3);
        assert_eq!(parse_formula("(ex _a (= _a 1))").unwrap_err().pos, 4);
        assert!(parse_formula("(= x 1) extra").is_err());
        assert!(parse_formula("").is_err());
    }

    #[test]
    fn terms() {
        assert_eq!(
            parse_term("(* (inv a) 1)").unwrap(),
            Term::mul(Term::inv(Term::var("a")), Term::One)
        );
    }
}
