//! Recursive-descent parser for the textual formula syntax.
//!
//! ```text
//! formula  ::= quant+ body
//! quant    ::= ("forall" | "exists") ident+ "."
//! body     ::= impl ("<->" impl)*
//! impl     ::= disj ("->" impl)?
//! disj     ::= conj ("|" conj)*
//! conj     ::= temp ("&" temp)*
//! temp     ::= unary (("U" | "W" | "R") temp)?
//! unary    ::= ("~" | "X" | "F" | "G") unary | atom
//! atom     ::= "true" | "false" | ident "_" ident | "(" body ")"
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use super::ast::{Formula, Ltl, QuantGroup, Quantifier};
use super::FormulaError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Atom(String, String),
    Dot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Atom(a, v) => format!("`{a}_{v}`"),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let word_at = |start: usize| -> usize {
        let mut end = start;
        while end < chars.len() && chars[end].is_ascii_alphanumeric() {
            end += 1;
        }
        end
    };

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let (tok, len) = match c {
            '.' => (Tok::Dot, 1),
            '~' => (Tok::Tilde, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Bar, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                (Tok::DoubleArrow, 3)
            }
            c if c.is_ascii_alphabetic() => {
                let end = word_at(i);
                let word: String = chars[i..end].iter().collect();
                if chars.get(end) == Some(&'_') {
                    let vstart = end + 1;
                    if !chars.get(vstart).is_some_and(|c| c.is_ascii_alphabetic()) {
                        return Err(syntax(
                            tl,
                            tc + (vstart - i),
                            "expected trace variable after `_`",
                        ));
                    }
                    let vend = word_at(vstart);
                    let var: String = chars[vstart..vend].iter().collect();
                    (Tok::Atom(word, var), vend - i)
                } else {
                    let len = end - i;
                    (Tok::Word(word), len)
                }
            }
            other => return Err(syntax(tl, tc, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned {
            tok,
            line: tl,
            col: tc,
        });
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> FormulaError {
        let t = &self.toks[self.pos];
        syntax(t.line, t.col, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn quantifier(&self) -> Option<Quantifier> {
        if self.is_word("forall") {
            Some(Quantifier::Forall)
        } else if self.is_word("exists") {
            Some(Quantifier::Exists)
        } else {
            None
        }
    }

    fn formula(&mut self) -> Result<(Vec<QuantGroup>, Ltl), FormulaError> {
        let mut prefix = Vec::new();
        while let Some(q) = self.quantifier() {
            self.bump();
            let mut vars = Vec::new();
            loop {
                match self.peek().clone() {
                    Tok::Word(w) if w != "forall" && w != "exists" => {
                        self.bump();
                        vars.push(w);
                    }
                    Tok::Dot if !vars.is_empty() => {
                        self.bump();
                        break;
                    }
                    other => {
                        return Err(self.error_here(format!(
                            "expected trace variable or `.`, found {}",
                            other.describe()
                        )))
                    }
                }
            }
            prefix.push(QuantGroup::new(q, vars));
        }
        if prefix.is_empty() {
            return Err(self.error_here("expected `forall` or `exists`"));
        }
        let body = self.iff()?;
        if *self.peek() != Tok::Eof {
            return Err(self.error_here(format!(
                "unexpected {} after formula",
                self.peek().describe()
            )));
        }
        Ok((prefix, body))
    }

    fn iff(&mut self) -> Result<Ltl, FormulaError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Ltl, FormulaError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Ltl, FormulaError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Ltl, FormulaError> {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.temporal()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Ltl, FormulaError> {
        let lhs = self.unary()?;
        let op = match self.peek() {
            Tok::Word(w) if w == "U" || w == "W" || w == "R" => w.clone(),
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.temporal()?;
        Ok(match op.as_str() {
            "U" => lhs.until(rhs),
            "W" => lhs.weak_until(rhs),
            _ => lhs.release(rhs),
        })
    }

    fn unary(&mut self) -> Result<Ltl, FormulaError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Word(w) if w == "X" || w == "F" || w == "G" => {
                self.bump();
                let inner = self.unary()?;
                Ok(match w.as_str() {
                    "X" => inner.next(),
                    "F" => inner.finally(),
                    _ => inner.globally(),
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Ltl, FormulaError> {
        match self.peek().clone() {
            Tok::Word(w) if w == "true" => {
                self.bump();
                Ok(Ltl::True)
            }
            Tok::Word(w) if w == "false" => {
                self.bump();
                Ok(Ltl::False)
            }
            Tok::Atom(ap, var) => {
                self.bump();
                Ok(Ltl::Atom { ap, var })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(self.error_here(format!(
                "expected `true`, `false`, an atom `ap_var`, or `(`, found {}",
                other.describe()
            ))),
        }
    }
}

/// Parses a formula from its textual syntax.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let (prefix, body) = parser.formula()?;
    Formula::new(prefix, body)
}
