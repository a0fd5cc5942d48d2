//! Text form of terms.
//!
//! Grammar: `0`, decimal naturals, `w`, `w^x`, `x*y`, `x+y`,
//! `th_i[rel](x)` (the `[rel]` part optional), `v[x]`, parentheses.
//! `^` binds tighter than `*`, which binds tighter than `+`.

use std::fmt;
use std::str::FromStr;

use crate::error::{ParseError, SyntaxError};
use crate::ord::{Node, Ordinal};

pub fn parse(input: &str) -> Result<Ordinal, SyntaxError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let t = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input").into());
    }
    Ok(t)
}

impl FromStr for Ordinal {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError {
                pos: start,
                msg: "number too large".into(),
            })
    }

    fn expr(&mut self) -> Result<Ordinal, SyntaxError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let rhs = self.term()?;
            acc = acc.add(&rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, SyntaxError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = acc.mul(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Ordinal, SyntaxError> {
        let start = self.pos;
        let (base, is_w) = self.base()?;
        if self.eat(b'^') {
            if !is_w {
                self.pos = start;
                return Err(self.err("only w may be raised to a power").into());
            }
            let e = self.factor()?;
            return Ok(Ordinal::omega_pow(&e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<(Ordinal, bool), SyntaxError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok((Ordinal::nat(self.number()?), false)),
            Some(b'(') => {
                self.pos += 1;
                let t = self.expr()?;
                self.expect(b')')?;
                Ok((t, false))
            }
            Some(b'w') => {
                self.pos += 1;
                Ok((Ordinal::omega(), true))
            }
            Some(b'v') => {
                self.pos += 1;
                self.expect(b'[')?;
                let idx = self.expr()?;
                self.expect(b']')?;
                Ok((Ordinal::upsilon(&idx)?, false))
            }
            Some(b't') => {
                if !self.src[self.pos..].starts_with(b"th_") {
                    return Err(self.err("expected th_").into());
                }
                self.pos += 3;
                let level = self.number()?;
                let level = u32::try_from(level).map_err(|_| self.err("level too large"))?;
                let rel = if self.eat(b'[') {
                    let r = self.expr()?;
                    self.expect(b']')?;
                    Some(r)
                } else {
                    None
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok((Ordinal::theta(level, rel.as_ref(), &arg)?, false))
            }
            Some(_) => Err(self.err("unexpected character").into()),
            None => Err(self.err("unexpected end of input").into()),
        }
    }
}

fn needs_parens(s: &str) -> bool {
    s.contains(['+', '*', '^'])
}

fn write_principal(t: &Ordinal, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t.node() {
        Node::Upsilon(i) => write!(f, "v[{i}]"),
        Node::Theta { level, rel, arg } => {
            write!(f, "th_{level}")?;
            if !rel.is_one() {
                write!(f, "[{rel}]")?;
            }
            write!(f, "({arg})")
        }
        Node::Pow(e) => {
            if e.is_zero() {
                return write!(f, "1");
            }
            // Leading epsilon summands of the exponent become epsilon factors.
            let parts = e.anf();
            let k = parts.iter().take_while(|p| p.is_epsilon()).count();
            let mut first = true;
            for p in &parts[..k] {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write_principal(p, f)?;
            }
            if k < parts.len() {
                if !first {
                    write!(f, "*")?;
                }
                let rest = Ordinal::sum_of(parts[k..].iter().cloned());
                if rest.is_one() {
                    write!(f, "w")?;
                } else {
                    let s = rest.to_string();
                    if needs_parens(&s) {
                        write!(f, "w^({s})")?;
                    } else {
                        write!(f, "w^{s}")?;
                    }
                }
            }
            Ok(())
        }
        _ => unreachable!("write_principal on a non-principal term"),
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_nat() {
            return write!(f, "{n}");
        }
        let mut first = true;
        for (p, c) in self.cnf() {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if p.is_one() {
                write!(f, "{c}")?;
            } else {
                write_principal(&p, f)?;
                if c > 1 {
                    write!(f, "*{c}")?;
                }
            }
        }
        Ok(())
    }
}
