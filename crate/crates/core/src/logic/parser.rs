use std::fmt;

use thiserror::Error;

use super::Formula;
use crate::complex::AgentId;

/// A parse failure at a byte offset, with the tokens that would have been
/// accepted there.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}", ExpectedList(.expected))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
}

struct ExpectedList<'a>(&'a [&'static str]);

impl fmt::Display for ExpectedList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(if i + 1 == self.0.len() { " or " } else { ", " })?;
            }
            f.write_str(t)?;
        }
        Ok(())
    }
}

const UNARY_START: &[&str] = &["'~'", "'K{'", "'S{'", "'('", "atom", "'#t'", "'#f'"];

pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.iff()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["'<->'", "'->'", "'|'", "'&'", "end of input"]));
    }
    Ok(f)
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn error(&self, expected: &[&'static str]) -> SyntaxError {
        SyntaxError {
            offset: self.pos,
            expected: expected.to_vec(),
        }
    }

    /// Consumes `tok` after optional whitespace.
    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn peek_is(&mut self, tok: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(tok.as_bytes())
    }

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.imp()?;
        while self.eat("<->") {
            let rhs = self.imp()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.imp()?;
            return Ok(lhs.imp(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat("~") {
            return Ok(self.unary()?.not());
        }
        if self.peek_is("K{") || self.peek_is("S{") {
            let secrecy = self.src[self.pos] == b'S';
            self.pos += 2;
            let agent = self.agent()?;
            if !self.eat("}") {
                return Err(self.error(&["'}'"]));
            }
            let body = Box::new(self.unary()?);
            return Ok(if secrecy {
                Formula::S(agent, body)
            } else {
                Formula::K(agent, body)
            });
        }
        if self.eat("(") {
            let f = self.iff()?;
            if !self.eat(")") {
                return Err(self.error(&["')'", "'<->'", "'->'", "'|'", "'&'"]));
            }
            return Ok(f);
        }
        if self.eat("#t") {
            return Ok(Formula::Top);
        }
        if self.eat("#f") {
            return Ok(Formula::Bot);
        }
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(Formula::atom(name))
            }
            _ => Err(self.error(UNARY_START)),
        }
    }

    fn agent(&mut self) -> Result<AgentId, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        AgentId::new(name).ok_or(SyntaxError {
            offset: start,
            expected: vec!["agent name"],
        })
    }
}
