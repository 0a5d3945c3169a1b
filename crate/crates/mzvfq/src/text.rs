//! Tokenizer for sums of monomials such as `2*theta^3*t + g^2*theta - 1`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Factor {
    Int(u64),
    Var { name: String, exp: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Monomial {
    pub negative: bool,
    pub factors: Vec<Factor>,
    pub pos: usize,
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    idx: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { chars: src.char_indices().collect(), idx: 0, src }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.idx).map_or(self.src.len(), |c| c.0)
    }

    fn skip_ws(&mut self) {
        while self.idx < self.chars.len() && self.chars[self.idx].1.is_whitespace() {
            self.idx += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.idx).map(|c| c.1)
    }

    fn bump(&mut self) {
        self.idx += 1;
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos();
        let mut value: u64 = 0;
        let mut seen = false;
        while let Some(&(_, c)) = self.chars.get(self.idx) {
            let Some(d) = c.to_digit(10) else { break };
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as u64))
                .ok_or_else(|| Error::parse(start, "integer too large"))?;
            seen = true;
            self.idx += 1;
        }
        if seen {
            Ok(value)
        } else {
            Err(Error::parse(start, "expected an integer"))
        }
    }

    fn ident(&mut self) -> String {
        let mut out = String::new();
        while let Some(&(_, c)) = self.chars.get(self.idx) {
            if c.is_alphabetic() || c == '_' {
                out.push(c);
                self.idx += 1;
            } else {
                break;
            }
        }
        out
    }
}

/// Splits `src` into signed monomials; an empty or all-whitespace input is an error.
pub(crate) fn monomials(src: &str) -> Result<Vec<Monomial>> {
    let mut cur = Cursor::new(src);
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let mut negative = false;
        match cur.peek() {
            None if first => return Err(Error::parse(0, "empty expression")),
            None => return Err(Error::parse(cur.pos(), "dangling operator")),
            Some('-') => {
                negative = true;
                cur.bump();
            }
            Some('+') if first => cur.bump(),
            _ => {}
        }
        let pos = cur.pos();
        let mut factors = Vec::new();
        loop {
            match cur.peek() {
                Some(c) if c.is_ascii_digit() => factors.push(Factor::Int(cur.number()?)),
                Some(c) if c.is_alphabetic() => {
                    let name = cur.ident();
                    let exp = if cur.peek() == Some('^') {
                        cur.bump();
                        cur.number()?
                    } else {
                        1
                    };
                    factors.push(Factor::Var { name, exp });
                }
                _ => return Err(Error::parse(cur.pos(), "expected a number or variable")),
            }
            if cur.peek() == Some('*') {
                cur.bump();
            } else {
                break;
            }
        }
        out.push(Monomial { negative, factors, pos });
        first = false;
        match cur.peek() {
            None => return Ok(out),
            Some('+') => cur.bump(),
            Some('-') => {}
            Some(_) => return Err(Error::parse(cur.pos(), "expected '+' or '-'")),
        }
    }
}

/// Canonical spelling of a variable name; `θ` is accepted for `theta`.
pub(crate) fn canonical_var(name: &str) -> &str {
    match name {
        "θ" => "theta",
        other => other,
    }
}
