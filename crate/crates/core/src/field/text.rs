//! Text form of field elements.
//!
//! Grammar: integers, letters `u1..ud` (plus `u`, `t` when `d = 2`, and `u`
//! when `d = 1`), binary `+ - * /`, unary `-`, `^` with a signed integer
//! exponent, and parentheses.

use super::poly::Poly;
use super::{FieldElem, Repr, Tower};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {1:?} at offset {0}")]
    UnexpectedChar(usize, char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("bad exponent at offset {0}")]
    BadExponent(usize),
    #[error("division by zero at offset {0}")]
    DivisionByZero(usize),
    #[error("empty input")]
    Empty,
}

pub(super) fn parse(tower: &Tower, s: &str) -> Result<FieldElem, ParseError> {
    let mut p = Parser {
        tower,
        src: s.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(ParseError::Empty);
    }
    let v = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(v),
        Some(c) => Err(ParseError::UnexpectedChar(p.pos, c as char)),
    }
}

struct Parser<'a> {
    tower: &'a Tower,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FieldElem, ParseError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElem, ParseError> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' {
                &acc * &rhs
            } else if rhs.is_zero() {
                return Err(ParseError::DivisionByZero(at));
            } else {
                &acc / &rhs
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<FieldElem, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElem, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.pos;
        let e = self.signed_int().ok_or(ParseError::BadExponent(at))?;
        if e.unsigned_abs() as usize > 4 * self.tower.degree_bound() {
            return Err(ParseError::BadExponent(at));
        }
        if e < 0 && base.is_zero() {
            return Err(ParseError::DivisionByZero(at));
        }
        Ok(base.pow(e))
    }

    fn signed_int(&mut self) -> Option<i64> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.signed_int()?;
                if self.peek() != Some(b')') {
                    return None;
                }
                self.pos += 1;
                return Some(v);
            }
            _ => false,
        };
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let v: i64 = std::str::from_utf8(&self.src[start..self.pos])
            .ok()?
            .parse()
            .ok()?;
        Some(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<FieldElem, ParseError> {
        let Some(c) = self.peek() else {
            return Err(ParseError::UnexpectedEnd);
        };
        let start = self.pos;
        if c == b'(' {
            self.pos += 1;
            let v = self.expr()?;
            return match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    Ok(v)
                }
                Some(c) => Err(ParseError::UnexpectedChar(self.pos, c as char)),
                None => Err(ParseError::UnexpectedEnd),
            };
        }
        if c.is_ascii_digit() {
            // reduce digit by digit so large literals never overflow
            let p = self.tower.p() as u64;
            let mut r = 0u64;
            while let Some(d) = self.src.get(self.pos).filter(|d| d.is_ascii_digit()) {
                r = (r * 10 + (d - b'0') as u64) % p;
                self.pos += 1;
            }
            return Ok(self.tower.int(r as i64));
        }
        if c.is_ascii_alphabetic() {
            while self
                .src
                .get(self.pos)
                .is_some_and(u8::is_ascii_alphanumeric)
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return self
                .variable(name)
                .ok_or_else(|| ParseError::UnknownVariable(name.to_string()));
        }
        Err(ParseError::UnexpectedChar(start, c as char))
    }

    fn variable(&self, name: &str) -> Option<FieldElem> {
        let d = self.tower.depth();
        let level = match (name, d) {
            ("t", 2) => 2,
            ("u", 1 | 2) => 1,
            _ => {
                let i: usize = name.strip_prefix('u')?.parse().ok()?;
                if name.starts_with("u0") || i == 0 || i > d {
                    return None;
                }
                i
            }
        };
        Some(self.tower.var(level))
    }
}

pub(super) fn format(tower: &Tower, f: &FieldElem) -> String {
    format_with(tower, f, &|l| tower.var_name(l))
}

pub(super) fn format_with(_tower: &Tower, f: &FieldElem, name: &dyn Fn(usize) -> String) -> String {
    fmt_elem(f, name)
}

fn fmt_elem(f: &FieldElem, name: &dyn Fn(usize) -> String) -> String {
    match &f.repr {
        Repr::Prime(v) => v.to_string(),
        Repr::Frac(fr) => {
            let var = name(f.level());
            let num = fmt_poly(&fr.num, &var, name);
            if fr.den.is_one() {
                return num;
            }
            let den = fmt_poly(&fr.den, &var, name);
            let num = if has_top_level(&num, &['+', '/']) {
                format!("({num})")
            } else {
                num
            };
            let den = if has_top_level(&den, &['+', '*', '/']) {
                format!("({den})")
            } else {
                den
            };
            format!("{num}/{den}")
        }
    }
}

fn fmt_poly(p: &Poly, var: &str, name: &dyn Fn(usize) -> String) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (e, c) in p.0.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let power = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        let term = if e == 0 {
            fmt_elem(c, name)
        } else if c.is_one() {
            power
        } else {
            let cs = fmt_elem(c, name);
            if has_top_level(&cs, &['+', '/']) {
                format!("({cs})*{power}")
            } else {
                format!("{cs}*{power}")
            }
        };
        terms.push(term);
    }
    terms.join(" + ")
}

fn has_top_level(s: &str, chars: &[char]) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ if depth == 0 && chars.contains(&c) => return true,
            _ => {}
        }
    }
    false
}
