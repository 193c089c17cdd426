//! Recursive-descent parser for the polynomial grammar:
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := coeff ('*' factor)* | factor ('*' factor)*
//! factor := var ['^' nat] | '(' expr ')' ['^' nat]
//! var    := 'x' nat | 'z' | 'u' nat
//! coeff  := int | int '/' nat
//! ```
//!
//! Whitespace is insignificant; juxtaposition is rejected. Parenthesized
//! groups are expanded on the spot.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Monomial, Poly, Var, VarContext};
use crate::error::{Error, Result};
use crate::ring::Ring;

/// Largest accepted exponent; keeps expansion costs bounded on hostile input.
pub const MAX_EXPONENT: u32 = 1 << 16;
/// Largest exponent on a parenthesized group.
pub const MAX_GROUP_EXPONENT: u32 = 64;
/// Largest number of terms an expanded product may have.
pub const MAX_TERMS: usize = 2048;
const MAX_NESTING: usize = 16;

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { src: text.as_bytes(), pos: 0 }
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

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    /// Digits immediately at the cursor (no leading whitespace).
    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn nat(&mut self, what: &str) -> Result<BigInt> {
        self.skip_ws();
        match self.digits() {
            Some(s) => Ok(s.parse().unwrap()),
            None => self.err(format!("expected {what}")),
        }
    }

    fn small_nat(&mut self, what: &str, max: u64) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        match self.digits() {
            Some(s) => match s.parse::<u64>() {
                Ok(v) if v <= max => Ok(v),
                _ => Err(Error::Parse { pos: start, msg: format!("{what} {s} is out of range") }),
            },
            None => self.err(format!("expected {what}")),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

/// Maps an identifier at the cursor to a variable.
trait Resolver {
    fn d(&self) -> usize;
    fn resolve(&self, cur: &mut Cursor<'_>) -> Result<Var>;
}

struct ContextResolver<'c>(&'c VarContext);

impl Resolver for ContextResolver<'_> {
    fn d(&self) -> usize {
        self.0.d()
    }

    fn resolve(&self, cur: &mut Cursor<'_>) -> Result<Var> {
        let start = cur.pos;
        let head = cur.src[cur.pos];
        cur.pos += 1;
        let unknown = |cur: &mut Cursor<'_>| -> Result<Var> {
            while cur.pos < cur.src.len() && cur.src[cur.pos].is_ascii_alphanumeric() {
                cur.pos += 1;
            }
            let name = String::from_utf8_lossy(&cur.src[start..cur.pos]).into_owned();
            Err(Error::Parse { pos: start, msg: format!("unknown variable '{name}'") })
        };
        let var = match head {
            b'z' => Var::Z,
            b'x' | b'u' => {
                let Some(idx) = cur.digits() else { return unknown(cur) };
                let idx: usize = match idx.parse() {
                    Ok(i) => i,
                    Err(_) => return unknown(cur),
                };
                if head == b'x' {
                    if idx == 0 || idx > self.0.d() {
                        return unknown(cur);
                    }
                    Var::X(idx - 1)
                } else {
                    if idx == 0 || idx >= self.0.aux_len() {
                        return unknown(cur);
                    }
                    Var::Aux(idx)
                }
            }
            _ => return unknown(cur),
        };
        if cur.pos < cur.src.len() && cur.src[cur.pos].is_ascii_alphanumeric() {
            return unknown(cur);
        }
        Ok(var)
    }
}

/// Resolver for univariate polynomials in the generator `a`, mapped to `x1`.
struct GeneratorResolver;

impl Resolver for GeneratorResolver {
    fn d(&self) -> usize {
        1
    }

    fn resolve(&self, cur: &mut Cursor<'_>) -> Result<Var> {
        let start = cur.pos;
        while cur.pos < cur.src.len() && cur.src[cur.pos].is_ascii_alphanumeric() {
            cur.pos += 1;
        }
        if &cur.src[start..cur.pos] == b"a" {
            Ok(Var::X(0))
        } else {
            let name = String::from_utf8_lossy(&cur.src[start..cur.pos]).into_owned();
            Err(Error::Parse { pos: start, msg: format!("unknown variable '{name}'") })
        }
    }
}

fn parse_factor<R: Ring>(cur: &mut Cursor<'_>, res: &dyn Resolver, ring: &R, nesting: usize) -> Result<Poly<R>> {
    let start = {
        cur.skip_ws();
        cur.pos
    };
    if cur.eat(b'(') {
        if nesting >= MAX_NESTING {
            return cur.err("parentheses nested too deeply");
        }
        let inner = parse_sum(cur, res, ring, nesting + 1)?;
        if !cur.eat(b')') {
            return cur.err("expected ')'");
        }
        let k = if cur.eat(b'^') { cur.small_nat("exponent", MAX_GROUP_EXPONENT as u64)? as u32 } else { 1 };
        let mut acc = Poly::one(ring.clone(), res.d());
        for _ in 0..k {
            acc = checked_product(&acc, &inner, start)?;
        }
        return Ok(acc);
    }
    match cur.peek() {
        Some(b) if b.is_ascii_alphabetic() => {}
        Some(b) => return cur.err(format!("expected a variable, found '{}'", b as char)),
        None => return cur.err("expected a variable"),
    }
    let var = res.resolve(cur)?;
    let exp = if cur.eat(b'^') { cur.small_nat("exponent", MAX_EXPONENT as u64)? as u32 } else { 1 };
    Ok(Poly::term(ring.clone(), Monomial::one(res.d()).with_exp(var, exp), ring.one()))
}

fn checked_product<R: Ring>(a: &Poly<R>, b: &Poly<R>, pos: usize) -> Result<Poly<R>> {
    if a.len().saturating_mul(b.len()) > MAX_TERMS * 8 {
        return Err(Error::Parse { pos, msg: "expansion too large".into() });
    }
    let p = a * b;
    let too_big = p.len() > MAX_TERMS || p.terms().any(|(m, _)| m.vars().any(|(_, e)| e > MAX_EXPONENT));
    if too_big {
        return Err(Error::Parse { pos, msg: "expansion too large".into() });
    }
    Ok(p)
}

fn parse_term<R: Ring>(cur: &mut Cursor<'_>, res: &dyn Resolver, ring: &R, nesting: usize) -> Result<Poly<R>> {
    cur.skip_ws();
    let start = cur.pos;
    let mut acc = match cur.peek() {
        Some(b) if b.is_ascii_digit() => {
            let num = cur.nat("integer")?;
            let den = if cur.eat(b'/') { cur.nat("denominator")? } else { BigInt::one() };
            if den.is_zero() {
                return Err(Error::Parse { pos: start, msg: "zero denominator".into() });
            }
            let Some(c) = ring.from_ratio(&num, &den) else {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("{num}/{den} is not defined over the coefficient ring"),
                });
            };
            Poly::constant(ring.clone(), res.d(), c)
        }
        Some(_) => parse_factor(cur, res, ring, nesting)?,
        None => return cur.err("expected a term"),
    };
    while cur.eat(b'*') {
        let pos = cur.pos;
        let factor = parse_factor(cur, res, ring, nesting)?;
        acc = checked_product(&acc, &factor, pos)?;
    }
    Ok(acc)
}

fn parse_sum<R: Ring>(cur: &mut Cursor<'_>, res: &dyn Resolver, ring: &R, nesting: usize) -> Result<Poly<R>> {
    let mut poly = Poly::zero(ring.clone(), res.d());
    let mut negate = cur.eat(b'-');
    loop {
        let t = parse_term(cur, res, ring, nesting)?;
        poly = if negate { poly.sub(&t) } else { poly.add(&t) };
        negate = if cur.eat(b'+') {
            false
        } else if cur.eat(b'-') {
            true
        } else {
            return Ok(poly);
        };
    }
}

fn parse_expr<R: Ring>(text: &str, res: &dyn Resolver, ring: &R) -> Result<Poly<R>> {
    let mut cur = Cursor::new(text);
    let poly = parse_sum(&mut cur, res, ring, 0)?;
    if let Some(b) = cur.peek() {
        return cur.err(format!("unexpected '{}'", b as char));
    }
    Ok(poly)
}

/// Parses `text` in the variables of `context` over `ring`.
pub fn parse_polynomial<R: Ring>(text: &str, context: &VarContext, ring: &R) -> Result<Poly<R>> {
    parse_expr(text, &ContextResolver(context), ring)
}

/// Parses a univariate polynomial in the generator `a` (used for extension
/// moduli), returned as coefficients from low to high degree.
pub fn parse_univariate<R: Ring>(text: &str, ring: &R) -> Result<Vec<R::Elem>> {
    let p = parse_expr(text, &GeneratorResolver, ring)?;
    let deg = p.degree_in(Var::X(0)) as usize;
    let mut out = vec![ring.zero(); deg + 1];
    for (m, c) in p.terms() {
        out[m.exp(Var::X(0)) as usize] = c.clone();
    }
    Ok(out)
}

/// Parses `[-]int[/nat]`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let mut cur = Cursor::new(text);
    let neg = cur.eat(b'-');
    let num = cur.nat("integer")?;
    let den = if cur.eat(b'/') { cur.nat("denominator")? } else { BigInt::one() };
    if den.is_zero() {
        return cur.err("zero denominator");
    }
    if !cur.at_end() {
        return cur.err("trailing input");
    }
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Parses a comma-separated list of rationals, e.g. `1,3/2,2`.
pub fn parse_rational_list(text: &str) -> Result<Vec<BigRational>> {
    let mut offset = 0;
    let mut out = Vec::new();
    for piece in text.split(',') {
        match parse_rational(piece) {
            Ok(r) => out.push(r),
            Err(Error::Parse { pos, msg }) => return Err(Error::Parse { pos: pos + offset, msg }),
            Err(e) => return Err(e),
        }
        offset += piece.len() + 1;
    }
    Ok(out)
}
