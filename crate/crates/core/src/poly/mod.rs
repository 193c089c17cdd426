//! Multivariate polynomials in `x1..xd, z, u1, u2, ...`.
//!
//! Every polynomial carries an optional truncation certificate `T`: when set,
//! terms of total x-degree `>= T` are unknown and none are stored. A
//! certificate is attached only when an operation actually discards terms,
//! so polynomials that never lost information stay exact.

mod parse;
mod relation;

pub use parse::{parse_polynomial, parse_rational, parse_rational_list, parse_univariate};
pub use relation::{normal_form, weierstrass_validate, AuxVar, Relation, VarContext, WeierstrassPoly};

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops;

use num_bigint::BigInt;

use crate::ring::{Field, Ring};

/// Default truncation order (total x-degree).
pub const DEFAULT_TRUNCATION: u32 = 64;

/// A variable: `X(i)` is `x_{i+1}`, `Aux(0)` is `z`, `Aux(j)` is `u_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(usize),
    Aux(usize),
}

impl Var {
    pub const Z: Var = Var::Aux(0);

    pub fn u(j: usize) -> Var {
        assert!(j >= 1, "auxiliary variables are numbered from 1");
        Var::Aux(j)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::Aux(0) => write!(f, "z"),
            Var::Aux(j) => write!(f, "u{j}"),
        }
    }
}

/// An exponent vector split into the x-part (length `d`) and the auxiliary
/// part `(z, u1, u2, ...)` with trailing zeros trimmed.
///
/// The ordering is the canonical printing order: auxiliary exponents are
/// compared first from the highest `u` down to `z`, then total x-degree, then
/// x-exponents lexicographically. Larger monomials print first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    x: Vec<u32>,
    aux: Vec<u32>,
}

impl Monomial {
    pub fn one(d: usize) -> Self {
        Monomial { x: vec![0; d], aux: Vec::new() }
    }

    pub fn new(x: Vec<u32>, mut aux: Vec<u32>) -> Self {
        while aux.last() == Some(&0) {
            aux.pop();
        }
        Monomial { x, aux }
    }

    pub fn var(d: usize, v: Var) -> Self {
        Monomial::one(d).with_exp(v, 1)
    }

    pub fn d(&self) -> usize {
        self.x.len()
    }

    pub fn x_exps(&self) -> &[u32] {
        &self.x
    }

    pub fn aux_exps(&self) -> &[u32] {
        &self.aux
    }

    pub fn exp(&self, v: Var) -> u32 {
        match v {
            Var::X(i) => self.x[i],
            Var::Aux(k) => self.aux.get(k).copied().unwrap_or(0),
        }
    }

    pub fn with_exp(mut self, v: Var, e: u32) -> Self {
        match v {
            Var::X(i) => self.x[i] = e,
            Var::Aux(k) => {
                if self.aux.len() <= k {
                    self.aux.resize(k + 1, 0);
                }
                self.aux[k] = e;
                while self.aux.last() == Some(&0) {
                    self.aux.pop();
                }
            }
        }
        self
    }

    pub fn x_degree(&self) -> u32 {
        self.x.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.aux.is_empty() && self.x.iter().all(|&e| e == 0)
    }

    /// Number of auxiliary slots in use (`1` means only `z`).
    pub fn aux_len(&self) -> usize {
        self.aux.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect();
        let n = self.aux.len().max(other.aux.len());
        let aux = (0..n).map(|k| self.aux.get(k).unwrap_or(&0) + other.aux.get(k).unwrap_or(&0)).collect();
        Monomial { x, aux }
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial {
            x: self.x.iter().map(|e| e * k).collect(),
            aux: if k == 0 { Vec::new() } else { self.aux.iter().map(|e| e * k).collect() },
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.x.iter().zip(&other.x).all(|(a, b)| a <= b)
            && self.aux.iter().enumerate().all(|(k, a)| *a <= other.aux.get(k).copied().unwrap_or(0))
    }

    /// `other / self`, when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let x = other.x.iter().zip(&self.x).map(|(a, b)| a - b).collect();
        let aux = other.aux.iter().enumerate().map(|(k, a)| a - self.aux.get(k).copied().unwrap_or(0)).collect();
        Some(Monomial::new(x, aux))
    }

    /// The `k`-th root when every exponent is divisible by `k`.
    pub fn root(&self, k: u32) -> Option<Monomial> {
        if self.x.iter().chain(&self.aux).all(|e| e % k == 0) {
            Some(Monomial { x: self.x.iter().map(|e| e / k).collect(), aux: self.aux.iter().map(|e| e / k).collect() })
        } else {
            None
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        let xs = self.x.iter().enumerate().map(|(i, &e)| (Var::X(i), e));
        let aux = self.aux.iter().enumerate().map(|(k, &e)| (Var::Aux(k), e));
        xs.chain(aux).filter(|(_, e)| *e > 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.aux.len().max(other.aux.len());
        for k in (0..n).rev() {
            let a = self.aux.get(k).copied().unwrap_or(0);
            let b = other.aux.get(k).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.x_degree().cmp(&other.x_degree()).then_with(|| self.x.cmp(&other.x))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in self.vars() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

fn min_cert(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// A polynomial over `R` with an optional truncation certificate.
#[derive(Clone, Debug)]
pub struct Poly<R: Ring = Field> {
    ring: R,
    d: usize,
    terms: BTreeMap<Monomial, R::Elem>,
    trunc: Option<u32>,
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.trunc == other.trunc && self.terms == other.terms && self.ring == other.ring
    }
}

impl<R: Ring> Poly<R> {
    pub fn zero(ring: R, d: usize) -> Self {
        Poly { ring, d, terms: BTreeMap::new(), trunc: None }
    }

    pub fn constant(ring: R, d: usize, c: R::Elem) -> Self {
        Poly::term(ring, Monomial::one(d), c)
    }

    pub fn one(ring: R, d: usize) -> Self {
        let c = ring.one();
        Poly::constant(ring, d, c)
    }

    pub fn term(ring: R, m: Monomial, c: R::Elem) -> Self {
        let d = m.d();
        let mut p = Poly::zero(ring, d);
        p.add_term(m, c);
        p
    }

    pub fn var(ring: R, d: usize, v: Var) -> Self {
        let c = ring.one();
        Poly::term(ring, Monomial::var(d, v), c)
    }

    pub fn from_terms(ring: R, d: usize, terms: impl IntoIterator<Item = (Monomial, R::Elem)>) -> Self {
        let mut p = Poly::zero(ring, d);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Truncation certificate: `Some(T)` when terms of x-degree `>= T` are unknown.
    pub fn truncation(&self) -> Option<u32> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical printing order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &R::Elem)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> R::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &R::Elem)> {
        self.terms.iter().next_back()
    }

    /// Adds `c * m` in place, respecting the certificate.
    pub fn add_term(&mut self, m: Monomial, c: R::Elem) {
        assert_eq!(m.d(), self.d, "monomial arity mismatch");
        if self.ring.is_zero(&c) {
            return;
        }
        if let Some(t) = self.trunc {
            if m.x_degree() >= t {
                return;
            }
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = self.ring.add(slot.get(), &c);
                if self.ring.is_zero(&sum) {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    /// Marks terms of x-degree `>= limit` unknown and drops them. The
    /// certificate is lowered only if something was actually discarded.
    pub fn truncate(&mut self, limit: Option<u32>) {
        let Some(t) = min_cert(self.trunc, limit) else { return };
        let before = self.terms.len();
        self.terms.retain(|m, _| m.x_degree() < t);
        if self.terms.len() != before {
            self.trunc = min_cert(self.trunc, Some(t));
        }
    }

    pub fn truncated(mut self, limit: Option<u32>) -> Self {
        self.truncate(limit);
        self
    }

    /// Replaces the certificate with `min(current, t)` without inspecting terms.
    pub fn with_certificate(mut self, t: Option<u32>) -> Self {
        self.trunc = min_cert(self.trunc, t);
        if let Some(t) = self.trunc {
            self.terms.retain(|m, _| m.x_degree() < t);
        }
        self
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.ring.neg(c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "arity mismatch");
        let mut out = self.clone().with_certificate(other.trunc);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Poly { ring: self.ring.clone(), d: self.d, terms: BTreeMap::new(), trunc: self.trunc };
        for (m, a) in &self.terms {
            out.add_term(m.clone(), self.ring.mul(a, c));
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &R::Elem) -> Self {
        let mut out = Poly { ring: self.ring.clone(), d: self.d, terms: BTreeMap::new(), trunc: self.trunc };
        for (n, a) in &self.terms {
            out.add_term(n.mul(m), self.ring.mul(a, c));
        }
        out
    }

    /// Product, truncated at `limit`.
    pub fn mul_trunc(&self, other: &Self, limit: Option<u32>) -> Self {
        assert_eq!(self.d, other.d, "arity mismatch");
        let cert = min_cert(self.trunc, other.trunc);
        let bound = min_cert(cert, limit);
        let mut out = Poly { ring: self.ring.clone(), d: self.d, terms: BTreeMap::new(), trunc: cert };
        let mut dropped = false;
        for (m, a) in &self.terms {
            for (n, b) in &other.terms {
                let prod = m.mul(n);
                if let Some(t) = bound {
                    if prod.x_degree() >= t {
                        dropped = true;
                        continue;
                    }
                }
                out.add_term(prod, self.ring.mul(a, b));
            }
        }
        if dropped {
            out.trunc = bound;
        }
        out
    }

    pub fn pow_trunc(&self, k: u32, limit: Option<u32>) -> Self {
        let mut acc = Poly::one(self.ring.clone(), self.d).with_certificate(self.trunc);
        let mut base = self.clone().truncated(limit);
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_trunc(&base, limit);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_trunc(&base, limit);
            }
        }
        acc
    }

    /// Degree in `v` (0 for the zero polynomial).
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn max_x_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::x_degree).max().unwrap_or(0)
    }

    /// Highest auxiliary slot occurring in any term, plus one.
    pub fn aux_len(&self) -> usize {
        self.terms.keys().map(Monomial::aux_len).max().unwrap_or(0)
    }

    pub fn uses(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// The coefficient of `v^k`, as a polynomial without `v`.
    pub fn coefficient_of(&self, v: Var, k: u32) -> Self {
        let mut out = Poly { ring: self.ring.clone(), d: self.d, terms: BTreeMap::new(), trunc: self.trunc };
        for (m, c) in &self.terms {
            if m.exp(v) == k {
                out.add_term(m.clone().with_exp(v, 0), c.clone());
            }
        }
        out
    }

    /// Terms selected by a predicate, keeping the certificate.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial, &R::Elem) -> bool) -> Self {
        let mut out = Poly { ring: self.ring.clone(), d: self.d, terms: BTreeMap::new(), trunc: self.trunc };
        for (m, c) in &self.terms {
            if keep(m, c) {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Substitutes `replacement` for `v`, expanding and truncating at `limit`.
    pub fn substitute(&self, v: Var, replacement: &Self, limit: Option<u32>) -> Self {
        self.power_substitute(v, 1, replacement, limit)
    }

    /// Rewrites every `v^e` as `v^(e mod k) * replacement^(e div k)`.
    pub fn power_substitute(&self, v: Var, k: u32, replacement: &Self, limit: Option<u32>) -> Self {
        assert!(k >= 1, "power must be positive");
        let mut out = Poly { ring: self.ring.clone(), d: self.d, terms: BTreeMap::new(), trunc: self.trunc };
        let mut powers: Vec<Self> = vec![Poly::one(self.ring.clone(), self.d)];
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let q = (e / k) as usize;
            if q == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            while powers.len() <= q {
                let next = powers.last().unwrap().mul_trunc(replacement, limit);
                powers.push(next);
            }
            let base = m.clone().with_exp(v, e % k);
            let piece = powers[q].mul_monomial(&base, c).truncated(limit);
            out = out.add(&piece);
        }
        out.truncated(limit)
    }

    /// Maps coefficients into another ring, dropping those that become zero.
    pub fn map_ring<S: Ring>(&self, ring: S, mut f: impl FnMut(&R::Elem) -> S::Elem) -> Poly<S> {
        let mut out = Poly::zero(ring, self.d);
        out.trunc = self.trunc;
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn try_map_ring<S: Ring, E>(
        &self,
        ring: S,
        mut f: impl FnMut(&R::Elem) -> Result<S::Elem, E>,
    ) -> Result<Poly<S>, E> {
        let mut out = Poly::zero(ring, self.d);
        out.trunc = self.trunc;
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn from_integer(ring: R, d: usize, n: i64) -> Self {
        let c = ring.from_integer(&BigInt::from(n));
        Poly::constant(ring, d, c)
    }
}

impl Poly<Field> {
    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. Both operands must be exact.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert!(self.is_exact() && divisor.is_exact(), "exact division needs exact operands");
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let lc_inv = self.ring.inv(&lc)?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.ring.clone(), self.d);
        while let Some((m, c)) = rem.leading_term() {
            let q = lm.quotient_of(m)?;
            let qc = self.ring.mul(c, &lc_inv);
            rem = rem.sub(&divisor.mul_monomial(&q, &qc));
            quot.add_term(q, qc);
        }
        Some(quot)
    }
}

impl<R: Ring> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let (neg, mag) = self.ring.render(c);
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<R: Ring> ops::Add for &Poly<R> {
    type Output = Poly<R>;
    fn add(self, rhs: Self) -> Poly<R> {
        Poly::add(self, rhs)
    }
}

impl<R: Ring> ops::Sub for &Poly<R> {
    type Output = Poly<R>;
    fn sub(self, rhs: Self) -> Poly<R> {
        Poly::sub(self, rhs)
    }
}

impl<R: Ring> ops::Mul for &Poly<R> {
    type Output = Poly<R>;
    fn mul(self, rhs: Self) -> Poly<R> {
        self.mul_trunc(rhs, None)
    }
}

impl<R: Ring> ops::Neg for &Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Poly<R> {
        Poly::neg(self)
    }
}
