//! Exact coefficient rings.
//!
//! Three coefficient domains are supported: the rationals, prime fields
//! `GF(p)` and their small extensions `GF(p^k)`, and the integers (used for
//! mixed-characteristic lifts). Polynomials are generic over [`Ring`]; the
//! field operations needed by the invariant engine live on [`Field`].

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest finite field (number of elements) the crate accepts.
///
/// Root extraction and irreducibility checks enumerate the field.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// A commutative ring with exactly represented elements.
#[allow(clippy::wrong_self_convention)]
pub trait Ring: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of an integer under the canonical map `Z -> R`.
    fn from_integer(&self, n: &BigInt) -> Self::Elem;
    /// The element `num / den`, or `None` when `den` is not invertible.
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_unit(&self, a: &Self::Elem) -> bool;
    fn characteristic(&self) -> u64;
    /// Sign and magnitude text used by the canonical printer.
    fn render(&self, a: &Self::Elem) -> (bool, String);

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut k: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// The integers, the desk-scale stand-in for a mixed-characteristic
/// coefficient ring.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

/// An integer coefficient.
pub type IntCoeff = BigInt;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_integer(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<BigInt> {
        if den.is_zero() {
            return None;
        }
        let (q, r) = num.div_rem(den);
        r.is_zero().then_some(q)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn render(&self, a: &BigInt) -> (bool, String) {
        (a.is_negative(), a.abs().to_string())
    }
}

/// Parameters of `GF(p^k)`, `k > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Extension {
    p: u64,
    /// Monic modulus, coefficients from low to high degree (length `k + 1`).
    modulus: Vec<u64>,
}

impl Extension {
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let k = self.degree();
        let p = self.p;
        while v.len() > k {
            let top = v.pop().unwrap() % p;
            if top != 0 {
                let shift = v.len() - k;
                for (i, &m) in self.modulus[..k].iter().enumerate() {
                    let slot = &mut v[shift + i];
                    *slot = (*slot + p - mulmod(top, m, p)) % p;
                }
            }
        }
        v.resize(k, 0);
        v
    }
}

/// A coefficient field: `Q`, `GF(p)` or `GF(p^k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Field {
    Rational,
    Prime(u64),
    Extension(Arc<Extension>),
}

/// A field element in canonical form.
///
/// Rationals are kept in lowest terms with positive denominator; prime field
/// elements lie in `0..p`; extension elements are coefficient vectors of
/// length `k` over `0..p`, reduced modulo the defining polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coeff {
    Rational(BigRational),
    Prime(u64),
    Extension(Vec<u64>),
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while k > 0 {
        if k & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        k >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i.saturating_mul(i) <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

/// Remainder of `a` modulo the monic `b` over GF(p); both low-to-high.
fn poly_rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r.pop().unwrap() % p;
        if lead != 0 {
            let shift = r.len() - db;
            for (i, &c) in b[..db].iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - mulmod(lead, c, p)) % p;
            }
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

impl Field {
    pub fn rational() -> Self {
        Field::Rational
    }

    /// `GF(p)`; fails unless `p` is a prime within [`MAX_FIELD_SIZE`].
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > MAX_FIELD_SIZE {
            return Err(Error::InvalidField(format!("GF({p}) exceeds the supported field size {MAX_FIELD_SIZE}")));
        }
        Ok(Field::Prime(p))
    }

    /// `GF(p^k)` defined by a monic modulus given low-to-high.
    ///
    /// The modulus is checked for irreducibility by trial division by every
    /// monic polynomial of degree at most `k / 2`.
    pub fn extension(p: u64, modulus: &[u64]) -> Result<Self> {
        Field::prime(p)?;
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        let k = modulus.len().saturating_sub(1);
        if k == 0 {
            return Err(Error::InvalidField("modulus must have positive degree".into()));
        }
        if modulus[k] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if k == 1 {
            return Ok(Field::Prime(p));
        }
        match p.checked_pow(k as u32) {
            Some(q) if q <= MAX_FIELD_SIZE => {}
            _ => {
                return Err(Error::InvalidField(format!(
                    "GF({p}^{k}) exceeds the supported field size {MAX_FIELD_SIZE}"
                )))
            }
        }
        for deg in 1..=k / 2 {
            let count = p.pow(deg as u32);
            for idx in 0..count {
                let mut divisor = Vec::with_capacity(deg + 1);
                let mut rest = idx;
                for _ in 0..deg {
                    divisor.push(rest % p);
                    rest /= p;
                }
                divisor.push(1);
                if poly_rem_mod_p(&modulus, &divisor, p).is_empty() {
                    return Err(Error::InvalidField(format!(
                        "modulus is reducible over GF({p}) (factor of degree {deg})"
                    )));
                }
            }
        }
        Ok(Field::Extension(Arc::new(Extension { p, modulus })))
    }

    /// Number of elements, or `None` for `Q`.
    pub fn size(&self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => Some(*p),
            Field::Extension(ext) => Some(ext.p.pow(ext.degree() as u32)),
        }
    }

    pub fn extension_degree(&self) -> usize {
        match self {
            Field::Extension(ext) => ext.degree(),
            _ => 1,
        }
    }

    /// Elements in enumeration order (canonical vector read as a base-p
    /// number, lowest coefficient least significant). Finite fields only.
    pub fn elements(&self) -> Vec<Coeff> {
        match self {
            Field::Rational => Vec::new(),
            Field::Prime(p) => (0..*p).map(Coeff::Prime).collect(),
            Field::Extension(ext) => {
                let q = ext.p.pow(ext.degree() as u32);
                (0..q)
                    .map(|mut idx| {
                        let mut v = Vec::with_capacity(ext.degree());
                        for _ in 0..ext.degree() {
                            v.push(idx % ext.p);
                            idx /= ext.p;
                        }
                        Coeff::Extension(v)
                    })
                    .collect()
            }
        }
    }

    pub fn rational_value(&self, r: BigRational) -> Coeff {
        self.from_ratio(r.numer(), r.denom()).expect("nonzero denominator")
    }

    pub fn inv(&self, a: &Coeff) -> Option<Coeff> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (Field::Rational, Coeff::Rational(r)) => Some(Coeff::Rational(r.recip())),
            (Field::Prime(p), Coeff::Prime(v)) => Some(Coeff::Prime(powmod(*v, p - 2, *p))),
            (Field::Extension(_), Coeff::Extension(_)) => {
                let q = self.size().unwrap();
                Some(self.pow(a, q - 2))
            }
            _ => panic!("coefficient {a:?} does not belong to {self:?}"),
        }
    }

    pub fn div(&self, a: &Coeff, b: &Coeff) -> Option<Coeff> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// All `c` with `c^n = a`, in the field's enumeration order.
    ///
    /// For `Q` the order is: positive (or sign-matching) root first.
    pub fn nth_roots(&self, a: &Coeff, n: u32) -> Vec<Coeff> {
        assert!(n >= 1, "root degree must be positive");
        match (self, a) {
            (Field::Rational, Coeff::Rational(r)) => {
                if r.is_zero() {
                    return vec![a.clone()];
                }
                let root_abs = |x: &BigInt| -> Option<BigInt> {
                    let x = x.abs();
                    let s = x.nth_root(n);
                    (num_traits::pow(s.clone(), n as usize) == x).then_some(s)
                };
                let (Some(num), Some(den)) = (root_abs(r.numer()), root_abs(r.denom())) else {
                    return Vec::new();
                };
                let pos = BigRational::new(num, den);
                if n % 2 == 1 {
                    let root = if r.is_negative() { -pos } else { pos };
                    vec![Coeff::Rational(root)]
                } else if r.is_negative() {
                    Vec::new()
                } else {
                    vec![Coeff::Rational(pos.clone()), Coeff::Rational(-pos)]
                }
            }
            _ => self.elements().into_iter().filter(|c| self.pow(c, n as u64) == *a).collect(),
        }
    }

    /// The deterministic `n`-th root of `a`, if one exists in the field.
    pub fn nth_root(&self, a: &Coeff, n: u32) -> Option<Coeff> {
        self.nth_roots(a, n).into_iter().next()
    }

    /// Canonical integer lift of a prime-field element.
    pub fn lift_coeff(&self, a: &Coeff) -> Result<IntCoeff> {
        match (self, a) {
            (Field::Prime(_), Coeff::Prime(v)) => Ok(BigInt::from(*v)),
            (Field::Extension(ext), _) => {
                Err(Error::UnsupportedLift(format!("GF({}^{}) coefficients have no integer lift", ext.p, ext.degree())))
            }
            (Field::Rational, _) => {
                Err(Error::UnsupportedLift("characteristic-0 coefficients have no distinguished prime".into()))
            }
            _ => panic!("coefficient {a:?} does not belong to {self:?}"),
        }
    }
}

/// Reduction `Z -> GF(p)`.
pub fn reduce_coeff(n: &IntCoeff, p: u64) -> Coeff {
    Coeff::Prime(bigint_mod(n, p))
}

impl Ring for Field {
    type Elem = Coeff;

    fn zero(&self) -> Coeff {
        match self {
            Field::Rational => Coeff::Rational(BigRational::zero()),
            Field::Prime(_) => Coeff::Prime(0),
            Field::Extension(ext) => Coeff::Extension(vec![0; ext.degree()]),
        }
    }

    fn one(&self) -> Coeff {
        self.from_integer(&BigInt::one())
    }

    fn from_integer(&self, n: &BigInt) -> Coeff {
        match self {
            Field::Rational => Coeff::Rational(BigRational::from_integer(n.clone())),
            Field::Prime(p) => Coeff::Prime(bigint_mod(n, *p)),
            Field::Extension(ext) => {
                let mut v = vec![0; ext.degree()];
                v[0] = bigint_mod(n, ext.p);
                Coeff::Extension(v)
            }
        }
    }

    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Option<Coeff> {
        if den.is_zero() {
            return None;
        }
        match self {
            Field::Rational => Some(Coeff::Rational(BigRational::new(num.clone(), den.clone()))),
            _ => {
                let d = self.from_integer(den);
                self.div(&self.from_integer(num), &d)
            }
        }
    }

    fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (Field::Rational, Coeff::Rational(x), Coeff::Rational(y)) => Coeff::Rational(x + y),
            (Field::Prime(p), Coeff::Prime(x), Coeff::Prime(y)) => Coeff::Prime((x + y) % p),
            (Field::Extension(ext), Coeff::Extension(x), Coeff::Extension(y)) => {
                Coeff::Extension(x.iter().zip(y).map(|(s, t)| (s + t) % ext.p).collect())
            }
            _ => panic!("mixed coefficients {a:?}, {b:?} in {self:?}"),
        }
    }

    fn neg(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (Field::Rational, Coeff::Rational(x)) => Coeff::Rational(-x),
            (Field::Prime(p), Coeff::Prime(x)) => Coeff::Prime((p - x) % p),
            (Field::Extension(ext), Coeff::Extension(x)) => {
                Coeff::Extension(x.iter().map(|s| (ext.p - s) % ext.p).collect())
            }
            _ => panic!("coefficient {a:?} does not belong to {self:?}"),
        }
    }

    fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (Field::Rational, Coeff::Rational(x), Coeff::Rational(y)) => Coeff::Rational(x * y),
            (Field::Prime(p), Coeff::Prime(x), Coeff::Prime(y)) => Coeff::Prime(mulmod(*x, *y, *p)),
            (Field::Extension(ext), Coeff::Extension(x), Coeff::Extension(y)) => {
                let p = ext.p;
                let mut prod = vec![0u64; x.len() + y.len() - 1];
                for (i, &s) in x.iter().enumerate() {
                    if s == 0 {
                        continue;
                    }
                    for (j, &t) in y.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + mulmod(s, t, p)) % p;
                    }
                }
                Coeff::Extension(ext.reduce(prod))
            }
            _ => panic!("mixed coefficients {a:?}, {b:?} in {self:?}"),
        }
    }

    fn is_zero(&self, a: &Coeff) -> bool {
        match a {
            Coeff::Rational(x) => x.is_zero(),
            Coeff::Prime(x) => *x == 0,
            Coeff::Extension(v) => v.iter().all(|&c| c == 0),
        }
    }

    fn is_unit(&self, a: &Coeff) -> bool {
        !self.is_zero(a)
    }

    fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
            Field::Extension(ext) => ext.p,
        }
    }

    fn render(&self, a: &Coeff) -> (bool, String) {
        match a {
            Coeff::Rational(r) => (r.is_negative(), r.abs().to_string()),
            Coeff::Prime(v) => (false, v.to_string()),
            Coeff::Extension(v) => {
                if v[1..].iter().all(|&c| c == 0) {
                    return (false, v[0].to_string());
                }
                let mut parts = Vec::new();
                for (i, &c) in v.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let gen = match i {
                        0 => String::new(),
                        1 => "a".to_string(),
                        _ => format!("a^{i}"),
                    };
                    parts.push(match (c, i) {
                        (_, 0) => c.to_string(),
                        (1, _) => gen,
                        _ => format!("{c}*{gen}"),
                    });
                }
                (false, format!("({})", parts.join(" + ")))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
            Field::Extension(ext) => write!(f, "GF({}^{})", ext.p, ext.degree()),
        }
    }
}
