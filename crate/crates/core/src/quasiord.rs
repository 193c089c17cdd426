//! Discriminants by Sylvester resultants, the monomial-times-unit test, and
//! the combined Teissier / quasi-ordinary classification.

use std::fmt;

use num_bigint::BigInt;

use crate::error::Result;
use crate::kappa::{compute_kappa, KappaConfig, KappaOutcome, Terminal};
use crate::poly::{Poly, Var, WeierstrassPoly};
use crate::ring::Ring;

/// Matrices up to this size are expanded by cofactors; larger ones use Bareiss.
pub const COFACTOR_LIMIT: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialUnit {
    Yes(Vec<u32>),
    No,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminantReport {
    /// The raw resultant `Res_z(f, df/dz)`, without sign normalization.
    pub disc: Poly,
    pub exact: bool,
    pub monomial_unit: MonomialUnit,
}

/// `df/dz`.
pub fn derivative_z(f: &Poly) -> Poly {
    let field = f.ring();
    let mut out = Poly::zero(field.clone(), f.d()).with_certificate(f.truncation());
    for (m, c) in f.terms() {
        let b = m.exp(Var::Z);
        if b > 0 {
            let k = field.from_integer(&BigInt::from(b));
            out.add_term(m.clone().with_exp(Var::Z, b - 1), field.mul(&k, c));
        }
    }
    out
}

/// Coefficients of `f` in `z`, from degree `deg` down to 0.
fn z_coefficients(f: &Poly, deg: u32) -> Vec<Poly> {
    (0..=deg).rev().map(|k| f.coefficient_of(Var::Z, k)).collect()
}

/// The Sylvester matrix of `f` (degree `n`) and `g` (degree `m`) in `z`.
pub fn sylvester_matrix(f: &Poly, g: &Poly) -> Vec<Vec<Poly>> {
    let n = f.degree_in(Var::Z) as usize;
    let m = g.degree_in(Var::Z) as usize;
    let zero = Poly::zero(f.ring().clone(), f.d());
    let fc = z_coefficients(f, n as u32);
    let gc = z_coefficients(g, m as u32);
    let size = n + m;
    let mut rows = Vec::with_capacity(size);
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (j, c) in fc.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (j, c) in gc.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

fn cofactor_det(m: &[Vec<Poly>], limit: Option<u32>) -> Poly {
    let size = m.len();
    if size == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero(m[0][0].ring().clone(), m[0][0].d());
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = a.mul_trunc(&cofactor_det(&minor, limit), limit);
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Fraction-free Gaussian elimination; every division is exact.
pub fn bareiss_det(mut m: Vec<Vec<Poly>>) -> Poly {
    let size = m.len();
    let field = m[0][0].ring().clone();
    let d = m[0][0].d();
    let mut sign = false;
    let mut prev = Poly::one(field.clone(), d);
    for k in 0..size.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..size).find(|&r| !m[r][k].is_zero()) else {
                return Poly::zero(field, d);
            };
            m.swap(k, r);
            sign = !sign;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = m[i][j].mul_trunc(&m[k][k], None).sub(&m[i][k].mul_trunc(&m[k][j], None));
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[size - 1][size - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

pub fn determinant(m: Vec<Vec<Poly>>, limit: Option<u32>) -> Poly {
    assert!(!m.is_empty(), "determinant of an empty matrix");
    if m.len() <= COFACTOR_LIMIT || limit.is_some() {
        cofactor_det(&m, limit)
    } else {
        bareiss_det(m)
    }
}

pub fn discriminant_z(f: &WeierstrassPoly, limit: Option<u32>) -> DiscriminantReport {
    let exact = f.poly.is_exact();
    let cert = if exact { None } else { f.poly.truncation().map(|t| t.min(limit.unwrap_or(u32::MAX))) };
    let known = Poly::from_terms(f.field().clone(), f.d(), f.poly.terms().map(|(m, c)| (m.clone(), c.clone())));
    let df = derivative_z(&known);
    let field = known.ring().clone();
    let d = known.d();
    let disc = if df.is_zero() {
        Poly::zero(field, d)
    } else if df.degree_in(Var::Z) == 0 {
        df.pow_trunc(f.n, cert)
    } else {
        determinant(sylvester_matrix(&known, &df), cert)
    };
    let disc = match cert {
        Some(t) => disc.with_certificate(Some(t)),
        None => disc,
    };
    let monomial_unit = is_monomial_times_unit(&disc, exact);
    DiscriminantReport { disc, exact, monomial_unit }
}

/// Whether `g` is `x^A` times a unit of the power-series ring.
pub fn is_monomial_times_unit(g: &Poly, exact: bool) -> MonomialUnit {
    assert!(g.aux_len() == 0, "the test applies to x-only series");
    if g.is_zero() {
        return if exact { MonomialUnit::No } else { MonomialUnit::Inconclusive };
    }
    let Some((a, _)) = g.terms().find(|(m, _)| g.terms().all(|(n, _)| m.divides(n))) else {
        return MonomialUnit::No;
    };
    let a = a.clone();
    let cofactor_constant = g.coeff(&a);
    assert!(!g.ring().is_zero(&cofactor_constant), "cofactor of x^A has a nonzero constant term");
    if exact || a.is_one() {
        MonomialUnit::Yes(a.x_exps().to_vec())
    } else {
        MonomialUnit::Inconclusive
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriState {
    True,
    False,
    Inconclusive,
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriState::True => "true",
            TriState::False => "false",
            TriState::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub kappa: KappaOutcome,
    pub teissier: TriState,
    pub quasi_ordinary: TriState,
    pub discriminant: DiscriminantReport,
}

pub fn teissier_state(t: Terminal) -> TriState {
    match t {
        Terminal::Infinity => TriState::True,
        Terminal::MinusOne => TriState::False,
        Terminal::Inconclusive => TriState::Inconclusive,
    }
}

pub fn classify(f: &WeierstrassPoly, config: &KappaConfig) -> Result<Classification> {
    let kappa = compute_kappa(f, config)?;
    let discriminant = discriminant_z(f, Some(config.truncation));
    let quasi_ordinary = match discriminant.monomial_unit {
        MonomialUnit::Yes(_) => TriState::True,
        MonomialUnit::No => TriState::False,
        MonomialUnit::Inconclusive => TriState::Inconclusive,
    };
    Ok(Classification { teissier: teissier_state(kappa.invariant.terminal), quasi_ordinary, kappa, discriminant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, weierstrass_validate, VarContext};
    use crate::ring::Field;

    fn wp(s: &str, d: usize, field: &Field) -> WeierstrassPoly {
        weierstrass_validate(&parse_polynomial(s, &VarContext::new(d, 1), field).unwrap()).unwrap()
    }

    fn px(s: &str, d: usize, field: &Field) -> Poly {
        parse_polynomial(s, &VarContext::new(d, 1), field).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        let f2 = Field::prime(2).unwrap();
        let r = discriminant_z(&wp("z^2 - x1*x2*z - x1^3*x2 - x1*x2^3", 2, &f2), None);
        assert_eq!(r.disc.to_string(), "x1^2*x2^2");
        assert_eq!(r.monomial_unit, MonomialUnit::Yes(vec![2, 2]));
        let r = discriminant_z(&wp("z^2 - x1^3", 1, &f2), None);
        assert!(r.disc.is_zero());
        assert_eq!(r.monomial_unit, MonomialUnit::No);
        let q = Field::rational();
        let r = discriminant_z(&wp("z^2 - x1^3", 1, &q), None);
        assert_eq!(r.disc.to_string(), "-4*x1^3");
    }

    #[test]
    fn monomial_unit_examples() {
        let q = Field::rational();
        assert_eq!(is_monomial_times_unit(&px("x1^2*x2^2", 2, &q), true), MonomialUnit::Yes(vec![2, 2]));
        assert_eq!(is_monomial_times_unit(&px("0", 2, &q), true), MonomialUnit::No);
        assert_eq!(is_monomial_times_unit(&px("x1^3 + x2^3", 2, &q), true), MonomialUnit::No);
        assert_eq!(is_monomial_times_unit(&px("x1^2 + x1^3*x2", 2, &q), true), MonomialUnit::Yes(vec![2, 0]));
        let lossy = px("x1^2", 2, &q).with_certificate(Some(5));
        assert_eq!(is_monomial_times_unit(&lossy, false), MonomialUnit::Inconclusive);
        let unit = px("1 + x1", 2, &q).with_certificate(Some(5));
        assert_eq!(is_monomial_times_unit(&unit, false), MonomialUnit::Yes(vec![0, 0]));
    }

    #[test]
    fn bareiss_matches_cofactors() {
        let q = Field::rational();
        let f = px("z^4 - 2*x1*z^3 + x2*z - x1^5", 2, &q);
        let m = sylvester_matrix(&f, &derivative_z(&f));
        assert_eq!(m.len(), 7);
        assert_eq!(bareiss_det(m.clone()), cofactor_det(&m, None));
    }

    #[test]
    fn classification_examples() {
        let f2 = Field::prime(2).unwrap();
        let c = classify(&wp("z^2 - x1*x2*z - x1^3*x2 - x1*x2^3", 2, &f2), &KappaConfig::default()).unwrap();
        assert_eq!((c.teissier, c.quasi_ordinary), (TriState::False, TriState::True));
        let c = classify(&wp("z^2 - x1^3", 1, &f2), &KappaConfig::default()).unwrap();
        assert_eq!((c.teissier, c.quasi_ordinary), (TriState::True, TriState::False));
        let c = classify(&wp("(z^2 - x1^3*x2^6)^4 - x1^15*x2^30", 2, &f2), &KappaConfig::default()).unwrap();
        assert_eq!((c.teissier, c.quasi_ordinary), (TriState::True, TriState::False));
    }
}
