use num_rational::BigRational;

use super::{Monomial, Poly, Var};
use crate::error::{Error, Result};
use crate::ring::{Coeff, Field, Ring};

/// Rewriting rounds allowed in [`normal_form`] before giving up on a fixed point.
const NORMAL_FORM_ROUNDS: usize = 256;

/// An auxiliary variable slot (`z` or `u_j`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuxVar {
    pub bound: Option<u32>,
    pub weight: Option<Vec<BigRational>>,
}

/// The variables `x1..xd` together with the auxiliary tower `z, u1, u2, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarContext {
    d: usize,
    aux: Vec<AuxVar>,
}

impl VarContext {
    /// `aux_count` counts `z` as well: `new(d, 1)` allows only `z`.
    pub fn new(d: usize, aux_count: usize) -> Self {
        VarContext { d, aux: vec![AuxVar::default(); aux_count.max(1)] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn aux_len(&self) -> usize {
        self.aux.len()
    }

    pub fn aux(&self, k: usize) -> &AuxVar {
        &self.aux[k]
    }

    /// Appends a new auxiliary variable and returns it.
    pub fn push_aux(&mut self) -> Var {
        self.aux.push(AuxVar::default());
        Var::Aux(self.aux.len() - 1)
    }

    pub fn set_bound(&mut self, k: usize, bound: u32) {
        assert!(bound >= 1, "degree bounds are positive");
        self.aux[k].bound = Some(bound);
    }

    pub fn set_weight(&mut self, k: usize, weight: Vec<BigRational>) {
        assert_eq!(weight.len(), self.d, "weight dimension mismatch");
        self.aux[k].weight = Some(weight);
    }
}

/// `var = rhs`, where `rhs = main^exponent - coeff*tail + h` and `h` is the
/// overweight remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub var: Var,
    pub main: Var,
    pub exponent: u32,
    pub coeff: Coeff,
    pub tail: Monomial,
    pub rhs: Poly,
}

impl Relation {
    /// Builds `u_j = w^n - c*tail + h` with `w = u_{j-1}` (or `z` for `j = 1`).
    pub fn new(j: usize, exponent: u32, coeff: Coeff, tail: Monomial, h: Poly) -> Self {
        let mut r = Relation { var: Var::u(j), main: Var::Aux(j - 1), exponent, coeff, tail, rhs: h.clone() };
        r.rhs = r.head().add(&h);
        r
    }

    pub fn field(&self) -> &Field {
        self.rhs.ring()
    }

    /// The binomial `w^n - c*tail`.
    pub fn head(&self) -> Poly {
        let field = self.field().clone();
        let d = self.rhs.d();
        let mut p = Poly::term(field.clone(), Monomial::one(d).with_exp(self.main, self.exponent), field.one());
        p.add_term(self.tail.clone(), field.neg(&self.coeff));
        p
    }

    /// The remainder `rhs - head`.
    pub fn h(&self) -> Poly {
        self.rhs.sub(&self.head())
    }

    /// `w^n` expressed through the relation: `var + c*tail - h`.
    pub fn power_replacement(&self) -> Poly {
        let field = self.field().clone();
        let d = self.rhs.d();
        let mut p = Poly::var(field.clone(), d, self.var);
        p.add_term(self.tail.clone(), self.coeff.clone());
        p.sub(&self.h())
    }

    /// The generator `var - rhs` of the presentation ideal.
    pub fn generator(&self) -> Poly {
        Poly::var(self.field().clone(), self.rhs.d(), self.var).sub(&self.rhs)
    }
}

/// Rewrites every `w_j^{n_j}` downward through the relation stack until each
/// bounded variable is below its bound, truncating at `limit`.
pub fn normal_form(f: &Poly, relations: &[Relation], limit: Option<u32>) -> Poly {
    let replacements: Vec<Poly> = relations.iter().map(Relation::power_replacement).collect();
    let mut g = f.clone().truncated(limit);
    for _ in 0..NORMAL_FORM_ROUNDS {
        let mut changed = false;
        for (r, rep) in relations.iter().zip(&replacements) {
            if g.degree_in(r.main) >= r.exponent {
                g = g.power_substitute(r.main, r.exponent, rep, limit);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    g
}

/// A polynomial monic in `z` of degree `n` with vanishing constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassPoly {
    pub poly: Poly,
    pub n: u32,
}

impl WeierstrassPoly {
    pub fn d(&self) -> usize {
        self.poly.d()
    }

    pub fn field(&self) -> &Field {
        self.poly.ring()
    }
}

pub fn weierstrass_validate(f: &Poly) -> Result<WeierstrassPoly> {
    if f.aux_len() > 1 {
        return Err(Error::Validation("contains auxiliary variables other than z".into()));
    }
    let n = f.degree_in(Var::Z);
    if n == 0 {
        return Err(Error::Validation("z-degree must be at least 1".into()));
    }
    let top = f.coefficient_of(Var::Z, n);
    let monic = top.len() == 1 && top.coeff(&Monomial::one(f.d())) == f.ring().one();
    if !monic {
        return Err(Error::Validation(format!("not monic in z (leading coefficient {top})")));
    }
    if !f.ring().is_zero(&f.coeff(&Monomial::one(f.d()))) {
        return Err(Error::Validation("f(0) is not zero".into()));
    }
    Ok(WeierstrassPoly { poly: f.clone(), n })
}
