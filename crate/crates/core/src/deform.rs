//! Integer lift of an overweight presentation over `GF(p)`: elimination back to
//! a hypersurface, ghost monomials, and weighted initial forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::kappa::OverweightPresentation;
use crate::poly::{Monomial, Poly, Var};
use crate::polyhedron::QPoint;
use crate::ring::{reduce_coeff, Field, IntCoeff, Integers, Ring};

type Q = BigRational;

/// `var = rhs` over the integers, with `rhs = main^exponent - coeff*tail + h`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntRelation {
    pub var: Var,
    pub main: Var,
    pub exponent: u32,
    pub coeff: IntCoeff,
    pub tail: Monomial,
    pub rhs: Poly<Integers>,
}

impl IntRelation {
    pub fn generator(&self) -> Poly<Integers> {
        Poly::var(Integers, self.rhs.d(), self.var).sub(&self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegerLift {
    pub p: u64,
    pub relations: Vec<IntRelation>,
    pub final_eq: Poly<Integers>,
    pub weights: Vec<QPoint>,
}

impl IntegerLift {
    pub fn d(&self) -> usize {
        self.final_eq.d()
    }

    /// The generators `u_j - rhs_j`, then the final equation.
    pub fn generators(&self) -> Vec<Poly<Integers>> {
        let mut out: Vec<_> = self.relations.iter().map(IntRelation::generator).collect();
        out.push(self.final_eq.clone());
        out
    }

    /// The special fiber: every generator reduced mod `p`.
    pub fn reduce(&self) -> Result<Vec<Poly>> {
        let field = Field::prime(self.p)?;
        Ok(self.generators().iter().map(|g| reduce_poly(g, &field)).collect())
    }
}

pub fn reduce_poly(f: &Poly<Integers>, field: &Field) -> Poly {
    let p = field.characteristic();
    f.map_ring(field.clone(), |c| reduce_coeff(c, p))
}

/// The generic-fiber view over `Q`.
pub fn rational_view(f: &Poly<Integers>) -> Poly {
    f.map_ring(Field::rational(), |c| crate::ring::Coeff::Rational(Q::from_integer(c.clone())))
}

/// Lifts every coefficient to its canonical representative in `0..p`.
pub fn lift_presentation(pres: &OverweightPresentation) -> Result<IntegerLift> {
    let field = pres.field();
    let p = match field {
        Field::Prime(p) => *p,
        Field::Extension(_) => {
            return Err(Error::UnsupportedLift(format!("coefficients in {field} have no canonical integer lift")));
        }
        Field::Rational => {
            return Err(Error::UnsupportedLift("characteristic 0 presentations have no distinguished prime".into()));
        }
    };
    let lift = |f: &Poly| f.try_map_ring(Integers, |c| field.lift_coeff(c));
    let mut relations = Vec::with_capacity(pres.relations.len());
    for r in &pres.relations {
        let coeff = field.lift_coeff(&r.coeff)?;
        let d = r.rhs.d();
        let mut rhs = Poly::term(Integers, Monomial::one(d).with_exp(r.main, r.exponent), BigInt::from(1));
        rhs.add_term(r.tail.clone(), -coeff.clone());
        let rhs = rhs.add(&lift(&r.h())?);
        relations.push(IntRelation {
            var: r.var,
            main: r.main,
            exponent: r.exponent,
            coeff,
            tail: r.tail.clone(),
            rhs,
        });
    }
    Ok(IntegerLift { p, relations, final_eq: lift(&pres.final_eq)?, weights: pres.weights.clone() })
}

/// Substitutes the relations into the final equation, highest variable first.
pub fn eliminate_to_hypersurface(lift: &IntegerLift) -> Poly<Integers> {
    let mut f = lift.final_eq.clone();
    for r in lift.relations.iter().rev() {
        f = f.substitute(r.var, &r.rhs, None);
    }
    f
}

#[derive(Clone, Debug, PartialEq)]
pub struct GhostReport {
    /// `(monomial, coefficient)` with the coefficient a nonzero multiple of `p`.
    pub ghosts: Vec<(Monomial, IntCoeff)>,
    pub hypersurface: Poly<Integers>,
}

pub fn ghost_monomials(lift: &IntegerLift) -> GhostReport {
    let hypersurface = eliminate_to_hypersurface(lift);
    let p = BigInt::from(lift.p);
    let ghosts: Vec<_> =
        hypersurface.terms().filter(|(_, c)| c.is_multiple_of(&p)).map(|(m, c)| (m.clone(), c.clone())).collect();
    assert!(ghosts.iter().all(|(_, c)| !c.is_zero() && c.is_multiple_of(&p)));
    GhostReport { ghosts, hypersurface }
}

/// Positive weights for `x1..xd, z, u1, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVectorOmega(Vec<Q>);

impl WeightVectorOmega {
    pub fn new(omega: Vec<Q>) -> Result<Self> {
        if omega.iter().any(|w| !w.is_positive()) {
            return Err(Error::Config("weight vector components must be strictly positive".into()));
        }
        Ok(WeightVectorOmega(omega))
    }

    pub fn components(&self) -> &[Q] {
        &self.0
    }

    /// `<omega, exponents>`, or `None` if a variable has no component.
    pub fn weight(&self, d: usize, m: &Monomial) -> Option<Q> {
        let mut w = Q::zero();
        for (v, e) in m.vars() {
            let idx = match v {
                Var::X(i) => i,
                Var::Aux(k) => d + k,
            };
            w += self.0.get(idx)? * Q::from_integer(e.into());
        }
        Some(w)
    }
}

/// `omega_x = lambda`, `omega_z = <lambda, v1>`, `omega_{u_j} = <lambda, v_{j+1}>`.
pub fn default_tropical_weight(pres: &OverweightPresentation, lambda: &[Q]) -> Result<WeightVectorOmega> {
    if lambda.len() != pres.d() {
        return Err(Error::Config(format!("lambda needs {} components, got {}", pres.d(), lambda.len())));
    }
    if lambda.iter().any(|l| !l.is_positive()) {
        return Err(Error::Config("lambda components must be strictly positive".into()));
    }
    let mut omega = lambda.to_vec();
    omega.extend(pres.weights.iter().map(|v| v.dot(lambda)));
    WeightVectorOmega::new(omega)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialIdealReport {
    /// Initial form of each generator, sign-normalized so the first printed
    /// coefficient is positive.
    pub generators: Vec<Poly<Integers>>,
    pub fiber_independent: bool,
    /// The first initial coefficient that is not a unit mod `p`.
    pub witness: Option<IntCoeff>,
}

/// Keeps the terms of minimal `omega`-weight in each generator.
pub fn initial_form_weighted(f: &Poly<Integers>, omega: &WeightVectorOmega) -> Result<Poly<Integers>> {
    let d = f.d();
    let mut weighted = Vec::with_capacity(f.len());
    for (m, c) in f.terms() {
        let w = omega
            .weight(d, m)
            .ok_or_else(|| Error::Config(format!("weight vector has no component for a variable of {m}")))?;
        weighted.push((w, m, c));
    }
    let Some(min) = weighted.iter().map(|(w, _, _)| w).min().cloned() else {
        return Ok(f.clone());
    };
    Ok(Poly::from_terms(
        Integers,
        d,
        weighted.into_iter().filter(|(w, _, _)| *w == min).map(|(_, m, c)| (m.clone(), c.clone())),
    ))
}

pub fn initial_forms_weighted(lift: &IntegerLift, omega: &WeightVectorOmega) -> Result<InitialIdealReport> {
    let p = BigInt::from(lift.p);
    let mut generators = Vec::new();
    let mut witness = None;
    for g in lift.generators() {
        let mut init = initial_form_weighted(&g, omega)?;
        if init.leading_term().is_some_and(|(_, c)| c.is_negative()) {
            init = init.neg();
        }
        if witness.is_none() {
            witness = init.terms().map(|(_, c)| c).find(|c| c.is_multiple_of(&p)).cloned();
        }
        generators.push(init);
    }
    Ok(InitialIdealReport { generators, fiber_independent: witness.is_none(), witness })
}
