//! The kappa invariant: initial forms, binomial powers, translation
//! preparation of the weighted polyhedra, and the overweight presentation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly, Relation, Var, WeierstrassPoly, DEFAULT_TRUNCATION};
use crate::polyhedron::{
    hull_vertices, polyhedron_leq, weighted_projected_polyhedron, Grading, OrthantPolyhedron, QPoint,
};
use crate::ring::{Coeff, Field, Ring};

pub const DEFAULT_BUDGET: usize = 256;
pub const DEFAULT_DEPTH: usize = 3;

pub const NOT_BINOMIAL_DIAGNOSTIC: &str = "initial form not a binomial power; input may be reducible";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaConfig {
    /// Total x-degree at which series are truncated.
    pub truncation: u32,
    /// Translation steps allowed per stage.
    pub budget: usize,
    /// Depth of the rewrite search used to binomialize initial forms.
    pub depth: usize,
}

impl Default for KappaConfig {
    fn default() -> Self {
        KappaConfig { truncation: DEFAULT_TRUNCATION, budget: DEFAULT_BUDGET, depth: DEFAULT_DEPTH }
    }
}

impl KappaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truncation == 0 {
            return Err(Error::Config("truncation must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Terminal {
    MinusOne,
    Infinity,
    Inconclusive,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::MinusOne => "-1",
            Terminal::Infinity => "inf",
            Terminal::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaInvariant {
    pub vertices: Vec<QPoint>,
    pub terminal: Terminal,
    /// `n, e_1, e_2, ...` for the stages that were reached.
    pub multiplicities: Vec<u32>,
    pub certified_truncation: u32,
    pub budget_used: usize,
    pub diagnostics: Vec<String>,
}

impl fmt::Display for KappaInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.vertices.iter().map(QPoint::to_string).collect();
        parts.push(self.terminal.to_string());
        write!(f, "({})", parts.join(", "))
    }
}

/// `(w^n - c*tail)^e`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialPower {
    pub main_var: Var,
    pub n: u32,
    pub c: Coeff,
    pub tail: Monomial,
    pub e: u32,
}

impl BinomialPower {
    /// The binomial `w^n - c*tail`.
    pub fn base(&self, field: &Field) -> Poly {
        let d = self.tail.d();
        let mut p = Poly::term(field.clone(), Monomial::one(d).with_exp(self.main_var, self.n), field.one());
        p.add_term(self.tail.clone(), field.neg(&self.c));
        p
    }

    pub fn expand(&self, field: &Field) -> Poly {
        self.base(field).pow_trunc(self.e, None)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decomposition {
    Binomial(BinomialPower),
    NotBinomial,
    FieldExtensionRequired { degree: u32 },
}

/// The top term plus every term whose point under `grading` equals `v`.
pub fn initial_form(f: &Poly, v: &QPoint, grading: &Grading) -> Result<Poly> {
    let p = weighted_projected_polyhedron(f, grading)?;
    if !p.vertices().contains(v) {
        return Err(Error::Contract(format!("{v} is not a vertex of {p}")));
    }
    let top = Monomial::one(f.d()).with_exp(grading.top, grading.degree);
    let mut out = Poly::zero(f.ring().clone(), f.d());
    for (m, c) in f.terms() {
        if *m == top || grading.point(m)?.as_ref() == Some(v) {
            out.add_term(m.clone(), c.clone());
        }
    }
    Ok(out)
}

fn divisors_descending(n: u32) -> impl Iterator<Item = u32> {
    (1..=n).rev().filter(move |e| n.is_multiple_of(*e))
}

/// Recognizes `initial` as `(w^n - c*tail)^e` with `e` as large as possible.
pub fn binomial_power_decompose(initial: &Poly, main: Var) -> Result<Decomposition> {
    let field = initial.ring();
    let d = initial.d();
    let big_n = initial.degree_in(main);
    let top = Monomial::one(d).with_exp(main, big_n);
    if big_n == 0 || !field.is_one(&initial.coeff(&top)) {
        return Err(Error::Contract(format!("initial form {initial} is not monic in {main}")));
    }
    let free: Vec<_> = initial.terms().filter(|(m, _)| m.exp(main) == 0).collect();
    let [(big_m, a)] = free.as_slice() else {
        return Ok(Decomposition::NotBinomial);
    };
    for e in divisors_descending(big_n) {
        let Some(m) = big_m.root(e) else { continue };
        let n = big_n / e;
        // The first binomial coefficient C(e, k) that survives in the
        // characteristic pins c down through c^k; k is a power of p, so the
        // root is unique in a finite field.
        let char_p = field.characteristic();
        let (k, ek) = (1..=e)
            .map(|k| (k, binomial(BigInt::from(e), BigInt::from(k))))
            .find(|(_, c)| char_p == 0 || !(c % BigInt::from(char_p)).is_zero())
            .expect("C(e, e) = 1 survives");
        let probe = Monomial::one(d).with_exp(main, n * (e - k)).mul(&m.pow(k));
        let b = initial.coeff(&probe);
        if field.is_zero(&b) {
            continue;
        }
        let mut scale = field.from_integer(&ek);
        if k % 2 == 1 {
            scale = field.neg(&scale);
        }
        let target = field.div(&b, &scale).expect("surviving binomial coefficient is invertible");
        let roots = field.nth_roots(&target, k);
        if roots.is_empty() {
            if a_matches(field, a, &target, k, e) {
                return Ok(Decomposition::FieldExtensionRequired { degree: k });
            }
            continue;
        }
        for c in roots {
            let candidate = BinomialPower { main_var: main, n, c, tail: m.clone(), e };
            if candidate.expand(field) == *initial {
                return Ok(Decomposition::Binomial(candidate));
            }
        }
    }
    Ok(Decomposition::NotBinomial)
}

/// Whether the free coefficient `a = (-c)^e` is consistent with `c^k = target`.
fn a_matches(field: &Field, a: &Coeff, target: &Coeff, k: u32, e: u32) -> bool {
    // (-c)^e = (-1)^e (c^k)^(e/k)
    let mut expected = field.pow(target, (e / k) as u64);
    if e % 2 == 1 {
        expected = field.neg(&expected);
    }
    expected == *a
}

/// A binomial power found after rewriting the initial form modulo the relations.
#[derive(Clone, Debug, PartialEq)]
pub struct Binomialization {
    pub power: BinomialPower,
    pub depth: usize,
    /// Added to the stage polynomial: zero modulo the relations.
    pub delta: Poly,
    /// The rewritten initial form.
    pub initial: Poly,
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum BinomializeOutcome {
    Found(Binomialization),
    NotBinomial,
    FieldExtensionRequired { degree: u32 },
}

struct Search<'a> {
    v: &'a QPoint,
    relations: &'a [Relation],
    replacements: Vec<Poly>,
    grading: &'a Grading,
    max_depth: usize,
    limit: Option<u32>,
    best: Option<(u32, usize, BinomializeOutcome)>,
}

impl Search<'_> {
    fn offer(&mut self, e: u32, depth: usize, outcome: BinomializeOutcome) {
        let better = match &self.best {
            None => true,
            Some((be, bd, bo)) => {
                e > *be
                    || (e == *be
                        && matches!(bo, BinomializeOutcome::FieldExtensionRequired { .. })
                        && matches!(outcome, BinomializeOutcome::Found(_)))
                    || (e == *be && depth < *bd && std::mem::discriminant(bo) == std::mem::discriminant(&outcome))
            }
        };
        if better {
            self.best = Some((e, depth, outcome));
        }
    }

    fn explore(&mut self, initial: &Poly, delta: &Poly, depth: usize) -> Result<()> {
        match binomial_power_decompose(initial, self.grading.top)? {
            Decomposition::Binomial(power) => {
                let e = power.e;
                let found = Binomialization { power, depth, delta: delta.clone(), initial: initial.clone() };
                self.offer(e, depth, BinomializeOutcome::Found(found));
            }
            Decomposition::FieldExtensionRequired { degree } => {
                self.offer(degree, depth, BinomializeOutcome::FieldExtensionRequired { degree });
            }
            Decomposition::NotBinomial => {}
        }
        if depth == self.max_depth {
            return Ok(());
        }
        let top = Monomial::one(initial.d()).with_exp(self.grading.top, self.grading.degree);
        let terms: Vec<(Monomial, Coeff)> =
            initial.terms().filter(|(m, _)| **m != top).map(|(m, c)| (m.clone(), c.clone())).collect();
        for j in (0..self.relations.len()).rev() {
            for (m, a) in &terms {
                let Some(q) = self.relations[j].tail.quotient_of(m) else { continue };
                let new = self.replacements[j].mul_monomial(&q, a).truncated(self.limit);
                let mut same = Poly::zero(initial.ring().clone(), initial.d());
                let mut admissible = true;
                for (t, c) in new.terms() {
                    match self.grading.point(t)? {
                        Some(p) if p == *self.v => same.add_term(t.clone(), c.clone()),
                        Some(p) if self.v.dominated_by(&p) => {}
                        _ => {
                            admissible = false;
                            break;
                        }
                    }
                }
                if !admissible {
                    continue;
                }
                let old = Poly::term(initial.ring().clone(), m.clone(), a.clone());
                let next_initial = initial.sub(&old).add(&same);
                let next_delta = delta.sub(&old).add(&new);
                self.explore(&next_initial, &next_delta, depth + 1)?;
            }
        }
        Ok(())
    }
}

/// Searches rewrites of `initial` modulo `relations` (up to `depth` moves) for
/// a binomial power with the largest exponent; ties go to the shallowest.
pub fn binomialize_modulo(
    initial: &Poly,
    v: &QPoint,
    relations: &[Relation],
    grading: &Grading,
    depth: usize,
    limit: Option<u32>,
) -> Result<BinomializeOutcome> {
    let replacements = relations.iter().map(tail_replacement).collect::<Result<Vec<_>>>()?;
    let mut search = Search { v, relations, replacements, grading, max_depth: depth, limit, best: None };
    let zero = Poly::zero(initial.ring().clone(), initial.d());
    search.explore(initial, &zero, 0)?;
    Ok(search.best.map_or(BinomializeOutcome::NotBinomial, |(_, _, o)| o))
}

/// `tail = c^{-1} (w^n - u + h)` read off `u = w^n - c*tail + h`.
fn tail_replacement(r: &Relation) -> Result<Poly> {
    let field = r.field();
    let inv = field.inv(&r.coeff).ok_or_else(|| Error::Contract("relation coefficient is zero".into()))?;
    let d = r.rhs.d();
    let mut p = Poly::term(field.clone(), Monomial::one(d).with_exp(r.main, r.exponent), field.one());
    p.add_term(Monomial::var(d, r.var), field.neg(&field.one()));
    Ok(p.add(&r.h()).scale(&inv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrepareStatus {
    Prepared,
    BudgetExhausted,
    FieldExtensionRequired { degree: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preparation {
    pub poly: Poly,
    pub polyhedron: OrthantPolyhedron,
    pub status: PrepareStatus,
    /// The translations performed, as `(c, tail)`: top variable `w` became `w + c*tail`.
    pub translations: Vec<(Coeff, Monomial)>,
    /// Strict-shrink checks performed (one per translation).
    pub shrink_checks: usize,
    /// Binomial powers met along the way, with the initial forms they decompose.
    pub binomials: Vec<(BinomialPower, Poly)>,
}

/// Translates the top variable until no vertex of the weighted polyhedron is
/// solvable (`n = 1`).
pub fn prepare_polyhedron(
    f: &Poly,
    relations: &[Relation],
    grading: &Grading,
    config: &KappaConfig,
) -> Result<Preparation> {
    let limit = Some(config.truncation);
    let mut f = f.clone();
    let mut relations = relations.to_vec();
    let mut translations = Vec::new();
    let mut binomials = Vec::new();
    let mut shrink_checks = 0;
    loop {
        let before = weighted_projected_polyhedron(&f, grading)?;
        let mut step = None;
        for v in before.vertices() {
            let initial = initial_form(&f, v, grading)?;
            match binomialize_modulo(&initial, v, &relations, grading, config.depth, limit)? {
                BinomializeOutcome::Found(b) => {
                    binomials.push((b.power.clone(), b.initial.clone()));
                    if b.power.n == 1 {
                        step = Some(b);
                        break;
                    }
                }
                BinomializeOutcome::FieldExtensionRequired { degree } => {
                    return Ok(Preparation {
                        poly: f,
                        polyhedron: before,
                        status: PrepareStatus::FieldExtensionRequired { degree },
                        translations,
                        shrink_checks,
                        binomials,
                    });
                }
                _ => {}
            }
        }
        let Some(b) = step else {
            return Ok(Preparation {
                poly: f,
                polyhedron: before,
                status: PrepareStatus::Prepared,
                translations,
                shrink_checks,
                binomials,
            });
        };
        if translations.len() == config.budget {
            return Ok(Preparation {
                poly: f,
                polyhedron: before,
                status: PrepareStatus::BudgetExhausted,
                translations,
                shrink_checks,
                binomials,
            });
        }
        let field = f.ring().clone();
        let d = f.d();
        let mut shift = Poly::var(field.clone(), d, grading.top);
        shift.add_term(b.power.tail.clone(), b.power.c.clone());
        f = f.add(&b.delta).substitute(grading.top, &shift, limit);
        translations.push((b.power.c.clone(), b.power.tail.clone()));
        if grading.top != Var::Z {
            let r = relations.last_mut().expect("a relation defines the top variable");
            r.rhs = r.rhs.sub(&Poly::term(field, b.power.tail.clone(), b.power.c.clone()));
        }

        let after = weighted_projected_polyhedron(&f, grading)?;
        shrink_checks += 1;
        assert!(
            polyhedron_leq(&after, &before) && !polyhedron_leq(&before, &after),
            "translation did not strictly shrink the polyhedron: {before} -> {after}"
        );
    }
}

/// `u_j = w^n - c*tail + h` relations, the final equation, and variable weights.
#[derive(Clone, Debug, PartialEq)]
pub struct OverweightPresentation {
    pub relations: Vec<Relation>,
    pub final_eq: Poly,
    /// The binomial head of the final equation (absent when its polyhedron is empty).
    pub final_head: Option<BinomialPower>,
    /// `weights[k]` is the weight of `Aux(k)`: `z -> v1`, `u_j -> v_{j+1}`.
    pub weights: Vec<QPoint>,
    /// The x-series `tau` with `z_input = z + tau`.
    pub z_shift: Poly,
}

impl OverweightPresentation {
    pub fn field(&self) -> &Field {
        self.final_eq.ring()
    }

    pub fn d(&self) -> usize {
        self.final_eq.d()
    }

    /// Number of generators (`g`).
    pub fn len(&self) -> usize {
        self.relations.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Weight of a monomial: `x_i -> e_i`, `z -> v1`, `u_j -> v_{j+1}`.
    pub fn weight(&self, m: &Monomial) -> Option<QPoint> {
        let mut w = QPoint::from_monomial_x(m);
        for (k, &e) in m.aux_exps().iter().enumerate() {
            if e > 0 {
                let v = self.weights.get(k)?;
                w = w.add(&v.scale(&BigRational::from_integer(e.into())));
            }
        }
        Some(w)
    }

    /// The generators `u_j - rhs_j` followed by the final equation, printed.
    pub fn generator_strings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.relations.iter().map(format_relation).collect();
        out.push(self.final_eq.to_string());
        out
    }

    /// Substitutes every relation back (highest first), truncating at `limit`.
    pub fn eliminate(&self, limit: Option<u32>) -> Poly {
        let mut f = self.final_eq.clone();
        for r in self.relations.iter().rev() {
            f = f.substitute(r.var, &r.rhs, limit);
        }
        f
    }

    /// The input polynomial recovered from the presentation, up to `limit`.
    pub fn round_trip(&self, limit: Option<u32>) -> Poly {
        let f = self.eliminate(limit);
        let mut back = Poly::var(self.field().clone(), self.d(), Var::Z);
        back = back.sub(&self.z_shift);
        f.substitute(Var::Z, &back, limit)
    }
}

fn write_head(out: &mut String, field: &Field, main: Var, n: u32, c: &Coeff, tail: &Monomial) {
    let d = tail.d();
    out.push_str(&Monomial::one(d).with_exp(main, n).to_string());
    let (neg, mag) = field.render(c);
    out.push_str(if neg { " + " } else { " - " });
    if tail.is_one() {
        out.push_str(&mag);
    } else if mag == "1" {
        out.push_str(&tail.to_string());
    } else {
        out.push_str(&format!("{mag}*{tail}"));
    }
}

/// `u_j - (w^n - c*tail + h)`.
pub fn format_relation(r: &Relation) -> String {
    let mut inner = String::new();
    write_head(&mut inner, r.field(), r.main, r.exponent, &r.coeff, &r.tail);
    let h = r.h();
    if !h.is_zero() {
        let s = h.to_string();
        match s.strip_prefix('-') {
            Some(rest) => inner.push_str(&format!(" - {rest}")),
            None => inner.push_str(&format!(" + {s}")),
        }
    }
    format!("{} - ({inner})", r.var)
}

/// Checks that heads tie and every remainder term is strictly heavier than the
/// head weight in the product order. Returns the violations found.
pub fn verify_overweight(p: &OverweightPresentation) -> (bool, Vec<String>) {
    let mut violations = Vec::new();
    let field = p.field();
    let mut check = |label: String, main: Var, n: u32, tail: &Monomial, h: &Poly| {
        let d = tail.d();
        let head = Monomial::one(d).with_exp(main, n);
        let (Some(hw), Some(tw)) = (p.weight(&head), p.weight(tail)) else {
            violations.push(format!("{label}: missing weight for head"));
            return;
        };
        if hw != tw {
            violations.push(format!("{label}: head weights differ ({hw} vs {tw})"));
        }
        for (m, _) in h.terms() {
            match p.weight(m) {
                Some(w) if hw.dominated_by(&w) && w != hw => {}
                Some(w) => violations.push(format!("{label}: {m} has weight {w}, not above {hw}")),
                None => violations.push(format!("{label}: missing weight for {m}")),
            }
        }
    };
    for r in &p.relations {
        check(r.var.to_string(), r.main, r.exponent, &r.tail, &r.h());
    }
    if let Some(head) = &p.final_head {
        let h = p.final_eq.sub(&head.base(field));
        check("final equation".into(), head.main_var, head.n, &head.tail, &h);
    }
    (violations.is_empty(), violations)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageTrace {
    pub top: Var,
    pub degree: u32,
    pub preparation: Preparation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KappaOutcome {
    pub invariant: KappaInvariant,
    pub presentation: Option<OverweightPresentation>,
    pub stages: Vec<StageTrace>,
}

impl KappaOutcome {
    pub fn eliminations(&self) -> usize {
        self.stages.iter().map(|s| s.preparation.translations.len()).sum()
    }

    pub fn shrink_checks(&self) -> usize {
        self.stages.iter().map(|s| s.preparation.shrink_checks).sum()
    }

    /// Every binomial power built during the run, with the form it decomposes.
    pub fn binomials(&self) -> impl Iterator<Item = &(BinomialPower, Poly)> {
        self.stages.iter().flat_map(|s| s.preparation.binomials.iter())
    }
}

/// Whether a lossy stage polynomial still determines its polyhedron: every
/// unknown term has coordinate sum at least `t/e`, so it is harmless when all
/// vertices lie below that level and the corners `(t/e) e_i` are inside.
fn certifies(p: &OrthantPolyhedron, t: u32, e: u32) -> bool {
    let level = BigRational::new(t.into(), e.into());
    if p.is_empty() || p.vertices().iter().any(|v| v.sum() >= level) {
        return false;
    }
    (0..p.d()).all(|i| {
        let mut corner = QPoint::zero(p.d());
        corner.0[i] = level.clone();
        p.contains(&corner)
    })
}

pub fn compute_kappa(f: &WeierstrassPoly, config: &KappaConfig) -> Result<KappaOutcome> {
    config.validate()?;
    let field = f.field().clone();
    let d = f.d();
    let limit = Some(config.truncation);

    let mut poly = f.poly.clone().truncated(limit);
    let mut relations: Vec<Relation> = Vec::new();
    let mut grading = Grading::weierstrass(d, f.n);
    let mut vertices = Vec::new();
    let mut multiplicities = vec![f.n];
    let mut diagnostics = Vec::new();
    let mut stages = Vec::new();
    let mut z_shift = Poly::zero(field.clone(), d);
    let mut budget_used = 0;
    let mut certified = config.truncation;

    let finish = |vertices: Vec<QPoint>,
                  terminal: Terminal,
                  multiplicities: Vec<u32>,
                  diagnostics: Vec<String>,
                  certified: u32,
                  budget_used: usize,
                  presentation: Option<OverweightPresentation>,
                  stages: Vec<StageTrace>| {
        Ok(KappaOutcome {
            invariant: KappaInvariant {
                vertices,
                terminal,
                multiplicities,
                certified_truncation: certified,
                budget_used,
                diagnostics,
            },
            presentation,
            stages,
        })
    };

    loop {
        let stage = vertices.len();
        let prep = prepare_polyhedron(&poly, &relations, &grading, config)?;
        budget_used += prep.translations.len();
        for (c, tail) in &prep.translations {
            let term = Poly::term(field.clone(), tail.clone(), c.clone());
            match grading.top {
                Var::Aux(0) => z_shift = z_shift.add(&term),
                _ => {
                    let r = relations.last_mut().expect("a relation defines the top variable");
                    r.rhs = r.rhs.sub(&term);
                }
            }
        }
        poly = prep.poly.clone();
        let status = prep.status;
        let polyhedron = prep.polyhedron.clone();
        stages.push(StageTrace { top: grading.top, degree: grading.degree, preparation: prep });

        match status {
            PrepareStatus::Prepared => {}
            PrepareStatus::BudgetExhausted => {
                diagnostics.push(format!("elimination budget of {} exhausted at stage {stage}", config.budget));
                return finish(
                    vertices,
                    Terminal::Inconclusive,
                    multiplicities,
                    diagnostics,
                    certified,
                    budget_used,
                    None,
                    stages,
                );
            }
            PrepareStatus::FieldExtensionRequired { degree } => {
                diagnostics.push(format!("field extension of degree {degree} required at stage {stage}"));
                return finish(
                    vertices,
                    Terminal::Inconclusive,
                    multiplicities,
                    diagnostics,
                    certified,
                    budget_used,
                    None,
                    stages,
                );
            }
        }

        if let Some(t) = poly.truncation() {
            certified = certified.min(t);
            if !certifies(&polyhedron, t, grading.degree) {
                diagnostics
                    .push(format!("truncation at x-degree {t} does not certify the polyhedron at stage {stage}"));
                return finish(
                    vertices,
                    Terminal::Inconclusive,
                    multiplicities,
                    diagnostics,
                    certified,
                    budget_used,
                    None,
                    stages,
                );
            }
        }

        let presentation = |poly: Poly, relations: Vec<Relation>, weights: Vec<QPoint>, head, z_shift| {
            OverweightPresentation { relations, final_eq: poly, final_head: head, weights, z_shift }
        };

        match polyhedron.vertices() {
            [] => {
                let p = presentation(poly, relations, vertices.clone(), None, z_shift);
                return finish(
                    vertices,
                    Terminal::Infinity,
                    multiplicities,
                    diagnostics,
                    certified,
                    budget_used,
                    Some(p),
                    stages,
                );
            }
            [v] => {
                let v = v.clone();
                let initial = initial_form(&poly, &v, &grading)?;
                vertices.push(v.clone());
                let outcome = binomialize_modulo(&initial, &v, &relations, &grading, config.depth, limit)?;
                let b = match outcome {
                    BinomializeOutcome::Found(b) => b,
                    BinomializeOutcome::NotBinomial => {
                        diagnostics.push(NOT_BINOMIAL_DIAGNOSTIC.into());
                        return finish(
                            vertices,
                            Terminal::MinusOne,
                            multiplicities,
                            diagnostics,
                            certified,
                            budget_used,
                            None,
                            stages,
                        );
                    }
                    BinomializeOutcome::FieldExtensionRequired { degree } => {
                        diagnostics.push(format!("field extension of degree {degree} required at stage {stage}"));
                        return finish(
                            vertices,
                            Terminal::Inconclusive,
                            multiplicities,
                            diagnostics,
                            certified,
                            budget_used,
                            None,
                            stages,
                        );
                    }
                };
                stages.last_mut().unwrap().preparation.binomials.push((b.power.clone(), b.initial.clone()));
                poly = poly.add(&b.delta).truncated(limit);
                let power = b.power;
                assert!(power.n > 1, "a prepared vertex is not solvable");
                assert!(power.e < grading.degree, "stage multiplicities must strictly descend");
                multiplicities.push(power.e);
                let mut weights = vertices.clone();
                weights.truncate(stage + 1);

                if power.e == 1 {
                    let p = presentation(poly, relations, weights, Some(power), z_shift);
                    let (ok, violations) = verify_overweight(&p);
                    if !ok {
                        diagnostics.extend(violations.into_iter().map(|v| format!("overweight check: {v}")));
                    }
                    return finish(
                        vertices,
                        Terminal::Infinity,
                        multiplicities,
                        diagnostics,
                        certified,
                        budget_used,
                        Some(p),
                        stages,
                    );
                }

                let j = relations.len() + 1;
                let rel = Relation::new(j, power.n, power.c.clone(), power.tail.clone(), Poly::zero(field.clone(), d));
                let replacement = rel.power_replacement();
                poly = poly.power_substitute(power.main_var, power.n, &replacement, limit);
                relations.push(rel);
                grading.weights.resize(j, None);
                grading.weights[j - 1] = Some(v);
                grading.top = Var::u(j);
                grading.degree = power.e;
            }
            _ => {
                diagnostics.push("terminal -1 is translation-minimal: x-coordinate changes are not searched".into());
                return finish(
                    vertices,
                    Terminal::MinusOne,
                    multiplicities,
                    diagnostics,
                    certified,
                    budget_used,
                    None,
                    stages,
                );
            }
        }
    }
}

/// The weighted points of a stage polynomial, before taking the hull.
pub fn stage_points(f: &Poly, grading: &Grading) -> Result<OrthantPolyhedron> {
    let mut pts = Vec::new();
    for (m, _) in f.terms() {
        if let Some(p) = grading.point(m)? {
            pts.push(p);
        }
    }
    Ok(hull_vertices(grading.d, pts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, weierstrass_validate, VarContext};

    fn parse(s: &str, d: usize, field: &Field) -> Poly {
        parse_polynomial(s, &VarContext::new(d, 4), field).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn kappa(s: &str, d: usize, field: &Field) -> KappaOutcome {
        let f = weierstrass_validate(&parse(s, d, field)).unwrap();
        compute_kappa(&f, &KappaConfig::default()).unwrap()
    }

    #[test]
    fn initial_form_examples() {
        let q0 = Field::rational();
        let f = parse("z^2 - 2*x1*z + x1^2 - x1^3", 1, &q0);
        let g = Grading::weierstrass(1, 2);
        assert_eq!(initial_form(&f, &QPoint::from_ints(&[1]), &g).unwrap(), parse("z^2 - 2*x1*z + x1^2", 1, &q0));
        let f2 = Field::prime(2).unwrap();
        let f = parse("z^8 + x1^12*x2^24 + x1^15*x2^30", 2, &f2);
        let v = QPoint(vec![q(3, 2), q(3, 1)]);
        let g = Grading::weierstrass(2, 8);
        assert_eq!(initial_form(&f, &v, &g).unwrap(), parse("z^8 + x1^12*x2^24", 2, &f2));
        let f = parse("z^2 - x1^3", 1, &q0);
        let v = QPoint(vec![q(3, 2)]);
        assert_eq!(initial_form(&f, &v, &Grading::weierstrass(1, 2)).unwrap(), f);
        assert!(matches!(
            initial_form(&f, &QPoint::from_ints(&[1]), &Grading::weierstrass(1, 2)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn decompose_examples() {
        let f2 = Field::prime(2).unwrap();
        let Decomposition::Binomial(b) = binomial_power_decompose(&parse("z^8 + x1^12*x2^24", 2, &f2), Var::Z).unwrap()
        else {
            panic!("expected a binomial power");
        };
        assert_eq!((b.n, b.e), (2, 4));
        assert_eq!(b.tail.to_string(), "x1^3*x2^6");
        let q0 = Field::rational();
        let Decomposition::Binomial(b) =
            binomial_power_decompose(&parse("z^2 - 2*x1*z + x1^2", 1, &q0), Var::Z).unwrap()
        else {
            panic!("expected a binomial power");
        };
        assert_eq!((b.n, b.e, b.c.clone()), (1, 2, q0.one()));
        assert_eq!(binomial_power_decompose(&parse("z^2 + x1*z", 1, &q0), Var::Z).unwrap(), Decomposition::NotBinomial);
        assert!(binomial_power_decompose(&parse("2*z^2 + x1", 1, &q0), Var::Z).is_err());
    }

    #[test]
    fn decompose_needs_extension() {
        // (z - c x)^2 would need c = 4 from the middle term, but then c^2 = 1 != 3.
        let f5 = Field::prime(5).unwrap();
        let out = binomial_power_decompose(&parse("z^2 + 2*x1*z + 3*x1^2", 1, &f5), Var::Z).unwrap();
        assert_eq!(out, Decomposition::NotBinomial);
        let f3 = Field::prime(3).unwrap();
        let Decomposition::Binomial(b) = binomial_power_decompose(&parse("z^2 + x1^2", 1, &f3), Var::Z).unwrap() else {
            panic!("expected a binomial power");
        };
        assert_eq!((b.n, b.e, b.c), (2, 1, Coeff::Prime(2)));
    }

    #[test]
    fn binomialize_examples() {
        let f2 = Field::prime(2).unwrap();
        let rel = Relation::new(1, 2, f2.one(), Monomial::new(vec![3, 6], vec![]), Poly::zero(f2.clone(), 2));
        let grading = Grading { d: 2, top: Var::u(1), degree: 4, weights: vec![Some(QPoint(vec![q(3, 2), q(3, 1)]))] };
        let v = QPoint(vec![q(15, 4), q(15, 2)]);
        let initial = parse("u1^4 + x1^15*x2^30", 2, &f2);
        let BinomializeOutcome::Found(b) =
            binomialize_modulo(&initial, &v, std::slice::from_ref(&rel), &grading, 3, Some(64)).unwrap()
        else {
            panic!("expected a binomial power");
        };
        assert_eq!((b.power.n, b.power.e, b.depth), (2, 2, 1));
        assert_eq!(b.power.tail.to_string(), "x1^6*x2^12*z");
        assert_eq!(b.initial, parse("u1^4 + x1^12*x2^24*z^2", 2, &f2));

        let already = parse("u1^4 + x1^12*x2^24*z^2", 2, &f2);
        let BinomializeOutcome::Found(b) =
            binomialize_modulo(&already, &v, std::slice::from_ref(&rel), &grading, 3, Some(64)).unwrap()
        else {
            panic!("expected a binomial power");
        };
        assert_eq!(b.depth, 0);

        let grading = Grading { degree: 2, ..grading };
        let v = QPoint(vec![q(3, 4), q(3, 2)]);
        let stuck = parse("u1^2 + x1*z*u1", 2, &f2);
        assert_eq!(
            binomialize_modulo(&stuck, &v, &[rel], &grading, 3, Some(64)).unwrap(),
            BinomializeOutcome::NotBinomial
        );
    }

    #[test]
    fn preparation_examples() {
        let q0 = Field::rational();
        let f = parse("z^2 - 2*x1*z + x1^2 - x1^3", 1, &q0);
        let prep = prepare_polyhedron(&f, &[], &Grading::weierstrass(1, 2), &KappaConfig::default()).unwrap();
        assert_eq!(prep.status, PrepareStatus::Prepared);
        assert_eq!(prep.translations.len(), 1);
        assert_eq!(prep.shrink_checks, 1);
        assert_eq!(prep.polyhedron.to_string(), "{3/2}");
        assert_eq!(prep.poly, parse("z^2 - x1^3", 1, &q0));

        let f2 = Field::prime(2).unwrap();
        let f = parse("z^2 - x1^3", 1, &f2);
        let prep = prepare_polyhedron(&f, &[], &Grading::weierstrass(1, 2), &KappaConfig::default()).unwrap();
        assert!(prep.translations.is_empty());

        let f = parse("z^2 - 2*x1*z - 2*x1^2*z + x1^2 + 2*x1^3 + x1^4 - x1^9", 1, &q0);
        let prep = prepare_polyhedron(&f, &[], &Grading::weierstrass(1, 2), &KappaConfig::default()).unwrap();
        assert_eq!(prep.translations.len(), 2);
        assert_eq!(prep.polyhedron.to_string(), "{9/2}");
        assert_eq!(prep.poly, parse("z^2 - x1^9", 1, &q0));
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let q0 = Field::rational();
        let f = weierstrass_validate(&parse("z^2 - 2*x1*z - 2*x1^2*z + x1^2 + 2*x1^3 + x1^4 - x1^9", 1, &q0)).unwrap();
        let config = KappaConfig { budget: 1, ..KappaConfig::default() };
        let out = compute_kappa(&f, &config).unwrap();
        assert_eq!(out.invariant.terminal, Terminal::Inconclusive);
    }

    #[test]
    fn kappa_of_cusp_in_char_two() {
        let out = kappa("z^2 - x1^3", 1, &Field::prime(2).unwrap());
        assert_eq!(out.invariant.to_string(), "(3/2, inf)");
        let p = out.presentation.unwrap();
        assert!(p.relations.is_empty());
        assert_eq!(p.final_eq.to_string(), "z^2 + x1^3");
    }

    #[test]
    fn kappa_minus_one() {
        let out = kappa("z^2 - x1*x2*z - x1^3*x2 - x1*x2^3", 2, &Field::prime(2).unwrap());
        assert_eq!(out.invariant.to_string(), "(-1)");
        assert!(out.presentation.is_none());
    }

    #[test]
    fn kappa_of_three_stage_example() {
        let f2 = Field::prime(2).unwrap();
        let out = kappa("(z^2 - x1^3*x2^6)^4 - x1^15*x2^30", 2, &f2);
        assert_eq!(out.invariant.to_string(), "((3/2, 3), (15/4, 15/2), (63/8, 63/4), inf)");
        assert_eq!(out.invariant.multiplicities, vec![8, 4, 2, 1]);
        assert!(out.invariant.diagnostics.is_empty(), "{:?}", out.invariant.diagnostics);
        let p = out.presentation.unwrap();
        assert_eq!(
            p.generator_strings(),
            vec!["u1 - (z^2 - x1^3*x2^6)", "u2 - (u1^2 - x1^6*x2^12*z)", "u2^2 + x1^12*x2^24*u1"]
        );
        assert!(verify_overweight(&p).0);
        let f = parse("(z^2 - x1^3*x2^6)^4 - x1^15*x2^30", 2, &f2);
        assert_eq!(p.round_trip(Some(64)), f);
    }

    #[test]
    fn later_stage_translations_rewrite_the_relation() {
        let q0 = Field::rational();
        let out = kappa("((z + x1^2)^2 - x1 + x1^2)^2 - x1^9", 1, &q0);
        let p = out.presentation.expect("terminal infinity");
        assert!(out.stages[1].preparation.translations.len() >= 2);
        assert_eq!(p.relations[0].head().to_string(), "z^2 - x1");
        let f = parse("((z + x1^2)^2 - x1 + x1^2)^2 - x1^9", 1, &q0);
        assert_eq!(p.round_trip(Some(64)), f);
    }

    #[test]
    fn kappa_of_empty_polyhedron() {
        let out = kappa("z^3", 1, &Field::rational());
        assert_eq!(out.invariant.to_string(), "(inf)");
    }

    #[test]
    fn overweight_violation_is_reported() {
        let f2 = Field::prime(2).unwrap();
        let h = parse("x1", 2, &f2);
        let rel = Relation::new(1, 2, f2.one(), Monomial::new(vec![3, 6], vec![]), h);
        let p = OverweightPresentation {
            relations: vec![rel],
            final_eq: parse("u1", 2, &f2),
            final_head: None,
            weights: vec![QPoint(vec![q(3, 2), q(3, 1)]), QPoint(vec![q(4, 1), q(8, 1)])],
            z_shift: Poly::zero(f2, 2),
        };
        let (ok, violations) = verify_overweight(&p);
        assert!(!ok);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("x1"));
    }
}
