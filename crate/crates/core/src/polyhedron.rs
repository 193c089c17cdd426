//! Orthant polyhedra `conv(S) + R>=0^d` over exact rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lp::feasible_point;
use crate::poly::{Monomial, Poly, Var, WeierstrassPoly};
use crate::ring::Ring;

type Q = BigRational;

/// Largest supported number of x-variables.
pub const MAX_DIMENSION: usize = 8;

/// A point of `Q^d`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPoint(pub Vec<Q>);

impl QPoint {
    pub fn zero(d: usize) -> Self {
        QPoint(vec![Q::zero(); d])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        QPoint(v.iter().map(|&a| Q::from_integer(a.into())).collect())
    }

    pub fn from_monomial_x(m: &Monomial) -> Self {
        QPoint(m.x_exps().iter().map(|&a| Q::from_integer(a.into())).collect())
    }

    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    pub fn add(&self, other: &QPoint) -> QPoint {
        QPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: &Q) -> QPoint {
        QPoint(self.0.iter().map(|a| a * k).collect())
    }

    pub fn dot(&self, other: &[Q]) -> Q {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn sum(&self) -> Q {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &QPoint) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Coordinates rendered as `p/q` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(Q::to_string).collect()
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "({})", self.to_strings().join(", "))
    }
}

/// `conv(vertices) + R>=0^d` with a minimal, lexicographically sorted vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthantPolyhedron {
    d: usize,
    vertices: Vec<QPoint>,
}

impl OrthantPolyhedron {
    pub fn empty(d: usize) -> Self {
        OrthantPolyhedron { d, vertices: Vec::new() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &[QPoint] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, p: &QPoint) -> bool {
        member(p, &self.vertices)
    }
}

impl fmt::Display for OrthantPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(QPoint::to_string).collect();
        write!(f, "{{{}}}", vs.join(", "))
    }
}

/// Whether `p` lies in `conv(points) + R>=0^d`.
pub fn member(p: &QPoint, points: &[QPoint]) -> bool {
    if points.is_empty() {
        return false;
    }
    if points.iter().any(|s| s.dominated_by(p)) {
        return true;
    }
    // sum_i l_i s_i + slack = p, sum_i l_i = 1, l >= 0, slack >= 0
    let d = p.d();
    let k = points.len();
    let mut a = Vec::with_capacity(d + 1);
    let mut b = Vec::with_capacity(d + 1);
    for c in 0..d {
        let mut row: Vec<Q> = points.iter().map(|s| s.0[c].clone()).collect();
        row.extend((0..d).map(|j| if j == c { Q::one() } else { Q::zero() }));
        a.push(row);
        b.push(p.0[c].clone());
    }
    let mut row = vec![Q::one(); k];
    row.extend(std::iter::repeat_n(Q::zero(), d));
    a.push(row);
    b.push(Q::one());
    feasible_point(&a, &b).is_some()
}

/// The minimal vertex set generating the same orthant polyhedron as `points`.
pub fn hull_vertices(d: usize, points: impl IntoIterator<Item = QPoint>) -> OrthantPolyhedron {
    let mut pts: Vec<QPoint> = points.into_iter().collect();
    assert!(pts.iter().all(|p| p.d() == d), "point dimension mismatch");
    pts.sort();
    pts.dedup();
    let mut i = 0;
    while i < pts.len() {
        let p = pts.remove(i);
        if member(&p, &pts) {
            continue;
        }
        pts.insert(i, p);
        i += 1;
    }
    OrthantPolyhedron { d, vertices: pts }
}

pub fn lex_min_vertex(p: &OrthantPolyhedron) -> Result<&QPoint> {
    p.vertices.first().ok_or(Error::EmptyPolyhedron)
}

/// `P ⊆ Q`.
pub fn polyhedron_leq(p: &OrthantPolyhedron, q: &OrthantPolyhedron) -> bool {
    p.vertices.iter().all(|v| member(v, &q.vertices))
}

/// How terms map to points: the top variable with its degree, and weight
/// vectors for the lower auxiliary variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub d: usize,
    pub top: Var,
    pub degree: u32,
    /// `weights[k]` is the weight of `Aux(k)`; entries at or above `top` are unused.
    pub weights: Vec<Option<QPoint>>,
}

impl Grading {
    /// The plain grading `A/(n-b)` of a Weierstrass polynomial.
    pub fn weierstrass(d: usize, n: u32) -> Self {
        Grading { d, top: Var::Z, degree: n, weights: Vec::new() }
    }

    fn top_index(&self) -> usize {
        match self.top {
            Var::Aux(k) => k,
            Var::X(_) => unreachable!("the top variable is auxiliary"),
        }
    }

    /// Weight of `x^A` times the lower auxiliary part of `m`, ignoring the top variable.
    pub fn weight(&self, m: &Monomial) -> Result<QPoint> {
        let top = self.top_index();
        let mut w = QPoint::from_monomial_x(m);
        for (k, &e) in m.aux_exps().iter().enumerate() {
            if k == top || e == 0 {
                continue;
            }
            if k > top {
                return Err(Error::Config(format!(
                    "variable {} lies above the top variable {}",
                    Var::Aux(k),
                    self.top
                )));
            }
            let Some(Some(v)) = self.weights.get(k) else {
                return Err(Error::Config(format!("missing weight for {}", Var::Aux(k))));
            };
            w = w.add(&v.scale(&Q::from_integer(e.into())));
        }
        Ok(w)
    }

    /// The point of a term, or `None` when its top-degree is not below the degree.
    pub fn point(&self, m: &Monomial) -> Result<Option<QPoint>> {
        let c = m.exp(self.top);
        if c >= self.degree {
            return Ok(None);
        }
        let w = self.weight(m)?;
        Ok(Some(w.scale(&Q::new(BigInt::one(), BigInt::from(self.degree - c)))))
    }
}

pub fn weighted_projected_polyhedron<R: Ring>(f: &Poly<R>, grading: &Grading) -> Result<OrthantPolyhedron> {
    let mut pts = Vec::new();
    for (m, _) in f.terms() {
        if let Some(p) = grading.point(m)? {
            pts.push(p);
        }
    }
    Ok(hull_vertices(grading.d, pts))
}

pub fn projected_polyhedron(f: &WeierstrassPoly) -> OrthantPolyhedron {
    weighted_projected_polyhedron(&f.poly, &Grading::weierstrass(f.d(), f.n))
        .expect("a Weierstrass polynomial has no auxiliary weights to miss")
}
