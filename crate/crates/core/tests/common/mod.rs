//! Fixtures, generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use teissier::kappa::{compute_kappa, verify_overweight, KappaConfig, KappaOutcome, Terminal};
use teissier::poly::{parse_polynomial, weierstrass_validate, Poly, Var, VarContext, WeierstrassPoly};
use teissier::polyhedron::{member, QPoint};
use teissier::quasiord::discriminant_z;
use teissier::ring::{Field, Ring};

pub type Q = BigRational;

pub const EXAMPLE: &str = "(z^2 - x1^3*x2^6)^4 - x1^15*x2^30";

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn gf(p: u64) -> Field {
    Field::prime(p).unwrap()
}

pub fn parse(s: &str, d: usize, field: &Field) -> Poly {
    parse_polynomial(s, &VarContext::new(d, 4), field).unwrap()
}

pub fn wp(s: &str, d: usize, field: &Field) -> WeierstrassPoly {
    weierstrass_validate(&parse(s, d, field)).unwrap()
}

pub fn run(s: &str, d: usize, field: &Field) -> KappaOutcome {
    compute_kappa(&wp(s, d, field), &KappaConfig::default()).unwrap()
}

/// Inputs run through the whole pipeline by the fixture-based properties.
pub fn fixtures() -> Vec<(&'static str, usize, Field)> {
    vec![
        ("z^2 - x1^3", 1, gf(2)),
        ("z^2 - x1^3", 1, Field::rational()),
        ("z^2 - x1*x2*z - x1^3*x2 - x1*x2^3", 2, gf(2)),
        (EXAMPLE, 2, gf(2)),
        (EXAMPLE, 2, gf(3)),
        (EXAMPLE, 2, Field::rational()),
        ("z^2 - 2*x1*z + x1^2 - x1^3", 1, Field::rational()),
        ("z^3 - x1^2*x2", 2, Field::rational()),
        ("z^2 - x1^2 - x2^2", 2, Field::rational()),
        ("(z^2 - x1^3)^2 - x1^7", 1, Field::rational()),
        ("(z^2 - x1^3)^2 - x1^5*z", 1, gf(2)),
        ("(z^2 - x1^3)^2 - x1^5*z", 1, Field::rational()),
        ("z^4 + x1^2*z^2 + x1^6", 1, gf(2)),
        ("(z + x1^2)^2 - x1^5", 1, gf(3)),
        ("z^2 - x1^2*x2^2", 2, Field::rational()),
    ]
}

/// Characteristic-0 inputs for the instance-by-instance check that the
/// terminal is infinity exactly when the discriminant is a monomial times a unit.
pub fn char0_crosscheck() -> Vec<(&'static str, usize)> {
    vec![
        ("z^2 - x1^3", 1),
        ("z^3 - x1^2*x2", 2),
        ("z^2 - x1^2 - x2^2", 2),
        ("(z^2 - x1^3)^2 - x1^7", 1),
        ("z^2 - x1^2*x2^2", 2),
        ("(z^2 - x1^3)^2 - x1^5*z", 1),
        ("z^2 - x1^2 - x1*x2^3", 2),
    ]
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin oracle for conv(S) + R>=0^d membership.

/// Rows `a . lambda <= b`.
type System = Vec<(Vec<Q>, Q)>;

fn eliminate_last(sys: System) -> System {
    let k = sys[0].0.len() - 1;
    let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for (a, b) in sys {
        let c = a[k].clone();
        let a: Vec<Q> = a[..k].to_vec();
        if c.is_positive() {
            pos.push((a.iter().map(|x| x / &c).collect::<Vec<_>>(), &b / &c));
        } else if c.is_negative() {
            let m = -c;
            neg.push((a.iter().map(|x| x / &m).collect::<Vec<_>>(), &b / &m));
        } else {
            rest.push((a, b));
        }
    }
    for (ap, bp) in &pos {
        for (an, bn) in &neg {
            rest.push((ap.iter().zip(an).map(|(x, y)| x + y).collect(), bp + bn));
        }
    }
    rest.sort();
    rest.dedup();
    rest
}

/// Whether some convex combination of `pts` is dominated by `p`.
pub fn fm_member(p: &[Q], pts: &[Vec<Q>]) -> bool {
    let k = pts.len();
    let mut sys: System = Vec::new();
    for i in 0..k {
        let mut a = vec![Q::zero(); k];
        a[i] = -Q::one();
        sys.push((a, Q::zero()));
    }
    sys.push((vec![Q::one(); k], Q::one()));
    sys.push((vec![-Q::one(); k], -Q::one()));
    for (j, pj) in p.iter().enumerate() {
        sys.push((pts.iter().map(|s| s[j].clone()).collect(), pj.clone()));
    }
    for _ in 0..k {
        sys = eliminate_last(sys);
    }
    sys.iter().all(|(_, b)| !b.is_negative())
}

pub fn rational() -> impl Strategy<Value = Q> {
    (0i64..=16, 1i64..=8).prop_map(|(n, d)| q(n, d))
}

pub fn point(d: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rational(), d)
}

pub fn lp_case() -> impl Strategy<Value = (Vec<Q>, Vec<Vec<Q>>)> {
    (1usize..=3).prop_flat_map(|d| (point(d), prop::collection::vec(point(d), 1..=5)))
}

// ---------------------------------------------------------------------------
// Random Weierstrass inputs built around nested binomials.

pub fn field_choice() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::rational()), Just(gf(2)), Just(gf(3)), Just(gf(5))]
}

/// `" + c*m"` or `" - |c|*m"`.
pub fn signed(c: i64, body: &str) -> String {
    let sign = if c < 0 { '-' } else { '+' };
    if body == "1" {
        format!(" {sign} {}", c.abs())
    } else {
        format!(" {sign} {}*{body}", c.abs())
    }
}

/// Joins `(coefficient, monomial)` pairs into parseable text.
pub fn sum_text(terms: &[(i64, String)]) -> String {
    let mut out = String::new();
    for (c, body) in terms.iter().filter(|(c, _)| *c != 0) {
        out.push_str(&signed(*c, body));
    }
    match out.strip_prefix(" + ") {
        Some(rest) => rest.to_string(),
        None if out.is_empty() => "0".into(),
        None => format!("-{}", &out[3..]),
    }
}

pub fn monomial_text(exps: &[u32]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(i, e)| if *e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// `((z^n1 - a*x^A)^k1 + b*x^B*z^j)^k2 + c*x^C`, optionally with `z -> z + s*x^S`.
#[derive(Clone, Debug)]
pub struct NestedInput {
    pub field: Field,
    pub d: usize,
    pub text: String,
}

pub fn nested_input() -> impl Strategy<Value = NestedInput> {
    (field_choice(), 1usize..=2).prop_flat_map(|(field, d)| {
        let exps = move |lo: u32, hi: u32| prop::collection::vec(lo..=hi, d);
        (
            Just(field),
            Just(d),
            (2u32..=3, exps(1, 4), 1i64..=2, 1u32..=2),
            (exps(2, 9), 0u32..=1, -1i64..=1),
            (1u32..=2, exps(4, 14), -1i64..=1),
            (exps(1, 3), -1i64..=1),
        )
            .prop_map(|(field, d, (n1, a_exp, a, k1), (b_exp, j, b), (k2, c_exp, c), (s_exp, s))| {
                let z = if s == 0 { "z".to_string() } else { format!("(z{})", signed(s, &monomial_text(&s_exp))) };
                let mut inner = format!("({z}^{n1} - {a}*{})^{k1}", monomial_text(&a_exp));
                if b != 0 {
                    inner = format!("({inner}{})", signed(b, &format!("{}*{z}^{j}", monomial_text(&b_exp))));
                }
                let mut text = format!("({inner})^{k2}");
                if c != 0 {
                    text = format!("{text}{}", signed(c, &monomial_text(&c_exp)));
                }
                NestedInput { field, d, text }
            })
    })
}

impl NestedInput {
    pub fn weierstrass(&self) -> Option<WeierstrassPoly> {
        let f = parse_polynomial(&self.text, &VarContext::new(self.d, 1), &self.field).ok()?;
        weierstrass_validate(&f).ok()
    }
}

// ---------------------------------------------------------------------------
// Property suites, also driven by the acceptance binary.

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub fn suite_lp_membership(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&lp_case(), |(p, pts)| {
            let qp = QPoint(p.clone());
            let qs: Vec<QPoint> = pts.iter().cloned().map(QPoint).collect();
            check(member(&qp, &qs) == fm_member(&p, &pts), || format!("member disagrees on {p:?} / {pts:?}"))
        })
        .map_err(|e| e.to_string())
}

/// Runs the κ computation on a random input, or rejects inputs that do not parse.
fn outcome(input: &NestedInput) -> Result<(WeierstrassPoly, KappaOutcome), TestCaseError> {
    let w = input.weierstrass().ok_or_else(|| TestCaseError::reject("not a Weierstrass polynomial"))?;
    let out = compute_kappa(&w, &KappaConfig::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    Ok((w, out))
}

pub fn check_binomials(out: &KappaOutcome) -> Result<(), TestCaseError> {
    for (b, initial) in out.binomials() {
        let field = initial.ring();
        check(b.expand(field) == *initial, || format!("{b:?} does not re-expand to {initial}"))?;
    }
    Ok(())
}

pub fn check_round_trip(w: &WeierstrassPoly, out: &KappaOutcome, t: u32) -> Result<(), TestCaseError> {
    if let Some(p) = &out.presentation {
        let back = p.round_trip(Some(t));
        let input = w.poly.clone().truncated(Some(t));
        check(back == input, || format!("round trip gave {back}, expected {input}"))?;
    }
    Ok(())
}

pub fn check_overweight(out: &KappaOutcome) -> Result<(), TestCaseError> {
    if let Some(p) = &out.presentation {
        let (ok, violations) = verify_overweight(p);
        check(ok, || format!("overweight violations: {violations:?}"))?;
    }
    Ok(())
}

pub fn check_descent(out: &KappaOutcome) -> Result<(), TestCaseError> {
    if out.invariant.terminal == Terminal::Infinity {
        let m = &out.invariant.multiplicities;
        check(m.windows(2).all(|w| w[0] > w[1]), || format!("multiplicities {m:?} do not descend"))?;
    }
    Ok(())
}

fn fixture_suite(
    cases: u32,
    prop: impl Fn(&WeierstrassPoly, &KappaOutcome) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    for (s, d, field) in fixtures() {
        let w = wp(s, d, &field);
        let out = compute_kappa(&w, &KappaConfig::default()).map_err(|e| e.to_string())?;
        prop(&w, &out).map_err(|e| format!("fixture {s} over {field}: {e}"))?;
    }
    runner(cases)
        .run(&nested_input(), |input| {
            let (w, out) = outcome(&input)?;
            prop(&w, &out)
        })
        .map_err(|e| e.to_string())
}

pub fn suite_binomial_reexpansion(cases: u32) -> Result<(), String> {
    fixture_suite(cases, |_, out| check_binomials(out))
}

pub fn suite_round_trip(cases: u32) -> Result<(), String> {
    fixture_suite(cases, |w, out| check_round_trip(w, out, KappaConfig::default().truncation))
}

pub fn suite_overweight(cases: u32) -> Result<(), String> {
    fixture_suite(cases, |_, out| check_overweight(out))
}

pub fn suite_descent(cases: u32) -> Result<(), String> {
    fixture_suite(cases, |_, out| check_descent(out))
}

/// `s(x)` with zero constant term and total degree at most 4.
pub fn series_text(d: usize) -> impl Strategy<Value = String> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0u32..=4, d)), 1..=4).prop_map(|terms| {
        let kept: Vec<(i64, String)> = terms
            .into_iter()
            .filter(|(_, exps)| (1..=4).contains(&exps.iter().sum::<u32>()))
            .map(|(c, exps)| (c, monomial_text(&exps)))
            .collect();
        sum_text(&kept)
    })
}

pub fn suite_resultant(cases: u32) -> Result<(), String> {
    let strategy =
        (field_choice(), 1usize..=2).prop_flat_map(|(f, d)| (Just(f), Just(d), series_text(d), series_text(d)));
    runner(cases)
        .run(&strategy, |(field, d, s1, s2)| {
            let f = parse(&format!("(z - ({s1}))*(z - ({s2}))"), d, &field);
            let w = weierstrass_validate(&f).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let disc = discriminant_z(&w, None).disc;
            let diff = parse(&format!("({s1}) - ({s2})"), d, &field);
            let sq = diff.mul_trunc(&diff, None);
            check(disc == sq || disc == sq.neg(), || format!("disc of (z - {s1})(z - {s2}) is {disc}, expected ±{sq}"))
        })
        .map_err(|e| e.to_string())
}

/// Naive product `prod (z - s_i)` built term by term, as an oracle for the parser.
pub fn product_of_roots(roots: &[Poly], d: usize, field: &Field) -> Poly {
    let mut acc = Poly::one(field.clone(), d);
    for s in roots {
        let z = Poly::var(field.clone(), d, Var::Z);
        acc = acc.mul_trunc(&z.sub(s), None);
    }
    acc
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn field_elem(field: &Field, n: i64) -> teissier::ring::Coeff {
    field.from_integer(&big(n))
}
