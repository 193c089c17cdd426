//! One line per acceptance criterion, with its time limit. Exits nonzero if any
//! criterion fails or overruns.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use teissier::deform::{
    default_tropical_weight, ghost_monomials, initial_forms_weighted, lift_presentation, reduce_poly,
};
use teissier::kappa::{prepare_polyhedron, KappaConfig, Terminal};
use teissier::poly::{parse_polynomial, Monomial, Poly, VarContext};
use teissier::polyhedron::Grading;
use teissier::quasiord::{classify, MonomialUnit, TriState};
use teissier::ring::{Field, Integers};

/// Randomized cases per property suite.
const CASES: u32 = 256;

type Outcome = Result<(), String>;

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Outcome {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn criterion_1() -> Outcome {
    let c = classify(&wp("z^2 - x1^3", 1, &gf(2)), &KappaConfig::default()).map_err(|e| e.to_string())?;
    expect("kappa", c.kappa.invariant.to_string().as_str(), "(3/2, inf)")?;
    expect("teissier", c.teissier, TriState::True)?;
    expect("quasi_ordinary", c.quasi_ordinary, TriState::False)?;
    expect("discriminant", c.discriminant.disc.to_string().as_str(), "0")
}

fn criterion_2() -> Outcome {
    let f = wp("z^2 - x1*x2*z - x1^3*x2 - x1*x2^3", 2, &gf(2));
    let c = classify(&f, &KappaConfig::default()).map_err(|e| e.to_string())?;
    expect("kappa", c.kappa.invariant.to_string().as_str(), "(-1)")?;
    expect(
        "translation-minimal label",
        c.kappa.invariant.diagnostics.iter().any(|d| d.contains("translation-minimal")),
        true,
    )?;
    expect("discriminant", c.discriminant.disc.to_string().as_str(), "x1^2*x2^2")?;
    expect("monomial_unit", c.discriminant.monomial_unit, MonomialUnit::Yes(vec![2, 2]))?;
    expect("classification", (c.teissier, c.quasi_ordinary), (TriState::False, TriState::True))
}

fn criterion_3() -> Outcome {
    let out = run(EXAMPLE, 2, &gf(2));
    expect("kappa", out.invariant.to_string().as_str(), "((3/2, 3), (15/4, 15/2), (63/8, 63/4), inf)")?;
    let p = out.presentation.ok_or("no presentation")?;
    expect(
        "presentation",
        p.generator_strings(),
        vec!["u1 - (z^2 - x1^3*x2^6)".into(), "u2 - (u1^2 - x1^6*x2^12*z)".into(), "u2^2 + x1^12*x2^24*u1".to_string()],
    )
}

fn criterion_4() -> Outcome {
    let pres = run(EXAMPLE, 2, &gf(2)).presentation.ok_or("no presentation")?;
    let lift = lift_presentation(&pres).map_err(|e| e.to_string())?;
    let report = ghost_monomials(&lift);
    let expected: Poly<Integers> = parse_polynomial(
        "((z^2 - x1^3*x2^6)^2 - x1^6*x2^12*z)^2 + x1^12*x2^24*(z^2 - x1^3*x2^6)",
        &VarContext::new(2, 1),
        &Integers,
    )
    .map_err(|e| e.to_string())?;
    expect("hypersurface", &report.hypersurface, &expected)?;
    let ghost = (Monomial::new(vec![12, 24], vec![2]), BigInt::from(2));
    expect("ghost x1^12*x2^24*z^2", report.ghosts.contains(&ghost), true)?;
    expect("reduction mod 2", reduce_poly(&report.hypersurface, &gf(2)), parse(EXAMPLE, 2, &gf(2)))
}

fn criterion_5() -> Outcome {
    let pres = run(EXAMPLE, 2, &gf(2)).presentation.ok_or("no presentation")?;
    let lift = lift_presentation(&pres).map_err(|e| e.to_string())?;
    let omega = default_tropical_weight(&pres, &[q(1, 1), q(1, 1)]).map_err(|e| e.to_string())?;
    expect("omega", omega.components(), &[q(1, 1), q(1, 1), q(9, 2), q(45, 4), q(189, 8)][..])?;
    let want = ["z^2 - x1^3*x2^6", "u1^2 - x1^6*x2^12*z", "u2^2 + x1^12*x2^24*u1"];
    for lambda in [[q(1, 1), q(1, 1)], [q(1, 1), q(2, 1)]] {
        let omega = default_tropical_weight(&pres, &lambda).map_err(|e| e.to_string())?;
        let report = initial_forms_weighted(&lift, &omega).map_err(|e| e.to_string())?;
        let got: Vec<String> = report.generators.iter().map(Poly::to_string).collect();
        expect("initial generators", got, want.iter().map(|s| s.to_string()).collect())?;
        expect("fiber_independent", report.fiber_independent, true)?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let f = wp("z^2 - 2*x1*z + x1^2 - x1^3", 1, &Field::rational());
    let prep = prepare_polyhedron(&f.poly, &[], &Grading::weierstrass(1, 2), &KappaConfig::default())
        .map_err(|e| e.to_string())?;
    expect("eliminations", prep.translations.len(), 1)?;
    expect("minimized polyhedron", prep.polyhedron.to_string().as_str(), "{3/2}")?;
    expect("strict-shrink checks", prep.shrink_checks, 1)?;
    let out = run("(z - x1)^2 - x1^3", 1, &Field::rational());
    expect("eliminations in the full run", out.eliminations(), 1)?;
    expect("terminal", out.invariant.terminal, Terminal::Infinity)
}

type Suite = (&'static str, fn(u32) -> Outcome);

fn criterion_7() -> Outcome {
    let suites: [Suite; 6] = [
        ("(a) LP membership vs Fourier-Motzkin", suite_lp_membership),
        ("(b) binomial-power re-expansion", suite_binomial_reexpansion),
        ("(c) presentation round trip", suite_round_trip),
        ("(d) overweight verification", suite_overweight),
        ("(e) resultant vs factored form", suite_resultant),
        ("(f) multiplicity descent", suite_descent),
    ];
    let mut failures = Vec::new();
    for (name, suite) in suites {
        let start = Instant::now();
        let result = suite(CASES);
        let status = if result.is_ok() { "ok" } else { "FAILED" };
        println!("    {name}: {status}, {CASES} cases in {:.3}s", start.elapsed().as_secs_f64());
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        (1, "kappa of z^2 - x1^3 over GF(2)", criterion_1, Duration::from_secs(1)),
        (2, "kappa and discriminant of a quasi-ordinary non-Teissier surface", criterion_2, Duration::from_secs(1)),
        (3, "three-stage kappa and overweight presentation", criterion_3, Duration::from_secs(5)),
        (4, "ghost monomials of the integer lift", criterion_4, Duration::from_secs(1)),
        (5, "initial-ideal fiber independence", criterion_5, Duration::from_secs(1)),
        (6, "characteristic-0 preparation", criterion_6, Duration::from_secs(1)),
        (7, "property suites", criterion_7, Duration::from_secs(60)),
    ];
    let mut all = true;
    for (n, name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.is_ok() && elapsed < limit;
        all &= pass;
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {n} [{verdict}] {name}: {:.3}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs());
        if let Err(e) = result {
            println!("    {e}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
