//! Reports shared by the text and JSON outputs.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use num_rational::BigRational;
use serde::Serialize;

use teissier::deform::{default_tropical_weight, ghost_monomials, initial_forms_weighted, lift_presentation};
use teissier::kappa::{compute_kappa, prepare_polyhedron, KappaInvariant, KappaOutcome, PrepareStatus, Terminal};
use teissier::poly::{Poly, WeierstrassPoly};
use teissier::polyhedron::{projected_polyhedron, Grading, OrthantPolyhedron, QPoint};
use teissier::quasiord::{classify, discriminant_z, teissier_state, DiscriminantReport, MonomialUnit, TriState};

use crate::RunConfig;

pub const WEIGHT_LABEL: &str = "κ-derived weights";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Kappa,
    Polyhedron,
    Discriminant,
    Deform,
}

/// `true`, `false` or `"inconclusive"`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Tri {
    Decided(bool),
    Open(&'static str),
}

impl From<TriState> for Tri {
    fn from(t: TriState) -> Self {
        match t {
            TriState::True => Tri::Decided(true),
            TriState::False => Tri::Decided(false),
            TriState::Inconclusive => Tri::Open("inconclusive"),
        }
    }
}

impl Tri {
    fn text(&self) -> String {
        match self {
            Tri::Decided(b) => b.to_string(),
            Tri::Open(s) => s.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaJson {
    pub vertices: Vec<Vec<String>>,
    pub terminal: String,
    pub multiplicities: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialUnitJson {
    Yes(Vec<String>),
    No,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantJson {
    pub value: String,
    pub exact: bool,
    pub monomial_unit: MonomialUnitJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyhedronJson {
    pub projected: Vec<Vec<String>>,
    pub prepared: Vec<Vec<String>>,
    pub translations: usize,
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GhostJson {
    pub monomial: String,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InitialIdealJson {
    pub weights: &'static str,
    pub omega: Vec<String>,
    pub generators: Vec<String>,
    pub fiber_independent: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<KappaJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub teissier: Option<Tri>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasi_ordinary: Option<Tri>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<DiscriminantJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polyhedron: Option<PolyhedronJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presentation: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lift: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ghosts: Option<Vec<GhostJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_ideal: Option<InitialIdealJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_truncation: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

fn vertex_strings(p: &OrthantPolyhedron) -> Vec<Vec<String>> {
    p.vertices().iter().map(QPoint::to_strings).collect()
}

fn kappa_json(k: &KappaInvariant) -> KappaJson {
    KappaJson {
        vertices: k.vertices.iter().map(QPoint::to_strings).collect(),
        terminal: k.terminal.to_string(),
        multiplicities: k.multiplicities.clone(),
    }
}

fn discriminant_json(d: &DiscriminantReport) -> DiscriminantJson {
    DiscriminantJson {
        value: d.disc.to_string(),
        exact: d.exact,
        monomial_unit: match &d.monomial_unit {
            MonomialUnit::Yes(a) => MonomialUnitJson::Yes(a.iter().map(u32::to_string).collect()),
            MonomialUnit::No => MonomialUnitJson::No,
            MonomialUnit::Inconclusive => MonomialUnitJson::Inconclusive,
        },
    }
}

fn quasi_ordinary(d: &DiscriminantReport) -> Tri {
    match d.monomial_unit {
        MonomialUnit::Yes(_) => Tri::Decided(true),
        MonomialUnit::No => Tri::Decided(false),
        MonomialUnit::Inconclusive => Tri::Open("inconclusive"),
    }
}

fn add_kappa(r: &mut Report, out: &KappaOutcome) {
    r.kappa = Some(kappa_json(&out.invariant));
    r.teissier = Some(teissier_state(out.invariant.terminal).into());
    r.presentation = out.presentation.as_ref().map(|p| p.generator_strings());
    r.certified_truncation = Some(out.invariant.certified_truncation);
    r.diagnostics.extend(out.invariant.diagnostics.iter().cloned());
}

pub fn build(command: Command, input: &str, f: &WeierstrassPoly, config: &RunConfig) -> Result<Report> {
    let mut r = Report { input: input.to_string(), field: Some(config.field.to_string()), ..Report::default() };
    let limit = Some(config.kappa.truncation);
    match command {
        Command::Classify => {
            let c = classify(f, &config.kappa)?;
            add_kappa(&mut r, &c.kappa);
            r.quasi_ordinary = Some(c.quasi_ordinary.into());
            r.discriminant = Some(discriminant_json(&c.discriminant));
        }
        Command::Kappa => add_kappa(&mut r, &compute_kappa(f, &config.kappa)?),
        Command::Polyhedron => {
            let grading = Grading::weierstrass(f.d(), f.n);
            let poly = f.poly.clone().truncated(limit);
            let prep = prepare_polyhedron(&poly, &[], &grading, &config.kappa)?;
            let status = match prep.status {
                PrepareStatus::Prepared => "prepared".to_string(),
                PrepareStatus::BudgetExhausted => "inconclusive: budget exhausted".to_string(),
                PrepareStatus::FieldExtensionRequired { degree } => {
                    format!("inconclusive: field extension of degree {degree} required")
                }
            };
            r.polyhedron = Some(PolyhedronJson {
                projected: vertex_strings(&projected_polyhedron(f)),
                prepared: vertex_strings(&prep.polyhedron),
                translations: prep.translations.len(),
                status,
            });
        }
        Command::Discriminant => {
            let d = discriminant_z(f, limit);
            r.quasi_ordinary = Some(quasi_ordinary(&d));
            r.discriminant = Some(discriminant_json(&d));
        }
        Command::Deform => {
            let out = compute_kappa(f, &config.kappa)?;
            add_kappa(&mut r, &out);
            if let Some(pres) = &out.presentation {
                let lift = lift_presentation(pres)?;
                r.lift = Some(lift.generators().iter().map(Poly::to_string).collect());
                let ghosts = ghost_monomials(&lift);
                r.ghosts = Some(
                    ghosts
                        .ghosts
                        .iter()
                        .map(|(m, c)| GhostJson { monomial: m.to_string(), coeff: c.to_string() })
                        .collect(),
                );
                let lambda = match &config.lambda {
                    Some(l) => l.clone(),
                    None => vec![BigRational::from_integer(1.into()); f.d()],
                };
                if lambda.len() != f.d() {
                    bail!("--lambda needs {} components, got {}", f.d(), lambda.len());
                }
                let omega = default_tropical_weight(pres, &lambda)?;
                let report = initial_forms_weighted(&lift, &omega)?;
                r.initial_ideal = Some(InitialIdealJson {
                    weights: WEIGHT_LABEL,
                    omega: omega.components().iter().map(BigRational::to_string).collect(),
                    generators: report.generators.iter().map(Poly::to_string).collect(),
                    fiber_independent: report.fiber_independent,
                    witness: report.witness.map(|w| w.to_string()),
                });
            } else if out.invariant.terminal != Terminal::Inconclusive {
                r.diagnostics.push("no overweight presentation".into());
            }
        }
    }
    Ok(r)
}

fn kappa_text(k: &KappaJson) -> String {
    let mut parts: Vec<String> =
        k.vertices.iter().map(|v| if v.len() == 1 { v[0].clone() } else { format!("({})", v.join(", ")) }).collect();
    parts.push(k.terminal.clone());
    format!("({})", parts.join(", "))
}

fn polyhedron_text(vs: &[Vec<String>]) -> String {
    let items: Vec<String> =
        vs.iter().map(|v| if v.len() == 1 { v[0].clone() } else { format!("({})", v.join(", ")) }).collect();
    format!("{{{}}}", items.join(", "))
}

impl Report {
    pub fn error(input: &str, msg: String) -> Self {
        Report { input: input.to_string(), error: Some(msg), ..Report::default() }
    }

    pub fn exit_code(&self, command: Command) -> u8 {
        if self.error.is_some() {
            return 1;
        }
        let open = |t: &Option<Tri>| matches!(t, Some(Tri::Open(_)));
        let terminal = self.kappa.as_ref().map(|k| k.terminal.as_str());
        match command {
            Command::Classify if open(&self.teissier) || open(&self.quasi_ordinary) => 2,
            Command::Kappa | Command::Deform if terminal == Some(&Terminal::Inconclusive.to_string()) => 2,
            Command::Deform if self.presentation.is_none() => 3,
            Command::Discriminant if open(&self.quasi_ordinary) => 2,
            Command::Polyhedron if self.polyhedron.as_ref().is_some_and(|p| p.status != "prepared") => 2,
            _ => 0,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: &str| writeln!(s, "{k}: {v}").unwrap();
        line("input", &self.input);
        if let Some(e) = &self.error {
            line("error", e);
        }
        if let Some(f) = &self.field {
            line("field", f);
        }
        if let Some(k) = &self.kappa {
            line("kappa", &kappa_text(k));
            let m: Vec<String> = k.multiplicities.iter().map(u32::to_string).collect();
            line("multiplicities", &m.join(", "));
        }
        if let Some(t) = &self.teissier {
            line("teissier", &t.text());
        }
        if let Some(t) = &self.quasi_ordinary {
            line("quasi_ordinary", &t.text());
        }
        if let Some(d) = &self.discriminant {
            line("discriminant", &d.value);
            line("discriminant_exact", &d.exact.to_string());
            let mu = match &d.monomial_unit {
                MonomialUnitJson::Yes(a) => format!("yes ({})", a.join(", ")),
                MonomialUnitJson::No => "no".into(),
                MonomialUnitJson::Inconclusive => "inconclusive".into(),
            };
            line("monomial_unit", &mu);
        }
        if let Some(p) = &self.polyhedron {
            line("projected", &polyhedron_text(&p.projected));
            line("prepared", &polyhedron_text(&p.prepared));
            line("translations", &p.translations.to_string());
            line("status", &p.status);
        }
        let list = |s: &mut String, k: &str, items: &[String]| {
            if items.is_empty() {
                writeln!(s, "{k}: none").unwrap();
                return;
            }
            writeln!(s, "{k}:").unwrap();
            for i in items {
                writeln!(s, "  {i}").unwrap();
            }
        };
        if let Some(p) = &self.presentation {
            list(&mut s, "presentation", p);
        }
        if let Some(l) = &self.lift {
            list(&mut s, "lift", l);
        }
        if let Some(g) = &self.ghosts {
            let items: Vec<String> = g.iter().map(|g| format!("{}: {}", g.monomial, g.coeff)).collect();
            list(&mut s, "ghosts", &items);
        }
        if let Some(i) = &self.initial_ideal {
            writeln!(s, "omega ({}): {}", i.weights, i.omega.join(", ")).unwrap();
            list(&mut s, "initial_ideal", &i.generators);
            writeln!(s, "fiber_independent: {}", i.fiber_independent).unwrap();
            if let Some(w) = &i.witness {
                writeln!(s, "witness: {w}").unwrap();
            }
        }
        if let Some(t) = self.certified_truncation {
            writeln!(s, "certified_truncation: {t}").unwrap();
        }
        if !self.diagnostics.is_empty() {
            list(&mut s, "diagnostics", &self.diagnostics);
        }
        s
    }
}
