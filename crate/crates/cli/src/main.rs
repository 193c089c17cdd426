use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use rayon::prelude::*;

use teissier::kappa::KappaConfig;
use teissier::poly::{
    parse_polynomial, parse_rational_list, parse_univariate, weierstrass_validate, VarContext, WeierstrassPoly,
};
use teissier::ring::{Coeff, Field};

mod report;

use report::{Command, Report};

#[derive(Parser)]
#[command(name = "teissier", version, about = "Kappa invariant and Teissier classification of Weierstrass polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Kappa, discriminant, Teissier and quasi-ordinary verdicts.
    Classify(RunArgs),
    /// The kappa invariant and its overweight presentation.
    Kappa(RunArgs),
    /// The projected polyhedron, before and after preparation.
    Polyhedron(RunArgs),
    /// The discriminant with respect to z and the monomial-times-unit test.
    Discriminant(RunArgs),
    /// Integer lift of the presentation: ghost monomials and weighted initial forms.
    Deform(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Characteristic: 0 for the rationals, or a prime.
    #[arg(long = "char", default_value_t = 0)]
    characteristic: u64,
    /// Degree of a field extension GF(p^K); requires --modulus.
    #[arg(long)]
    ext: Option<u32>,
    /// Monic irreducible modulus in the generator `a`, e.g. "a^2 + a + 1".
    #[arg(long, requires = "ext")]
    modulus: Option<String>,
    /// Number of x variables; inferred from the input when absent.
    #[arg(long)]
    vars: Option<usize>,
    /// Total x-degree at which series are truncated.
    #[arg(long, default_value_t = 64)]
    trunc: u32,
    /// Translation steps allowed per stage.
    #[arg(long, default_value_t = teissier::kappa::DEFAULT_BUDGET)]
    budget: usize,
    /// Depth of the rewrite search for binomial initial forms.
    #[arg(long, default_value_t = teissier::kappa::DEFAULT_DEPTH)]
    depth: usize,
    /// Positive weights for the x variables, e.g. "1,2" (deform only).
    #[arg(long)]
    lambda: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Read one polynomial per line from FILE.
    #[arg(long, conflicts_with = "poly")]
    batch: Option<PathBuf>,
    /// The Weierstrass polynomial, e.g. "z^2 - x1^3".
    #[arg(required_unless_present = "batch")]
    poly: Option<String>,
}

/// Validated run configuration shared by every input of one invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub field: Field,
    pub vars: Option<usize>,
    pub kappa: KappaConfig,
    pub lambda: Option<Vec<BigRational>>,
}

fn field_from_args(args: &RunArgs) -> Result<Field> {
    let p = args.characteristic;
    match (p, args.ext, &args.modulus) {
        (0, None, _) => Ok(Field::rational()),
        (0, Some(_), _) => bail!("--ext needs a prime --char"),
        (_, None, _) => Ok(Field::prime(p)?),
        (_, Some(_), None) => bail!("--ext needs --modulus"),
        (_, Some(k), Some(text)) => {
            let base = Field::prime(p)?;
            let coeffs = parse_univariate(text, &base).context("bad --modulus")?;
            if coeffs.len() != k as usize + 1 {
                bail!("--modulus has degree {} but --ext is {k}", coeffs.len() - 1);
            }
            let modulus: Vec<u64> = coeffs
                .iter()
                .map(|c| match c {
                    Coeff::Prime(v) => *v,
                    _ => unreachable!("prime field coefficients"),
                })
                .collect();
            Ok(Field::extension(p, &modulus)?)
        }
    }
}

impl RunConfig {
    fn from_args(args: &RunArgs) -> Result<Self> {
        let kappa = KappaConfig { truncation: args.trunc, budget: args.budget, depth: args.depth };
        kappa.validate()?;
        let lambda = match &args.lambda {
            Some(text) => {
                let l = parse_rational_list(text).context("bad --lambda")?;
                if l.iter().any(|x| *x <= BigRational::from_integer(0.into())) {
                    bail!("--lambda components must be positive");
                }
                Some(l)
            }
            None => None,
        };
        if args.vars == Some(0) {
            bail!("--vars must be at least 1");
        }
        Ok(RunConfig { field: field_from_args(args)?, vars: args.vars, kappa, lambda })
    }
}

/// Largest index `i` among the `x<i>` in `text`, or 1.
fn infer_vars(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut d = 1;
    for (i, b) in bytes.iter().enumerate() {
        if *b != b'x' {
            continue;
        }
        let digits: String = bytes[i + 1..].iter().take_while(|c| c.is_ascii_digit()).map(|&c| c as char).collect();
        if let Ok(k) = digits.parse::<usize>() {
            d = d.max(k.min(teissier::polyhedron::MAX_DIMENSION + 1));
        }
    }
    d
}

pub fn read_input(text: &str, config: &RunConfig) -> Result<WeierstrassPoly> {
    let d = config.vars.unwrap_or_else(|| infer_vars(text));
    if d > teissier::polyhedron::MAX_DIMENSION {
        bail!("at most {} x variables are supported", teissier::polyhedron::MAX_DIMENSION);
    }
    let f = parse_polynomial(text, &VarContext::new(d, 1), &config.field)?;
    Ok(weierstrass_validate(&f)?)
}

/// Runs one input; returns the exit code and the report.
fn run_one(command: Command, text: &str, config: &RunConfig) -> (u8, Report) {
    match read_input(text, config).and_then(|f| report::build(command, text, &f, config)) {
        Ok(r) => (r.exit_code(command), r),
        Err(e) => (1, Report::error(text, format!("{e:#}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Classify(a) => (Command::Classify, a),
        Sub::Kappa(a) => (Command::Kappa, a),
        Sub::Polyhedron(a) => (Command::Polyhedron, a),
        Sub::Discriminant(a) => (Command::Discriminant, a),
        Sub::Deform(a) => (Command::Deform, a),
    };
    let config = match RunConfig::from_args(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };

    let inputs: Vec<String> = match &args.batch {
        Some(path) => match fs::read_to_string(path) {
            Ok(s) => {
                s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from).collect()
            }
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
        None => vec![args.poly.clone().unwrap_or_default()],
    };

    let results: Vec<(u8, Report)> = inputs.par_iter().map(|text| run_one(command, text, &config)).collect();
    let code = results.iter().map(|(c, _)| *c).max().unwrap_or(0);
    let reports: Vec<&Report> = results.iter().map(|(_, r)| r).collect();

    let single_error = args.batch.is_none() && reports[0].error.is_some();
    if single_error && !args.json {
        eprintln!("error: {}", reports[0].error.as_deref().unwrap_or_default());
        return ExitCode::from(code);
    }
    if args.json {
        let out = if args.batch.is_some() {
            serde_json::to_string_pretty(&reports)
        } else {
            serde_json::to_string_pretty(reports[0])
        };
        println!("{}", out.expect("reports serialize"));
    } else {
        let texts: Vec<String> = reports.iter().map(|r| r.to_text()).collect();
        print!("{}", texts.join("\n"));
    }
    ExitCode::from(code)
}
