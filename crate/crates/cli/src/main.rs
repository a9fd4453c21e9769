//! `hdet` — evaluate the second-Hankel-determinant bound for m-fold
//! symmetric bi-univalent function classes and run its verification
//! oracles from the command line.
//!
//! Exit codes: 0 success, 1 verification violations, 2 argument errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::json;

use anyhow::{anyhow, bail, Result};
use hdet_core::{
    brute_force_max, corollary_bound, figure_csv, hankel_determinant, invert_series,
    monte_carlo_verify, parse_rational, tau, theorem_bound, validate_params, Corollary, FigureKind,
    MFoldSeries, Params,
};

#[derive(Parser)]
#[command(
    name = "hdet",
    version,
    about = "Second-Hankel-determinant bounds for m-fold symmetric bi-univalent \
             function classes, with built-in verification oracles",
    after_help = "lambda, beta and series coefficients accept decimal strings \
                  (\"0.25\") or exact fractions (\"1/4\").\n\
                  HDET_THREADS caps the worker count (default: machine parallelism)."
)]
struct Cli {
    /// Output format (figures always emit CSV).
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct ParamArgs {
    /// Fold order (integer >= 1).
    #[arg(long)]
    m: i64,
    /// Operator weight (rational >= 1).
    #[arg(long)]
    lambda: String,
    /// Operator order (integer >= 0).
    #[arg(long)]
    gamma: String,
    /// Class order (rational in [0, 1)).
    #[arg(long)]
    beta: String,
}

impl ParamArgs {
    fn parse(&self) -> Result<Params> {
        Ok(validate_params(
            self.m,
            parse_rational(&self.lambda)?,
            parse_rational(&self.gamma)?,
            parse_rational(&self.beta)?,
        )?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the piecewise bound for one parameter set.
    Bound(ParamArgs),
    /// Print the branch threshold tau of a (m, lambda, gamma) family.
    Tau {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        gamma: String,
    },
    /// Evaluate the bound over a parameter grid, one row per combination.
    Sweep {
        /// Fold orders, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        m: Vec<i64>,
        /// Lambda values, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        lambda: Vec<String>,
        /// Gamma values, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        gamma: Vec<String>,
        /// Beta values, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        beta: Vec<String>,
        /// Also run the brute-force oracle per row and report the gap;
        /// exit 1 if any relative gap exceeds --tol.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 401)]
        rho_steps: usize,
        #[arg(long, default_value_t = 101)]
        mu_steps: usize,
        /// Relative gap tolerance for --check.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Monte Carlo verification: sampled functionals must stay under the bound.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Emit CSV figure data for the F-coefficient curves.
    Figures {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        gamma: String,
        /// Beta values, comma separated.
        #[arg(long, value_delimiter = ',')]
        betas: Vec<String>,
        #[arg(long, default_value_t = 401)]
        rho_steps: usize,
    },
    /// Evaluate a specialised corollary bound and its threshold.
    Corollary {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Fold order (mfold only).
        #[arg(long)]
        m: Option<i64>,
        /// Lambda (general1fold, lambda1fold).
        #[arg(long)]
        lambda: Option<String>,
        /// Gamma (general1fold only).
        #[arg(long)]
        gamma: Option<i64>,
        #[arg(long)]
        beta: String,
    },
    /// Invert a truncated m-fold symmetric series (exact rational output).
    Invert {
        #[arg(long)]
        m: i64,
        /// The coefficients a_{m+1}, a_{2m+1}, a_{3m+1}, comma separated.
        #[arg(long, value_delimiter = ',')]
        coeffs: Vec<String>,
    },
    /// Hankel determinant H_q(n) of a coefficient sequence starting at a_1.
    Hankel {
        /// The coefficients a_1, a_2, ..., comma separated.
        #[arg(long, value_delimiter = ',')]
        coeffs: Vec<String>,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Fcurves,
    F3plus2f4,
    F2plus2f3f4,
    Kcurve,
}

impl From<Which> for FigureKind {
    fn from(w: Which) -> Self {
        match w {
            Which::Fcurves => FigureKind::Fcurves,
            Which::F3plus2f4 => FigureKind::F3Plus2F4,
            Which::F2plus2f3f4 => FigureKind::F2Plus2F3F4,
            Which::Kcurve => FigureKind::KCurve,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// m-fold with lambda = 1, gamma = 0 (threshold v).
    Mfold,
    /// 1-fold with free lambda, gamma (threshold xi).
    General1fold,
    /// 1-fold with gamma = 0 and free lambda (threshold epsilon).
    Lambda1fold,
    /// 1-fold base family (threshold (11 - sqrt 37)/12).
    Base,
}

enum Outcome {
    Clean,
    Violations,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("HDET_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: HDET_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Bound(args) => {
            let p = args.parse()?;
            let b = theorem_bound(&p);
            let out = match cli.format {
                Format::Json => json_line(json!({
                    "command": "bound",
                    "m": p.m(),
                    "lambda": args.lambda,
                    "gamma": p.gamma(),
                    "beta": args.beta,
                    "value": b.value,
                    "branch": b.branch.to_string(),
                    "tau": b.tau,
                    "rho_star": b.rho_star,
                })),
                Format::Csv => format!(
                    "m,lambda,gamma,beta,value,branch,tau,rho_star\n{},{},{},{},{},{},{},{}\n",
                    p.m(),
                    args.lambda,
                    p.gamma(),
                    args.beta,
                    b.value,
                    b.branch,
                    b.tau,
                    b.rho_star
                ),
                Format::Text => format!(
                    "{p}\nvalue    = {}\nbranch   = {}\ntau      = {}\nrho_star = {}\n",
                    b.value, b.branch, b.tau, b.rho_star
                ),
            };
            emit(cli, &out)?;
            Ok(Outcome::Clean)
        }
        Command::Tau { m, lambda, gamma } => {
            let p = validate_params(
                *m,
                parse_rational(lambda)?,
                parse_rational(gamma)?,
                BigRational::from_integer(0.into()),
            )?;
            let t = tau(&p);
            let out = match cli.format {
                Format::Json => json_line(json!({
                    "command": "tau",
                    "m": p.m(),
                    "lambda": lambda,
                    "gamma": p.gamma(),
                    "tau": t,
                })),
                Format::Csv => format!(
                    "m,lambda,gamma,tau\n{},{},{},{}\n",
                    p.m(),
                    lambda,
                    p.gamma(),
                    t
                ),
                Format::Text => format!("{}\ntau = {}\n", p.family(), t),
            };
            emit(cli, &out)?;
            Ok(Outcome::Clean)
        }
        Command::Sweep {
            m,
            lambda,
            gamma,
            beta,
            check,
            rho_steps,
            mu_steps,
            tol,
        } => {
            if *rho_steps < 3 || *mu_steps < 3 {
                bail!("rho-steps and mu-steps need at least 3 steps");
            }
            let mut rows = Vec::new();
            let mut worst_gap = 0.0f64;
            for mv in m {
                for lv in lambda {
                    for gv in gamma {
                        for bv in beta {
                            let p = validate_params(
                                *mv,
                                parse_rational(lv)?,
                                parse_rational(gv)?,
                                parse_rational(bv)?,
                            )?;
                            let b = theorem_bound(&p);
                            let oracle = check.then(|| {
                                let s = brute_force_max(&p, *rho_steps, *mu_steps, true);
                                let gap = (s.max_value - b.value).abs()
                                    / b.value.abs().max(f64::MIN_POSITIVE);
                                (s.max_value, gap)
                            });
                            if let Some((_, gap)) = oracle {
                                worst_gap = worst_gap.max(gap);
                            }
                            rows.push((
                                *mv,
                                lv.clone(),
                                gv.clone(),
                                bv.clone(),
                                b.value,
                                b.branch.to_string(),
                                b.tau,
                                oracle,
                            ));
                        }
                    }
                }
            }

            let out = match cli.format {
                Format::Json => {
                    let objects: Vec<_> = rows
                        .iter()
                        .map(|(m, l, g, b, value, branch, tau, oracle)| {
                            let mut o = json!({
                                "m": m,
                                "lambda": l,
                                "gamma": g,
                                "beta": b,
                                "value": value,
                                "branch": branch,
                                "tau": tau,
                            });
                            if let Some((oracle_max, gap)) = oracle {
                                o["oracle_max"] = json!(oracle_max);
                                o["rel_gap"] = json!(gap);
                            }
                            o
                        })
                        .collect();
                    json_line(serde_json::Value::Array(objects))
                }
                Format::Csv | Format::Text => {
                    let mut s = String::new();
                    if *check {
                        s.push_str("m,lambda,gamma,beta,value,branch,tau,oracle_max,rel_gap\n");
                    } else {
                        s.push_str("m,lambda,gamma,beta,value,branch,tau\n");
                    }
                    for (m, l, g, b, value, branch, tau, oracle) in &rows {
                        s.push_str(&format!("{m},{l},{g},{b},{value},{branch},{tau}"));
                        if let Some((oracle_max, gap)) = oracle {
                            s.push_str(&format!(",{oracle_max},{gap}"));
                        }
                        s.push('\n');
                    }
                    s
                }
            };
            emit(cli, &out)?;
            if *check && worst_gap > *tol {
                return Ok(Outcome::Violations);
            }
            Ok(Outcome::Clean)
        }
        Command::Verify {
            params,
            samples,
            seed,
        } => {
            if *samples < 1 {
                bail!("samples must be >= 1");
            }
            let p = params.parse()?;
            let report = monte_carlo_verify(&p, *samples, *seed)?;
            let out = match cli.format {
                Format::Json => json_line(json!({
                    "command": "verify",
                    "m": p.m(),
                    "lambda": params.lambda,
                    "gamma": p.gamma(),
                    "beta": params.beta,
                    "samples": report.samples,
                    "seed": report.seed,
                    "bound": report.bound,
                    "observed_max": report.observed_max,
                    "worst_ratio": report.worst_ratio,
                    "violations": report.violations,
                })),
                Format::Csv => format!(
                    "m,lambda,gamma,beta,samples,seed,bound,observed_max,worst_ratio,violations\n\
                     {},{},{},{},{},{},{},{},{},{}\n",
                    p.m(),
                    params.lambda,
                    p.gamma(),
                    params.beta,
                    report.samples,
                    report.seed,
                    report.bound,
                    report.observed_max,
                    report.worst_ratio,
                    report.violations
                ),
                Format::Text => format!(
                    "{p}\nsamples      = {}\nseed         = {}\nbound        = {}\n\
                     observed_max = {}\nworst_ratio  = {}\nviolations   = {}\n",
                    report.samples,
                    report.seed,
                    report.bound,
                    report.observed_max,
                    report.worst_ratio,
                    report.violations
                ),
            };
            emit(cli, &out)?;
            if report.violations > 0 {
                Ok(Outcome::Violations)
            } else {
                Ok(Outcome::Clean)
            }
        }
        Command::Figures {
            which,
            m,
            lambda,
            gamma,
            betas,
            rho_steps,
        } => {
            if *rho_steps < 2 {
                bail!("rho-steps needs at least the two endpoints");
            }
            let p = validate_params(
                *m,
                parse_rational(lambda)?,
                parse_rational(gamma)?,
                BigRational::from_integer(0.into()),
            )?;
            let betas = betas
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>, _>>()?;
            let csv = figure_csv(p.family(), &betas, (*which).into(), *rho_steps)?;
            emit(cli, &csv)?;
            Ok(Outcome::Clean)
        }
        Command::Corollary {
            kind,
            m,
            lambda,
            gamma,
            beta,
        } => {
            let beta_rat = parse_rational(beta)?;
            let missing =
                |flag: &'static str| anyhow!("--{flag} is required for this corollary kind");
            let (name, corollary) = match kind {
                Kind::Mfold => {
                    let m = m.ok_or_else(|| missing("m"))?;
                    if m < 1 {
                        bail!("m = {m} violates m >= 1");
                    }
                    (
                        "mfold",
                        Corollary::MFold {
                            m: m as u32,
                            beta: beta_rat,
                        },
                    )
                }
                Kind::General1fold => {
                    let lambda = lambda.as_ref().ok_or_else(|| missing("lambda"))?;
                    let gamma = gamma.ok_or_else(|| missing("gamma"))?;
                    if gamma < 0 {
                        bail!("gamma = {gamma} violates gamma >= 0");
                    }
                    (
                        "general1fold",
                        Corollary::General1Fold {
                            lambda: parse_rational(lambda)?,
                            gamma: gamma as u32,
                            beta: beta_rat,
                        },
                    )
                }
                Kind::Lambda1fold => {
                    let lambda = lambda.as_ref().ok_or_else(|| missing("lambda"))?;
                    (
                        "lambda1fold",
                        Corollary::Lambda1Fold {
                            lambda: parse_rational(lambda)?,
                            beta: beta_rat,
                        },
                    )
                }
                Kind::Base => ("base", Corollary::Base { beta: beta_rat }),
            };
            let c = corollary_bound(&corollary)?;
            let out = match cli.format {
                Format::Json => {
                    let mut o = json!({
                        "command": "corollary",
                        "kind": name,
                        "beta": beta,
                        "value": c.value,
                        "threshold": c.threshold,
                    });
                    if let Some(m) = m {
                        o["m"] = json!(m);
                    }
                    if let Some(l) = lambda {
                        o["lambda"] = json!(l);
                    }
                    if let Some(g) = gamma {
                        o["gamma"] = json!(g);
                    }
                    json_line(o)
                }
                Format::Csv => format!(
                    "kind,beta,value,threshold\n{name},{beta},{},{}\n",
                    c.value, c.threshold
                ),
                Format::Text => format!(
                    "kind      = {name}\nbeta      = {beta}\nvalue     = {}\nthreshold = {}\n",
                    c.value, c.threshold
                ),
            };
            emit(cli, &out)?;
            Ok(Outcome::Clean)
        }
        Command::Invert { m, coeffs } => {
            if coeffs.len() != 3 {
                bail!(
                    "--coeffs needs exactly 3 coefficients, got {}",
                    coeffs.len()
                );
            }
            if *m < 1 {
                bail!("m = {m} violates m >= 1");
            }
            let values = coeffs
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>, _>>()?;
            let series = MFoldSeries::new(*m as u32, values)?;
            let t = invert_series(&series)?;
            let out = match cli.format {
                Format::Json => json_line(json!({
                    "command": "invert",
                    "m": m,
                    "coeffs": coeffs,
                    "b_m_plus_1": t.a_m1.to_string(),
                    "b_2m_plus_1": t.a_2m1.to_string(),
                    "b_3m_plus_1": t.a_3m1.to_string(),
                })),
                Format::Csv => format!(
                    "b_m_plus_1,b_2m_plus_1,b_3m_plus_1\n{},{},{}\n",
                    t.a_m1, t.a_2m1, t.a_3m1
                ),
                Format::Text => format!(
                    "b_{{m+1}}  = {}\nb_{{2m+1}} = {}\nb_{{3m+1}} = {}\n",
                    t.a_m1, t.a_2m1, t.a_3m1
                ),
            };
            emit(cli, &out)?;
            Ok(Outcome::Clean)
        }
        Command::Hankel { coeffs, q, n } => {
            let values = coeffs
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>, _>>()?;
            let h = hankel_determinant(&values, *q, *n)?;
            let out = match cli.format {
                Format::Json => json_line(json!({
                    "command": "hankel",
                    "q": q,
                    "n": n,
                    "coeffs": coeffs,
                    "determinant": h.to_string(),
                    "determinant_f64": h.to_f64(),
                })),
                Format::Csv => format!("q,n,determinant\n{q},{n},{h}\n"),
                Format::Text => format!("H_{q}({n}) = {h}\n"),
            };
            emit(cli, &out)?;
            Ok(Outcome::Clean)
        }
    }
}

fn json_line(v: serde_json::Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn emit(cli: &Cli, content: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, content)?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}
