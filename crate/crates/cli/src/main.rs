//! Command-line surface: build constructions, evaluate them at rational
//! points, run verification checks, dump grids, sum oscillations, and probe
//! divergences. Outputs are deterministic JSON (or CSV for grid dumps) with
//! every number as a canonical "p/q" string.
//!
//! Exit codes: 0 success/pass, 1 verification fail, 2 usage error,
//! 3 resource budget exceeded.

mod points;

use clap::{Parser, Subcommand};
use mcint_core::constructions::{m1_build, m3_build, m4_build, ConstructedTriple, TripleMeta, Value};
use mcint_core::error::Error;
use mcint_core::exact::Rational;
use mcint_core::verify::{
    derivative_check, divergence_probe, mc_sweep, osc_sum, perron_validity_check, sm_check,
    DeltaRule, ProbeSource, SweepMode,
};
use points::PointSet;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

/// Environment variable bounding enumerated intervals per level set.
const BUDGET_ENV: &str = "MCINT_MAX_INTERVALS";
const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Parser)]
#[command(
    name = "mcint",
    about = "Exact constructions and checks for monotonically controlled integrals",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the base-q Cantor function exactly.
    Psi {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        x: String,
    },
    /// Build a construction and write its metadata.
    Build {
        #[command(subcommand)]
        what: BuildCmd,
    },
    /// Evaluate a built construction at a point.
    Eval {
        #[arg(long = "fn")]
        fn_path: PathBuf,
        #[arg(long)]
        x: String,
        /// Which component: F, f, or phi.
        #[arg(long, default_value = "F")]
        which: String,
    },
    /// Run a verification check and emit its report.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Dump x, F, f, phi (and optionally a check ratio) over a point set.
    Sweep {
        #[arg(long = "fn")]
        fn_path: PathBuf,
        #[arg(long)]
        points: String,
        /// Center for the ratio column.
        #[arg(long)]
        center: Option<String>,
        /// Shift parameter for the ratio column.
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact sum of |F(b) - F(a)| over a gap set.
    OscSum {
        #[arg(long = "fn")]
        fn_path: PathBuf,
        #[arg(long)]
        gaps: String,
        #[arg(long)]
        plateau_aware: bool,
    },
    /// Least level at which a divergent level sum reaches a target.
    Probe {
        #[arg(long)]
        source: String,
        /// Region "a,b".
        #[arg(long)]
        region: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1000)]
        cap: u32,
    },
}

#[derive(Subcommand)]
enum BuildCmd {
    /// Bump sum over the ternary system (needs alpha >= 2).
    M3 {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Staircase over the base-5 system.
    M4 {
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated step-family aggregate on an interval "lo,hi".
    M1 {
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value = "0,1")]
        interval: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Controlled-derivative ratio sweep.
    Mc {
        #[arg(long = "fn")]
        fn_path: PathBuf,
        #[arg(long)]
        beta: String,
        /// Epsilon ladder, comma separated.
        #[arg(long)]
        eps: String,
        #[arg(long)]
        points: String,
        #[arg(long, default_value = "m3-proof-delta")]
        delta_rule: String,
        #[arg(long)]
        report_only: bool,
    },
    /// Monotonicity-premise check of F against the triple's control.
    Sm {
        #[arg(long = "fn")]
        fn_path: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        points: String,
        /// Step sizes, comma separated.
        #[arg(long)]
        h: String,
        #[arg(long, default_value = "0")]
        tol: String,
    },
    /// Difference-quotient residual scan at one point.
    Deriv {
        #[arg(long = "fn")]
        fn_path: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        h: String,
    },
    /// Major/minor validity of F +- eps phi on a grid.
    Perron {
        #[arg(long = "fn")]
        fn_path: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        points: String,
    },
}

fn budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

fn parse_rational(s: &str) -> Result<Rational, Error> {
    s.parse()
}

fn parse_rational_list(s: &str) -> Result<Vec<Rational>, Error> {
    s.split(',').map(|p| p.trim().parse()).collect()
}

fn parse_pair(s: &str) -> Result<(Rational, Rational), Error> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::parse(format!("expected 'a,b', got '{s}'")))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn load_triple(path: &PathBuf) -> Result<ConstructedTriple, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(format!("cannot read {}: {e}", path.display())))?;
    let meta = TripleMeta::from_json(&text)?;
    ConstructedTriple::rebuild(&meta)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Error::parse(format!("cannot write {}: {e}", path.display()))),
    }
}

fn value_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Exact(x) => json!({ "value": x.to_string() }),
        Value::Enclosed(e) => json!({
            "enclosure": { "lo": e.lo().to_string(), "hi": e.hi().to_string() }
        }),
    }
}

/// CSV cell for a possibly enclosed value; enclosures are lossily collapsed
/// to their midpoint (the JSON output is the faithful one).
fn value_csv(v: &Value) -> String {
    match v {
        Value::Exact(x) => x.to_string(),
        Value::Enclosed(e) => ((e.lo() + e.hi()) * Rational::ratio(1, 2)).to_string(),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Psi { q, x } => {
            let sys = mcint_core::cantor::CantorSystem::with_level_budget(q, budget())?;
            let x = parse_rational(&x)?;
            let value = sys.psi_exact(&x)?;
            emit(&json!({ "value": value.to_string() }).to_string(), None)?;
            Ok(0)
        }
        Cmd::Build { what } => {
            let (triple, out) = match what {
                BuildCmd::M3 { alpha, depth, out } => {
                    (m3_build(parse_rational(&alpha)?, depth)?, out)
                }
                BuildCmd::M4 { depth, out } => (m4_build(depth)?, out),
                BuildCmd::M1 {
                    depth,
                    interval,
                    out,
                } => {
                    let (lo, hi) = parse_pair(&interval)?;
                    (m1_build(depth, lo, hi)?.into_triple(), out)
                }
            };
            emit(&triple.meta().to_json(), out.as_ref())?;
            Ok(0)
        }
        Cmd::Eval { fn_path, x, which } => {
            let triple = load_triple(&fn_path)?;
            let x = parse_rational(&x)?;
            let payload = match which.as_str() {
                "F" => value_json(&triple.integral_at(&x)?),
                "f" => json!({ "value": triple.integrand_at(&x)?.to_string() }),
                "phi" => json!({ "value": triple.control_at(&x)?.to_string() }),
                other => {
                    return Err(Error::parse(format!(
                        "unknown component '{other}'; use F, f, or phi"
                    )))
                }
            };
            emit(&payload.to_string(), None)?;
            Ok(0)
        }
        Cmd::Verify { what } => {
            let report = match what {
                VerifyCmd::Mc {
                    fn_path,
                    beta,
                    eps,
                    points,
                    delta_rule,
                    report_only,
                } => {
                    let triple = load_triple(&fn_path)?;
                    let beta = parse_rational(&beta)?;
                    let ladder = parse_rational_list(&eps)?;
                    let pts = PointSet::parse(&points)?.points(budget())?;
                    let rule: DeltaRule = delta_rule.parse()?;
                    let mode = if report_only {
                        SweepMode::ReportOnly
                    } else {
                        SweepMode::Enforce
                    };
                    mc_sweep(&triple, &beta, &ladder, &pts, &rule, mode)?
                }
                VerifyCmd::Sm {
                    fn_path,
                    alpha,
                    points,
                    h,
                    tol,
                } => {
                    let triple = load_triple(&fn_path)?;
                    let alpha = parse_rational(&alpha)?;
                    let pts = PointSet::parse(&points)?.points(budget())?;
                    let hs = parse_rational_list(&h)?;
                    let tol = parse_rational(&tol)?;
                    let f = triple.integral_fn();
                    let phi = triple.control_fn();
                    sm_check(&*f, &*phi, &alpha, &pts, &hs, &tol)?
                }
                VerifyCmd::Deriv { fn_path, x, h } => {
                    let triple = load_triple(&fn_path)?;
                    let x = parse_rational(&x)?;
                    let hs = parse_rational_list(&h)?;
                    let f_upper = triple.integral_fn();
                    let ft = Arc::new(triple);
                    let f_lower = mcint_core::constructions::FnEval({
                        let ft = ft.clone();
                        move |p: &Rational| ft.integrand_at(p).unwrap()
                    });
                    derivative_check(&*f_upper, &f_lower, &x, &hs)?
                }
                VerifyCmd::Perron {
                    fn_path,
                    eps,
                    points,
                } => {
                    let triple = Arc::new(load_triple(&fn_path)?);
                    let eps = parse_rational(&eps)?;
                    let pts = PointSet::parse(&points)?.points(budget())?;
                    let (fu, cu, e1) = (triple.integral_fn(), triple.control_fn(), eps.clone());
                    let u = mcint_core::constructions::FnEval(move |p: &Rational| {
                        fu.eval(p).unwrap().exact().unwrap() + &(&e1 * &cu.eval_exact(p).unwrap())
                    });
                    let (fv, cv, e2) = (triple.integral_fn(), triple.control_fn(), eps);
                    let v = mcint_core::constructions::FnEval(move |p: &Rational| {
                        fv.eval(p).unwrap().exact().unwrap() - &(&e2 * &cv.eval_exact(p).unwrap())
                    });
                    let ft = triple.clone();
                    let f = mcint_core::constructions::FnEval(move |p: &Rational| {
                        ft.integrand_at(p).unwrap()
                    });
                    perron_validity_check(&u, &v, &f, &pts)?
                }
            };
            let passed = report.passed();
            emit(&report.to_json(), None)?;
            Ok(if passed { 0 } else { 1 })
        }
        Cmd::Sweep {
            fn_path,
            points,
            center,
            beta,
            format,
            out,
        } => {
            let triple = load_triple(&fn_path)?;
            let pts = PointSet::parse(&points)?.points(budget())?;
            let ratio_base = match (center, beta) {
                (Some(c), Some(b)) => Some((parse_rational(&c)?, parse_rational(&b)?)),
                (None, None) => None,
                _ => {
                    return Err(Error::parse(
                        "ratio column needs both --center and --beta",
                    ))
                }
            };
            let mut rows = Vec::new();
            for x in &pts {
                let f_upper = triple.integral_at(x)?;
                let f_lower = triple.integrand_at(x)?;
                let phi = triple.control_at(x)?;
                let ratio = match &ratio_base {
                    None => None,
                    Some((c, b)) => {
                        if x == c {
                            None
                        } else {
                            let fc = triple.integral_at(c)?.exact()?.clone();
                            let num =
                                (f_upper.exact()? - &fc - &(&triple.integrand_at(c)? * &(x - c)))
                                    .abs();
                            let den =
                                (triple.control_at(&(c + &(b * &(x - c))))? - triple.control_at(c)?)
                                    .abs();
                            Some(num.checked_div(&den)?)
                        }
                    }
                };
                rows.push((x.clone(), f_upper, f_lower, phi, ratio));
            }
            let text = match format.as_str() {
                "json" => {
                    let arr: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(x, fu, fl, phi, ratio)| {
                            let mut row = serde_json::Map::new();
                            row.insert("x".into(), json!(x.to_string()));
                            row.insert("F".into(), value_json(fu));
                            row.insert("f".into(), json!(fl.to_string()));
                            row.insert("phi".into(), json!(phi.to_string()));
                            row.insert(
                                "ratio".into(),
                                match ratio {
                                    Some(r) => json!(r.to_string()),
                                    None => serde_json::Value::Null,
                                },
                            );
                            serde_json::Value::Object(row)
                        })
                        .collect();
                    serde_json::Value::Array(arr).to_string()
                }
                "csv" => {
                    let mut lines = vec!["x,F,f,phi,ratio".to_string()];
                    for (x, fu, fl, phi, ratio) in &rows {
                        lines.push(format!(
                            "{},{},{},{},{}",
                            x,
                            value_csv(fu),
                            fl,
                            phi,
                            ratio.as_ref().map(|r| r.to_string()).unwrap_or_default()
                        ));
                    }
                    lines.join("\n")
                }
                other => return Err(Error::parse(format!("unknown format '{other}'"))),
            };
            emit(&text, out.as_ref())?;
            Ok(0)
        }
        Cmd::OscSum {
            fn_path,
            gaps,
            plateau_aware,
        } => {
            let triple = load_triple(&fn_path)?;
            let gap_list = PointSet::parse(&gaps)?.gap_intervals(budget())?;
            let sum = osc_sum(&triple, &gap_list, plateau_aware)?;
            emit(
                &json!({ "gaps": gap_list.len(), "sum": sum.to_string() }).to_string(),
                None,
            )?;
            Ok(0)
        }
        Cmd::Probe {
            source,
            region,
            target,
            cap,
        } => {
            let source: ProbeSource = source.parse()?;
            let region = parse_pair(&region)?;
            let target = parse_rational(&target)?;
            let depth = divergence_probe(source, region, &target, cap)?;
            emit(&json!({ "depth": depth }).to_string(), None)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let (kind, code) = match &err {
                Error::Domain(_) => ("domain", 2u8),
                Error::Parse(_) => ("parse", 2),
                Error::Budget(_) => ("budget", 3),
            };
            eprintln!("{}", json!({ "kind": kind, "message": err.to_string() }));
            ExitCode::from(code)
        }
    }
}
