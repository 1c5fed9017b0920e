//! Command-line surface: factor and omega queries, inequality verification,
//! extremal family construction and batch sweeps.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 inequality violation beyond the configured tolerance.

use anyhow::{anyhow, bail, Context, Result};
use bernmark_harness::config::{
    default_nq, default_samples, DomainSpec, ExperimentConfig, FamilySpec, PoleOrder, TargetSpec,
};
use bernmark_harness::experiment::{
    csv_lines, factor_for, resolve_target, run_experiment, verify_row, versions_block, Domain,
    Fun, Row,
};
use bernmark_harness::report;
use bernmark::geometry::ArcSpec;
use bernmark::json;
use bernmark::openup::{open_up, Endpoint, OmegaMethod};
use bernmark::rational::{PoleSet, RationalFn};
use bernmark::Pole;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "bernmark", version, about = "Sharp Bernstein/Markov factors for rational functions on curves and arcs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Quadrature nodes for numeric Green solves (power of two, >= 64).
    #[arg(long, global = true)]
    nq: Option<usize>,
    /// Boundary sample count for supremum norms.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// JSON report path; a CSV is written alongside with a .csv suffix.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized pole draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bernstein/Markov factor for a pole set on a curve or arc.
    Factor {
        /// Domain JSON ({"curve":{...}} or {"arc":{...}}), inline or a file path.
        #[arg(long)]
        domain: String,
        /// Pole list JSON: [{"pole":[re,im]|"inf","order":n}, ...].
        #[arg(long)]
        poles: String,
        /// Boundary parameter, point "re,im", or endpoint A|B|global (arcs).
        #[arg(long)]
        at: String,
        /// Derivative order.
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Endpoint quantity Omega_a for an arc.
    Omega {
        /// Arc JSON, inline or a file path.
        #[arg(long)]
        arc: String,
        /// Endpoint A or B.
        #[arg(long)]
        endpoint: String,
        /// Pole: "inf" or "re,im".
        #[arg(long)]
        pole: String,
    },
    /// Verify the derivative inequality for a rational function.
    Verify {
        #[arg(long)]
        domain: String,
        /// RationalFn JSON, inline or a file path.
        #[arg(long)]
        rational: String,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Construct an extremal family member of degree n.
    Extremal {
        /// blaschke | lemniscate | mobius | markov
        #[arg(long)]
        family: String,
        /// Family parameters JSON, inline or a file path.
        #[arg(long)]
        params: String,
        #[arg(long)]
        n: u32,
    },
    /// Run a configured experiment (sweep, corpus or factor batch).
    Sweep {
        #[arg(long)]
        config: String,
    },
}

/// Error classes mapped to exit codes.
enum Failure {
    Config(anyhow::Error),
    Numerical(anyhow::Error),
    Violation(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Violation(_) => 4,
        }
    }

    fn report(&self) {
        match self {
            Failure::Config(e) => eprintln!("configuration error: {e:#}"),
            Failure::Numerical(e) => eprintln!("numerical failure: {e:#}"),
            Failure::Violation(msg) => eprintln!("inequality violation: {msg}"),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(f) => {
            f.report();
            std::process::exit(f.exit_code());
        }
    }
}

/// Inline JSON (starts with '{' or '[') or a path to a JSON file.
fn load_arg(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let body = load_arg(arg)?;
    serde_json::from_str(&body).with_context(|| format!("parsing {what}"))
}

fn parse_pole(arg: &str) -> Result<Pole> {
    let s = arg.trim();
    if s == "inf" || s == "infinity" {
        return Ok(Pole::Infinity);
    }
    parse_point(s).map(Pole::At).ok_or_else(|| anyhow!("pole must be `inf` or `re,im`, got `{s}`"))
}

fn parse_point(s: &str) -> Option<Complex64> {
    let body = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() != 2 {
        return None;
    }
    let re = parts[0].trim().parse::<f64>().ok()?;
    let im = parts[1].trim().parse::<f64>().ok()?;
    Some(Complex64::new(re, im))
}

fn parse_target(at: &str) -> TargetSpec {
    let s = at.trim();
    if let Ok(t) = s.parse::<f64>() {
        return TargetSpec::Param { param: t };
    }
    if matches!(s, "A" | "a" | "B" | "b" | "global" | "G" | "g") {
        return TargetSpec::Endpoint { endpoint: s.to_string() };
    }
    match parse_point(s) {
        Some(p) => TargetSpec::Point { point: p },
        None => TargetSpec::Endpoint { endpoint: s.to_string() },
    }
}

#[derive(Serialize)]
struct SingleReport<R: Serialize> {
    config_echo: serde_json::Value,
    rows: Vec<R>,
    summary: serde_json::Value,
    versions: serde_json::Value,
}

fn emit<R: Serialize>(out: &Option<PathBuf>, report: &SingleReport<R>, csv: &[String]) -> Result<()> {
    let body = report::to_json_string(report)?;
    match out {
        None => println!("{body}"),
        Some(path) => {
            report::write_json(path, report)?;
            report::write_csv(&report::csv_sibling(path), csv)?;
            println!("{body}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let nq = cli.nq.unwrap_or_else(default_nq);
    let samples = cli.samples.unwrap_or_else(default_samples);
    match &cli.cmd {
        Cmd::Factor { domain, poles, at, k } => {
            let domain_spec: DomainSpec =
                parse_json(domain, "domain").map_err(Failure::Config)?;
            let pole_list: Vec<PoleOrder> = parse_json(poles, "poles").map_err(Failure::Config)?;
            let set = PoleSet::new(pole_list.iter().map(|p| (p.pole, p.order)).collect())
                .map_err(|e| Failure::Config(e.into()))?;
            let dom = Domain::build(&domain_spec, nq).map_err(Failure::Numerical)?;
            let target =
                resolve_target(&dom, &parse_target(at)).map_err(Failure::Config)?;
            let rep = factor_for(&dom, &set, &target, *k, nq).map_err(Failure::Numerical)?;
            let csv: Vec<String> = std::iter::once(
                bernmark::factors::FactorReport::csv_header().to_string(),
            )
            .chain(rep.csv_rows())
            .collect();
            let report = SingleReport {
                config_echo: serde_json::json!({
                    "command": "factor", "domain": domain_spec, "poles": pole_list,
                    "at": at, "k": k, "nq": nq,
                }),
                rows: vec![rep],
                summary: serde_json::json!({}),
                versions: versions_block(),
            };
            emit(&cli.out, &report, &csv).map_err(Failure::Numerical)
        }
        Cmd::Omega { arc, endpoint, pole } => {
            let arc_spec: ArcSpec = parse_json(arc, "arc").map_err(Failure::Config)?;
            let pole = parse_pole(pole).map_err(Failure::Config)?;
            let e = match endpoint.trim() {
                "A" | "a" => Endpoint::A,
                "B" | "b" => Endpoint::B,
                other => {
                    return Err(Failure::Config(anyhow!("endpoint must be A or B, got `{other}`")))
                }
            };
            let arc = bernmark::geometry::make_arc(&arc_spec)
                .map_err(|e| Failure::Config(e.into()))?;
            let open = open_up(&arc, nq).map_err(|e| Failure::Numerical(e.into()))?;
            let w = open.omega(e, pole).map_err(|e| Failure::Numerical(e.into()))?;
            #[derive(Serialize)]
            struct OmegaRow {
                endpoint: char,
                pole: Pole,
                value: f64,
                method: &'static str,
            }
            let row = OmegaRow {
                endpoint: if matches!(e, Endpoint::A) { 'A' } else { 'B' },
                pole,
                value: w.value,
                method: match w.method {
                    OmegaMethod::OpenUpExact => "openup-exact",
                    OmegaMethod::Extrapolation => "extrapolation",
                },
            };
            let csv = vec![
                "endpoint,pole,value,method".to_string(),
                format!("{},{},{:.16e},{}", row.endpoint, row.pole, row.value, row.method),
            ];
            let report = SingleReport {
                config_echo: serde_json::json!({
                    "command": "omega", "arc": arc_spec, "endpoint": endpoint, "nq": nq,
                }),
                rows: vec![row],
                summary: serde_json::json!({}),
                versions: versions_block(),
            };
            emit(&cli.out, &report, &csv).map_err(Failure::Numerical)
        }
        Cmd::Verify { domain, rational, at, k } => {
            let domain_spec: DomainSpec =
                parse_json(domain, "domain").map_err(Failure::Config)?;
            let r: RationalFn = parse_json(rational, "rational").map_err(Failure::Config)?;
            let dom = Domain::build(&domain_spec, nq).map_err(Failure::Numerical)?;
            let target = resolve_target(&dom, &parse_target(at)).map_err(Failure::Config)?;
            let row = verify_row(&dom, &Fun::Rational(&r), &target, *k, nq, samples)
                .map_err(Failure::Numerical)?;
            let rows = vec![Row::Verify(row.clone())];
            let csv = csv_lines(&rows);
            let report = SingleReport {
                config_echo: serde_json::json!({
                    "command": "verify", "domain": domain_spec, "at": at, "k": k,
                    "nq": nq, "samples": samples,
                }),
                rows,
                summary: serde_json::json!({ "max_ratio": row.ratio }),
                versions: versions_block(),
            };
            emit(&cli.out, &report, &csv).map_err(Failure::Numerical)?;
            if row.ratio > 1.0 + 5e-2 {
                return Err(Failure::Violation(format!(
                    "ratio {} exceeds 1 + 5e-2 at {}",
                    row.ratio, row.target
                )));
            }
            Ok(())
        }
        Cmd::Extremal { family, params, n } => {
            let body = load_arg(params).map_err(Failure::Config)?;
            let spec: serde_json::Value =
                serde_json::from_str(&body).map_err(|e| Failure::Config(e.into()))?;
            let member = build_extremal(family, &spec, *n, nq).map_err(Failure::Config)?;
            #[derive(Serialize)]
            struct MemberRow {
                family: &'static str,
                degree_requested: u32,
                degree_realized: u32,
                slack: u32,
                rational: RationalFn,
            }
            let row = MemberRow {
                family: member.family.label(),
                degree_requested: member.degree_requested,
                degree_realized: member.degree_realized,
                slack: member.slack,
                rational: member.rational.clone(),
            };
            let csv = vec![
                "family,degree_requested,degree_realized,slack".to_string(),
                format!(
                    "{},{},{},{}",
                    row.family, row.degree_requested, row.degree_realized, row.slack
                ),
            ];
            let report = SingleReport {
                config_echo: serde_json::json!({
                    "command": "extremal", "family": family, "params": spec, "n": n,
                }),
                rows: vec![row],
                summary: serde_json::json!({}),
                versions: versions_block(),
            };
            emit(&cli.out, &report, &csv).map_err(Failure::Numerical)
        }
        Cmd::Sweep { config } => {
            let mut cfg: ExperimentConfig =
                parse_json(config, "experiment config").map_err(Failure::Config)?;
            if let Some(nq) = cli.nq {
                cfg.nq = nq;
            }
            if let Some(samples) = cli.samples {
                cfg.samples = samples;
            }
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            cfg.validate().map_err(|e| Failure::Config(anyhow!(e)))?;
            let output = run_experiment(&cfg).map_err(Failure::Numerical)?;
            let out_path = cli.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from));
            let csv = csv_lines(&output.rows);
            match &out_path {
                None => println!(
                    "{}",
                    report::to_json_string(&output).map_err(Failure::Numerical)?
                ),
                Some(path) => {
                    report::write_json(path, &output).map_err(Failure::Numerical)?;
                    report::write_csv(&report::csv_sibling(path), &csv)
                        .map_err(Failure::Numerical)?;
                    println!(
                        "{}",
                        report::to_json_string(&output.summary).map_err(Failure::Numerical)?
                    );
                }
            }
            if output.summary.violations > 0 {
                return Err(Failure::Violation(format!(
                    "{} row(s) exceed 1 + {:.1e} (max ratio {:.17e} at {})",
                    output.summary.violations,
                    output.summary.ratio_tolerance,
                    output.summary.max_ratio.unwrap_or(f64::NAN),
                    output.summary.max_ratio_target.as_deref().unwrap_or("?"),
                )));
            }
            Ok(())
        }
    }
}

fn build_extremal(
    family: &str,
    params: &serde_json::Value,
    n: u32,
    nq: usize,
) -> Result<bernmark::extremal::ExtremalMember> {
    match family {
        "blaschke" => {
            let fam: FamilySpec = serde_json::from_value(serde_json::json!({
                "kind": "blaschke", "poles": params["poles"],
            }))?;
            let domain = Domain::build(
                &DomainSpec::Curve(bernmark::geometry::CurveSpec::Circle {
                    center: Complex64::new(0.0, 0.0),
                    radius: 1.0,
                }),
                nq,
            )?;
            Ok(bernmark_harness::experiment::family_member(&fam, &domain, n)?.0)
        }
        "lemniscate" => {
            let coeffs = complex_vec(&params["t_coeffs"])?;
            let z0 = complex_of(&params["z0"])?;
            Ok(bernmark::extremal::lemniscate_power(&coeffs, z0, n)?)
        }
        "mobius" => {
            let pole: Pole = serde_json::from_value(params["pole"].clone())?;
            let z0 = complex_of(&params["z0"])?;
            let curve_spec = if params["circle"].is_null() {
                bernmark::geometry::CurveSpec::Circle {
                    center: Complex64::new(0.0, 0.0),
                    radius: 1.0,
                }
            } else {
                serde_json::from_value(params["circle"].clone())?
            };
            let curve = bernmark::geometry::make_curve(&curve_spec)?;
            Ok(bernmark::extremal::mobius_power(pole, z0, n, &curve)?)
        }
        "markov" => {
            let arc_spec: ArcSpec = serde_json::from_value(params["arc"].clone())?;
            let arc = bernmark::geometry::make_arc(&arc_spec)?;
            let endpoint = match params["endpoint"].as_str().unwrap_or("A") {
                "B" | "b" => Endpoint::B,
                _ => Endpoint::A,
            };
            Ok(bernmark::extremal::markov_extremal(&arc, &[(Pole::Infinity, n)], endpoint)?)
        }
        other => bail!("unknown family `{other}` (use blaschke|lemniscate|mobius|markov)"),
    }
}

fn complex_of(v: &serde_json::Value) -> Result<Complex64> {
    #[derive(serde::Deserialize)]
    struct Wrap(#[serde(with = "json::complex")] Complex64);
    Ok(serde_json::from_value::<Wrap>(v.clone())?.0)
}

fn complex_vec(v: &serde_json::Value) -> Result<Vec<Complex64>> {
    #[derive(serde::Deserialize)]
    struct Wrap(#[serde(with = "json::complex_vec")] Vec<Complex64>);
    Ok(serde_json::from_value::<Wrap>(v.clone())?.0)
}
