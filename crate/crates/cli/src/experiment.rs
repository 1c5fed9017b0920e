//! Experiment driver: resolves configured domains and targets, computes
//! verification rows (derivative / norm / factor / ratio), realizes extremal
//! families over degree sweeps, and generates seeded random rational
//! corpora. Rows are evaluated concurrently; generation is sequential and
//! seeded, so identical configurations produce identical reports.

use crate::config::{
    AnnulusSpec, DomainSpec, ExperimentConfig, FamilySpec, RandomRationalSpec, TargetSpec,
};
use anyhow::{anyhow, bail, Context, Result};
use bernmark::extremal::{
    extremal_blaschke, lemniscate_power, markov_extremal, mobius_power, ExtremalMember,
};
use bernmark::factors::{
    bernstein_factor_arc, bernstein_factor_curve, markov_factor, FactorReport, MarkovTarget,
};
use bernmark::geometry::{make_arc, make_curve, Arc, Curve};
use bernmark::openup::{open_up, Endpoint, OpenUp};
use bernmark::rational::{sup_norm_of, Boundary, PoleSet, RationalFn};
use bernmark::Pole;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A resolved domain; arcs carry their open-up with the solution cache.
pub enum Domain {
    Curve(Curve),
    Arc { arc: Arc, open: OpenUp },
}

impl Domain {
    pub fn build(spec: &DomainSpec, nq: usize) -> Result<Domain> {
        match spec {
            DomainSpec::Curve(c) => Ok(Domain::Curve(make_curve(c)?)),
            DomainSpec::Arc(a) => {
                let arc = make_arc(a)?;
                let open = open_up(&arc, nq)?;
                Ok(Domain::Arc { arc, open })
            }
        }
    }

    pub fn boundary(&self) -> Boundary<'_> {
        match self {
            Domain::Curve(c) => Boundary::Curve(c),
            Domain::Arc { arc, .. } => Boundary::Arc(arc),
        }
    }

    fn point(&self, t: f64) -> Complex64 {
        match self {
            Domain::Curve(c) => c.point(t),
            Domain::Arc { arc, .. } => arc.point(t),
        }
    }
}

/// A target resolved against a domain.
#[derive(Debug, Clone, Copy)]
pub enum ResolvedTarget {
    Param(f64),
    Endpoint(Endpoint),
    Global,
}

pub fn resolve_target(domain: &Domain, spec: &TargetSpec) -> Result<ResolvedTarget> {
    match spec {
        TargetSpec::Param { param } => Ok(ResolvedTarget::Param(*param)),
        TargetSpec::Endpoint { endpoint } => match (endpoint.as_str(), domain) {
            ("A" | "a", Domain::Arc { .. }) => Ok(ResolvedTarget::Endpoint(Endpoint::A)),
            ("B" | "b", Domain::Arc { .. }) => Ok(ResolvedTarget::Endpoint(Endpoint::B)),
            ("global" | "G" | "g", Domain::Arc { .. }) => Ok(ResolvedTarget::Global),
            (e, Domain::Curve(_)) => bail!("endpoint target `{e}` needs an arc domain"),
            (e, _) => bail!("unknown endpoint `{e}` (use A, B or global)"),
        },
        TargetSpec::Point { point } => match domain {
            Domain::Curve(c) => Ok(ResolvedTarget::Param(c.closest_param(*point).0)),
            Domain::Arc { arc, .. } => {
                let mut best = (f64::MAX, 0.0);
                for j in 0..=2048 {
                    let t = -1.0 + 2.0 * j as f64 / 2048.0;
                    let d = (arc.point(t) - point).norm();
                    if d < best.0 {
                        best = (d, t);
                    }
                }
                Ok(ResolvedTarget::Param(best.1))
            }
        },
    }
}

fn target_label(t: &ResolvedTarget) -> String {
    match t {
        ResolvedTarget::Param(p) => format!("t={p}"),
        ResolvedTarget::Endpoint(Endpoint::A) => "endpoint=A".into(),
        ResolvedTarget::Endpoint(Endpoint::B) => "endpoint=B".into(),
        ResolvedTarget::Global => "global".into(),
    }
}

/// The evaluable in a verification row: a plain rational function or an
/// extremal family member (whose stable evaluation path is preferred).
pub enum Fun<'a> {
    Rational(&'a RationalFn),
    Member(&'a ExtremalMember),
}

impl Fun<'_> {
    fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Fun::Rational(r) => r.eval(z),
            Fun::Member(m) => m.eval(z),
        }
    }

    fn eval_deriv(&self, z: Complex64, k: u32) -> Result<Complex64> {
        match self {
            Fun::Rational(r) => Ok(r.eval_deriv(z, k)?),
            Fun::Member(m) => Ok(m.eval_deriv(z, k)?),
        }
    }

    fn pole_set(&self) -> PoleSet {
        match self {
            Fun::Rational(r) => r.pole_set(),
            Fun::Member(m) => m.rational.pole_set(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyRow {
    /// Total degree of the verified function.
    pub n: u32,
    pub k: u32,
    pub target: String,
    pub deriv_abs: f64,
    pub sup_norm: f64,
    pub factor: f64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<u32>,
}

/// The factor matching a (domain, target, k) combination.
pub fn factor_for(
    domain: &Domain,
    poles: &PoleSet,
    target: &ResolvedTarget,
    k: u32,
    nq: usize,
) -> Result<FactorReport> {
    match (domain, target) {
        (Domain::Curve(curve), ResolvedTarget::Param(t)) => {
            let mut rep = bernstein_factor_curve(curve, poles, *t, nq)?;
            // iterated first-order factor for higher derivatives
            if k > 1 {
                rep.factor = rep.factor.powi(k as i32);
                rep.k = k;
            }
            Ok(rep)
        }
        (Domain::Curve(_), _) => bail!("endpoint targets need an arc domain"),
        (Domain::Arc { open, .. }, ResolvedTarget::Param(t)) => {
            Ok(bernstein_factor_arc(open, poles, *t, k)?)
        }
        (Domain::Arc { open, .. }, ResolvedTarget::Endpoint(Endpoint::A)) => {
            Ok(markov_factor(open, poles, MarkovTarget::EndpointA, k)?)
        }
        (Domain::Arc { open, .. }, ResolvedTarget::Endpoint(Endpoint::B)) => {
            Ok(markov_factor(open, poles, MarkovTarget::EndpointB, k)?)
        }
        (Domain::Arc { open, .. }, ResolvedTarget::Global) => {
            Ok(markov_factor(open, poles, MarkovTarget::Global, k)?)
        }
    }
}

/// One verification row: |f^(k)| at the target (or its sup for global
/// targets) against sup-norm times the sharp factor.
pub fn verify_row(
    domain: &Domain,
    fun: &Fun,
    target: &ResolvedTarget,
    k: u32,
    nq: usize,
    samples: usize,
) -> Result<VerifyRow> {
    let poles = fun.pole_set();
    let factor = factor_for(domain, &poles, target, k, nq)?.factor;
    let deriv_abs = match target {
        ResolvedTarget::Param(t) => fun.eval_deriv(self_point(domain, *t), k)?.norm(),
        ResolvedTarget::Endpoint(e) => {
            let Domain::Arc { arc, .. } = domain else { bail!("endpoint on a curve") };
            let (a, b) = arc.endpoints();
            let z = match e {
                Endpoint::A => a,
                Endpoint::B => b,
            };
            fun.eval_deriv(z, k)?.norm()
        }
        ResolvedTarget::Global => {
            sup_norm_of(
                |z| fun.eval_deriv(z, k).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                &domain.boundary(),
                samples,
            )
            .value
        }
    };
    let sup = sup_norm_of(|z| fun.eval(z), &domain.boundary(), samples).value;
    if !(sup > 0.0) {
        bail!("supremum norm vanished; cannot form a ratio");
    }
    let ratio = deriv_abs / (sup * factor);
    Ok(VerifyRow {
        n: poles.total_order(),
        k,
        target: target_label(target),
        deriv_abs,
        sup_norm: sup,
        factor,
        ratio,
        slack: None,
    })
}

fn self_point(domain: &Domain, t: f64) -> Complex64 {
    domain.point(t)
}

/// Realize a family member of total degree n.
pub fn family_member(
    family: &FamilySpec,
    domain: &Domain,
    n: u32,
) -> Result<(ExtremalMember, Option<ResolvedTarget>)> {
    match family {
        FamilySpec::Blaschke { poles } => {
            if poles.is_empty() {
                bail!("blaschke family needs at least one base pole");
            }
            let cycled: Vec<Complex64> =
                (0..n as usize).map(|j| poles[j % poles.len()]).collect();
            Ok((extremal_blaschke(&cycled)?, None))
        }
        FamilySpec::Lemniscate { t_coeffs, z0 } => {
            Ok((lemniscate_power(t_coeffs, *z0, n)?, None))
        }
        FamilySpec::Mobius { pole, z0 } => {
            let Domain::Curve(curve) = domain else {
                bail!("mobius family needs a curve domain");
            };
            Ok((mobius_power(*pole, *z0, n, curve)?, None))
        }
        FamilySpec::Markov { endpoint } => {
            let Domain::Arc { arc, .. } = domain else {
                bail!("markov family needs an arc domain");
            };
            let e = match endpoint.as_str() {
                "A" | "a" => Endpoint::A,
                "B" | "b" => Endpoint::B,
                other => bail!("unknown endpoint `{other}`"),
            };
            Ok((markov_extremal(arc, &[(Pole::Infinity, n)], e)?, Some(ResolvedTarget::Endpoint(e))))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Row {
    Verify(VerifyRow),
    Factor(FactorReport),
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio_target: Option<String>,
    /// Least-squares slope of ratio against the member degree (sweeps) or
    /// the row index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend_slope: Option<f64>,
    pub violations: usize,
    pub ratio_tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct ExperimentOutput {
    pub config_echo: serde_json::Value,
    pub rows: Vec<Row>,
    pub summary: Summary,
    pub versions: serde_json::Value,
}

pub fn versions_block() -> serde_json::Value {
    serde_json::json!({ "bernmark": env!("CARGO_PKG_VERSION") })
}

/// Run a configured experiment and assemble the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate().map_err(|e| anyhow!(e))?;
    let domain = Domain::build(&config.domain, config.nq)?;
    let orders = config.orders();

    let rows: Vec<Row> = if let Some(family) = &config.family {
        if config.n_sweep.is_empty() {
            bail!("family sweeps need a nonempty n_sweep");
        }
        // realize members sequentially (cheap), verify rows in parallel
        let mut tasks = Vec::new();
        for &n in &config.n_sweep {
            let (member, implied) = family_member(family, &domain, n)?;
            let target = match implied {
                Some(t) => t,
                None => match config.targets.first() {
                    Some(spec) => resolve_target(&domain, spec)?,
                    None => ResolvedTarget::Param(0.0),
                },
            };
            for &k in &orders {
                tasks.push((member.clone(), target, k));
            }
        }
        tasks
            .par_iter()
            .map(|(member, target, k)| {
                let mut row = verify_row(
                    &domain,
                    &Fun::Member(member),
                    target,
                    *k,
                    config.nq,
                    config.samples,
                )?;
                row.slack = Some(member.slack);
                row.n = member.degree_requested;
                Ok(Row::Verify(row))
            })
            .collect::<Result<Vec<_>>>()?
    } else if let Some(random) = &config.random_rationals {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut tasks = Vec::new();
        for _ in 0..random.count {
            let r = random_rational(&mut rng, random);
            let t_count = random.targets_per_fn.max(1);
            for _ in 0..t_count {
                let t = match &domain {
                    Domain::Curve(_) => rng.gen_range(0.0..std::f64::consts::TAU),
                    Domain::Arc { .. } => rng.gen_range(-0.95..0.95),
                };
                for &k in &orders {
                    tasks.push((r.clone(), ResolvedTarget::Param(t), k));
                }
            }
        }
        tasks
            .par_iter()
            .map(|(r, target, k)| {
                Ok(Row::Verify(verify_row(
                    &domain,
                    &Fun::Rational(r),
                    target,
                    *k,
                    config.nq,
                    config.samples,
                )?))
            })
            .collect::<Result<Vec<_>>>()?
    } else if let Some(rational) = &config.rational {
        let mut rows = Vec::new();
        for spec in &config.targets {
            let target = resolve_target(&domain, spec)?;
            for &k in &orders {
                rows.push(Row::Verify(verify_row(
                    &domain,
                    &Fun::Rational(rational),
                    &target,
                    k,
                    config.nq,
                    config.samples,
                )?));
            }
        }
        rows
    } else {
        // factor-only run
        if config.poles.is_empty() {
            bail!("factor runs need a pole list");
        }
        let poles = PoleSet::new(config.poles.iter().map(|p| (p.pole, p.order)).collect())?;
        let mut rows = Vec::new();
        for spec in &config.targets {
            let target = resolve_target(&domain, spec)?;
            for &k in &orders {
                rows.push(Row::Factor(factor_for(&domain, &poles, &target, k, config.nq)?));
            }
        }
        rows
    };

    let summary = summarize(&rows, config);
    Ok(ExperimentOutput {
        config_echo: serde_json::to_value(config).context("echoing config")?,
        rows,
        summary,
        versions: versions_block(),
    })
}

fn summarize(rows: &[Row], config: &ExperimentConfig) -> Summary {
    let verify: Vec<&VerifyRow> = rows
        .iter()
        .filter_map(|r| match r {
            Row::Verify(v) => Some(v),
            Row::Factor(_) => None,
        })
        .collect();
    let (max_ratio, max_target) = verify
        .iter()
        .map(|v| (v.ratio, v.target.clone()))
        .fold((None, None), |acc: (Option<f64>, Option<String>), (r, t)| match acc.0 {
            Some(best) if best >= r => acc,
            _ => (Some(r), Some(t)),
        });
    let trend_slope = if verify.len() >= 2 {
        let xs: Vec<f64> = verify.iter().map(|v| v.n as f64).collect();
        let ys: Vec<f64> = verify.iter().map(|v| v.ratio).collect();
        Some(least_squares_slope(&xs, &ys))
    } else {
        None
    };
    let violations = verify.iter().filter(|v| v.ratio > 1.0 + config.ratio_tolerance).count();
    Summary {
        rows: rows.len(),
        max_ratio,
        max_ratio_target: max_target,
        trend_slope,
        violations,
        ratio_tolerance: config.ratio_tolerance,
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if var == 0.0 {
        0.0
    } else {
        cov / var
    }
}

/// Random rational function with poles drawn uniformly from an annulus,
/// respecting the margin band around |z| = 1 and a minimum pairwise
/// separation to keep the partial-fraction form well scaled.
pub fn random_rational(rng: &mut ChaCha8Rng, spec: &RandomRationalSpec) -> RationalFn {
    let target: u32 = rng.gen_range((spec.max_degree / 2).max(1)..=spec.max_degree);
    let mut parts: Vec<bernmark::rational::PolePart> = Vec::new();
    let mut placed: Vec<Complex64> = Vec::new();
    let mut remaining = target;
    while remaining > 0 {
        let pole = draw_annulus(rng, &spec.annulus, &placed);
        placed.push(pole);
        let order = rng.gen_range(1..=remaining.min(4));
        let mut coeffs: Vec<Complex64> = (0..order)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        // keep the stated order exact
        let top = coeffs.last_mut().unwrap();
        if top.norm() < 0.1 {
            *top = Complex64::from_polar(0.5, rng.gen_range(0.0..std::f64::consts::TAU));
        }
        parts.push(bernmark::rational::PolePart { pole, coeffs });
        remaining -= order;
    }
    let outer = vec![Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))];
    RationalFn::new(outer, parts).expect("random construction is canonical")
}

fn draw_annulus(rng: &mut ChaCha8Rng, annulus: &AnnulusSpec, placed: &[Complex64]) -> Complex64 {
    loop {
        let r = rng.gen_range(annulus.r_inner..annulus.r_outer);
        if (r - 1.0).abs() < annulus.margin {
            continue;
        }
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let cand = Complex64::from_polar(r, th);
        if placed.iter().all(|p| (p - cand).norm() > 0.02) {
            return cand;
        }
    }
}

/// CSV block for a report: verification rows or factor contributions.
pub fn csv_lines(rows: &[Row]) -> Vec<String> {
    let mut lines = Vec::new();
    let any_verify = rows.iter().any(|r| matches!(r, Row::Verify(_)));
    if any_verify {
        lines.push("n,k,target,deriv_abs,sup_norm,factor,ratio,slack".to_string());
        for row in rows {
            if let Row::Verify(v) = row {
                lines.push(format!(
                    "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    v.n,
                    v.k,
                    v.target,
                    v.deriv_abs,
                    v.sup_norm,
                    v.factor,
                    v.ratio,
                    v.slack.map(|s| s.to_string()).unwrap_or_default()
                ));
            }
        }
    } else {
        lines.push(FactorReport::csv_header().to_string());
        for row in rows {
            if let Row::Factor(f) = row {
                lines.extend(f.csv_rows());
            }
        }
    }
    lines
}
