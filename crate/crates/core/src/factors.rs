//! Assembly of the sharp derivative factors: pole-weighted sums of Green
//! normal densities over the two sides of a curve or arc (Bernstein type)
//! and the endpoint factors 2^k/(2k-1)!! * (sum n_i Omega_i)^(2k) (Markov
//! type), with a per-pole breakdown for reporting.

use crate::exact_domains::{disk_normal_density, ArcSide, ExactDomainError, POLE_MARGIN};
use crate::geometry::{Curve, Side};
use crate::greens_numeric::{solve_green, GreenProblem, GreensError, ProblemSide};
use crate::json;
use crate::openup::{Endpoint, OpenUp, OpenUpError};
use crate::rational::{PoleSet, RationalError};
use crate::{double_factorial_odd, Pole};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("pole lies on (or too close to) the boundary")]
    PoleOnBoundary,
    #[error("factor requested at an arc endpoint")]
    EndpointRequested,
    #[error("derivative order must be at least 1")]
    ZeroOrder,
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    OpenUp(#[from] OpenUpError),
    #[error(transparent)]
    Exact(#[from] ExactDomainError),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ContributionSide {
    Plus,
    Minus,
    EndpointA,
    EndpointB,
}

/// One pole's share of a factor: `density` is per unit order (a Green normal
/// density for Bernstein factors, an Omega value for Markov factors).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoleContribution {
    pub pole: Pole,
    pub order: u32,
    pub side: ContributionSide,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FactorTarget {
    BoundaryPoint {
        t: f64,
        #[serde(with = "json::complex")]
        point: Complex64,
    },
    Endpoint {
        which: char,
        #[serde(with = "json::complex")]
        point: Complex64,
    },
    Global,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    BernsteinCurve,
    BernsteinArc,
    Markov,
}

#[derive(Debug, Clone, Copy, Serialize, Default)]
pub struct ReportMeta {
    pub nq: usize,
    /// Worst harmonic-measure mass defect among the numeric solutions used;
    /// zero when every density came from a closed form.
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorReport {
    pub kind: FactorKind,
    pub target: FactorTarget,
    pub k: u32,
    pub contributions: Vec<PoleContribution>,
    pub s_plus: f64,
    pub s_minus: f64,
    /// Markov only: the endpoint sums M_A, M_B of order-weighted Omegas.
    pub omega_sum_a: Option<f64>,
    pub omega_sum_b: Option<f64>,
    pub factor: f64,
    pub meta: ReportMeta,
}

impl FactorReport {
    /// CSV header matching `csv_rows`.
    pub fn csv_header() -> &'static str {
        "kind,target,k,pole,order,side,density,s_plus,s_minus,factor"
    }

    /// One CSV row per pole contribution.
    pub fn csv_rows(&self) -> Vec<String> {
        let target = match self.target {
            FactorTarget::BoundaryPoint { t, .. } => format!("t={t:.17e}"),
            FactorTarget::Endpoint { which, .. } => format!("endpoint={which}"),
            FactorTarget::Global => "global".to_string(),
        };
        let kind = match self.kind {
            FactorKind::BernsteinCurve => "bernstein_curve",
            FactorKind::BernsteinArc => "bernstein_arc",
            FactorKind::Markov => "markov",
        };
        self.contributions
            .iter()
            .map(|c| {
                let side = match c.side {
                    ContributionSide::Plus => "plus",
                    ContributionSide::Minus => "minus",
                    ContributionSide::EndpointA => "A",
                    ContributionSide::EndpointB => "B",
                };
                format!(
                    "{kind},{target},{},{},{},{side},{:.16e},{:.16e},{:.16e},{:.16e}",
                    self.k, c.pole, c.order, c.density, self.s_plus, self.s_minus, self.factor
                )
            })
            .collect()
    }
}

/// Exact unit-normalized density for circles; the disk formulas transfer by
/// similarity with Jacobian 1/r.
fn circle_density(
    center: Complex64,
    radius: f64,
    z0: Complex64,
    pole: Pole,
) -> Result<f64, FactorError> {
    let w = (z0 - center) / radius;
    let mapped = match pole {
        Pole::Infinity => Pole::Infinity,
        Pole::At(a) => Pole::At((a - center) / radius),
    };
    Ok(disk_normal_density(w / w.norm(), mapped)? / radius)
}

/// Bernstein factor on a Jordan curve at the boundary point gamma(t):
/// max of the interior and exterior pole-weighted density sums.
pub fn bernstein_factor_curve(
    curve: &Curve,
    poles: &PoleSet,
    t: f64,
    nq: usize,
) -> Result<FactorReport, FactorError> {
    poles
        .check_margin(&crate::rational::Boundary::Curve(curve), POLE_MARGIN)
        .map_err(|_| FactorError::PoleOnBoundary)?;
    let z0 = curve.point(t);
    let mut contributions = Vec::new();
    let mut s_plus = 0.0;
    let mut s_minus = 0.0;
    let mut worst = 0.0f64;
    for &(pole, order) in &poles.entries {
        let side = match pole {
            Pole::Infinity => Side::Exterior,
            Pole::At(a) => curve.side_of(a),
        };
        let (density, acc) = match curve.as_circle() {
            Some((c, r)) => (circle_density(c, r, z0, pole)?, 0.0),
            None => {
                let problem_side = match side {
                    Side::Interior => ProblemSide::Interior,
                    Side::Exterior => ProblemSide::Exterior,
                    Side::OnBoundary => return Err(FactorError::PoleOnBoundary),
                };
                let sol = solve_green(&GreenProblem::new(curve.clone(), problem_side, pole)?, nq)?;
                (sol.normal_derivative(t)?, sol.accuracy())
            }
        };
        worst = worst.max(acc);
        let side_tag = match side {
            Side::Interior => {
                s_minus += order as f64 * density;
                ContributionSide::Minus
            }
            _ => {
                s_plus += order as f64 * density;
                ContributionSide::Plus
            }
        };
        contributions.push(PoleContribution { pole, order, side: side_tag, density });
    }
    Ok(FactorReport {
        kind: FactorKind::BernsteinCurve,
        target: FactorTarget::BoundaryPoint { t, point: z0 },
        k: 1,
        contributions,
        s_plus,
        s_minus,
        omega_sum_a: None,
        omega_sum_b: None,
        factor: s_plus.max(s_minus),
        meta: ReportMeta { nq, accuracy: worst },
    })
}

/// Bernstein factor on an arc at the interior point gamma(t), raised to the
/// k-th power for the k-th derivative.
pub fn bernstein_factor_arc(
    open: &OpenUp,
    poles: &PoleSet,
    t: f64,
    k: u32,
) -> Result<FactorReport, FactorError> {
    if k == 0 {
        return Err(FactorError::ZeroOrder);
    }
    if !(-1.0 < t && t < 1.0) {
        return Err(FactorError::EndpointRequested);
    }
    let mut contributions = Vec::new();
    let mut s_plus = 0.0;
    let mut s_minus = 0.0;
    for &(pole, order) in &poles.entries {
        for side in [ArcSide::Plus, ArcSide::Minus] {
            let density = open.arc_normal_density(t, pole, side)?;
            match side {
                ArcSide::Plus => s_plus += order as f64 * density,
                ArcSide::Minus => s_minus += order as f64 * density,
            }
            contributions.push(PoleContribution {
                pole,
                order,
                side: match side {
                    ArcSide::Plus => ContributionSide::Plus,
                    ArcSide::Minus => ContributionSide::Minus,
                },
                density,
            });
        }
    }
    Ok(FactorReport {
        kind: FactorKind::BernsteinArc,
        target: FactorTarget::BoundaryPoint { t, point: open.arc().point(t) },
        k,
        contributions,
        s_plus,
        s_minus,
        omega_sum_a: None,
        omega_sum_b: None,
        factor: s_plus.max(s_minus).powi(k as i32),
        meta: ReportMeta { nq: open.nq(), accuracy: open.worst_accuracy() },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovTarget {
    EndpointA,
    EndpointB,
    Global,
}

/// Endpoint Markov factor for the k-th derivative:
/// (2^k/(2k-1)!!) * (sum_i n_i Omega_{a_i}(endpoint))^(2k); the global form
/// takes the larger endpoint sum.
pub fn markov_factor(
    open: &OpenUp,
    poles: &PoleSet,
    target: MarkovTarget,
    k: u32,
) -> Result<FactorReport, FactorError> {
    if k == 0 {
        return Err(FactorError::ZeroOrder);
    }
    let mut contributions = Vec::new();
    let mut m_a = 0.0;
    let mut m_b = 0.0;
    for &(pole, order) in &poles.entries {
        if !matches!(target, MarkovTarget::EndpointB) {
            let w = open.omega(Endpoint::A, pole)?;
            m_a += order as f64 * w.value;
            contributions.push(PoleContribution {
                pole,
                order,
                side: ContributionSide::EndpointA,
                density: w.value,
            });
        }
        if !matches!(target, MarkovTarget::EndpointA) {
            let w = open.omega(Endpoint::B, pole)?;
            m_b += order as f64 * w.value;
            contributions.push(PoleContribution {
                pole,
                order,
                side: ContributionSide::EndpointB,
                density: w.value,
            });
        }
    }
    let m = match target {
        MarkovTarget::EndpointA => m_a,
        MarkovTarget::EndpointB => m_b,
        MarkovTarget::Global => m_a.max(m_b),
    };
    let factor = 2f64.powi(k as i32) / double_factorial_odd(k) * m.powi(2 * k as i32);
    let (a, b) = open.arc().endpoints();
    let tgt = match target {
        MarkovTarget::EndpointA => FactorTarget::Endpoint { which: 'A', point: a },
        MarkovTarget::EndpointB => FactorTarget::Endpoint { which: 'B', point: b },
        MarkovTarget::Global => FactorTarget::Global,
    };
    Ok(FactorReport {
        kind: FactorKind::Markov,
        target: tgt,
        k,
        contributions,
        s_plus: 0.0,
        s_minus: 0.0,
        omega_sum_a: if matches!(target, MarkovTarget::EndpointB) { None } else { Some(m_a) },
        omega_sum_b: if matches!(target, MarkovTarget::EndpointA) { None } else { Some(m_b) },
        factor,
        meta: ReportMeta { nq: open.nq(), accuracy: open.worst_accuracy() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_arc, make_curve, ArcSpec, CurveSpec};
    use crate::openup::open_up;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_circle() -> Curve {
        make_curve(&CurveSpec::Circle { center: c(0.0, 0.0), radius: 1.0 }).unwrap()
    }

    fn seg11() -> OpenUp {
        let arc = make_arc(&ArcSpec::Segment { a: c(-1.0, 0.0), b: c(1.0, 0.0) }).unwrap();
        open_up(&arc, 256).unwrap()
    }

    fn poles(entries: &[(Pole, u32)]) -> PoleSet {
        PoleSet::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn circle_reference_factors() {
        let curve = unit_circle();
        for n in [1u32, 7, 40] {
            let r = bernstein_factor_curve(&curve, &poles(&[(Pole::Infinity, n)]), 0.7, 256)
                .unwrap();
            assert_abs_diff_eq!(r.factor, n as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(r.s_minus, 0.0);
            let r = bernstein_factor_curve(
                &curve,
                &poles(&[(Pole::At(c(0.0, 0.0)), n)]),
                0.0,
                256,
            )
            .unwrap();
            assert_abs_diff_eq!(r.factor, n as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(r.s_plus, 0.0);
        }
        let r = bernstein_factor_curve(
            &curve,
            &poles(&[(Pole::At(c(0.5, 0.0)), 1), (Pole::At(c(2.0, 0.0)), 1)]),
            0.0,
            256,
        )
        .unwrap();
        assert_abs_diff_eq!(r.s_minus, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.s_plus, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.factor, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn factor_monotone_and_scaling() {
        let curve = unit_circle();
        let base = poles(&[(Pole::At(c(0.3, 0.2)), 2), (Pole::Infinity, 3)]);
        let more = poles(&[
            (Pole::At(c(0.3, 0.2)), 2),
            (Pole::Infinity, 3),
            (Pole::At(c(1.7, -0.4)), 1),
        ]);
        let r0 = bernstein_factor_curve(&curve, &base, 1.1, 256).unwrap();
        let r1 = bernstein_factor_curve(&curve, &more, 1.1, 256).unwrap();
        assert!(r1.s_plus >= r0.s_plus && r1.s_minus >= r0.s_minus);

        let tripled = poles(&[(Pole::At(c(0.3, 0.2)), 6), (Pole::Infinity, 9)]);
        let r3 = bernstein_factor_curve(&curve, &tripled, 1.1, 256).unwrap();
        assert_abs_diff_eq!(r3.factor, 3.0 * r0.factor, epsilon = 1e-10);
    }

    #[test]
    fn mobius_invariance_on_circle() {
        let curve = unit_circle();
        for (a, t) in [(c(0.5, 0.0), 0.0), (c(2.0, 0.0), 0.0), (c(0.2, -0.4), 1.3)] {
            let z0 = curve.point(t);
            let direct =
                bernstein_factor_curve(&curve, &poles(&[(Pole::At(a), 1)]), t, 256).unwrap();
            let tr = crate::exact_domains::mobius_transfer(&curve, Pole::At(a), z0).unwrap();
            let (_, radius) = tr.image.as_circle().unwrap();
            let via = tr.jacobian / radius;
            let got = direct.s_plus.max(direct.s_minus);
            assert_abs_diff_eq!(got, via, epsilon = 1e-10);
        }
    }

    #[test]
    fn numeric_curve_matches_circle_formulas() {
        // fourier unit circle forced through the Green solver
        let curve = make_curve(&CurveSpec::Fourier {
            k_min: 1,
            coeffs: vec![c(1.0, 0.0)],
            counterclockwise: true,
        })
        .unwrap();
        assert!(curve.as_circle().is_none());
        let set = poles(&[(Pole::At(c(0.5, 0.0)), 1), (Pole::At(c(2.0, 0.0)), 1)]);
        let r = bernstein_factor_curve(&curve, &set, 0.0, 256).unwrap();
        assert_abs_diff_eq!(r.s_minus, 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r.s_plus, 3.0, epsilon = 1e-8);
        assert!(r.meta.accuracy < 1e-10);
    }

    #[test]
    fn arc_bernstein_recovers_classical_weights() {
        let o = seg11();
        for n in [1u32, 5, 12] {
            for x in [0.0, 0.6, -0.6] {
                let r = bernstein_factor_arc(&o, &poles(&[(Pole::Infinity, n)]), x, 1).unwrap();
                let expect = n as f64 / (1.0 - x * x).sqrt();
                assert_abs_diff_eq!(r.factor, expect, epsilon = 1e-10 * expect);
            }
        }
        // k-th power form
        let r = bernstein_factor_arc(&o, &poles(&[(Pole::Infinity, 4)]), 0.0, 2).unwrap();
        assert_abs_diff_eq!(r.factor, 16.0, epsilon = 1e-10);
        assert!(bernstein_factor_arc(&o, &poles(&[(Pole::Infinity, 4)]), 1.0, 1).is_err());
    }

    #[test]
    fn markov_reference_factors() {
        let o = seg11();
        for n in [1u32, 6, 31] {
            let r =
                markov_factor(&o, &poles(&[(Pole::Infinity, n)]), MarkovTarget::Global, 1).unwrap();
            assert_abs_diff_eq!(r.factor, (n as f64).powi(2), epsilon = 1e-10 * (n as f64).powi(2));
        }
        // k = 2: n^4/3 (matches the asymptotic second-derivative norm of T_n)
        let n = 10u32;
        let r = markov_factor(&o, &poles(&[(Pole::Infinity, n)]), MarkovTarget::Global, 2).unwrap();
        assert_abs_diff_eq!(r.factor, (n as f64).powi(4) / 3.0, epsilon = 1e-8);

        // segment {0,1}, endpoint A: omega = 1, factor = 2 n^2
        let arc = make_arc(&ArcSpec::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) }).unwrap();
        let o01 = open_up(&arc, 256).unwrap();
        let r =
            markov_factor(&o01, &poles(&[(Pole::Infinity, n)]), MarkovTarget::EndpointA, 1)
                .unwrap();
        assert_abs_diff_eq!(r.factor, 2.0 * (n as f64).powi(2), epsilon = 1e-8);
    }

    #[test]
    fn markov_matches_higher_derivative_form_at_k1() {
        let o = seg11();
        let set = poles(&[(Pole::Infinity, 4), (Pole::At(c(0.0, 2.0)), 2)]);
        let r1 = markov_factor(&o, &set, MarkovTarget::Global, 1).unwrap();
        // k = 1 of the general form: 2 * M^2
        let m = r1.omega_sum_a.unwrap().max(r1.omega_sum_b.unwrap());
        assert_abs_diff_eq!(r1.factor, 2.0 * m * m, epsilon = 1e-12);
        // factor recomputable from stored parts
        let m_a: f64 = r1
            .contributions
            .iter()
            .filter(|p| p.side == ContributionSide::EndpointA)
            .map(|p| p.order as f64 * p.density)
            .sum();
        assert_abs_diff_eq!(m_a, r1.omega_sum_a.unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn one_sided_pole_sets_have_empty_opposite_sum() {
        let curve = unit_circle();
        let inside = poles(&[(Pole::At(c(0.3, 0.1)), 2), (Pole::At(c(-0.5, 0.2)), 1)]);
        let r = bernstein_factor_curve(&curve, &inside, 0.4, 256).unwrap();
        assert_eq!(r.s_plus, 0.0);
        assert!(r.factor == r.s_minus && r.s_minus > 0.0);
    }

    #[test]
    fn report_serializes() {
        let o = seg11();
        let r = bernstein_factor_arc(&o, &poles(&[(Pole::Infinity, 3)]), 0.5, 1).unwrap();
        let js = serde_json::to_string(&r).unwrap();
        assert!(js.contains("\"bernstein_arc\""));
        assert!(js.contains("\"factor\""));
        let rows = r.csv_rows();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].starts_with("bernstein_arc,"));
    }
}
