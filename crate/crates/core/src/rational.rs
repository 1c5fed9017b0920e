//! Rational functions in partial-fraction form: an outer polynomial plus,
//! for each finite pole a_i, a polynomial in 1/(z - a_i) without constant
//! term. The form keeps pole orders explicit and makes differentiation of any
//! order exact.

use crate::geometry::{golden_max, Arc, Curve};
use crate::json;
use crate::Pole;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RationalError {
    #[error("duplicate pole at {0}")]
    DuplicatePole(Complex64),
    #[error("pole part has a constant term (P_i(0) != 0)")]
    ConstantLeak,
    #[error("evaluation at a pole")]
    EvalAtPole,
    #[error("pole at {pole} is within {dist:.3e} of the boundary (margin {margin:.3e})")]
    PoleNearBoundary { pole: Complex64, dist: f64, margin: f64 },
    #[error("pole order must be at least 1")]
    ZeroOrder,
}

/// One finite-pole part: coefficients of w, w^2, ... with w = 1/(z - pole).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolePart {
    #[serde(with = "json::complex")]
    pub pole: Complex64,
    #[serde(with = "json::complex_vec")]
    pub coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalFn {
    /// Outer polynomial coefficients, ascending degree (the pole at infinity).
    #[serde(with = "json::complex_vec")]
    pub outer: Vec<Complex64>,
    #[serde(default)]
    pub parts: Vec<PolePart>,
}

impl RationalFn {
    /// Canonicalize: trim zero tails, merge coinciding poles (orders add),
    /// reject constant leakage.
    pub fn new(outer: Vec<Complex64>, parts: Vec<PolePart>) -> Result<RationalFn, RationalError> {
        let mut r = RationalFn { outer, parts };
        trim_tail(&mut r.outer);
        let mut merged: Vec<PolePart> = Vec::new();
        for mut part in r.parts.drain(..) {
            trim_tail(&mut part.coeffs);
            if part.coeffs.is_empty() {
                continue;
            }
            if let Some(existing) = merged.iter_mut().find(|p| p.pole == part.pole) {
                if existing.coeffs.len() < part.coeffs.len() {
                    existing.coeffs.resize(part.coeffs.len(), Complex64::default());
                }
                for (k, c) in part.coeffs.iter().enumerate() {
                    existing.coeffs[k] += c;
                }
            } else {
                merged.push(part);
            }
        }
        r.parts = merged;
        Ok(r)
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> RationalFn {
        RationalFn::new(coeffs, vec![]).expect("polynomial form is always valid")
    }

    pub fn real_polynomial(coeffs: &[f64]) -> RationalFn {
        RationalFn::polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Total degree: outer degree plus the finite pole orders.
    pub fn degree(&self) -> u32 {
        let outer_deg = self.outer.len().saturating_sub(1) as u32;
        outer_deg + self.parts.iter().map(|p| p.coeffs.len() as u32).sum::<u32>()
    }

    /// The poles with orders; the outer polynomial contributes at infinity.
    pub fn pole_set(&self) -> PoleSet {
        let mut entries = Vec::new();
        if self.outer.len() > 1 {
            entries.push((Pole::Infinity, self.outer.len() as u32 - 1));
        }
        for p in &self.parts {
            entries.push((Pole::At(p.pole), p.coeffs.len() as u32));
        }
        PoleSet { entries }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_deriv(z, 0).expect("order 0 cannot fail off poles")
    }

    /// Exact k-th derivative by termwise differentiation.
    pub fn eval_deriv(&self, z: Complex64, k: u32) -> Result<Complex64, RationalError> {
        if self.parts.iter().any(|p| (z - p.pole).norm() == 0.0) {
            return Err(RationalError::EvalAtPole);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        // outer polynomial: d^k/dz^k z^j = j!/(j-k)! z^{j-k}
        for (j, c) in self.outer.iter().enumerate() {
            if (j as u32) < k {
                continue;
            }
            let mut fall = 1.0;
            for i in 0..k {
                fall *= (j as u32 - i) as f64;
            }
            acc += c * fall * z.powu(j as u32 - k);
        }
        // pole parts: d^k/dz^k (z-a)^{-j} = (-1)^k j(j+1)...(j+k-1) (z-a)^{-j-k}
        for part in &self.parts {
            let d = z - part.pole;
            for (idx, c) in part.coeffs.iter().enumerate() {
                let j = idx as u32 + 1;
                let mut rise = 1.0;
                for i in 0..k {
                    rise *= (j + i) as f64;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc += c * sign * rise / d.powu(j + k);
            }
        }
        Ok(acc)
    }

    /// Multiply by another rational function sharing no pole/zero collisions
    /// that would leave the partial-fraction class. Only the polynomial *
    /// polynomial case is needed here.
    pub fn scale(&self, factor: Complex64) -> RationalFn {
        let mut r = self.clone();
        for c in &mut r.outer {
            *c *= factor;
        }
        for p in &mut r.parts {
            for c in &mut p.coeffs {
                *c *= factor;
            }
        }
        r
    }
}

fn trim_tail(v: &mut Vec<Complex64>) {
    while v.last().is_some_and(|c| c.norm() == 0.0) {
        v.pop();
    }
}

/// Multiset of extended-plane poles with orders.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoleSet {
    pub entries: Vec<(Pole, u32)>,
}

impl PoleSet {
    pub fn new(entries: Vec<(Pole, u32)>) -> Result<PoleSet, RationalError> {
        if entries.iter().any(|&(_, n)| n == 0) {
            return Err(RationalError::ZeroOrder);
        }
        Ok(PoleSet { entries })
    }

    pub fn total_order(&self) -> u32 {
        self.entries.iter().map(|&(_, n)| n).sum()
    }

    /// Minimum distance of the finite poles to a sampled boundary.
    pub fn min_distance(&self, boundary: &Boundary) -> f64 {
        self.entries
            .iter()
            .filter_map(|(p, _)| p.finite())
            .map(|z| boundary.distance_to(z))
            .fold(f64::MAX, f64::min)
    }

    pub fn check_margin(&self, boundary: &Boundary, margin_rel: f64) -> Result<(), RationalError> {
        let margin = margin_rel * boundary.diameter();
        for (p, _) in &self.entries {
            if let Some(z) = p.finite() {
                let dist = boundary.distance_to(z);
                if dist < margin {
                    return Err(RationalError::PoleNearBoundary { pole: z, dist, margin });
                }
            }
        }
        Ok(())
    }
}

/// A curve or an arc viewed purely as a compact boundary set.
pub enum Boundary<'a> {
    Curve(&'a Curve),
    Arc(&'a Arc),
}

impl Boundary<'_> {
    pub fn diameter(&self) -> f64 {
        match self {
            Boundary::Curve(c) => c.diameter(),
            Boundary::Arc(a) => a.diameter(),
        }
    }

    pub fn distance_to(&self, z: Complex64) -> f64 {
        match self {
            Boundary::Curve(c) => c.distance_to(z),
            Boundary::Arc(a) => a.distance_to(z),
        }
    }

    fn params(&self, n: usize) -> Vec<f64> {
        match self {
            Boundary::Curve(c) => c.sample_params(n),
            Boundary::Arc(a) => a.sample_params(n),
        }
    }

    pub fn point(&self, t: f64) -> Complex64 {
        match self {
            Boundary::Curve(c) => c.point(t),
            Boundary::Arc(a) => a.point(t),
        }
    }

    fn param_window(&self, t: f64, dt: f64) -> (f64, f64) {
        match self {
            Boundary::Curve(_) => (t - dt, t + dt),
            Boundary::Arc(_) => ((t - dt).max(-1.0), (t + dt).min(1.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupNorm {
    pub value: f64,
    pub at_param: f64,
    #[serde(with = "json::complex")]
    pub at_point: Complex64,
}

/// Supremum of |f| over the boundary: dense sampling followed by local
/// golden-section refinement around the best samples.
pub fn sup_norm_of(
    f: impl Fn(Complex64) -> Complex64,
    boundary: &Boundary,
    samples: usize,
) -> SupNorm {
    let params = boundary.params(samples.max(16));
    let vals: Vec<f64> = params.iter().map(|&t| f(boundary.point(t)).norm()).collect();
    // top local maxima
    let mut ranked: Vec<usize> = (0..params.len()).collect();
    ranked.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    let dt = match boundary {
        Boundary::Curve(_) => 2.0 * std::f64::consts::PI / params.len() as f64,
        Boundary::Arc(_) => 2.0 / params.len() as f64,
    };
    let mut best = SupNorm { value: f64::MIN, at_param: params[0], at_point: boundary.point(params[0]) };
    for &i in ranked.iter().take(8) {
        let (lo, hi) = boundary.param_window(params[i], dt);
        let (t, v) = golden_max(|t| f(boundary.point(t)).norm(), lo, hi, 1e-12);
        if v > best.value {
            best = SupNorm { value: v, at_param: t, at_point: boundary.point(t) };
        }
    }
    best
}

/// Supremum norm of a rational function over a curve or arc.
pub fn sup_norm(
    r: &RationalFn,
    boundary: &Boundary,
    samples: usize,
) -> Result<SupNorm, RationalError> {
    r.pole_set().check_margin(boundary, crate::exact_domains::POLE_MARGIN)?;
    Ok(sup_norm_of(|z| r.eval(z), boundary, samples))
}

/// Supremum norm of the k-th derivative.
pub fn sup_norm_deriv(
    r: &RationalFn,
    boundary: &Boundary,
    samples: usize,
    k: u32,
) -> Result<SupNorm, RationalError> {
    r.pole_set().check_margin(boundary, crate::exact_domains::POLE_MARGIN)?;
    Ok(sup_norm_of(|z| r.eval_deriv(z, k).unwrap_or_default(), boundary, samples))
}

/// Coefficients of the Chebyshev polynomial T_n in the monomial basis.
pub fn chebyshev_coeffs(n: u32) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..n {
        let mut next = vec![0.0; cur.len() + 1];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] += 2.0 * c;
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev endpoint derivative: T_n^(k)(1) = prod_{j<k} (n^2 - j^2)/(2j+1).
pub fn chebyshev_endpoint_deriv(n: u32, k: u32) -> f64 {
    let nf = n as f64;
    (0..k).map(|j| (nf * nf - (j * j) as f64) / (2 * j + 1) as f64).product()
}

/// Multiply two polynomials given by ascending coefficients.
pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Complex64::default(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Raise a polynomial to an integer power.
pub fn poly_pow(a: &[Complex64], mut e: u32) -> Vec<Complex64> {
    let mut base = a.to_vec();
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul(&acc, &base);
        }
        base = poly_mul(&base, &base);
        e >>= 1;
    }
    acc
}

/// Compose a polynomial with an affine map: p(alpha z + beta).
pub fn poly_affine(p: &[Complex64], alpha: Complex64, beta: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); p.len().max(1)];
    // Horner: start from the top coefficient.
    out[0] = *p.last().unwrap_or(&Complex64::default());
    let mut len = 1;
    for &c in p.iter().rev().skip(1) {
        // multiply current by (alpha z + beta), then add c
        let mut next = vec![Complex64::default(); len + 1];
        for (j, &v) in out[..len].iter().enumerate() {
            next[j] += v * beta;
            next[j + 1] += v * alpha;
        }
        next[0] += c;
        len += 1;
        out[..len].copy_from_slice(&next);
    }
    out.truncate(len);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_arc, make_curve, ArcSpec, CurveSpec};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_circle() -> Curve {
        make_curve(&CurveSpec::Circle { center: c(0.0, 0.0), radius: 1.0 }).unwrap()
    }

    fn segment() -> Arc {
        make_arc(&ArcSpec::Segment { a: c(-1.0, 0.0), b: c(1.0, 0.0) }).unwrap()
    }

    #[test]
    fn construction_and_degrees() {
        let r = RationalFn::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![]).unwrap();
        assert_eq!(r.degree(), 1);
        let r = RationalFn::new(
            vec![],
            vec![PolePart { pole: c(2.0, 0.0), coeffs: vec![c(1.0, 0.0)] }],
        )
        .unwrap();
        assert_eq!(r.degree(), 1);
        assert_abs_diff_eq!(r.eval(c(0.0, 0.0)).re, -0.5);
        let r = RationalFn::new(
            vec![],
            vec![PolePart { pole: c(0.0, 1.0), coeffs: vec![c(0.0, 0.0), c(1.0, 0.0)] }],
        )
        .unwrap();
        assert_eq!(r.degree(), 2);
    }

    #[test]
    fn equal_poles_merge() {
        let r = RationalFn::new(
            vec![],
            vec![
                PolePart { pole: c(2.0, 0.0), coeffs: vec![c(1.0, 0.0)] },
                PolePart { pole: c(2.0, 0.0), coeffs: vec![c(0.0, 0.0), c(3.0, 0.0)] },
            ],
        )
        .unwrap();
        assert_eq!(r.parts.len(), 1);
        assert_eq!(r.degree(), 2);
    }

    #[test]
    fn derivative_reference_values() {
        // 1/(z-2), k=1, z=0 -> -1/4
        let r = RationalFn::new(
            vec![],
            vec![PolePart { pole: c(2.0, 0.0), coeffs: vec![c(1.0, 0.0)] }],
        )
        .unwrap();
        assert_abs_diff_eq!(r.eval_deriv(c(0.0, 0.0), 1).unwrap().re, -0.25);
        // z^3, k=2, z=1 -> 6
        let p = RationalFn::real_polynomial(&[0.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(p.eval_deriv(c(1.0, 0.0), 2).unwrap().re, 6.0);
        assert!(r.eval_deriv(c(2.0, 0.0), 1).is_err());
    }

    /// 1/(1 + M z^2) with M = 100 in partial fractions; |R'(1/sqrt M)| = sqrt M / 2.
    #[test]
    fn resonant_counterexample_derivative() {
        let m = 100.0f64;
        let p = c(0.0, 1.0 / m.sqrt());
        let res = c(0.0, -1.0) / (2.0 * m.sqrt()); // residue at +i/sqrt(M)
        let r = RationalFn::new(
            vec![],
            vec![
                PolePart { pole: p, coeffs: vec![res] },
                PolePart { pole: -p, coeffs: vec![-res] },
            ],
        )
        .unwrap();
        // check the decomposition reproduces the function
        for z in [c(0.3, 0.1), c(-0.2, 0.4)] {
            let direct = 1.0 / (1.0 + m * z * z);
            assert!((r.eval(z) - direct).norm() < 1e-12);
        }
        let d = r.eval_deriv(c(1.0 / m.sqrt(), 0.0), 1).unwrap();
        assert_abs_diff_eq!(d.norm(), m.sqrt() / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let r = RationalFn::new(
            vec![c(0.5, 0.0), c(0.0, 1.0), c(-0.3, 0.2)],
            vec![
                PolePart { pole: c(1.5, 0.5), coeffs: vec![c(1.0, -0.5), c(0.3, 0.0)] },
                PolePart { pole: c(-2.0, -1.0), coeffs: vec![c(0.0, 2.0)] },
            ],
        )
        .unwrap();
        let h = 1e-5;
        for k in 1..=4u32 {
            for z in [c(0.1, 0.2), c(-0.5, 0.3), c(0.4, -0.6)] {
                let lo = r.eval_deriv(z - c(h, 0.0), k - 1).unwrap();
                let hi = r.eval_deriv(z + c(h, 0.0), k - 1).unwrap();
                let fd = (hi - lo) / (2.0 * h);
                let exact = r.eval_deriv(z, k).unwrap();
                assert!(
                    (fd - exact).norm() <= 1e-6 * exact.norm().max(1.0),
                    "k={k} z={z} fd={fd} exact={exact}"
                );
            }
        }
    }

    #[test]
    fn sup_norm_reference_values() {
        let circle = unit_circle();
        let zn = RationalFn::polynomial(
            std::iter::repeat(c(0.0, 0.0)).take(7).chain([c(1.0, 0.0)]).collect(),
        );
        let n = sup_norm(&zn, &Boundary::Curve(&circle), 4096).unwrap();
        assert_abs_diff_eq!(n.value, 1.0, epsilon = 1e-12);

        let seg = segment();
        let t5 = RationalFn::real_polynomial(&chebyshev_coeffs(5));
        let n = sup_norm(&t5, &Boundary::Arc(&seg), 4096).unwrap();
        assert_abs_diff_eq!(n.value, 1.0, epsilon = 1e-10);

        let m = 100.0f64;
        let p = c(0.0, 1.0 / m.sqrt());
        let res = c(0.0, -1.0) / (2.0 * m.sqrt());
        let r = RationalFn::new(
            vec![],
            vec![
                PolePart { pole: p, coeffs: vec![res] },
                PolePart { pole: -p, coeffs: vec![-res] },
            ],
        )
        .unwrap();
        let n = sup_norm(&r, &Boundary::Arc(&seg), 4096).unwrap();
        assert_abs_diff_eq!(n.value, 1.0, epsilon = 1e-10);
        assert!(n.at_point.norm() < 1e-4);
    }

    #[test]
    fn sup_norm_stable_under_refinement() {
        let seg = segment();
        let t11 = RationalFn::real_polynomial(&chebyshev_coeffs(11));
        let a = sup_norm(&t11, &Boundary::Arc(&seg), 4096).unwrap().value;
        let b = sup_norm(&t11, &Boundary::Arc(&seg), 8192).unwrap().value;
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn pole_margin_enforced() {
        let seg = segment();
        let r = RationalFn::new(
            vec![],
            vec![PolePart { pole: c(0.5, 1e-12), coeffs: vec![c(1.0, 0.0)] }],
        )
        .unwrap();
        assert!(matches!(
            sup_norm(&r, &Boundary::Arc(&seg), 512),
            Err(RationalError::PoleNearBoundary { .. })
        ));
    }

    #[test]
    fn chebyshev_helpers() {
        assert_eq!(chebyshev_coeffs(2), vec![-1.0, 0.0, 2.0]);
        assert_eq!(chebyshev_coeffs(3), vec![0.0, -3.0, 0.0, 4.0]);
        // T_n'(1) = n^2; T_n''(1) = n^2(n^2-1)/3
        assert_abs_diff_eq!(chebyshev_endpoint_deriv(7, 1), 49.0);
        assert_abs_diff_eq!(chebyshev_endpoint_deriv(7, 2), 49.0 * 48.0 / 3.0);
        // against the coefficient route at n = 6, k = 2
        let t6 = RationalFn::real_polynomial(&chebyshev_coeffs(6));
        let d = t6.eval_deriv(c(1.0, 0.0), 2).unwrap().re;
        assert_abs_diff_eq!(d, chebyshev_endpoint_deriv(6, 2), epsilon = 1e-9);
    }

    #[test]
    fn poly_helpers() {
        let a = vec![c(1.0, 0.0), c(1.0, 0.0)]; // 1 + z
        let sq = poly_pow(&a, 2);
        assert_eq!(sq.len(), 3);
        assert_abs_diff_eq!(sq[1].re, 2.0);
        // p(2z + 1) with p = z^2: 4z^2 + 4z + 1
        let p = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let q = poly_affine(&p, c(2.0, 0.0), c(1.0, 0.0));
        assert_abs_diff_eq!(q[0].re, 1.0);
        assert_abs_diff_eq!(q[1].re, 4.0);
        assert_abs_diff_eq!(q[2].re, 4.0);
    }
}
