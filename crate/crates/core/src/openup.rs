//! Joukowskii open-up of a Jordan arc onto a Jordan curve, transfer of
//! Green normal densities from the curve domains to the two sides of the
//! arc, endpoint quantities Omega, and the square-root symmetrization of an
//! arc about an endpoint.
//!
//! The arc is first normalized affinely so its endpoints sit at -1 and +1.
//! The preimage of the normalized arc under F(u) = (u + 1/u)/2 is a closed
//! curve through -1 and +1, invariant under u -> 1/u; it is sampled by
//! branch-tracked square roots with the base parameter theta (arc parameter
//! t = cos theta) and stored as a Fourier fit, so the curve solver applies
//! unchanged. For segments the preimage is the unit circle and all densities
//! come from the closed disk formulas.

use crate::exact_domains::{disk_normal_density, ArcSide, POLE_MARGIN};
use crate::geometry::{make_curve, Arc, Curve, CurveSpec, GeometryError, Side};
use crate::greens_numeric::{solve_green, GreenProblem, GreenSolution, GreensError, ProblemSide};
use crate::trig::{cheb_deriv, cheb_eval, TrigPoly};
use crate::{exact_domains::ExactDomainError, Pole};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc as Shared, Mutex};
use thiserror::Error;

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum OpenUpError {
    #[error("branch tracking of the inverse Joukowskii map failed: {0}")]
    BranchTrackingFailed(String),
    #[error("density requested at an arc endpoint")]
    EndpointRequested,
    #[error("pole lies on (or too close to) the arc")]
    PoleOnArc,
    #[error("omega routes disagree: open-up {exact:.12e} vs extrapolation {extrapolated:.12e}")]
    ExtrapolationMismatch { exact: f64, extrapolated: f64 },
    #[error("arc endpoint A must be at the origin for symmetrization (|A| = {0:.3e})")]
    NotNormalized(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    Exact(#[from] ExactDomainError),
}

/// Which curve-domain route supplies the density in the transfer identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    GMinus,
    GPlus,
}

/// Arc endpoint selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    A,
    B,
}

/// Method that produced an Omega value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaMethod {
    OpenUpExact,
    Extrapolation,
}

#[derive(Debug, Clone, Copy)]
pub struct OmegaValue {
    pub endpoint: Endpoint,
    pub pole: Pole,
    pub value: f64,
    pub method: OmegaMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sheet {
    /// theta in (0, pi)
    First,
    /// theta in (pi, 2 pi)
    Second,
}

impl Sheet {
    fn other(self) -> Sheet {
        match self {
            Sheet::First => Sheet::Second,
            Sheet::Second => Sheet::First,
        }
    }
}

type PoleKey = (bool, u64, u64);

fn pole_key(exterior: bool, pole: Pole) -> PoleKey {
    match pole {
        Pole::Infinity => (exterior, u64::MAX, u64::MAX),
        Pole::At(z) => (exterior, z.re.to_bits(), z.im.to_bits()),
    }
}

/// Branch-consistent open-up of one arc, with cached curve-side solutions.
pub struct OpenUp {
    arc: Arc,
    curve: Curve,
    nq: usize,
    /// Approaching the arc from its Plus side corresponds to approaching the
    /// preimage curve from the exterior on this sheet.
    plus_exterior_sheet: Sheet,
    cache: Mutex<HashMap<PoleKey, Shared<GreenSolution>>>,
}

impl std::fmt::Debug for OpenUp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OpenUp")
            .field("segment", &self.arc.is_segment())
            .field("nq", &self.nq)
            .field("plus_exterior_sheet", &self.plus_exterior_sheet)
            .finish()
    }
}

fn joukowskii(u: Complex64) -> Complex64 {
    (u + 1.0 / u) / 2.0
}

fn joukowskii_deriv(u: Complex64) -> Complex64 {
    (1.0 - 1.0 / (u * u)) / 2.0
}

/// Both preimages z +- sqrt(z^2 - 1) of a point off the arc.
fn preimage_candidates(z: Complex64) -> (Complex64, Complex64) {
    let s = (z * z - 1.0).sqrt();
    (z + s, z - s)
}

pub fn open_up(arc: &Arc, nq: usize) -> Result<OpenUp, OpenUpError> {
    let curve = if arc.is_segment() {
        make_curve(&CurveSpec::Circle { center: Complex64::new(0.0, 0.0), radius: 1.0 })?
    } else {
        // Branch-tracked samples u(theta) with F(u(theta)) = zeta(cos theta).
        // Only the first sheet theta in (0, pi) is marched -- the candidates
        // collide at the branch points u = +-1, so those are pinned exactly
        // and the second sheet is the reciprocal mirror.
        let m = 512usize;
        let mut upper = vec![Complex64::new(1.0, 0.0); m + 1];
        upper[m] = Complex64::new(-1.0, 0.0);
        // local expansion at u = 1: u ~ 1 + i theta sqrt(zeta'(1))
        let zeta_d1 = Complex64::new(1.0, cheb_eval(&cheb_deriv(arc.offset_coeffs()), 1.0));
        for j in 1..m {
            let theta = std::f64::consts::PI * j as f64 / m as f64;
            let z = arc.normalized_point(theta.cos());
            let (w1, w2) = preimage_candidates(z);
            let target = if j == 1 {
                Complex64::new(1.0, 0.0) + Complex64::new(0.0, theta) * zeta_d1.sqrt()
            } else {
                upper[j - 1]
            };
            upper[j] = if (w1 - target).norm() <= (w2 - target).norm() { w1 } else { w2 };
        }
        let mut samples = Vec::with_capacity(2 * m);
        samples.extend_from_slice(&upper[..m]);
        samples.push(upper[m]);
        for k in 1..m {
            samples.push(1.0 / upper[m - k]);
        }
        let fitted = TrigPoly::fit(&samples).trim(1e-13);
        let curve = make_curve(&CurveSpec::Fourier {
            k_min: fitted.k_min,
            coeffs: fitted.coeffs,
            counterclockwise: true,
        })?;
        // self-consistency: F(u(theta)) = zeta(cos theta) off the sample grid
        for j in 0..37 {
            let theta = TAU * (j as f64 + 0.31) / 37.0;
            let residual =
                (joukowskii(curve.point(theta)) - arc.normalized_point(theta.cos())).norm();
            if residual > 1e-8 {
                return Err(OpenUpError::BranchTrackingFailed(format!(
                    "open-up residual {residual:.3e} at theta={theta:.3}"
                )));
            }
        }
        curve
    };

    // Reciprocity of the two sheets and enclosure of the origin.
    for j in 1..8 {
        let theta = std::f64::consts::PI * j as f64 / 8.0;
        let u1 = curve.point(theta);
        let u2 = curve.point(TAU - theta);
        if (u1 * u2 - 1.0).norm() > 1e-8 {
            return Err(OpenUpError::BranchTrackingFailed(format!(
                "sheets not reciprocal at theta={theta:.3}"
            )));
        }
    }
    if curve.side_of(Complex64::new(0.0, 0.0)) != Side::Interior {
        return Err(OpenUpError::BranchTrackingFailed(
            "preimage curve does not enclose the origin".into(),
        ));
    }

    let mut open = OpenUp {
        arc: arc.clone(),
        curve,
        nq,
        plus_exterior_sheet: Sheet::First,
        cache: Mutex::new(HashMap::new()),
    };
    open.plus_exterior_sheet = open.resolve_side_pairing()?;
    Ok(open)
}

impl OpenUp {
    /// The preimage curve Gamma = F^{-1}(normalized arc).
    pub fn preimage_curve(&self) -> &Curve {
        &self.curve
    }

    pub fn arc(&self) -> &Arc {
        &self.arc
    }

    pub fn nq(&self) -> usize {
        self.nq
    }

    /// Worst harmonic-measure mass defect among the cached curve solutions;
    /// zero when only closed forms were used.
    pub fn worst_accuracy(&self) -> f64 {
        self.cache
            .lock()
            .unwrap()
            .values()
            .map(|s| s.accuracy())
            .fold(0.0, f64::max)
    }

    /// Normalized pole alpha(a); infinity is fixed.
    pub fn normalized_pole(&self, pole: Pole) -> Pole {
        match pole {
            Pole::Infinity => Pole::Infinity,
            Pole::At(a) => Pole::At(self.arc.normalize_map(a)),
        }
    }

    /// Inverse branch into the bounded preimage domain G-.
    pub fn f1_inv(&self, pole: Pole) -> Result<Pole, OpenUpError> {
        Ok(self.split_preimages(pole)?.0)
    }

    /// Inverse branch into the unbounded preimage domain G+.
    pub fn f2_inv(&self, pole: Pole) -> Result<Pole, OpenUpError> {
        Ok(self.split_preimages(pole)?.1)
    }

    /// (G- preimage, G+ preimage) of a normalized-plane pole.
    fn split_preimages(&self, pole: Pole) -> Result<(Pole, Pole), OpenUpError> {
        match pole {
            Pole::Infinity => Ok((Pole::At(Complex64::new(0.0, 0.0)), Pole::Infinity)),
            Pole::At(z) => {
                let (w1, w2) = preimage_candidates(z);
                match (self.curve.side_of(w1), self.curve.side_of(w2)) {
                    (Side::Interior, Side::Exterior) => Ok((Pole::At(w1), Pole::At(w2))),
                    (Side::Exterior, Side::Interior) => Ok((Pole::At(w2), Pole::At(w1))),
                    _ => Err(OpenUpError::PoleOnArc),
                }
            }
        }
    }

    /// Boundary preimage parameters of the interior arc point t on the two
    /// sheets: curve parameters theta and 2 pi - theta with t = cos theta.
    pub fn boundary_preimages(&self, t: f64) -> (f64, f64) {
        let theta = t.clamp(-1.0, 1.0).acos();
        (theta, TAU - theta)
    }

    fn sheet_param(&self, t: f64, sheet: Sheet) -> f64 {
        let (th1, th2) = self.boundary_preimages(t);
        match sheet {
            Sheet::First => th1,
            Sheet::Second => th2,
        }
    }

    /// Empirical side pairing: offset the mid-arc point along its Plus
    /// normal (in normalized coordinates) and look up which sheet the
    /// exterior preimage lands on.
    fn resolve_side_pairing(&self) -> Result<Sheet, OpenUpError> {
        let t0 = 0.0;
        let z0 = self.arc.normalized_point(t0);
        let slope = crate::trig::cheb_eval(&crate::trig::cheb_deriv(self.arc.offset_coeffs()), t0);
        let dz = Complex64::new(1.0, slope);
        let n_plus = -Complex64::new(0.0, 1.0) * dz / dz.norm();
        let probe = z0 + 1e-3 * n_plus;
        let (w1, w2) = preimage_candidates(probe);
        let w_ext = match (self.curve.side_of(w1), self.curve.side_of(w2)) {
            (Side::Exterior, _) => w1,
            (_, Side::Exterior) => w2,
            _ => {
                return Err(OpenUpError::BranchTrackingFailed(
                    "probe preimages do not straddle the curve".into(),
                ))
            }
        };
        let u1 = self.curve.point(self.sheet_param(t0, Sheet::First));
        let u2 = self.curve.point(self.sheet_param(t0, Sheet::Second));
        Ok(if (w_ext - u1).norm() <= (w_ext - u2).norm() { Sheet::First } else { Sheet::Second })
    }

    fn exterior_sheet(&self, side: ArcSide) -> Sheet {
        match side {
            ArcSide::Plus => self.plus_exterior_sheet,
            ArcSide::Minus => self.plus_exterior_sheet.other(),
        }
    }

    fn solution(&self, exterior: bool, pole: Pole) -> Result<Shared<GreenSolution>, OpenUpError> {
        let key = pole_key(exterior, pole);
        if let Some(sol) = self.cache.lock().unwrap().get(&key) {
            return Ok(sol.clone());
        }
        let side = if exterior { ProblemSide::Exterior } else { ProblemSide::Interior };
        let problem = GreenProblem::new(self.curve.clone(), side, pole)?;
        let sol = Shared::new(solve_green(&problem, self.nq)?);
        self.cache.lock().unwrap().insert(key, sol.clone());
        Ok(sol)
    }

    /// Curve-side normal density at parameter theta for the given domain.
    fn curve_density(&self, exterior: bool, pole: Pole, theta: f64) -> Result<f64, OpenUpError> {
        if self.arc.is_segment() {
            let u = self.curve.point(theta);
            return Ok(disk_normal_density(u / u.norm(), pole)?);
        }
        Ok(self.solution(exterior, pole)?.normal_derivative(theta)?)
    }

    fn check_pole_off_arc(&self, pole: Pole) -> Result<(), OpenUpError> {
        if let Pole::At(a) = pole {
            if self.arc.distance_to(a) < POLE_MARGIN * self.arc.diameter() {
                return Err(OpenUpError::PoleOnArc);
            }
        }
        Ok(())
    }

    /// Normal derivative of the Green's function of the arc complement at the
    /// interior point gamma(t), from the given side, via the G- route.
    pub fn arc_normal_density(
        &self,
        t: f64,
        pole: Pole,
        side: ArcSide,
    ) -> Result<f64, OpenUpError> {
        self.arc_normal_density_route(t, pole, side, Route::GMinus)
    }

    /// Same density through an explicit route; the two routes agree up to
    /// solver accuracy and serve as mutual oracles.
    pub fn arc_normal_density_route(
        &self,
        t: f64,
        pole: Pole,
        side: ArcSide,
        route: Route,
    ) -> Result<f64, OpenUpError> {
        if !(-1.0 < t && t < 1.0) {
            return Err(OpenUpError::EndpointRequested);
        }
        self.check_pole_off_arc(pole)?;
        let pole_n = self.normalized_pole(pole);
        let (pole_minus, pole_plus) = self.split_preimages(pole_n)?;
        // Approaching from `side` pulls back to the exterior of the curve on
        // sheet s, and to the interior on the other sheet.
        let s_ext = self.exterior_sheet(side);
        let (theta, exterior, pole_used) = match route {
            Route::GPlus => (self.sheet_param(t, s_ext), true, pole_plus),
            Route::GMinus => (self.sheet_param(t, s_ext.other()), false, pole_minus),
        };
        let dens = self.curve_density(exterior, pole_used, theta)?;
        let u = self.curve.point(theta);
        let fp = joukowskii_deriv(u).norm();
        Ok(dens / fp * self.arc.normalize_deriv())
    }

    /// Omega at an endpoint by the exact open-up route, cross-checked by
    /// Richardson extrapolation of sqrt(|z - endpoint|) times the density
    /// along the arc.
    pub fn omega(&self, endpoint: Endpoint, pole: Pole) -> Result<OmegaValue, OpenUpError> {
        self.check_pole_off_arc(pole)?;
        let exact = self.omega_exact(endpoint, pole)?;
        let extrapolated = self.omega_extrapolated(endpoint, pole, ArcSide::Plus)?;
        let rel = (exact - extrapolated).abs() / exact.abs().max(f64::MIN_POSITIVE);
        if rel > 1e-4 {
            return Err(OpenUpError::ExtrapolationMismatch { exact, extrapolated });
        }
        Ok(OmegaValue { endpoint, pole, value: exact, method: OmegaMethod::OpenUpExact })
    }

    /// Omega by the exact route: (1/sqrt 2) times the curve-side density at
    /// the endpoint preimage, rescaled by the square root of the affine
    /// normalization derivative.
    pub fn omega_exact(&self, endpoint: Endpoint, pole: Pole) -> Result<f64, OpenUpError> {
        let pole_n = self.normalized_pole(pole);
        let (pole_minus, _) = self.split_preimages(pole_n)?;
        let theta = match endpoint {
            Endpoint::A => std::f64::consts::PI, // u = -1
            Endpoint::B => 0.0,                  // u = +1
        };
        let dens = self.curve_density(false, pole_minus, theta)?;
        let value = dens / 2f64.sqrt() * self.arc.normalize_deriv().sqrt();
        if !(value > 0.0) {
            return Err(OpenUpError::BranchTrackingFailed(format!(
                "omega must be positive, got {value}"
            )));
        }
        Ok(value)
    }

    /// Independent oracle: extrapolate q = sqrt(|z - endpoint|) * density in
    /// the sqrt-distance variable toward the endpoint (Neville, 5 nodes).
    pub fn omega_extrapolated(
        &self,
        endpoint: Endpoint,
        pole: Pole,
        side: ArcSide,
    ) -> Result<f64, OpenUpError> {
        let (a, b) = self.arc.endpoints();
        let target = match endpoint {
            Endpoint::A => a,
            Endpoint::B => b,
        };
        let mut xs = Vec::new();
        let mut qs = Vec::new();
        let mut beta = 0.25f64;
        for _ in 0..6 {
            let theta = match endpoint {
                Endpoint::A => std::f64::consts::PI - beta,
                Endpoint::B => beta,
            };
            let t = theta.cos();
            let z = self.arc.point(t);
            let xi = (z - target).norm().sqrt();
            let q = xi * self.arc_normal_density(t, pole, side)?;
            xs.push(xi);
            qs.push(q);
            beta /= 2.0;
        }
        Ok(neville_at_zero(&xs, &qs))
    }
}

fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut p = ys.to_vec();
    for level in 1..n {
        for i in 0..n - level {
            p[i] = (xs[i + level] * p[i] - xs[i] * p[i + 1]) / (xs[i + level] - xs[i]);
        }
    }
    p[0]
}

/// Square-root symmetrization of an arc with endpoint A at the origin:
/// Gamma* = { z : z^2 in Gamma }, parametrized by the signed square root of
/// the source parameter.
pub fn symmetrize(arc: &Arc) -> Result<Arc, OpenUpError> {
    let (a, b) = arc.endpoints();
    let scale = arc.diameter();
    if a.norm() > 1e-12 * scale {
        return Err(OpenUpError::NotNormalized(a.norm()));
    }
    let e = b.sqrt();
    if arc.is_segment() {
        return Ok(Arc::new(-e, e, vec![])?);
    }
    // sigma(tau) = branch-continuous sqrt(gamma(2 tau^2 - 1)) for tau > 0,
    // odd extension for tau < 0. The branch at any tau is resolved against a
    // marched reference ladder.
    let m = 512usize;
    let mut ladder = Vec::with_capacity(m + 1);
    let seed = (2.0 * arc.deriv(-1.0)).sqrt();
    ladder.push(Complex64::new(0.0, 0.0));
    for j in 1..=m {
        let tau = j as f64 / m as f64;
        let w = arc.point(2.0 * tau * tau - 1.0);
        let r = w.sqrt();
        let prev = if j == 1 { tau * seed } else { ladder[j - 1] };
        ladder.push(if (r - prev).norm() <= (-r - prev).norm() { r } else { -r });
    }
    let arc_clone = arc.clone();
    let sigma = move |tau: f64| -> Complex64 {
        let s = tau.abs();
        if s < 1e-9 {
            return tau * seed;
        }
        let w = arc_clone.point(2.0 * s * s - 1.0);
        let r = w.sqrt();
        let anchor = ladder[((s * m as f64).round() as usize).clamp(1, m)];
        let val = if (r - anchor).norm() <= (-r - anchor).norm() { r } else { -r };
        if tau >= 0.0 {
            val
        } else {
            -val
        }
    };
    Ok(Arc::fit_graph(-e, e, 48, sigma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_arc, ArcSpec};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn segment(a: Complex64, b: Complex64) -> Arc {
        make_arc(&ArcSpec::Segment { a, b }).unwrap()
    }

    fn parabola_arc() -> Arc {
        make_arc(&ArcSpec::ChebGraph {
            a: c(-1.0, 0.25),
            b: c(1.0, 0.25),
            coeffs: vec![-0.125, 0.0, 0.125],
        })
        .unwrap()
    }

    #[test]
    fn segment_opens_to_unit_circle() {
        let o = open_up(&segment(c(-1.0, 0.0), c(1.0, 0.0)), 256).unwrap();
        let (center, radius) = o.preimage_curve().as_circle().unwrap();
        assert!(center.norm() < 1e-15 && (radius - 1.0).abs() < 1e-15);
        assert_abs_diff_eq!(o.arc().normalize_deriv(), 1.0);
    }

    #[test]
    fn shifted_segment_affine_data() {
        let o = open_up(&segment(c(0.0, 0.0), c(1.0, 0.0)), 256).unwrap();
        // z -> 2z - 1 has derivative 2
        assert_abs_diff_eq!(o.arc().normalize_deriv(), 2.0);
        assert!(o.preimage_curve().as_circle().is_some());
    }

    #[test]
    fn parabola_open_up_is_reciprocal_and_consistent() {
        let o = open_up(&parabola_arc(), 256).unwrap();
        let curve = o.preimage_curve();
        for j in 1..12 {
            let theta = std::f64::consts::PI * j as f64 / 12.0;
            let u1 = curve.point(theta);
            let u2 = curve.point(TAU - theta);
            assert!((u1 * u2 - 1.0).norm() < 1e-8, "reciprocity at theta={theta}");
            let z = joukowskii(u1);
            assert!((z - o.arc().normalized_point(theta.cos())).norm() < 1e-8);
        }
        assert!((curve.point(0.0) - 1.0).norm() < 1e-10);
        assert!((curve.point(std::f64::consts::PI) + 1.0).norm() < 1e-10);
    }

    #[test]
    fn segment_density_recovers_classical_weight() {
        let o = open_up(&segment(c(-1.0, 0.0), c(1.0, 0.0)), 256).unwrap();
        for side in [ArcSide::Plus, ArcSide::Minus] {
            assert_abs_diff_eq!(
                o.arc_normal_density(0.0, Pole::Infinity, side).unwrap(),
                1.0,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                o.arc_normal_density(0.6, Pole::Infinity, side).unwrap(),
                1.25,
                epsilon = 1e-12
            );
        }
        assert!(o.arc_normal_density(1.0, Pole::Infinity, ArcSide::Plus).is_err());
        assert!(o.arc_normal_density(0.0, Pole::At(c(0.2, 0.0)), ArcSide::Plus).is_err());
    }

    #[test]
    fn segment_two_route_consistency_complex_pole() {
        let o = open_up(&segment(c(-1.0, 0.0), c(1.0, 0.0)), 256).unwrap();
        let pole = Pole::At(c(0.0, 2.0));
        for side in [ArcSide::Plus, ArcSide::Minus] {
            let gm = o.arc_normal_density_route(0.0, pole, side, Route::GMinus).unwrap();
            let gp = o.arc_normal_density_route(0.0, pole, side, Route::GPlus).unwrap();
            assert_abs_diff_eq!(gm, gp, epsilon = 1e-10);
            assert!(gm > 0.0);
        }
        // the two sides are genuinely different for a one-sided pole
        let up = o.arc_normal_density(0.0, pole, ArcSide::Minus).unwrap();
        let down = o.arc_normal_density(0.0, pole, ArcSide::Plus).unwrap();
        assert!((up - down).abs() > 0.1);
    }

    #[test]
    fn parabola_two_route_consistency() {
        let o = open_up(&parabola_arc(), 256).unwrap();
        for pole in [Pole::Infinity, Pole::At(c(0.0, 2.0)), Pole::At(c(3.0, 0.0))] {
            for side in [ArcSide::Plus, ArcSide::Minus] {
                for t in [-0.5, 0.0, 0.62] {
                    let gm = o.arc_normal_density_route(t, pole, side, Route::GMinus).unwrap();
                    let gp = o.arc_normal_density_route(t, pole, side, Route::GPlus).unwrap();
                    assert!(
                        (gm - gp).abs() <= 1e-6 * gm.abs().max(1.0),
                        "routes disagree: {gm} vs {gp} (pole {pole}, t={t})"
                    );
                    assert!(gm > 0.0);
                }
            }
        }
    }

    #[test]
    fn omega_reference_values() {
        let o = open_up(&segment(c(-1.0, 0.0), c(1.0, 0.0)), 256).unwrap();
        let w = o.omega(Endpoint::A, Pole::Infinity).unwrap();
        assert_abs_diff_eq!(w.value, 1.0 / 2f64.sqrt(), epsilon = 1e-10);
        let wb = o.omega(Endpoint::B, Pole::Infinity).unwrap();
        assert_abs_diff_eq!(w.value, wb.value, epsilon = 1e-12);

        let o01 = open_up(&segment(c(0.0, 0.0), c(1.0, 0.0)), 256).unwrap();
        assert_abs_diff_eq!(
            o01.omega(Endpoint::A, Pole::Infinity).unwrap().value,
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn omega_side_independent() {
        let o = open_up(&segment(c(-1.0, 0.0), c(1.0, 0.0)), 256).unwrap();
        for pole in [Pole::Infinity, Pole::At(c(0.3, 1.2)), Pole::At(c(-2.5, 0.0))] {
            let plus = o.omega_extrapolated(Endpoint::A, pole, ArcSide::Plus).unwrap();
            let minus = o.omega_extrapolated(Endpoint::A, pole, ArcSide::Minus).unwrap();
            assert!((plus - minus).abs() < 1e-6 * plus.abs().max(1.0));
            let exact = o.omega_exact(Endpoint::A, pole).unwrap();
            assert!(exact > 0.0 && exact.is_finite());
        }
    }

    #[test]
    fn omega_exact_matches_gplus_route_at_endpoint() {
        // at the endpoint preimage the interior and exterior curve densities
        // coincide; spot-check through the disk formulas for the segment
        let o = open_up(&segment(c(-1.0, 0.0), c(1.0, 0.0)), 256).unwrap();
        let pole = Pole::At(c(3.0, 0.0));
        let (pm, pp) = o.split_preimages(o.normalized_pole(pole)).unwrap();
        let at = |p: Pole, th: f64| disk_normal_density(o.preimage_curve().point(th), p).unwrap();
        let th = std::f64::consts::PI;
        assert_abs_diff_eq!(at(pm, th), at(pp, th), epsilon = 1e-12);
        // a' = 3 - sqrt(8): (1 - a'^2)/|1 + a'|^2 = 1/sqrt(2)
        assert_abs_diff_eq!(at(pm, th), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        // at the other endpoint both routes give sqrt(2)
        assert_abs_diff_eq!(at(pm, 0.0), at(pp, 0.0), epsilon = 1e-12);
        assert_abs_diff_eq!(at(pm, 0.0), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn omega_on_curved_arc() {
        let o = open_up(&parabola_arc(), 256).unwrap();
        for pole in [Pole::Infinity, Pole::At(c(0.0, 2.0))] {
            let w = o.omega(Endpoint::A, pole).unwrap();
            assert!(w.value > 0.0 && w.value.is_finite());
        }
    }

    #[test]
    fn symmetrize_segment() {
        let arc = segment(c(0.0, 0.0), c(1.0, 0.0));
        let s = symmetrize(&arc).unwrap();
        let (a, b) = s.endpoints();
        assert!((a + 1.0).norm() < 1e-14 && (b - 1.0).norm() < 1e-14);
        assert!(s.is_segment());
        assert!(symmetrize(&segment(c(0.5, 0.0), c(1.0, 0.0))).is_err());
    }

    #[test]
    fn symmetrize_squares_back_onto_the_arc() {
        // curved arc from 0: y = x^2 over [0,1] shifted so A = 0
        let arc = Arc::fit_graph(c(0.0, 0.0), c(1.0, 1.0), 24, |t| {
            let x = (t + 1.0) / 2.0;
            c(x, x * x)
        })
        .unwrap();
        let star = symmetrize(&arc).unwrap();
        // each point of Gamma* squares to a point on Gamma
        for j in 0..=20 {
            let tau = -1.0 + 2.0 * j as f64 / 20.0;
            let z = star.point(tau);
            let w = z * z;
            assert!(arc.distance_to(w) < 1e-7, "z^2 off the source arc at tau={tau}");
        }
        // symmetric under z -> -z
        for j in 1..10 {
            let tau = j as f64 / 10.0;
            assert!((star.point(tau) + star.point(-tau)).norm() < 1e-9);
        }
    }

    #[test]
    fn symmetrization_identity_infinity() {
        // segment {0,1}: the symmetrized arc is [-1,1]; its mid density for
        // the pole at infinity equals Omega_infinity(A) = 1.
        let arc = segment(c(0.0, 0.0), c(1.0, 0.0));
        let star = symmetrize(&arc).unwrap();
        let o_star = open_up(&star, 256).unwrap();
        let lhs = o_star.arc_normal_density(0.0, Pole::Infinity, ArcSide::Plus).unwrap();
        let o = open_up(&arc, 256).unwrap();
        let rhs = o.omega(Endpoint::A, Pole::Infinity).unwrap().value;
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        assert_abs_diff_eq!(lhs, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn symmetrization_identity_finite_pole() {
        let arc = segment(c(0.0, 0.0), c(1.0, 0.0));
        let star = symmetrize(&arc).unwrap();
        let o_star = open_up(&star, 256).unwrap();
        let o = open_up(&arc, 256).unwrap();
        for a in [c(2.0, 0.0), c(0.5, 1.0), c(-1.0, -0.5)] {
            let sq = a.sqrt();
            for side in [ArcSide::Plus, ArcSide::Minus] {
                let lhs = o_star.arc_normal_density(0.0, Pole::At(sq), side).unwrap()
                    + o_star.arc_normal_density(0.0, Pole::At(-sq), side).unwrap();
                let rhs = 2.0 * o.omega(Endpoint::A, Pole::At(a)).unwrap().value;
                assert!(
                    (lhs - rhs).abs() <= 1e-6 * rhs.abs(),
                    "hhh identity: {lhs} vs {rhs} for pole {a}"
                );
            }
        }
    }

    #[test]
    fn omega_mobius_covariance() {
        // Omega_a(Gamma, A) = Omega_inf(phi_a(Gamma), phi_a(A)) sqrt(|phi_a'(A)|)
        let arc = segment(c(-1.0, 0.0), c(1.0, 0.0));
        let o = open_up(&arc, 256).unwrap();
        let a = c(3.0, 0.0);
        let lhs = o.omega(Endpoint::A, Pole::At(a)).unwrap().value;
        // phi(z) = 1/(z-3) maps [-1,1] to the segment [-1/4, -1/2]
        let phi = |z: Complex64| 1.0 / (z - a);
        let img = segment(phi(c(-1.0, 0.0)), phi(c(1.0, 0.0)));
        let oi = open_up(&img, 256).unwrap();
        let omega_inf = oi.omega(Endpoint::A, Pole::Infinity).unwrap().value;
        let jac = (1.0 / (c(-1.0, 0.0) - a).norm_sqr()).sqrt();
        assert_abs_diff_eq!(lhs, omega_inf * jac, epsilon = 1e-10);

        // and once with a curved image arc: pole above the segment
        let b = c(0.3, 1.5);
        let lhs = o.omega(Endpoint::A, Pole::At(b)).unwrap().value;
        let phi = |z: Complex64| 1.0 / (z - b);
        let img =
            Arc::fit_graph(phi(c(-1.0, 0.0)), phi(c(1.0, 0.0)), 32, |t| phi(c(t, 0.0))).unwrap();
        let oi = open_up(&img, 256).unwrap();
        let omega_inf = oi.omega(Endpoint::A, Pole::Infinity).unwrap().value;
        let jac = (1.0 / (c(-1.0, 0.0) - b).norm_sqr()).sqrt();
        assert!((lhs - omega_inf * jac).abs() < 1e-6 * lhs);
    }
}
