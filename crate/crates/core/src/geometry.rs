//! Smooth Jordan curves and arcs: parametrizations with exact first and
//! second derivatives, tangent/normal frames, orientation and side tests.
//!
//! Curves are closed and counterclockwise with parameter t in [0, 2*pi);
//! arcs use t in [-1, 1] with endpoints A = gamma(-1), B = gamma(1). Arcs are
//! graphs over their chord: gamma(t) = c + e*(t + i*h(t)) with h a real
//! Chebyshev series vanishing at t = +-1, so the parametrization is injective
//! and |gamma'| >= |e| by construction.

use crate::json;
use crate::trig::{cheb_deriv, cheb_eval, cheb_fit, TrigPoly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("curve parametrization is not simple (samples at t={t1:.6} and t={t2:.6} nearly coincide)")]
    NonSimple { t1: f64, t2: f64 },
    #[error("tangent degenerates at t={t:.6} (|gamma'| = {mag:.3e})")]
    DegenerateTangent { t: f64, mag: f64 },
    #[error("arc endpoints coincide")]
    DegenerateEndpoints,
    #[error("chebyshev graph offset must vanish at the endpoints (got {0:.3e})")]
    OffsetAtEndpoints(f64),
    #[error("frames are undefined at arc endpoints (t = {0})")]
    EndpointFrame(f64),
    #[error("ellipse semi-axes must be positive")]
    BadSemiAxes,
    #[error("circle radius must be positive")]
    BadRadius,
    #[error("fourier curve needs at least one nonzero coefficient")]
    EmptyFourier,
    #[error("arc is not a graph over its chord; cannot fit")]
    NotAGraph,
}

/// Declarative curve description; the JSON schema of the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    Circle {
        #[serde(with = "json::complex")]
        center: Complex64,
        radius: f64,
    },
    Ellipse {
        #[serde(with = "json::complex")]
        center: Complex64,
        semi_axes: [f64; 2],
    },
    Fourier {
        /// Wave number of the first coefficient; coefficients follow in
        /// ascending k.
        k_min: i32,
        #[serde(with = "json::complex_vec")]
        coeffs: Vec<Complex64>,
        #[serde(default = "default_true")]
        counterclockwise: bool,
    },
}

fn default_true() -> bool {
    true
}

/// Declarative arc description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcSpec {
    Segment {
        #[serde(with = "json::complex")]
        a: Complex64,
        #[serde(with = "json::complex")]
        b: Complex64,
    },
    /// Graph over the chord [a, b]: gamma(t) = c + e*(t + i h(t)) where
    /// c = (a+b)/2, e = (b-a)/2 and h = sum coeffs[k] T_k(t), h(+-1) = 0.
    ChebGraph {
        #[serde(with = "json::complex")]
        a: Complex64,
        #[serde(with = "json::complex")]
        b: Complex64,
        coeffs: Vec<f64>,
    },
}

/// Point with unit tangent and the two unit normals. For counterclockwise
/// curves `n_minus` points into the bounded domain G-; for arcs it is the
/// left normal with respect to increasing parameter.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFrame {
    pub point: Complex64,
    pub tangent: Complex64,
    pub n_minus: Complex64,
    pub n_plus: Complex64,
}

impl BoundaryFrame {
    fn from_deriv(point: Complex64, d: Complex64) -> Self {
        let tangent = d / d.norm();
        let n_minus = Complex64::new(0.0, 1.0) * tangent;
        BoundaryFrame { point, tangent, n_minus, n_plus: -n_minus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
    OnBoundary,
}

#[derive(Debug, Clone)]
enum CurveGeom {
    Circle { center: Complex64, radius: f64 },
    Trig(TrigPoly, TrigPoly, TrigPoly),
}

/// An evaluable counterclockwise C^2 Jordan curve.
#[derive(Debug, Clone)]
pub struct Curve {
    geom: CurveGeom,
    diameter: f64,
    length: f64,
    samples: Vec<Complex64>,
    sample_params: Vec<f64>,
}

const VALIDATION_SAMPLES: usize = 4096;
const CROSSING_SAMPLES: usize = 1024;

pub fn make_curve(spec: &CurveSpec) -> Result<Curve, GeometryError> {
    let geom = match spec {
        CurveSpec::Circle { center, radius } => {
            if !(*radius > 0.0) {
                return Err(GeometryError::BadRadius);
            }
            CurveGeom::Circle { center: *center, radius: *radius }
        }
        CurveSpec::Ellipse { center, semi_axes: [p, q] } => {
            if !(*p > 0.0 && *q > 0.0) {
                return Err(GeometryError::BadSemiAxes);
            }
            let c1 = Complex64::new((p + q) / 2.0, 0.0);
            let cm1 = Complex64::new((p - q) / 2.0, 0.0);
            let poly = TrigPoly::new(-1, vec![cm1, *center, c1]).trim(0.0);
            trig_geom(poly)
        }
        CurveSpec::Fourier { k_min, coeffs, counterclockwise } => {
            if coeffs.iter().all(|c| c.norm() == 0.0) {
                return Err(GeometryError::EmptyFourier);
            }
            let mut poly = TrigPoly::new(*k_min, coeffs.clone());
            if !counterclockwise {
                poly = poly.reversed();
            }
            trig_geom(poly)
        }
    };
    Curve::build(geom)
}

fn trig_geom(poly: TrigPoly) -> CurveGeom {
    let d1 = poly.deriv(1);
    let d2 = poly.deriv(2);
    CurveGeom::Trig(poly, d1, d2)
}

impl Curve {
    fn build(mut geom: CurveGeom) -> Result<Curve, GeometryError> {
        // Normalize orientation first so all later checks see a ccw curve.
        if signed_area(&geom) < 0.0 {
            geom = match geom {
                CurveGeom::Circle { .. } => geom,
                CurveGeom::Trig(p, _, _) => trig_geom(p.reversed()),
            };
        }
        let sample_params: Vec<f64> =
            (0..VALIDATION_SAMPLES).map(|j| TAU * j as f64 / VALIDATION_SAMPLES as f64).collect();
        let samples: Vec<Complex64> = sample_params.iter().map(|&t| geom_point(&geom, t)).collect();

        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for z in &samples {
            lo_x = lo_x.min(z.re);
            hi_x = hi_x.max(z.re);
            lo_y = lo_y.min(z.im);
            hi_y = hi_y.max(z.im);
        }
        let diameter = ((hi_x - lo_x).powi(2) + (hi_y - lo_y).powi(2)).sqrt();
        if !(diameter > 0.0) {
            return Err(GeometryError::NonSimple { t1: 0.0, t2: 0.0 });
        }

        let mut length = 0.0;
        for &t in &sample_params {
            let d = geom_deriv(&geom, t);
            let mag = d.norm();
            if mag < 1e-9 * diameter {
                return Err(GeometryError::DegenerateTangent { t, mag });
            }
            length += mag;
        }
        length *= TAU / VALIDATION_SAMPLES as f64;

        validate_simple(&geom, &samples, &sample_params, diameter)?;

        Ok(Curve { geom, diameter, length, samples, sample_params })
    }

    pub fn point(&self, t: f64) -> Complex64 {
        geom_point(&self.geom, t)
    }

    pub fn deriv(&self, t: f64) -> Complex64 {
        geom_deriv(&self.geom, t)
    }

    pub fn deriv2(&self, t: f64) -> Complex64 {
        match &self.geom {
            CurveGeom::Circle { radius, .. } => -radius * Complex64::from_polar(1.0, t),
            CurveGeom::Trig(_, _, d2) => d2.eval(t),
        }
    }

    pub fn frame_at(&self, t: f64) -> BoundaryFrame {
        BoundaryFrame::from_deriv(self.point(t), self.deriv(t))
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// The circle data when the curve is an exact circle.
    pub fn as_circle(&self) -> Option<(Complex64, f64)> {
        match &self.geom {
            CurveGeom::Circle { center, radius } => Some((*center, *radius)),
            CurveGeom::Trig(..) => None,
        }
    }

    /// Winding-number side classification with a thin boundary band.
    pub fn side_of(&self, z: Complex64) -> Side {
        let band = 1e-9 * self.diameter;
        if self.distance_to(z) < band {
            return Side::OnBoundary;
        }
        if winding_number(&self.samples, z) != 0 {
            Side::Interior
        } else {
            Side::Exterior
        }
    }

    /// Distance from z to the sampled boundary, refined around the closest
    /// sample by golden-section search.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.closest_param(z).1
    }

    /// Parameter of the closest boundary point and the distance to it.
    pub fn closest_param(&self, z: Complex64) -> (f64, f64) {
        let mut best = 0usize;
        let mut best_d = f64::MAX;
        for (j, p) in self.samples.iter().enumerate() {
            let d = (p - z).norm();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        let dt = TAU / self.samples.len() as f64;
        let t0 = self.sample_params[best];
        let f = |t: f64| (self.point(t) - z).norm();
        let (t, d) = golden_min(f, t0 - dt, t0 + dt, 1e-12);
        (t.rem_euclid(TAU), d)
    }

    /// Dense quadrature nodes used by norm sampling.
    pub fn sample_params(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| TAU * j as f64 / n as f64).collect()
    }

    /// An interior point reasonably far from the boundary.
    pub fn interior_point(&self) -> Complex64 {
        let centroid = self.samples.iter().sum::<Complex64>() / self.samples.len() as f64;
        let mut best = centroid;
        let mut best_d = if winding_number(&self.samples, centroid) != 0 {
            self.distance_to(centroid)
        } else {
            -1.0
        };
        for frac in [0.5, 0.25, 0.1, 0.75] {
            for j in [0, self.samples.len() / 3, 2 * self.samples.len() / 3] {
                let t = self.sample_params[j];
                let f = self.frame_at(t);
                let cand = f.point + frac * 0.5 * self.diameter * f.n_minus;
                if winding_number(&self.samples, cand) != 0 {
                    let d = self.distance_to(cand);
                    if d > best_d {
                        best_d = d;
                        best = cand;
                    }
                }
            }
        }
        assert!(best_d > 0.0, "failed to locate an interior point");
        best
    }
}

fn geom_point(geom: &CurveGeom, t: f64) -> Complex64 {
    match geom {
        CurveGeom::Circle { center, radius } => center + radius * Complex64::from_polar(1.0, t),
        CurveGeom::Trig(p, _, _) => p.eval(t),
    }
}

fn geom_deriv(geom: &CurveGeom, t: f64) -> Complex64 {
    match geom {
        CurveGeom::Circle { radius, .. } => {
            radius * Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, t)
        }
        CurveGeom::Trig(_, d1, _) => d1.eval(t),
    }
}

fn signed_area(geom: &CurveGeom) -> f64 {
    match geom {
        CurveGeom::Circle { radius, .. } => std::f64::consts::PI * radius * radius,
        CurveGeom::Trig(p, d1, _) => {
            let n = 512;
            let mut acc = 0.0;
            for j in 0..n {
                let t = TAU * j as f64 / n as f64;
                acc += (p.eval(t).conj() * d1.eval(t)).im;
            }
            0.5 * acc * TAU / n as f64
        }
    }
}

fn validate_simple(
    geom: &CurveGeom,
    samples: &[Complex64],
    params: &[f64],
    diameter: f64,
) -> Result<(), GeometryError> {
    if matches!(geom, CurveGeom::Circle { .. }) {
        return Ok(());
    }
    // Minimum-distance heuristic over non-adjacent sample pairs.
    let n = samples.len();
    let guard = 4;
    let threshold = 1e-9 * diameter;
    for i in 0..n {
        for j in (i + guard)..n {
            if i + n - j < guard {
                continue; // circularly adjacent
            }
            let d = (samples[i] - samples[j]).norm();
            if d < threshold {
                return Err(GeometryError::NonSimple { t1: params[i], t2: params[j] });
            }
        }
    }
    // Polyline crossing test on a coarser sample, which catches transversal
    // self-intersections the distance heuristic cannot see.
    let m = CROSSING_SAMPLES;
    let pts: Vec<Complex64> = (0..m).map(|j| geom_point(geom, TAU * j as f64 / m as f64)).collect();
    for i in 0..m {
        let (a1, a2) = (pts[i], pts[(i + 1) % m]);
        for j in (i + 2)..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (b1, b2) = (pts[j], pts[(j + 1) % m]);
            if segments_cross(a1, a2, b1, b2) {
                return Err(GeometryError::NonSimple {
                    t1: TAU * i as f64 / m as f64,
                    t2: TAU * j as f64 / m as f64,
                });
            }
        }
    }
    Ok(())
}

fn segments_cross(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> bool {
    let cross = |o: Complex64, p: Complex64, q: Complex64| {
        (p.re - o.re) * (q.im - o.im) - (p.im - o.im) * (q.re - o.re)
    };
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Winding number of a closed polyline around z by angle accumulation with
/// local refinement where segments subtend large angles.
pub(crate) fn winding_number(samples: &[Complex64], z: Complex64) -> i32 {
    let n = samples.len();
    let mut total = 0.0;
    for j in 0..n {
        let a = samples[j] - z;
        let b = samples[(j + 1) % n] - z;
        total += (b / a).arg();
    }
    (total / TAU).round() as i32
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Golden-section maximizer used by norm refinement.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (t, neg) = golden_min(|t| -f(t), a, b, tol);
    (t, -neg)
}

/// An evaluable C^2 Jordan arc, parametrized over [-1, 1].
#[derive(Debug, Clone)]
pub struct Arc {
    a: Complex64,
    b: Complex64,
    h: Vec<f64>,
    h1: Vec<f64>,
    h2: Vec<f64>,
    chord_mid: Complex64,
    chord_half: Complex64,
}

pub fn make_arc(spec: &ArcSpec) -> Result<Arc, GeometryError> {
    let (a, b, h) = match spec {
        ArcSpec::Segment { a, b } => (*a, *b, vec![]),
        ArcSpec::ChebGraph { a, b, coeffs } => (*a, *b, coeffs.clone()),
    };
    Arc::new(a, b, h)
}

impl Arc {
    pub fn new(a: Complex64, b: Complex64, h: Vec<f64>) -> Result<Arc, GeometryError> {
        if (b - a).norm() == 0.0 {
            return Err(GeometryError::DegenerateEndpoints);
        }
        let end = cheb_eval(&h, 1.0).abs().max(cheb_eval(&h, -1.0).abs());
        if end > 1e-9 {
            return Err(GeometryError::OffsetAtEndpoints(end));
        }
        let h1 = cheb_deriv(&h);
        let h2 = cheb_deriv(&h1);
        Ok(Arc {
            a,
            b,
            h,
            h1,
            h2,
            chord_mid: (a + b) / 2.0,
            chord_half: (b - a) / 2.0,
        })
    }

    pub fn endpoints(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    pub fn is_segment(&self) -> bool {
        self.h.iter().all(|&c| c == 0.0)
    }

    pub fn offset_coeffs(&self) -> &[f64] {
        &self.h
    }

    pub fn point(&self, t: f64) -> Complex64 {
        self.chord_mid + self.chord_half * Complex64::new(t, cheb_eval(&self.h, t))
    }

    pub fn deriv(&self, t: f64) -> Complex64 {
        self.chord_half * Complex64::new(1.0, cheb_eval(&self.h1, t))
    }

    pub fn deriv2(&self, t: f64) -> Complex64 {
        self.chord_half * Complex64::new(0.0, cheb_eval(&self.h2, t))
    }

    /// Point in the normalized chord frame (endpoints at -1 and +1).
    pub fn normalized_point(&self, t: f64) -> Complex64 {
        Complex64::new(t, cheb_eval(&self.h, t))
    }

    /// The affine normalization z -> (2z - (A+B))/(B-A) and its derivative.
    pub fn normalize_map(&self, z: Complex64) -> Complex64 {
        (z - self.chord_mid) / self.chord_half
    }

    pub fn denormalize_map(&self, w: Complex64) -> Complex64 {
        self.chord_mid + self.chord_half * w
    }

    pub fn normalize_deriv(&self) -> f64 {
        1.0 / self.chord_half.norm()
    }

    pub fn frame_at(&self, t: f64) -> Result<BoundaryFrame, GeometryError> {
        if t <= -1.0 || t >= 1.0 {
            return Err(GeometryError::EndpointFrame(t));
        }
        Ok(BoundaryFrame::from_deriv(self.point(t), self.deriv(t)))
    }

    pub fn diameter(&self) -> f64 {
        // The chord is the dominant scale; include the offset amplitude.
        let amp: f64 = self.h.iter().map(|c| c.abs()).sum();
        (self.b - self.a).norm() * (1.0 + amp)
    }

    pub fn sample_params(&self, n: usize) -> Vec<f64> {
        // Chebyshev-Lobatto clustering so norms resolve endpoint behavior.
        (0..n).map(|j| (std::f64::consts::PI * j as f64 / (n - 1) as f64).cos()).collect()
    }

    /// Distance from z to the arc.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let n = 512;
        let mut best_t = -1.0;
        let mut best = f64::MAX;
        for j in 0..=n {
            let t = -1.0 + 2.0 * j as f64 / n as f64;
            let d = (self.point(t) - z).norm();
            if d < best {
                best = d;
                best_t = t;
            }
        }
        let lo = (best_t - 2.0 / n as f64).max(-1.0);
        let hi = (best_t + 2.0 / n as f64).min(1.0);
        golden_min(|t| (self.point(t) - z).norm(), lo, hi, 1e-12).1
    }

    /// Fit a graph-over-chord arc through sampled points of a smooth map
    /// p: [-1,1] -> C with p(-1) = a, p(1) = b.
    pub fn fit_graph(
        a: Complex64,
        b: Complex64,
        degree: usize,
        p: impl Fn(f64) -> Complex64,
    ) -> Result<Arc, GeometryError> {
        if (b - a).norm() == 0.0 {
            return Err(GeometryError::DegenerateEndpoints);
        }
        let mid = (a + b) / 2.0;
        let half = (b - a) / 2.0;
        // Chord-frame samples on a fine grid; xi must be strictly monotone
        // for the arc to be a graph over its chord.
        let m = 2048;
        let mut xs = Vec::with_capacity(m + 1);
        let mut ys = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let t = -1.0 + 2.0 * j as f64 / m as f64;
            let w = (p(t) - mid) / half;
            xs.push(w.re);
            ys.push(w.im);
        }
        for j in 0..m {
            if xs[j + 1] <= xs[j] {
                return Err(GeometryError::NotAGraph);
            }
        }
        let h_of = |x: f64| -> f64 {
            // binary search the bracketing sample, then linear + refine
            let mut lo = 0usize;
            let mut hi = m;
            while hi - lo > 1 {
                let mid_i = (lo + hi) / 2;
                if xs[mid_i] <= x {
                    lo = mid_i;
                } else {
                    hi = mid_i;
                }
            }
            // local secant refinement against the exact map
            let mut t_lo = -1.0 + 2.0 * lo as f64 / m as f64;
            let mut t_hi = -1.0 + 2.0 * hi as f64 / m as f64;
            for _ in 0..60 {
                let t_mid = 0.5 * (t_lo + t_hi);
                let w = (p(t_mid) - mid) / half;
                if w.re <= x {
                    t_lo = t_mid;
                } else {
                    t_hi = t_mid;
                }
            }
            let t_mid = 0.5 * (t_lo + t_hi);
            ((p(t_mid) - mid) / half).im
        };
        let mut coeffs = cheb_fit(degree, |x| h_of(x.clamp(xs[0], xs[m])));
        // Force exact endpoint interpolation: subtract the linear trend of
        // the residual at +-1 (T_0 and T_1 corrections).
        let e_p = cheb_eval(&coeffs, 1.0) - ys[m];
        let e_m = cheb_eval(&coeffs, -1.0) - ys[0];
        coeffs[0] -= 0.5 * (e_p + e_m);
        if coeffs.len() > 1 {
            coeffs[1] -= 0.5 * (e_p - e_m);
        }
        Arc::new(a, b, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_circle_basics() {
        let k = make_curve(&CurveSpec::Circle { center: c(0.0, 0.0), radius: 1.0 }).unwrap();
        assert_abs_diff_eq!(k.point(0.0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.deriv(0.3).norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.length(), TAU, epsilon = 1e-10);
        let f = k.frame_at(0.0);
        assert_abs_diff_eq!(f.n_minus.re, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.n_plus.re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn ellipse_area_and_frame() {
        let k =
            make_curve(&CurveSpec::Ellipse { center: c(0.0, 0.0), semi_axes: [2.0, 1.0] }).unwrap();
        // signed area pi*a*b = 2*pi via the shoelace quadrature
        let n = 2048;
        let mut area = 0.0;
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            area += (k.point(t).conj() * k.deriv(t)).im;
        }
        area *= 0.5 * TAU / n as f64;
        assert_abs_diff_eq!(area, TAU, epsilon = 1e-10);
        let f = k.frame_at(std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(f.point.im, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.n_plus.im, 1.0, epsilon = 1e-14);
        assert!(f.n_plus.re.abs() < 1e-14);
    }

    #[test]
    fn fourier_single_mode_is_circle() {
        let k = make_curve(&CurveSpec::Fourier {
            k_min: 1,
            coeffs: vec![c(1.0, 0.0)],
            counterclockwise: true,
        })
        .unwrap();
        for j in 0..32 {
            let t = TAU * j as f64 / 32.0;
            assert!((k.point(t) - Complex64::from_polar(1.0, t)).norm() < 1e-14);
        }
    }

    #[test]
    fn clockwise_fourier_is_normalized() {
        let k = make_curve(&CurveSpec::Fourier {
            k_min: -1,
            coeffs: vec![c(1.0, 0.0)],
            counterclockwise: true, // declared ccw but data runs clockwise
        })
        .unwrap();
        // after normalization the tangent frame must satisfy the ccw rule
        let f = k.frame_at(0.0);
        assert_eq!(k.side_of(f.point + 1e-3 * f.n_minus), Side::Interior);
        assert_eq!(k.side_of(f.point + 1e-3 * f.n_plus), Side::Exterior);
    }

    #[test]
    fn side_classification() {
        let k = make_curve(&CurveSpec::Circle { center: c(0.0, 0.0), radius: 1.0 }).unwrap();
        assert_eq!(k.side_of(c(0.0, 0.0)), Side::Interior);
        assert_eq!(k.side_of(c(3.0, 0.0)), Side::Exterior);
        let e =
            make_curve(&CurveSpec::Ellipse { center: c(0.0, 0.0), semi_axes: [2.0, 1.0] }).unwrap();
        assert_eq!(e.side_of(c(1.5, 0.0)), Side::Interior);
        assert_eq!(e.side_of(c(0.0, 1.5)), Side::Exterior);
    }

    #[test]
    fn normal_offsets_land_on_the_right_side() {
        let e =
            make_curve(&CurveSpec::Ellipse { center: c(0.3, -0.2), semi_axes: [1.5, 0.8] }).unwrap();
        let delta = 1e-3 * e.diameter();
        for j in 0..24 {
            let t = TAU * j as f64 / 24.0;
            let f = e.frame_at(t);
            assert_eq!(e.side_of(f.point + delta * f.n_minus), Side::Interior);
            assert_eq!(e.side_of(f.point + delta * f.n_plus), Side::Exterior);
        }
    }

    #[test]
    fn self_intersecting_fourier_rejected() {
        // Limacon with an inner loop: (1 + 2 cos t) e^{it} has a crossing.
        let spec = CurveSpec::Fourier {
            k_min: 0,
            coeffs: vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
            counterclockwise: true,
        };
        // gamma(t) = 1 + e^{it} + e^{2it} = e^{it}(e^{-it} + 1 + e^{it})
        //          = (1 + 2 cos t) e^{it}
        assert!(matches!(make_curve(&spec), Err(GeometryError::NonSimple { .. })));
    }

    #[test]
    fn segment_frames() {
        let arc = make_arc(&ArcSpec::Segment { a: c(-1.0, 0.0), b: c(1.0, 0.0) }).unwrap();
        let f = arc.frame_at(0.0).unwrap();
        assert_abs_diff_eq!(f.point.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.n_minus.im, 1.0, epsilon = 1e-15); // left/up
        assert_abs_diff_eq!(f.n_plus.im, -1.0, epsilon = 1e-15); // right/down
        assert!(arc.frame_at(1.0).is_err());
    }

    #[test]
    fn parabola_graph_arc() {
        // y = x^2/4 over [-1, 1]: chord frame offset h = (T_2 - T_0)/8.
        let arc = make_arc(&ArcSpec::ChebGraph {
            a: c(-1.0, 0.25),
            b: c(1.0, 0.25),
            coeffs: vec![-0.125, 0.0, 0.125],
        })
        .unwrap();
        for j in 0..=16 {
            let t = -1.0 + 2.0 * j as f64 / 16.0;
            let z = arc.point(t);
            assert_abs_diff_eq!(z.im, z.re * z.re / 4.0, epsilon = 1e-14);
        }
        assert!((arc.point(-1.0) - c(-1.0, 0.25)).norm() < 1e-14);
    }

    #[test]
    fn graph_fit_round_trip() {
        let arc = Arc::fit_graph(c(-1.0, 0.25), c(1.0, 0.25), 24, |t| {
            c(t, t * t / 4.0)
        })
        .unwrap();
        for j in 0..=20 {
            let t = -1.0 + 2.0 * j as f64 / 20.0;
            let z = arc.point(t);
            assert_abs_diff_eq!(z.im, z.re * z.re / 4.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(make_arc(&ArcSpec::Segment { a: c(0.0, 0.0), b: c(0.0, 0.0) }).is_err());
        assert!(make_curve(&CurveSpec::Circle { center: c(0.0, 0.0), radius: 0.0 }).is_err());
        assert!(make_arc(&ArcSpec::ChebGraph {
            a: c(0.0, 0.0),
            b: c(1.0, 0.0),
            coeffs: vec![1.0],
        })
        .is_err());
    }
}
