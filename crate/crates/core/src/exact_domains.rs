//! Closed-form Green's function data for the unit disk, its exterior and the
//! segment [-1, 1], plus Blaschke factors and the Mobius pole-to-infinity
//! transfer.
//!
//! The boundary normal derivative of the Green's function equals 2*pi times
//! the harmonic measure density with respect to arclength; on the unit circle
//! it has the Poisson-kernel form used throughout this module.

use crate::geometry::{make_curve, Curve, CurveSpec};
use crate::Pole;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExactDomainError {
    #[error("pole lies on (or too close to) the boundary")]
    PoleOnBoundary,
    #[error("evaluation point coincides with a pole")]
    EvalAtPole,
    #[error("point is not on the unit circle (|w| = {0})")]
    NotOnCircle(f64),
    #[error("pole lies on the segment")]
    PoleOnSegment,
    #[error("density requested at a segment endpoint")]
    EndpointRequested,
    #[error("mobius transfer needs a finite pole")]
    InfinitePole,
}

/// Margin keeping poles off the relevant boundary, relative to its diameter.
pub const POLE_MARGIN: f64 = 1e-8;

/// Normal derivative of the Green's function of the unit disk (pole inside,
/// derivative into the disk) or of its exterior (pole outside or infinity,
/// derivative outward) at the boundary point w.
pub fn disk_normal_density(w: Complex64, pole: Pole) -> Result<f64, ExactDomainError> {
    let r = w.norm();
    if (r - 1.0).abs() > 1e-12 {
        return Err(ExactDomainError::NotOnCircle(r));
    }
    match pole {
        Pole::Infinity => Ok(1.0),
        Pole::At(a) => {
            let m = a.norm();
            if (m - 1.0).abs() < 2.0 * POLE_MARGIN {
                return Err(ExactDomainError::PoleOnBoundary);
            }
            Ok((m * m - 1.0).abs() / (w - a).norm_sqr())
        }
    }
}

/// Green's function of the unit disk, g(z, a) = log |(1 - conj(a) z)/(z - a)|,
/// and of the exterior for |a| > 1 (same formula) or a = infinity (log |z|).
pub fn disk_green(z: Complex64, pole: Pole) -> f64 {
    match pole {
        Pole::Infinity => z.norm().ln(),
        Pole::At(a) => ((1.0 - a.conj() * z) / (z - a)).norm().ln(),
    }
}

/// Blaschke factor B(a, v) = (1 - conj(a) v)/(v - a); unimodular on |v| = 1.
pub fn blaschke_factor(a: Complex64, v: Complex64) -> Complex64 {
    (1.0 - a.conj() * v) / (v - a)
}

/// d/dv B(a, v) = (|a|^2 - 1)/(v - a)^2.
pub fn blaschke_factor_deriv(a: Complex64, v: Complex64) -> Complex64 {
    let d = v - a;
    Complex64::new(a.norm_sqr() - 1.0, 0.0) / (d * d)
}

/// Product of Blaschke factors over the (finite) pole list.
pub fn blaschke_eval(poles: &[Complex64], v: Complex64) -> Result<Complex64, ExactDomainError> {
    if poles.iter().any(|&a| (v - a).norm() == 0.0) {
        return Err(ExactDomainError::EvalAtPole);
    }
    Ok(poles.iter().map(|&a| blaschke_factor(a, v)).product())
}

/// Exact derivative of the Blaschke product by logarithmic differentiation:
/// h' = h * sum B'(a_j, v)/B(a_j, v).
pub fn blaschke_deriv(poles: &[Complex64], v: Complex64) -> Result<Complex64, ExactDomainError> {
    let h = blaschke_eval(poles, v)?;
    let mut log_d = Complex64::new(0.0, 0.0);
    for &a in poles {
        let b = blaschke_factor(a, v);
        if b.norm() == 0.0 {
            // v is a zero of one factor; differentiate that factor directly
            // and multiply by the rest.
            let mut rest = Complex64::new(1.0, 0.0);
            for &o in poles {
                if o != a {
                    rest *= blaschke_factor(o, v);
                }
            }
            return Ok(blaschke_factor_deriv(a, v) * rest);
        }
        log_d += blaschke_factor_deriv(a, v) / b;
    }
    Ok(h * log_d)
}

/// Which side of an oriented arc a quantity refers to. For the standard
/// segment [-1, 1] (parametrized left to right) `Minus` is the upper side and
/// `Plus` the lower one, matching the left/right normal convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcSide {
    Plus,
    Minus,
}

impl ArcSide {
    pub fn other(self) -> ArcSide {
        match self {
            ArcSide::Plus => ArcSide::Minus,
            ArcSide::Minus => ArcSide::Plus,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ArcSide::Plus => "plus",
            ArcSide::Minus => "minus",
        }
    }
}

/// Joukowskii map F(u) = (u + 1/u)/2 and the two inverse branches for the
/// segment [-1, 1], whose open-up curve is the unit circle.
pub fn joukowskii(u: Complex64) -> Complex64 {
    (u + 1.0 / u) / 2.0
}

pub fn joukowskii_deriv(u: Complex64) -> Complex64 {
    (1.0 - 1.0 / (u * u)) / 2.0
}

/// The two Joukowskii preimages of z; their product is 1.
pub fn joukowskii_preimages(z: Complex64) -> (Complex64, Complex64) {
    let s = (z * z - 1.0).sqrt();
    let u1 = z + s;
    let u2 = z - s;
    // order: first the one inside the unit disk
    if u1.norm() <= u2.norm() {
        (u1, u2)
    } else {
        (u2, u1)
    }
}

/// Normal derivative of g restricted to the complement of [-1, 1] at an
/// interior segment point x, from the requested side.
pub fn segment_normal_density(
    x: f64,
    pole: Pole,
    side: ArcSide,
) -> Result<f64, ExactDomainError> {
    if x.abs() >= 1.0 {
        return Err(ExactDomainError::EndpointRequested);
    }
    let sin_theta = (1.0 - x * x).sqrt();
    // Boundary preimage on the unit circle: upper half for the Minus (upper)
    // side, lower half for Plus, per the left-normal convention.
    let u = match side {
        ArcSide::Minus => Complex64::new(x, sin_theta),
        ArcSide::Plus => Complex64::new(x, -sin_theta),
    };
    let inner = match pole {
        Pole::Infinity => Pole::At(Complex64::new(0.0, 0.0)),
        Pole::At(a) => {
            if a.im == 0.0 && a.re.abs() <= 1.0 {
                return Err(ExactDomainError::PoleOnSegment);
            }
            let (inside, _) = joukowskii_preimages(a);
            Pole::At(inside)
        }
    };
    // G_- route: the open-up of the segment is the unit circle, its interior
    // Green's density divided by |F'(u)| = |sin theta|.
    let dens = disk_normal_density(u, inner)?;
    Ok(dens / sin_theta)
}

/// The fractional linear transformation phi_a(z) = xi/(z - a) with |xi| = 1.
#[derive(Debug, Clone, Copy)]
pub struct MobiusMap {
    pub a: Complex64,
    pub xi: Complex64,
}

impl MobiusMap {
    /// Rotation chosen so that phi'(z0) > 0; with no anchor, xi = 1.
    pub fn new(a: Complex64, anchor: Option<Complex64>) -> MobiusMap {
        let xi = match anchor {
            Some(z0) => {
                let d = z0 - a;
                -(d * d) / d.norm_sqr()
            }
            None => Complex64::new(1.0, 0.0),
        };
        MobiusMap { a, xi }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.xi / (z - self.a)
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        -self.xi / ((z - self.a) * (z - self.a))
    }

    /// Image of a circle not passing through the pole.
    pub fn map_circle(&self, center: Complex64, radius: f64) -> (Complex64, f64) {
        let d = center - self.a;
        let denom = d.norm_sqr() - radius * radius;
        let c = self.xi * d.conj() / denom;
        let r = (radius / denom).abs();
        (c, r)
    }
}

/// Result of transferring a finite pole to infinity by phi_a.
#[derive(Debug)]
pub struct MobiusTransfer {
    pub map: MobiusMap,
    pub image: Curve,
    pub mapped_point: Complex64,
    /// |phi_a'(z0)| = 1/|z0 - a|^2.
    pub jacobian: f64,
}

/// Transfer the Green's data of a curve with finite pole a to the image curve
/// with pole at infinity: the normal density at z0 equals the image density
/// at phi_a(z0) times the Jacobian.
pub fn mobius_transfer(
    curve: &Curve,
    pole: Pole,
    z0: Complex64,
) -> Result<MobiusTransfer, ExactDomainError> {
    let a = pole.finite().ok_or(ExactDomainError::InfinitePole)?;
    if curve.distance_to(a) < POLE_MARGIN * curve.diameter() {
        return Err(ExactDomainError::PoleOnBoundary);
    }
    let map = MobiusMap::new(a, Some(z0));
    let image = match curve.as_circle() {
        Some((c, r)) => {
            let (ic, ir) = map.map_circle(c, r);
            make_curve(&CurveSpec::Circle { center: ic, radius: ir })
                .expect("mobius image of a circle is a circle")
        }
        None => {
            let n = 1024;
            let samples: Vec<Complex64> =
                (0..n).map(|j| map.eval(curve.point(2.0 * std::f64::consts::PI * j as f64 / n as f64))).collect();
            let fitted = crate::trig::TrigPoly::fit(&samples).trim(1e-13);
            make_curve(&CurveSpec::Fourier {
                k_min: fitted.k_min,
                coeffs: fitted.coeffs,
                counterclockwise: true,
            })
            .expect("mobius image of a smooth curve is smooth")
        }
    };
    let jacobian = 1.0 / (z0 - a).norm_sqr();
    Ok(MobiusTransfer { map, image, mapped_point: map.eval(z0), jacobian })
}
