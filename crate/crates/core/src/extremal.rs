//! Near-extremal families attaining the derivative factors: one-sided
//! Blaschke products on the unit circle, lemniscate powers T_N^[n/N],
//! their Mobius transfers for finite poles on circles, and the symmetrized
//! Chebyshev construction for endpoint (Markov) sharpness on segments.
//!
//! Every member carries both a partial-fraction `RationalFn` (the wire form)
//! and its generating data. High-degree members are evaluated through the
//! generating data with truncated-Taylor (jet) arithmetic: the expanded
//! coefficient forms cancel catastrophically already around degree 20, while
//! the jet route stays at rounding level for any degree.

use crate::exact_domains::{blaschke_factor, MobiusMap, POLE_MARGIN};
use crate::geometry::{Arc, Curve};
use crate::rational::{chebyshev_coeffs, poly_affine, poly_pow, PolePart, RationalFn};
use crate::Pole;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtremalError {
    #[error("blaschke poles must lie strictly on one side of the unit circle")]
    MixedSides,
    #[error("pole too close to the unit circle (|a| = {0})")]
    PoleOnCircle(f64),
    #[error("pole lies on (or too close to) the boundary")]
    PoleOnBoundary,
    #[error("lemniscate generator not normalized at the base point (T(z0) = {0})")]
    NotNormalizedAtPoint(Complex64),
    #[error("target degree {n} is below the generator degree {deg}")]
    DegreeTooSmall { n: u32, deg: u32 },
    #[error("mobius powers are constructed on circles only")]
    UnsupportedCurve,
    #[error("markov extremals are constructed on segments only")]
    UnsupportedArc,
    #[error("markov extremals require all poles at infinity; the touching-lemniscate step for finite poles is not constructed")]
    UnsupportedPoles,
    #[error("evaluation at a pole of the family member")]
    EvalAtPole,
    #[error(transparent)]
    Rational(#[from] crate::rational::RationalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    BlaschkeInside,
    BlaschkeOutside,
    LemniscatePower,
    MobiusPower,
    SymmetrizedMarkov,
}

impl FamilyKind {
    pub fn label(&self) -> &'static str {
        match self {
            FamilyKind::BlaschkeInside => "blaschke_inside",
            FamilyKind::BlaschkeOutside => "blaschke_outside",
            FamilyKind::LemniscatePower => "lemniscate_power",
            FamilyKind::MobiusPower => "mobius_power",
            FamilyKind::SymmetrizedMarkov => "symmetrized_markov",
        }
    }
}

/// Generating data for stable evaluation.
#[derive(Debug, Clone)]
enum EvalData {
    /// Evaluate the partial-fraction form directly.
    Rational,
    /// Product of Blaschke factors with these poles.
    Blaschke(Vec<Complex64>),
    /// T_n(alpha z + beta) through the three-term recurrence.
    ChebAffine { n: u32, alpha: Complex64, beta: Complex64 },
    /// base(z)^power with a polynomial base.
    PolyPow { base: Vec<Complex64>, power: u32 },
    /// ((xi/(z - a) - center)/scale)^power.
    MobiusPow { xi: Complex64, a: Complex64, center: Complex64, scale: Complex64, power: u32 },
}

/// A realized family member with its degree bookkeeping. `slack` is the gap
/// between the requested degree and the realized one; it is never silently
/// absorbed.
#[derive(Debug, Clone)]
pub struct ExtremalMember {
    pub family: FamilyKind,
    pub rational: RationalFn,
    pub degree_requested: u32,
    pub degree_realized: u32,
    pub slack: u32,
    eval_data: EvalData,
}

impl ExtremalMember {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_deriv(z, 0).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    /// k-th derivative by jet propagation through the generating data.
    pub fn eval_deriv(&self, z: Complex64, k: u32) -> Result<Complex64, ExtremalError> {
        let len = k as usize + 1;
        let jet = match &self.eval_data {
            EvalData::Rational => return Ok(self.rational.eval_deriv(z, k)?),
            EvalData::Blaschke(poles) => {
                let mut jet = jet_one(len);
                for &a in poles {
                    if (z - a).norm() == 0.0 {
                        return Err(ExtremalError::EvalAtPole);
                    }
                    jet = series_mul(&jet, &jet_blaschke(a, z, len), len);
                }
                jet
            }
            EvalData::ChebAffine { n, alpha, beta } => jet_cheb(*n, alpha * z + beta, *alpha, len),
            EvalData::PolyPow { base, power } => jet_pow(&jet_poly(base, z, len), *power, len),
            EvalData::MobiusPow { xi, a, center, scale, power } => {
                if (z - a).norm() == 0.0 {
                    return Err(ExtremalError::EvalAtPole);
                }
                let d = z - a;
                let mut g = vec![Complex64::default(); len];
                let mut pw = xi / d;
                for (m, gm) in g.iter_mut().enumerate() {
                    *gm = pw / scale;
                    pw = -pw / d;
                    let _ = m;
                }
                g[0] -= center / scale;
                jet_pow(&g, *power, len)
            }
        };
        let fact: f64 = (1..=k).map(|v| v as f64).product();
        Ok(jet[k as usize] * fact)
    }
}

/// Truncated Taylor product (index m holds f^(m)/m!).
fn series_mul(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn jet_one(len: usize) -> Vec<Complex64> {
    let mut s = vec![Complex64::default(); len];
    s[0] = Complex64::new(1.0, 0.0);
    s
}

fn jet_pow(base: &[Complex64], mut e: u32, len: usize) -> Vec<Complex64> {
    let mut acc = jet_one(len);
    let mut sq = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = series_mul(&acc, &sq, len);
        }
        sq = series_mul(&sq, &sq, len);
        e >>= 1;
    }
    acc
}

/// Jet of a polynomial (ascending monomial coefficients) at z: Horner with
/// the linear jet [z, 1].
fn jet_poly(coeffs: &[Complex64], z: Complex64, len: usize) -> Vec<Complex64> {
    let mut acc = vec![Complex64::default(); len];
    for &c in coeffs.iter().rev() {
        // acc = acc * (z + eps) + c
        let mut next = vec![Complex64::default(); len];
        for m in 0..len {
            next[m] += acc[m] * z;
            if m + 1 < len {
                next[m + 1] += acc[m];
            }
        }
        next[0] += c;
        acc = next;
    }
    acc
}

/// Jet of a Blaschke factor B(a, v) at v: the derivatives are
/// B^(m)/m! = (|a|^2 - 1)(-1)^(m-1)/(v - a)^(m+1) for m >= 1.
fn jet_blaschke(a: Complex64, v: Complex64, len: usize) -> Vec<Complex64> {
    let d = v - a;
    let mut jet = vec![Complex64::default(); len];
    jet[0] = blaschke_factor(a, v);
    let top = a.norm_sqr() - 1.0;
    let mut pw = d * d;
    for m in 1..len {
        jet[m] = top * if m % 2 == 1 { 1.0 } else { -1.0 } / pw;
        pw *= d;
    }
    jet
}

/// Jet of T_n(w(z)) with w linear in z (w-jet = [w0, dw]) via the recurrence
/// T_{j+1} = 2 w T_j - T_{j-1} in jet arithmetic.
fn jet_cheb(n: u32, w0: Complex64, dw: Complex64, len: usize) -> Vec<Complex64> {
    let mut w = vec![Complex64::default(); len];
    w[0] = w0;
    if len > 1 {
        w[1] = dw;
    }
    let mut prev = jet_one(len); // T_0
    if n == 0 {
        return prev;
    }
    let mut cur = w.clone(); // T_1
    for _ in 1..n {
        let mut next = series_mul(&w, &cur, len);
        for (m, x) in next.iter_mut().enumerate() {
            *x = 2.0 * *x - prev[m];
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// One-sided Blaschke product as a rational function in partial fractions.
/// On the unit circle |h| = 1, and |h'(1)| equals the sum of the disk normal
/// densities of its poles, attaining the Borwein-Erdelyi bound.
pub fn extremal_blaschke(poles: &[Complex64]) -> Result<ExtremalMember, ExtremalError> {
    if poles.is_empty() {
        return Err(ExtremalError::MixedSides);
    }
    for &a in poles {
        if (a.norm() - 1.0).abs() < 100.0 * POLE_MARGIN {
            return Err(ExtremalError::PoleOnCircle(a.norm()));
        }
    }
    let inside = poles[0].norm() < 1.0;
    if poles.iter().any(|a| (a.norm() < 1.0) != inside) {
        return Err(ExtremalError::MixedSides);
    }

    // Group repeated poles; orders add.
    let mut groups: Vec<(Complex64, u32)> = Vec::new();
    for &a in poles {
        match groups.iter_mut().find(|(b, _)| *b == a) {
            Some((_, m)) => *m += 1,
            None => groups.push((a, 1)),
        }
    }

    // Partial fractions: around each pole a_i expand
    // T_i(v) = (1 - conj(a_i) v)^{m_i} * prod_{j != i} B_j(v)^{m_j}
    // to order m_i - 1; the coefficient of (v - a_i)^{-(m_i - k)} is T_i[k].
    let mut parts = Vec::new();
    for (i, &(a_i, m_i)) in groups.iter().enumerate() {
        let len = m_i as usize;
        let own = series_linear(1.0 - a_i.conj() * a_i, -a_i.conj(), len);
        let mut series = jet_pow(&own, m_i, len);
        for (j, &(a_j, m_j)) in groups.iter().enumerate() {
            if i == j {
                continue;
            }
            let num = series_linear(1.0 - a_j.conj() * a_i, -a_j.conj(), len);
            let den = series_inv_linear(a_i, a_j, len);
            let factor = series_mul(&num, &den, len);
            series = series_mul(&series, &jet_pow(&factor, m_j, len), len);
        }
        let coeffs: Vec<Complex64> =
            (1..=m_i as usize).map(|k| series[m_i as usize - k]).collect();
        parts.push(PolePart { pole: a_i, coeffs });
    }
    // h(infinity) = prod(-conj(a_j))
    let outer_const: Complex64 = poles.iter().map(|a| -a.conj()).product();
    let rational = RationalFn::new(vec![outer_const], parts)?;
    let n = poles.len() as u32;
    debug_assert_eq!(rational.degree(), n);
    Ok(ExtremalMember {
        family: if inside { FamilyKind::BlaschkeInside } else { FamilyKind::BlaschkeOutside },
        rational,
        degree_requested: n,
        degree_realized: n,
        slack: 0,
        eval_data: EvalData::Blaschke(poles.to_vec()),
    })
}

/// Taylor series of (c0 + slope (v - v0)) as a jet.
fn series_linear(coeff0: Complex64, slope: Complex64, len: usize) -> Vec<Complex64> {
    let mut s = vec![Complex64::default(); len];
    s[0] = coeff0;
    if len > 1 {
        s[1] = slope;
    }
    s
}

/// Taylor series of 1/(v - b) around v = v0 != b, truncated.
fn series_inv_linear(v0: Complex64, b: Complex64, len: usize) -> Vec<Complex64> {
    let d = v0 - b;
    let mut s = vec![Complex64::default(); len];
    let mut cur = 1.0 / d;
    for item in s.iter_mut() {
        *item = cur;
        cur = -cur / d;
    }
    s
}

/// Power S_n = T_N^[n/N] of a lemniscate generator T_N normalized by
/// T_N(z0) = 1; the slack n - N [n/N] is recorded.
pub fn lemniscate_power(
    t_n: &[Complex64],
    z0: Complex64,
    n: u32,
) -> Result<ExtremalMember, ExtremalError> {
    let gen = RationalFn::polynomial(t_n.to_vec());
    let deg = gen.degree();
    if deg == 0 || n < deg {
        return Err(ExtremalError::DegreeTooSmall { n, deg });
    }
    let at_z0 = gen.eval(z0);
    if (at_z0 - 1.0).norm() > 1e-10 {
        return Err(ExtremalError::NotNormalizedAtPoint(at_z0));
    }
    let power = n / deg;
    let coeffs = poly_pow(&gen.outer, power);
    let realized = deg * power;
    Ok(ExtremalMember {
        family: FamilyKind::LemniscatePower,
        rational: RationalFn::polynomial(coeffs),
        degree_requested: n,
        degree_realized: realized,
        slack: n - realized,
        eval_data: EvalData::PolyPow { base: gen.outer, power },
    })
}

/// Transfer of the lemniscate power to a finite pole a on a circle: the image
/// of the circle under phi_a = xi/(z - a) is again a circle, its degree-one
/// lemniscate generator pulls back to S_{n,a}(z) = T_1(phi_a(z))^n, a rational
/// function with one pole of order n at a.
pub fn mobius_power(
    pole: Pole,
    z0: Complex64,
    n: u32,
    curve: &Curve,
) -> Result<ExtremalMember, ExtremalError> {
    let (center, radius) = curve.as_circle().ok_or(ExtremalError::UnsupportedCurve)?;
    if n == 0 {
        return Err(ExtremalError::DegreeTooSmall { n, deg: 1 });
    }
    let a = match pole {
        Pole::Infinity => {
            // identity transfer: T_1(z) = (z - c)/(z0 - c)
            let d = z0 - center;
            let t1 = vec![-center / d, Complex64::new(1.0, 0.0) / d];
            return Ok(ExtremalMember {
                family: FamilyKind::LemniscatePower,
                ..lemniscate_power(&t1, z0, n)?
            });
        }
        Pole::At(a) => a,
    };
    if curve.distance_to(a) < POLE_MARGIN * curve.diameter() {
        return Err(ExtremalError::PoleOnBoundary);
    }
    let map = MobiusMap::new(a, Some(z0));
    let (ic, _) = map.map_circle(center, radius);
    let w0 = map.eval(z0);
    let scale = w0 - ic;
    // (phi(z) - ic)^n = (xi - ic (z - a))^n / (z - a)^n expanded binomially
    let lin = vec![map.xi, -ic];
    let num = poly_pow(&lin, n); // coefficients of (z - a)^k, k = 0..n
    let mut outer = vec![Complex64::default()];
    let mut part = vec![Complex64::default(); n as usize];
    let scale_n = scale.powu(n);
    for (k, c) in num.iter().enumerate() {
        let v = c / scale_n;
        if k == n as usize {
            outer[0] = v;
        } else {
            part[(n as usize - k) - 1] = v; // coefficient of w^{n-k}
        }
    }
    let rational = RationalFn::new(outer, vec![PolePart { pole: a, coeffs: part }])?;
    Ok(ExtremalMember {
        family: FamilyKind::MobiusPower,
        rational,
        degree_requested: n,
        degree_realized: n,
        slack: 0,
        eval_data: EvalData::MobiusPow { xi: map.xi, a, center: ic, scale, power: n },
    })
}

/// Endpoint (Markov) extremal on a segment for the pole at infinity: the
/// symmetrized even construction collapses to the Chebyshev polynomial
/// composed with the segment's affine chart, R_n(w) = T_n((2w - A - B)/(B-A)).
pub fn markov_extremal(
    arc: &Arc,
    poles: &[(Pole, u32)],
    _endpoint: crate::openup::Endpoint,
) -> Result<ExtremalMember, ExtremalError> {
    if !arc.is_segment() {
        return Err(ExtremalError::UnsupportedArc);
    }
    let mut n = 0u32;
    for &(p, order) in poles {
        match p {
            Pole::Infinity => n += order,
            Pole::At(_) => return Err(ExtremalError::UnsupportedPoles),
        }
    }
    if n == 0 {
        return Err(ExtremalError::DegreeTooSmall { n, deg: 1 });
    }
    let (a, b) = arc.endpoints();
    let cheb: Vec<Complex64> =
        chebyshev_coeffs(n).iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let alpha = 2.0 / (b - a);
    let beta = -(a + b) / (b - a);
    let coeffs = poly_affine(&cheb, alpha, beta);
    Ok(ExtremalMember {
        family: FamilyKind::SymmetrizedMarkov,
        rational: RationalFn::polynomial(coeffs),
        degree_requested: n,
        degree_realized: n,
        slack: 0,
        eval_data: EvalData::ChebAffine { n, alpha, beta },
    })
}

/// m-th derivative at 0 of an arbitrary evaluable function via the Cauchy
/// integral over a circle of radius rho, for test oracles.
pub fn cauchy_derivative_at_zero(
    f: impl Fn(Complex64) -> Complex64,
    m: u32,
    rho: f64,
) -> Complex64 {
    let n = 1024;
    let mut acc = Complex64::default();
    for j in 0..n {
        let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let z = Complex64::from_polar(rho, th);
        acc += f(z) * Complex64::from_polar(1.0, -(m as f64) * th);
    }
    let fact: f64 = (1..=m).map(|v| v as f64).product();
    acc * fact / (n as f64 * rho.powi(m as i32))
}
