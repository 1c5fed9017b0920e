//! Potential-theoretic Bernstein and Markov factors for rational functions
//! on smooth Jordan curves and arcs.
//!
//! The crate computes normal derivatives of Green's functions (harmonic
//! measure densities) of the two domains determined by a curve, or of the
//! complement of an arc, sums them over the poles of a rational function to
//! obtain the sharp derivative factors, and provides the extremal families
//! (Blaschke products, lemniscate powers, Chebyshev-type endpoint functions)
//! that attain those factors.

pub mod exact_domains;
pub mod extremal;
pub mod factors;
pub mod geometry;
pub mod greens_numeric;
pub mod json;
pub mod openup;
pub mod rational;

mod trig;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of the extended plane, used for pole locations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pole {
    Infinity,
    At(Complex64),
}

impl Pole {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Pole::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            Pole::Infinity => None,
            Pole::At(z) => Some(*z),
        }
    }
}

impl From<Complex64> for Pole {
    fn from(z: Complex64) -> Self {
        Pole::At(z)
    }
}

impl std::fmt::Display for Pole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pole::Infinity => write!(f, "inf"),
            Pole::At(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

impl Serialize for Pole {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Pole::Infinity => s.serialize_str("inf"),
            Pole::At(z) => [z.re, z.im].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Pole {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Pair([f64; 2]),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "inf" || w == "infinity" => Ok(Pole::Infinity),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("unknown pole `{w}`"))),
            Raw::Pair([re, im]) => Ok(Pole::At(Complex64::new(re, im))),
        }
    }
}

/// Double factorial (2k-1)!! = 1*3*...*(2k-1); equals (2k)!/(k! 2^k).
pub fn double_factorial_odd(k: u32) -> f64 {
    (0..k).map(|j| (2 * j + 1) as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial_odd(1), 1.0);
        assert_eq!(double_factorial_odd(2), 3.0);
        assert_eq!(double_factorial_odd(3), 15.0);
        assert_eq!(double_factorial_odd(4), 105.0);
        // (2k)!/(k! 2^k) route agrees for k = 1..6
        for k in 1..=6u32 {
            let fact = |m: u32| (1..=m).map(|v| v as f64).product::<f64>();
            let alt = fact(2 * k) / (fact(k) * 2f64.powi(k as i32));
            assert!((double_factorial_odd(k) - alt).abs() < 1e-9);
        }
    }

    #[test]
    fn pole_json_round_trip() {
        let p: Pole = serde_json::from_str("\"inf\"").unwrap();
        assert!(p.is_infinite());
        let p: Pole = serde_json::from_str("[1.0, -2.5]").unwrap();
        assert_eq!(p.finite().unwrap(), Complex64::new(1.0, -2.5));
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.0,-2.5]");
    }
}
