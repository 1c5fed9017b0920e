//! Experiment configuration: the JSON schema consumed by `sweep` and the
//! target/pole descriptors shared by the other subcommands.

use bernmark::geometry::{ArcSpec, CurveSpec};
use bernmark::json;
use bernmark::rational::RationalFn;
use bernmark::Pole;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    Curve(CurveSpec),
    Arc(ArcSpec),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PoleOrder {
    pub pole: Pole,
    pub order: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    /// Boundary parameter: t in [0, 2 pi) for curves, (-1, 1) for arcs.
    Param { param: f64 },
    /// "A", "B" or "global" (arcs only).
    Endpoint { endpoint: String },
    /// A point resolved to the nearest boundary parameter.
    Point {
        #[serde(with = "json::complex")]
        point: Complex64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Base pole list, cycled until the member degree reaches n.
    Blaschke {
        #[serde(with = "json::complex_vec")]
        poles: Vec<Complex64>,
    },
    /// Lemniscate generator coefficients (ascending) with base point z0.
    Lemniscate {
        #[serde(with = "json::complex_vec")]
        t_coeffs: Vec<Complex64>,
        #[serde(with = "json::complex")]
        z0: Complex64,
    },
    /// Power transferred to a finite pole (or infinity) on a circle.
    Mobius {
        pole: Pole,
        #[serde(with = "json::complex")]
        z0: Complex64,
    },
    /// Symmetrized endpoint construction on a segment.
    Markov { endpoint: String },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub r_inner: f64,
    pub r_outer: f64,
    /// Excluded band around |z| = 1 (the Z-margin).
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RandomRationalSpec {
    pub count: usize,
    pub max_degree: u32,
    pub annulus: AnnulusSpec,
    #[serde(default = "default_targets_per_fn")]
    pub targets_per_fn: usize,
}

fn default_targets_per_fn() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    #[serde(default)]
    pub poles: Vec<PoleOrder>,
    #[serde(default)]
    pub targets: Vec<TargetSpec>,
    #[serde(default = "default_k")]
    pub k: u32,
    /// Optional list of derivative orders; overrides `k` when nonempty.
    #[serde(default)]
    pub k_list: Vec<u32>,
    #[serde(default)]
    pub n_sweep: Vec<u32>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub rational: Option<RationalFn>,
    #[serde(default)]
    pub random_rationals: Option<RandomRationalSpec>,
    #[serde(default = "default_nq")]
    pub nq: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Ratios above 1 + tolerance count as inequality violations.
    #[serde(default = "default_tolerance")]
    pub ratio_tolerance: f64,
    #[serde(default)]
    pub out: Option<String>,
}

fn default_k() -> u32 {
    1
}

pub fn default_nq() -> usize {
    512
}

pub fn default_samples() -> usize {
    4096
}

fn default_tolerance() -> f64 {
    5e-2
}

impl ExperimentConfig {
    pub fn orders(&self) -> Vec<u32> {
        if self.k_list.is_empty() {
            vec![self.k]
        } else {
            self.k_list.clone()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.n_sweep.is_empty() && self.n_sweep.windows(2).any(|w| w[0] >= w[1]) {
            return Err("n_sweep must be strictly increasing".into());
        }
        if self.orders().iter().any(|&k| k == 0) {
            return Err("derivative orders must be at least 1".into());
        }
        if self.nq < 64 || !self.nq.is_power_of_two() {
            return Err(format!("nq must be a power of two >= 64, got {}", self.nq));
        }
        Ok(())
    }
}
