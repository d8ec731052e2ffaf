//! JSON configuration for generated systems and diagnostic runs.
//!
//! ```json
//! {"type": "cantor", "gaps": "middle-thirds", "levels": 8}
//! {"type": "christensen-ivan", "chain": "binary", "alphas": {"rule": "linear"}, "levels": 10,
//!  "probes": {"lambdas": [{"re": 0, "im": 1}], "functions": ["lorentzian"], "levels": [0, 9]}}
//! ```

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteCStarAlgebra, StarHomomorphism, State};
use crate::diagnostics::{ProbeFunction, DEFAULT_THRESHOLD, DEFAULT_WINDOW};
use crate::error::{validation, Result};
use crate::generators::{
    binary_chain, cantor_system, ci_system, commutative_af_chain, growing_commutator_system, middle_thirds,
    random_commutative_system, AfChain, GapSequence,
};
use crate::inductive::InductiveSystem;
use crate::operator::JsonComplex;
use crate::tolerance::Tolerances;

/// Which system to generate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SystemConfig {
    Cantor {
        gaps: GapsConfig,
        /// Hull `[x_{0,+}, x_{0,−}]` for explicit gaps; defaults to `[0, 1]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<[f64; 2]>,
        levels: usize,
        #[serde(default)]
        grading: bool,
    },
    ChristensenIvan {
        chain: ChainConfig,
        /// Point weights of the top level for commutative chains; uniform
        /// when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        alphas: AlphasConfig,
        levels: usize,
    },
    LinearGrowth {
        levels: usize,
    },
    Random {
        seed: u64,
        levels: usize,
        #[serde(default = "default_max_dim")]
        max_dim: usize,
    },
}

fn default_max_dim() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GapsConfig {
    /// `"middle-thirds"`.
    Named(String),
    /// `[[x_{n,−}, x_{n,+}], …]` for `n ≥ 1`.
    Explicit(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChainConfig {
    /// `"binary"`: `ℂ ⊆ ℂ² ⊆ ℂ⁴ ⊆ …`.
    Named(String),
    /// Point surjections from level `i + 1` onto level `i`.
    Surjections { surjections: Vec<Vec<usize>> },
    /// Arbitrary chain with its state on the top algebra.
    Explicit { algebras: Vec<FiniteCStarAlgebra>, inclusions: Vec<StarHomomorphism>, state: State },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphasConfig {
    List(Vec<f64>),
    Rule { rule: AlphaRule },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaRule {
    /// `α_j = j`.
    Linear,
    /// `α_j = (−1)^j`.
    Alternating,
}

impl AlphaRule {
    pub fn values(self, count: usize) -> Vec<f64> {
        (1..=count)
            .map(|j| match self {
                Self::Linear => j as f64,
                Self::Alternating => if j % 2 == 0 { 1.0 } else { -1.0 },
            })
            .collect()
    }
}

impl SystemConfig {
    pub fn levels(&self) -> usize {
        match self {
            Self::Cantor { levels, .. }
            | Self::ChristensenIvan { levels, .. }
            | Self::LinearGrowth { levels }
            | Self::Random { levels, .. } => *levels,
        }
    }

    /// Generates the configured system. Errors are generator failures, not
    /// parse errors.
    pub fn build(&self, tol: &Tolerances) -> Result<InductiveSystem> {
        match self {
            Self::Cantor { gaps, interval, levels, grading } => {
                let g = match gaps {
                    GapsConfig::Named(name) if name == "middle-thirds" => middle_thirds(*levels),
                    GapsConfig::Named(name) => return validation(format!("unknown gap sequence {name:?}")),
                    GapsConfig::Explicit(list) => {
                        let [a, b] = interval.unwrap_or([0.0, 1.0]);
                        GapSequence::new(a, b, list.iter().map(|&[l, r]| (l, r)).collect())?
                    }
                };
                cantor_system(&g, *levels, *grading)
            }
            Self::ChristensenIvan { chain, weights, alphas, levels } => {
                let alphas = match alphas {
                    AlphasConfig::List(v) => v.clone(),
                    AlphasConfig::Rule { rule } => rule.values(*levels),
                };
                ci_system(&self::chain(chain, weights.as_deref(), &alphas, *levels, tol)?, *levels, tol)
            }
            Self::LinearGrowth { levels } => growing_commutator_system(*levels),
            Self::Random { seed, levels, max_dim } => {
                random_commutative_system(&mut ChaCha8Rng::seed_from_u64(*seed), *levels, *max_dim)
            }
        }
    }
}

fn chain(config: &ChainConfig, weights: Option<&[f64]>, alphas: &[f64], levels: usize, tol: &Tolerances) -> Result<AfChain> {
    match config {
        ChainConfig::Named(name) if name == "binary" => {
            if alphas.len() < levels {
                return validation(format!("{levels} levels need {levels} alphas, got {}", alphas.len()));
            }
            let alphas = &alphas[..levels];
            match weights {
                None => binary_chain(alphas),
                Some(w) => {
                    let surjections: Vec<Vec<usize>> =
                        (1..=levels).map(|i| (0..1usize << i).map(|t| t / 2).collect()).collect();
                    commutative_af_chain(&surjections, w, alphas)
                }
            }
        }
        ChainConfig::Named(name) => validation(format!("unknown chain {name:?}")),
        ChainConfig::Surjections { surjections } => {
            let top = surjections.last().map_or(1, Vec::len);
            let uniform = vec![1.0 / top as f64; top];
            commutative_af_chain(surjections, weights.unwrap_or(&uniform), alphas)
        }
        ChainConfig::Explicit { algebras, inclusions, state } => {
            AfChain::new(algebras.clone(), inclusions.clone(), state.clone(), alphas.to_vec(), tol)
        }
    }
}

/// Diagnostic probes. Empty lists fall back to the defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    pub lambdas: Vec<JsonComplex>,
    pub functions: Vec<ProbeFunction>,
    /// Inclusive level range `[a, b]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<[usize; 2]>,
    pub threshold: Option<f64>,
    pub window: Option<usize>,
    /// Caller-set bound for ST2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

/// `i`, `2i`, `1 + i`.
pub fn default_lambdas() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)]
}

impl ProbeConfig {
    pub fn lambdas(&self) -> Vec<Complex64> {
        if self.lambdas.is_empty() {
            default_lambdas()
        } else {
            self.lambdas.iter().map(|&z| z.into()).collect()
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold.unwrap_or(DEFAULT_THRESHOLD)
    }

    pub fn window(&self) -> usize {
        self.window.unwrap_or(DEFAULT_WINDOW)
    }

    /// Rejects real or non-finite `λ` and inverted level ranges.
    pub fn check(&self) -> Result<()> {
        for z in &self.lambdas {
            if !(z.re.is_finite() && z.im.is_finite()) || z.im == 0.0 {
                return validation(format!("λ probe {}+{}i must be finite and non-real", z.re, z.im));
            }
        }
        if let Some([a, b]) = self.levels {
            if a > b {
                return validation(format!("level range [{a}, {b}] is empty"));
            }
        }
        Ok(())
    }
}

/// A system plus the diagnostics to run on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub system: SystemConfig,
    #[serde(default)]
    pub probes: ProbeConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Parses and checks a configuration; all errors are input errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.probes.check()?;
        if let Some([_, b]) = config.probes.levels {
            if b > config.system.levels() {
                return validation(format!("probe levels end at {b}, the system has {} levels", config.system.levels()));
            }
        }
        Ok(config)
    }
}
