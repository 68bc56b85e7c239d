//! Numeric equivalence checking.
//!
//! The oracle never proves equivalence symbolically. It samples bindings for
//! the variables and compares either the residual functions `lhs - rhs`
//! ([`Mode::Pointwise`]) or the solution sets obtained by solving both
//! systems ([`Mode::SolutionSet`]).

mod check;
mod eval;
mod solve;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::code::ControlCode;

pub use check::{check_equivalent, verify_transform};
pub use eval::{evaluate, evaluate_with_magnitude, EvalError};
pub use solve::{compute_answer, linear_system, solve_system, LinearSystem, SolveError};

/// Numeric values for `n_i` and (optionally) `x_j`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bindings {
    pub givens: BTreeMap<u32, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub unknowns: BTreeMap<u32, f64>,
}

impl Bindings {
    pub fn from_givens(values: &[f64]) -> Self {
        Bindings {
            givens: values.iter().enumerate().map(|(k, v)| (k as u32 + 1, *v)).collect(),
            unknowns: BTreeMap::new(),
        }
    }

    pub fn with_unknowns(mut self, unknowns: BTreeMap<u32, f64>) -> Self {
        self.unknowns = unknowns;
        self
    }
}

/// Assignment of values to unknowns, keyed by unknown index.
pub type Assignment = BTreeMap<u32, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub samples: usize,
    /// Closed range that sampled variable values are drawn from.
    pub range: (f64, f64),
    pub pointwise_tol: f64,
    pub solution_tol: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            samples: 100,
            range: (0.5, 10.5),
            pointwise_tol: 1e-9,
            solution_tol: 1e-6,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("tolerances must be positive and finite")]
    BadTolerance,
    #[error("sampling range must be finite, nonempty and exclude (-0.5, 0.5)")]
    BadRange,
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.samples == 0 {
            return Err(ConfigError::NoSamples);
        }
        let tol_ok = |t: f64| t.is_finite() && t > 0.0;
        if !tol_ok(self.pointwise_tol) || !tol_ok(self.solution_tol) {
            return Err(ConfigError::BadTolerance);
        }
        let (lo, hi) = self.range;
        let straddles_zero = lo < 0.5 && hi > -0.5;
        if !lo.is_finite() || !hi.is_finite() || lo > hi || straddles_zero {
            return Err(ConfigError::BadRange);
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        OracleConfig { seed, ..self.clone() }
    }

    /// Sets both tolerances.
    pub fn with_tolerance(&self, tol: f64) -> Self {
        OracleConfig { pointwise_tol: tol, solution_tol: tol, ..self.clone() }
    }
}

/// Per-check seed derived from the run seed, a record id and a code, so a
/// check's samples do not depend on scheduling or on other records.
pub fn derive_seed(global: u64, record_id: &str, code: ControlCode) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update((record_id.len() as u64).to_le_bytes());
    h.update(record_id.as_bytes());
    h.update(code.name().as_bytes());
    let digest = h.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(first)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Residuals `lhs - rhs` agree at every sampled binding of all variables.
    Pointwise,
    /// Both systems have the same solutions at every sampled binding of the
    /// given variables.
    SolutionSet,
}

impl Mode {
    pub fn for_code(code: ControlCode) -> Mode {
        match code {
            ControlCode::Orig | ControlCode::Add | ControlCode::Mul => Mode::Pointwise,
            ControlCode::Sol | ControlCode::Equ | ControlCode::Var => Mode::SolutionSet,
        }
    }
}

/// Structural alignment between an original set and a candidate.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Correspondence {
    /// `equation_order[k]` is the original equation matching candidate
    /// equation `k`.
    pub equation_order: Vec<usize>,
    /// Original unknown index -> candidate unknown index. Missing entries map
    /// to themselves.
    pub unknown_map: BTreeMap<u32, u32>,
}

impl Correspondence {
    pub fn identity(n: usize) -> Self {
        Correspondence { equation_order: (0..n).collect(), unknown_map: BTreeMap::new() }
    }

    pub(crate) fn to_candidate(&self, j: u32) -> u32 {
        self.unknown_map.get(&j).copied().unwrap_or(j)
    }

    pub(crate) fn to_original(&self, j: u32) -> u32 {
        self.unknown_map
            .iter()
            .find(|(_, &c)| c == j)
            .map(|(&o, _)| o)
            .unwrap_or(j)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    NotEquivalent { witness: Bindings },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::NotEquivalent { .. } => "not_equivalent",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// `|a - b| <= tol * scale + 1e-12`.
pub(crate) fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale + ABS_FLOOR
}

pub(crate) const ABS_FLOOR: f64 = 1e-12;
