//! Serializable report sections. Every float is rounded to 9 significant digits.

use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;

/// Round to 9 significant digits; non-finite values pass through.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Text form of [`sig9`]: plain decimals for moderate magnitudes, exponent form otherwise.
pub fn fmt9(x: f64) -> String {
    let r = sig9(x);
    let a = r.abs();
    if r == 0.0 || (1e-4..1e9).contains(&a) || !r.is_finite() {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: ModelConfig,
    pub exact: ExactSection,
    pub variational: VariationalSection,
    pub reference: ReferenceSection,
    pub validation: Vec<ValidationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSection {
    /// Termination polynomial, in `E~ = E - beta/(2 sqrt(gamma))` when that shift is nonzero.
    pub termination: String,
    pub energy_shift: f64,
    /// False when an irrational square root of the couplings had to be approximated.
    pub exact_arithmetic: bool,
    pub states: Vec<ExactState>,
    pub closed_form_checks: Vec<ClosedFormRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactState {
    pub energy: f64,
    /// Exact rational energy when one exists.
    pub energy_exact: Option<String>,
    pub node_count: usize,
    /// Coefficients of the polynomial factor in ascending powers of x, as exact rationals.
    pub coefficients: Vec<String>,
    pub polynomial: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormRow {
    pub label: String,
    pub closed_form: Vec<f64>,
    pub solved: Vec<f64>,
    pub max_abs_diff: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalSection {
    /// `raw` or `normalized`.
    pub mode: String,
    pub step: f64,
    pub reference_available: bool,
    pub rows: Vec<VariationalRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalRow {
    pub level: usize,
    pub window: [f64; 2],
    pub reference: Option<f64>,
    pub approximations: Vec<Approximation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub degree: usize,
    /// Energy of the physical minimum at this level; null when none was found.
    pub energy: Option<f64>,
    pub delta: Option<f64>,
    /// `|E - E_ref| / |E_ref|`; null when the reference is unavailable.
    pub deviation: Option<f64>,
    pub deviation_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSection {
    pub enabled: bool,
    pub length: f64,
    pub points: usize,
    pub fine_points: usize,
    pub tol: f64,
    pub half_line: bool,
    /// Eigenvector sign changes agree with the level index for the first few levels.
    pub labels_verified: bool,
    pub levels: Vec<ReferenceLevel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLevel {
    pub level: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub name: String,
    pub quoted: String,
    pub derived: String,
    /// `agree`, `discrepancy` or `note`.
    pub status: String,
    pub detail: String,
}
