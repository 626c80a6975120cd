//! Energy-as-parameter approximation of states outside the exact QES sector.
//!
//! The series `u(x; E)` is truncated at a fixed degree and the weighted
//! residual
//!
//! ```text
//! Δ(E) = |∫ ψ₀² u (H̃ - E) u dx|
//! ```
//!
//! is scanned over `E`. Both `u` and `(H̃ - E)u` are polynomials in `x` whose
//! coefficients are exact polynomials in `E`, so the integral reduces to a
//! contraction against the moments of `ψ₀²`. Minima of `Δ` whose polynomial
//! has the node count of a bound state are reported as approximate levels.

use num_traits::Zero;
use thiserror::Error;

use crate::euler::{EngineError, EulerOperator};
use crate::poly::{approximate, from_f64, to_f64, Poly, PolyError, Rational};
use crate::qes::{
    count_nodes, derive_measure, euler_operator, solve_exact_spectrum, transformed_params,
    Measure, QesError, QesModel,
};
use crate::quad;

/// Γ(1/4), Γ(1/2), Γ(3/4) and Γ(1).
const GAMMA_QUARTERS: [f64; 4] = [
    3.625_609_908_221_908_311_9,
    1.772_453_850_905_516_027_3,
    1.225_416_702_465_177_645_1,
    1.0,
];

/// Energy tolerance of golden-section refinement; zero crossings are bisected to float precision.
pub const ENERGY_TOL: f64 = 1e-9;

/// Precision used when rationalizing an energy for exact node counting.
pub const NODE_RATIONALIZATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VariationalError {
    #[error("moment of order {needed} requested, table holds up to {capacity}")]
    MomentOverflow { needed: usize, capacity: usize },
    #[error("empty scan window [{lo}, {hi}] with step {step}")]
    EmptyWindow { lo: f64, hi: f64, step: f64 },
    #[error("degree {degree} is inconsistent with {parity:?} parity")]
    InconsistentDegree { parity: Parity, degree: usize },
    #[error("odd parity is unavailable for the barrier model")]
    OddParityWithBarrier,
    #[error("non-finite energy {0}")]
    NonFiniteEnergy(f64),
    #[error(transparent)]
    Qes(#[from] QesError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn indicial_root(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaMode {
    /// `|⟨u, (H̃ - E)u⟩|` with `u` unnormalized.
    #[default]
    Raw,
    /// The raw value divided by `⟨u, u⟩`.
    Normalized,
}

/// `Γ(z)` for `z` a positive multiple of 1/4.
pub fn gamma_quarter(z: f64) -> f64 {
    let quarters = (4.0 * z).round() as i64;
    assert!(quarters >= 1 && (4.0 * z - quarters as f64).abs() < 1e-12);
    let mut q = quarters;
    let mut acc = 1.0;
    while q > 4 {
        q -= 4;
        acc *= q as f64 / 4.0;
    }
    acc * GAMMA_QUARTERS[(q - 1) as usize]
}

/// Moments `∫ x^k ψ₀² dx` over the model's domain for `k ≤ capacity`.
///
/// On the symmetric domain odd moments vanish and only even ones are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    measure: Measure,
    capacity: usize,
    values: Vec<f64>,
    closed_form: bool,
}

impl MomentTable {
    pub fn build(measure: &Measure, capacity: usize) -> Self {
        let four_l = 4.0 * measure.l;
        let q2 = 2.0 * measure.quadratic_exponent();
        let q4 = 2.0 * measure.quartic_exponent();
        let closed_form = q2 == 0.0 && (four_l - four_l.round()).abs() < 1e-12;
        let powers: Vec<usize> = if measure.barrier {
            (0..=capacity).collect()
        } else {
            (0..=capacity).step_by(2).collect()
        };
        let values = powers
            .iter()
            .map(|&k| {
                let p = k as f64 + four_l.round();
                if closed_form {
                    // ∫_0^∞ x^p e^{-c x⁴} dx = Γ((p+1)/4) / (4 c^{(p+1)/4})
                    let z = (p + 1.0) / 4.0;
                    gamma_quarter(z) / (4.0 * q4.powf(z))
                } else {
                    let p = k as f64 + four_l;
                    quad::integrate_half_line(
                        |x: f64| {
                            let x2 = x * x;
                            x.powf(p) * (-(q2 * x2 + q4 * x2 * x2)).exp()
                        },
                        1e-14,
                    )
                }
            })
            .map(|half| if measure.barrier { half } else { 2.0 * half })
            .collect();
        Self {
            measure: *measure,
            capacity,
            values,
            closed_form,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_closed_form(&self) -> bool {
        self.closed_form
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn get(&self, k: usize) -> Result<f64, VariationalError> {
        if k > self.capacity {
            return Err(VariationalError::MomentOverflow {
                needed: k,
                capacity: self.capacity,
            });
        }
        Ok(if self.measure.barrier {
            self.values[k]
        } else if k % 2 == 1 {
            0.0
        } else {
            self.values[k / 2]
        })
    }

    /// `∫ p ψ₀²`.
    pub fn contract(&self, p: &Poly) -> Result<f64, VariationalError> {
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| Ok(to_f64(c) * self.get(k)?))
            .sum()
    }
}

/// Float polynomial in the reduced energy, evaluated by Horner's rule.
#[derive(Debug, Clone, PartialEq)]
struct EnergyPoly(Vec<f64>);

impl EnergyPoly {
    fn eval(&self, e: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * e + c)
    }
}

/// The series truncated at a fixed degree, with its residual contracted
/// symbolically against the moments once, up front.
#[derive(Debug, Clone)]
pub struct TruncatedState {
    model: QesModel,
    parity: Parity,
    degree: usize,
    operator: EulerOperator,
    /// `u[m](Ẽ)` multiplies `x^m`.
    u: Vec<Poly>,
    energy_shift: Rational,
    moments: MomentTable,
    inner: EnergyPoly,
    norm: EnergyPoly,
}

impl TruncatedState {
    pub fn new(model: &QesModel, parity: Parity, degree: usize) -> Result<Self, VariationalError> {
        if degree % 2 != parity.indicial_root() {
            return Err(VariationalError::InconsistentDegree { parity, degree });
        }
        if model.has_barrier() && parity == Parity::Odd {
            return Err(VariationalError::OddParityWithBarrier);
        }
        let operator = euler_operator(model)?;
        let lambda = parity.indicial_root();
        let series = operator.generate_series(&Rational::from_integer(lambda.into()), (degree - lambda) / 2)?;
        let u = series.symbolic_polynomial(degree)?;
        let moments = MomentTable::build(&derive_measure(model)?, 2 * degree + 6);
        let r = residual_symbolic(&operator, &u);
        let inner = contract_symbolic(&u, &r, &moments)?;
        let norm = contract_symbolic(&u, &u, &moments)?;
        Ok(Self {
            model: *model,
            parity,
            degree,
            operator,
            u,
            energy_shift: transformed_params(model)?.energy_shift,
            moments,
            inner,
            norm,
        })
    }

    pub fn model(&self) -> &QesModel {
        &self.model
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn moments(&self) -> &MomentTable {
        &self.moments
    }

    /// Coefficients of `u` as polynomials in the reduced energy `Ẽ`.
    pub fn symbolic(&self) -> &[Poly] {
        &self.u
    }

    fn reduced_f64(&self, energy: f64) -> f64 {
        energy - to_f64(&self.energy_shift)
    }

    fn reduced_exact(&self, energy: &Rational) -> Rational {
        energy - &self.energy_shift
    }

    /// `u(x; E)` at an exact energy.
    pub fn polynomial_at(&self, energy: &Rational) -> Poly {
        let e = self.reduced_exact(energy);
        Poly::new(self.u.iter().map(|c| c.eval(&e)).collect())
    }

    /// `(H̃ - E) u(x; E)` at an exact energy.
    pub fn residual_at(&self, energy: &Rational) -> Poly {
        let u = self.polynomial_at(energy);
        let lu = self.operator.apply(&u, &self.reduced_exact(energy));
        -lu.divide_by_var_power(2).expect("sector residuals are divisible by x^2")
    }

    /// Signed `⟨u, (H̃ - E)u⟩` from the precomputed energy polynomial.
    pub fn signed_inner(&self, energy: f64) -> f64 {
        self.inner.eval(self.reduced_f64(energy))
    }

    /// `⟨u, u⟩` at `E`.
    pub fn norm_squared(&self, energy: f64) -> f64 {
        self.norm.eval(self.reduced_f64(energy))
    }

    pub fn delta(&self, energy: f64, mode: DeltaMode) -> f64 {
        let raw = self.signed_inner(energy).abs();
        match mode {
            DeltaMode::Raw => raw,
            DeltaMode::Normalized => raw / self.norm_squared(energy),
        }
    }

    /// `‖(H̃ - E)u‖² / ‖u‖²` with the measure weight.
    pub fn normalized_residual(&self, energy: f64) -> Result<f64, VariationalError> {
        let e = exact_energy(energy)?;
        let u = self.polynomial_at(&e);
        let r = self.residual_at(&e);
        Ok(self.moments.contract(&(&r * &r))? / self.moments.contract(&(&u * &u))?)
    }

    /// Real zeros of `u(·; E)` on the model's domain, with `E` rationalized at 1e-12.
    pub fn node_count(&self, energy: f64) -> Result<usize, VariationalError> {
        let e = approximate(energy, NODE_RATIONALIZATION).ok_or(VariationalError::NonFiniteEnergy(energy))?;
        Ok(count_nodes(&self.polynomial_at(&e), self.model.has_barrier())?)
    }
}

fn exact_energy(energy: f64) -> Result<Rational, VariationalError> {
    from_f64(energy).ok_or(VariationalError::NonFiniteEnergy(energy))
}

fn residual_symbolic(op: &EulerOperator, u: &[Poly]) -> Vec<Poly> {
    let lu = op.apply_symbolic(u);
    debug_assert!(lu.iter().take(2).all(Poly::is_zero));
    lu.into_iter().skip(2).map(|c| -c).collect()
}

fn contract_symbolic(p: &[Poly], q: &[Poly], moments: &MomentTable) -> Result<EnergyPoly, VariationalError> {
    let mut out: Vec<f64> = Vec::new();
    for (i, pi) in p.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            if pi.is_zero() || qj.is_zero() {
                continue;
            }
            let m = moments.get(i + j)?;
            if m == 0.0 {
                continue;
            }
            let prod = pi * qj;
            if out.len() < prod.coeffs().len() {
                out.resize(prod.coeffs().len(), 0.0);
            }
            for (k, c) in prod.coeffs().iter().enumerate() {
                out[k] += to_f64(c) * m;
            }
        }
    }
    Ok(EnergyPoly(out))
}

/// `Δ(E)` through the exact per-energy path: instantiate `u`, form
/// `(H̃ - E)u` exactly, contract the product with the moments.
pub fn residual_inner_product(state: &TruncatedState, energy: f64, mode: DeltaMode) -> Result<f64, VariationalError> {
    let e = exact_energy(energy)?;
    let u = state.polynomial_at(&e);
    let r = state.residual_at(&e);
    let raw = state.moments.contract(&(&u * &r))?.abs();
    Ok(match mode {
        DeltaMode::Raw => raw,
        DeltaMode::Normalized => raw / state.moments.contract(&(&u * &u))?,
    })
}

/// Float evaluation of `H̃ u` straight from the differential operator, used
/// as an oracle independent of the Euler-form machinery.
fn transformed_hamiltonian_f64(model: &QesModel, coeffs: &[f64], x: f64) -> f64 {
    let eval = |c: &[f64]| c.iter().rev().fold(0.0, |acc, v| acc * x + v);
    let d1: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let d2: Vec<f64> = d1.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
    let (u, du, ddu) = (eval(coeffs), eval(&d1), eval(&d2));
    let sg = model.gamma.sqrt();
    let n = f64::from(model.n);
    if model.has_barrier() {
        let four_l = 1.0 + 2.0 * (0.25 + model.sigma).sqrt();
        -ddu - four_l * du / x + 2.0 * sg * x.powi(3) * du - 2.0 * n * sg * x * x * u
    } else {
        let b = model.beta / sg;
        -ddu + 2.0 * sg * x.powi(3) * du + b * x * du - 2.0 * n * sg * x * x * u + 0.5 * b * u
    }
}

/// `Δ(E)` by adaptive quadrature of `ψ₀² u (H̃ - E)u`.
pub fn residual_by_quadrature(state: &TruncatedState, energy: f64, mode: DeltaMode) -> Result<f64, VariationalError> {
    let e = exact_energy(energy)?;
    let coeffs = state.polynomial_at(&e).to_f64_coeffs();
    let measure = *state.moments.measure();
    let model = state.model;
    let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, v| acc * x + v);
    let weight = |x: f64| measure.eval(x).powi(2);
    let integrand = |x: f64| {
        let u = eval(x);
        weight(x) * u * (transformed_hamiltonian_f64(&model, &coeffs, x) - energy * u)
    };
    let norm_integrand = |x: f64| weight(x) * eval(x).powi(2);
    let over_domain = |f: &dyn Fn(f64) -> f64| {
        let right = quad::integrate_half_line(f, 1e-13);
        if measure.barrier {
            right
        } else {
            right + quad::integrate_half_line(|x| f(-x), 1e-13)
        }
    };
    let raw = over_domain(&integrand).abs();
    Ok(match mode {
        DeltaMode::Raw => raw,
        DeltaMode::Normalized => raw / over_domain(&norm_integrand),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSample {
    pub energy: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimumKind {
    /// Sign change of the signed inner product, so `Δ = 0`.
    ZeroCrossing,
    /// Strict interior minimum of the sampled `Δ`, refined by golden section.
    LocalMinimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaMinimum {
    pub energy: f64,
    pub delta: f64,
    pub kind: MinimumKind,
    pub node_count: usize,
    pub physical: bool,
    /// `‖(H̃ - E)u‖² / ‖u‖²`, the tie-breaker between minima of equal level.
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaCurve {
    pub samples: Vec<DeltaSample>,
    pub minima: Vec<DeltaMinimum>,
}

/// Exactly known levels (node count, energy) used to judge physicality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevelBrackets {
    pub exact: Vec<(usize, f64)>,
}

impl LevelBrackets {
    pub fn for_model(model: &QesModel) -> Self {
        let exact = solve_exact_spectrum(model)
            .map(|s| s.entries.iter().map(|e| (e.node_count, e.energy)).collect())
            .unwrap_or_default();
        Self { exact }
    }

    /// A candidate at level `nodes` is physical when it reproduces the exact
    /// energy of that level, or, for a level outside the exact sector, lies
    /// strictly between the nearest exact levels below and above it.
    pub fn is_physical(&self, nodes: usize, energy: f64) -> bool {
        if let Some(&(_, e)) = self.exact.iter().find(|(k, _)| *k == nodes) {
            return (energy - e).abs() <= 1e-6 * e.abs().max(1.0);
        }
        let below = self
            .exact
            .iter()
            .filter(|(k, _)| *k < nodes)
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max);
        let above = self
            .exact
            .iter()
            .filter(|(k, _)| *k > nodes)
            .map(|p| p.1)
            .fold(f64::INFINITY, f64::min);
        below < energy && energy < above
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Bisect a sign change down to adjacent floats, so exact rational zeros
/// survive the later rationalization used for node counting.
fn bisect_sign<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Sample `Δ` on `lo, lo + step, ...` and locate its minima.
pub fn scan_delta(
    state: &TruncatedState,
    window: (f64, f64),
    step: f64,
    mode: DeltaMode,
) -> Result<DeltaCurve, VariationalError> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi && step > 0.0 && step.is_finite()) {
        return Err(VariationalError::EmptyWindow { lo, hi, step });
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    let energies: Vec<f64> = (0..=count).map(|i| lo + step * i as f64).collect();
    let signed: Vec<f64> = energies.iter().map(|&e| state.signed_inner(e)).collect();
    let samples: Vec<DeltaSample> = energies
        .iter()
        .map(|&e| DeltaSample {
            energy: e,
            delta: state.delta(e, mode),
        })
        .collect();

    let mut found: Vec<(f64, MinimumKind)> = Vec::new();
    for i in 0..energies.len() {
        if signed[i] == 0.0 {
            found.push((energies[i], MinimumKind::ZeroCrossing));
        } else if i + 1 < energies.len() && signed[i] * signed[i + 1] < 0.0 {
            let e = bisect_sign(|e| state.signed_inner(e), energies[i], energies[i + 1]);
            found.push((e, MinimumKind::ZeroCrossing));
        }
    }
    for i in 1..energies.len().saturating_sub(1) {
        let (a, b, c) = (samples[i - 1].delta, samples[i].delta, samples[i + 1].delta);
        let crosses = signed[i - 1] * signed[i] <= 0.0 || signed[i] * signed[i + 1] <= 0.0;
        if a > b && b < c && !crosses {
            let e = golden_section(|e| state.delta(e, mode), energies[i - 1], energies[i + 1], ENERGY_TOL);
            found.push((e, MinimumKind::LocalMinimum));
        }
    }
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    found.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-7);

    let brackets = LevelBrackets::for_model(&state.model);
    let minima = found
        .into_iter()
        .map(|(energy, kind)| {
            let node_count = state.node_count(energy)?;
            Ok(DeltaMinimum {
                energy,
                delta: match kind {
                    MinimumKind::ZeroCrossing => 0.0,
                    MinimumKind::LocalMinimum => state.delta(energy, mode),
                },
                kind,
                node_count,
                physical: brackets.is_physical(node_count, energy),
                residual_norm: state.normalized_residual(energy)?,
            })
        })
        .collect::<Result<Vec<_>, VariationalError>>()?;
    Ok(DeltaCurve { samples, minima })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeCheck {
    pub nodes: usize,
    pub pass: bool,
}

pub fn node_filter(state: &TruncatedState, energy: f64, expected_nodes: usize) -> Result<NodeCheck, VariationalError> {
    let nodes = state.node_count(energy)?;
    Ok(NodeCheck {
        nodes,
        pass: nodes == expected_nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentifiedState {
    /// Level index, equal to the node count.
    pub level: usize,
    pub energy: f64,
    pub delta: f64,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub curve: DeltaCurve,
    pub states: Vec<IdentifiedState>,
    /// Minima failing the physicality test, or losing a tie at their level.
    pub rejected: Vec<DeltaMinimum>,
}

/// Scan, keep physical minima, one per level: the smaller `Δ` wins a tie and
/// the smaller normalized residual breaks a remaining tie.
pub fn identify_states(
    model: &QesModel,
    parity: Parity,
    degree: usize,
    window: (f64, f64),
    step: f64,
    mode: DeltaMode,
) -> Result<Identification, VariationalError> {
    let state = TruncatedState::new(model, parity, degree)?;
    let curve = scan_delta(&state, window, step, mode)?;
    let mut best: Vec<DeltaMinimum> = Vec::new();
    let mut rejected = Vec::new();
    for m in curve.minima.iter().copied() {
        if !m.physical {
            rejected.push(m);
            continue;
        }
        match best.iter_mut().find(|b| b.node_count == m.node_count) {
            None => best.push(m),
            Some(b) => {
                let better = (m.delta, m.residual_norm) < (b.delta, b.residual_norm);
                if better {
                    rejected.push(std::mem::replace(b, m));
                } else {
                    rejected.push(m);
                }
            }
        }
    }
    best.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    rejected.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    let states = best
        .iter()
        .map(|m| IdentifiedState {
            level: m.node_count,
            energy: m.energy,
            delta: m.delta,
            residual_norm: m.residual_norm,
        })
        .collect();
    Ok(Identification {
        curve,
        states,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn odd(degree: usize) -> TruncatedState {
        TruncatedState::new(&QesModel::double_well(), Parity::Odd, degree).unwrap()
    }

    #[test]
    fn gamma_recurrence() {
        assert_eq!(gamma_quarter(1.0), 1.0);
        assert!((gamma_quarter(2.5) - 1.329_340_388_179_137).abs() < 1e-14);
        assert!((gamma_quarter(5.25) - 35.211_611_852_799_7).abs() < 1e-10);
    }

    #[test]
    fn moments_closed_form_and_ratios() {
        let measure = derive_measure(&QesModel::double_well()).unwrap();
        let t = MomentTable::build(&measure, 30);
        assert!(t.is_closed_form());
        let m0 = t.get(0).unwrap();
        let oracle = 2.0 * quad::integrate_half_line(|x| (-0.5 * x.powi(4)).exp(), 1e-14);
        assert!((m0 - oracle).abs() < 1e-10 * oracle);
        assert!((m0 - 2.1558).abs() < 1e-4);
        for m in (0..=26).step_by(2) {
            let ratio = t.get(m + 4).unwrap() / t.get(m).unwrap();
            assert!((ratio - (m as f64 + 1.0) / 2.0).abs() < 1e-12, "m = {m}");
        }
        assert_eq!(t.get(7).unwrap(), 0.0);
        assert!(matches!(t.get(31), Err(VariationalError::MomentOverflow { needed: 31, capacity: 30 })));
    }

    #[test]
    fn quadrature_moments_for_quadratic_exponent() {
        let measure = derive_measure(&QesModel::sextic(2.0, 4.0, 2).unwrap()).unwrap();
        let t = MomentTable::build(&measure, 8);
        assert!(!t.is_closed_form());
        // ∫ x² e^{-(x²/2 + x⁴)} by an independent dense trapezoid
        let h = 1e-4;
        let trap: f64 = (-60000..=60000)
            .map(|i| {
                let x = i as f64 * h;
                x * x * (-(0.5 * x * x + x.powi(4))).exp() * h
            })
            .sum();
        assert!((t.get(2).unwrap() - trap).abs() < 1e-9);
    }

    #[test]
    fn barrier_moments_match_quadrature() {
        let measure = derive_measure(&QesModel::new(-11.0, 0.0, 1.0, 2.0, 2).unwrap()).unwrap();
        let t = MomentTable::build(&measure, 6);
        assert!(t.is_closed_form());
        for k in 0..=6 {
            let q = quad::integrate_half_line(|x| x.powi(k as i32) * measure.eval(x).powi(2), 1e-14);
            assert!((t.get(k).unwrap() - q).abs() < 1e-11 * q, "k = {k}");
        }
    }

    #[test]
    fn inconsistent_degree_rejected() {
        let m = QesModel::double_well();
        assert!(matches!(
            TruncatedState::new(&m, Parity::Odd, 4),
            Err(VariationalError::InconsistentDegree { degree: 4, .. })
        ));
        assert!(TruncatedState::new(&m, Parity::Even, 5).is_err());
        let barrier = QesModel::new(-11.0, 0.0, 1.0, 2.0, 2).unwrap();
        assert_eq!(
            TruncatedState::new(&barrier, Parity::Odd, 5).unwrap_err(),
            VariationalError::OddParityWithBarrier
        );
    }

    #[test]
    fn exact_eigenpairs_annihilated() {
        let s = TruncatedState::new(&QesModel::double_well(), Parity::Even, 4).unwrap();
        for e in [-8, 0, 8] {
            assert!(s.residual_at(&int(e)).is_zero());
            assert_eq!(residual_inner_product(&s, e as f64, DeltaMode::Raw).unwrap(), 0.0);
        }
        // higher truncation carries the exact polynomial plus vanishing tail
        let s = TruncatedState::new(&QesModel::double_well(), Parity::Even, 12).unwrap();
        assert!(s.residual_at(&int(8)).is_zero());
        assert_eq!(s.polynomial_at(&int(-8)), Poly::from_i64(&[1, 0, 4, 0, 2]));
    }

    #[test]
    fn moment_contraction_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let model = QesModel::double_well();
        let states: Vec<TruncatedState> = (1..=12)
            .map(|d| TruncatedState::new(&model, if d % 2 == 0 { Parity::Even } else { Parity::Odd }, d).unwrap())
            .collect();
        for _ in 0..100 {
            let s = &states[rng.gen_range(0..states.len())];
            let e: f64 = rng.gen_range(-20.0..20.0);
            let exact = residual_inner_product(s, e, DeltaMode::Raw).unwrap();
            let quad = residual_by_quadrature(s, e, DeltaMode::Raw).unwrap();
            let fast = s.delta(e, DeltaMode::Raw);
            let scale = exact.max(1e-300);
            assert!((exact - quad).abs() <= 1e-8 * scale, "deg {} E {e}: {exact} vs {quad}", s.degree());
            assert!((exact - fast).abs() <= 1e-8 * scale, "deg {} E {e}: {exact} vs {fast}", s.degree());
        }
    }

    #[test]
    fn degree_nine_level_one() {
        let s = odd(9);
        let curve = scan_delta(&s, (-12.0, -4.0), 0.01, DeltaMode::Raw).unwrap();
        let physical: Vec<&DeltaMinimum> = curve.minima.iter().filter(|m| m.physical).collect();
        assert_eq!(physical.len(), 1, "{:?}", curve.minima);
        assert!((physical[0].energy + 7.916_408_733).abs() < 1e-7);
        assert_eq!(physical[0].node_count, 1);
        assert!(curve.samples.iter().all(|p| p.delta.is_finite() && p.delta >= 0.0));
    }

    #[test]
    fn degree_five_and_nine_zero_crossings() {
        let five = identify_states(&QesModel::double_well(), Parity::Odd, 5, (-12.0, 6.0), 0.01, DeltaMode::Raw).unwrap();
        let e5: Vec<f64> = five.states.iter().map(|s| s.energy).collect();
        assert!((e5[0] + 7.913_704_206).abs() < 1e-7, "{e5:?}");
        assert!((e5[1] - 2.419_229_689).abs() < 1e-7, "{e5:?}");
        let nine = identify_states(&QesModel::double_well(), Parity::Odd, 9, (-12.0, 6.0), 0.01, DeltaMode::Raw).unwrap();
        let levels: Vec<usize> = nine.states.iter().map(|s| s.level).collect();
        assert_eq!(levels, vec![1, 3]);
        assert!((nine.states[1].energy - 2.549_348_919).abs() < 1e-7);
        assert!(nine.rejected.iter().any(|m| (m.energy + 3.298).abs() < 1e-2));
    }

    #[test]
    fn even_degree_twelve_recovers_exact_levels() {
        let id = identify_states(&QesModel::double_well(), Parity::Even, 12, (-12.0, 12.0), 0.01, DeltaMode::Raw).unwrap();
        let found: Vec<(usize, f64)> = id.states.iter().map(|s| (s.level, s.energy)).collect();
        assert_eq!(found.len(), 3, "{found:?}");
        for ((level, e), (l, x)) in found.iter().zip([(0, -8.0), (2, 0.0), (4, 8.0)]) {
            assert_eq!(*level, l);
            assert!((e - x).abs() < 1e-8);
        }
    }

    #[test]
    fn node_filter_examples() {
        let s = odd(9);
        assert_eq!(node_filter(&s, -7.9164, 1).unwrap(), NodeCheck { nodes: 1, pass: true });
        assert_eq!(node_filter(&s, 2.5493, 3).unwrap(), NodeCheck { nodes: 3, pass: true });
        let even = TruncatedState::new(&QesModel::double_well(), Parity::Even, 4).unwrap();
        assert_eq!(node_filter(&even, -8.0, 0).unwrap().nodes, 0);
        // sample-and-count oracle on a fine grid
        let coeffs = s.polynomial_at(&from_f64(2.5493).unwrap()).to_f64_coeffs();
        let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, v| acc * x + v);
        let xs: Vec<f64> = (0..=80_001).map(|i| -4.0 + 1e-4 * i as f64 + 1e-5).collect();
        let changes = xs.windows(2).filter(|w| eval(w[0]) * eval(w[1]) < 0.0).count();
        assert_eq!(changes, 3);
    }

    #[test]
    fn empty_window_rejected() {
        let s = odd(5);
        assert!(matches!(scan_delta(&s, (1.0, 1.0), 0.1, DeltaMode::Raw), Err(VariationalError::EmptyWindow { .. })));
        assert!(scan_delta(&s, (0.0, 1.0), 0.0, DeltaMode::Raw).is_err());
        assert!(scan_delta(&s, (0.0, f64::NAN), 0.1, DeltaMode::Raw).is_err());
    }

    #[test]
    fn normalized_mode_shares_zero_crossings() {
        let s = odd(9);
        let raw = scan_delta(&s, (-12.0, 6.0), 0.02, DeltaMode::Raw).unwrap();
        let norm = scan_delta(&s, (-12.0, 6.0), 0.02, DeltaMode::Normalized).unwrap();
        let zeros = |c: &DeltaCurve| -> Vec<f64> {
            c.minima.iter().filter(|m| m.kind == MinimumKind::ZeroCrossing).map(|m| m.energy).collect()
        };
        let (a, b) = (zeros(&raw), zeros(&norm));
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn physicality_brackets() {
        let b = LevelBrackets::for_model(&QesModel::double_well());
        assert!(b.is_physical(0, -8.0));
        assert!(!b.is_physical(2, -5.2));
        assert!(b.is_physical(1, -7.9));
        assert!(!b.is_physical(3, -3.3));
        assert!(b.is_physical(5, 12.0));
        assert!(!b.is_physical(6, 3.0));
        assert!(LevelBrackets::default().is_physical(3, 100.0));
    }
}
