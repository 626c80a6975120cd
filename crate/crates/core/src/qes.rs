//! Sextic QES models, their ground-state measures and the exactly solvable sector.
//!
//! Two families are covered:
//!
//! * `H = -d² + αx² + βx⁴ + γx⁶` with `ψ₀ = exp(-(a x² + b x⁴))`,
//!   `a = β/(4√γ)`, `b = √γ/4`;
//! * `H = -d² + σ/x² + αx² + γx⁶` (β = 0) with `ψ₀ = x^{2l} exp(-√γ x⁴/4)` and
//!   `l = 1/4 + ½√(1/4 + σ)`, the branch regular at the origin.
//!
//! Writing `ψ = ψ₀ P` and multiplying the transformed eigenproblem by `-x²`
//! gives an Euler-form operator in which the `x⁴` coefficient is `2n√γ`
//! exactly when the couplings satisfy the QES condition for degree `n`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::euler::{EngineError, EulerOperator, MonomialTerm};
use crate::poly::{
    cauchy_bound, count_real_roots, exact_root, from_f64, int, isolate_real_roots, rat,
    refine_root, sqrt_exact, sturm_count, to_f64, Poly, PolyError, Rational,
};
use crate::quad;

/// Tolerance on the implied degree when checking the QES condition.
pub const CONDITION_TOL: f64 = 1e-10;

/// Agreement required between closed-form energies and the root-solving path.
pub const CLOSED_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QesError {
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
    #[error("unsupported model: the centrifugal barrier is only treated for beta = 0")]
    UnsupportedModel,
    #[error("QES condition violated: couplings imply n = {implied_n}, model has n = {n}")]
    ConditionViolated { implied_n: f64, n: u32 },
    #[error("odd sector unavailable: n = {0} is odd")]
    OddSectorUnavailable(u32),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Couplings of `-d² + σ/x² + αx² + βx⁴ + γx⁶` and the QES degree `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QesModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub n: u32,
}

impl QesModel {
    pub fn new(alpha: f64, beta: f64, gamma: f64, sigma: f64, n: u32) -> Result<Self, QesError> {
        let m = Self {
            alpha,
            beta,
            gamma,
            sigma,
            n,
        };
        m.validate()?;
        Ok(m)
    }

    /// `-d² - 11x² + x⁶`, the n = 4 double well.
    pub fn double_well() -> Self {
        Self {
            alpha: -11.0,
            beta: 0.0,
            gamma: 1.0,
            sigma: 0.0,
            n: 4,
        }
    }

    /// Barrier-free model whose `α` is fixed by the QES condition.
    pub fn sextic(beta: f64, gamma: f64, n: u32) -> Result<Self, QesError> {
        let alpha = beta * beta / (4.0 * gamma) - gamma.sqrt() * (2.0 * f64::from(n) + 3.0);
        Self::new(alpha, beta, gamma, 0.0, n)
    }

    /// Barrier model whose `α` is fixed by the QES condition.
    pub fn with_barrier(gamma: f64, sigma: f64, n: u32) -> Result<Self, QesError> {
        let root = (0.25 + sigma).sqrt();
        let alpha = -4.0 * gamma.sqrt() * (f64::from(n) / 2.0 + 1.0 + 0.5 * root);
        Self::new(alpha, 0.0, gamma, sigma, n)
    }

    pub fn validate(&self) -> Result<(), QesError> {
        if ![self.alpha, self.beta, self.gamma, self.sigma]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(QesError::InvalidModel("couplings must be finite"));
        }
        if self.gamma <= 0.0 {
            return Err(QesError::InvalidModel("gamma must be positive"));
        }
        if self.sigma < 0.0 {
            return Err(QesError::InvalidModel("sigma must be nonnegative"));
        }
        if self.sigma > 0.0 && self.beta != 0.0 {
            return Err(QesError::UnsupportedModel);
        }
        Ok(())
    }

    pub fn has_barrier(&self) -> bool {
        self.sigma > 0.0
    }

    pub fn potential(&self, x: f64) -> f64 {
        let x2 = x * x;
        let barrier = if self.sigma > 0.0 { self.sigma / x2 } else { 0.0 };
        barrier + x2 * (self.alpha + x2 * (self.beta + x2 * self.gamma))
    }
}

/// `ψ₀ = |x|^{2l} exp(-(q₂ x² + q₄ x⁴))`.
///
/// Without a barrier `q₂ = a`, `q₄ = b`. With a barrier `a = √γ`, `q₂ = 0` and
/// `q₄ = b = a/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measure {
    pub a: f64,
    pub b: f64,
    pub l: f64,
    pub barrier: bool,
}

impl Measure {
    pub fn quadratic_exponent(&self) -> f64 {
        if self.barrier {
            0.0
        } else {
            self.a
        }
    }

    pub fn quartic_exponent(&self) -> f64 {
        self.b
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x2 = x * x;
        let power = if self.l == 0.0 { 1.0 } else { x.abs().powf(2.0 * self.l) };
        power * (-(self.quadratic_exponent() * x2 + self.quartic_exponent() * x2 * x2)).exp()
    }
}

pub fn derive_measure(m: &QesModel) -> Result<Measure, QesError> {
    m.validate()?;
    let sg = m.gamma.sqrt();
    Ok(if m.has_barrier() {
        Measure {
            a: sg,
            b: sg / 4.0,
            l: 0.25 + 0.5 * (0.25 + m.sigma).sqrt(),
            barrier: true,
        }
    } else {
        Measure {
            a: m.beta / (4.0 * sg),
            b: sg / 4.0,
            l: 0.0,
            barrier: false,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionCheck {
    pub satisfied: bool,
    pub implied_n: f64,
}

/// Degree implied by the couplings.
///
/// Barrier-free: `(β²/(4γ) - α)/√γ = 2n + 3`. With a barrier the condition is
/// re-derived from the transformed operator, `-α/(4√γ) - ½√(1/4+σ) = n/2 + 1`.
pub fn qes_condition(m: &QesModel) -> ConditionCheck {
    let sg = m.gamma.sqrt();
    let implied_n = if m.has_barrier() {
        2.0 * (-m.alpha / (4.0 * sg) - 0.5 * (0.25 + m.sigma).sqrt() - 1.0)
    } else {
        ((m.beta * m.beta / (4.0 * m.gamma) - m.alpha) / sg - 3.0) / 2.0
    };
    ConditionCheck {
        satisfied: (implied_n - f64::from(m.n)).abs() <= CONDITION_TOL,
        implied_n,
    }
}

/// `(s, μ)` with `α = -4a(s + 1/2 + μ)` and `σ = 4(s - 1/4)(s - 3/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentrifugalParams {
    pub s: f64,
    pub mu: f64,
}

impl CentrifugalParams {
    /// Inverse of [`CentrifugalParams::to_couplings`] on the branch `s ≥ 1/2`.
    pub fn from_couplings(alpha: f64, sigma: f64, a: f64) -> Self {
        let s = 0.5 + 0.5 * (0.25 + sigma).sqrt();
        Self {
            s,
            mu: -alpha / (4.0 * a) - s - 0.5,
        }
    }

    pub fn from_model(m: &QesModel) -> Result<Self, QesError> {
        let measure = derive_measure(m)?;
        if !measure.barrier {
            return Err(QesError::InvalidModel("centrifugal parameters need sigma > 0"));
        }
        Ok(Self::from_couplings(m.alpha, m.sigma, measure.a))
    }

    /// `(α, σ)` for the quartic measure exponent scale `a`.
    pub fn to_couplings(&self, a: f64) -> (f64, f64) {
        let alpha = -4.0 * a * (self.s + 0.5 + self.mu);
        let sigma = 4.0 * (self.s - 0.25) * (self.s - 0.75);
        (alpha, sigma)
    }
}

/// Exact (or, failing that, float-derived) rational constants of the transformed operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedParams {
    pub sqrt_gamma: Rational,
    /// `β/√γ`, the coefficient of the `x³ d/dx` term.
    pub beta_over_sqrt_gamma: Rational,
    /// `E - Ẽ = β/(2√γ)`; zero with a barrier.
    pub energy_shift: Rational,
    /// `4l`; zero without a barrier.
    pub four_l: Rational,
    /// True when no irrational square root had to be approximated.
    pub exact: bool,
}

pub fn transformed_params(m: &QesModel) -> Result<TransformedParams, QesError> {
    m.validate()?;
    let promote = |v: f64| from_f64(v).ok_or(QesError::InvalidModel("couplings must be finite"));
    let gamma = promote(m.gamma)?;
    let beta = promote(m.beta)?;
    let mut exact = true;
    let sqrt_gamma = match sqrt_exact(&gamma) {
        Some(s) => s,
        None => {
            exact = false;
            promote(m.gamma.sqrt())?
        }
    };
    let four_l = if m.has_barrier() {
        let arg = rat(1, 4) + promote(m.sigma)?;
        let root = match sqrt_exact(&arg) {
            Some(r) => r,
            None => {
                exact = false;
                promote((0.25 + m.sigma).sqrt())?
            }
        };
        Rational::one() + int(2) * root
    } else {
        Rational::zero()
    };
    let beta_over_sqrt_gamma = &beta / &sqrt_gamma;
    let energy_shift = &beta_over_sqrt_gamma / int(2);
    Ok(TransformedParams {
        sqrt_gamma,
        beta_over_sqrt_gamma,
        energy_shift,
        four_l,
        exact,
    })
}

/// Euler form `-x² (H̃ - E)` of the transformed operator, with `Ẽ` as the energy variable.
///
/// `F(D) = D(D - 1 + 4l)`; the raising part is
/// `-2√γ x⁵ d/dx - (β/√γ) x³ d/dx + 2n√γ x⁴ + Ẽ x²`.
pub fn euler_operator(m: &QesModel) -> Result<EulerOperator, QesError> {
    let p = transformed_params(m)?;
    let indicial = Poly::new(vec![Rational::zero(), &p.four_l - int(1), Rational::one()]);
    let two_n_sqrt_gamma = int(2 * i64::from(m.n)) * &p.sqrt_gamma;
    let terms = vec![
        MonomialTerm::new(5, 1, Poly::constant(-int(2) * &p.sqrt_gamma)),
        MonomialTerm::new(3, 1, Poly::constant(-p.beta_over_sqrt_gamma.clone())),
        MonomialTerm::new(4, 0, Poly::constant(two_n_sqrt_gamma)),
        MonomialTerm::new(2, 0, Poly::var()),
    ];
    Ok(EulerOperator::new(indicial, terms)?)
}

/// Real zeros of `p` on the model's domain: the whole line, or `(0, ∞)` with a barrier.
pub fn count_nodes(p: &Poly, barrier: bool) -> Result<usize, PolyError> {
    if barrier {
        let bound = cauchy_bound(p)?;
        sturm_count(p, &Rational::zero(), &bound)
    } else {
        count_real_roots(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub energy: f64,
    /// Exact energy when both the root and the transformed constants are rational.
    pub energy_exact: Option<Rational>,
    /// `Ẽ`, the root of the termination polynomial.
    pub reduced_energy: f64,
    pub polynomial: Poly,
    pub node_count: usize,
}

/// A closed-form energy formula compared against the root-solving path.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormCheck {
    pub label: String,
    pub closed_form: Vec<f64>,
    pub solved: Vec<f64>,
    pub max_abs_diff: f64,
    pub agrees: bool,
}

impl ClosedFormCheck {
    fn new(label: &str, mut closed_form: Vec<f64>, solved: Vec<f64>) -> Self {
        closed_form.sort_by(f64::total_cmp);
        let max_abs_diff = if closed_form.len() == solved.len() {
            closed_form
                .iter()
                .zip(&solved)
                .map(|(c, s)| (c - s).abs())
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        Self {
            label: label.to_string(),
            closed_form,
            solved,
            max_abs_diff,
            agrees: max_abs_diff <= CLOSED_FORM_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSpectrum {
    pub entries: Vec<SpectrumEntry>,
    /// Termination polynomial in `Ẽ`.
    pub termination: Poly,
    pub energy_shift: f64,
    pub exact_arithmetic: bool,
    pub closed_form_checks: Vec<ClosedFormCheck>,
}

impl ExactSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.energy).collect()
    }
}

pub fn solve_exact_spectrum(m: &QesModel) -> Result<ExactSpectrum, QesError> {
    m.validate()?;
    let cond = qes_condition(m);
    if !cond.satisfied {
        return Err(QesError::ConditionViolated {
            implied_n: cond.implied_n,
            n: m.n,
        });
    }
    if m.n % 2 == 1 {
        return Err(QesError::OddSectorUnavailable(m.n));
    }
    let params = transformed_params(m)?;
    let op = euler_operator(m)?;
    let order = m.n as usize / 2 + 1;
    let series = op.generate_series(&Rational::zero(), order)?;
    let termination = series.termination_polynomial(m.n)?;
    let shift = to_f64(&params.energy_shift);

    let mut entries = Vec::new();
    for iv in isolate_real_roots(&termination)? {
        let (reduced, reduced_f) = match exact_root(&termination, &iv) {
            Some(r) => {
                let f = to_f64(&r);
                (Some(r), f)
            }
            None => (None, refine_root(&termination, &iv, 1e-15)?),
        };
        let energy_exact = match (&reduced, params.exact) {
            (Some(r), true) => Some(r + &params.energy_shift),
            _ => None,
        };
        let at = reduced
            .clone()
            .or_else(|| from_f64(reduced_f))
            .expect("finite root");
        let polynomial = series.polynomial_at(&at, m.n as usize)?;
        let node_count = count_nodes(&polynomial, m.has_barrier())?;
        entries.push(SpectrumEntry {
            energy: reduced_f + shift,
            energy_exact,
            reduced_energy: reduced_f,
            polynomial,
            node_count,
        });
    }

    let closed_form_checks = closed_form_checks(m, &entries);
    Ok(ExactSpectrum {
        entries,
        termination,
        energy_shift: shift,
        exact_arithmetic: params.exact,
        closed_form_checks,
    })
}

fn closed_form_checks(m: &QesModel, entries: &[SpectrumEntry]) -> Vec<ClosedFormCheck> {
    if m.n != 2 {
        return Vec::new();
    }
    let solved: Vec<f64> = entries.iter().map(|e| e.energy).collect();
    let sg = m.gamma.sqrt();
    if m.has_barrier() {
        let a = sg;
        let s = CentrifugalParams::from_couplings(m.alpha, m.sigma, a).s;
        let e = (32.0 * a * s).sqrt();
        vec![ClosedFormCheck::new("barrier n=2: E = ±sqrt(32 a s)", vec![-e, e], solved)]
    } else {
        let centre = 3.0 * m.beta / (2.0 * sg);
        let half = (m.beta * m.beta / m.gamma + 8.0 * sg).sqrt();
        vec![ClosedFormCheck::new(
            "n=2: E = 3β/(2√γ) ± sqrt(β²/γ + 8√γ)",
            vec![centre - half, centre + half],
            solved,
        )]
    }
}

/// `ψ(x) = |x|^{2l} exp(-(q₂ x² + q₄ x⁴)) P(x)` for one exact eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub measure: Measure,
    pub energy: f64,
    pub polynomial: Poly,
    coeffs: Vec<f64>,
}

impl Wavefunction {
    pub fn eval(&self, x: f64) -> f64 {
        let p = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        self.measure.eval(x) * p
    }

    /// `∫ ψ²` over the model's domain, to relative accuracy 1e-10 or better.
    pub fn norm_squared(&self) -> f64 {
        let half = quad::integrate_half_line(|x| self.eval(x).powi(2), 1e-12);
        if self.measure.barrier {
            half
        } else {
            half + quad::integrate_half_line(|x| self.eval(-x).powi(2), 1e-12)
        }
    }

    pub fn node_count(&self) -> usize {
        count_nodes(&self.polynomial, self.measure.barrier).unwrap_or(0)
    }
}

pub fn assemble_wavefunction(m: &QesModel, entry: &SpectrumEntry) -> Result<Wavefunction, QesError> {
    Ok(Wavefunction {
        measure: derive_measure(m)?,
        energy: entry.energy,
        polynomial: entry.polynomial.clone(),
        coeffs: entry.polynomial.to_f64_coeffs(),
    })
}

/// Exact residual `(H̃ - E)u` for a polynomial `u`, as a polynomial in `x`.
///
/// `H̃ - E = -x⁻² L(Ẽ)` with `L` the Euler form, so the result is exact
/// whenever `L u` is divisible by `x²`, which holds for every `u` in the
/// even or odd sector.
pub fn transformed_residual(m: &QesModel, u: &Poly, energy: &Rational) -> Result<Poly, QesError> {
    let params = transformed_params(m)?;
    let op = euler_operator(m)?;
    let reduced = energy - &params.energy_shift;
    let lu = op.apply(u, &reduced);
    lu.divide_by_var_power(2)
        .map(|p| -p)
        .ok_or(QesError::InvalidModel("residual is not divisible by x^2"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn polys(entries: &[SpectrumEntry]) -> Vec<Poly> {
        entries.iter().map(|e| e.polynomial.clone()).collect()
    }

    #[test]
    fn measure_examples() {
        let m = derive_measure(&QesModel::double_well()).unwrap();
        assert_eq!((m.a, m.b, m.l, m.barrier), (0.0, 0.25, 0.0, false));
        let m = derive_measure(&QesModel::new(0.0, 4.0, 4.0, 0.0, 0).unwrap()).unwrap();
        assert_eq!((m.a, m.b), (0.5, 0.5));
        let bad = QesModel {
            beta: 1.0,
            sigma: 2.0,
            ..QesModel::double_well()
        };
        assert_eq!(derive_measure(&bad), Err(QesError::UnsupportedModel));
        let barrier = derive_measure(&QesModel::new(-11.0, 0.0, 1.0, 2.0, 2).unwrap()).unwrap();
        assert_eq!((barrier.a, barrier.b, barrier.l), (1.0, 0.25, 1.0));
    }

    #[test]
    fn condition_examples() {
        let c = qes_condition(&QesModel::double_well());
        assert!(c.satisfied);
        assert_eq!(c.implied_n, 4.0);
        let c = qes_condition(&QesModel::new(-7.0, 0.0, 1.0, 0.0, 2).unwrap());
        assert!(c.satisfied && c.implied_n == 2.0);
        let c = qes_condition(&QesModel::new(0.0, 0.0, 1.0, 0.0, 0).unwrap());
        assert!(!c.satisfied);
        assert_eq!(c.implied_n, -1.5);
        let c = qes_condition(&QesModel::new(-10.0, 0.0, 1.0, 0.0, 4).unwrap());
        assert_eq!(c.implied_n, 3.5);
        let c = qes_condition(&QesModel::new(-11.0, 0.0, 1.0, 2.0, 2).unwrap());
        assert!(c.satisfied, "{c:?}");
    }

    #[test]
    fn double_well_spectrum() {
        let s = solve_exact_spectrum(&QesModel::double_well()).unwrap();
        assert_eq!(s.termination.monic(), Poly::from_i64(&[0, -64, 0, 1]));
        let exact: Vec<Rational> = s.entries.iter().map(|e| e.energy_exact.clone().unwrap()).collect();
        assert_eq!(exact, vec![int(-8), int(0), int(8)]);
        assert_eq!(
            polys(&s.entries),
            vec![
                Poly::from_i64(&[1, 0, 4, 0, 2]),
                Poly::new(vec![int(1), int(0), int(0), int(0), rat(-2, 3)]),
                Poly::from_i64(&[1, 0, -4, 0, 2]),
            ]
        );
        let nodes: Vec<usize> = s.entries.iter().map(|e| e.node_count).collect();
        assert_eq!(nodes, vec![0, 2, 4]);
        assert!(s.exact_arithmetic);
    }

    #[test]
    fn n_two_and_n_zero() {
        let s = solve_exact_spectrum(&QesModel::new(-7.0, 0.0, 1.0, 0.0, 2).unwrap()).unwrap();
        let e = s.energies();
        assert!((e[0] + 8f64.sqrt()).abs() < 1e-14 && (e[1] - 8f64.sqrt()).abs() < 1e-14);
        assert!(s.entries.iter().all(|x| x.energy_exact.is_none()));
        assert!(s.closed_form_checks[0].agrees);
        let s = solve_exact_spectrum(&QesModel::new(-3.0, 0.0, 1.0, 0.0, 0).unwrap()).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0].polynomial, Poly::one());
        assert_eq!(s.entries[0].energy_exact, Some(int(0)));
    }

    #[test]
    fn errors() {
        let m = QesModel::new(-10.0, 0.0, 1.0, 0.0, 4).unwrap();
        assert!(matches!(
            solve_exact_spectrum(&m),
            Err(QesError::ConditionViolated { implied_n, n: 4 }) if implied_n == 3.5
        ));
        let odd = QesModel::sextic(0.0, 1.0, 3).unwrap();
        assert_eq!(solve_exact_spectrum(&odd), Err(QesError::OddSectorUnavailable(3)));
        assert!(QesModel::new(0.0, 0.0, 0.0, 0.0, 0).is_err());
        assert!(QesModel::new(0.0, 0.0, 1.0, -1.0, 0).is_err());
    }

    #[test]
    fn shifted_model_closed_form() {
        let m = QesModel::sextic(2.0, 4.0, 2).unwrap();
        let s = solve_exact_spectrum(&m).unwrap();
        let c = &s.closed_form_checks[0];
        assert!(c.agrees, "{c:?}");
        assert_eq!(s.energy_shift, 0.5);
    }

    #[test]
    fn shift_covariance() {
        // Solving in Ẽ and shifting equals solving with E itself as the variable.
        let m = QesModel::sextic(3.0, 4.0, 4).unwrap();
        let s = solve_exact_spectrum(&m).unwrap();
        let p = transformed_params(&m).unwrap();
        let in_e = s.termination.clone();
        // substitute Ẽ = E - shift
        let sub = Poly::new(vec![-p.energy_shift.clone(), Rational::one()]);
        let composed = in_e
            .coeffs()
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &sub) + &Poly::constant(c.clone()));
        let direct: Vec<f64> = isolate_real_roots(&composed)
            .unwrap()
            .iter()
            .map(|iv| refine_root(&composed, iv, 1e-15).unwrap())
            .collect();
        for (a, b) in s.energies().iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn barrier_spectrum_matches_closed_form() {
        let m = QesModel::new(-11.0, 0.0, 1.0, 2.0, 2).unwrap();
        let s = solve_exact_spectrum(&m).unwrap();
        let c = &s.closed_form_checks[0];
        assert!(c.agrees, "{c:?}");
        assert!((s.energies()[1] - 40f64.sqrt()).abs() < 1e-13);
        // P is proportional to a x² - E/4
        for e in &s.entries {
            let p = &e.polynomial;
            let ratio = to_f64(&p.coeff(2)) / to_f64(&p.coeff(0));
            assert!((ratio - 1.0 / (-e.energy / 4.0)).abs() < 1e-12);
        }
        let nodes: Vec<usize> = s.entries.iter().map(|e| e.node_count).collect();
        assert_eq!(nodes, vec![0, 1]);
    }

    #[test]
    fn centrifugal_round_trip() {
        for (s, mu) in [(0.8, 1.0), (1.25, 0.0), (3.5, -2.25), (10.0, 7.5)] {
            let p = CentrifugalParams { s, mu };
            let (alpha, sigma) = p.to_couplings(1.7);
            let back = CentrifugalParams::from_couplings(alpha, sigma, 1.7);
            assert!((back.s - s).abs() < 1e-12 && (back.mu - mu).abs() < 1e-12);
        }
        let p = CentrifugalParams::from_model(&QesModel::new(-11.0, 0.0, 1.0, 2.0, 2).unwrap()).unwrap();
        assert_eq!((p.s, p.mu), (1.25, 1.0));
    }

    #[test]
    fn residual_vanishes_on_eigenpairs() {
        let m = QesModel::double_well();
        let s = solve_exact_spectrum(&m).unwrap();
        for e in &s.entries {
            let r = transformed_residual(&m, &e.polynomial, e.energy_exact.as_ref().unwrap()).unwrap();
            assert!(r.is_zero());
        }
        let r = transformed_residual(&m, &Poly::one(), &int(0)).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn wavefunction_basics() {
        let m = QesModel::double_well();
        let s = solve_exact_spectrum(&m).unwrap();
        let ground = assemble_wavefunction(&m, &s.entries[0]).unwrap();
        assert_eq!(ground.eval(0.0), 1.0);
        assert_eq!(ground.node_count(), 0);
        assert_eq!(assemble_wavefunction(&m, &s.entries[2]).unwrap().node_count(), 4);
        // ∫ (1+4x²+2x⁴)² e^{-x⁴/2} from the closed-form moments
        let mom = |k: f64| 2f64.powf((k + 1.0) / 4.0 - 1.0) * libm_gamma((k + 1.0) / 4.0);
        let expected = mom(0.0) + 8.0 * mom(2.0) + 20.0 * mom(4.0) + 16.0 * mom(6.0) + 4.0 * mom(8.0);
        assert!((ground.norm_squared() - expected).abs() < 1e-10 * expected);
    }

    // Γ at quarter-integer arguments through the recurrence
    fn libm_gamma(z: f64) -> f64 {
        let base = [3.625_609_908_221_908_3, 1.772_453_850_905_516, 1.225_416_702_465_177_6, 1.0];
        let mut x = z;
        let mut acc = 1.0;
        while x > 1.0 + 1e-12 {
            x -= 1.0;
            acc *= x;
        }
        let idx = ((x * 4.0).round() as usize) - 1;
        acc * base[idx]
    }

    fn fd_consistency(m: &QesModel, xs: &[f64]) {
        let s = solve_exact_spectrum(m).unwrap();
        let h = 1e-4;
        for e in &s.entries {
            let psi = assemble_wavefunction(m, e).unwrap();
            let scale = xs.iter().map(|&x| psi.eval(x).abs()).fold(0.0, f64::max);
            for &x in xs {
                let lap = (psi.eval(x + h) - 2.0 * psi.eval(x) + psi.eval(x - h)) / (h * h);
                let hpsi = -lap + m.potential(x) * psi.eval(x);
                let err = (hpsi - e.energy * psi.eval(x)).abs();
                assert!(err <= 1e-5 * scale.max(1.0) * e.energy.abs().max(1.0), "x={x} E={} err={err}", e.energy);
            }
        }
    }

    #[test]
    fn similarity_consistency_by_finite_differences() {
        let xs: Vec<f64> = (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect();
        fd_consistency(&QesModel::double_well(), &xs);
        fd_consistency(&QesModel::sextic(2.0, 4.0, 2).unwrap(), &xs);
        fd_consistency(&QesModel::sextic(-1.0, 1.0, 6).unwrap(), &xs);
        let positive: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
        fd_consistency(&QesModel::new(-11.0, 0.0, 1.0, 2.0, 2).unwrap(), &positive);
    }

    #[test]
    fn irrational_sqrt_gamma_falls_back() {
        let m = QesModel::sextic(0.0, 2.0, 2).unwrap();
        let p = transformed_params(&m).unwrap();
        assert!(!p.exact);
        let s = solve_exact_spectrum(&m).unwrap();
        assert!(s.closed_form_checks[0].agrees, "{:?}", s.closed_form_checks);
    }

    #[test]
    fn float_coefficients_are_dyadic() {
        let m = QesModel::sextic(0.5, 0.25, 2).unwrap();
        let p = transformed_params(&m).unwrap();
        assert!(p.exact);
        assert_eq!(p.sqrt_gamma, rat(1, 2));
        assert_eq!(p.energy_shift, rat(1, 2));
        assert!(p.beta_over_sqrt_gamma.is_positive());
    }
}
