//! Euler-form operators `F(D) + P(x, d/dx)` and their graded series solutions.
//!
//! `D = x d/dx` acts diagonally on monomials, `D x^m = m x^m`, so an operator
//! whose remaining part `P` strictly raises the degree of every monomial can
//! be inverted order by order. Starting from an indicial root `λ` with
//! `F(λ) = 0`, the coefficient of `x^(λ + step·k)` is
//!
//! ```text
//! c_k = -( Σ_terms coef(E) · w(λ + step·j) · c_j ) / F(λ + step·k)
//! ```
//!
//! where the sum runs over the terms that map `x^(λ + step·j)` onto
//! `x^(λ + step·k)` and `w` is the falling factorial produced by the
//! derivative part of the term. The coefficients are exact polynomials in the
//! energy parameter.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::{int, sqrt_exact, Poly, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("indicial polynomial must be nonzero")]
    ZeroIndicial,
    #[error("term x^{x_power} (d/dx)^{d_power} does not raise the degree")]
    NonRaisingTerm { x_power: u32, d_power: u32 },
    #[error("indicial polynomial {0} has roots outside the rationals")]
    IrrationalIndicialRoot(String),
    #[error("{0} is not a root of the indicial polynomial")]
    NotIndicialRoot(Rational),
    #[error("resonance at order {0}: F vanishes on the exponent of that order")]
    Resonance(usize),
    #[error("series order {available} is too low, need at least {needed}")]
    OrderTooLow { needed: usize, available: usize },
    #[error("degree {0} is not on the exponent lattice of this series")]
    DegreeNotInSector(i64),
    #[error("series exponents are not nonnegative integers, so it has no polynomial form")]
    NotPolynomial,
}

/// One monomial `coefficient(E) · x^x_power · (d/dx)^d_power` of `P(x, d/dx)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialTerm {
    pub x_power: u32,
    pub d_power: u32,
    pub coefficient: Poly,
}

impl MonomialTerm {
    pub fn new(x_power: u32, d_power: u32, coefficient: Poly) -> Self {
        Self {
            x_power,
            d_power,
            coefficient,
        }
    }

    /// Net change of degree when applied to a monomial.
    pub fn shift(&self) -> i64 {
        i64::from(self.x_power) - i64::from(self.d_power)
    }

    /// `m (m-1) ... (m - d_power + 1)`, the factor produced on `x^m`.
    pub fn weight(&self, m: &Rational) -> Rational {
        (0..self.d_power).fold(Rational::one(), |acc, i| acc * (m - int(i64::from(i))))
    }
}

/// `F(D) + P(x, d/dx)` with `F` stored as a polynomial in `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerOperator {
    indicial: Poly,
    terms: Vec<MonomialTerm>,
}

impl EulerOperator {
    pub fn new(indicial: Poly, terms: Vec<MonomialTerm>) -> Result<Self, EngineError> {
        if indicial.is_zero() {
            return Err(EngineError::ZeroIndicial);
        }
        if let Some(t) = terms.iter().find(|t| t.shift() <= 0) {
            return Err(EngineError::NonRaisingTerm {
                x_power: t.x_power,
                d_power: t.d_power,
            });
        }
        let terms = terms
            .into_iter()
            .filter(|t| !t.coefficient.is_zero())
            .collect();
        Ok(Self { indicial, terms })
    }

    pub fn indicial(&self) -> &Poly {
        &self.indicial
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    /// Grading step: gcd of the degree shifts of all terms (1 if there are none).
    pub fn step(&self) -> usize {
        let g = self
            .terms
            .iter()
            .fold(0i64, |g, t| g.gcd(&t.shift()))
            .max(1);
        g as usize
    }

    /// Distinct rational roots of `F`, ascending.
    pub fn indicial_roots(&self) -> Result<Vec<Rational>, EngineError> {
        rational_roots(&self.indicial)
    }

    /// Formal series solution started at `x^lambda`, through `order` steps.
    pub fn generate_series(&self, lambda: &Rational, order: usize) -> Result<XSeries, EngineError> {
        if !self.indicial.eval(lambda).is_zero() {
            return Err(EngineError::NotIndicialRoot(lambda.clone()));
        }
        let step = self.step();
        let step_r = int(step as i64);
        let mut coeffs = vec![Poly::one()];
        for k in 1..=order {
            let exponent = lambda + &step_r * int(k as i64);
            let f = self.indicial.eval(&exponent);
            if f.is_zero() {
                return Err(EngineError::Resonance(k));
            }
            let mut acc = Poly::zero();
            for t in &self.terms {
                let shift = t.shift() as usize;
                if shift % step != 0 || shift / step > k {
                    continue;
                }
                let j = k - shift / step;
                let w = t.weight(&(lambda + &step_r * int(j as i64)));
                if w.is_zero() {
                    continue;
                }
                acc = &acc + &(&t.coefficient * &coeffs[j]).scale(&w);
            }
            coeffs.push(acc.scale(&(-f.recip())));
        }
        Ok(XSeries {
            indicial_root: lambda.clone(),
            coeffs,
            step,
        })
    }

    /// Apply the operator to a polynomial in `x` whose coefficients are
    /// themselves polynomials in the energy (`u[m]` multiplies `x^m`).
    pub fn apply_symbolic(&self, u: &[Poly]) -> Vec<Poly> {
        let max_shift = self.terms.iter().map(|t| t.shift() as usize).max().unwrap_or(0);
        let mut out = vec![Poly::zero(); u.len() + max_shift];
        for (m, um) in u.iter().enumerate() {
            if um.is_zero() {
                continue;
            }
            let mr = int(m as i64);
            out[m] = &out[m] + &um.scale(&self.indicial.eval(&mr));
            for t in &self.terms {
                let w = t.weight(&mr);
                if w.is_zero() {
                    continue;
                }
                let target = m + t.shift() as usize;
                out[target] = &out[target] + &(&t.coefficient * um).scale(&w);
            }
        }
        while out.last().is_some_and(Poly::is_zero) {
            out.pop();
        }
        out
    }

    /// Apply the operator, with the energy fixed to `energy`, to a polynomial in `x`.
    pub fn apply(&self, u: &Poly, energy: &Rational) -> Poly {
        let mut out = vec![Rational::zero(); u.coeffs().len() + self.max_shift()];
        let term_coeffs: Vec<Rational> = self.terms.iter().map(|t| t.coefficient.eval(energy)).collect();
        for (m, um) in u.coeffs().iter().enumerate() {
            if um.is_zero() {
                continue;
            }
            let mr = int(m as i64);
            out[m] += um * self.indicial.eval(&mr);
            for (t, c) in self.terms.iter().zip(&term_coeffs) {
                let w = t.weight(&mr);
                if !w.is_zero() {
                    out[m + t.shift() as usize] += um * c * w;
                }
            }
        }
        Poly::new(out)
    }

    fn max_shift(&self) -> usize {
        self.terms.iter().map(|t| t.shift() as usize).max().unwrap_or(0)
    }
}

/// Truncated series `Σ_k c_k(E) x^(λ + step·k)` with `c_0 = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XSeries {
    indicial_root: Rational,
    coeffs: Vec<Poly>,
    step: usize,
}

impl XSeries {
    pub fn indicial_root(&self) -> &Rational {
        &self.indicial_root
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exponent of `x` carried by coefficient `k`.
    pub fn exponent(&self, k: usize) -> Rational {
        &self.indicial_root + int((self.step * k) as i64)
    }

    /// Index `k` whose exponent equals `degree`, if it lies on the lattice.
    pub fn index_of_degree(&self, degree: i64) -> Result<usize, EngineError> {
        let offset = int(degree) - &self.indicial_root;
        if !offset.is_integer() || offset.is_negative() {
            return Err(EngineError::DegreeNotInSector(degree));
        }
        let offset = offset.to_integer().to_usize().ok_or(EngineError::DegreeNotInSector(degree))?;
        if offset % self.step != 0 {
            return Err(EngineError::DegreeNotInSector(degree));
        }
        Ok(offset / self.step)
    }

    /// Energy polynomial multiplying `x^(n+2)`, the first power past degree `n`.
    /// Its roots are the energies at which the series terminates at degree `n`.
    pub fn termination_polynomial(&self, n: u32) -> Result<Poly, EngineError> {
        let k = self.index_of_degree(i64::from(n) + 2)?;
        self.coeffs
            .get(k)
            .cloned()
            .ok_or(EngineError::OrderTooLow {
                needed: k,
                available: self.truncation_order(),
            })
    }

    fn integer_offset(&self) -> Result<usize, EngineError> {
        if !self.indicial_root.is_integer() || self.indicial_root.is_negative() {
            return Err(EngineError::NotPolynomial);
        }
        self.indicial_root
            .to_integer()
            .to_usize()
            .ok_or(EngineError::NotPolynomial)
    }

    /// The series as a polynomial in `x` with energy-polynomial coefficients
    /// (`out[m]` multiplies `x^m`), keeping terms up to x-degree `max_degree`.
    pub fn symbolic_polynomial(&self, max_degree: usize) -> Result<Vec<Poly>, EngineError> {
        let lambda = self.integer_offset()?;
        let mut out = vec![Poly::zero(); max_degree + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            let power = lambda + self.step * k;
            if power > max_degree {
                break;
            }
            out[power] = c.clone();
        }
        while out.last().is_some_and(Poly::is_zero) {
            out.pop();
        }
        Ok(out)
    }

    /// The polynomial in `x` obtained at a fixed energy, up to x-degree `max_degree`.
    pub fn polynomial_at(&self, energy: &Rational, max_degree: usize) -> Result<Poly, EngineError> {
        let sym = self.symbolic_polynomial(max_degree)?;
        Ok(Poly::new(sym.iter().map(|c| c.eval(energy)).collect()))
    }
}

/// Distinct rational roots of `f`, ascending. Quadratics are solved through
/// an exact square root of the discriminant; higher-degree cofactors by the
/// rational root theorem.
pub fn rational_roots(f: &Poly) -> Result<Vec<Rational>, EngineError> {
    if f.is_zero() {
        return Err(EngineError::ZeroIndicial);
    }
    let irrational = || EngineError::IrrationalIndicialRoot(f.display_with("D").to_string());
    let mut roots = Vec::new();
    let zeros = f.coeffs().iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(Rational::zero());
    }
    let mut rest = f.divide_by_var_power(zeros).expect("leading zeros stripped");
    while let Some(deg) = rest.degree() {
        match deg {
            0 => break,
            1 => {
                roots.push(-rest.coeff(0) / rest.coeff(1));
                break;
            }
            2 => {
                let (a, b, c) = (rest.coeff(2), rest.coeff(1), rest.coeff(0));
                let disc = &b * &b - int(4) * &a * &c;
                let s = sqrt_exact(&disc).ok_or_else(irrational)?;
                let two_a = int(2) * &a;
                roots.push((-&b - &s) / &two_a);
                roots.push((-&b + &s) / &two_a);
                break;
            }
            _ => {
                let r = rational_root_candidate(&rest).ok_or_else(irrational)?;
                roots.push(r.clone());
                let (q, _) = rest
                    .div_rem(&Poly::new(vec![-r, Rational::one()]))
                    .expect("nonzero divisor");
                rest = q;
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

fn rational_root_candidate(p: &Poly) -> Option<Rational> {
    use num_bigint::BigInt;
    // clear denominators
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let a0 = ints.first()?.abs();
    let an = ints.last()?.abs();
    if a0.is_zero() {
        return Some(Rational::zero());
    }
    let limit = BigInt::from(1_000_000_000u64);
    if a0 > limit || an > limit {
        return None;
    }
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.to_u64().unwrap_or(0);
        (1..=n)
            .take_while(|d| d * d <= n)
            .filter(|d| n % d == 0)
            .flat_map(|d| [d, n / d])
            .map(BigInt::from)
            .collect()
    };
    let (ps, qs) = (divisors(&a0), divisors(&an));
    for pn in &ps {
        for qd in &qs {
            for sign in [1i64, -1] {
                let r = Rational::new(pn * BigInt::from(sign), qd.clone());
                if p.eval(&r).is_zero() {
                    return Some(r);
                }
            }
        }
    }
    None
}
