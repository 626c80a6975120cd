//! Exact univariate polynomials over the rationals.
//!
//! The same [`Poly`] type carries polynomials in `x` (the polynomial parts of
//! wavefunctions) and polynomials in the energy (series coefficients and
//! termination polynomials); only the interpretation of the variable differs.

mod rational;
mod roots;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use rational::{
    approximate, factorial, from_f64, int, rat, simplest_between, sqrt_exact, to_f64, Rational,
};
pub use roots::{
    cauchy_bound, count_real_roots, exact_root, isolate_real_roots, refine_root, sturm_count,
    RootInterval, SturmSequence,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("interval [{lo}, {hi}] does not bracket a sign change")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("invalid interval or tolerance: {0}")]
    InvalidArgument(&'static str),
}

/// Polynomial with exact rational coefficients, `coeffs[i]` multiplying `var^i`.
///
/// Always canonical: no trailing zero coefficients, so the zero polynomial has
/// an empty coefficient list and [`Poly::degree`] returns `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `var`.
    pub fn var() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, power: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// Polynomial whose coefficients are the exact dyadic values of `coeffs`.
    ///
    /// Panics on non-finite input.
    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| rational::from_f64(c).expect("finite coefficient"))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, power: usize) -> Rational {
        self.coeffs.get(power).cloned().unwrap_or_else(Rational::zero)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiply by `var^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, divisor: &Poly) -> Option<(Poly, Poly)> {
        let dd = divisor.degree()?;
        let lead = divisor.leading()?.clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Some((Poly::new(quot), Poly::new(rem)))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// `self / gcd(self, self')`: same distinct roots, all simple.
    pub fn square_free(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        let (q, _) = self.div_rem(&g).expect("gcd of nonzero polynomial is nonzero");
        q
    }

    /// Exact division by `var^k`; `None` if any of the lowest `k` coefficients is nonzero.
    pub fn divide_by_var_power(&self, k: usize) -> Option<Poly> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero()) {
            return None;
        }
        Some(Poly::new(self.coeffs.iter().skip(k).cloned().collect()))
    }

    /// Render with the given variable name, highest power first.
    pub fn display_with<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        DisplayPoly { poly: self, var }
    }
}

struct DisplayPoly<'a> {
    poly: &'a Poly,
    var: &'a str,
}

impl fmt::Display for DisplayPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.poly.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        if mag.is_integer() {
                            write!(f, "{mag}")?;
                        } else {
                            write!(f, "({mag})")?;
                        }
                    }
                    write!(f, "{}", self.var)?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with("x").fmt(f)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64(c)
    }

    #[test]
    fn arithmetic_examples() {
        let x2m16 = p(&[-16, 0, 1]);
        assert_eq!(&x2m16 * &Poly::one(), x2m16);
        // E (E^2 - 64) = E^3 - 64 E
        assert_eq!(&Poly::var() * &p(&[-64, 0, 1]), p(&[0, -64, 0, 1]));
        let diff = &p(&[1, 0, 4, 0, 2]) - &p(&[1, 0, -4, 0, 2]);
        assert_eq!(diff, p(&[0, 0, 8]));
        assert_eq!(diff.degree(), Some(2));
    }

    #[test]
    fn zero_polynomial_is_canonical() {
        let z = &p(&[1, 2]) - &p(&[1, 2]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert!(z.coeffs().is_empty());
        assert_eq!(Poly::new(vec![int(0), int(0)]), Poly::zero());
    }

    #[test]
    fn derivative_examples() {
        assert!(Poly::one().derivative().is_zero());
        let p40 = Poly::new(vec![int(1), int(0), int(0), int(0), rat(-2, 3)]);
        assert_eq!(
            p40.derivative(),
            Poly::new(vec![int(0), int(0), int(0), rat(-8, 3)])
        );
        // x - E x^3 / 6 at E = 3  ->  1 - E x^2 / 2
        let e = int(3);
        let u = Poly::new(vec![int(0), int(1), int(0), -&e / int(6)]);
        assert_eq!(
            u.derivative(),
            Poly::new(vec![int(1), int(0), -&e / int(2)])
        );
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[0, -64, 0, 1]);
        let (q, r) = a.div_rem(&p(&[-8, 1])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, p(&[0, 8, 1]));
        let sq = &p(&[-1, 1]) * &p(&[-1, 1]);
        let cube = &sq * &p(&[2, 1]);
        assert_eq!(cube.square_free(), p(&[-2, 1, 1]));
        assert_eq!(cube.gcd(&cube.derivative()), p(&[-1, 1]));
        assert!(a.div_rem(&Poly::zero()).is_none());
    }

    #[test]
    fn display() {
        let p4 = Poly::new(vec![int(1), int(0), int(-4), int(0), int(2)]);
        assert_eq!(p4.to_string(), "2x^4 - 4x^2 + 1");
        let p40 = Poly::new(vec![int(1), int(0), int(0), int(0), rat(-2, 3)]);
        assert_eq!(p40.display_with("E").to_string(), "-(2/3)E^4 + 1");
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((-20i64..=20, 1i64..=6), 0..=9).prop_map(|c| {
            Poly::new(c.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    fn canonical(q: &Poly) -> bool {
        q.coeffs().last().is_none_or(|c| !c.is_zero())
            && q.coeffs()
                .iter()
                .all(|c| c.denom().is_positive() && num_integer::Integer::gcd(c.numer(), c.denom()).is_one())
    }

    proptest! {
        #[test]
        fn product_degree_and_leibniz(a in arb_poly(), b in arb_poly()) {
            let prod = &a * &b;
            prop_assert!(canonical(&prod) && canonical(&(&a + &b)) && canonical(&(&a - &b)));
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                prop_assert_eq!(prod.degree(), Some(da + db));
            } else {
                prop_assert!(prod.is_zero());
            }
            let lhs = prod.derivative();
            let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn division_identity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
        }
    }
}
