//! Real-root counting and isolation with Sturm sequences in exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{from_f64, int, simplest_between, to_f64, Rational};
use super::{Poly, PolyError};

/// An open interval `(lo, hi)` holding exactly one distinct real root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity_hint: u32,
}

impl RootInterval {
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: f64) -> bool {
        to_f64(&self.lo) <= x && x <= to_f64(&self.hi)
    }
}

/// Sturm chain of the square-free part of a polynomial.
///
/// Built on `p / gcd(p, p')` so every distinct root is simple, which lets
/// [`SturmSequence::count_between`] treat endpoints that are themselves roots
/// exactly, without perturbing them.
#[derive(Debug, Clone)]
pub struct SturmSequence {
    chain: Vec<Poly>,
}

impl SturmSequence {
    pub fn new(p: &Poly) -> Result<Self, PolyError> {
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let base = p.square_free();
        let mut chain = vec![base.clone(), base.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2]
                .div_rem(&chain[n - 1])
                .expect("chain entries are nonzero");
            if r.is_zero() {
                break;
            }
            // positive rescaling keeps the signs and the rationals small
            let lead = r.leading().expect("nonzero").abs();
            chain.push(-&r.scale(&lead.recip()));
        }
        Ok(Self { chain })
    }

    pub fn base(&self) -> &Poly {
        &self.chain[0]
    }

    /// Sign variations at `x`, zeros dropped.
    pub fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for q in &self.chain {
            let v = q.eval(x);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in the open interval `(lo, hi)`.
    ///
    /// With zeros dropped, `V(lo)` equals `V(lo+)` when `lo` is a root, and
    /// `V(hi)` equals `V(hi-) - 1` when `hi` is a root.
    pub fn count_between(&self, lo: &Rational, hi: &Rational) -> usize {
        if lo >= hi {
            return 0;
        }
        let hi_is_root = self.chain[0].eval(hi).is_zero();
        let v_lo = self.variations(lo);
        let v_hi = self.variations(hi) + usize::from(hi_is_root);
        v_lo.saturating_sub(v_hi)
    }
}

/// Count distinct real roots of `p` strictly between `lo` and `hi`.
pub fn sturm_count(p: &Poly, lo: &Rational, hi: &Rational) -> Result<usize, PolyError> {
    Ok(SturmSequence::new(p)?.count_between(lo, hi))
}

/// `1 + max |a_i| / |a_n|`; every real root lies strictly inside `(-B, B)`.
pub fn cauchy_bound(p: &Poly) -> Result<Rational, PolyError> {
    let lead = p.leading().ok_or(PolyError::ZeroPolynomial)?.abs();
    let n = p.coeffs().len();
    let max = p.coeffs()[..n - 1]
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(Rational::one() + max / lead)
}

/// Number of distinct real roots of `p`.
pub fn count_real_roots(p: &Poly) -> Result<usize, PolyError> {
    let b = cauchy_bound(p)?;
    sturm_count(p, &-&b, &b)
}

/// Pick a split point inside `(lo, hi)` that is not a root of `p`.
fn split_point(p: &Poly, lo: &Rational, hi: &Rational) -> Rational {
    let width = hi - lo;
    for denom in 2i64.. {
        for numer in 1..denom {
            let x = lo + &width * Rational::new(numer.into(), denom.into());
            if !p.eval(&x).is_zero() {
                return x;
            }
        }
    }
    unreachable!("a nonzero polynomial has finitely many roots")
}

/// Disjoint isolating intervals for all distinct real roots, sorted ascending.
pub fn isolate_real_roots(p: &Poly) -> Result<Vec<RootInterval>, PolyError> {
    let sturm = SturmSequence::new(p)?;
    let b = cauchy_bound(p)?;
    let mut out = Vec::new();
    let mut stack = vec![(-&b, b.clone(), sturm.count_between(&-&b, &b))];
    while let Some((lo, hi, count)) = stack.pop() {
        match count {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = split_point(sturm.base(), &lo, &hi);
                let left = sturm.count_between(&lo, &mid);
                stack.push((mid.clone(), hi, count - left));
                stack.push((lo, mid, left));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out
        .into_iter()
        .map(|(lo, hi)| {
            let multiplicity_hint = multiplicity_in(p, &lo, &hi);
            RootInterval {
                lo,
                hi,
                multiplicity_hint,
            }
        })
        .collect())
}

/// Multiplicity of the single root in `(lo, hi)`, read off the chain of
/// repeated gcds with the derivative.
fn multiplicity_in(p: &Poly, lo: &Rational, hi: &Rational) -> u32 {
    let mut m = 1;
    let mut g = p.gcd(&p.derivative());
    while g.degree().unwrap_or(0) > 0 {
        match SturmSequence::new(&g) {
            Ok(s) if s.count_between(lo, hi) > 0 => m += 1,
            _ => break,
        }
        g = g.gcd(&g.derivative());
    }
    m
}

fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Refine the root isolated by `iv` to an absolute tolerance `tol`.
///
/// Exact rational bisection; a final Newton step in floating point is taken
/// only where `|p'| > 1e-6` and kept only if it stays inside the bracket.
/// Intervals around even-multiplicity roots are refined on the square-free part.
pub fn refine_root(p: &Poly, iv: &RootInterval, tol: f64) -> Result<f64, PolyError> {
    if !(tol > 0.0) || iv.lo >= iv.hi {
        return Err(PolyError::InvalidArgument("need tol > 0 and lo < hi"));
    }
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let no_change = || PolyError::NoSignChange {
        lo: to_f64(&iv.lo),
        hi: to_f64(&iv.hi),
    };
    let mut f = p.clone();
    let (mut s_lo, mut s_hi) = (sign(&f.eval(&iv.lo)), sign(&f.eval(&iv.hi)));
    if s_lo != 0 && s_lo == s_hi {
        f = p.square_free();
        s_lo = sign(&f.eval(&iv.lo));
        s_hi = sign(&f.eval(&iv.hi));
        if s_lo != 0 && s_lo == s_hi {
            return Err(no_change());
        }
    }
    if s_lo == 0 {
        return Ok(to_f64(&iv.lo));
    }
    if s_hi == 0 {
        return Ok(to_f64(&iv.hi));
    }
    let tol_r = from_f64(tol).ok_or(PolyError::InvalidArgument("tolerance not finite"))?;
    let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
    let two = int(2);
    while &hi - &lo > tol_r {
        // snapping to the simplest rational keeps the bisection points short
        let raw_mid = (&lo + &hi) / &two;
        let quarter = (&hi - &lo) / int(4);
        let mid = simplest_between(&(&raw_mid - &quarter), &(&raw_mid + &quarter));
        let s_mid = sign(&f.eval(&mid));
        if s_mid == 0 {
            return Ok(to_f64(&mid));
        }
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (lo_f, hi_f) = (to_f64(&lo), to_f64(&hi));
    let mid = 0.5 * (lo_f + hi_f);
    let df = f.derivative();
    let slope = df.eval_f64(mid);
    if slope.abs() > 1e-6 {
        let polished = mid - f.eval_f64(mid) / slope;
        if polished >= lo_f && polished <= hi_f {
            return Ok(polished);
        }
    }
    Ok(mid)
}

/// The root in `iv` as an exact rational, if it is rational.
///
/// A rational root of the primitive integer form of `p` has a denominator
/// dividing the leading coefficient `Q`, and two such rationals are at least
/// `1/Q²` apart. Bisecting below that width leaves a single candidate: the
/// simplest rational in the bracket. Gives up when `Q` exceeds 64 bits.
pub fn exact_root(p: &Poly, iv: &RootInterval) -> Option<Rational> {
    let f = p.square_free();
    if let Some(r) = [&iv.lo, &iv.hi].into_iter().find(|x| f.eval(x).is_zero()) {
        return Some(r.clone());
    }
    let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
    let s_lo = sign(&f.eval(&lo));
    if s_lo == 0 || s_lo == sign(&f.eval(&hi)) {
        return None;
    }
    let lcm = f
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let lead = (f.leading()? * Rational::from_integer(lcm)).to_integer().abs();
    if lead.bits() > 64 {
        return None;
    }
    let width = Rational::new(BigInt::one(), &lead * &lead * BigInt::from(2));
    while &hi - &lo >= width {
        let mid = (&lo + &hi) / int(2);
        let s_mid = sign(&f.eval(&mid));
        if s_mid == 0 {
            return Some(mid);
        }
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let candidate = simplest_between(&lo, &hi);
    f.eval(&candidate).is_zero().then_some(candidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64(c)
    }

    #[test]
    fn sturm_count_examples() {
        let q3 = p(&[0, -64, 0, 1]);
        assert_eq!(sturm_count(&q3, &int(-100), &int(100)).unwrap(), 3);
        assert_eq!(sturm_count(&p(&[1, 0, 1]), &int(-10), &int(10)).unwrap(), 0);
        assert_eq!(
            sturm_count(&p(&[1, 0, -4, 0, 2]), &int(-10), &int(10)).unwrap(),
            4
        );
        assert_eq!(
            sturm_count(&Poly::zero(), &int(0), &int(1)),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn sturm_count_with_root_endpoints() {
        let q3 = p(&[0, -64, 0, 1]);
        // open intervals exclude the endpoint roots
        assert_eq!(sturm_count(&q3, &int(-8), &int(8)).unwrap(), 1);
        assert_eq!(sturm_count(&q3, &int(0), &int(8)).unwrap(), 0);
        assert_eq!(sturm_count(&q3, &int(-8), &int(9)).unwrap(), 2);
        assert_eq!(sturm_count(&q3, &int(-9), &int(0)).unwrap(), 1);
        // repeated roots count once
        let rep = &(&p(&[-1, 1]) * &p(&[-1, 1])) * &p(&[3, 1]);
        assert_eq!(sturm_count(&rep, &int(-10), &int(10)).unwrap(), 2);
    }

    #[test]
    fn isolation_examples() {
        let ivs = isolate_real_roots(&p(&[0, -64, 0, 1])).unwrap();
        assert_eq!(ivs.len(), 3);
        for (iv, root) in ivs.iter().zip([-8.0, 0.0, 8.0]) {
            assert!(iv.lo < iv.hi);
            assert!(iv.contains(root), "{iv:?} misses {root}");
        }
        assert!(isolate_real_roots(&p(&[1, 0, 1])).unwrap().is_empty());
        // Q2 at beta = 0, gamma = 1, n = 2: E^2 - 8
        let ivs = isolate_real_roots(&p(&[-8, 0, 1])).unwrap();
        assert_eq!(ivs.len(), 2);
        assert!(ivs[0].contains(-8f64.sqrt()) && ivs[1].contains(8f64.sqrt()));
        assert_eq!(isolate_real_roots(&Poly::zero()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn multiplicity_hints() {
        let a = p(&[-1, 1]);
        let b = p(&[2, 1]);
        let poly = &(&(&a * &a) * &a) * &b;
        let ivs = isolate_real_roots(&poly).unwrap();
        assert_eq!(ivs.len(), 2);
        assert_eq!(ivs[0].multiplicity_hint, 1);
        assert_eq!(ivs[1].multiplicity_hint, 3);
    }

    #[test]
    fn refine_examples() {
        let q3 = p(&[0, -64, 0, 1]);
        let ivs = isolate_real_roots(&q3).unwrap();
        let r = refine_root(&q3, &ivs[2], 1e-12).unwrap();
        assert!((r - 8.0).abs() <= 1e-12);
        let e = Poly::var();
        let iv = RootInterval { lo: int(-1), hi: int(1), multiplicity_hint: 1 };
        assert_eq!(refine_root(&e, &iv, 1e-12).unwrap(), 0.0);
        let sq12 = p(&[-12, 0, 1]);
        let iv = isolate_real_roots(&sq12).unwrap().pop().unwrap();
        let r = refine_root(&sq12, &iv, 1e-12).unwrap();
        assert!((r - 12f64.sqrt()).abs() <= 1e-12);
        assert!(iv.contains(r));
    }

    #[test]
    fn refine_double_root_uses_square_free_part() {
        let dbl = &p(&[-3, 1]) * &p(&[-3, 1]);
        let iv = RootInterval { lo: int(2), hi: int(5), multiplicity_hint: 2 };
        assert!((refine_root(&dbl, &iv, 1e-12).unwrap() - 3.0).abs() < 1e-12);
        let no_root = RootInterval { lo: int(4), hi: int(5), multiplicity_hint: 1 };
        assert!(matches!(
            refine_root(&dbl, &no_root, 1e-12),
            Err(PolyError::NoSignChange { .. })
        ));
    }

    #[test]
    fn exact_rational_recovery() {
        let q3 = p(&[0, -64, 0, 1]);
        let roots: Vec<_> = isolate_real_roots(&q3)
            .unwrap()
            .iter()
            .map(|iv| exact_root(&q3, iv))
            .collect();
        assert_eq!(roots, vec![Some(int(-8)), Some(int(0)), Some(int(8))]);
        let cubic = &p(&[-2, 3]) * &p(&[-8, 0, 1]);
        let ivs = isolate_real_roots(&cubic).unwrap();
        let got: Vec<_> = ivs.iter().map(|iv| exact_root(&cubic, iv)).collect();
        assert_eq!(got, vec![None, Some(rat(2, 3)), None]);
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(-12i64..=12, 1..=8)
            .prop_map(|c| Poly::from_i64(&c))
            .prop_filter("nonzero", |p| !p.is_zero())
    }

    proptest! {
        #[test]
        fn count_matches_isolation(q in arb_poly()) {
            let b = cauchy_bound(&q).unwrap();
            let n = sturm_count(&q, &-&b, &b).unwrap();
            let ivs = isolate_real_roots(&q).unwrap();
            prop_assert_eq!(n, ivs.len());
            for w in ivs.windows(2) {
                prop_assert!(w[0].hi <= w[1].lo);
            }
        }

        #[test]
        fn refined_roots_have_small_backward_error(q in arb_poly()) {
            let tol = 1e-12;
            for iv in isolate_real_roots(&q).unwrap() {
                let r = refine_root(&q, &iv, tol).unwrap();
                prop_assert!(iv.contains(r));
                if iv.multiplicity_hint == 1 {
                    let resid = q.eval_f64(r).abs();
                    let slope = q.derivative().eval_f64(r).abs();
                    // floating evaluation of p(r) itself carries rounding of order eps * sum |a_i r^i|
                    let rounding: f64 = q.coeffs().iter().enumerate()
                        .map(|(i, c)| (to_f64(c) * r.powi(i as i32)).abs()).sum::<f64>() * 1e-15;
                    prop_assert!(resid <= slope * tol * 4.0 + rounding,
                        "p({r}) = {resid}, p' = {slope}");
                }
            }
        }
    }
}
