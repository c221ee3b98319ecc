//! Univariate polynomials with coefficients in ascending degree, plus exact
//! real-root isolation over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{format_rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UniPoly<S> {
    /// Builds a polynomial from ascending coefficients, trimming zero leading
    /// terms.
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// Ascending coefficients; empty for the zero polynomial.
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_ratio(k as i64, 1))
                .collect(),
        )
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// `p(c·x)`.
    pub fn compose_scale(&self, c: &S) -> Self {
        let mut power = S::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.clone() * power.clone());
            power = power * c.clone();
        }
        Self::new(out)
    }

    /// Polynomial division over a field: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
                }
            }
            // exact cancellation of the leading term, including for floats
            rem[k + dd] = S::zero();
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = S::one() / self.leading();
        self.scale(&inv)
    }

    /// Monic greatest common divisor (Euclid over a field).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }
}

impl<S: Scalar> Zero for UniPoly<S> {
    fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<S: Scalar> One for UniPoly<S> {
    fn one() -> Self {
        Self::constant(S::one())
    }
}

impl<S: Scalar> Add for UniPoly<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<S: Scalar> Sub for UniPoly<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<S: Scalar> Neg for UniPoly<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<S: Scalar> Mul for UniPoly<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl UniPoly<BigRational> {
    pub fn to_f64(&self) -> UniPoly<f64> {
        UniPoly::new(self.coeffs.iter().map(|c| c.to_f64()).collect())
    }

    /// Coefficients as `p` / `p/q` strings, ascending.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    /// Distinct real roots, each located to within `eps` by Sturm-sequence
    /// bisection on the square-free part. Exact multiple roots count once.
    pub fn real_roots(&self, eps: f64) -> Vec<f64> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let g = self.gcd(&self.derivative());
        let sqfree = self.div_rem(&g).0;
        let sturm: Vec<Vec<BigInt>> = sturm_sequence(&sqfree).iter().map(integer_coeffs).collect();
        let base = &sturm[0];
        // Cauchy bound, rounded up to a power of two
        let lead = sqfree.leading().abs();
        let cauchy = sqfree
            .coeffs
            .iter()
            .map(|c| (c.abs() / lead.clone()).to_f64())
            .fold(1.0, f64::max)
            + 1.0;
        let top = cauchy.log2().ceil().max(0.0) as u32 + 1;
        // interval width after `level` bisections is 2^(top + 1 − level)
        let max_level = (top as f64 + 1.0 - eps.max(1e-300).log2()).ceil().max(0.0) as u32;
        let mut roots = Vec::new();
        // intervals are half-open (lo, hi]; the flag marks an already recorded root at hi
        let bound = BigInt::one() << top;
        let mut stack = vec![(Dyadic::int(-bound.clone()), Dyadic::int(bound), 0u32, false)];
        while let Some((lo, hi, level, seen)) = stack.pop() {
            let mut count = sign_changes(&sturm, &lo) as i64 - sign_changes(&sturm, &hi) as i64;
            let hi_root = seen || dyadic_sign(base, &hi) == 0;
            if hi_root {
                if !seen {
                    roots.push(hi.to_f64());
                }
                count -= 1;
            }
            match count {
                c if c <= 0 => {}
                1 => roots.push(refine(&sturm, lo, hi, max_level.saturating_sub(level))),
                _ => {
                    let mid = lo.mid(&hi);
                    stack.push((mid.clone(), hi, level + 1, hi_root));
                    stack.push((lo, mid, level + 1, false));
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        roots
    }
}

/// `num / 2^exp`.
#[derive(Clone, Debug)]
struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    fn int(num: BigInt) -> Self {
        Self { num, exp: 0 }
    }

    fn mid(&self, other: &Self) -> Self {
        let e = self.exp.max(other.exp);
        let a = self.num.clone() << (e - self.exp);
        let b = other.num.clone() << (e - other.exp);
        Self { num: a + b, exp: e + 1 }
    }

    fn to_f64(&self) -> f64 {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp).to_f64()
    }
}

/// Coefficients scaled by the common denominator.
fn integer_coeffs(p: &UniPoly<BigRational>) -> Vec<BigInt> {
    let den = p.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    p.coeffs
        .iter()
        .map(|c| c.numer() * (den.clone() / c.denom()))
        .collect()
}

/// Sign of `Σ c_i x^i` at `x = m/2^e`, from `Σ c_i m^i 2^{e(n−1−i)}`.
fn dyadic_sign(c: &[BigInt], x: &Dyadic) -> i8 {
    let n = c.len();
    let mut total = BigInt::zero();
    let mut power = BigInt::one();
    for (i, coeff) in c.iter().enumerate() {
        total += (coeff * &power) << (x.exp as usize * (n - 1 - i));
        power *= &x.num;
    }
    match total.sign() {
        Sign::Plus => 1,
        Sign::Minus => -1,
        Sign::NoSign => 0,
    }
}

/// Bisects `(lo, hi)` holding exactly one simple root, `steps` times. The
/// side is chosen by the sign at a nonzero endpoint, or by Sturm counts when
/// both endpoints are roots themselves.
fn refine(sturm: &[Vec<BigInt>], mut lo: Dyadic, mut hi: Dyadic, steps: u32) -> f64 {
    let base = &sturm[0];
    let hi_sign = dyadic_sign(base, &hi);
    let lo_sign = dyadic_sign(base, &lo);
    for _ in 0..steps {
        let mid = lo.mid(&hi);
        let s = dyadic_sign(base, &mid);
        if s == 0 {
            return mid.to_f64();
        }
        let root_below = if hi_sign != 0 {
            s == hi_sign
        } else if lo_sign != 0 {
            s != lo_sign
        } else {
            sign_changes(sturm, &lo) > sign_changes(sturm, &mid)
        };
        if root_below {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo.mid(&hi).to_f64()
}

fn sturm_sequence(p: &UniPoly<BigRational>) -> Vec<UniPoly<BigRational>> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        // keep coefficients small: positive rescaling preserves signs
        let lead = r.leading().abs();
        seq.push(-(r.scale(&(BigRational::one() / lead))));
    }
    seq
}

/// Sign changes of the Sturm sequence at `x`; counts roots in `(x, ∞)`.
fn sign_changes(seq: &[Vec<BigInt>], x: &Dyadic) -> usize {
    let mut changes = 0;
    let mut last = 0i8;
    for p in seq {
        let s = dyadic_sign(p, x);
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

impl fmt::Display for UniPoly<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            let coeff = format_rational(&a);
            match k {
                0 => write!(f, "{coeff}")?,
                _ if a.is_one() => write!(f, "λ^{k}")?,
                _ => write!(f, "{coeff}·λ^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn q(c: &[i64]) -> UniPoly<BigRational> {
        UniPoly::new(c.iter().map(|&x| ratio(x, 1)).collect())
    }

    #[test]
    fn arithmetic_and_trimming() {
        let p = q(&[1, 2, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(q(&[-1, 0, 1]), q(&[-1, 1]) * q(&[1, 1]));
        assert_eq!((q(&[1, 1]) - q(&[1, 1])).degree(), None);
        assert_eq!(q(&[3, 0, 5]).derivative(), q(&[0, 10]));
        assert_eq!(q(&[1, 1, 1]).compose_scale(&ratio(2, 1)), q(&[1, 2, 4]));
    }

    #[test]
    fn division_and_gcd() {
        let a = q(&[-1, 0, 1]) * q(&[2, 1]);
        let (quot, rem) = a.div_rem(&q(&[2, 1]));
        assert_eq!(quot, q(&[-1, 0, 1]));
        assert!(rem.is_zero());
        let g = (q(&[-1, 1]) * q(&[-1, 1]) * q(&[3, 1])).gcd(&(q(&[-1, 1]) * q(&[5, 1])));
        assert_eq!(g, q(&[-1, 1]));
    }

    #[test]
    fn roots_of_salmon_fixture_polynomial() {
        // (λ+1)²(λ-1)²(2λ²-1)
        let p = q(&[-1, 0, 4, 0, -5, 0, 2]);
        let roots = p.real_roots(1e-14);
        let s = 0.5f64.sqrt();
        let expected = [-1.0, -s, s, 1.0];
        assert_eq!(roots.len(), 4);
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).abs() < 1e-13, "{r} vs {e}");
        }
    }

    #[test]
    fn roots_on_and_between_dyadic_points() {
        let roots = [ratio(0, 1), ratio(1, 2), ratio(1, 3), ratio(1, 1), ratio(-3, 4), ratio(5, 7)];
        let p = roots.iter().fold(UniPoly::constant(ratio(1, 1)), |acc, r| {
            acc * UniPoly::new(vec![-r.clone(), ratio(1, 1)])
        });
        let mut expected: Vec<f64> = roots.iter().map(|r| r.to_f64()).collect();
        expected.sort_by(f64::total_cmp);
        let found = p.real_roots(1e-14);
        assert_eq!(found.len(), expected.len());
        for (r, e) in found.iter().zip(&expected) {
            assert!((r - e).abs() < 1e-13, "{r} vs {e}");
        }
    }

    #[test]
    fn roots_with_no_real_zeros() {
        assert!(q(&[1, 0, 1]).real_roots(1e-12).is_empty());
        assert_eq!(q(&[0, 1]).real_roots(1e-12), vec![0.0]);
    }

    #[test]
    fn display() {
        assert_eq!(q(&[-1, 0, 4, 0, -5, 0, 2]).to_string(), "2·λ^6 - 5·λ^4 + 4·λ^2 - 1");
    }

    proptest::proptest! {
        #[test]
        fn real_roots_match_rational_factors(
            raw in proptest::collection::vec((-40i64..40, 1i64..9), 1..6),
        ) {
            let mut roots: Vec<BigRational> = raw.iter().map(|&(n, d)| ratio(n, d)).collect();
            let p = roots.iter().fold(UniPoly::constant(ratio(1, 1)), |acc, r| {
                acc * UniPoly::new(vec![-r.clone(), ratio(1, 1)])
            });
            roots.sort();
            roots.dedup();
            let found = p.real_roots(1e-13);
            proptest::prop_assert_eq!(found.len(), roots.len());
            for (f, r) in found.iter().zip(&roots) {
                proptest::prop_assert!((f - r.to_f64()).abs() < 1e-12);
            }
        }
    }
}
