//! Determinants over commutative rings: fraction-free Bareiss elimination for
//! exact domains and memoized Laplace expansion for anything with `+`, `−`, `×`.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::UniPoly;
use crate::scalar::Scalar;

pub trait Ring:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

/// Integral domain with exact division (the quotient is known to exist).
pub trait ExactDiv: Ring {
    fn exact_div(&self, divisor: &Self) -> Self;
}

impl ExactDiv for BigRational {
    fn exact_div(&self, divisor: &Self) -> Self {
        self / divisor
    }
}

impl ExactDiv for UniPoly<BigRational> {
    fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division in Bareiss");
        q
    }
}

/// Bareiss fraction-free elimination of a row-major `n × n` matrix.
pub fn bareiss<R: ExactDiv>(mut m: Vec<R>, n: usize) -> R {
    assert_eq!(m.len(), n * n);
    if n == 0 {
        return R::one();
    }
    let mut negate = false;
    let mut prev = R::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i * n + k].is_zero()) else {
                return R::zero();
            };
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            negate = !negate;
        }
        let pivot = m[k * n + k].clone();
        for i in k + 1..n {
            let lead = m[i * n + k].clone();
            for j in k + 1..n {
                let v = pivot.clone() * m[i * n + j].clone() - lead.clone() * m[k * n + j].clone();
                m[i * n + j] = v.exact_div(&prev);
            }
            m[i * n + k] = R::zero();
        }
        prev = pivot;
    }
    let d = m[n * n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Division-free cofactor expansion along rows, memoized on the set of used
/// columns. `O(n·2ⁿ)` ring operations; fine for `n ≤ 12`.
pub fn laplace<R: Ring>(m: &[R], n: usize) -> R {
    assert_eq!(m.len(), n * n);
    assert!(n < 32);
    let mut memo: HashMap<u32, R> = HashMap::new();
    laplace_rec(m, n, 0, &mut memo)
}

fn laplace_rec<R: Ring>(m: &[R], n: usize, used: u32, memo: &mut HashMap<u32, R>) -> R {
    let row = used.count_ones() as usize;
    if row == n {
        return R::one();
    }
    if let Some(v) = memo.get(&used) {
        return v.clone();
    }
    let mut acc = R::zero();
    let mut sign_positive = true;
    for col in 0..n {
        if used & (1 << col) != 0 {
            continue;
        }
        let entry = &m[row * n + col];
        if !entry.is_zero() {
            let minor = laplace_rec(m, n, used | (1 << col), memo);
            let term = entry.clone() * minor;
            acc = if sign_positive { acc + term } else { acc - term };
        }
        sign_positive = !sign_positive;
    }
    memo.insert(used, acc.clone());
    acc
}

/// Determinant of a scalar matrix in the natural algorithm for the backend.
pub trait DetBackend: Scalar {
    const NAME: &'static str;
    fn det(m: Vec<Self>, n: usize) -> Self;
    fn poly_det(m: Vec<UniPoly<Self>>, n: usize) -> UniPoly<Self>;
}

impl DetBackend for BigRational {
    const NAME: &'static str = "rational";

    fn det(m: Vec<Self>, n: usize) -> Self {
        bareiss(m, n)
    }

    fn poly_det(m: Vec<UniPoly<Self>>, n: usize) -> UniPoly<Self> {
        bareiss(m, n)
    }
}

impl DetBackend for f64 {
    const NAME: &'static str = "float";

    fn det(m: Vec<Self>, n: usize) -> Self {
        crate::linalg::det(m, n)
    }

    fn poly_det(m: Vec<UniPoly<Self>>, n: usize) -> UniPoly<Self> {
        laplace(&m, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use rand::{Rng, SeedableRng};

    fn q(c: &[i64]) -> UniPoly<BigRational> {
        UniPoly::new(c.iter().map(|&x| ratio(x, 1)).collect())
    }

    #[test]
    fn small_exact_determinants() {
        let m = vec![ratio(0, 1), ratio(1, 1), ratio(1, 1), ratio(0, 1)];
        assert_eq!(bareiss(m.clone(), 2), ratio(-1, 1));
        assert_eq!(laplace(&m, 2), ratio(-1, 1));
        let singular: Vec<_> = [1, 2, 3, 2, 4, 6, 1, 0, 1].iter().map(|&x| ratio(x, 1)).collect();
        assert_eq!(bareiss(singular, 3), ratio(0, 1));
    }

    #[test]
    fn bareiss_matches_laplace_on_random_rationals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..7 {
            let m: Vec<BigRational> = (0..n * n)
                .map(|_| ratio(rng.random_range(-9..10), rng.random_range(1..6)))
                .collect();
            assert_eq!(bareiss(m.clone(), n), laplace(&m, n));
        }
    }

    #[test]
    fn polynomial_determinant() {
        // det [[x, 1], [1, x]] = x² − 1
        let m = vec![q(&[0, 1]), q(&[1]), q(&[1]), q(&[0, 1])];
        assert_eq!(bareiss(m.clone(), 2), q(&[-1, 0, 1]));
        assert_eq!(laplace(&m, 2), q(&[-1, 0, 1]));
        // zero leading pivot forces a row swap
        let m = vec![q(&[0]), q(&[0, 1]), q(&[1, 1]), q(&[2])];
        assert_eq!(bareiss(m, 2), q(&[0, -1, -1]));
    }
}
