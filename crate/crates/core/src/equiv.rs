//! Sign equivalence of stationary pairs and their canonical representatives.
//!
//! Singular pairs: flipping the signs of any subset of the vectors and
//! multiplying λ by the product of those signs leaves `λ·u₁⊗⋯⊗u_d` unchanged,
//! so all such sign patterns form one class. Eigenpairs: `(λ, u)` and
//! `((−1)^{d−2}λ, −u)` are equivalent.

use crate::linalg::dist2;

/// Entries at most this large are skipped when locating the first
/// significant entry of a vector.
const SIGNIFICANT: f64 = 1e-8;

fn first_significant_sign(v: &[f64]) -> f64 {
    v.iter()
        .find(|x| x.abs() > SIGNIFICANT)
        .map_or(1.0, |x| x.signum())
}

fn flip(v: &mut [f64]) {
    v.iter_mut().for_each(|x| *x = -*x);
}

/// Canonical singular-pair representative: every vector but the last has its
/// first significant entry positive, and the last is flipped so that λ ≥ 0.
pub fn canonical_singular(lambda: f64, vectors: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>) {
    let mut lambda = lambda;
    let mut vectors = vectors.to_vec();
    let d = vectors.len();
    for v in vectors.iter_mut().take(d.saturating_sub(1)) {
        if first_significant_sign(v) < 0.0 {
            flip(v);
            lambda = -lambda;
        }
    }
    if let Some(last) = vectors.last_mut() {
        let negate = if lambda.abs() > SIGNIFICANT {
            lambda < 0.0
        } else {
            first_significant_sign(last) < 0.0
        };
        if negate {
            flip(last);
            lambda = -lambda;
        }
    }
    // avoid reporting -0
    (lambda + 0.0, vectors)
}

/// Canonical eigenpair representative: for odd order λ ≥ 0 when λ is
/// significant; otherwise the first significant entry of `u` is positive.
pub fn canonical_eigen(lambda: f64, u: &[f64], order: usize) -> (f64, Vec<f64>) {
    let odd = order % 2 == 1;
    let negate = if odd && lambda.abs() > SIGNIFICANT {
        lambda < 0.0
    } else {
        first_significant_sign(u) < 0.0
    };
    let mut u = u.to_vec();
    let mut lambda = lambda;
    if negate {
        flip(&mut u);
        if odd {
            lambda = -lambda;
        }
    }
    (lambda + 0.0, u)
}

/// Whether two singular pairs agree up to some sign pattern, within `tol`
/// in λ and in every vector.
pub fn same_singular_class(l1: f64, u: &[Vec<f64>], l2: f64, v: &[Vec<f64>], tol: f64) -> bool {
    let d = u.len();
    if d != v.len() || d >= 32 {
        return false;
    }
    (0u32..1 << d).any(|mask| {
        let mut lambda = l2;
        for i in 0..d {
            let s = if mask & (1 << i) != 0 { -1.0 } else { 1.0 };
            let close = u[i]
                .iter()
                .zip(&v[i])
                .map(|(a, b)| (a - s * b).powi(2))
                .sum::<f64>()
                .sqrt()
                <= tol;
            if !close {
                return false;
            }
            lambda *= s;
        }
        (l1 - lambda).abs() <= tol
    })
}

/// Whether two eigenpairs of an order-`order` tensor are equivalent within `tol`.
pub fn same_eigen_class(l1: f64, u: &[f64], l2: f64, v: &[f64], order: usize, tol: f64) -> bool {
    if dist2(u, v) <= tol && (l1 - l2).abs() <= tol {
        return true;
    }
    let flipped_lambda = if order % 2 == 1 { -l2 } else { l2 };
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    dist2(u, &neg) <= tol && (l1 - flipped_lambda).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_singular_absorbs_signs() {
        let (l, v) = canonical_singular(2.0, &[vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.6, -0.8]]);
        assert_eq!(l, 2.0);
        assert_eq!(v, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-0.6, 0.8]]);
        let (l, v) = canonical_singular(-3.0, &[vec![1.0], vec![1.0]]);
        assert_eq!((l, v), (3.0, vec![vec![1.0], vec![-1.0]]));
    }

    #[test]
    fn every_sign_pattern_is_one_class() {
        let u = vec![vec![0.6, 0.8], vec![1.0, 0.0], vec![0.0, -1.0], vec![0.8, -0.6]];
        let c0 = canonical_singular(1.5, &u);
        for mask in 0u32..16 {
            let mut lambda = 1.5;
            let v: Vec<Vec<f64>> = u
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let s = if mask & (1 << i) != 0 { -1.0 } else { 1.0 };
                    lambda *= s;
                    x.iter().map(|y| s * y).collect()
                })
                .collect();
            assert!(same_singular_class(1.5, &u, lambda, &v, 1e-12));
            assert_eq!(canonical_singular(lambda, &v), c0);
        }
        assert!(!same_singular_class(1.5, &u, -1.5, &u, 1e-6));
    }

    #[test]
    fn eigen_equivalence_by_parity() {
        let u = [0.6, 0.8];
        let neg = [-0.6, -0.8];
        assert!(same_eigen_class(1.0, &u, -1.0, &neg, 3, 1e-12));
        assert!(!same_eigen_class(1.0, &u, 1.0, &neg, 3, 1e-12));
        assert!(same_eigen_class(1.0, &u, 1.0, &neg, 4, 1e-12));
        assert_eq!(canonical_eigen(-1.0, &neg, 3), (1.0, u.to_vec()));
        assert_eq!(canonical_eigen(2.0, &neg, 4), (2.0, u.to_vec()));
        assert_eq!(canonical_eigen(0.0, &[0.0, -1.0], 3), (0.0, vec![0.0, 1.0]));
    }
}
