//! Damped Newton polishing on the square stationarity systems.
//!
//! Singular pairs: unknowns `u₁,…,u_d` and one multiplier `μ_i` per mode,
//! equations `⟨T, u₁⊗⋯⊗û_i⊗⋯⊗u_d⟩ − μ_i u_i = 0` and `(u_iᵀu_i − 1)/2 = 0`.
//! Eigenpairs: unknowns `u, λ`, equations `⟨T, u^{d−1}⟩ − λu = 0` and
//! `(uᵀu − 1)/2 = 0`.

use crate::linalg::{dot, norm2, normalize, solve};
use crate::tensor::DenseTensor;

#[derive(Clone, Debug, PartialEq)]
pub struct Polished {
    pub lambda: f64,
    pub vectors: Vec<Vec<f64>>,
    pub residual: f64,
    pub iterations: usize,
}

/// `max_i ‖⟨T, u₁⊗⋯⊗û_i⊗⋯⊗u_d⟩ − λu_i‖`.
pub fn singular_residual(t: &DenseTensor, vectors: &[Vec<f64>], lambda: f64) -> f64 {
    (0..t.order())
        .map(|i| {
            let c = t.contract_slots(i, vectors);
            c.iter()
                .zip(&vectors[i])
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// `‖⟨T, u^{d−1}⟩ − λu‖`.
pub fn eigen_residual(t: &DenseTensor, u: &[f64], lambda: f64) -> f64 {
    let slots = vec![u; t.order()];
    let c = t.contract_slots(0, &slots);
    c.iter()
        .zip(u)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Newton with backtracking. Runs until the residual stops halving once it
/// is small, so linearly convergent tails at multiple roots are followed
/// down to rounding level.
fn newton(
    mut x: Vec<f64>,
    eval: impl Fn(&[f64]) -> (Vec<f64>, Vec<f64>),
    max_iters: usize,
    small: f64,
) -> (Vec<f64>, usize) {
    let n = x.len();
    let (mut f, mut jac) = eval(&x);
    let mut fnorm = norm2(&f);
    let mut iters = 0;
    while iters < max_iters && fnorm > 0.0 {
        iters += 1;
        let mut step: Vec<f64> = f.iter().map(|v| -v).collect();
        let mut a = jac.clone();
        if solve(&mut a, &mut step, n).is_none() {
            // Levenberg–Marquardt fallback on a singular Jacobian
            let scale = jac.iter().map(|v| v * v).sum::<f64>().max(1.0);
            let mut jtj = vec![0.0; n * n];
            let mut rhs = vec![0.0; n];
            for r in 0..n {
                for c in 0..n {
                    jtj[r * n + c] = (0..n).map(|k| jac[k * n + r] * jac[k * n + c]).sum();
                }
                jtj[r * n + r] += 1e-10 * scale;
                rhs[r] = -(0..n).map(|k| jac[k * n + r] * f[k]).sum::<f64>();
            }
            if solve(&mut jtj, &mut rhs, n).is_none() {
                break;
            }
            step = rhs;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + alpha * s).collect();
            let (tf, tj) = eval(&trial);
            let tn = norm2(&tf);
            if tn < fnorm {
                accepted = Some((trial, tf, tj, tn));
                break;
            }
            alpha *= 0.5;
        }
        let Some((nx, nf, nj, nn)) = accepted else {
            break;
        };
        let ratio = nn / fnorm;
        x = nx;
        f = nf;
        jac = nj;
        fnorm = nn;
        if fnorm <= small && ratio > 0.5 {
            break;
        }
    }
    (x, iters)
}

/// Polishes an approximate singular tuple. The returned vectors are unit,
/// `lambda` is the Rayleigh value, and `residual` the stationarity residual.
pub fn polish_singular(t: &DenseTensor, init: &[Vec<f64>], max_iters: usize) -> Polished {
    let d = t.order();
    let shape = t.shape().to_vec();
    let offsets: Vec<usize> = shape
        .iter()
        .scan(0, |acc, &n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect();
    let total: usize = shape.iter().sum();
    let dim = total + d;
    let unpack = |x: &[f64]| -> Vec<Vec<f64>> {
        (0..d)
            .map(|i| x[offsets[i]..offsets[i] + shape[i]].to_vec())
            .collect()
    };
    let mut x0: Vec<f64> = Vec::with_capacity(dim);
    let mut start = init.to_vec();
    for v in &mut start {
        normalize(v);
        x0.extend_from_slice(v);
    }
    let lambda0 = t.rayleigh(&start).unwrap_or(0.0);
    x0.extend(std::iter::repeat_n(lambda0, d));

    let eval = |x: &[f64]| {
        let u = unpack(x);
        let mut f = vec![0.0; dim];
        let mut jac = vec![0.0; dim * dim];
        for i in 0..d {
            let mu = x[total + i];
            let c = t.contract_slots(i, &u);
            for a in 0..shape[i] {
                let row = offsets[i] + a;
                f[row] = c[a] - mu * u[i][a];
                jac[row * dim + offsets[i] + a] = -mu;
                jac[row * dim + total + i] = -u[i][a];
            }
            for j in 0..d {
                if j == i {
                    continue;
                }
                let m = t.contract_pair(i, j, &u);
                for a in 0..shape[i] {
                    let row = offsets[i] + a;
                    for b in 0..shape[j] {
                        jac[row * dim + offsets[j] + b] = m[a * shape[j] + b];
                    }
                }
            }
            let row = total + i;
            f[row] = 0.5 * (dot(&u[i], &u[i]) - 1.0);
            for a in 0..shape[i] {
                jac[row * dim + offsets[i] + a] = u[i][a];
            }
        }
        (f, jac)
    };
    let small = 1e-8 * t.hs_norm().max(1.0);
    let (x, iterations) = newton(x0, eval, max_iters, small);
    let mut vectors = unpack(&x);
    for v in &mut vectors {
        normalize(v);
    }
    let lambda = t.rayleigh(&vectors).unwrap_or(0.0);
    let residual = singular_residual(t, &vectors, lambda);
    Polished {
        lambda,
        vectors,
        residual,
        iterations,
    }
}

/// Polishes an approximate eigenvector of a symmetric tensor. The single
/// returned vector is unit and `lambda = ⟨T, u^d⟩`.
pub fn polish_eigen(t: &DenseTensor, init: &[f64], max_iters: usize) -> Polished {
    let d = t.order();
    let n = init.len();
    let dim = n + 1;
    let mut u0 = init.to_vec();
    normalize(&mut u0);
    let lambda0 = t.rayleigh(&vec![u0.as_slice(); d]).unwrap_or(0.0);
    let mut x0 = u0;
    x0.push(lambda0);
    let eval = |x: &[f64]| {
        let u = &x[..n];
        let lambda = x[n];
        let slots = vec![u; d];
        let c = t.contract_slots(0, &slots);
        let h = if d >= 2 {
            t.contract_pair(0, 1, &slots)
        } else {
            vec![0.0; n * n]
        };
        let mut f = vec![0.0; dim];
        let mut jac = vec![0.0; dim * dim];
        for a in 0..n {
            f[a] = c[a] - lambda * u[a];
            for b in 0..n {
                jac[a * dim + b] = (d as f64 - 1.0) * h[a * n + b];
            }
            jac[a * dim + a] -= lambda;
            jac[a * dim + n] = -u[a];
            jac[n * dim + a] = u[a];
        }
        f[n] = 0.5 * (dot(u, u) - 1.0);
        (f, jac)
    };
    let small = 1e-8 * t.hs_norm().max(1.0);
    let (x, iterations) = newton(x0, eval, max_iters, small);
    let mut u = x[..n].to_vec();
    normalize(&mut u);
    let lambda = t.rayleigh(&vec![u.as_slice(); d]).unwrap_or(0.0);
    let residual = eigen_residual(t, &u, lambda);
    Polished {
        lambda,
        vectors: vec![u],
        residual,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_polish_of_a_matrix() {
        let t = DenseTensor::new(vec![2, 2], vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let p = polish_singular(&t, &[vec![1.0, 0.1], vec![0.9, -0.05]], 50);
        assert!((p.lambda - 2.0).abs() < 1e-14);
        assert!(p.residual < 1e-14);
        assert!((p.vectors[0][0].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_polish_on_diagonal_cubic() {
        let t = DenseTensor::new(vec![2, 2, 2], vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let p = polish_eigen(&t, &[0.7, 0.6], 50);
        let s = 0.5f64.sqrt();
        assert!((p.lambda - s).abs() < 1e-13);
        assert!(p.residual < 1e-14);
        let q = polish_eigen(&t, &[0.99, 0.05], 50);
        assert!((q.lambda - 1.0).abs() < 1e-13);
    }

    #[test]
    fn residual_hand_value() {
        let t = DenseTensor::new(vec![2, 2, 2], vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let s = 0.5f64.sqrt();
        let u = vec![vec![s, s]; 3];
        assert!(singular_residual(&t, &u, s) < 1e-15);
        assert!((singular_residual(&t, &u, 1.0) - (1.0 - s)).abs() < 1e-15);
    }
}
