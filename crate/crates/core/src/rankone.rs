//! Best rank-one approximation: alternating power iteration (HOPM) with
//! Newton polishing, seeded multistart, the nonnegative reduction and the
//! Perron fixed point for positive tensors.

use rayon::prelude::*;
use serde::Serialize;

use crate::equiv::{canonical_singular, same_singular_class};
use crate::error::{Error, Result};
use crate::linalg::{normalize, sym_eigen};
use crate::newton::{polish_singular, singular_residual};
use crate::rng::{random_units, stream_rng};
use crate::tensor::{DenseTensor, NonnegTensor, PositiveTensor};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: usize = 500;
/// Two pairs belong to the same class when they agree to this tolerance.
pub const CLASS_TOL: f64 = 1e-6;
const NEWTON_ITERS: usize = 40;
const DEGENERATE_RETRIES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularPair {
    pub lambda: f64,
    pub vectors: Vec<Vec<f64>>,
    pub residual: f64,
}

impl SingularPair {
    fn canonical(lambda: f64, vectors: &[Vec<f64>], residual: f64) -> Self {
        let (lambda, vectors) = canonical_singular(lambda, vectors);
        Self {
            lambda,
            vectors,
            residual,
        }
    }

    pub fn same_class(&self, other: &Self, tol: f64) -> bool {
        same_singular_class(self.lambda, &self.vectors, other.lambda, &other.vectors, tol)
    }
}

/// Rank-one approximation `lambda · u₁⊗⋯⊗u_d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxResult {
    pub lambda: f64,
    pub vectors: Vec<Vec<f64>>,
    /// Rayleigh value at the vectors.
    pub value: f64,
    /// `‖T − λ·u₁⊗⋯⊗u_d‖`.
    pub residual: f64,
}

impl ApproxResult {
    fn from_vectors(t: &DenseTensor, vectors: Vec<Vec<f64>>) -> Self {
        let value = t.rayleigh(&vectors).expect("shapes checked");
        let x = DenseTensor::outer(&vectors).expect("valid vectors").scale(&value);
        let residual = t.sub(&x).expect("same shape").hs_norm();
        Self {
            lambda: value,
            vectors,
            value,
            residual,
        }
    }

    pub fn tensor(&self) -> DenseTensor {
        DenseTensor::outer(&self.vectors)
            .expect("valid vectors")
            .scale(&self.lambda)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HopmRun {
    pub pair: SingularPair,
    pub sweeps: usize,
    /// Residual at most `sqrt(tol) · max(1, ‖T‖)`.
    pub converged: bool,
    /// `|rayleigh|` after every sweep.
    pub values: Vec<f64>,
}

fn check_init(t: &DenseTensor, init: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let lens: Vec<usize> = init.iter().map(Vec::len).collect();
    if lens != t.shape() {
        return Err(Error::DimensionMismatch(format!(
            "initial vectors {lens:?} do not match shape {:?}",
            t.shape()
        )));
    }
    let mut out = init.to_vec();
    for v in &mut out {
        if normalize(v) == 0.0 {
            return Err(Error::InvalidArgument("zero initial vector".into()));
        }
    }
    Ok(out)
}

/// Alternating maximization of `|⟨T, u₁⊗⋯⊗u_d⟩|` over unit vectors, followed
/// by Newton polishing of the limit.
pub fn hopm(t: &DenseTensor, init: &[Vec<f64>], tol: f64, max_sweeps: usize) -> Result<HopmRun> {
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let mut u = check_init(t, init)?;
    let d = t.order();
    let mut values = Vec::new();
    let mut value = t.rayleigh(&u)?.abs();
    let mut residual = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let prev = value;
        for i in 0..d {
            let mut c = t.contract_slots(i, &u);
            let n = normalize(&mut c);
            if n == 0.0 || !n.is_finite() {
                return Err(Error::Degenerate(format!("zero contraction in mode {i}")));
            }
            u[i] = c;
            value = n;
        }
        values.push(value);
        residual = singular_residual(t, &u, value);
        if (value - prev).abs() <= tol * value.max(1.0) || residual <= tol {
            break;
        }
    }
    let mut lambda = value;
    let polished = polish_singular(t, &u, NEWTON_ITERS);
    if polished.residual < residual
        && polished.lambda.abs() >= lambda - 1e-10 * lambda.max(1.0)
    {
        u = polished.vectors;
        lambda = polished.lambda;
        residual = polished.residual;
    }
    let converged = residual <= tol.sqrt() * t.hs_norm().max(1.0);
    Ok(HopmRun {
        pair: SingularPair::canonical(lambda, &u, residual),
        sweeps,
        converged,
        values,
    })
}

/// Gram matrix of the mode-`mode` unfolding.
fn unfolding_gram(t: &DenseTensor, mode: usize) -> Vec<f64> {
    let shape = t.shape();
    let n = shape[mode];
    let stride: usize = shape[mode + 1..].iter().product();
    let data = t.data();
    let mut g = vec![0.0; n * n];
    for (flat, &x) in data.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        let a = (flat / stride) % n;
        let base = flat - a * stride;
        for b in 0..n {
            g[a * n + b] += x * data[base + b * stride];
        }
    }
    g
}

/// Dominant left singular vector of every unfolding.
pub fn unfolding_init(t: &DenseTensor) -> Vec<Vec<f64>> {
    (0..t.order())
        .map(|mode| {
            let n = t.shape()[mode];
            let (_, vecs) = sym_eigen(&unfolding_gram(t, mode), n);
            vecs.into_iter().next().unwrap_or_else(|| vec![1.0])
        })
        .collect()
}

fn run_restart(t: &DenseTensor, k: usize, seed: u64, tol: f64) -> (Option<HopmRun>, usize) {
    let mut rng = stream_rng(seed, k as u64);
    let mut degenerate = 0;
    for attempt in 0..=DEGENERATE_RETRIES {
        let init = if k == 0 && attempt == 0 {
            unfolding_init(t)
        } else {
            random_units(&mut rng, t.shape())
        };
        match hopm(t, &init, tol, DEFAULT_MAX_SWEEPS) {
            Ok(run) => return (Some(run), degenerate),
            Err(_) => degenerate += 1,
        }
    }
    (None, degenerate)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestRankOne {
    pub best: ApproxResult,
    /// Distinct classes attaining the optimal value, in order of discovery.
    pub tied: Vec<SingularPair>,
    pub converged_restarts: usize,
    /// Restarts that hit a zero contraction and were redrawn.
    pub degenerate_draws: usize,
}

/// Multistart HOPM. Restart `k` uses the stream `(seed, k)`; restart 0 starts
/// from the dominant singular vectors of the unfoldings. Restarts run in
/// parallel and are merged in index order.
pub fn best_rank_one(t: &DenseTensor, restarts: usize, seed: u64, tol: f64) -> Result<BestRankOne> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    let runs: Vec<(Option<HopmRun>, usize)> = (0..restarts)
        .into_par_iter()
        .map(|k| run_restart(t, k, seed, tol))
        .collect();
    let degenerate_draws = runs.iter().map(|r| r.1).sum();
    let pairs: Vec<SingularPair> = runs
        .into_iter()
        .filter_map(|(run, _)| run.filter(|r| r.converged).map(|r| r.pair))
        .collect();
    if pairs.is_empty() {
        return Err(Error::AllRestartsFailed(restarts));
    }
    let best_value = pairs.iter().map(|p| p.lambda.abs()).fold(0.0, f64::max);
    let tie = tol.max(1e-9) * best_value.max(1.0);
    let mut tied: Vec<SingularPair> = Vec::new();
    for p in pairs.iter().filter(|p| p.lambda.abs() >= best_value - tie) {
        if !tied.iter().any(|q| q.same_class(p, CLASS_TOL)) {
            tied.push(p.clone());
        }
    }
    let leader = pairs
        .iter()
        .find(|p| p.lambda.abs() == best_value)
        .expect("maximum is attained");
    Ok(BestRankOne {
        best: ApproxResult::from_vectors(t, leader.vectors.clone()),
        tied,
        converged_restarts: pairs.len(),
        degenerate_draws,
    })
}

/// Best rank-one approximation with nonnegative factors: entrywise absolute
/// value of the unconstrained optimizer, then re-polishing. For nonnegative
/// `T` the value does not drop.
pub fn nonneg_best_rank_one(t: &NonnegTensor, restarts: usize, seed: u64, tol: f64) -> Result<BestRankOne> {
    let mut out = best_rank_one(t, restarts, seed, tol)?;
    out.best = nonneg_polish(t, &out.best.vectors, tol);
    let mut tied: Vec<SingularPair> = Vec::new();
    for p in &out.tied {
        let r = nonneg_polish(t, &p.vectors, tol);
        let pair = SingularPair {
            lambda: r.lambda,
            residual: singular_residual(t, &r.vectors, r.lambda),
            vectors: r.vectors,
        };
        if !tied.iter().any(|q| q.same_class(&pair, CLASS_TOL)) {
            tied.push(pair);
        }
    }
    out.tied = tied;
    Ok(out)
}

fn nonneg_polish(t: &NonnegTensor, vectors: &[Vec<f64>], tol: f64) -> ApproxResult {
    let abs: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| x.abs()).collect())
        .collect();
    let mut candidate = match hopm(t, &abs, tol, DEFAULT_MAX_SWEEPS) {
        Ok(run) => run.pair.vectors,
        Err(_) => abs.clone(),
    };
    // the canonical sign convention may flip a nonnegative solution wholesale
    for v in &mut candidate {
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v.iter_mut().for_each(|x| *x = x.max(0.0));
        normalize(v);
    }
    let polished = ApproxResult::from_vectors(t, candidate);
    let fallback = ApproxResult::from_vectors(t, abs);
    if polished.value >= fallback.value {
        polished
    } else {
        fallback
    }
}

/// Positive singular pair of a positive tensor: Mann-averaged iteration of
/// the l¹-normalized map `u_i ↦ ⟨T,…û_i…⟩ / ‖⟨T,…û_i…⟩‖₁`, rescaled to unit
/// l² vectors and polished.
pub fn perron_fixed_point(t: &PositiveTensor, tol: f64, max_iters: usize) -> Result<SingularPair> {
    let d = t.order();
    let mut x: Vec<Vec<f64>> = t.shape().iter().map(|&n| vec![1.0 / n as f64; n]).collect();
    let mut iters = 0;
    while iters < max_iters {
        iters += 1;
        let image: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let c = t.contract_slots(i, &x);
                let s: f64 = c.iter().sum();
                c.into_iter().map(|v| v / s).collect()
            })
            .collect();
        let mut change = 0.0f64;
        for (xi, yi) in x.iter_mut().zip(&image) {
            for (a, b) in xi.iter_mut().zip(yi) {
                change = change.max((*a - b).abs());
                *a = 0.5 * (*a + b);
            }
        }
        if change <= 1e-15 {
            break;
        }
    }
    for v in &mut x {
        normalize(v);
    }
    let lambda = t.rayleigh(&x)?;
    let mut best = SingularPair {
        lambda,
        residual: singular_residual(t, &x, lambda),
        vectors: x.clone(),
    };
    let polished = polish_singular(t, &x, NEWTON_ITERS);
    let positive = polished.vectors.iter().flatten().all(|&v| v > 0.0);
    if positive && polished.residual < best.residual {
        best = SingularPair {
            lambda: polished.lambda,
            vectors: polished.vectors,
            residual: polished.residual,
        };
    }
    if best.residual > tol * t.hs_norm().max(1.0) || best.lambda <= 0.0 {
        return Err(Error::NotConverged {
            iterations: iters,
            residual: best.residual,
        });
    }
    Ok(best)
}

/// Largest stationarity violation `max_i ‖⟨T,…û_i…⟩ − λu_i‖` of a pair.
pub fn kkt_check_rank_one(t: &DenseTensor, pair: &SingularPair) -> Result<f64> {
    let lens: Vec<usize> = pair.vectors.iter().map(Vec::len).collect();
    if lens != t.shape() {
        return Err(Error::DimensionMismatch(format!(
            "pair vectors {lens:?} do not match shape {:?}",
            t.shape()
        )));
    }
    Ok(singular_residual(t, &pair.vectors, pair.lambda))
}

/// `‖T − λ·u₁⊗⋯⊗u_d‖` evaluated through the identity `‖T‖² − λ²`, valid at
/// stationary points.
pub fn stationary_residual(t: &DenseTensor, lambda: f64) -> f64 {
    (t.hs_norm().powi(2) - lambda * lambda).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_unit, uniform_tensor};
    use proptest::prelude::*;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    fn s_fixture() -> DenseTensor {
        DenseTensor::new(vec![2, 2, 2], vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn hopm_recovers_rank_one_tensor() {
        let mut rng = stream_rng(1, 0);
        let u = random_unit(&mut rng, 3);
        let v = random_unit(&mut rng, 2);
        let w = random_unit(&mut rng, 4);
        let t = DenseTensor::outer(&[u.clone(), v.clone(), w.clone()]).unwrap().scale(&2.0);
        let run = hopm(&t, &random_units(&mut rng, &[3, 2, 4]), 1e-12, 500).unwrap();
        assert!(run.converged);
        assert!((run.pair.lambda - 2.0).abs() < 1e-12);
        let truth = SingularPair { lambda: 2.0, vectors: vec![u, v, w], residual: 0.0 };
        assert!(run.pair.same_class(&truth, 1e-10));
    }

    #[test]
    fn hopm_on_diagonal_cubic_near_e1() {
        let run = hopm(&s_fixture(), &[vec![0.9, 0.1], vec![0.95, 0.05], vec![1.0, 0.2]], 1e-12, 500).unwrap();
        assert!((run.pair.lambda - 1.0).abs() < 1e-12);
        for v in &run.pair.vectors {
            assert!(close(v, &[1.0, 0.0], 1e-10));
        }
    }

    #[test]
    fn hopm_on_matrix() {
        let t = DenseTensor::new(vec![2, 2], vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let run = hopm(&t, &[vec![0.6, 0.8], vec![0.8, -0.6]], 1e-12, 500).unwrap();
        assert!((run.pair.lambda - 2.0).abs() < 1e-12);
        assert!(close(&run.pair.vectors[0], &[1.0, 0.0], 1e-10));
        assert!(close(&run.pair.vectors[1], &[1.0, 0.0], 1e-10));
    }

    #[test]
    fn hopm_errors() {
        let z = DenseTensor::<f64>::zeros(vec![2, 2]).unwrap();
        assert!(matches!(hopm(&z, &[e(2, 0), e(2, 0)], 1e-12, 10), Err(Error::ZeroTensor)));
        let t = DenseTensor::new(vec![2, 2], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        // u₁ = e₂ annihilates the matrix
        assert!(matches!(hopm(&t, &[e(2, 1), e(2, 1)], 1e-12, 10), Err(Error::Degenerate(_))));
        assert!(matches!(hopm(&t, &[e(3, 0), e(2, 0)], 1e-12, 10), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn multistart_reports_both_tied_classes() {
        let out = best_rank_one(&s_fixture(), 100, 7, 1e-12).unwrap();
        assert!((out.best.value - 1.0).abs() < 1e-10);
        assert!((out.best.residual - 1.0).abs() < 1e-10);
        assert_eq!(out.tied.len(), 2);
        for target in [e(2, 0), e(2, 1)] {
            let truth = SingularPair { lambda: 1.0, vectors: vec![target; 3], residual: 0.0 };
            assert!(out.tied.iter().any(|p| p.same_class(&truth, 1e-8)));
        }
    }

    #[test]
    fn multistart_is_deterministic() {
        let t = uniform_tensor(&mut stream_rng(4, 0), &[3, 2, 2], -1.0, 1.0);
        let a = best_rank_one(&t, 16, 99, 1e-12).unwrap();
        let b = best_rank_one(&t, 16, 99, 1e-12).unwrap();
        assert_eq!(a, b);
    }

    /// Independent oracle: exhaustive lattice over the first two spheres with
    /// the third vector optimal in closed form, then plain power iteration.
    fn grid_oracle(t: &DenseTensor) -> f64 {
        let lattice = |m: usize| -> Vec<Vec<f64>> {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        };
        let pts = lattice(600);
        let mut best = (0.0, 0, 0);
        for (i, a) in pts.iter().enumerate() {
            for (j, b) in pts.iter().enumerate() {
                let mut w = [0.0; 3];
                for (p, x) in t.data().iter().enumerate() {
                    let (ia, ib, ic) = (p / 9, (p / 3) % 3, p % 3);
                    w[ic] += x * a[ia] * b[ib];
                }
                let v = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        let mut u = vec![pts[best.1].clone(), pts[best.2].clone(), vec![1.0, 1.0, 1.0]];
        let mut value = 0.0;
        for _ in 0..5000 {
            for mode in 0..3 {
                let mut c = vec![0.0; 3];
                for (p, x) in t.data().iter().enumerate() {
                    let idx = [p / 9, (p / 3) % 3, p % 3];
                    let mut w = *x;
                    for k in 0..3 {
                        if k != mode {
                            w *= u[k][idx[k]];
                        }
                    }
                    c[idx[mode]] += w;
                }
                value = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                u[mode] = c.iter().map(|x| x / value).collect();
            }
        }
        value
    }

    #[test]
    fn random_cubic_matches_grid_oracle() {
        let t = uniform_tensor(&mut stream_rng(2024, 0), &[3, 3, 3], -1.0, 1.0);
        let out = best_rank_one(&t, 64, 5, 1e-12).unwrap();
        let oracle = grid_oracle(&t);
        assert!((out.best.value - oracle).abs() < 1e-6, "{} vs {}", out.best.value, oracle);
    }

    #[test]
    fn nonneg_recovers_matrix_factors() {
        let a = [1.0, 2.0];
        let b = [3.0, 1.0];
        let t = NonnegTensor::new(DenseTensor::outer(&[a, b]).unwrap()).unwrap();
        let out = nonneg_best_rank_one(&t, 8, 0, 1e-12).unwrap();
        assert!(out.best.residual < 1e-12);
        assert!(out.best.vectors.iter().flatten().all(|&x| x >= 0.0));
        assert!((out.best.value - 5f64.sqrt() * 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nonneg_on_diagonal_cubic() {
        let t = NonnegTensor::new(s_fixture()).unwrap();
        let out = nonneg_best_rank_one(&t, 32, 3, 1e-12).unwrap();
        assert!((out.best.value - 1.0).abs() < 1e-12);
        assert!(out.best.vectors.iter().flatten().all(|&x| x >= 0.0));
    }

    #[test]
    fn nonneg_matches_unconstrained_on_random_inputs() {
        for k in 0..30 {
            let t = uniform_tensor(&mut stream_rng(77, k), &[2, 2, 2], 0.0, 1.0);
            let free = best_rank_one(&t, 16, k, 1e-12).unwrap();
            let nn = nonneg_best_rank_one(&NonnegTensor::new(t).unwrap(), 16, k, 1e-12).unwrap();
            assert!((free.best.value - nn.best.value).abs() <= 1e-8);
            assert!(nn.best.vectors.iter().flatten().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn perron_fixtures() {
        let ones = PositiveTensor::new(DenseTensor::from_fn(vec![2, 2, 2], |_| 1.0).unwrap()).unwrap();
        let p = perron_fixed_point(&ones, 1e-12, 10_000).unwrap();
        assert!((p.lambda - 8f64.sqrt()).abs() < 1e-12);
        let s = 0.5f64.sqrt();
        for v in &p.vectors {
            assert!(close(v, &[s, s], 1e-12));
        }

        let single = PositiveTensor::new(DenseTensor::new(vec![1, 1, 1], vec![2.5]).unwrap()).unwrap();
        let p = perron_fixed_point(&single, 1e-12, 100).unwrap();
        assert_eq!(p.lambda, 2.5);
        assert_eq!(p.vectors, vec![vec![1.0]; 3]);

        let mut rng = stream_rng(8, 0);
        let pos = |rng: &mut _, n| {
            let mut v: Vec<f64> = random_unit(rng, n).iter().map(|x: &f64| x.abs() + 0.1).collect();
            normalize(&mut v);
            v
        };
        let (u, v, w) = (pos(&mut rng, 2), pos(&mut rng, 3), pos(&mut rng, 2));
        let t = DenseTensor::outer(&[u.clone(), v.clone(), w.clone()]).unwrap().scale(&1.7);
        let p = perron_fixed_point(&PositiveTensor::new(t).unwrap(), 1e-12, 10_000).unwrap();
        assert!((p.lambda - 1.7).abs() < 1e-12);
        assert!(close(&p.vectors[1], &v, 1e-10));
    }

    #[test]
    fn kkt_check_fixtures() {
        let m = DenseTensor::new(vec![2, 2], vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let pair = SingularPair { lambda: 2.0, vectors: vec![e(2, 0), e(2, 0)], residual: 0.0 };
        assert_eq!(kkt_check_rank_one(&m, &pair).unwrap(), 0.0);
        let s = s_fixture();
        let pair = SingularPair { lambda: 1.0, vectors: vec![e(2, 0); 3], residual: 0.0 };
        assert_eq!(kkt_check_rank_one(&s, &pair).unwrap(), 0.0);
        let h = 0.5f64.sqrt();
        let mut pair = SingularPair { lambda: h, vectors: vec![vec![h, h]; 3], residual: 0.0 };
        assert!(kkt_check_rank_one(&s, &pair).unwrap() < 1e-15);
        pair.lambda = 1.0;
        assert!((kkt_check_rank_one(&s, &pair).unwrap() - 0.2929).abs() < 1e-4);
        assert!((kkt_check_rank_one(&s, &pair).unwrap() - (1.0 - h)).abs() < 1e-15);
        pair.vectors.pop();
        assert!(kkt_check_rank_one(&s, &pair).is_err());
    }

    #[test]
    fn matrix_case_matches_svd_oracle() {
        for k in 0..10 {
            let mut rng = stream_rng(31, k);
            let (r, c) = (2 + (k as usize % 3), 2 + (k as usize % 2));
            let t = uniform_tensor(&mut rng, &[r, c], -1.0, 1.0);
            let m = nalgebra::DMatrix::from_row_slice(r, c, t.data());
            let sigma = m.singular_values().max();
            let out = best_rank_one(&t, 8, k, 1e-12).unwrap();
            assert!((out.best.value - sigma).abs() < 1e-10);
        }
    }

    fn arb_nonneg(shape: Vec<usize>) -> impl Strategy<Value = DenseTensor> {
        let len: usize = shape.iter().product();
        proptest::collection::vec(0.0f64..1.0, len)
            .prop_map(move |d| DenseTensor::new(shape.clone(), d).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn hopm_values_never_decrease(t in arb_nonneg(vec![3, 2, 2]).prop_map(|t| t.map(|x| x - 0.5)), seed in 0u64..1000) {
            let init = random_units(&mut stream_rng(seed, 0), &[3, 2, 2]);
            if let Ok(run) = hopm(&t, &init, 1e-12, 200) {
                let start = t.rayleigh(&init).unwrap().abs();
                let mut prev = start;
                for &v in &run.values {
                    prop_assert!(v >= prev - 1e-12 * prev.max(1.0));
                    prev = v;
                }
            }
        }

        #[test]
        fn sign_flip_preserves_residual(seed in 0u64..1000, order in 3usize..5) {
            let mut rng = stream_rng(seed, 1);
            let shape = vec![2; order];
            let t = crate::rng::normal_tensor(&mut rng, &shape);
            let u = random_units(&mut rng, &shape);
            let lambda = t.rayleigh(&u).unwrap();
            let r = singular_residual(&t, &u, lambda);
            let neg: Vec<Vec<f64>> = u.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            let r2 = singular_residual(&t, &neg, sign * lambda);
            prop_assert!((r - r2).abs() <= 1e-14 * r.max(1.0));
        }

        #[test]
        fn abs_flip_never_lowers_rayleigh(t in arb_nonneg(vec![2, 3, 2]), seed in 0u64..1000) {
            let u = random_units(&mut stream_rng(seed, 2), &[2, 3, 2]);
            let abs: Vec<Vec<f64>> = u.iter().map(|v| v.iter().map(|x| x.abs()).collect()).collect();
            prop_assert!(t.rayleigh(&abs).unwrap() >= t.rayleigh(&u).unwrap().abs() - 1e-14);
        }

        #[test]
        fn perron_vectors_are_strictly_positive(seed in 0u64..1000) {
            let t = uniform_tensor(&mut stream_rng(seed, 3), &[3, 2, 3], 0.05, 1.0);
            let p = perron_fixed_point(&PositiveTensor::new(t).unwrap(), 1e-11, 10_000).unwrap();
            prop_assert!(p.lambda > 0.0);
            prop_assert!(p.vectors.iter().flatten().all(|&x| x > 1e-6));
        }
    }
}
