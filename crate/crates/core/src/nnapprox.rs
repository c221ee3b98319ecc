//! Best nonnegative rank-r approximation by alternating nonnegative least
//! squares (ANLS), first-order optimality checks, and the deflation
//! experiment comparing sequential rank-one fits against a joint fit.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, normalize};
use crate::rankone::nonneg_best_rank_one;
use crate::rng::{random_units, stream_rng};
use crate::tensor::{DenseTensor, NonnegTensor, PositiveTensor};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITERS: usize = 10_000;
/// KKT violations up to this multiple of `‖T‖` count as converged.
pub const KKT_ACCEPT: f64 = 1e-6;
/// Terms whose composite norm is at most this multiple of `‖T‖` are zero.
pub const ZERO_TERM: f64 = 1e-12;
const INNER_TOL: f64 = 1e-14;
const STALL_SWEEPS: usize = 25;
const BETA_START: f64 = 0.5;
const BETA_GROW: f64 = 1.5;
const BETA_SHRINK: f64 = 0.5;
const BETA_MAX: f64 = 64.0;

/// `r` nonnegative rank-one terms; `terms[p][i]` is the mode-`i` vector of
/// term `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NNFactors {
    terms: Vec<Vec<Vec<f64>>>,
    #[serde(skip)]
    shape: Vec<usize>,
    #[serde(skip)]
    composite: DenseTensor,
}

impl NNFactors {
    pub fn new(shape: Vec<usize>, terms: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("at least one term is required".into()));
        }
        for (p, term) in terms.iter().enumerate() {
            let lens: Vec<usize> = term.iter().map(Vec::len).collect();
            if lens != shape {
                return Err(Error::DimensionMismatch(format!(
                    "term {p} has vector lengths {lens:?}, expected {shape:?}"
                )));
            }
            for (i, v) in term.iter().enumerate() {
                if let Some((j, &x)) = v.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
                    return Err(Error::Negative {
                        index: vec![p, i, j],
                        value: x,
                    });
                }
            }
        }
        let composite = composite_of(&shape, &terms)?;
        Ok(Self {
            terms,
            shape,
            composite,
        })
    }

    pub fn r(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Vec<Vec<f64>>] {
        &self.terms
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// `X = Σ_p u_{1,p}⊗⋯⊗u_{d,p}`.
    pub fn composite(&self) -> &DenseTensor {
        &self.composite
    }

    /// Hilbert–Schmidt norm of term `p`.
    pub fn term_norm(&self, p: usize) -> f64 {
        self.terms[p].iter().map(|v| dot(v, v).sqrt()).product()
    }

    /// Drops terms with norm at most `threshold`; keeps at least one term.
    pub fn pruned(&self, threshold: f64) -> Self {
        let kept: Vec<Vec<Vec<f64>>> = (0..self.r())
            .filter(|&p| self.term_norm(p) > threshold)
            .map(|p| self.terms[p].clone())
            .collect();
        if kept.is_empty() {
            let zero = self.shape.iter().map(|&n| vec![0.0; n]).collect();
            return Self::new(self.shape.clone(), vec![zero]).expect("valid zero term");
        }
        Self::new(self.shape.clone(), kept).expect("subset of valid terms")
    }

    /// Each term as `(weight, unit vectors)`.
    pub fn normalized_terms(&self) -> Vec<(f64, Vec<Vec<f64>>)> {
        self.terms
            .iter()
            .map(|term| {
                let mut weight = 1.0;
                let vecs = term
                    .iter()
                    .map(|v| {
                        let mut u = v.clone();
                        weight *= normalize(&mut u);
                        u
                    })
                    .collect();
                (weight, vecs)
            })
            .collect()
    }

    pub fn residual(&self, t: &DenseTensor) -> f64 {
        t.sub(&self.composite).map(|d| d.hs_norm()).unwrap_or(f64::NAN)
    }
}

fn composite_of(shape: &[usize], terms: &[Vec<Vec<f64>>]) -> Result<DenseTensor> {
    let mut x = DenseTensor::zeros(shape.to_vec())?;
    for term in terms {
        x = x.add(&DenseTensor::outer(term)?)?;
    }
    Ok(x)
}

/// Whether two factorizations agree term by term up to a permutation of the
/// terms, comparing weights and unit vectors within `tol`.
pub fn same_factor_class(a: &NNFactors, b: &NNFactors, tol: f64) -> bool {
    if a.r() != b.r() {
        return false;
    }
    let na = a.normalized_terms();
    let nb = b.normalized_terms();
    let close = |x: &(f64, Vec<Vec<f64>>), y: &(f64, Vec<Vec<f64>>)| {
        (x.0 - y.0).abs() <= tol
            && x.1.iter().zip(&y.1).all(|(u, v)| crate::linalg::dist2(u, v) <= tol)
    };
    let mut used = vec![false; nb.len()];
    fn rec(
        p: usize,
        na: &[(f64, Vec<Vec<f64>>)],
        nb: &[(f64, Vec<Vec<f64>>)],
        used: &mut [bool],
        close: &dyn Fn(&(f64, Vec<Vec<f64>>), &(f64, Vec<Vec<f64>>)) -> bool,
    ) -> bool {
        if p == na.len() {
            return true;
        }
        for q in 0..nb.len() {
            if !used[q] && close(&na[p], &nb[q]) {
                used[q] = true;
                if rec(p + 1, na, nb, used, close) {
                    return true;
                }
                used[q] = false;
            }
        }
        false
    }
    rec(0, &na, &nb, &mut used, &close)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub mode: usize,
    pub term: usize,
    pub coordinate: usize,
    pub value: f64,
}

/// First-order optimality report for a nonnegative factorization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KKTReport {
    /// Largest `|⟨T − X, u_{1,p}⊗⋯⊗e_j⊗⋯⊗u_{d,p}⟩|` over `j ∈ supp(u_{i,p})`.
    pub max_equality_violation: f64,
    /// Largest positive part of the same quantity over all coordinates.
    pub max_inequality_violation: f64,
    /// Location of the larger of the two violations, if either is nonzero.
    pub witness: Option<Witness>,
    pub tolerance: f64,
    /// Both violations are at most `tolerance`.
    pub passed: bool,
}

impl KKTReport {
    pub fn max_violation(&self) -> f64 {
        self.max_equality_violation.max(self.max_inequality_violation)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

fn kkt_terms(t: &DenseTensor, terms: &[Vec<Vec<f64>>], x: &DenseTensor, tol: f64) -> KKTReport {
    let diff = t.sub(x).expect("same shape");
    let mut eq = 0.0f64;
    let mut ineq = 0.0f64;
    let mut witness: Option<Witness> = None;
    let mut worst = 0.0f64;
    for (p, term) in terms.iter().enumerate() {
        for (i, u) in term.iter().enumerate() {
            let g = diff.contract_slots(i, term);
            for (j, &value) in g.iter().enumerate() {
                let v_ineq = value.max(0.0);
                let v_eq = if u[j] > 0.0 { value.abs() } else { 0.0 };
                ineq = ineq.max(v_ineq);
                eq = eq.max(v_eq);
                let v = v_ineq.max(v_eq);
                if v > worst {
                    worst = v;
                    witness = Some(Witness {
                        mode: i,
                        term: p,
                        coordinate: j,
                        value,
                    });
                }
            }
        }
    }
    KKTReport {
        max_equality_violation: eq,
        max_inequality_violation: ineq,
        witness,
        tolerance: tol,
        passed: eq.max(ineq) <= tol,
    }
}

/// Checks the nonnegative stationarity conditions: for every term `p`, mode
/// `i` and coordinate `j`, `⟨T − X, u_{1,p}⊗⋯⊗e_j⊗⋯⊗u_{d,p}⟩ ≤ 0`, with
/// equality on the support of `u_{i,p}`, each to within the absolute `tol`.
pub fn kkt_verify(t: &NonnegTensor, f: &NNFactors, tol: f64) -> Result<KKTReport> {
    if f.shape() != t.shape() {
        return Err(Error::DimensionMismatch(format!(
            "factors of shape {:?} for a tensor of shape {:?}",
            f.shape(),
            t.shape()
        )));
    }
    Ok(kkt_terms(t, f.terms(), f.composite(), tol))
}

/// A multi-index where `T − X` is largest, if that entry is positive.
pub fn residual_positive_witness(t: &NonnegTensor, f: &NNFactors) -> Option<(Vec<usize>, f64)> {
    let diff = t.sub(f.composite()).ok()?;
    let (pos, &value) = diff
        .data()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    (value > 0.0).then(|| (diff.multi_index(pos), value))
}

/// No term is zero (norm at most `tol·‖T‖`), and replacing any single term
/// by the rank-one tensor supported at the largest positive residual entry
/// does not beat the current residual by more than `tol·‖T‖`.
pub fn exact_rank_check(t: &NonnegTensor, f: &NNFactors, tol: f64) -> bool {
    let scale = tol * t.hs_norm().max(f64::MIN_POSITIVE);
    if (0..f.r()).any(|p| f.term_norm(p) <= scale) {
        return false;
    }
    let base = f.residual(t);
    for p in 0..f.r() {
        let rest: Vec<Vec<Vec<f64>>> = (0..f.r())
            .filter(|&q| q != p)
            .map(|q| f.terms()[q].clone())
            .collect();
        let x = if rest.is_empty() {
            DenseTensor::zeros(t.shape().to_vec()).expect("valid shape")
        } else {
            composite_of(t.shape(), &rest).expect("valid terms")
        };
        let diff = t.sub(&x).expect("same shape");
        let Some((pos, &value)) = diff
            .data()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
        else {
            continue;
        };
        if value <= 0.0 {
            continue;
        }
        let mut improved = diff.into_data();
        improved[pos] -= value;
        let r = improved.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r < base - scale {
            return false;
        }
    }
    true
}

/// One ANLS run from a seeded random start.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnlsRun {
    pub restart: usize,
    pub factors: NNFactors,
    pub residual: f64,
    pub sweeps: usize,
    /// KKT violations within `KKT_ACCEPT · ‖T‖`.
    pub converged: bool,
    pub kkt: KKTReport,
    /// Residual before the first and after every block update.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

/// Nonnegative least squares `min ½xᵀGx − bᵀx, x ≥ 0` by projected
/// coordinate descent, warm-started at `x`.
fn nnls_row(g: &[f64], b: &[f64], x: &mut [f64], cap: usize) {
    let r = x.len();
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for _ in 0..cap {
        let mut change = 0.0f64;
        for p in 0..r {
            let gpp = g[p * r + p];
            let next = if gpp > 0.0 {
                let grad = (0..r).map(|q| g[p * r + q] * x[q]).sum::<f64>() - b[p];
                (x[p] - grad / gpp).max(0.0)
            } else {
                0.0
            };
            change = change.max((next - x[p]).abs() * gpp.max(1.0));
            x[p] = next;
        }
        if change <= INNER_TOL * scale {
            break;
        }
    }
}

fn update_mode(t: &DenseTensor, terms: &mut [Vec<Vec<f64>>], mode: usize) {
    let r = terms.len();
    let n = t.shape()[mode];
    let d = t.order();
    let mut g = vec![1.0; r * r];
    for p in 0..r {
        for q in 0..r {
            for j in (0..d).filter(|&j| j != mode) {
                g[p * r + q] *= dot(&terms[p][j], &terms[q][j]);
            }
        }
    }
    let b: Vec<Vec<f64>> = terms.iter().map(|term| t.contract_slots(mode, term)).collect();
    let cap = 10 * r * n;
    for a in 0..n {
        let rhs: Vec<f64> = (0..r).map(|p| b[p][a]).collect();
        let mut x: Vec<f64> = (0..r).map(|p| terms[p][mode][a]).collect();
        nnls_row(&g, &rhs, &mut x, cap);
        for p in 0..r {
            terms[p][mode][a] = x[p];
        }
    }
}

/// Equalizes the norms of each term's vectors without changing the term.
fn balance(terms: &mut [Vec<Vec<f64>>]) {
    for term in terms.iter_mut() {
        let norms: Vec<f64> = term.iter().map(|v| dot(v, v).sqrt()).collect();
        if norms.iter().any(|&x| x == 0.0) {
            term.iter_mut().for_each(|v| v.iter_mut().for_each(|x| *x = 0.0));
            continue;
        }
        let mean = norms.iter().map(|x| x.ln()).sum::<f64>() / norms.len() as f64;
        let target = mean.exp();
        for (v, n) in term.iter_mut().zip(&norms) {
            let s = target / n;
            v.iter_mut().for_each(|x| *x *= s);
        }
    }
}

fn residual_of(t: &DenseTensor, terms: &[Vec<Vec<f64>>]) -> (f64, DenseTensor) {
    let x = composite_of(t.shape(), terms).expect("valid terms");
    (t.sub(&x).expect("same shape").hs_norm(), x)
}

fn anls_run(t: &DenseTensor, r: usize, seed: u64, restart: usize, tol: f64, max_iters: usize) -> AnlsRun {
    let mut rng = stream_rng(seed, restart as u64);
    let shape = t.shape().to_vec();
    let d = shape.len();
    let tnorm = t.hs_norm();
    let mut terms: Vec<Vec<Vec<f64>>> = (0..r)
        .map(|_| {
            shape
                .iter()
                .map(|&n| (0..n).map(|_| rng.random_range(0.0..1.0)).collect())
                .collect()
        })
        .collect();
    // optimal common scale of the random start
    let x0 = composite_of(&shape, &terms).expect("valid terms");
    let xx = x0.inner(&x0).expect("same shape");
    if xx > 0.0 {
        let alpha = (t.inner(&x0).expect("same shape") / xx).max(0.0).powf(1.0 / d as f64);
        terms
            .iter_mut()
            .for_each(|term| term.iter_mut().for_each(|v| v.iter_mut().for_each(|x| *x *= alpha)));
    }
    let (mut residual, mut x) = residual_of(t, &terms);
    let mut trace = vec![residual];
    let mut sweeps = 0;
    let mut stall = 0;
    let mut kkt = kkt_terms(t, &terms, &x, KKT_ACCEPT * tnorm);
    let mut beta = BETA_START;
    while sweeps < max_iters && !kkt.passes(tol * tnorm) {
        sweeps += 1;
        let before = residual;
        let prev = terms.clone();
        for mode in 0..d {
            update_mode(t, &mut terms, mode);
            (residual, x) = residual_of(t, &terms);
            trace.push(residual);
        }
        // projected extrapolation along the last sweep, kept only on descent
        let jump: Vec<Vec<Vec<f64>>> = terms
            .iter()
            .zip(&prev)
            .map(|(term, old)| {
                term.iter()
                    .zip(old)
                    .map(|(v, o)| v.iter().zip(o).map(|(a, b)| (a + beta * (a - b)).max(0.0)).collect())
                    .collect()
            })
            .collect();
        let (jr, jx) = residual_of(t, &jump);
        if jr < residual {
            terms = jump;
            residual = jr;
            x = jx;
            trace.push(residual);
            beta = (beta * BETA_GROW).min(BETA_MAX);
        } else {
            beta = (beta * BETA_SHRINK).max(BETA_START);
        }
        balance(&mut terms);
        kkt = kkt_terms(t, &terms, &x, KKT_ACCEPT * tnorm);
        if before - residual <= 1e-15 * tnorm {
            stall += 1;
            if stall >= STALL_SWEEPS {
                break;
            }
        } else {
            stall = 0;
        }
    }
    let factors = NNFactors::new(shape, terms).expect("iterates stay nonnegative");
    let converged = kkt.passed;
    AnlsRun {
        restart,
        residual: factors.residual(t),
        factors,
        sweeps,
        converged,
        kkt,
        trace,
    }
}

/// Every restart of ANLS, in restart order. Restart `k` draws its start from
/// the stream `(seed, k)`.
pub fn anls_runs(
    t: &NonnegTensor,
    r: usize,
    restarts: usize,
    seed: u64,
    tol: f64,
    max_iters: usize,
) -> Result<Vec<AnlsRun>> {
    if r == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    Ok((0..restarts)
        .into_par_iter()
        .map(|k| anls_run(t, r, seed, k, tol, max_iters))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnlsResult {
    /// Best factors with zero terms pruned.
    pub factors: NNFactors,
    pub residual: f64,
    pub converged: bool,
    pub restart: usize,
    pub sweeps: usize,
    pub kkt: KKTReport,
    pub converged_restarts: usize,
}

/// Best run over restarts: converged runs first, then smallest residual,
/// then lowest restart index.
pub fn select_best(runs: &[AnlsRun]) -> Option<&AnlsRun> {
    let pool: Vec<&AnlsRun> = if runs.iter().any(|r| r.converged) {
        runs.iter().filter(|r| r.converged).collect()
    } else {
        runs.iter().collect()
    };
    pool.into_iter()
        .reduce(|a, b| if b.residual < a.residual { b } else { a })
}

/// Best nonnegative rank-`r` approximation over `restarts` seeded ANLS runs.
pub fn anls(t: &NonnegTensor, r: usize, restarts: usize, seed: u64, tol: f64, max_iters: usize) -> Result<AnlsResult> {
    let runs = anls_runs(t, r, restarts, seed, tol, max_iters)?;
    let best = select_best(&runs).expect("at least one restart");
    let factors = best.factors.pruned(ZERO_TERM * t.hs_norm());
    let kkt = kkt_verify(t, &factors, KKT_ACCEPT * t.hs_norm())?;
    Ok(AnlsResult {
        residual: factors.residual(t),
        converged: best.converged,
        restart: best.restart,
        sweeps: best.sweeps,
        converged_restarts: runs.iter().filter(|r| r.converged).count(),
        factors,
        kkt,
    })
}

/// Distinct factor classes among the runs that attain the best residual to
/// within `rel_tol · ‖T‖`.
pub fn optimal_classes(t: &DenseTensor, runs: &[AnlsRun], rel_tol: f64, class_tol: f64) -> Vec<NNFactors> {
    let best = runs.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    let slack = rel_tol * t.hs_norm();
    let mut classes: Vec<NNFactors> = Vec::new();
    for run in runs.iter().filter(|r| r.residual <= best + slack) {
        let f = run.factors.pruned(ZERO_TERM * t.hs_norm());
        if !classes.iter().any(|c| same_factor_class(c, &f, class_tol)) {
            classes.push(f);
        }
    }
    classes
}

/// Best rank-one term with nonnegative vectors for a tensor of any sign:
/// maximizes `⟨R, v₁⊗⋯⊗v_d⟩` over nonnegative unit vectors by projected
/// alternating updates from several starts.
fn signed_nonneg_rank_one(r: &DenseTensor, restarts: usize, seed: u64) -> Vec<Vec<f64>> {
    let d = r.order();
    let zero: Vec<Vec<f64>> = r.shape().iter().map(|&n| vec![0.0; n]).collect();
    let mut best = (0.0, zero);
    for k in 0..restarts {
        let mut u: Vec<Vec<f64>> = random_units(&mut stream_rng(seed, k as u64), r.shape())
            .into_iter()
            .map(|v| v.into_iter().map(f64::abs).collect())
            .collect();
        let mut value = f64::NEG_INFINITY;
        for _ in 0..2000 {
            let mut dead = false;
            for i in 0..d {
                let mut c: Vec<f64> = r.contract_slots(i, &u).into_iter().map(|x| x.max(0.0)).collect();
                if normalize(&mut c) == 0.0 {
                    dead = true;
                    break;
                }
                u[i] = c;
            }
            if dead {
                break;
            }
            let v = r.rayleigh(&u).expect("valid vectors");
            if v - value <= 1e-15 * v.abs().max(1.0) {
                value = v;
                break;
            }
            value = v;
        }
        if value > best.0 {
            best = (value, u.iter().map(|v| v.iter().map(|x| x * value.powf(1.0 / d as f64)).collect()).collect());
        }
    }
    best.1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeflationReport {
    pub sequential_residual: f64,
    pub joint_residual: f64,
    pub gap: f64,
    /// `∏_i ⟨u_i, v_i⟩` between the unit vectors of the two sequential terms.
    pub overlap: f64,
    /// Sequential path without clipping the first residual.
    pub unclipped_residual: f64,
    pub restarts: usize,
    pub seed: u64,
}

/// Sequential deflation (best nonnegative rank-one of `T`, then of the
/// clipped residual `max(T − X₁, 0)`) against joint ANLS with `r = 2`.
/// Requires the joint residual to exceed `1e-6·‖T‖`, i.e. nnrank above 2.
pub fn compare_deflation(t: &PositiveTensor, restarts: usize, seed: u64) -> Result<DeflationReport> {
    let nn = t.as_nonneg();
    let tnorm = t.hs_norm();
    let joint = anls(nn, 2, restarts, seed, DEFAULT_TOL, DEFAULT_MAX_ITERS)?;
    if joint.residual <= 1e-6 * tnorm {
        return Err(Error::Precondition(format!(
            "a nonnegative rank-2 fit reaches residual {:e}; deflation needs nnrank above 2",
            joint.residual
        )));
    }
    let first = nonneg_best_rank_one(nn, restarts, seed, crate::rankone::DEFAULT_TOL)?.best;
    let x1 = first.tensor();
    let r1 = t.sub(&x1)?;
    let clipped = NonnegTensor::new(r1.map(|&x| x.max(0.0)))?;
    let second = nonneg_best_rank_one(&clipped, restarts, seed.wrapping_add(1), crate::rankone::DEFAULT_TOL)?.best;
    let sequential_residual = r1.sub(&second.tensor())?.hs_norm();
    let overlap = first
        .vectors
        .iter()
        .zip(&second.vectors)
        .map(|(u, v)| dot(u, v))
        .product();
    let unclipped = signed_nonneg_rank_one(&r1, restarts, seed.wrapping_add(2));
    let unclipped_residual = r1.sub(&DenseTensor::outer(&unclipped)?)?.hs_norm();
    Ok(DeflationReport {
        sequential_residual,
        joint_residual: joint.residual,
        gap: sequential_residual - joint.residual,
        overlap,
        unclipped_residual,
        restarts,
        seed,
    })
}

/// Sum of `terms` random strictly positive unit rank-one tensors, redrawn
/// until a KKT-converged nonnegative rank-`(terms − 1)` fit over 64 restarts
/// leaves residual above `1e-6·‖T‖`.
pub fn positive_instance(shape: &[usize], terms: usize, seed: u64) -> Result<PositiveTensor> {
    if terms < 2 {
        return Err(Error::InvalidArgument("at least two terms are required".into()));
    }
    for attempt in 0..100u64 {
        let mut rng = stream_rng(seed, attempt);
        let mut t = DenseTensor::zeros(shape.to_vec())?;
        for _ in 0..terms {
            let vecs: Vec<Vec<f64>> = shape
                .iter()
                .map(|&n| {
                    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
                    normalize(&mut v);
                    v
                })
                .collect();
            t = t.add(&DenseTensor::outer(&vecs)?)?;
        }
        let nn = NonnegTensor::new(t.clone())?;
        let lower = anls(&nn, terms - 1, 64, seed ^ attempt, DEFAULT_TOL, DEFAULT_MAX_ITERS)?;
        if lower.converged && lower.residual > 1e-6 * t.hs_norm() {
            return PositiveTensor::new(t);
        }
    }
    Err(Error::Precondition("could not generate an instance of the requested rank".into()))
}
