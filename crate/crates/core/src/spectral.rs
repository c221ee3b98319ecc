//! Enumeration of normalized singular pairs and eigenpairs by deterministic
//! seeding plus Newton polishing, with class bookkeeping.
//!
//! Completeness is heuristic: a denser grid can only add classes, never
//! certify that none are missing.

use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::psi_real_roots;
use crate::equiv::{canonical_eigen, same_eigen_class};
use crate::error::{Error, Result};
use crate::linalg::{dot, normalize, orthogonal_complement, sym_eigen};
use crate::newton::{eigen_residual, polish_eigen, polish_singular};
use crate::rankone::{SingularPair, CLASS_TOL};
use crate::rng::{random_unit, stream_rng};
use crate::tensor::{DenseTensor, SymTensor};

/// Largest number of entries accepted by the enumerators.
pub const MAX_ENTRIES: usize = 256;
const NEWTON_ITERS: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

impl EigenPair {
    pub fn same_class(&self, other: &Self, order: usize, tol: f64) -> bool {
        same_eigen_class(self.lambda, &self.vector, other.lambda, &other.vector, order, tol)
    }
}

pub trait HasLambda {
    fn lambda(&self) -> f64;
}

impl HasLambda for SingularPair {
    fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl HasLambda for EigenPair {
    fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairInventory<P> {
    pub classes: Vec<P>,
    pub grid_density: usize,
    pub tolerance: f64,
    pub seeds: usize,
    /// Seeds whose Newton run ended above the tolerance.
    pub dropped_seeds: usize,
    /// Real roots of the characteristic polynomial with no matching class
    /// (binary cubics only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unmatched_roots: Option<Vec<f64>>,
}

impl<P: HasLambda> PairInventory<P> {
    pub fn lambdas(&self) -> Vec<f64> {
        self.classes.iter().map(HasLambda::lambda).collect()
    }
}

/// Deterministic points on the unit sphere in `ℝⁿ`, one per sign class:
/// half-circle angles `πk/D` for `n = 2` (nested when `D` doubles), a
/// Fibonacci lattice on the upper hemisphere for `n = 3`, and seeded normal
/// draws beyond.
pub fn sphere_lattice(n: usize, density: usize) -> Vec<Vec<f64>> {
    let density = density.max(1);
    match n {
        1 => vec![vec![1.0]],
        2 => (0..density)
            .map(|k| {
                let theta = std::f64::consts::PI * k as f64 / density as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..density)
                .map(|k| {
                    let z = (k as f64 + 0.5) / density as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = stream_rng(0x5eed, n as u64);
            (0..density).map(|_| random_unit(&mut rng, n)).collect()
        }
    }
}

fn check_desk_scale(t: &DenseTensor) -> Result<()> {
    if t.len() > MAX_ENTRIES {
        return Err(Error::Unsupported(format!(
            "enumeration is limited to {MAX_ENTRIES} entries, got shape {:?}",
            t.shape()
        )));
    }
    if t.is_zero() {
        return Err(Error::ZeroTensor);
    }
    Ok(())
}

/// Lattice points on modes `0..d−2`; for each, every singular pair of the
/// remaining matrix slice seeds the last two modes.
fn singular_seeds(t: &DenseTensor, density: usize) -> Vec<Vec<Vec<f64>>> {
    let d = t.order();
    let shape = t.shape();
    if d == 1 {
        let mut v = t.data().to_vec();
        normalize(&mut v);
        return vec![vec![v]];
    }
    let mut prefixes: Vec<Vec<Vec<f64>>> = vec![Vec::new()];
    for &n in &shape[..d - 2] {
        let lattice = sphere_lattice(n, density);
        prefixes = prefixes
            .into_iter()
            .flat_map(|prefix| {
                lattice.iter().map(move |p| {
                    let mut s = prefix.clone();
                    s.push(p.clone());
                    s
                })
            })
            .collect();
    }
    let (rows, cols) = (shape[d - 2], shape[d - 1]);
    let mut seeds = Vec::new();
    for prefix in prefixes {
        let mut slots = prefix.clone();
        slots.push(vec![0.0; rows]);
        slots.push(vec![0.0; cols]);
        let m = t.contract_pair(d - 2, d - 1, &slots);
        let gram = |a: usize, b: usize, left: bool| -> f64 {
            if left {
                (0..cols).map(|k| m[a * cols + k] * m[b * cols + k]).sum()
            } else {
                (0..rows).map(|k| m[k * cols + a] * m[k * cols + b]).sum()
            }
        };
        let mtm: Vec<f64> = (0..cols * cols).map(|x| gram(x / cols, x % cols, false)).collect();
        let mmt: Vec<f64> = (0..rows * rows).map(|x| gram(x / rows, x % rows, true)).collect();
        let (_, right) = sym_eigen(&mtm, cols);
        let (_, left) = sym_eigen(&mmt, rows);
        let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        for k in 0..rows.min(cols) {
            let v = right[k].clone();
            let mut u: Vec<f64> = (0..rows)
                .map(|a| (0..cols).map(|b| m[a * cols + b] * v[b]).sum())
                .collect();
            if normalize(&mut u) <= 1e-12 * scale {
                u = left[k].clone();
            }
            let mut s = prefix.clone();
            s.push(u);
            s.push(v);
            seeds.push(s);
        }
    }
    seeds
}

/// All classes of normalized singular pairs reachable from the seed grid.
pub fn enumerate_singular_pairs(t: &DenseTensor, grid_density: usize, tol: f64) -> Result<PairInventory<SingularPair>> {
    check_desk_scale(t)?;
    let seeds = singular_seeds(t, grid_density);
    let polished: Vec<_> = seeds
        .par_iter()
        .map(|s| polish_singular(t, s, NEWTON_ITERS))
        .collect();
    let mut classes: Vec<SingularPair> = Vec::new();
    let mut dropped = 0;
    for p in polished {
        if p.residual > tol {
            dropped += 1;
            continue;
        }
        let (lambda, vectors) = crate::equiv::canonical_singular(p.lambda, &p.vectors);
        let pair = SingularPair {
            lambda,
            vectors,
            residual: p.residual,
        };
        if !classes.iter().any(|c| c.same_class(&pair, CLASS_TOL)) {
            classes.push(pair);
        }
    }
    Ok(PairInventory {
        classes,
        grid_density,
        tolerance: tol,
        seeds: seeds.len(),
        dropped_seeds: dropped,
        unmatched_roots: None,
    })
}

/// Upper bound on the number of isolated eigenvector classes of an order-`d`
/// tensor on `ℝⁿ`: `((d−1)ⁿ − 1)/(d − 2)`, or `n` for matrices.
pub fn eigen_class_bound(order: usize, n: usize) -> usize {
    match order {
        0 | 1 => 1,
        2 => n,
        d => ((d - 1).pow(n as u32) - 1) / (d - 2),
    }
}

/// All classes of normalized eigenpairs reachable from the seed lattice.
/// For binary cubics the real roots of `ψ` without a matching class are
/// reported in `unmatched_roots`.
pub fn enumerate_eigenpairs(s: &SymTensor, grid_density: usize, tol: f64) -> Result<PairInventory<EigenPair>> {
    let n = s.dim();
    let d = s.order();
    let bound = eigen_class_bound(d, n);
    let seeds = sphere_lattice(n, grid_density);
    if s.is_zero() {
        // every unit vector is an eigenvector with λ = 0
        return Err(Error::Continuum {
            found: seeds.len(),
            bound,
        });
    }
    check_desk_scale(s)?;
    let polished: Vec<_> = seeds
        .par_iter()
        .map(|u| polish_eigen(s, u, NEWTON_ITERS))
        .collect();
    let mut classes: Vec<EigenPair> = Vec::new();
    let mut dropped = 0;
    for p in polished {
        if p.residual > tol {
            dropped += 1;
            continue;
        }
        let (lambda, vector) = canonical_eigen(p.lambda, &p.vectors[0], d);
        let pair = EigenPair {
            lambda,
            vector,
            residual: p.residual,
        };
        if !classes.iter().any(|c| c.same_class(&pair, d, CLASS_TOL)) {
            classes.push(pair);
        }
    }
    if classes.len() > bound {
        return Err(Error::Continuum {
            found: classes.len(),
            bound,
        });
    }
    let unmatched_roots = if d == 3 && n == 2 {
        let roots = psi_real_roots(s)?;
        Some(
            roots
                .into_iter()
                .filter(|r| {
                    !classes
                        .iter()
                        .any(|c| (c.lambda.abs() - r.abs()).abs() <= 10.0 * tol.max(1e-12))
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(PairInventory {
        classes,
        grid_density,
        tolerance: tol,
        seeds: seeds.len(),
        dropped_seeds: dropped,
        unmatched_roots,
    })
}

/// Whether exactly one class has `|λ − λ⋆| ≤ tol`; the attaining classes are
/// returned as witnesses.
pub fn is_simple<P: HasLambda + Clone>(inv: &PairInventory<P>, lambda_star: f64, tol: f64) -> (bool, Vec<P>) {
    let witnesses: Vec<P> = inv
        .classes
        .iter()
        .filter(|c| (c.lambda() - lambda_star).abs() <= tol)
        .cloned()
        .collect();
    (witnesses.len() == 1, witnesses)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sigma2 {
    pub sigma2: f64,
    pub rho: f64,
    /// `σ₂ ≥ ρ/2`: the best nonnegative symmetric rank-one approximation is
    /// unique.
    pub holds: bool,
}

/// `σ₂ = min |⟨S, u⊙v⊙v⟩|` over unit `v ⊥ u`, compared against `ρ/2` with
/// `ρ = ⟨S, u⊗u⊗u⟩`.
pub fn sigma2_condition(s: &SymTensor, u: &[f64], tol: f64) -> Result<Sigma2> {
    if s.order() != 3 {
        return Err(Error::Unsupported(format!("σ₂ is defined for order 3, got {}", s.order())));
    }
    if let Some((pos, &x)) = s.data().iter().enumerate().find(|(_, &x)| x <= 0.0) {
        return Err(Error::NotPositive {
            index: s.multi_index(pos),
            value: x,
        });
    }
    let n = s.dim();
    if u.len() != n {
        return Err(Error::DimensionMismatch(format!("vector of length {} for dimension {n}", u.len())));
    }
    if (dot(u, u).sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition("u must be a unit vector".into()));
    }
    let rho = s.rayleigh(&[u, u, u])?;
    let residual = eigen_residual(s, u, rho);
    if residual > tol * s.hs_norm().max(1.0) {
        return Err(Error::Precondition(format!(
            "u is not an eigenvector (residual {residual:e})"
        )));
    }
    // ⟨S, u⊙v⊙v⟩ = vᵀMv with M = ⟨S, u⟩ for symmetric S
    let m = s.contract_pair(1, 2, &[u, u, u]);
    let basis = orthogonal_complement(u);
    let k = basis.len();
    let mut projected = vec![0.0; k * k];
    for a in 0..k {
        let mb: Vec<f64> = (0..n).map(|r| dot(&m[r * n..(r + 1) * n], &basis[a])).collect();
        for b in 0..k {
            projected[b * k + a] = dot(&basis[b], &mb);
        }
    }
    let sigma2 = if k == 0 {
        0.0
    } else {
        let (vals, _) = sym_eigen(&projected, k);
        let (hi, lo) = (vals[0], vals[k - 1]);
        if lo < 0.0 && hi > 0.0 {
            0.0
        } else {
            vals.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min)
        }
    };
    Ok(Sigma2 {
        sigma2,
        rho,
        holds: sigma2 >= rho / 2.0,
    })
}
