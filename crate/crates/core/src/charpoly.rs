//! E-characteristic polynomial of a binary cubic via Salmon's 6×6 matrix, the
//! eigen discriminant `Res(ψ, ψ′)`, and the uniqueness certificate built on it.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::det::DetBackend;
use crate::error::{Error, Result};
use crate::poly::UniPoly;
use crate::rng::stream_rng;
use crate::scalar::{format_rational, Scalar};
use crate::tensor::SymTensor;

/// Number of perturbed evaluations behind the float error bound.
pub const PERTURBATION_SAMPLES: usize = 20;
/// Relative size of each componentwise perturbation.
pub const PERTURBATION_SIZE: f64 = 1e-12;
/// `D_eig(cT) = c^52 · D_eig(T)`.
pub const DISCRIMINANT_DEGREE: i32 = 52;

fn lin<S: Scalar>(c0: S, c1: S, c2: S) -> UniPoly<S> {
    UniPoly::new(vec![c0, c1, c2])
}

/// Salmon's matrix `G(λ)` for the binary cubic with entries
/// `(T₁₁₁, T₁₁₂, T₁₂₂, T₂₂₂) = (a, b, c, d)`, row-major with polynomial entries.
/// Columns index the monomials `x², y², z², xy, xz, yz`.
pub fn salmon_matrix<S: Scalar>(entries: &[S; 4]) -> Vec<UniPoly<S>> {
    let [a, b, c, d] = entries.clone();
    let k = |n: i64| S::from_ratio(n, 1);
    let z = S::zero;
    let cst = |v: S| lin(v, z(), z());
    let lam = |v: S| lin(z(), v, z());
    let ad = a.clone() * d.clone();
    let bc = b.clone() * c.clone();
    let cross = cst(k(8) * bc.clone() - k(8) * ad.clone());
    vec![
        // F₀, F₁, F₂ coefficient rows
        cst(a.clone()),
        cst(c.clone()),
        cst(z()),
        cst(k(2) * b.clone()),
        lam(k(-1)),
        cst(z()),
        cst(b.clone()),
        cst(d.clone()),
        cst(z()),
        cst(k(2) * c.clone()),
        cst(z()),
        lam(k(-1)),
        cst(k(1)),
        cst(k(1)),
        cst(k(-1)),
        cst(z()),
        cst(z()),
        cst(z()),
        // partial derivatives of the Jacobian determinant
        lam(k(12) * c.clone()),
        lam(k(4) * a.clone() - k(8) * c.clone()),
        lam(k(4) * a.clone() + k(4) * c.clone()),
        lam(k(8) * d.clone() - k(16) * b.clone()),
        lin(k(16) * b.clone() * b.clone() - k(16) * a.clone() * c.clone(), z(), k(-4)),
        cross.clone(),
        lam(k(4) * d.clone() - k(8) * b.clone()),
        lam(k(12) * b.clone()),
        lam(k(4) * b.clone() + k(4) * d.clone()),
        lam(k(8) * a.clone() - k(16) * c.clone()),
        cross.clone(),
        lin(k(16) * c.clone() * c.clone() - k(16) * b.clone() * d.clone(), z(), k(-4)),
        lin(k(8) * b.clone() * b.clone() - k(8) * a.clone() * c.clone(), z(), k(-2)),
        lin(k(8) * c.clone() * c.clone() - k(8) * b.clone() * d.clone(), z(), k(-2)),
        lin(z(), z(), k(-6)),
        cross,
        lam(k(8) * c.clone() + k(8) * a.clone()),
        lam(k(8) * b + k(8) * d),
    ]
}

fn check_binary_cubic<S: Scalar>(s: &SymTensor<S>) -> Result<[S; 4]> {
    s.binary_cubic_entries().map_err(|_| {
        Error::Unsupported(format!(
            "characteristic polynomials are implemented for symmetric 2×2×2 tensors only, got shape {:?}",
            s.shape()
        ))
    })
}

/// `ψ_S(λ) = det G(λ) / 512`.
pub fn salmon_char_poly<S: DetBackend>(s: &SymTensor<S>) -> Result<UniPoly<S>> {
    let entries = check_binary_cubic(s)?;
    let det = S::poly_det(salmon_matrix(&entries), 6);
    Ok(det.scale(&S::from_ratio(1, 512)))
}

/// Sylvester matrix of `p` (degree m) and `q` (degree n), `(m+n)²` row-major:
/// n shifted rows of `p` followed by m shifted rows of `q`, coefficients in
/// descending degree.
pub fn sylvester_matrix<S: Scalar>(p: &UniPoly<S>, q: &UniPoly<S>) -> Result<(Vec<S>, usize)> {
    let (Some(m), Some(n)) = (p.degree(), q.degree()) else {
        return Err(Error::InvalidArgument("resultant of the zero polynomial".into()));
    };
    let size = m + n;
    let mut out = vec![S::zero(); size * size];
    for row in 0..n {
        for k in 0..=m {
            out[row * size + row + k] = p.coeff(m - k);
        }
    }
    for row in 0..m {
        for k in 0..=n {
            out[(n + row) * size + row + k] = q.coeff(n - k);
        }
    }
    Ok((out, size))
}

/// `Res(p, q) = lc(p)^{deg q} · ∏ q(αᵢ)` over the roots of `p`. A constant
/// argument gives `lc^{deg}` of the other.
pub fn sylvester_resultant<S: DetBackend>(p: &UniPoly<S>, q: &UniPoly<S>) -> Result<S> {
    let (matrix, size) = sylvester_matrix(p, q)?;
    if size == 0 {
        return Ok(S::one());
    }
    Ok(S::det(matrix, size))
}

/// Zeroes float coefficients that sit below rounding noise for their degree
/// of homogeneity in the tensor entries.
fn clean_float_psi(psi: UniPoly<f64>, norm: f64) -> UniPoly<f64> {
    let coeffs = psi
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let weight = norm.powi(8 - k as i32).max(f64::MIN_POSITIVE);
            if c.abs() <= 1e-13 * weight {
                0.0
            } else {
                c
            }
        })
        .collect();
    UniPoly::new(coeffs)
}

/// Backend-specific pipeline from tensor to `(ψ, D_eig)`.
pub trait CharPolyBackend: DetBackend {
    fn psi(s: &SymTensor<Self>) -> Result<UniPoly<Self>>;
    fn render(x: &Self) -> String;
}

impl CharPolyBackend for BigRational {
    fn psi(s: &SymTensor<Self>) -> Result<UniPoly<Self>> {
        salmon_char_poly(s)
    }

    fn render(x: &Self) -> String {
        format_rational(x)
    }
}

impl CharPolyBackend for f64 {
    fn psi(s: &SymTensor<Self>) -> Result<UniPoly<Self>> {
        let psi = salmon_char_poly(s)?;
        Ok(clean_float_psi(psi, s.hs_norm()))
    }

    fn render(x: &Self) -> String {
        x.to_string()
    }
}

/// `D_eig(S) = Res(ψ_S, ψ′_S)`; a `6 + 5 = 11` square Sylvester determinant
/// for generic inputs.
pub fn eigen_discriminant<S: CharPolyBackend>(s: &SymTensor<S>) -> Result<S> {
    let psi = S::psi(s)?;
    discriminant_of(&psi)
}

fn discriminant_of<S: DetBackend>(psi: &UniPoly<S>) -> Result<S> {
    if psi.is_zero() {
        return Err(Error::Indeterminate);
    }
    if psi.degree() == Some(0) {
        // ψ′ vanishes: no eigenvalues at all, hence nothing to collide
        return Ok(S::one());
    }
    sylvester_resultant(psi, &psi.derivative())
}

fn rational(x: f64) -> Result<BigRational> {
    crate::scalar::rational_from_f64(x).ok_or(Error::NonFinite(0))
}

/// Distinct real roots of `ψ_S`, computed exactly from the binary expansion
/// of the entries.
pub fn psi_real_roots(s: &SymTensor<f64>) -> Result<Vec<f64>> {
    let [a, b, c, d] = check_binary_cubic(s)?;
    let exact = SymTensor::binary_cubic(
        rational(a)?,
        rational(b)?,
        rational(c)?,
        rational(d)?,
    );
    let psi = salmon_char_poly(&exact)?;
    if psi.is_zero() {
        return Err(Error::Indeterminate);
    }
    Ok(psi.real_roots(1e-15))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedUnique,
    NotCertified,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CertifiedUnique => "certified-unique",
            Self::NotCertified => "not-certified",
            Self::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Context {
    pub symmetric: bool,
    pub nonnegative: bool,
}

/// Discriminant plus verdict. A verdict other than `CertifiedUnique` does not
/// assert non-uniqueness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub psi: Vec<String>,
    pub discriminant: String,
    pub verdict: Verdict,
    pub backend: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<f64>,
    pub context: Context,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

/// Exact certificate: unique iff `D_eig ≠ 0`.
pub fn certify_unique(s: &SymTensor<BigRational>) -> Result<Certificate> {
    let psi = salmon_char_poly(s)?;
    let disc = discriminant_of(&psi)?;
    let verdict = if disc.is_zero() {
        Verdict::NotCertified
    } else {
        Verdict::CertifiedUnique
    };
    Ok(Certificate {
        psi: psi.coeff_strings(),
        discriminant: format_rational(&disc),
        verdict,
        backend: BigRational::NAME,
        error_bound: None,
        context: Context {
            symmetric: true,
            nonnegative: s.data().iter().all(|x| !x.is_negative()),
        },
    })
}

/// Float discriminant with a heuristic error bound: the largest deviation of
/// `D_eig` over seeded componentwise perturbations of relative size 1e-12.
pub fn float_discriminant(s: &SymTensor<f64>) -> Result<(f64, f64)> {
    let disc = eigen_discriminant(s)?;
    let mut rng = stream_rng(0x5a1a_0d15, 0);
    let mut bound = 0.0f64;
    for _ in 0..PERTURBATION_SAMPLES {
        let [a, b, c, d] = check_binary_cubic(s)?;
        let mut jitter = |x: f64| {
            let e: f64 = StandardNormal.sample(&mut rng);
            x * (1.0 + PERTURBATION_SIZE * e)
        };
        let p = SymTensor::binary_cubic(jitter(a), jitter(b), jitter(c), jitter(d));
        let dp = eigen_discriminant(&p)?;
        bound = bound.max((dp - disc).abs());
    }
    Ok((disc, bound))
}

/// Float certificate: unique iff `|D_eig|` exceeds the perturbation bound.
pub fn certify_unique_float(s: &SymTensor<f64>) -> Result<Certificate> {
    let psi = f64::psi(s)?;
    if psi.is_zero() {
        return Err(Error::Indeterminate);
    }
    let (disc, bound) = float_discriminant(s)?;
    let verdict = if disc.abs() > bound {
        Verdict::CertifiedUnique
    } else {
        Verdict::Indeterminate
    };
    Ok(Certificate {
        psi: psi.coeffs().iter().map(f64::render).collect(),
        discriminant: f64::render(&disc),
        verdict,
        backend: f64::NAME,
        error_bound: Some(bound),
        context: Context {
            symmetric: true,
            nonnegative: s.data().iter().all(|&x| x >= 0.0),
        },
    })
}
