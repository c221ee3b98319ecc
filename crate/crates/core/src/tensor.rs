//! Dense row-major tensors and the multilinear operations every solver is
//! built from.
//!
//! Entries are addressed with zero-based multi-indices; the last index runs
//! fastest in the flat buffer.

use std::ops::Deref;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{rational_from_f64, Scalar};

/// A dense real tensor of order `d = shape.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<S = f64> {
    shape: Vec<usize>,
    data: Vec<S>,
}

fn checked_len(shape: &[usize]) -> Result<usize> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(Error::InvalidShape(shape.to_vec()));
    }
    Ok(shape.iter().product())
}

/// Advances a row-major odometer; returns false once it wraps around.
pub(crate) fn advance(index: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..shape.len()).rev() {
        index[k] += 1;
        if index[k] < shape[k] {
            return true;
        }
        index[k] = 0;
    }
    false
}

/// All permutations of `0..d`, identity first.
pub(crate) fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(d), &mut vec![false; d], &mut out);
    out
}

impl<S: Scalar> DenseTensor<S> {
    pub fn new(shape: Vec<usize>, data: Vec<S>) -> Result<Self> {
        let expected = checked_len(&shape)?;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                shape,
                expected,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite_val()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let len = checked_len(&shape)?;
        Ok(Self {
            shape,
            data: vec![S::zero(); len],
        })
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> S) -> Result<Self> {
        let len = checked_len(&shape)?;
        let mut data = Vec::with_capacity(len);
        let mut index = vec![0; shape.len()];
        loop {
            data.push(f(&index));
            if !advance(&mut index, &shape) {
                break;
            }
        }
        Self::new(shape, data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn offset(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "index of length {} for a tensor of order {}",
                index.len(),
                self.order()
            )));
        }
        let mut flat = 0;
        for (k, (&i, &n)) in index.iter().zip(&self.shape).enumerate() {
            if i >= n {
                return Err(Error::DimensionMismatch(format!(
                    "index {i} out of range {n} in mode {k}"
                )));
            }
            flat = flat * n + i;
        }
        Ok(flat)
    }

    pub fn get(&self, index: &[usize]) -> Result<&S> {
        let flat = self.offset(index)?;
        Ok(&self.data[flat])
    }

    /// Multi-index of a flat position.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.order()];
        for k in (0..self.order()).rev() {
            index[k] = flat % self.shape[k];
            flat /= self.shape[k];
        }
        index
    }

    pub fn is_cubical(&self) -> bool {
        self.shape.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DenseTensor<T> {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch(format!(
                "shapes {:?} and {:?} differ",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(Self {
            shape: self.shape.clone(),
            data,
        })
    }

    /// Full contraction `<A, B>`.
    pub fn inner(&self, other: &Self) -> Result<S> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// Contracts every mode not listed in `keep` against the matching entry of
    /// `vecs` (which has one slot per mode; kept slots are ignored). The result
    /// has the kept modes in increasing order; keeping no mode yields a 1-entry
    /// tensor of shape `[1]`.
    pub(crate) fn contract_keep(&self, keep: &[usize], vecs: &[&[S]]) -> DenseTensor<S> {
        let d = self.order();
        let mut kept = vec![false; d];
        for &k in keep {
            kept[k] = true;
        }
        let out_shape: Vec<usize> = if keep.is_empty() {
            vec![1]
        } else {
            (0..d).filter(|&k| kept[k]).map(|k| self.shape[k]).collect()
        };
        let out_len = out_shape.iter().product();
        let mut out = vec![S::zero(); out_len];
        let mut index = vec![0; d];
        for value in &self.data {
            if !value.is_zero() {
                let mut w = value.clone();
                let mut pos = 0;
                for k in 0..d {
                    if kept[k] {
                        pos = pos * self.shape[k] + index[k];
                    } else {
                        w = w * vecs[k][index[k]].clone();
                    }
                }
                out[pos] = out[pos].clone() + w;
            }
            advance(&mut index, &self.shape);
        }
        DenseTensor {
            shape: out_shape,
            data: out,
        }
    }

    /// Mode-`mode` contraction where `vecs` has one vector per mode (the
    /// `mode` slot is ignored).
    pub(crate) fn contract_slots<V: AsRef<[S]>>(&self, mode: usize, vecs: &[V]) -> Vec<S> {
        let slots: Vec<&[S]> = vecs.iter().map(|v| v.as_ref()).collect();
        self.contract_keep(&[mode], &slots).data
    }

    /// Contraction keeping modes `i ≠ j`, as an `n_i × n_j` row-major matrix.
    pub(crate) fn contract_pair<V: AsRef<[S]>>(&self, i: usize, j: usize, vecs: &[V]) -> Vec<S> {
        let slots: Vec<&[S]> = vecs.iter().map(|v| v.as_ref()).collect();
        let (lo, hi) = (i.min(j), i.max(j));
        let m = self.contract_keep(&[lo, hi], &slots).data;
        if i < j {
            return m;
        }
        let (ni, nj) = (self.shape[i], self.shape[j]);
        let mut out = Vec::with_capacity(ni * nj);
        for a in 0..ni {
            for b in 0..nj {
                out.push(m[b * ni + a].clone());
            }
        }
        out
    }

    fn check_vectors<V: AsRef<[S]>>(&self, skip: Option<usize>, vecs: &[V]) -> Result<()> {
        let expected: Vec<usize> = (0..self.order())
            .filter(|&k| Some(k) != skip)
            .map(|k| self.shape[k])
            .collect();
        let got: Vec<usize> = vecs.iter().map(|v| v.as_ref().len()).collect();
        if expected != got {
            return Err(Error::DimensionMismatch(format!(
                "vector lengths {got:?} do not match expected {expected:?}"
            )));
        }
        Ok(())
    }

    /// `<T, u_1 ⊗ … ⊗ û_mode ⊗ … ⊗ u_d>`: contraction with the `d - 1` vectors
    /// of every mode except `mode`, given in mode order.
    pub fn contract_except<V: AsRef<[S]>>(&self, mode: usize, vecs: &[V]) -> Result<Vec<S>> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange {
                mode,
                order: self.order(),
            });
        }
        self.check_vectors(Some(mode), vecs)?;
        let empty: &[S] = &[];
        let mut slots: Vec<&[S]> = Vec::with_capacity(self.order());
        let mut it = vecs.iter();
        for k in 0..self.order() {
            if k == mode {
                slots.push(empty);
            } else {
                slots.push(it.next().map(|v| v.as_ref()).unwrap_or(empty));
            }
        }
        Ok(self.contract_keep(&[mode], &slots).data)
    }

    /// Multilinear Rayleigh value `<T, u_1 ⊗ … ⊗ u_d>`.
    pub fn rayleigh<V: AsRef<[S]>>(&self, vecs: &[V]) -> Result<S> {
        self.check_vectors(None, vecs)?;
        let slots: Vec<&[S]> = vecs.iter().map(|v| v.as_ref()).collect();
        Ok(self.contract_keep(&[], &slots).data.remove(0))
    }

    /// Segre outer product `v_1 ⊗ … ⊗ v_d`.
    pub fn outer<V: AsRef<[S]>>(vecs: &[V]) -> Result<Self> {
        let shape: Vec<usize> = vecs.iter().map(|v| v.as_ref().len()).collect();
        Self::from_fn(shape, |idx| {
            idx.iter()
                .zip(vecs)
                .fold(S::one(), |acc, (&i, v)| acc * v.as_ref()[i].clone())
        })
    }

    /// Applies the `rows × shape[mode]` matrix (row-major) along one mode.
    pub fn mode_product(&self, mode: usize, matrix: &[S], rows: usize) -> Result<Self> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange {
                mode,
                order: self.order(),
            });
        }
        let cols = self.shape[mode];
        if matrix.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix of {} entries cannot be {rows}x{cols}",
                matrix.len()
            )));
        }
        let mut shape = self.shape.clone();
        shape[mode] = rows;
        Self::from_fn(shape, |idx| {
            let mut src = idx.to_vec();
            let mut acc = S::zero();
            for c in 0..cols {
                src[mode] = c;
                let a = &matrix[idx[mode] * cols + c];
                if !a.is_zero() {
                    acc = acc + a.clone() * self.data[self.offset(&src).unwrap()].clone();
                }
            }
            acc
        })
    }

    /// Averages over all `d!` index permutations.
    pub fn symmetrize(&self) -> Result<SymTensor<S>> {
        if !self.is_cubical() {
            return Err(Error::NotCubical(self.shape.clone()));
        }
        let perms = permutations(self.order());
        let weight = S::from_ratio(1, perms.len() as i64);
        let sym = Self::from_fn(self.shape.clone(), |idx| {
            // evaluate on the sorted index so every orbit gets bit-identical values
            let mut idx = idx.to_vec();
            idx.sort_unstable();
            let idx = &idx[..];
            let mut permuted = vec![0; idx.len()];
            let first = &self.data[self.offset(idx).unwrap()];
            let mut acc = S::zero();
            let mut all_equal = true;
            for p in &perms {
                for (k, &pk) in p.iter().enumerate() {
                    permuted[k] = idx[pk];
                }
                let v = &self.data[self.offset(&permuted).unwrap()];
                all_equal &= v == first;
                acc = acc + v.clone();
            }
            // already-symmetric entries are returned untouched
            if all_equal {
                first.clone()
            } else {
                acc * weight.clone()
            }
        })?;
        Ok(SymTensor(sym))
    }

    fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, x| {
            let a = x.abs_val();
            if a > m {
                a
            } else {
                m
            }
        })
    }
}

impl DenseTensor<f64> {
    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Exact rational copy of the binary values.
    pub fn to_rational(&self) -> DenseTensor<BigRational> {
        DenseTensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .map(|&x| rational_from_f64(x).expect("entries are finite"))
                .collect(),
        }
    }
}

impl DenseTensor<BigRational> {
    pub fn to_f64(&self) -> DenseTensor<f64> {
        self.map(|x| x.to_f64())
    }
}

/// A cubical tensor invariant under every permutation of its indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<S = f64>(DenseTensor<S>);

impl<S: Scalar> SymTensor<S> {
    /// Checks permutation invariance: exactly for rationals, to 1e-12 of the
    /// largest entry for floats.
    pub fn new(t: DenseTensor<S>) -> Result<Self> {
        if !t.is_cubical() {
            return Err(Error::NotCubical(t.shape.clone()));
        }
        let scale = t.max_abs();
        let mut index = vec![0; t.order()];
        for value in &t.data {
            let mut sorted = index.clone();
            sorted.sort_unstable();
            let other = &t.data[t.offset(&sorted)?];
            if !S::sym_close(value, other, &scale) {
                return Err(Error::NotSymmetric { index });
            }
            advance(&mut index, &t.shape);
        }
        Ok(Self(t))
    }

    /// Order-3 tensor on a 2-dimensional space from its four distinct
    /// entries `T111, T112, T122, T222`.
    pub fn binary_cubic(t111: S, t112: S, t122: S, t222: S) -> Self {
        let vals = [t111, t112, t122, t222];
        let t = DenseTensor::from_fn(vec![2, 2, 2], |idx| vals[idx.iter().sum::<usize>()].clone())
            .expect("fixed shape");
        Self(t)
    }

    /// The four distinct entries `T111, T112, T122, T222` of an order-3
    /// tensor on a 2-dimensional space.
    pub fn binary_cubic_entries(&self) -> Result<[S; 4]> {
        if self.0.shape != [2, 2, 2] {
            return Err(Error::Unsupported(format!(
                "expected order 3 and dimension 2, got shape {:?}",
                self.0.shape
            )));
        }
        let e = |i: &[usize]| self.0.get(i).unwrap().clone();
        Ok([e(&[0, 0, 0]), e(&[0, 0, 1]), e(&[0, 1, 1]), e(&[1, 1, 1])])
    }

    pub fn dim(&self) -> usize {
        self.0.shape[0]
    }

    pub fn as_dense(&self) -> &DenseTensor<S> {
        &self.0
    }

    pub fn into_dense(self) -> DenseTensor<S> {
        self.0
    }

    /// `g · S`: the same `n × n` matrix applied along every mode.
    pub fn transform(&self, g: &[S]) -> Result<Self> {
        let n = self.dim();
        let mut t = self.0.clone();
        for mode in 0..t.order() {
            t = t.mode_product(mode, g, n)?;
        }
        // rounding can break exact permutation invariance
        t.symmetrize()
    }
}

impl<S> Deref for SymTensor<S> {
    type Target = DenseTensor<S>;
    fn deref(&self) -> &DenseTensor<S> {
        &self.0
    }
}

/// A tensor with every entry `>= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegTensor(DenseTensor<f64>);

impl NonnegTensor {
    pub fn new(t: DenseTensor<f64>) -> Result<Self> {
        if let Some(pos) = t.data.iter().position(|&x| x < 0.0) {
            return Err(Error::Negative {
                index: t.multi_index(pos),
                value: t.data[pos],
            });
        }
        Ok(Self(t))
    }

    pub fn as_dense(&self) -> &DenseTensor<f64> {
        &self.0
    }

    pub fn into_dense(self) -> DenseTensor<f64> {
        self.0
    }
}

impl Deref for NonnegTensor {
    type Target = DenseTensor<f64>;
    fn deref(&self) -> &DenseTensor<f64> {
        &self.0
    }
}

/// A tensor with every entry `> 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveTensor(NonnegTensor);

impl PositiveTensor {
    pub fn new(t: DenseTensor<f64>) -> Result<Self> {
        if let Some(pos) = t.data.iter().position(|&x| x <= 0.0) {
            return Err(Error::NotPositive {
                index: t.multi_index(pos),
                value: t.data[pos],
            });
        }
        Ok(Self(NonnegTensor(t)))
    }

    pub fn as_nonneg(&self) -> &NonnegTensor {
        &self.0
    }
}

impl Deref for PositiveTensor {
    type Target = DenseTensor<f64>;
    fn deref(&self) -> &DenseTensor<f64> {
        &self.0 .0
    }
}
