//! Fixed workloads shared by the criterion benches.

use tenscert::rng::{normal_tensor, stream_rng, uniform_tensor};
use tenscert::scalar::ratio;
use tenscert::{BigRational, DenseTensor, NonnegTensor, PositiveTensor, SymTensor};

pub const SEED: u64 = 0xbe9c;

/// Gaussian tensor of the given shape.
pub fn gaussian(shape: &[usize]) -> DenseTensor {
    normal_tensor(&mut stream_rng(SEED, shape.len() as u64), shape)
}

pub fn nonneg(shape: &[usize]) -> NonnegTensor {
    NonnegTensor::new(uniform_tensor(&mut stream_rng(SEED, 10 + shape.len() as u64), shape, 0.0, 1.0))
        .expect("uniform draws are nonnegative")
}

pub fn positive(shape: &[usize]) -> PositiveTensor {
    PositiveTensor::new(uniform_tensor(&mut stream_rng(SEED, 20 + shape.len() as u64), shape, 0.05, 1.0))
        .expect("draws are bounded away from zero")
}

/// Generic rational binary cubic.
pub fn rational_cubic() -> SymTensor<BigRational> {
    SymTensor::binary_cubic(ratio(1, 1), ratio(2, 3), ratio(-1, 2), ratio(5, 7))
}

pub fn float_cubic() -> SymTensor<f64> {
    SymTensor::binary_cubic(0.8, -0.35, 0.6, 0.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_are_deterministic() {
        assert_eq!(gaussian(&[3, 3, 3]), gaussian(&[3, 3, 3]));
        assert_eq!(nonneg(&[2, 2, 2]).data(), nonneg(&[2, 2, 2]).data());
        assert!(positive(&[3, 3, 3]).data().iter().all(|&x| x > 0.0));
    }
}
