//! Best rank-one and nonnegative rank-r approximation of small dense real
//! tensors, with exact uniqueness certificates for binary cubics.

pub mod charpoly;
pub mod det;
pub mod equiv;
pub mod error;
pub mod io;
pub mod linalg;
pub mod newton;
pub mod nnapprox;
pub mod poly;
pub mod rankone;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use num_rational::BigRational;
pub use poly::UniPoly;
pub use scalar::Scalar;
pub use tensor::{DenseTensor, NonnegTensor, PositiveTensor, SymTensor};
