//! JSON tensor files.
//!
//! ```json
//! {"shape": [2, 2], "data": [1, 0, 0, 1], "symmetric": true}
//! ```
//!
//! `data` is row-major with the last index fastest. Entries are JSON numbers
//! or strings holding an exact value (`"p/q"`, an integer, or a finite
//! decimal such as `"0.25"`); any string entry selects the exact-rational
//! backend. `"symmetric": true` makes the loader check permutation
//! invariance.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, rational_from_f64, Scalar};
use crate::tensor::{DenseTensor, SymTensor};

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Number(f64),
    Exact(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    shape: Vec<usize>,
    data: Vec<RawEntry>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    symmetric: bool,
}

/// Tensor as stored on disk, in the backend the file asks for.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedTensor {
    Float(DenseTensor<f64>),
    Rational(DenseTensor<BigRational>),
}

impl LoadedTensor {
    pub fn shape(&self) -> &[usize] {
        match self {
            Self::Float(t) => t.shape(),
            Self::Rational(t) => t.shape(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Rational(_))
    }

    pub fn to_f64(&self) -> DenseTensor<f64> {
        match self {
            Self::Float(t) => t.clone(),
            Self::Rational(t) => t.to_f64(),
        }
    }

    /// Exact rational view; binary floats convert without rounding.
    pub fn to_rational(&self) -> DenseTensor<BigRational> {
        match self {
            Self::Float(t) => t.to_rational(),
            Self::Rational(t) => t.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorFile {
    pub tensor: LoadedTensor,
    pub symmetric: bool,
}

/// Parses an exact scalar: `p/q`, an integer, or a finite decimal.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("cannot parse {text:?} as an exact number"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int {
            "" | "-" | "+" => BigInt::zero(),
            _ => int.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = BigRational::new(frac_part, scale);
        let whole = BigRational::from_integer(int_part);
        return Ok(if negative {
            whole - magnitude
        } else {
            whole + magnitude
        });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Parses the JSON text of a tensor file.
pub fn parse_str(text: &str) -> Result<TensorFile> {
    let raw: RawFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let exact = raw.data.iter().any(|e| matches!(e, RawEntry::Exact(_)));
    let tensor = if exact {
        let mut data = Vec::with_capacity(raw.data.len());
        for (pos, entry) in raw.data.iter().enumerate() {
            data.push(match entry {
                RawEntry::Number(x) => rational_from_f64(*x).ok_or(Error::NonFinite(pos))?,
                RawEntry::Exact(s) => parse_rational(s)?,
            });
        }
        let t = DenseTensor::new(raw.shape, data)?;
        if raw.symmetric {
            SymTensor::new(t.clone())?;
        }
        LoadedTensor::Rational(t)
    } else {
        let data = raw
            .data
            .iter()
            .map(|e| match e {
                RawEntry::Number(x) => *x,
                RawEntry::Exact(_) => unreachable!(),
            })
            .collect();
        let t = DenseTensor::new(raw.shape, data)?;
        if raw.symmetric {
            SymTensor::new(t.clone())?;
        }
        LoadedTensor::Float(t)
    };
    Ok(TensorFile {
        tensor,
        symmetric: raw.symmetric,
    })
}

pub fn load(path: impl AsRef<Path>) -> Result<TensorFile> {
    parse_str(&fs::read_to_string(path)?)
}

/// Loads a file and converts it to the float backend.
pub fn load_f64(path: impl AsRef<Path>) -> Result<DenseTensor<f64>> {
    Ok(load(path)?.tensor.to_f64())
}

/// Scalars that know how to write themselves into a tensor file.
pub trait FileScalar: Scalar {
    #[doc(hidden)]
    fn to_entry(&self) -> serde_json::Value;
}

impl FileScalar for f64 {
    fn to_entry(&self) -> serde_json::Value {
        serde_json::Value::from(*self)
    }
}

impl FileScalar for BigRational {
    fn to_entry(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
}

/// Serializes a tensor to the file format. Rational entries are written as
/// strings, so the backend survives a round trip.
pub fn to_json_string<S: FileScalar>(t: &DenseTensor<S>, symmetric: bool) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("shape".into(), serde_json::json!(t.shape()));
    obj.insert(
        "data".into(),
        serde_json::Value::Array(t.data().iter().map(|x| x.to_entry()).collect()),
    );
    if symmetric {
        obj.insert("symmetric".into(), serde_json::Value::Bool(true));
    }
    serde_json::Value::Object(obj).to_string()
}

pub fn save<S: FileScalar>(t: &DenseTensor<S>, symmetric: bool, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json_string(t, symmetric))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn identity_matrix() {
        let f = parse_str(r#"{"shape":[2,2],"data":[1,0,0,1]}"#).unwrap();
        assert!(!f.symmetric);
        assert_eq!(f.tensor.to_f64().data(), &[1.0, 0.0, 0.0, 1.0]);
        assert!(!f.tensor.is_exact());
    }

    #[test]
    fn length_mismatch() {
        let err = parse_str(r#"{"shape":[2],"data":[1,2,3]}"#).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_str("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_str(r#"{"shape":[1],"data":["nan"]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_str(r#"{"shape":[1],"data":["1/0"]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_str(r#"{"shape":[0],"data":[]}"#),
            Err(Error::InvalidShape(_))
        ));
        assert!(matches!(
            parse_str(r#"{"shape":[1],"data":[1],"extra":0}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn exact_strings_select_rational_backend() {
        let f = parse_str(r#"{"shape":[3],"data":["1/3", 0.5, "-2.25"]}"#).unwrap();
        match f.tensor {
            LoadedTensor::Rational(t) => {
                assert_eq!(t.data(), &[ratio(1, 3), ratio(1, 2), ratio(-9, 4)]);
            }
            LoadedTensor::Float(_) => panic!("expected rational backend"),
        }
    }

    #[test]
    fn symmetric_flag_is_checked() {
        let ok = r#"{"shape":[2,2],"data":[1,2,2,3],"symmetric":true}"#;
        assert!(parse_str(ok).unwrap().symmetric);
        let bad = r#"{"shape":[2,2],"data":[1,2,2.5,3],"symmetric":true}"#;
        assert!(matches!(parse_str(bad), Err(Error::NotSymmetric { .. })));
        let exact = r#"{"shape":[2,2],"data":["1","2","2","1/3"],"symmetric":true}"#;
        assert!(parse_str(exact).is_ok());
        let not_cubical = r#"{"shape":[2,3],"data":[1,2,3,4,5,6],"symmetric":true}"#;
        assert!(matches!(parse_str(not_cubical), Err(Error::NotCubical(_))));
    }

    #[test]
    fn random_float_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let t = DenseTensor::from_fn(vec![3, 3, 3], |_| rng.random_range(-1.0..1.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        save(&t, false, &path).unwrap();
        assert_eq!(load_f64(&path).unwrap(), t);
    }

    #[test]
    fn rational_round_trip() {
        let t = DenseTensor::new(vec![2], vec![ratio(-7, 3), ratio(4, 1)]).unwrap();
        let f = parse_str(&to_json_string(&t, false)).unwrap();
        assert_eq!(f.tensor, LoadedTensor::Rational(t));
    }
}
