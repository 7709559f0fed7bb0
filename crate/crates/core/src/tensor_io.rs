//! JSON files for tensors.
//!
//! Partially symmetric: `{"factors": [{"dim": 2, "degree": 3}], "coeffs": [[re, im], …]}`
//! with coefficients in graded-lex order (lex-decreasing exponents, first factor most
//! significant). Exterior: `{"exterior": {"dim": 4, "k": 2}, "coeffs": […]}` with subsets
//! in lex order. A coefficient may also be a bare real number.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cjson;
use crate::error::{Error, Result};
use crate::exterior::AlternatingTensor;
use crate::tensor::{Factor, PsTensor, Shape, C64};

#[derive(Deserialize)]
#[serde(untagged)]
enum Coeff {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Coeff> for C64 {
    fn from(c: Coeff) -> Self {
        match c {
            Coeff::Pair(p) => cjson::from_pair(p),
            Coeff::Real(x) => C64::new(x, 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExteriorShape {
    pub dim: usize,
    pub k: usize,
}

#[derive(Deserialize)]
struct RawTensor {
    factors: Option<Vec<Factor>>,
    exterior: Option<ExteriorShape>,
    coeffs: Vec<Coeff>,
}

#[derive(Serialize)]
struct PsOut<'a> {
    factors: &'a [Factor],
    #[serde(with = "cjson::vec")]
    coeffs: Vec<C64>,
}

#[derive(Serialize)]
struct ExtOut {
    exterior: ExteriorShape,
    #[serde(with = "cjson::vec")]
    coeffs: Vec<C64>,
}

/// A tensor read from JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum TensorData {
    Partial(PsTensor),
    Exterior(AlternatingTensor),
}

impl TensorData {
    pub fn describe(&self) -> String {
        match self {
            TensorData::Partial(f) => f
                .shape()
                .factors()
                .iter()
                .map(|fac| format!("S^{}C^{}", fac.degree, fac.dim))
                .collect::<Vec<_>>()
                .join("⊗"),
            TensorData::Exterior(f) => format!("∧^{}C^{}", f.k(), f.dim()),
        }
    }
}

pub fn parse_tensor(text: &str) -> Result<TensorData> {
    tensor_from_value(serde_json::from_str(text)?)
}

pub fn tensor_from_value(v: Value) -> Result<TensorData> {
    let raw: RawTensor = serde_json::from_value(v)?;
    let coeffs: Vec<C64> = raw.coeffs.into_iter().map(C64::from).collect();
    match (raw.factors, raw.exterior) {
        (Some(factors), None) => Ok(TensorData::Partial(PsTensor::new(Shape::new(factors)?, coeffs)?)),
        (None, Some(e)) => Ok(TensorData::Exterior(AlternatingTensor::new(e.dim, e.k, coeffs)?)),
        _ => Err(Error::InvalidInput(
            "tensor JSON needs exactly one of \"factors\" or \"exterior\"".into(),
        )),
    }
}

pub fn read_tensor(path: &Path) -> Result<TensorData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tensor(&text)
}

pub fn ps_to_value(f: &PsTensor) -> Value {
    serde_json::to_value(PsOut {
        factors: f.shape().factors(),
        coeffs: f.coeffs().to_vec(),
    })
    .expect("plain data serializes")
}

pub fn exterior_to_value(f: &AlternatingTensor) -> Value {
    serde_json::to_value(ExtOut {
        exterior: ExteriorShape { dim: f.dim(), k: f.k() },
        coeffs: f.coeffs().to_vec(),
    })
    .expect("plain data serializes")
}

pub fn tensor_to_value(t: &TensorData) -> Value {
    match t {
        TensorData::Partial(f) => ps_to_value(f),
        TensorData::Exterior(f) => exterior_to_value(f),
    }
}

/// Writes pretty JSON followed by a newline.
pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `{"vectors": [[[re, im], …], …]}`, the form used for points given as tuples.
pub fn parse_vectors(v: &Value) -> Option<Result<Vec<Vec<C64>>>> {
    let list = v.get("vectors")?;
    Some(
        serde_json::from_value::<Vec<Vec<Coeff>>>(list.clone())
            .map(|vs| {
                vs.into_iter()
                    .map(|row| row.into_iter().map(C64::from).collect())
                    .collect()
            })
            .map_err(Error::from),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_partial() {
        let f = PsTensor::from_real(Shape::binary(&[1, 1]).unwrap(), &[1.0, -2.0, 0.5, 3.0]).unwrap();
        let text = serde_json::to_string(&ps_to_value(&f)).unwrap();
        assert_eq!(parse_tensor(&text).unwrap(), TensorData::Partial(f));
    }

    #[test]
    fn round_trip_exterior() {
        let f = AlternatingTensor::new(4, 2, (0..6).map(|i| C64::new(i as f64, -1.0)).collect()).unwrap();
        let text = serde_json::to_string(&exterior_to_value(&f)).unwrap();
        assert_eq!(parse_tensor(&text).unwrap(), TensorData::Exterior(f));
    }

    #[test]
    fn real_numbers_accepted() {
        let t = parse_tensor(r#"{"factors":[{"dim":2,"degree":2}],"coeffs":[1,[0,1],2.5]}"#).unwrap();
        let TensorData::Partial(f) = t else { panic!() };
        assert_eq!(f.coeffs()[1], C64::new(0.0, 1.0));
    }

    #[test]
    fn length_mismatch_rejected() {
        let err = parse_tensor(r#"{"factors":[{"dim":2,"degree":2}],"coeffs":[1,2]}"#).unwrap_err();
        assert!(matches!(err, Error::CoefficientLength { expected: 3, got: 2 }));
        let err = parse_tensor(r#"{"exterior":{"dim":4,"k":2},"coeffs":[1,2,3]}"#).unwrap_err();
        assert!(matches!(err, Error::CoefficientLength { expected: 6, got: 3 }));
    }

    #[test]
    fn ambiguous_kind_rejected() {
        assert!(parse_tensor(r#"{"coeffs":[1]}"#).is_err());
    }

    #[test]
    fn vectors_parse() {
        let v: Value = serde_json::from_str(r#"{"vectors":[[1,[0,2]],[3,4]]}"#).unwrap();
        let vs = parse_vectors(&v).unwrap().unwrap();
        assert_eq!(vs[0][1], C64::new(0.0, 2.0));
        assert!(parse_vectors(&serde_json::json!({"coeffs": []})).is_none());
    }
}
