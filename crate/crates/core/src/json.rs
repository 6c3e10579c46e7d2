//! Serde helpers that keep exact numbers exact: big integers as decimal
//! strings and rationals as `"p/q"` strings.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::{SerializeSeq, Serializer};

pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Nearest `f64`, for the `_approx` convenience fields.
pub fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn big<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(v))
}

pub fn rationals<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&rational_string(r))?;
    }
    seq.end()
}

pub fn rational_rows<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = v
        .iter()
        .map(|row| row.iter().map(rational_string).collect())
        .collect();
    serde::Serialize::serialize(&rows, s)
}

pub fn big_rows<S: Serializer>(v: &[Vec<BigUint>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = v
        .iter()
        .map(|row| row.iter().map(|x| x.to_string()).collect())
        .collect();
    serde::Serialize::serialize(&rows, s)
}

pub fn bigs<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}
