//! Wire representations shared by every report.
//!
//! Rationals travel as `{"num": "...", "den": "..."}` decimal strings in
//! lowest terms so that consumers never truncate to 64 bits.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Version of every top-level JSON document.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalRepr {
    fn from(x: &BigRational) -> Self {
        // BigRational is always kept reduced with a positive denominator.
        Self {
            num: x.numer().to_string(),
            den: x.denom().to_string(),
        }
    }
}

impl TryFrom<&RationalRepr> for BigRational {
    type Error = Error;

    fn try_from(r: &RationalRepr) -> Result<Self> {
        let bad = |reason: &str| Error::Precondition(format!("invalid rational {r:?}: {reason}"));
        let num: BigInt = r.num.parse().map_err(|_| bad("numerator"))?;
        let den: BigInt = r.den.parse().map_err(|_| bad("denominator"))?;
        if den == BigInt::from(0) {
            return Err(bad("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }
}

pub fn rational<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    RationalRepr::from(x).serialize(s)
}

pub fn rational_opt<S: Serializer>(
    x: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    x.as_ref().map(RationalRepr::from).serialize(s)
}

pub fn rational_vec<S: Serializer>(
    xs: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(RationalRepr::from))
}

pub fn display<T: std::fmt::Display, S: Serializer>(
    x: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub fn display_vec<T: std::fmt::Display, S: Serializer>(
    xs: &[T],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

pub fn display_opt<T: std::fmt::Display, S: Serializer>(
    x: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    x.as_ref().map(|v| v.to_string()).serialize(s)
}

/// Wraps a payload in the versioned top-level document.
pub fn document<T: Serialize>(command: &str, payload: &T) -> serde_json::Value {
    let mut doc = serde_json::json!({
        "schema": SCHEMA_VERSION,
        "command": command,
    });
    let value = serde_json::to_value(payload).expect("reports serialize infallibly");
    if let (Some(obj), serde_json::Value::Object(fields)) = (doc.as_object_mut(), value) {
        obj.extend(fields);
    }
    doc
}
