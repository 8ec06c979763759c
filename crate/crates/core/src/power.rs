//! Extended nonnegative powers in watts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{MapError, Result};

/// A power in watts, or `INFINITY` when a base station cannot serve a mobile.
///
/// Never negative and never NaN, so the ordering is total.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ExtendedPower(f64);

impl ExtendedPower {
    pub const INFINITY: ExtendedPower = ExtendedPower(f64::INFINITY);
    pub const ZERO: ExtendedPower = ExtendedPower(0.0);

    pub fn new(watts: f64) -> Result<Self> {
        if watts.is_nan() || watts < 0.0 {
            return Err(MapError::InvalidValue(format!(
                "power must be nonnegative, got {watts}"
            )));
        }
        Ok(ExtendedPower(watts))
    }

    /// Panics on NaN or negative input. Meant for literals in tests and examples.
    pub fn watts(watts: f64) -> Self {
        Self::new(watts).expect("valid power")
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        !self.0.is_finite()
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }
}

impl Eq for ExtendedPower {}

impl PartialOrd for ExtendedPower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedPower {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for ExtendedPower {
    type Output = ExtendedPower;

    fn add(self, rhs: ExtendedPower) -> ExtendedPower {
        // inf + x = inf; both operands are >= 0 so no inf - inf can arise
        ExtendedPower(self.0 + rhs.0)
    }
}

impl std::iter::Sum for ExtendedPower {
    fn sum<I: Iterator<Item = ExtendedPower>>(iter: I) -> Self {
        iter.fold(ExtendedPower::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for ExtendedPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            // shortest representation that round-trips
            write!(f, "{:?}", self.0)
        }
    }
}

impl FromStr for ExtendedPower {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(ExtendedPower::INFINITY);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| MapError::Parse(format!("not a power value: {t:?}")))?;
        ExtendedPower::new(v)
    }
}

impl Serialize for ExtendedPower {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedPower {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => ExtendedPower::new(v).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_nan() {
        assert!(ExtendedPower::new(-1.0).is_err());
        assert!(ExtendedPower::new(f64::NAN).is_err());
        assert!(ExtendedPower::new(0.0).is_ok());
    }

    #[test]
    fn infinity_is_greatest_and_absorbing() {
        let inf = ExtendedPower::INFINITY;
        assert!(inf > ExtendedPower::watts(1e300));
        assert_eq!(inf + ExtendedPower::watts(3.0), inf);
        assert_eq!(inf.cmp(&inf), Ordering::Equal);
    }

    #[test]
    fn text_round_trip() {
        for v in [
            ExtendedPower::watts(12.43),
            ExtendedPower::INFINITY,
            ExtendedPower::watts(1e-11),
        ] {
            let back: ExtendedPower = v.to_string().parse().unwrap();
            assert_eq!(back, v);
        }
        assert!("-3".parse::<ExtendedPower>().is_err());
        assert!("abc".parse::<ExtendedPower>().is_err());
    }

    #[test]
    fn json_uses_inf_string() {
        let v = vec![ExtendedPower::watts(2.5), ExtendedPower::INFINITY];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[2.5,"inf"]"#);
        let back: Vec<ExtendedPower> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
