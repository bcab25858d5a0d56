//! Serialization helpers: exact rationals in config files and
//! round-trip-safe floats in result files.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smooth_moments::{parse_rational, Exponent, Rational};

/// A config value read as an exact rational.
///
/// Accepts JSON integers, JSON floats (read through their shortest decimal
/// form, so `0.1` is `1/10`) and strings such as `"7/2"` or `"1e-3"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalValue(pub Rational);

impl RationalValue {
    pub fn parse(text: &str) -> Result<Self, smooth_moments::Error> {
        parse_rational(text).map(RationalValue)
    }

    pub fn approx(&self) -> f64 {
        self.0.approx()
    }

    /// `Some(s)` when the value is the even positive integer `2s`.
    pub fn even_half(&self) -> Option<u32> {
        let two = Rational::from_integer(2.into());
        let half = &self.0 / two;
        (half.is_integer() && half.numer() > &0.into())
            .then(|| u32::try_from(half.to_integer()).ok())
            .flatten()
    }
}

impl fmt::Display for RationalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for RationalValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for RationalValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RationalValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a rational string like \"7/2\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                Ok(RationalValue(Rational::from_integer(v.into())))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(RationalValue(Rational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                if !v.is_finite() {
                    return Err(E::custom(format!("not finite: {v}")));
                }
                RationalValue::parse(&format!("{v:e}")).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                RationalValue::parse(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Formats with 17 significant digits, which round-trips every `f64`.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Writes an `f64` as a 17-significant-digit string and reads it back from
/// either a string or a bare number.
pub mod float17 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt17(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a float or its decimal string")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                v.trim().parse().map_err(|_| E::custom(format!("not a float: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for v in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e300, 5e-324, -0.0, 44.0, f64::MAX] {
            let back: f64 = fmt17(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
        }
        assert_eq!(fmt17(f64::NAN), "NaN");
        assert!(fmt17(f64::INFINITY).parse::<f64>().unwrap().is_infinite());
    }

    #[test]
    fn rational_values_from_json() {
        let vals: Vec<RationalValue> = serde_json::from_str(r#"[4, "7/2", 0.1, "1e-2", 13]"#).unwrap();
        let text: Vec<String> = vals.iter().map(ToString::to_string).collect();
        assert_eq!(text, ["4", "7/2", "1/10", "1/100", "13"]);
        assert_eq!(vals[0].even_half(), Some(2));
        assert_eq!(vals[1].even_half(), None);
        assert_eq!(vals[4].even_half(), None);
        assert!(serde_json::from_str::<RationalValue>(r#""abc""#).is_err());
    }
}
