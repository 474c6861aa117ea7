//! Timestamps quantized to tenths of a second.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A point or span of time stored as a whole number of tenths of a second.
///
/// Annotation timestamps are quantized to this resolution when they enter the
/// system, so interval arithmetic downstream is exact integer arithmetic and
/// values survive any number of serialization round trips unchanged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tenths(i64);

impl Tenths {
    pub const ZERO: Tenths = Tenths(0);

    /// Quantize a value in seconds, rounding half away from zero.
    pub fn from_seconds(seconds: f64) -> Tenths {
        Tenths((seconds * 10.0).round() as i64)
    }

    pub const fn from_tenths(tenths: i64) -> Tenths {
        Tenths(tenths)
    }

    pub const fn tenths(self) -> i64 {
        self.0
    }

    pub fn seconds(self) -> f64 {
        self.0 as f64 / 10.0
    }

    pub fn minutes(self) -> f64 {
        self.0 as f64 / 600.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl Add for Tenths {
    type Output = Tenths;
    fn add(self, rhs: Tenths) -> Tenths {
        Tenths(self.0 + rhs.0)
    }
}

impl Sub for Tenths {
    type Output = Tenths;
    fn sub(self, rhs: Tenths) -> Tenths {
        Tenths(self.0 - rhs.0)
    }
}

impl fmt::Display for Tenths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{}{}.{}", sign, abs / 10, abs % 10)
    }
}

impl Serialize for Tenths {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.seconds())
    }
}

impl<'de> Deserialize<'de> for Tenths {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Tenths, D::Error> {
        let seconds = f64::deserialize(deserializer)?;
        Ok(Tenths::from_seconds(seconds))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantizes_to_nearest_tenth() {
        assert_eq!(Tenths::from_seconds(1.2).tenths(), 12);
        assert_eq!(Tenths::from_seconds(0.0).tenths(), 0);
        assert_eq!(Tenths::from_seconds(2.75).tenths(), 28);
        assert_eq!(Tenths::from_seconds(119.96).tenths(), 1200);
    }

    #[test]
    fn display_keeps_one_decimal() {
        assert_eq!(Tenths::from_tenths(12).to_string(), "1.2");
        assert_eq!(Tenths::from_tenths(1200).to_string(), "120.0");
        assert_eq!(Tenths::from_tenths(-3).to_string(), "-0.3");
    }

    #[test]
    fn json_round_trip_is_exact() {
        for t in [0i64, 1, 12, 25, 1199, 864_000] {
            let v = Tenths::from_tenths(t);
            let json = serde_json::to_string(&v).unwrap();
            let back: Tenths = serde_json::from_str(&json).unwrap();
            assert_eq!(back, v, "tenths {t} via {json}");
        }
    }
}
