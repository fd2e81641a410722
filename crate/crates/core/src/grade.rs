//! Grades on the 0–4 scale, stored in hundredths so threshold comparisons are
//! exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GradeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Grade(u16);

impl Grade {
    pub const MIN: Grade = Grade(0);
    pub const MAX: Grade = Grade(400);

    pub fn from_hundredths(h: u16) -> Result<Grade, GradeError> {
        if h > 400 {
            return Err(GradeError::OutOfRange(f64::from(h) / 100.0));
        }
        Ok(Grade(h))
    }

    /// Values above 4.00 become 4.00.
    pub const fn from_hundredths_saturating(h: u16) -> Grade {
        if h > 400 {
            Grade(400)
        } else {
            Grade(h)
        }
    }

    /// Rounds to the nearest hundredth.
    pub fn from_f64(v: f64) -> Result<Grade, GradeError> {
        if !v.is_finite() || !(0.0..=4.0).contains(&v) {
            return Err(GradeError::OutOfRange(v));
        }
        Ok(Grade((v * 100.0).round() as u16))
    }

    pub fn hundredths(self) -> u16 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 100.0
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (whole, frac) = (self.0 / 100, self.0 % 100);
        match frac {
            0 => write!(f, "{whole}"),
            _ if frac % 10 == 0 => write!(f, "{whole}.{}", frac / 10),
            _ => write!(f, "{whole}.{frac:02}"),
        }
    }
}

impl FromStr for Grade {
    type Err = GradeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| GradeError::Malformed(s.to_string()))?;
        Grade::from_f64(v)
    }
}

impl Serialize for Grade {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Grade {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Grade::from_f64(v).map_err(serde::de::Error::custom)
    }
}
