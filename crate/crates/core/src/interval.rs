use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A closed interval `[lower, upper]` guaranteed to contain some real quantity.
///
/// Serialized as the two-element array `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedInterval {
    pub lower: f64,
    pub upper: f64,
}

impl CertifiedInterval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "inverted interval [{lower}, {upper}]");
        Self { lower, upper }
    }

    pub fn exact(value: f64) -> Self {
        Self { lower: value, upper: value }
    }

    pub fn zero() -> Self {
        Self::exact(0.0)
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower - tol <= x && x <= self.upper + tol
    }

    pub fn scale(&self, k: f64) -> Self {
        debug_assert!(k >= 0.0);
        Self::new(self.lower * k, self.upper * k)
    }
}

impl Serialize for CertifiedInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.lower, self.upper].serialize(s)
    }
}

impl<'de> Deserialize<'de> for CertifiedInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lower, upper] = <[f64; 2]>::deserialize(d)?;
        if lower > upper {
            return Err(serde::de::Error::custom("interval lower bound exceeds upper bound"));
        }
        Ok(Self { lower, upper })
    }
}

impl std::fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lower, self.upper)
    }
}
