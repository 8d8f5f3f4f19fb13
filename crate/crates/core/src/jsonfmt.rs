//! Fixed float formatting for JSON output.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// f64 that serializes with [`fmt17`]. Non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Option::<f64>::deserialize(deserializer).map(|v| F17(v.unwrap_or(f64::NAN)))
    }
}
