//! Serde helpers that write `f64` values with 17 significant digits.
//!
//! 17 digits is enough to round-trip any finite double exactly and keeps the
//! textual form independent of the shortest-representation algorithm used by
//! the JSON backend.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

pub(crate) fn format17(value: f64) -> String {
    format!("{value:.16e}")
}

fn raw(value: f64) -> Result<Box<RawValue>, String> {
    if !value.is_finite() {
        return Err(format!("non-finite value {value} cannot be serialized"));
    }
    RawValue::from_string(format17(value)).map_err(|e| e.to_string())
}

pub(crate) mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        raw(*value)
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        f64::deserialize(deserializer)
    }
}

pub(crate) mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
        let raws = values
            .iter()
            .map(|v| raw(*v))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::ser::Error::custom)?;
        raws.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<f64>, D::Error> {
        Vec::<f64>::deserialize(deserializer)
    }
}

pub(crate) mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], serializer: S) -> Result<S::Ok, S::Error> {
        let raws = rows
            .iter()
            .map(|row| row.iter().map(|v| raw(*v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::ser::Error::custom)?;
        raws.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Vec<f64>>, D::Error> {
        Vec::<Vec<f64>>::deserialize(deserializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "scalar")]
        x: f64,
        #[serde(with = "vec")]
        xs: Vec<f64>,
    }

    #[test]
    fn seventeen_digits_and_exact_round_trip() {
        let h = Holder {
            x: std::f64::consts::LN_2,
            xs: vec![0.1, -3.0, 1e-300],
        };
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.contains("6.9314718055994529e-1"), "{text}");
        let back: Holder = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn non_finite_is_rejected() {
        let h = Holder {
            x: f64::NAN,
            xs: vec![],
        };
        assert!(serde_json::to_string(&h).is_err());
    }
}
