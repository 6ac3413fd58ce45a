//! Reading JSON inputs and sorting decode failures into parse errors and
//! invariant violations.
//!
//! A document is first decoded into its library type. When that fails, it
//! is decoded again into a mirror of the schema that checks structure and
//! leaf syntax (rationals, labels) but no invariants: if the mirror accepts
//! it, the input was well formed and broke an invariant.

// mirror fields are only checked while decoding, never read
#![allow(dead_code)]

use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer};
use serde_json::Value;

use qmoduli::projline::parse_rat;

use crate::CliError;

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Parse(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Decodes `T`, using the structural mirror `S` to classify failures.
pub fn decode<T: DeserializeOwned, S: DeserializeOwned>(
    value: Value,
    what: &str,
) -> Result<T, CliError> {
    match serde_json::from_value::<T>(value.clone()) {
        Ok(t) => Ok(t),
        Err(e) if serde_json::from_value::<S>(value).is_ok() => {
            Err(CliError::Invalid(format!("invalid {what}: {e}")))
        }
        Err(e) => Err(CliError::Parse(format!("malformed {what}: {e}"))),
    }
}

pub fn load<T: DeserializeOwned, S: DeserializeOwned>(
    path: &Path,
    what: &str,
) -> Result<T, CliError> {
    decode::<T, S>(read_json(path)?, what)
}

/// A syntactically valid rational.
pub struct RatText;

impl<'de> Deserialize<'de> for RatText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s)
            .map(|_| RatText)
            .map_err(serde::de::Error::custom)
    }
}

pub type PointText = [RatText; 2];

#[derive(Deserialize)]
#[serde(untagged)]
pub enum SectionShape {
    Tag(String),
    Point(PointText),
}

#[derive(Deserialize)]
pub struct ConfigShape {
    mode: ModeShape,
    sections: Vec<SectionShape>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeShape {
    Qn,
    Pn,
}

#[derive(Deserialize)]
pub struct WeightShape {
    theta: Vec<RatText>,
    eta1: Option<RatText>,
    eta2: Option<RatText>,
}

#[derive(Deserialize)]
struct EdgeShape {
    a: usize,
    b: usize,
    at_a: PointText,
    at_b: PointText,
}

#[derive(Deserialize)]
struct MarkShape {
    label: usize,
    component: usize,
    point: PointText,
}

#[derive(Deserialize)]
pub struct TreeShape {
    components: usize,
    edges: Vec<EdgeShape>,
    marks: Vec<MarkShape>,
}

#[derive(Deserialize)]
struct ChainMarkShape {
    label: usize,
    component: usize,
    value: RatText,
}

#[derive(Deserialize)]
pub struct ChainShape {
    components: usize,
    marks: Vec<ChainMarkShape>,
}

#[derive(Deserialize)]
struct ChartShape {
    chart: Vec<usize>,
    sections: Vec<PointText>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FamilyModeShape {
    Gk,
    Hassett { a: HassettShape },
    Lm,
}

#[derive(Deserialize)]
struct HassettShape {
    a: Vec<RatText>,
}

#[derive(Deserialize)]
pub struct FamilyShape {
    mode: FamilyModeShape,
    n: usize,
    charts: Vec<ChartShape>,
}
