//! Input file formats.
//!
//! A plant is either a coefficient pair with an explicit order
//!
//! ```json
//! {"num": [4, 0], "den": [1, 6, 13, 20], "order": "desc"}
//! ```
//!
//! or a zero/pole/gain triple, where complex values are `[re, im]`:
//!
//! ```json
//! {"zeros": [0], "poles": [-4, [-1, 2], [-1, -2]], "gain": 4}
//! ```
//!
//! A parameter model lists each parameter with its split
//! `Δ = a + φ(h) b`, `φ(h) = h²` for connection parameters (which must say
//! `"squared": true`) and `φ(h) = h` otherwise.

use crate::CliError;
use num_complex::Complex64;
use reslocus::sensitivity::{AffineSplit, Parameter};
use reslocus::{ParamCharPoly, ParamKind, Polynomial, RationalTF};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Asc,
    Desc,
}

impl Order {
    fn ascending(self, mut c: Vec<f64>) -> Vec<f64> {
        if self == Order::Desc {
            c.reverse();
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlant {
    num: Option<Vec<f64>>,
    den: Option<Vec<f64>>,
    order: Option<Order>,
    zeros: Option<Vec<ComplexValue>>,
    poles: Option<Vec<ComplexValue>>,
    gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlantSpec {
    Coefficients { num: Vec<f64>, den: Vec<f64> },
    Zpk { zeros: Vec<Complex64>, poles: Vec<Complex64>, gain: f64 },
}

impl PlantSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawPlant = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let coeff = raw.num.is_some() || raw.den.is_some() || raw.order.is_some();
        let zpk = raw.zeros.is_some() || raw.poles.is_some() || raw.gain.is_some();
        match (coeff, zpk) {
            (true, true) => Err(CliError::Parse(
                "coefficient and zero/pole/gain forms are mutually exclusive".into(),
            )),
            (false, false) => Err(CliError::Parse("plant needs num/den/order or zeros/poles/gain".into())),
            (true, false) => {
                let order = raw.order.ok_or_else(|| CliError::Parse("\"order\" is required (\"asc\" or \"desc\")".into()))?;
                let num = raw.num.ok_or_else(|| CliError::Parse("missing \"num\"".into()))?;
                let den = raw.den.ok_or_else(|| CliError::Parse("missing \"den\"".into()))?;
                Ok(PlantSpec::Coefficients {
                    num: order.ascending(num),
                    den: order.ascending(den),
                })
            }
            (false, true) => Ok(PlantSpec::Zpk {
                zeros: raw.zeros.unwrap_or_default().into_iter().map(Into::into).collect(),
                poles: raw
                    .poles
                    .ok_or_else(|| CliError::Parse("missing \"poles\"".into()))?
                    .into_iter()
                    .map(Into::into)
                    .collect(),
                gain: raw.gain.ok_or_else(|| CliError::Parse("missing \"gain\"".into()))?,
            }),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?)
    }

    pub fn build(&self) -> Result<RationalTF<f64>, CliError> {
        let tf = match self {
            PlantSpec::Coefficients { num, den } => RationalTF::from_coeffs(num, den),
            PlantSpec::Zpk { zeros, poles, gain } => RationalTF::from_zpk(zeros, poles, *gain),
        };
        tf.map_err(|e| CliError::Numeric(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSpec {
    Dynamic,
    Static,
    Connection,
}

impl From<KindSpec> for ParamKind {
    fn from(k: KindSpec) -> Self {
        match k {
            KindSpec::Dynamic => ParamKind::Dynamic,
            KindSpec::Static => ParamKind::Static,
            KindSpec::Connection => ParamKind::Connection,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub name: String,
    pub value: f64,
    pub kind: KindSpec,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub squared: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamModelSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub order: Order,
    pub parameters: Vec<ParamSpec>,
}

impl ParamModelSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: ParamModelSpec = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        for p in &spec.parameters {
            if (p.kind == KindSpec::Connection) != p.squared {
                return Err(CliError::Parse(format!(
                    "parameter {}: connection parameters, and only those, must set \"squared\": true",
                    p.name
                )));
            }
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read(path)?)
    }

    pub fn build(&self) -> Result<ParamCharPoly<f64>, CliError> {
        let params = self
            .parameters
            .iter()
            .map(|p| Parameter {
                name: p.name.clone(),
                value: p.value,
                kind: p.kind.into(),
                split: Some(AffineSplit {
                    a: Polynomial::from_real(&self.order.ascending(p.a.clone())),
                    b: Polynomial::from_real(&self.order.ascending(p.b.clone())),
                    squared: p.squared,
                }),
            })
            .collect();
        ParamCharPoly::new(params, None).map_err(|e| CliError::Numeric(e.to_string()))
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}
