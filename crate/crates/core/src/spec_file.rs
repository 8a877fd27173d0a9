//! The `lie-hermitian/v1` JSON input format.
//!
//! ```json
//! {"schema": "lie-hermitian/v1", "n": 3, "family": "btpv1",
//!  "payload": {"v2": 1.0, "a": [[0.0, 1.0]]}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs; indices in `general` entries are
//! 1-based.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{build_general, Algebra, Entry};
use crate::almost_abelian::{build_almost_abelian_with_tol, AlmostAbelianData};
use crate::codim2::{build_codim2_with_tol, make_btpv0, make_btpv1, make_btpv2, Codim2Data};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

pub const SCHEMA: &str = "lie-hermitian/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralPayload {
    #[serde(rename = "C", default)]
    pub c: Vec<Entry>,
    #[serde(rename = "D", default)]
    pub d: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlmostAbelianPayload {
    pub lambda: f64,
    pub v: Vec<C64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Codim2Payload {
    pub lambda: f64,
    pub v: Vec<C64>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<C64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<C64>>,
    #[serde(rename = "Z")]
    pub z: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Btpv1Payload {
    pub v2: f64,
    #[serde(default)]
    pub a: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Btpv2Payload {
    pub v2: f64,
    pub p: f64,
    #[serde(default)]
    pub a: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Btpv0Payload {
    pub r: usize,
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    #[serde(rename = "W")]
    pub w: Vec<Vec<C64>>,
    #[serde(default)]
    pub a: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    General(GeneralPayload),
    AlmostAbelian(AlmostAbelianPayload),
    Codim2(Codim2Payload),
    Btpv1(Btpv1Payload),
    Btpv2(Btpv2Payload),
    Btpv0(Btpv0Payload),
}

impl Payload {
    pub fn family(&self) -> &'static str {
        match self {
            Payload::General(_) => "general",
            Payload::AlmostAbelian(_) => "almost_abelian",
            Payload::Codim2(_) => "codim2",
            Payload::Btpv1(_) => "btpv1",
            Payload::Btpv2(_) => "btpv2",
            Payload::Btpv0(_) => "btpv0",
        }
    }

    fn to_value(&self) -> Value {
        let v = match self {
            Payload::General(p) => serde_json::to_value(p),
            Payload::AlmostAbelian(p) => serde_json::to_value(p),
            Payload::Codim2(p) => serde_json::to_value(p),
            Payload::Btpv1(p) => serde_json::to_value(p),
            Payload::Btpv2(p) => serde_json::to_value(p),
            Payload::Btpv0(p) => serde_json::to_value(p),
        };
        v.expect("payload types serialize")
    }
}

/// A parsed spec file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub n: usize,
    pub tolerance: Option<f64>,
    pub payload: Payload,
}

/// The family-level data a spec resolves to.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyData {
    General(GeneralPayload),
    AlmostAbelian(AlmostAbelianData),
    Codim2(Codim2Data),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    schema: String,
    n: usize,
    family: String,
    #[serde(default)]
    tolerance: Option<f64>,
    payload: Value,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn payload<T: serde::de::DeserializeOwned>(family: &str, v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| parse_err(format!("{family} payload: {e}")))
}

fn matrix(name: &str, rows: &[Vec<C64>], m: usize) -> Result<CMatrix> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(parse_err(format!("{name} must be {m}x{m}")));
    }
    Ok(linalg::from_rows(rows))
}

fn vector(name: &str, v: &[C64], m: usize) -> Result<Vec<C64>> {
    if v.len() != m {
        return Err(parse_err(format!("{name} must have length {m}, got {}", v.len())));
    }
    Ok(v.to_vec())
}

fn rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let env: Envelope = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        if env.schema != SCHEMA {
            return Err(parse_err(format!("schema must be \"{SCHEMA}\", got \"{}\"", env.schema)));
        }
        if let Some(t) = env.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(parse_err(format!("tolerance must be positive and finite, got {t}")));
            }
        }
        let fam = env.family.as_str();
        let p = env.payload;
        let payload = match fam {
            "general" => Payload::General(payload(fam, p)?),
            "almost_abelian" => Payload::AlmostAbelian(payload(fam, p)?),
            "codim2" => Payload::Codim2(payload(fam, p)?),
            "btpv1" => Payload::Btpv1(payload(fam, p)?),
            "btpv2" => Payload::Btpv2(payload(fam, p)?),
            "btpv0" => Payload::Btpv0(payload(fam, p)?),
            other => {
                return Err(parse_err(format!(
                    "unknown family \"{other}\"; expected general, almost_abelian, codim2, btpv1, btpv2 or btpv0"
                )))
            }
        };
        Ok(Self { n: env.n, tolerance: env.tolerance, payload })
    }

    pub fn to_value(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("schema".into(), Value::from(SCHEMA));
        map.insert("n".into(), Value::from(self.n));
        map.insert("family".into(), Value::from(self.payload.family()));
        if let Some(t) = self.tolerance {
            map.insert("tolerance".into(), Value::from(t));
        }
        map.insert("payload".into(), self.payload.to_value());
        Value::Object(map)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("spec serializes")
    }

    /// Resolves generator families to their codimension-2 data and checks
    /// payload sizes against `n`.
    pub fn family_data(&self) -> Result<FamilyData> {
        let n = self.n;
        if n < 2 {
            return Err(Error::InvalidDimension { n, max: crate::algebra::MAX_DIM });
        }
        let m = n - 1;
        Ok(match &self.payload {
            Payload::General(p) => FamilyData::General(p.clone()),
            Payload::AlmostAbelian(p) => FamilyData::AlmostAbelian(AlmostAbelianData::new(
                p.lambda,
                vector("v", &p.v, m)?,
                matrix("A", &p.a, m)?,
            )?),
            Payload::Codim2(p) => FamilyData::Codim2(Codim2Data::new(
                p.lambda,
                vector("v", &p.v, m)?,
                matrix("X", &p.x, m)?,
                matrix("Y", &p.y, m)?,
                matrix("Z", &p.z, m)?,
            )?),
            Payload::Btpv1(p) => FamilyData::Codim2(make_btpv1(n, p.v2, &p.a)?),
            Payload::Btpv2(p) => FamilyData::Codim2(make_btpv2(n, p.v2, p.p, &p.a)?),
            Payload::Btpv0(p) => {
                let w = matrix("W", &p.w, p.r)?;
                FamilyData::Codim2(make_btpv0(n, p.r, &p.s, &w, &p.a)?)
            }
        })
    }

    /// Builds the algebra. `tol` overrides the file's tolerance.
    pub fn build(&self, tol: Option<f64>) -> Result<Algebra> {
        let tol = tol.or(self.tolerance);
        match self.family_data()? {
            FamilyData::General(p) => build_general(self.n, &p.c, &p.d, tol),
            FamilyData::AlmostAbelian(d) => build_almost_abelian_with_tol(&d, tol),
            FamilyData::Codim2(d) => build_codim2_with_tol(&d, tol),
        }
    }

    /// A `general` spec listing the nonzero constants of `a`, with `C`
    /// entries given once per antisymmetric pair.
    pub fn from_algebra(a: &Algebra) -> Self {
        let c = a
            .c()
            .iter_nonzero()
            .filter(|&(_, i, k, _)| i < k)
            .map(|(j, i, k, v)| Entry::new(j + 1, i + 1, k + 1, v))
            .collect();
        let d = a.d().iter_nonzero().map(|(j, i, k, v)| Entry::new(j + 1, i + 1, k + 1, v)).collect();
        Self { n: a.n(), tolerance: None, payload: Payload::General(GeneralPayload { c, d }) }
    }

    pub fn from_almost_abelian(d: &AlmostAbelianData) -> Self {
        Self {
            n: d.n(),
            tolerance: None,
            payload: Payload::AlmostAbelian(AlmostAbelianPayload { lambda: d.lambda, v: d.v.clone(), a: rows(&d.a) }),
        }
    }

    pub fn from_codim2(d: &Codim2Data) -> Self {
        Self {
            n: d.n(),
            tolerance: None,
            payload: Payload::Codim2(Codim2Payload {
                lambda: d.lambda,
                v: d.v.clone(),
                x: rows(&d.x),
                y: rows(&d.y),
                z: rows(&d.z),
            }),
        }
    }

    pub fn with_tolerance(mut self, tol: Option<f64>) -> Self {
        self.tolerance = tol;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::property_report;

    #[test]
    fn btpv1_spec_builds() {
        let text = r#"{"schema":"lie-hermitian/v1","n":3,"family":"btpv1","payload":{"v2":1,"a":[[0,1]]}}"#;
        let spec = SpecFile::parse(text).unwrap();
        let rep = property_report(&spec.build(None).unwrap()).unwrap();
        assert!(rep.flags.btp && rep.flags.bkl);
    }

    #[test]
    fn roundtrip_through_json() {
        let d = crate::codim2::make_btpv2(4, 1.5, 0.5, &[C64::new(0.0, 2.0)]).unwrap();
        let spec = SpecFile::from_codim2(&d).with_tolerance(Some(1e-8));
        let back = SpecFile::parse(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.family_data().unwrap(), FamilyData::Codim2(d));
    }

    #[test]
    fn general_roundtrip_preserves_tensors() {
        let d =
            crate::codim2::make_btpv0(5, 1, &[2.0], &linalg::identity(1), &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
                .unwrap();
        let a = crate::codim2::build_codim2(&d).unwrap();
        let b = SpecFile::parse(&SpecFile::from_algebra(&a).to_json()).unwrap().build(None).unwrap();
        assert_eq!(a.c().max_diff(b.c()), 0.0);
        assert_eq!(a.d().max_diff(b.d()), 0.0);
    }

    #[test]
    fn parse_errors() {
        for text in [
            "not json",
            r#"{"schema":"v2","n":2,"family":"general","payload":{}}"#,
            r#"{"schema":"lie-hermitian/v1","n":2,"family":"nope","payload":{}}"#,
            r#"{"schema":"lie-hermitian/v1","n":2,"family":"btpv1","payload":{"v2":1,"extra":0}}"#,
            r#"{"schema":"lie-hermitian/v1","n":3,"family":"almost_abelian","payload":{"lambda":0,"v":[[0,0]],"A":[[[0,0]]]}}"#,
            r#"{"schema":"lie-hermitian/v1","n":2,"family":"general","tolerance":-1,"payload":{}}"#,
        ] {
            let r = SpecFile::parse(text).and_then(|s| s.family_data());
            assert!(matches!(r, Err(Error::Parse(_))), "{text}: {r:?}");
        }
    }
}
