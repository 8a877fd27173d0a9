//! JSON and text renderings of reports.
//!
//! Objects are emitted with sorted keys and no timestamps, so identical
//! inputs give byte-identical output.

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::algebra::Algebra;
use crate::codim2::{btpv0_r_warning, BtpClass, Classification};
use crate::hermitian::{self, RicciKind};
use crate::linalg::CMatrix;
use crate::sampling::RNG_ALGORITHM;

pub const TOOL: &str = "lie-hermitian";

pub fn metadata(seed: Option<u64>, tol: Option<f64>) -> Value {
    json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "rng": RNG_ALGORITHM,
        "seed": seed,
        "tol_override": tol,
    })
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect())).collect())
}

/// Serializes and drops the named top-level keys.
pub fn without<T: Serialize>(x: &T, keys: &[&str]) -> Value {
    let mut v = serde_json::to_value(x).expect("report types serialize");
    if let Value::Object(map) = &mut v {
        for k in keys {
            map.remove(*k);
        }
    }
    v
}

fn sparse3(t: &crate::algebra::Tensor3) -> Value {
    Value::Array(
        t.iter_nonzero().map(|(j, i, k, v)| json!({"j": j + 1, "i": i + 1, "k": k + 1, "v": [v.re, v.im]})).collect(),
    )
}

/// Sparse dump of `C`, `D`, `T`, `R`, the Ricci matrices, `eta`, `zeta`
/// and the scalar curvatures.
pub fn tensors(a: &Algebra) -> Value {
    let t = hermitian::chern_torsion(a);
    let r = hermitian::chern_curvature(a);
    let curvature: Vec<Value> = r
        .array()
        .iter_nonzero()
        .map(|([i, j, k, l], v)| json!({"i": i + 1, "j": j + 1, "k": k + 1, "l": l + 1, "v": [v.re, v.im]}))
        .collect();
    let ric = |kind| hermitian::ricci_from_curvature(&r, kind);
    let brf = hermitian::bismut_ricci_form(a);
    json!({
        "n": a.n(),
        "tol": a.tol(),
        "C": sparse3(a.c()),
        "D": sparse3(a.d()),
        "T": sparse3(t.tensor()),
        "R": curvature,
        "ricci": {
            "first": matrix(&ric(RicciKind::First)),
            "second": matrix(&ric(RicciKind::Second)),
            "third": matrix(&ric(RicciKind::Third)),
        },
        "bismut_ricci": {"m11": matrix(&brf.m11), "m20": matrix(&brf.m20)},
        "eta": vector(&hermitian::gauduchon_eta(a)),
        "zeta": vector(&hermitian::zeta(a)),
        "scalars": {
            "s": hermitian::scalar_s(a),
            "s_hat": hermitian::scalar_s_hat(a),
            "s_b": crate::linalg::trace(&brf.m11).re,
            "chi": hermitian::chi(a),
        },
    })
}

/// Family tag, gauge-normalized parameters, frame and warnings.
pub fn classification(cl: &Classification, n: usize) -> Value {
    let mut warnings = Vec::new();
    let params = match &cl.class {
        BtpClass::V1 { v2, a } => json!({"v2": v2, "a": vector(a)}),
        BtpClass::V2 { v2, p, a } => json!({"v2": v2, "p": p, "a": vector(a)}),
        BtpClass::V0 { r, s, w, a } => {
            warnings.extend(btpv0_r_warning(n, *r));
            json!({"r": r, "S": s, "W": matrix(w), "a": vector(a)})
        }
        BtpClass::Kahler { a } => json!({"a": vector(a)}),
        BtpClass::NotBtp { residual } => json!({"btp_residual": residual}),
    };
    json!({
        "family": cl.class.tag(),
        "params": params,
        "frame": cl.frame.as_ref().map(|u| matrix(u.matrix())),
        "warnings": warnings,
    })
}

/// Renders `v` as one `path: value` line per leaf. `[re, im]` pairs and
/// other arrays of scalars stay on one line.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    flatten(v, String::new(), &mut out);
    out
}

fn is_scalar_array(a: &[Value]) -> bool {
    a.iter().all(|x| !x.is_array() && !x.is_object())
}

fn flatten(v: &Value, path: String, out: &mut String) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str(&format!("{path}: {{}}\n"));
            }
            for (k, x) in map {
                flatten(x, join(k), out);
            }
        }
        Value::Array(a) if !a.is_empty() && !is_scalar_array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, format!("{path}[{i}]"), out);
            }
        }
        other => out.push_str(&format!("{path}: {other}\n")),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_tensors_are_empty() {
        let v = tensors(&Algebra::abelian(3).unwrap());
        for key in ["C", "D", "T", "R"] {
            assert_eq!(v[key], json!([]));
        }
    }

    #[test]
    fn text_flattening() {
        let v = json!({"a": {"b": 1, "c": [1.0, 2.0]}, "d": [{"e": true}], "f": {}});
        assert_eq!(to_text(&v), "a.b: 1\na.c: [1.0,2.0]\nd[0].e: true\nf: {}\n");
    }
}
