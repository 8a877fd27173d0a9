//! Report assembly for spec files, shared by the CLI and the bindings.

use serde_json::{json, Value};

use crate::almost_abelian::aa_report_with_tol;
use crate::codim2::{c2_report_with_tol, classify_btp_with_tol};
use crate::error::{Error, Result};
use crate::hermitian;
use crate::report;
use crate::spec_file::{FamilyData, SpecFile};
use crate::Algebra;

/// Builds the algebra and rejects it if the Jacobi residual exceeds its tolerance.
pub fn valid_algebra(spec: &SpecFile, tol: Option<f64>) -> Result<Algebra> {
    let alg = spec.build(tol)?;
    let residual = alg.jacobi().max();
    if residual > alg.tol() {
        return Err(Error::InvalidAlgebra { residual });
    }
    Ok(alg)
}

/// Property report, family closed forms and, on request, the classification.
pub fn check(spec: &SpecFile, tol: Option<f64>, classify: bool) -> Result<Value> {
    let alg = valid_algebra(spec, tol)?;
    let family_tol = tol.or(spec.tolerance);
    let mut v = json!({
        "metadata": report::metadata(None, tol),
        "input": spec.to_value(),
        "report": hermitian::property_report(&alg)?,
    });
    match spec.family_data()? {
        FamilyData::General(_) => {}
        FamilyData::AlmostAbelian(d) => {
            v["family_report"] = report::without(&aa_report_with_tol(&d, family_tol)?, &["engine"]);
        }
        FamilyData::Codim2(d) => {
            if spec.payload.family() != "codim2" {
                v["resolved"] = SpecFile::from_codim2(&d).to_value()["payload"].take();
            }
            v["family_report"] = report::without(&c2_report_with_tol(&d, family_tol)?, &["engine"]);
        }
    }
    if classify {
        v["classification"] = classification(spec, tol)?;
    }
    Ok(v)
}

/// Sparse tensor dump.
pub fn tensors(spec: &SpecFile, tol: Option<f64>) -> Result<Value> {
    let alg = valid_algebra(spec, tol)?;
    Ok(json!({
        "metadata": report::metadata(None, tol),
        "input": spec.to_value(),
        "tensors": report::tensors(&alg),
    }))
}

/// Classification report; only codim-2 and generator specs are accepted.
pub fn classify(spec: &SpecFile, tol: Option<f64>) -> Result<Value> {
    Ok(json!({
        "metadata": report::metadata(None, tol),
        "input": spec.to_value(),
        "classification": classification(spec, tol)?,
    }))
}

fn classification(spec: &SpecFile, tol: Option<f64>) -> Result<Value> {
    let FamilyData::Codim2(d) = spec.family_data()? else {
        return Err(Error::ParameterDomain(format!(
            "classification needs codim2 or generator data, got family {}",
            spec.payload.family()
        )));
    };
    let cl = classify_btp_with_tol(&d, tol.or(spec.tolerance))?;
    Ok(report::classification(&cl, spec.n))
}
