//! Seeded sample suites behind `lie-hermitian sample`.
//!
//! Sample `i` of a run with seed `s` is drawn from `sample_rng(s, i)`.
//! Every failed check records the sample seed and a spec file that
//! reproduces it through `check`.

use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::algebra::{change_frame, unimodularity_defect, Algebra, UnitaryMatrix};
use crate::almost_abelian::{aa_report_with_tol, build_almost_abelian_with_tol, AlmostAbelianData};
use crate::codim2::{self, build_codim2_with_tol, c2_report_with_tol, Codim2Data};
use crate::error::{Error, Result};
use crate::exterior;
use crate::hermitian::{self, PropertyReport, RicciKind};
use crate::linalg;
use crate::report;
use crate::sampling::{self, sample_aa, sample_codim2, sample_rng, sample_seed, AA_KINDS, C2_KINDS};
use crate::spec_file::SpecFile;
use crate::verify::{classifier_roundtrip, generator_check};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteFamily {
    AlmostAbelian,
    Codim2,
    Btpv1,
    Btpv2,
    Btpv0,
    General,
}

pub const SUITE_FAMILIES: [SuiteFamily; 6] = [
    SuiteFamily::AlmostAbelian,
    SuiteFamily::Codim2,
    SuiteFamily::Btpv1,
    SuiteFamily::Btpv2,
    SuiteFamily::Btpv0,
    SuiteFamily::General,
];

impl SuiteFamily {
    pub fn name(self) -> &'static str {
        match self {
            SuiteFamily::AlmostAbelian => "almost_abelian",
            SuiteFamily::Codim2 => "codim2",
            SuiteFamily::Btpv1 => "btpv1",
            SuiteFamily::Btpv2 => "btpv2",
            SuiteFamily::Btpv0 => "btpv0",
            SuiteFamily::General => "general",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        SUITE_FAMILIES
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family \"{s}\"")))
    }

    pub fn checks(self) -> &'static [&'static str] {
        match self {
            SuiteFamily::AlmostAbelian => &[
                "cross_check",
                "jacobi_duality",
                "gauduchon_if_unimodular",
                "unimodular_scalars",
                "s_hat_identity",
                "curvature_symmetry",
            ],
            SuiteFamily::Codim2 => &[
                "cross_check",
                "jacobi_duality",
                "gauduchon_if_unimodular",
                "ric1_rank",
                "ric2_nonneg_flat",
                "btp_system_equivalence",
                "classifier_completeness",
                "s_hat_identity",
            ],
            SuiteFamily::Btpv1 | SuiteFamily::Btpv2 | SuiteFamily::Btpv0 => {
                &["cross_check", "generator_pattern", "classifier"]
            }
            SuiteFamily::General => &[
                "jacobi_duality",
                "frame_invariance",
                "gauduchon_if_unimodular",
                "pluriclosed_tensor_vs_forms",
                "s_hat_identity",
            ],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub family: SuiteFamily,
    pub count: usize,
    pub seed: u64,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleFailure {
    pub check: &'static str,
    pub index: usize,
    pub sample_seed: u64,
    pub message: String,
    pub spec: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: &'static str,
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<SampleFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub family: &'static str,
    pub count: usize,
    pub seed: u64,
    pub checks: Vec<CheckSummary>,
    #[serde(skip)]
    pub failures: Vec<SampleFailure>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn to_value(&self, tol: Option<f64>) -> Value {
        let mut v = serde_json::to_value(self).expect("suite report serializes");
        v["metadata"] = report::metadata(Some(self.seed), tol);
        v
    }

    /// File name for the repro spec of `f`.
    pub fn repro_name(&self, f: &SampleFailure) -> String {
        format!("{}-{}-seed{}-idx{}.json", self.family, f.check, self.seed, f.index)
    }
}

/// Outcome of one check on one sample; `None` when it does not apply.
type Outcome = Option<(bool, String)>;

struct Sample {
    spec: SpecFile,
    outcomes: Vec<(&'static str, Outcome)>,
}

pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    if opts.count == 0 {
        return Err(Error::ParameterDomain("count must be at least 1".into()));
    }
    let names = opts.family.checks();
    let mut checks: Vec<CheckSummary> = names
        .iter()
        .map(|&check| CheckSummary { check, checked: 0, passed: 0, failed: 0, first_failure: None })
        .collect();
    let mut failures = Vec::new();
    for idx in 0..opts.count {
        let mut rng = sample_rng(opts.seed, idx as u64);
        let sample = draw(opts, idx, &mut rng);
        let spec = sample.spec.with_tolerance(opts.tol).to_value();
        for (name, outcome) in sample.outcomes {
            let Some((ok, message)) = outcome else { continue };
            let c = checks.iter_mut().find(|c| c.check == name).expect("declared check");
            c.checked += 1;
            if ok {
                c.passed += 1;
                continue;
            }
            c.failed += 1;
            let f = SampleFailure {
                check: c.check,
                index: idx,
                sample_seed: sample_seed(opts.seed, idx as u64),
                message,
                spec: spec.clone(),
            };
            if c.first_failure.is_none() {
                c.first_failure = Some(f.clone());
            }
            failures.push(f);
        }
    }
    Ok(SuiteReport { family: opts.family.name(), count: opts.count, seed: opts.seed, checks, failures })
}

fn draw<R: Rng>(opts: &SuiteOptions, idx: usize, rng: &mut R) -> Sample {
    match opts.family {
        SuiteFamily::AlmostAbelian => {
            let kind = AA_KINDS[idx % AA_KINDS.len()];
            let n = 2 + (idx / AA_KINDS.len()) % 5;
            aa_sample(&sample_aa(rng, n, kind), opts.tol)
        }
        SuiteFamily::Codim2 => {
            let kind = C2_KINDS[idx % C2_KINDS.len()];
            let n = (2 + (idx / C2_KINDS.len()) % 5).max(sampling::c2_min_n(kind));
            c2_sample(&sample_codim2(rng, n, kind, idx % 2 == 1), opts.tol)
        }
        SuiteFamily::Btpv1 => generator_sample(rng, "v1", 2 + idx % 6, opts.tol),
        SuiteFamily::Btpv2 => generator_sample(rng, "v2", 3 + idx % 5, opts.tol),
        SuiteFamily::Btpv0 => generator_sample(rng, "v0", 3 + idx % 5, opts.tol),
        SuiteFamily::General => general_sample(rng, idx, opts.tol),
    }
}

fn within(x: f64, tol: f64) -> bool {
    x <= 10.0 * tol
}

fn jacobi_duality(a: &Algebra) -> Outcome {
    let tol = a.tol();
    let jac = a.jacobi().max();
    let dd = exterior::d_squared_residual(a);
    Some((within(jac, tol) == within(dd, tol), format!("jacobi residual {jac:.3e}, d^2 residual {dd:.3e}")))
}

fn gauduchon_if_unimodular(a: &Algebra) -> Outcome {
    let tol = a.tol();
    let defect = linalg::max_abs_vec(&unimodularity_defect(a));
    if !within(defect, tol) {
        return None;
    }
    let res = match exterior::del_delbar_residual(a, a.n() - 1) {
        Ok(r) => r,
        Err(e) => return Some((false, e.to_string())),
    };
    Some((within(res, tol), format!("del delbar omega^(n-1) residual {res:.3e}")))
}

fn s_hat_identity(rep: &PropertyReport) -> Outcome {
    let r = rep.residual("s_hat_identity");
    Some((within(r, rep.tol), format!("|s_hat - (s - chi)| = {r:.3e}")))
}

fn report_or_fail(a: &Algebra) -> std::result::Result<PropertyReport, String> {
    hermitian::property_report(a).map_err(|e| e.to_string())
}

fn aa_sample(d: &AlmostAbelianData, tol: Option<f64>) -> Sample {
    let spec = SpecFile::from_almost_abelian(d);
    let alg = build_almost_abelian_with_tol(d, tol).expect("almost abelian data always builds");
    let cross = match aa_report_with_tol(d, tol) {
        Ok(_) => (true, String::new()),
        Err(e) => (false, e.to_string()),
    };
    let mut outcomes = vec![("cross_check", Some(cross)), ("jacobi_duality", jacobi_duality(&alg))];
    outcomes.push(("gauduchon_if_unimodular", gauduchon_if_unimodular(&alg)));
    match report_or_fail(&alg) {
        Ok(rep) => {
            let t = rep.tol;
            let scalars = rep.flags.unimodular.then(|| {
                let lam2 = d.lambda * d.lambda;
                let v2 = linalg::vec_norm(&d.v).powi(2);
                let (s, sh) = (rep.scalars.s, rep.scalars.s_hat);
                let ok = within((s + lam2).abs(), t) && within((sh + 2.0 * lam2 + v2).abs(), t);
                (ok, format!("s = {s}, s_hat = {sh}, lambda^2 = {lam2}, |v|^2 = {v2}"))
            });
            outcomes.push(("unimodular_scalars", scalars));
            outcomes.push(("s_hat_identity", s_hat_identity(&rep)));
            let sym = rep.residual("curvature_hermitian_symmetry");
            outcomes.push(("curvature_symmetry", Some((within(sym, t), format!("residual {sym:.3e}")))));
        }
        Err(e) => {
            for name in ["unimodular_scalars", "s_hat_identity", "curvature_symmetry"] {
                outcomes.push((name, Some((false, e.clone()))));
            }
        }
    }
    Sample { spec, outcomes }
}

fn c2_sample(d: &Codim2Data, tol: Option<f64>) -> Sample {
    let spec = SpecFile::from_codim2(d);
    let alg = match build_codim2_with_tol(d, tol) {
        Ok(a) => a,
        Err(e) => {
            let outcomes = SuiteFamily::Codim2.checks().iter().map(|&c| (c, Some((false, e.to_string())))).collect();
            return Sample { spec, outcomes };
        }
    };
    let t = alg.tol();
    let cross = match c2_report_with_tol(d, tol) {
        Ok(_) => (true, String::new()),
        Err(e) => (false, e.to_string()),
    };
    let r = hermitian::chern_curvature(&alg);
    let s = hermitian::scalar_s(&alg);
    let (ev1, _) = linalg::hermitian_eigen(&hermitian::ricci_from_curvature(&r, RicciKind::First));
    let nonzero: Vec<f64> = ev1.into_iter().filter(|x| !within(x.abs(), t)).collect();
    let rank_ok = match nonzero.as_slice() {
        [] => within(s.abs(), t),
        [x] => x.signum() == s.signum() && !within(s.abs(), t),
        _ => false,
    };
    let (ev2, _) = linalg::hermitian_eigen(&hermitian::ricci_from_curvature(&r, RicciKind::Second));
    let min2 = ev2.last().copied().unwrap_or(0.0);
    let flat = (min2 >= -t).then(|| (within(r.max_abs(), t), format!("Ric2 >= 0 but |R| = {:.3e}", r.max_abs())));

    let mut outcomes = vec![
        ("cross_check", Some(cross)),
        ("jacobi_duality", jacobi_duality(&alg)),
        ("gauduchon_if_unimodular", gauduchon_if_unimodular(&alg)),
        ("ric1_rank", Some((rank_ok, format!("Ric1 nonzero eigenvalues {nonzero:?}, s = {s:e}")))),
        ("ric2_nonneg_flat", flat),
    ];
    match report_or_fail(&alg) {
        Ok(rep) => {
            let equiv = rep.flags.unimodular.then(|| {
                let sys = codim2::c2_btp_residuals(d);
                let worst = sys.values().copied().fold(0.0, f64::max);
                let holds = within(worst, t * (1.0 + d.magnitude()));
                let engine = within(rep.residual("btp"), t);
                (
                    holds == engine,
                    format!("residual system max {worst:.3e} but engine BTP residual {:.3e}", rep.residual("btp")),
                )
            });
            outcomes.push(("btp_system_equivalence", equiv));
            let complete = rep.flags.unimodular.then(|| match codim2::classify_btp_with_tol(d, Some(t)) {
                Ok(cl) => {
                    let btp = within(rep.residual("btp"), t);
                    let classified = cl.class.tag() != "NotBTP";
                    (btp == classified, format!("engine BTP {btp}, classified as {}", cl.class.tag()))
                }
                Err(e) => (false, e.to_string()),
            });
            outcomes.push(("classifier_completeness", complete));
            outcomes.push(("s_hat_identity", s_hat_identity(&rep)));
        }
        Err(e) => {
            outcomes.push(("btp_system_equivalence", Some((false, e.clone()))));
            outcomes.push(("classifier_completeness", Some((false, e.clone()))));
            outcomes.push(("s_hat_identity", Some((false, e))));
        }
    }
    Sample { spec, outcomes }
}

fn generator_sample<R: Rng>(rng: &mut R, family: &'static str, n: usize, tol: Option<f64>) -> Sample {
    let d = match family {
        "v1" => sampling::random_btpv1(rng, n),
        "v2" => sampling::random_btpv2(rng, n),
        _ => sampling::random_btpv0(rng, n),
    };
    let u = linalg::random_unitary(rng, n - 1);
    let scrambled = d.transform(&u).expect("matching size");
    let cross = match c2_report_with_tol(&d, tol) {
        Ok(_) => (true, String::new()),
        Err(e) => (false, e.to_string()),
    };
    Sample {
        spec: SpecFile::from_codim2(&scrambled),
        outcomes: vec![
            ("cross_check", Some(cross)),
            ("generator_pattern", Some(generator_check(&d, family, tol))),
            ("classifier", Some(classifier_roundtrip(&d, family, &scrambled, tol))),
        ],
    }
}

/// Even indices: sparse random constants, mostly failing Jacobi. Odd
/// indices: an almost abelian or codim-2 algebra in a random unitary frame
/// of the whole space.
fn general_sample<R: Rng>(rng: &mut R, idx: usize, tol: Option<f64>) -> Sample {
    let n = 2 + (idx / 2) % 5;
    let alg = if idx % 2 == 0 {
        let entries = rng.random_range(1..=2 * n);
        sampling::sample_general(rng, n, entries).expect("valid entries")
    } else {
        let base = if idx % 4 == 1 {
            build_almost_abelian_with_tol(&sample_aa(rng, n, AA_KINDS[(idx / 4) % AA_KINDS.len()]), None)
        } else {
            let kind = C2_KINDS[(idx / 4) % C2_KINDS.len()];
            build_codim2_with_tol(&sample_codim2(rng, n.max(sampling::c2_min_n(kind)), kind, false), None)
        }
        .expect("integrable sample");
        let u = UnitaryMatrix::new(linalg::random_unitary(rng, base.n()), 1e-10).expect("unitary");
        change_frame(&base, &u).expect("matching size")
    };
    let alg = match tol {
        Some(t) => alg.with_tol(t),
        None => alg,
    };
    let spec = SpecFile::from_algebra(&alg);
    let mut outcomes = vec![("jacobi_duality", jacobi_duality(&alg))];
    if within(alg.jacobi().max(), alg.tol()) {
        outcomes.push(("frame_invariance", frame_invariance(rng, &alg)));
        outcomes.push(("gauduchon_if_unimodular", gauduchon_if_unimodular(&alg)));
        let t = alg.tol();
        let q = hermitian::pluriclosed_tensor(&alg).max_abs();
        let forms = exterior::del_delbar_residual(&alg, 1);
        let agree = forms.map(|f| (within(q, t) == within(f, t), format!("tensor {q:.3e}, forms {f:.3e}")));
        outcomes.push(("pluriclosed_tensor_vs_forms", Some(agree.unwrap_or_else(|e| (false, e.to_string())))));
        let s_hat = report_or_fail(&alg).map_or_else(|e| Some((false, e)), |rep| s_hat_identity(&rep));
        outcomes.push(("s_hat_identity", s_hat));
    }
    Sample { spec, outcomes }
}

/// Property flags and scalars agree in a second random unitary frame.
fn frame_invariance<R: Rng>(rng: &mut R, a: &Algebra) -> Outcome {
    let u = UnitaryMatrix::new(linalg::random_unitary(rng, a.n()), 1e-10).expect("unitary");
    let b = change_frame(a, &u).expect("matching size").with_tol(a.tol());
    let (ra, rb) = match (hermitian::property_report(a), hermitian::property_report(&b)) {
        (Ok(x), Ok(y)) => (x, y),
        (x, y) => return Some((false, format!("{:?} / {:?}", x.err(), y.err()))),
    };
    let ds = [
        ra.scalars.s - rb.scalars.s,
        ra.scalars.s_hat - rb.scalars.s_hat,
        ra.scalars.s_b - rb.scalars.s_b,
        ra.scalars.chi - rb.scalars.chi,
    ]
    .into_iter()
    .fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = 1.0 + a.max_magnitude().powi(2);
    let ok = ra.flags == rb.flags && within(ds, a.tol() * scale);
    Some((ok, format!("flags {:?} vs {:?}, scalar drift {ds:.3e}", ra.flags, rb.flags)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_roundtrip() {
        for f in SUITE_FAMILIES {
            assert_eq!(SuiteFamily::parse(f.name()).unwrap(), f);
        }
        assert!(matches!(SuiteFamily::parse("kaehler"), Err(Error::Parse(_))));
    }

    #[test]
    fn zero_count_is_rejected() {
        let opts = SuiteOptions { family: SuiteFamily::General, count: 0, seed: 0, tol: None };
        assert!(matches!(run_suite(&opts), Err(Error::ParameterDomain(_))));
    }

    #[test]
    fn failures_carry_buildable_specs() {
        let opts = SuiteOptions { family: SuiteFamily::Btpv0, count: 12, seed: 1, tol: None };
        let rep = run_suite(&opts).unwrap();
        for f in &rep.failures {
            let spec = SpecFile::parse(&f.spec.to_string()).unwrap();
            assert!(spec.build(None).is_ok());
        }
        let total: usize = rep.checks.iter().map(|c| c.failed).sum();
        assert_eq!(total, rep.failures.len());
    }
}
