//! The seeded acceptance battery.
//!
//! Each criterion draws its samples from its own stream
//! `sample_rng(sample_seed(seed, criterion), index)`, so filtering does not
//! change which samples a criterion sees. Failures carry the stream seed,
//! the sample index and a self-contained datum (a spec file for algebra
//! samples) for reproduction.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::Algebra;
use crate::almost_abelian::{
    aa_astheno_profile, aa_report_with_tol, build_almost_abelian_with_tol, lafuente2_holds, lafuente_residual,
    AlmostAbelianData,
};
use crate::codim2::{
    self, bismut_ricci_closed, build_codim2_unchecked, build_codim2_with_tol, c2_closed_flags, c2_report_with_tol,
    chern_flat_normal_form, classify_btp_with_tol, lemma9, BtpClass, Codim2Data,
};
use crate::error::Error;
use crate::exterior;
use crate::hermitian::{self, mutation, RicciKind};
use crate::linalg::{self, CMatrix};
use crate::report;
use crate::sampling::{
    self, c2_min_n, sample_aa, sample_codim2, sample_rng, sample_seed, AaKind, C2Kind, AA_KINDS, C2_KINDS,
};
use crate::spec_file::SpecFile;

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides every per-sample default tolerance.
    pub tol: Option<f64>,
    pub filter: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub stream_seed: u64,
    pub index: usize,
    pub message: String,
    pub datum: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub failed: usize,
    pub detail: String,
    pub first_failure: Option<Failure>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{:<4} {:<4} {:<52} {}/{} {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checked - self.failed,
            self.checked,
            self.detail
        )
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub name: &'static str,
    pub tags: &'static [&'static str],
    run: fn(&VerifyOptions) -> CriterionResult,
}

pub const CRITERIA: [Criterion; 13] = [
    Criterion { id: "c1", name: "Jacobi residual vs d^2 = 0", tags: &["jacobi", "duality"], run: c1 },
    Criterion { id: "c2", name: "unimodular implies Gauduchon", tags: &["lemma1", "gauduchon"], run: c2 },
    Criterion { id: "c3", name: "pluriclosed tensor vs del delbar omega", tags: &["lemma2", "pluriclosed"], run: c3 },
    Criterion { id: "c4", name: "almost abelian scalar curvatures", tags: &["lemma7", "scalars"], run: c4 },
    Criterion { id: "c5", name: "almost abelian closed forms vs engine", tags: &["propal", "almost_abelian"], run: c5 },
    Criterion { id: "c6", name: "almost abelian BTP = BKL = skew A, Av = 0", tags: &["prop1", "btp"], run: c6 },
    Criterion { id: "c7", name: "almost abelian astheno = pluriclosed", tags: &["prop2", "astheno"], run: c7 },
    Criterion { id: "c8", name: "almost abelian Chern-flat, CKL, CYT", tags: &["lemma6", "lemma8", "prop8"], run: c8 },
    Criterion { id: "c9", name: "codim-2 closed forms vs engine", tags: &["prop3", "codim2"], run: c9 },
    Criterion { id: "c10", name: "codim-2 curvature and Bismut Ricci", tags: &["prop4", "codim2"], run: c10 },
    Criterion { id: "c11", name: "codim-2 BTP generators and classifier", tags: &["prop5", "btp"], run: c11 },
    Criterion { id: "c12", name: "simultaneous factorization of (b, z)", tags: &["lemma9"], run: c12 },
    Criterion { id: "c13", name: "mutation sensitivity", tags: &["mutation"], run: c13 },
];

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.to_ascii_lowercase();
        self.id == f || self.tags.contains(&f.as_str())
    }
}

/// Runs every criterion selected by the filter, in order.
pub fn run(opts: &VerifyOptions) -> Vec<CriterionResult> {
    CRITERIA.iter().filter(|c| opts.filter.as_deref().is_none_or(|f| c.matches(f))).map(|c| (c.run)(opts)).collect()
}

pub fn run_one(id: &str, opts: &VerifyOptions) -> Option<CriterionResult> {
    CRITERIA.iter().find(|c| c.id == id).map(|c| (c.run)(opts))
}

pub fn results_json(results: &[CriterionResult], opts: &VerifyOptions) -> Value {
    json!({
        "metadata": report::metadata(Some(opts.seed), opts.tol),
        "filter": opts.filter,
        "passed": results.iter().all(|r| r.passed),
        "criteria": results,
    })
}

struct Tally {
    id: &'static str,
    name: &'static str,
    stream: u64,
    checked: usize,
    failed: usize,
    first: Option<Failure>,
}

impl Tally {
    fn new(id: &'static str, seed: u64) -> Self {
        let crit = CRITERIA.iter().find(|c| c.id == id).expect("known id");
        let no: u64 = id[1..].parse().expect("numeric id");
        Self { id, name: crit.name, stream: sample_seed(seed, no), checked: 0, failed: 0, first: None }
    }

    fn rng(&self, idx: usize) -> rand_chacha::ChaCha8Rng {
        sample_rng(self.stream, idx as u64)
    }

    fn record(
        &mut self,
        idx: usize,
        ok: bool,
        message: impl FnOnce() -> String,
        datum: impl FnOnce() -> Option<Value>,
    ) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first.is_none() {
                self.first = Some(Failure { stream_seed: self.stream, index: idx, message: message(), datum: datum() });
            }
        }
    }

    fn finish(self, detail: String) -> CriterionResult {
        CriterionResult {
            id: self.id,
            name: self.name,
            passed: self.failed == 0 && self.checked > 0,
            checked: self.checked,
            failed: self.failed,
            detail,
            first_failure: self.first,
        }
    }
}

fn aa_datum(d: &AlmostAbelianData, tol: Option<f64>) -> Option<Value> {
    Some(SpecFile::from_almost_abelian(d).with_tolerance(tol).to_value())
}

fn c2_datum(d: &Codim2Data, tol: Option<f64>) -> Option<Value> {
    Some(SpecFile::from_codim2(d).with_tolerance(tol).to_value())
}

fn alg_datum(a: &Algebra) -> Option<Value> {
    Some(SpecFile::from_algebra(a).with_tolerance(Some(a.tol())).to_value())
}

fn tol_of(opts: &VerifyOptions, a: &Algebra) -> f64 {
    opts.tol.unwrap_or(a.tol())
}

fn retol(opts: &VerifyOptions, a: Algebra) -> Algebra {
    match opts.tol {
        Some(t) => a.with_tol(t),
        None => a,
    }
}

fn aa_alg(opts: &VerifyOptions, d: &AlmostAbelianData) -> Algebra {
    build_almost_abelian_with_tol(d, opts.tol).expect("almost abelian data always builds")
}

/// Cycles through the codim-2 kinds with `n >= c2_min_n`.
fn c2_sample<R: Rng>(rng: &mut R, idx: usize, kinds: &[C2Kind], n_lo: usize, n_hi: usize) -> Codim2Data {
    let kind = kinds[idx % kinds.len()];
    let n = (n_lo + (idx / kinds.len()) % (n_hi - n_lo + 1)).max(c2_min_n(kind));
    sample_codim2(rng, n, kind, idx % 2 == 1)
}

/// Greedy max distance between two multisets of complex numbers.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

fn real_distance(a: &[f64], b: &[f64]) -> f64 {
    let ca: Vec<C64> = a.iter().map(|&x| C64::new(x, 0.0)).collect();
    let cb: Vec<C64> = b.iter().map(|&x| C64::new(x, 0.0)).collect();
    multiset_distance(&ca, &cb)
}

fn c1(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c1", opts.seed);
    let (mut valid, mut invalid) = (0, 0);
    for idx in 0..200 {
        let mut rng = t.rng(idx);
        let n = 2 + idx % 5;
        let alg = match idx % 4 {
            0 => {
                let entries = rng.random_range(1..=2 * n);
                sampling::sample_general(&mut rng, n, entries).expect("valid entries")
            }
            1 => aa_alg(opts, &sample_aa(&mut rng, n, AA_KINDS[(idx / 4) % AA_KINDS.len()])),
            2 => {
                let d = c2_sample(&mut rng, idx / 4, &C2_KINDS, 2, 6);
                build_codim2_with_tol(&d, opts.tol).expect("integrable sample")
            }
            _ => {
                let m = n - 1;
                let d = Codim2Data::new(
                    rng.random_range(0.0..2.0),
                    linalg::random_vector(&mut rng, m),
                    linalg::random_matrix(&mut rng, m, m),
                    linalg::random_matrix(&mut rng, m, m),
                    linalg::random_matrix(&mut rng, m, m),
                )
                .expect("finite");
                build_codim2_unchecked(&d, opts.tol).expect("valid dimension")
            }
        };
        let alg = retol(opts, alg);
        let tol = tol_of(opts, &alg);
        let jac = alg.jacobi().max();
        let dd = exterior::d_squared_residual(&alg);
        let (a, b) = (jac <= 10.0 * tol, dd <= 10.0 * tol);
        if a {
            valid += 1;
        } else {
            invalid += 1;
        }
        t.record(
            idx,
            a == b,
            || format!("jacobi residual {jac:.3e} but d^2 residual {dd:.3e} (tol {tol:.3e})"),
            || alg_datum(&alg),
        );
    }
    t.finish(format!("({valid} valid, {invalid} invalid)"))
}

const AA_UNIMODULAR: [AaKind; 6] =
    [AaKind::Unimodular, AaKind::Normal, AaKind::Pluriclosed, AaKind::ChernFlat, AaKind::Cyt, AaKind::Nilpotent];
const C2_UNIMODULAR: [C2Kind; 7] = [
    C2Kind::AaUnimodular,
    C2Kind::Commuting,
    C2Kind::ChernFlat,
    C2Kind::KaehlerUnimodular,
    C2Kind::Btpv1,
    C2Kind::Btpv2,
    C2Kind::Btpv0,
];

fn c2(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c2", opts.seed);
    let mut worst = 0.0f64;
    for idx in 0..200 {
        let mut rng = t.rng(idx);
        let n = 2 + (idx / 2) % 4;
        let (alg, datum) = if idx % 2 == 0 {
            let d = sample_aa(&mut rng, n, AA_UNIMODULAR[(idx / 2) % AA_UNIMODULAR.len()]);
            (aa_alg(opts, &d), aa_datum(&d, opts.tol))
        } else {
            let d = c2_sample(&mut rng, idx / 2, &C2_UNIMODULAR, 2, 5);
            (build_codim2_with_tol(&d, opts.tol).expect("integrable sample"), c2_datum(&d, opts.tol))
        };
        let tol = tol_of(opts, &alg);
        let unimod = linalg::max_abs_vec(&crate::algebra::unimodularity_defect(&alg));
        let res = exterior::del_delbar_residual(&alg, alg.n() - 1).expect("valid degree");
        worst = worst.max(res / tol);
        t.record(
            idx,
            unimod <= 10.0 * tol && res <= 10.0 * tol,
            || format!("unimodularity defect {unimod:.3e}, del delbar omega^(n-1) residual {res:.3e} (tol {tol:.3e})"),
            || datum,
        );
    }
    t.finish(format!("(max residual {worst:.2} tol)"))
}

fn mixed_sample<R: Rng>(opts: &VerifyOptions, rng: &mut R, idx: usize) -> (Algebra, Option<Value>) {
    let n = 2 + (idx / 2) % 4;
    if idx % 2 == 0 {
        let d = sample_aa(rng, n, AA_KINDS[(idx / 2) % AA_KINDS.len()]);
        (aa_alg(opts, &d), aa_datum(&d, opts.tol))
    } else {
        let d = c2_sample(rng, idx / 2, &C2_KINDS, 2, 5);
        (build_codim2_with_tol(&d, opts.tol).expect("integrable sample"), c2_datum(&d, opts.tol))
    }
}

fn c3(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c3", opts.seed);
    let mut positives = 0;
    for idx in 0..200 {
        let mut rng = t.rng(idx);
        let (alg, datum) = mixed_sample(opts, &mut rng, idx);
        let tol = tol_of(opts, &alg);
        let q = hermitian::pluriclosed_tensor(&alg);
        let f = hermitian::pluriclosed_forms_array(&alg);
        let diff = q.max_diff(&f);
        let tensor_flag = q.max_abs() <= tol;
        let forms = exterior::del_delbar_residual(&alg, 1).expect("valid degree");
        let forms_flag = forms <= tol;
        positives += usize::from(tensor_flag);
        t.record(
            idx,
            diff <= 10.0 * tol && tensor_flag == forms_flag,
            || {
                format!(
                    "entrywise difference {diff:.3e}; tensor residual {:.3e} vs forms residual {forms:.3e}",
                    q.max_abs()
                )
            },
            || datum,
        );
    }
    t.finish(format!("({positives} pluriclosed)"))
}

fn c4(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c4", opts.seed);
    for idx in 0..100 {
        let mut rng = t.rng(idx);
        let n = 2 + idx % 4;
        let d = sample_aa(&mut rng, n, [AaKind::Unimodular, AaKind::Normal, AaKind::Pluriclosed][idx % 3]);
        let alg = aa_alg(opts, &d);
        let tol = tol_of(opts, &alg);
        let lam = d.lambda;
        let v2: f64 = d.v.iter().map(|z| z.norm_sqr()).sum();
        let s = hermitian::scalar_s(&alg);
        let s_hat = hermitian::scalar_s_hat(&alg);
        let (e1, e2) = ((s + lam * lam).abs(), (s_hat + 2.0 * lam * lam + v2).abs());
        t.record(
            idx,
            e1 <= 10.0 * tol && e2 <= 10.0 * tol,
            || format!("s = {s}, expected {}; s_hat = {s_hat}, expected {}", -lam * lam, -2.0 * lam * lam - v2),
            || aa_datum(&d, opts.tol),
        );
    }
    t.finish(String::new())
}

fn c5(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c5", opts.seed);
    let mut idx = 0;
    for n in 2..=5 {
        for j in 0..500 {
            let mut rng = t.rng(idx);
            let d = sample_aa(&mut rng, n, AA_KINDS[j % AA_KINDS.len()]);
            let r = aa_report_with_tol(&d, opts.tol);
            t.record(idx, r.is_ok(), || format!("{}", r.as_ref().unwrap_err()), || aa_datum(&d, opts.tol));
            idx += 1;
        }
    }
    let mut holds = 0;
    for j in 0..400 {
        let mut rng = t.rng(idx);
        let n = 2 + j % 4;
        let kind = match j {
            _ if j >= 200 => AaKind::Generic,
            _ if j % 2 == 0 => AaKind::Pluriclosed,
            _ => AaKind::Normal,
        };
        let d = sample_aa(&mut rng, n, kind);
        let tol = tol_of(opts, &aa_alg(opts, &d));
        let res = lafuente_residual(&d);
        let second = lafuente2_holds(&d);
        holds += usize::from(second);
        t.record(
            idx,
            (res <= tol) == second,
            || format!("matrix criterion residual {res:.3e}, eigenvalue criterion {second}"),
            || aa_datum(&d, opts.tol),
        );
        idx += 1;
    }
    t.finish(format!("(eigenvalue criterion held on {holds}/400)"))
}

fn c6(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c6", opts.seed);
    for idx in 0..200 {
        let mut rng = t.rng(idx);
        let n = 2 + idx % 4;
        let constructive = idx < 100;
        let d = sample_aa(&mut rng, n, if constructive { AaKind::Btp } else { AaKind::BtpPerturbed });
        let alg = aa_alg(opts, &d);
        let tol = tol_of(opts, &alg);
        let rep = hermitian::property_report(&alg).expect("valid algebra");
        let skew = linalg::max_abs(&d.h_matrix());
        let av = linalg::vec_norm(&linalg::mat_vec(&d.a, &d.v));
        let closed = skew <= tol && av <= tol;
        let f = &rep.flags;
        let ok = f.btp == constructive && f.bkl == constructive && closed == constructive;
        t.record(
            idx,
            ok,
            || format!("btp {}, bkl {}, A + A* = 0 and Av = 0: {closed}, expected {constructive}", f.btp, f.bkl),
            || aa_datum(&d, opts.tol),
        );
    }
    t.finish("(100 constructive, 100 perturbed)".into())
}

fn c7(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c7", opts.seed);
    let kinds = [AaKind::Pluriclosed, AaKind::Unimodular, AaKind::Pluriclosed, AaKind::Normal, AaKind::ChernFlat];
    let mut astheno_count = 0;
    for idx in 0..200 {
        let mut rng = t.rng(idx);
        let n = 4 + idx % 2;
        let d = sample_aa(&mut rng, n, kinds[(idx / 2) % kinds.len()]);
        let alg = aa_alg(opts, &d);
        let tol = tol_of(opts, &alg);
        let astheno = exterior::del_delbar_residual(&alg, n - 2).expect("valid degree") <= tol;
        let plc = hermitian::pluriclosed_tensor(&alg).max_abs() <= tol;
        let profile = aa_astheno_profile(&d);
        let cert = !astheno || profile.is_ok();
        astheno_count += usize::from(astheno);
        t.record(
            idx,
            astheno == plc && cert,
            || format!("astheno {astheno}, pluriclosed {plc}, certificate {profile:?}"),
            || aa_datum(&d, opts.tol),
        );
    }
    t.finish(format!("({astheno_count} astheno)"))
}

fn c8(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c8", opts.seed);
    let kinds =
        [AaKind::ChernFlat, AaKind::Cyt, AaKind::Unimodular, AaKind::Normal, AaKind::Pluriclosed, AaKind::Nilpotent];
    let (mut flat, mut cyt) = (0, 0);
    for idx in 0..200 {
        let mut rng = t.rng(idx);
        let n = 2 + idx % 4;
        let d = sample_aa(&mut rng, n, kinds[idx % kinds.len()]);
        let r = aa_report_with_tol(&d, opts.tol);
        let ok = match &r {
            Ok(rep) => {
                flat += usize::from(rep.engine.flags.chern_flat);
                cyt += usize::from(rep.engine.flags.cyt);
                rep.flags.unimodular && rep.engine.flags.chern_kaehler_like == rep.engine.flags.chern_flat
            }
            Err(_) => false,
        };
        t.record(
            idx,
            ok,
            || match &r {
                Ok(rep) => format!(
                    "unimodular {}, CKL {} vs Chern-flat {}",
                    rep.flags.unimodular, rep.engine.flags.chern_kaehler_like, rep.engine.flags.chern_flat
                ),
                Err(e) => e.to_string(),
            },
            || aa_datum(&d, opts.tol),
        );
    }
    t.finish(format!("({flat} Chern-flat, {cyt} CYT)"))
}

fn c9(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c9", opts.seed);
    let mut counts = [0usize; 4];
    for idx in 0..200 {
        let mut rng = t.rng(idx);
        let d = c2_sample(&mut rng, idx, &C2_KINDS, 2, 6);
        let r = c2_report_with_tol(&d, opts.tol);
        if let Ok(rep) = &r {
            let f = &rep.flags;
            for (c, b) in counts.iter_mut().zip([f.unimodular, f.balanced, f.kaehler, f.pluriclosed]) {
                *c += usize::from(b);
            }
        }
        t.record(idx, r.is_ok(), || r.as_ref().unwrap_err().to_string(), || c2_datum(&d, opts.tol));
    }
    t.finish(format!(
        "(unimodular {}, balanced {}, Kaehler {}, pluriclosed {})",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

fn c10(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c10", opts.seed);
    let mut idx = 0;
    // (i) Chern-flat normal forms
    for j in 0..100 {
        let mut rng = t.rng(idx);
        let n = 2 + j % 5;
        let d = sample_codim2(&mut rng, n, C2Kind::ChernFlat, true);
        let tol = opts.tol.unwrap_or(d.default_tol());
        let res = chern_flat_normal_form(&d, tol).and_then(|(nf, _)| {
            let alg = build_codim2_with_tol(&nf, Some(tol))?;
            Ok((c2_closed_flags(&d, tol).chern_flat, hermitian::chern_curvature(&alg).max_abs()))
        });
        let ok = matches!(res, Ok((true, r)) if r <= 10.0 * tol);
        t.record(idx, ok, || format!("normal form: {res:?}"), || c2_datum(&d, opts.tol));
        idx += 1;
    }
    // (ii) rank and sign of Ric^(1); (iii) Ric^(2) >= 0 forces R = 0
    let mut nonneg = 0;
    for j in 0..200 {
        let mut rng = t.rng(idx);
        let d = c2_sample(&mut rng, j, &C2_KINDS, 2, 6);
        let alg = build_codim2_with_tol(&d, opts.tol).expect("integrable sample");
        let tol = tol_of(opts, &alg);
        let r = hermitian::chern_curvature(&alg);
        let s = hermitian::scalar_s(&alg);
        let (ev, _) = linalg::hermitian_eigen(&hermitian::ricci_from_curvature(&r, RicciKind::First));
        let nonzero: Vec<f64> = ev.into_iter().filter(|x| x.abs() > 10.0 * tol).collect();
        let rank_ok = match nonzero.as_slice() {
            [] => s.abs() <= 10.0 * tol,
            [x] => x.signum() == s.signum() && s.abs() > 10.0 * tol,
            _ => false,
        };
        let (ev2, _) = linalg::hermitian_eigen(&hermitian::ricci_from_curvature(&r, RicciKind::Second));
        let min2 = ev2.last().copied().unwrap_or(0.0);
        let pos_ok = if min2 >= -tol {
            nonneg += 1;
            r.max_abs() <= 10.0 * tol
        } else {
            true
        };
        t.record(
            idx,
            rank_ok && pos_ok,
            || {
                format!(
                    "Ric1 nonzero eigenvalues {nonzero:?} with s = {s:e}; min eig Ric2 {min2:e}, |R| {:e}",
                    r.max_abs()
                )
            },
            || c2_datum(&d, opts.tol),
        );
        idx += 1;
    }
    // (iv) Bismut Ricci blocks with the scalar as printed
    let (mut printed_bad, mut corrected_bad, mut worst) = (0, 0, 0.0f64);
    for j in 0..200 {
        let mut rng = t.rng(idx);
        let d = c2_sample(&mut rng, j, &C2_KINDS, 2, 6);
        let alg = build_codim2_with_tol(&d, opts.tol).expect("integrable sample");
        let tol = tol_of(opts, &alg);
        let brf = hermitian::bismut_ricci_form(&alg);
        let (m20, mut m11) = bismut_ricci_closed(&d);
        let corrected = linalg::max_abs(&(&m20 - brf.m20.transpose())).max(linalg::max_abs(&(&m11 - &brf.m11)));
        m11[(0, 0)] = C64::new(codim2::s_b_printed(&d), 0.0);
        let printed = linalg::max_abs(&(&m20 - brf.m20.transpose())).max(linalg::max_abs(&(&m11 - &brf.m11)));
        printed_bad += usize::from(printed > 10.0 * tol);
        corrected_bad += usize::from(corrected > 10.0 * tol);
        worst = worst.max(printed);
        t.record(
            idx,
            printed <= 10.0 * tol,
            || {
                format!(
                    "Bismut Ricci blocks differ by {printed:.3e} (s_b as printed {:.6}, from d tau {:.6}, lambda Re tr(Y - X) = {:.6})",
                    codim2::s_b_printed(&d),
                    brf.m11[(0, 0)].re,
                    d.lambda * linalg::trace(&d.b_matrix()).re
                )
            },
            || c2_datum(&d, opts.tol),
        );
        idx += 1;
    }
    t.finish(format!(
        "({nonneg} with Ric2 >= 0; printed s_b off on {printed_bad}/200, max {worst:.3e}; with eta_1 = tr X - tr Y off on {corrected_bad}/200)"
    ))
}

fn property_flags(a: &Algebra) -> Option<crate::hermitian::PropertyFlags> {
    hermitian::property_report(a).ok().map(|r| r.flags)
}

/// Frame-invariant comparison of two codimension-2 data sets.
fn invariant_distance(a: &Codim2Data, b: &Codim2Data) -> f64 {
    let sv = |m: &CMatrix| linalg::singular_values(m);
    [
        (a.lambda - b.lambda).abs(),
        (linalg::vec_norm(&a.v) - linalg::vec_norm(&b.v)).abs(),
        real_distance(&sv(&a.b_matrix()), &sv(&b.b_matrix())),
        real_distance(&sv(&a.z), &sv(&b.z)),
        multiset_distance(&linalg::eigenvalues(&a.x), &linalg::eigenvalues(&b.x)),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Generator data must be unimodular and BTP; v1 is BKL, v0 balanced and
/// not pluriclosed, v2 neither balanced nor pluriclosed.
pub(crate) fn generator_check(d: &Codim2Data, family: &str, tol: Option<f64>) -> (bool, String) {
    let alg = match build_codim2_with_tol(d, tol) {
        Ok(a) => a,
        Err(e) => return (false, format!("{family}: {e}")),
    };
    let tol = tol.unwrap_or(alg.tol());
    let rep = match hermitian::property_report(&alg) {
        Ok(r) => r,
        Err(e) => return (false, format!("{family}: {e}")),
    };
    let r = &rep.residuals;
    let (btp, unimod) = (r["btp"] <= 10.0 * tol, r["unimodular"] <= 10.0 * tol);
    let f = &rep.flags;
    let pattern = match family {
        "v1" => f.bkl,
        "v2" => !f.balanced && !f.pluriclosed,
        _ => f.balanced && !f.pluriclosed,
    };
    let mut message = format!(
        "{family}: btp residual {:.3e}, unimodular residual {:.3e}, bkl {}, balanced {}, pluriclosed {}",
        r["btp"], r["unimodular"], f.bkl, f.balanced, f.pluriclosed
    );
    if family == "v0" {
        message.push_str(&format!(", rank Z = {}", linalg::rank(&d.z, tol)));
    }
    (btp && unimod && pattern, message)
}

/// Classifies `scrambled`, a frame change of generator data `d`, and checks
/// the family tag, the gauge-normalized parameters, the frame invariants and
/// the property flags in the returned frame.
pub(crate) fn classifier_roundtrip(
    d: &Codim2Data,
    family: &str,
    scrambled: &Codim2Data,
    tol: Option<f64>,
) -> (bool, String) {
    let n = d.n();
    let tol = tol.unwrap_or(scrambled.default_tol());
    let bound = 10.0 * tol * (1.0 + d.magnitude());
    let outcome = classify_btp_with_tol(scrambled, Some(tol)).and_then(|cl| {
        let params_ok = match (&cl.class, family) {
            (BtpClass::V1 { v2, .. }, "v1") | (BtpClass::V2 { v2, .. }, "v2") => (v2 - d.v[0].re).abs() <= bound,
            (&BtpClass::V0 { r, ref s, .. }, "v0") => {
                let sv = linalg::singular_values(&d.z);
                r == linalg::rank(&d.z, tol) && real_distance(s, &sv[..r]) <= bound
            }
            _ => false,
        };
        let p_ok = match (&cl.class, family) {
            (BtpClass::V2 { p, .. }, _) => (p - d.z[(0, 1)].re).abs() <= bound,
            _ => true,
        };
        let regen = cl.regenerate(n)?.ok_or_else(|| Error::Numerical(format!("classified as {:?}", cl.class)))?;
        let inv = invariant_distance(scrambled, &regen);
        let moved = crate::algebra::change_frame(
            &build_codim2_with_tol(scrambled, Some(tol))?,
            cl.frame.as_ref().expect("frame for BTP classes"),
        )?;
        let flags_ok = property_flags(&moved) == property_flags(&build_codim2_with_tol(&regen, Some(tol))?);
        Ok((cl.class.tag(), params_ok && p_ok, inv, flags_ok))
    });
    let ok = matches!(&outcome, Ok((_, true, inv, true)) if *inv <= bound);
    (ok, format!("expected {family}, got {outcome:?}"))
}

fn c11(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c11", opts.seed);
    let mut idx = 0;
    let mut v0_high_rank = 0;
    for (family, lo) in [("v1", 2usize), ("v2", 3), ("v0", 3)] {
        for j in 0..50 {
            let mut rng = t.rng(idx);
            let n = lo + j % (8 - lo);
            let d = match family {
                "v1" => sampling::random_btpv1(&mut rng, n),
                "v2" => sampling::random_btpv2(&mut rng, n),
                _ => sampling::random_btpv0(&mut rng, n),
            };
            if family == "v0" && linalg::rank(&d.z, 1e-9) >= 2 {
                v0_high_rank += 1;
            }
            let (ok, message) = generator_check(&d, family, opts.tol);
            t.record(idx, ok, || message, || c2_datum(&d, opts.tol));
            idx += 1;
        }
    }
    let mut recovered = 0;
    let mut unexplained = 0;
    for j in 0..100 {
        let mut rng = t.rng(idx);
        let family = ["v1", "v2", "v0"][j % 3];
        let n = 3 + (j / 3) % 5;
        let d = match family {
            "v1" => sampling::random_btpv1(&mut rng, n),
            "v2" => sampling::random_btpv2(&mut rng, n),
            _ => sampling::random_btpv0(&mut rng, n),
        };
        let u = linalg::random_unitary(&mut rng, n - 1);
        let scrambled = d.transform(&u).expect("matching size");
        let (ok, message) = classifier_roundtrip(&d, family, &scrambled, opts.tol);
        recovered += usize::from(ok);
        if !ok && !(family == "v0" && linalg::rank(&d.z, 1e-9) >= 2) {
            unexplained += 1;
        }
        t.record(idx, ok, || message, || c2_datum(&scrambled, opts.tol));
        idx += 1;
    }
    t.finish(format!(
        "({recovered}/100 classified, {unexplained} misses outside v0 rank Z >= 2; {v0_high_rank}/50 v0 draws with rank Z >= 2)"
    ))
}

fn c12(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c12", opts.seed);
    for idx in 0..400 {
        let mut rng = t.rng(idx);
        let r = 1 + idx % 4;
        let (b, z) = sampling::lemma9_pair(&mut rng, r);
        let compatible = idx < 200;
        let z = if compatible {
            z
        } else {
            let eps = rng.random_range(0.05..0.5);
            sampling::perturb(&mut rng, &z, eps)
        };
        let tol = opts.tol.unwrap_or(lemma9::default_tol(&b, &z));
        let res = codim2::lemma9_factor_with_tol(&b, &z, Some(tol));
        let ok = match &res {
            Ok(f) if compatible => f.invariant_residual(&b, &z) <= 10.0 * tol,
            Err(Error::NotCompatible { .. }) => !compatible,
            _ => false,
        };
        t.record(
            idx,
            ok,
            || match &res {
                Ok(f) => format!("invariant residual {:.3e}", f.invariant_residual(&b, &z)),
                Err(e) => e.to_string(),
            },
            || Some(json!({"b": report::matrix(&b), "z": report::matrix(&z)})),
        );
    }
    t.finish("(200 compatible, 200 perturbed)".into())
}

/// Runs `c1..c12` in order under `m`; returns the first criterion that
/// passes normally and fails under the mutation.
pub fn detect_mutation(opts: &VerifyOptions, m: mutation::Mutation) -> Option<&'static str> {
    let base = VerifyOptions { filter: None, ..opts.clone() };
    for c in CRITERIA.iter().take(12) {
        if !(c.run)(&base).passed {
            continue;
        }
        if !mutation::with(m, || (c.run)(&base)).passed {
            return Some(c.id);
        }
    }
    None
}

fn c13(opts: &VerifyOptions) -> CriterionResult {
    let mut t = Tally::new("c13", opts.seed);
    let mut notes = Vec::new();
    for (idx, m) in [mutation::Mutation::TorsionSign, mutation::Mutation::CurvatureSign].into_iter().enumerate() {
        let found = detect_mutation(opts, m);
        notes.push(format!("{} caught by {}", m.name(), found.unwrap_or("nothing")));
        t.record(idx, found.is_some(), || format!("mutation {} not detected", m.name()), || None);
    }
    t.finish(format!("({})", notes.join("; ")))
}

/// Criteria that fail because a printed formula disagrees with the engine:
/// the Bismut scalar curvature in `c10` and rank `r >= 2` BTPv0 data in `c11`.
pub const KNOWN_DISCREPANCIES: [&str; 2] = ["c10", "c11"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_matches_ids_and_tags() {
        assert!(CRITERIA[10].matches("prop5"));
        assert!(CRITERIA[10].matches("C11"));
        assert!(!CRITERIA[10].matches("prop4"));
        let r = run(&VerifyOptions { seed: 0, tol: None, filter: Some("lemma9".into()) });
        assert_eq!(r.len(), 1);
        assert!(r[0].passed, "{r:?}");
    }

    #[test]
    fn multiset_distance_ignores_order() {
        let a = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let b = [C64::new(0.0, 2.0), C64::new(1.0, 1e-12)];
        assert!(multiset_distance(&a, &b) < 1e-11);
        assert!(multiset_distance(&a, &b[..1]).is_infinite());
    }
}
