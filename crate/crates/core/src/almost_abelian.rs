//! Almost abelian Lie algebras: an abelian ideal of codimension one.
//!
//! In an admissible frame the structure constants are determined by a real
//! `lambda`, a vector `v` of length `n - 1` and a square matrix `A` of size
//! `n - 1`:
//! `D^1_{11} = lambda`, `D^1_{i1} = v_i`, `D^j_{i1} = A_ij`,
//! `C^j_{1i} = -conj(A_ji)` for `2 <= i, j <= n`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::algebra::{Algebra, Tensor3};
use crate::error::{Error, Result};
use crate::hermitian::{self, PropertyReport};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct AlmostAbelianData {
    pub lambda: f64,
    pub v: Vec<C64>,
    pub a: CMatrix,
}

impl AlmostAbelianData {
    pub fn new(lambda: f64, v: Vec<C64>, a: CMatrix) -> Result<Self> {
        let m = v.len();
        if a.nrows() != m || a.ncols() != m {
            return Err(Error::DimensionMismatch { left: m, right: a.nrows().max(a.ncols()) });
        }
        if m + 1 < 2 || m + 1 > crate::algebra::MAX_DIM {
            return Err(Error::InvalidDimension { n: m + 1, max: crate::algebra::MAX_DIM });
        }
        if !lambda.is_finite() {
            return Err(Error::NonFinite("lambda"));
        }
        if v.iter().chain(a.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("almost abelian data"));
        }
        Ok(Self { lambda, v, a })
    }

    pub fn n(&self) -> usize {
        self.v.len() + 1
    }

    /// `H = A + A*`.
    pub fn h_matrix(&self) -> CMatrix {
        &self.a + self.a.adjoint()
    }

    /// `h = tr H = 2 Re tr A`.
    pub fn h(&self) -> f64 {
        2.0 * linalg::trace(&self.a).re
    }

    /// `L = lambda H + H^2 + [A*, A]`.
    pub fn l_matrix(&self) -> CMatrix {
        let h = self.h_matrix();
        &h * C64::new(self.lambda, 0.0) + &h * &h + linalg::commutator(&self.a.adjoint(), &self.a)
    }

    fn magnitude(&self) -> f64 {
        self.lambda.abs().max(linalg::max_abs_vec(&self.v)).max(linalg::max_abs(&self.a))
    }
}

pub fn build_almost_abelian(d: &AlmostAbelianData) -> Result<Algebra> {
    build_almost_abelian_with_tol(d, None)
}

pub fn build_almost_abelian_with_tol(d: &AlmostAbelianData, tol: Option<f64>) -> Result<Algebra> {
    let n = d.n();
    let mut c = Tensor3::zeros(n);
    let mut dd = Tensor3::zeros(n);
    dd.set(0, 0, 0, C64::new(d.lambda, 0.0));
    for i in 1..n {
        dd.set(0, i, 0, d.v[i - 1]);
        for j in 1..n {
            dd.set(j, i, 0, d.a[(i - 1, j - 1)]);
            let x = d.a[(j - 1, i - 1)].conj();
            c.set(j, 0, i, -x);
            c.set(j, i, 0, x);
        }
    }
    Algebra::from_tensors(c, dd, tol)
}

/// Reads `(lambda, v, A)` back from an algebra in an admissible frame.
pub fn extract_almost_abelian(a: &Algebra) -> Result<AlmostAbelianData> {
    let n = a.n();
    let tol = a.tol();
    let (c, d) = (a.c(), a.d());
    let mismatch = |tensor, j: usize, i: usize, k: usize| Error::PatternMismatch {
        family: "almost abelian",
        tensor,
        j: j + 1,
        i: i + 1,
        k: k + 1,
    };
    for j in 0..n {
        for i in 0..n {
            for k in 0..n {
                let in_d = (j == 0 && k == 0) || (i >= 1 && k == 0);
                if !in_d && d.get(j, i, k).norm() > tol {
                    return Err(mismatch("D", j, i, k));
                }
                let in_c = j >= 1 && ((i == 0) != (k == 0));
                if !in_c && c.get(j, i, k).norm() > tol {
                    return Err(mismatch("C", j, i, k));
                }
            }
        }
    }
    if d.get(0, 0, 0).im.abs() > tol {
        return Err(mismatch("D", 0, 0, 0));
    }
    for j in 1..n {
        for i in 1..n {
            if (c.get(j, 0, i) + d.get(i, j, 0).conj()).norm() > tol {
                return Err(mismatch("C", j, 0, i));
            }
        }
    }
    let v = (1..n).map(|i| d.get(0, i, 0)).collect();
    let am = CMatrix::from_fn(n - 1, n - 1, |i, j| d.get(j + 1, i + 1, 0));
    AlmostAbelianData::new(d.get(0, 0, 0).re, v, am)
}

/// Eigenvalues of `A` and the clusters of `2 Re` of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenData {
    pub eigenvalues: Vec<[f64; 2]>,
    /// `(value, count)` for each cluster of `2 Re(eigenvalue)`, ascending.
    pub real_part_buckets: Vec<(f64, usize)>,
}

fn cluster_tol(d: &AlmostAbelianData) -> f64 {
    1e-7 * (1.0 + linalg::frobenius(&d.a).max(d.lambda.abs()))
}

fn buckets(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for x in sorted {
        match out.last_mut() {
            Some((_, cnt, sum)) if (x - *sum / *cnt as f64).abs() <= tol => {
                *cnt += 1;
                *sum += x;
            }
            _ => out.push((x, 1, x)),
        }
    }
    out.into_iter().map(|(_, c, s)| (s / c as f64, c)).collect()
}

pub fn eigen_data(d: &AlmostAbelianData) -> EigenData {
    let ev = linalg::eigenvalues(&d.a);
    let twice_re: Vec<f64> = ev.iter().map(|z| 2.0 * z.re).collect();
    EigenData {
        eigenvalues: ev.iter().map(|z| [z.re, z.im]).collect(),
        real_part_buckets: buckets(&twice_re, cluster_tol(d)),
    }
}

/// Max-abs of `(A + A*) A + A* (A + A*) + lambda (A + A*)`.
pub fn lafuente_residual(d: &AlmostAbelianData) -> f64 {
    let h = d.h_matrix();
    linalg::max_abs(&(&h * &d.a + d.a.adjoint() * &h + &h * C64::new(d.lambda, 0.0)))
}

/// `A` normal and every `Re(eigenvalue)` in `{0, -lambda/2}`.
pub fn lafuente2_holds(d: &AlmostAbelianData) -> bool {
    let tol = cluster_tol(d);
    if linalg::max_abs(&linalg::commutator(&d.a, &d.a.adjoint())) > tol {
        return false;
    }
    linalg::eigenvalues(&d.a).iter().all(|z| z.re.abs() <= tol || (z.re + d.lambda / 2.0).abs() <= tol)
}

/// Certificate for astheno-Kaehler in dimension `n >= 4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsthenoProfile {
    /// Number of eigenvalues with `2 Re = h`.
    pub k: usize,
    pub h: f64,
    pub commutator_residual: f64,
}

pub fn aa_astheno_profile(d: &AlmostAbelianData) -> Result<AsthenoProfile> {
    let n = d.n();
    if n < 4 {
        return Err(Error::InvalidDegree { k: n.saturating_sub(2), n });
    }
    let tol = cluster_tol(d);
    let comm = linalg::max_abs(&linalg::commutator(&d.a.adjoint(), &d.a));
    if comm > tol {
        return Err(Error::NotAstheno(format!("[A*, A] has max-abs {comm:.3e}")));
    }
    let h = d.h();
    let lambda = d.lambda;
    let mut k = 0;
    for z in linalg::eigenvalues(&d.a) {
        let x = 2.0 * z.re;
        if (x - h).abs() <= tol {
            k += 1;
        } else if (x - lambda - h).abs() > tol {
            return Err(Error::NotAstheno(format!(
                "2 Re of eigenvalue {:.6} is neither h = {h:.6} nor lambda + h = {:.6}",
                x,
                lambda + h
            )));
        }
    }
    let kandh = (n as f64 - 1.0 - k as f64) * lambda + (n as f64 - 2.0) * h;
    if kandh.abs() > tol * (n as f64) {
        return Err(Error::NotAstheno(format!("(n-1-k) lambda + (n-2) h = {kandh:.3e} with k = {k}")));
    }
    Ok(AsthenoProfile { k, h, commutator_residual: comm })
}

/// Closed-form curvature components `R_{1 1bar 1 1bar}`, `(R_{1 1bar i 1bar})`
/// and `(R_{1 1bar i jbar})`.
pub fn closed_form_curvature(d: &AlmostAbelianData) -> (C64, Vec<C64>, CMatrix) {
    let v2: f64 = d.v.iter().map(|z| z.norm_sqr()).sum();
    let r1111 = C64::new(-2.0 * d.lambda * d.lambda - v2, 0.0);
    let r11i1: Vec<C64> = linalg::mat_vec(&d.a.adjoint(), &d.v).into_iter().map(|z| -z).collect();
    let m = d.v.len();
    let vv = CMatrix::from_fn(m, m, |i, j| d.v[i] * d.v[j].conj());
    let r11ij = vv + linalg::commutator(&d.a, &d.a.adjoint()) - d.h_matrix() * C64::new(d.lambda, 0.0);
    (r1111, r11i1, r11ij)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AAFlags {
    pub nilpotent: bool,
    pub unimodular: bool,
    pub kaehler: bool,
    pub balanced: bool,
    pub pluriclosed: bool,
    /// Defined for `n >= 4`.
    pub astheno: Option<bool>,
    pub chern_flat: bool,
    /// Closed form known on unimodular algebras only.
    pub ckl: Option<bool>,
    pub btp: bool,
    pub bkl: bool,
    /// Closed form known on unimodular algebras only.
    pub cyt: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AAScalars {
    /// `-lambda^2` when unimodular.
    pub s: Option<f64>,
    /// `-2 lambda^2 - |v|^2` when unimodular.
    pub s_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AAReport {
    pub flags: AAFlags,
    pub scalars: AAScalars,
    pub eigen_data: EigenData,
    pub lafuente2: bool,
    pub engine: PropertyReport,
    pub engine_nilpotent: bool,
}

/// Closed-form flags only, without the engine.
pub fn aa_closed_forms(d: &AlmostAbelianData, tol: f64) -> (AAFlags, AAScalars) {
    let n = d.n();
    let m = n - 1;
    let lam = d.lambda;
    let re_tr = linalg::trace(&d.a).re;
    let v_small = linalg::max_abs_vec(&d.v) <= tol;
    let h = d.h_matrix();
    let comm_small = linalg::max_abs(&linalg::commutator(&d.a, &d.a.adjoint())) <= tol;
    let unimodular = (lam + 2.0 * re_tr).abs() <= tol;

    let norm_a = linalg::frobenius(&d.a);
    let mut pow = linalg::identity(m);
    for _ in 0..m {
        pow = &pow * &d.a;
    }
    let nilpotent = lam.abs() <= tol && linalg::frobenius(&pow) <= tol * (1.0 + norm_a).powi(m as i32);

    let kaehler = v_small && linalg::max_abs(&h) <= tol;
    let balanced = v_small && (2.0 * re_tr).abs() <= tol;
    let pluriclosed = lafuente_residual(d) <= tol;
    let astheno = (n >= 4).then(|| aa_astheno_profile(d).is_ok());
    let chern_flat = lam.abs() <= tol && v_small && comm_small;
    let av = linalg::vec_norm(&linalg::mat_vec(&d.a, &d.v));
    let btp = linalg::max_abs(&h) <= tol && av <= tol;
    let ckl = unimodular.then_some(chern_flat);
    let cyt = unimodular.then_some(lam.abs() <= tol && v_small && (2.0 * re_tr).abs() <= tol);
    let v2: f64 = d.v.iter().map(|z| z.norm_sqr()).sum();
    let scalars = AAScalars { s: unimodular.then_some(-lam * lam), s_hat: unimodular.then_some(-2.0 * lam * lam - v2) };
    let flags =
        AAFlags { nilpotent, unimodular, kaehler, balanced, pluriclosed, astheno, chern_flat, ckl, btp, bkl: btp, cyt };
    (flags, scalars)
}

fn cross(property: &str, closed: bool, engine: bool, residual: f64) -> Result<()> {
    if closed != engine {
        return Err(Error::CrossCheckFailure { property: property.to_string(), closed, engine, residual });
    }
    Ok(())
}

/// Closed-form classification, each flag cross-checked against the general
/// engine on the built algebra.
pub fn aa_report(d: &AlmostAbelianData) -> Result<AAReport> {
    aa_report_with_tol(d, None)
}

pub fn aa_report_with_tol(d: &AlmostAbelianData, tol: Option<f64>) -> Result<AAReport> {
    let alg = build_almost_abelian_with_tol(d, tol)?;
    let tol = alg.tol();
    let (flags, scalars) = aa_closed_forms(d, tol);
    let engine = hermitian::property_report(&alg)?;
    let engine_nilpotent = alg.is_nilpotent();
    let e = &engine.flags;
    let r = |k: &str| engine.residuals[k];
    cross("nilpotent", flags.nilpotent, engine_nilpotent, d.magnitude())?;
    cross("unimodular", flags.unimodular, e.unimodular, r("unimodular"))?;
    cross("kaehler", flags.kaehler, e.kaehler, r("kaehler"))?;
    cross("balanced", flags.balanced, e.balanced, r("balanced"))?;
    cross("pluriclosed", flags.pluriclosed, e.pluriclosed, r("pluriclosed"))?;
    if let (Some(c), Some(g)) = (flags.astheno, e.astheno_kaehler) {
        cross("astheno_kaehler", c, g, r("astheno_kaehler"))?;
    }
    cross("chern_flat", flags.chern_flat, e.chern_flat, r("chern_flat"))?;
    if let Some(c) = flags.ckl {
        cross("chern_kaehler_like", c, e.chern_kaehler_like, r("chern_kaehler_like"))?;
    }
    cross("btp", flags.btp, e.btp, r("btp"))?;
    cross("bkl", flags.bkl, e.bkl, r("bkl"))?;
    if let Some(c) = flags.cyt {
        cross("cyt", c, e.cyt, r("cyt"))?;
    }
    let scale = 10.0 * tol;
    if let Some(s) = scalars.s {
        let res = (s - engine.scalars.s).abs();
        cross("s", true, res <= scale, res)?;
    }
    if let Some(sh) = scalars.s_hat {
        let res = (sh - engine.scalars.s_hat).abs();
        cross("s_hat", true, res <= scale, res)?;
    }
    Ok(AAReport { lafuente2: lafuente2_holds(d), eigen_data: eigen_data(d), flags, scalars, engine, engine_nilpotent })
}
