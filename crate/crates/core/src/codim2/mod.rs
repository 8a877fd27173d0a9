//! Lie algebras with a `J`-invariant abelian ideal of codimension 2.
//!
//! In an admissible frame the nonzero structure constants are
//! `C^j_{1i} = X_ij`, `D^1_{11} = lambda`, `D^j_{i1} = Y_ij`, `D^1_{ij} = Z_ij`,
//! `D^1_{i1} = v_i` for `2 <= i, j <= n`, subject to
//! `lambda (X* + Y) + [X*, Y] - Z conj(Z) = 0` and `lambda Z - (Z X^t + Y Z) = 0`.

pub mod btp;
pub mod classify;
pub mod lemma9;

pub use btp::{btpv0_r_warning, c2_btp_residuals, make_btpv0, make_btpv1, make_btpv2, BtpResiduals};
pub use classify::{classify_btp, classify_btp_with_tol, BtpClass, Classification};
pub use lemma9::{lemma9_factor, lemma9_factor_with_tol, Lemma9Factorization};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::algebra::{default_tolerance, Algebra, Tensor3, MAX_DIM};
use crate::error::{Error, Result};
use crate::hermitian::{self, PropertyReport, RicciKind};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Codim2Data {
    pub lambda: f64,
    pub v: Vec<C64>,
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl Codim2Data {
    pub fn new(lambda: f64, v: Vec<C64>, x: CMatrix, y: CMatrix, z: CMatrix) -> Result<Self> {
        let m = v.len();
        if m + 1 < 2 || m + 1 > MAX_DIM {
            return Err(Error::InvalidDimension { n: m + 1, max: MAX_DIM });
        }
        for mat in [&x, &y, &z] {
            if mat.nrows() != m || mat.ncols() != m {
                return Err(Error::DimensionMismatch { left: m, right: mat.nrows().max(mat.ncols()) });
            }
        }
        if !lambda.is_finite() {
            return Err(Error::NonFinite("lambda"));
        }
        let all = v.iter().chain(x.iter()).chain(y.iter()).chain(z.iter());
        if all.clone().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("codimension-2 data"));
        }
        Ok(Self { lambda, v, x, y, z })
    }

    pub fn n(&self) -> usize {
        self.v.len() + 1
    }

    /// `A = Z^t - Z`.
    pub fn a_matrix(&self) -> CMatrix {
        self.z.transpose() - &self.z
    }

    /// `B = Y - X`.
    pub fn b_matrix(&self) -> CMatrix {
        &self.y - &self.x
    }

    pub fn magnitude(&self) -> f64 {
        [
            self.lambda.abs(),
            linalg::max_abs_vec(&self.v),
            linalg::max_abs(&self.x),
            linalg::max_abs(&self.y),
            linalg::max_abs(&self.z),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn default_tol(&self) -> f64 {
        default_tolerance(self.magnitude())
    }

    /// The two integrability residual matrices.
    pub fn integrability(&self) -> (CMatrix, CMatrix) {
        let lam = C64::new(self.lambda, 0.0);
        let xs = self.x.adjoint();
        let r1 = (&xs + &self.y) * lam + linalg::commutator(&xs, &self.y) - &self.z * linalg::conj(&self.z);
        let r2 = &self.z * lam - (&self.z * self.x.transpose() + &self.y * &self.z);
        (r1, r2)
    }

    pub fn integrability_residual(&self) -> f64 {
        let (r1, r2) = self.integrability();
        linalg::max_abs(&r1).max(linalg::max_abs(&r2))
    }

    /// Unitary change of `e_2..e_n`: `v -> U v`, `X -> U X U*`, `Y -> U Y U*`,
    /// `Z -> U Z U^t`.
    pub fn transform(&self, u: &CMatrix) -> Result<Self> {
        let m = self.v.len();
        if u.nrows() != m || u.ncols() != m {
            return Err(Error::DimensionMismatch { left: m, right: u.nrows() });
        }
        let us = u.adjoint();
        Self::new(
            self.lambda,
            linalg::mat_vec(u, &self.v),
            u * &self.x * &us,
            u * &self.y * &us,
            u * &self.z * u.transpose(),
        )
    }
}

fn tensors(d: &Codim2Data) -> (Tensor3, Tensor3) {
    let n = d.n();
    let mut c = Tensor3::zeros(n);
    let mut dd = Tensor3::zeros(n);
    dd.set(0, 0, 0, C64::new(d.lambda, 0.0));
    for i in 1..n {
        dd.set(0, i, 0, d.v[i - 1]);
        for j in 1..n {
            let x = d.x[(i - 1, j - 1)];
            c.set(j, 0, i, x);
            c.set(j, i, 0, -x);
            dd.set(j, i, 0, d.y[(i - 1, j - 1)]);
            dd.set(0, i, j, d.z[(i - 1, j - 1)]);
        }
    }
    (c, dd)
}

pub fn build_codim2(d: &Codim2Data) -> Result<Algebra> {
    build_codim2_with_tol(d, None)
}

pub fn build_codim2_with_tol(d: &Codim2Data, tol: Option<f64>) -> Result<Algebra> {
    if d.lambda < 0.0 {
        return Err(Error::NegativeLambda(d.lambda));
    }
    let tol = tol.unwrap_or_else(|| d.default_tol());
    let (r1, r2) = d.integrability();
    let (first, second) = (linalg::max_abs(&r1), linalg::max_abs(&r2));
    if first > tol || second > tol {
        return Err(Error::IntegrabilityViolation {
            first,
            second,
            first_matrix: linalg::to_pairs(&r1),
            second_matrix: linalg::to_pairs(&r2),
        });
    }
    build_codim2_unchecked(d, Some(tol))
}

/// Assembles the structure constants without the integrability gate; the
/// Jacobi residual is recorded on the result as usual.
pub fn build_codim2_unchecked(d: &Codim2Data, tol: Option<f64>) -> Result<Algebra> {
    let (c, dd) = tensors(d);
    Algebra::from_tensors(c, dd, tol)
}

pub fn extract_codim2(a: &Algebra) -> Result<Codim2Data> {
    let n = a.n();
    let tol = a.tol();
    let (c, d) = (a.c(), a.d());
    let mismatch = |tensor, j: usize, i: usize, k: usize| Error::PatternMismatch {
        family: "codimension 2",
        tensor,
        j: j + 1,
        i: i + 1,
        k: k + 1,
    };
    for j in 0..n {
        for i in 0..n {
            for k in 0..n {
                let in_d = (k == 0 && !(i == 0 && j >= 1)) || (j == 0 && i >= 1 && k >= 1);
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
    let lam = d.get(0, 0, 0);
    if lam.im.abs() > tol || lam.re < -tol {
        return Err(mismatch("D", 0, 0, 0));
    }
    let m = n - 1;
    Codim2Data::new(
        lam.re.max(0.0),
        (1..n).map(|i| d.get(0, i, 0)).collect(),
        CMatrix::from_fn(m, m, |i, j| c.get(j + 1, 0, i + 1)),
        CMatrix::from_fn(m, m, |i, j| d.get(j + 1, i + 1, 0)),
        CMatrix::from_fn(m, m, |i, j| d.get(0, i + 1, j + 1)),
    )
}

/// Max-abs of `X X* - Y X* + Z^t conj(Z) - Z conj(Z) + Y* Y - Y* X + lambda (Y - X)`.
pub fn skt_residual(d: &Codim2Data) -> f64 {
    let (x, y, z) = (&d.x, &d.y, &d.z);
    let zb = linalg::conj(z);
    let m = x * x.adjoint() - y * x.adjoint() + z.transpose() * &zb - z * &zb + y.adjoint() * y - y.adjoint() * x
        + (y - x) * C64::new(d.lambda, 0.0);
    linalg::max_abs(&m)
}

/// Bismut scalar curvature as printed:
/// `-2|v|^2 - lambda (2 lambda + 2 tr Y + 2 conj(tr Y) - tr X - conj(tr X))`.
pub fn s_b_printed(d: &Codim2Data) -> f64 {
    let v2: f64 = d.v.iter().map(|z| z.norm_sqr()).sum();
    let rx = linalg::trace(&d.x).re;
    let ry = linalg::trace(&d.y).re;
    -2.0 * v2 - d.lambda * (2.0 * d.lambda + 4.0 * ry - 2.0 * rx)
}

/// Bismut scalar curvature with `eta_1 = tr X - tr Y`:
/// `-2|v|^2 - lambda (2 lambda + tr X + conj(tr X))`.
pub fn s_b(d: &Codim2Data) -> f64 {
    let v2: f64 = d.v.iter().map(|z| z.norm_sqr()).sum();
    -2.0 * v2 - d.lambda * (2.0 * d.lambda + 2.0 * linalg::trace(&d.x).re)
}

/// Closed-form Bismut Ricci blocks `(M20, M11)` in the layout of the
/// Bismut Ricci display: `M20 = 1/2 [[0, v^t X^t], [-X v, 0]]` and
/// `M11 = [[s_b, -(v* Y + v^t conj(Z))], [-(Y* v + Z^t conj(v)), 0]]`.
///
/// `M20` pairs with the engine's `(2,0)` coefficients as
/// `sum_{k,l} M20_kl phi_l ^ phi_k`, i.e. `M20 = N^t` for the engine's `N`.
pub fn bismut_ricci_closed(d: &Codim2Data) -> (CMatrix, CMatrix) {
    let n = d.n();
    let xv = linalg::mat_vec(&d.x, &d.v);
    let vb: Vec<C64> = d.v.iter().map(|z| z.conj()).collect();
    let row = linalg::mat_vec(&d.y.transpose(), &vb); // (v* Y)^t
    let row2 = linalg::mat_vec(&linalg::conj(&d.z).transpose(), &d.v); // (v^t conj Z)^t
    let col = linalg::mat_vec(&d.y.adjoint(), &d.v);
    let col2 = linalg::mat_vec(&d.z.transpose(), &vb);
    let mut m20 = linalg::zeros(n, n);
    let mut m11 = linalg::zeros(n, n);
    m11[(0, 0)] = C64::new(s_b(d), 0.0);
    for i in 1..n {
        m20[(0, i)] = xv[i - 1] * 0.5;
        m20[(i, 0)] = -xv[i - 1] * 0.5;
        m11[(0, i)] = -(row[i - 1] + row2[i - 1]);
        m11[(i, 0)] = -(col[i - 1] + col2[i - 1]);
    }
    (m20, m11)
}

/// Closed-form second Chern Ricci.
pub fn ric2_closed(d: &Codim2Data) -> CMatrix {
    let n = d.n();
    let m = n - 1;
    let v2: f64 = d.v.iter().map(|z| z.norm_sqr()).sum();
    let z2 = linalg::frobenius(&d.z).powi(2);
    let vb: Vec<C64> = d.v.iter().map(|z| z.conj()).collect();
    // row: -(v^t Z* + v* Y); column: -(Z conj(v) + Y* v)
    let row_a = linalg::mat_vec(&linalg::conj(&d.z), &d.v); // (v^t Z*)^t = conj(Z) v
    let row_b = linalg::mat_vec(&d.y.transpose(), &vb);
    let col_a = linalg::mat_vec(&d.z, &vb);
    let col_b = linalg::mat_vec(&d.y.adjoint(), &d.v);
    let vv = CMatrix::from_fn(m, m, |i, j| d.v[i] * d.v[j].conj());
    let lower = vv + &d.z * d.z.adjoint() + linalg::commutator(&d.y, &d.y.adjoint())
        - (&d.y + d.y.adjoint()) * C64::new(d.lambda, 0.0);
    let mut out = linalg::zeros(n, n);
    out[(0, 0)] = C64::new(-(v2 + z2 + 2.0 * d.lambda * d.lambda), 0.0);
    for i in 1..n {
        out[(0, i)] = -(row_a[i - 1] + row_b[i - 1]);
        out[(i, 0)] = -(col_a[i - 1] + col_b[i - 1]);
        for j in 1..n {
            out[(i, j)] = lower[(i - 1, j - 1)];
        }
    }
    out
}

/// Closed-form third Chern Ricci `[[s_hat, -(v^t conj(Z))], [-(Y* v), 0]]`.
pub fn ric3_closed(d: &Codim2Data) -> CMatrix {
    let n = d.n();
    let row = linalg::mat_vec(&linalg::conj(&d.z).transpose(), &d.v);
    let col = linalg::mat_vec(&d.y.adjoint(), &d.v);
    let mut out = linalg::zeros(n, n);
    out[(0, 0)] = C64::new(s_hat_closed(d), 0.0);
    for i in 1..n {
        out[(0, i)] = -row[i - 1];
        out[(i, 0)] = -col[i - 1];
    }
    out
}

/// Chern-flat normal form: `Y` diagonal with equal eigenvalues grouped and
/// `X` block diagonal over the groups. Returns the normal-form data and the
/// frame change `U` on `e_2..e_n`.
pub fn chern_flat_normal_form(d: &Codim2Data, tol: f64) -> Result<(Codim2Data, CMatrix)> {
    let m = d.v.len();
    let (q, t) = linalg::schur(&d.y);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (t[(i, i)], t[(j, j)]);
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    let u = CMatrix::from_fn(m, m, |i, j| q[(i, order[j])]).adjoint();
    let moved = d.transform(&u)?;
    let ev: Vec<C64> = (0..m).map(|i| moved.y[(i, i)]).collect();
    // group boundaries: eigenvalues within tol are one block
    let mut group = vec![0usize; m];
    for i in 1..m {
        group[i] = group[i - 1] + usize::from((ev[i] - ev[i - 1]).norm() > tol);
    }
    let mut x = linalg::zeros(m, m);
    let mut off_block: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            if group[i] == group[j] {
                x[(i, j)] = moved.x[(i, j)];
            } else {
                off_block = off_block.max(moved.x[(i, j)].norm());
            }
        }
    }
    let off_diag = linalg::max_abs(&(&moved.y - linalg::diag(&ev)));
    if off_block.max(off_diag) > 10.0 * tol {
        return Err(Error::Numerical(format!(
            "no Chern-flat normal form (off-block residual {:.3e})",
            off_block.max(off_diag)
        )));
    }
    let normal = Codim2Data::new(d.lambda, moved.v, x, linalg::diag(&ev), moved.z)?;
    Ok((normal, u))
}

/// Closed-form Chern scalar curvature `-lambda (2 lambda + tr Y + conj(tr Y))`.
pub fn s_closed(d: &Codim2Data) -> f64 {
    -d.lambda * (2.0 * d.lambda + 2.0 * linalg::trace(&d.y).re)
}

/// Closed-form altered scalar curvature
/// `-|v|^2 - lambda (2 lambda + tr Y + conj(tr X))`.
pub fn s_hat_closed(d: &Codim2Data) -> f64 {
    let v2: f64 = d.v.iter().map(|z| z.norm_sqr()).sum();
    let t = linalg::trace(&d.y) + linalg::trace(&d.x).conj();
    -v2 - d.lambda * (2.0 * d.lambda + t.re)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C2Flags {
    pub unimodular: bool,
    pub balanced: bool,
    pub kaehler: bool,
    pub pluriclosed: bool,
    pub chern_flat: bool,
    pub cyt: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C2Report {
    pub flags: C2Flags,
    pub s: f64,
    pub s_hat: f64,
    pub s_b: f64,
    pub s_b_printed: f64,
    /// Max-abs differences between closed-form matrices and the engine.
    pub ric2_residual: f64,
    pub bismut_ricci_residual: f64,
    /// `|s_b_printed - s_b(engine)|`; nonzero exactly when `lambda Re tr B != 0`.
    pub s_b_printed_residual: f64,
    pub ric1_rank: usize,
    pub engine: PropertyReport,
}

pub fn c2_closed_flags(d: &Codim2Data, tol: f64) -> C2Flags {
    let v_small = linalg::max_abs_vec(&d.v) <= tol;
    let tr_b = linalg::trace(&d.b_matrix());
    let unimodular = (d.lambda + tr_b.re).abs() <= tol && tr_b.im.abs() <= tol;
    let balanced = v_small && tr_b.norm() <= tol;
    let kaehler = v_small && linalg::max_abs(&(d.z.transpose() - &d.z)) <= tol && linalg::max_abs(&d.b_matrix()) <= tol;
    let pluriclosed = skt_residual(d) <= tol;
    let chern_flat = d.lambda.abs() <= tol
        && v_small
        && linalg::max_abs(&d.z) <= tol
        && linalg::max_abs(&linalg::commutator(&d.y, &d.y.adjoint())) <= tol
        && linalg::max_abs(&linalg::commutator(&d.y, &d.x.adjoint())) <= tol;
    let vb: Vec<C64> = d.v.iter().map(|z| z.conj()).collect();
    let xv = linalg::vec_norm(&linalg::mat_vec(&d.x, &d.v));
    let yz: Vec<C64> = linalg::mat_vec(&d.y.adjoint(), &d.v)
        .iter()
        .zip(linalg::mat_vec(&d.z.transpose(), &vb))
        .map(|(a, b)| a + b)
        .collect();
    let cyt = xv <= tol && linalg::vec_norm(&yz) <= tol && s_b(d).abs() <= tol;
    C2Flags { unimodular, balanced, kaehler, pluriclosed, chern_flat, cyt }
}

fn cross(property: &str, closed: bool, engine: bool, residual: f64) -> Result<()> {
    if closed != engine {
        return Err(Error::CrossCheckFailure { property: property.to_string(), closed, engine, residual });
    }
    Ok(())
}

pub fn c2_report(d: &Codim2Data) -> Result<C2Report> {
    c2_report_with_tol(d, None)
}

pub fn c2_report_with_tol(d: &Codim2Data, tol: Option<f64>) -> Result<C2Report> {
    let alg = build_codim2_with_tol(d, tol)?;
    let tol = alg.tol();
    let flags = c2_closed_flags(d, tol);
    let engine = hermitian::property_report(&alg)?;
    let e = &engine.flags;
    let r = |k: &str| engine.residuals[k];
    cross("unimodular", flags.unimodular, e.unimodular, r("unimodular"))?;
    cross("balanced", flags.balanced, e.balanced, r("balanced"))?;
    cross("kaehler", flags.kaehler, e.kaehler, r("kaehler"))?;
    cross("pluriclosed", flags.pluriclosed, e.pluriclosed, r("pluriclosed"))?;
    cross("chern_flat", flags.chern_flat, e.chern_flat, r("chern_flat"))?;
    cross("cyt", flags.cyt, e.cyt, r("cyt"))?;

    let ric2_residual = linalg::max_abs(&(ric2_closed(d) - hermitian::chern_ricci(&alg, RicciKind::Second)));
    let brf = hermitian::bismut_ricci_form(&alg);
    let (m20, m11) = bismut_ricci_closed(d);
    let bismut_ricci_residual = linalg::max_abs(&(m20 - brf.m20.transpose())).max(linalg::max_abs(&(m11 - &brf.m11)));
    let scale = 10.0 * tol;
    cross("ric2", true, ric2_residual <= scale, ric2_residual)?;
    cross("bismut_ricci", true, bismut_ricci_residual <= scale, bismut_ricci_residual)?;
    let ric3_residual = linalg::max_abs(&(ric3_closed(d) - hermitian::chern_ricci(&alg, RicciKind::Third)));
    cross("ric3", true, ric3_residual <= scale, ric3_residual)?;
    let s_res = (s_closed(d) - engine.scalars.s).abs();
    cross("s", true, s_res <= scale, s_res)?;
    let sh_res = (s_hat_closed(d) - engine.scalars.s_hat).abs();
    cross("s_hat", true, sh_res <= scale, sh_res)?;

    let ric1 = hermitian::chern_ricci(&alg, RicciKind::First);
    let ric1_rank = linalg::rank(&ric1, scale);
    Ok(C2Report {
        flags,
        s: engine.scalars.s,
        s_hat: engine.scalars.s_hat,
        s_b: s_b(d),
        s_b_printed: s_b_printed(d),
        ric2_residual,
        bismut_ricci_residual,
        s_b_printed_residual: (s_b_printed(d) - brf.m11[(0, 0)].re).abs(),
        ric1_rank,
        engine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{change_frame, UnitaryMatrix};
    use crate::exterior::{self, InvariantForm};
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn zero(m: usize) -> CMatrix {
        linalg::zeros(m, m)
    }

    #[test]
    fn vacuous_integrability() {
        let d = Codim2Data::new(0.0, vec![c(1.0, 2.0), c(0.0, -1.0)], zero(2), zero(2), zero(2)).unwrap();
        let a = build_codim2(&d).unwrap();
        let t = hermitian::chern_torsion(&a);
        assert_eq!(t.get(0, 0, 1), c(1.0, 2.0));
        assert_eq!(t.get(0, 0, 2), c(0.0, -1.0));
        assert_eq!(t.max_abs(), c(1.0, 2.0).norm());
    }

    #[test]
    fn btpv2_data_is_integrable() {
        let mut y = zero(2);
        let mut z = zero(2);
        y[(0, 1)] = c(1.5, 0.0);
        z[(0, 1)] = c(1.5, 0.0);
        let d = Codim2Data::new(0.0, vec![c(1.0, 0.0), c(0.0, 0.0)], zero(2), y, z).unwrap();
        assert!(build_codim2(&d).is_ok());
    }

    #[test]
    fn integrability_violation_reported() {
        let d = Codim2Data::new(1.0, vec![c(0.0, 0.0)], zero(1), linalg::identity(1), zero(1)).unwrap();
        match build_codim2(&d) {
            Err(Error::IntegrabilityViolation { first, second, first_matrix, .. }) => {
                assert_eq!(first, 1.0);
                assert_eq!(second, 0.0);
                assert_eq!(first_matrix, vec![vec![[1.0, 0.0]]]);
            }
            other => panic!("{other:?}"),
        }
        let neg = Codim2Data::new(-1.0, vec![c(0.0, 0.0)], zero(1), zero(1), zero(1)).unwrap();
        assert!(matches!(build_codim2(&neg), Err(Error::NegativeLambda(_))));
    }

    #[test]
    fn structure_equation_two_zero_part() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x = linalg::random_matrix(&mut rng, 2, 2);
        let d = Codim2Data::new(0.0, vec![c(0.0, 0.0); 2], x.clone(), zero(2), zero(2)).unwrap();
        let a = build_codim2_unchecked(&d, None).unwrap();
        for i in 2..=3 {
            let f = exterior::exterior_d(&a, &InvariantForm::phi(3, i)).unwrap();
            let p = exterior::bidegree_project(&f, 2, 0);
            for j in 2..=3 {
                // -(X^t)_{ij} phi_1 phi_j
                assert!((p.coeff(&[1, j], &[]) + x[(j - 2, i - 2)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn extract_roundtrip_and_aa_subfamily() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let am = linalg::random_matrix(&mut rng, 3, 3);
        let v = linalg::random_vector(&mut rng, 3);
        let aa = crate::almost_abelian::AlmostAbelianData::new(0.7, v.clone(), am.clone()).unwrap();
        let alg = crate::almost_abelian::build_almost_abelian(&aa).unwrap();
        let d = extract_codim2(&alg).unwrap();
        assert!(linalg::max_abs(&(&d.x + am.adjoint())) < 1e-15);
        assert!(linalg::max_abs(&(&d.y - &am)) < 1e-15);
        assert_eq!(linalg::max_abs(&d.z), 0.0);
        let back = build_codim2(&d).unwrap();
        assert_eq!(back.c().max_diff(alg.c()), 0.0);
        assert_eq!(extract_codim2(&back).unwrap(), d);
    }

    #[test]
    fn extract_rejects_ideal_bracket() {
        let one = c(1.0, 0.0);
        let a = crate::algebra::build_general(4, &[crate::algebra::Entry::new(3, 2, 4, one)], &[], None).unwrap();
        assert!(matches!(extract_codim2(&a), Err(Error::PatternMismatch { tensor: "C", j: 3, i: 2, k: 4, .. })));
    }

    #[test]
    fn transform_matches_change_frame() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let d = make_btpv0(6, 2, &[1.0, 2.0], &linalg::real_diag(&[1.0, -1.0]), &[c(0.3, 0.4)]).unwrap();
        let u = linalg::random_unitary(&mut rng, 5);
        let moved = build_codim2(&d.transform(&u).unwrap()).unwrap();
        let frame = UnitaryMatrix::new(linalg::embed_after_first(&u), 1e-12).unwrap();
        let direct = change_frame(&build_codim2(&d).unwrap(), &frame).unwrap();
        assert!(moved.c().max_diff(direct.c()) < 1e-12);
        assert!(moved.d().max_diff(direct.d()) < 1e-12);
    }

    #[test]
    fn kaehler_example() {
        let x = linalg::diag(&[c(1.0, 2.0), c(0.0, -1.0)]);
        let d = Codim2Data::new(0.0, vec![c(0.0, 0.0); 2], x.clone(), x, zero(2)).unwrap();
        let rep = c2_report(&d).unwrap();
        assert!(rep.flags.kaehler && rep.flags.unimodular && rep.flags.cyt);
    }

    #[test]
    fn chern_flat_example() {
        let y = linalg::diag(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)]);
        let mut x = zero(3);
        x[(0, 0)] = c(0.5, 1.0);
        x[(0, 1)] = c(2.0, 0.0);
        x[(1, 0)] = c(-1.0, 1.0);
        x[(2, 2)] = c(0.0, 3.0);
        let d = Codim2Data::new(0.0, vec![c(0.0, 0.0); 3], x, y, zero(3)).unwrap();
        let rep = c2_report(&d).unwrap();
        assert!(rep.flags.chern_flat);
        assert!(rep.engine.residual("chern_flat") < 1e-12);
    }

    #[test]
    fn chern_flat_reconstruction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let d = crate::sampling::sample_codim2(&mut rng, 5, crate::sampling::C2Kind::ChernFlat, true);
        let (nf, _) = chern_flat_normal_form(&d, d.default_tol()).unwrap();
        let a = build_codim2(&nf).unwrap();
        assert!(hermitian::chern_curvature(&a).max_abs() < 1e-12);
    }

    #[test]
    fn lambda_zero_v_zero_is_cyt() {
        let d = make_btpv0(4, 1, &[2.0], &linalg::diag(&[c(0.0, 1.0)]), &[c(1.0, 1.0)]).unwrap();
        let rep = c2_report(&d).unwrap();
        assert!(rep.flags.cyt && rep.engine.flags.cyt);
    }
}
