//! Chern and Bismut geometry of a Lie-Hermitian structure: torsion,
//! connection coefficients, Chern curvature, Ricci traces, covariant
//! derivatives of torsion, the Bismut Ricci form and the aggregated
//! [`PropertyReport`].

use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::algebra::{unimodularity_defect, Algebra, Tensor3};
use crate::error::{Error, Result};
use crate::exterior::{self, Differential, InvariantForm};
use crate::linalg::{self, CMatrix};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Deliberate formula corruptions used to demonstrate that the verification
/// battery notices a wrong sign. Scoped to the current thread.
pub mod mutation {
    use std::cell::Cell;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Mutation {
        /// `T^j_{ik} = -C^j_{ik} - D^j_{ik} - D^j_{ki}` (last sign flipped).
        TorsionSign,
        /// First product in the curvature sum enters with a minus sign.
        CurvatureSign,
    }

    impl Mutation {
        pub fn name(self) -> &'static str {
            match self {
                Mutation::TorsionSign => "torsion-sign",
                Mutation::CurvatureSign => "curvature-sign",
            }
        }

        pub fn parse(s: &str) -> Option<Self> {
            match s {
                "torsion-sign" => Some(Mutation::TorsionSign),
                "curvature-sign" => Some(Mutation::CurvatureSign),
                _ => None,
            }
        }
    }

    thread_local! {
        static ACTIVE: Cell<Option<Mutation>> = const { Cell::new(None) };
    }

    pub fn active() -> Option<Mutation> {
        ACTIVE.with(Cell::get)
    }

    /// Runs `f` with `m` active on this thread.
    pub fn with<T>(m: Mutation, f: impl FnOnce() -> T) -> T {
        struct Reset(Option<Mutation>);
        impl Drop for Reset {
            fn drop(&mut self) {
                ACTIVE.with(|a| a.set(self.0));
            }
        }
        let _reset = Reset(ACTIVE.with(|a| a.replace(Some(m))));
        f()
    }
}

use mutation::Mutation;

/// Chern torsion `T^j_{ik}`, antisymmetric in `(i, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionTensor(Tensor3);

impl TorsionTensor {
    pub fn n(&self) -> usize {
        self.0.n()
    }
    pub fn get(&self, j: usize, i: usize, k: usize) -> C64 {
        self.0.get(j, i, k)
    }
    pub fn tensor(&self) -> &Tensor3 {
        &self.0
    }
    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }
}

pub fn chern_torsion(a: &Algebra) -> TorsionTensor {
    let n = a.n();
    let (c, d) = (a.c(), a.d());
    let flip = if mutation::active() == Some(Mutation::TorsionSign) { -1.0 } else { 1.0 };
    let mut t = Tensor3::zeros(n);
    for j in 0..n {
        for i in 0..n {
            for k in (i + 1)..n {
                let v = -c.get(j, i, k) - d.get(j, i, k) + d.get(j, k, i) * flip;
                t.set(j, i, k, v);
                t.set(j, k, i, -v);
            }
        }
    }
    TorsionTensor(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConnectionKind {
    Chern,
    Bismut,
    /// The `t`-Gauduchon line `(1 - t/2) Chern + (t/2) Bismut`.
    GauduchonT(f64),
}

/// Connection coefficients `G^j_{ik} = <nabla_{e_k} e_i, conj(e_j)>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoeffs {
    kind: ConnectionKind,
    g: Tensor3,
}

impl ConnectionCoeffs {
    pub fn new(a: &Algebra, kind: ConnectionKind) -> Self {
        let n = a.n();
        let (c, d) = (a.c(), a.d());
        let g = match kind {
            ConnectionKind::Chern => d.clone(),
            ConnectionKind::Bismut => Tensor3::from_fn(n, |j, i, k| -c.get(j, i, k) + d.get(j, k, i)),
            ConnectionKind::GauduchonT(t) => Tensor3::from_fn(n, |j, i, k| {
                d.get(j, i, k) * (1.0 - t / 2.0) + (-c.get(j, i, k) + d.get(j, k, i)) * (t / 2.0)
            }),
        };
        Self { kind, g }
    }

    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }
    pub fn n(&self) -> usize {
        self.g.n()
    }
    pub fn get(&self, j: usize, i: usize, k: usize) -> C64 {
        self.g.get(j, i, k)
    }
    pub fn tensor(&self) -> &Tensor3 {
        &self.g
    }
}

/// Dense rank-4 complex array.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank4 {
    n: usize,
    data: Vec<C64>,
}

impl Rank4 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n * n * n] }
    }
    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        self.data[self.idx(a, b, c, d)]
    }
    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: C64) {
        let i = self.idx(a, b, c, d);
        self.data[i] = v;
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, z| a.max(z.norm()))
    }
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }
    pub fn iter_nonzero(&self) -> impl Iterator<Item = ([usize; 4], C64)> + '_ {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(move |(p, z)| ([p / (n * n * n), (p / (n * n)) % n, (p / n) % n, p % n], *z))
    }
}

/// Chern curvature `R_{i jbar k lbar}`, stored as `get(i, j, k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor(Rank4);

impl CurvatureTensor {
    pub fn n(&self) -> usize {
        self.0.n()
    }
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.0.get(i, j, k, l)
    }
    pub fn array(&self) -> &Rank4 {
        &self.0
    }
    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    /// Max deviation from `R_{i jbar k lbar} = conj(R_{j ibar l kbar})`.
    pub fn hermitian_symmetry_residual(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        worst = worst.max((self.get(i, j, k, l) - self.get(j, i, l, k).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// Max deviation from the Kaehler-like symmetry `R_{i jbar k lbar} = R_{k jbar i lbar}`.
    pub fn kaehler_symmetry_residual(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        worst = worst.max((self.get(i, j, k, l) - self.get(k, j, i, l)).norm());
                    }
                }
            }
        }
        worst
    }
}

pub fn chern_curvature(a: &Algebra) -> CurvatureTensor {
    let n = a.n();
    let d = a.d();
    let first = if mutation::active() == Some(Mutation::CurvatureSign) { -1.0 } else { 1.0 };
    let mut r = Rank4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = ZERO;
                    for q in 0..n {
                        s += d.get(q, k, i) * d.get(q, l, j).conj() * first
                            - d.get(l, q, i) * d.get(k, q, j).conj()
                            - d.get(j, q, i) * d.get(k, l, q).conj()
                            - d.get(i, q, j).conj() * d.get(l, k, q);
                    }
                    r.set(i, j, k, l, s);
                }
            }
        }
    }
    CurvatureTensor(r)
}

/// Gauduchon torsion 1-form `eta_i = sum_r T^r_{ri}`.
pub fn gauduchon_eta(a: &Algebra) -> Vec<C64> {
    eta_from_torsion(&chern_torsion(a))
}

fn eta_from_torsion(t: &TorsionTensor) -> Vec<C64> {
    let n = t.n();
    (0..n).map(|i| (0..n).map(|r| t.get(r, r, i)).sum()).collect()
}

/// `zeta_i = sum_r D^r_{ri}`.
pub fn zeta(a: &Algebra) -> Vec<C64> {
    let n = a.n();
    (0..n).map(|i| (0..n).map(|r| a.d().get(r, r, i)).sum()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RicciKind {
    First,
    Second,
    Third,
}

/// Ricci traces of the Chern curvature.
pub fn ricci_from_curvature(r: &CurvatureTensor, kind: RicciKind) -> CMatrix {
    let n = r.n();
    CMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|q| match kind {
                RicciKind::First => r.get(i, j, q, q),
                RicciKind::Second => r.get(q, q, i, j),
                RicciKind::Third => r.get(q, j, i, q),
            })
            .sum()
    })
}

pub fn chern_ricci(a: &Algebra, kind: RicciKind) -> CMatrix {
    ricci_from_curvature(&chern_curvature(a), kind)
}

/// Chern scalar curvature `s = tr Ric^(1)` (real part; imaginary part is
/// roundoff on valid algebras).
pub fn scalar_s(a: &Algebra) -> f64 {
    linalg::trace(&chern_ricci(a, RicciKind::First)).re
}

/// Altered scalar curvature `s_hat = tr Ric^(3)`.
pub fn scalar_s_hat(a: &Algebra) -> f64 {
    linalg::trace(&chern_ricci(a, RicciKind::Third)).re
}

/// `chi = sum_i eta_{i, ibar}` with the Chern covariant derivative:
/// `sum_j eta_j conj(sum_i D^i_{ji})`.
pub fn chi(a: &Algebra) -> f64 {
    let n = a.n();
    let eta = gauduchon_eta(a);
    (0..n).map(|j| eta[j] * (0..n).map(|i| a.d().get(i, j, i)).sum::<C64>().conj()).sum::<C64>().re
}

/// The D-only expressions for the Ricci tensors and `s`, valid on
/// unimodular algebras, returned as
/// `(Ric1, Ric2, Ric3, s)`.
pub fn ricci_closed_forms(a: &Algebra) -> (CMatrix, CMatrix, CMatrix, f64) {
    let n = a.n();
    let d = a.d();
    let z = zeta(a);
    let eta: Vec<C64> = (0..n).map(|i| (0..n).map(|r| d.get(r, i, r)).sum()).collect();
    let ric1 = CMatrix::from_fn(n, n, |i, j| {
        -(0..n).map(|r| z[r] * d.get(i, r, j).conj() + z[r].conj() * d.get(j, r, i)).sum::<C64>()
    });
    let ric2 = CMatrix::from_fn(n, n, |i, j| {
        let mut s = ZERO;
        for r in 0..n {
            for q in 0..n {
                s += d.get(r, i, q) * d.get(r, j, q).conj() - d.get(j, r, q) * d.get(i, r, q).conj();
            }
            s -= eta[r] * d.get(i, j, r).conj() + eta[r].conj() * d.get(j, i, r);
        }
        s
    });
    let ric3 = CMatrix::from_fn(n, n, |i, j| {
        let mut s = ZERO;
        for r in 0..n {
            for q in 0..n {
                s -= d.get(j, r, q) * d.get(i, q, r).conj();
            }
            s -= eta[r] * d.get(i, r, j).conj();
        }
        s
    });
    let mut s = ZERO;
    for t in 0..n {
        for r in 0..n {
            for q in 0..n {
                s -= d.get(t, r, q) * d.get(t, q, r).conj();
            }
        }
    }
    (ric1, ric2, ric3, s.re)
}

/// Covariant derivative of the torsion with respect to the connection `g`.
///
/// Unbarred: entry `(j, i, k, l)` is `T^j_{ik,l}`; barred: `T^j_{ik,lbar}`.
pub fn torsion_cov_deriv(t: &TorsionTensor, g: &ConnectionCoeffs, barred: bool) -> Result<Rank4> {
    let n = t.n();
    if g.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: g.n() });
    }
    let mut out = Rank4::zeros(n);
    for j in 0..n {
        for i in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = ZERO;
                    for r in 0..n {
                        if barred {
                            s += t.get(j, r, k) * g.get(i, r, l).conj() + t.get(j, i, r) * g.get(k, r, l).conj()
                                - t.get(r, i, k) * g.get(r, j, l).conj();
                        } else {
                            s += -t.get(j, r, k) * g.get(r, i, l) - t.get(j, i, r) * g.get(r, k, l)
                                + t.get(r, i, k) * g.get(j, r, l);
                        }
                    }
                    out.set(j, i, k, l, s);
                }
            }
        }
    }
    Ok(out)
}

/// Max-abs of both Bismut covariant derivatives of the torsion.
pub fn btp_residual(a: &Algebra) -> f64 {
    let t = chern_torsion(a);
    let g = ConnectionCoeffs::new(a, ConnectionKind::Bismut);
    let d1 = torsion_cov_deriv(&t, &g, false).expect("same n");
    let d2 = torsion_cov_deriv(&t, &g, true).expect("same n");
    d1.max_abs().max(d2.max_abs())
}

/// The pluriclosed tensor
/// `sum_r (-T^r_{ik} conj C^r_{jl} - T^j_{ir} conj D^k_{rl} + T^j_{kr} conj D^i_{rl}
///         + T^l_{ir} conj D^k_{rj} - T^l_{kr} conj D^i_{rj})`
/// stored as `get(i, k, j, l)`; it is antisymmetric in `(i, k)` and `(j, l)`.
pub fn pluriclosed_tensor(a: &Algebra) -> Rank4 {
    let n = a.n();
    let (c, d) = (a.c(), a.d());
    let t = chern_torsion(a);
    let mut out = Rank4::zeros(n);
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let mut s = ZERO;
                    for r in 0..n {
                        s += -t.get(r, i, k) * c.get(r, j, l).conj() - t.get(j, i, r) * d.get(k, r, l).conj()
                            + t.get(j, k, r) * d.get(i, r, l).conj()
                            + t.get(l, i, r) * d.get(k, r, j).conj()
                            - t.get(l, k, r) * d.get(i, r, j).conj();
                    }
                    out.set(i, k, j, l, s);
                }
            }
        }
    }
    out
}

/// Coefficients of `sqrt(-1) del delbar omega` on the canonical monomials
/// `phi_i phi_k cphi_j cphi_l` (`i < k`, `j < l`), from the forms engine,
/// laid out like [`pluriclosed_tensor`] and antisymmetrically extended.
pub fn pluriclosed_forms_array(a: &Algebra) -> Rank4 {
    let n = a.n();
    let dd = Differential::new(a);
    let omega = exterior::kaehler_form(n);
    let f = exterior::del_delbar(&dd, &omega, 1, 1).scale(C64::new(0.0, 1.0));
    let mut out = Rank4::zeros(n);
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                for l in (j + 1)..n {
                    let v = f.coeff(&[i + 1, k + 1], &[j + 1, l + 1]);
                    out.set(i, k, j, l, v);
                    out.set(k, i, j, l, -v);
                    out.set(i, k, l, j, -v);
                    out.set(k, i, l, j, v);
                }
            }
        }
    }
    out
}

/// The real 2-form `d tau`, `tau = sum_k alpha_k phi_k - conj(alpha_k) cphi_k`,
/// `alpha_k = sum_i Gamma^{b,i}_{ik}`, with its coefficient matrices.
#[derive(Debug, Clone)]
pub struct BismutRicci {
    pub form: InvariantForm,
    /// Coefficient of `phi_k ^ cphi_l` at `(k, l)`.
    pub m11: CMatrix,
    /// Antisymmetric `N` with `(2,0)`-part `= sum_{k,l} N_kl phi_k ^ phi_l`.
    pub m20: CMatrix,
}

pub fn bismut_ricci_form(a: &Algebra) -> BismutRicci {
    let n = a.n();
    let g = ConnectionCoeffs::new(a, ConnectionKind::Bismut);
    let mut tau = InvariantForm::zero(n);
    for k in 0..n {
        let alpha: C64 = (0..n).map(|i| g.get(i, i, k)).sum();
        tau = tau.add(&InvariantForm::monomial(n, &[k + 1], &[], alpha)).sub(&InvariantForm::monomial(
            n,
            &[],
            &[k + 1],
            alpha.conj(),
        ));
    }
    let form = exterior::exterior_d(a, &tau).expect("same n");
    let m11 = CMatrix::from_fn(n, n, |k, l| form.coeff(&[k + 1], &[l + 1]));
    let m20 = CMatrix::from_fn(n, n, |k, l| match k.cmp(&l) {
        std::cmp::Ordering::Less => form.coeff(&[k + 1, l + 1], &[]) * 0.5,
        std::cmp::Ordering::Greater => -form.coeff(&[l + 1, k + 1], &[]) * 0.5,
        std::cmp::Ordering::Equal => ZERO,
    });
    BismutRicci { form, m11, m20 }
}

/// `d(tr theta)` for the Chern connection; its vanishing is Chern Ricci flatness.
pub fn chern_ricci_form(a: &Algebra) -> InvariantForm {
    let n = a.n();
    let mut tr = InvariantForm::zero(n);
    for k in 0..n {
        let g: C64 = (0..n).map(|i| a.d().get(i, i, k)).sum();
        tr = tr.add(&InvariantForm::monomial(n, &[k + 1], &[], g)).sub(&InvariantForm::monomial(
            n,
            &[],
            &[k + 1],
            g.conj(),
        ));
    }
    exterior::exterior_d(a, &tr).expect("same n")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyFlags {
    pub kaehler: bool,
    pub balanced: bool,
    pub gauduchon: bool,
    pub pluriclosed: bool,
    /// `None` for `n = 2`, where the condition is not defined.
    pub astheno_kaehler: Option<bool>,
    pub chern_flat: bool,
    pub chern_kaehler_like: bool,
    pub btp: bool,
    pub bkl: bool,
    pub cyt: bool,
    pub chern_ricci_flat: bool,
    pub unimodular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scalars {
    pub s: f64,
    pub s_hat: f64,
    pub s_b: f64,
    pub chi: f64,
    pub eta_norm_sq: f64,
}

/// Booleans, the residuals that gate them, and scalar invariants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub n: usize,
    pub tol: f64,
    pub flags: PropertyFlags,
    pub residuals: BTreeMap<String, f64>,
    pub scalars: Scalars,
}

impl PropertyReport {
    pub fn residual(&self, name: &str) -> f64 {
        self.residuals[name]
    }
}

pub fn property_report(a: &Algebra) -> Result<PropertyReport> {
    let jac = a.jacobi().max();
    if jac > a.tol() {
        return Err(Error::InvalidAlgebra { residual: jac });
    }
    let n = a.n();
    let tol = a.tol();
    let t = chern_torsion(a);
    let r = chern_curvature(a);
    let eta = eta_from_torsion(&t);
    let chern = ConnectionCoeffs::new(a, ConnectionKind::Chern);
    let bismut = ConnectionCoeffs::new(a, ConnectionKind::Bismut);
    let ckl_arr = torsion_cov_deriv(&t, &chern, true)?;
    let b1 = torsion_cov_deriv(&t, &bismut, false)?;
    let b2 = torsion_cov_deriv(&t, &bismut, true)?;
    let ric1 = ricci_from_curvature(&r, RicciKind::First);
    let ric3 = ricci_from_curvature(&r, RicciKind::Third);
    let brf = bismut_ricci_form(a);

    let mut res = BTreeMap::new();
    let unimod = linalg::max_abs_vec(&unimodularity_defect(a));
    res.insert("jacobi".to_string(), jac);
    res.insert("unimodular".to_string(), unimod);
    res.insert("kaehler".to_string(), t.max_abs());
    res.insert("balanced".to_string(), linalg::max_abs_vec(&eta));
    res.insert("gauduchon".to_string(), exterior::del_delbar_residual(a, n - 1)?);
    let plc = pluriclosed_tensor(a).max_abs();
    res.insert("pluriclosed".to_string(), plc);
    res.insert("pluriclosed_forms".to_string(), exterior::del_delbar_residual(a, 1)?);
    let astheno = if n >= 4 {
        Some(exterior::del_delbar_residual(a, n - 2)?)
    } else if n == 3 {
        Some(plc)
    } else {
        None
    };
    if let Some(x) = astheno {
        res.insert("astheno_kaehler".to_string(), x);
    }
    res.insert("chern_flat".to_string(), r.max_abs());
    res.insert("chern_kaehler_like".to_string(), ckl_arr.max_abs());
    let btp = b1.max_abs().max(b2.max_abs());
    res.insert("btp".to_string(), btp);
    res.insert("bkl".to_string(), btp.max(plc));
    res.insert("cyt".to_string(), brf.form.max_abs());
    res.insert("chern_ricci_flat".to_string(), chern_ricci_form(a).max_abs());
    res.insert("curvature_hermitian_symmetry".to_string(), r.hermitian_symmetry_residual());

    let s = linalg::trace(&ric1).re;
    let s_hat = linalg::trace(&ric3).re;
    let chi_v = chi(a);
    let eta_norm_sq = eta.iter().map(|z| z.norm_sqr()).sum();
    res.insert("s_hat_identity".to_string(), (s_hat - (s - chi_v)).abs());

    let flags = PropertyFlags {
        kaehler: res["kaehler"] <= tol,
        balanced: res["balanced"] <= tol,
        gauduchon: res["gauduchon"] <= tol,
        pluriclosed: plc <= tol,
        astheno_kaehler: astheno.map(|x| x <= tol),
        chern_flat: res["chern_flat"] <= tol,
        chern_kaehler_like: res["chern_kaehler_like"] <= tol,
        btp: btp <= tol,
        bkl: res["bkl"] <= tol,
        cyt: res["cyt"] <= tol,
        chern_ricci_flat: res["chern_ricci_flat"] <= tol,
        unimodular: unimod <= tol,
    };
    let scalars = Scalars { s, s_hat, s_b: linalg::trace(&brf.m11).re, chi: chi_v, eta_norm_sq };
    Ok(PropertyReport { n, tol, flags, residuals: res, scalars })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_general, Entry};

    const ONE: C64 = C64 { re: 1.0, im: 0.0 };

    #[test]
    fn abelian_report() {
        let a = Algebra::abelian(3).unwrap();
        let rep = property_report(&a).unwrap();
        assert!(rep.flags.kaehler && rep.flags.chern_flat && rep.flags.btp && rep.flags.unimodular);
        assert!(rep.residuals.values().all(|&x| x == 0.0));
        assert_eq!(rep.scalars.s, 0.0);
    }

    #[test]
    fn invalid_algebra_rejected() {
        let a = build_general(2, &[Entry::new(1, 1, 2, ONE)], &[Entry::new(1, 1, 1, ONE)], None).unwrap();
        assert!(matches!(property_report(&a), Err(Error::InvalidAlgebra { .. })));
    }

    #[test]
    fn torsion_is_antisymmetric() {
        let a = build_general(
            3,
            &[Entry::new(2, 1, 3, C64::new(0.5, 1.0))],
            &[Entry::new(1, 2, 3, ONE), Entry::new(3, 3, 1, C64::new(0.0, 2.0))],
            None,
        )
        .unwrap();
        let t = chern_torsion(&a);
        for j in 0..3 {
            for i in 0..3 {
                for k in 0..3 {
                    assert_eq!(t.get(j, i, k), -t.get(j, k, i));
                }
            }
        }
    }

    #[test]
    fn gauduchon_line_endpoints() {
        let a = build_general(
            3,
            &[Entry::new(2, 1, 3, C64::new(0.5, 1.0))],
            &[Entry::new(1, 2, 3, ONE), Entry::new(3, 3, 1, C64::new(0.0, 2.0))],
            None,
        )
        .unwrap();
        let chern = ConnectionCoeffs::new(&a, ConnectionKind::Chern);
        let bismut = ConnectionCoeffs::new(&a, ConnectionKind::Bismut);
        let g0 = ConnectionCoeffs::new(&a, ConnectionKind::GauduchonT(0.0));
        let g2 = ConnectionCoeffs::new(&a, ConnectionKind::GauduchonT(2.0));
        assert_eq!(g0.tensor(), chern.tensor());
        assert_eq!(g2.tensor(), bismut.tensor());
        // Bismut = Chern + torsion
        let t = chern_torsion(&a);
        let sum = Tensor3::from_fn(3, |j, i, k| chern.get(j, i, k) + t.get(j, i, k));
        assert!(sum.max_diff(bismut.tensor()) < 1e-15);
    }

    #[test]
    fn zero_torsion_gives_zero_derivatives() {
        let a = Algebra::abelian(2).unwrap();
        let t = chern_torsion(&a);
        let g = ConnectionCoeffs::new(&a, ConnectionKind::Bismut);
        assert_eq!(torsion_cov_deriv(&t, &g, false).unwrap().max_abs(), 0.0);
        assert_eq!(torsion_cov_deriv(&t, &g, true).unwrap().max_abs(), 0.0);
        let other = ConnectionCoeffs::new(&Algebra::abelian(3).unwrap(), ConnectionKind::Chern);
        assert!(torsion_cov_deriv(&t, &other, true).is_err());
    }

    #[test]
    fn mutation_is_scoped() {
        let a = build_general(2, &[], &[Entry::new(2, 2, 1, ONE)], None).unwrap();
        let clean = chern_torsion(&a);
        let mutated = mutation::with(Mutation::TorsionSign, || chern_torsion(&a));
        assert_ne!(clean, mutated);
        assert_eq!(chern_torsion(&a), clean);
        assert_eq!(mutation::active(), None);
    }
}
