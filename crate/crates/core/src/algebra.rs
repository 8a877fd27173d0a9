//! Structure constants of a Lie algebra with Hermitian structure under a
//! unitary frame `e_1..e_n` of `g^{1,0}`.
//!
//! `C^j_{ik}` and `D^j_{ik}` are stored densely. Public indices are 1-based;
//! the accessors on [`Tensor3`] take 0-based `(j, i, k)` with `j` the upper
//! index.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

pub const MAX_DIM: usize = 16;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Dense rank-3 complex array indexed `(upper, lower, lower)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> C64) -> Self {
        let mut t = Self::zeros(n);
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    t.data[(j * n + i) * n + k] = f(j, i, k);
                }
            }
        }
        t
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, j: usize, i: usize, k: usize) -> C64 {
        self.data[(j * self.n + i) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, j: usize, i: usize, k: usize, v: C64) {
        self.data[(j * self.n + i) * self.n + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, C64)> + '_ {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(move |(idx, z)| (idx / (n * n), (idx / n) % n, idx % n, *z))
    }

    /// Entrywise max-abs difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }
}

/// One supplied structure constant, indices 1-based: value of `X^j_{ik}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub j: usize,
    pub i: usize,
    pub k: usize,
    pub v: C64,
}

impl Entry {
    pub fn new(j: usize, i: usize, k: usize, v: C64) -> Self {
        Self { j, i, k, v }
    }
}

/// Max-abs left-hand sides of the three Jacobi (first Bianchi) identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiResidual {
    pub cc: f64,
    pub cd: f64,
    pub cd_bar: f64,
}

impl JacobiResidual {
    pub fn max(&self) -> f64 {
        self.cc.max(self.cd).max(self.cd_bar)
    }
}

/// A Lie algebra with Hermitian structure, given by its structure constants
/// under a fixed unitary frame.
#[derive(Debug, Clone)]
pub struct Algebra {
    n: usize,
    c: Tensor3,
    d: Tensor3,
    tol: f64,
    jacobi: JacobiResidual,
}

/// `1e-9 * (1 + max input magnitude)`.
pub fn default_tolerance(max_magnitude: f64) -> f64 {
    1e-9 * (1.0 + max_magnitude)
}

fn check_dim(n: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::InvalidDimension { n, max: MAX_DIM });
    }
    Ok(())
}

impl Algebra {
    /// Assembles an algebra from dense tensors. `C` must already be
    /// antisymmetric in its lower indices.
    pub fn from_tensors(c: Tensor3, d: Tensor3, tol: Option<f64>) -> Result<Self> {
        let n = c.n();
        check_dim(n)?;
        if d.n() != n {
            return Err(Error::DimensionMismatch { left: n, right: d.n() });
        }
        if c.data.iter().chain(&d.data).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("structure constants"));
        }
        let tol = tol.unwrap_or_else(|| default_tolerance(c.max_abs().max(d.max_abs())));
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Parse(format!("tolerance must be positive, got {tol}")));
        }
        let mut a = Self { n, c, d, tol, jacobi: JacobiResidual { cc: 0.0, cd: 0.0, cd_bar: 0.0 } };
        a.jacobi = jacobi_residual(&a);
        Ok(a)
    }

    pub fn abelian(n: usize) -> Result<Self> {
        Self::from_tensors(Tensor3::zeros(n), Tensor3::zeros(n), None)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn c(&self) -> &Tensor3 {
        &self.c
    }

    #[inline]
    pub fn d(&self) -> &Tensor3 {
        &self.d
    }

    #[inline]
    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Jacobi residuals recorded at construction.
    pub fn jacobi(&self) -> JacobiResidual {
        self.jacobi
    }

    pub fn is_valid(&self) -> bool {
        self.jacobi.max() <= self.tol
    }

    pub fn max_magnitude(&self) -> f64 {
        self.c.max_abs().max(self.d.max_abs())
    }

    /// Bracket table of the complexification in the basis
    /// `(e_1..e_n, conj(e_1)..conj(e_n))`; entry `[a][b]` holds the coordinates
    /// of `[b_a, b_b]`.
    pub fn bracket_table(&self) -> Vec<Vec<Vec<C64>>> {
        let n = self.n;
        let m = 2 * n;
        let mut t = vec![vec![vec![ZERO; m]; m]; m];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let cij = self.c.get(k, i, j);
                    t[i][j][k] = cij;
                    t[n + i][n + j][n + k] = cij.conj();
                    // [e_i, conj e_j] = sum_k conj(D^i_{kj}) e_k - D^j_{ki} conj(e_k)
                    let x = self.d.get(i, k, j).conj();
                    let y = -self.d.get(j, k, i);
                    t[i][n + j][k] = x;
                    t[i][n + j][n + k] = y;
                    t[n + j][i][k] = -x;
                    t[n + j][i][n + k] = -y;
                }
            }
        }
        t
    }

    /// Whether the real Lie algebra is nilpotent, by the lower central series
    /// of its complexification.
    pub fn is_nilpotent(&self) -> bool {
        let m = 2 * self.n;
        let table = self.bracket_table();
        let thresh = 1e-7 * (1.0 + self.max_magnitude());
        // current term of the series, as orthonormal columns
        let mut current: Vec<Vec<C64>> =
            (0..m).map(|a| (0..m).map(|b| if a == b { C64::new(1.0, 0.0) } else { ZERO }).collect()).collect();
        for _ in 0..=m {
            let mut images: Vec<Vec<C64>> = Vec::new();
            for a in 0..m {
                for y in &current {
                    let mut out = vec![ZERO; m];
                    for (b, yb) in y.iter().enumerate() {
                        if *yb == ZERO {
                            continue;
                        }
                        for (o, t) in out.iter_mut().zip(&table[a][b]) {
                            *o += yb * t;
                        }
                    }
                    images.push(out);
                }
            }
            let mat = CMatrix::from_fn(m, images.len(), |i, j| images[j][i]);
            let dec = linalg::svd(&mat);
            let r = dec.s.iter().filter(|&&s| s > thresh).count();
            if r == 0 {
                return true;
            }
            if r == current.len() {
                return false;
            }
            current = (0..r).map(|j| dec.u.column(j).iter().copied().collect()).collect();
        }
        false
    }
}

/// Builds an algebra from sparse 1-based entries. Missing mirror entries of
/// `C` are filled by antisymmetry. The Jacobi residual is recorded, never
/// enforced.
pub fn build_general(n: usize, c_entries: &[Entry], d_entries: &[Entry], tol: Option<f64>) -> Result<Algebra> {
    check_dim(n)?;
    let mut c_seen: HashMap<(usize, usize, usize), C64> = HashMap::new();
    let mut d_seen: HashMap<(usize, usize, usize), C64> = HashMap::new();
    for (tensor, entries, seen) in [("C", c_entries, &mut c_seen), ("D", d_entries, &mut d_seen)] {
        for e in entries {
            if [e.j, e.i, e.k].iter().any(|&x| x == 0 || x > n) {
                return Err(Error::IndexOutOfRange { j: e.j, i: e.i, k: e.k, n });
            }
            if !e.v.re.is_finite() || !e.v.im.is_finite() {
                return Err(Error::NonFinite(tensor));
            }
            if seen.insert((e.j, e.i, e.k), e.v).is_some() {
                return Err(Error::DuplicateEntry { tensor, j: e.j, i: e.i, k: e.k });
            }
        }
    }
    let max_mag = c_seen.values().chain(d_seen.values()).fold(0.0f64, |a, z| a.max(z.norm()));
    let tol = tol.unwrap_or_else(|| default_tolerance(max_mag));

    let mut c = Tensor3::zeros(n);
    for (&(j, i, k), &v) in &c_seen {
        if i == k {
            if v.norm() > tol {
                return Err(Error::AntisymmetryViolation { j, i, k });
            }
            continue;
        }
        if let Some(&mirror) = c_seen.get(&(j, k, i)) {
            if (v + mirror).norm() > tol {
                return Err(Error::AntisymmetryViolation { j, i, k });
            }
        }
        c.set(j - 1, i - 1, k - 1, v);
        c.set(j - 1, k - 1, i - 1, -v);
    }
    let mut d = Tensor3::zeros(n);
    for (&(j, i, k), &v) in &d_seen {
        d.set(j - 1, i - 1, k - 1, v);
    }
    Algebra::from_tensors(c, d, Some(tol))
}

/// Max over free indices of the left-hand sides of the three Jacobi
/// identities written in terms of `C` and `D`.
pub fn jacobi_residual(a: &Algebra) -> JacobiResidual {
    let n = a.n();
    let (c, d) = (a.c(), a.d());
    let mut cc = 0.0f64;
    let mut cd = 0.0f64;
    let mut cd_bar = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s1 = ZERO;
                    let mut s2 = ZERO;
                    let mut s3 = ZERO;
                    for r in 0..n {
                        s1 += c.get(r, i, j) * c.get(l, r, k)
                            + c.get(r, j, k) * c.get(l, r, i)
                            + c.get(r, k, i) * c.get(l, r, j);
                        s2 += c.get(r, i, k) * d.get(l, j, r) + d.get(r, j, i) * d.get(l, r, k)
                            - d.get(r, j, k) * d.get(l, r, i);
                        s3 += c.get(r, i, k) * d.get(r, j, l).conj() - c.get(j, r, k) * d.get(i, r, l).conj()
                            + c.get(j, r, i) * d.get(k, r, l).conj()
                            - d.get(l, r, i) * d.get(k, j, r).conj()
                            + d.get(l, r, k) * d.get(i, j, r).conj();
                    }
                    cc = cc.max(s1.norm());
                    cd = cd.max(s2.norm());
                    cd_bar = cd_bar.max(s3.norm());
                }
            }
        }
    }
    JacobiResidual { cc, cd, cd_bar }
}

/// `w_i = sum_r (C^r_{ri} + D^r_{ri})`; zero iff unimodular.
pub fn unimodularity_defect(a: &Algebra) -> Vec<C64> {
    let n = a.n();
    (0..n).map(|i| (0..n).map(|r| a.c().get(r, r, i) + a.d().get(r, r, i)).sum()).collect()
}

pub fn is_unimodular(a: &Algebra) -> bool {
    linalg::max_abs_vec(&unimodularity_defect(a)) <= a.tol()
}

/// A unitary matrix checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        let residual = linalg::unitarity_residual(&m);
        if residual > tol {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(linalg::identity(n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self * other`: applying `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }
}

/// Contracts one lower index of a 3-tensor with `u`.
fn transform(t: &Tensor3, u: &CMatrix) -> Tensor3 {
    let n = t.n();
    // both lower indices: sum_i u_ai, sum_k u_bk
    let mut step1 = Tensor3::zeros(n);
    for j in 0..n {
        for a in 0..n {
            for k in 0..n {
                let s: C64 = (0..n).map(|i| u[(a, i)] * t.get(j, i, k)).sum();
                step1.set(j, a, k, s);
            }
        }
    }
    let mut step2 = Tensor3::zeros(n);
    for j in 0..n {
        for a in 0..n {
            for b in 0..n {
                let s: C64 = (0..n).map(|k| u[(b, k)] * step1.get(j, a, k)).sum();
                step2.set(j, a, b, s);
            }
        }
    }
    Tensor3::from_fn(n, |c, a, b| (0..n).map(|j| u[(c, j)].conj() * step2.get(j, a, b)).sum())
}

/// Structure constants of the same algebra in the frame `e'_a = sum_b U_ab e_b`.
///
/// Both tensors pick up `U` on each lower index and `conj(U)` on the upper one.
pub fn change_frame(a: &Algebra, u: &UnitaryMatrix) -> Result<Algebra> {
    if u.n() != a.n() {
        return Err(Error::DimensionMismatch { left: a.n(), right: u.n() });
    }
    let residual = linalg::unitarity_residual(u.matrix());
    if residual > a.tol() {
        return Err(Error::NotUnitary { residual });
    }
    let c = transform(a.c(), u.matrix());
    let d = transform(a.d(), u.matrix());
    Algebra::from_tensors(c, d, Some(a.tol()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn abelian_has_zero_tensors_and_residuals() {
        let a = build_general(2, &[], &[], None).unwrap();
        assert_eq!(a.c().max_abs(), 0.0);
        assert_eq!(a.d().max_abs(), 0.0);
        assert_eq!(a.jacobi().max(), 0.0);
        assert!(unimodularity_defect(&a).iter().all(|z| *z == ZERO));
    }

    #[test]
    fn mirror_entries_filled_by_antisymmetry() {
        let a = build_general(3, &[Entry::new(3, 1, 2, C64::new(2.0, 1.0))], &[], None).unwrap();
        assert_eq!(a.c().get(2, 1, 0), -C64::new(2.0, 1.0));
        let b = build_general(3, &[Entry::new(3, 1, 2, one()), Entry::new(3, 2, 1, -one())], &[], None).unwrap();
        assert_eq!(b.c().get(2, 0, 1), one());
    }

    #[test]
    fn contradictory_pair_is_rejected() {
        let err = build_general(2, &[Entry::new(1, 1, 2, one()), Entry::new(1, 2, 1, one())], &[], None).unwrap_err();
        assert!(matches!(err, Error::AntisymmetryViolation { .. }));
    }

    #[test]
    fn diagonal_c_entry_is_rejected() {
        let err = build_general(2, &[Entry::new(1, 2, 2, one())], &[], None).unwrap_err();
        assert!(matches!(err, Error::AntisymmetryViolation { .. }));
    }

    #[test]
    fn index_and_duplicate_errors() {
        let err = build_general(2, &[], &[Entry::new(3, 1, 1, one())], None).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
        let err = build_general(2, &[], &[Entry::new(0, 1, 1, one())], None).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
        let err = build_general(2, &[], &[Entry::new(1, 1, 1, one()), Entry::new(1, 1, 1, one())], None).unwrap_err();
        assert!(matches!(err, Error::DuplicateEntry { .. }));
        assert!(matches!(build_general(1, &[], &[], None), Err(Error::InvalidDimension { .. })));
        assert!(matches!(build_general(17, &[], &[], None), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn non_finite_rejected() {
        let err = build_general(2, &[], &[Entry::new(1, 1, 1, C64::new(f64::NAN, 0.0))], None).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn construction_records_nonzero_jacobi() {
        let a = build_general(2, &[Entry::new(1, 1, 2, one())], &[Entry::new(1, 1, 1, one())], None).unwrap();
        assert!(a.jacobi().max() > a.tol());
        assert!(!a.is_valid());
    }

    #[test]
    fn default_tolerance_scales_with_input() {
        let a = build_general(2, &[], &[Entry::new(1, 1, 1, C64::new(3.0, 0.0))], None).unwrap();
        assert!((a.tol() - 4e-9).abs() < 1e-20);
    }

    #[test]
    fn identity_frame_change_is_identity() {
        let a = build_general(2, &[], &[Entry::new(1, 1, 1, one())], None).unwrap();
        let b = change_frame(&a, &UnitaryMatrix::identity(2)).unwrap();
        assert_eq!(a.c(), b.c());
        assert_eq!(a.d(), b.d());
    }

    #[test]
    fn non_unitary_frame_rejected() {
        let a = Algebra::abelian(2).unwrap();
        let m = linalg::real_diag(&[2.0, 1.0]);
        assert!(matches!(UnitaryMatrix::new(m.clone(), 1e-9), Err(Error::NotUnitary { .. })));
        assert!(matches!(change_frame(&a, &UnitaryMatrix(m)), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn heisenberg_type_is_nilpotent() {
        // [e1, conj e1] has a component along e2 only: D^1_{21} = 1.
        let a = build_general(2, &[], &[Entry::new(1, 2, 1, one())], None).unwrap();
        assert!(a.is_valid());
        assert!(a.is_nilpotent());
        let b = build_general(2, &[], &[Entry::new(1, 1, 1, one())], None).unwrap();
        assert!(!b.is_nilpotent());
    }
}
