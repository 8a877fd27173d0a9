//! Normal-form classification of BTP codimension-2 data.

use num_complex::Complex64 as C64;

use super::{build_codim2_with_tol, lemma9_factor_with_tol, make_btpv0, make_btpv1, make_btpv2, Codim2Data};
use crate::algebra::UnitaryMatrix;
use crate::error::{Error, Result};
use crate::hermitian;
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum BtpClass {
    V1 { v2: f64, a: Vec<C64> },
    V2 { v2: f64, p: f64, a: Vec<C64> },
    V0 { r: usize, s: Vec<f64>, w: CMatrix, a: Vec<C64> },
    Kahler { a: Vec<C64> },
    NotBtp { residual: f64 },
}

impl BtpClass {
    pub fn tag(&self) -> &'static str {
        match self {
            BtpClass::V1 { .. } => "v1",
            BtpClass::V2 { .. } => "v2",
            BtpClass::V0 { .. } => "v0",
            BtpClass::Kahler { .. } => "Kahler",
            BtpClass::NotBtp { .. } => "NotBTP",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub class: BtpClass,
    /// Frame on the whole algebra, `diag(1, U)`; `None` for `NotBtp`.
    pub frame: Option<UnitaryMatrix>,
    /// Data in the normalized frame.
    pub normalized: Option<Codim2Data>,
}

impl Classification {
    /// Data produced by the generator for the recovered parameters.
    pub fn regenerate(&self, n: usize) -> Result<Option<Codim2Data>> {
        let m = n - 1;
        let zero = || linalg::zeros(m, m);
        Ok(match &self.class {
            BtpClass::V1 { v2, a } => Some(make_btpv1(n, *v2, a)?),
            BtpClass::V2 { v2, p, a } => Some(make_btpv2(n, *v2, *p, a)?),
            BtpClass::V0 { r, s, w, a } => Some(make_btpv0(n, *r, s, w, a)?),
            BtpClass::Kahler { a } => {
                let x = linalg::diag(a);
                Some(Codim2Data::new(0.0, vec![C64::new(0.0, 0.0); m], x.clone(), x, zero())?)
            }
            BtpClass::NotBtp { .. } => None,
        })
    }
}

/// Unitary `Q*` diagonalizing a normal matrix, with eigenvalues sorted by (re, im).
fn normal_frame(x: &CMatrix) -> (CMatrix, Vec<C64>) {
    let (q, t) = linalg::schur(x);
    let k = x.nrows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (t[(i, i)], t[(j, j)]);
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    let qs = CMatrix::from_fn(k, k, |i, j| q[(i, order[j])]);
    (qs.adjoint(), order.iter().map(|&i| t[(i, i)]).collect())
}

/// `diag(I_offset, u)` of size `m`.
fn embed(m: usize, offset: usize, u: &CMatrix) -> CMatrix {
    let mut out = linalg::identity(m);
    out.view_mut((offset, offset), (u.nrows(), u.ncols())).copy_from(u);
    out
}

pub fn classify_btp(d: &Codim2Data) -> Result<Classification> {
    classify_btp_with_tol(d, None)
}

pub fn classify_btp_with_tol(d: &Codim2Data, tol: Option<f64>) -> Result<Classification> {
    let tol = tol.unwrap_or_else(|| d.default_tol());
    let n = d.n();
    let m = n - 1;
    let defect = (d.lambda + linalg::trace(&d.b_matrix())).norm();
    if defect > tol {
        return Err(Error::NotUnimodular(defect));
    }
    let alg = build_codim2_with_tol(d, Some(tol))?;
    let residual = hermitian::btp_residual(&alg);
    if residual > tol {
        return Ok(Classification { class: BtpClass::NotBtp { residual }, frame: None, normalized: None });
    }

    let (u, class) = if hermitian::chern_torsion(&alg).max_abs() <= tol {
        let (u, a) = normal_frame(&d.x);
        (u, BtpClass::Kahler { a })
    } else if linalg::vec_norm(&d.v) > tol {
        let u1 = linalg::unitary_to_e1(&d.v);
        let d1 = d.transform(&u1)?;
        let v2 = d1.v[0].re;
        let z: Vec<C64> = (1..m).map(|j| d1.z[(0, j)]).collect();
        if linalg::vec_norm(&z) <= tol {
            let x1 = d1.x.view((1, 1), (m - 1, m - 1)).into_owned();
            let (q, a) = normal_frame(&x1);
            (embed(m, 1, &q) * u1, BtpClass::V1 { v2, a })
        } else {
            let u2 = embed(m, 1, &linalg::unitary_to_e1(&z));
            let d2 = d1.transform(&u2)?;
            let p = d2.z[(0, 1)].re;
            let x2 = d2.x.view((2, 2), (m - 2, m - 2)).into_owned();
            let (q, a) = normal_frame(&x2);
            (embed(m, 2, &q) * u2 * u1, BtpClass::V2 { v2, p, a })
        }
    } else {
        let svd = linalg::svd(&d.z);
        let r = svd.s.iter().filter(|&&s| s > tol).count();
        if r == 0 || 2 * r > m {
            return Err(Error::Numerical(format!("BTP data with v = 0 has rank(Z) = {r}")));
        }
        let col = |mat: &CMatrix, k: usize| -> Vec<C64> { (0..m).map(|i| mat[(i, k)]).collect() };
        let mut basis: Vec<Vec<C64>> = (0..r).map(|k| col(&svd.u, k)).collect();
        basis.extend((0..r).map(|k| col(&svd.v, k).iter().map(|c| c.conj()).collect::<Vec<_>>()));
        let rest = linalg::orthonormal_complement(m, &basis);
        basis.extend(rest);
        let u1 = CMatrix::from_fn(m, m, |i, j| basis[j][i]).adjoint();
        let d1 = d.transform(&u1)?;
        let b = d1.b_matrix().view((0, r), (r, r)).into_owned();
        let zb = d1.z.view((0, r), (r, r)).into_owned();
        let f = lemma9_factor_with_tol(&b, &zb, Some(tol * (1.0 + d.magnitude())))?;
        let x3 = d1.x.view((2 * r, 2 * r), (m - 2 * r, m - 2 * r)).into_owned();
        let (q, a) = normal_frame(&x3);
        let mut u2 = embed(m, 2 * r, &q);
        u2.view_mut((0, 0), (r, r)).copy_from(&f.u.adjoint());
        u2.view_mut((r, r), (r, r)).copy_from(&f.v.adjoint());
        (u2 * u1, BtpClass::V0 { r, s: f.s.clone(), w: f.w.clone(), a })
    };

    let normalized = d.transform(&u)?;
    let classification = Classification {
        frame: Some(UnitaryMatrix::new(linalg::embed_after_first(&u), 1e-8)?),
        class,
        normalized: Some(normalized.clone()),
    };
    if let Some(g) = classification.regenerate(n)? {
        let diff = [
            (normalized.lambda - g.lambda).abs(),
            linalg::max_abs_vec(&normalized.v.iter().zip(&g.v).map(|(a, b)| a - b).collect::<Vec<_>>()),
            linalg::max_abs(&(&normalized.x - &g.x)),
            linalg::max_abs(&(&normalized.y - &g.y)),
            linalg::max_abs(&(&normalized.z - &g.z)),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let bound = 10.0 * tol * (1.0 + d.magnitude());
        if diff > bound {
            return Err(Error::CrossCheckFailure {
                property: format!("classify_btp normal form ({})", classification.class.tag()),
                closed: false,
                engine: true,
                residual: diff,
            });
        }
    }
    Ok(classification)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::change_frame;
    use crate::codim2::build_codim2;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn btpv1_roundtrip() {
        let d = make_btpv1(3, 1.0, &[c(0.0, 1.0)]).unwrap();
        let cl = classify_btp(&d).unwrap();
        match cl.class {
            BtpClass::V1 { v2, ref a } => {
                assert!((v2 - 1.0).abs() < 1e-14);
                assert!((a[0] - c(0.0, 1.0)).norm() < 1e-14);
            }
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scrambled_btpv0() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let d = make_btpv0(5, 1, &[1.5], &linalg::diag(&[C64::from_polar(1.0, 0.4)]), &[c(0.5, 0.0), c(0.0, -1.0)])
            .unwrap();
        let u = linalg::random_unitary(&mut rng, 4);
        let scrambled = d.transform(&u).unwrap();
        let cl = classify_btp(&scrambled).unwrap();
        match &cl.class {
            BtpClass::V0 { r, s, .. } => {
                assert_eq!(*r, 1);
                assert!((s[0] - 1.5).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        let moved = change_frame(&build_codim2(&scrambled).unwrap(), cl.frame.as_ref().unwrap()).unwrap();
        let regen = build_codim2(&cl.regenerate(5).unwrap().unwrap()).unwrap();
        assert!(moved.c().max_diff(regen.c()) < 1e-9);
        assert!(moved.d().max_diff(regen.d()) < 1e-9);
    }

    #[test]
    fn rank_two_btpv0_is_not_btp() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let d = make_btpv0(6, 2, &[1.0, 2.0], &linalg::real_diag(&[1.0, -1.0]), &[c(0.5, 0.0)]).unwrap();
        let u = linalg::random_unitary(&mut rng, 5);
        let cl = classify_btp(&d.transform(&u).unwrap()).unwrap();
        assert_eq!(cl.class.tag(), "NotBTP");
    }

    #[test]
    fn skt_example_not_btp() {
        let lam = 1.0;
        let mut x = linalg::zeros(2, 2);
        x[(0, 0)] = c(lam / 2.0, 0.0);
        let d = Codim2Data::new(lam, vec![c(0.0, 0.0); 2], x.clone(), -x, linalg::zeros(2, 2)).unwrap();
        assert!(super::super::c2_report(&d).unwrap().flags.pluriclosed);
        assert_eq!(classify_btp(&d).unwrap().class.tag(), "NotBTP");
    }

    #[test]
    fn not_unimodular() {
        let x = linalg::real_diag(&[1.0]);
        let d = Codim2Data::new(0.0, vec![c(0.0, 0.0)], x, linalg::zeros(1, 1), linalg::zeros(1, 1)).unwrap();
        assert!(matches!(classify_btp(&d), Err(Error::NotUnimodular(_))));
    }
}
