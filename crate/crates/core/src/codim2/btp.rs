//! Bismut-torsion-parallel residual system and the three normal-form families.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::Codim2Data;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Named residuals of the BTP system, each a max-abs over its entries.
pub type BtpResiduals = BTreeMap<String, f64>;

pub fn c2_btp_residuals(d: &Codim2Data) -> BtpResiduals {
    let m = d.v.len();
    let a = d.a_matrix();
    let b = d.b_matrix();
    let (x, z, v) = (&d.x, &d.z, &d.v);
    let lam = C64::new(d.lambda, 0.0);
    let t_b = linalg::trace(&b);
    let t_z = linalg::trace(z);
    let (bb, zb) = (linalg::conj(&b), linalg::conj(z));
    let (bt, zt) = (b.transpose(), z.transpose());
    let mx = |mat: CMatrix| linalg::max_abs(&mat);

    let mut eq1 = 0.0f64;
    let mut eq2 = 0.0f64;
    let mut vzba = 0.0f64;
    let mut vbz = 0.0f64;
    for i in 0..m {
        for k in 0..m {
            for l in 0..m {
                for j in 0..m {
                    let r1 = b[(k, j)] * z[(l, i)] - b[(i, j)] * z[(l, k)] - a[(i, k)] * b[(l, j)];
                    let r2 = b[(k, j)] * b[(l, i)].conj() - b[(i, j)] * b[(l, k)].conj() - a[(i, k)] * z[(l, j)].conj();
                    eq1 = eq1.max(r1.norm());
                    eq2 = eq2.max(r2.norm());
                }
                let r3 = v[k] * z[(l, i)] - v[i] * z[(l, k)] - v[l] * a[(i, k)];
                let r4 = v[k] * b[(l, i)].conj() - v[i] * b[(l, k)].conj() - v[l].conj() * a[(i, k)];
                vzba = vzba.max(r3.norm()).max(r4.norm());
            }
        }
        // (l, k, j) -> here i plays l
        for k in 0..m {
            for j in 0..m {
                let r5 = v[i] * b[(k, j)] - v[k] * b[(i, j)];
                let r6 = v[i].conj() * b[(k, j)] - v[k] * z[(i, j)].conj();
                vbz = vbz.max(r5.norm()).max(r6.norm());
            }
        }
    }

    let mut out = BtpResiduals::new();
    out.insert("eq1".into(), eq1);
    out.insert("eq2".into(), eq2);
    out.insert("eq3a".into(), mx(z * t_b - z * &bt + &b * &a));
    out.insert("eq3b".into(), mx(&bb * t_b - &bb * &bt + &zb * &a));
    out.insert("eq4a".into(), mx(&zt * &b - &b * t_z - &a * &b));
    out.insert("eq4b".into(), mx(b.adjoint() * &b - &b * t_b.conj() - &a * &zb));
    out.insert("eq5a".into(), mx(&b * z - &zt * &bt + &a * t_b));
    out.insert("eq5b".into(), mx(&b * &bb - b.adjoint() * &bt + &a * t_z.conj()));
    let xv = linalg::vec_norm(&linalg::mat_vec(x, v));
    let xsv = linalg::vec_norm(&linalg::mat_vec(&x.adjoint(), v));
    out.insert("Xv".into(), xv.max(xsv));
    out.insert("vZBA".into(), vzba);
    out.insert("vBZ".into(), vbz);
    out.insert("BA".into(), mx(&b * &a - z * &bt).max(mx(&zb * &a - &bb * &bt)));
    out.insert(
        "XB".into(),
        mx(linalg::commutator(&b, x) - &b * lam).max(mx(linalg::commutator(&b, &x.adjoint()) - &b * lam)),
    );
    out.insert(
        "XA".into(),
        mx(x * &a + &a * x.transpose() - &a * lam).max(mx(x.adjoint() * &a + &a * linalg::conj(x) - &a * lam)),
    );
    out.insert("unimodular".into(), (lam + t_b).norm());
    out
}

fn check_finite(name: &'static str, vals: impl IntoIterator<Item = f64>) -> Result<()> {
    if vals.into_iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(name));
    }
    Ok(())
}

fn diag_block(m: usize, offset: usize, a: &[C64]) -> CMatrix {
    let mut x = linalg::zeros(m, m);
    for (i, ai) in a.iter().enumerate() {
        x[(offset + i, offset + i)] = *ai;
    }
    x
}

/// `lambda = 0`, `v = (v2, 0, ..)`, `X = Y = diag(0, a)`, `Z = 0`.
pub fn make_btpv1(n: usize, v2: f64, a: &[C64]) -> Result<Codim2Data> {
    if n < 2 {
        return Err(Error::ParameterDomain(format!("BTPv1 needs n >= 2, got {n}")));
    }
    check_finite("v2", [v2])?;
    check_finite("a", a.iter().flat_map(|z| [z.re, z.im]))?;
    if v2 <= 0.0 {
        return Err(Error::ParameterDomain(format!("v2 must be positive, got {v2}")));
    }
    if a.len() != n - 2 {
        return Err(Error::ParameterDomain(format!("a must have length {}, got {}", n - 2, a.len())));
    }
    let m = n - 1;
    let mut v = vec![C64::new(0.0, 0.0); m];
    v[0] = C64::new(v2, 0.0);
    let x = diag_block(m, 1, a);
    Codim2Data::new(0.0, v, x.clone(), x, linalg::zeros(m, m))
}

/// `lambda = 0`, `v = (v2, 0, ..)`, `X = diag(0, 0, a)`, `Y = X + p E_23`,
/// `Z = p E_23`.
pub fn make_btpv2(n: usize, v2: f64, p: f64, a: &[C64]) -> Result<Codim2Data> {
    if n < 3 {
        return Err(Error::ParameterDomain(format!("BTPv2 needs n >= 3, got {n}")));
    }
    check_finite("v2, p", [v2, p])?;
    check_finite("a", a.iter().flat_map(|z| [z.re, z.im]))?;
    if v2 <= 0.0 || p <= 0.0 {
        return Err(Error::ParameterDomain(format!("v2 and p must be positive, got {v2}, {p}")));
    }
    if a.len() != n - 3 {
        return Err(Error::ParameterDomain(format!("a must have length {}, got {}", n - 3, a.len())));
    }
    let m = n - 1;
    let mut v = vec![C64::new(0.0, 0.0); m];
    v[0] = C64::new(v2, 0.0);
    let x = diag_block(m, 2, a);
    let mut z = linalg::zeros(m, m);
    z[(0, 1)] = C64::new(p, 0.0);
    let y = &x + &z;
    Codim2Data::new(0.0, v, x, y, z)
}

/// Warning text when `r` exceeds `(n - 2) / 2`.
pub fn btpv0_r_warning(n: usize, r: usize) -> Option<String> {
    (2 * r > n.saturating_sub(2))
        .then(|| format!("r = {r} exceeds (n - 2)/2 = {}; the III block is empty", (n as f64 - 2.0) / 2.0))
}

/// `lambda = 0`, `v = 0`, blocks `I, II` of size `r` and `III` of size
/// `n - 1 - 2r`: `Z = [[0, S W, 0], ..]`, `X = diag(0, 0, a)`,
/// `Y = X + [[0, S, 0], ..]`.
pub fn make_btpv0(n: usize, r: usize, s: &[f64], w: &CMatrix, a: &[C64]) -> Result<Codim2Data> {
    if n < 3 || r == 0 || 2 * r > n - 1 {
        return Err(Error::ParameterDomain(format!("need 1 <= r <= (n - 1)/2, got n = {n}, r = {r}")));
    }
    check_finite("s", s.iter().copied())?;
    check_finite("w", w.iter().flat_map(|z| [z.re, z.im]))?;
    check_finite("a", a.iter().flat_map(|z| [z.re, z.im]))?;
    if s.len() != r || w.nrows() != r || w.ncols() != r {
        return Err(Error::ParameterDomain(format!("s and W must have size {r}")));
    }
    if a.len() != n - 1 - 2 * r {
        return Err(Error::ParameterDomain(format!("a must have length {}, got {}", n - 1 - 2 * r, a.len())));
    }
    if s.iter().any(|&x| x <= 0.0) {
        return Err(Error::ParameterDomain("s must be positive".into()));
    }
    let smat = linalg::real_diag(s);
    let scale = 1e-9 * (1.0 + linalg::max_abs(w).max(s.iter().fold(0.0, |m, x| m.max(x.abs()))));
    let unit = linalg::unitarity_residual(w);
    if unit > scale {
        return Err(Error::ParameterDomain(format!("W is not unitary (residual {unit:.3e})")));
    }
    let sym = linalg::max_abs(&(w - w.transpose()));
    if sym > scale {
        return Err(Error::ParameterDomain(format!("W is not symmetric (residual {sym:.3e})")));
    }
    let comm = linalg::max_abs(&linalg::commutator(&smat, w));
    if comm > scale {
        return Err(Error::ParameterDomain(format!("W does not commute with S (residual {comm:.3e})")));
    }
    let m = n - 1;
    let x = diag_block(m, 2 * r, a);
    let mut z = linalg::zeros(m, m);
    let mut b = linalg::zeros(m, m);
    z.view_mut((0, r), (r, r)).copy_from(&(&smat * w));
    b.view_mut((0, r), (r, r)).copy_from(&smat);
    let y = &x + &b;
    Codim2Data::new(0.0, vec![C64::new(0.0, 0.0); m], x, y, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn generators_satisfy_system() {
        let cases = [
            make_btpv1(4, 1.5, &[c(0.0, 1.0), c(2.0, -1.0)]).unwrap(),
            make_btpv2(5, 1.0, 2.0, &[c(0.0, 1.0), c(0.0, -3.0)]).unwrap(),
            make_btpv0(6, 1, &[2.0], &linalg::diag(&[c(0.0, 1.0)]), &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
        ];
        for d in &cases {
            assert!(d.integrability_residual() < 1e-14);
            for (k, r) in c2_btp_residuals(d) {
                assert!(r < 1e-13, "{k}: {r}");
            }
        }
    }

    #[test]
    fn btpv0_rank_two_breaks_eq1() {
        // k = j in I, l in I, i = l + r in II: s_k s_l (delta_kj W_li - W_ki delta_lj) = s_k s_l.
        let d = make_btpv0(6, 2, &[2.0, 1.0], &linalg::real_diag(&[1.0, 1.0]), &[c(0.0, 1.0)]).unwrap();
        let res = c2_btp_residuals(&d);
        assert!((res["eq1"] - 2.0).abs() < 1e-14);
        assert!((res["eq2"] - 2.0).abs() < 1e-14);
        for key in ["eq3a", "eq3b", "eq4a", "eq4b", "eq5a", "eq5b", "Xv", "vZBA", "vBZ", "BA", "XB", "XA", "unimodular"]
        {
            assert!(res[key] < 1e-14, "{key}");
        }
    }

    #[test]
    fn btpv2_rotated_p() {
        let theta: f64 = 0.7;
        let mut d = make_btpv2(4, 1.3, 0.8, &[c(0.5, 0.0)]).unwrap();
        let p = C64::from_polar(0.8, theta);
        d.y[(0, 1)] = p;
        d.z[(0, 1)] = p;
        let res = c2_btp_residuals(&d);
        let expected = 1.3 * 0.8 * (C64::new(1.0, 0.0) - C64::from_polar(1.0, -2.0 * theta)).norm();
        assert!((res["vBZ"] - expected).abs() < 1e-12, "{} vs {expected}", res["vBZ"]);
    }

    #[test]
    fn parameter_domain() {
        assert!(matches!(make_btpv1(4, 0.0, &[c(0.0, 0.0); 2]), Err(Error::ParameterDomain(_))));
        assert!(matches!(make_btpv2(4, 1.0, -1.0, &[c(0.0, 0.0)]), Err(Error::ParameterDomain(_))));
        let w = linalg::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        // W symmetric unitary but not commuting with S = diag(2, 1).
        assert!(matches!(make_btpv0(5, 2, &[2.0, 1.0], &w, &[]), Err(Error::ParameterDomain(_))));
        assert!(make_btpv0(5, 2, &[1.0, 1.0], &w, &[]).is_ok());
        assert!(btpv0_r_warning(5, 2).is_some());
        assert!(btpv0_r_warning(6, 2).is_none());
    }
}
