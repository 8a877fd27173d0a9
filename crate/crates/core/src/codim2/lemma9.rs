//! Simultaneous normal form `b = U S V*`, `z = U S W V^t` of a compatible pair.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma9Factorization {
    pub u: CMatrix,
    /// Diagonal of `S`, descending.
    pub s: Vec<f64>,
    pub v: CMatrix,
    pub w: CMatrix,
}

impl Lemma9Factorization {
    pub fn s_matrix(&self) -> CMatrix {
        linalg::real_diag(&self.s)
    }

    /// Max over unitarity of `U, V, W`, `W^t - W`, `WS - SW` and both
    /// reconstructions.
    pub fn invariant_residual(&self, b: &CMatrix, z: &CMatrix) -> f64 {
        let s = self.s_matrix();
        let rb = &self.u * &s * self.v.adjoint() - b;
        let rz = &self.u * &s * &self.w * self.v.transpose() - z;
        [
            linalg::unitarity_residual(&self.u),
            linalg::unitarity_residual(&self.v),
            linalg::unitarity_residual(&self.w),
            linalg::max_abs(&(self.w.transpose() - &self.w)),
            linalg::max_abs(&linalg::commutator(&self.w, &s)),
            linalg::max_abs(&rb),
            linalg::max_abs(&rz),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// The three compatibility residuals `conj(z) z^t - conj(b) b^t`,
/// `z^t conj(z) - b* b`, `b z^t - z b^t`.
pub fn compatibility(b: &CMatrix, z: &CMatrix) -> [(&'static str, f64); 3] {
    let (bb, zb) = (linalg::conj(b), linalg::conj(z));
    [
        ("conj(z) z^t = conj(b) b^t", linalg::max_abs(&(&zb * z.transpose() - &bb * b.transpose()))),
        ("z^t conj(z) = b* b", linalg::max_abs(&(z.transpose() * &zb - b.adjoint() * b))),
        ("b z^t = z b^t", linalg::max_abs(&(b * z.transpose() - z * b.transpose()))),
    ]
}

/// Tolerance for the quadratic compatibility equations.
pub fn default_tol(b: &CMatrix, z: &CMatrix) -> f64 {
    let m = linalg::max_abs(b).max(linalg::max_abs(z));
    1e-9 * (1.0 + m) * (1.0 + m)
}

pub fn lemma9_factor(b: &CMatrix, z: &CMatrix) -> Result<Lemma9Factorization> {
    lemma9_factor_with_tol(b, z, None)
}

pub fn lemma9_factor_with_tol(b: &CMatrix, z: &CMatrix, tol: Option<f64>) -> Result<Lemma9Factorization> {
    let r = b.nrows();
    if b.ncols() != r || z.nrows() != r || z.ncols() != r {
        return Err(Error::DimensionMismatch { left: r, right: z.nrows() });
    }
    if b.iter().chain(z.iter()).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite("factorization input"));
    }
    let tol = tol.unwrap_or_else(|| default_tol(b, z));
    let smallest =
        linalg::singular_values(b).into_iter().chain(linalg::singular_values(z)).fold(f64::INFINITY, f64::min);
    if r == 0 || smallest <= tol {
        return Err(Error::Singular(if r == 0 { 0.0 } else { smallest }));
    }
    for (equation, residual) in compatibility(b, z) {
        if residual > tol {
            return Err(Error::NotCompatible { equation, residual });
        }
    }
    // conj(z) z^t = P S^2 P*, conj(b) = P S Vp*, conj(z) = P S Q, Wp = Q conj(Vp).
    let (w2, p) = linalg::hermitian_eigen(&(linalg::conj(z) * z.transpose()));
    let s: Vec<f64> = w2.iter().map(|x| x.max(0.0).sqrt()).collect();
    let sinv = linalg::diag(&s.iter().map(|x| C64::new(1.0 / x, 0.0)).collect::<Vec<_>>());
    let vp_adj = &sinv * p.adjoint() * linalg::conj(b);
    let q = &sinv * p.adjoint() * linalg::conj(z);
    let vp = vp_adj.adjoint();
    let wp = q * linalg::conj(&vp);
    Ok(Lemma9Factorization { u: linalg::conj(&p), s, v: linalg::conj(&vp), w: linalg::conj(&wp) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_pair() {
        let i = linalg::identity(3);
        let f = lemma9_factor(&i, &i).unwrap();
        assert!(f.invariant_residual(&i, &i) < 1e-14);
        assert_eq!(f.s, vec![1.0; 3]);
    }

    #[test]
    fn one_by_one() {
        let b = linalg::diag(&[c(2.0, 0.0)]);
        let z = linalg::diag(&[c(0.0, 2.0)]);
        let f = lemma9_factor(&b, &z).unwrap();
        assert!((f.s[0] - 2.0).abs() < 1e-14);
        assert!(f.invariant_residual(&b, &z) < 1e-14);
        // z / b = W V^t / V* = W V^2 for 1x1 unitary V.
        let ratio = f.w[(0, 0)] * f.v[(0, 0)] * f.v[(0, 0)];
        assert!((ratio - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn incompatible_and_singular() {
        let b = linalg::diag(&[c(1.0, 0.0)]);
        let z = linalg::diag(&[c(2.0, 0.0)]);
        assert!(matches!(lemma9_factor(&b, &z), Err(Error::NotCompatible { .. })));
        let zero = linalg::zeros(1, 1);
        assert!(matches!(lemma9_factor(&b, &zero), Err(Error::Singular(_))));
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = linalg::random_unitary(&mut rng, 3);
            let v = linalg::random_unitary(&mut rng, 3);
            let s = linalg::real_diag(&[3.0, 2.0, 0.5]);
            let phases = linalg::diag(&[C64::from_polar(1.0, 0.3), C64::from_polar(1.0, -1.1), c(1.0, 0.0)]);
            let b = &u * &s * v.adjoint();
            let z = &u * &s * &phases * v.transpose();
            let f = lemma9_factor(&b, &z).unwrap();
            assert!(f.invariant_residual(&b, &z) < 1e-12);
        }
    }
}
