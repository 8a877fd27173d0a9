//! Dense complex matrix helpers on top of `nalgebra`.
//!
//! Decompositions return deterministic orderings: Hermitian eigenvalues and
//! singular values descending, eigenvectors phase-normalized so that their
//! first non-negligible component is positive real.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<C64>;

const PHASE_EPS: f64 = 1e-12;

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_rows(rows: &[Vec<C64>]) -> CMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    CMatrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn diag(entries: &[C64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) })
}

pub fn real_diag(entries: &[f64]) -> CMatrix {
    diag(&entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn mat_vec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

/// Frobenius residual of `U U* - I`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    frobenius(&(u * u.adjoint() - identity(u.nrows())))
}

/// Multiplies `v` by a unit phase so that its first component with modulus
/// above `PHASE_EPS * max` becomes positive real.
pub fn normalize_phase(v: &mut [C64]) {
    let scale = v.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if scale == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().find(|z| z.norm() > PHASE_EPS.max(1e-8 * scale)) {
        let phase = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn column(m: &CMatrix, j: usize) -> Vec<C64> {
    m.column(j).iter().copied().collect()
}

fn from_columns(rows: usize, cols: &[Vec<C64>]) -> CMatrix {
    CMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Eigendecomposition of a Hermitian matrix `h = Q diag(w) Q*`, eigenvalues
/// descending, eigenvector phases normalized.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<Vec<C64>> = order
        .iter()
        .map(|&i| {
            let mut c = column(&eig.eigenvectors, i);
            normalize_phase(&mut c);
            c
        })
        .collect();
    (values, from_columns(n, &cols))
}

/// Thin SVD `m = U diag(s) V*` with singular values descending.
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided Jacobi SVD. nalgebra's complex SVD loses accuracy on some
/// rank-deficient inputs, so the factorization is computed directly.
pub fn svd(m: &CMatrix) -> Svd {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Svd { u: zeros(r, 0), s: Vec::new(), v: zeros(c, 0) };
    }
    if r < c {
        let t = svd(&m.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let mut a: Vec<Vec<C64>> = (0..c).map(|j| column(m, j)).collect();
    let mut v: Vec<Vec<C64>> = (0..c)
        .map(|j| (0..c).map(|i| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect())
        .collect();
    let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(p, q)| p.conj() * q).sum() };
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = dot(&a[p], &a[p]).re;
                let beta = dot(&a[q], &a[q]).re;
                let g = dot(&a[p], &a[q]);
                let gn = g.norm();
                if gn <= f64::EPSILON * (alpha * beta).sqrt() || gn == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = g.conj() / gn;
                let zeta = (beta - alpha) / (2.0 * gn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for cols in [&mut a, &mut v] {
                    for i in 0..cols[p].len() {
                        let x = cols[p][i];
                        let y = cols[q][i] * phase;
                        cols[p][i] = x * cs - y * sn;
                        cols[q][i] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = a.iter().map(|col| vec_norm(col)).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let cutoff = s[0] * f64::EPSILON * r as f64;
    let mut ucols: Vec<Vec<C64>> = Vec::new();
    for (&j, &sj) in order.iter().zip(&s) {
        if sj > cutoff && sj > 0.0 {
            ucols.push(a[j].iter().map(|z| z / sj).collect());
        }
    }
    let rest = orthonormal_complement(r, &ucols);
    ucols.extend(rest.into_iter().take(c - ucols.len()));
    let vcols: Vec<Vec<C64>> = order.iter().map(|&j| v[j].clone()).collect();
    Svd { u: from_columns(r, &ucols), s, v: from_columns(c, &vcols) }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd(m).s
}

/// Numerical rank: singular values above `tol`.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > tol).count()
}

/// Complex Schur form `m = Q T Q*`, `T` upper triangular.
pub fn schur(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (zeros(0, 0), zeros(0, 0));
    }
    m.clone().schur().unpack()
}

/// Eigenvalues of a general complex matrix, sorted by (re, im).
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    let (_, t) = schur(m);
    let mut ev: Vec<C64> = t.diagonal().iter().copied().collect();
    sort_complex(&mut ev);
    ev
}

pub fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Unitary `U` with `U v = |v| e_1`. Identity when `v` vanishes.
pub fn unitary_to_e1(v: &[C64]) -> CMatrix {
    let n = v.len();
    let norm = vec_norm(v);
    if norm == 0.0 {
        return identity(n);
    }
    let mut cols = vec![v.iter().map(|z| z / norm).collect::<Vec<_>>()];
    cols.extend(orthonormal_complement(n, &cols));
    // Rows of U are the conjugated basis vectors, so U maps the basis onto e_k.
    from_columns(n, &cols).adjoint()
}

/// Orthonormal basis (as columns) of the complement of the span of the
/// given orthonormal vectors in `C^n`.
pub fn orthonormal_complement(n: usize, basis: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    let mut all: Vec<Vec<C64>> = basis.to_vec();
    for e in 0..n {
        if all.len() == n {
            break;
        }
        let mut w: Vec<C64> = (0..n).map(|i| if i == e { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
        for _ in 0..2 {
            for b in &all {
                let dot: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= dot * bi;
                }
            }
        }
        let nrm = vec_norm(&w);
        if nrm > 1e-8 {
            let w: Vec<C64> = w.iter().map(|z| z / nrm).collect();
            all.push(w.clone());
            out.push(w);
        }
    }
    out
}

/// Block-diagonal embedding `diag(1, u)`.
pub fn embed_after_first(u: &CMatrix) -> CMatrix {
    let m = u.nrows();
    let mut out = identity(m + 1);
    out.view_mut((1, 1), (m, m)).copy_from(u);
    out
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    if n == 0 {
        return zeros(0, 0);
    }
    let g = random_matrix(rng, n, n);
    let (q, r) = g.qr().unpack();
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                d / d.norm()
            }
        })
        .collect();
    CMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j])
}

pub fn to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hermitian_eigen_reconstructs_and_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_matrix(&mut rng, 4, 4);
        let h = &g + g.adjoint();
        let (w, q) = hermitian_eigen(&h);
        assert!(w.windows(2).all(|p| p[0] >= p[1]));
        let rebuilt = &q * real_diag(&w) * q.adjoint();
        assert!(max_abs(&(rebuilt - h)) < 1e-10);
        for j in 0..4 {
            let c = column(&q, j);
            let lead = c.iter().find(|z| z.norm() > 1e-8).unwrap();
            assert!(lead.im.abs() < 1e-12 && lead.re > 0.0);
        }
    }

    #[test]
    fn svd_and_schur_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 3, 3);
        let d = svd(&m);
        let s = real_diag(&d.s);
        assert!(max_abs(&(&d.u * s * d.v.adjoint() - &m)) < 1e-10);
        let (q, t) = schur(&m);
        assert!(max_abs(&(&q * &t * q.adjoint() - &m)) < 1e-10);
    }

    #[test]
    fn svd_of_rank_one_and_wide_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_vector(&mut rng, 5);
        let y = random_vector(&mut rng, 5);
        let r1 = CMatrix::from_fn(5, 5, |i, j| x[i] * y[j].conj());
        let wide = random_matrix(&mut rng, 2, 4);
        for m in [r1, wide] {
            let d = svd(&m);
            assert!(max_abs(&(&d.u * real_diag(&d.s) * d.v.adjoint() - &m)) < 1e-12);
            assert!(max_abs(&(d.u.adjoint() * &d.u - identity(d.s.len()))) < 1e-12);
            assert!(max_abs(&(d.v.adjoint() * &d.v - identity(d.s.len()))) < 1e-12);
            assert!(d.s.windows(2).all(|p| p[0] >= p[1]));
        }
    }

    #[test]
    fn unitary_to_e1_maps_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_vector(&mut rng, 4);
        let u = unitary_to_e1(&v);
        assert!(unitarity_residual(&u) < 1e-12);
        let w = mat_vec(&u, &v);
        assert!((w[0] - C64::new(vec_norm(&v), 0.0)).norm() < 1e-12);
        assert!(w[1..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(unitarity_residual(&random_unitary(&mut rng, 6)) < 1e-12);
    }
}
