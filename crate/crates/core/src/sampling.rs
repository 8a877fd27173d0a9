//! Seeded random draws for every family.
//!
//! Each sample `index` of a batch with `seed` uses its own ChaCha8 stream
//! seeded by `splitmix64(seed ^ splitmix64(index))`, so batches are
//! reproducible and any single sample can be regenerated alone.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{build_general, Algebra, Entry};
use crate::almost_abelian::AlmostAbelianData;
use crate::codim2::{make_btpv0, make_btpv1, make_btpv2, Codim2Data};
use crate::error::Result;
use crate::linalg::{self, CMatrix};

pub const RNG_ALGORITHM: &str = "chacha8/splitmix64";

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn sample_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sample_seed(seed, index))
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn zeros_v(m: usize) -> Vec<C64> {
    vec![ZERO; m]
}

fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Random normal matrix `U diag(ev) U*`.
pub fn normal_with_spectrum<R: Rng + ?Sized>(rng: &mut R, ev: &[C64]) -> CMatrix {
    let u = linalg::random_unitary(rng, ev.len());
    &u * linalg::diag(ev) * u.adjoint()
}

/// Random symmetric unitary matrix commuting with `diag(s)`: block diagonal
/// over groups of equal entries, each block `Q Q^t` for a Haar unitary `Q`.
pub fn symmetric_unitary_commuting<R: Rng + ?Sized>(rng: &mut R, s: &[f64]) -> CMatrix {
    let r = s.len();
    let mut w = linalg::zeros(r, r);
    let mut start = 0;
    while start < r {
        let mut end = start + 1;
        while end < r && s[end] == s[start] {
            end += 1;
        }
        let q = linalg::random_unitary(rng, end - start);
        w.view_mut((start, start), (end - start, end - start)).copy_from(&(&q * q.transpose()));
        start = end;
    }
    w
}

/// Positive diagonal, descending, with a repeated value half of the time.
pub fn random_s<R: Rng + ?Sized>(rng: &mut R, r: usize) -> Vec<f64> {
    let mut s: Vec<f64> = (0..r).map(|_| rng.random_range(0.3..2.5)).collect();
    if r >= 2 && rng.random_bool(0.5) {
        s[1] = s[0];
    }
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AaKind {
    Generic,
    Unimodular,
    /// Unimodular with normal `A`.
    Normal,
    /// Unimodular, `A` normal with real parts in `{0, -lambda/2}`.
    Pluriclosed,
    /// `A + A* = 0`, `A v = 0`.
    Btp,
    /// A BTP sample with a small perturbation of `A`.
    BtpPerturbed,
    /// `lambda = 0`, `v = 0`, normal `A` with `Re tr A = 0`.
    ChernFlat,
    /// `lambda = 0`, `v = 0`, `Re tr A = 0`.
    Cyt,
    /// `lambda = 0`, nilpotent `A`.
    Nilpotent,
}

pub const AA_KINDS: [AaKind; 9] = [
    AaKind::Generic,
    AaKind::Unimodular,
    AaKind::Normal,
    AaKind::Pluriclosed,
    AaKind::Btp,
    AaKind::BtpPerturbed,
    AaKind::ChernFlat,
    AaKind::Cyt,
    AaKind::Nilpotent,
];

fn remove_re_trace(a: &mut CMatrix) {
    let m = a.nrows();
    let t = linalg::trace(a).re / m as f64;
    for i in 0..m {
        a[(i, i)] -= C64::new(t, 0.0);
    }
}

pub fn sample_aa<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: AaKind) -> AlmostAbelianData {
    let m = n - 1;
    let mut a = linalg::random_matrix(rng, m, m);
    let mut v = linalg::random_vector(rng, m);
    let lambda = match kind {
        AaKind::Generic => rng.random_range(-2.0..2.0),
        AaKind::Unimodular => -2.0 * linalg::trace(&a).re,
        AaKind::Normal => {
            let ev = linalg::random_vector(rng, m);
            a = normal_with_spectrum(rng, &ev);
            -2.0 * linalg::trace(&a).re
        }
        AaKind::Pluriclosed => {
            // unimodular forces lambda = 0 or exactly one real part -lambda/2
            let lam = if rng.random_bool(0.25) {
                0.0
            } else {
                rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }
            };
            let special = rng.random_range(0..m);
            let ev: Vec<C64> = (0..m)
                .map(|i| {
                    let im = rng.random_range(-2.0..2.0);
                    C64::new(if i == special { -lam / 2.0 } else { 0.0 }, im)
                })
                .collect();
            a = normal_with_spectrum(rng, &ev);
            lam
        }
        AaKind::Btp | AaKind::BtpPerturbed => {
            a = (&a - a.adjoint()) * C64::new(0.5, 0.0);
            // project v onto ker A
            let svd = linalg::svd(&a);
            let tol = 1e-10;
            let mut w = v.clone();
            for k in 0..m {
                if svd.s[k] > tol {
                    let col: Vec<C64> = (0..m).map(|i| svd.v[(i, k)]).collect();
                    let dot: C64 = col.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                    for (wi, ci) in w.iter_mut().zip(&col) {
                        *wi -= dot * ci;
                    }
                }
            }
            // generic skew-Hermitian A is invertible; give it a kernel half the time
            if rng.random_bool(0.5) && m >= 2 {
                let ev: Vec<C64> =
                    (0..m).map(|i| C64::new(0.0, if i == 0 { 0.0 } else { rng.random_range(-2.0..2.0) })).collect();
                let u = linalg::random_unitary(rng, m);
                a = &u * linalg::diag(&ev) * u.adjoint();
                let scale = rng.random_range(0.5..2.0);
                w = (0..m).map(|i| u[(i, 0)] * scale).collect();
            }
            v = w;
            if kind == AaKind::BtpPerturbed {
                let eps = rng.random_range(0.05..0.5);
                a += linalg::random_matrix(rng, m, m) * C64::new(eps, 0.0);
            }
            rng.random_range(-2.0..2.0)
        }
        AaKind::ChernFlat => {
            let ev = linalg::random_vector(rng, m);
            a = normal_with_spectrum(rng, &ev);
            remove_re_trace(&mut a);
            v = zeros_v(m);
            0.0
        }
        AaKind::Cyt => {
            remove_re_trace(&mut a);
            v = zeros_v(m);
            0.0
        }
        AaKind::Nilpotent => {
            let u = linalg::random_unitary(rng, m);
            let mut t = linalg::random_matrix(rng, m, m);
            for i in 0..m {
                for j in 0..=i {
                    t[(i, j)] = ZERO;
                }
            }
            a = &u * t * u.adjoint();
            0.0
        }
    };
    AlmostAbelianData::new(lambda, v, a).expect("finite sample")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C2Kind {
    /// Almost abelian data read as codimension-2 data (`Z = 0`).
    AaEmbedding,
    /// Unimodular almost abelian embedding.
    AaUnimodular,
    /// `lambda = 0`, `Z = 0`, `Y` normal, `X` commuting with `Y*`, `tr X = tr Y`.
    Commuting,
    /// `v = 0` commuting data: Chern flat.
    ChernFlat,
    /// `X = Y = lambda/2 I`, `Z = lambda W` with `W` symmetric unitary.
    ScalarZ,
    /// `lambda > 0`, `X = Y` skew-Hermitian, `Z = 0`, `v = 0`.
    KaehlerNonUnimodular,
    /// `lambda = 0`, `X = Y` normal, `Z = 0`, `v = 0`.
    KaehlerUnimodular,
    /// `lambda > 0`, `Z = 0`, `X = -Y = lambda/2 diag(1, 0, ..)`.
    Skt,
    Btpv1,
    Btpv2,
    Btpv0,
}

pub const C2_KINDS: [C2Kind; 11] = [
    C2Kind::AaEmbedding,
    C2Kind::AaUnimodular,
    C2Kind::Commuting,
    C2Kind::ChernFlat,
    C2Kind::ScalarZ,
    C2Kind::KaehlerNonUnimodular,
    C2Kind::KaehlerUnimodular,
    C2Kind::Skt,
    C2Kind::Btpv1,
    C2Kind::Btpv2,
    C2Kind::Btpv0,
];

fn random_a<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<C64> {
    linalg::random_vector(rng, k)
}

pub fn random_btpv1<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Codim2Data {
    let v2 = rng.random_range(0.2..2.0);
    make_btpv1(n, v2, &random_a(rng, n - 2)).expect("valid parameters")
}

pub fn random_btpv2<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Codim2Data {
    let v2 = rng.random_range(0.2..2.0);
    let p = rng.random_range(0.2..2.0);
    make_btpv2(n, v2, p, &random_a(rng, n - 3)).expect("valid parameters")
}

/// BTPv0 draw with `r` uniform in `1..=(n - 1)/2`.
pub fn random_btpv0<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Codim2Data {
    let r = rng.random_range(1..=(n - 1) / 2);
    random_btpv0_rank(rng, n, r)
}

pub fn random_btpv0_rank<R: Rng + ?Sized>(rng: &mut R, n: usize, r: usize) -> Codim2Data {
    let s = random_s(rng, r);
    let w = symmetric_unitary_commuting(rng, &s);
    make_btpv0(n, r, &s, &w, &random_a(rng, n - 1 - 2 * r)).expect("valid parameters")
}

/// Integrable codimension-2 data of the given kind, frame-scrambled by a
/// random unitary when `scramble` is set.
pub fn sample_codim2<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: C2Kind, scramble: bool) -> Codim2Data {
    let m = n - 1;
    let z0 = || linalg::zeros(m, m);
    let d = match kind {
        C2Kind::AaEmbedding | C2Kind::AaUnimodular => {
            let a = linalg::random_matrix(rng, m, m);
            let v = linalg::random_vector(rng, m);
            let lam =
                if kind == C2Kind::AaUnimodular { -2.0 * linalg::trace(&a).re } else { rng.random_range(0.0..2.0) };
            // lambda must be non-negative; flip A's real trace if needed
            let (lam, a) = if lam < 0.0 { (-lam, -a.adjoint()) } else { (lam, a) };
            let a = if kind == C2Kind::AaUnimodular && (lam + 2.0 * linalg::trace(&a).re).abs() > 1e-12 {
                let mut b = a;
                let shift = (lam + 2.0 * linalg::trace(&b).re) / (2.0 * m as f64);
                for i in 0..m {
                    b[(i, i)] -= C64::new(shift, 0.0);
                }
                b
            } else {
                a
            };
            Codim2Data::new(lam, v, -a.adjoint(), a, z0())
        }
        C2Kind::Commuting | C2Kind::ChernFlat => {
            // eigenvalue groups of Y; X block diagonal over them
            let mut groups = Vec::new();
            let mut left = m;
            while left > 0 {
                let g = rng.random_range(1..=left);
                groups.push(g);
                left -= g;
            }
            let mut ev = Vec::new();
            let mut x = linalg::zeros(m, m);
            let mut start = 0;
            for &g in &groups {
                let e = linalg::complex_gaussian(rng);
                ev.extend(std::iter::repeat_n(e, g));
                x.view_mut((start, start), (g, g)).copy_from(&linalg::random_matrix(rng, g, g));
                start += g;
            }
            let y = linalg::diag(&ev);
            let shift = (linalg::trace(&y) - linalg::trace(&x)) / m as f64;
            for i in 0..m {
                x[(i, i)] += shift;
            }
            let v = if kind == C2Kind::ChernFlat { zeros_v(m) } else { linalg::random_vector(rng, m) };
            Codim2Data::new(0.0, v, x, y, z0())
        }
        C2Kind::ScalarZ => {
            let lam = rng.random_range(0.2..2.0);
            let q = linalg::random_unitary(rng, m);
            let w = &q * q.transpose();
            let x = linalg::identity(m) * C64::new(lam / 2.0, 0.0);
            Codim2Data::new(lam, linalg::random_vector(rng, m), x.clone(), x, w * C64::new(lam, 0.0))
        }
        C2Kind::KaehlerNonUnimodular => {
            let lam = rng.random_range(0.2..2.0);
            let ev: Vec<C64> = (0..m).map(|_| C64::new(0.0, rng.random_range(-2.0..2.0))).collect();
            let x = normal_with_spectrum(rng, &ev);
            Codim2Data::new(lam, zeros_v(m), x.clone(), x, z0())
        }
        C2Kind::KaehlerUnimodular => {
            let ev = linalg::random_vector(rng, m);
            let x = normal_with_spectrum(rng, &ev);
            Codim2Data::new(0.0, zeros_v(m), x.clone(), x, z0())
        }
        C2Kind::Skt => {
            let lam = rng.random_range(0.2..2.0);
            let mut x = z0();
            x[(0, 0)] = C64::new(lam / 2.0, 0.0);
            Codim2Data::new(lam, zeros_v(m), x.clone(), -x, z0())
        }
        C2Kind::Btpv1 => Ok(random_btpv1(rng, n)),
        C2Kind::Btpv2 => Ok(random_btpv2(rng, n)),
        C2Kind::Btpv0 => Ok(random_btpv0(rng, n)),
    }
    .expect("finite sample");
    if scramble {
        let u = linalg::random_unitary(rng, m);
        d.transform(&u).expect("matching size")
    } else {
        d
    }
}

/// Smallest `n` the kind supports.
pub fn c2_min_n(kind: C2Kind) -> usize {
    match kind {
        C2Kind::Btpv2 | C2Kind::Btpv0 => 3,
        _ => 2,
    }
}

/// Random sparse structure constants; almost never satisfy Jacobi.
pub fn sample_general<R: Rng + ?Sized>(rng: &mut R, n: usize, entries: usize) -> Result<Algebra> {
    let mut c = Vec::new();
    let mut d = Vec::new();
    let mut seen_c = std::collections::HashSet::new();
    let mut seen_d = std::collections::HashSet::new();
    for _ in 0..entries {
        let j = rng.random_range(1..=n);
        let i = rng.random_range(1..=n);
        let k = rng.random_range(1..=n);
        let v = linalg::complex_gaussian(rng);
        if rng.random_bool(0.5) {
            if i != k && seen_c.insert((j, i.min(k), i.max(k))) {
                c.push(Entry::new(j, i.min(k), i.max(k), v));
            }
        } else if seen_d.insert((j, i, k)) {
            d.push(Entry::new(j, i, k, v));
        }
    }
    build_general(n, &c, &d, None)
}

/// A compatible pair `(b, z)` for `lemma9_factor`, built from random factors.
pub fn lemma9_pair<R: Rng + ?Sized>(rng: &mut R, r: usize) -> (CMatrix, CMatrix) {
    let u = linalg::random_unitary(rng, r);
    let v = linalg::random_unitary(rng, r);
    let s = random_s(rng, r);
    let w = symmetric_unitary_commuting(rng, &s);
    let sm = linalg::real_diag(&s);
    let b = &u * &sm * v.adjoint();
    let z = &u * &sm * w * v.transpose();
    (b, z)
}

/// Perturbation of a compatible pair by a random matrix of size `eps`.
pub fn perturb<R: Rng + ?Sized>(rng: &mut R, z: &CMatrix, eps: f64) -> CMatrix {
    let r = z.nrows();
    z + linalg::random_matrix(rng, r, r) * C64::new(eps, 0.0) * unit_phase(rng)
}
