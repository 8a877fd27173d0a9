//! Left-invariant forms in the generators `phi_1..phi_n`, `conj(phi_1)..conj(phi_n)`.
//!
//! A monomial is stored as a pair of bitmasks `(I, J)` meaning
//! `phi_I ^ conj(phi)_J` with both index sets ascending and every unbarred
//! generator placed before every barred one. Products are normalized back to
//! that order with the permutation sign.

use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

use crate::algebra::Algebra;
use crate::error::{Error, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I_UNIT: C64 = C64 { re: 0.0, im: 1.0 };

/// Monomial key: (unbarred mask, barred mask), bit `i` for generator `i+1`.
pub type Key = (u32, u32);

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantForm {
    n: usize,
    terms: BTreeMap<Key, C64>,
}

/// Sign of sorting the concatenation of two disjoint ascending index sets.
fn merge_sign(left: u32, right: u32) -> f64 {
    let mut swaps = 0u32;
    let mut r = right;
    while r != 0 {
        let b = r.trailing_zeros();
        // elements of `left` greater than b must hop over it
        swaps += (left >> (b + 1)).count_ones();
        r &= r - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn mask_from(indices: &[usize]) -> u32 {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

/// Product of two monomials; `None` when a generator repeats.
fn monomial_product(a: Key, b: Key) -> Option<(Key, f64)> {
    if a.0 & b.0 != 0 || a.1 & b.1 != 0 {
        return None;
    }
    // phi_A1 cphi_B1 phi_A2 cphi_B2 -> phi_A1 phi_A2 cphi_B1 cphi_B2
    let hop = if (a.1.count_ones() * b.0.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
    let sign = hop * merge_sign(a.0, b.0) * merge_sign(a.1, b.1);
    Some(((a.0 | b.0, a.1 | b.1), sign))
}

impl InvariantForm {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: C64) -> Self {
        let mut f = Self::zero(n);
        f.add_term((0, 0), c);
        f
    }

    /// `phi_i` (1-based).
    pub fn phi(n: usize, i: usize) -> Self {
        let mut f = Self::zero(n);
        f.add_term((1 << (i - 1), 0), ONE);
        f
    }

    /// `conj(phi_i)` (1-based).
    pub fn phi_bar(n: usize, i: usize) -> Self {
        let mut f = Self::zero(n);
        f.add_term((0, 1 << (i - 1)), ONE);
        f
    }

    /// `c * phi_{i_1} ^ ... ^ conj(phi_{j_1}) ^ ...` for arbitrary (possibly
    /// unsorted) 1-based index lists.
    pub fn monomial(n: usize, unbarred: &[usize], barred: &[usize], c: C64) -> Self {
        let mut f = Self::scalar(n, c);
        for &i in unbarred {
            f = f.wedge_unchecked(&Self::phi(n, i));
        }
        for &j in barred {
            f = f.wedge_unchecked(&Self::phi_bar(n, j));
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Key, C64> {
        &self.terms
    }

    /// Coefficient on the canonical monomial with the given 1-based sorted
    /// index sets.
    pub fn coeff(&self, unbarred: &[usize], barred: &[usize]) -> C64 {
        let key = (
            mask_from(&unbarred.iter().map(|i| i - 1).collect::<Vec<_>>()),
            mask_from(&barred.iter().map(|i| i - 1).collect::<Vec<_>>()),
        );
        self.terms.get(&key).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |a, z| a.max(z.norm()))
    }

    fn add_term(&mut self, key: Key, c: C64) {
        if c == ZERO {
            return;
        }
        let entry = self.terms.entry(key).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.n);
        for (&k, &v) in &self.terms {
            out.add_term(k, v * c);
        }
        out
    }

    /// Complex conjugate: `conj(c phi_I cphi_J) = conj(c) (-1)^{|I||J|} phi_J cphi_I`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (&(i, j), &c) in &self.terms {
            let sign = if (i.count_ones() * j.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term((j, i), c.conj() * sign);
        }
        out
    }

    fn wedge_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (&ka, &ca) in &self.terms {
            for (&kb, &cb) in &other.terms {
                if let Some((k, s)) = monomial_product(ka, kb) {
                    out.add_term(k, ca * cb * s);
                }
            }
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(self.wedge_unchecked(other))
    }
}

pub fn wedge(a: &InvariantForm, b: &InvariantForm) -> Result<InvariantForm> {
    a.wedge(b)
}

/// Keeps exactly the terms of bidegree `(p, q)`.
pub fn bidegree_project(f: &InvariantForm, p: usize, q: usize) -> InvariantForm {
    let mut out = InvariantForm::zero(f.n);
    for (&(i, j), &c) in &f.terms {
        if i.count_ones() as usize == p && j.count_ones() as usize == q {
            out.terms.insert((i, j), c);
        }
    }
    out
}

/// `omega = sqrt(-1) sum_i phi_i ^ conj(phi_i)`.
pub fn kaehler_form(n: usize) -> InvariantForm {
    let mut f = InvariantForm::zero(n);
    for i in 0..n {
        f.add_term((1 << i, 1 << i), I_UNIT);
    }
    f
}

pub fn form_power(f: &InvariantForm, k: usize) -> InvariantForm {
    let mut out = InvariantForm::scalar(f.n, ONE);
    for _ in 0..k {
        out = out.wedge_unchecked(f);
    }
    out
}

/// Exterior derivative on invariant forms of one algebra, with the images of
/// the generators cached.
pub struct Differential {
    n: usize,
    d_phi: Vec<InvariantForm>,
    d_phi_bar: Vec<InvariantForm>,
}

impl Differential {
    pub fn new(alg: &Algebra) -> Self {
        let n = alg.n();
        let (c, d) = (alg.c(), alg.d());
        let d_phi: Vec<InvariantForm> = (0..n)
            .map(|i| {
                let mut f = InvariantForm::zero(n);
                for j in 0..n {
                    for k in 0..n {
                        // -1/2 C^i_{jk} phi_j ^ phi_k, summed over ordered pairs
                        if j < k {
                            let coef = -(c.get(i, j, k) - c.get(i, k, j)) * 0.5;
                            f.add_term(((1 << j) | (1 << k), 0), coef);
                        }
                        // -conj(D^j_{ik}) phi_j ^ conj(phi_k)
                        f.add_term((1 << j, 1 << k), -d.get(j, i, k).conj());
                    }
                }
                f
            })
            .collect();
        let d_phi_bar = d_phi.iter().map(InvariantForm::conj).collect();
        Self { n, d_phi, d_phi_bar }
    }

    pub fn d_phi(&self, i: usize) -> &InvariantForm {
        &self.d_phi[i - 1]
    }

    pub fn d_phi_bar(&self, i: usize) -> &InvariantForm {
        &self.d_phi_bar[i - 1]
    }

    /// Graded Leibniz extension of the structure equation.
    pub fn apply(&self, f: &InvariantForm) -> Result<InvariantForm> {
        if f.n != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: f.n });
        }
        let mut out = InvariantForm::zero(self.n);
        for (&(im, jm), &coef) in &f.terms {
            // generators in canonical order: unbarred ascending then barred ascending
            let gens: Vec<(bool, usize)> = (0..self.n)
                .filter(|b| im >> b & 1 == 1)
                .map(|b| (false, b))
                .chain((0..self.n).filter(|b| jm >> b & 1 == 1).map(|b| (true, b)))
                .collect();
            for (pos, &(barred, g)) in gens.iter().enumerate() {
                let prefix_key =
                    gens[..pos].iter().fold(
                        (0u32, 0u32),
                        |k, &(bb, x)| {
                            if bb {
                                (k.0, k.1 | 1 << x)
                            } else {
                                (k.0 | 1 << x, k.1)
                            }
                        },
                    );
                let suffix_key = gens[pos + 1..].iter().fold((0u32, 0u32), |k, &(bb, x)| {
                    if bb {
                        (k.0, k.1 | 1 << x)
                    } else {
                        (k.0 | 1 << x, k.1)
                    }
                });
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let dg = if barred { &self.d_phi_bar[g] } else { &self.d_phi[g] };
                for (&kd, &cd) in &dg.terms {
                    let Some((k1, s1)) = monomial_product(prefix_key, kd) else { continue };
                    let Some((k2, s2)) = monomial_product(k1, suffix_key) else { continue };
                    out.add_term(k2, coef * cd * (sign * s1 * s2));
                }
            }
        }
        Ok(out)
    }
}

pub fn exterior_d(alg: &Algebra, f: &InvariantForm) -> Result<InvariantForm> {
    Differential::new(alg).apply(f)
}

/// `d(d(g))` max-abs coefficient over every generator and its conjugate.
pub fn d_squared_residual(alg: &Algebra) -> f64 {
    let dd = Differential::new(alg);
    let n = alg.n();
    let mut worst = 0.0f64;
    for i in 1..=n {
        for g in [dd.d_phi(i), dd.d_phi_bar(i)] {
            let dd_g = dd.apply(g).expect("same dimension");
            worst = worst.max(dd_g.max_abs());
        }
    }
    worst
}

/// `del delbar f` for a homogeneous `(p, q)`-form, as `(d (d f)^{p,q+1})^{p+1,q+1}`.
pub fn del_delbar(dd: &Differential, f: &InvariantForm, p: usize, q: usize) -> InvariantForm {
    let dbar = bidegree_project(&dd.apply(f).expect("same dimension"), p, q + 1);
    bidegree_project(&dd.apply(&dbar).expect("same dimension"), p + 1, q + 1)
}

/// Max-abs coefficient of `del delbar (omega^k)`.
///
/// `k = n-1` tests Gauduchon, `k = n-2` astheno-Kaehler, `k = 1` pluriclosed.
pub fn del_delbar_residual(alg: &Algebra, k: usize) -> Result<f64> {
    let n = alg.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidDegree { k, n });
    }
    let dd = Differential::new(alg);
    let wk = form_power(&kaehler_form(n), k);
    Ok(del_delbar(&dd, &wk, k, k).max_abs())
}

/// Both sides of `d(phi_1 ^ ... ^ phi_n) = conj(zeta) ^ phi_1 ^ ... ^ phi_n`
/// with `zeta_i = sum_r D^r_{ri}`.
pub fn top_form_d_check(alg: &Algebra) -> (InvariantForm, InvariantForm) {
    let n = alg.n();
    let top = InvariantForm::monomial(n, &(1..=n).collect::<Vec<_>>(), &[], ONE);
    let lhs = exterior_d(alg, &top).expect("same dimension");
    let mut zeta_bar = InvariantForm::zero(n);
    for i in 0..n {
        let z: C64 = (0..n).map(|r| alg.d().get(r, r, i)).sum();
        zeta_bar.add_term((0, 1 << i), z.conj());
    }
    let rhs = zeta_bar.wedge_unchecked(&top);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_general, Entry};

    #[test]
    fn phi_squared_vanishes() {
        let p = InvariantForm::phi(2, 1);
        assert!(p.wedge(&p).unwrap().is_zero());
    }

    #[test]
    fn barred_unbarred_anticommute() {
        let f = InvariantForm::phi_bar(2, 1).wedge(&InvariantForm::phi(2, 2)).unwrap();
        assert_eq!(f.coeff(&[2], &[1]), -ONE);
        assert_eq!(f.terms().len(), 1);
    }

    #[test]
    fn omega_squared_in_dimension_two() {
        let w = kaehler_form(2);
        assert_eq!(w.coeff(&[1], &[1]), I_UNIT);
        assert_eq!(w.coeff(&[2], &[2]), I_UNIT);
        let w2 = form_power(&w, 2);
        assert_eq!(w2.terms().len(), 1);
        // (i)^2 * 2 * phi1 cphi1 phi2 cphi2 = +2 on the canonical key phi1 phi2 cphi1 cphi2
        assert!((w2.coeff(&[1, 2], &[1, 2]) - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn omega_power_vanishes_above_n() {
        for n in 2..=5 {
            assert!(form_power(&kaehler_form(n), n + 1).is_zero());
            assert!(!form_power(&kaehler_form(n), n).is_zero());
        }
        assert_eq!(form_power(&kaehler_form(3), 0), InvariantForm::scalar(3, ONE));
    }

    #[test]
    fn abelian_differential_vanishes() {
        let a = Algebra::abelian(3).unwrap();
        for i in 1..=3 {
            assert!(exterior_d(&a, &InvariantForm::phi(3, i)).unwrap().is_zero());
        }
        for k in 1..3 {
            assert_eq!(del_delbar_residual(&a, k).unwrap(), 0.0);
        }
        let (l, r) = top_form_d_check(&a);
        assert!(l.is_zero() && r.is_zero());
    }

    #[test]
    fn lambda_one_structure_equation() {
        let a = build_general(2, &[], &[Entry::new(1, 1, 1, ONE)], None).unwrap();
        let d1 = exterior_d(&a, &InvariantForm::phi(2, 1)).unwrap();
        assert_eq!(d1, InvariantForm::monomial(2, &[1], &[1], -ONE));
        assert_eq!(bidegree_project(&d1, 1, 1), d1);
        assert!(bidegree_project(&d1, 2, 0).is_zero());
        assert!(exterior_d(&a, &InvariantForm::phi(2, 2)).unwrap().is_zero());
    }

    #[test]
    fn invalid_degree_rejected() {
        let a = Algebra::abelian(3).unwrap();
        assert!(matches!(del_delbar_residual(&a, 0), Err(Error::InvalidDegree { .. })));
        assert!(matches!(del_delbar_residual(&a, 3), Err(Error::InvalidDegree { .. })));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(InvariantForm::phi(2, 1).wedge(&InvariantForm::phi(3, 1)).is_err());
        let a = Algebra::abelian(2).unwrap();
        assert!(exterior_d(&a, &InvariantForm::phi(3, 1)).is_err());
    }
}
