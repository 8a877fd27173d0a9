use lie_hermitian::almost_abelian::build_almost_abelian_with_tol;
use lie_hermitian::codim2::{build_codim2_with_tol, lemma9_factor};
use lie_hermitian::exterior::{exterior_d, wedge, InvariantForm};
use lie_hermitian::hermitian::property_report;
use lie_hermitian::linalg::{self, CMatrix};
use lie_hermitian::sampling::{
    c2_min_n, lemma9_pair, sample_aa, sample_codim2, sample_general, sample_rng, AA_KINDS, C2_KINDS,
};
use lie_hermitian::spec_file::SpecFile;
use lie_hermitian::{change_frame, Algebra, UnitaryMatrix, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 4;

fn monomial() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, (f64, f64))> {
    let idx: Vec<usize> = (1..=N).collect();
    (
        proptest::sample::subsequence(idx.clone(), 0..=2),
        proptest::sample::subsequence(idx, 0..=2),
        (-2.0..2.0f64, -2.0..2.0f64),
    )
}

/// Homogeneous form of degree `(p, q)` with up to three terms.
fn form(p: usize, q: usize) -> impl Strategy<Value = InvariantForm> {
    let idx: Vec<usize> = (1..=N).collect();
    proptest::collection::vec(
        (
            proptest::sample::subsequence(idx.clone(), p),
            proptest::sample::subsequence(idx, q),
            (-2.0..2.0f64, -2.0..2.0f64),
        ),
        1..=3,
    )
    .prop_map(|terms| {
        terms.iter().fold(InvariantForm::zero(N), |acc, (u, b, (re, im))| {
            acc.add(&InvariantForm::monomial(N, u, b, C64::new(*re, *im)))
        })
    })
}

fn any_form() -> impl Strategy<Value = InvariantForm> {
    (0..=2usize, 0..=2usize).prop_flat_map(|(p, q)| form(p, q))
}

fn degree(f: &InvariantForm) -> usize {
    f.terms().keys().next().map_or(0, |k| (k.0.count_ones() + k.1.count_ones()) as usize)
}

fn sample_algebra(seed: u64, pick: usize) -> Algebra {
    let mut rng = sample_rng(seed, pick as u64);
    if pick % 2 == 0 {
        let kind = AA_KINDS[pick / 2 % AA_KINDS.len()];
        build_almost_abelian_with_tol(&sample_aa(&mut rng, N, kind), None).unwrap()
    } else {
        let kind = C2_KINDS[pick / 2 % C2_KINDS.len()];
        build_codim2_with_tol(&sample_codim2(&mut rng, N.max(c2_min_n(kind)), kind, true), None).unwrap()
    }
}

fn close(a: &InvariantForm, b: &InvariantForm, tol: f64) -> bool {
    a.sub(b).max_abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn monomial_reordering_changes_sign_only((u, b, (re, im)) in monomial()) {
        let c = C64::new(re, im);
        let f = InvariantForm::monomial(N, &u, &b, c);
        let mut ru = u.clone();
        ru.reverse();
        let g = InvariantForm::monomial(N, &ru, &b, c);
        let flips = u.len() * u.len().saturating_sub(1) / 2;
        let sign = if flips % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(close(&g, &f.scale(C64::new(sign, 0.0)), 1e-14));
    }

    #[test]
    fn wedge_is_associative(a in any_form(), b in any_form(), c in any_form()) {
        let left = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let right = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn wedge_is_graded_commutative(a in any_form(), b in any_form()) {
        let sign = if degree(&a) * degree(&b) % 2 == 0 { 1.0 } else { -1.0 };
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap().scale(C64::new(sign, 0.0));
        prop_assert!(close(&ab, &ba, 1e-12));
    }

    #[test]
    fn d_satisfies_leibniz(a in any_form(), b in any_form(), seed in any::<u64>(), pick in 0..40usize) {
        let alg = sample_algebra(seed, pick);
        let sign = if degree(&a) % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = exterior_d(&alg, &wedge(&a, &b).unwrap()).unwrap();
        let rhs = wedge(&exterior_d(&alg, &a).unwrap(), &b)
            .unwrap()
            .add(&wedge(&a, &exterior_d(&alg, &b).unwrap()).unwrap().scale(C64::new(sign, 0.0)));
        let scale = 1.0 + alg.max_magnitude();
        prop_assert!(close(&lhs, &rhs, 1e-11 * scale * scale));
    }

    #[test]
    fn d_commutes_with_conjugation_and_squares_to_zero(a in any_form(), seed in any::<u64>(), pick in 0..40usize) {
        let alg = sample_algebra(seed, pick);
        let da = exterior_d(&alg, &a).unwrap();
        let scale = 1.0 + alg.max_magnitude();
        prop_assert!(close(&exterior_d(&alg, &a.conj()).unwrap(), &da.conj(), 1e-11 * scale));
        prop_assert!(exterior_d(&alg, &da).unwrap().max_abs() <= 1e-10 * scale * scale);
    }

    #[test]
    fn properties_are_frame_invariant(seed in any::<u64>(), pick in 0..40usize) {
        let alg = sample_algebra(seed, pick);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let u = UnitaryMatrix::new(linalg::random_unitary(&mut rng, N), 1e-10).unwrap();
        let moved = change_frame(&alg, &u).unwrap().with_tol(alg.tol());
        let (r0, r1) = (property_report(&alg).unwrap(), property_report(&moved).unwrap());
        prop_assert_eq!(&r0.flags, &r1.flags);
        let scale = 1.0 + alg.max_magnitude().powi(2);
        for (x, y) in [(r0.scalars.s, r1.scalars.s), (r0.scalars.s_hat, r1.scalars.s_hat), (r0.scalars.chi, r1.scalars.chi)] {
            prop_assert!((x - y).abs() <= 1e-9 * scale, "{} vs {}", x, y);
        }
    }

    #[test]
    fn jacobi_residual_matches_d_squared(seed in any::<u64>(), n in 2..6usize, entries in 1..10usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = sample_general(&mut rng, n, entries).unwrap();
        let tol = alg.tol();
        let jac = alg.jacobi().max() <= 10.0 * tol;
        let dd = lie_hermitian::exterior::d_squared_residual(&alg) <= 10.0 * tol;
        prop_assert_eq!(jac, dd);
    }

    #[test]
    fn spec_file_roundtrip_is_exact(seed in any::<u64>(), pick in 0..40usize) {
        let mut rng = sample_rng(seed, pick as u64);
        let kind = C2_KINDS[pick % C2_KINDS.len()];
        let d = sample_codim2(&mut rng, N.max(c2_min_n(kind)), kind, true);
        let spec = SpecFile::from_codim2(&d);
        let back = SpecFile::parse(&spec.to_json()).unwrap();
        prop_assert_eq!(&back, &spec);
        let a = build_codim2_with_tol(&d, None).unwrap();
        let general = SpecFile::parse(&SpecFile::from_algebra(&a).to_json()).unwrap().build(None).unwrap();
        prop_assert!(general.c().max_diff(a.c()) == 0.0 && general.d().max_diff(a.d()) == 0.0);
    }

    #[test]
    fn decompositions_reconstruct(seed in any::<u64>(), rows in 1..7usize, cols in 1..7usize, rank in 0..7usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rank.min(rows).min(cols);
        let m: CMatrix = linalg::random_matrix(&mut rng, rows, k) * linalg::random_matrix(&mut rng, k, cols);
        let d = linalg::svd(&m);
        let scale = 1.0 + linalg::max_abs(&m);
        prop_assert!(linalg::max_abs(&(&d.u * linalg::real_diag(&d.s) * d.v.adjoint() - &m)) <= 1e-12 * scale);
        prop_assert!(d.s.windows(2).all(|p| p[0] >= p[1]));
        prop_assert_eq!(linalg::rank(&m, 1e-9 * scale), k);
        let h = &m * m.adjoint();
        let (w, q) = linalg::hermitian_eigen(&h);
        prop_assert!(linalg::max_abs(&(&q * linalg::real_diag(&w) * q.adjoint() - &h)) <= 1e-12 * scale * scale);
    }

    #[test]
    fn lemma9_reconstructs_compatible_pairs(seed in any::<u64>(), r in 1..5usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (b, z) = lemma9_pair(&mut rng, r);
        let f = lemma9_factor(&b, &z).unwrap();
        let scale = 1.0 + linalg::max_abs(&b).max(linalg::max_abs(&z));
        prop_assert!(f.invariant_residual(&b, &z) <= 1e-8 * scale * scale);
    }
}
