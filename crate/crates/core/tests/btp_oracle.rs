mod common;

use common::real_oracle;
use lie_hermitian::almost_abelian::build_almost_abelian_with_tol;
use lie_hermitian::codim2::build_codim2_with_tol;
use lie_hermitian::hermitian;
use lie_hermitian::sampling::{c2_min_n, random_btpv0_rank, sample_aa, sample_codim2, sample_rng, AA_KINDS, C2_KINDS};
use lie_hermitian::Algebra;

fn agree(a: &Algebra) -> Result<(), String> {
    let rs = real_oracle::real_structure(a);
    let (_, nabla_j) = real_oracle::bismut(&rs);
    let scale = 1.0 + a.max_magnitude().powi(2);
    if nabla_j > 1e-10 * scale {
        return Err(format!("nabla J = {nabla_j:e}"));
    }
    let real = real_oracle::btp_residual(a);
    let engine = hermitian::btp_residual(a);
    let tol = 1e-9 * scale;
    if (real <= tol) != (engine <= tol) {
        return Err(format!("real oracle {real:e}, engine {engine:e}"));
    }
    Ok(())
}

#[test]
fn almost_abelian_btp_matches_real_oracle() {
    for idx in 0..180u64 {
        let mut rng = sample_rng(101, idx);
        let kind = AA_KINDS[idx as usize % AA_KINDS.len()];
        let n = 2 + (idx as usize / AA_KINDS.len()) % 4;
        let d = sample_aa(&mut rng, n, kind);
        let a = build_almost_abelian_with_tol(&d, None).unwrap();
        agree(&a).unwrap_or_else(|e| panic!("sample {idx} ({kind:?}, n = {n}): {e}"));
    }
}

#[test]
fn codim2_btp_matches_real_oracle() {
    for idx in 0..220u64 {
        let mut rng = sample_rng(102, idx);
        let kind = C2_KINDS[idx as usize % C2_KINDS.len()];
        let n = (2 + (idx as usize / C2_KINDS.len()) % 4).max(c2_min_n(kind));
        let d = sample_codim2(&mut rng, n, kind, idx % 2 == 1);
        let a = build_codim2_with_tol(&d, None).unwrap();
        agree(&a).unwrap_or_else(|e| panic!("sample {idx} ({kind:?}, n = {n}): {e}"));
    }
}

#[test]
fn btpv0_rank_two_fails_in_real_coordinates() {
    for idx in 0..10u64 {
        let mut rng = sample_rng(103, idx);
        let n = 5 + idx as usize % 3;
        let a = build_codim2_with_tol(&random_btpv0_rank(&mut rng, n, 2), None).unwrap();
        assert!(real_oracle::btp_residual(&a) > 1e-3, "sample {idx}");
        let b = build_codim2_with_tol(&random_btpv0_rank(&mut rng, n, 1), None).unwrap();
        assert!(real_oracle::btp_residual(&b) < 1e-9, "sample {idx}");
    }
}
