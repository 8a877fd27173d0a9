//! Left-invariant Hermitian geometry on Lie algebras from structure constants.
//!
//! An [`Algebra`] stores the complex structure constants `C^j_{ik}` and
//! `D^j_{ik}` of a Lie algebra with a compatible complex structure under a
//! unitary frame. From those the crate computes torsion, Chern and Bismut
//! connections, curvature, Ricci traces and the metric-property predicates,
//! and provides the closed forms for the almost abelian and codimension-2
//! abelian-ideal families.

pub mod algebra;
pub mod almost_abelian;
pub mod codim2;
pub mod commands;
pub mod error;
pub mod exterior;
pub mod hermitian;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod spec_file;
pub mod suite;
pub mod verify;

pub use algebra::{
    build_general, change_frame, jacobi_residual, unimodularity_defect, Algebra, Entry, JacobiResidual, Tensor3,
    UnitaryMatrix, MAX_DIM,
};
pub use error::{Error, Result};
pub use exterior::{Differential, InvariantForm};
pub use hermitian::{
    chern_curvature, chern_torsion, property_report, ConnectionCoeffs, ConnectionKind, CurvatureTensor, PropertyReport,
    TorsionTensor,
};
pub use num_complex::Complex64 as C64;
