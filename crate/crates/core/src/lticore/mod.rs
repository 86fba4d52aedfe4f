//! Polynomial and rational-function algebra, transfer matrices, state-space
//! realizations and the numeric primitives shared by the rest of the crate.

mod eigen;
mod matrix;
mod poly;
mod rational;
mod roots;
mod statespace;

pub use eigen::{eigenvalues, max_real_part, spectral_radius};
pub use matrix::{
    hermitian_min_eig, psd_check, symmetric_eigs, PsdCheck, ResidueReport, TransferMatrix, Units,
    HERM_TOL, PSD_TOL,
};
pub use poly::{Polynomial, ORIGIN_COEFF_TOL};
pub use rational::{common_factor, RationalFunction, ScalarResidue, CANCEL_TOL, EVAL_TOL};
pub use roots::{cluster, RootCluster, CLUSTER_TOL};
pub use statespace::StateSpace;

/// Roots of `p`, repeated by multiplicity.
pub fn poly_roots(p: &Polynomial) -> crate::Result<Vec<num_complex::Complex64>> {
    p.roots()
}
