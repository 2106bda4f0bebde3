//! Closed-form dense linear algebra for the small matrices that appear in the
//! Siegel half-space computations: 2x2 real and complex, 4x2 and 4x4.

mod cmat;
mod projector;
mod sym2;

pub use cmat::{
    schatten, schatten_from_sv, schatten_pow, schatten_pow_c2, singular_values, CMat, C2, C64, I,
};
pub use projector::{
    col_basis, col_basis_with_tol, col_projector, col_projector_with_tol, projector_from_basis,
    Mat4, Mat42, RANK_TOL,
};
pub use sym2::{apply_spectral, sqrt_psd, sym_eig2, Mat2, RealSym2, Rotation2, SymEigen2};

/// Largest eigenvalue of `N^* N` for `N = [[1, beta], [beta, alpha]]`.
pub fn corner_top_eigenvalue(alpha: C64, beta: C64) -> f64 {
    let a2 = alpha.norm_sqr();
    let b2 = beta.norm_sqr();
    // off-diagonal entry of N^* N; equals |1 + alpha|^2 |beta|^2 for real beta
    let off = (beta + beta.conj() * alpha).norm_sqr();
    0.5 * (1.0 + a2 + 2.0 * b2) + (0.25 * (1.0 - a2).powi(2) + off).sqrt()
}
