//! The midpoint contraction ratio and the symplectic rotations that fix `iI`.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{
    col_basis_with_tol, projector_from_basis, schatten_pow_c2, sqrt_psd, sym_eig2, Mat2, Mat4,
    Mat42, RealSym2, Rotation2, C2, C64, RANK_TOL,
};
use crate::siegel::{check_p, polar, u_of, wp, BallPoint, SiegelPoint};

fn y_sqrt(z: &SiegelPoint) -> Result<RealSym2> {
    if !z.is_interior() {
        return Err(Error::DegenerateY {
            min_eig: z.min_eig_y(),
        });
    }
    sqrt_psd(&z.y(), 0.0).map_err(|_| Error::DegenerateY {
        min_eig: z.min_eig_y(),
    })
}

/// Orthonormal basis of `Ran [Y1^{1/2}; Y2^{1/2}]`.
fn mid_basis(z1: &SiegelPoint, z2: &SiegelPoint, tol: f64) -> Result<Mat42> {
    let m = Mat42::stack_sym(&y_sqrt(z1)?, &y_sqrt(z2)?);
    col_basis_with_tol(&m, tol)
}

/// Projector onto `Ran [Y1^{1/2}; Y2^{1/2}]`.
pub fn mid_projector(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<Mat4> {
    mid_basis(z1, z2, RANK_TOL).map(|q| projector_from_basis(&q))
}

/// `Q^t [U1; U2]` for the orthonormal basis `Q` of the midpoint range.
fn project(q: &Mat42, u1: &C2, u2: &C2) -> C2 {
    let top = C2::from_real(&q.top().transpose()) * *u1;
    let bot = C2::from_real(&q.bottom().transpose()) * *u2;
    top + bot
}

/// Residual `(I - QQ^t)[U1; U2]` in Frobenius norm.
fn range_residual(q: &Mat42, u1: &C2, u2: &C2, b: &C2) -> f64 {
    let qt = C2::from_real(&q.top());
    let qb = C2::from_real(&q.bottom());
    let r1 = *u1 - qt * *b;
    let r2 = *u2 - qb * *b;
    (r1.frob_norm().powi(2) + r2.frob_norm().powi(2)).sqrt()
}

/// `1/2 [U1^*, U2^*] P [U1; U2]`, returned as the factor `B` with `B^* B` equal to it.
fn gram_factor(z1: &SiegelPoint, z2: &SiegelPoint, tol: f64) -> Result<(C2, Mat42, C2, C2)> {
    let q = mid_basis(z1, z2, tol)?;
    let u1 = u_of(z1)?;
    let u2 = u_of(z2)?;
    let b = project(&q, &u1, &u2).scale_re(1.0 / SQRT_2);
    Ok((b, q, u1, u2))
}

/// `1/2 [U1^*, U2^*] P [U1; U2]`; equals `U_a^* U_a` for the midpoint `Z_a`.
pub fn gram_mid(z1: &SiegelPoint, z2: &SiegelPoint) -> Result<C2> {
    let (b, ..) = gram_factor(z1, z2, RANK_TOL)?;
    let g = b.adjoint() * b;
    // Hermitian by construction up to rounding
    let off = (g.m[0][1] + g.m[1][0].conj()) * 0.5;
    Ok(C2::new([
        [C64::new(g.m[0][0].re, 0.0), off],
        [off.conj(), C64::new(g.m[1][1].re, 0.0)],
    ]))
}

/// Contraction ratio with the diagnostics of its equality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionReport {
    pub p: f64,
    /// `w_p(Z_a) / (w_p(Z1)/2 + w_p(Z2)/2)`.
    pub mu_star: f64,
    /// `|gram_mid|_{1+p}^{1+p}`.
    pub mu_raw: f64,
    pub wp1: f64,
    pub wp2: f64,
    /// Normalization factors with `r1^{2(1+p)} + r2^{2(1+p)} = 2`.
    pub r1: f64,
    pub r2: f64,
    /// The same ratio assembled from polar data and the `r` factors; `None` if a point is `iI`.
    pub mu_polar: Option<f64>,
    /// `|(I - P)[U1; U2]|_F`.
    pub range_residual: f64,
    /// `|U1^* U1 - U2^* U2|_F`.
    pub eq_residual: f64,
}

/// `mu*` for a pair of interior points.
pub fn mu_star(z1: &SiegelPoint, z2: &SiegelPoint, p: f64) -> Result<ContractionReport> {
    mu_star_with_tol(z1, z2, p, RANK_TOL)
}

/// As [`mu_star`] with a caller-chosen rank threshold for the midpoint projector.
pub fn mu_star_with_tol(
    z1: &SiegelPoint,
    z2: &SiegelPoint,
    p: f64,
    rank_tol: f64,
) -> Result<ContractionReport> {
    check_p(p)?;
    let q_exp = 2.0 * (1.0 + p);
    let (b, q, u1, u2) = gram_factor(z1, z2, rank_tol)?;
    let wp1 = schatten_pow_c2(&u1, q_exp)?;
    let wp2 = schatten_pow_c2(&u2, q_exp)?;
    let sum = wp1 + wp2;
    if !(sum > 0.0) {
        return Err(Error::DegeneratePoint("both points equal iI"));
    }
    let mu_raw = schatten_pow_c2(&b, q_exp)?;
    let mu_star = mu_raw / (0.5 * sum);
    let r1 = (2.0 * wp1 / sum).powf(1.0 / q_exp);
    let r2 = (2.0 * wp2 / sum).powf(1.0 / q_exp);

    let mu_polar = match (polar(z1, p), polar(z2, p)) {
        (Ok(p1), Ok(p2)) => {
            let n1 = p1.unit().scale_re(r1);
            let n2 = p2.unit().scale_re(r2);
            let bb = project(&q, &n1, &n2).scale_re(1.0 / SQRT_2);
            Some(schatten_pow_c2(&bb, q_exp)?)
        }
        _ => None,
    };

    let bq = project(&q, &u1, &u2);
    let range_residual = range_residual(&q, &u1, &u2, &bq);
    let eq_residual = (u1.adjoint() * u1 - u2.adjoint() * u2).frob_norm();
    Ok(ContractionReport {
        p,
        mu_star,
        mu_raw,
        wp1,
        wp2,
        r1,
        r2,
        mu_polar,
        range_residual,
        eq_residual,
    })
}

/// The rotation `[[cos, -sin], [sin, cos]]` with `cos = (lambda I - Delta_G)/(2 sqrt 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticRotation {
    pub lambda: f64,
    pub delta_g: RealSym2,
    pub cos_block: RealSym2,
    pub sin_block: RealSym2,
    /// Eigenbasis of `Delta_G`, shared by both blocks.
    pub basis: Rotation2,
    /// Eigenvalues of the blocks, paired with the descending eigenvalues of `Delta_G`.
    pub c: [f64; 2],
    pub s: [f64; 2],
}

/// Default `Delta_G`, with spectrum `{1, -1}`.
pub const DEFAULT_DELTA_G: RealSym2 = RealSym2::new(0.0, 1.0, 0.0);

const INTERVAL_SLACK: f64 = 1e-12;

/// Closed interval of `lambda` for which both cos eigenvalues lie in `[-1, 1]`.
pub fn admissible_interval(delta_g: &RealSym2) -> (f64, f64) {
    let d = sym_eig2(delta_g).values;
    (d[0] - 2.0 * SQRT_2, d[1] + 2.0 * SQRT_2)
}

/// Builds the rotation blocks for `lambda` and `Delta_G`.
pub fn psi_blocks(lambda: f64, delta_g: &RealSym2) -> Result<SymplecticRotation> {
    if !lambda.is_finite() || !delta_g.is_finite() {
        return Err(Error::NonFinite("rotation parameters"));
    }
    let e = sym_eig2(delta_g);
    let (lo, hi) = admissible_interval(delta_g);
    let mut c = [0.0; 2];
    let mut s = [0.0; 2];
    for k in 0..2 {
        let ck = (lambda - e.values[k]) / (2.0 * SQRT_2);
        if ck.abs() > 1.0 + INTERVAL_SLACK {
            return Err(Error::OutOfInterval { lambda, lo, hi });
        }
        let ck = ck.clamp(-1.0, 1.0);
        c[k] = ck;
        s[k] = ((1.0 - ck) * (1.0 + ck)).sqrt();
    }
    let basis = e.vectors;
    Ok(SymplecticRotation {
        lambda,
        delta_g: *delta_g,
        cos_block: basis.conjugate_diag(c[0], c[1]),
        sin_block: basis.conjugate_diag(s[0], s[1]),
        basis,
        c,
        s,
    })
}

impl SymplecticRotation {
    /// `[[cos, -sin], [sin, cos]]` as a real 4x4 matrix.
    pub fn matrix(&self) -> Mat4 {
        let c = self.cos_block.rows();
        let s = self.sin_block.rows();
        let mut m = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = c[i][j];
                m[i][j + 2] = -s[i][j];
                m[i + 2][j] = s[i][j];
                m[i + 2][j + 2] = c[i][j];
            }
        }
        Mat4 { m }
    }

    /// `|Psi^t J Psi - J|` entrywise maximum.
    pub fn symplectic_defect(&self) -> f64 {
        let psi = self.matrix();
        let j = standard_j();
        psi.transpose().mul(&j).mul(&psi).max_abs_diff(&j)
    }

    /// `|cos^2 + sin^2 - I|_F`.
    pub fn pythagoras_defect(&self) -> f64 {
        let c = self.cos_block.to_mat2();
        let s = self.sin_block.to_mat2();
        (c * c + s * s - Mat2::IDENTITY).frob_norm()
    }

    /// `|cos sin - sin cos|_F`.
    pub fn commutator(&self) -> f64 {
        let c = self.cos_block.to_mat2();
        let s = self.sin_block.to_mat2();
        (c * s - s * c).frob_norm()
    }

    /// `e^{-i Theta} = cos - i sin`, symmetric and unitary.
    pub fn unitary_factor(&self) -> C2 {
        C2::from_parts(
            &self.cos_block.to_mat2(),
            &self.sin_block.scale(-1.0).to_mat2(),
        )
    }

    /// True when both sin eigenvalues are strictly positive.
    pub fn is_nondegenerate(&self) -> bool {
        self.s[0] > 0.0 && self.s[1] > 0.0
    }
}

/// `J = [[0, I], [-I, 0]]`.
pub fn standard_j() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    m[0][2] = 1.0;
    m[1][3] = 1.0;
    m[2][0] = -1.0;
    m[3][1] = -1.0;
    Mat4 { m }
}

/// Mobius action `(cos Z - sin)(sin Z + cos)^{-1}`.
pub fn psi_apply(rot: &SymplecticRotation, z: &SiegelPoint) -> Result<SiegelPoint> {
    let c = C2::from_real(&rot.cos_block.to_mat2());
    let s = C2::from_real(&rot.sin_block.to_mat2());
    let zc = z.to_c2();
    let num = c * zc - s;
    let den = s * zc + c;
    let inv = den.inverse_tol(1e-300).ok_or(Error::SingularDenominator)?;
    let image = num * inv;
    let mismatch = image.asymmetry();
    if mismatch > 1e-9 * image.max_abs().max(1.0) {
        return Err(Error::Internal(format!(
            "Mobius image asymmetric by {mismatch:e}"
        )));
    }
    let image = image.symmetrize();
    let x = RealSym2::sym_part(&image.re());
    let y = RealSym2::sym_part(&image.im());
    if z.is_interior() {
        SiegelPoint::with_threshold(x, y, 0.0)
    } else {
        SiegelPoint::closure(x, y)
    }
}

/// Ball-model action `W -> E W E` with `E = cos - i sin`.
pub fn psi_ball_apply(rot: &SymplecticRotation, w: &BallPoint) -> BallPoint {
    let e = rot.unitary_factor();
    let image = (e * w.matrix() * e).symmetrize();
    BallPoint::new(image).expect("unitary congruence preserves the ball")
}

/// `Z -> Z + i t I`.
pub fn translate_imag(z: &SiegelPoint, t: f64) -> Result<SiegelPoint> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "translation must be >= 0, got {t}"
        )));
    }
    let y = z.y() + RealSym2::scalar(t);
    if z.is_interior() {
        SiegelPoint::with_threshold(z.x(), y, 0.0)
    } else {
        SiegelPoint::closure(z.x(), y)
    }
}

/// Both sides of the midpoint formula: `w_p(Psi(Z_a) + itI)` and `|gram_mid|_{1+p}^{1+p}`.
pub fn mainformula_gap(
    z1: &SiegelPoint,
    z2: &SiegelPoint,
    rot: &SymplecticRotation,
    p: f64,
    t: f64,
) -> Result<(f64, f64)> {
    check_p(p)?;
    let mid = z1.midpoint(z2);
    let moved = translate_imag(&psi_apply(rot, &mid)?, t)?;
    let lhs = wp(&moved, p)?;
    let (b, ..) = gram_factor(z1, z2, RANK_TOL)?;
    let rhs = schatten_pow_c2(&b, 2.0 * (1.0 + p))?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn projector_for_scalar_pair() {
        let p = mid_projector(
            &SiegelPoint::base(),
            &SiegelPoint::imag_scalar(2.0).unwrap(),
        )
        .unwrap();
        let r2 = SQRT_2;
        assert_abs_diff_eq!(p.m[0][0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.m[0][2], r2 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.m[3][3], 2.0 / 3.0, epsilon = 1e-15);
        let z =
            SiegelPoint::new(RealSym2::new(0.1, 0.2, 0.3), RealSym2::new(2.0, 0.5, 1.0)).unwrap();
        let p = mid_projector(&z, &z).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i % 2 == j % 2 { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(p.m[i][j], want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn hand_values() {
        let a = SiegelPoint::base();
        let b = SiegelPoint::imag_scalar(2.0).unwrap();
        let g = gram_mid(&a, &b).unwrap();
        assert!((g - C2::scalar(C64::new(1.0 / 6.0, 0.0))).frob_norm() < 1e-15);
        let rep = mu_star(&a, &b, 1.0).unwrap();
        assert_abs_diff_eq!(rep.mu_star, 2.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.r1.powi(4) + rep.r2.powi(4), 2.0, epsilon = 1e-14);
        assert!(rep.mu_polar.is_none());
        assert!(matches!(
            mu_star(&a, &a, 1.0),
            Err(Error::DegeneratePoint(_))
        ));
    }

    #[test]
    fn identical_pair_is_extremal() {
        let z =
            SiegelPoint::new(RealSym2::new(0.4, -0.3, 1.1), RealSym2::new(0.7, 0.2, 1.9)).unwrap();
        let rep = mu_star(&z, &z, 0.5).unwrap();
        assert_abs_diff_eq!(rep.mu_star, 1.0, epsilon = 1e-14);
        assert!(rep.range_residual < 1e-14);
        assert_eq!(rep.eq_residual, 0.0);
        assert_abs_diff_eq!(rep.mu_polar.unwrap(), rep.mu_star, epsilon = 1e-13);
    }

    #[test]
    fn default_blocks_at_zero() {
        let rot = psi_blocks(0.0, &DEFAULT_DELTA_G).unwrap();
        let want_cos = DEFAULT_DELTA_G.scale(-1.0 / (2.0 * SQRT_2));
        assert!((rot.cos_block - want_cos).frob_norm() < 1e-15);
        let want_sin = RealSym2::scalar((7.0f64 / 8.0).sqrt());
        assert!((rot.sin_block - want_sin).frob_norm() < 1e-15);
        assert!(rot.symplectic_defect() < 1e-15);
    }

    #[test]
    fn endpoint_degenerates() {
        let hi = 2.0 * SQRT_2 - 1.0;
        let rot = psi_blocks(hi, &DEFAULT_DELTA_G).unwrap();
        assert!(!rot.is_nondegenerate());
        assert!(rot.s.contains(&0.0));
        assert!(matches!(
            psi_blocks(hi + 1e-6, &DEFAULT_DELTA_G),
            Err(Error::OutOfInterval { .. })
        ));
        assert_eq!(
            admissible_interval(&DEFAULT_DELTA_G),
            (1.0 - 2.0 * SQRT_2, hi)
        );
    }

    #[test]
    fn base_point_is_fixed() {
        let rot = psi_blocks(0.7, &DEFAULT_DELTA_G).unwrap();
        let z = psi_apply(&rot, &SiegelPoint::base()).unwrap();
        assert!(z.distance(&SiegelPoint::base()) < 1e-15);
        assert_eq!(psi_ball_apply(&rot, &BallPoint::zero()).matrix(), C2::ZERO);
    }

    #[test]
    fn translation() {
        let z =
            SiegelPoint::new(RealSym2::new(0.4, -0.3, 1.1), RealSym2::new(0.7, 0.2, 1.9)).unwrap();
        assert_eq!(translate_imag(&z, 0.0).unwrap(), z);
        let moved = translate_imag(&z, 0.5).unwrap();
        assert_abs_diff_eq!(moved.min_eig_y(), z.min_eig_y() + 0.5, epsilon = 1e-15);
        assert!(translate_imag(&z, -1.0).is_err());
    }

    #[test]
    fn mainformula_reduces_for_identical_points() {
        let z =
            SiegelPoint::new(RealSym2::new(0.4, -0.3, 1.1), RealSym2::new(0.7, 0.2, 1.9)).unwrap();
        let rot = psi_blocks(-0.4, &DEFAULT_DELTA_G).unwrap();
        let (lhs, rhs) = mainformula_gap(&z, &z, &rot, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(rhs, wp(&z, 1.0).unwrap(), epsilon = 1e-13);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }
}
