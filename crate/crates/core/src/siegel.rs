//! Points of the Siegel half-space of degree 2 and of its ball model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{schatten_pow_c2, sym_eig2, Mat2, RealSym2, SymEigen2, C2, C64, I};

/// Default lower bound on the smallest eigenvalue of `Y` for interior points.
pub const INTERIOR_TOL: f64 = 1e-12;
/// Eigenvalues of `Y` down to `-PSD_TOL` are accepted (and clamped) for closure points.
pub const PSD_TOL: f64 = 1e-12;
/// Symmetry tolerance applied to JSON input.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack on the operator norm of ball points.
pub const BALL_TOL: f64 = 1e-10;

/// `Z = X + iY` with `X`, `Y` real symmetric and `Y` positive (semi)definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiegelPoint {
    x: RealSym2,
    y: RealSym2,
    interior: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointJson {
    #[serde(rename = "X")]
    x: [[f64; 2]; 2],
    #[serde(rename = "Y")]
    y: [[f64; 2]; 2],
}

impl SiegelPoint {
    /// An interior point, requiring `min eig(Y) > INTERIOR_TOL`.
    pub fn new(x: RealSym2, y: RealSym2) -> Result<Self> {
        SiegelPoint::with_threshold(x, y, INTERIOR_TOL)
    }

    /// An interior point with a caller-chosen threshold on the smallest eigenvalue of `Y`.
    pub fn with_threshold(x: RealSym2, y: RealSym2, threshold: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("point entries"));
        }
        let min_eig = y.min_eig();
        if !(min_eig > threshold) {
            return Err(Error::DegenerateY { min_eig });
        }
        Ok(SiegelPoint {
            x,
            y,
            interior: true,
        })
    }

    /// A point of the closure. Slightly negative eigenvalues of `Y` are clamped to zero.
    pub fn closure(x: RealSym2, y: RealSym2) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("point entries"));
        }
        let e = sym_eig2(&y);
        let scale = e.values[0].abs().max(1.0);
        if e.values[1] < -PSD_TOL * scale {
            return Err(Error::NotPsd {
                min_eig: e.values[1],
            });
        }
        let y = if e.values[1] < 0.0 {
            e.vectors.conjugate_diag(e.values[0].max(0.0), 0.0)
        } else {
            y
        };
        let interior = y.min_eig() > INTERIOR_TOL;
        Ok(SiegelPoint { x, y, interior })
    }

    /// `t i I`.
    pub fn imag_scalar(t: f64) -> Result<Self> {
        SiegelPoint::new(RealSym2::ZERO, RealSym2::scalar(t))
    }

    /// The base point `iI`.
    pub fn base() -> Self {
        SiegelPoint {
            x: RealSym2::ZERO,
            y: RealSym2::IDENTITY,
            interior: true,
        }
    }

    pub fn x(&self) -> RealSym2 {
        self.x
    }

    pub fn y(&self) -> RealSym2 {
        self.y
    }

    pub fn is_interior(&self) -> bool {
        self.interior
    }

    pub fn min_eig_y(&self) -> f64 {
        self.y.min_eig()
    }

    pub fn to_c2(&self) -> C2 {
        C2::from_sym(&self.x, &self.y)
    }

    /// `(Z1 + Z2)/2`, computed entrywise.
    pub fn midpoint(&self, other: &SiegelPoint) -> SiegelPoint {
        let x = (self.x + other.x) * 0.5;
        let y = (self.y + other.y) * 0.5;
        let interior = self.interior && other.interior && y.min_eig() > 0.0;
        SiegelPoint { x, y, interior }
    }

    /// Frobenius distance between the complex matrices.
    pub fn distance(&self, other: &SiegelPoint) -> f64 {
        (self.to_c2() - other.to_c2()).frob_norm()
    }

    /// Parses `{"X": [[..],[..]], "Y": [[..],[..]]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PointJson =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let x = RealSym2::from_rows(raw.x, SYMMETRY_TOL)?;
        let y = RealSym2::from_rows(raw.y, SYMMETRY_TOL)?;
        SiegelPoint::closure(x, y)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PointJson {
            x: self.x.rows(),
            y: self.y.rows(),
        })
        .expect("plain arrays serialize")
    }
}

/// Spectral data of `Y`, computed once per point.
struct YSpectrum(SymEigen2);

impl YSpectrum {
    fn of(z: &SiegelPoint) -> Result<Self> {
        let e = sym_eig2(&z.y);
        if !z.interior || !(e.values[1] > 0.0) {
            return Err(Error::DegenerateY {
                min_eig: e.values[1],
            });
        }
        Ok(YSpectrum(e))
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> RealSym2 {
        self.0
            .vectors
            .conjugate_diag(f(self.0.values[0]), f(self.0.values[1]))
    }

    fn sqrt(&self) -> RealSym2 {
        self.map(f64::sqrt)
    }

    fn inv_sqrt(&self) -> RealSym2 {
        self.map(|d| 1.0 / d.sqrt())
    }

    /// `Y^{1/2} - Y^{-1/2}` without forming `Y - I`.
    fn sqrt_minus_inv_sqrt(&self) -> RealSym2 {
        self.map(|d| (d - 1.0) / d.sqrt())
    }
}

/// `U(Z) = Y^{-1/2}(Z - iI) = Y^{-1/2}X + i(Y^{1/2} - Y^{-1/2})`.
pub fn u_of(z: &SiegelPoint) -> Result<C2> {
    let ys = YSpectrum::of(z)?;
    let re = ys.inv_sqrt().matmul(&z.x);
    let im = ys.sqrt_minus_inv_sqrt().to_mat2();
    Ok(C2::from_parts(&re, &im))
}

/// `w_p(Z, iI) = |U(Z)|_{2(1+p)}^{2(1+p)}`.
pub fn wp(z: &SiegelPoint, p: f64) -> Result<f64> {
    check_p(p)?;
    schatten_pow_c2(&u_of(z)?, 2.0 * (1.0 + p))
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "p must be a positive real, got {p}"
        )))
    }
}

/// A complex symmetric `W` with `|W| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    w: C2,
}

impl BallPoint {
    /// Accepts `W` whose asymmetry is within `tol`; the stored matrix is symmetrized.
    pub fn new(w: C2) -> Result<Self> {
        if !w.is_finite() {
            return Err(Error::NonFinite("ball point"));
        }
        let mismatch = w.asymmetry();
        if mismatch > 1e-12 * w.max_abs().max(1.0) {
            return Err(Error::Asymmetry { mismatch });
        }
        let w = w.symmetrize();
        let norm = w.op_norm();
        if norm > 1.0 + BALL_TOL {
            return Err(Error::OutsideBall { norm });
        }
        Ok(BallPoint { w })
    }

    pub fn zero() -> Self {
        BallPoint { w: C2::ZERO }
    }

    pub fn matrix(&self) -> C2 {
        self.w
    }

    pub fn norm(&self) -> f64 {
        self.w.op_norm()
    }

    pub fn is_interior(&self) -> bool {
        self.norm() < 1.0
    }

    /// Frobenius distance to another ball point.
    pub fn distance(&self, other: &BallPoint) -> f64 {
        (self.w - other.w).frob_norm()
    }

    /// Frobenius distance to the identity.
    pub fn distance_to_identity(&self) -> f64 {
        (self.w - C2::identity()).frob_norm()
    }
}

/// Cayley transform `W = (Z + iI)^{-1}(Z - iI) = I - 2i(Z + iI)^{-1}`.
pub fn to_ball(z: &SiegelPoint) -> Result<BallPoint> {
    let shifted = z.to_c2() + C2::scalar(I);
    let inv = shifted.inverse().ok_or(Error::SingularCayley)?;
    let w = C2::identity() - inv.scale(C64::new(0.0, 2.0));
    let mismatch = w.asymmetry();
    if mismatch > 1e-11 * w.max_abs().max(1.0) {
        return Err(Error::Internal(format!(
            "Cayley image asymmetric by {mismatch:e}"
        )));
    }
    let w = w.symmetrize();
    if !w.is_finite() {
        return Err(Error::NonFinite("Cayley image"));
    }
    Ok(BallPoint { w })
}

/// Relative determinant below which `I - W` counts as singular in the closure variant.
const POLE_TOL: f64 = 1e-14;

fn cayley_inverse(w: &C2, rel: f64) -> Result<(RealSym2, RealSym2)> {
    let inv = (C2::identity() - *w)
        .inverse_tol(rel)
        .ok_or(Error::BoundaryPole)?;
    // Z = i(2(I - W)^{-1} - I)
    let z = (inv.scale_re(2.0) - C2::identity()).scale(I);
    if !z.is_finite() {
        return Err(Error::BoundaryPole);
    }
    Ok((RealSym2::sym_part(&z.re()), RealSym2::sym_part(&z.im())))
}

/// Inverse Cayley transform `Z = i(I + W)(I - W)^{-1}` for points of the open ball.
pub fn to_halfspace(w: &BallPoint) -> Result<SiegelPoint> {
    let norm = w.norm();
    if !(norm < 1.0) {
        return Err(Error::OutsideBall { norm });
    }
    let (x, y) = cayley_inverse(&w.w, 0.0)?;
    SiegelPoint::with_threshold(x, y, 0.0)
}

/// Image of a closed-ball point in the closure of the half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosureImage {
    Finite(SiegelPoint),
    /// `I - W` is singular.
    AtInfinity,
}

/// Closure-aware inverse Cayley transform.
pub fn to_halfspace_closure(w: &BallPoint) -> Result<ClosureImage> {
    match cayley_inverse(&w.w, POLE_TOL) {
        Ok((x, y)) => SiegelPoint::closure(x, y).map(ClosureImage::Finite),
        Err(Error::BoundaryPole) => Ok(ClosureImage::AtInfinity),
        Err(e) => Err(e),
    }
}

/// `R(t, eps) = t/2 + sqrt(t^2/4 + eps^2)`, evaluated without cancellation.
pub fn r_scalar(t: f64, eps: f64) -> f64 {
    let half = 0.5 * t;
    if t >= 0.0 {
        half + half.hypot(eps)
    } else if eps == 0.0 {
        0.0
    } else {
        // conjugate form: eps^2 / (|t|/2 + sqrt(t^2/4 + eps^2))
        let denom = -half + half.hypot(eps);
        eps * (eps / denom)
    }
}

/// `R(T, eps)` applied to the eigenvalues of `T`.
pub fn r_matrix(t: &RealSym2, eps: f64) -> RealSym2 {
    let e = sym_eig2(t);
    e.vectors
        .conjugate_diag(r_scalar(e.values[0], eps), r_scalar(e.values[1], eps))
}

/// `U(Z) = eps^{-1}(S + iT)` with `|S + iT|_{2(1+p)} = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarData {
    pub epsilon: f64,
    pub s: Mat2,
    pub t: RealSym2,
    pub p: f64,
}

impl PolarData {
    pub fn r_t(&self) -> RealSym2 {
        r_matrix(&self.t, self.epsilon)
    }

    /// `S + iT`.
    pub fn unit(&self) -> C2 {
        C2::from_parts(&self.s, &self.t.to_mat2())
    }

    /// `Y^{1/2} = eps^{-1} R(T, eps)`.
    pub fn y_sqrt(&self) -> RealSym2 {
        self.r_t().scale(1.0 / self.epsilon)
    }

    /// `X = eps^{-2} R(T, eps) S`.
    pub fn x(&self) -> Mat2 {
        let r = self.r_t().to_mat2();
        (r * self.s).scale(1.0 / (self.epsilon * self.epsilon))
    }

    /// `R(T, eps) - eps^2 R(T, eps)^{-1}`, which should reproduce `T`.
    pub fn t_from_r(&self) -> RealSym2 {
        let e = sym_eig2(&self.t);
        let eps = self.epsilon;
        let f = |t: f64| {
            let r = r_scalar(t, eps);
            r - eps * eps / r
        };
        e.vectors.conjugate_diag(f(e.values[0]), f(e.values[1]))
    }

    /// `|R(T, eps) S - (R(T, eps) S)^t|`.
    pub fn symmetry_defect(&self) -> f64 {
        (self.r_t().to_mat2() * self.s).asymmetry()
    }
}

/// Polar data of `U(Z)` for the exponent `2(1+p)`.
pub fn polar(z: &SiegelPoint, p: f64) -> Result<PolarData> {
    check_p(p)?;
    let ys = YSpectrum::of(z)?;
    let u = C2::from_parts(
        &ys.inv_sqrt().matmul(&z.x),
        &ys.sqrt_minus_inv_sqrt().to_mat2(),
    );
    let q = 2.0 * (1.0 + p);
    let norm = schatten_pow_c2(&u, q)?.powf(1.0 / q);
    if !(norm > 0.0) {
        return Err(Error::DegeneratePoint("U(Z) = 0 at Z = iI"));
    }
    let epsilon = 1.0 / norm;
    let s = ys.inv_sqrt().matmul(&z.x).scale(epsilon);
    let t = ys.sqrt_minus_inv_sqrt().scale(epsilon);
    Ok(PolarData { epsilon, s, t, p })
}

/// Polar reconstruction residuals against the point they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarResiduals {
    pub y_sqrt: f64,
    pub x: f64,
    pub t: f64,
    pub s: f64,
}

impl PolarResiduals {
    pub fn max(&self) -> f64 {
        self.y_sqrt.max(self.x).max(self.t).max(self.s)
    }
}

/// Checks the four reconstruction identities of the polar data.
pub fn polar_residuals(z: &SiegelPoint, pd: &PolarData) -> Result<PolarResiduals> {
    let ys = YSpectrum::of(z)?;
    let y_sqrt = (pd.y_sqrt() - ys.sqrt()).frob_norm();
    let x = (pd.x() - z.x.to_mat2()).frob_norm();
    let t = (pd.t_from_r() - pd.t).frob_norm();
    let s_direct = ys.inv_sqrt().matmul(&z.x).scale(pd.epsilon);
    let s = (s_direct - pd.s).frob_norm();
    Ok(PolarResiduals { y_sqrt, x, t, s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: &C2, b: &C2, tol: f64) -> bool {
        (*a - *b).frob_norm() < tol
    }

    #[test]
    fn u_examples() {
        let u = u_of(&SiegelPoint::base()).unwrap();
        assert_eq!(u.frob_norm(), 0.0);
        let u = u_of(&SiegelPoint::imag_scalar(2.0).unwrap()).unwrap();
        let want = C2::scalar(C64::new(0.0, 1.0 / 2f64.sqrt()));
        assert!(close(&u, &want, 1e-15));
        let x = RealSym2::new(0.3, -1.2, 2.0);
        let u = u_of(&SiegelPoint::new(x, RealSym2::IDENTITY).unwrap()).unwrap();
        assert!(close(&u, &C2::from_real(&x.to_mat2()), 1e-15));
    }

    #[test]
    fn wp_examples() {
        assert_eq!(wp(&SiegelPoint::base(), 0.7).unwrap(), 0.0);
        assert_abs_diff_eq!(
            wp(&SiegelPoint::imag_scalar(2.0).unwrap(), 1.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let z = SiegelPoint::new(RealSym2::diag(1.0, 0.0), RealSym2::IDENTITY).unwrap();
        assert_abs_diff_eq!(wp(&z, 1.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cayley_examples() {
        assert!(close(
            &to_ball(&SiegelPoint::base()).unwrap().matrix(),
            &C2::ZERO,
            1e-15
        ));
        let w = to_ball(&SiegelPoint::imag_scalar(2.0).unwrap()).unwrap();
        assert!(close(
            &w.matrix(),
            &C2::scalar(C64::new(1.0 / 3.0, 0.0)),
            1e-15
        ));
        let origin = SiegelPoint::closure(RealSym2::ZERO, RealSym2::ZERO).unwrap();
        let w = to_ball(&origin).unwrap();
        assert!(close(&w.matrix(), &C2::scalar(C64::new(-1.0, 0.0)), 1e-15));
        assert!(!origin.is_interior());
    }

    #[test]
    fn inverse_cayley_examples() {
        let z = to_halfspace(&BallPoint::zero()).unwrap();
        assert!(close(&z.to_c2(), &SiegelPoint::base().to_c2(), 1e-15));
        let w = BallPoint::new(C2::scalar(C64::new(1.0 / 3.0, 0.0))).unwrap();
        let z = to_halfspace(&w).unwrap();
        assert!(close(&z.to_c2(), &C2::scalar(C64::new(0.0, 2.0)), 1e-14));
        let id = BallPoint::new(C2::identity()).unwrap();
        assert!(to_halfspace(&id).is_err());
        assert_eq!(to_halfspace_closure(&id).unwrap(), ClosureImage::AtInfinity);
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_scalar(0.0, 0.25), 0.25);
        assert_abs_diff_eq!(r_scalar(3.0, 4.0), 1.5 + 18.25f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(r_scalar(3.0, 4.0), 5.7720019, epsilon = 1e-7);
        assert_eq!(r_scalar(2.5, 0.0), 2.5);
        assert_eq!(r_scalar(-2.5, 0.0), 0.0);
        assert_eq!(r_scalar(0.0, 0.0), 0.0);
        let r = r_matrix(&RealSym2::diag(3.0, -3.0), 4.0);
        assert_abs_diff_eq!(r.xx, 5.7720019, epsilon = 1e-7);
        assert_abs_diff_eq!(r.yy, 2.7720019, epsilon = 1e-7);
        assert_eq!(r_matrix(&RealSym2::ZERO, 0.5), RealSym2::scalar(0.5));
    }

    #[test]
    fn r_negative_branch_is_accurate() {
        // R(t, eps) ~ eps^2/|t| with no cancellation
        let r = r_scalar(-1.0, 1e-10);
        assert_abs_diff_eq!(r / 1e-20, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn polar_examples() {
        let pd = polar(&SiegelPoint::imag_scalar(2.0).unwrap(), 1.0).unwrap();
        assert_abs_diff_eq!(pd.epsilon, 2f64.powf(0.25), epsilon = 1e-15);
        assert!(pd.s.frob_norm() < 1e-15);
        assert_abs_diff_eq!(pd.t.xx, 2f64.powf(-0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(pd.t.yy, 2f64.powf(-0.25), epsilon = 1e-15);

        let x = RealSym2::new(1.0, 0.5, -0.5);
        let pd = polar(&SiegelPoint::new(x, RealSym2::IDENTITY).unwrap(), 2.0).unwrap();
        assert_eq!(pd.t, RealSym2::ZERO);
        assert!((pd.s - x.to_mat2().scale(pd.epsilon)).frob_norm() < 1e-15);

        assert!(matches!(
            polar(&SiegelPoint::base(), 1.0),
            Err(Error::DegeneratePoint(_))
        ));
    }

    #[test]
    fn json_parsing() {
        let z = SiegelPoint::from_json(r#"{"X":[[0,0],[0,0]],"Y":[[1,0],[0,1]]}"#).unwrap();
        assert_eq!(z, SiegelPoint::base());
        let bad = SiegelPoint::from_json(r#"{"X":[[0,1],[0,0]],"Y":[[1,0],[0,1]]}"#);
        assert!(matches!(bad, Err(Error::Asymmetry { .. })));
        let bad = SiegelPoint::from_json(r#"{"X":[[0,0],[0,0]],"Y":[[-0.5,0],[0,1]]}"#);
        assert!(matches!(bad, Err(Error::NotPsd { .. })));
        let bad = SiegelPoint::from_json(r#"{"X":[[0,0],[0,0]]}"#);
        assert!(matches!(bad, Err(Error::Schema(_))));
        let z =
            SiegelPoint::new(RealSym2::new(0.1, 0.2, 0.3), RealSym2::new(2.0, 0.1, 1.0)).unwrap();
        assert_eq!(SiegelPoint::from_json(&z.to_json()).unwrap(), z);
    }
}
