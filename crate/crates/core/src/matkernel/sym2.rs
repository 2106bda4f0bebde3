//! Real 2x2 matrices: symmetric storage, rotations, closed-form eigensystems.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `a*b - c*d` with one rounding error (Kahan's fused trick).
#[inline]
pub(crate) fn diff_of_products(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = c * d;
    let e = (-c).mul_add(d, w);
    let f = a.mul_add(b, -w);
    f + e
}

/// A real symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
///
/// Only three numbers are stored so symmetry holds exactly by construction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RealSym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl RealSym2 {
    pub const ZERO: RealSym2 = RealSym2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };
    pub const IDENTITY: RealSym2 = RealSym2 {
        xx: 1.0,
        xy: 0.0,
        yy: 1.0,
    };

    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        RealSym2 { xx, xy, yy }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        RealSym2 {
            xx: a,
            xy: 0.0,
            yy: b,
        }
    }

    pub const fn scalar(a: f64) -> Self {
        RealSym2 {
            xx: a,
            xy: 0.0,
            yy: a,
        }
    }

    /// Builds from a full 2x2 array, rejecting off-diagonal mismatch above `tol`.
    pub fn from_rows(rows: [[f64; 2]; 2], tol: f64) -> Result<Self> {
        let mismatch = (rows[0][1] - rows[1][0]).abs();
        if !(mismatch <= tol) {
            return Err(Error::Asymmetry { mismatch });
        }
        Ok(RealSym2::new(
            rows[0][0],
            0.5 * (rows[0][1] + rows[1][0]),
            rows[1][1],
        ))
    }

    /// Symmetric part `(M + M^t)/2` of a general matrix.
    pub fn sym_part(m: &Mat2) -> Self {
        RealSym2::new(m.m[0][0], 0.5 * (m.m[0][1] + m.m[1][0]), m.m[1][1])
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.xx, self.xy], [self.xy, self.yy]]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.xx,
            (1, 1) => self.yy,
            (0, 1) | (1, 0) => self.xy,
            _ => panic!("index ({i},{j}) out of range for 2x2"),
        }
    }

    pub fn to_mat2(&self) -> Mat2 {
        Mat2 { m: self.rows() }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        diff_of_products(self.xx, self.yy, self.xy, self.xy)
    }

    pub fn frob_norm(&self) -> f64 {
        (self.xx * self.xx + 2.0 * self.xy * self.xy + self.yy * self.yy).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite()
    }

    pub fn scale(&self, a: f64) -> Self {
        RealSym2::new(a * self.xx, a * self.xy, a * self.yy)
    }

    /// Plain matrix product; the result is symmetric only when the factors commute.
    pub fn matmul(&self, other: &RealSym2) -> Mat2 {
        self.to_mat2() * other.to_mat2()
    }

    pub fn eig(&self) -> SymEigen2 {
        sym_eig2(self)
    }

    /// Smallest eigenvalue, accurate to relative precision even when tiny.
    pub fn min_eig(&self) -> f64 {
        sym_eig2(self).values[1]
    }

    pub fn max_eig(&self) -> f64 {
        sym_eig2(self).values[0]
    }
}

impl Add for RealSym2 {
    type Output = RealSym2;
    fn add(self, o: RealSym2) -> RealSym2 {
        RealSym2::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl Sub for RealSym2 {
    type Output = RealSym2;
    fn sub(self, o: RealSym2) -> RealSym2 {
        RealSym2::new(self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)
    }
}

impl Neg for RealSym2 {
    type Output = RealSym2;
    fn neg(self) -> RealSym2 {
        RealSym2::new(-self.xx, -self.xy, -self.yy)
    }
}

impl Mul<f64> for RealSym2 {
    type Output = RealSym2;
    fn mul(self, a: f64) -> RealSym2 {
        self.scale(a)
    }
}

/// A general real 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { m: [[0.0; 2]; 2] };
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub const fn new(m: [[f64; 2]; 2]) -> Self {
        Mat2 { m }
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new([[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]])
    }

    pub fn scale(&self, a: f64) -> Mat2 {
        Mat2::new([
            [a * self.m[0][0], a * self.m[0][1]],
            [a * self.m[1][0], a * self.m[1][1]],
        ])
    }

    pub fn det(&self) -> f64 {
        diff_of_products(self.m[0][0], self.m[1][1], self.m[0][1], self.m[1][0])
    }

    pub fn frob_norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `|m01 - m10|`.
    pub fn asymmetry(&self) -> f64 {
        (self.m[0][1] - self.m[1][0]).abs()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] += o.m[i][j];
            }
        }
        r
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] -= o.m[i][j];
            }
        }
        r
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// A proper rotation `[[c, -s], [s, c]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation2 {
    pub c: f64,
    pub s: f64,
}

impl Default for Rotation2 {
    fn default() -> Self {
        Rotation2::IDENTITY
    }
}

impl Rotation2 {
    pub const IDENTITY: Rotation2 = Rotation2 { c: 1.0, s: 0.0 };

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Rotation2 { c, s }
    }

    /// Normalizes `(c, s)` onto the unit circle.
    pub fn from_cos_sin(c: f64, s: f64) -> Self {
        let r = c.hypot(s);
        Rotation2 { c: c / r, s: s / r }
    }

    pub fn angle(&self) -> f64 {
        self.s.atan2(self.c)
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new([[self.c, -self.s], [self.s, self.c]])
    }

    pub fn transpose(&self) -> Rotation2 {
        Rotation2 {
            c: self.c,
            s: -self.s,
        }
    }

    /// Composition `self * other`.
    pub fn compose(&self, other: &Rotation2) -> Rotation2 {
        Rotation2 {
            c: self.c * other.c - self.s * other.s,
            s: self.s * other.c + self.c * other.s,
        }
    }

    pub fn column(&self, j: usize) -> [f64; 2] {
        match j {
            0 => [self.c, self.s],
            1 => [-self.s, self.c],
            _ => panic!("rotation column {j} out of range"),
        }
    }

    /// `V diag(d0, d1) V^t`.
    pub fn conjugate_diag(&self, d0: f64, d1: f64) -> RealSym2 {
        let (c, s) = (self.c, self.s);
        RealSym2::new(
            c * c * d0 + s * s * d1,
            c * s * (d0 - d1),
            s * s * d0 + c * c * d1,
        )
    }

    /// `V^t M V`.
    pub fn congruence_t(&self, m: &RealSym2) -> RealSym2 {
        let v = self.matrix();
        RealSym2::sym_part(&(v.transpose() * m.to_mat2() * v))
    }
}

/// Eigenvalues in descending order with the rotation whose columns are the eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen2 {
    pub values: [f64; 2],
    pub vectors: Rotation2,
}

impl SymEigen2 {
    pub fn reconstruct(&self) -> RealSym2 {
        self.vectors.conjugate_diag(self.values[0], self.values[1])
    }
}

/// Closed-form eigendecomposition of a real symmetric 2x2 matrix.
///
/// Values are descending. The rotation has det +1 and its first column has its
/// largest-magnitude entry positive; equal eigenvalues give the identity.
pub fn sym_eig2(m: &RealSym2) -> SymEigen2 {
    let (a, b, c) = (m.xx, m.xy, m.yy);
    if b == 0.0 {
        return if a >= c {
            SymEigen2 {
                values: [a, c],
                vectors: Rotation2::IDENTITY,
            }
        } else {
            SymEigen2 {
                values: [c, a],
                vectors: Rotation2 { c: 0.0, s: 1.0 },
            }
        };
    }
    let half_diff = 0.5 * (a - c);
    let mean = 0.5 * a + 0.5 * c;
    let r = half_diff.hypot(b);
    let mut d1 = mean + r;
    let mut d2 = mean - r;
    // recover the cancelling eigenvalue from the determinant
    let det = diff_of_products(a, c, b, b);
    if mean >= 0.0 {
        if d1 != 0.0 {
            d2 = det / d1;
        }
    } else if d2 != 0.0 {
        d1 = det / d2;
    }
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (mut s, mut co) = theta.sin_cos();
    if s.abs() > co.abs() && s < 0.0 {
        s = -s;
        co = -co;
    }
    SymEigen2 {
        values: [d1, d2],
        vectors: Rotation2 { c: co, s },
    }
}

/// Applies `f` to the eigenvalues: `V diag(f(d1), f(d2)) V^t`.
///
/// Fails with [`Error::Domain`] when `f` returns a non-finite value.
pub fn apply_spectral<F: Fn(f64) -> f64>(m: &RealSym2, f: F) -> Result<RealSym2> {
    let e = sym_eig2(m);
    let f0 = f(e.values[0]);
    let f1 = f(e.values[1]);
    if !f0.is_finite() {
        return Err(Error::Domain {
            eigenvalue: e.values[0],
        });
    }
    if !f1.is_finite() {
        return Err(Error::Domain {
            eigenvalue: e.values[1],
        });
    }
    Ok(e.vectors.conjugate_diag(f0, f1))
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-tol*|M|, 0)` are treated as zero.
pub fn sqrt_psd(m: &RealSym2, tol: f64) -> Result<RealSym2> {
    let scale = m.frob_norm();
    apply_spectral(m, |x| {
        if x >= 0.0 {
            x.sqrt()
        } else if x >= -tol * scale {
            0.0
        } else {
            f64::NAN
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn swap_matrix_eigensystem() {
        let e = sym_eig2(&RealSym2::new(0.0, 1.0, 0.0));
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.vectors.angle(), FRAC_PI_4, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_is_exact() {
        let e = sym_eig2(&RealSym2::diag(5.0, 2.0));
        assert_eq!(e.values, [5.0, 2.0]);
        assert_eq!(e.vectors, Rotation2::IDENTITY);
        let e = sym_eig2(&RealSym2::diag(2.0, 5.0));
        assert_eq!(e.values, [5.0, 2.0]);
        assert_eq!(e.reconstruct(), RealSym2::diag(2.0, 5.0));
    }

    #[test]
    fn degenerate_returns_identity() {
        let e = sym_eig2(&RealSym2::scalar(3.0));
        assert_eq!(e.vectors, Rotation2::IDENTITY);
        assert_eq!(e.values, [3.0, 3.0]);
    }

    #[test]
    fn first_column_sign_convention() {
        for k in 0..64 {
            let th = -3.0 + 6.0 * k as f64 / 63.0;
            let v = Rotation2::from_angle(th);
            let e = sym_eig2(&v.conjugate_diag(2.0, -1.0));
            let col = e.vectors.column(0);
            let big = if col[0].abs() >= col[1].abs() {
                col[0]
            } else {
                col[1]
            };
            assert!(big > 0.0);
            let det = e.vectors.c * e.vectors.c + e.vectors.s * e.vectors.s;
            assert_abs_diff_eq!(det, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn tiny_eigenvalue_keeps_relative_accuracy() {
        let m = RealSym2::diag(1.0, 1e-20);
        assert_eq!(m.min_eig(), 1e-20);
        let m = RealSym2::new(2.0, 1.0, 0.5 + 1e-12);
        // det = 2e-12 exactly representable up to rounding of the input
        let rel = (m.min_eig() * m.max_eig() - m.det()).abs() / m.det();
        assert!(rel < 1e-10);
    }

    #[test]
    fn spectral_examples() {
        let r = apply_spectral(&RealSym2::diag(4.0, 9.0), f64::sqrt).unwrap();
        assert_eq!(r, RealSym2::diag(2.0, 3.0));
        let err = apply_spectral(&RealSym2::diag(0.0, 1.0), |x| 1.0 / x.sqrt());
        assert!(matches!(err, Err(Error::Domain { .. })));
    }

    #[test]
    fn inverse_sqrt_oracle() {
        let m = RealSym2::new(3.0, 1.2, 2.0);
        let r = apply_spectral(&m, |x| x.powf(-0.5)).unwrap();
        let prod = r.to_mat2() * m.to_mat2() * r.to_mat2();
        assert!((prod - Mat2::IDENTITY).frob_norm() < 1e-12);
    }

    #[test]
    fn from_rows_rejects_mismatch() {
        assert!(RealSym2::from_rows([[1.0, 2.0], [2.0 + 1e-9, 1.0]], 1e-12).is_err());
        assert!(RealSym2::from_rows([[1.0, 2.0], [2.0, 1.0]], 1e-12).is_ok());
    }
}
