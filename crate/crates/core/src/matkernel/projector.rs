//! Orthogonal projectors onto the column span of a real 4x2 matrix.

use serde::{Deserialize, Serialize};

use super::sym2::{Mat2, RealSym2};
use crate::error::{Error, Result};

/// Default relative threshold for the rank test on `M^t M`.
pub const RANK_TOL: f64 = 1e-12;

/// Real 4x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat42 {
    pub m: [[f64; 2]; 4],
}

impl Mat42 {
    pub const fn new(m: [[f64; 2]; 4]) -> Self {
        Mat42 { m }
    }

    /// `[top; bottom]`.
    pub fn stack(top: &Mat2, bottom: &Mat2) -> Self {
        Mat42::new([top.m[0], top.m[1], bottom.m[0], bottom.m[1]])
    }

    pub fn stack_sym(top: &RealSym2, bottom: &RealSym2) -> Self {
        Mat42::stack(&top.to_mat2(), &bottom.to_mat2())
    }

    pub fn column(&self, j: usize) -> [f64; 4] {
        [self.m[0][j], self.m[1][j], self.m[2][j], self.m[3][j]]
    }

    pub fn from_columns(a: [f64; 4], b: [f64; 4]) -> Self {
        Mat42::new([[a[0], b[0]], [a[1], b[1]], [a[2], b[2]], [a[3], b[3]]])
    }

    pub fn top(&self) -> Mat2 {
        Mat2::new([self.m[0], self.m[1]])
    }

    pub fn bottom(&self) -> Mat2 {
        Mat2::new([self.m[2], self.m[3]])
    }

    pub fn frob_norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }
}

/// Real 4x4 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat4 {
    pub m: [[f64; 4]; 4],
}

impl Mat4 {
    pub const ZERO: Mat4 = Mat4 { m: [[0.0; 4]; 4] };

    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        (0..4).for_each(|i| m[i][i] = 1.0);
        Mat4 { m }
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.m[i][i]).sum()
    }

    pub fn mul(&self, o: &Mat4) -> Mat4 {
        let mut r = [[0.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        Mat4 { m: r }
    }

    pub fn mul42(&self, a: &Mat42) -> Mat42 {
        let mut r = [[0.0; 2]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.m[i][k] * a.m[k][j]).sum();
            }
        }
        Mat42 { m: r }
    }

    pub fn sub(&self, o: &Mat4) -> Mat4 {
        let mut r = self.m;
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v -= o.m[i][j];
            }
        }
        Mat4 { m: r }
    }

    pub fn transpose(&self) -> Mat4 {
        let mut r = [[0.0; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[j][i];
            }
        }
        Mat4 { m: r }
    }

    pub fn frob_norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, o: &Mat4) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(o.m.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm4(a: &[f64; 4]) -> f64 {
    let s = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if s == 0.0 {
        return 0.0;
    }
    s * a.iter().map(|v| (v / s) * (v / s)).sum::<f64>().sqrt()
}

/// Extreme eigenvalues of `M^t M`, the smaller one from the determinant.
fn gram_extremes(m: &Mat42) -> (f64, f64) {
    let a = m.column(0);
    let b = m.column(1);
    let g00 = dot4(&a, &a);
    let g11 = dot4(&b, &b);
    let g01 = dot4(&a, &b);
    let half = 0.5 * (g00 - g11);
    let lmax = 0.5 * (g00 + g11) + half.hypot(g01);
    // Cauchy-Binet: det(M^t M) is the sum of squared 2x2 minors
    let mut det = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let minor = m.m[i][0] * m.m[j][1] - m.m[i][1] * m.m[j][0];
            det += minor * minor;
        }
    }
    let lmin = if lmax > 0.0 { det / lmax } else { 0.0 };
    (lmin, lmax)
}

/// Orthonormal basis of the column span, by Gram-Schmidt with one
/// reorthogonalization pass.
pub fn col_basis_with_tol(m: &Mat42, tol: f64) -> Result<Mat42> {
    if !m.is_finite() {
        return Err(Error::NonFinite("projector input"));
    }
    let (lmin, lmax) = gram_extremes(m);
    if !(lmax > 0.0) || lmin <= tol * lmax {
        return Err(Error::RankDeficient {
            min_eig: lmin,
            scale: lmax,
        });
    }
    let a = m.column(0);
    let mut b = m.column(1);
    let na = norm4(&a);
    let q0 = a.map(|v| v / na);
    for _ in 0..2 {
        let d = dot4(&q0, &b);
        for k in 0..4 {
            b[k] -= d * q0[k];
        }
    }
    let nb = norm4(&b);
    if nb == 0.0 {
        return Err(Error::RankDeficient {
            min_eig: lmin,
            scale: lmax,
        });
    }
    let q1 = b.map(|v| v / nb);
    Ok(Mat42::from_columns(q0, q1))
}

pub fn col_basis(m: &Mat42) -> Result<Mat42> {
    col_basis_with_tol(m, RANK_TOL)
}

/// `Q Q^t` for a matrix with orthonormal columns.
pub fn projector_from_basis(q: &Mat42) -> Mat4 {
    let mut p = [[0.0; 4]; 4];
    for (i, row) in p.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = q.m[i][0] * q.m[j][0] + q.m[i][1] * q.m[j][1];
        }
    }
    // exact symmetry
    for i in 0..4 {
        for j in (i + 1)..4 {
            p[j][i] = p[i][j];
        }
    }
    Mat4 { m: p }
}

/// `M (M^t M)^{-1} M^t` with a caller-supplied rank threshold.
pub fn col_projector_with_tol(m: &Mat42, tol: f64) -> Result<Mat4> {
    col_basis_with_tol(m, tol).map(|q| projector_from_basis(&q))
}

/// Orthogonal projector onto the span of the two columns of `m`.
pub fn col_projector(m: &Mat42) -> Result<Mat4> {
    col_projector_with_tol(m, RANK_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coordinate_plane() {
        let m = Mat42::stack(&Mat2::IDENTITY, &Mat2::ZERO);
        let p = col_projector(&m).unwrap();
        let mut want = Mat4::ZERO;
        want.m[0][0] = 1.0;
        want.m[1][1] = 1.0;
        assert!(p.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn scaled_stack() {
        let r2 = 2f64.sqrt();
        let m = Mat42::stack(&Mat2::IDENTITY, &Mat2::IDENTITY.scale(r2));
        let p = col_projector(&m).unwrap();
        let third = 1.0 / 3.0;
        for i in 0..2 {
            assert_abs_diff_eq!(p.m[i][i], third, epsilon = 1e-15);
            assert_abs_diff_eq!(p.m[i + 2][i + 2], 2.0 * third, epsilon = 1e-15);
            assert_abs_diff_eq!(p.m[i][i + 2], r2 * third, epsilon = 1e-15);
            assert_abs_diff_eq!(p.m[i + 2][i], r2 * third, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(p.m[0][1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.trace(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn rank_deficient_rejected() {
        let m = Mat42::new([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0], [3.0, 6.0]]);
        assert!(matches!(
            col_projector(&m),
            Err(Error::RankDeficient { .. })
        ));
        let tiny = Mat42::new([[1.0, 0.0], [0.0, 1e-7], [0.0, 0.0], [0.0, 0.0]]);
        assert!(col_projector(&tiny).is_err());
        assert!(col_projector_with_tol(&tiny, 1e-16).is_ok());
    }
}
