//! Complex matrices of sizes 2x2, 4x2 and 4x4; singular values and Schatten norms.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sym2::{Mat2, RealSym2};
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A complex 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct C2 {
    pub m: [[C64; 2]; 2],
}

impl C2 {
    pub const ZERO: C2 = C2 {
        m: [[C64 { re: 0.0, im: 0.0 }; 2]; 2],
    };

    pub const fn new(m: [[C64; 2]; 2]) -> Self {
        C2 { m }
    }

    pub fn identity() -> Self {
        C2::scalar(C64::new(1.0, 0.0))
    }

    pub fn scalar(a: C64) -> Self {
        C2::new([[a, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), a]])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        C2::new([[a, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), b]])
    }

    /// `re + i*im`.
    pub fn from_parts(re: &Mat2, im: &Mat2) -> Self {
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = C64::new(re.m[i][j], im.m[i][j]);
            }
        }
        C2::new(m)
    }

    pub fn from_sym(re: &RealSym2, im: &RealSym2) -> Self {
        C2::from_parts(&re.to_mat2(), &im.to_mat2())
    }

    pub fn from_real(re: &Mat2) -> Self {
        C2::from_parts(re, &Mat2::ZERO)
    }

    pub fn re(&self) -> Mat2 {
        Mat2::new([
            [self.m[0][0].re, self.m[0][1].re],
            [self.m[1][0].re, self.m[1][1].re],
        ])
    }

    pub fn im(&self) -> Mat2 {
        Mat2::new([
            [self.m[0][0].im, self.m[0][1].im],
            [self.m[1][0].im, self.m[1][1].im],
        ])
    }

    pub fn adjoint(&self) -> C2 {
        C2::new([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    pub fn transpose(&self) -> C2 {
        C2::new([[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]])
    }

    pub fn scale(&self, a: C64) -> C2 {
        let mut r = *self;
        r.m.iter_mut().flatten().for_each(|v| *v *= a);
        r
    }

    pub fn scale_re(&self, a: f64) -> C2 {
        self.scale(C64::new(a, 0.0))
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Inverse via the adjugate; `None` when the determinant is zero.
    pub fn inverse(&self) -> Option<C2> {
        self.inverse_tol(0.0)
    }

    /// Inverse via the adjugate; `None` when `|det| <= rel * max|a_ij|^2`.
    pub fn inverse_tol(&self, rel: f64) -> Option<C2> {
        let scale = self.max_abs();
        let det = self.det();
        if scale == 0.0 || !(det.norm() > rel * scale * scale) || det.norm() == 0.0 {
            return None;
        }
        let inv = C2::new([[self.m[1][1], -self.m[0][1]], [-self.m[1][0], self.m[0][0]]]);
        let inv = inv.scale(det.inv());
        inv.is_finite().then_some(inv)
    }

    pub fn frob_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// `|m01 - m10|`.
    pub fn asymmetry(&self) -> f64 {
        (self.m[0][1] - self.m[1][0]).norm()
    }

    pub fn symmetrize(&self) -> C2 {
        let off = (self.m[0][1] + self.m[1][0]) * 0.5;
        C2::new([[self.m[0][0], off], [off, self.m[1][1]]])
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        two_column_singular_values(&self.m)[0]
    }

    pub fn singular_values(&self) -> [f64; 2] {
        two_column_singular_values(&self.m)
    }
}

impl Add for C2 {
    type Output = C2;
    fn add(self, o: C2) -> C2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] += o.m[i][j];
            }
        }
        r
    }
}

impl Sub for C2 {
    type Output = C2;
    fn sub(self, o: C2) -> C2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] -= o.m[i][j];
            }
        }
        r
    }
}

impl Mul for C2 {
    type Output = C2;
    fn mul(self, o: C2) -> C2 {
        let a = &self.m;
        let b = &o.m;
        C2::new([
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

/// Dense complex matrix with `rows, cols` in `{2, 4}`, row major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if !matches!(rows, 2 | 4) || !matches!(cols, 2 | 4) {
            return Err(Error::InvalidParameter(format!(
                "unsupported shape {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(CMat { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        CMat::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_c2(a: &C2) -> Self {
        CMat {
            rows: 2,
            cols: 2,
            data: a.m.iter().flatten().copied().collect(),
        }
    }

    /// The 4x2 block column `[top; bottom]`.
    pub fn stack(top: &C2, bottom: &C2) -> Self {
        let data = top
            .m
            .iter()
            .chain(bottom.m.iter())
            .flatten()
            .copied()
            .collect();
        CMat {
            rows: 4,
            cols: 2,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn adjoint(&self) -> CMat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).conj());
            }
        }
        CMat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn add(&self, other: &CMat) -> Result<CMat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidParameter("shape mismatch in add".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matmul(&self, other: &CMat) -> Result<CMat> {
        if self.cols != other.rows {
            return Err(Error::InvalidParameter("shape mismatch in matmul".into()));
        }
        let mut data = vec![C64::new(0.0, 0.0); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        CMat::new(self.rows, other.cols, data)
    }
}

/// Singular values of a matrix with exactly two columns, descending.
///
/// The larger one comes from the closed-form top eigenvalue of `A*A`; the
/// smaller from `s1*s2 = sqrt(det(A*A))`, where the determinant is summed from
/// 2x2 minors (Cauchy-Binet) so no cancellation occurs.
fn two_column_singular_values(rows: &[[C64; 2]]) -> [f64; 2] {
    let scale = rows.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return [0.0, 0.0];
    }
    let inv = 1.0 / scale;
    let scaled: Vec<[C64; 2]> = rows.iter().map(|r| [r[0] * inv, r[1] * inv]).collect();
    let g00: f64 = scaled.iter().map(|r| r[0].norm_sqr()).sum();
    let g11: f64 = scaled.iter().map(|r| r[1].norm_sqr()).sum();
    let g01: C64 = scaled.iter().map(|r| r[0].conj() * r[1]).sum();
    let top = 0.5 * (g00 + g11) + (0.5 * (g00 - g11)).hypot(g01.norm());
    let mut gram_det = 0.0;
    for i in 0..scaled.len() {
        for j in (i + 1)..scaled.len() {
            gram_det += (scaled[i][0] * scaled[j][1] - scaled[i][1] * scaled[j][0]).norm_sqr();
        }
    }
    let s1 = top.sqrt();
    let s2 = if s1 > 0.0 {
        (gram_det.sqrt() / s1).min(s1)
    } else {
        0.0
    };
    [s1 * scale, s2 * scale]
}

/// Descending eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let total: f64 = a.iter().flatten().map(|v| v * v).sum();
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= 1e-32 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    d.sort_by(|x, y| y.total_cmp(x));
    d
}

/// Singular values in descending order.
///
/// Two-column inputs (2x2, 4x2) and their transposes use the closed form; a 4x4
/// input goes through the eigenvalues of `A*A` embedded as a real 8x8 problem.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    match (a.rows, a.cols) {
        (_, 2) => {
            let rows: Vec<[C64; 2]> = a.data.chunks(2).map(|r| [r[0], r[1]]).collect();
            two_column_singular_values(&rows).to_vec()
        }
        (2, 4) => singular_values(&a.adjoint()),
        _ => {
            // A*A = B + iC is Hermitian; [[B, -C], [C, B]] carries each eigenvalue twice
            let n = a.cols;
            let mut h = vec![vec![C64::new(0.0, 0.0); n]; n];
            for (i, row) in h.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = (0..a.rows).map(|k| a.get(k, i).conj() * a.get(k, j)).sum();
                }
            }
            let mut emb = vec![vec![0.0; 2 * n]; 2 * n];
            for i in 0..n {
                for j in 0..n {
                    emb[i][j] = h[i][j].re;
                    emb[i + n][j + n] = h[i][j].re;
                    emb[i][j + n] = -h[i][j].im;
                    emb[i + n][j] = h[i][j].im;
                }
            }
            let scale = h.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
            let eig = jacobi_eigenvalues(emb);
            eig.iter()
                .step_by(2)
                .map(|&l| {
                    if l < 0.0 && l >= -1e-14 * scale.max(f64::MIN_POSITIVE) {
                        0.0
                    } else {
                        l.max(0.0).sqrt()
                    }
                })
                .collect()
        }
    }
}

fn check_exponent(q: f64) -> Result<()> {
    if q.is_finite() && q >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidNorm(q))
    }
}

/// Schatten norm computed from given singular values (any order).
pub fn schatten_from_sv(sv: &[f64], q: f64) -> Result<f64> {
    check_exponent(q)?;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = sv.iter().map(|s| (s / top).powf(q)).sum();
    Ok(top * sum.powf(1.0 / q))
}

/// Schatten q-norm `(sum s_i^q)^(1/q)`, `q >= 1`.
pub fn schatten(a: &CMat, q: f64) -> Result<f64> {
    schatten_from_sv(&singular_values(a), q)
}

/// `|A|_q^q = sum s_i^q`, without the final root.
pub fn schatten_pow(a: &CMat, q: f64) -> Result<f64> {
    check_exponent(q)?;
    Ok(singular_values(a).iter().map(|s| s.powf(q)).sum())
}

/// `|A|_q^q` for a 2x2 matrix.
pub fn schatten_pow_c2(a: &C2, q: f64) -> Result<f64> {
    check_exponent(q)?;
    Ok(a.singular_values().iter().map(|s| s.powf(q)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn nilpotent_singular_values() {
        let a = CMat::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(singular_values(&a), vec![1.0, 0.0]);
    }

    #[test]
    fn stacked_identity_blocks() {
        let r2 = 2f64.sqrt();
        let a = CMat::stack(&C2::identity(), &C2::scalar(c(r2)));
        let sv = singular_values(&a);
        assert_abs_diff_eq!(sv[0], 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(sv[1], 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        let t = 0.7f64;
        let u = C2::new([
            [C64::new(t.cos(), 0.0), C64::new(0.0, t.sin())],
            [C64::new(0.0, t.sin()), C64::new(t.cos(), 0.0)],
        ]);
        let sv = u.singular_values();
        assert_abs_diff_eq!(sv[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sv[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn schatten_examples() {
        let d = CMat::from_c2(&C2::diag(c(3.0), c(4.0)));
        assert_abs_diff_eq!(schatten(&d, 2.0).unwrap(), 5.0, epsilon = 1e-14);
        let psd = CMat::from_real(2, 2, &[2.0, 1.0, 1.0, 3.0]).unwrap();
        assert_abs_diff_eq!(schatten(&psd, 1.0).unwrap(), 5.0, epsilon = 1e-14);
        let sixth = CMat::from_c2(&C2::scalar(c(1.0 / 6.0)));
        assert_abs_diff_eq!(
            schatten(&sixth, 2.0).unwrap(),
            (1.0f64 / 18.0).sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(schatten(&sixth, 2.0).unwrap(), 0.235702, epsilon = 1e-6);
        assert_eq!(schatten(&sixth, 0.5), Err(Error::InvalidNorm(0.5)));
    }

    #[test]
    fn four_by_four_matches_block_structure() {
        // diag(1, 2) (+) diag(3, 0) arranged in a permuted 4x4
        let mut v = vec![0.0; 16];
        v[1] = 1.0;
        v[4] = 2.0;
        v[2 * 4 + 3] = 3.0;
        let a = CMat::from_real(4, 4, &v).unwrap();
        let sv = singular_values(&a);
        assert_eq!(sv.len(), 4);
        for (got, want) in sv.iter().zip([3.0, 2.0, 1.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(CMat::new(3, 2, vec![C64::new(0.0, 0.0); 6]).is_err());
        assert!(CMat::from_real(2, 2, &[f64::NAN, 0.0, 0.0, 0.0]).is_err());
    }
}
