//! Obstructions to fixed points and fixed boundary relations of the rotations.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::contraction::{admissible_interval, psi_ball_apply, psi_blocks, DEFAULT_DELTA_G};
use crate::error::{Error, Result};
use crate::matkernel::C64;
use crate::sampling::{random_ball_boundary, sub_rng};
use crate::siegel::BallPoint;

/// Eigenvalues of `e^{-i Theta}` for the default `Delta_G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaPair {
    pub omega1: C64,
    pub omega2: C64,
}

fn default_interval() -> (f64, f64) {
    admissible_interval(&DEFAULT_DELTA_G)
}

fn check_closed(lambda: f64) -> Result<()> {
    let (lo, hi) = default_interval();
    if lambda.is_finite() && lambda >= lo - 1e-12 && lambda <= hi + 1e-12 {
        Ok(())
    } else {
        Err(Error::OutOfInterval { lambda, lo, hi })
    }
}

fn check_open(lambda: f64) -> Result<()> {
    let (lo, hi) = default_interval();
    if lambda.is_finite() && lambda > lo && lambda < hi {
        Ok(())
    } else {
        Err(Error::OutOfInterval { lambda, lo, hi })
    }
}

/// `x - i sqrt(1 - x^2)` with `x = (lambda - d)/(2 sqrt 2)`.
fn circle_point(lambda: f64, d: f64) -> C64 {
    let x = ((lambda - d) / (2.0 * SQRT_2)).clamp(-1.0, 1.0);
    C64::new(x, -((1.0 - x) * (1.0 + x)).sqrt())
}

pub fn omega(lambda: f64) -> Result<OmegaPair> {
    check_closed(lambda)?;
    Ok(OmegaPair {
        omega1: circle_point(lambda, 1.0),
        omega2: circle_point(lambda, -1.0),
    })
}

/// `Im U_11 = sin^2(theta) Im omega1 + cos^2(theta) Im omega2`.
pub fn im_u11(theta: f64, lambda: f64) -> Result<f64> {
    let w = omega(lambda)?;
    let (s, c) = theta.sin_cos();
    Ok(s * s * w.omega1.im + c * c * w.omega2.im)
}

/// Block spectra `(c1, c2, s1, s2)` paired through the eigenbasis of `Delta_G`.
fn block_spectra(lambda: f64) -> Result<(f64, f64, f64, f64)> {
    check_open(lambda)?;
    let rot = psi_blocks(lambda, &DEFAULT_DELTA_G)?;
    Ok((rot.c[0], rot.c[1], rot.s[0], rot.s[1]))
}

/// Left side of the bottom-right entry equation in the case `z = i inf`, `z'` real.
///
/// `r` does not enter the expression.
pub fn nogo_residual_corner(_r: f64, p: f64, theta: f64, lambda: f64) -> Result<f64> {
    let (c1, c2, s1, s2) = block_spectra(lambda)?;
    let (s, c) = theta.sin_cos();
    let (c2t, s2t) = (c * c, s * s);
    Ok(c2t * s2t * (s1 * s1 + s2 * s2 + (c1 - c2).powi(2))
        + s1 * s2 * (c2t * c2t + s2t * s2t)
        + s1 * s2 * p * p)
}

/// Left side of the bottom-right entry equation in the case of two real corners.
pub fn nogo_residual_real(r: f64, p: f64, theta: f64, lambda: f64) -> Result<f64> {
    let (_, _, s1, s2) = block_spectra(lambda)?;
    let (s, c) = theta.sin_cos();
    Ok(s1 * (s * s + (r * c + p * s).powi(2)) + s2 * (c * c + (r * s - p * c).powi(2)))
}

/// `min(s1, s2)(1 + r^2 + p^2)`, a lower bound for [`nogo_residual_real`].
pub fn nogo_real_lower_bound(r: f64, p: f64, lambda: f64) -> Result<f64> {
    let (_, _, s1, s2) = block_spectra(lambda)?;
    Ok(s1.min(s2) * (1.0 + r * r + p * p))
}

/// Minimum displacement found at one grid value of `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub min_residual: f64,
    pub argmin: [[[f64; 2]; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub seed: u64,
    pub sample_count: usize,
    pub points: Vec<ScanPoint>,
    /// Grid values at which a sin eigenvalue vanishes; not scanned.
    pub excluded: Vec<f64>,
    pub global_min: f64,
    pub global_argmin_lambda: f64,
    /// Displacement of `W = 0`.
    pub origin_residual: f64,
}

fn split(w: &BallPoint) -> [[[f64; 2]; 2]; 2] {
    let m = w.matrix();
    [m.re().m, m.im().m]
}

/// Minimum of `|Psi(W) - W|_F` over seeded boundary points `|W| = 1`.
pub fn boundary_fixed_scan(lambda_grid: &[f64], sample_count: usize, seed: u64) -> ScanReport {
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    let mut origin_residual: f64 = 0.0;
    for (k, &lambda) in lambda_grid.iter().enumerate() {
        let rot = match psi_blocks(lambda, &DEFAULT_DELTA_G) {
            Ok(rot) if rot.is_nondegenerate() && rot.s.iter().all(|&s| s > 1e-9) => rot,
            _ => {
                excluded.push(lambda);
                continue;
            }
        };
        let zero = BallPoint::zero();
        origin_residual = origin_residual.max(psi_ball_apply(&rot, &zero).distance(&zero));
        let mut rng = sub_rng(seed, k as u64);
        let mut best = f64::INFINITY;
        let mut argmin = [[[0.0; 2]; 2]; 2];
        for _ in 0..sample_count {
            let w = random_ball_boundary(&mut rng);
            let d = psi_ball_apply(&rot, &w).distance(&w);
            if d < best {
                best = d;
                argmin = split(&w);
            }
        }
        points.push(ScanPoint {
            lambda,
            min_residual: best,
            argmin,
        });
    }
    let (global_min, global_argmin_lambda) =
        points.iter().map(|p| (p.min_residual, p.lambda)).fold(
            (f64::INFINITY, f64::NAN),
            |acc, x| if x.0 < acc.0 { x } else { acc },
        );
    ScanReport {
        seed,
        sample_count,
        points,
        excluded,
        global_min,
        global_argmin_lambda,
        origin_residual,
    }
}

/// `n` evenly spaced values strictly inside the admissible interval, `margin` from each end.
pub fn interior_lambda_grid(n: usize, margin: f64) -> Vec<f64> {
    let (lo, hi) = default_interval();
    let (a, b) = (lo + margin, hi - margin);
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn omega_at_zero() {
        let w = omega(0.0).unwrap();
        let im = -(7.0f64 / 8.0).sqrt();
        assert_abs_diff_eq!(w.omega1.re, -1.0 / (2.0 * SQRT_2), epsilon = 1e-15);
        assert_abs_diff_eq!(w.omega1.im, im, epsilon = 1e-15);
        assert_abs_diff_eq!(w.omega2.re, 1.0 / (2.0 * SQRT_2), epsilon = 1e-15);
        assert_abs_diff_eq!(w.omega2.im, im, epsilon = 1e-15);
    }

    #[test]
    fn omega_endpoint() {
        let w = omega(2.0 * SQRT_2 - 1.0).unwrap();
        assert_abs_diff_eq!(w.omega2.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.omega2.im, 0.0, epsilon = 1e-7);
        assert!(omega(3.0).is_err());
    }

    #[test]
    fn im_u11_examples() {
        for th in [0.0, 0.4, 1.3] {
            assert_abs_diff_eq!(im_u11(th, 0.0).unwrap(), -0.935414, epsilon = 1e-6);
        }
        assert_eq!(im_u11(0.0, 0.9).unwrap(), omega(0.9).unwrap().omega2.im);
    }

    #[test]
    fn corner_residual_examples() {
        let (_, _, s1, s2) = block_spectra(0.3).unwrap();
        let v = nogo_residual_corner(5.0, 0.7, 0.0, 0.3).unwrap();
        assert_abs_diff_eq!(v, s1 * s2 * (1.0 + 0.49), epsilon = 1e-15);
        let (c1, c2, s1, s2) = block_spectra(0.0).unwrap();
        let v = nogo_residual_corner(-2.0, 0.0, std::f64::consts::FRAC_PI_4, 0.0).unwrap();
        let want = 0.25 * (s1 * s1 + s2 * s2 + (c1 - c2).powi(2)) + 0.5 * s1 * s2;
        assert_abs_diff_eq!(v, want, epsilon = 1e-15);
    }

    #[test]
    fn real_residual_examples() {
        let (_, _, s1, s2) = block_spectra(-0.8).unwrap();
        let v = nogo_residual_real(1.5, -0.5, 0.0, -0.8).unwrap();
        assert_abs_diff_eq!(v, s1 * 2.25 + s2 * 1.25, epsilon = 1e-14);
        assert!(nogo_residual_real(1.0, 1.0, 0.1, 2.0 * SQRT_2 - 1.0).is_err());
    }

    #[test]
    fn scan_origin_is_fixed() {
        let rep = boundary_fixed_scan(&[0.0], 100, 42);
        assert_eq!(rep.origin_residual, 0.0);
        assert!(rep.global_min > 1e-3);
    }
}
