//! Seeded random points for property checks and scans.
//!
//! All draws go through `ChaCha8Rng::seed_from_u64`, which is specified
//! independently of platform and word size.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matkernel::{RealSym2, Rotation2, C2, C64};
use crate::siegel::{BallPoint, SiegelPoint};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for a named sub-task.
pub fn sub_rng(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `X = (A + A^t)/2` with `A_ij ~ U[-2, 2]`.
pub fn random_x(rng: &mut impl Rng) -> RealSym2 {
    let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..=2.0));
    RealSym2::new(a[0], 0.5 * (a[1] + a[2]), a[3])
}

/// `Y = B B^t + 0.01 I` with `B_ij ~ U[-1, 1]`.
pub fn random_y(rng: &mut impl Rng) -> RealSym2 {
    let b: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
    RealSym2::new(
        b[0] * b[0] + b[1] * b[1] + 0.01,
        b[0] * b[2] + b[1] * b[3],
        b[2] * b[2] + b[3] * b[3] + 0.01,
    )
}

pub fn random_point(rng: &mut impl Rng) -> SiegelPoint {
    let x = random_x(rng);
    let y = random_y(rng);
    SiegelPoint::new(x, y).expect("B B^t + 0.01 I is positive definite")
}

/// A point whose `Y` has both eigenvalues in `[lo, hi]`.
pub fn random_point_conditioned(rng: &mut impl Rng, lo: f64, hi: f64) -> SiegelPoint {
    let x = random_x(rng);
    let v = random_rotation(rng);
    let y = v.conjugate_diag(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
    SiegelPoint::new(x, y).expect("eigenvalues bounded below")
}

pub fn random_rotation(rng: &mut impl Rng) -> Rotation2 {
    Rotation2::from_angle(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

pub fn random_p(rng: &mut impl Rng) -> f64 {
    rng.gen_range(0.25..=5.0)
}

fn unit_phase(rng: &mut impl Rng) -> C64 {
    C64::from_polar(
        1.0,
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

/// A point of the closed disk, uniform in area.
fn disk_point(rng: &mut impl Rng) -> C64 {
    let r = rng.gen_range(0.0f64..=1.0).sqrt();
    C64::from_polar(
        r,
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

/// Interior ball point `V diag(a, b) V^t` with `|a|, |b| < 0.95`.
pub fn random_ball_interior(rng: &mut impl Rng) -> BallPoint {
    let v = random_rotation(rng);
    let a = disk_point(rng) * 0.95;
    let b = disk_point(rng) * 0.95;
    BallPoint::new(conjugate_complex_diag(&v, a, b)).expect("norm below one")
}

/// Boundary ball point `V diag(e^{i phi}, w) V^t` with `|w| <= 1`.
pub fn random_ball_boundary(rng: &mut impl Rng) -> BallPoint {
    let v = random_rotation(rng);
    let a = unit_phase(rng);
    let b = disk_point(rng);
    BallPoint::new(conjugate_complex_diag(&v, a, b)).expect("norm equal to one")
}

/// `V diag(a, b) V^t` for a real rotation `V`.
pub fn conjugate_complex_diag(v: &Rotation2, a: C64, b: C64) -> C2 {
    let (c, s) = (v.c, v.s);
    let off = (a - b) * (c * s);
    C2::new([
        [a * (c * c) + b * (s * s), off],
        [off, a * (s * s) + b * (c * c)],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_streams() {
        let a: Vec<f64> = (0..5).map(|_| rng(42).gen()).collect();
        let b: Vec<f64> = (0..5).map(|_| rng(42).gen()).collect();
        assert_eq!(a, b);
        let mut r1 = sub_rng(42, 1);
        let mut r2 = sub_rng(42, 2);
        assert_ne!(r1.gen::<u64>(), r2.gen::<u64>());
    }

    #[test]
    fn sampled_points_are_interior() {
        let mut r = rng(7);
        for _ in 0..200 {
            let z = random_point(&mut r);
            assert!(z.min_eig_y() >= 0.01 - 1e-15);
        }
    }

    #[test]
    fn boundary_samples_have_unit_norm() {
        let mut r = rng(3);
        for _ in 0..100 {
            let w = random_ball_boundary(&mut r);
            assert!((w.norm() - 1.0).abs() < 1e-12);
        }
    }
}
