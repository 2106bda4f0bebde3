//! Parametrized boundary-going sequences and the per-case constructions.
//!
//! A point is built from `(eps, S, T)` in the eigenbasis `V` of `T` as
//! `X = V eps^{-2} R(T) S V^t` and `Y = V eps^{-2} R(T)^2 V^t`, each entry a
//! power law in the index `n`.

use rand::Rng;
use serde::Serialize;

use super::taxonomy::{expected_verdict, CaseId, Sign, SignPattern};
use crate::error::{Error, Result};
use crate::matkernel::{RealSym2, Rotation2, C64};
use crate::sampling::{random_rotation, sub_rng};
use crate::siegel::{r_scalar, SiegelPoint};

/// `limit + coef * n^{-rate}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    pub limit: f64,
    pub coef: f64,
    pub rate: f64,
}

impl Schedule {
    pub const fn constant(limit: f64) -> Self {
        Schedule {
            limit,
            coef: 0.0,
            rate: 0.0,
        }
    }

    pub const fn decay(coef: f64, rate: f64) -> Self {
        Schedule {
            limit: 0.0,
            coef,
            rate,
        }
    }

    pub fn value(&self, n: u64) -> f64 {
        if self.coef == 0.0 {
            self.limit
        } else {
            self.limit + self.coef * (n as f64).powf(-self.rate)
        }
    }
}

/// `S` in the eigenbasis of `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SRep {
    /// `[[s11, R(t2) s12 / R(t1)], [s12, s22]]`, which keeps `R(T) S` symmetric.
    Coupled {
        s11: Schedule,
        s12: Schedule,
        s22: Schedule,
    },
    /// All four entries; `R(T) S` must come out symmetric.
    Raw { s: [[Schedule; 2]; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointSpec {
    pub rotation: Rotation2,
    /// Eigenvalues of `T`, first column of `V` first.
    pub t: [Schedule; 2],
    pub s: SRep,
    pub eps: Schedule,
}

impl PointSpec {
    /// Axis-aligned point with coupled `S`.
    pub fn aligned(t: [Schedule; 2], s: [Schedule; 3], eps: Schedule) -> Self {
        PointSpec {
            rotation: Rotation2::IDENTITY,
            t,
            s: SRep::Coupled {
                s11: s[0],
                s12: s[1],
                s22: s[2],
            },
            eps,
        }
    }

    pub fn rotated(mut self, v: Rotation2) -> Self {
        self.rotation = v;
        self
    }

    /// The `n`-th point.
    pub fn build(&self, n: u64) -> Result<SiegelPoint> {
        let eps = self.eps.value(n);
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eps({n}) = {eps} is not positive"
            )));
        }
        let t = [self.t[0].value(n), self.t[1].value(n)];
        let r = [r_scalar(t[0], eps), r_scalar(t[1], eps)];
        // R/eps stays O(1) for vanishing t, so form the ratios before squaring
        let q = [r[0] / eps, r[1] / eps];
        let x_eig = match self.s {
            SRep::Coupled { s11, s12, s22 } => {
                let off = q[1] * s12.value(n) / eps;
                RealSym2::new(q[0] * s11.value(n) / eps, off, q[1] * s22.value(n) / eps)
            }
            SRep::Raw { s } => {
                let v = |i: usize, j: usize| q[i] * s[i][j].value(n) / eps;
                let (upper, lower) = (v(0, 1), v(1, 0));
                let scale = v(0, 0)
                    .abs()
                    .max(v(1, 1).abs())
                    .max(upper.abs())
                    .max(lower.abs());
                let mismatch = (upper - lower).abs();
                if mismatch > 1e-12 * scale {
                    return Err(Error::AsymmetricX { mismatch });
                }
                RealSym2::new(v(0, 0), 0.5 * (upper + lower), v(1, 1))
            }
        };
        let y_eig = RealSym2::diag(q[0] * q[0], q[1] * q[1]);
        let back = self.rotation.transpose();
        let (x, y) = if self.rotation == Rotation2::IDENTITY {
            (x_eig, y_eig)
        } else {
            (back.congruence_t(&x_eig), back.congruence_t(&y_eig))
        };
        SiegelPoint::with_threshold(x, y, 0.0)
    }
}

/// Limit data of a corner-form witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CornerTarget {
    pub z1: C64,
    pub z2: C64,
    pub r: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceSpec {
    pub case: CaseId,
    pub label: String,
    pub z1: PointSpec,
    pub z2: PointSpec,
    pub corner: Option<CornerTarget>,
}

impl SequenceSpec {
    pub fn build(&self, n: u64) -> Result<(SiegelPoint, SiegelPoint)> {
        Ok((self.z1.build(n)?, self.z2.build(n)?))
    }
}

/// `n = 2^k` for `k = 1..=20`.
pub fn default_schedule() -> Vec<u64> {
    (1..=20).map(|k| 1u64 << k).collect()
}

const fn c(v: f64) -> Schedule {
    Schedule::constant(v)
}

fn witness(case: CaseId, label: &str, z1: PointSpec, z2: PointSpec) -> SequenceSpec {
    SequenceSpec {
        case,
        label: label.to_string(),
        z1,
        z2,
        corner: None,
    }
}

/// A sequence pair realizing `case`, or `InfeasibleCase` for an impossible one.
pub fn witness_spec(case: CaseId) -> Result<SequenceSpec> {
    use SignPattern::*;
    if expected_verdict(case).is_impossible() {
        return Err(Error::InfeasibleCase(case.label()));
    }
    let inv_n = Schedule::decay(1.0, 1.0);
    let spec = match (case.first(), case.second()) {
        (PlusPlus, PlusPlus) => {
            let v = Rotation2::from_angle(0.5);
            let s = [c(0.3), c(-0.2), c(0.4)];
            let z1 = PointSpec::aligned([c(1.0), c(0.5)], s, inv_n).rotated(v);
            let t2 = [
                Schedule {
                    limit: 1.0,
                    coef: 1.0,
                    rate: 1.0,
                },
                c(0.5),
            ];
            let z2 = PointSpec::aligned(t2, s, inv_n).rotated(v);
            witness(case, "converging pair", z1, z2)
        }
        (PlusZero, PlusZero) => {
            let z = PointSpec::aligned([c(1.0), c(0.0)], [c(0.5), c(0.3), c(0.0)], inv_n);
            witness(case, "identical pair", z, z)
        }
        (PlusZero, ZeroZero) => {
            // limits S1 = [[s11, 0], [s21, 0]], S2 = [[0, 0], [sigma, 0]] with
            // |S1 + iT1| = |S2 + iT2| and R(t2)/R(tau2) -> s21/sigma
            let (s11, t1, s21) = (0.3f64, 0.8, 0.4);
            let sigma = (s11 * s11 + t1 * t1 + s21 * s21).sqrt();
            let kappa = s21 / sigma;
            let eps = Schedule::decay(1.0, 2.0);
            let z1 = PointSpec::aligned([c(t1), c(0.0)], [c(s11), c(s21), c(0.0)], eps);
            let tau = [
                Schedule::decay(1.0, 1.0),
                Schedule::decay(1.0 / kappa - kappa, 2.0),
            ];
            let z2 = PointSpec::aligned(tau, [c(0.0), c(sigma), c(0.0)], eps);
            witness(case, "aligned pair", z1, z2)
        }
        (PlusMinus, PlusMinus) => {
            let z = PointSpec::aligned([c(1.0), c(-1.0)], [c(0.2), c(0.3), c(0.4)], inv_n);
            witness(case, "identical pair", z, z)
        }
        (ZeroZero, ZeroZero) => {
            let v = Rotation2::from_angle(0.3);
            let z1 =
                PointSpec::aligned([c(0.0), c(0.0)], [c(1.0), c(0.0), c(0.0)], inv_n).rotated(v);
            witness(case, "identical pair", z1, z1)
        }
        (ZeroMinus, ZeroMinus) => {
            // t1 = tau eps with s11 = 0 puts z = i R(tau, 1)^2 in the free corner
            let (r, p) = (0.5, 0.3);
            let corner = |tau: f64| {
                PointSpec::aligned(
                    [Schedule::decay(tau, 1.0), c(-1.0)],
                    [c(0.0), c(r), c(p)],
                    inv_n,
                )
            };
            let rho = |tau: f64| r_scalar(tau, 1.0);
            let mut spec = witness(case, "shared corner", corner(1.0), corner(2.0));
            spec.corner = Some(CornerTarget {
                z1: C64::new(0.0, rho(1.0).powi(2)),
                z2: C64::new(0.0, rho(2.0).powi(2)),
                r,
                p,
            });
            spec
        }
        (MinusMinus, MinusMinus) => {
            let v = Rotation2::from_angle(-0.4);
            let s = [c(0.3), c(0.2), c(-0.4)];
            let z1 = PointSpec::aligned([c(-0.5), c(-1.0)], s, inv_n).rotated(v);
            let t2 = [
                Schedule {
                    limit: -0.5,
                    coef: -1.0,
                    rate: 1.0,
                },
                c(-1.0),
            ];
            let z2 = PointSpec::aligned(t2, s, inv_n).rotated(v);
            witness(case, "converging pair", z1, z2)
        }
        // Remaining feasible entries: diagonal pairs with |s + it| matched slot by slot.
        (PlusZero, PlusMinus) => {
            matched_modulus(case, [1.0, 0.0], [0.0, 0.5], [1.0, -0.5], [0.0, 0.0])
        }
        (PlusMinus, ZeroZero) => {
            matched_modulus(case, [1.0, -0.5], [0.0, 0.0], [0.0, 0.0], [1.0, 0.5])
        }
        (PlusMinus, ZeroMinus) => {
            matched_modulus(case, [1.0, -0.5], [0.0, 0.3], [0.0, -0.5], [1.0, 0.3])
        }
        (PlusMinus, MinusMinus) => {
            matched_modulus(case, [1.0, -0.5], [0.0, 0.0], [-1.0, -0.5], [0.0, 0.0])
        }
        _ => unreachable!("every feasible case has a construction"),
    };
    Ok(spec)
}

/// Axis-aligned pair with diagonal `S`; zero limits of `T` decay like `1/n`.
fn matched_modulus(
    case: CaseId,
    t1: [f64; 2],
    s1: [f64; 2],
    t2: [f64; 2],
    s2: [f64; 2],
) -> SequenceSpec {
    let sched = |t: f64| {
        if t == 0.0 {
            Schedule::decay(1.0, 1.0)
        } else {
            c(t)
        }
    };
    let eps = Schedule::decay(1.0, 1.0);
    let z1 = PointSpec::aligned(
        [sched(t1[0]), sched(t1[1])],
        [c(s1[0]), c(0.0), c(s1[1])],
        eps,
    );
    let z2 = PointSpec::aligned(
        [sched(t2[0]), sched(t2[1])],
        [c(s2[0]), c(0.0), c(s2[1])],
        eps,
    );
    witness(case, "matched-modulus diagonal pair", z1, z2)
}

fn random_eigen_schedule(rng: &mut impl Rng, sign: Sign) -> Schedule {
    let coef = rng.gen_range(-0.5..=0.5);
    match sign {
        Sign::Plus => Schedule {
            limit: rng.gen_range(0.5..=2.0),
            coef,
            rate: 1.0,
        },
        Sign::Minus => Schedule {
            limit: rng.gen_range(-2.0..=-0.5),
            coef,
            rate: 1.0,
        },
        Sign::Zero => {
            let mag = rng.gen_range(0.5..=1.5);
            let coef = if rng.gen_bool(0.5) { mag } else { -mag };
            Schedule::decay(coef, rng.gen_range(1.0..=2.0))
        }
    }
}

fn random_point_spec(rng: &mut impl Rng, pattern: SignPattern, eps: Schedule) -> PointSpec {
    let [a, b] = pattern.signs();
    let t = [random_eigen_schedule(rng, a), random_eigen_schedule(rng, b)];
    let s: [Schedule; 3] = std::array::from_fn(|_| c(rng.gen_range(-1.0..=1.0)));
    PointSpec::aligned(t, s, eps).rotated(random_rotation(rng))
}

/// A seeded random sequence pair with the sign patterns of an impossible case.
///
/// The shared `eps = e0 n^{-1/3}` keeps the conditioning of `Y` within reach of
/// double precision at `n = 2^20` for rotated eigenbases.
pub fn falsifier_sample(case: CaseId, seed: u64) -> Result<SequenceSpec> {
    if !expected_verdict(case).is_impossible() {
        return Err(Error::NotImpossibleCase(case.label()));
    }
    Ok(random_pair_spec(case, seed))
}

/// A seeded random sequence pair with the sign patterns of any case.
pub fn random_pair_spec(case: CaseId, seed: u64) -> SequenceSpec {
    let mut rng = sub_rng(seed, case_stream(case));
    let eps = Schedule::decay(rng.gen_range(0.5..=2.0), 1.0 / 3.0);
    let z1 = random_point_spec(&mut rng, case.first(), eps);
    let z2 = random_point_spec(&mut rng, case.second(), eps);
    SequenceSpec {
        case,
        label: format!("random pair seed {seed}"),
        z1,
        z2,
        corner: None,
    }
}

fn case_stream(case: CaseId) -> u64 {
    let idx = |p: SignPattern| SignPattern::ALL.iter().position(|q| *q == p).unwrap() as u64;
    1000 + 6 * idx(case.first()) + idx(case.second())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        let s = Schedule {
            limit: 1.0,
            coef: 2.0,
            rate: 1.0,
        };
        assert_eq!(s.value(4), 1.5);
        assert_eq!(Schedule::constant(3.0).value(1 << 20), 3.0);
    }

    #[test]
    fn impossible_cases_have_no_witness() {
        for case in CaseId::all() {
            let impossible = expected_verdict(case).is_impossible();
            assert_eq!(witness_spec(case).is_err(), impossible, "{case}");
            assert_eq!(falsifier_sample(case, 1).is_err(), !impossible, "{case}");
        }
    }

    #[test]
    fn coupled_x_is_symmetric_and_y_positive() {
        for case in CaseId::all() {
            let Ok(spec) = witness_spec(case) else {
                continue;
            };
            for n in [2, 64, 1 << 20] {
                let (z1, z2) = spec.build(n).unwrap();
                assert!(z1.min_eig_y() > 0.0 && z2.min_eig_y() > 0.0, "{case} n={n}");
            }
        }
    }

    #[test]
    fn raw_s_must_be_compatible() {
        let bad = PointSpec {
            rotation: Rotation2::IDENTITY,
            t: [c(1.0), c(-1.0)],
            s: SRep::Raw {
                s: [[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
            },
            eps: c(0.5),
        };
        assert!(matches!(bad.build(1), Err(Error::AsymmetricX { .. })));
    }

    #[test]
    fn falsifiers_are_reproducible() {
        let case: CaseId = "++,--".parse().unwrap();
        assert_eq!(
            falsifier_sample(case, 9).unwrap(),
            falsifier_sample(case, 9).unwrap()
        );
        assert_ne!(
            falsifier_sample(case, 9).unwrap(),
            falsifier_sample(case, 10).unwrap()
        );
    }
}
