//! Seeded property suites, one per module.
//!
//! Every check records the worst value seen over its samples together with the
//! limit it is held to. Output is a pure function of the seed and sample count.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::boundary::{
    default_schedule, expected_verdict, falsifier_sample, run_case, witness_spec, CaseId,
    CaseReport, Verdict,
};
use crate::contraction::{
    admissible_interval, gram_mid, mainformula_gap, mu_star, psi_apply, psi_ball_apply, psi_blocks,
    translate_imag, DEFAULT_DELTA_G,
};
use crate::error::Result;
use crate::fixedset::{
    boundary_fixed_scan, im_u11, interior_lambda_grid, nogo_real_lower_bound, nogo_residual_corner,
    nogo_residual_real,
};
use crate::matkernel::{
    col_projector, schatten, singular_values, sqrt_psd, sym_eig2, CMat, Mat42, RealSym2, C64,
};
use crate::sampling::{
    random_ball_boundary, random_ball_interior, random_p, random_point, random_point_conditioned,
    sub_rng,
};
use crate::siegel::{
    polar, polar_residuals, r_scalar, to_ball, to_halfspace, to_halfspace_closure, u_of, wp,
    BallPoint, ClosureImage, SiegelPoint,
};

/// The exponents used for the contraction bound.
pub const P_SET: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    /// Worst value is the maximum and must be below the limit.
    Below,
    /// Worst value is the minimum and must be above the limit.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub bound: Bound,
    pub worst: f64,
    pub limit: f64,
    pub samples: usize,
    /// Evaluations that returned an error; any error fails the check.
    pub errors: usize,
    /// Diagnostics are reported but never fail a suite.
    pub diagnostic: bool,
    pub detail: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        let ok = match self.bound {
            Bound::Below => self.worst < self.limit,
            Bound::Above => self.worst > self.limit,
        };
        ok && self.errors == 0
    }
}

/// Running extreme of a sampled quantity.
#[derive(Debug, Clone)]
pub struct Acc {
    name: String,
    bound: Bound,
    limit: f64,
    worst: f64,
    samples: usize,
    errors: usize,
}

impl Acc {
    pub fn below(name: impl Into<String>, limit: f64) -> Self {
        Acc {
            name: name.into(),
            bound: Bound::Below,
            limit,
            worst: f64::NEG_INFINITY,
            samples: 0,
            errors: 0,
        }
    }

    pub fn above(name: impl Into<String>, limit: f64) -> Self {
        Acc {
            bound: Bound::Above,
            worst: f64::INFINITY,
            ..Acc::below(name, limit)
        }
    }

    pub fn push(&mut self, v: f64) {
        self.samples += 1;
        if v.is_nan() {
            self.errors += 1;
            return;
        }
        self.worst = match self.bound {
            Bound::Below => self.worst.max(v),
            Bound::Above => self.worst.min(v),
        };
    }

    pub fn push_result(&mut self, v: Result<f64>) {
        match v {
            Ok(v) => self.push(v),
            Err(_) => {
                self.samples += 1;
                self.errors += 1;
            }
        }
    }

    pub fn finish(self) -> Check {
        Check {
            name: self.name,
            bound: self.bound,
            worst: self.worst,
            limit: self.limit,
            samples: self.samples,
            errors: self.errors,
            diagnostic: false,
            detail: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| !c.diagnostic)
            .all(Check::passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    /// One line per check, one per suite, and a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verify seed={} samples={}", self.seed, self.samples);
        for suite in &self.suites {
            for c in &suite.checks {
                let status = match (c.diagnostic, c.passed()) {
                    (true, _) => "DIAG",
                    (false, true) => "PASS",
                    (false, false) => "FAIL",
                };
                let rel = match c.bound {
                    Bound::Below => "<",
                    Bound::Above => ">",
                };
                let _ = write!(
                    out,
                    "  {status} {}::{} worst={:.16e} {rel} {:e} samples={} errors={}",
                    suite.name, c.name, c.worst, c.limit, c.samples, c.errors
                );
                if let Some(d) = &c.detail {
                    let _ = write!(out, " ({d})");
                }
                out.push('\n');
            }
            let status = if suite.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} suite {}", suite.name);
        }
        let passed = self.suites.iter().filter(|s| s.passed()).count();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} verify {passed}/{} suites", self.suites.len());
        out
    }
}

pub fn run_all(seed: u64, samples: usize) -> VerifyReport {
    VerifyReport {
        seed,
        samples,
        suites: vec![
            matkernel_suite(seed, samples),
            siegel_suite(seed, samples),
            contraction_suite(seed, samples),
            boundary_suite(seed, samples),
            fixedset_suite(seed, samples),
        ],
    }
}

fn random_sym(rng: &mut impl Rng, scale: f64) -> RealSym2 {
    RealSym2::new(
        rng.gen_range(-scale..=scale),
        rng.gen_range(-scale..=scale),
        rng.gen_range(-scale..=scale),
    )
}

fn random_cmat(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    let data = (0..rows * cols)
        .map(|_| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    CMat::new(rows, cols, data).expect("finite entries of a supported shape")
}

fn pad_to_square(a: &CMat) -> CMat {
    let mut data = vec![C64::new(0.0, 0.0); 16];
    for i in 0..4 {
        for j in 0..a.cols() {
            data[4 * i + j] = a.get(i, j);
        }
    }
    CMat::new(4, 4, data).expect("4x4 is supported")
}

// ---------------------------------------------------------------- matkernel

pub fn matkernel_suite(seed: u64, samples: usize) -> SuiteReport {
    let mut rng = sub_rng(seed, 10);
    let mut eig = Acc::below("sym_eig2 reconstruction", 1e-12);
    let mut sqrt = Acc::below("sqrt_psd squares back", 1e-12);
    let mut frob = Acc::below("schatten q=2 equals Frobenius", 1e-12);
    let mut tri = Acc::below("schatten triangle inequality", 1e-12);
    let mut sv = Acc::below("two-column singular values against 4x4 Jacobi", 1e-10);
    let mut proj = Acc::below("projector idempotent, symmetric, fixes range", 1e-12);
    for _ in 0..samples {
        let m = random_sym(&mut rng, 2.0);
        let e = sym_eig2(&m);
        eig.push((e.reconstruct() - m).frob_norm() / m.frob_norm().max(1.0));

        let b = random_sym(&mut rng, 1.0);
        let pd = RealSym2::sym_part(&b.matmul(&b)) + RealSym2::scalar(0.01);
        sqrt.push_result(
            sqrt_psd(&pd, 0.0)
                .map(|r| (RealSym2::sym_part(&r.matmul(&r)) - pd).frob_norm() / pd.frob_norm()),
        );

        let a = random_cmat(&mut rng, 4, 2);
        let c = random_cmat(&mut rng, 4, 2);
        frob.push_result(schatten(&a, 2.0).map(|s| (s - a.frob_norm()).abs() / a.frob_norm()));
        for q in [1.0, 1.5, 2.0, 4.0, 10.0] {
            let sum = a.add(&c).expect("same shape");
            let v = (|| Ok(schatten(&sum, q)? - schatten(&a, q)? - schatten(&c, q)?))();
            tri.push_result(v);
        }
        let s2 = singular_values(&a);
        let s4 = singular_values(&pad_to_square(&a));
        sv.push((s2[0] - s4[0]).abs().max((s2[1] - s4[1]).abs()));

        let cols: [[f64; 4]; 2] =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)));
        let m42 = Mat42::from_columns(cols[0], cols[1]);
        proj.push_result(col_projector(&m42).map(|p| {
            let idem = p.mul(&p).max_abs_diff(&p);
            let sym = p.transpose().max_abs_diff(&p);
            let fix = p.mul42(&m42);
            let mut range = 0.0f64;
            for i in 0..4 {
                for j in 0..2 {
                    range = range.max((fix.m[i][j] - m42.m[i][j]).abs());
                }
            }
            idem.max(sym).max(range / m42.frob_norm())
        }));
    }
    SuiteReport {
        name: "matkernel",
        checks: vec![
            eig.finish(),
            sqrt.finish(),
            frob.finish(),
            tri.finish(),
            sv.finish(),
            proj.finish(),
        ],
    }
}

// ---------------------------------------------------------------- siegel

pub fn cayley_roundtrip(seed: u64, samples: usize) -> Check {
    let mut rng = sub_rng(seed, 20);
    let mut acc = Acc::below("Cayley roundtrip", 1e-11);
    for _ in 0..samples {
        let z = random_point(&mut rng);
        acc.push_result(
            to_ball(&z)
                .and_then(|w| to_halfspace(&w))
                .map(|back| back.distance(&z)),
        );
    }
    acc.finish()
}

/// Classification of a ball point as interior, read from each model.
fn classify_both(w: &BallPoint) -> (bool, bool) {
    let ball = w.norm() < 1.0 - BALL_CLASSIFY_TOL;
    // the inverse Cayley map loses accuracy like |Z|^2 near a pole
    let half = matches!(to_halfspace_closure(w), Ok(ClosureImage::Finite(z))
        if z.min_eig_y() > BALL_CLASSIFY_TOL * z.to_c2().frob_norm().powi(2).max(1.0));
    (ball, half)
}

/// Rounding leaves exact boundary samples within a few ulps of norm 1.
const BALL_CLASSIFY_TOL: f64 = 1e-12;

/// Counts samples where the two models disagree on interiority, or where a sample
/// lands on the wrong side for its construction.
pub fn interior_classification(seed: u64, samples: usize) -> Check {
    let mut rng = sub_rng(seed, 21);
    let mut acc = Acc::below("interior iff operator norm below one", 0.5);
    let mut score = |w: Result<BallPoint>, interior: bool| match w {
        Ok(w) => {
            let (ball, half) = classify_both(&w);
            acc.push(if ball == half && ball == interior {
                0.0
            } else {
                1.0
            });
        }
        Err(e) => acc.push_result(Err(e)),
    };
    for _ in 0..samples {
        score(to_ball(&random_point(&mut rng)), true);
        score(Ok(random_ball_interior(&mut rng)), true);
        score(Ok(random_ball_boundary(&mut rng)), false);
    }
    let mut c = acc.finish();
    c.detail = Some("worst is 1 on any disagreement".into());
    c
}

pub fn polar_identities(seed: u64, samples: usize) -> Check {
    let mut rng = sub_rng(seed, 22);
    let mut acc = Acc::below("polar reconstruction identities", 1e-10);
    for _ in 0..samples {
        let z = random_point(&mut rng);
        let p = random_p(&mut rng);
        acc.push_result(
            polar(&z, p)
                .and_then(|pd| polar_residuals(&z, &pd))
                .map(|r| r.max()),
        );
    }
    acc.finish()
}

pub fn r_identities(seed: u64, samples: usize) -> Vec<Check> {
    let mut rng = sub_rng(seed, 23);
    let mut prod = Acc::below("R(t,eps) R(-t,eps) = eps^2", 1e-12);
    let mut recip = Acc::below("1/R = eps^-2 (R - t)", 1e-12);
    for _ in 0..samples {
        let t = rng.gen_range(-3.0..=3.0);
        let eps = rng.gen_range(0.1..=2.0);
        let (r, rm) = (r_scalar(t, eps), r_scalar(-t, eps));
        prod.push((r * rm - eps * eps).abs());
        recip.push((1.0 / r - (r - t) / (eps * eps)).abs());
    }
    vec![prod.finish(), recip.finish()]
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Fitted convergence exponents of `R` along `eps = 2^-k`, `k = 3..=15`.
pub fn r_asymptotics() -> Vec<Check> {
    let eps: Vec<f64> = (3..=15).map(|k| 2f64.powi(-k)).collect();
    let mut pos = Acc::above("R(t,eps) - t exponent for t > 0", 1.99);
    let mut neg = Acc::above("R(t,eps) - eps^2/|t| exponent for t < 0", 3.9);
    for t0 in [0.5, 1.0, 2.0] {
        let d: Vec<f64> = eps.iter().map(|&e| (r_scalar(t0, e) - t0).abs()).collect();
        pos.push(loglog_slope(&eps, &d));
        let d: Vec<f64> = eps
            .iter()
            .map(|&e| (r_scalar(-t0, e) - e * e / t0).abs())
            .collect();
        neg.push(loglog_slope(&eps, &d));
    }
    let mut zero = Acc::below("R(t,eps) at t = eps = 2^-20", 1e-5);
    let e = 2f64.powi(-20);
    zero.push(r_scalar(e, e));
    let mut ratio = Acc::below("R(-1, 1/n)/R(1/n, 1/n) at n = 10^4", 1e-3);
    let inv = 1e-4;
    ratio.push(r_scalar(-1.0, inv) / r_scalar(inv, inv));
    vec![pos.finish(), neg.finish(), zero.finish(), ratio.finish()]
}

pub fn siegel_suite(seed: u64, samples: usize) -> SuiteReport {
    let mut checks = vec![
        cayley_roundtrip(seed, samples),
        interior_classification(seed, samples),
        polar_identities(seed, samples),
    ];
    checks.extend(r_identities(seed, samples));
    checks.extend(r_asymptotics());
    let mut rng = sub_rng(seed, 24);
    let mut json = Acc::below("JSON roundtrip is exact", 0.5);
    for _ in 0..samples {
        let z = random_point(&mut rng);
        json.push(match SiegelPoint::from_json(&z.to_json()) {
            Ok(back) if back == z => 0.0,
            _ => 1.0,
        });
    }
    checks.push(json.finish());
    SuiteReport {
        name: "siegel",
        checks,
    }
}

// ---------------------------------------------------------------- contraction

pub fn contraction_bound(seed: u64, samples: usize) -> Check {
    let mut rng = sub_rng(seed, 30);
    let mut acc = Acc::below("mu* <= 1 over p in {0.25, 0.5, 1, 2, 5}", 1.0 + 1e-12);
    for _ in 0..samples {
        let (z1, z2) = (random_point(&mut rng), random_point(&mut rng));
        for p in P_SET {
            acc.push_result(mu_star(&z1, &z2, p).map(|r| r.mu_star));
        }
    }
    acc.finish()
}

pub fn self_pairs(seed: u64, samples: usize) -> Vec<Check> {
    let mut rng = sub_rng(seed, 31);
    let mut one = Acc::below("|mu*(Z,Z) - 1|", 1e-12);
    let mut shadow = Acc::below("range and eq residuals when mu* = 1", 1e-4);
    for _ in 0..samples {
        let z = random_point(&mut rng);
        let p = random_p(&mut rng);
        match mu_star(&z, &z, p) {
            Ok(r) => {
                one.push((r.mu_star - 1.0).abs());
                shadow.push(r.range_residual.max(r.eq_residual));
            }
            Err(e) => {
                one.push_result(Err(e.clone()));
                shadow.push_result(Err(e));
            }
        }
    }
    vec![one.finish(), shadow.finish()]
}

/// Pairs with `Y` spectra in `[0.1, 10]` and separation at least 0.1.
pub fn separation(seed: u64, samples: usize) -> Check {
    let mut rng = sub_rng(seed, 32);
    let mut acc = Acc::below("mu* for separated pairs", 1.0 - 1e-8);
    let mut taken = 0;
    while taken < samples {
        let z1 = random_point_conditioned(&mut rng, 0.1, 10.0);
        let z2 = random_point_conditioned(&mut rng, 0.1, 10.0);
        if z1.distance(&z2) < 0.1 {
            continue;
        }
        taken += 1;
        let p = random_p(&mut rng);
        acc.push_result(mu_star(&z1, &z2, p).map(|r| r.mu_star));
    }
    acc.finish()
}

pub fn hand_value() -> Check {
    let mut acc = Acc::below("|mu*(iI, 2iI, 1) - 2/9|", 1e-12);
    let two = SiegelPoint::imag_scalar(2.0).expect("2iI is interior");
    acc.push_result(
        mu_star(&SiegelPoint::base(), &two, 1.0).map(|r| (r.mu_star - 2.0 / 9.0).abs()),
    );
    acc.finish()
}

pub fn gram_identity(seed: u64, samples: usize) -> Vec<Check> {
    let mut rng = sub_rng(seed, 33);
    let mut gram = Acc::below("gram_mid equals U_a^* U_a", 1e-11);
    let mut polar_view = Acc::below("mu* from polar data agrees", 1e-10);
    for _ in 0..samples {
        let (z1, z2) = (random_point(&mut rng), random_point(&mut rng));
        let za = z1.midpoint(&z2);
        gram.push_result((|| {
            let g = gram_mid(&z1, &z2)?;
            let u = u_of(&za)?;
            Ok((g - u.adjoint() * u).frob_norm())
        })());
        let p = random_p(&mut rng);
        polar_view.push_result(mu_star(&z1, &z2, p).map(|r| {
            r.mu_polar
                .map_or(f64::NAN, |m| (m - r.mu_star).abs() / r.mu_star.max(1e-300))
        }));
    }
    vec![gram.finish(), polar_view.finish()]
}

/// `n` evenly spaced values over the closed admissible interval.
pub fn closed_lambda_grid(n: usize) -> Vec<f64> {
    let (lo, hi) = admissible_interval(&DEFAULT_DELTA_G);
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

pub fn rotation_checks(seed: u64, points_per_lambda: usize) -> Vec<Check> {
    let mut rng = sub_rng(seed, 34);
    let mut symp = Acc::below("Psi^t J Psi = J", 1e-12);
    let mut blocks = Acc::below("cos/sin commute and cos^2 + sin^2 = I", 1e-12);
    let mut fixes = Acc::below("Psi(iI) = iI", 1e-12);
    let mut equiv = Acc::below("ball and half-space actions agree", 1e-10);
    let mut norm = Acc::below("ball action preserves operator norm", 1e-12);
    for lambda in closed_lambda_grid(50) {
        let rot = match psi_blocks(lambda, &DEFAULT_DELTA_G) {
            Ok(r) => r,
            Err(e) => {
                symp.push_result(Err(e));
                continue;
            }
        };
        symp.push(rot.symplectic_defect());
        blocks.push(rot.commutator().max(rot.pythagoras_defect()));
        let base = SiegelPoint::base();
        fixes.push_result(psi_apply(&rot, &base).map(|z| z.distance(&base)));
        for _ in 0..points_per_lambda {
            let z = random_point(&mut rng);
            equiv.push_result((|| {
                let lhs = to_ball(&psi_apply(&rot, &z)?)?;
                let rhs = psi_ball_apply(&rot, &to_ball(&z)?);
                Ok(lhs.distance(&rhs))
            })());
            let w = random_ball_interior(&mut rng);
            norm.push((psi_ball_apply(&rot, &w).norm() - w.norm()).abs());
        }
    }
    vec![
        symp.finish(),
        blocks.finish(),
        fixes.finish(),
        equiv.finish(),
        norm.finish(),
    ]
}

fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

/// `(pair, lambda, p)` triples drawn from the open admissible interval.
fn mainformula_samples(
    seed: u64,
    samples: usize,
    stream: u64,
) -> Vec<(SiegelPoint, SiegelPoint, f64, f64)> {
    let mut rng = sub_rng(seed, stream);
    let (lo, hi) = admissible_interval(&DEFAULT_DELTA_G);
    (0..samples)
        .map(|_| {
            let z1 = random_point(&mut rng);
            let z2 = random_point(&mut rng);
            (z1, z2, rng.gen_range(lo..hi), random_p(&mut rng))
        })
        .collect()
}

pub fn mainformula_equality(seed: u64, samples: usize) -> Check {
    let mut acc = Acc::below(
        "midpoint formula equality at t = 0 (relative to max(1, rhs))",
        1e-9,
    );
    for (z1, z2, lambda, p) in mainformula_samples(seed, samples, 35) {
        acc.push_result(
            psi_blocks(lambda, &DEFAULT_DELTA_G)
                .and_then(|rot| mainformula_gap(&z1, &z2, &rot, p, 0.0))
                .map(|(l, r)| relative_gap(l, r)),
        );
    }
    acc.finish()
}

/// `(lhs - rhs)/max(1, rhs)` for `t` in `{0.1, 1}`.
pub fn mainformula_translation(seed: u64, samples: usize) -> Check {
    let mut acc = Acc::below("midpoint formula inequality for t in {0.1, 1}", 1e-10);
    let mut violations = 0usize;
    for (z1, z2, lambda, p) in mainformula_samples(seed, samples, 36) {
        for t in [0.1, 1.0] {
            let v = psi_blocks(lambda, &DEFAULT_DELTA_G)
                .and_then(|rot| mainformula_gap(&z1, &z2, &rot, p, t))
                .map(|(l, r)| (l - r) / r.abs().max(1.0));
            if matches!(v, Ok(x) if x >= 1e-10) {
                violations += 1;
            }
            acc.push_result(v);
        }
    }
    let mut c = acc.finish();
    c.detail = Some(format!(
        "{violations} of {} evaluations exceed the limit",
        c.samples
    ));
    c
}

/// Share of samples where `w_p(Z + itI) > w_p(Z)`; reported only.
pub fn translation_monotonicity(seed: u64, samples: usize) -> Check {
    let mut rng = sub_rng(seed, 37);
    let mut acc = Acc::below("w_p(Z + itI) - w_p(Z), t in {0.1, 1} (relative)", 1e-12);
    let mut increases = 0usize;
    for _ in 0..samples {
        let z = random_point(&mut rng);
        let p = random_p(&mut rng);
        for t in [0.1, 1.0] {
            let v = (|| {
                let before = wp(&z, p)?;
                let after = wp(&translate_imag(&z, t)?, p)?;
                Ok((after - before) / before.max(1.0))
            })();
            if matches!(v, Ok(x) if x > 0.0) {
                increases += 1;
            }
            acc.push_result(v);
        }
    }
    let mut c = acc.finish();
    c.diagnostic = true;
    c.detail = Some(format!(
        "w_p increased in {increases} of {} evaluations",
        c.samples
    ));
    c
}

pub fn contraction_suite(seed: u64, samples: usize) -> SuiteReport {
    let mut checks = vec![contraction_bound(seed, samples)];
    checks.extend(self_pairs(seed, samples));
    checks.push(separation(seed, samples));
    checks.push(hand_value());
    checks.extend(gram_identity(seed, samples));
    checks.extend(rotation_checks(seed, (samples / 50).max(1)));
    checks.push(mainformula_equality(seed, samples));
    checks.push(mainformula_translation(seed, samples));
    checks.push(translation_monotonicity(seed, samples));
    SuiteReport {
        name: "contraction",
        checks,
    }
}

// ---------------------------------------------------------------- boundary

/// Witness run for every feasible case.
pub fn witness_reports() -> Vec<CaseReport> {
    CaseId::all()
        .into_iter()
        .filter_map(|case| witness_spec(case).ok())
        .map(|spec| run_case(&spec, &default_schedule(), 1.0).expect("valid schedule and p"))
        .collect()
}

pub fn taxonomy_counts() -> Check {
    let all = CaseId::all();
    let impossible = all
        .iter()
        .filter(|c| expected_verdict(**c).is_impossible())
        .count();
    let mut acc = Acc::below("table has 21 cases, 10 impossible", 0.5);
    acc.push(if all.len() == 21 && impossible == 10 {
        0.0
    } else {
        1.0
    });
    acc.finish()
}

/// Final `mu*` and verdict of each witness run.
pub fn witness_checks(reports: &[CaseReport]) -> Vec<Check> {
    let mut out = Vec::new();
    for r in reports {
        let mut acc = Acc::above(format!("witness {} final mu*", r.case), 1.0 - 1e-6);
        acc.push(r.final_mu_star.unwrap_or(f64::NAN));
        let mut c = acc.finish();
        let verdict_ok = r.matches_expected;
        if !verdict_ok {
            // a verdict mismatch fails the check even when mu* is close to 1
            c.errors += 1;
        }
        c.detail = Some(format!(
            "verdict {:?}, expected {:?}",
            r.verdict, r.expected
        ));
        out.push(c);
    }
    out
}

/// Limit relations on witnesses whose final `mu*` is within `1e-6` of 1.
pub fn relation_checks(reports: &[CaseReport]) -> Vec<Check> {
    let mut rel = Acc::below("ta, sa, botha at the last index", 1e-3);
    let mut eps = Acc::below("eps ratios at the last index", 1e-3);
    let mut tf = Acc::below("two-term T_a expression at every index", 1e-10);
    for r in reports
        .iter()
        .filter(|r| r.final_mu_star.is_some_and(|m| m > 1.0 - 1e-6))
    {
        match r.relations {
            Some(l) => {
                rel.push(l.ta.max(l.sa).max(l.botha));
                eps.push(l.eps_ratio_a1.max(l.eps_ratio_12));
            }
            None => {
                rel.push(f64::NAN);
                eps.push(f64::NAN);
            }
        }
        for row in &r.trace {
            tf.push(row.tformula_residual.unwrap_or(f64::NAN));
        }
    }
    vec![rel.finish(), eps.finish(), tf.finish()]
}

/// Largest final `mu*` over `count` falsifier specs for each impossible case.
pub fn falsifier_checks(seed: u64, count: usize) -> Vec<Check> {
    let mut out = Vec::new();
    for case in CaseId::all()
        .into_iter()
        .filter(|c| expected_verdict(*c).is_impossible())
    {
        let mut acc = Acc::below(format!("falsifiers {case} max final mu*"), 0.999);
        let mut not_impossible = 0usize;
        for k in 0..count {
            let spec =
                falsifier_sample(case, seed.wrapping_add(k as u64)).expect("impossible case");
            match run_case(&spec, &default_schedule(), 1.0) {
                Ok(r) => {
                    if r.verdict != Verdict::Impossible {
                        not_impossible += 1;
                    }
                    acc.push(r.final_mu_star.unwrap_or(f64::NAN));
                }
                Err(e) => acc.push_result(Err(e)),
            }
        }
        let mut c = acc.finish();
        c.detail = Some(format!(
            "{not_impossible} runs without an Impossible verdict"
        ));
        out.push(c);
    }
    out
}

pub fn boundary_suite(seed: u64, samples: usize) -> SuiteReport {
    let reports = witness_reports();
    let mut checks = vec![taxonomy_counts()];
    checks.extend(witness_checks(&reports));
    checks.extend(relation_checks(&reports));
    checks.extend(falsifier_checks(seed, (samples / 25).max(1)));
    SuiteReport {
        name: "boundary",
        checks,
    }
}

// ---------------------------------------------------------------- fixedset

pub fn im_u11_grid(n: usize) -> Check {
    let mut acc = Acc::below("Im U_11 on the interior grid", -1e-6);
    for lambda in interior_lambda_grid(n, 1e-3) {
        for k in 0..n {
            let theta = std::f64::consts::PI * k as f64 / n as f64;
            acc.push_result(im_u11(theta, lambda));
        }
    }
    acc.finish()
}

pub fn nogo_checks(seed: u64, count: usize) -> Vec<Check> {
    let mut rng = sub_rng(seed, 50);
    let (lo, hi) = admissible_interval(&DEFAULT_DELTA_G);
    let mut corner = Acc::above("corner residual", 0.0);
    let mut real = Acc::above("real residual", 0.0);
    let mut lower = Acc::below("real residual minus lower bound, negative part", 1e-12);
    for _ in 0..count {
        let r = rng.gen_range(-5.0..=5.0);
        let p = rng.gen_range(-5.0..=5.0);
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        let lambda = rng.gen_range(lo..hi);
        corner.push_result(nogo_residual_corner(r, p, theta, lambda));
        real.push_result(nogo_residual_real(r, p, theta, lambda));
        lower.push_result((|| {
            let v = nogo_residual_real(r, p, theta, lambda)?;
            let b = nogo_real_lower_bound(r, p, lambda)?;
            Ok((b - v).max(0.0))
        })());
    }
    vec![corner.finish(), real.finish(), lower.finish()]
}

pub fn scan_checks(seed: u64, samples: usize) -> Vec<Check> {
    let rep = boundary_fixed_scan(&interior_lambda_grid(20, 1e-3), samples, seed);
    let mut min = Acc::above("boundary scan minimum displacement", 0.0);
    min.push(rep.global_min);
    let mut origin = Acc::below("displacement of W = 0", f64::MIN_POSITIVE);
    origin.push(rep.origin_residual);
    vec![min.finish(), origin.finish()]
}

pub fn fixedset_suite(seed: u64, samples: usize) -> SuiteReport {
    let mut checks = vec![im_u11_grid(200)];
    checks.extend(nogo_checks(seed, samples * 20));
    checks.extend(scan_checks(seed, samples));
    SuiteReport {
        name: "fixedset",
        checks,
    }
}
