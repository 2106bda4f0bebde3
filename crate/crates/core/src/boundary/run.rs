//! Runs a sequence pair along a schedule and classifies its limits.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use super::matcher::{
    corner_match, extract_diag_rotation, match_form, rotate_into, FormMatch, FormTemplate,
};
use super::sequence::{default_schedule, falsifier_sample, witness_spec, SequenceSpec};
use super::taxonomy::{expected_verdict, CaseId, ExpectedVerdict, Form};
use crate::contraction::mu_star_with_tol;
use crate::error::{Error, Result};
use crate::matkernel::{apply_spectral, sym_eig2, RealSym2, Rotation2, C2};
use crate::siegel::{polar, r_matrix, to_ball, PolarData, SiegelPoint};

/// Cauchy gap below which a tracked quantity counts as converged.
pub const CAUCHY_TOL: f64 = 1e-4;
/// Tolerance of the form tests at the last index.
pub const FORM_TOL: f64 = 1e-3;
/// Limiting `mu*` below this is read as a contraction bounded away from 1.
pub const IMPOSSIBLE_MARGIN: f64 = 0.999;
/// Rank threshold for the midpoint projector; boundary sequences are very ill-conditioned.
pub const BOUNDARY_RANK_TOL: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: u64,
    pub mu_star: Option<f64>,
    /// `|W - I|_F` for the three ball points.
    pub w1_dist: Option<f64>,
    pub w2_dist: Option<f64>,
    pub wa_dist: Option<f64>,
    /// `|T_a - T_formula|_F` with `T_a` from the polar data of the midpoint.
    pub tformula_residual: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Convergence {
    pub mu_gap: f64,
    pub w1_gap: f64,
    pub w2_gap: f64,
    pub wa_gap: f64,
    pub mu_converged: bool,
    pub converged: bool,
}

/// Limit relations evaluated at the last index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRelations {
    /// `|T_a^2 - (T1^2 + T2^2)/2|_F`.
    pub ta: f64,
    /// `|S_a^t S_a - (S1^t S1 + S2^t S2)/2|_F`.
    pub sa: f64,
    /// Same with `S + iT` and adjoints.
    pub botha: f64,
    pub eps_ratio_a1: f64,
    pub eps_ratio_12: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Identity,
    Diag,
    Corner,
    Impossible,
    Inconclusive,
}

impl From<Form> for Verdict {
    fn from(f: Form) -> Self {
        match f {
            Form::Identity => Verdict::Identity,
            Form::Diag => Verdict::Diag,
            Form::Corner => Verdict::Corner,
        }
    }
}

/// Points at the last index, both models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LastPoints {
    pub n: u64,
    pub z1: C2,
    pub z2: C2,
    pub za: C2,
    pub w1: C2,
    pub w2: C2,
    pub wa: C2,
}

/// One form tested on all three limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormCheck {
    pub form: Form,
    pub matched: bool,
    pub points: Vec<FormMatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: CaseId,
    pub label: String,
    pub expected: ExpectedVerdict,
    pub p: f64,
    pub trace: Vec<TraceRow>,
    pub final_mu_star: Option<f64>,
    /// Upper bound on the limit of `mu*` from the geometric decay of the last gaps.
    pub mu_limit_bound: Option<f64>,
    pub last: Option<LastPoints>,
    pub convergence: Option<Convergence>,
    pub relations: Option<LimitRelations>,
    /// Largest `|Y_k|_F` at the last index, for the real-limit entry.
    pub max_y_norm: Option<f64>,
    pub forms: Vec<FormCheck>,
    pub verdict: Verdict,
    pub matches_expected: bool,
}

struct Sample {
    z1: SiegelPoint,
    z2: SiegelPoint,
    za: SiegelPoint,
    w: [C2; 3],
    mu: f64,
}

fn sample(spec: &SequenceSpec, n: u64, p: f64) -> Result<Sample> {
    let (z1, z2) = spec.build(n)?;
    let za = z1.midpoint(&z2);
    let mu = mu_star_with_tol(&z1, &z2, p, BOUNDARY_RANK_TOL)?.mu_star;
    let w = [
        to_ball(&z1)?.matrix(),
        to_ball(&z2)?.matrix(),
        to_ball(&za)?.matrix(),
    ];
    Ok(Sample { z1, z2, za, w, mu })
}

fn r_squared(pd: &PolarData) -> RealSym2 {
    let r = r_matrix(&pd.t, pd.epsilon);
    RealSym2::sym_part(&r.matmul(&r))
}

/// `T_a` from the midpoint polar data against its two-term expression in the endpoint data.
pub fn tformula_residual(z1: &SiegelPoint, z2: &SiegelPoint, p: f64) -> Result<f64> {
    let za = z1.midpoint(z2);
    let (p1, p2, pa) = (polar(z1, p)?, polar(z2, p)?, polar(&za, p)?);
    let k1 = (pa.epsilon / p1.epsilon).powi(2);
    let k2 = (pa.epsilon / p2.epsilon).powi(2);
    let a = r_squared(&p1).scale(k1) + r_squared(&p2).scale(k2);
    let root = apply_spectral(&a, f64::sqrt)?;
    let inv_root = apply_spectral(&a, |x| 1.0 / x.sqrt())?;
    let t = root.scale(1.0 / SQRT_2) - inv_root.scale(pa.epsilon * pa.epsilon * SQRT_2);
    let res = (t - pa.t).frob_norm();
    if res.is_finite() {
        Ok(res)
    } else {
        Err(Error::NonFinite("two-term T_a expression"))
    }
}

fn sym_sq(m: &RealSym2) -> RealSym2 {
    RealSym2::sym_part(&m.matmul(m))
}

pub fn limit_relations(z1: &SiegelPoint, z2: &SiegelPoint, p: f64) -> Result<LimitRelations> {
    let za = z1.midpoint(z2);
    let (p1, p2, pa) = (polar(z1, p)?, polar(z2, p)?, polar(&za, p)?);
    let ta = (sym_sq(&pa.t) - (sym_sq(&p1.t) + sym_sq(&p2.t)).scale(0.5)).frob_norm();
    let sts = |pd: &PolarData| pd.s.transpose() * pd.s;
    let sa_mat = sts(&pa) - (sts(&p1) + sts(&p2)).scale(0.5);
    let gram = |pd: &PolarData| {
        let u = pd.unit();
        u.adjoint() * u
    };
    let both = gram(&pa) - (gram(&p1) + gram(&p2)).scale_re(0.5);
    Ok(LimitRelations {
        ta,
        sa: sa_mat.frob_norm(),
        botha: both.frob_norm(),
        eps_ratio_a1: (pa.epsilon / p1.epsilon - 1.0).abs(),
        eps_ratio_12: (p1.epsilon / p2.epsilon - 1.0).abs(),
    })
}

fn identity_check(w: &[C2; 3], tol: f64) -> FormCheck {
    let d = |a: &C2, b: &C2| (*a - *b).frob_norm();
    let pairs = [d(&w[0], &w[1]), d(&w[0], &w[2]), d(&w[1], &w[2])];
    let residual = pairs.iter().cloned().fold(0.0, f64::max);
    let matched = residual < tol;
    let points = vec![FormMatch {
        form: Form::Identity,
        matched,
        residual,
        rotation: None,
        alpha: None,
        z: None,
        note: Some("largest pairwise distance of W1, W2, Wa".into()),
    }];
    FormCheck {
        form: Form::Identity,
        matched,
        points,
    }
}

fn diag_check(w: &[C2; 3], tol: f64) -> FormCheck {
    // the point farthest from I pins down V best
    let far = w
        .iter()
        .max_by(|a, b| {
            let da = (**a - C2::identity()).frob_norm();
            let db = (**b - C2::identity()).frob_norm();
            da.total_cmp(&db)
        })
        .expect("three points");
    let v = extract_diag_rotation(far, tol).unwrap_or(Rotation2::IDENTITY);
    let points: Vec<FormMatch> = w
        .iter()
        .map(|m| match_form(m, &FormTemplate::Diag { v: Some(v) }, tol))
        .collect();
    FormCheck {
        form: Form::Diag,
        matched: points.iter().all(|m| m.matched),
        points,
    }
}

fn corner_check(spec: &SequenceSpec, last: &Sample, tol: f64) -> FormCheck {
    let v = sym_eig2(&last.z1.y()).vectors;
    let za = last.za.to_c2();
    let (r, p) = match spec.corner {
        Some(t) => (t.r, t.p),
        None => {
            let m = rotate_into(&v, &za);
            (m.m[0][1].re, m.m[1][1].re)
        }
    };
    let points: Vec<FormMatch> = [last.z1.to_c2(), last.z2.to_c2(), za]
        .iter()
        .map(|z| corner_match(z, &v, r, p, tol))
        .collect();
    let mut matched = points.iter().all(|m| m.matched);
    if let Some(t) = spec.corner {
        let hit =
            |m: &FormMatch, z: crate::matkernel::C64| m.z.is_some_and(|got| (got - z).norm() < tol);
        matched &= hit(&points[0], t.z1) && hit(&points[1], t.z2);
    }
    FormCheck {
        form: Form::Corner,
        matched,
        points,
    }
}

fn gap(trace: &[TraceRow], f: impl Fn(&TraceRow) -> Option<f64>) -> f64 {
    match trace {
        [.., a, b] => match (f(a), f(b)) {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        },
        _ => f64::INFINITY,
    }
}

/// Upper bound on the limit of `mu*` read off the trace.
///
/// Uses `mu_N + d_N rho/(1 - rho)` with `rho = d_N/d_{N-1}` when the last gaps
/// shrink geometrically, `mu_N + d_N` when the last gap is already below the Cauchy
/// tolerance, and otherwise the maximum plus the spread of the second half of the
/// trace. The last rule is a heuristic for slowly mixing power-law tails.
pub fn mu_limit_bound(trace: &[TraceRow]) -> Option<f64> {
    let [.., a, b, c] = trace else { return None };
    let (x, y, z) = (a.mu_star?, b.mu_star?, c.mu_star?);
    let (d1, d2) = ((y - x).abs(), (z - y).abs());
    if d2 < CAUCHY_TOL {
        return Some(z + d2);
    }
    let rho = d2 / d1;
    if rho < 0.9 {
        return Some(z + d2 * rho / (1.0 - rho));
    }
    let tail: Option<Vec<f64>> = trace[trace.len() / 2..].iter().map(|r| r.mu_star).collect();
    let tail = tail?;
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    Some(hi + (hi - lo))
}

fn matrix_gap(prev: &Option<[C2; 3]>, last: &[C2; 3], k: usize) -> f64 {
    prev.map_or(f64::INFINITY, |p| (p[k] - last[k]).frob_norm())
}

/// Tunables of a boundary run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunOptions {
    pub form_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { form_tol: FORM_TOL }
    }
}

/// Evaluates `spec` at each `n` of `schedule` and classifies the limits.
///
/// Errors at individual indices are recorded in the trace.
pub fn run_case(spec: &SequenceSpec, schedule: &[u64], p: f64) -> Result<CaseReport> {
    run_case_with(spec, schedule, p, &RunOptions::default())
}

pub fn run_case_with(
    spec: &SequenceSpec,
    schedule: &[u64],
    p: f64,
    opts: &RunOptions,
) -> Result<CaseReport> {
    crate::siegel::check_p(p)?;
    let tol = opts.form_tol;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "form tolerance must be positive, got {tol}"
        )));
    }
    if schedule.len() < 4 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "schedule must be increasing with at least 4 entries".into(),
        ));
    }
    let expected = expected_verdict(spec.case);
    let mut trace = Vec::with_capacity(schedule.len());
    let mut prev_w: Option<[C2; 3]> = None;
    let mut last: Option<Sample> = None;
    for (k, &n) in schedule.iter().enumerate() {
        let is_last = k + 1 == schedule.len();
        match sample(spec, n, p) {
            Ok(s) => {
                let dist = |m: &C2| (*m - C2::identity()).frob_norm();
                let tf = tformula_residual(&s.z1, &s.z2, p).ok();
                trace.push(TraceRow {
                    n,
                    mu_star: Some(s.mu),
                    w1_dist: Some(dist(&s.w[0])),
                    w2_dist: Some(dist(&s.w[1])),
                    wa_dist: Some(dist(&s.w[2])),
                    tformula_residual: tf,
                    error: None,
                });
                if k + 2 == schedule.len() {
                    prev_w = Some(s.w);
                }
                if is_last {
                    last = Some(s);
                }
            }
            Err(e) => trace.push(TraceRow {
                n,
                mu_star: None,
                w1_dist: None,
                w2_dist: None,
                wa_dist: None,
                tformula_residual: None,
                error: Some(e.to_string()),
            }),
        }
    }

    let mut report = CaseReport {
        case: spec.case,
        label: spec.label.clone(),
        expected,
        p,
        trace,
        final_mu_star: None,
        mu_limit_bound: None,
        last: None,
        convergence: None,
        relations: None,
        max_y_norm: None,
        forms: Vec::new(),
        verdict: Verdict::Inconclusive,
        matches_expected: false,
    };
    let Some(s) = last else {
        report.matches_expected = verdict_matches(expected, Verdict::Inconclusive, None);
        return Ok(report);
    };

    let mu_gap = gap(&report.trace, |r| r.mu_star);
    let conv = Convergence {
        mu_gap,
        w1_gap: matrix_gap(&prev_w, &s.w, 0),
        w2_gap: matrix_gap(&prev_w, &s.w, 1),
        wa_gap: matrix_gap(&prev_w, &s.w, 2),
        mu_converged: mu_gap < CAUCHY_TOL,
        converged: false,
    };
    let converged = conv.mu_converged
        && conv.w1_gap < CAUCHY_TOL
        && conv.w2_gap < CAUCHY_TOL
        && conv.wa_gap < CAUCHY_TOL;
    report.convergence = Some(Convergence { converged, ..conv });
    report.final_mu_star = Some(s.mu);
    report.relations = limit_relations(&s.z1, &s.z2, p).ok();
    report.max_y_norm = Some(s.z1.y().frob_norm().max(s.z2.y().frob_norm()));
    report.last = Some(LastPoints {
        n: *schedule.last().expect("non-empty"),
        z1: s.z1.to_c2(),
        z2: s.z2.to_c2(),
        za: s.za.to_c2(),
        w1: s.w[0],
        w2: s.w[1],
        wa: s.w[2],
    });

    let mut order: Vec<Form> = expected.forms().to_vec();
    for f in [Form::Identity, Form::Diag, Form::Corner] {
        if !order.contains(&f) {
            order.push(f);
        }
    }
    report.forms = order
        .iter()
        .map(|f| match f {
            Form::Identity => identity_check(&s.w, tol),
            Form::Diag => diag_check(&s.w, tol),
            Form::Corner => corner_check(spec, &s, tol),
        })
        .collect();

    report.mu_limit_bound = mu_limit_bound(&report.trace);
    report.verdict = if report.mu_limit_bound.is_some_and(|b| b < IMPOSSIBLE_MARGIN) {
        Verdict::Impossible
    } else if !converged {
        Verdict::Inconclusive
    } else {
        report
            .forms
            .iter()
            .find(|c| c.matched)
            .map_or(Verdict::Inconclusive, |c| c.form.into())
    };
    report.matches_expected = verdict_matches(expected, report.verdict, report.max_y_norm);
    Ok(report)
}

/// Witness run for a feasible case, falsifier sample `seed` for an impossible one,
/// over the default schedule.
pub fn run_table_case(case: CaseId, seed: u64, p: f64, opts: &RunOptions) -> Result<CaseReport> {
    let spec = if expected_verdict(case).is_impossible() {
        falsifier_sample(case, seed)?
    } else {
        witness_spec(case)?
    };
    run_case_with(&spec, &default_schedule(), p, opts)
}

/// Whether a run verdict satisfies a table entry.
pub fn verdict_matches(
    expected: ExpectedVerdict,
    verdict: Verdict,
    max_y_norm: Option<f64>,
) -> bool {
    match expected {
        ExpectedVerdict::Impossible => verdict == Verdict::Impossible,
        ExpectedVerdict::Unspecified => {
            !matches!(verdict, Verdict::Impossible | Verdict::Inconclusive)
        }
        ExpectedVerdict::IdentityReal => {
            verdict == Verdict::Identity && max_y_norm.is_some_and(|y| y < FORM_TOL)
        }
        _ => expected
            .forms()
            .iter()
            .any(|f| Verdict::from(*f) == verdict),
    }
}

/// `n, mu_star, w1_dist, w2_dist, wa_dist` as CSV, empty fields for failed indices.
pub fn trace_csv(report: &CaseReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(e.to_string());
    w.write_record(["n", "mu_star", "w1_dist", "w2_dist", "wa_dist"])
        .map_err(io)?;
    let f = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.16e}"));
    for r in &report.trace {
        w.write_record([
            r.n.to_string(),
            f(r.mu_star),
            f(r.w1_dist),
            f(r.w2_dist),
            f(r.wa_dist),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}
