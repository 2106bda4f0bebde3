//! Recognizers for the limit forms of single ball-model matrices.

use serde::Serialize;

use super::taxonomy::Form;
use crate::matkernel::{corner_top_eigenvalue, Rotation2, C2, C64};
use crate::siegel::{to_halfspace_closure, BallPoint, ClosureImage};

/// What a matrix is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FormTemplate {
    /// `W = I`.
    Identity,
    /// `W = V diag(1, alpha) V^t`; `V` is extracted from `W - I` when not given.
    Diag { v: Option<Rotation2> },
    /// `V^t Z V = [[z, r], [r, p]]` for the half-space preimage `Z`, with `z` free.
    Corner { v: Rotation2, r: f64, p: f64 },
}

impl FormTemplate {
    pub fn form(&self) -> Form {
        match self {
            FormTemplate::Identity => Form::Identity,
            FormTemplate::Diag { .. } => Form::Diag,
            FormTemplate::Corner { .. } => Form::Corner,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormMatch {
    pub form: Form,
    pub matched: bool,
    pub residual: f64,
    pub rotation: Option<Rotation2>,
    pub alpha: Option<C64>,
    /// Free corner entry, in half-space coordinates.
    pub z: Option<C64>,
    pub note: Option<String>,
}

impl FormMatch {
    fn unmatched(form: Form, note: String) -> Self {
        FormMatch {
            form,
            matched: false,
            residual: f64::INFINITY,
            rotation: None,
            alpha: None,
            z: None,
            note: Some(note),
        }
    }
}

/// `V^t M V` for complex `M`.
pub fn rotate_into(v: &Rotation2, m: &C2) -> C2 {
    let vm = C2::from_real(&v.matrix());
    vm.transpose() * *m * vm
}

/// The rotation whose second column spans `W - I = (alpha - 1) v v^t`.
///
/// `None` when `|W - I|_F <= tol`, in which case every `V` works.
pub fn extract_diag_rotation(w: &C2, tol: f64) -> Option<Rotation2> {
    let d = *w - C2::identity();
    if d.frob_norm() <= tol {
        return None;
    }
    // (alpha - 1) [[s^2, -sc], [-sc, c^2]] with v = (-s, c)
    let (d00, d01, d11) = (d.m[0][0], d.m[0][1], d.m[1][1]);
    let (c, s) = if d11.norm() >= d00.norm() {
        (1.0, -(d01 / d11).re)
    } else {
        (-(d01 / d00).re, 1.0)
    };
    Some(Rotation2::from_cos_sin(c, s))
}

fn max3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).max(c)
}

/// Tests `w` against a form; never fails, reporting why a match was refused.
pub fn match_form(w: &C2, template: &FormTemplate, tol: f64) -> FormMatch {
    let form = template.form();
    if !w.is_finite() {
        return FormMatch::unmatched(form, "non-finite entries".into());
    }
    let norm = w.op_norm();
    if norm > 1.0 + tol {
        return FormMatch::unmatched(form, format!("operator norm {norm:.17e} exceeds 1"));
    }
    match *template {
        FormTemplate::Identity => {
            let residual = (*w - C2::identity()).frob_norm();
            FormMatch {
                form,
                matched: residual < tol,
                residual,
                rotation: None,
                alpha: None,
                z: None,
                note: None,
            }
        }
        FormTemplate::Diag { v } => {
            let v = v
                .or_else(|| extract_diag_rotation(w, tol))
                .unwrap_or(Rotation2::IDENTITY);
            let m = rotate_into(&v, w);
            let alpha = m.m[1][1];
            let beta = m.m[0][1].norm().max(m.m[1][0].norm());
            let residual = max3((m.m[0][0] - 1.0).norm(), beta, 0.0);
            let top = corner_top_eigenvalue(alpha, m.m[0][1]);
            let mut out = FormMatch {
                form,
                matched: residual < tol && alpha.norm() <= 1.0 + tol,
                residual,
                rotation: Some(v),
                alpha: Some(alpha),
                z: None,
                note: None,
            };
            if top > 1.0 + tol {
                out.note = Some(format!("corner block has top eigenvalue {top:.17e}"));
            }
            out
        }
        FormTemplate::Corner { v, r, p } => {
            let Ok(ball) = BallPoint::new(*w) else {
                return FormMatch::unmatched(form, "not a ball point".into());
            };
            let z = match to_halfspace_closure(&ball) {
                Ok(ClosureImage::Finite(z)) => z,
                Ok(ClosureImage::AtInfinity) => {
                    return FormMatch::unmatched(form, "half-space preimage at infinity".into())
                }
                Err(e) => return FormMatch::unmatched(form, e.to_string()),
            };
            corner_match(&z.to_c2(), &v, r, p, tol)
        }
    }
}

/// Corner test on a half-space matrix `Z`.
pub fn corner_match(z: &C2, v: &Rotation2, r: f64, p: f64, tol: f64) -> FormMatch {
    let m = rotate_into(v, z);
    let corner = m.m[0][0];
    let residual = max3(
        (m.m[0][1] - r).norm(),
        (m.m[1][0] - r).norm(),
        (m.m[1][1] - p).norm(),
    );
    FormMatch {
        form: Form::Corner,
        matched: residual < tol && corner.im >= -tol,
        residual,
        rotation: Some(*v),
        alpha: None,
        z: Some(corner),
        note: None,
    }
}
