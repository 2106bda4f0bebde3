use proptest::prelude::*;

use siegel_core::contraction::{
    admissible_interval, mu_star, psi_apply, psi_blocks, DEFAULT_DELTA_G,
};
use siegel_core::matkernel::{col_projector, schatten, sym_eig2, CMat, Mat42, RealSym2, C64};
use siegel_core::siegel::{
    polar, polar_residuals, r_scalar, to_ball, to_halfspace, wp, SiegelPoint,
};

fn sym(scale: f64) -> impl Strategy<Value = RealSym2> {
    (-scale..=scale, -scale..=scale, -scale..=scale).prop_map(|(a, b, c)| RealSym2::new(a, b, c))
}

/// Same law as the seeded sampler: `Y = B B^t + 0.01 I`.
fn point() -> impl Strategy<Value = SiegelPoint> {
    (sym(2.0), prop::array::uniform4(-1.0f64..=1.0)).prop_map(|(x, b)| {
        let y = RealSym2::new(
            b[0] * b[0] + b[1] * b[1] + 0.01,
            b[0] * b[2] + b[1] * b[3],
            b[2] * b[2] + b[3] * b[3] + 0.01,
        );
        SiegelPoint::new(x, y).unwrap()
    })
}

fn cmat42() -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0f64..=1.0, -1.0f64..=1.0), 8).prop_map(|v| {
        CMat::new(4, 2, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
    })
}

proptest! {
    #[test]
    fn eigen_reconstructs(m in sym(10.0)) {
        let e = sym_eig2(&m);
        prop_assert!(e.values[0] >= e.values[1]);
        prop_assert!((e.reconstruct() - m).frob_norm() <= 1e-12 * m.frob_norm().max(1.0));
    }

    #[test]
    fn schatten_is_a_norm(a in cmat42(), b in cmat42(), q in 1.0f64..8.0) {
        let sum = a.add(&b).unwrap();
        let lhs = schatten(&sum, q).unwrap();
        prop_assert!(lhs <= schatten(&a, q).unwrap() + schatten(&b, q).unwrap() + 1e-12);
        let f = schatten(&a, 2.0).unwrap();
        prop_assert!((f - a.frob_norm()).abs() <= 1e-12 * f.max(1.0));
    }

    #[test]
    fn projector_is_orthogonal(a in prop::array::uniform4(-1.0f64..1.0), b in prop::array::uniform4(-1.0f64..1.0)) {
        let m = Mat42::from_columns(a, b);
        if let Ok(p) = col_projector(&m) {
            prop_assert!(p.mul(&p).max_abs_diff(&p) < 1e-10);
            prop_assert!(p.transpose().max_abs_diff(&p) < 1e-12);
        }
    }

    #[test]
    fn r_pairs_to_eps_squared(t in -3.0f64..3.0, eps in 0.1f64..2.0) {
        let prod = r_scalar(t, eps) * r_scalar(-t, eps);
        prop_assert!((prod - eps * eps).abs() < 1e-12);
        prop_assert!(r_scalar(t, eps) > 0.0);
    }

    #[test]
    fn polar_reconstructs(z in point(), p in 0.25f64..5.0) {
        let pd = polar(&z, p).unwrap();
        prop_assert!(polar_residuals(&z, &pd).unwrap().max() < 1e-10);
        prop_assert!(pd.epsilon > 0.0);
    }

    #[test]
    fn cayley_roundtrip(z in point()) {
        let w = to_ball(&z).unwrap();
        prop_assert!(w.norm() < 1.0);
        prop_assert!(to_halfspace(&w).unwrap().distance(&z) < 1e-11);
    }

    #[test]
    fn midpoint_contracts(z1 in point(), z2 in point(), p in 0.25f64..5.0) {
        let r = mu_star(&z1, &z2, p).unwrap();
        prop_assert!(r.mu_star <= 1.0 + 1e-12);
        prop_assert!(r.mu_star > 0.0);
    }

    #[test]
    fn rotation_preserves_wp(z in point(), p in 0.25f64..5.0, u in 0.0f64..1.0) {
        let (lo, hi) = admissible_interval(&DEFAULT_DELTA_G);
        let rot = psi_blocks(lo + u * (hi - lo), &DEFAULT_DELTA_G).unwrap();
        let moved = psi_apply(&rot, &z).unwrap();
        let (a, b) = (wp(&z, p).unwrap(), wp(&moved, p).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }
}
