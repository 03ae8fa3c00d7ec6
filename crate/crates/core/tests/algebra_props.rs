use darboux_core::{DualQuaternion as Dq, MotionPolynomial, ProjectivePoint, Quaternion};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn dq() -> impl Strategy<Value = Dq> {
    prop::array::uniform8(coeff()).prop_map(Dq::from_coeffs)
}

/// Rigid displacement `p + ε·½·t·p` with `|p| ≥ 0.1`.
fn pose() -> impl Strategy<Value = Dq> {
    (prop::array::uniform4(coeff()), prop::array::uniform3(coeff()))
        .prop_filter("nonzero rotation", |(p, _)| p.iter().map(|v| v * v).sum::<f64>() > 0.01)
        .prop_map(|([w, x, y, z], t)| {
            let p = Quaternion::new(w, x, y, z);
            Dq::new(p, Quaternion::from_vector(t) * p.scale(0.5))
        })
}

fn poly(max_len: usize) -> impl Strategy<Value = MotionPolynomial> {
    prop::collection::vec(dq(), 1..=max_len).prop_map(MotionPolynomial::new)
}

fn diff(a: Dq, b: Dq) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).abs()).fold(0., f64::max)
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn product_is_associative(a in dq(), b in dq(), c in dq()) {
        prop_assert!(diff((a * b) * c, a * (b * c)) < 1e-12);
    }

    #[test]
    fn conjugation_reverses_products(a in dq(), b in dq()) {
        prop_assert!(diff((a * b).conj(), b.conj() * a.conj()) < 1e-12);
    }

    #[test]
    fn norm_is_multiplicative(a in dq(), b in dq()) {
        let (na, nb, nab) = (a.norm(), b.norm(), (a * b).norm());
        prop_assert!((nab.re - na.re * nb.re).abs() < 1e-9 * (1. + nab.re.abs()));
        prop_assert!((nab.du - (na.re * nb.du + na.du * nb.re)).abs() < 1e-9 * (1. + nab.du.abs()));
    }

    #[test]
    fn study_quadric_is_closed(a in pose(), b in pose()) {
        prop_assert!(a.is_study(1e-12));
        prop_assert!((a * b).is_study(1e-10));
    }

    #[test]
    fn poses_are_rigid(h in pose(), p in prop::array::uniform3(coeff()), q in prop::array::uniform3(coeff())) {
        let image = |x: [f64; 3]| h.act_on_point(ProjectivePoint::from_affine(x)).unwrap().to_affine().unwrap();
        prop_assert!((dist(image(p), image(q)) - dist(p, q)).abs() < 1e-10);
    }

    #[test]
    fn action_composes(g in pose(), h in pose(), p in prop::array::uniform3(coeff())) {
        let act = |d: Dq, x: [f64; 3]| d.act_on_point(ProjectivePoint::from_affine(x)).unwrap().to_affine().unwrap();
        prop_assert!(dist(act(g * h, p), act(g, act(h, p))) < 1e-9);
    }

    #[test]
    fn canonical_form_is_projective(a in dq(), k in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64]) {
        prop_assume!(a.max_abs() > 1e-3);
        prop_assert!(diff(a.canonical(), a.scale(k).canonical()) < 1e-12);
        prop_assert!(a.equiv(a.scale(k), 1e-12));
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in poly(4), q in poly(4), t in -3.0..3.0f64) {
        let lhs = (&p * &q).eval(t);
        let rhs = p.eval(t) * q.eval(t);
        prop_assert!(diff(lhs, rhs) < 1e-9 * (1. + rhs.max_abs()));
        prop_assert!(diff((&p + &q).eval(t), p.eval(t) + q.eval(t)) < 1e-9 * (1. + rhs.max_abs()));
    }

    #[test]
    fn polynomial_conjugation_reverses_products(p in poly(3), q in poly(3)) {
        prop_assert!((&p * &q).conj().max_coeff_diff(&(&q.conj() * &p.conj())) < 1e-10);
    }

    #[test]
    fn homogeneous_evaluation_scales(p in poly(4), t in -3.0..3.0f64, s in 0.5..2.0f64) {
        let n = p.coeffs().len() as i32 - 1;
        let lhs = p.eval_homogeneous(t * s, s);
        let rhs = p.eval(t).scale(s.powi(n));
        prop_assert!(diff(lhs, rhs) < 1e-9 * (1. + rhs.max_abs()));
    }

    #[test]
    fn right_division_reconstructs(p in poly(5), h in dq()) {
        let (q, r) = p.div_right(h);
        let back = &(&q * &MotionPolynomial::monic_linear(h)) + &MotionPolynomial::constant(r);
        prop_assert!(back.max_coeff_diff(&p) < 1e-9 * (1. + p.coeffs().iter().map(|c| c.max_abs()).fold(0., f64::max)) * 100.);
        // the remainder is the right evaluation at h
        let right_eval = p.coeffs().iter().rev().fold(Dq::ZERO, |acc, c| acc * h + *c);
        prop_assert!(diff(r, right_eval) < 1e-6 * (1. + r.max_abs()));
    }

    #[test]
    fn left_division_reconstructs(p in poly(5), h in dq()) {
        let (q, r) = p.div_left(h);
        let back = &(&MotionPolynomial::monic_linear(h) * &q) + &MotionPolynomial::constant(r);
        prop_assert!(back.max_coeff_diff(&p) < 1e-9 * (1. + p.coeffs().iter().map(|c| c.max_abs()).fold(0., f64::max)) * 100.);
    }

    #[test]
    fn products_of_rotations_are_motions(hs in prop::collection::vec(pose(), 1..4)) {
        // t − h with h a pure rotation quaternion of a pose is a rotation polynomial
        prop_assume!(hs.iter().all(|h| h.primal.vector().iter().map(|v| v * v).sum::<f64>() > 0.01));
        let lin: Vec<MotionPolynomial> = hs
            .iter()
            .map(|h| {
                let [_, x, y, z, _, dx, dy, dz] = h.coeffs();
                let (d, m) = ([x, y, z], [dx, dy, dz]);
                let dm = d[0] * m[0] + d[1] * m[1] + d[2] * m[2];
                let dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                // project the moment onto the Plücker quadric
                let m = [m[0] - dm / dd * d[0], m[1] - dm / dd * d[1], m[2] - dm / dd * d[2]];
                MotionPolynomial::monic_linear(Dq::new(Quaternion::from_vector(d), Quaternion::from_vector(m)))
            })
            .collect();
        let prod = lin.iter().skip(1).fold(lin[0].clone(), |acc, p| &acc * p);
        prop_assert!(prod.is_motion(1e-10));
    }
}

#[test]
fn double_angle_law() {
    // (t − k)² ∝ rotation by twice the angle: at t = cot(θ/2) both describe
    // the same displacement as t' = cot(θ) for the linear factor
    let p = MotionPolynomial::monic_linear(Dq::K);
    let sq = &p * &p;
    for theta in [0.3f64, 1.1, 2.0, -0.7] {
        let t = 1. / (theta / 2.).tan();
        let t2 = 1. / theta.tan();
        assert!(sq.eval(t).equiv(p.eval(t2), 1e-12));
    }
}
