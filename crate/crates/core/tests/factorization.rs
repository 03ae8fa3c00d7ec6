use darboux_core::factor::{
    self, circle_factor, extract_linkage, make_p4, p1_closed_form, vertical_darboux, JointKind,
};
use darboux_core::linkage::{chain_pose, coupler_transform};
use darboux_core::{factorize, DesignParams, DualQuaternion as Dq, ExtReal, JointValues, DEFAULT_TOL};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nonzero() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.2f64, 0.2..3.0f64]
}

fn generic_params() -> impl Strategy<Value = DesignParams> {
    (nonzero(), -3.0..3.0f64, nonzero(), -3.0..3.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_filter("well inside the generic branch", |&(b, c, q1, q2, _, _)| {
            factor::degeneracy(b, c, q1, q2).abs() > 0.05 * (b * b + c * c)
        })
        .prop_map(|(b, c, q1, q2, z1, z2)| DesignParams::generic(b, c, q1, q2, z1, z2).unwrap())
}

fn degenerate_params() -> impl Strategy<Value = DesignParams> {
    (nonzero(), -3.0..3.0f64, -3.2..3.2f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(b, c, phi, z, z3)| {
        let r = b.hypot(c) / 2.;
        DesignParams::degenerate(b, c, r * phi.cos(), r * phi.sin(), z, z3).unwrap()
    })
}

fn ext() -> impl Strategy<Value = ExtReal> {
    prop_oneof![9 => (-20.0..20.0f64).prop_map(ExtReal::Finite), 1 => Just(ExtReal::Infinity)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generic_designs_factor(p in generic_params()) {
        let f = factorize(&p).unwrap();
        prop_assert!(f.residual < DEFAULT_TOL);
        prop_assert!(f.product().proportional(&f.target(), 20, 1e-9));
        prop_assert!(f.p1.max_coeff_diff(&p1_closed_form(&p)) < 1e-9);
        for q in f.factors() {
            prop_assert!(q.is_motion(1e-12));
        }
    }

    #[test]
    fn degenerate_designs_factor(p in degenerate_params()) {
        let f = factorize(&p).unwrap();
        prop_assert!(f.residual < DEFAULT_TOL);
        prop_assert!(p.condition().abs() < 1e-12 * (p.b().powi(2) + p.c().powi(2)) * 10.);
    }

    #[test]
    fn axes_are_proper_lines(p in generic_params()) {
        let desc = extract_linkage(&factorize(&p).unwrap()).unwrap();
        prop_assert_eq!(desc.joints.len(), 5);
        prop_assert_eq!(desc.joints[4].kind, JointKind::Cylindrical);
        // P4 is vertical
        let d4 = desc.joints[3].axis.direction();
        prop_assert!(d4[0].abs() < 1e-15 && d4[1].abs() < 1e-15);
        prop_assert!(desc.joints[..4].iter().all(|j| j.kind == JointKind::Revolute));
    }

    #[test]
    fn chain_poses_are_rigid(p in generic_params(), v in prop::array::uniform4(ext()), tau in ext(), s in -5.0..5.0f64) {
        let f = factorize(&p).unwrap();
        let jv = JointValues { v1: v[0], v2: v[1], v3: v[2], v4: v[3], tau, s };
        prop_assert!(chain_pose(&f, &jv).is_study(1e-9));
        prop_assert!(coupler_transform(&f, &jv).is_study(1e-9));
    }

    #[test]
    fn darboux_motion_is_a_motion(b in nonzero(), c in -3.0..3.0f64) {
        let m = vertical_darboux(b, c);
        prop_assert!(m.is_motion(1e-14));
        // norm polynomial is (t² + 1)³ (a real polynomial)
        let cube = &(&circle_factor() * &circle_factor()) * &circle_factor();
        prop_assert!(m.norm().max_coeff_diff(&cube) < 1e-12);
    }
}

#[test]
fn p4_is_a_vertical_rotation() {
    let p4 = make_p4(1., 0.);
    assert_eq!(p4.linear_root(), Some(Dq::K + Dq::I.eps()));
}

#[test]
fn mode_a_coupler_is_the_darboux_motion() {
    let f = factorize(&DesignParams::generic(1., 2., 1., 0., 0., 0.).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let v1: f64 = rng.random_range(-10.0..10.0);
        if v1.abs() < 1e-3 {
            continue;
        }
        let jv = darboux_core::modes::mode_a(&f.params, v1);
        assert!(coupler_transform(&f, &jv).equiv(f.m.eval(v1), 1e-9), "v1 = {v1}");
    }
}

#[test]
fn invalid_designs_are_rejected() {
    use darboux_core::DesignError;
    assert_eq!(DesignParams::generic(1., 2., 0., 0., 0., 0.), Err(DesignError::VanishingOffsets));
    assert_eq!(DesignParams::generic(0., 0., 1., 0., 0., 0.), Err(DesignError::VanishingDarboux));
    assert!(matches!(DesignParams::generic(1., 2., 1., 0.5, 0., 0.), Err(DesignError::ExpectedDegenerate { .. })));
    assert!(matches!(DesignParams::degenerate(1., 2., 1., 0., 0., 0.), Err(DesignError::ExpectedGeneric { .. })));
    assert_eq!(DesignParams::generic(f64::NAN, 2., 1., 0., 0., 0.), Err(DesignError::NotFinite("b")));
}
