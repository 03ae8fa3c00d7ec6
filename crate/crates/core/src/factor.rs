//! The vertical Darboux motion `M` about the third coordinate axis and the
//! factorization `(t² + 1)·M = P1·P2·P3·P4²` into linear rotation factors.
//!
//! `P4`, `P3` and `P2` have closed forms; `P1` is whatever is left after
//! dividing them off on the right. The closed form of `P1` is kept as an
//! independent cross-check ([`p1_closed_form`]).

use crate::dq::{DualQuaternion, LinearAxis, PlueckerLine, Quaternion};
use crate::error::{DesignError, FactorError};
use crate::poly::MotionPolynomial;
use crate::DEFAULT_TOL;

type Dq = DualQuaternion;

/// Branch-specific free parameters of `P2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FreeParams {
    /// `b² + c² ≠ 4(q1² + q2²)`: moment components `z1, z2`; `z3` follows
    /// from the Plücker condition.
    Generic { z1: f64, z2: f64 },
    /// `b² + c² = 4(q1² + q2²)`: `[z1, z2] = z·[b q2 + c q1, −b q1 + c q2]`
    /// and `z3` is free.
    Degenerate { z: f64, z3: f64 },
}

/// Design parameters of the linkage. Construction validates every invariant,
/// so a `DesignParams` value always admits a factorization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignParams {
    b: f64,
    c: f64,
    q1: f64,
    q2: f64,
    free: FreeParams,
}

/// `b² + c² − 4(q1² + q2²)`.
pub fn degeneracy(b: f64, c: f64, q1: f64, q2: f64) -> f64 {
    b * b + c * c - 4. * (q1 * q1 + q2 * q2)
}

/// Scale-invariant test `|b² + c² − 4(q1² + q2²)| < 1e−9·(b² + c²)`.
pub fn is_degenerate(b: f64, c: f64, q1: f64, q2: f64) -> bool {
    degeneracy(b, c, q1, q2).abs() < DEFAULT_TOL * (b * b + c * c)
}

impl DesignParams {
    pub fn new(b: f64, c: f64, q1: f64, q2: f64, free: FreeParams) -> Result<Self, DesignError> {
        let named = match free {
            FreeParams::Generic { z1, z2 } => [("b", b), ("c", c), ("q1", q1), ("q2", q2), ("z1", z1), ("z2", z2)],
            FreeParams::Degenerate { z, z3 } => [("b", b), ("c", c), ("q1", q1), ("q2", q2), ("z", z), ("z3", z3)],
        };
        if let Some((name, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
            return Err(DesignError::NotFinite(name));
        }
        if q1 == 0. && q2 == 0. {
            return Err(DesignError::VanishingOffsets);
        }
        if b == 0. && c == 0. {
            return Err(DesignError::VanishingDarboux);
        }
        let condition = degeneracy(b, c, q1, q2);
        match (free, is_degenerate(b, c, q1, q2)) {
            (FreeParams::Generic { .. }, true) => Err(DesignError::ExpectedDegenerate { condition }),
            (FreeParams::Degenerate { .. }, false) => Err(DesignError::ExpectedGeneric { condition }),
            _ => Ok(Self { b, c, q1, q2, free }),
        }
    }

    pub fn generic(b: f64, c: f64, q1: f64, q2: f64, z1: f64, z2: f64) -> Result<Self, DesignError> {
        Self::new(b, c, q1, q2, FreeParams::Generic { z1, z2 })
    }

    pub fn degenerate(b: f64, c: f64, q1: f64, q2: f64, z: f64, z3: f64) -> Result<Self, DesignError> {
        Self::new(b, c, q1, q2, FreeParams::Degenerate { z, z3 })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }

    pub fn free(&self) -> FreeParams {
        self.free
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.free, FreeParams::Degenerate { .. })
    }

    /// `b² + c² − 4(q1² + q2²)`.
    pub fn condition(&self) -> f64 {
        degeneracy(self.b, self.c, self.q1, self.q2)
    }

    /// `b² + c² + 4(q1² + q2²)`.
    fn plus(&self) -> f64 {
        self.b * self.b + self.c * self.c + 4. * (self.q1 * self.q1 + self.q2 * self.q2)
    }

    /// `z` of the degenerate branch.
    pub fn z(&self) -> Option<f64> {
        match self.free {
            FreeParams::Degenerate { z, .. } => Some(z),
            FreeParams::Generic { .. } => None,
        }
    }

    pub fn z1(&self) -> f64 {
        match self.free {
            FreeParams::Generic { z1, .. } => z1,
            FreeParams::Degenerate { z, .. } => z * (self.b * self.q2 + self.c * self.q1),
        }
    }

    pub fn z2(&self) -> f64 {
        match self.free {
            FreeParams::Generic { z2, .. } => z2,
            FreeParams::Degenerate { z, .. } => z * (-self.b * self.q1 + self.c * self.q2),
        }
    }

    /// Third moment component of `P2`. On the generic branch it is fixed by
    /// the Plücker condition `n·(z1, z2, z3) = 0`.
    pub fn z3(&self) -> f64 {
        let (b, c, q1, q2) = (self.b, self.c, self.q1, self.q2);
        match self.free {
            FreeParams::Generic { z1, z2 } => {
                (4. * (b * q1 - c * q2) * z1 + 4. * (b * q2 + c * q1) * z2) / self.condition()
            }
            FreeParams::Degenerate { z3, .. } => z3,
        }
    }

    pub fn y1(&self) -> f64 {
        let (b, c, q1, q2) = (self.b, self.c, self.q1, self.q2);
        (b * b * q1 - 2. * b * c * q2 - c * c * q1 + 4. * q1.powi(3) + 4. * q1 * q2 * q2)
            / (4. * (q1 * q1 + q2 * q2))
    }

    pub fn y2(&self) -> f64 {
        let (b, c, q1, q2) = (self.b, self.c, self.q1, self.q2);
        (b * b * q2 + 2. * b * c * q1 - c * c * q2 + 4. * q1 * q1 * q2 + 4. * q2.powi(3))
            / (4. * (q1 * q1 + q2 * q2))
    }

    /// Unit primal vector `n` of `P2 = t + n − ε(z1 i + z2 j + z3 k)`.
    pub fn p2_direction(&self) -> [f64; 3] {
        let (b, c, q1, q2) = (self.b, self.c, self.q1, self.q2);
        let d = self.plus();
        [
            4. * (b * q1 - c * q2) / d,
            4. * (b * q2 + c * q1) / d,
            -self.condition() / d,
        ]
    }
}

/// `M = (t² + 1)(t − k) + ε(−b k t + c k)(t − k)`.
pub fn vertical_darboux(b: f64, c: f64) -> MotionPolynomial {
    MotionPolynomial::from_components([
        &[0., 1., 0., 1.],
        &[],
        &[],
        &[-1., 0., -1.],
        &[c, -b],
        &[],
        &[],
        &[0., c, -b],
    ])
}

/// `t² + 1`.
pub fn circle_factor() -> MotionPolynomial {
    MotionPolynomial::real(&[1., 0., 1.])
}

/// `P4 = t − k − ε(q1 i + q2 j)`.
pub fn make_p4(q1: f64, q2: f64) -> MotionPolynomial {
    MotionPolynomial::monic_linear(Dq::K + Dq::from_coeffs([0., 0., 0., 0., 0., q1, q2, 0.]))
}

/// `P3 = t + k + ε(y1 i + y2 j)`.
pub fn make_p3(params: &DesignParams) -> MotionPolynomial {
    let (y1, y2) = (params.y1(), params.y2());
    MotionPolynomial::monic_linear(-Dq::K - Dq::from_coeffs([0., 0., 0., 0., 0., y1, y2, 0.]))
}

/// `P2 = t + n − ε(z1 i + z2 j + z3 k)` with `n` the unit circle-axis direction.
pub fn make_p2(params: &DesignParams) -> MotionPolynomial {
    let n = params.p2_direction();
    let moment = [params.z1(), params.z2(), params.z3()];
    let h = Dq::new(-Quaternion::from_vector(n), Quaternion::from_vector(moment));
    MotionPolynomial::monic_linear(h)
}

/// `P1`, computed as the quotient of `(t² + 1)·M` by `P2·P3·P4²`.
pub fn make_p1(params: &DesignParams) -> Result<MotionPolynomial, FactorError> {
    Ok(factorize(params)?.p1)
}

/// The printed closed form of `P1`, independent of the division route.
///
/// On the degenerate branch the closed form is written in terms of `−z`:
/// with `[z1, z2] = z·[b q2 + c q1, −b q1 + c q2]` the published expression
/// only matches the quotient after that sign change.
pub fn p1_closed_form(params: &DesignParams) -> MotionPolynomial {
    let (b, c, q1, q2) = (params.b, params.c, params.q1, params.q2);
    let (z1, z2, z3) = (params.z1(), params.z2(), params.z3());
    let g = params.condition();
    let h = match params.free {
        FreeParams::Generic { .. } => {
            let n = params.p2_direction();
            let sq = 4. * q1 * q1 + 4. * q2 * q2;
            let di = (2. * q2 * (b * c + 2. * q1 * q2 + 2. * z1 * q2)
                - q1 * (b * b - c * c - 4. * q1 * q1 - 4. * q1 * z1))
                / sq;
            let dj = -(2. * q1 * (b * c - 2. * q1 * q2 - 2. * q1 * z2)
                + q2 * (b * b - c * c - 4. * q2 * q2 - 4. * q2 * z2))
                / sq;
            let dk = (4. * (b * q1 - c * q2) * z1 + 4. * (b * q2 + c * q1) * z2 - b * g) / g;
            Dq::new(Quaternion::from_vector(n), Quaternion::new(0., -di, -dj, -dk))
        }
        FreeParams::Degenerate { z, .. } => {
            let s = b * b + c * c;
            let primal = [2. * (b * q1 - c * q2) / s, 2. * (b * q2 + c * q1) / s, 0.];
            let w = (s * -z - 2. * c) / s;
            let di = -w * (b * q2 + c * q1);
            let dj = w * (b * q1 - c * q2);
            let dk = z3 - b;
            Dq::new(Quaternion::from_vector(primal), Quaternion::new(0., -di, -dj, -dk))
        }
    };
    MotionPolynomial::monic_linear(h)
}

/// A verified factorization `(t² + 1)·M = P1·P2·P3·P4²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub params: DesignParams,
    pub m: MotionPolynomial,
    pub p1: MotionPolynomial,
    pub p2: MotionPolynomial,
    pub p3: MotionPolynomial,
    pub p4: MotionPolynomial,
    pub y1: f64,
    pub y2: f64,
    pub z3: f64,
    /// Largest coefficient of `P1·P2·P3·P4² − (t² + 1)·M`.
    pub residual: f64,
}

impl Factorization {
    /// Checks externally supplied factors (e.g. read back from a file)
    /// against `(t² + 1)·M` for the given design.
    pub fn from_factors(
        params: DesignParams,
        [p1, p2, p3, p4]: [MotionPolynomial; 4],
        tol: f64,
    ) -> Result<Self, FactorError> {
        let m = vertical_darboux(params.b, params.c);
        let target = &circle_factor() * &m;
        let residual = product(&p1, &p2, &p3, &p4).max_coeff_diff(&target);
        if !(residual < tol) {
            return Err(FactorError::VerificationFailure { residual });
        }
        Ok(Self {
            params,
            m,
            p1,
            p2,
            p3,
            p4,
            y1: params.y1(),
            y2: params.y2(),
            z3: params.z3(),
            residual,
        })
    }

    pub fn factors(&self) -> [&MotionPolynomial; 4] {
        [&self.p1, &self.p2, &self.p3, &self.p4]
    }

    /// `P1·P2·P3·P4²`.
    pub fn product(&self) -> MotionPolynomial {
        product(&self.p1, &self.p2, &self.p3, &self.p4)
    }

    /// `(t² + 1)·M`.
    pub fn target(&self) -> MotionPolynomial {
        &circle_factor() * &self.m
    }

    /// `Q = (t² + 1)·M / P4²`.
    pub fn q(&self) -> MotionPolynomial {
        &(&self.p1 * &self.p2) * &self.p3
    }
}

fn product(
    p1: &MotionPolynomial,
    p2: &MotionPolynomial,
    p3: &MotionPolynomial,
    p4: &MotionPolynomial,
) -> MotionPolynomial {
    &(&(&(p1 * p2) * p3) * p4) * p4
}

fn divide_off(
    poly: &MotionPolynomial,
    factor: &MotionPolynomial,
    name: &'static str,
    tol: f64,
) -> Result<MotionPolynomial, FactorError> {
    let h = factor.linear_root().expect("factors are monic linear");
    let (q, r) = poly.div_right(h);
    let scale = poly.coeffs().iter().map(|c| c.max_abs()).fold(1., f64::max);
    let residual = r.max_abs();
    if !(residual <= tol * scale) {
        return Err(FactorError::Remainder { factor: name, residual });
    }
    Ok(q)
}

/// Builds every factor, verifies the product identity and records the
/// derived quantities `y1, y2, z3`.
pub fn factorize(params: &DesignParams) -> Result<Factorization, FactorError> {
    let tol = DEFAULT_TOL;
    let m = vertical_darboux(params.b, params.c);
    let target = &circle_factor() * &m;
    let p4 = make_p4(params.q1, params.q2);
    let q = divide_off(&target, &p4, "P4", tol)?;
    let q = divide_off(&q, &p4, "P4", tol)?;
    let p3 = make_p3(params);
    let r = divide_off(&q, &p3, "P3", tol)?;
    let p2 = make_p2(params);
    let p1 = divide_off(&r, &p2, "P2", tol)?;
    let h1 = p1.linear_root().ok_or(FactorError::NotLinear)?;
    // the quotient carries rounding noise in the dual scalar slot
    let mut c = h1.coeffs();
    c[4] = 0.;
    let p1 = MotionPolynomial::monic_linear(Dq::from_coeffs(c));

    let residual = product(&p1, &p2, &p3, &p4).max_coeff_diff(&target);
    if !(residual < tol) {
        return Err(FactorError::VerificationFailure { residual });
    }
    Ok(Factorization {
        params: *params,
        m,
        p1,
        p2,
        p3,
        p4,
        y1: params.y1(),
        y2: params.y2(),
        z3: params.z3(),
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Cylindrical,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Joint {
    pub kind: JointKind,
    pub axis: PlueckerLine,
}

/// Joint axes of the closed 4RC loop in chain order `P1, P2, P3, P4, C`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkageDescription {
    pub design: DesignParams,
    pub joints: Vec<Joint>,
}

pub fn extract_linkage(f: &Factorization) -> Result<LinkageDescription, FactorError> {
    const NAMES: [&str; 4] = ["P1", "P2", "P3", "P4"];
    let mut joints = Vec::with_capacity(5);
    for (p, name) in f.factors().into_iter().zip(NAMES) {
        let h = p.linear_root().ok_or(FactorError::NotLinear)?;
        match h.axis_of_linear() {
            Ok(LinearAxis::Rotation(axis)) => joints.push(Joint { kind: JointKind::Revolute, axis }),
            Ok(LinearAxis::Translation(_)) => {
                return Err(FactorError::Axis { factor: name, source: crate::DqError::ZeroDirection })
            }
            Err(source) => return Err(FactorError::Axis { factor: name, source }),
        }
    }
    joints.push(Joint { kind: JointKind::Cylindrical, axis: PlueckerLine::z_axis() });
    Ok(LinkageDescription { design: f.params, joints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn reference_design() -> DesignParams {
        DesignParams::generic(1., 2., 1., 0., 0., 0.).unwrap()
    }

    fn degenerate_design() -> DesignParams {
        DesignParams::degenerate(SQRT_2, SQRT_2, 1., 0., 0., 0.).unwrap()
    }

    #[test]
    fn darboux_coefficients() {
        let m = vertical_darboux(1., 2.);
        let c = m.coeffs();
        assert_eq!(c[3], Dq::ONE);
        assert_eq!(c[2], -Dq::K - Dq::K.eps());
        assert_eq!(c[1], Dq::ONE + Dq::EPS * -1. + Dq::K.eps() * 2.);
        assert_eq!(c[0], -Dq::K + Dq::EPS * 2.);
        assert_eq!(m.eval(0.), -Dq::K + Dq::EPS * 2.);
        // M(1) ∝ 1 − k + ε(k + 1)/2
        let expect = Dq::ONE - Dq::K + (Dq::K + Dq::ONE).eps() * 0.5;
        assert!(m.eval(1.).equiv(expect, DEFAULT_TOL));
    }

    #[test]
    fn darboux_is_motion_with_cubed_circle_norm() {
        for (b, c) in [(1., 2.), (-0.3, 4.), (2.5, 0.)] {
            let m = vertical_darboux(b, c);
            assert!(m.is_motion(DEFAULT_TOL));
            let circle = circle_factor();
            assert!(m.norm().max_coeff_diff(&(&(&circle * &circle) * &circle)) < 1e-12);
        }
    }

    #[test]
    fn derived_constants() {
        let p = reference_design();
        assert_eq!((p.y1(), p.y2()), (0.25, 1.));
        let n = p.p2_direction();
        assert!((n[0] - 4. / 9.).abs() < 1e-15);
        assert!((n[1] - 8. / 9.).abs() < 1e-15);
        assert!((n[2] + 1. / 9.).abs() < 1e-15);
        assert!((n.iter().map(|v| v * v).sum::<f64>() - 1.).abs() < 1e-15);
        assert_eq!(p.z3(), 0.);
    }

    #[test]
    fn p4_shape_and_axis() {
        let p4 = make_p4(1., 0.);
        assert_eq!(p4, MotionPolynomial::new(vec![-Dq::K - Dq::I.eps(), Dq::ONE]));
        let LinearAxis::Rotation(axis) = p4.linear_root().unwrap().axis_of_linear().unwrap() else {
            panic!("P4 is a rotation")
        };
        assert_eq!(axis.coords(), [0., 0., 1., -1., 0., 0.]);
    }

    #[test]
    fn p4_squared_divides_target() {
        let target = &circle_factor() * &vertical_darboux(1., 2.);
        let h = make_p4(1., 0.).linear_root().unwrap();
        let (q, r) = target.div_right(h);
        assert!(r.max_abs() < 1e-12);
        let (_, r) = q.div_right(h);
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn fig1_factorization() {
        let f = factorize(&reference_design()).unwrap();
        assert!(f.residual < 1e-12, "{}", f.residual);
        for p in f.factors() {
            assert!(p.is_motion(DEFAULT_TOL));
            assert_eq!(p.degree(), Some(1));
        }
        // P1 and P2 have opposite primal vectors
        let h1 = f.p1.linear_root().unwrap().primal.vector();
        let h2 = f.p2.linear_root().unwrap().primal.vector();
        for (a, b) in h1.iter().zip(h2) {
            assert!((a + b).abs() < 1e-14);
        }
        assert!(f.p1.max_coeff_diff(&p1_closed_form(&reference_design())) < 1e-12);
    }

    #[test]
    fn degenerate_factorization() {
        let p = degenerate_design();
        assert!(p.is_degenerate());
        assert_eq!((p.z1(), p.z2()), (0., 0.));
        assert!(p.p2_direction()[2].abs() < 1e-15);
        let f = factorize(&p).unwrap();
        assert!(f.residual < 1e-9);
        let ek = f.p1.coeffs()[0].dual.z;
        assert!((ek + SQRT_2).abs() < 1e-12, "{ek}");
        assert!(f.p1.max_coeff_diff(&p1_closed_form(&p)) < 1e-12);
    }

    #[test]
    fn closed_form_p1_with_nonzero_moments() {
        let params = [
            DesignParams::generic(1.3, -0.7, 0.4, 0.9, 0.3, -1.2).unwrap(),
            DesignParams::degenerate(1., 2., 5f64.sqrt() / 2., 0., 0.5, -0.2).unwrap(),
            DesignParams::degenerate(SQRT_2, SQRT_2, 1., 0., 0.3, 0.2).unwrap(),
        ];
        for p in params {
            let f = factorize(&p).unwrap();
            assert!(f.p1.max_coeff_diff(&p1_closed_form(&p)) < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn plucker_condition_of_p2() {
        let p = DesignParams::generic(1.3, -0.7, 0.4, 0.9, 0.3, -1.2).unwrap();
        let n = p.p2_direction();
        let dot = n[0] * p.z1() + n[1] * p.z2() + n[2] * p.z3();
        assert!(dot.abs() < 1e-12);
        let zero = DesignParams::generic(3., 1., 0.2, 0.5, 0., 0.).unwrap();
        assert_eq!(zero.z3(), 0.);
    }

    #[test]
    fn parameter_validation() {
        assert_eq!(
            DesignParams::generic(1., 2., 0., 0., 0., 0.),
            Err(DesignError::VanishingOffsets)
        );
        assert_eq!(
            DesignParams::generic(0., 0., 1., 0., 0., 0.),
            Err(DesignError::VanishingDarboux)
        );
        assert!(matches!(
            DesignParams::generic(SQRT_2, SQRT_2, 1., 0., 0., 0.),
            Err(DesignError::ExpectedDegenerate { .. })
        ));
        assert!(matches!(
            DesignParams::degenerate(1., 2., 1., 0., 0., 0.),
            Err(DesignError::ExpectedGeneric { .. })
        ));
        assert_eq!(
            DesignParams::generic(f64::NAN, 2., 1., 0., 0., 0.),
            Err(DesignError::NotFinite("b"))
        );
    }

    #[test]
    fn q_is_a_non_vertical_darboux_motion() {
        let f = factorize(&DesignParams::generic(1., 2., 1., 0.3, 0.2, 0.1).unwrap()).unwrap();
        let q = f.q();
        assert!(q.is_motion(DEFAULT_TOL));
        assert_eq!(q.degree(), Some(3));
        // primal part (t² + 1)(t + k)
        let primal = MotionPolynomial::new(q.coeffs().iter().map(|c| Dq::new(c.primal, Quaternion::ZERO)).collect());
        let expect = &circle_factor() * &MotionPolynomial::monic_linear(-Dq::K);
        assert!(primal.max_coeff_diff(&expect) < 1e-12);
        // εi/εj carry t-dependence, unlike a vertical Darboux motion
        assert!(q.coeffs().iter().skip(1).any(|c| c.dual.x.abs() > 1e-3 || c.dual.y.abs() > 1e-3));
    }

    #[test]
    fn linkage_axes() {
        let f = factorize(&reference_design()).unwrap();
        let l = extract_linkage(&f).unwrap();
        assert_eq!(l.joints.len(), 5);
        assert_eq!(l.joints[3].axis.coords(), [0., 0., 1., -1., 0., 0.]);
        let p3 = PlueckerLine::new([0., 0., 1.], [-0.25, -1., 0.]).unwrap();
        assert!(l.joints[2].axis.same_line(&p3, 1e-15));
        assert_eq!(l.joints[4].kind, JointKind::Cylindrical);
        assert_eq!(l.joints[4].axis.coords(), [0., 0., 1., 0., 0., 0.]);
        assert!(l.joints[..4].iter().all(|j| j.kind == JointKind::Revolute));
    }

    #[test]
    fn tampered_factors_fail_verification() {
        let f = factorize(&reference_design()).unwrap();
        let mut c = f.p3.coeffs().to_vec();
        c[0].dual.x += 1e-3;
        let bad = MotionPolynomial::new(c);
        let err = Factorization::from_factors(f.params, [f.p1.clone(), f.p2.clone(), bad, f.p4.clone()], DEFAULT_TOL);
        assert!(matches!(err, Err(FactorError::VerificationFailure { .. })));
        let ok = Factorization::from_factors(f.params, [f.p1.clone(), f.p2, f.p3, f.p4], DEFAULT_TOL);
        assert!(ok.is_ok());
    }
}
