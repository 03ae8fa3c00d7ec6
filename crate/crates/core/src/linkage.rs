//! The closed 4RC chain `C = P1(v1)·P2(v2)·P3(v3)·P4(v4)·(τ − k)·(1 − ε s k)`.
//!
//! The chain closes when `C` is (projectively) the identity with the coupler
//! z-axis aligned to the base z-axis (first assembly), or a half-turn that
//! reverses it (second assembly).

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix2, SymmetricEigen};

use crate::dq::{DualQuaternion, ProjectivePoint, Quaternion};
use crate::error::SampleSkip;
use crate::ext::ExtReal;
use crate::factor::{DesignParams, Factorization};
use crate::poly::MotionPolynomial;

type Dq = DualQuaternion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assembly {
    /// Coupler and base z-axes point the same way.
    First,
    /// Coupler and base z-axes point in opposite directions.
    Second,
}

impl Assembly {
    pub fn index(self) -> u8 {
        match self {
            Self::First => 1,
            Self::Second => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Self::First),
            2 => Some(Self::Second),
            _ => None,
        }
    }
}

impl fmt::Display for Assembly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Joint coordinates of the closed chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointValues {
    pub v1: ExtReal,
    pub v2: ExtReal,
    pub v3: ExtReal,
    pub v4: ExtReal,
    /// Rotation parameter of the cylindrical joint.
    pub tau: ExtReal,
    /// Slide of the cylindrical joint.
    pub s: f64,
}

impl JointValues {
    /// Every joint at its identity position.
    pub const IDENTITY: Self = Self {
        v1: ExtReal::Infinity,
        v2: ExtReal::Infinity,
        v3: ExtReal::Infinity,
        v4: ExtReal::Infinity,
        tau: ExtReal::Infinity,
        s: 0.,
    };

    pub fn revolute(&self) -> [ExtReal; 4] {
        [self.v1, self.v2, self.v3, self.v4]
    }
}

fn eval_joint(p: &MotionPolynomial, v: ExtReal) -> Dq {
    let (num, den) = v.homogeneous();
    p.eval_homogeneous(num, den)
}

/// `(τ − k)(1 − ε s k)`; `τ = ∞` drops the rotation.
pub fn cylinder(tau: ExtReal, s: f64) -> Dq {
    let (num, den) = tau.homogeneous();
    let rot = Dq::real(num) - Dq::K * den;
    rot * (Dq::ONE - Dq::K.eps() * s)
}

/// `P1(v1)·P2(v2)·P3(v3)·P4(v4)`, the displacement of the last R-link.
pub fn coupler_transform(f: &Factorization, jv: &JointValues) -> Dq {
    f.factors()
        .into_iter()
        .zip(jv.revolute())
        .fold(Dq::ONE, |acc, (p, v)| acc * eval_joint(p, v))
}

/// The full loop product `C`.
pub fn chain_pose(f: &Factorization, jv: &JointValues) -> Dq {
    coupler_transform(f, jv) * cylinder(jv.tau, jv.s)
}

/// Closure components of a loop product, evaluated on the max-abs
/// normalized representative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosureResidual {
    pub assembly: Assembly,
    /// First assembly: coefficients of `i, j, k, ε, εi, εj, εk`.
    /// Second assembly: coefficients of `1, k, ε, εi, εj, εk` followed by
    /// `(b q1 − c q2)·c_i + (b q2 + c q1)·c_j`.
    pub components: [f64; 7],
    /// `c_i² + c_j²` of the normalized product (second assembly only).
    pub half_turn: f64,
}

impl ClosureResidual {
    pub fn max(&self) -> f64 {
        self.components.iter().fold(0., |m, v| f64::max(m, v.abs()))
    }

    /// All components below `tol`; in the second assembly the product must
    /// additionally be a genuine half-turn.
    pub fn is_closed(&self, tol: f64) -> bool {
        let nondegenerate = match self.assembly {
            Assembly::First => true,
            Assembly::Second => self.half_turn > tol,
        };
        self.max() < tol && nondegenerate
    }
}

fn normalized(c: Dq) -> [f64; 8] {
    let m = c.max_abs();
    if m > 0. {
        c.scale(1. / m).coeffs()
    } else {
        c.coeffs()
    }
}

/// Residual of the first closure condition (`C` is the identity).
pub fn closure_residual_1(c: Dq) -> ClosureResidual {
    let [_, i, j, k, e, ei, ej, ek] = normalized(c);
    ClosureResidual {
        assembly: Assembly::First,
        components: [i, j, k, e, ei, ej, ek],
        half_turn: 0.,
    }
}

/// Residual of the second closure condition (`C` is a half-turn about a
/// horizontal line through the origin, fixed by the linear condition on
/// `c_i, c_j`).
pub fn closure_residual_2(c: Dq, params: &DesignParams) -> ClosureResidual {
    let [one, ci, cj, k, e, ei, ej, ek] = normalized(c);
    let (b, cc, q1, q2) = (params.b(), params.c(), params.q1(), params.q2());
    let linear = (b * q1 - cc * q2) * ci + (b * q2 + cc * q1) * cj;
    ClosureResidual {
        assembly: Assembly::Second,
        components: [one, k, e, ei, ej, ek, linear],
        half_turn: ci * ci + cj * cj,
    }
}

pub fn closure_residual(c: Dq, assembly: Assembly, params: &DesignParams) -> ClosureResidual {
    match assembly {
        Assembly::First => closure_residual_1(c),
        Assembly::Second => closure_residual_2(c, params),
    }
}

/// Cylindrical joint values `(τ, s)` that best close `coupler` in the first
/// assembly, i.e. make `coupler·(τ − k)(1 − ε s k)` real.
///
/// `τ` is the least-squares solution of the linear vector-part equations in
/// homogeneous form (so `τ = ∞` is reachable), `s` the least-squares solution
/// of the remaining dual equations.
pub fn close_cylinder(coupler: Dq) -> (ExtReal, f64) {
    let p = coupler.primal;
    let a = p.vector();
    let b = (p * Quaternion::new(0., 0., 0., -1.)).vector();
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let gram = Matrix2::new(dot(a, a), dot(a, b), dot(a, b), dot(b, b));
    let eig = SymmetricEigen::new(gram);
    let imin = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    let v = eig.eigenvectors.column(imin);
    let tau = ExtReal::from_ratio(v[0], v[1]).unwrap_or(ExtReal::Infinity);

    let x = coupler * cylinder(tau, 0.);
    let xk = x.primal * Quaternion::new(0., 0., 0., 1.);
    let s = if xk.norm_sqr() > 0. { x.dual.dot(xk) / xk.norm_sqr() } else { 0. };
    (tau, s)
}

/// One sample of a traced trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub point: [f64; 3],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    /// Sorted by `t`.
    pub samples: Vec<TraceSample>,
    pub skipped: Vec<(f64, SampleSkip)>,
}

impl Trace {
    pub fn points(&self) -> Vec<[f64; 3]> {
        self.samples.iter().map(|s| s.point).collect()
    }
}

/// Moves `point` with the coupler along a mode curve. Samples where the
/// curve has no configuration are skipped and recorded.
pub fn trace_point<F>(f: &Factorization, curve: F, point: [f64; 3], params: &[f64]) -> Trace
where
    F: Fn(f64) -> Result<JointValues, SampleSkip>,
{
    let mut params = params.to_vec();
    params.sort_by(f64::total_cmp);
    let mut trace = Trace::default();
    for t in params {
        let jv = match curve(t) {
            Ok(jv) => jv,
            Err(skip) => {
                trace.skipped.push((t, skip));
                continue;
            }
        };
        let h = coupler_transform(f, &jv);
        let image = h.act_on_point(ProjectivePoint::from_affine(point)).ok().and_then(|p| p.to_affine());
        match image {
            Some(point) => trace.samples.push(TraceSample { t, point }),
            None => trace.skipped.push((t, SampleSkip::Indeterminate)),
        }
    }
    trace
}

/// `n` parameters covering the whole projective line once:
/// `tan(θ/2)` for `θ` at the midpoints of `n` equal steps in `(−π, π)`.
/// Increasing, and never exactly `∞`.
pub fn full_circle_samples(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let theta = -PI + (i as f64 + 0.5) * 2. * PI / n as f64;
            (theta / 2.).tan()
        })
        .collect()
}

/// `n` equally spaced parameters in `[a, b]`.
pub fn linear_samples(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
