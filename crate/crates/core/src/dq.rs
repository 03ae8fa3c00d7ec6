//! Quaternions, dual quaternions and the rigid displacements they encode.
//!
//! A dual quaternion `p + εd` holds the Study parameters of a displacement.
//! Scalar multiples describe the same displacement, so comparisons go
//! through [`DualQuaternion::canonical`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::DqError;
use crate::DEFAULT_TOL;

/// Real quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0., 0., 0., 0.);
    pub const ONE: Self = Self::new(1., 0., 0., 0.);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn scalar(w: f64) -> Self {
        Self::new(w, 0., 0., 0.)
    }

    pub const fn from_vector(v: [f64; 3]) -> Self {
        Self::new(0., v[0], v[1], v[2])
    }

    #[inline]
    pub fn vector(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Euclidean inner product of the coefficient vectors.
    #[inline]
    pub fn dot(self, rhs: Self) -> f64 {
        self.w * rhs.w + self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0., |m, v| f64::max(m, v.abs()))
    }

    #[inline]
    pub fn scale(self, k: f64) -> Self {
        Self::new(self.w * k, self.x * k, self.y * k, self.z * k)
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

impl Mul for Quaternion {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Self;

    fn add(self, b: Self) -> Self {
        Self::new(self.w + b.w, self.x + b.x, self.y + b.y, self.z + b.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;

    fn sub(self, b: Self) -> Self {
        Self::new(self.w - b.w, self.x - b.x, self.y - b.y, self.z - b.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.)
    }
}

/// Dual number `re + ε du` with `ε² = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DualNumber {
    pub re: f64,
    pub du: f64,
}

impl DualNumber {
    pub const fn new(re: f64, du: f64) -> Self {
        Self { re, du }
    }
}

impl Mul for DualNumber {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        Self::new(self.re * b.re, self.re * b.du + self.du * b.re)
    }
}

/// Dual quaternion `p + εd`.
///
/// Coefficient order everywhere in this crate is
/// `(p0, p1, p2, p3, d0, d1, d2, d3)`, i.e. the units
/// `1, i, j, k, ε, εi, εj, εk`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DualQuaternion {
    pub primal: Quaternion,
    pub dual: Quaternion,
}

impl DualQuaternion {
    pub const ZERO: Self = Self::new(Quaternion::ZERO, Quaternion::ZERO);
    pub const ONE: Self = Self::real(1.);
    pub const I: Self = Self::from_coeffs([0., 1., 0., 0., 0., 0., 0., 0.]);
    pub const J: Self = Self::from_coeffs([0., 0., 1., 0., 0., 0., 0., 0.]);
    pub const K: Self = Self::from_coeffs([0., 0., 0., 1., 0., 0., 0., 0.]);
    pub const EPS: Self = Self::from_coeffs([0., 0., 0., 0., 1., 0., 0., 0.]);

    pub const fn new(primal: Quaternion, dual: Quaternion) -> Self {
        Self { primal, dual }
    }

    pub const fn real(v: f64) -> Self {
        Self::new(Quaternion::scalar(v), Quaternion::ZERO)
    }

    pub const fn from_coeffs(c: [f64; 8]) -> Self {
        Self::new(
            Quaternion::new(c[0], c[1], c[2], c[3]),
            Quaternion::new(c[4], c[5], c[6], c[7]),
        )
    }

    pub fn coeffs(self) -> [f64; 8] {
        let (p, d) = (self.primal, self.dual);
        [p.w, p.x, p.y, p.z, d.w, d.x, d.y, d.z]
    }

    /// `ε·self`: moves the primal part into the dual slot.
    pub fn eps(self) -> Self {
        Self::new(Quaternion::ZERO, self.primal)
    }

    /// Negates the vector parts of primal and dual quaternion.
    pub fn conj(self) -> Self {
        Self::new(self.primal.conj(), self.dual.conj())
    }

    /// `h·conj(h)` as a dual number. The vector parts of this product vanish
    /// identically, so only the scalar slots are returned.
    pub fn norm(self) -> DualNumber {
        let (p, d) = (self.primal, self.dual);
        DualNumber::new(p.norm_sqr(), 2. * p.dot(d))
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.primal.scale(k), self.dual.scale(k))
    }

    pub fn max_abs(self) -> f64 {
        self.primal.max_abs().max(self.dual.max_abs())
    }

    pub fn is_finite(self) -> bool {
        self.primal.is_finite() && self.dual.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.max_abs() == 0.
    }

    /// True iff the norm is real (Study condition) within `tol` and the primal
    /// part does not vanish. The test runs on the max-abs normalized
    /// representative so it is independent of the scale of `self`.
    pub fn is_study(self, tol: f64) -> bool {
        let m = self.max_abs();
        if !(m > 0.) || !m.is_finite() {
            return false;
        }
        let h = self.scale(1. / m);
        h.primal.max_abs() > tol && h.norm().du.abs() <= tol
    }

    /// Deterministic projective representative: divide by the coefficient of
    /// largest magnitude, then make the first nonzero coefficient positive.
    /// The zero dual quaternion is returned unchanged.
    pub fn canonical(self) -> Self {
        let c = self.coeffs();
        let Some(big) = c
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .filter(|v| *v != 0.)
        else {
            return self;
        };
        let mut out = c.map(|v| v / big.abs());
        // coefficients this small are rounding noise, not sign carriers
        if let Some(first) = out.iter().copied().find(|v| v.abs() > 1e-12) {
            if first < 0. {
                out = out.map(|v| -v);
            }
        }
        Self::from_coeffs(out)
    }

    /// Projective equality: `self = λ·other` for some real `λ ≠ 0`, compared
    /// coefficientwise after max-abs normalization. Both signs of `λ` are
    /// tried, which agrees with comparing canonical representatives except
    /// when the first nonzero coefficient is at rounding level.
    pub fn equiv(self, other: Self, tol: f64) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let a = self.scale(1. / self.max_abs()).coeffs();
        let b = other.scale(1. / other.max_abs()).coeffs();
        max_abs_diff(a, b).min(max_abs_diff(a, b.map(|v| -v))) <= tol
    }

    /// Image of a point under the displacement `self`, computed as
    /// `(p − εd)(x0 + εx)(p̄ + εd̄)`.
    pub fn act_on_point(self, pt: ProjectivePoint) -> Result<ProjectivePoint, DqError> {
        if self.primal.max_abs() == 0. {
            return Err(DqError::ZeroPrimal);
        }
        let left = Self::new(self.primal, -self.dual);
        let embedded = Self::new(
            Quaternion::scalar(pt.x0),
            Quaternion::new(0., pt.x1, pt.x2, pt.x3),
        );
        let r = left * embedded * self.conj();
        Ok(ProjectivePoint::new(r.primal.w, r.dual.x, r.dual.y, r.dual.z))
    }

    /// Axis of the linear motion polynomial `t − self`.
    ///
    /// Rotations give the Plücker line `[p1, p2, p3, −d1, −d2, −d3]`,
    /// translations (vanishing primal vector) the direction `[d1, d2, d3]`.
    pub fn axis_of_linear(self) -> Result<LinearAxis, DqError> {
        let (p, d) = (self.primal, self.dual);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if d.w.abs() > DEFAULT_TOL * scale {
            return Err(DqError::NonzeroDualScalar(d.w));
        }
        let dir = p.vector();
        if dir.iter().all(|v| v.abs() <= DEFAULT_TOL * scale) {
            let t = d.vector();
            if t.iter().all(|v| *v == 0.) {
                return Err(DqError::DegenerateLinear);
            }
            return Ok(LinearAxis::Translation(t));
        }
        let moment = d.vector().map(|v| -v);
        Ok(LinearAxis::Rotation(PlueckerLine::new(dir, moment)?))
    }
}

impl fmt::Display for DualQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const UNITS: [&str; 8] = ["", "i", "j", "k", "ε", "εi", "εj", "εk"];
        let mut first = true;
        for (c, u) in self.coeffs().iter().zip(UNITS) {
            if *c == 0. {
                continue;
            }
            if first {
                write!(f, "{c}{u}")?;
            } else if *c < 0. {
                write!(f, " - {}{u}", -c)?;
            } else {
                write!(f, " + {c}{u}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Mul for DualQuaternion {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        Self::new(
            self.primal * b.primal,
            self.primal * b.dual + self.dual * b.primal,
        )
    }
}

impl Mul<f64> for DualQuaternion {
    type Output = Self;

    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl Add for DualQuaternion {
    type Output = Self;

    fn add(self, b: Self) -> Self {
        Self::new(self.primal + b.primal, self.dual + b.dual)
    }
}

impl AddAssign for DualQuaternion {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl Sub for DualQuaternion {
    type Output = Self;

    fn sub(self, b: Self) -> Self {
        Self::new(self.primal - b.primal, self.dual - b.dual)
    }
}

impl Neg for DualQuaternion {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.)
    }
}

pub(crate) fn max_abs_diff<const N: usize>(a: [f64; N], b: [f64; N]) -> f64 {
    a.iter().zip(b).fold(0., |m, (x, y)| f64::max(m, (x - y).abs()))
}

/// Point `[x0, x1, x2, x3]` of projective three-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectivePoint {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl ProjectivePoint {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub const fn from_affine(p: [f64; 3]) -> Self {
        Self::new(1., p[0], p[1], p[2])
    }

    /// `None` for points at infinity.
    pub fn to_affine(self) -> Option<[f64; 3]> {
        (self.x0 != 0.).then(|| [self.x1 / self.x0, self.x2 / self.x0, self.x3 / self.x0])
    }
}

/// Spatial line in Plücker coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlueckerLine {
    direction: [f64; 3],
    moment: [f64; 3],
}

impl PlueckerLine {
    pub fn new(direction: [f64; 3], moment: [f64; 3]) -> Result<Self, DqError> {
        let dn = norm3(direction);
        if !(dn > 0.) || !dn.is_finite() || moment.iter().any(|v| !v.is_finite()) {
            return Err(DqError::ZeroDirection);
        }
        let scale = dn * norm3(moment).max(dn);
        let pl = dot3(direction, moment);
        if pl.abs() > DEFAULT_TOL * scale {
            return Err(DqError::PlueckerCondition(pl));
        }
        Ok(Self { direction, moment })
    }

    pub const fn z_axis() -> Self {
        Self { direction: [0., 0., 1.], moment: [0.; 3] }
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    pub fn moment(&self) -> [f64; 3] {
        self.moment
    }

    pub fn coords(&self) -> [f64; 6] {
        let (d, m) = (self.direction, self.moment);
        [d[0], d[1], d[2], m[0], m[1], m[2]]
    }

    /// Unit direction, sign fixed so the first nonzero direction entry is positive.
    pub fn normalized(&self) -> Self {
        let n = norm3(self.direction);
        let first = self.direction.iter().copied().find(|v| v.abs() > 1e-12 * n).unwrap_or(1.);
        let k = first.signum() / n;
        Self {
            direction: self.direction.map(|v| v * k),
            moment: self.moment.map(|v| v * k),
        }
    }

    /// Same line, ignoring scale and orientation.
    pub fn same_line(&self, other: &Self, tol: f64) -> bool {
        max_abs_diff(self.normalized().coords(), other.normalized().coords()) <= tol
    }

    /// Point on the line closest to the origin, `d × m / |d|²`.
    pub fn foot(&self) -> [f64; 3] {
        let n2 = dot3(self.direction, self.direction);
        cross3(self.direction, self.moment).map(|v| v / n2)
    }
}

/// What a monic linear motion polynomial `t − h` describes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinearAxis {
    Rotation(PlueckerLine),
    Translation([f64; 3]),
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    type Dq = DualQuaternion;

    #[test]
    fn unit_products() {
        assert_eq!(Dq::I * Dq::J, Dq::K);
        assert_eq!(Dq::J * Dq::K, Dq::I);
        assert_eq!(Dq::K * Dq::I, Dq::J);
        assert_eq!(Dq::J * Dq::I, -Dq::K);
        assert_eq!(Dq::I * Dq::I, Dq::real(-1.));
        assert_eq!(Dq::I * Dq::J * Dq::K, Dq::real(-1.));
        assert_eq!(Dq::EPS * Dq::EPS, Dq::ZERO);
        // ε central
        assert_eq!(Dq::K * Dq::I.eps(), Dq::J.eps());
        assert_eq!(Dq::EPS * Dq::K, Dq::K * Dq::EPS);
    }

    #[test]
    fn eps_squared_vanishes_in_product() {
        let a = Dq::ONE + Dq::I.eps();
        let b = Dq::ONE + Dq::J.eps();
        assert_eq!(a * b, Dq::ONE + Dq::I.eps() + Dq::J.eps());
    }

    #[test]
    fn conjugation() {
        let h = Dq::ONE + Dq::I + Dq::J.eps();
        assert_eq!(h.conj(), Dq::ONE - Dq::I - Dq::J.eps());
        assert_eq!(Dq::real(5.).conj(), Dq::real(5.));
        assert_eq!((Dq::I * Dq::J).conj(), Dq::J.conj() * Dq::I.conj());
        assert_eq!((Dq::I * Dq::J).conj(), -Dq::K);
    }

    #[test]
    fn norms() {
        assert_eq!((Dq::ONE + Dq::I * 2.).norm(), DualNumber::new(5., 0.));
        assert_eq!((Dq::K + Dq::I.eps()).norm(), DualNumber::new(1., 0.));
        assert_eq!((Dq::ONE + Dq::EPS).norm(), DualNumber::new(1., 2.));
        // the scalar shortcut agrees with the full product
        let h = Dq::from_coeffs([0.3, -1.2, 0.5, 2., 0.7, 0.1, -0.4, 1.1]);
        let full = h * h.conj();
        let n = h.norm();
        assert!((full.primal.w - n.re).abs() < 1e-14);
        assert!((full.dual.w - n.du).abs() < 1e-14);
        assert!(full.primal.vector().iter().chain(&full.dual.vector()).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn study_condition() {
        assert!((Dq::K + Dq::I.eps()).is_study(DEFAULT_TOL));
        assert!(!(Dq::ONE + Dq::EPS).is_study(DEFAULT_TOL));
        assert!(Dq::real(-3.).is_study(DEFAULT_TOL));
        assert!(!Dq::ZERO.is_study(DEFAULT_TOL));
        // pure dual: primal vanishes
        assert!(!Dq::K.eps().is_study(DEFAULT_TOL));
    }

    #[test]
    fn half_turn_about_z() {
        let img = (-Dq::K).act_on_point(ProjectivePoint::new(1., 1., 0., 0.)).unwrap();
        assert_eq!(img.to_affine().unwrap(), [-1., -0., 0.]);
        let pt = ProjectivePoint::new(1., 0.3, -2., 5.);
        assert_eq!(Dq::ONE.act_on_point(pt).unwrap(), pt);
    }

    #[test]
    fn translation_moves_origin_along_z() {
        let h = Dq::ONE + Dq::K.eps() * 0.5;
        let img = h.act_on_point(ProjectivePoint::from_affine([0.; 3])).unwrap();
        let [x, y, z] = img.to_affine().unwrap();
        assert_eq!((x, y), (0., 0.));
        assert!(z.abs() > 0.5);
    }

    #[test]
    fn zero_primal_is_rejected() {
        assert_eq!(
            Dq::EPS.act_on_point(ProjectivePoint::from_affine([0.; 3])),
            Err(DqError::ZeroPrimal)
        );
    }

    #[test]
    fn linear_axes() {
        let h = Dq::K + Dq::I.eps();
        let LinearAxis::Rotation(l) = h.axis_of_linear().unwrap() else { panic!() };
        assert_eq!(l.coords(), [0., 0., 1., -1., -0., -0.]);
        let LinearAxis::Rotation(l) = Dq::K.axis_of_linear().unwrap() else { panic!() };
        assert!(l.same_line(&PlueckerLine::z_axis(), 0.));
        assert_eq!(Dq::K.eps().axis_of_linear().unwrap(), LinearAxis::Translation([0., 0., 1.]));
        assert!(matches!(
            (Dq::K + Dq::EPS).axis_of_linear(),
            Err(DqError::NonzeroDualScalar(_))
        ));
    }

    #[test]
    fn plucker_validation() {
        assert!(PlueckerLine::new([0.; 3], [1., 0., 0.]).is_err());
        assert!(matches!(
            PlueckerLine::new([1., 0., 0.], [1., 0., 0.]),
            Err(DqError::PlueckerCondition(_))
        ));
        let l = PlueckerLine::new([0., 0., -2.], [2., 0., 0.]).unwrap();
        assert_eq!(l.normalized().coords(), [0., 0., 1., -1., 0., 0.]);
        // line parallel to z through (0, 1, 0): m = p × d = (1, 0, 0)
        assert_eq!(PlueckerLine::new([0., 0., 1.], [1., 0., 0.]).unwrap().foot(), [0., 1., 0.]);
    }

    #[test]
    fn equivalence_up_to_scale() {
        assert!((Dq::ONE - Dq::K).equiv(Dq::real(-2.) + Dq::K * 2., DEFAULT_TOL));
        assert!(!Dq::I.equiv(Dq::J, DEFAULT_TOL));
        assert!(!Dq::I.equiv(Dq::ZERO, DEFAULT_TOL));
        let c = (Dq::K * -4. + Dq::EPS).canonical();
        assert_eq!(c.coeffs(), [0., 0., 0., 1., -0.25, 0., 0., 0.]);
    }

    #[test]
    fn display() {
        assert_eq!(Dq::ZERO.to_string(), "0");
        assert_eq!((Dq::ONE - Dq::K + Dq::I.eps() * 0.5).to_string(), "1 - 1k + 0.5εi");
    }
}
