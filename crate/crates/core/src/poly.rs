//! Polynomials in one real indeterminate `t` with dual quaternion
//! coefficients. `t` commutes with every coefficient, the coefficients do not
//! commute with each other.

use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dq::DualQuaternion;
use crate::ext::ExtReal;

/// Dense coefficient list, index = power of `t`. Trailing zero coefficients
/// are trimmed, so the zero polynomial has no coefficients at all.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MotionPolynomial {
    coeffs: Vec<DualQuaternion>,
}

impl MotionPolynomial {
    pub fn new(mut coeffs: Vec<DualQuaternion>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(h: DualQuaternion) -> Self {
        Self::new(vec![h])
    }

    /// Real polynomial with the given coefficients (ascending powers).
    pub fn real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| DualQuaternion::real(c)).collect())
    }

    /// `t − h`.
    pub fn monic_linear(h: DualQuaternion) -> Self {
        Self::new(vec![-h, DualQuaternion::ONE])
    }

    /// Assembles a polynomial from one real coefficient list per unit
    /// `1, i, j, k, ε, εi, εj, εk` (ascending powers of `t`).
    pub fn from_components(components: [&[f64]; 8]) -> Self {
        let len = components.iter().map(|c| c.len()).max().unwrap_or(0);
        let coeffs = (0..len)
            .map(|n| {
                DualQuaternion::from_coeffs(components.map(|c| c.get(n).copied().unwrap_or(0.)))
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[DualQuaternion] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> DualQuaternion {
        self.coeffs.last().copied().unwrap_or(DualQuaternion::ZERO)
    }

    /// For a monic linear polynomial `t − h`, returns `h`.
    pub fn linear_root(&self) -> Option<DualQuaternion> {
        match self.coeffs.as_slice() {
            [c0, one] if *one == DualQuaternion::ONE => Some(-*c0),
            _ => None,
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale(k)).collect())
    }

    /// Horner evaluation at a real parameter.
    pub fn eval(&self, t: f64) -> DualQuaternion {
        self.coeffs.iter().rev().fold(DualQuaternion::ZERO, |acc, c| acc * t + *c)
    }

    /// Evaluation at the homogeneous parameter `(num : den)`, i.e.
    /// `Σ aₙ numⁿ den^(deg−n)`. Equals `den^deg · eval(num/den)`.
    pub fn eval_homogeneous(&self, num: f64, den: f64) -> DualQuaternion {
        let Some(deg) = self.degree() else {
            return DualQuaternion::ZERO;
        };
        let mut out = DualQuaternion::ZERO;
        for (n, c) in self.coeffs.iter().enumerate() {
            out += c.scale(num.powi(n as i32) * den.powi((deg - n) as i32));
        }
        out
    }

    /// Evaluation on the extended real line. At `∞` the leading coefficient
    /// is returned, which is `1` for monic factors (the limit of `(t − h)/t`).
    pub fn eval_ext(&self, t: ExtReal) -> DualQuaternion {
        match t {
            ExtReal::Finite(v) => self.eval(v),
            ExtReal::Infinity => self.leading(),
        }
    }

    /// Conjugates every coefficient.
    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// `self · conj(self)`.
    pub fn norm(&self) -> Self {
        self * &self.conj()
    }

    /// True iff the norm polynomial is real: every coefficient of
    /// `self · conj(self)` has vanishing vector and dual parts, measured
    /// relative to the largest norm coefficient.
    pub fn is_motion(&self, tol: f64) -> bool {
        let n = self.norm();
        let scale = n.coeffs.iter().map(|c| c.max_abs()).fold(1., f64::max);
        n.coeffs.iter().all(|c| {
            let [_, x, y, z, d0, d1, d2, d3] = c.coeffs();
            [x, y, z, d0, d1, d2, d3].iter().all(|v| v.abs() <= tol * scale)
        })
    }

    /// Right division by the monic linear `t − h`:
    /// `self = quotient·(t − h) + remainder`.
    pub fn div_right(&self, h: DualQuaternion) -> (Self, DualQuaternion) {
        self.div_linear(h, |q, h| q * h)
    }

    /// Left division by the monic linear `t − h`:
    /// `self = (t − h)·quotient + remainder`.
    pub fn div_left(&self, h: DualQuaternion) -> (Self, DualQuaternion) {
        self.div_linear(h, |q, h| h * q)
    }

    fn div_linear(
        &self,
        h: DualQuaternion,
        carry: impl Fn(DualQuaternion, DualQuaternion) -> DualQuaternion,
    ) -> (Self, DualQuaternion) {
        let Some(deg) = self.degree() else {
            return (Self::zero(), DualQuaternion::ZERO);
        };
        if deg == 0 {
            return (Self::zero(), self.coeffs[0]);
        }
        let mut quotient = vec![DualQuaternion::ZERO; deg];
        quotient[deg - 1] = self.coeffs[deg];
        for n in (1..deg).rev() {
            quotient[n - 1] = self.coeffs[n] + carry(quotient[n], h);
        }
        let remainder = self.coeffs[0] + carry(quotient[0], h);
        (Self::new(quotient), remainder)
    }

    /// Largest coefficientwise absolute difference.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or_default();
                let b = other.coeffs.get(i).copied().unwrap_or_default();
                (a - b).max_abs()
            })
            .fold(0., f64::max)
    }

    /// Checks `self = λ(t)·other` for a real rational `λ` by comparing both
    /// sides projectively at `n_samples` pseudo-random parameters in
    /// `[−4, 4]`. The sample sequence is fixed, so the answer is
    /// deterministic.
    pub fn proportional(&self, other: &Self, n_samples: usize, tol: f64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_da4b);
        (0..n_samples).all(|_| {
            let t = rng.random_range(-4.0..4.0);
            self.eval(t).equiv(other.eval(t), tol)
        })
    }
}

impl Mul for &MotionPolynomial {
    type Output = MotionPolynomial;

    fn mul(self, rhs: &MotionPolynomial) -> MotionPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return MotionPolynomial::zero();
        }
        let mut out = vec![DualQuaternion::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += *a * *b;
            }
        }
        MotionPolynomial::new(out)
    }
}

impl Mul for MotionPolynomial {
    type Output = MotionPolynomial;

    fn mul(self, rhs: MotionPolynomial) -> MotionPolynomial {
        &self * &rhs
    }
}

impl Add for &MotionPolynomial {
    type Output = MotionPolynomial;

    fn add(self, rhs: &MotionPolynomial) -> MotionPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        MotionPolynomial::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or_default()
                        + rhs.coeffs.get(i).copied().unwrap_or_default()
                })
                .collect(),
        )
    }
}

impl Sub for &MotionPolynomial {
    type Output = MotionPolynomial;

    fn sub(self, rhs: &MotionPolynomial) -> MotionPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &MotionPolynomial {
    type Output = MotionPolynomial;

    fn neg(self) -> MotionPolynomial {
        self.scale(-1.)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOL;

    type Dq = DualQuaternion;
    type Poly = MotionPolynomial;

    fn lin(h: Dq) -> Poly {
        Poly::monic_linear(h)
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Poly::new(vec![Dq::ONE, Dq::ZERO, Dq::ZERO]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(Poly::new(vec![Dq::ZERO]).degree(), None);
        assert!(Poly::zero().is_zero());
    }

    #[test]
    fn products() {
        let p = &lin(Dq::I) * &lin(Dq::J);
        assert_eq!(p, Poly::new(vec![Dq::K, -(Dq::I + Dq::J), Dq::ONE]));
        let a = Poly::new(vec![Dq::K, Dq::EPS, Dq::ONE]);
        assert_eq!(&a * &Poly::real(&[1.]), a);
        assert!((&a * &Poly::zero()).is_zero());
    }

    #[test]
    fn squared_factor_is_double_angle() {
        let sq = &lin(Dq::K) * &lin(Dq::K);
        assert_eq!(sq, Poly::new(vec![Dq::real(-1.), Dq::K * -2., Dq::ONE]));
        for t in [0.3, -2., 7.5] {
            let lhs = sq.eval(t);
            let rhs = lin(Dq::K).eval((t * t - 1.) / (2. * t)) * (2. * t);
            assert!((lhs - rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn evaluation() {
        let p = lin(Dq::K);
        assert_eq!(p.eval(1.), Dq::ONE - Dq::K);
        assert_eq!(p.eval_ext(ExtReal::Infinity), Dq::ONE);
        assert_eq!(p.eval_homogeneous(3., 2.), Dq::real(3.) - Dq::K * 2.);
        assert_eq!(p.eval_homogeneous(1., 0.), Dq::ONE);
        assert_eq!(Poly::zero().eval(2.), Dq::ZERO);
    }

    #[test]
    fn norm_and_conjugate() {
        assert_eq!(lin(Dq::K).norm(), Poly::real(&[1., 0., 1.]));
        let p = lin(Dq::I + Dq::J.eps());
        assert_eq!(p.conj(), Poly::new(vec![Dq::I + Dq::J.eps(), Dq::ONE]));
    }

    #[test]
    fn motion_predicate() {
        assert!(lin(Dq::K).is_motion(DEFAULT_TOL));
        assert!(!lin(Dq::K - Dq::EPS).is_motion(DEFAULT_TOL));
        assert!(Poly::real(&[3., -1., 2.]).is_motion(DEFAULT_TOL));
    }

    #[test]
    fn division() {
        let p = &lin(Dq::I) * &lin(Dq::J);
        let (q, r) = p.div_right(Dq::J);
        assert_eq!((q, r), (lin(Dq::I), Dq::ZERO));
        let (q, r) = p.div_right(Dq::I);
        assert_eq!(r, Dq::K * 2.);
        assert_eq!(&(&q * &lin(Dq::I)) + &Poly::constant(r), p);
        let (q, r) = p.div_left(Dq::I);
        assert_eq!((q, r), (lin(Dq::J), Dq::ZERO));
        assert_eq!(Poly::constant(Dq::K).div_right(Dq::I), (Poly::zero(), Dq::K));
    }

    #[test]
    fn components_builder() {
        let p = Poly::from_components([&[1., 2.], &[], &[], &[0., 0., 3.], &[], &[], &[], &[4.]]);
        assert_eq!(p.coeffs()[0], Dq::ONE + Dq::K.eps() * 4.);
        assert_eq!(p.coeffs()[2], Dq::K * 3.);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn proportionality() {
        let m = Poly::new(vec![Dq::K * -1. + Dq::EPS * 2., Dq::ONE + Dq::K.eps(), -Dq::K, Dq::ONE]);
        let scaled = &Poly::real(&[1., 0., 1.]) * &m;
        assert!(scaled.proportional(&m, 20, DEFAULT_TOL));
        assert!(m.proportional(&m, 20, DEFAULT_TOL));
        assert!(!m.proportional(&m.conj(), 20, DEFAULT_TOL));
    }
}
