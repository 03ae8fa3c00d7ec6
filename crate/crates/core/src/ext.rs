//! Joint parameters on the extended real line.
//!
//! A revolute joint `t − h` is driven by its tan-half-angle parameter `v`;
//! `v = ∞` is the identity rotation. Values are carried as finite reals or
//! `Infinity` and converted to homogeneous pairs `(num, den)` for evaluation.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    /// `num / den`, or `Infinity` when only the denominator vanishes
    /// (relative to the numerator). `None` for `0 / 0`.
    pub fn from_ratio(num: f64, den: f64) -> Option<Self> {
        if num == 0. && den == 0. || num.is_nan() || den.is_nan() {
            return None;
        }
        if den.abs() <= f64::EPSILON * num.abs() || num.is_infinite() {
            return Some(Self::Infinity);
        }
        Some(Self::Finite(num / den))
    }

    pub fn homogeneous(self) -> (f64, f64) {
        match self {
            Self::Finite(v) => (v, 1.),
            Self::Infinity => (1., 0.),
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v.is_infinite() {
            Self::Infinity
        } else {
            Self::Finite(v)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}
