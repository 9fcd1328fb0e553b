//! Scalar algebra underneath everything else in the crate.
//!
//! The same geometric formulas are evaluated over plain `f64`, over
//! truncated univariate Taylor series (derivatives along a curve), and
//! over forward-mode gradient numbers (partials with respect to chosen
//! inputs). [`Scalar`] is the common interface; the tower types nest, so
//! e.g. `Grad<12, Taylor<4, f64>>` carries a curve expansion together
//! with twelve exact partial derivatives of every coefficient.

mod grad;
mod jet;
mod taylor;

pub use grad::Grad;
pub use jet::{Jet3, Monomials, MAX_JET_ORDER};
pub use taylor::Taylor;

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic plus the elementary functions needed by the geometry and
/// Lagrangian formulas. Implemented by `f64` and lifted through
/// [`Taylor`] and [`Grad`].
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;

    /// Leading (value) part, used for branching and admissibility guards.
    fn re(&self) -> f64;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn atan(self) -> Self;
    fn acos(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    /// Multiply by an `f64` constant.
    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn acos(self) -> Self {
        f64::acos(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
}
