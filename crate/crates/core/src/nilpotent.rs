//! Numbers of the form `a + b N` with `N^2 = 0`.
//!
//! These carry the Grassmann-even sector of the classical dynamics: the body is
//! the ordinary trajectory and the soul is its first-order response to the
//! grading integral `N`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NilpotentScalar {
    pub body: f64,
    pub soul: f64,
}

impl NilpotentScalar {
    pub const ZERO: Self = Self { body: 0.0, soul: 0.0 };
    /// The generator `N` itself.
    pub const N: Self = Self { body: 0.0, soul: 1.0 };

    pub const fn new(body: f64, soul: f64) -> Self {
        Self { body, soul }
    }

    pub const fn real(body: f64) -> Self {
        Self { body, soul: 0.0 }
    }

    /// Lift a scalar function: `f(a + bN) = f(a) + f'(a) b N`.
    pub fn lift(self, value: f64, derivative: f64) -> Self {
        Self::new(value, derivative * self.soul)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.body, k * self.soul)
    }
}

impl fmt::Display for NilpotentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}N", self.body, self.soul)
    }
}

impl From<f64> for NilpotentScalar {
    fn from(v: f64) -> Self {
        Self::real(v)
    }
}

impl Add for NilpotentScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.body + rhs.body, self.soul + rhs.soul)
    }
}

impl AddAssign for NilpotentScalar {
    fn add_assign(&mut self, rhs: Self) {
        self.body += rhs.body;
        self.soul += rhs.soul;
    }
}

impl Sub for NilpotentScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.body - rhs.body, self.soul - rhs.soul)
    }
}

impl Neg for NilpotentScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.body, -self.soul)
    }
}

impl Mul for NilpotentScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.body * rhs.body,
            self.body * rhs.soul + self.soul * rhs.body,
        )
    }
}

impl Mul<f64> for NilpotentScalar {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

/// Division requires an invertible body.
impl Div for NilpotentScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.body;
        Self::new(
            self.body * inv,
            (self.soul * rhs.body - self.body * rhs.soul) * inv * inv,
        )
    }
}
