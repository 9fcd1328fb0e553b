use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Scalar;

/// Forward-mode number carrying a value and `N` exact partial
/// derivatives. Seeding `d[i] = 1` on an input makes every downstream
/// quantity carry its partial with respect to that input.
#[derive(Clone, Copy, Debug)]
pub struct Grad<const N: usize, S> {
    pub v: S,
    pub d: [S; N],
}

impl<const N: usize, S: Scalar> Grad<N, S> {
    pub fn constant(v: S) -> Self {
        Grad {
            v,
            d: [S::zero(); N],
        }
    }

    /// Value seeded as the `i`-th independent variable.
    pub fn variable(v: S, i: usize) -> Self {
        let mut d = [S::zero(); N];
        d[i] = S::one();
        Grad { v, d }
    }

    fn chain(self, v: S, dv: S) -> Self {
        let mut d = [S::zero(); N];
        for i in 0..N {
            d[i] = self.d[i] * dv;
        }
        Grad { v, d }
    }
}

impl<const N: usize, S: Scalar> Add for Grad<N, S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut d = self.d;
        for i in 0..N {
            d[i] = d[i] + rhs.d[i];
        }
        Grad {
            v: self.v + rhs.v,
            d,
        }
    }
}

impl<const N: usize, S: Scalar> Sub for Grad<N, S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut d = self.d;
        for i in 0..N {
            d[i] = d[i] - rhs.d[i];
        }
        Grad {
            v: self.v - rhs.v,
            d,
        }
    }
}

impl<const N: usize, S: Scalar> Neg for Grad<N, S> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut d = self.d;
        for i in 0..N {
            d[i] = -d[i];
        }
        Grad { v: -self.v, d }
    }
}

impl<const N: usize, S: Scalar> Mul for Grad<N, S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut d = [S::zero(); N];
        for i in 0..N {
            d[i] = self.d[i] * rhs.v + self.v * rhs.d[i];
        }
        Grad {
            v: self.v * rhs.v,
            d,
        }
    }
}

impl<const N: usize, S: Scalar> Div for Grad<N, S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.v.recip();
        let v = self.v * inv;
        let mut d = [S::zero(); N];
        for i in 0..N {
            d[i] = (self.d[i] - v * rhs.d[i]) * inv;
        }
        Grad { v, d }
    }
}

impl<const N: usize, S: Scalar> Scalar for Grad<N, S> {
    fn from_f64(x: f64) -> Self {
        Grad::constant(S::from_f64(x))
    }

    fn re(&self) -> f64 {
        self.v.re()
    }

    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, s.scale(2.0).recip())
    }

    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }

    fn ln(self) -> Self {
        self.chain(self.v.ln(), self.v.recip())
    }

    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }

    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }

    fn tan(self) -> Self {
        let t = self.v.tan();
        self.chain(t, S::one() + t * t)
    }

    fn atan(self) -> Self {
        self.chain(self.v.atan(), (S::one() + self.v * self.v).recip())
    }

    fn acos(self) -> Self {
        let w = (S::one() - self.v * self.v).sqrt();
        self.chain(self.v.acos(), -w.recip())
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        self.chain(
            self.v.powi(n),
            self.v.powi(n - 1).scale(n as f64),
        )
    }

    fn powf(self, p: f64) -> Self {
        self.chain(self.v.powf(p), self.v.powf(p - 1.0).scale(p))
    }
}
