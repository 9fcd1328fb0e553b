use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Scalar;

/// Truncated univariate Taylor series with `N` coefficients: the value
/// and the first `N-1` derivatives at a point, in Taylor normalization
/// (`coeff[k] = f^(k)/k!`). Arithmetic is exact modulo the truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor<const N: usize, S>(pub [S; N]);

impl<const N: usize, S: Scalar> Taylor<N, S> {
    pub fn constant(v: S) -> Self {
        let mut c = [S::zero(); N];
        c[0] = v;
        Taylor(c)
    }

    /// `v + t`: seed for expanding a function of one variable around `v`.
    pub fn variable(v: S) -> Self {
        let mut c = [S::zero(); N];
        c[0] = v;
        if N > 1 {
            c[1] = S::one();
        }
        Taylor(c)
    }

    pub fn coeff(&self, k: usize) -> S {
        self.0[k]
    }

    /// k-th derivative at the expansion point (`coeff * k!`).
    pub fn derivative(&self, k: usize) -> S {
        let mut fact = 1.0;
        for m in 2..=k {
            fact *= m as f64;
        }
        self.0[k].scale(fact)
    }

    /// Coefficients of the formal derivative (one order shorter; the last
    /// slot is zero).
    fn diff(&self) -> [S; N] {
        let mut d = [S::zero(); N];
        for m in 0..N - 1 {
            d[m] = self.0[m + 1].scale((m + 1) as f64);
        }
        d
    }

    /// Antiderivative with constant term `y0`, given the derivative's
    /// coefficients.
    fn integrate(y0: S, q: &[S; N]) -> Self {
        let mut y = [S::zero(); N];
        y[0] = y0;
        for k in 1..N {
            y[k] = q[k - 1].scale(1.0 / k as f64);
        }
        Taylor(y)
    }

    fn conv_at(a: &[S; N], b: &[S; N], k: usize) -> S {
        let mut acc = S::zero();
        for j in 0..=k {
            acc = acc + a[j] * b[k - j];
        }
        acc
    }

    /// Composition `self(inner(t))` where `inner` has zero constant term.
    pub fn compose(&self, inner: &Taylor<N, S>) -> Self {
        debug_assert!(inner.0[0].re().abs() < 1e-300);
        let mut r = Taylor::constant(self.0[N - 1]);
        for k in (0..N - 1).rev() {
            r = r * *inner;
            r.0[0] = r.0[0] + self.0[k];
        }
        r
    }

    /// Compositional inverse of a series with zero constant term and an
    /// invertible linear coefficient, by Newton iteration in the series
    /// ring.
    pub fn invert(&self) -> Self {
        debug_assert!(self.0[0].re().abs() < 1e-300);
        let mut t = Taylor::constant(S::zero());
        if N > 1 {
            t.0[1] = self.0[1].recip();
        }
        // Each step doubles the number of correct coefficients.
        let mut correct = 2usize;
        while correct < N {
            let st = self.compose(&t);
            let mut resid = st;
            resid.0[1] = resid.0[1] - S::one(); // s(t(x)) - x
            let dst = Taylor(self.diff()).compose(&t);
            t = t - resid / dst;
            correct *= 2;
        }
        t
    }
}

impl<const N: usize, S: Scalar> Add for Taylor<N, S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.0;
        for k in 0..N {
            c[k] = c[k] + rhs.0[k];
        }
        Taylor(c)
    }
}

impl<const N: usize, S: Scalar> Sub for Taylor<N, S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.0;
        for k in 0..N {
            c[k] = c[k] - rhs.0[k];
        }
        Taylor(c)
    }
}

impl<const N: usize, S: Scalar> Neg for Taylor<N, S> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut c = self.0;
        for k in 0..N {
            c[k] = -c[k];
        }
        Taylor(c)
    }
}

impl<const N: usize, S: Scalar> Mul for Taylor<N, S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [S::zero(); N];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = Self::conv_at(&self.0, &rhs.0, k);
        }
        Taylor(c)
    }
}

impl<const N: usize, S: Scalar> Div for Taylor<N, S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv0 = rhs.0[0].recip();
        let mut q = [S::zero(); N];
        for k in 0..N {
            let mut acc = self.0[k];
            for j in 0..k {
                acc = acc - q[j] * rhs.0[k - j];
            }
            q[k] = acc * inv0;
        }
        Taylor(q)
    }
}

impl<const N: usize, S: Scalar> Scalar for Taylor<N, S> {
    fn from_f64(x: f64) -> Self {
        Taylor::constant(S::from_f64(x))
    }

    fn re(&self) -> f64 {
        self.0[0].re()
    }

    fn sqrt(self) -> Self {
        let s0 = self.0[0].sqrt();
        let half = s0.scale(2.0).recip();
        let mut s = [S::zero(); N];
        s[0] = s0;
        for k in 1..N {
            let mut acc = self.0[k];
            for j in 1..k {
                acc = acc - s[j] * s[k - j];
            }
            s[k] = acc * half;
        }
        Taylor(s)
    }

    fn exp(self) -> Self {
        let mut e = [S::zero(); N];
        e[0] = self.0[0].exp();
        for k in 1..N {
            let mut acc = S::zero();
            for j in 1..=k {
                acc = acc + self.0[j].scale(j as f64) * e[k - j];
            }
            e[k] = acc.scale(1.0 / k as f64);
        }
        Taylor(e)
    }

    fn ln(self) -> Self {
        let q = Taylor(self.diff()) / self;
        Self::integrate(self.0[0].ln(), &q.0)
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }

    fn tan(self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }

    fn atan(self) -> Self {
        let w = Self::one() + self * self;
        let q = Taylor(self.diff()) / w;
        Self::integrate(self.0[0].atan(), &q.0)
    }

    fn acos(self) -> Self {
        let w = Self::one() - self * self;
        let q = Taylor(self.diff()) / w.sqrt();
        Self::integrate(self.0[0].acos(), &(-q).0)
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let neg = n < 0;
        let mut m = n.unsigned_abs();
        let mut base = self;
        let mut acc = Self::one();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            m >>= 1;
        }
        if neg {
            acc.recip()
        } else {
            acc
        }
    }

    fn powf(self, p: f64) -> Self {
        (self.ln().scale(p)).exp()
    }
}

impl<const N: usize, S: Scalar> Taylor<N, S> {
    fn sin_cos(self) -> (Self, Self) {
        let mut s = [S::zero(); N];
        let mut c = [S::zero(); N];
        s[0] = self.0[0].sin();
        c[0] = self.0[0].cos();
        for k in 1..N {
            let mut sa = S::zero();
            let mut ca = S::zero();
            for j in 1..=k {
                let aj = self.0[j].scale(j as f64);
                sa = sa + aj * c[k - j];
                ca = ca - aj * s[k - j];
            }
            s[k] = sa.scale(1.0 / k as f64);
            c[k] = ca.scale(1.0 / k as f64);
        }
        (Taylor(s), Taylor(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type T5 = Taylor<5, f64>;

    fn assert_series(actual: T5, expect: [f64; 5], tol: f64) {
        for k in 0..5 {
            assert!(
                (actual.0[k] - expect[k]).abs() <= tol,
                "coeff {k}: {} vs {}",
                actual.0[k],
                expect[k]
            );
        }
    }

    #[test]
    fn exp_series_matches_hand_expansion() {
        // exp(0.3 + t), Taylor coefficients e^0.3 / k!
        let x = T5::variable(0.3);
        let e = x.exp();
        let e0 = 0.3f64.exp();
        assert_series(e, [e0, e0, e0 / 2.0, e0 / 6.0, e0 / 24.0], 1e-14);
    }

    #[test]
    fn ln_and_exp_are_inverse() {
        let x = T5::variable(1.7);
        let y = x.ln().exp();
        assert_series(y, [1.7, 1.0, 0.0, 0.0, 0.0], 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = T5::variable(2.0);
        let y = x.sqrt();
        assert_series(y * y, [2.0, 1.0, 0.0, 0.0, 0.0], 1e-13);
    }

    #[test]
    fn atan_derivative_is_rational() {
        // d/dt atan(a + t) = 1/(1 + (a+t)^2); check first two coefficients.
        let a = 0.7;
        let y = T5::variable(a).atan();
        assert!((y.0[0] - a.atan()).abs() < 1e-15);
        assert!((y.0[1] - 1.0 / (1.0 + a * a)).abs() < 1e-15);
        // second derivative: -2a/(1+a^2)^2, coefficient is half that
        let d2 = -2.0 * a / (1.0 + a * a).powi(2);
        assert!((y.0[2] - d2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn acos_matches_finite_difference() {
        let a = 0.4;
        let y = T5::variable(a).acos();
        let h = 1e-6;
        let fd = ((a + h).acos() - (a - h).acos()) / (2.0 * h);
        assert!((y.0[1] - fd).abs() < 1e-9);
    }

    #[test]
    fn tan_of_sum() {
        let a = 0.5;
        let y = T5::variable(a).tan();
        assert!((y.0[0] - a.tan()).abs() < 1e-15);
        let sec2 = 1.0 / a.cos().powi(2);
        assert!((y.0[1] - sec2).abs() < 1e-13);
    }

    #[test]
    fn division_recovers_quotient() {
        let num = T5::variable(1.0) * T5::variable(1.0);
        let den = T5::variable(1.0);
        assert_series(num / den, [1.0, 1.0, 0.0, 0.0, 0.0], 1e-14);
    }

    #[test]
    fn compose_polynomial() {
        // f(v) = v^2 at v0 = 2 composed with inner t + 3t^2
        let f = T5::variable(2.0).powi(2); // (2+t)^2 = 4 + 4t + t^2
        let inner = Taylor([0.0, 1.0, 3.0, 0.0, 0.0]);
        let g = f.compose(&inner);
        // (2 + t + 3t^2)^2 = 4 + 4t + 13t^2 + 6t^3 + 9t^4
        assert_series(g, [4.0, 4.0, 13.0, 6.0, 9.0], 1e-13);
    }

    #[test]
    fn series_inversion_round_trips() {
        let s = Taylor([0.0, 2.0, -0.3, 0.08, 0.01]);
        let t = s.invert();
        let id = s.compose(&t);
        assert_series(id, [0.0, 1.0, 0.0, 0.0, 0.0], 1e-12);
    }

    #[test]
    fn powf_matches_powi_for_integer_exponent() {
        let x = T5::variable(1.3);
        let a = x.powf(3.0);
        let b = x.powi(3);
        for k in 0..5 {
            assert!((a.0[k] - b.0[k]).abs() < 1e-12);
        }
    }
}
