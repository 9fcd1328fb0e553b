use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use super::{Scalar, Taylor};

/// Highest supported derivative order for trivariate jets.
pub const MAX_JET_ORDER: usize = 6;

/// Coefficient layout shared by all jets: multi-indices `(i, j, k)` with
/// `i + j + k <= MAX_JET_ORDER` in graded order, so the first
/// `count_upto(d)` entries are exactly the indices of degree `<= d`.
struct Tables {
    idx: Vec<[usize; 3]>,
    pos: [[[usize; MAX_JET_ORDER + 1]; MAX_JET_ORDER + 1]; MAX_JET_ORDER + 1],
    upto: [usize; MAX_JET_ORDER + 1],
    alpha_factorial: Vec<f64>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut idx = Vec::new();
        let mut pos = [[[usize::MAX; MAX_JET_ORDER + 1]; MAX_JET_ORDER + 1]; MAX_JET_ORDER + 1];
        let mut upto = [0usize; MAX_JET_ORDER + 1];
        for deg in 0..=MAX_JET_ORDER {
            for i in (0..=deg).rev() {
                for j in (0..=deg - i).rev() {
                    let k = deg - i - j;
                    pos[i][j][k] = idx.len();
                    idx.push([i, j, k]);
                }
            }
            upto[deg] = idx.len();
        }
        let factorial = |n: usize| (1..=n).map(|m| m as f64).product::<f64>();
        let alpha_factorial = idx
            .iter()
            .map(|a| factorial(a[0]) * factorial(a[1]) * factorial(a[2]))
            .collect();
        Tables {
            idx,
            pos,
            upto,
            alpha_factorial,
        }
    })
}

/// Truncated Taylor expansion of a scalar function of three variables.
/// Coefficients are in Taylor normalization; [`Jet3::partial`] converts
/// to mixed partial derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet3 {
    order: usize,
    c: Vec<f64>,
}

impl Jet3 {
    pub fn zero(order: usize) -> Self {
        assert!(order <= MAX_JET_ORDER);
        Jet3 {
            order,
            c: vec![0.0; tables().upto[order]],
        }
    }

    pub fn constant(v: f64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.c[0] = v;
        j
    }

    /// The coordinate function `x_d` expanded at `x0`.
    pub fn coordinate(x0: f64, d: usize, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.c[1 + d] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Mixed partial `d^alpha f` at the expansion point.
    pub fn partial(&self, alpha: [usize; 3]) -> f64 {
        let t = tables();
        let p = t.pos[alpha[0]][alpha[1]][alpha[2]];
        self.c[p] * t.alpha_factorial[p]
    }

    /// Taylor coefficient at a multi-index.
    pub fn coeff(&self, alpha: [usize; 3]) -> f64 {
        self.c[tables().pos[alpha[0]][alpha[1]][alpha[2]]]
    }

    /// All multi-indices of this jet's order, in storage order.
    pub fn indices(order: usize) -> &'static [[usize; 3]] {
        &tables().idx[..tables().upto[order]]
    }

    pub fn scale(&self, k: f64) -> Self {
        Jet3 {
            order: self.order,
            c: self.c.iter().map(|v| v * k).collect(),
        }
    }

    pub fn add_constant(mut self, k: f64) -> Self {
        self.c[0] += k;
        self
    }

    /// Derivative with respect to coordinate `d`; drops one order.
    pub fn derivative(&self, d: usize) -> Self {
        assert!(self.order >= 1);
        let t = tables();
        let mut out = Jet3::zero(self.order - 1);
        for (p, alpha) in t.idx[..t.upto[self.order - 1]].iter().enumerate() {
            let mut up = *alpha;
            up[d] += 1;
            out.c[p] = self.c[t.pos[up[0]][up[1]][up[2]]] * up[d] as f64;
        }
        out
    }

    /// Truncate to a lower order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order <= self.order);
        Jet3 {
            order,
            c: self.c[..tables().upto[order]].to_vec(),
        }
    }

    fn nilpotent_part(&self) -> Self {
        let mut h = self.clone();
        h.c[0] = 0.0;
        h
    }

    /// Composition with a univariate expansion given by coefficients
    /// `f_k = f^(k)(value)/k!`; computes `sum f_k (self - value)^k`.
    pub fn compose_univariate(&self, coeffs: &[f64]) -> Self {
        let h = self.nilpotent_part();
        let mut r = Jet3::constant(coeffs[self.order], self.order);
        for k in (0..self.order).rev() {
            r = (&r * &h).add_constant(coeffs[k]);
        }
        r
    }

    /// Lift a univariate function through the jet via its Taylor expansion
    /// around the jet's value.
    fn lift(&self, f: impl Fn(Taylor<{ MAX_JET_ORDER + 1 }, f64>) -> Taylor<{ MAX_JET_ORDER + 1 }, f64>) -> Self {
        let series = f(Taylor::variable(self.c[0]));
        self.compose_univariate(&series.0[..=self.order])
    }

    pub fn recip(&self) -> Self {
        self.lift(|t| t.recip())
    }

    pub fn sqrt(&self) -> Self {
        self.lift(|t| t.sqrt())
    }

    pub fn exp(&self) -> Self {
        self.lift(|t| t.exp())
    }

    pub fn ln(&self) -> Self {
        self.lift(|t| t.ln())
    }

    pub fn sin(&self) -> Self {
        self.lift(|t| t.sin())
    }

    pub fn cos(&self) -> Self {
        self.lift(|t| t.cos())
    }

    pub fn tan(&self) -> Self {
        self.lift(|t| t.tan())
    }

    pub fn atan(&self) -> Self {
        self.lift(|t| t.atan())
    }

    pub fn acos(&self) -> Self {
        self.lift(|t| t.acos())
    }

    /// Integer power, valid for any base value (including zero and
    /// negative); negative exponents require a nonzero base.
    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Jet3::constant(1.0, self.order);
        }
        let mut m = n.unsigned_abs();
        let mut base = self.clone();
        let mut acc = Jet3::constant(1.0, self.order);
        while m > 0 {
            if m & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            m >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// Real power as `exp(p ln x)`; base must be positive.
    pub fn powf(&self, p: f64) -> Self {
        self.ln().scale(p).exp()
    }

    /// Evaluate the jet polynomial at displacements `dx` in any scalar
    /// algebra, via a precomputed monomial table.
    pub fn eval_poly<S: Scalar>(&self, monomials: &Monomials<S>) -> S {
        debug_assert!(monomials.m.len() >= self.c.len());
        let mut acc = S::zero();
        for (p, &coef) in self.c.iter().enumerate() {
            if coef != 0.0 {
                acc = acc + monomials.m[p].scale(coef);
            }
        }
        acc
    }
}

impl Add for &Jet3 {
    type Output = Jet3;
    fn add(self, rhs: &Jet3) -> Jet3 {
        assert_eq!(self.order, rhs.order);
        Jet3 {
            order: self.order,
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: &Jet3) -> Jet3 {
        assert_eq!(self.order, rhs.order);
        Jet3 {
            order: self.order,
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for &Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: &Jet3) -> Jet3 {
        assert_eq!(self.order, rhs.order);
        let t = tables();
        let mut out = Jet3::zero(self.order);
        for (pa, alpha) in t.idx[..self.c.len()].iter().enumerate() {
            let a = self.c[pa];
            if a == 0.0 {
                continue;
            }
            let da = alpha[0] + alpha[1] + alpha[2];
            for (pb, beta) in t.idx[..t.upto[self.order - da]].iter().enumerate() {
                let b = rhs.c[pb];
                if b == 0.0 {
                    continue;
                }
                let g = [alpha[0] + beta[0], alpha[1] + beta[1], alpha[2] + beta[2]];
                out.c[t.pos[g[0]][g[1]][g[2]]] += a * b;
            }
        }
        out
    }
}

/// Powers of three displacement values aligned with the jet coefficient
/// layout, so that many jets anchored at the same point can be evaluated
/// against one table.
pub struct Monomials<S> {
    m: Vec<S>,
}

impl<S: Scalar> Monomials<S> {
    pub fn new(dx: &[S; 3], order: usize) -> Self {
        let t = tables();
        let n = t.upto[order];
        let mut m = Vec::with_capacity(n);
        m.push(S::one());
        for p in 1..n {
            let alpha = t.idx[p];
            let d = (0..3).find(|&d| alpha[d] > 0).unwrap();
            let mut down = alpha;
            down[d] -= 1;
            let parent = m[t.pos[down[0]][down[1]][down[2]]];
            m.push(parent * dx[d]);
        }
        Monomials { m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(f: impl Fn(&Jet3, &Jet3, &Jet3) -> Jet3, x: [f64; 3], order: usize) -> Jet3 {
        let x1 = Jet3::coordinate(x[0], 0, order);
        let x2 = Jet3::coordinate(x[1], 1, order);
        let x3 = Jet3::coordinate(x[2], 2, order);
        f(&x1, &x2, &x3)
    }

    #[test]
    fn product_partials() {
        // f = x2 * x3 at (1, 2, 5)
        let j = jet(|_, b, c| b * c, [1.0, 2.0, 5.0], 2);
        assert_eq!(j.value(), 10.0);
        assert_eq!(j.partial([0, 1, 0]), 5.0);
        assert_eq!(j.partial([0, 0, 1]), 2.0);
        assert_eq!(j.partial([0, 1, 1]), 1.0);
        assert_eq!(j.partial([2, 0, 0]), 0.0);
        assert_eq!(j.partial([0, 2, 0]), 0.0);
    }

    #[test]
    fn exp_of_sine_matches_hand_derivatives() {
        // f = exp(2 sin x1): f(0) = 1, f'(0) = 2, f''(0) = 4
        let j = jet(|a, _, _| a.sin().scale(2.0).exp(), [0.0, 0.0, 0.0], 2);
        assert!((j.value() - 1.0).abs() < 1e-15);
        assert!((j.partial([1, 0, 0]) - 2.0).abs() < 1e-15);
        assert!((j.partial([2, 0, 0]) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn high_order_mixed_partial() {
        // f = x1^2 * x2^3 at (1,1,0): d^2_1 d^3_2 f = 2! * 3! = 12
        let j = jet(|a, b, _| &a.powi(2) * &b.powi(3), [1.0, 1.0, 0.0], 5);
        assert!((j.partial([2, 3, 0]) - 12.0).abs() < 1e-12);
        assert!((j.partial([1, 1, 0]) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_jet_consistent_with_partials() {
        let j = jet(|a, b, _| &a.sin() * &b.exp(), [0.4, 0.2, 0.0], 4);
        let dj = j.derivative(0);
        assert!((dj.value() - j.partial([1, 0, 0])).abs() < 1e-14);
        assert!((dj.partial([1, 1, 0]) - j.partial([2, 1, 0])).abs() < 1e-13);
    }

    #[test]
    fn poly_eval_recovers_shifted_value() {
        let j = jet(
            |a, b, c| &(&a.powi(2) * b) + &c.sin(),
            [1.0, 2.0, 0.3],
            4,
        );
        let dx = [0.05, -0.04, 0.02];
        let mono = Monomials::new(&dx, 4);
        let approx = j.eval_poly(&mono);
        let exact = (1.0f64 + dx[0]).powi(2) * (2.0 + dx[1]) + (0.3f64 + dx[2]).sin();
        assert!((approx - exact).abs() < 1e-8);
    }

    #[test]
    fn finite_difference_cross_check() {
        // d/dx1 of exp(x1 * x2) at (0.3, 0.7, 0) via jet vs central FD
        let f = |x: f64, y: f64| (x * y).exp();
        let j = jet(|a, b, _| (a * b).exp(), [0.3, 0.7, 0.0], 3);
        let h = 1e-5;
        let fd = (f(0.3 + h, 0.7) - f(0.3 - h, 0.7)) / (2.0 * h);
        assert!((j.partial([1, 0, 0]) - fd).abs() < 1e-9);
        let fd2 = (f(0.3 + h, 0.7) - 2.0 * f(0.3, 0.7) + f(0.3 - h, 0.7)) / (h * h);
        assert!((j.partial([2, 0, 0]) - fd2).abs() < 1e-5);
    }
}
