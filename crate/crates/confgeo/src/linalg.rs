//! Small fixed-size helpers over any [`Scalar`]: 3-vectors, symmetric
//! 3x3 matrices, and the metric-weighted cross product.

use crate::num::Scalar;

pub type V3<S> = [S; 3];
pub type M3<S> = [[S; 3]; 3];

/// Permutation symbol as +1/-1 pairs; everything else is zero.
pub const EPS: [(usize, usize, usize, f64); 6] = [
    (0, 1, 2, 1.0),
    (1, 2, 0, 1.0),
    (2, 0, 1, 1.0),
    (0, 2, 1, -1.0),
    (2, 1, 0, -1.0),
    (1, 0, 2, -1.0),
];

pub fn v3<S: Scalar>(f: impl Fn(usize) -> S) -> V3<S> {
    [f(0), f(1), f(2)]
}

pub fn add3<S: Scalar>(a: &V3<S>, b: &V3<S>) -> V3<S> {
    v3(|i| a[i] + b[i])
}

pub fn sub3<S: Scalar>(a: &V3<S>, b: &V3<S>) -> V3<S> {
    v3(|i| a[i] - b[i])
}

pub fn smul3<S: Scalar>(k: S, a: &V3<S>) -> V3<S> {
    v3(|i| k * a[i])
}

pub fn dot3<S: Scalar>(a: &V3<S>, b: &V3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Metric inner product `g_ij a^i b^j`.
pub fn inner_g<S: Scalar>(g: &M3<S>, a: &V3<S>, b: &V3<S>) -> S {
    let mut acc = S::zero();
    for i in 0..3 {
        for j in 0..3 {
            acc = acc + g[i][j] * a[i] * b[j];
        }
    }
    acc
}

pub fn mat_vec<S: Scalar>(m: &M3<S>, a: &V3<S>) -> V3<S> {
    v3(|i| m[i][0] * a[0] + m[i][1] * a[1] + m[i][2] * a[2])
}

pub fn det3<S: Scalar>(m: &M3<S>) -> S {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse via the adjugate; the caller guarantees a nonzero determinant.
pub fn inv3<S: Scalar>(m: &M3<S>) -> M3<S> {
    let inv_det = det3(m).recip();
    let cof = |r: usize, c: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
        m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]
    };
    let mut out = [[S::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = cof(j, i) * inv_det;
        }
    }
    out
}

/// Determinant of the 3x3 matrix with rows `u, a, b`.
pub fn det_rows<S: Scalar>(u: &V3<S>, a: &V3<S>, b: &V3<S>) -> S {
    let mut acc = S::zero();
    for &(i, j, k, sign) in &EPS {
        acc = acc + (u[i] * a[j] * b[k]).scale(sign);
    }
    acc
}

/// Metric cross product of contravariant vectors:
/// `(v x w)^k = sqrt|g| eps_ijl v^i w^j g^{lk}`.
pub fn cross_g<S: Scalar>(g_inv: &M3<S>, sqrt_det: S, v: &V3<S>, w: &V3<S>) -> V3<S> {
    let mut low = [S::zero(); 3];
    for &(i, j, l, sign) in &EPS {
        low[l] = low[l] + (v[i] * w[j]).scale(sign);
    }
    v3(|k| {
        (g_inv[0][k] * low[0] + g_inv[1][k] * low[1] + g_inv[2][k] * low[2]) * sqrt_det
    })
}

pub fn map3<S: Scalar, T: Scalar>(a: &V3<S>, f: impl Fn(S) -> T) -> V3<T> {
    [f(a[0]), f(a[1]), f(a[2])]
}

pub fn map_m3<S: Scalar, T: Scalar>(m: &M3<S>, f: impl Fn(S) -> T) -> M3<T> {
    [
        [f(m[0][0]), f(m[0][1]), f(m[0][2])],
        [f(m[1][0]), f(m[1][1]), f(m[1][2])],
        [f(m[2][0]), f(m[2][1]), f(m[2][2])],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_symmetric_matrix() {
        let m = [[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.1]];
        let inv = inv3(&m);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += m[i][k] * inv[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn euclidean_cross_product() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let c = cross_g(&id, 1.0, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        assert_eq!(c, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn cross_norm_identity_in_curved_metric() {
        // |v x w|^2 = |v|^2 |w|^2 - g(v,w)^2
        let g = [[1.3, 0.2, 0.0], [0.2, 0.9, 0.1], [0.0, 0.1, 1.7]];
        let g_inv = inv3(&g);
        let sd = det3(&g).sqrt();
        let v = [0.3, -1.0, 0.8];
        let w = [1.1, 0.4, -0.2];
        let c = cross_g(&g_inv, sd, &v, &w);
        let lhs = inner_g(&g, &c, &c);
        let rhs = inner_g(&g, &v, &v) * inner_g(&g, &w, &w) - inner_g(&g, &v, &w).powi(2);
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }
}
