//! Pointwise tensorial data of a metric and the curve kernel built on it.
//!
//! [`MetricJets`] holds truncated Taylor expansions at one point of the
//! metric components and of everything derived from them: the inverse
//! metric, the volume density, the connection coefficients and the
//! third-jet prolongation tensor
//! `S^k_ijl = d_l Gamma^k_ij + Gamma^k_lp Gamma^p_ij`.
//!
//! [`PointGeometry`] extracts plain values (plus curvature: Riemann,
//! Ricci, scalar, Schouten) for integrator and invariant code, while
//! [`eval_curve`] composes the same jets with displacements in any
//! [`Scalar`] algebra. Feeding truncated series re-derives quantities
//! along a curve; feeding gradient numbers differentiates them with
//! respect to chosen jet coordinates. Both views come from one set of
//! expansions, so they agree to rounding.
//!
//! Index conventions, fixed once and used everywhere:
//!
//! * `gamma[k][i][j] = Gamma^k_ij`, symmetric in `(i, j)`;
//! * `dgamma[k][i][j][l] = d_l Gamma^k_ij`;
//! * `riemann[k][l][i][j] = R^k_lij = d_i Gamma^k_jl - d_j Gamma^k_il +
//!   Gamma^k_ip Gamma^p_jl - Gamma^k_jp Gamma^p_il`;
//! * `ricci[l][j] = R^k_lkj`; `schouten = ricci - (R/4) g` (dimension 3).
//!
//! With these conventions the antisymmetrized prolongation tensor
//! satisfies `S^k_ijl - S^k_ilj = R^k_ilj`, which the tests pin down.

use crate::error::{Error, Result};
use crate::linalg::{cross_g, inner_g, mat_vec, v3, M3, V3};
use crate::metric::{MetricSpec, Signature};
use crate::num::{Jet3, Monomials, Scalar};

/// Jets at a point of the metric and its derived fields. `order` is the
/// expansion order of the component functions themselves; `gamma` is one
/// order lower and `s_tensor` two orders lower.
pub struct MetricJets {
    pub point: [f64; 3],
    pub order: usize,
    pub g: [[Jet3; 3]; 3],
    pub g_inv: [[Jet3; 3]; 3],
    pub sqrt_det: Jet3,
    gamma: Vec<Jet3>,
    s_tensor: Vec<Jet3>,
}

fn gamma_slot(k: usize, i: usize, j: usize) -> usize {
    (k * 3 + i) * 3 + j
}

fn s_slot(k: usize, i: usize, j: usize, l: usize) -> usize {
    ((k * 3 + i) * 3 + j) * 3 + l
}

impl MetricJets {
    /// Expand the metric at `point`. Requires `order >= 2` so that the
    /// prolongation tensor has a value.
    pub fn new(metric: &MetricSpec, point: [f64; 3], order: usize) -> Result<Self> {
        assert!(order >= 2, "metric jets need order >= 2");
        let comp = metric.eval(point, order)?;
        let at = |i: usize, j: usize| -> &Jet3 {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            let k = match (i, j) {
                (0, 0) => 0,
                (0, 1) => 1,
                (0, 2) => 2,
                (1, 1) => 3,
                (1, 2) => 4,
                (2, 2) => 5,
                _ => unreachable!(),
            };
            comp[k].jet()
        };
        let g: [[Jet3; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| at(i, j).clone()));

        let det = det3_jets(&g);
        let det_value = det.value();
        let scale = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max(g[i][j].value().abs()))
            .powi(3);
        if det_value.abs() < 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateMetric {
                point,
                reason: format!("|det g| = {} below threshold", det_value.abs()),
            });
        }
        if metric.signature == Signature::Riemannian {
            let m1 = g[0][0].value();
            let m2 = g[0][0].value() * g[1][1].value() - g[0][1].value() * g[1][0].value();
            if m1 <= 0.0 || m2 <= 0.0 || det_value <= 0.0 {
                return Err(Error::DegenerateMetric {
                    point,
                    reason: "declared Riemannian but not positive definite here".into(),
                });
            }
        }

        let g_inv = inv3_jets(&g, &det);
        let sqrt_det = if det_value > 0.0 {
            det.sqrt()
        } else {
            det.scale(-1.0).sqrt()
        };

        // Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
        let dg: Vec<Vec<[Jet3; 3]>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| std::array::from_fn(|l| g[i][j].derivative(l)))
                    .collect()
            })
            .collect();
        let mut gamma = vec![Jet3::zero(order - 1); 27];
        for k in 0..3 {
            for i in 0..3 {
                for j in i..3 {
                    let mut acc = Jet3::zero(order - 1);
                    for l in 0..3 {
                        let bracket = &(&dg[j][l][i] + &dg[i][l][j]) - &dg[i][j][l];
                        acc = &acc + &(&g_inv[k][l].truncated(order - 1) * &bracket);
                    }
                    let value = acc.scale(0.5);
                    gamma[gamma_slot(k, i, j)] = value.clone();
                    gamma[gamma_slot(k, j, i)] = value;
                }
            }
        }

        // S^k_ijl = d_l Gamma^k_ij + Gamma^k_lp Gamma^p_ij
        let mut s_tensor = vec![Jet3::zero(order - 2); 81];
        for k in 0..3 {
            for i in 0..3 {
                for j in i..3 {
                    for l in 0..3 {
                        let mut acc = gamma[gamma_slot(k, i, j)].derivative(l);
                        for p in 0..3 {
                            let prod = &gamma[gamma_slot(k, l, p)].truncated(order - 2)
                                * &gamma[gamma_slot(p, i, j)].truncated(order - 2);
                            acc = &acc + &prod;
                        }
                        s_tensor[s_slot(k, i, j, l)] = acc.clone();
                        s_tensor[s_slot(k, j, i, l)] = acc;
                    }
                }
            }
        }

        Ok(MetricJets {
            point,
            order,
            g,
            g_inv,
            sqrt_det,
            gamma,
            s_tensor,
        })
    }

    pub fn gamma_at(&self, k: usize, i: usize, j: usize) -> &Jet3 {
        &self.gamma[gamma_slot(k, i, j)]
    }

    pub fn s_at(&self, k: usize, i: usize, j: usize, l: usize) -> &Jet3 {
        &self.s_tensor[s_slot(k, i, j, l)]
    }
}

fn det3_jets(g: &[[Jet3; 3]; 3]) -> Jet3 {
    let minor =
        |i: usize, j: usize, k: usize, l: usize| &(&g[i][k] * &g[j][l]) - &(&g[i][l] * &g[j][k]);
    let t0 = &g[0][0] * &minor(1, 2, 1, 2);
    let t1 = &g[0][1] * &minor(1, 2, 0, 2);
    let t2 = &g[0][2] * &minor(1, 2, 0, 1);
    &(&t0 - &t1) + &t2
}

fn inv3_jets(g: &[[Jet3; 3]; 3], det: &Jet3) -> [[Jet3; 3]; 3] {
    let inv_det = det.recip();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (r1, r2) = ((j + 1) % 3, (j + 2) % 3);
            let (c1, c2) = ((i + 1) % 3, (i + 2) % 3);
            let cof = &(&g[r1][c1] * &g[r2][c2]) - &(&g[r1][c2] * &g[r2][c1]);
            &cof * &inv_det
        })
    })
}

// ---------------------------------------------------------------------
// Pointwise values
// ---------------------------------------------------------------------

/// All pointwise tensors of a metric at one point.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub point: [f64; 3],
    pub g: M3<f64>,
    pub g_inv: M3<f64>,
    pub sqrt_det_g: f64,
    /// d_l g_ij indexed `dg[l][i][j]`
    pub dg: [[[f64; 3]; 3]; 3],
    /// Gamma^k_ij
    pub gamma: [[[f64; 3]; 3]; 3],
    /// d_l Gamma^k_ij indexed `dgamma[k][i][j][l]`
    pub dgamma: [[[[f64; 3]; 3]; 3]; 3],
    /// S^k_ijl
    pub s_tensor: [[[[f64; 3]; 3]; 3]; 3],
    /// R^k_lij
    pub riemann: [[[[f64; 3]; 3]; 3]; 3],
    pub ricci: M3<f64>,
    pub scalar_r: f64,
    pub schouten: M3<f64>,
}

/// Compute every pointwise field at `point`.
pub fn geometry_at(metric: &MetricSpec, point: [f64; 3]) -> Result<PointGeometry> {
    let jets = MetricJets::new(metric, point, 3)?;
    Ok(PointGeometry::from_jets(&jets))
}

impl PointGeometry {
    /// Extract plain values from metric jets (`order >= 3` keeps the
    /// curvature fields exact).
    pub fn from_jets(jets: &MetricJets) -> Self {
        let g = std::array::from_fn(|i| std::array::from_fn(|j| jets.g[i][j].value()));
        let g_inv = std::array::from_fn(|i| std::array::from_fn(|j| jets.g_inv[i][j].value()));
        let dg = std::array::from_fn(|l| {
            std::array::from_fn(|i| std::array::from_fn(|j| jets.g[i][j].partial(unit(l))))
        });
        let gamma: [[[f64; 3]; 3]; 3] = std::array::from_fn(|k| {
            std::array::from_fn(|i| std::array::from_fn(|j| jets.gamma_at(k, i, j).value()))
        });
        let dgamma: [[[[f64; 3]; 3]; 3]; 3] = std::array::from_fn(|k| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    std::array::from_fn(|l| jets.gamma_at(k, i, j).partial(unit(l)))
                })
            })
        });
        let s_tensor: [[[[f64; 3]; 3]; 3]; 3] = std::array::from_fn(|k| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| std::array::from_fn(|l| jets.s_at(k, i, j, l).value()))
            })
        });

        let riemann: [[[[f64; 3]; 3]; 3]; 3] = std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                std::array::from_fn(|i| {
                    std::array::from_fn(|j| {
                        let mut r = dgamma[k][j][l][i] - dgamma[k][i][l][j];
                        for p in 0..3 {
                            r += gamma[k][i][p] * gamma[p][j][l] - gamma[k][j][p] * gamma[p][i][l];
                        }
                        r
                    })
                })
            })
        });
        let ricci: M3<f64> = std::array::from_fn(|l| {
            std::array::from_fn(|j| (0..3).map(|k| riemann[k][l][k][j]).sum())
        });
        let mut scalar_r = 0.0;
        for l in 0..3 {
            for j in 0..3 {
                scalar_r += g_inv[l][j] * ricci[l][j];
            }
        }
        let schouten: M3<f64> = std::array::from_fn(|i| {
            std::array::from_fn(|j| ricci[i][j] - 0.25 * scalar_r * g[i][j])
        });

        PointGeometry {
            point: jets.point,
            g,
            g_inv,
            sqrt_det_g: jets.sqrt_det.value(),
            dg,
            gamma,
            dgamma,
            s_tensor,
            riemann,
            ricci,
            scalar_r,
            schouten,
        }
    }

    pub fn inner(&self, v: &V3<f64>, w: &V3<f64>) -> f64 {
        inner_g(&self.g, v, w)
    }

    pub fn norm2(&self, v: &V3<f64>) -> f64 {
        self.inner(v, v)
    }

    /// Index-raised Schouten applied to a vector: `(P# v)^k = g^{kl} P_lm v^m`.
    pub fn schouten_sharp(&self, v: &V3<f64>) -> V3<f64> {
        mat_vec(&self.g_inv, &mat_vec(&self.schouten, v))
    }

    pub fn schouten_scalar(&self, v: &V3<f64>, w: &V3<f64>) -> f64 {
        inner_g(&self.schouten, v, w)
    }

    /// Metric cross product of contravariant vectors.
    pub fn cross(&self, v: &V3<f64>, w: &V3<f64>) -> V3<f64> {
        cross_g(&self.g_inv, self.sqrt_det_g, v, w)
    }

    /// Covariant acceleration from coordinate jets:
    /// `a^k = xdd^k + Gamma^k_ij xd^i xd^j`.
    pub fn covariant_accel(&self, xd: &V3<f64>, xdd: &V3<f64>) -> V3<f64> {
        v3(|k| {
            let mut acc = xdd[k];
            for i in 0..3 {
                for j in 0..3 {
                    acc += self.gamma[k][i][j] * xd[i] * xd[j];
                }
            }
            acc
        })
    }

    /// Third-jet prolongation:
    /// `b^k = xddd^k + 3 Gamma^k_ij xd^i xdd^j + S^k_ijl xd^i xd^j xd^l`.
    pub fn covariant_jerk(&self, xd: &V3<f64>, xdd: &V3<f64>, xddd: &V3<f64>) -> V3<f64> {
        v3(|k| {
            let mut acc = xddd[k];
            for i in 0..3 {
                for j in 0..3 {
                    acc += 3.0 * self.gamma[k][i][j] * xd[i] * xdd[j];
                    for l in 0..3 {
                        acc += self.s_tensor[k][i][j][l] * xd[i] * xd[j] * xd[l];
                    }
                }
            }
            acc
        })
    }

    /// Inverse of [`Self::covariant_accel`].
    pub fn coordinate_accel(&self, u: &V3<f64>, a: &V3<f64>) -> V3<f64> {
        v3(|k| {
            let mut acc = a[k];
            for i in 0..3 {
                for j in 0..3 {
                    acc -= self.gamma[k][i][j] * u[i] * u[j];
                }
            }
            acc
        })
    }

    /// Inverse of [`Self::covariant_jerk`] given coordinate first/second jets.
    pub fn coordinate_jerk(&self, xd: &V3<f64>, xdd: &V3<f64>, b: &V3<f64>) -> V3<f64> {
        v3(|k| {
            let mut acc = b[k];
            for i in 0..3 {
                for j in 0..3 {
                    acc -= 3.0 * self.gamma[k][i][j] * xd[i] * xdd[j];
                    for l in 0..3 {
                        acc -= self.s_tensor[k][i][j][l] * xd[i] * xd[j] * xd[l];
                    }
                }
            }
            acc
        })
    }
}

fn unit(l: usize) -> [usize; 3] {
    let mut a = [0usize; 3];
    a[l] = 1;
    a
}

/// Area of the parallelogram spanned by `u` and `a`:
/// `sqrt(|u|^2 |a|^2 - g(u,a)^2)`.
pub fn area(geom: &PointGeometry, u: &V3<f64>, a: &V3<f64>) -> Result<f64> {
    let gram = geom.norm2(u) * geom.norm2(a) - geom.inner(u, a).powi(2);
    if gram < 0.0 {
        let scale = (geom.norm2(u) * geom.norm2(a)).abs().max(1e-300);
        if gram < -1e-12 * scale {
            return Err(Error::NegativeGram(gram));
        }
        return Ok(0.0);
    }
    Ok(gram.sqrt())
}

/// Signed volume of the parallelepiped spanned by `u, a, b`:
/// `sqrt|g| eps_ijk u^i a^j b^k`. Orientation is the coordinate
/// orientation; the sign carries the sign of the torsion.
pub fn volume(geom: &PointGeometry, u: &V3<f64>, a: &V3<f64>, b: &V3<f64>) -> f64 {
    geom.sqrt_det_g * crate::linalg::det_rows(u, a, b)
}

// ---------------------------------------------------------------------
// Generic curve kernel
// ---------------------------------------------------------------------

/// Metric data and curve quantities evaluated over an arbitrary scalar
/// algebra at displacements from the anchor point of a [`MetricJets`].
pub struct CurveEval<F: Scalar> {
    pub g: M3<F>,
    pub g_inv: M3<F>,
    pub sqrt_det: F,
    pub u: V3<F>,
    pub a: V3<F>,
    pub b: V3<F>,
    pub ell2: F,
    pub ua: F,
    pub aa: F,
    pub area2: F,
    pub vol: F,
}

impl<F: Scalar> CurveEval<F> {
    pub fn ell(&self) -> F {
        self.ell2.sqrt()
    }

    /// The torsion Lagrangian `l V / A^2`.
    pub fn lagrangian(&self) -> F {
        self.ell() * self.vol / self.area2
    }

    pub fn torsion(&self) -> F {
        self.vol / self.area2
    }

    pub fn inner(&self, v: &V3<F>, w: &V3<F>) -> F {
        inner_g(&self.g, v, w)
    }
}

/// Compose the expansions in `jets` with jet-coordinate values in `F`:
/// `dx` is the displacement of the base point, `xd1..xd3` are the first
/// three parameter derivatives of the curve. Everything downstream
/// (covariant jets, norms, the Lagrangian) is produced in `F`.
pub fn eval_curve<F: Scalar>(
    jets: &MetricJets,
    dx: &V3<F>,
    xd1: &V3<F>,
    xd2: &V3<F>,
    xd3: &V3<F>,
) -> CurveEval<F> {
    let mono = Monomials::new(dx, jets.order);
    let g: M3<F> = std::array::from_fn(|i| std::array::from_fn(|j| jets.g[i][j].eval_poly(&mono)));
    let g_inv: M3<F> =
        std::array::from_fn(|i| std::array::from_fn(|j| jets.g_inv[i][j].eval_poly(&mono)));
    let sqrt_det = jets.sqrt_det.eval_poly(&mono);

    let u = *xd1;
    let mut a: V3<F> = *xd2;
    let mut b: V3<F> = *xd3;
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let gam = jets.gamma_at(k, i, j).eval_poly(&mono);
                a[k] = a[k] + gam * xd1[i] * xd1[j];
                b[k] = b[k] + gam.scale(3.0) * xd1[i] * xd2[j];
                for l in 0..3 {
                    let s = jets.s_at(k, i, j, l).eval_poly(&mono);
                    b[k] = b[k] + s * xd1[i] * xd1[j] * xd1[l];
                }
            }
        }
    }

    let ell2 = inner_g(&g, &u, &u);
    let ua = inner_g(&g, &u, &a);
    let aa = inner_g(&g, &a, &a);
    let area2 = ell2 * aa - ua * ua;
    let vol = sqrt_det * crate::linalg::det_rows(&u, &a, &b);

    CurveEval {
        g,
        g_inv,
        sqrt_det,
        u,
        a,
        b,
        ell2,
        ua,
        aa,
        area2,
        vol,
    }
}
