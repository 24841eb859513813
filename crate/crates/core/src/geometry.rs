//! Levi-Civita geometry of a metric chart at a point.
//!
//! Metric components are evaluated once over [`HyperDual`] scalars, which
//! yields `g`, `∂g` and `∂²g` exactly; Christoffel symbols and the curvature
//! tensor are assembled from those. Curvature follows
//! `R(x,y)z = ∇_x∇_y z − ∇_y∇_x z − ∇_[x,y] z` and
//! `R_ijkl = R(∂_i, ∂_j, ∂_k, ∂_l) = g(R(∂_i,∂_j)∂_k, ∂_l)`.

use crate::dual::{HyperDual, Scalar};
use crate::error::GeometryError;
use crate::linalg;
use crate::tensor::{BasisTag, MetricAt, TensorComponents, Variance};

/// `|det g|` below this is a hard error.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Symmetric metric components on a coordinate chart.
pub trait MetricChart<const N: usize> {
    fn metric<S: Scalar>(&self, x: &[S; N]) -> Result<[[S; N]; N], GeometryError>;
}

/// A (1,1)-tensor field `A^i_j` on a chart (`A ∂_j = Σ_i A^i_j ∂_i`).
pub trait EndomorphismField<const N: usize> {
    fn endomorphism<S: Scalar>(&self, x: &[S; N]) -> Result<[[S; N]; N], GeometryError>;
}

/// Constant metric, mostly useful as a flat reference.
#[derive(Clone, Debug)]
pub struct ConstantMetric<const N: usize>(pub [[f64; N]; N]);

impl<const N: usize> MetricChart<N> for ConstantMetric<N> {
    fn metric<S: Scalar>(&self, _x: &[S; N]) -> Result<[[S; N]; N], GeometryError> {
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| S::from_f64(self.0[i][j]))
        }))
    }
}

/// Metric jet and connection at one point.
#[derive(Clone, Debug)]
pub struct LocalGeometry<const N: usize> {
    pub point: [f64; N],
    pub g: [[f64; N]; N],
    pub g_inv: [[f64; N]; N],
    /// `dg[k][i][j] = ∂_k g_ij`
    pub dg: [[[f64; N]; N]; N],
    /// `ddg[k][l][i][j] = ∂_k ∂_l g_ij`
    pub ddg: [[[[f64; N]; N]; N]; N],
    /// `gamma[k][i][j] = Γ^k_ij`
    pub gamma: [[[f64; N]; N]; N],
    /// `gamma_low[l][i][j] = Γ_{l,ij} = g_lk Γ^k_ij`
    pub gamma_low: [[[f64; N]; N]; N],
}

/// Evaluates a chart's metric at `p` and validates it.
pub fn metric_jet<const N: usize, C: MetricChart<N>>(
    chart: &C,
    p: &[f64; N],
) -> Result<[[HyperDual<N>; N]; N], GeometryError> {
    let g = chart.metric(&HyperDual::seed(p))?;
    let mut asym = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            asym = asym.max((g[i][j].value - g[j][i].value).abs());
        }
    }
    let scale = g.iter().flatten().fold(1.0f64, |m, x| m.max(x.value.abs()));
    if asym > 1e-12 * scale {
        return Err(GeometryError::NotSymmetric {
            point: p.to_vec(),
            asymmetry: asym,
        });
    }
    Ok(g)
}

/// Plain metric values at `p`, with symmetry and degeneracy checks.
pub fn metric_at<const N: usize, C: MetricChart<N>>(chart: &C, p: &[f64; N]) -> Result<MetricAt<N>, GeometryError> {
    let g = metric_jet(chart, p)?;
    let g = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].value));
    checked_metric(g, p)
}

fn checked_metric<const N: usize>(g: [[f64; N]; N], p: &[f64; N]) -> Result<MetricAt<N>, GeometryError> {
    let det = linalg::det(&g);
    if det.abs() < DEGENERACY_TOL {
        return Err(GeometryError::Degenerate { point: p.to_vec(), det });
    }
    MetricAt::new(BasisTag::Coordinate, g).map_err(|_| GeometryError::Degenerate { point: p.to_vec(), det })
}

impl<const N: usize> LocalGeometry<N> {
    pub fn at<C: MetricChart<N>>(chart: &C, p: &[f64; N]) -> Result<Self, GeometryError> {
        let jet = metric_jet(chart, p)?;
        let mut g = [[0.0; N]; N];
        let mut dg = [[[0.0; N]; N]; N];
        let mut ddg = [[[[0.0; N]; N]; N]; N];
        for i in 0..N {
            for j in 0..N {
                // symmetrise; asymmetry was bounded above
                let (a, b) = (&jet[i][j], &jet[j][i]);
                g[i][j] = 0.5 * (a.value + b.value);
                for k in 0..N {
                    dg[k][i][j] = 0.5 * (a.grad[k] + b.grad[k]);
                    for l in 0..N {
                        ddg[k][l][i][j] = 0.25 * (a.hess[k][l] + a.hess[l][k] + b.hess[k][l] + b.hess[l][k]);
                    }
                }
            }
        }
        let metric = checked_metric(g, p)?;
        let g_inv = metric.g_inv;
        let mut gamma_low = [[[0.0; N]; N]; N];
        for l in 0..N {
            for i in 0..N {
                for j in 0..N {
                    gamma_low[l][i][j] = 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
            }
        }
        let mut gamma = [[[0.0; N]; N]; N];
        for k in 0..N {
            for i in 0..N {
                for j in i..N {
                    let v: f64 = (0..N).map(|l| g_inv[k][l] * gamma_low[l][i][j]).sum();
                    gamma[k][i][j] = v;
                    gamma[k][j][i] = v;
                }
            }
        }
        Ok(Self {
            point: *p,
            g,
            g_inv,
            dg,
            ddg,
            gamma,
            gamma_low,
        })
    }

    pub fn metric(&self) -> MetricAt<N> {
        MetricAt {
            basis: BasisTag::Coordinate,
            g: self.g,
            g_inv: self.g_inv,
        }
    }

    /// `R_ijkl` in coordinates.
    pub fn riemann(&self) -> [[[[f64; N]; N]; N]; N] {
        let mut r = [[[[0.0; N]; N]; N]; N];
        // ∂_i Γ_{l,jk} = ½(∂_i∂_j g_kl + ∂_i∂_k g_jl − ∂_i∂_l g_jk)
        let d_gamma_low = |i: usize, l: usize, j: usize, k: usize| {
            0.5 * (self.ddg[i][j][k][l] + self.ddg[i][k][j][l] - self.ddg[i][l][j][k])
        };
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    for l in 0..N {
                        let mut v = d_gamma_low(i, l, j, k) - d_gamma_low(j, l, i, k);
                        for m in 0..N {
                            v += self.gamma_low[m][j][l] * self.gamma[m][i][k]
                                - self.gamma_low[m][i][l] * self.gamma[m][j][k];
                        }
                        r[i][j][k][l] = v;
                    }
                }
            }
        }
        r
    }

    /// `∇_k g_ij`, identically zero for the Levi-Civita connection.
    pub fn metric_covariant_derivative(&self) -> [[[f64; N]; N]; N] {
        let mut out = [[[0.0; N]; N]; N];
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    let mut v = self.dg[k][i][j];
                    for m in 0..N {
                        v -= self.gamma[m][k][i] * self.g[m][j] + self.gamma[m][k][j] * self.g[i][m];
                    }
                    out[k][i][j] = v;
                }
            }
        }
        out
    }

    /// `∇_x y` for constant-coefficient coordinate fields `x`, `y`.
    pub fn covariant_derivative_of_coordinate_fields(&self, x: &[f64; N], y: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|k| {
            let mut v = 0.0;
            for i in 0..N {
                for j in 0..N {
                    v += self.gamma[k][i][j] * x[i] * y[j];
                }
            }
            v
        })
    }

    /// `(∇_a A)^m_b` for an endomorphism field, from its jet at the point.
    /// Indexed `[a][m][b]`.
    pub fn nabla_endomorphism<E: EndomorphismField<N>>(&self, field: &E) -> Result<[[[f64; N]; N]; N], GeometryError> {
        let jet = field.endomorphism(&HyperDual::seed(&self.point))?;
        let mut out = [[[0.0; N]; N]; N];
        for a in 0..N {
            for m in 0..N {
                for b in 0..N {
                    let mut v = jet[m][b].grad[a];
                    for k in 0..N {
                        v += self.gamma[m][a][k] * jet[k][b].value - self.gamma[k][a][b] * jet[m][k].value;
                    }
                    out[a][m][b] = v;
                }
            }
        }
        Ok(out)
    }

    /// `F(x,y,z) = g((∇_x A)y, z)` in coordinates.
    pub fn structure_tensor<E: EndomorphismField<N>>(&self, field: &E) -> Result<TensorComponents<N>, GeometryError> {
        let d = self.nabla_endomorphism(field)?;
        Ok(TensorComponents::from_fn(
            vec![Variance::Covariant; 3],
            BasisTag::Coordinate,
            |i| (0..N).map(|m| self.g[i[2]][m] * d[i[0]][m][i[1]]).sum(),
        ))
    }

    /// `g^{ij} g^{ks} g((∇_i A)∂_k, (∇_j A)∂_s)`.
    pub fn square_norm_of_nabla<E: EndomorphismField<N>>(&self, field: &E) -> Result<f64, GeometryError> {
        let d = self.nabla_endomorphism(field)?;
        let gi = &self.g_inv;
        let mut acc = 0.0;
        for i in 0..N {
            for j in 0..N {
                if gi[i][j] == 0.0 {
                    continue;
                }
                for k in 0..N {
                    for s in 0..N {
                        if gi[k][s] == 0.0 {
                            continue;
                        }
                        let mut inner = 0.0;
                        for m in 0..N {
                            for n in 0..N {
                                inner += self.g[m][n] * d[i][m][k] * d[j][n][s];
                            }
                        }
                        acc += gi[i][j] * gi[k][s] * inner;
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Christoffel symbols `Γ^k_ij` as a `[contra, co, co]` tensor.
pub fn christoffel_at<const N: usize, C: MetricChart<N>>(
    chart: &C,
    p: &[f64; N],
) -> Result<TensorComponents<N>, GeometryError> {
    let geom = LocalGeometry::at(chart, p)?;
    Ok(TensorComponents::from_fn(
        vec![Variance::Contravariant, Variance::Covariant, Variance::Covariant],
        BasisTag::Coordinate,
        |i| geom.gamma[i[0]][i[1]][i[2]],
    ))
}

/// Curvature `R_ijkl` as a fully covariant coordinate tensor.
pub fn riemann_at<const N: usize, C: MetricChart<N>>(
    chart: &C,
    p: &[f64; N],
) -> Result<TensorComponents<N>, GeometryError> {
    let r = LocalGeometry::at(chart, p)?.riemann();
    Ok(riemann_tensor(&r))
}

pub fn riemann_tensor<const N: usize>(r: &[[[[f64; N]; N]; N]; N]) -> TensorComponents<N> {
    TensorComponents::from_fn(vec![Variance::Covariant; 4], BasisTag::Coordinate, |i| {
        r[i[0]][i[1]][i[2]][i[3]]
    })
}

/// Steps used by [`cov_deriv_oneform_at`] unless a caller overrides them.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// `(∇_i ω)_j = ∂_i ω_j − Γ^k_ij ω_k` for a covector field given by its
/// coordinate components. `∂_i ω_j` is a central difference at `step` and
/// `step/2`, Richardson-combined.
pub fn cov_deriv_oneform_at<const N: usize, C, F>(
    chart: &C,
    field: F,
    p: &[f64; N],
    step: f64,
) -> Result<TensorComponents<N>, GeometryError>
where
    C: MetricChart<N>,
    F: Fn(&[f64; N]) -> Result<[f64; N], GeometryError>,
{
    if !(step > 0.0) {
        return Err(GeometryError::InvalidStep(step));
    }
    let geom = LocalGeometry::at(chart, p)?;
    let eval = |q: [f64; N]| {
        field(&q).map_err(|e| GeometryError::FieldEvaluation {
            point: q.to_vec(),
            reason: e.to_string(),
        })
    };
    let omega = eval(*p)?;
    let mut partial = [[0.0; N]; N];
    for i in 0..N {
        let central = |h: f64| -> Result<[f64; N], GeometryError> {
            let mut plus = *p;
            let mut minus = *p;
            plus[i] += h;
            minus[i] -= h;
            let (a, b) = (eval(plus)?, eval(minus)?);
            Ok(std::array::from_fn(|j| (a[j] - b[j]) / (2.0 * h)))
        };
        let coarse = central(step)?;
        let fine = central(0.5 * step)?;
        for j in 0..N {
            partial[i][j] = (4.0 * fine[j] - coarse[j]) / 3.0;
        }
    }
    Ok(TensorComponents::from_fn(
        vec![Variance::Covariant, Variance::Covariant],
        BasisTag::Coordinate,
        |ij| {
            let (i, j) = (ij[0], ij[1]);
            partial[i][j] - (0..N).map(|k| geom.gamma[k][i][j] * omega[k]).sum::<f64>()
        },
    ))
}
