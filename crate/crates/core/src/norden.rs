//! Two-dimensional Norden surfaces `(N, J, h)` in coordinates `(u, v)`.
//!
//! The base model is the flat plane `h = du² − dv²` with `J∂u = ∂v`,
//! `J∂v = −∂u`. The conformal family rescales it by two scalar fields
//! `a`, `b`: `h̄ = e^{2a}(cos 2b · h + sin 2b · h̃)`, keeping `J`.

use crate::dual::Scalar;
use crate::error::GeometryError;
use crate::expr::ScalarFieldExpr;
use crate::geometry::{EndomorphismField, LocalGeometry, MetricChart};
use crate::linalg;
use crate::tensor::{BasisTag, TensorComponents, Variance};

/// Components `J^i_j` of the complex structure (constant in this chart).
pub const J: [[f64; 2]; 2] = [[0.0, -1.0], [1.0, 0.0]];

const FLAT_H: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];
const FLAT_H_TILDE: [[f64; 2]; 2] = [[0.0, -1.0], [-1.0, 0.0]];

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceModel {
    Flat,
    Conformal { a: ScalarFieldExpr, b: ScalarFieldExpr },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NordenSurface {
    model: SurfaceModel,
}

pub fn make_flat_surface() -> NordenSurface {
    NordenSurface {
        model: SurfaceModel::Flat,
    }
}

pub fn make_conformal_surface(a: ScalarFieldExpr, b: ScalarFieldExpr) -> NordenSurface {
    NordenSurface {
        model: SurfaceModel::Conformal { a, b },
    }
}

fn constant<S: Scalar>(m: &[[f64; 2]; 2]) -> [[S; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| S::from_f64(m[i][j])))
}

impl NordenSurface {
    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    /// Whether the surface is the flat (Kähler-Norden) model, either
    /// explicitly or as the conformal family with `a = b = 0`.
    pub fn is_flat_model(&self) -> bool {
        match &self.model {
            SurfaceModel::Flat => true,
            SurfaceModel::Conformal { a, b } => a.is_zero() && b.is_zero(),
        }
    }

    /// `h_ij` at `(u, v)`.
    pub fn h<S: Scalar>(&self, x: &[S; 2]) -> Result<[[S; 2]; 2], GeometryError> {
        match &self.model {
            SurfaceModel::Flat => Ok(constant(&FLAT_H)),
            SurfaceModel::Conformal { a, b } => {
                let a = a.eval(x[0], x[1])?;
                let b = b.eval(x[0], x[1])?;
                let scale = a.scale(2.0).exp();
                let (c, s) = (b.scale(2.0).cos(), b.scale(2.0).sin());
                Ok(std::array::from_fn(|i| {
                    std::array::from_fn(|j| scale * (c.scale(FLAT_H[i][j]) + s.scale(FLAT_H_TILDE[i][j])))
                }))
            }
        }
    }

    /// Associated metric `h̃(x, y) = h(x, Jy)`, i.e. `h̃_ij = h_ik J^k_j`.
    pub fn h_tilde<S: Scalar>(&self, x: &[S; 2]) -> Result<[[S; 2]; 2], GeometryError> {
        let h = self.h(x)?;
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| h[i][0].scale(J[0][j]) + h[i][1].scale(J[1][j]))
        }))
    }

    pub fn j_tensor(&self, _p: &[f64; 2]) -> [[f64; 2]; 2] {
        J
    }

    pub fn geometry_at(&self, p: &[f64; 2]) -> Result<LocalGeometry<2>, GeometryError> {
        LocalGeometry::at(self, p)
    }

    /// Gaussian curvature `k′ = R′(x,y,y,x) / (h(x,x)h(y,y) − h(x,y)²)`
    /// computed with the coordinate basis.
    pub fn gaussian_curvature_at(&self, p: &[f64; 2]) -> Result<f64, GeometryError> {
        self.gaussian_curvature_in_basis(p, &[1.0, 0.0], &[0.0, 1.0])
    }

    /// Same quantity using an arbitrary basis `x, y` of the tangent plane.
    pub fn gaussian_curvature_in_basis(&self, p: &[f64; 2], x: &[f64; 2], y: &[f64; 2]) -> Result<f64, GeometryError> {
        sectional_curvature_2d(self, p, x, y)
    }

    /// `k̂`, the Gaussian curvature of the metric `−h̃`.
    ///
    /// The rotated metrics `cos 2s · h − sin 2s · h̃` have curvature
    /// `k′ cos 2s + k̂ sin 2s`.
    pub fn associated_curvature_at(&self, p: &[f64; 2]) -> Result<f64, GeometryError> {
        sectional_curvature_2d(&NegatedAssociated(self), p, &[1.0, 0.0], &[0.0, 1.0])
    }

    /// Coordinate components of `F′(x,y,z) = h((∇′_x J)y, z)` and the Lee
    /// form `θ′(z) = h^{ij} F′(e_i, e_j, z)`.
    pub fn fprime_and_lee_at(&self, p: &[f64; 2]) -> Result<(TensorComponents<2>, [f64; 2]), GeometryError> {
        let geom = self.geometry_at(p)?;
        let f = geom.structure_tensor(self)?;
        let theta = std::array::from_fn(|c| {
            let mut acc = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    acc += geom.g_inv[a][b] * f[[a, b, c]];
                }
            }
            acc
        });
        Ok((f, theta))
    }

    /// The W₁ form of `F′` rebuilt from a Lee form:
    /// `½{h(x,y)θ(z) + h(x,Jy)θ(Jz) + h(x,z)θ(y) + h(x,Jz)θ(Jy)}`.
    pub fn w1_reconstruction(&self, p: &[f64; 2], theta: &[f64; 2]) -> Result<TensorComponents<2>, GeometryError> {
        let h = self.h(p)?;
        let ht = self.h_tilde(p)?;
        // θ(J∂_c) = θ_m J^m_c
        let theta_j: [f64; 2] = std::array::from_fn(|c| theta[0] * J[0][c] + theta[1] * J[1][c]);
        Ok(TensorComponents::from_fn(
            vec![Variance::Covariant; 3],
            BasisTag::Coordinate,
            |i| {
                let (a, b, c) = (i[0], i[1], i[2]);
                0.5 * (h[a][b] * theta[c] + ht[a][b] * theta_j[c] + h[a][c] * theta[b] + ht[a][c] * theta_j[b])
            },
        ))
    }

    /// `‖∇′J‖² = h^{ij}h^{ks} h((∇′_i J)e_k, (∇′_j J)e_s)`.
    pub fn nabla_j_square_norm_at(&self, p: &[f64; 2]) -> Result<f64, GeometryError> {
        self.geometry_at(p)?.square_norm_of_nabla(self)
    }

    /// Largest residual of `J² = −Id` and `h(Jx, Jy) = −h(x, y)` over the
    /// coordinate basis, and the signature of `h`.
    pub fn norden_residuals(&self, p: &[f64; 2]) -> Result<NordenResiduals, GeometryError> {
        let h = self.h(p)?;
        let j = self.j_tensor(p);
        let jj = linalg::mat_mul(&j, &j);
        let j_squared = linalg::max_abs_diff(&jj, &[[-1.0, 0.0], [0.0, -1.0]]);
        let jt = linalg::transpose(&j);
        let pulled = linalg::mat_mul(&linalg::mat_mul(&jt, &h), &j);
        let neg_h = h.map(|row| row.map(|x| -x));
        Ok(NordenResiduals {
            j_squared,
            compatibility: linalg::max_abs_diff(&pulled, &neg_h),
            signature: linalg::signature(&h),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NordenResiduals {
    pub j_squared: f64,
    pub compatibility: f64,
    pub signature: (usize, usize),
}

impl MetricChart<2> for NordenSurface {
    fn metric<S: Scalar>(&self, x: &[S; 2]) -> Result<[[S; 2]; 2], GeometryError> {
        self.h(x)
    }
}

impl EndomorphismField<2> for NordenSurface {
    fn endomorphism<S: Scalar>(&self, _x: &[S; 2]) -> Result<[[S; 2]; 2], GeometryError> {
        Ok(constant(&J))
    }
}

struct NegatedAssociated<'a>(&'a NordenSurface);

impl MetricChart<2> for NegatedAssociated<'_> {
    fn metric<S: Scalar>(&self, x: &[S; 2]) -> Result<[[S; 2]; 2], GeometryError> {
        let ht = self.0.h_tilde(x)?;
        Ok(ht.map(|row| row.map(|c| -c)))
    }
}

fn sectional_curvature_2d<C: MetricChart<2>>(
    chart: &C,
    p: &[f64; 2],
    x: &[f64; 2],
    y: &[f64; 2],
) -> Result<f64, GeometryError> {
    let geom = LocalGeometry::at(chart, p)?;
    let r = geom.riemann();
    let mut rxyyx = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    rxyyx += r[i][j][k][l] * x[i] * y[j] * y[k] * x[l];
                }
            }
        }
    }
    let g = &geom.g;
    let area = linalg::bilinear(g, x, x) * linalg::bilinear(g, y, y) - linalg::bilinear(g, x, y).powi(2);
    if area.abs() < 1e-14 {
        return Err(GeometryError::DegenerateSection(area));
    }
    Ok(rxyyx / area)
}
