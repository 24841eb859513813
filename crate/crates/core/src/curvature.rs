//! Curvature tables in a φ-basis: `R_ijkl`, Ricci `ρ`, the associated
//! `ρ*`, the scalars `τ`, `τ*`, `τ**` and the basic sectional curvatures.

use serde::{Deserialize, Serialize};

use crate::acb::{AlmostContactMetric, ManifoldKind};
use crate::classify::PhiBasis;
use crate::error::GeometryError;
use crate::geometry::{riemann_tensor, LocalGeometry};
use crate::linalg;
use crate::tensor::TensorComponents;

/// `g_ij` in any φ-basis.
pub const PHI_BASIS_METRIC: [f64; 3] = [1.0, -1.0, 1.0];

/// `φ` acting on φ-basis indices: `φe₁ = e₂`, `φe₂ = −e₁`, `φe₃ = 0`.
fn phi_of_basis_vector(j: usize) -> Option<(usize, f64)> {
    match j {
        0 => Some((1, 1.0)),
        1 => Some((0, -1.0)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTable {
    /// `R_ijkl = R(e_i, e_j, e_k, e_l)`, row-major.
    pub r_phi_basis: Vec<f64>,
    pub rho: [[f64; 3]; 3],
    pub rho_star: [[f64; 3]; 3],
    pub tau: f64,
    pub tau_star: f64,
    pub tau_star2: f64,
    pub k12: f64,
    pub k13: f64,
    pub k23: f64,
    pub point: [f64; 3],
    pub kind: Option<ManifoldKind>,
}

impl CurvatureTable {
    /// `R_ijkl` with 0-based indices.
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r_phi_basis[((i * 3 + j) * 3 + k) * 3 + l]
    }

    /// Largest violation of the pair antisymmetries, pair symmetry and
    /// the first Bianchi identity.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let r = self.r(i, j, k, l);
                        worst = worst
                            .max((r + self.r(j, i, k, l)).abs())
                            .max((r + self.r(i, j, l, k)).abs())
                            .max((r - self.r(k, l, i, j)).abs())
                            .max((r + self.r(j, k, i, l) + self.r(k, i, j, l)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `τ` recomputed as `g^{ij}ρ_ij`.
    pub fn trace_of_rho(&self) -> f64 {
        (0..3).map(|i| self.rho[i][i] / PHI_BASIS_METRIC[i]).sum()
    }
}

/// `R_ijkl` transformed into the φ-basis.
pub fn riemann_in_basis<M: AlmostContactMetric>(
    m: &M,
    p: &[f64; 3],
    basis: &PhiBasis,
) -> Result<TensorComponents<3>, GeometryError> {
    let r = LocalGeometry::at(m, p)?.riemann();
    riemann_tensor(&r).in_frame(&basis.frame())
}

pub fn curvature_table_at<M: AlmostContactMetric>(
    m: &M,
    p: &[f64; 3],
    basis: &PhiBasis,
    kind: Option<ManifoldKind>,
) -> Result<CurvatureTable, GeometryError> {
    let r = riemann_in_basis(m, p, basis)?;
    let g = PHI_BASIS_METRIC;
    let mut rho = [[0.0; 3]; 3];
    let mut rho_star = [[0.0; 3]; 3];
    for y in 0..3 {
        for z in 0..3 {
            for i in 0..3 {
                // g^{ii} = 1 / g_ii in an orthonormal-style frame
                rho[y][z] += r[[i, y, z, i]] / g[i];
                if let Some((j, sign)) = phi_of_basis_vector(i) {
                    rho_star[y][z] += sign * r[[i, y, z, j]] / g[i];
                }
            }
        }
    }
    let mut tau = 0.0;
    let mut tau_star = 0.0;
    let mut tau_star2 = 0.0;
    for i in 0..3 {
        tau += rho[i][i] / g[i];
        tau_star += rho_star[i][i] / g[i];
        if let Some((j, sign)) = phi_of_basis_vector(i) {
            tau_star2 += sign * rho_star[i][j] / g[i];
        }
    }
    // k_ij = R(e_i, e_j, e_j, e_i) / (g_ii g_jj)
    let k = |i: usize, j: usize| r[[i, j, j, i]] / (g[i] * g[j]);
    Ok(CurvatureTable {
        r_phi_basis: r.data().to_vec(),
        rho,
        rho_star,
        tau,
        tau_star,
        tau_star2,
        k12: k(0, 1),
        k13: k(0, 2),
        k23: k(1, 2),
        point: *p,
        kind,
    })
}

/// Sectional curvature of the plane spanned by coordinate vectors `x`, `y`.
pub fn sectional_curvature_at<M: AlmostContactMetric>(
    m: &M,
    p: &[f64; 3],
    x: &[f64; 3],
    y: &[f64; 3],
) -> Result<f64, GeometryError> {
    let geom = LocalGeometry::at(m, p)?;
    let r = geom.riemann();
    let mut rxyyx = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
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

/// `(π₁, π₂)(x, y, z, w)` for coordinate vectors:
/// `π₁ = g(y,z)g(x,w) − g(x,z)g(y,w)`,
/// `π₂ = g(y,φz)g(x,φw) − g(x,φz)g(y,φw)`.
pub fn pi_tensors_at<M: AlmostContactMetric>(
    m: &M,
    p: &[f64; 3],
    x: &[f64; 3],
    y: &[f64; 3],
    z: &[f64; 3],
    w: &[f64; 3],
) -> Result<(f64, f64), GeometryError> {
    let g = LocalGeometry::at(m, p)?.g;
    let phi = m.phi_at(p)?;
    Ok(pi_tensors(&g, &phi, x, y, z, w))
}

/// Same as [`pi_tensors_at`] with the metric and `φ` already evaluated.
pub fn pi_tensors(
    g: &[[f64; 3]; 3],
    phi: &[[f64; 3]; 3],
    x: &[f64; 3],
    y: &[f64; 3],
    z: &[f64; 3],
    w: &[f64; 3],
) -> (f64, f64) {
    let b = |a: &[f64; 3], c: &[f64; 3]| linalg::bilinear(g, a, c);
    let pz = linalg::mat_vec(phi, z);
    let pw = linalg::mat_vec(phi, w);
    let pi1 = b(y, z) * b(x, w) - b(x, z) * b(y, w);
    let pi2 = b(y, &pz) * b(x, &pw) - b(x, &pz) * b(y, &pw);
    (pi1, pi2)
}
