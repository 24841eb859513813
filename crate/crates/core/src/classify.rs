//! φ-basis, fundamental tensor `F(x,y,z) = g((∇_x φ)y, z)`, Lee forms and
//! the split of `F` into its `F₁`, `F₄`, `F₅` parts.
//!
//! All φ-basis arrays are 0-based: index 0, 1, 2 stand for `e₁`, `e₂ = φe₁`
//! and `e₃ = ξ`. The classical component formulas for the Lee forms and the
//! class projections are quoted in the literature in a basis whose first
//! vector is `ξ`; they are transcribed here in the `(e₁, e₂, ξ)` order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::acb::AlmostContactMetric;
use crate::error::GeometryError;
use crate::geometry::LocalGeometry;
use crate::linalg;
use crate::tensor::{BasisTag, Frame, MetricAt, TensorComponents, Variance};

/// Default class tolerance on max-abs of F components.
pub const CLASS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiBasis {
    /// Coordinate components of `e₁`, `e₂`, `e₃`.
    pub e: [[f64; 3]; 3],
}

impl PhiBasis {
    pub fn frame(&self) -> Frame<3> {
        Frame::new(BasisTag::PhiBasis, self.e).expect("a φ-basis is linearly independent")
    }

    /// Largest violation of the φ-basis relations.
    pub fn relation_residual<M: AlmostContactMetric>(&self, m: &M, p: &[f64; 3]) -> Result<f64, GeometryError> {
        let g = LocalGeometry::at(m, p)?.metric();
        let phi = m.phi_at(p)?;
        let mut worst = 0.0f64;
        let mut bump = |x: f64| worst = worst.max(x.abs());
        let phi_e1 = linalg::mat_vec(&phi, &self.e[0]);
        let phi_e2 = linalg::mat_vec(&phi, &self.e[1]);
        for i in 0..3 {
            bump(phi_e1[i] - self.e[1][i]);
            bump(phi_e2[i] + self.e[0][i]);
            bump(self.e[2][i] - m.xi()[i]);
        }
        let norms = [1.0, -1.0, 1.0];
        for a in 0..3 {
            for b in 0..3 {
                let want = if a == b { norms[a] } else { 0.0 };
                bump(g.dot(&self.e[a], &self.e[b]) - want);
            }
        }
        Ok(worst)
    }
}

/// Builds `(e, φe, ξ)` from a horizontal seed: `e = cos s · seed + sin s · φ seed`
/// with `2s = atan2(g(seed, φ seed), g(seed, seed))`, normalised so that
/// `g(e, e) = 1`.
pub fn phi_basis_at<M: AlmostContactMetric>(m: &M, p: &[f64; 3], seed: &[f64; 3]) -> Result<PhiBasis, GeometryError> {
    let eta_seed: f64 = m.eta().iter().zip(seed).map(|(a, b)| a * b).sum();
    let scale = seed.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if eta_seed.abs() > 1e-12 * scale.max(1.0) {
        return Err(GeometryError::SeedNotHorizontal(eta_seed));
    }
    let g = LocalGeometry::at(m, p)?.metric();
    let phi = m.phi_at(p)?;
    let phi_seed = linalg::mat_vec(&phi, seed);
    let a = g.dot(seed, seed);
    let b = g.dot(seed, &phi_seed);
    if a.hypot(b) < 1e-14 {
        return Err(GeometryError::IsotropicSeed(a, b));
    }
    let s = 0.5 * b.atan2(a);
    let mut e: [f64; 3] = std::array::from_fn(|i| s.cos() * seed[i] + s.sin() * phi_seed[i]);
    let mut norm = g.dot(&e, &e);
    if norm < 0.0 {
        e = linalg::mat_vec(&phi, &e);
        norm = -norm;
    }
    let k = 1.0 / norm.sqrt();
    let e1 = e.map(|x| x * k);
    let e2 = linalg::mat_vec(&phi, &e1);
    Ok(PhiBasis { e: [e1, e2, m.xi()] })
}

/// Horizontal seed with the given `(u, v)` components.
pub fn horizontal_seed(u: f64, v: f64) -> [f64; 3] {
    [0.0, u, v]
}

/// `F_ijk = F(e_i, e_j, e_k)` in the given φ-basis.
pub fn f_tensor_at<M: AlmostContactMetric>(
    m: &M,
    p: &[f64; 3],
    basis: &PhiBasis,
) -> Result<TensorComponents<3>, GeometryError> {
    let geom = LocalGeometry::at(m, p)?;
    geom.structure_tensor(m)?.in_frame(&basis.frame())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeeForms {
    pub theta: [f64; 3],
    pub theta_star: [f64; 3],
    pub omega: [f64; 3],
}

/// Lee form components from the φ-basis components of `F`:
///
/// ```text
/// θ₁ = F₁₁₁ − F₂₂₁   θ₂ = F₁₁₂ − F₂₁₁   θ₃ = F₁₁₃ − F₂₂₃
/// θ*₁ = F₁₁₂ + F₂₁₁  θ*₂ = F₁₁₁ + F₂₂₁  θ*₃ = F₁₂₃ + F₂₁₃
/// ω₁ = F₃₃₁          ω₂ = F₃₃₂          ω₃ = 0
/// ```
pub fn lee_forms_from_components(f: &TensorComponents<3>) -> LeeForms {
    let c = |i: usize, j: usize, k: usize| f[[i - 1, j - 1, k - 1]];
    LeeForms {
        theta: [
            c(1, 1, 1) - c(2, 2, 1),
            c(1, 1, 2) - c(2, 1, 1),
            c(1, 1, 3) - c(2, 2, 3),
        ],
        theta_star: [
            c(1, 1, 2) + c(2, 1, 1),
            c(1, 1, 1) + c(2, 2, 1),
            c(1, 2, 3) + c(2, 1, 3),
        ],
        omega: [c(3, 3, 1), c(3, 3, 2), 0.0],
    }
}

/// Basis-free Lee forms: `θ(z) = g^{ij}F(e_i, e_j, z)`,
/// `θ*(z) = g^{ij}F(e_i, φe_j, z)` with the trace over the contact
/// distribution `H = ker η`, and `ω(z) = F(ξ, ξ, z)`.
///
/// `f` may be in any basis; `metric` and `phi` must be in the same basis
/// and `xi`, `eta` are the components of `ξ`, `η` there.
pub fn lee_forms_by_contraction(
    f: &TensorComponents<3>,
    metric: &MetricAt<3>,
    phi: &[[f64; 3]; 3],
    xi: &[f64; 3],
) -> LeeForms {
    // g restricted to H has inverse g^{-1} − ξ⊗ξ (ξ is a unit vector orthogonal to H)
    let h_inv: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| metric.g_inv[i][j] - xi[i] * xi[j]));
    let mut out = LeeForms {
        theta: [0.0; 3],
        theta_star: [0.0; 3],
        omega: [0.0; 3],
    };
    for z in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                out.theta[z] += h_inv[i][j] * f[[i, j, z]];
                for k in 0..3 {
                    out.theta_star[z] += h_inv[i][j] * phi[k][j] * f[[i, k, z]];
                }
                out.omega[z] += xi[i] * xi[j] * f[[i, j, z]];
            }
        }
    }
    out
}

pub fn lee_forms_at<M: AlmostContactMetric>(m: &M, p: &[f64; 3], basis: &PhiBasis) -> Result<LeeForms, GeometryError> {
    Ok(lee_forms_from_components(&f_tensor_at(m, p, basis)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    F0,
    F1,
    F4,
    F5,
    /// Non-zero remainder outside `F₁ ⊕ F₄ ⊕ F₅`.
    Complement,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::F0 => "F0",
            ClassLabel::F1 => "F1",
            ClassLabel::F4 => "F4",
            ClassLabel::F5 => "F5",
            ClassLabel::Complement => "complement",
        })
    }
}

/// Joins labels as `F1+F5`.
pub fn label_string(labels: &[ClassLabel]) -> String {
    labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("+")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassDecomposition {
    pub f_components: TensorComponents<3>,
    pub f1_part: TensorComponents<3>,
    pub f4_part: TensorComponents<3>,
    pub f5_part: TensorComponents<3>,
    /// `F − F¹ − F⁴ − F⁵`.
    pub residual: TensorComponents<3>,
    pub residual_norm: f64,
    pub label: Vec<ClassLabel>,
}

impl ClassDecomposition {
    pub fn label_string(&self) -> String {
        label_string(&self.label)
    }
}

/// `F¹`, `F⁴`, `F⁵` built from the Lee forms; with `x = xⁱeᵢ` etc.
///
/// ```text
/// F¹(x,y,z) = (x¹θ₁ − x²θ₂)(y¹z¹ + y²z²)
/// F⁴(x,y,z) = ½θ₃ {x¹(y³z¹ + y¹z³) − x²(y³z² + y²z³)}
/// F⁵(x,y,z) = ½θ*₃{x¹(y³z² + y²z³) + x²(y³z¹ + y¹z³)}
/// ```
pub fn decompose_f(f: &TensorComponents<3>, lee: &LeeForms, tol: f64) -> Result<ClassDecomposition, GeometryError> {
    if f.basis() != BasisTag::PhiBasis {
        return Err(GeometryError::BasisMismatch {
            left: f.basis(),
            right: BasisTag::PhiBasis,
        });
    }
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let slots = vec![Variance::Covariant; 3];
    let (th, ths) = (lee.theta, lee.theta_star);
    let f1 = TensorComponents::from_fn(slots.clone(), BasisTag::PhiBasis, |i| {
        let (x, y, z) = (i[0], i[1], i[2]);
        (d(x, 0) * th[0] - d(x, 1) * th[1]) * (d(y, 0) * d(z, 0) + d(y, 1) * d(z, 1))
    });
    let f4 = TensorComponents::from_fn(slots.clone(), BasisTag::PhiBasis, |i| {
        let (x, y, z) = (i[0], i[1], i[2]);
        0.5 * th[2]
            * (d(x, 0) * (d(y, 2) * d(z, 0) + d(y, 0) * d(z, 2)) - d(x, 1) * (d(y, 2) * d(z, 1) + d(y, 1) * d(z, 2)))
    });
    let f5 = TensorComponents::from_fn(slots, BasisTag::PhiBasis, |i| {
        let (x, y, z) = (i[0], i[1], i[2]);
        0.5 * ths[2]
            * (d(x, 0) * (d(y, 2) * d(z, 1) + d(y, 1) * d(z, 2)) + d(x, 1) * (d(y, 2) * d(z, 0) + d(y, 0) * d(z, 2)))
    });
    let residual = f.sub(&f1)?.sub(&f4)?.sub(&f5)?;
    let residual_norm = residual.max_abs();
    let mut label = Vec::new();
    if f.max_abs() < tol {
        label.push(ClassLabel::F0);
    } else {
        for (part, l) in [(&f1, ClassLabel::F1), (&f4, ClassLabel::F4), (&f5, ClassLabel::F5)] {
            if part.max_abs() >= tol {
                label.push(l);
            }
        }
        if residual_norm >= tol {
            label.push(ClassLabel::Complement);
        }
    }
    Ok(ClassDecomposition {
        f_components: f.clone(),
        f1_part: f1,
        f4_part: f4,
        f5_part: f5,
        residual,
        residual_norm,
        label,
    })
}

/// Convenience: φ-basis, F and its decomposition at a point.
pub fn classify_at<M: AlmostContactMetric>(
    m: &M,
    p: &[f64; 3],
    seed: &[f64; 3],
    tol: f64,
) -> Result<(PhiBasis, LeeForms, ClassDecomposition), GeometryError> {
    let basis = phi_basis_at(m, p, seed)?;
    let f = f_tensor_at(m, p, &basis)?;
    let lee = lee_forms_from_components(&f);
    let dec = decompose_f(&f, &lee, tol)?;
    Ok((basis, lee, dec))
}

/// `‖∇φ‖² = g^{ij}g^{ks} g((∇_{e_i}φ)e_k, (∇_{e_j}φ)e_s)`.
pub fn nabla_phi_square_norm_at<M: AlmostContactMetric>(m: &M, p: &[f64; 3]) -> Result<f64, GeometryError> {
    LocalGeometry::at(m, p)?.square_norm_of_nabla(m)
}
