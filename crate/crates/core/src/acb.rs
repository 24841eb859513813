//! Almost contact B-metric manifolds `(M, φ, ξ, η, g)` built over a Norden
//! surface in coordinates `(t, u, v)`.
//!
//! * cone: `g = dt² + t² h`, `t > 0`;
//! * S¹-solvable extension: `g = dt² + cos 2t · h − sin 2t · h̃`.
//!
//! In both, `φ|_H = J`, `ξ = ∂t`, `η = dt`.

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::GeometryError;
use crate::expr::ScalarFieldExpr;
use crate::geometry::{metric_at, EndomorphismField, MetricChart};
use crate::linalg;
use crate::norden::NordenSurface;

pub const XI: [f64; 3] = [1.0, 0.0, 0.0];
pub const ETA: [f64; 3] = [1.0, 0.0, 0.0];

/// Axiom residuals above this fail [`check_acb_axioms`].
pub const AXIOM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKind {
    Cone,
    S1Extension,
}

/// A metric with an almost contact structure on a 3-dimensional chart.
pub trait AlmostContactMetric: MetricChart<3> + EndomorphismField<3> + Sync {
    fn xi(&self) -> [f64; 3];
    fn eta(&self) -> [f64; 3];

    fn phi_at(&self, p: &[f64; 3]) -> Result<[[f64; 3]; 3], GeometryError> {
        self.endomorphism(p)
    }
}

/// Additive change to one metric entry (and its mirror); used to build
/// negative-control fixtures.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricPerturbation {
    pub row: usize,
    pub col: usize,
    pub expr: ScalarFieldExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcbManifold {
    kind: ManifoldKind,
    base: NordenSurface,
    perturbation: Option<MetricPerturbation>,
}

pub fn cone_of(base: NordenSurface) -> AcbManifold {
    AcbManifold {
        kind: ManifoldKind::Cone,
        base,
        perturbation: None,
    }
}

pub fn s1_extension_of(base: NordenSurface) -> AcbManifold {
    AcbManifold {
        kind: ManifoldKind::S1Extension,
        base,
        perturbation: None,
    }
}

impl AcbManifold {
    pub fn new(kind: ManifoldKind, base: NordenSurface) -> Self {
        match kind {
            ManifoldKind::Cone => cone_of(base),
            ManifoldKind::S1Extension => s1_extension_of(base),
        }
    }

    pub fn with_perturbation(mut self, perturbation: MetricPerturbation) -> Self {
        assert!(perturbation.row < 3 && perturbation.col < 3);
        self.perturbation = Some(perturbation);
        self
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn base(&self) -> &NordenSurface {
        &self.base
    }

    pub fn is_perturbed(&self) -> bool {
        self.perturbation.is_some()
    }

    /// Projection to the base point `(u, v)`.
    pub fn base_point(p: &[f64; 3]) -> [f64; 2] {
        [p[1], p[2]]
    }

    /// `g̃(x, y) = g(x, φy) + η(x)η(y)`.
    pub fn associated_metric_at(&self, p: &[f64; 3], x: &[f64; 3], y: &[f64; 3]) -> Result<f64, GeometryError> {
        let eta = self.eta();
        Ok(self.g_star_at(p, x, y)? + dot(&eta, x) * dot(&eta, y))
    }

    /// `g*(x, y) = g(x, φy)`.
    pub fn g_star_at(&self, p: &[f64; 3], x: &[f64; 3], y: &[f64; 3]) -> Result<f64, GeometryError> {
        let g = metric_at(self, p)?;
        let phi_y = linalg::mat_vec(&self.phi_at(p)?, y);
        Ok(g.dot(x, &phi_y))
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl MetricChart<3> for AcbManifold {
    fn metric<S: Scalar>(&self, x: &[S; 3]) -> Result<[[S; 3]; 3], GeometryError> {
        let t = x[0];
        let q = [x[1], x[2]];
        let horizontal: [[S; 2]; 2] = match self.kind {
            ManifoldKind::Cone => {
                if !(t.value() > 0.0) {
                    return Err(GeometryError::OutsideDomain {
                        point: x.iter().map(Scalar::value).collect(),
                        reason: "the cone needs t > 0".into(),
                    });
                }
                let h = self.base.h(&q)?;
                let t2 = t * t;
                std::array::from_fn(|i| std::array::from_fn(|j| t2 * h[i][j]))
            }
            ManifoldKind::S1Extension => {
                let h = self.base.h(&q)?;
                let ht = self.base.h_tilde(&q)?;
                let (c, s) = (t.scale(2.0).cos(), t.scale(2.0).sin());
                std::array::from_fn(|i| std::array::from_fn(|j| c * h[i][j] - s * ht[i][j]))
            }
        };
        let mut g = [[S::zero(); 3]; 3];
        g[0][0] = S::one();
        for i in 0..2 {
            for j in 0..2 {
                g[i + 1][j + 1] = horizontal[i][j];
            }
        }
        if let Some(pert) = &self.perturbation {
            let d = pert.expr.eval(q[0], q[1])?;
            g[pert.row][pert.col] = g[pert.row][pert.col] + d;
            if pert.row != pert.col {
                g[pert.col][pert.row] = g[pert.col][pert.row] + d;
            }
        }
        Ok(g)
    }
}

impl EndomorphismField<3> for AcbManifold {
    fn endomorphism<S: Scalar>(&self, x: &[S; 3]) -> Result<[[S; 3]; 3], GeometryError> {
        let j = self.base.endomorphism(&[x[1], x[2]])?;
        let mut phi = [[S::zero(); 3]; 3];
        for i in 0..2 {
            for k in 0..2 {
                phi[i + 1][k + 1] = j[i][k];
            }
        }
        Ok(phi)
    }
}

impl AlmostContactMetric for AcbManifold {
    fn xi(&self) -> [f64; 3] {
        XI
    }
    fn eta(&self) -> [f64; 3] {
        ETA
    }
}

/// Axiom residuals at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomPoint {
    pub point: [f64; 3],
    /// `(axiom name, max residual)`; empty when evaluation failed.
    pub residuals: Vec<(String, f64)>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub points: Vec<AxiomPoint>,
    pub tolerance: f64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.error.is_none() && p.residuals.iter().all(|(_, r)| *r < self.tolerance))
    }

    /// Names of axioms that failed somewhere.
    pub fn failures(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .points
            .iter()
            .flat_map(|p| {
                p.residuals
                    .iter()
                    .filter(|(_, r)| !(*r < self.tolerance))
                    .map(|(n, _)| n.clone())
            })
            .collect();
        names.sort();
        names.dedup();
        names
    }
}

/// Residuals of `φξ = 0`, `φ² = −Id + η⊗ξ`, `η∘φ = 0`, `η(ξ) = 1`,
/// `g(φx, φy) = −g(x, y) + η(x)η(y)` and the signature `(2, 1)`.
pub fn axiom_residuals<M: AlmostContactMetric>(m: &M, p: &[f64; 3]) -> Result<Vec<(String, f64)>, GeometryError> {
    let g = metric_at(m, p)?;
    let phi = m.phi_at(p)?;
    let (xi, eta) = (m.xi(), m.eta());

    let phi_xi = linalg::mat_vec(&phi, &xi).iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let phi2 = linalg::mat_mul(&phi, &phi);
    let target: [[f64; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| -(if i == j { 1.0 } else { 0.0 }) + xi[i] * eta[j]));
    let phi_squared = linalg::max_abs_diff(&phi2, &target);
    let eta_phi = (0..3)
        .map(|j| (0..3).map(|i| eta[i] * phi[i][j]).sum::<f64>().abs())
        .fold(0.0, f64::max);
    let eta_xi = (dot(&eta, &xi) - 1.0).abs();
    let pulled = linalg::mat_mul(&linalg::mat_mul(&linalg::transpose(&phi), &g.g), &phi);
    let expected: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| -g.g[i][j] + eta[i] * eta[j]));
    let compatibility = linalg::max_abs_diff(&pulled, &expected);
    let signature = if linalg::signature(&g.g) == (2, 1) { 0.0 } else { 1.0 };

    Ok(vec![
        ("phi_xi".into(), phi_xi),
        ("phi_squared".into(), phi_squared),
        ("eta_phi".into(), eta_phi),
        ("eta_xi".into(), eta_xi),
        ("compatibility".into(), compatibility),
        ("signature".into(), signature),
    ])
}

pub fn check_acb_axioms<M: AlmostContactMetric>(m: &M, points: &[[f64; 3]]) -> AxiomReport {
    let points = points
        .iter()
        .map(|p| match axiom_residuals(m, p) {
            Ok(residuals) => AxiomPoint {
                point: *p,
                residuals,
                error: None,
            },
            Err(e) => AxiomPoint {
                point: *p,
                residuals: vec![],
                error: Some(e.to_string()),
            },
        })
        .collect();
    AxiomReport {
        points,
        tolerance: AXIOM_TOL,
    }
}
