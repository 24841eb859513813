//! Dense component arrays over a fixed basis of an `N`-dimensional tangent
//! space.
//!
//! Slots are stored in order with their variance, so `Γ^k_ij` is
//! `[Contravariant, Covariant, Covariant]` and `R_ijkl` is four covariant
//! slots. Components are row-major: the last slot varies fastest.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variance {
    Covariant,
    Contravariant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    Coordinate,
    PhiBasis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorComponents<const N: usize> {
    slots: Vec<Variance>,
    basis: BasisTag,
    data: Vec<f64>,
}

/// Metric and inverse metric in a given basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricAt<const N: usize> {
    pub basis: BasisTag,
    pub g: [[f64; N]; N],
    pub g_inv: [[f64; N]; N],
}

impl<const N: usize> MetricAt<N> {
    pub fn new(basis: BasisTag, g: [[f64; N]; N]) -> Result<Self, GeometryError> {
        let g_inv = linalg::inverse(&g).ok_or_else(|| GeometryError::Degenerate {
            point: vec![],
            det: linalg::det(&g),
        })?;
        Ok(Self { basis, g, g_inv })
    }

    pub fn dot(&self, x: &[f64; N], y: &[f64; N]) -> f64 {
        linalg::bilinear(&self.g, x, y)
    }
}

/// A basis of the tangent space, given by coordinate components of its
/// vectors (`vectors[a][i]` is the `i`-th coordinate component of `e_a`).
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<const N: usize> {
    pub tag: BasisTag,
    pub vectors: [[f64; N]; N],
    dual: [[f64; N]; N],
}

impl<const N: usize> Frame<N> {
    pub fn new(tag: BasisTag, vectors: [[f64; N]; N]) -> Option<Self> {
        // columns of E are the frame vectors; the dual basis is E^{-1}
        let e = linalg::transpose(&vectors);
        let dual = linalg::inverse(&e)?;
        Some(Self { tag, vectors, dual })
    }

    /// Frame components `x^a` of a coordinate vector.
    pub fn vector_components(&self, x: &[f64; N]) -> [f64; N] {
        linalg::mat_vec(&self.dual, x)
    }

    /// Coordinate components of the vector with frame components `c`.
    pub fn to_coordinates(&self, c: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|i| (0..N).map(|a| c[a] * self.vectors[a][i]).sum())
    }

    /// Components of an endomorphism (`A^i_j`, coordinate) in this frame.
    pub fn endomorphism(&self, a: &[[f64; N]; N]) -> [[f64; N]; N] {
        let e = linalg::transpose(&self.vectors);
        linalg::mat_mul(&linalg::mat_mul(&self.dual, a), &e)
    }

    /// The metric expressed in this frame.
    pub fn metric(&self, coord: &MetricAt<N>) -> Result<MetricAt<N>, GeometryError> {
        let g = std::array::from_fn(|a| std::array::from_fn(|b| coord.dot(&self.vectors[a], &self.vectors[b])));
        MetricAt::new(self.tag, g)
    }
}

fn pow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

impl<const N: usize> TensorComponents<N> {
    pub fn zeros(slots: Vec<Variance>, basis: BasisTag) -> Self {
        let len = pow(N, slots.len());
        Self {
            slots,
            basis,
            data: vec![0.0; len],
        }
    }

    pub fn covariant(rank: usize, basis: BasisTag) -> Self {
        Self::zeros(vec![Variance::Covariant; rank], basis)
    }

    pub fn from_fn(slots: Vec<Variance>, basis: BasisTag, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(slots, basis);
        let rank = t.rank();
        let mut idx = vec![0usize; rank];
        for flat in 0..t.data.len() {
            t.unravel(flat, &mut idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn covariant_rank(&self) -> usize {
        self.slots.iter().filter(|s| **s == Variance::Covariant).count()
    }

    pub fn contravariant_rank(&self) -> usize {
        self.rank() - self.covariant_rank()
    }

    pub fn slots(&self) -> &[Variance] {
        &self.slots
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.rank(), "index length does not match tensor rank");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < N, "index {i} out of range for dimension {N}");
            acc * N + i
        })
    }

    fn unravel(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in (0..idx.len()).rev() {
            idx[slot] = flat % N;
            flat /= N;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn check_compatible(&self, other: &Self) -> Result<(), GeometryError> {
        if self.basis != other.basis {
            return Err(GeometryError::BasisMismatch {
                left: self.basis,
                right: other.basis,
            });
        }
        if self.slots != other.slots {
            return Err(GeometryError::ShapeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, GeometryError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GeometryError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, GeometryError> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Replaces slot `slot` by `new[a] = Σ_i m[a][i] old[i]`.
    fn map_slot(&self, slot: usize, m: &[[f64; N]; N]) -> Self {
        let rank = self.rank();
        let mut idx = vec![0usize; rank];
        let mut src = vec![0usize; rank];
        let mut out = self.clone();
        for flat in 0..self.data.len() {
            self.unravel(flat, &mut idx);
            src.copy_from_slice(&idx);
            let a = idx[slot];
            out.data[flat] = (0..N)
                .map(|i| {
                    src[slot] = i;
                    m[a][i] * self.get(&src)
                })
                .sum();
        }
        out
    }

    fn check_slot(&self, slot: usize) -> Result<(), GeometryError> {
        if slot >= self.rank() {
            Err(GeometryError::SlotOutOfRange {
                slot,
                rank: self.rank(),
            })
        } else {
            Ok(())
        }
    }

    /// Musical isomorphism on one slot: covariant slots are raised with
    /// `g^{-1}`, contravariant slots lowered with `g`.
    pub fn raise_lower(&self, metric: &MetricAt<N>, slot: usize) -> Result<Self, GeometryError> {
        self.check_slot(slot)?;
        if metric.basis != self.basis {
            return Err(GeometryError::BasisMismatch {
                left: self.basis,
                right: metric.basis,
            });
        }
        let (m, flipped) = match self.slots[slot] {
            Variance::Covariant => (&metric.g_inv, Variance::Contravariant),
            Variance::Contravariant => (&metric.g, Variance::Covariant),
        };
        let mut out = self.map_slot(slot, m);
        out.slots[slot] = flipped;
        Ok(out)
    }

    /// Trace over two slots. Slots of opposite variance are traced
    /// directly; slots of equal variance need `metric` (its inverse is used
    /// for two covariant slots).
    pub fn contract(&self, slot_a: usize, slot_b: usize, metric: Option<&MetricAt<N>>) -> Result<Self, GeometryError> {
        self.check_slot(slot_a)?;
        self.check_slot(slot_b)?;
        if slot_a == slot_b {
            return Err(GeometryError::SlotOutOfRange {
                slot: slot_b,
                rank: self.rank(),
            });
        }
        let weights: [[f64; N]; N] = match (self.slots[slot_a], self.slots[slot_b], metric) {
            (a, b, _) if a != b => linalg::identity(),
            (_, _, None) => return Err(GeometryError::MetricRequired(slot_a, slot_b)),
            (v, _, Some(m)) => {
                if m.basis != self.basis {
                    return Err(GeometryError::BasisMismatch {
                        left: self.basis,
                        right: m.basis,
                    });
                }
                match v {
                    Variance::Covariant => m.g_inv,
                    Variance::Contravariant => m.g,
                }
            }
        };
        let slots: Vec<Variance> = self
            .slots
            .iter()
            .enumerate()
            .filter(|(s, _)| *s != slot_a && *s != slot_b)
            .map(|(_, v)| *v)
            .collect();
        let mut full = vec![0usize; self.rank()];
        Ok(Self::from_fn(slots, self.basis, |rest| {
            let mut it = rest.iter();
            for (s, slot_idx) in full.iter_mut().enumerate() {
                if s != slot_a && s != slot_b {
                    *slot_idx = *it.next().unwrap();
                }
            }
            let mut acc = 0.0;
            for i in 0..N {
                for j in 0..N {
                    if weights[i][j] != 0.0 {
                        full[slot_a] = i;
                        full[slot_b] = j;
                        acc += weights[i][j] * self.get(&full);
                    }
                }
            }
            acc
        }))
    }

    /// Components of a coordinate-basis tensor in `frame`.
    pub fn in_frame(&self, frame: &Frame<N>) -> Result<Self, GeometryError> {
        if self.basis != BasisTag::Coordinate {
            return Err(GeometryError::BasisMismatch {
                left: self.basis,
                right: BasisTag::Coordinate,
            });
        }
        let mut out = self.clone();
        for slot in 0..self.rank() {
            out = match self.slots[slot] {
                Variance::Covariant => out.map_slot(slot, &frame.vectors),
                Variance::Contravariant => out.map_slot(slot, &frame.dual),
            };
        }
        out.basis = frame.tag;
        Ok(out)
    }
}

impl<const N: usize, const R: usize> Index<[usize; R]> for TensorComponents<N> {
    type Output = f64;
    fn index(&self, idx: [usize; R]) -> &f64 {
        &self.data[self.offset(&idx)]
    }
}
