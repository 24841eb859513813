//! Small fixed-size matrix helpers over `[[f64; N]; N]`.

use nalgebra::{DMatrix, SMatrix};

fn to_na<const N: usize>(m: &[[f64; N]; N]) -> SMatrix<f64, N, N> {
    SMatrix::from_fn(|i, j| m[i][j])
}

fn to_dyn<const N: usize>(m: &[[f64; N]; N]) -> DMatrix<f64> {
    DMatrix::from_fn(N, N, |i, j| m[i][j])
}

fn from_na<const N: usize>(m: &SMatrix<f64, N, N>) -> [[f64; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

pub fn identity<const N: usize>() -> [[f64; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

pub fn det<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    to_dyn(m).determinant()
}

pub fn inverse<const N: usize>(m: &[[f64; N]; N]) -> Option<[[f64; N]; N]> {
    to_na(m).try_inverse().map(|inv| from_na(&inv))
}

pub fn transpose<const N: usize>(m: &[[f64; N]; N]) -> [[f64; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i]))
}

pub fn mat_mul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..N).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn mat_vec<const N: usize>(a: &[[f64; N]; N], x: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| (0..N).map(|k| a[i][k] * x[k]).sum())
}

pub fn bilinear<const N: usize>(g: &[[f64; N]; N], x: &[f64; N], y: &[f64; N]) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        for j in 0..N {
            acc += g[i][j] * x[i] * y[j];
        }
    }
    acc
}

pub fn max_abs_diff<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((a[i][j] - b[i][j]).abs());
        }
    }
    worst
}

/// Number of (positive, negative) eigenvalues of a symmetric matrix.
pub fn signature<const N: usize>(m: &[[f64; N]; N]) -> (usize, usize) {
    let eig = to_dyn(m).symmetric_eigen();
    let pos = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
    let neg = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
    (pos, neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_signature() {
        let m = [[1.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, -4.0]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[1][1], 0.25);
        assert_eq!(det(&m), -16.0);
        assert_eq!(signature(&m), (2, 1));
        assert!(inverse(&[[1.0, 2.0], [2.0, 4.0]]).is_none());
    }
}
