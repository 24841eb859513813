//! Independent finite-difference oracles and random model generators
//! shared by the integration tests.

#![allow(dead_code)]

use bmetric_core::geometry::MetricChart;
use bmetric_core::{make_conformal_surface, NordenSurface};
use rand::Rng;

pub fn metric<const N: usize, C: MetricChart<N>>(c: &C, p: &[f64; N]) -> [[f64; N]; N] {
    c.metric::<f64>(p).unwrap()
}

fn shifted<const N: usize>(p: &[f64; N], i: usize, h: f64) -> [f64; N] {
    let mut q = *p;
    q[i] += h;
    q
}

fn inverse<const N: usize>(g: &[[f64; N]; N]) -> [[f64; N]; N] {
    // Gauss-Jordan; kept local so the oracle shares no code with the engine
    let mut a = *g;
    let mut inv = [[0.0; N]; N];
    for i in 0..N {
        inv[i][i] = 1.0;
    }
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..N {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..N {
            if r != col {
                let f = a[r][col];
                for j in 0..N {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

/// `∂_k g_ij` by fourth-order central differences.
fn metric_derivative<const N: usize, C: MetricChart<N>>(c: &C, p: &[f64; N], h: f64) -> [[[f64; N]; N]; N] {
    let mut d = [[[0.0; N]; N]; N];
    for k in 0..N {
        let gp = metric(c, &shifted(p, k, h));
        let gm = metric(c, &shifted(p, k, -h));
        let gp2 = metric(c, &shifted(p, k, 2.0 * h));
        let gm2 = metric(c, &shifted(p, k, -2.0 * h));
        for i in 0..N {
            for j in 0..N {
                d[k][i][j] = (8.0 * (gp[i][j] - gm[i][j]) - (gp2[i][j] - gm2[i][j])) / (12.0 * h);
            }
        }
    }
    d
}

/// `Γ^k_ij` from differenced metric values.
pub fn fd_christoffel<const N: usize, C: MetricChart<N>>(c: &C, p: &[f64; N], h: f64) -> [[[f64; N]; N]; N] {
    let g_inv = inverse(&metric(c, p));
    let dg = metric_derivative(c, p, h);
    let mut gamma = [[[0.0; N]; N]; N];
    for k in 0..N {
        for i in 0..N {
            for j in 0..N {
                for l in 0..N {
                    gamma[k][i][j] += 0.5 * g_inv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
            }
        }
    }
    gamma
}

/// `R_ijkl = g_lm R^m_ijk` with `R^m_ijk = ∂_iΓ^m_jk − ∂_jΓ^m_ik + Γ^m_ipΓ^p_jk − Γ^m_jpΓ^p_ik`.
pub fn fd_riemann<const N: usize, C: MetricChart<N>>(c: &C, p: &[f64; N]) -> [[[[f64; N]; N]; N]; N] {
    let (outer, inner) = (1e-3, 1e-3);
    let gamma = fd_christoffel(c, p, inner);
    let mut d_gamma = [[[[0.0; N]; N]; N]; N];
    for i in 0..N {
        let gp = fd_christoffel(c, &shifted(p, i, outer), inner);
        let gm = fd_christoffel(c, &shifted(p, i, -outer), inner);
        let gp2 = fd_christoffel(c, &shifted(p, i, 2.0 * outer), inner);
        let gm2 = fd_christoffel(c, &shifted(p, i, -2.0 * outer), inner);
        for m in 0..N {
            for j in 0..N {
                for k in 0..N {
                    d_gamma[i][m][j][k] =
                        (8.0 * (gp[m][j][k] - gm[m][j][k]) - (gp2[m][j][k] - gm2[m][j][k])) / (12.0 * outer);
                }
            }
        }
    }
    let g = metric(c, p);
    let mut r = [[[[0.0; N]; N]; N]; N];
    for i in 0..N {
        for j in 0..N {
            for k in 0..N {
                for l in 0..N {
                    let mut v = 0.0;
                    for m in 0..N {
                        let mut up = d_gamma[i][m][j][k] - d_gamma[j][m][i][k];
                        for q in 0..N {
                            up += gamma[m][i][q] * gamma[q][j][k] - gamma[m][j][q] * gamma[q][i][k];
                        }
                        v += g[l][m] * up;
                    }
                    r[i][j][k][l] = v;
                }
            }
        }
    }
    r
}

/// Gaussian curvature of a surface from the differenced curvature tensor.
pub fn fd_gaussian_curvature(s: &NordenSurface, p: &[f64; 2]) -> f64 {
    let r = fd_riemann(s, p);
    let g = metric(s, p);
    r[0][1][1][0] / (g[0][0] * g[1][1] - g[0][1] * g[1][0])
}

/// Conformal-factor templates with random coefficients; kept small so
/// `e^{2a}` stays well conditioned on the sampled box.
pub fn random_conformal_base<R: Rng>(rng: &mut R) -> NordenSurface {
    let c: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let a = match rng.gen_range(0..3) {
        0 => format!("{}*u^2 + {}*v", c[0], c[1]),
        1 => format!("{}*sin(u) + {}*u*v + {}*v^2", c[0], c[1], c[2]),
        _ => format!("{}*exp({}*u) - {}*cos(v)", c[0], c[1], c[2]),
    };
    let b = match rng.gen_range(0..3) {
        0 => "0".to_string(),
        1 => format!("{}*u + {}*v^2", c[3], c[4]),
        _ => format!("{}*sin(u*v) + {}", c[3], c[4]),
    };
    make_conformal_surface(a.parse().unwrap(), b.parse().unwrap())
}

pub fn random_point<R: Rng>(rng: &mut R, cone: bool) -> [f64; 3] {
    let t = if cone {
        rng.gen_range(0.5..2.5)
    } else {
        rng.gen_range(-1.5..1.5)
    };
    [t, rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)]
}
