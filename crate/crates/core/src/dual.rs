//! Scalars that carry derivatives.
//!
//! [`HyperDual`] is a second-order forward-mode jet in `N` variables: value,
//! gradient and full (symmetric) Hessian. Every chart, structure field and
//! expression in this crate is written against the [`Scalar`] trait so the
//! same code evaluates over plain `f64` and over jets.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by metric charts and expression evaluation.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// The plain real part.
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn powi(self, n: u32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn scale(self, k: f64) -> Self {
        self * Self::from_f64(k)
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powi(self, n: u32) -> Self {
        f64::powi(self, n as i32)
    }
}

/// Value, gradient and Hessian of a function of `N` variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperDual<const N: usize> {
    pub value: f64,
    pub grad: [f64; N],
    pub hess: [[f64; N]; N],
}

impl<const N: usize> HyperDual<N> {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; N],
            hess: [[0.0; N]; N],
        }
    }

    /// The coordinate function `x_index` at `value`.
    pub fn variable(value: f64, index: usize) -> Self {
        assert!(index < N, "variable index {index} out of range for {N} variables");
        let mut out = Self::constant(value);
        out.grad[index] = 1.0;
        out
    }

    /// Seeds every coordinate of `point` as an independent variable.
    pub fn seed(point: &[f64; N]) -> [Self; N] {
        std::array::from_fn(|i| Self::variable(point[i], i))
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let mut out = Self::constant(f);
        for i in 0..N {
            out.grad[i] = df * self.grad[i];
            for j in 0..N {
                out.hess[i][j] = df * self.hess[i][j] + d2f * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn recip(self) -> Self {
        let x = self.value;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    /// Largest asymmetry of the Hessian part.
    pub fn hessian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.hess[i][j] - self.hess[j][i]).abs());
            }
        }
        worst
    }
}

impl<const N: usize> Add for HyperDual<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for i in 0..N {
            self.grad[i] += rhs.grad[i];
            for j in 0..N {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for HyperDual<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Neg for HyperDual<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.value = -self.value;
        for i in 0..N {
            self.grad[i] = -self.grad[i];
            for j in 0..N {
                self.hess[i][j] = -self.hess[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Mul for HyperDual<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self, rhs);
        let mut out = Self::constant(a.value * b.value);
        for i in 0..N {
            out.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
            for j in 0..N {
                out.hess[i][j] =
                    a.value * b.hess[i][j] + b.value * a.hess[i][j] + a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j];
            }
        }
        out
    }
}

impl<const N: usize> Div for HyperDual<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<const N: usize> Scalar for HyperDual<N> {
    fn from_f64(x: f64) -> Self {
        Self::constant(x)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn powi(self, n: u32) -> Self {
        let x = self.value;
        let nf = n as f64;
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => self.chain(
                x.powi(n as i32),
                nf * x.powi(n as i32 - 1),
                nf * (nf - 1.0) * x.powi(n as i32 - 2),
            ),
        }
    }
    fn scale(mut self, k: f64) -> Self {
        self.value *= k;
        for i in 0..N {
            self.grad[i] *= k;
            for j in 0..N {
                self.hess[i][j] *= k;
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type H2 = HyperDual<2>;

    #[test]
    fn product_rule() {
        let [u, v] = H2::seed(&[2.0, 3.0]);
        let p = u * v;
        assert_eq!(p.value, 6.0);
        assert_eq!(p.grad, [3.0, 2.0]);
        assert_eq!(p.hess, [[0.0, 1.0], [1.0, 0.0]]);
    }

    #[test]
    fn exp_at_zero() {
        let u = H2::variable(0.0, 0);
        let e = u.exp();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.grad[0], 1.0);
        assert_eq!(e.hess[0][0], 1.0);
    }

    #[test]
    fn quotient_and_powers_match_closed_forms() {
        let [u, v] = H2::seed(&[1.5, -0.5]);
        let q = u / (v * v + H2::one());
        // q = u / (v^2 + 1)
        let d = 1.25;
        assert!((q.value - 1.5 / d).abs() < 1e-15);
        assert!((q.grad[0] - 1.0 / d).abs() < 1e-15);
        assert!((q.grad[1] - (-1.5 * 2.0 * -0.5 / (d * d))).abs() < 1e-15);
        let c = u.powi(3);
        assert!((c.hess[0][0] - 6.0 * 1.5).abs() < 1e-14);
        assert_eq!(u.powi(0), H2::one());
    }

    #[test]
    fn trig_identity_has_no_derivative() {
        let [_, v] = H2::seed(&[0.3, 0.77]);
        let one = v.sin().powi(2) + v.cos().powi(2);
        assert!((one.value - 1.0).abs() < 1e-15);
        assert!(one.grad.iter().all(|g| g.abs() < 1e-15));
        assert!(one.hess.iter().flatten().all(|h| h.abs() < 1e-15));
    }

    #[test]
    fn constants_reduce_to_reals() {
        let x = H2::constant(0.4);
        let y = (x.sin() * x.exp() - x.cos()) / (x + H2::from_f64(2.0));
        let r = (0.4f64.sin() * 0.4f64.exp() - 0.4f64.cos()) / 2.4;
        assert_eq!(y.value, r);
        assert_eq!(y.grad, [0.0; 2]);
    }
}
