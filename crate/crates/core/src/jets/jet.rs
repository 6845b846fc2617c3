use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Highest derivative order carried by a [`Jet`].
pub const MAX_ORDER: usize = 3;

/// Truncated Taylor data of a scalar field at a point: value, gradient,
/// Hessian and third-derivative tensor. Entries beyond `order` are zero.
///
/// Arithmetic on jets is forward-mode differentiation: sums, products and
/// compositions with univariate functions propagate all derivatives up to
/// order three exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub n: usize,
    pub order: usize,
    pub value: f64,
    pub gradient: [f64; 3],
    pub hessian: [[f64; 3]; 3],
    pub third: [[[f64; 3]; 3]; 3],
}

impl Jet {
    pub fn constant(n: usize, c: f64) -> Self {
        Self {
            n,
            order: MAX_ORDER,
            value: c,
            gradient: [0.0; 3],
            hessian: [[0.0; 3]; 3],
            third: [[[0.0; 3]; 3]; 3],
        }
    }

    /// The coordinate function `x_i` evaluated at `x`.
    pub fn variable(n: usize, i: usize, x: f64) -> Self {
        let mut j = Self::constant(n, x);
        j.gradient[i] = 1.0;
        j
    }

    /// Zeroes every entry above `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        if order < 1 {
            self.gradient = [0.0; 3];
        }
        if order < 2 {
            self.hessian = [[0.0; 3]; 3];
        }
        if order < 3 {
            self.third = [[[0.0; 3]; 3]; 3];
        }
        self.order = order;
        self
    }

    pub fn scale(mut self, c: f64) -> Self {
        self.value *= c;
        for i in 0..3 {
            self.gradient[i] *= c;
            for j in 0..3 {
                self.hessian[i][j] *= c;
                for k in 0..3 {
                    self.third[i][j][k] *= c;
                }
            }
        }
        self
    }

    /// Jet of `x -> f(s * x + b)` given the jet of `f` at `s * x + b`:
    /// derivatives of order k pick up a factor `s^k`.
    pub fn chain_scale(mut self, s: f64) -> Self {
        let s2 = s * s;
        let s3 = s2 * s;
        for i in 0..3 {
            self.gradient[i] *= s;
            for j in 0..3 {
                self.hessian[i][j] *= s2;
                for k in 0..3 {
                    self.third[i][j][k] *= s3;
                }
            }
        }
        self
    }

    /// Jet of `phi(u)` where `d = [phi(u), phi'(u), phi''(u), phi'''(u)]`.
    pub fn compose(&self, d: [f64; 4]) -> Self {
        let n = self.n;
        let u = self;
        let mut out = Self::constant(n, d[0]);
        out.order = u.order;
        for i in 0..n {
            out.gradient[i] = d[1] * u.gradient[i];
            for j in 0..n {
                out.hessian[i][j] =
                    d[2] * u.gradient[i] * u.gradient[j] + d[1] * u.hessian[i][j];
                for k in 0..n {
                    out.third[i][j][k] = d[3] * u.gradient[i] * u.gradient[j] * u.gradient[k]
                        + d[2]
                            * (u.hessian[i][j] * u.gradient[k]
                                + u.hessian[i][k] * u.gradient[j]
                                + u.hessian[j][k] * u.gradient[i])
                        + d[1] * u.third[i][j][k];
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let t = self.value;
        let r = 1.0 / t;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    /// Integer power `u^k` (k may be negative).
    pub fn powi(&self, k: i32) -> Self {
        let t = self.value;
        let mut d = [0.0; 4];
        let mut coef = 1.0;
        for (m, slot) in d.iter_mut().enumerate() {
            if coef == 0.0 {
                break;
            }
            *slot = coef * t.powi(k - m as i32);
            coef *= (k - m as i32) as f64;
        }
        self.compose(d)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose([e, e, e, e])
    }

    pub fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        self.compose([
            r,
            0.5 / r,
            -0.25 / (r * r * r),
            0.375 / (r * r * r * r * r),
        ])
    }

    /// Smooth absolute value `sqrt(u^2 + eps^2)`.
    pub fn abs_smooth(&self, eps: f64) -> Self {
        let t = self.value;
        let q = t * t + eps * eps;
        let r = q.sqrt();
        let e2 = eps * eps;
        self.compose([
            r,
            t / r,
            e2 / (q * r),
            -3.0 * e2 * t / (q * q * r),
        ])
    }

    /// Euclidean norm of the jet truncated at `order`, one term per
    /// multi-index `|alpha| <= order`.
    pub fn norm(&self, order: usize) -> f64 {
        let n = self.n;
        let mut s = self.value * self.value;
        if order >= 1 {
            s += self.gradient[..n].iter().map(|g| g * g).sum::<f64>();
        }
        if order >= 2 {
            for i in 0..n {
                for j in i..n {
                    s += self.hessian[i][j] * self.hessian[i][j];
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        s += self.third[i][j][k] * self.third[i][j][k];
                    }
                }
            }
        }
        s.sqrt()
    }

    pub fn gradient_norm(&self) -> f64 {
        self.gradient[..self.n].iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    /// Largest asymmetry of the Hessian and third tensor.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.hessian[i][j] - self.hessian[j][i]).abs());
                for k in 0..self.n {
                    let t = self.third[i][j][k];
                    worst = worst
                        .max((t - self.third[j][i][k]).abs())
                        .max((t - self.third[i][k][j]).abs())
                        .max((t - self.third[k][j][i]).abs());
                }
            }
        }
        worst
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self.value += o.value;
        for i in 0..3 {
            self.gradient[i] += o.gradient[i];
            for j in 0..3 {
                self.hessian[i][j] += o.hessian[i][j];
                for k in 0..3 {
                    self.third[i][j][k] += o.third[i][j][k];
                }
            }
        }
        self.order = self.order.min(o.order);
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, v: Jet) -> Jet {
        let u = self;
        let n = u.n;
        let mut out = Jet::constant(n, u.value * v.value);
        out.order = u.order.min(v.order);
        for i in 0..n {
            out.gradient[i] = u.gradient[i] * v.value + u.value * v.gradient[i];
            for j in 0..n {
                out.hessian[i][j] = u.hessian[i][j] * v.value
                    + u.gradient[i] * v.gradient[j]
                    + u.gradient[j] * v.gradient[i]
                    + u.value * v.hessian[i][j];
                for k in 0..n {
                    out.third[i][j][k] = u.third[i][j][k] * v.value
                        + u.hessian[i][j] * v.gradient[k]
                        + u.hessian[i][k] * v.gradient[j]
                        + u.hessian[j][k] * v.gradient[i]
                        + u.gradient[i] * v.hessian[j][k]
                        + u.gradient[j] * v.hessian[i][k]
                        + u.gradient[k] * v.hessian[i][j]
                        + u.value * v.third[i][j][k];
                }
            }
        }
        out
    }
}
