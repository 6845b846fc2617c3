//! Total-degree Chebyshev least squares on the bounding box of a disk.
//!
//! Samples live on a tensor Gauss-Chebyshev grid with `m >= d + 1` nodes per
//! axis, where the Chebyshev polynomials of degree `< m` are exactly
//! orthogonal. The least-squares coefficients are therefore plain weighted
//! sums, computed one axis at a time.

use crate::jets::ScalarField;
use crate::{par, Disk, Error, Point, Result};

use super::poly::{monomials, Polynomial};

/// Fits above this monomial amplification are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative size below which Chebyshev coefficients count as rounding noise.
const CHOP: f64 = 1e-14;

/// Oversampling factor of grid points against coefficient count.
const OVERSAMPLING: f64 = 4.0;

/// Fit result before the condition check.
#[derive(Debug, Clone)]
pub struct Fit {
    pub polynomial: Polynomial,
    /// `sum |c_alpha| prod max|x_i|^alpha_i / max |f|` over the box.
    pub condition: f64,
    pub nodes_per_axis: usize,
}

/// Fits `f` by a polynomial of total degree at most `d` and fails with
/// [`Error::IllConditioned`] when the monomial form amplifies rounding
/// beyond [`MAX_CONDITION`].
pub fn fit_polynomial(f: &ScalarField, disk: &Disk, d: usize) -> Result<Polynomial> {
    let fit = chebyshev_fit(f, disk, d)?;
    if fit.condition > MAX_CONDITION {
        return Err(Error::IllConditioned { degree: d, condition: fit.condition });
    }
    Ok(fit.polynomial)
}

/// The fit and its condition estimate, without the threshold check.
pub fn chebyshev_fit(f: &ScalarField, disk: &Disk, d: usize) -> Result<Fit> {
    let n = disk.n;
    if f.n() != n {
        return Err(Error::InvalidArgument(format!(
            "field dimension {} does not match disk dimension {n}",
            f.n()
        )));
    }
    let count = super::poly::monomial_count(n, d) as f64;
    let m = (d + 1).max((OVERSAMPLING * count).powf(1.0 / n as f64).ceil() as usize);
    let nodes: Vec<f64> = (0..m)
        .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / m as f64).cos())
        .collect();
    let (c, r) = (disk.center, disk.radius);

    // samples[k0 + m*k1 + m^2*k2]
    let total = m.pow(n as u32);
    let samples = par::try_map_range(total, |idx| {
        let mut x: Point = [0.0; 3];
        let mut rest = idx;
        for (i, xi) in x.iter_mut().enumerate().take(n) {
            *xi = c[i] + r * nodes[rest % m];
            rest /= m;
        }
        f.value(&x)
    })?;
    let fmax = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    // T[a][k] = T_a(u_k) scaled by the discrete orthogonality weight.
    let mut t = vec![vec![0.0; m]; d + 1];
    for (k, &u) in nodes.iter().enumerate() {
        let (mut t0, mut t1) = (1.0, u);
        for a in 0..=d {
            let w = if a == 0 { 1.0 / m as f64 } else { 2.0 / m as f64 };
            t[a][k] = w * t0;
            let t2 = 2.0 * u * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
    }

    // Contract each axis of the sample tensor with T.
    let mut dims = vec![m; n];
    let mut data = samples;
    for axis in 0..n {
        data = contract(&data, &dims, axis, &t);
        dims[axis] = d + 1;
    }
    // Chebyshev coefficients with extent d+1 per axis; keep total degree <= d.
    // The per-axis conversion below is triangular, so truncated monomials of
    // total degree > d stay zero.
    let stride = |i: usize| (d + 1).pow(i as u32);
    for (idx, v) in data.iter_mut().enumerate() {
        let deg: usize = (0..n).map(|i| (idx / stride(i)) % (d + 1)).sum();
        // Coefficients at rounding level are dropped so exact polynomial
        // inputs keep their degree.
        if deg > d || v.abs() <= CHOP * fmax {
            *v = 0.0;
        }
    }
    let conv = chebyshev_to_monomial(d, c, r, n);
    for axis in 0..n {
        data = contract(&data, &dims, axis, &conv[axis]);
    }
    let exps = monomials(n, d);
    let mut coeffs = Vec::with_capacity(exps.len());
    for a in &exps {
        let mut idx = 0;
        for i in 0..n {
            idx += a[i] as usize * stride(i);
        }
        coeffs.push(data[idx]);
    }
    let polynomial = Polynomial::from_dense(n, coeffs)?;

    let xmax: Vec<f64> = (0..n).map(|i| c[i].abs() + r).collect();
    let amplification: f64 = polynomial
        .terms()
        .map(|(a, v)| {
            let mut s = v.abs();
            for i in 0..n {
                s *= xmax[i].powi(a[i] as i32);
            }
            s
        })
        .sum();
    let condition = if fmax > 0.0 { amplification / fmax } else { 1.0 };
    Ok(Fit { polynomial, condition, nodes_per_axis: m })
}

/// Applies `mat` (rows = new extent) along `axis` of a tensor stored with
/// axis 0 fastest.
fn contract(data: &[f64], dims: &[usize], axis: usize, mat: &[Vec<f64>]) -> Vec<f64> {
    let inner: usize = dims[..axis].iter().product();
    let len = dims[axis];
    let outer: usize = dims[axis + 1..].iter().product();
    let rows = mat.len();
    let mut out = vec![0.0; inner * rows * outer];
    for o in 0..outer {
        for (a, row) in mat.iter().enumerate() {
            for i in 0..inner {
                let mut s = 0.0;
                for (k, w) in row.iter().enumerate().take(len) {
                    s += w * data[i + inner * (k + len * o)];
                }
                out[i + inner * (a + rows * o)] = s;
            }
        }
    }
    out
}

/// Per-axis matrices `M[k][a]`: coefficient of `x^k` in `T_a((x - c)/r)`.
fn chebyshev_to_monomial(d: usize, c: Point, r: f64, n: usize) -> Vec<Vec<Vec<f64>>> {
    // cheb[a][j]: coefficient of u^j in T_a(u)
    let mut cheb = vec![vec![0.0; d + 1]; d + 1];
    cheb[0][0] = 1.0;
    if d >= 1 {
        cheb[1][1] = 1.0;
    }
    for a in 2..=d {
        for j in 0..=d {
            let up = if j > 0 { 2.0 * cheb[a - 1][j - 1] } else { 0.0 };
            cheb[a][j] = up - cheb[a - 2][j];
        }
    }
    (0..n)
        .map(|i| {
            // shift[j][k]: coefficient of x^k in ((x - c)/r)^j
            let mut shift = vec![vec![0.0; d + 1]; d + 1];
            shift[0][0] = 1.0;
            for j in 1..=d {
                for k in 0..=j {
                    let from_x = if k > 0 { shift[j - 1][k - 1] } else { 0.0 };
                    shift[j][k] = (from_x - c[i] * shift[j - 1][k]) / r;
                }
            }
            let mut m = vec![vec![0.0; d + 1]; d + 1];
            for (k, row) in m.iter_mut().enumerate() {
                for (a, slot) in row.iter_mut().enumerate() {
                    *slot = (k..=a).map(|j| cheb[a][j] * shift[j][k]).sum();
                }
            }
            m
        })
        .collect()
}
