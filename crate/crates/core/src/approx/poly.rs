use std::fmt;

use crate::jets::{Jet, MAX_ORDER};
use crate::{Error, Point, Result};

/// Exponent vector; unused slots stay zero.
pub type MultiIndex = [u32; 3];

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Number of monomials of total degree at most `d` in `n` variables.
pub fn monomial_count(n: usize, d: usize) -> usize {
    binomial(d + n, n)
}

/// All multi-indices with `|alpha| <= d`, in graded-lex order: ascending total
/// degree, then descending powers of x1, x2, x3.
pub fn monomials(n: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(monomial_count(n, d));
    for t in 0..=d as u32 {
        match n {
            1 => out.push([t, 0, 0]),
            2 => {
                for a in (0..=t).rev() {
                    out.push([a, t - a, 0]);
                }
            }
            _ => {
                for a in (0..=t).rev() {
                    for b in (0..=t - a).rev() {
                        out.push([a, b, t - a - b]);
                    }
                }
            }
        }
    }
    out
}

/// Position of `alpha` in [`monomials`].
pub fn monomial_index(n: usize, alpha: &MultiIndex) -> usize {
    let t = (alpha[0] + alpha[1] + alpha[2]) as usize;
    let below = if t == 0 { 0 } else { binomial(t - 1 + n, n) };
    let a = alpha[0] as usize;
    let pos = match n {
        1 => 0,
        2 => t - a,
        _ => {
            let rest = t - a;
            rest * (rest + 1) / 2 + (rest - alpha[1] as usize)
        }
    };
    below + pos
}

/// Dense real polynomial in `n <= 3` variables stored in graded-lex order.
///
/// The stored degree is the largest `|alpha|` with a nonzero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    n: usize,
    degree: usize,
    coeffs: Vec<f64>,
    exps: Vec<MultiIndex>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { n, degree: 0, coeffs: vec![c], exps: vec![[0; 3]] }
    }

    /// Builds from a dense graded-lex coefficient vector of length
    /// `monomial_count(n, d)` for some `d`.
    pub fn from_dense(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidArgument(format!("dimension must be 1..=3, got {n}")));
        }
        let mut d = 0;
        while monomial_count(n, d) < coeffs.len() {
            d += 1;
        }
        if monomial_count(n, d) != coeffs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients do not fill a total-degree layout in {n} variables",
                coeffs.len()
            )));
        }
        let mut p = Self { n, degree: d, coeffs, exps: Vec::new() };
        p.trim();
        Ok(p)
    }

    /// Builds from `(alpha, coefficient)` pairs; repeated indices add up.
    pub fn from_terms(n: usize, terms: &[(MultiIndex, f64)]) -> Self {
        let d = terms
            .iter()
            .map(|(a, _)| (a[0] + a[1] + a[2]) as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![0.0; monomial_count(n, d)];
        for (a, c) in terms {
            debug_assert!(a[n..].iter().all(|&e| e == 0));
            coeffs[monomial_index(n, a)] += c;
        }
        let mut p = Self { n, degree: d, coeffs, exps: Vec::new() };
        p.trim();
        p
    }

    fn trim(&mut self) {
        let mons = monomials(self.n, self.degree);
        let mut d = 0;
        for (a, c) in mons.iter().zip(&self.coeffs) {
            if *c != 0.0 {
                d = d.max((a[0] + a[1] + a[2]) as usize);
            }
        }
        self.degree = d;
        let len = monomial_count(self.n, d);
        self.coeffs.truncate(len);
        self.exps = mons;
        self.exps.truncate(len);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        let t = (alpha[0] + alpha[1] + alpha[2]) as usize;
        if t > self.degree {
            0.0
        } else {
            self.coeffs[monomial_index(self.n, alpha)]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        self.exps.iter().copied().zip(self.coeffs.iter().copied())
    }

    /// Max modulus of the coefficients.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.coeffs.iter_mut().for_each(|c| *c *= s);
        p.trim();
        p
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        assert_eq!(self.n, other.n);
        let d = self.degree.max(other.degree);
        let mut coeffs = vec![0.0; monomial_count(self.n, d)];
        coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        for (c, o) in coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        let mut p = Self { n: self.n, degree: d, coeffs, exps: Vec::new() };
        p.trim();
        p
    }

    pub fn sub(&self, other: &Polynomial) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let d = self.degree + other.degree;
        let mut coeffs = vec![0.0; monomial_count(n, d)];
        let rhs: Vec<(MultiIndex, f64)> = other.terms().filter(|(_, c)| *c != 0.0).collect();
        for (a, ca) in self.terms().filter(|(_, c)| *c != 0.0) {
            for (b, cb) in &rhs {
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                coeffs[monomial_index(n, &e)] += ca * cb;
            }
        }
        let mut p = Self { n, degree: d, coeffs, exps: Vec::new() };
        p.trim();
        p
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::constant(self.n, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `|x - center|^2`.
    pub fn squared_distance(n: usize, center: &Point) -> Self {
        let mut terms = Vec::new();
        for i in 0..n {
            let mut sq = [0; 3];
            sq[i] = 2;
            let mut lin = [0; 3];
            lin[i] = 1;
            terms.push((sq, 1.0));
            terms.push((lin, -2.0 * center[i]));
            terms.push(([0; 3], center[i] * center[i]));
        }
        Self::from_terms(n, &terms)
    }

    pub fn value(&self, x: &Point) -> f64 {
        let mut pows = vec![[1.0f64; 3]; self.degree + 1];
        for k in 1..=self.degree {
            for i in 0..3 {
                pows[k][i] = pows[k - 1][i] * x[i];
            }
        }
        self.terms()
            .map(|(a, c)| c * pows[a[0] as usize][0] * pows[a[1] as usize][1] * pows[a[2] as usize][2])
            .sum()
    }

    /// Exact jet by multi-index differentiation of every monomial.
    pub fn jet(&self, x: &Point, order: usize) -> Jet {
        let n = self.n;
        let order = order.min(MAX_ORDER);
        // deriv[i][k][m] = d^m/dx_i^m of x_i^k
        let d = self.degree;
        let mut deriv = vec![[[0.0f64; 4]; 3]; d + 1];
        for (k, row) in deriv.iter_mut().enumerate() {
            for (i, slot) in row.iter_mut().enumerate().take(n) {
                let mut coef = 1.0;
                for m in 0..=order.min(k) {
                    slot[m] = coef * x[i].powi((k - m) as i32);
                    coef *= (k - m) as f64;
                }
            }
            for slot in row.iter_mut().skip(n) {
                slot[0] = 1.0;
            }
        }
        let mut j = Jet::constant(n, 0.0);
        for (a, c) in self.terms() {
            if c == 0.0 {
                continue;
            }
            let f = |i: usize, m: usize| deriv[a[i] as usize][i][m];
            let base = [f(0, 0), f(1, 0), f(2, 0)];
            j.value += c * base[0] * base[1] * base[2];
            if order == 0 {
                continue;
            }
            // partial derivative for exponent counts beta
            let part = |beta: [usize; 3]| -> f64 {
                let mut p = c;
                for i in 0..3 {
                    p *= f(i, beta[i]);
                }
                p
            };
            for i in 0..n {
                let mut b = [0; 3];
                b[i] += 1;
                j.gradient[i] += part(b);
                if order >= 2 {
                    for k in i..n {
                        let mut b2 = b;
                        b2[k] += 1;
                        let v = part(b2);
                        j.hessian[i][k] += v;
                        if order >= 3 {
                            for l in k..n {
                                let mut b3 = b2;
                                b3[l] += 1;
                                j.third[i][k][l] += part(b3);
                            }
                        }
                    }
                }
            }
        }
        // symmetrize
        for i in 0..n {
            for k in i..n {
                j.hessian[k][i] = j.hessian[i][k];
                for l in k..n {
                    let v = j.third[i][k][l];
                    for (a, b, c) in [(i, k, l), (i, l, k), (k, i, l), (k, l, i), (l, i, k), (l, k, i)] {
                        j.third[a][b][c] = v;
                    }
                }
            }
        }
        j.truncate(order)
    }
}

fn format_coeff(c: f64) -> String {
    format!("{c:?}")
}

/// Text form `c * x1^a1*x2^a2 + ...` in graded-lex order; parses back with
/// [`crate::jets::parse_field`].
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, c) in self.terms() {
            if c == 0.0 {
                continue;
            }
            let mut mono = Vec::new();
            for (i, &e) in a.iter().enumerate().take(self.n) {
                if e > 0 {
                    mono.push(format!("x{}^{}", i + 1, e));
                }
            }
            let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write!(f, "{}", format_coeff(mag))?;
            if !mono.is_empty() {
                write!(f, " * {}", mono.join("*"))?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::parse_field;

    fn circle() -> Polynomial {
        Polynomial::from_terms(2, &[([2, 0, 0], 1.0), ([0, 2, 0], 1.0), ([0, 0, 0], -0.25)])
    }

    #[test]
    fn layout_and_index_agree() {
        for n in 1..=3 {
            for (i, a) in monomials(n, 7).iter().enumerate() {
                assert_eq!(monomial_index(n, a), i);
            }
            assert_eq!(monomials(n, 7).len(), monomial_count(n, 7));
        }
        assert_eq!(monomials(2, 1), vec![[0, 0, 0], [1, 0, 0], [0, 1, 0]]);
    }

    #[test]
    fn circle_jet() {
        let j = circle().jet(&[0.5, 0.0, 0.0], 1);
        assert_eq!(j.value, 0.0);
        assert_eq!(j.gradient[..2], [1.0, 0.0]);
    }

    #[test]
    fn zero_polynomial_jet() {
        let j = Polynomial::zero(3).jet(&[0.3, -1.0, 2.0], 3);
        assert_eq!(j, Jet::constant(3, 0.0).truncate(3));
    }

    #[test]
    fn degree_is_trimmed() {
        let p = Polynomial::from_terms(2, &[([3, 0, 0], 0.0), ([1, 1, 0], 2.0)]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coeffs().len(), 6);
        assert_eq!(circle().sub(&circle()).degree(), 0);
    }

    #[test]
    fn text_form_roundtrips() {
        let p = Polynomial::from_terms(
            3,
            &[([0, 0, 0], -0.25), ([1, 0, 2], 3.5), ([0, 2, 0], -1e-7), ([4, 0, 0], 2.0)],
        );
        let text = p.to_string();
        assert!(text.starts_with("-0.25"));
        let f = parse_field(&text, 3).unwrap();
        let x = [0.3, -0.4, 0.9];
        assert!((f.value(&x).unwrap() - p.value(&x)).abs() < 1e-15);
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn products_and_powers() {
        let r2 = Polynomial::squared_distance(2, &[1.0, 0.0, 0.0]);
        let q = r2.powi(3);
        assert_eq!(q.degree(), 6);
        let x = [0.3, 0.7, 0.0];
        let direct = ((x[0] - 1.0f64).powi(2) + x[1] * x[1]).powi(3);
        assert!((q.value(&x) - direct).abs() < 1e-14);
    }
}
