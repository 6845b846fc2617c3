use std::fmt;
use std::sync::Arc;

use super::expr::{parse_expr, Expr};
use super::jet::{Jet, MAX_ORDER};
use crate::approx::Polynomial;
use crate::families::Replicated;
use crate::reach::DefiningFunction;
use crate::{Error, Point, Result};

/// Gaussian bump `height * exp(-|x - center|^2 / width^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBump {
    pub center: Point,
    pub width: f64,
    pub height: f64,
}

impl GaussianBump {
    fn jet(&self, n: usize, x: &Point) -> Jet {
        let mut r2 = Jet::constant(n, 0.0);
        for i in 0..n {
            let d = Jet::variable(n, i, x[i]) + Jet::constant(n, -self.center[i]);
            r2 = r2 + d * d;
        }
        r2.scale(-1.0 / (self.width * self.width))
            .exp()
            .scale(self.height)
    }

    fn value(&self, n: usize, x: &Point) -> f64 {
        let r2: f64 = (0..n).map(|i| (x[i] - self.center[i]).powi(2)).sum();
        self.height * (-r2 / (self.width * self.width)).exp()
    }
}

#[derive(Clone)]
pub enum FieldKind {
    Constant(f64),
    Expression(Arc<Expr>),
    Polynomial(Arc<Polynomial>),
    Gaussian(GaussianBump),
    /// `g_rho(d*_Z)` for a primitive hypersurface, optionally rescaled.
    Composite(Arc<DefiningFunction>),
    Scaled(f64, Arc<ScalarField>),
    Sum(Arc<[ScalarField]>),
    /// `x -> inner(scale * (x - center))`.
    Affine {
        inner: Arc<ScalarField>,
        center: Point,
        scale: f64,
    },
    Replicated(Arc<Replicated>),
}

/// A smooth map `R^n -> R` with exact jets up to order three.
///
/// Fields are immutable and cheap to clone; evaluation is pure, so a field
/// can be shared across worker threads.
#[derive(Clone)]
pub struct ScalarField {
    n: usize,
    kind: FieldKind,
}

impl ScalarField {
    pub fn new(n: usize, kind: FieldKind) -> Self {
        Self { n, kind }
    }

    /// Parses an expression over `x1..xn`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let e = parse_expr(text, n)?;
        Ok(Self::new(n, FieldKind::Expression(Arc::new(e))))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::new(n, FieldKind::Constant(c))
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::new(p.n(), FieldKind::Polynomial(Arc::new(p)))
    }

    pub fn gaussian(n: usize, bump: GaussianBump) -> Self {
        Self::new(n, FieldKind::Gaussian(bump))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.n, FieldKind::Scaled(factor, Arc::new(self.clone())))
    }

    pub fn plus(&self, other: &ScalarField) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in field sum");
        Self::new(self.n, FieldKind::Sum(Arc::from(vec![self.clone(), other.clone()])))
    }

    pub fn minus(&self, other: &ScalarField) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn sum(n: usize, terms: Vec<ScalarField>) -> Self {
        Self::new(n, FieldKind::Sum(Arc::from(terms)))
    }

    /// `x -> self(scale * (x - center))`.
    pub fn affine(&self, center: Point, scale: f64) -> Self {
        Self::new(
            self.n,
            FieldKind::Affine {
                inner: Arc::new(self.clone()),
                center,
                scale,
            },
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    /// Highest order for which jets exist everywhere.
    pub fn max_order(&self) -> usize {
        match &self.kind {
            FieldKind::Composite(_) => 2,
            FieldKind::Scaled(_, f) => f.max_order(),
            FieldKind::Affine { inner, .. } => inner.max_order(),
            FieldKind::Sum(terms) => terms.iter().map(|t| t.max_order()).min().unwrap_or(MAX_ORDER),
            FieldKind::Replicated(r) => r.base().max_order(),
            _ => MAX_ORDER,
        }
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        Ok(match &self.kind {
            FieldKind::Constant(c) => *c,
            FieldKind::Expression(e) => e.value(x),
            FieldKind::Polynomial(p) => p.value(x),
            FieldKind::Gaussian(g) => g.value(self.n, x),
            FieldKind::Composite(d) => d.value(x)?,
            FieldKind::Scaled(c, f) => c * f.value(x)?,
            FieldKind::Sum(terms) => {
                let mut s = 0.0;
                for t in terms.iter() {
                    s += t.value(x)?;
                }
                s
            }
            FieldKind::Affine { inner, center, scale } => inner.value(&affine_point(x, center, *scale))?,
            FieldKind::Replicated(r) => r.value(x)?,
        })
    }

    /// Jet of order `order` at `x`; entries above `order` are zero.
    pub fn jet(&self, x: &Point, order: usize) -> Result<Jet> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh { order, max: MAX_ORDER });
        }
        if order > self.max_order() {
            return Err(Error::OrderTooHigh { order, max: self.max_order() });
        }
        Ok(self.raw_jet(x, order)?.truncate(order))
    }

    fn raw_jet(&self, x: &Point, order: usize) -> Result<Jet> {
        let n = self.n;
        Ok(match &self.kind {
            FieldKind::Constant(c) => Jet::constant(n, *c),
            FieldKind::Expression(e) => e.jet(n, x),
            FieldKind::Polynomial(p) => p.jet(x, order),
            FieldKind::Gaussian(g) => g.jet(n, x),
            FieldKind::Composite(d) => d.jet(x, order)?,
            FieldKind::Scaled(c, f) => f.raw_jet(x, order)?.scale(*c),
            FieldKind::Sum(terms) => {
                let mut s = Jet::constant(n, 0.0);
                for t in terms.iter() {
                    s = s + t.raw_jet(x, order)?;
                }
                s
            }
            FieldKind::Affine { inner, center, scale } => inner
                .raw_jet(&affine_point(x, center, *scale), order)?
                .chain_scale(*scale),
            FieldKind::Replicated(r) => r.jet(x, order)?,
        })
    }
}

fn affine_point(x: &Point, center: &Point, scale: f64) -> Point {
    [
        scale * (x[0] - center[0]),
        scale * (x[1] - center[1]),
        scale * (x[2] - center[2]),
    ]
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FieldKind::Constant(c) => write!(f, "Constant({c})"),
            FieldKind::Expression(e) => write!(f, "Expression({e})"),
            FieldKind::Polynomial(p) => write!(f, "Polynomial(degree {})", p.degree()),
            FieldKind::Gaussian(g) => write!(f, "{g:?}"),
            FieldKind::Composite(d) => write!(f, "Composite({:?})", d.surface()),
            FieldKind::Scaled(c, inner) => write!(f, "{c} * {inner:?}"),
            FieldKind::Sum(t) => f.debug_list().entries(t.iter()).finish(),
            FieldKind::Affine { inner, center, scale } => {
                write!(f, "Affine({inner:?}, center {center:?}, scale {scale})")
            }
            FieldKind::Replicated(r) => write!(f, "Replicated({} copies)", r.packing().count()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::approx_constant)]
    fn parse_examples() {
        let f = ScalarField::parse("x1^2 + x2^2 - 0.25", 2).unwrap();
        assert_eq!(f.value(&[1.0, 0.0, 0.0]).unwrap(), 0.75);
        let g = ScalarField::parse("sin(3.14159*x1)", 1).unwrap();
        let j = g.jet(&[0.0; 3], 1).unwrap();
        assert!((j.gradient[0] - 3.14159).abs() < 1e-15);
    }

    #[test]
    fn circle_jet_at_origin() {
        let f = ScalarField::parse("x1^2+x2^2-0.25", 2).unwrap();
        let j = f.jet(&[0.0; 3], 2).unwrap();
        assert_eq!(j.value, -0.25);
        assert_eq!(j.gradient[..2], [0.0, 0.0]);
        assert_eq!(j.hessian[0][0], 2.0);
        assert_eq!(j.hessian[1][1], 2.0);
        assert_eq!(j.hessian[0][1], 0.0);
    }

    #[test]
    fn constant_jet() {
        let f = ScalarField::constant(2, 1.5);
        let j = f.jet(&[0.3, 0.1, 0.0], 2).unwrap();
        assert_eq!(j.value, 1.5);
        assert_eq!(j.gradient, [0.0; 3]);
        assert_eq!(j.hessian, [[0.0; 3]; 3]);
    }

    #[test]
    fn order_above_three_rejected() {
        let f = ScalarField::constant(1, 0.0);
        assert!(matches!(f.jet(&[0.0; 3], 4), Err(Error::OrderTooHigh { .. })));
    }

    #[test]
    fn truncation_zeroes_higher_orders() {
        let f = ScalarField::parse("x1^3", 1).unwrap();
        let j = f.jet(&[1.0, 0.0, 0.0], 1).unwrap();
        assert_eq!(j.hessian[0][0], 0.0);
        assert_eq!(j.gradient[0], 3.0);
    }

    #[test]
    fn affine_and_sum_wrappers() {
        let f = ScalarField::parse("x1^2", 1).unwrap();
        let g = f.affine([1.0, 0.0, 0.0], 2.0); // (2(x-1))^2
        let j = g.jet(&[1.5, 0.0, 0.0], 2).unwrap();
        assert_eq!(j.value, 1.0);
        assert_eq!(j.gradient[0], 4.0);
        assert_eq!(j.hessian[0][0], 8.0);
        let s = f.plus(&ScalarField::constant(1, 1.0)).scaled(2.0);
        assert_eq!(s.value(&[3.0, 0.0, 0.0]).unwrap(), 20.0);
    }

    #[test]
    fn gaussian_peak() {
        let g = ScalarField::gaussian(
            2,
            GaussianBump { center: [0.5, 0.0, 0.0], width: 0.2, height: 3.0 },
        );
        let j = g.jet(&[0.5, 0.0, 0.0], 2).unwrap();
        assert_eq!(j.value, 3.0);
        assert!(j.gradient_norm() < 1e-15);
        assert!((j.hessian[0][0] + 3.0 * 2.0 / 0.04).abs() < 1e-12);
    }
}
