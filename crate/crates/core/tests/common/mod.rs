//! Shared test corpus: fields with transverse zero sets inside their disks.

#![allow(dead_code)]

use zeroset::reach::{defining_function, Hypersurface};
use zeroset::{Disk, ScalarField};

pub struct Specimen {
    pub name: &'static str,
    pub field: ScalarField,
    pub disk: Disk,
    /// Total degree when the field is a polynomial.
    pub degree: Option<usize>,
}

fn expr(name: &'static str, n: usize, radius: f64, degree: Option<usize>) -> Specimen {
    Specimen {
        name,
        field: ScalarField::parse(name, n).expect("corpus expression parses"),
        disk: Disk::centered(n, radius).unwrap(),
        degree,
    }
}

fn composite(name: &'static str, radius: f64) -> Specimen {
    let surface: Hypersurface = name.parse().expect("corpus surface parses");
    Specimen {
        name,
        field: defining_function(surface),
        disk: Disk::centered(surface.n(), radius).unwrap(),
        degree: None,
    }
}

/// Ten fields: polynomials, trigonometric and exponential expressions, and
/// reach-based defining functions of circles.
pub fn corpus() -> Vec<Specimen> {
    vec![
        expr("x1^2+x2^2-0.25", 2, 1.0, Some(2)),
        expr("x1^2+4*x2^2-0.3", 2, 1.0, Some(2)),
        expr("(x1^2+x2^2-0.5)*(x1^2+x2^2-0.1)", 2, 1.0, Some(4)),
        expr("x1^3-0.5*x1", 1, 1.0, Some(3)),
        expr("x1^2+x2^2-0.36+0.08*sin(4*x1)*cos(3*x2)", 2, 1.0, None),
        expr("cos(2*x1)+cos(2*x2)-1.6", 2, 1.0, None),
        expr("exp(x1^2+x2^2)-1.3", 2, 1.0, None),
        expr("cos(3*x1)", 1, 1.0, None),
        composite("circle:0,0,0.5", 1.0),
        composite("circle:0.1,0,0.7", 1.0),
    ]
}

/// Polynomial specimens for component-count bounds.
pub fn polynomial_specimens() -> Vec<Specimen> {
    let mut v: Vec<Specimen> = corpus().into_iter().filter(|s| s.degree.is_some()).collect();
    v.push(expr("(x1-0.3)^2+x2^2-0.04", 2, 1.0, Some(2)));
    v.push(expr("(x1^2+x2^2-0.16)*((x1-0.6)^2+x2^2-0.01)", 2, 1.0, Some(4)));
    v.push(expr("x1^2+x2^2+x3^2-0.25", 3, 1.0, Some(2)));
    v
}
