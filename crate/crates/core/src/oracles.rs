//! Independent brute-force verifiers used by the test suite: radial
//! quadrature of the closed-form matrix elements and finite-difference
//! derivative checks. The quadrature engine is shared with the production
//! code, but each oracle integrand is written from the defining integral,
//! not from the formula it verifies.

use crate::error::Result;
use crate::precision::real;
use crate::quadrature::{integrate, integrate_half_line};
use crate::Real;

/// Integration domain for [`quad_radial`].
pub enum Domain {
    Finite { a: Real, b: Real },
    /// `[0, inf)` with the rational substitution scaled by `scale`
    HalfLine { scale: Real },
}

/// A quadrature request: integrand, domain, absolute tolerance, and a
/// bisection depth cap.
pub struct QuadratureSpec<'a> {
    pub integrand: &'a dyn Fn(&Real) -> Real,
    pub domain: Domain,
    pub abs_tol: Real,
    pub max_depth: usize,
}

/// Evaluate the requested integral; returns the value and the accumulated
/// error estimate (at most the tolerance on success).
pub fn quad_radial(spec: QuadratureSpec<'_>) -> Result<(Real, Real)> {
    match &spec.domain {
        Domain::Finite { a, b } => integrate(spec.integrand, a, b, &spec.abs_tol, spec.max_depth),
        Domain::HalfLine { scale } => {
            integrate_half_line(spec.integrand, scale, &spec.abs_tol, spec.max_depth)
        }
    }
}

/// Central finite-difference slope `(f(x0+h) - f(x0-h)) / (2h)`.
pub fn finite_difference_slope(f: &dyn Fn(&Real) -> Real, x0: &Real, h: &Real) -> Real {
    let fp = f(&(x0.clone() + h));
    let fm = f(&(x0.clone() - h));
    let mut d = fp;
    d -= fm;
    d / (real(2.0) * h.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{pi, real_str};

    #[test]
    fn gaussian_normalization_by_quadrature() {
        // int 4 pi r^2 |N e^{-z r^2}|^2 dr = 1 for N = (2z/pi)^{3/4}
        let z = real(1.35);
        let norm2 = {
            use rug::ops::Pow;
            let e = real(1.5);
            (real(2.0) * z.clone() / pi()).pow(&e)
        };
        let f = move |r: &Real| -> Real {
            let mut e = r.clone().square();
            e *= real(-2.0) * &z;
            let mut v = e.exp();
            v *= r.clone().square();
            v *= real(4.0) * pi();
            v * &norm2
        };
        let spec = QuadratureSpec {
            integrand: &f,
            domain: Domain::HalfLine { scale: real(1.0) },
            abs_tol: real_str("1e-30").unwrap(),
            max_depth: 50,
        };
        let (val, err) = quad_radial(spec).unwrap();
        assert!((val - real(1.0)).abs() < real_str("1e-28").unwrap());
        assert!(err < real_str("1e-28").unwrap());
    }

    #[test]
    fn slope_of_square_is_two_x() {
        let f = |x: &Real| -> Real { x.clone().square() };
        let s = finite_difference_slope(&f, &real(1.0), &real_str("1e-10").unwrap());
        assert!((s - real(2.0)).abs() < real_str("1e-18").unwrap());
        let c = |_: &Real| -> Real { real(7.0) };
        let s = finite_difference_slope(&c, &real(3.0), &real_str("1e-10").unwrap());
        assert!(s.is_zero());
    }
}
