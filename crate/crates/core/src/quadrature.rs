//! Adaptive Gauss-Legendre quadrature at working precision.
//!
//! Panels are bisected until the whole-panel estimate agrees with the sum of
//! the half-panel estimates. Legendre nodes and weights are generated at the
//! working precision by Newton iteration on the recurrence, so the rule
//! sharpens automatically with the configured digit count.

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::precision::{bits, eps, pi, real};
use crate::Real;

const PANEL_ORDER: usize = 24;

fn legendre_nodes(n: usize) -> (Vec<Real>, Vec<Real>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let tol = {
        let mut t = eps();
        t *= real(64.0);
        t
    };
    for i in 0..n {
        // Chebyshev-style initial guess, then Newton on P_n
        let guess = ((i as f64 + 0.75) / (n as f64 + 0.5) * std::f64::consts::PI).cos();
        let mut x = real(guess);
        loop {
            // evaluate P_n(x) and P_{n-1}(x) by recurrence
            let mut p0 = real(1.0);
            let mut p1 = x.clone();
            for k in 1..n {
                let mut p2 = x.clone();
                p2 *= &p1;
                p2 *= real((2 * k + 1) as f64);
                p2 -= real(k as f64) * &p0;
                p2 /= real((k + 1) as f64);
                p0 = p1;
                p1 = p2;
            }
            // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1)
            let mut num = x.clone();
            num *= &p1;
            num -= &p0;
            num *= real(n as f64);
            let mut den = x.clone().square();
            den -= real(1.0);
            let dp = num / den;
            let step = p1 / dp;
            x -= &step;
            if step.abs() < tol {
                break;
            }
        }
        // w = 2 / ((1 - x^2) P'_n(x)^2)
        let mut p0 = real(1.0);
        let mut p1 = x.clone();
        for k in 1..n {
            let mut p2 = x.clone();
            p2 *= &p1;
            p2 *= real((2 * k + 1) as f64);
            p2 -= real(k as f64) * &p0;
            p2 /= real((k + 1) as f64);
            p0 = p1;
            p1 = p2;
        }
        let mut num = x.clone();
        num *= &p1;
        num -= &p0;
        num *= real(n as f64);
        let mut one_minus = real(1.0);
        one_minus -= x.clone().square();
        let dp = num / (-one_minus.clone());
        let mut w = one_minus;
        w *= dp.clone().square();
        let w = real(2.0) / w;
        nodes.push(x);
        weights.push(w);
    }
    (nodes, weights)
}

static RULE: Lazy<(Vec<Real>, Vec<Real>)> = Lazy::new(|| {
    let _ = bits(); // pin the precision before generating nodes
    legendre_nodes(PANEL_ORDER)
});

/// One Gauss panel: returns the integral estimate and the integral of |f|,
/// which sets the attainable roundoff floor.
fn panel(f: &dyn Fn(&Real) -> Real, a: &Real, b: &Real) -> (Real, Real) {
    let (nodes, weights) = &*RULE;
    let mut half = b.clone();
    half -= a;
    half /= real(2.0);
    let mut mid = b.clone();
    mid += a;
    mid /= real(2.0);
    let mut acc = real(0.0);
    let mut acc_abs = real(0.0);
    for (x, w) in nodes.iter().zip(weights.iter()) {
        let mut t = half.clone();
        t *= x;
        t += &mid;
        let fx = f(&t);
        acc_abs += w * &fx.clone().abs();
        acc += w * &fx;
    }
    (acc * &half, acc_abs * half)
}

/// Integrate `f` over `[a, b]`, returning the value and an error estimate.
pub fn integrate(
    f: &dyn Fn(&Real) -> Real,
    a: &Real,
    b: &Real,
    abs_tol: &Real,
    max_depth: usize,
) -> Result<(Real, Real)> {
    struct Item {
        a: Real,
        b: Real,
        whole: Real,
        tol: Real,
        depth: usize,
    }
    let (whole, _) = panel(f, a, b);
    let roundoff = {
        let mut r = eps();
        r *= real(64.0);
        r
    };
    let mut stack = vec![Item {
        a: a.clone(),
        b: b.clone(),
        whole,
        tol: abs_tol.clone(),
        depth: 0,
    }];
    let mut total = real(0.0);
    let mut err_acc = real(0.0);
    while let Some(it) = stack.pop() {
        let mut mid = it.a.clone();
        mid += &it.b;
        mid /= real(2.0);
        let (left, labs) = panel(f, &it.a, &mid);
        let (right, rabs) = panel(f, &mid, &it.b);
        let mut diff = left.clone();
        diff += &right;
        diff -= &it.whole;
        let diff = diff.abs();
        // a panel cannot resolve below the roundoff of its absolute mass
        let mut floor = labs;
        floor += &rabs;
        floor *= &roundoff;
        let target = if floor > it.tol { floor } else { it.tol.clone() };
        if diff <= target || it.depth >= max_depth {
            if it.depth >= max_depth && diff > target {
                return Err(Error::QuadratureNotConverged(diff.to_f64()));
            }
            total += &left;
            total += &right;
            err_acc += &diff;
        } else {
            let mut half_tol = it.tol.clone();
            half_tol /= real(2.0);
            stack.push(Item {
                a: it.a,
                b: mid.clone(),
                whole: left,
                tol: half_tol.clone(),
                depth: it.depth + 1,
            });
            stack.push(Item {
                a: mid,
                b: it.b,
                whole: right,
                tol: half_tol,
                depth: it.depth + 1,
            });
        }
    }
    Ok((total, err_acc))
}

/// Integrate `f` over `[0, inf)` with the rational substitution
/// `r = scale * t / (1 - t)`; suited to integrands with Gaussian or
/// power-law decay once `scale` matches their natural width.
pub fn integrate_half_line(
    f: &dyn Fn(&Real) -> Real,
    scale: &Real,
    abs_tol: &Real,
    max_depth: usize,
) -> Result<(Real, Real)> {
    let g = |t: &Real| -> Real {
        let mut one_minus = real(1.0);
        one_minus -= t;
        let mut r = scale.clone();
        r *= t;
        r /= &one_minus;
        let mut jac = scale.clone();
        jac /= one_minus.clone().square();
        let fx = f(&r);
        fx * jac
    };
    integrate(&g, &real(0.0), &real(1.0), abs_tol, max_depth)
}

/// Integrate `f(theta)` over `(0, pi/2)`; used with tangent substitutions.
pub fn integrate_quarter_period(
    f: &dyn Fn(&Real) -> Real,
    abs_tol: &Real,
    max_depth: usize,
) -> Result<(Real, Real)> {
    let mut b = pi();
    b /= real(2.0);
    integrate(f, &real(0.0), &b, abs_tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::real_str;

    #[test]
    fn gaussian_moment_closed_form() {
        // int_0^inf 4 pi r^2 e^{-2 r^2} dr = pi^{3/2} / 2^{3/2} * ... = (pi/2)^{3/2}
        let f = |r: &Real| -> Real {
            let mut e = r.clone().square();
            e *= real(-2.0);
            let mut v = e.exp();
            v *= r.clone().square();
            v *= real(4.0);
            v *= pi();
            v
        };
        let (val, _) = integrate_half_line(&f, &real(1.0), &real_str("1e-30").unwrap(), 50).unwrap();
        let mut expect = pi();
        expect /= real(2.0);
        let expect = expect.sqrt() * pi() / real(2.0);
        assert!((val - expect).abs() < real_str("1e-28").unwrap());
    }

    #[test]
    fn polynomial_is_exact() {
        let f = |x: &Real| -> Real { x.clone().square() };
        let (val, _) = integrate(&f, &real(0.0), &real(3.0), &real_str("1e-30").unwrap(), 40).unwrap();
        assert!((val - real(9.0)).abs() < real_str("1e-30").unwrap());
    }

    #[test]
    fn reports_non_convergence() {
        // integrable singularity, absurd tolerance, depth too small
        let f = |x: &Real| -> Real { x.clone().sqrt().recip() };
        let r = integrate(&f, &real(1e-30), &real(1.0), &real_str("1e-60").unwrap(), 3);
        match r {
            Err(Error::QuadratureNotConverged(_)) => {}
            other => panic!("expected QuadratureNotConverged, got {other:?}"),
        }
    }
}
