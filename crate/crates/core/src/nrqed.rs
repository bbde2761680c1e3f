//! Analytic perturbative reference values about the Schroedinger solution:
//! the alpha^2 Dirac-Coulomb and Breit coefficients, the alpha^3 Coulomb
//! corrections (including the two-pair integral), the equal-mass Breit-photon
//! value, the one-pair large-mass limit, and hydrogenic expectation values.

use crate::error::{Error, Result};
use crate::precision::{pi, real};
use crate::quadrature::integrate_quarter_period;
use crate::system::TwoBodySystem;
use crate::Real;

fn mu3(sys: &TwoBodySystem) -> Real {
    use rug::ops::Pow;
    sys.mu().pow(3)
}

fn inv_pow_sum(sys: &TwoBodySystem, e: i32) -> Real {
    use rug::ops::Pow;
    sys.m1().clone().pow(-e) + sys.m2().clone().pow(-e)
}

fn inv_m1m2(sys: &TwoBodySystem) -> Real {
    (sys.m1().clone() * sys.m2()).recip()
}

/// Exact nonrelativistic ground-state energy, `-mu/2`.
pub fn e_nr(sys: &TwoBodySystem) -> Real {
    -sys.mu() / real(2.0)
}

/// alpha^2 coefficient of the Dirac-Coulomb correction:
/// mass-velocity `-(5/8) mu^4 (m1^-3 + m2^-3)` plus Darwin
/// `(mu^3/2)(m1^-2 + m2^-2)`.
pub fn e2_dc(sys: &TwoBodySystem) -> Real {
    use rug::ops::Pow;
    let mv = real(-0.625) * sys.mu().pow(4) * inv_pow_sum(sys, 3);
    let darwin = mu3(sys) / real(2.0) * inv_pow_sum(sys, 2);
    mv + darwin
}

/// alpha^2 coefficient of the Breit correction (orbit-orbit plus spin-spin
/// contact): `-3 mu^3 / (m1 m2)`.
pub fn e2_b(sys: &TwoBodySystem) -> Real {
    real(-3.0) * mu3(sys) * inv_m1m2(sys)
}

pub fn e2_dcb(sys: &TwoBodySystem) -> Real {
    e2_dc(sys) + e2_b(sys)
}

/// alpha^3 non-crossed-photon Coulomb correction (no-pair plus two-pair):
/// `-(2 mu^3 / 3 pi)(2/m1^2 + 1/(m1 m2) + 2/m2^2)`.
pub fn e3_c02(sys: &TwoBodySystem) -> Real {
    let mut bracket = real(2.0) * inv_pow_sum(sys, 2);
    bracket += inv_m1m2(sys);
    let mut v = real(-2.0) / real(3.0);
    v *= mu3(sys);
    v /= pi();
    v * bracket
}

/// alpha^3 two-pair Coulomb correction by quadrature:
/// `-(2 mu^3 / pi) int_0^inf dk (E1-m1)(E2-m2) / (k^2 E1 E2 (E1+E2+m1+m2))`
/// with `E_i = sqrt(m_i^2 + k^2)`, compactified by `k = m_min tan(theta)`.
pub fn e3_c2(sys: &TwoBodySystem) -> Result<Real> {
    let m1 = sys.m1().clone();
    let m2 = sys.m2().clone();
    let m_min = sys.m_min();
    let integrand = |theta: &Real| -> Real {
        let t = theta.clone().tan();
        let k = m_min.clone() * &t;
        let k2 = k.clone().square();
        let e1 = (m1.clone().square() + &k2).sqrt();
        let e2 = (m2.clone().square() + &k2).sqrt();
        let mut num = e1.clone() - &m1;
        num *= e2.clone() - &m2;
        let mut den = k2;
        den *= &e1;
        den *= &e2;
        den *= e1.clone() + &e2 + &m1 + &m2;
        // dk = m_min sec^2(theta) dtheta
        let mut jac = t.square();
        jac += real(1.0);
        jac *= &m_min;
        num / den * jac
    };
    let tol = {
        // absolute tolerance tied to the prefactor so small systems still
        // come out to ~1e-10 absolute in the final value
        let mut p = real(2.0) * mu3(sys) / pi();
        p = p.abs();
        let mut t = real(1e-12);
        t /= p.clone().max(&real(1.0));
        t.min(&real(1e-14))
    };
    let (val, _err) = integrate_quarter_period(&integrand, &tol, 60)?;
    let mut v = real(-2.0);
    v *= mu3(sys);
    v /= pi();
    Ok(v * val)
}


/// alpha^3 no-pair Coulomb correction, `e3_c02 - e3_c2`.
pub fn e3_c0(sys: &TwoBodySystem) -> Result<Real> {
    Ok(e3_c02(sys) - e3_c2(sys)?)
}

/// alpha^3 single-Breit-photon correction with the Coulomb ladder, known in
/// closed form for equal masses only: `(1/2pi)(1 + pi/2)`.
pub fn e3_b_equal_mass(sys: &TwoBodySystem) -> Result<Real> {
    if sys.m1() != sys.m2() {
        return Err(Error::EqualMassesRequired("e3_b"));
    }
    let mut v = real(1.0);
    v += pi() / real(2.0);
    v /= real(2.0);
    v /= pi();
    Ok(v)
}

/// One-pair Coulomb correction in the `m2 -> infinity` limit, `4 m1 / (3 pi)`.
pub fn e3_c1_infty(m1: &Real) -> Real {
    let mut v = real(4.0);
    v *= m1;
    v /= real(3.0);
    v /= pi();
    v
}

/// The finite-mass expression whose limit is [`e3_c1_infty`]:
/// `(2 mu^3 / 3 pi)(2/m1^2 - 1/(m1 m2) + 2/m2^2)`.
pub fn e3_c1_pre_limit(sys: &TwoBodySystem) -> Real {
    let mut bracket = real(2.0) * inv_pow_sum(sys, 2);
    bracket -= inv_m1m2(sys);
    let mut v = real(2.0) / real(3.0);
    v *= mu3(sys);
    v /= pi();
    v * bracket
}

/// alpha^4 ln(alpha) coefficient of the Coulomb exchange for equal unit
/// masses: exactly -1/16.
pub fn a4log_ps(sys: &TwoBodySystem) -> Result<Real> {
    if sys.m1() != sys.m2() || *sys.m1() != 1 {
        return Err(Error::EqualMassesRequired("a4log"));
    }
    Ok(real(-0.0625))
}

/// Hydrogenic expectation values for arbitrary reduced mass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HydrogenicKind {
    /// E_{n,l} = -mu / (2 n^2)
    Energy,
    /// <r^-1> = mu / n^2
    InvR,
    /// <r^-2> = 2 mu^2 / (n^3 (2l+1))
    InvR2,
    /// <delta^3(r)> = mu^3 / (pi n^3) for l = 0, else 0
    Delta3,
}

pub fn hydrogenic_expectation(
    kind: HydrogenicKind,
    sys: &TwoBodySystem,
    n: u32,
    l: u32,
) -> Result<Real> {
    use rug::ops::Pow;
    if n == 0 || l >= n {
        return Err(Error::Invalid(format!("invalid quantum numbers n={n}, l={l}")));
    }
    let mu = sys.mu();
    let nn = real(n as f64);
    Ok(match kind {
        HydrogenicKind::Energy => -mu / (real(2.0) * nn.square()),
        HydrogenicKind::InvR => mu / nn.square(),
        HydrogenicKind::InvR2 => {
            real(2.0) * mu.pow(2) / (nn.pow(3) * real((2 * l + 1) as f64))
        }
        HydrogenicKind::Delta3 => {
            if l == 0 {
                mu.pow(3) / (pi() * nn.pow(3))
            } else {
                real(0.0)
            }
        }
    })
}

/// Collected reference coefficients for one system; equal-mass-only entries
/// are absent for unequal masses.
#[derive(Clone, Debug)]
pub struct NrqedReport {
    pub e_nr: Real,
    pub e2_dc: Real,
    pub e2_b: Real,
    pub e2_dcb: Real,
    pub e3_c02: Real,
    pub e3_c2: Real,
    pub e3_c0: Real,
    pub e3_b: Option<Real>,
    pub e3_c1_infty_limit: Real,
    pub a4log: Option<Real>,
}

pub fn nrqed_report(sys: &TwoBodySystem) -> Result<NrqedReport> {
    let e3_c2v = e3_c2(sys)?;
    let e3_c0v = e3_c02(sys) - &e3_c2v;
    Ok(NrqedReport {
        e_nr: e_nr(sys),
        e2_dc: e2_dc(sys),
        e2_b: e2_b(sys),
        e2_dcb: e2_dcb(sys),
        e3_c02: e3_c02(sys),
        e3_c2: e3_c2v,
        e3_c0: e3_c0v,
        e3_b: e3_b_equal_mass(sys).ok(),
        e3_c1_infty_limit: e3_c1_infty(sys.m1()),
        a4log: a4log_ps(sys).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::real_str;
    use crate::system::SystemPreset;

    fn sys(p: SystemPreset) -> TwoBodySystem {
        TwoBodySystem::preset(p)
    }

    #[test]
    fn equal_mass_closed_forms() {
        let ps = sys(SystemPreset::Ps);
        assert_eq!(e_nr(&ps).to_f64(), -0.25);
        // 3/64 and -3/8
        assert!((e2_dc(&ps) - real(3.0) / real(64.0)).abs() < real_str("1e-33").unwrap());
        assert!((e2_b(&ps) + real(0.375)).abs() < real_str("1e-33").unwrap());
        assert!((e2_dcb(&ps) + real(0.328125)).abs() < real_str("1e-33").unwrap());
        // -5/(12 pi)
        let expect = real(-5.0) / (real(12.0) * pi());
        assert!((e3_c02(&ps) - expect).abs() < real_str("1e-33").unwrap());
        // (1/2pi)(1 + pi/2) ~ 0.409155
        let e3b = e3_b_equal_mass(&ps).unwrap();
        assert!((e3b - real_str("0.409155").unwrap()).abs() < real_str("1e-6").unwrap());
        assert_eq!(a4log_ps(&ps).unwrap().to_f64(), -0.0625);
    }

    #[test]
    fn two_pair_integral_matches_closed_form_for_equal_masses() {
        // -(1/8pi)(5/3 - pi/2)
        let ps = sys(SystemPreset::Ps);
        let got = e3_c2(&ps).unwrap();
        let expect = -(real(5.0) / real(3.0) - pi() / real(2.0)) / (real(8.0) * pi());
        assert!((got - expect).abs() < real_str("1e-12").unwrap());
    }

    #[test]
    fn two_pair_integral_vanishes_for_infinite_mass() {
        let heavy = TwoBodySystem::new(real(1.0), real(1e6), real(-1.0), real(137.0)).unwrap();
        let got = e3_c2(&heavy).unwrap();
        assert!(got.abs() < real_str("1e-8").unwrap());
    }

    #[test]
    fn no_pair_composition() {
        let ps = sys(SystemPreset::Ps);
        let r = nrqed_report(&ps).unwrap();
        let d = (r.e2_dcb.clone() - (r.e2_dc.clone() + &r.e2_b)).abs();
        assert!(d.is_zero());
        let d = (r.e3_c0.clone() + &r.e3_c2 - &r.e3_c02).abs();
        assert!(d.is_zero());
        // -(1/8pi)(pi/2 + 5/3) ~ -0.128815
        assert!((r.e3_c0.clone() - real_str("-0.128815").unwrap()).abs()
            < real_str("1e-6").unwrap());
    }

    #[test]
    fn one_pair_limit() {
        // 4/(3 pi) and the finite-mass expression at m2 = 1e6
        let lim = e3_c1_infty(&real(1.0));
        assert!((lim.clone() - real_str("0.424413").unwrap()).abs() < real_str("1e-6").unwrap());
        let heavy = TwoBodySystem::new(real(1.0), real(1e6), real(-1.0), real(137.0)).unwrap();
        let pre = e3_c1_pre_limit(&heavy);
        assert!((pre - lim).abs() < real_str("1e-5").unwrap());
        // linear in m1
        let m1 = real_str("206.768283").unwrap();
        let d = (e3_c1_infty(&m1) - e3_c1_infty(&real(1.0)) * &m1).abs();
        assert!(d < real_str("1e-30").unwrap());
    }

    #[test]
    fn mass_symmetry_of_coefficients() {
        let a = TwoBodySystem::new(real(1.0), real(7.3), real(-1.0), real(137.0)).unwrap();
        let b = a.with_masses_swapped();
        assert!((e2_dc(&a) - e2_dc(&b)).abs().is_zero());
        assert!((e2_b(&a) - e2_b(&b)).abs().is_zero());
        assert!((e3_c02(&a) - e3_c02(&b)).abs().is_zero());
        let d = (e3_c2(&a).unwrap() - e3_c2(&b).unwrap()).abs();
        assert!(d < real_str("1e-25").unwrap());
    }

    #[test]
    fn e2_dc_zero_crossings() {
        // for m1 = 1 the coefficient changes sign inside (0.2, 0.21) and (4.7, 4.8)
        let at = |m2: f64| {
            e2_dc(&TwoBodySystem::new(real(1.0), real(m2), real(-1.0), real(137.0)).unwrap())
        };
        assert!(at(0.2) < 0 && at(0.21) > 0 || at(0.2) > 0 && at(0.21) < 0);
        assert!(at(4.7) < 0 && at(4.8) > 0 || at(4.7) > 0 && at(4.8) < 0);
        // near-cancellation mass from the figure caption
        assert!(at(0.20871).abs() < 1e-4);
    }

    #[test]
    fn hydrogenic_values() {
        let ps = sys(SystemPreset::Ps);
        let unit = TwoBodySystem::new(real(2.0), real(2.0), real(-1.0), real(137.0)).unwrap();
        // mu = 1: <delta3> at 1s is 1/pi
        let d = hydrogenic_expectation(HydrogenicKind::Delta3, &unit, 1, 0).unwrap();
        assert!((d - pi().recip()).abs() < real_str("1e-33").unwrap());
        // mu = 1/2: <1/r> at 1s is 1/2
        let r = hydrogenic_expectation(HydrogenicKind::InvR, &ps, 1, 0).unwrap();
        assert_eq!(r.to_f64(), 0.5);
        // mu = 1: E(n=2) = -1/8
        let e = hydrogenic_expectation(HydrogenicKind::Energy, &unit, 2, 0).unwrap();
        assert_eq!(e.to_f64(), -0.125);
        assert!(hydrogenic_expectation(HydrogenicKind::Energy, &unit, 0, 0).is_err());
    }
}
