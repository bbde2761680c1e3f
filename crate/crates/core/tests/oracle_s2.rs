//! Quadrature oracle for every closed-form matrix element. Each oracle
//! integrand is assembled from the defining integral (derivatives expanded,
//! angular moments reduced analytically), never from the formula under test.

use nopair_core::integrals::*;
use nopair_core::oracles::{quad_radial, Domain, QuadratureSpec};
use nopair_core::precision::{pi, real, real_str};
use nopair_core::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_REL_TOL: &str = "1e-25";
const PAIR_SAMPLES: usize = 100;

fn random_pairs(seed: u64, n: usize) -> Vec<ExponentPair> {
    // log-uniform in [1e-3, 1e5]
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a = 10f64.powf(rng.gen_range(-3.0..5.0));
            let b = 10f64.powf(rng.gen_range(-3.0..5.0));
            ExponentPair::new(real(a), real(b)).unwrap()
        })
        .collect()
}

/// N_mu N_nu exp(-zs r^2)
fn pair_density(p: &ExponentPair) -> impl Fn(&Real) -> Real {
    use rug::ops::Pow;
    let zs = p.zsum();
    let nn = (real(2.0) / pi()).pow(&real(1.5))
        * (p.zmu.clone() * &p.znu).pow(&real(0.75));
    move |r: &Real| -> Real {
        let mut e = r.clone().square();
        e *= -zs.clone();
        nn.clone() * e.exp()
    }
}

/// integral over [0, inf) of 4 pi r^2 g(r) against the pair density, with the
/// substitution width matched to the Gaussian decay; `magnitude` only sets
/// the convergence scale, two digits beyond the comparison tolerance
fn radial_scaled(p: &ExponentPair, magnitude: &Real, g: impl Fn(&Real) -> Real) -> Real {
    let density = pair_density(p);
    let scale = p.zsum().sqrt().recip();
    let f = |r: &Real| -> Real {
        let mut v = real(4.0);
        v *= pi();
        v *= r.clone().square();
        v *= density(r);
        v * g(r)
    };
    let mut tol = magnitude.clone().abs();
    if tol < real(1e-280) {
        tol = real(1.0);
    }
    tol *= real_str("1e-28").unwrap();
    let spec = QuadratureSpec {
        integrand: &f,
        domain: Domain::HalfLine { scale },
        abs_tol: tol,
        max_depth: 60,
    };
    let (val, _) = quad_radial(spec).unwrap();
    val
}

fn assert_rel(analytic: &Real, oracle: &Real, label: &str) {
    let tol = real_str(ORACLE_REL_TOL).unwrap();
    let mut scale = analytic.clone().abs();
    if scale < real(1e-300) {
        scale = real(1.0);
    }
    let d = (analytic.clone() - oracle).abs() / scale;
    assert!(d < tol, "{label}: relative deviation {d}");
}

#[test]
fn oracle_s2_overlap() {
    for p in random_pairs(1, PAIR_SAMPLES) {
        let hint = overlap(&p);
        let oracle = radial_scaled(&p, &hint, |_| real(1.0));
        assert_rel(&hint, &oracle, "overlap");
    }
    // the worked example: overlap(1, 2) ~ 0.9154
    let p = ExponentPair::new(real(1.0), real(2.0)).unwrap();
    let oracle = radial_scaled(&p, &overlap(&p), |_| real(1.0));
    assert!((oracle.clone() - real_str("0.91546").unwrap()).abs() < real(1e-5));
    assert_rel(&overlap(&p), &oracle, "overlap(1,2)");
}

#[test]
fn oracle_s2_coulomb() {
    for p in random_pairs(2, PAIR_SAMPLES) {
        let hint = coulomb(&p);
        let oracle = radial_scaled(&p, &hint, |r| r.clone().recip());
        assert_rel(&hint, &oracle, "coulomb");
    }
}

#[test]
fn oracle_s2_laplacian() {
    for p in random_pairs(3, PAIR_SAMPLES) {
        // lap f_nu = (-6 znu + 4 znu^2 r^2) f_nu
        let znu = p.znu.clone();
        let hint = laplacian(&p);
        let oracle = radial_scaled(&p, &hint, |r| {
            let mut v = real(4.0);
            v *= znu.clone().square();
            v *= r.clone().square();
            v -= real(6.0) * &znu;
            v
        });
        assert_rel(&laplacian(&p), &oracle, "laplacian");
    }
}

#[test]
fn oracle_s2_biharmonic() {
    for p in random_pairs(4, PAIR_SAMPLES) {
        // <lap f_mu | lap f_nu> equals <f | lap lap f> after two integrations
        // by parts
        let (zm, zn) = (p.zmu.clone(), p.znu.clone());
        let hint = biharmonic(&p);
        let oracle = radial_scaled(&p, &hint, |r| {
            let r2 = r.clone().square();
            let mut a = real(4.0);
            a *= zm.clone().square();
            a *= &r2;
            a -= real(6.0) * &zm;
            let mut b = real(4.0);
            b *= zn.clone().square();
            b *= &r2;
            b -= real(6.0) * &zn;
            a * b
        });
        assert_rel(&biharmonic(&p), &oracle, "biharmonic");
    }
}

#[test]
fn oracle_s2_r_moment() {
    for p in random_pairs(5, PAIR_SAMPLES) {
        let hint = r_moment(&p);
        let oracle = radial_scaled(&p, &hint, |r| r.clone());
        assert_rel(&hint, &oracle, "r_moment");
    }
}

#[test]
fn oracle_s2_grad_coulomb_grad() {
    // <d_x f_mu | 1/r | d_x f_nu> = 4 zm zn int (x^2 / r) ff, <x^2> = r^2/3
    for p in random_pairs(6, PAIR_SAMPLES) {
        let factor = real(4.0) * p.zmu.clone() * &p.znu / real(3.0);
        let hint = grad_coulomb_grad(&p).component(0, 0) / factor.clone();
        let oracle = radial_scaled(&p, &hint, |r| r.clone()) * factor;
        assert_rel(
            &grad_coulomb_grad(&p).component(0, 0),
            &oracle,
            "grad_coulomb_grad",
        );
    }
}

#[test]
fn oracle_s2_gradgrad_coulomb_gradgrad() {
    // component (x,x,x,x): d_x^2 f = (-2 z + 4 z^2 x^2) f;
    // <x^2> = r^2/3, <x^4> = r^4/5
    for p in random_pairs(7, PAIR_SAMPLES) {
        let (zm, zn) = (p.zmu.clone(), p.znu.clone());
        let hint = gradgrad_coulomb_gradgrad(&p).component(0, 0, 0, 0);
        let oracle = radial_scaled(&p, &hint, |r| {
            let r2 = r.clone().square();
            let mut v = real(4.0) * zm.clone() * &zn;
            let mut mixed = zm.clone() * zn.clone().square();
            mixed += zm.clone().square() * &zn;
            mixed *= real(8.0) / real(3.0);
            mixed *= &r2;
            v -= mixed;
            let mut quart = zm.clone().square();
            quart *= zn.clone().square();
            quart *= real(16.0) / real(5.0);
            quart *= r2.clone().square();
            v += quart;
            v / r.clone()
        });
        assert_rel(
            &gradgrad_coulomb_gradgrad(&p).component(0, 0, 0, 0),
            &oracle,
            "gradgrad(x,x,x,x)",
        );
    }
    // component (x,x,y,y): only the d_ij d_kl pairing survives
    for p in random_pairs(8, 20) {
        let (zm, zn) = (p.zmu.clone(), p.znu.clone());
        let hint = gradgrad_coulomb_gradgrad(&p).component(0, 0, 1, 1);
        let oracle = radial_scaled(&p, &hint, |r| {
            let r2 = r.clone().square();
            let mut v = real(4.0) * zm.clone() * &zn;
            let mut mixed = zm.clone() * zn.clone().square();
            mixed += zm.clone().square() * &zn;
            mixed *= real(8.0) / real(3.0);
            mixed *= &r2;
            v -= mixed;
            // <x^2 y^2> = r^4/15
            let mut quart = zm.clone().square();
            quart *= zn.clone().square();
            quart *= real(16.0) / real(15.0);
            quart *= r2.clone().square();
            v += quart;
            v / r.clone()
        });
        assert_rel(
            &gradgrad_coulomb_gradgrad(&p).component(0, 0, 1, 1),
            &oracle,
            "gradgrad(x,x,y,y)",
        );
    }
}

#[test]
fn oracle_s2_f1() {
    // F1(z, z): int (z^2 / r) ff, <z^2> = r^2/3
    for p in random_pairs(9, PAIR_SAMPLES) {
        let hint = f1(&p).component(2, 2) * real(3.0);
        let oracle = radial_scaled(&p, &hint, |r| r.clone()) / real(3.0);
        assert_rel(&f1(&p).component(2, 2), &oracle, "f1");
    }
}

#[test]
fn oracle_s2_f2() {
    // F2(x,x,y,y): int (x^2 y^2 / r) ff, <x^2 y^2> = r^4/15
    for p in random_pairs(10, PAIR_SAMPLES) {
        let hint = f2(&p).component(0, 0, 1, 1);
        let oracle = radial_scaled(&p, &hint, |r| {
            let mut v = r.clone().square();
            v *= r;
            v / real(15.0)
        });
        assert_rel(&f2(&p).component(0, 0, 1, 1), &oracle, "f2");
    }
}

#[test]
fn oracle_s2_i1() {
    // I1(mu,nu,x,x,y,y) = int (d_x f_mu)(x/r)(d_y d_y f_nu)
    //  = -2 zm int (x^2/r)(-2 zn + 4 zn^2 y^2) ff
    for p in random_pairs(11, PAIR_SAMPLES) {
        let (zm, zn) = (p.zmu.clone(), p.znu.clone());
        let hint = i1(&p, 0, 0, 1, 1);
        let oracle = radial_scaled(&p, &hint, |r| {
            let r2 = r.clone().square();
            // -2 zm [ -2 zn <x^2> + 4 zn^2 <x^2 y^2> ] / r
            let mut v = real(-2.0) * &zn * r2.clone() / real(3.0);
            let mut quart = real(4.0) * zn.clone().square();
            quart *= r2.clone().square();
            quart /= real(15.0);
            v += quart;
            v *= real(-2.0) * &zm;
            v / r.clone()
        });
        assert_rel(&i1(&p, 0, 0, 1, 1), &oracle, "i1(x,x,y,y)");
    }
}

#[test]
fn oracle_s2_i2() {
    // I2(mu,nu,x,x,y,y) = int f_mu (x/r)(d_x d_y d_y f_nu)
    //  with d_x d_y d_y f = (4 zn^2 x - 8 zn^3 x y^2) f
    for p in random_pairs(12, PAIR_SAMPLES) {
        let zn = p.znu.clone();
        let hint = i2(&p, 0, 0, 1, 1);
        let oracle = radial_scaled(&p, &hint, |r| {
            let r2 = r.clone().square();
            let mut v = real(4.0) * zn.clone().square() * r2.clone() / real(3.0);
            let mut quart = real(8.0) * zn.clone().square() * &zn;
            quart *= r2.clone().square();
            quart /= real(15.0);
            v -= quart;
            v / r.clone()
        });
        assert_rel(&i2(&p, 0, 0, 1, 1), &oracle, "i2(x,x,y,y)");
    }
}

// ---------------------------------------------------------------------------
// Composite Breit-block oracle: the balanced block B1 sandwiched between
// Gaussians, rebuilt from the operator kernel with a test-local spin algebra
// and spherical moments, then compared entry by entry.
// ---------------------------------------------------------------------------

type C64 = (i64, i64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn mat4mul(a: &[[C64; 4]; 4], b: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut out = [[(0, 0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = (0, 0);
            for k in 0..4 {
                let p = cmul(a[i][k], b[k][j]);
                acc = (acc.0 + p.0, acc.1 + p.1);
            }
            out[i][j] = acc;
        }
    }
    out
}

fn pauli4() -> ([[[C64; 4]; 4]; 3], [[[C64; 4]; 4]; 3]) {
    let sx = [[(0, 0), (1, 0)], [(1, 0), (0, 0)]];
    let sy = [[(0, 0), (0, -1)], [(0, 1), (0, 0)]];
    let sz = [[(1, 0), (0, 0)], [(0, 0), (-1, 0)]];
    let id = [[(1, 0), (0, 0)], [(0, 0), (1, 0)]];
    let kron = |a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]| {
        let mut out = [[(0, 0); 4]; 4];
        for p in 0..2 {
            for q in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        out[2 * p + r][2 * q + s] = cmul(a[p][q], b[r][s]);
                    }
                }
            }
        }
        out
    };
    (
        [kron(&sx, &id), kron(&sy, &id), kron(&sz, &id)],
        [kron(&id, &sx), kron(&id, &sy), kron(&id, &sz)],
    )
}

/// angular average of x^(2px) y^(2py) z^(2pz) over the unit sphere
fn angular_moment(px: u32, py: u32, pz: u32) -> Real {
    fn dfact(n: i64) -> i64 {
        if n <= 1 {
            1
        } else {
            n * dfact(n - 2)
        }
    }
    let num = dfact(2 * px as i64 - 1) * dfact(2 * py as i64 - 1) * dfact(2 * pz as i64 - 1);
    let den = dfact(2 * (px + py + pz) as i64 + 1);
    real(num as f64) / real(den as f64)
}

/// average of r_a r_b / r^2 (unit sphere); zero unless a == b
fn avg2(a: usize, b: usize) -> Real {
    if a == b {
        angular_moment(1, 0, 0)
    } else {
        real(0.0)
    }
}

/// average of r_a r_b r_c r_d / r^4 via power counting
fn avg4(idx: [usize; 4]) -> Real {
    let mut pow = [0u32; 3];
    for a in idx {
        pow[a] += 1;
    }
    if pow.iter().any(|p| p % 2 == 1) {
        return real(0.0);
    }
    angular_moment(pow[0] / 2, pow[1] / 2, pow[2] / 2)
}

#[test]
fn oracle_s2_breit_block_singlet() {
    // <f_mu s0| B1 |f_nu s0> from the raw kernel:
    //   B1 = -(q/2) s1_i s2_j s1_k s2_l (d_ij/r + r_i r_j/r^3) d_k d_l
    //        / (4 c^2 m1 m2)
    let (s1, s2) = pauli4();
    let s0 = [0.0, 1.0, -1.0, 0.0]; // singlet, normalized below
    let params = BreitParams {
        m1: real(1.0),
        m2: real(1.0),
        c: real_str("137.035999084").unwrap(),
        q1q2: real(-1.0),
    };
    for p in [
        ExponentPair::new(real(0.8), real(0.8)).unwrap(),
        ExponentPair::new(real(0.37), real(2.4)).unwrap(),
        ExponentPair::new(real(12.0), real(0.01)).unwrap(),
    ] {
        let zn = p.znu.clone();
        let mut oracle = real(0.0);
        for i in 0..3usize {
            for j in 0..3usize {
                for k in 0..3usize {
                    for l in 0..3usize {
                        // singlet spin factor of s1_i s2_j s1_k s2_l
                        let m = mat4mul(&mat4mul(&s1[i], &s2[j]), &mat4mul(&s1[k], &s2[l]));
                        let mut spin = 0.0;
                        let mut imag = 0.0;
                        for a in 0..4 {
                            for b in 0..4 {
                                spin += s0[a] * m[a][b].0 as f64 * s0[b];
                                imag += s0[a] * m[a][b].1 as f64 * s0[b];
                            }
                        }
                        spin /= 2.0;
                        imag /= 2.0;
                        assert_eq!(imag, 0.0, "singlet spin factor must be real");
                        if spin == 0.0 {
                            continue;
                        }
                        // spatial factor: int f_mu (d_ij/r + r_i r_j/r^3)
                        //                         (-2 zn d_kl + 4 zn^2 r_k r_l) f_nu
                        let (zn2, zn_) = (zn.clone().square(), zn.clone());
                        let dij = i == j;
                        let dkl = k == l;
                        let a2_ij = avg2(i, j);
                        let a2_kl = avg2(k, l);
                        let a4 = avg4([i, j, k, l]);
                        let hint = (real(1.0) + zn.clone().square()) * coulomb(&p);
                        let spatial = radial_scaled(&p, &hint, |r| {
                            let r2 = r.clone().square();
                            let mut acc = real(0.0);
                            // d_ij/r * (-2 zn d_kl)
                            if dij && dkl {
                                acc += real(-2.0) * &zn_ / r.clone();
                            }
                            // d_ij/r * 4 zn^2 <r_k r_l>
                            if dij {
                                let mut t = real(4.0) * &zn2;
                                t *= &a2_kl;
                                t *= &r2;
                                t /= r.clone();
                                acc += t;
                            }
                            // <r_i r_j>/r^3 * (-2 zn d_kl): r^2 avg2 / r^3
                            if dkl {
                                let mut t = real(-2.0) * &zn_;
                                t *= &a2_ij;
                                t *= &r2;
                                t /= r.clone() * &r2;
                                acc += t;
                            }
                            // <r_i r_j r_k r_l>/r^3 * 4 zn^2: r^4 avg4 / r^3
                            let mut t = real(4.0) * &zn2;
                            t *= &a4;
                            t *= r2.clone().square();
                            t /= r.clone() * &r2;
                            acc += t;
                            acc
                        });
                        oracle += real(spin) * spatial;
                    }
                }
            }
        }
        // prefactor -(q/2) / (4 c^2 m1 m2)
        let mut pref = -params.q1q2.clone() / real(2.0);
        pref /= real(4.0) * params.c.clone().square() * &params.m1 * &params.m2;
        oracle *= pref;

        let block = breit_block(BreitBlockKind::B1, &p, &params).unwrap();
        let mut analytic = real(0.0);
        for a in 0..4 {
            for b in 0..4 {
                analytic += real(s0[a]) * &block[a][b] * real(s0[b]);
            }
        }
        analytic /= real(2.0);
        let tol = real_str("1e-20").unwrap();
        let rel = ((analytic.clone() - &oracle) / oracle.clone()).abs();
        assert!(rel < tol, "breit singlet element deviation {rel}");
    }
}
