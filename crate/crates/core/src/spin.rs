//! Exact two-spin Pauli algebra over Gaussian integers.
//!
//! The 4-dimensional two-spin space is ordered (aa, ab, ba, bb). Contractions
//! of four Pauli factors against delta-structured Cartesian tensors are
//! precomputed per index pattern; every contraction used by the Hamiltonian
//! is rotationally invariant in spin space, so imaginary parts must cancel
//! and a surviving residual flags an index-order bug.

use num_complex::Complex;
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::precision::real;
use crate::Real;

type C = Complex<i64>;
type Spin4 = [[C; 4]; 4];

fn czero() -> C {
    Complex::new(0, 0)
}

fn mat_mul(a: &Spin4, b: &Spin4) -> Spin4 {
    let mut out = [[czero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = czero();
            for k in 0..4 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat_add(a: &mut Spin4, b: &Spin4) {
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] += b[i][j];
        }
    }
}

/// sigma_i for particle 1 (sigma x 1) and particle 2 (1 x sigma).
fn pauli_products() -> ([Spin4; 3], [Spin4; 3]) {
    let i = |re: i64, im: i64| Complex::new(re, im);
    let sx = [[i(0, 0), i(1, 0)], [i(1, 0), i(0, 0)]];
    let sy = [[i(0, 0), i(0, -1)], [i(0, 1), i(0, 0)]];
    let sz = [[i(1, 0), i(0, 0)], [i(0, 0), i(-1, 0)]];
    let id = [[i(1, 0), i(0, 0)], [i(0, 0), i(1, 0)]];
    let kron = |a: &[[C; 2]; 2], b: &[[C; 2]; 2]| -> Spin4 {
        let mut out = [[czero(); 4]; 4];
        for p in 0..2 {
            for q in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        out[2 * p + r][2 * q + s] = a[p][q] * b[r][s];
                    }
                }
            }
        }
        out
    };
    let s1 = [kron(&sx, &id), kron(&sy, &id), kron(&sz, &id)];
    let s2 = [kron(&id, &sx), kron(&id, &sy), kron(&id, &sz)];
    (s1, s2)
}

/// Which particle each of the four Pauli slots acts on, in operator order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Pattern {
    /// s1_i s2_j s1_k s2_l
    P1212,
    /// s2_i s1_j s2_k s1_l
    P2121,
    /// s1_i s1_j s2_k s2_l
    P1122,
    /// s2_i s1_j s1_k s2_l
    P2112,
}

impl Pattern {
    fn slots(self) -> [u8; 4] {
        match self {
            Pattern::P1212 => [1, 2, 1, 2],
            Pattern::P2121 => [2, 1, 2, 1],
            Pattern::P1122 => [1, 1, 2, 2],
            Pattern::P2112 => [2, 1, 1, 2],
        }
    }
}

/// The three delta pairings of a rank-4 tensor, in the fixed basis order
/// `[d_ij d_kl, d_ik d_jl, d_il d_jk]`.
fn pairing_slots(pairing: usize) -> [(usize, usize); 2] {
    match pairing {
        0 => [(0, 1), (2, 3)],
        1 => [(0, 2), (1, 3)],
        2 => [(0, 3), (1, 2)],
        _ => unreachable!(),
    }
}

fn contraction_table(pattern: Pattern) -> [Spin4; 3] {
    let (s1, s2) = pauli_products();
    let ops = |which: u8, comp: usize| -> &Spin4 {
        if which == 1 {
            &s1[comp]
        } else {
            &s2[comp]
        }
    };
    let slots = pattern.slots();
    let mut out = [[[czero(); 4]; 4]; 3];
    for (pairing, table) in out.iter_mut().enumerate() {
        let pairs = pairing_slots(pairing);
        for a in 0..3 {
            for b in 0..3 {
                let mut comp = [0usize; 4];
                comp[pairs[0].0] = a;
                comp[pairs[0].1] = a;
                comp[pairs[1].0] = b;
                comp[pairs[1].1] = b;
                let m01 = mat_mul(ops(slots[0], comp[0]), ops(slots[1], comp[1]));
                let m23 = mat_mul(ops(slots[2], comp[2]), ops(slots[3], comp[3]));
                let m = mat_mul(&m01, &m23);
                mat_add(table, &m);
            }
        }
    }
    out
}

static TABLES: Lazy<[(Pattern, [Spin4; 3]); 4]> = Lazy::new(|| {
    [
        (Pattern::P1212, contraction_table(Pattern::P1212)),
        (Pattern::P2121, contraction_table(Pattern::P2121)),
        (Pattern::P1122, contraction_table(Pattern::P1122)),
        (Pattern::P2112, contraction_table(Pattern::P2112)),
    ]
});

const IMAG_LIMIT: f64 = 1e-25;

/// Contract the Pauli pattern with a delta-decomposed rank-4 tensor
/// (coefficients `t` in the fixed pairing basis). Returns the real 4x4
/// two-spin matrix; errors if the imaginary residual survives.
pub(crate) fn contract(pattern: Pattern, t: &[Real; 3]) -> Result<[[Real; 4]; 4]> {
    let tables = &*TABLES;
    let table = &tables.iter().find(|(p, _)| *p == pattern).unwrap().1;
    let mut scale_max = real(0.0);
    let mut out: [[Real; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| real(0.0)));
    let mut im_max = real(0.0);
    for s in 0..4 {
        for u in 0..4 {
            let mut acc_re = real(0.0);
            let mut acc_im = real(0.0);
            for (k, tk) in t.iter().enumerate() {
                let c = table[k][s][u];
                if c.re != 0 {
                    acc_re += tk * &real(c.re as f64);
                }
                if c.im != 0 {
                    acc_im += tk * &real(c.im as f64);
                }
            }
            let mag = acc_re.clone().abs();
            if mag > scale_max {
                scale_max = mag;
            }
            let imag = acc_im.abs();
            if imag > im_max {
                im_max = imag;
            }
            out[s][u] = acc_re;
        }
    }
    let mut limit = scale_max;
    limit *= real(IMAG_LIMIT);
    if im_max > limit && !im_max.is_zero() {
        return Err(Error::ResidualImaginary {
            residual: im_max.to_f64(),
            limit: limit.to_f64(),
        });
    }
    Ok(out)
}

/// Contract a pure delta_ij rank-2 tensor with sigma_n . sigma_n (same
/// particle): Sum_i sigma_i sigma_i = 3 * identity, so the spin factor is a
/// scalar 3.
pub(crate) const SAME_PARTICLE_TRACE: f64 = 3.0;
