//! Assembly of the kinetically balanced 16 n_b operator matrices: the
//! metric, the bare (non-interacting) Hamiltonian, and the Coulomb and Breit
//! interactions.
//!
//! Basis ordering: spatial index fastest, then the two-spin index, then the
//! large/small component block (ll, ls, sl, ss), so row
//! `comp * 4 n_b + spin * n_b + i`. The bare matrix keeps the `-2 m c^2`
//! rest-energy shifts (transformed to `-p^2/2m` and `-m12 p^4 / (8 m1^2 m2^2
//! c^2)` by the balance metric), which places the positive-energy branch
//! near zero and the negative branches near `-2 m c^2`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::integrals::{
    biharmonic, breit_block, coulomb, coulomb_d4_spin_block, grad_coulomb_grad, laplacian,
    overlap, BreitBlockKind, BreitParams,
};
use crate::linalg::{Dense, SymMatrix};
use crate::precision::{real, to_full_string};
use crate::system::{BasisSet, TwoBodySystem};
use crate::Real;

/// Dense symmetric operator over the 16 n_b spinor-spatial product basis.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub nb: usize,
    pub mat: Dense,
}

/// The kinetic-balance metric; same storage as [`OperatorMatrix`], positive
/// definite with diagonal component blocks.
pub type MetricMatrix = OperatorMatrix;

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        16 * self.nb
    }

    #[inline]
    pub fn index(nb: usize, comp: usize, spin: usize, i: usize) -> usize {
        comp * 4 * nb + spin * nb + i
    }

    /// Max-norm symmetry defect relative to the matrix max-norm.
    pub fn symmetry_defect(&self) -> Real {
        let n = self.dim();
        let mut worst = real(0.0);
        for i in 0..n {
            for j in i + 1..n {
                let mut d = self.mat.at(i, j).clone();
                d -= self.mat.at(j, i);
                let d = d.abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        let scale = self.mat.max_abs();
        if scale.is_zero() {
            worst
        } else {
            worst / scale
        }
    }

    fn symmetrize(&mut self) {
        let n = self.dim();
        let half = real(0.5);
        for i in 0..n {
            for j in i + 1..n {
                let mut v = self.mat.at(i, j).clone();
                v += self.mat.at(j, i);
                v *= &half;
                self.mat.set(i, j, v.clone());
                self.mat.set(j, i, v);
            }
        }
    }

    /// Lower-triangle view for the generalized eigensolvers.
    pub fn to_sym(&self) -> SymMatrix {
        let n = self.dim();
        SymMatrix::from_fn(n, |i, j| self.mat.at(i, j).clone())
    }

    /// Plain-text triplet dump `row col value`, full precision.
    pub fn dump_triplets(&self, path: &Path) -> Result<()> {
        let n = self.dim();
        let mut out = String::new();
        for i in 0..n {
            for j in 0..n {
                if !self.mat.at(i, j).is_zero() {
                    writeln!(out, "{} {} {}", i, j, to_full_string(self.mat.at(i, j)))
                        .expect("string write");
                }
            }
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

const SYMMETRY_LIMIT: f64 = 1e-25;

fn finalize(mut m: OperatorMatrix) -> Result<OperatorMatrix> {
    let defect = m.symmetry_defect();
    if defect > real(SYMMETRY_LIMIT) {
        return Err(Error::ResidualImaginary {
            residual: defect.to_f64(),
            limit: SYMMETRY_LIMIT,
        });
    }
    m.symmetrize();
    Ok(m)
}

struct Prefactors {
    c2: Real,
    m1: Real,
    m2: Real,
    /// 1 / (4 c^2 m2^2)
    ls_metric: Real,
    /// 1 / (4 c^2 m1^2)
    sl_metric: Real,
    /// 1 / (16 c^4 m1^2 m2^2)
    ss_metric: Real,
}

fn prefactors(sys: &TwoBodySystem) -> Prefactors {
    let c2 = sys.c().square();
    let m1 = sys.m1().clone();
    let m2 = sys.m2().clone();
    let ls_metric = (real(4.0) * c2.clone() * m2.clone().square()).recip();
    let sl_metric = (real(4.0) * c2.clone() * m1.clone().square()).recip();
    let ss_metric = (real(16.0) * c2.clone().square() * (m1.clone() * &m2).square()).recip();
    Prefactors {
        c2,
        m1,
        m2,
        ls_metric,
        sl_metric,
        ss_metric,
    }
}

/// Spatial matrices shared by the assemblers.
struct SpatialBlocks {
    s: Dense,
    p2: Dense,
    p4: Dense,
}

fn spatial_blocks(basis: &BasisSet) -> SpatialBlocks {
    let nb = basis.len();
    let s = Dense::from_fn(nb, nb, |i, j| overlap(&basis.pair(i, j)));
    let p2 = Dense::from_fn(nb, nb, |i, j| -laplacian(&basis.pair(i, j)));
    let p4 = Dense::from_fn(nb, nb, |i, j| biharmonic(&basis.pair(i, j)));
    SpatialBlocks { s, p2, p4 }
}

fn add_identity_spin_block(m: &mut OperatorMatrix, comp_i: usize, comp_j: usize, spat: &Dense, factor: &Real) {
    let nb = m.nb;
    for spin in 0..4 {
        for i in 0..nb {
            for j in 0..nb {
                let mut v = spat.at(i, j).clone();
                v *= factor;
                *m.mat
                    .at_mut(
                        OperatorMatrix::index(nb, comp_i, spin, i),
                        OperatorMatrix::index(nb, comp_j, spin, j),
                    ) += &v;
            }
        }
    }
}

fn add_spin_block(
    m: &mut OperatorMatrix,
    comp_i: usize,
    comp_j: usize,
    i: usize,
    j: usize,
    block: &[[Real; 4]; 4],
) {
    let nb = m.nb;
    for s in 0..4 {
        for t in 0..4 {
            if block[s][t].is_zero() {
                continue;
            }
            *m.mat.at_mut(
                OperatorMatrix::index(nb, comp_i, s, i),
                OperatorMatrix::index(nb, comp_j, t, j),
            ) += &block[s][t];
        }
    }
}

/// The metric `X^dagger X`: overlap on ll, `p^2/(4c^2 m^2)` on ls/sl, and
/// `p^4/(16 c^4 m1^2 m2^2)` on ss, each times the spin identity.
pub fn assemble_metric(sys: &TwoBodySystem, basis: &BasisSet) -> Result<MetricMatrix> {
    let nb = basis.len();
    let pf = prefactors(sys);
    let sp = spatial_blocks(basis);
    let mut m = OperatorMatrix {
        nb,
        mat: Dense::zeros(16 * nb, 16 * nb),
    };
    add_identity_spin_block(&mut m, 0, 0, &sp.s, &real(1.0));
    add_identity_spin_block(&mut m, 1, 1, &sp.p2, &pf.ls_metric);
    add_identity_spin_block(&mut m, 2, 2, &sp.p2, &pf.sl_metric);
    add_identity_spin_block(&mut m, 3, 3, &sp.p4, &pf.ss_metric);
    finalize(m)
}

/// The bare Hamiltonian: the balanced matrix with the interaction blocks
/// removed but the rest-energy shifts kept.
pub fn assemble_bare(sys: &TwoBodySystem, basis: &BasisSet) -> Result<OperatorMatrix> {
    let nb = basis.len();
    let pf = prefactors(sys);
    let sp = spatial_blocks(basis);
    let mut m = OperatorMatrix {
        nb,
        mat: Dense::zeros(16 * nb, 16 * nb),
    };
    bare_blocks(&mut |ci, cj, which, factor| {
        let spat = match which {
            SpatKind::P2 => &sp.p2,
            SpatKind::P4 => &sp.p4,
        };
        add_identity_spin_block(&mut m, ci, cj, spat, &factor);
    }, &pf, sys);
    finalize(m)
}

enum SpatKind {
    P2,
    P4,
}

fn bare_blocks(add: &mut dyn FnMut(usize, usize, SpatKind, Real), pf: &Prefactors, sys: &TwoBodySystem) {
    let half_m2 = (real(2.0) * pf.m2.clone()).recip();
    let half_m1 = (real(2.0) * pf.m1.clone()).recip();
    let m12 = pf.m1.clone() + &pf.m2;
    let p4_ls = (real(8.0) * pf.c2.clone() * pf.m1.clone() * pf.m2.clone().square()).recip();
    let p4_sl = (real(8.0) * pf.c2.clone() * pf.m1.clone().square() * pf.m2.clone()).recip();
    let mut p4_ss = m12;
    p4_ss /= real(8.0);
    p4_ss /= &pf.c2;
    p4_ss /= pf.m1.clone().square();
    p4_ss /= pf.m2.clone().square();
    let _ = sys;
    // diagonal: D1 has no bare part; D2, D3 carry -p^2/2m; D4 carries the
    // shifted -m12 p^4 term
    add(1, 1, SpatKind::P2, -half_m2.clone());
    add(2, 2, SpatKind::P2, -half_m1.clone());
    add(3, 3, SpatKind::P4, -p4_ss);
    // off-diagonal kinetic couplings
    add(0, 1, SpatKind::P2, half_m2.clone());
    add(1, 0, SpatKind::P2, half_m2);
    add(0, 2, SpatKind::P2, half_m1.clone());
    add(2, 0, SpatKind::P2, half_m1);
    add(1, 3, SpatKind::P4, p4_ls.clone());
    add(3, 1, SpatKind::P4, p4_ls);
    add(2, 3, SpatKind::P4, p4_sl.clone());
    add(3, 2, SpatKind::P4, p4_sl);
}

/// The Coulomb interaction blocks of the balanced Hamiltonian: `q1q2/r` on
/// ll, `(s.p) V (s.p)` contractions on ls/sl, and the doubly contracted ss
/// block.
pub fn assemble_coulomb(sys: &TwoBodySystem, basis: &BasisSet) -> Result<OperatorMatrix> {
    let nb = basis.len();
    let pf = prefactors(sys);
    let q = sys.q1q2().clone();
    let mut m = OperatorMatrix {
        nb,
        mat: Dense::zeros(16 * nb, 16 * nb),
    };
    let cmat = Dense::from_fn(nb, nb, |i, j| coulomb(&basis.pair(i, j)));
    add_identity_spin_block(&mut m, 0, 0, &cmat, &q);
    // sigma.p V sigma.p reduces to 3 * scalar * identity in spin space
    let wmat = Dense::from_fn(nb, nb, |i, j| grad_coulomb_grad(&basis.pair(i, j)).scalar);
    let mut f_ls = real(crate::spin::SAME_PARTICLE_TRACE);
    f_ls *= &q;
    f_ls *= &pf.ls_metric;
    add_identity_spin_block(&mut m, 1, 1, &wmat, &f_ls);
    let mut f_sl = real(crate::spin::SAME_PARTICLE_TRACE);
    f_sl *= &q;
    f_sl *= &pf.sl_metric;
    add_identity_spin_block(&mut m, 2, 2, &wmat, &f_sl);
    // ss block: full two-spin contraction of the rank-4 tensor
    for i in 0..nb {
        for j in 0..nb {
            let mut block = coulomb_d4_spin_block(&basis.pair(i, j), &q)?;
            for row in block.iter_mut() {
                for v in row.iter_mut() {
                    *v *= &pf.ss_metric;
                }
            }
            add_spin_block(&mut m, 3, 3, i, j, &block);
        }
    }
    finalize(m)
}

/// The Breit interaction on the anti-diagonal component blocks.
pub fn assemble_breit(sys: &TwoBodySystem, basis: &BasisSet) -> Result<OperatorMatrix> {
    let nb = basis.len();
    let params = BreitParams {
        m1: sys.m1().clone(),
        m2: sys.m2().clone(),
        c: sys.c(),
        q1q2: sys.q1q2().clone(),
    };
    let mut m = OperatorMatrix {
        nb,
        mat: Dense::zeros(16 * nb, 16 * nb),
    };
    for i in 0..nb {
        for j in 0..nb {
            let p = basis.pair(i, j);
            let b1 = breit_block(BreitBlockKind::B1, &p, &params)?;
            let b2 = breit_block(BreitBlockKind::B2, &p, &params)?;
            let b3 = breit_block(BreitBlockKind::B3, &p, &params)?;
            let b4 = breit_block(BreitBlockKind::B4, &p, &params)?;
            add_spin_block(&mut m, 0, 3, i, j, &b1);
            add_spin_block(&mut m, 1, 2, i, j, &b2);
            add_spin_block(&mut m, 2, 1, i, j, &b3);
            add_spin_block(&mut m, 3, 0, i, j, &b4);
        }
    }
    finalize(m)
}

// ---------------------------------------------------------------------------
// Reduced (spin-factorized) bare problem. The bare Hamiltonian and metric
// carry the spin identity in every block, so the 16 n_b pencil is four
// identical copies of a 4 n_b component-spatial pencil; the projector is
// built there and expanded over the spin channels.
// ---------------------------------------------------------------------------

/// Reduced metric over the component-spatial basis (dim 4 n_b).
pub(crate) fn assemble_metric_reduced(sys: &TwoBodySystem, basis: &BasisSet) -> SymMatrix {
    let nb = basis.len();
    let pf = prefactors(sys);
    let sp = spatial_blocks(basis);
    SymMatrix::from_fn(4 * nb, |r, c| {
        let (a, i) = (r / nb, r % nb);
        let (b, j) = (c / nb, c % nb);
        if a != b {
            return real(0.0);
        }
        match a {
            0 => sp.s.at(i, j).clone(),
            1 => sp.p2.at(i, j).clone() * &pf.ls_metric,
            2 => sp.p2.at(i, j).clone() * &pf.sl_metric,
            _ => sp.p4.at(i, j).clone() * &pf.ss_metric,
        }
    })
}

/// Reduced bare Hamiltonian over the component-spatial basis (dim 4 n_b).
pub(crate) fn assemble_bare_reduced(sys: &TwoBodySystem, basis: &BasisSet) -> SymMatrix {
    let nb = basis.len();
    let pf = prefactors(sys);
    let sp = spatial_blocks(basis);
    let mut blocks: Vec<(usize, usize, SpatKind, Real)> = Vec::new();
    bare_blocks(
        &mut |ci, cj, which, factor| blocks.push((ci, cj, which, factor)),
        &pf,
        sys,
    );
    SymMatrix::from_fn(4 * nb, |r, c| {
        let (a, i) = (r / nb, r % nb);
        let (b, j) = (c / nb, c % nb);
        let mut acc = real(0.0);
        for (ci, cj, which, factor) in &blocks {
            if *ci == a && *cj == b {
                let spat = match which {
                    SpatKind::P2 => sp.p2.at(i, j),
                    SpatKind::P4 => sp.p4.at(i, j),
                };
                acc += spat * factor;
            }
        }
        acc
    })
}
