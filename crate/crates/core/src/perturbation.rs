//! First- and second-order perturbative Breit corrections on top of the
//! projected Dirac-Coulomb spectrum.

use crate::error::{Error, Result};
use crate::hamiltonian::assemble_breit;
use crate::linalg::Dense;
use crate::nopair::{Model, ProjectedSpectrum};
use crate::precision::real;
use crate::Real;

/// Breit corrections to one projected Dirac-Coulomb state.
#[derive(Clone, Debug)]
pub struct BreitCorrections {
    pub state: usize,
    pub e_dc: Real,
    /// first-order value: E_DC + <psi| balanced Breit |psi>
    pub e_pt1: Real,
    /// second-order value with the Rayleigh-Schroedinger sum
    pub e_pt2: Real,
}

const DEGENERACY_FLOOR: f64 = 1e-15;
const COUPLING_FLOOR: f64 = 1e-20;

/// Both perturbative corrections for state `n` of a DC spectrum (one Breit
/// assembly and projection shared between the two orders).
pub fn breit_corrections(spectrum: &ProjectedSpectrum, n: usize) -> Result<BreitCorrections> {
    if spectrum.model != Model::Dc {
        return Err(Error::Invalid(
            "perturbative Breit corrections require a DC spectrum".into(),
        ));
    }
    let count = spectrum.values.len();
    if n >= count {
        return Err(Error::IndexOutOfRange { index: n, count });
    }
    let proj = &spectrum.projector;
    let b = assemble_breit(proj.sys(), proj.basis())?;
    let btilde = proj.project(&b.mat);
    let (pt1_shift, pt2_shift) = shifts_from_parts(&spectrum.values, &spectrum.vectors, &btilde, n)?;
    let e_dc = spectrum.values[n].clone();
    let e_pt1 = e_dc.clone() + pt1_shift;
    let e_pt2 = e_pt1.clone() + pt2_shift;
    Ok(BreitCorrections {
        state: n,
        e_dc,
        e_pt1,
        e_pt2,
    })
}

/// First-order perturbative Breit energy of state `n`.
pub fn breit_pt1(spectrum: &ProjectedSpectrum, n: usize) -> Result<Real> {
    Ok(breit_corrections(spectrum, n)?.e_pt1)
}

/// Second-order perturbative Breit energy of state `n`.
pub fn breit_pt2(spectrum: &ProjectedSpectrum, n: usize) -> Result<Real> {
    Ok(breit_corrections(spectrum, n)?.e_pt2)
}

/// PT1 and PT2 shifts from eigenpairs and a projected perturbation matrix.
pub(crate) fn shifts_from_parts(
    values: &[Real],
    vectors: &Dense,
    btilde: &Dense,
    n: usize,
) -> Result<(Real, Real)> {
    let dim = values.len();
    let un = vectors.column(n);
    let bun = btilde.mul_vec(&un);
    let mut norm = real(0.0);
    for k in 0..dim {
        norm += &un[k] * &un[k];
    }
    let mut pt1 = real(0.0);
    for k in 0..dim {
        pt1 += &un[k] * &bun[k];
    }
    pt1 /= &norm;
    let b_scale = btilde.max_abs();
    let coupling_floor = b_scale * real(COUPLING_FLOOR);
    let mut pt2 = real(0.0);
    for i in 0..dim {
        if i == n {
            continue;
        }
        let mut coupling = real(0.0);
        for k in 0..dim {
            coupling += vectors.at(k, i) * &bun[k];
        }
        let mut denom = values[n].clone();
        denom -= &values[i];
        if denom.clone().abs() < real(DEGENERACY_FLOOR) {
            if coupling.clone().abs() > coupling_floor {
                return Err(Error::DegenerateDenominator { i, n });
            }
            continue;
        }
        let mut term = coupling.square();
        term /= denom;
        pt2 += term;
    }
    // the state is normalized once for both orders
    pt2 /= norm;
    Ok((pt1, pt2))
}
