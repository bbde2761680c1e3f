//! Extended-precision variational solver for the no-pair Dirac-Coulomb and
//! Dirac-Coulomb-Breit equations of two spin-1/2 particles in a spherically
//! symmetric Gaussian basis, with perturbative Breit corrections, a
//! fine-structure-constant scan/fit pipeline, and analytic nrQED reference
//! values for comparison.

pub mod error;
pub mod precision;

pub mod linalg;
pub mod quadrature;

pub mod integrals;
pub(crate) mod spin;

pub mod system;

pub mod hamiltonian;
pub mod nopair;
pub mod perturbation;

pub mod alphafit;
pub mod nrqed;

pub mod oracles;

pub use error::{Error, Result};
pub use precision::{precision_digits, real, real_str, set_precision_digits, Real};
