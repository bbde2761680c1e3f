//! Scan of the no-pair energies over the fine-structure constant and the
//! least-squares extraction of the expansion coefficients
//! `F(alpha) = e0 + a^2 e2 + a^3 e3 + a^4 ln(a) e4' + a^4 e4`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Dense};
use crate::nopair::{solve_projected_fast, Model};
use crate::perturbation::shifts_from_parts;
use crate::precision::real;
use crate::system::{BasisSet, TwoBodySystem};
use crate::Real;

/// Which energy is scanned: variational DC, first- or second-order
/// perturbative Breit on DC, or variational DCB.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanModel {
    Dc,
    DcPt1,
    DcPt2,
    Dcb,
}

impl ScanModel {
    pub fn label(self) -> &'static str {
        match self {
            ScanModel::Dc => "DC",
            ScanModel::DcPt1 => "DC<B>",
            ScanModel::DcPt2 => "DCB2",
            ScanModel::Dcb => "DCB",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dc" => Some(ScanModel::Dc),
            "dc<b>" | "pt1" | "dc-pt1" => Some(ScanModel::DcPt1),
            "dcb2" | "pt2" | "dc-pt2" => Some(ScanModel::DcPt2),
            "dcb" => Some(ScanModel::Dcb),
            _ => None,
        }
    }
}

/// One converged scan point.
#[derive(Clone, Debug)]
pub struct ScanPoint {
    /// integer offset n of `alpha^-1 = alpha_0^-1 + n`
    pub offset: i64,
    pub alpha_inv: Real,
    pub energy: Real,
}

/// Energies of one model over a grid of inverse coupling constants.
#[derive(Clone, Debug)]
pub struct AlphaScan {
    pub model: ScanModel,
    pub points: Vec<ScanPoint>,
}

/// Ground-state energy of `model` for the given system, on the fast
/// eigensolver path (spectra only where the model needs them).
pub fn scan_energy(sys: &TwoBodySystem, basis: &BasisSet, model: ScanModel) -> Result<Real> {
    match model {
        ScanModel::Dc => Ok(solve_projected_fast(sys, basis, Model::Dc, false)?
            .values
            .swap_remove(0)),
        ScanModel::Dcb => Ok(solve_projected_fast(sys, basis, Model::Dcb, false)?
            .values
            .swap_remove(0)),
        ScanModel::DcPt1 | ScanModel::DcPt2 => {
            let spec = solve_projected_fast(sys, basis, Model::Dc, true)?;
            let b = crate::hamiltonian::assemble_breit(sys, basis)?;
            let btilde = spec.projector.project(&b.mat);
            let (pt1, pt2) = shifts_from_parts(&spec.values, &spec.vectors, &btilde, 0)?;
            let mut e = spec.values[0].clone();
            e += pt1;
            if model == ScanModel::DcPt2 {
                e += pt2;
            }
            Ok(e)
        }
    }
}

/// Run the alpha scan `alpha^-1 = alpha_0^-1 + n` for `n` from `n_from` to
/// `n_to` inclusive with the given stride. Points are computed in parallel
/// and returned in grid order.
pub fn run_scan(
    sys: &TwoBodySystem,
    basis: &BasisSet,
    model: ScanModel,
    n_from: i64,
    n_to: i64,
    step: i64,
) -> Result<AlphaScan> {
    if step <= 0 {
        return Err(Error::Invalid("scan step must be positive".into()));
    }
    if n_to < n_from {
        return Err(Error::Invalid("empty scan range".into()));
    }
    let offsets: Vec<i64> = (n_from..=n_to).step_by(step as usize).collect();
    for &n in &offsets {
        let a = sys.alpha_inv().clone() + real(n as f64);
        if a <= 0 {
            return Err(Error::Invalid(format!(
                "alpha_inverse + {n} is not positive"
            )));
        }
    }
    let points: Result<Vec<ScanPoint>> = offsets
        .par_iter()
        .map(|&n| {
            let alpha_inv = sys.alpha_inv().clone() + real(n as f64);
            let local = sys.with_alpha_inv(alpha_inv.clone());
            match scan_energy(&local, basis, model) {
                Ok(energy) => Ok(ScanPoint {
                    offset: n,
                    alpha_inv,
                    energy,
                }),
                Err(e) => Err(Error::ScanPoint {
                    offset: n,
                    source: Box::new(e),
                }),
            }
        })
        .collect();
    Ok(AlphaScan {
        model,
        points: points?,
    })
}

/// Coefficients of the fitted expansion with residual diagnostics.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub eps0: Real,
    pub eps2: Real,
    pub eps3: Real,
    /// coefficient of `alpha^4 ln(alpha)`; absent when the log column is
    /// excluded
    pub eps4log: Option<Real>,
    pub eps4: Real,
    pub rms_residual: Real,
    pub points_used: usize,
}

/// Ordinary least squares of the scan energies on
/// `[1, a^2, a^3, (a^4 ln a), a^4]`.
pub fn fit(scan: &AlphaScan, include_log: bool) -> Result<FitResult> {
    fit_extended(scan, include_log, false)
}

/// Fit with optional fifth-order columns `a^5` and `a^5 ln a`; their
/// coefficients are diagnostics and are not reported.
pub fn fit_extended(scan: &AlphaScan, include_log: bool, include_alpha5: bool) -> Result<FitResult> {
    let n = scan.points.len();
    let mut k = 4;
    if include_log {
        k += 1;
    }
    if include_alpha5 {
        k += 2;
    }
    if n < k {
        return Err(Error::Invalid(format!(
            "need at least {k} scan points, got {n}"
        )));
    }
    let mut rows: Vec<Vec<Real>> = Vec::with_capacity(n);
    for p in &scan.points {
        let alpha = p.alpha_inv.clone().recip();
        let a2 = alpha.clone().square();
        let a3 = a2.clone() * &alpha;
        let a4 = a2.clone().square();
        let mut row = vec![real(1.0), a2, a3];
        if include_log {
            row.push(a4.clone() * alpha.clone().ln());
        }
        row.push(a4.clone());
        if include_alpha5 {
            let a5 = a4 * &alpha;
            row.push(a5.clone());
            row.push(a5 * alpha.clone().ln());
        }
        rows.push(row);
    }
    let design = Dense::from_fn(n, k, |i, j| rows[i][j].clone());
    let rhs: Vec<Real> = scan.points.iter().map(|p| p.energy.clone()).collect();
    let (coef, rms) = least_squares(&design, &rhs)?;
    let mut it = coef.into_iter();
    let eps0 = it.next().unwrap();
    let eps2 = it.next().unwrap();
    let eps3 = it.next().unwrap();
    let eps4log = if include_log { Some(it.next().unwrap()) } else { None };
    let eps4 = it.next().unwrap();
    Ok(FitResult {
        eps0,
        eps2,
        eps3,
        eps4log,
        eps4,
        rms_residual: rms,
        points_used: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::real_str;
    use rug::ops::Pow;

    fn synthetic_scan(include_log_term: bool) -> AlphaScan {
        // energies generated from exact coefficients
        let e0 = real_str("-0.25").unwrap();
        let e2 = real_str("0.046875").unwrap();
        let e3 = real_str("-0.1288").unwrap();
        let e4l = real_str("-0.0634").unwrap();
        let e4 = real_str("0.0838").unwrap();
        let a0 = real_str("137.035999084").unwrap();
        let mut points = Vec::new();
        for n in (-50..=50).step_by(5) {
            let alpha_inv = a0.clone() + real(n as f64);
            let a = alpha_inv.clone().recip();
            let mut e = e0.clone();
            e += a.clone().square() * &e2;
            e += a.clone().pow(3) * &e3;
            if include_log_term {
                e += a.clone().pow(4) * a.clone().ln() * &e4l;
            }
            e += a.clone().pow(4) * &e4;
            points.push(ScanPoint {
                offset: n,
                alpha_inv,
                energy: e,
            });
        }
        AlphaScan {
            model: ScanModel::Dc,
            points,
        }
    }

    #[test]
    fn synthetic_coefficients_recovered() {
        let scan = synthetic_scan(true);
        let fitres = fit(&scan, true).unwrap();
        let rel = |x: &Real, s: &str| -> Real {
            let t = real_str(s).unwrap();
            ((x.clone() - &t) / t).abs()
        };
        let tol = real_str("1e-18").unwrap();
        assert!(rel(&fitres.eps0, "-0.25") < tol);
        assert!(rel(&fitres.eps2, "0.046875") < tol);
        assert!(rel(&fitres.eps3, "-0.1288") < tol);
        assert!(rel(fitres.eps4log.as_ref().unwrap(), "-0.0634") < tol);
        assert!(rel(&fitres.eps4, "0.0838") < tol);
        assert!(fitres.rms_residual < real_str("1e-25").unwrap());
        assert_eq!(fitres.points_used, 21);
    }

    #[test]
    fn log_free_data_fits_without_log_column() {
        let scan = synthetic_scan(false);
        let fitres = fit(&scan, false).unwrap();
        assert!(fitres.eps4log.is_none());
        assert!(fitres.rms_residual < real_str("1e-25").unwrap());
    }

    #[test]
    fn degenerate_grid_is_rank_deficient() {
        let mut scan = synthetic_scan(true);
        let p0 = scan.points[0].clone();
        for p in scan.points.iter_mut() {
            *p = p0.clone();
        }
        assert!(matches!(
            fit(&scan, true),
            Err(crate::Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn too_few_points_rejected() {
        let mut scan = synthetic_scan(true);
        scan.points.truncate(4);
        assert!(fit(&scan, true).is_err());
    }
}
