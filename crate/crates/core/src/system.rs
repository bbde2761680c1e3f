//! Physical definitions: the two-particle system, the Gaussian basis, and
//! the nonlinear exponent optimizer driven by the nonrelativistic ground
//! state.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::integrals::{coulomb, laplacian, overlap, ExponentPair};
use crate::linalg::{geneig_lowest, geneig_sym, SymMatrix};
use crate::precision::{precision_digits, real, real_str, to_full_string};
use crate::Real;

/// CODATA value of the inverse fine-structure constant used by default.
pub const ALPHA_INVERSE_DEFAULT: &str = "137.035999084";

/// Two spin-1/2 particles in hartree atomic units; the speed of light is
/// `c = alpha^-1` and the reduced mass follows from the masses.
#[derive(Clone, Debug)]
pub struct TwoBodySystem {
    m1: Real,
    m2: Real,
    q1q2: Real,
    alpha_inv: Real,
}

impl TwoBodySystem {
    pub fn new(m1: Real, m2: Real, q1q2: Real, alpha_inv: Real) -> Result<Self> {
        if m1 <= 0 || m2 <= 0 {
            return Err(Error::Invalid("masses must be positive".into()));
        }
        if alpha_inv <= 0 {
            return Err(Error::Invalid("alpha_inverse must be positive".into()));
        }
        Ok(TwoBodySystem {
            m1,
            m2,
            q1q2,
            alpha_inv,
        })
    }

    pub fn preset(which: SystemPreset) -> Self {
        let one = real(1.0);
        let alpha_inv = real_str(ALPHA_INVERSE_DEFAULT).unwrap();
        let (m1, m2) = match which {
            SystemPreset::Ps => (one.clone(), one.clone()),
            SystemPreset::Mu => (one.clone(), real_str("206.7682830").unwrap()),
            SystemPreset::H => (one.clone(), real_str("1836.15267343").unwrap()),
            SystemPreset::MuH => (
                real_str("206.7682830").unwrap(),
                real_str("1836.15267343").unwrap(),
            ),
            SystemPreset::H10 => (one.clone(), real_str("18361.5267343").unwrap()),
        };
        TwoBodySystem {
            m1,
            m2,
            q1q2: -one,
            alpha_inv,
        }
    }

    pub fn m1(&self) -> &Real {
        &self.m1
    }

    pub fn m2(&self) -> &Real {
        &self.m2
    }

    pub fn q1q2(&self) -> &Real {
        &self.q1q2
    }

    pub fn alpha_inv(&self) -> &Real {
        &self.alpha_inv
    }

    /// Speed of light in hartree units.
    pub fn c(&self) -> Real {
        self.alpha_inv.clone()
    }

    pub fn alpha(&self) -> Real {
        self.alpha_inv.clone().recip()
    }

    /// Reduced mass m1 m2 / (m1 + m2).
    pub fn mu(&self) -> Real {
        let mut v = self.m1.clone();
        v *= &self.m2;
        v / (self.m1.clone() + &self.m2)
    }

    pub fn m_min(&self) -> Real {
        if self.m1 <= self.m2 {
            self.m1.clone()
        } else {
            self.m2.clone()
        }
    }

    pub fn with_alpha_inv(&self, alpha_inv: Real) -> Self {
        TwoBodySystem {
            alpha_inv,
            ..self.clone()
        }
    }

    pub fn with_masses_swapped(&self) -> Self {
        TwoBodySystem {
            m1: self.m2.clone(),
            m2: self.m1.clone(),
            q1q2: self.q1q2.clone(),
            alpha_inv: self.alpha_inv.clone(),
        }
    }
}

/// Named mass-ratio presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemPreset {
    /// equal masses
    Ps,
    /// m2/m1 = 206.7682830
    Mu,
    /// m2/m1 = 1836.15267343
    H,
    /// m1 = 206.7682830, m2 = 1836.15267343 (ratio 8.88024337)
    MuH,
    /// m2/m1 = 18361.5267343
    H10,
}

impl SystemPreset {
    pub fn name(self) -> &'static str {
        match self {
            SystemPreset::Ps => "ps",
            SystemPreset::Mu => "mu",
            SystemPreset::H => "h",
            SystemPreset::MuH => "muh",
            SystemPreset::H10 => "h10",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ps" => Some(SystemPreset::Ps),
            "mu" => Some(SystemPreset::Mu),
            "h" => Some(SystemPreset::H),
            "muh" => Some(SystemPreset::MuH),
            "h10" => Some(SystemPreset::H10),
            _ => None,
        }
    }

    pub fn all() -> [SystemPreset; 5] {
        [
            SystemPreset::Ps,
            SystemPreset::Mu,
            SystemPreset::H,
            SystemPreset::MuH,
            SystemPreset::H10,
        ]
    }
}

/// relative separation floor between neighbouring exponents
const SEPARATION_GUARD: f64 = 1e-8;

/// Ordered list of positive Gaussian exponents (bohr^-2).
#[derive(Clone, Debug)]
pub struct BasisSet {
    exponents: Vec<Real>,
}

impl BasisSet {
    pub fn new(mut exponents: Vec<Real>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Invalid("empty basis".into()));
        }
        for z in &exponents {
            if *z <= 0 {
                return Err(Error::NonPositiveExponent(z.to_string()));
            }
        }
        exponents.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let guard = real(SEPARATION_GUARD);
        for i in 1..exponents.len() {
            let mut gap = exponents[i].clone();
            gap -= &exponents[i - 1];
            gap /= &exponents[i];
            if gap < guard {
                return Err(Error::ExponentsTooClose { i: i - 1, j: i });
            }
        }
        Ok(BasisSet { exponents })
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Real] {
        &self.exponents
    }

    pub fn pair(&self, mu: usize, nu: usize) -> ExponentPair {
        ExponentPair {
            zmu: self.exponents[mu].clone(),
            znu: self.exponents[nu].clone(),
        }
    }

    /// New basis with one exponent appended (re-validated).
    pub fn with_appended(&self, zeta: Real) -> Result<Self> {
        let mut e = self.exponents.clone();
        e.push(zeta);
        BasisSet::new(e)
    }
}

/// Ground-state solution of the nonrelativistic two-body problem in the
/// given basis: kinetic `p^2 / (2 mu)` plus `q1q2 / r` against the overlap.
pub fn solve_nonrelativistic(sys: &TwoBodySystem, basis: &BasisSet) -> Result<(Real, Vec<Real>)> {
    let (h, s) = nonrel_pencil(sys, basis.exponents());
    let dec = geneig_sym(&h, &s)?;
    Ok((dec.values[0].clone(), dec.vectors.column(0)))
}

fn nonrel_pencil(sys: &TwoBodySystem, exps: &[Real]) -> (SymMatrix, SymMatrix) {
    let n = exps.len();
    let two_mu = real(2.0) * sys.mu();
    let h = SymMatrix::from_fn(n, |i, j| {
        let p = ExponentPair {
            zmu: exps[i].clone(),
            znu: exps[j].clone(),
        };
        let mut t = -laplacian(&p);
        t /= &two_mu;
        t += sys.q1q2() * &coulomb(&p);
        t
    });
    let s = SymMatrix::from_fn(n, |i, j| {
        overlap(&ExponentPair {
            zmu: exps[i].clone(),
            znu: exps[j].clone(),
        })
    });
    (h, s)
}


/// Outcome of an exponent optimization run.
#[derive(Clone, Debug)]
pub struct OptimizedBasis {
    pub basis: BasisSet,
    pub energy: Real,
    pub cycles: usize,
    pub evaluations: usize,
    /// The cycle improvement dropped below the target while the line-search
    /// steps were still large; the result may sit short of the minimum.
    pub stalled: bool,
}

const GOLD: f64 = 0.618_033_988_749_894_9;
const MAX_CYCLES: usize = 2000;
const GUARD_T: f64 = 2.1e-8; // log-space image of the separation guard

/// Fast objective for the optimizer: the pencil entries need only products
/// of per-exponent powers, one square root, and divisions, avoiding general
/// `pow` calls in the inner loop.
struct LineSearch {
    q: Real,
    inv_two_mu: Real,
    sqrt8: Real,
    coul_pref: Real,
    evals: usize,
}

impl LineSearch {
    fn new(sys: &TwoBodySystem) -> Self {
        LineSearch {
            q: sys.q1q2().clone(),
            inv_two_mu: (real(2.0) * sys.mu()).recip(),
            sqrt8: real(8.0).sqrt(),
            coul_pref: (real(32.0) / crate::precision::pi()).sqrt(),
            evals: 0,
        }
    }

    fn energy(&mut self, t: &[Real]) -> Real {
        self.evals += 1;
        let n = t.len();
        let exps: Vec<Real> = t.iter().map(|x| x.clone().exp()).collect();
        let p34: Vec<Real> = exps
            .iter()
            .map(|z| {
                use rug::ops::Pow;
                z.clone().pow(&real(0.75))
            })
            .collect();
        let mut h = SymMatrix::zeros(n);
        let mut s = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut zs = exps[i].clone();
                zs += &exps[j];
                let sq = zs.clone().sqrt();
                let pp = p34[i].clone() * &p34[j];
                // overlap = sqrt(8) p_i p_j / zs^{3/2}
                let mut ov = self.sqrt8.clone();
                ov *= &pp;
                ov /= zs.clone() * &sq;
                // kinetic/(2mu) = 6 z_i z_j / zs * overlap / (2 mu)
                let mut kin = real(6.0);
                kin *= &exps[i];
                kin *= &exps[j];
                kin /= &zs;
                kin *= &ov;
                kin *= &self.inv_two_mu;
                // coulomb = sqrt(32/pi) p_i p_j / zs
                let mut co = self.coul_pref.clone();
                co *= &pp;
                co /= &zs;
                co *= &self.q;
                kin += co;
                h.set(i, j, kin);
                s.set(i, j, ov);
            }
        }
        match geneig_lowest(&h, &s) {
            Ok(e) => e,
            // treat numerically degenerate trial points as uphill
            Err(_) => real(f64::MAX),
        }
    }
}

/// Chebyshev profile directions over the exponent ladder; the first two are
/// the uniform scale and the linear tilt.
fn chebyshev_directions(n_b: usize, count: usize) -> Vec<Vec<Real>> {
    let mut dirs = Vec::new();
    for k in 0..count.min(n_b) {
        let dir: Vec<Real> = (0..n_b)
            .map(|i| {
                let x = if n_b > 1 {
                    2.0 * i as f64 / (n_b as f64 - 1.0) - 1.0
                } else {
                    0.0
                };
                real((k as f64 * x.clamp(-1.0, 1.0).acos()).cos())
            })
            .collect();
        dirs.push(dir);
    }
    dirs
}

fn golden_section(
    f: &mut dyn FnMut(&Real) -> Real,
    mut a: Real,
    mut b: Real,
    tol: &Real,
) -> (Real, Real) {
    let gold = real(GOLD);
    let mut x1 = b.clone() - gold.clone() * (b.clone() - &a);
    let mut x2 = a.clone() + gold.clone() * (b.clone() - &a);
    let mut f1 = f(&x1);
    let mut f2 = f(&x2);
    loop {
        let mut width = b.clone();
        width -= &a;
        if width <= *tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1.clone();
            f2 = f1.clone();
            x1 = b.clone() - gold.clone() * (b.clone() - &a);
            f1 = f(&x1);
        } else {
            a = x1;
            x1 = x2.clone();
            f1 = f2.clone();
            x2 = a.clone() + gold.clone() * (b.clone() - &a);
            f2 = f(&x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bracketing line minimizer around `x0` with initial width `w`, bounded to
/// `[lo, hi]`. Returns (x, f(x), suggested next width).
fn line_min(
    f: &mut dyn FnMut(&Real) -> Real,
    x0: &Real,
    f0: &Real,
    w: &Real,
    tol: &Real,
    lo: &Real,
    hi: &Real,
) -> (Real, Real, Real) {
    let clamp = |x: Real| -> Real {
        if x < *lo {
            lo.clone()
        } else if x > *hi {
            hi.clone()
        } else {
            x
        }
    };
    let xp = clamp(x0.clone() + w);
    let xm = clamp(x0.clone() - w);
    let fp = f(&xp);
    let fm = f(&xm);
    if *f0 <= fp && *f0 <= fm {
        let (x, fx) = golden_section(f, xm, xp, tol);
        let half = w.clone() / real(2.0);
        if fx < *f0 {
            (x, fx, half)
        } else {
            (x0.clone(), f0.clone(), half)
        }
    } else {
        // expand in the descending direction until the value rises again
        let ascending = fp < fm;
        let (mut x_best, mut f_best) = if ascending { (xp, fp) } else { (xm, fm) };
        let mut x_prev = x0.clone();
        let mut step = w.clone();
        let mut x_beyond: Option<Real> = None;
        loop {
            step *= real(2.0);
            let mut xn = x_best.clone();
            if ascending {
                xn += &step;
            } else {
                xn -= &step;
            }
            let xn = clamp(xn);
            if xn == x_best {
                break; // pinned at a bound
            }
            let fx = f(&xn);
            if fx >= f_best {
                x_beyond = Some(xn);
                break;
            }
            x_prev = x_best;
            x_best = xn;
            f_best = fx;
        }
        let far = x_beyond.unwrap_or_else(|| x_best.clone());
        let (lo_b, hi_b) = if ascending {
            (x_prev, far)
        } else {
            (far, x_prev)
        };
        let (x, fx) = golden_section(f, lo_b, hi_b, tol);
        if fx < f_best {
            (x, fx, step)
        } else {
            (x_best, f_best, step)
        }
    }
}

/// Optimize `n_b` Gaussian exponents by minimizing the nonrelativistic
/// ground-state energy: an even-tempered grid seed, then cyclic golden-section
/// line searches on `ln zeta` with collective scale/tilt moves and a pattern
/// move per cycle, until a full cycle improves the energy by less than
/// `target` (hartree).
pub fn optimize_exponents(sys: &TwoBodySystem, n_b: usize, target: &Real) -> Result<OptimizedBasis> {
    if n_b == 0 {
        return Err(Error::Invalid("n_b must be at least 1".into()));
    }
    if *target <= 0 {
        return Err(Error::Invalid("target must be positive".into()));
    }
    let mut ls = LineSearch::new(sys);
    let mu = sys.mu();
    let mu2 = mu.clone().square();

    // even-tempered seed scan: zeta_i = a b^i, a in mu^2 * [1e-5, 2], b in [1.15, 6]
    let mut best_t: Option<(Real, Vec<Real>)> = None;
    let na = 26;
    let nbq = 26;
    for ia in 0..na {
        let la = -5.0 * std::f64::consts::LN_10
            + (ia as f64) / (na as f64 - 1.0) * (2f64.ln() + 5.0 * std::f64::consts::LN_10);
        for ib in 0..nbq {
            let lb = (1.15f64.ln())
                + (ib as f64) / (nbq as f64 - 1.0) * (6f64.ln() - 1.15f64.ln());
            let t: Vec<Real> = (0..n_b)
                .map(|i| {
                    let mut v = real(la + lb * i as f64);
                    v += mu2.clone().ln();
                    v
                })
                .collect();
            let e = ls.energy(&t);
            if best_t.as_ref().map_or(true, |(eb, _)| e < *eb) {
                best_t = Some((e, t));
            }
        }
    }
    let (mut energy, mut t) = best_t.unwrap();

    let guard = real(GUARD_T);
    let wide = real(30.0);
    let cheb = chebyshev_directions(n_b, 5);
    let line_scan = |ls: &mut LineSearch,
                     t: &[Real],
                     dir: &[Real],
                     energy: &Real,
                     tol: &Real|
     -> Option<(Real, Real)> {
        let f0 = energy.clone();
        let mut eval = |lambda: &Real| -> Real {
            let trial: Vec<Real> = (0..n_b)
                .map(|i| {
                    let mut v = dir[i].clone();
                    v *= lambda;
                    v += &t[i];
                    v
                })
                .collect();
            for w in trial.windows(2) {
                let mut gap = w[1].clone();
                gap -= &w[0];
                if gap < real(GUARD_T) {
                    return real(f64::MAX);
                }
            }
            ls.energy(&trial)
        };
        let (lam, fx, _) = line_min(
            &mut eval,
            &real(0.0),
            &f0,
            &real(0.25),
            tol,
            &real(-8.0),
            &real(8.0),
        );
        if fx < *energy {
            Some((lam, fx))
        } else {
            None
        }
    };

    // collective family phase: relax the ladder profile along low-order
    // Chebyshev directions before touching individual exponents
    if n_b > 4 {
        let floor = target.clone().max(&real(1e-11));
        for _ in 0..80 {
            let e_start = energy.clone();
            for dir in &cheb {
                if let Some((lam, fx)) = line_scan(&mut ls, &t, dir, &energy, &real(1e-6)) {
                    for i in 0..n_b {
                        let mut v = dir[i].clone();
                        v *= &lam;
                        t[i] += v;
                    }
                    energy = fx;
                }
            }
            let mut improvement = e_start;
            improvement -= &energy;
            if improvement < floor {
                break;
            }
        }
    }

    let mut widths: Vec<Real> = (0..n_b).map(|_| real(0.1)).collect();
    let mut cycles = 0usize;
    let mut stalled = false;
    let target_wide = {
        let mut v = target.clone();
        v *= real(1e6);
        v
    };
    let target_mid = {
        let mut v = target.clone();
        v *= real(1e3);
        v
    };
    let mut last_improvement = real(1.0);
    while cycles < MAX_CYCLES {
        cycles += 1;
        let e_start = energy.clone();
        let t_start = t.clone();
        let tol = if last_improvement > target_wide {
            real(1e-3)
        } else if last_improvement > target_mid {
            real(1e-5)
        } else {
            real(3e-7)
        };
        let mut max_step = real(0.0);
        // per-coordinate line searches, neighbour-bounded to keep ordering
        for i in 0..n_b {
            let lo = if i == 0 {
                t[0].clone() - &wide
            } else {
                t[i - 1].clone() + &guard
            };
            let hi = if i + 1 == n_b {
                t[n_b - 1].clone() + &wide
            } else {
                t[i + 1].clone() - &guard
            };
            if lo >= hi {
                continue;
            }
            let ti = t[i].clone();
            let fi = energy.clone();
            let mut eval = |x: &Real| -> Real {
                let mut trial = t.clone();
                trial[i] = x.clone();
                ls.energy(&trial)
            };
            let (x, fx, wnext) = line_min(&mut eval, &ti, &fi, &widths[i], &tol, &lo, &hi);
            if fx < energy {
                let step = (x.clone() - &ti).abs();
                if step > max_step {
                    max_step = step;
                }
                t[i] = x;
                energy = fx;
            }
            widths[i] = wnext.max(&real(1e-7)).min(&real(2.0));
        }
        // collective moves: Chebyshev ladder profiles plus the cycle
        // displacement (pattern move)
        let pattern: Vec<Real> = (0..n_b).map(|i| t[i].clone() - &t_start[i]).collect();
        for dir in cheb.iter().chain(std::iter::once(&pattern)) {
            let mut norm = real(0.0);
            for d in dir.iter() {
                norm += d * d;
            }
            if norm.is_zero() {
                continue;
            }
            if let Some((lam, fx)) = line_scan(&mut ls, &t, dir, &energy, &tol) {
                for i in 0..n_b {
                    let mut v = dir[i].clone();
                    v *= &lam;
                    t[i] += v;
                }
                energy = fx;
            }
        }
        let mut improvement = e_start;
        improvement -= &energy;
        if improvement < *target {
            stalled = max_step > real(1e-2);
            break;
        }
        last_improvement = improvement;
    }
    let exponents: Vec<Real> = t.iter().map(|x| x.clone().exp()).collect();
    let basis = BasisSet::new(exponents)?;
    Ok(OptimizedBasis {
        basis,
        energy,
        cycles,
        evaluations: ls.evals,
        stalled,
    })
}


const EXPONENT_FILE_MAGIC: &str = "# nopair-qed exponents v1";

/// Write a basis to the plain-text exponent format:
/// `# nopair-qed exponents v1 system=<name> nb=<N> precision=<digits>`
/// followed by one full-precision decimal exponent per line.
pub fn save_exponents(basis: &BasisSet, system_name: &str, path: &Path) -> Result<()> {
    let mut out = format!(
        "{EXPONENT_FILE_MAGIC} system={system_name} nb={} precision={}\n",
        basis.len(),
        precision_digits()
    );
    for z in basis.exponents() {
        out.push_str(&to_full_string(z));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a basis back from the exponent file format.
pub fn load_exponents(path: &Path) -> Result<BasisSet> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    if !header.starts_with(EXPONENT_FILE_MAGIC) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("bad header: {header:?}"),
        });
    }
    let mut nb: Option<usize> = None;
    for field in header.split_whitespace() {
        if let Some(v) = field.strip_prefix("nb=") {
            nb = v.parse().ok();
        }
    }
    let nb = nb.ok_or(Error::Parse {
        line: 1,
        msg: "missing nb= field".into(),
    })?;
    let mut exps = Vec::with_capacity(nb);
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v = real_str(line).map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("not a number: {line:?}"),
        })?;
        if v <= 0 {
            return Err(Error::NonPositiveExponent(line.to_string()));
        }
        exps.push(v);
    }
    if exps.len() != nb {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header says nb={nb} but found {} exponents", exps.len()),
        });
    }
    BasisSet::new(exps)
}
