//! Dense extended-precision linear algebra: Cholesky factorization, the
//! generalized symmetric eigenproblem, and linear least squares.
//!
//! The public eigensolver reduces `A v = lambda S v` to standard form with a
//! Cholesky factor and runs two-sided Jacobi sweeps, which stay accurate for
//! the moderate dimensions used here. A Householder tridiagonalization + QL
//! path (`geneig_sym_fast`) provides the same spectra for the inner loops of
//! the exponent optimizer and the alpha-scan driver, where full Jacobi would
//! dominate the runtime; the two paths are cross-checked in the test suite.

use std::mem;

use crate::error::{Error, Result};
use crate::precision::{eps, real};
use crate::Real;

/// Dense row-major matrix of extended-precision scalars.
#[derive(Clone, Debug)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<Real>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let data = (0..rows * cols).map(|_| real(0.0)).collect();
        Dense { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Dense::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = real(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Real) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Dense { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &Real {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Real {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Real) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Dense {
        Dense::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn max_abs(&self) -> Real {
        let mut m = real(0.0);
        for v in &self.data {
            let a = v.clone().abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn fro_norm(&self) -> Real {
        let mut s = real(0.0);
        for v in &self.data {
            s += v * v;
        }
        s.sqrt()
    }

    /// C = self * other
    pub fn mul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows);
        let mut c = Dense::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    *c.at_mut(i, j) += aik * other.at(k, j);
                }
            }
        }
        c
    }

    /// self * v for a column vector.
    pub fn mul_vec(&self, v: &[Real]) -> Vec<Real> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![real(0.0); self.rows];
        for i in 0..self.rows {
            let acc = &mut out[i];
            for k in 0..self.cols {
                *acc += self.at(i, k) * &v[k];
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Real> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }
}

/// Symmetric matrix stored as one (lower) triangle, which enforces exact
/// symmetry by construction.
#[derive(Clone, Debug)]
pub struct SymMatrix {
    n: usize,
    tri: Vec<Real>,
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        let tri = (0..n * (n + 1) / 2).map(|_| real(0.0)).collect();
        SymMatrix { n, tri }
    }

    /// Build from the lower triangle of a generator, `f(i, j)` with `j <= i`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Real) -> Self {
        let mut tri = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                tri.push(f(i, j));
            }
        }
        SymMatrix { n, tri }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Real {
        &self.tri[tri_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Real) {
        self.tri[tri_index(i, j)] = v;
    }

    pub fn add_assign_scaled(&mut self, other: &SymMatrix, factor: &Real) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.tri.iter_mut().zip(other.tri.iter()) {
            *a += factor * b;
        }
    }

    pub fn to_dense(&self) -> Dense {
        Dense::from_fn(self.n, self.n, |i, j| self.get(i, j).clone())
    }

    pub fn fro_norm(&self) -> Real {
        self.to_dense().fro_norm()
    }

    pub fn max_abs(&self) -> Real {
        let mut m = real(0.0);
        for v in &self.tri {
            let a = v.clone().abs();
            if a > m {
                m = a;
            }
        }
        m
    }
}

/// Eigenpairs of a (generalized) symmetric problem, values ascending and
/// vectors stored as matching columns, orthonormal in the supplied metric.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Real>,
    pub vectors: Dense,
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(s: &SymMatrix) -> Result<Dense> {
    let n = s.dim();
    let mut l = Dense::zeros(n, n);
    let mut sum = real(0.0);
    for j in 0..n {
        for i in j..n {
            sum.assign_from(s.get(i, j));
            for k in 0..j {
                sum -= l.at(i, k) * l.at(j, k);
            }
            if i == j {
                if sum <= 0 {
                    return Err(Error::NonPositiveDefinite(j));
                }
                let piv = sum.clone().sqrt();
                l.set(j, j, piv);
            } else {
                let v = sum.clone() / l.at(j, j);
                l.set(i, j, v);
            }
        }
    }
    Ok(l)
}

trait AssignFrom {
    fn assign_from(&mut self, other: &Real);
}

impl AssignFrom for Real {
    #[inline]
    fn assign_from(&mut self, other: &Real) {
        use rug::Assign;
        self.assign(other);
    }
}

/// In place: B <- L^{-1} B for lower-triangular L.
fn solve_lower_in_place(l: &Dense, b: &mut Dense) {
    let n = l.rows();
    for j in 0..b.cols() {
        for i in 0..n {
            let mut acc = b.at(i, j).clone();
            for k in 0..i {
                acc -= l.at(i, k) * b.at(k, j);
            }
            acc /= l.at(i, i);
            b.set(i, j, acc);
        }
    }
}

/// In place: x <- L^{-T} x for lower-triangular L.
fn solve_lower_transposed_vec(l: &Dense, x: &mut [Real]) {
    let n = l.rows();
    for ii in (0..n).rev() {
        let mut acc = x[ii].clone();
        for k in ii + 1..n {
            acc -= l.at(k, ii) * &x[k];
        }
        acc /= l.at(ii, ii);
        x[ii] = acc;
    }
}

/// C = L^{-1} A L^{-T} in dense form.
fn reduce_to_standard(a: &SymMatrix, l: &Dense) -> Dense {
    let mut y = a.to_dense();
    solve_lower_in_place(l, &mut y); // Y = L^{-1} A
    let mut yt = y.transpose();
    solve_lower_in_place(l, &mut yt); // L^{-1} Y^T = C^T = C
    yt
}

fn back_transform_columns(l: &Dense, v: &mut Dense) {
    let n = v.rows();
    let mut col = vec![real(0.0); n];
    for j in 0..v.cols() {
        for i in 0..n {
            mem::swap(&mut col[i], v.at_mut(i, j));
        }
        solve_lower_transposed_vec(l, &mut col);
        for i in 0..n {
            mem::swap(&mut col[i], v.at_mut(i, j));
        }
    }
}

fn sort_pairs(values: &mut [Real], vectors: &mut Dense) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let old_vals: Vec<Real> = values.to_vec();
    let old_vecs = vectors.clone();
    for (new_j, &old_j) in order.iter().enumerate() {
        values[new_j] = old_vals[old_j].clone();
        for i in 0..vectors.rows() {
            *vectors.at_mut(i, new_j) = old_vecs.at(i, old_j).clone();
        }
    }
}

fn off_diagonal_fro(c: &Dense) -> Real {
    let n = c.rows();
    let mut s = real(0.0);
    for i in 0..n {
        for j in i + 1..n {
            s += c.at(i, j) * c.at(i, j);
        }
    }
    s *= real(2.0);
    s.sqrt()
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Two-sided Jacobi on a dense symmetric matrix, in place. Returns eigenpairs
/// of `c` (unsorted). `threshold` is the absolute off-diagonal Frobenius
/// target; the numerical floor `n*eps*||C||_F` also terminates the sweep loop.
fn jacobi_eig(c: &mut Dense, threshold: &Real) -> Result<(Vec<Real>, Dense)> {
    let n = c.rows();
    let mut v = Dense::identity(n);
    if n <= 1 {
        let vals = (0..n).map(|i| c.at(i, i).clone()).collect();
        return Ok((vals, v));
    }
    let floor = {
        let mut f = c.fro_norm();
        f *= real(n as f64);
        f *= eps();
        f
    };
    let mut tp = real(0.0);
    let mut tq = real(0.0);
    let mut r1 = real(0.0);
    let mut r2 = real(0.0);
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_fro(c);
        if off <= *threshold || off <= floor {
            let mut values: Vec<Real> = (0..n).map(|i| c.at(i, i).clone()).collect();
            sort_pairs(&mut values, &mut v);
            return Ok((values, v));
        }
        let rotate_floor = {
            let mut f = off.clone();
            f *= eps();
            f
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq_abs = c.at(p, q).clone().abs();
                if apq_abs <= rotate_floor {
                    continue;
                }
                // rotation angle from tau = (a_qq - a_pp) / (2 a_pq)
                let mut tau = c.at(q, q).clone();
                tau -= c.at(p, p);
                tau /= c.at(p, q);
                tau /= real(2.0);
                let mut t = tau.clone().abs();
                t += (tau.clone().square() + real(1.0)).sqrt();
                t.recip_mut();
                if tau.is_sign_negative() {
                    t = -t;
                }
                let cos = (t.clone().square() + real(1.0)).sqrt().recip();
                let sin = t.clone() * &cos;
                let apq = c.at(p, q).clone();
                // diagonal and pivot updates
                let shift = t.clone() * &apq;
                *c.at_mut(p, p) -= &shift;
                *c.at_mut(q, q) += &shift;
                c.set(p, q, real(0.0));
                // remaining entries of rows/columns p and q (upper triangle)
                let mut rot = |cm: &mut Dense, ip: (usize, usize), iq: (usize, usize)| {
                    tp.assign_from(cm.at(ip.0, ip.1));
                    tq.assign_from(cm.at(iq.0, iq.1));
                    r1.assign_from(&tp);
                    r1 *= &cos;
                    r1 -= &sin * &tq;
                    r2.assign_from(&tq);
                    r2 *= &cos;
                    r2 += &sin * &tp;
                    mem::swap(cm.at_mut(ip.0, ip.1), &mut r1);
                    mem::swap(cm.at_mut(iq.0, iq.1), &mut r2);
                };
                for k in 0..p {
                    rot(c, (k, p), (k, q));
                }
                for k in p + 1..q {
                    rot(c, (p, k), (k, q));
                }
                for k in q + 1..n {
                    rot(c, (p, k), (q, k));
                }
                for k in 0..n {
                    rot(&mut v, (k, p), (k, q));
                }
                let _ = sweep;
            }
        }
    }
    Err(Error::NoConvergence(JACOBI_MAX_SWEEPS))
}

fn jacobi_threshold(a_norm: &Real) -> Real {
    // 10^-(digits-4) relative to ||A||_F; 1e-30 at the default 34 digits
    let digits = crate::precision::precision_digits() as i32;
    let mut t = real(10.0).pow(-(digits - 4));
    t *= a_norm;
    t
}

trait PowI {
    fn pow(self, e: i32) -> Real;
}
impl PowI for Real {
    fn pow(self, e: i32) -> Real {
        use rug::ops::Pow;
        Pow::pow(self, e)
    }
}

/// All eigenpairs of the symmetric pencil `A v = lambda S v` with
/// S-orthonormal eigenvectors, values ascending. Two-sided Jacobi on the
/// Cholesky-reduced standard problem.
pub fn geneig_sym(a: &SymMatrix, s: &SymMatrix) -> Result<EigenDecomposition> {
    if a.dim() != s.dim() {
        return Err(Error::Dimension(format!(
            "pencil dims {} vs {}",
            a.dim(),
            s.dim()
        )));
    }
    let l = cholesky(s)?;
    let mut c = reduce_to_standard(a, &l);
    let threshold = jacobi_threshold(&a.to_dense().fro_norm());
    let (values, mut vectors) = jacobi_eig(&mut c, &threshold)?;
    back_transform_columns(&l, &mut vectors);
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenpairs of a dense symmetric matrix (ordinary problem), Jacobi.
pub fn eig_sym_dense(c: &Dense) -> Result<EigenDecomposition> {
    let mut work = c.clone();
    let threshold = jacobi_threshold(&c.fro_norm());
    let (values, vectors) = jacobi_eig(&mut work, &threshold)?;
    Ok(EigenDecomposition { values, vectors })
}

// ---------------------------------------------------------------------------
// Householder tridiagonalization + implicit QL: the fast eigensolver path.
// ---------------------------------------------------------------------------

/// Tridiagonalize a symmetric dense matrix in place; returns (d, e) with the
/// accumulated orthogonal transform left in `a` when `accumulate` is set.
fn householder_tridiag(a: &mut Dense, accumulate: bool) -> (Vec<Real>, Vec<Real>) {
    let n = a.rows();
    let mut d = vec![real(0.0); n];
    let mut e = vec![real(0.0); n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = real(0.0);
        if l > 0 {
            let mut scale = real(0.0);
            for k in 0..=l {
                scale += a.at(i, k).clone().abs();
            }
            if scale.is_zero() {
                e[i] = a.at(i, l).clone();
            } else {
                for k in 0..=l {
                    *a.at_mut(i, k) /= &scale;
                    h += a.at(i, k) * a.at(i, k);
                }
                let f = a.at(i, l).clone();
                let mut g = h.clone().sqrt();
                if !f.is_sign_negative() {
                    g = -g;
                }
                e[i] = scale.clone() * &g;
                h -= &f * &g;
                a.set(i, l, f - &g);
                let mut ff = real(0.0);
                for j in 0..=l {
                    if accumulate {
                        let v = a.at(i, j).clone() / &h;
                        a.set(j, i, v);
                    }
                    let mut gg = real(0.0);
                    for k in 0..=j {
                        gg += a.at(j, k) * a.at(i, k);
                    }
                    for k in j + 1..=l {
                        gg += a.at(k, j) * a.at(i, k);
                    }
                    e[j] = gg / &h;
                    ff += &e[j] * a.at(i, j);
                }
                let hh = ff / (h.clone() * real(2.0));
                for j in 0..=l {
                    let t = &hh * a.at(i, j);
                    e[j] -= t;
                }
                for j in 0..=l {
                    let f = a.at(i, j).clone();
                    let g = e[j].clone();
                    for k in 0..=j {
                        let mut t = f.clone() * &e[k];
                        t += &g * a.at(i, k);
                        *a.at_mut(j, k) -= &t;
                    }
                }
            }
        } else {
            e[i] = a.at(i, l).clone();
        }
        d[i] = h;
    }
    if accumulate {
        d[0] = real(0.0);
        e[0] = real(0.0);
        for i in 0..n {
            if i > 0 && !d[i].is_zero() {
                for j in 0..i {
                    let mut g = real(0.0);
                    for k in 0..i {
                        g += a.at(i, k) * a.at(k, j);
                    }
                    for k in 0..i {
                        let t = g.clone() * a.at(k, i);
                        *a.at_mut(k, j) -= &t;
                    }
                }
            }
            d[i] = a.at(i, i).clone();
            a.set(i, i, real(1.0));
            for j in 0..i {
                a.set(j, i, real(0.0));
                a.set(i, j, real(0.0));
            }
        }
    } else {
        for i in 0..n {
            d[i] = a.at(i, i).clone();
        }
        e[0] = real(0.0);
    }
    (d, e)
}

fn hypot_r(a: &Real, b: &Real) -> Real {
    let mut s = a.clone().square();
    s += b.clone().square();
    s.sqrt()
}

/// Implicit-shift QL on a tridiagonal (d, e). Rotations are accumulated into
/// the columns of `z` when provided.
fn tql_implicit(d: &mut [Real], e: &mut [Real], mut z: Option<&mut Dense>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i].clone();
    }
    e[n - 1] = real(0.0);
    let machine_eps = eps();
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let mut dd = d[m].clone().abs();
                dd += d[m + 1].clone().abs();
                dd *= &machine_eps;
                if e[m].clone().abs() <= dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence(iter));
            }
            let mut g = d[l + 1].clone();
            g -= &d[l];
            g /= &e[l];
            g /= real(2.0);
            let r = hypot_r(&g, &real(1.0));
            let denom = if g.is_sign_negative() {
                g.clone() - &r
            } else {
                g.clone() + &r
            };
            let mut gg = d[m].clone();
            gg -= &d[l];
            gg += e[l].clone() / denom;
            let mut s = real(1.0);
            let mut c = real(1.0);
            let mut p = real(0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s.clone() * &e[i];
                let b = c.clone() * &e[i];
                let r = hypot_r(&f, &gg);
                e[i + 1] = r.clone();
                if r.is_zero() {
                    d[i + 1] -= &p;
                    e[m] = real(0.0);
                    underflow = true;
                    break;
                }
                s = f / &r;
                c = gg.clone() / &r;
                gg = d[i + 1].clone();
                gg -= &p;
                let mut rr = d[i].clone();
                rr -= &gg;
                rr *= &s;
                let mut t = c.clone();
                t *= &b;
                t *= real(2.0);
                rr += &t;
                p = s.clone() * &rr;
                d[i + 1] = gg.clone() + &p;
                gg = c.clone() * &rr;
                gg -= &b;
                if let Some(zm) = z.as_deref_mut() {
                    for k in 0..zm.rows() {
                        let fz = zm.at(k, i + 1).clone();
                        let mut a = s.clone();
                        a *= zm.at(k, i);
                        a += &c * &fz;
                        let mut bz = c.clone();
                        bz *= zm.at(k, i);
                        bz -= &s * &fz;
                        zm.set(k, i + 1, a);
                        zm.set(k, i, bz);
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= &p;
            e[l] = gg;
            e[m] = real(0.0);
        }
    }
    Ok(())
}

/// Fast generalized symmetric eigensolver (tridiagonalization + implicit QL).
/// Same contract as [`geneig_sym`]; vectors are skipped when not requested.
pub fn geneig_sym_fast(a: &SymMatrix, s: &SymMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    let l = cholesky(s)?;
    let mut c = reduce_to_standard(a, &l);
    let (mut d, mut e) = householder_tridiag(&mut c, want_vectors);
    if want_vectors {
        tql_implicit(&mut d, &mut e, Some(&mut c))?;
        back_transform_columns(&l, &mut c);
        sort_pairs(&mut d, &mut c);
        Ok(EigenDecomposition {
            values: d,
            vectors: c,
        })
    } else {
        tql_implicit(&mut d, &mut e, None)?;
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(EigenDecomposition {
            values: d,
            vectors: Dense::zeros(0, 0),
        })
    }
}

/// Eigenpairs of a dense symmetric matrix via the fast path.
pub fn eig_sym_dense_fast(m: &Dense, want_vectors: bool) -> Result<EigenDecomposition> {
    let mut c = m.clone();
    let (mut d, mut e) = householder_tridiag(&mut c, want_vectors);
    if want_vectors {
        tql_implicit(&mut d, &mut e, Some(&mut c))?;
        sort_pairs(&mut d, &mut c);
        Ok(EigenDecomposition {
            values: d,
            vectors: c,
        })
    } else {
        tql_implicit(&mut d, &mut e, None)?;
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(EigenDecomposition {
            values: d,
            vectors: Dense::zeros(0, 0),
        })
    }
}

/// Lowest generalized eigenvalue of the pencil, values-only fast path.
pub fn geneig_lowest(a: &SymMatrix, s: &SymMatrix) -> Result<Real> {
    let dec = geneig_sym_fast(a, s, false)?;
    Ok(dec.values.into_iter().next().unwrap())
}

/// Ordinary least squares `min ||design x - rhs||_2` by Householder QR at
/// working precision. Returns the coefficients and the root-mean-square
/// residual.
pub fn least_squares(design: &Dense, rhs: &[Real]) -> Result<(Vec<Real>, Real)> {
    let n = design.rows();
    let k = design.cols();
    if rhs.len() != n {
        return Err(Error::Dimension(format!("rhs len {} vs {} rows", rhs.len(), n)));
    }
    if n < k {
        return Err(Error::Dimension(format!("underdetermined: {n} rows, {k} cols")));
    }
    let mut a = design.clone();
    let mut b: Vec<Real> = rhs.to_vec();
    // conditioning floor from the largest column norm
    let mut max_col = real(0.0);
    for j in 0..k {
        let mut s = real(0.0);
        for i in 0..n {
            s += a.at(i, j) * a.at(i, j);
        }
        let s = s.sqrt();
        if s > max_col {
            max_col = s;
        }
    }
    let floor = {
        let mut f = eps();
        f *= real(n as f64);
        f *= &max_col;
        f
    };
    let mut diag = Vec::with_capacity(k);
    for j in 0..k {
        // Householder vector for column j
        let mut norm = real(0.0);
        for i in j..n {
            norm += a.at(i, j) * a.at(i, j);
        }
        let mut norm = norm.sqrt();
        if norm <= floor {
            return Err(Error::RankDeficient { pivot: j });
        }
        if a.at(j, j).is_sign_negative() {
            norm = -norm;
        }
        for i in j..n {
            *a.at_mut(i, j) /= &norm;
        }
        *a.at_mut(j, j) += real(1.0);
        // apply to remaining columns
        for jj in j + 1..k {
            let mut s = real(0.0);
            for i in j..n {
                s += a.at(i, j) * a.at(i, jj);
            }
            s /= a.at(j, j);
            for i in j..n {
                let t = s.clone() * a.at(i, j);
                *a.at_mut(i, jj) -= &t;
            }
        }
        // apply to rhs
        let mut s = real(0.0);
        for i in j..n {
            s += a.at(i, j) * &b[i];
        }
        s /= a.at(j, j);
        for i in j..n {
            let t = s.clone() * a.at(i, j);
            b[i] -= &t;
        }
        diag.push(-norm);
    }
    // back substitution on R (diag in `diag`, strict upper in `a`)
    let mut x = vec![real(0.0); k];
    for j in (0..k).rev() {
        let mut acc = b[j].clone();
        for jj in j + 1..k {
            acc -= a.at(j, jj) * &x[jj];
        }
        acc /= &diag[j];
        x[j] = acc;
    }
    let mut res = real(0.0);
    for i in k..n {
        res += &b[i] * &b[i];
    }
    res /= real(n as f64);
    Ok((x, res.sqrt()))
}
